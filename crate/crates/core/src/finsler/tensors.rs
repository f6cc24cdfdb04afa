//! Fundamental tensor, Cartan tensor, spray and nonlinear connection.
//!
//! `F²(x + ξ, y + δ)` is expanded as a third-order jet in `(ξ, δ)` whose
//! coefficients are any [`Scalar`]; every tensor below is read off that one jet.

use crate::error::{GbcError, Result};
use crate::jet::{Jet, JetSpace, Scalar};
use crate::linalg::{inverse, Mat};

use super::metric::Metric;

pub type Tensor3<S> = Vec<Vec<Vec<S>>>;

/// Derivatives of `F²` at `(x, y)`.
#[derive(Clone, Debug)]
pub struct FinslerJets<S> {
    pub n: usize,
    pub f2: S,
    /// `½ ∂²F²/∂y^a∂y^b`.
    pub g: Mat<S>,
    /// `∂³F²/∂y^a∂y^b∂y^c`.
    pub c3: Tensor3<S>,
    /// `∂F²/∂x^k`.
    pub fx: Vec<S>,
    /// `fxy[k][l] = ∂²F²/∂x^k∂y^l`.
    pub fxy: Mat<S>,
    /// `fxyy[k][a][b] = ∂³F²/∂x^k∂y^a∂y^b`.
    pub fxyy: Tensor3<S>,
}

impl<S: Scalar> FinslerJets<S> {
    pub fn compute(metric: &Metric, chart: usize, x: &[S], y: &[S]) -> Self {
        let n = x.len();
        let space = JetSpace::get(2 * n, 3);
        let xs: Vec<Jet<S>> = (0..n).map(|i| Jet::variable(space, x[i].clone(), i)).collect();
        let ys: Vec<Jet<S>> = (0..n).map(|i| Jet::variable(space, y[i].clone(), n + i)).collect();
        let p = metric.f2(chart, &xs, &ys);
        let d = |xi: &[usize], dl: &[usize]| {
            let mut e = vec![0u8; 2 * n];
            for &k in xi {
                e[k] += 1;
            }
            for &k in dl {
                e[n + k] += 1;
            }
            p.deriv(&e)
        };
        let g = (0..n).map(|a| (0..n).map(|b| d(&[], &[a, b]) * 0.5).collect()).collect();
        let c3 = (0..n).map(|a| (0..n).map(|b| (0..n).map(|c| d(&[], &[a, b, c])).collect()).collect()).collect();
        let fx = (0..n).map(|k| d(&[k], &[])).collect();
        let fxy = (0..n).map(|k| (0..n).map(|l| d(&[k], &[l])).collect()).collect();
        let fxyy = (0..n).map(|k| (0..n).map(|a| (0..n).map(|b| d(&[k], &[a, b])).collect()).collect()).collect();
        FinslerJets { n, f2: p.value().clone(), g, c3, fx, fxy, fxyy }
    }

    /// `A_{abc} = (F/4) ∂³F²/∂y^a∂y^b∂y^c`.
    pub fn cartan(&self) -> Tensor3<S> {
        let f4 = self.f2.sqrt() * 0.25;
        self.c3.iter().map(|m| m.iter().map(|r| r.iter().map(|c| c.clone() * f4.clone()).collect()).collect()).collect()
    }

    /// Spray `G^i = ¼ g^{il}(F²_{x^k y^l} y^k − F²_{x^l})` and `N^i_j = ∂G^i/∂y^j`.
    pub fn spray(&self, ginv: &Mat<S>, y: &[S]) -> (Vec<S>, Mat<S>) {
        let n = self.n;
        let zero = self.f2.zero_like();
        let h: Vec<S> = (0..n)
            .map(|l| (0..n).fold(-self.fx[l].clone(), |acc, k| acc + self.fxy[k][l].clone() * y[k].clone()))
            .collect();
        // ∂H_l/∂y^j
        let dh: Mat<S> = (0..n)
            .map(|l| {
                (0..n)
                    .map(|j| {
                        let s = (0..n).fold(zero.clone(), |acc, k| acc + self.fxyy[k][l][j].clone() * y[k].clone());
                        s + self.fxy[j][l].clone() - self.fxy[l][j].clone()
                    })
                    .collect()
            })
            .collect();
        // ∂g^{il}/∂y^j = −g^{ia} ½c3[j][a][b] g^{bl}
        let dginv = |i: usize, l: usize, j: usize| {
            let mut acc = zero.clone();
            for a in 0..n {
                for b in 0..n {
                    acc = acc - ginv[i][a].clone() * self.c3[j][a][b].clone() * ginv[b][l].clone() * 0.5;
                }
            }
            acc
        };
        let gs: Vec<S> =
            (0..n).map(|i| (0..n).fold(zero.clone(), |acc, l| acc + ginv[i][l].clone() * h[l].clone()) * 0.25).collect();
        let nl: Mat<S> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(zero.clone(), |acc, l| {
                            acc + dginv(i, l, j) * h[l].clone() + ginv[i][l].clone() * dh[l][j].clone()
                        }) * 0.25
                    })
                    .collect()
            })
            .collect();
        (gs, nl)
    }

    /// Chern connection coefficients `Γ^l_{jk} = ½ g^{li}(δ_k g_ij + δ_j g_ik − δ_i g_jk)`
    /// with `δ_k = ∂_{x^k} − N^s_k ∂_{y^s}`.
    pub fn chern_gamma(&self, ginv: &Mat<S>, nl: &Mat<S>) -> Tensor3<S> {
        let n = self.n;
        let zero = self.f2.zero_like();
        // dg[k][i][j] = δ_k g_ij
        let dg: Tensor3<S> = (0..n)
            .map(|k| {
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                let vert = (0..n)
                                    .fold(zero.clone(), |acc, s| acc + nl[s][k].clone() * self.c3[s][i][j].clone());
                                (self.fxyy[k][i][j].clone() - vert) * 0.5
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        (0..n)
            .map(|l| {
                (0..n)
                    .map(|j| {
                        (0..n)
                            .map(|k| {
                                (0..n).fold(zero.clone(), |acc, i| {
                                    acc + ginv[l][i].clone()
                                        * (dg[k][i][j].clone() + dg[j][i][k].clone() - dg[i][j][k].clone())
                                }) * 0.5
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }
}

fn check_positive(g: &Mat<f64>) -> Result<()> {
    // leading principal minors
    for k in 1..=g.len() {
        let minor: Mat<f64> = g[..k].iter().map(|r| r[..k].to_vec()).collect();
        let d = crate::linalg::det_f64(&minor);
        if !(d > 0.0) {
            return Err(GbcError::MetricDomain(format!("fundamental tensor has non-positive minor {d:e}")));
        }
    }
    Ok(())
}

fn check_direction(y: &[f64]) -> Result<()> {
    if y.iter().all(|v| *v == 0.0) {
        return Err(GbcError::Domain("y must be non-zero".into()));
    }
    Ok(())
}

/// `g_ij = ½ ∂²F²/∂y^i∂y^j`.
pub fn fundamental_tensor(metric: &Metric, chart: usize, x: &[f64], y: &[f64]) -> Result<Mat<f64>> {
    check_direction(y)?;
    let j = FinslerJets::compute(metric, chart, x, y);
    check_positive(&j.g)?;
    Ok(j.g)
}

/// `A_ijk = (F/4) ∂³F²/∂y^i∂y^j∂y^k`.
pub fn cartan_tensor(metric: &Metric, chart: usize, x: &[f64], y: &[f64]) -> Result<Tensor3<f64>> {
    check_direction(y)?;
    let j = FinslerJets::compute(metric, chart, x, y);
    check_positive(&j.g)?;
    Ok(j.cartan())
}

/// Spray coefficients `G^i` and nonlinear connection `N^i_j`.
pub fn spray_and_nonlinear(metric: &Metric, chart: usize, x: &[f64], y: &[f64]) -> Result<(Vec<f64>, Mat<f64>)> {
    check_direction(y)?;
    let j = FinslerJets::compute(metric, chart, x, y);
    check_positive(&j.g)?;
    let ginv = inverse(&j.g)?;
    Ok(j.spray(&ginv, y))
}
