//! Curvature of a connection on `π*TM`, the covariant derivative on the
//! mixed algebra, and the objects `Θ_t`, `U_t` built from them.

use crate::connection::{ConnectionForms, FormMatrix};
use crate::error::Result;
use crate::exterior::multivector::sort_sign;
use crate::exterior::{contract, Cx, Form, Multivector};
use crate::jet::{OJet, Scalar};

/// `Σ_{i<j} M[j][i] ⊗ e_i∧e_j`: a skew matrix of forms as an element of bidegree `(p, 2)`.
pub fn skew_to_mv(m: &FormMatrix) -> Multivector<OJet> {
    let n = m.len();
    let dim = m[0][0].dim();
    let mut out = Multivector::zero(dim, n, m[0][0].unit());
    for i in 0..n {
        for j in i + 1..n {
            for (&f, c) in m[j][i].terms() {
                out.add_term(f, (1 << i) | (1 << j), Cx::real(c.clone()));
            }
        }
    }
    out
}

/// `1 ⊗ e_n`.
pub fn ell(n: usize, m: usize, proto: &OJet) -> Multivector<OJet> {
    Multivector::fiber_generator(m, n, n - 1, proto)
}

/// `∇ℓ = Σ_k ϖ[k][n] ⊗ e_k`.
pub fn nabla_ell(cf: &ConnectionForms) -> Multivector<OJet> {
    let n = cf.n;
    let dim = cf.pi[0][0].dim();
    let mut out = Multivector::zero(dim, n, cf.pi[0][0].unit());
    for k in 0..n {
        for (&f, c) in cf.pi[k][n - 1].terms() {
            out.add_term(f, 1 << k, Cx::real(c.clone()));
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct CurvatureData {
    pub n: usize,
    /// `omega[i][j] = dϖ[i][j] + Σ_k ϖ[i][k] ∧ ϖ[k][j]`.
    pub omega: FormMatrix,
}

impl CurvatureData {
    /// `Ω` in bidegree `(2, 2)`.
    pub fn as_mv(&self) -> Multivector<OJet> {
        skew_to_mv(&self.omega)
    }

    /// Largest `|Ω[i][j] + Ω[j][i]|`.
    pub fn skew_defect(&self) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                r = r.max(self.omega[i][j].add(&self.omega[j][i]).max_abs());
            }
        }
        r
    }
}

pub fn curvature_forms(cf: &ConnectionForms) -> CurvatureData {
    let n = cf.n;
    let omega = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut f = cf.pi[i][j].d();
                    for k in 0..n {
                        f = f.add(&cf.pi[i][k].wedge(&cf.pi[k][j]));
                    }
                    f
                })
                .collect()
        })
        .collect();
    CurvatureData { n, omega }
}

/// Covariant derivative on the mixed algebra:
/// `∇(a ⊗ e_J) = da ⊗ e_J + (−1)^{|a|} Σ_r Σ_k (a ∧ ϖ[k][j_r]) ⊗ e_{J, j_r → k}`.
pub fn nabla_on_a(elem: &Multivector<OJet>, pi: &FormMatrix) -> Multivector<OJet> {
    let n = elem.n_fiber();
    let mut out = elem.ext_d();
    for (&(f, b), c) in elem.terms() {
        let a = split_coeff(elem.n_form(), f, c);
        let deg_sign = if f.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        let js: Vec<usize> = (0..n).filter(|j| b & (1 << j) != 0).collect();
        for (r, &jr) in js.iter().enumerate() {
            for k in 0..n {
                let mut idx = js.clone();
                idx[r] = k;
                let Some((mask, s)) = sort_sign(&idx) else { continue };
                let (re, im) = (a.0.wedge(&pi[k][jr]), a.1.wedge(&pi[k][jr]));
                for (&fm, v) in re.terms() {
                    out.add_term(fm, mask, Cx::new(v.clone() * (s * deg_sign), v.zero_like()));
                }
                for (&fm, v) in im.terms() {
                    out.add_term(fm, mask, Cx::new(v.zero_like(), v.clone() * (s * deg_sign)));
                }
            }
        }
    }
    out
}

/// Split a complex coefficient on one form monomial into real and imaginary forms.
fn split_coeff(dim: usize, mask: u32, c: &Cx<OJet>) -> (Form<OJet>, Form<OJet>) {
    let mut re = Form::zero(dim, &c.re);
    re.add_term(mask, c.re.clone());
    let mut im = Form::zero(dim, &c.im);
    im.add_term(mask, c.im.clone());
    (re, im)
}

/// `Θ_t = t²/2 + i t ∇ℓ + Ω`.
pub fn theta_t(omega_mv: &Multivector<OJet>, nabla_ell: &Multivector<OJet>, t: f64) -> Result<Multivector<OJet>> {
    let scalar = Multivector::scalar(omega_mv.n_form(), omega_mv.n_fiber(), Cx::lift(omega_mv.unit(), 0.5 * t * t, 0.0));
    scalar.add(&nabla_ell.scale_c(0.0, t))?.add(omega_mv)
}

/// `e^{−Θ_t}`.
pub fn exp_neg_theta(omega_mv: &Multivector<OJet>, nabla_ell: &Multivector<OJet>, t: f64) -> Result<Multivector<OJet>> {
    theta_t(omega_mv, nabla_ell, t)?.neg().exp_even(None)
}

/// `U_t = ℬ(e^{−Θ_t})`, an `n`-form with complex coefficients.
pub fn u_t(cf: &ConnectionForms, curv: &CurvatureData, t: f64) -> Result<Multivector<OJet>> {
    Ok(exp_neg_theta(&curv.as_mv(), &nabla_ell(cf), t)?.berezin())
}

/// `‖d/dt U_t + i d ℬ(ℓ · e^{−Θ_t})‖`, with `d/dt` by a central difference of step `h`.
pub fn u_t_variation_residual(cf: &ConnectionForms, curv: &CurvatureData, t: f64, h: f64) -> Result<f64> {
    let om = curv.as_mv();
    let ne = nabla_ell(cf);
    let up = exp_neg_theta(&om, &ne, t + h)?.berezin();
    let um = exp_neg_theta(&om, &ne, t - h)?.berezin();
    let dudt = up.sub(&um)?.scale(0.5 / h);
    let l = ell(cf.n, om.n_form(), om.unit());
    let rhs = l.product(&exp_neg_theta(&om, &ne, t)?)?.berezin().ext_d().scale_c(0.0, 1.0);
    Ok(dudt.values().add(&rhs.values())?.max_abs())
}

/// `‖(∇ − i t ι(ℓ)) x‖` for an element `x` of the mixed algebra.
pub fn twisted_derivative_norm(x: &Multivector<OJet>, pi: &FormMatrix, t: f64) -> Result<f64> {
    let l = ell(x.n_fiber(), x.n_form(), x.unit());
    let nx = nabla_on_a(x, pi);
    let ix = contract(&l, x)?.scale_c(0.0, t);
    Ok(nx.values().sub(&ix.values())?.max_abs())
}

/// Central-difference exterior derivative with one Richardson level:
/// `D = (4 D(h/2) − D(h)) / 3`. The independent oracle for jet derivatives.
pub fn ext_d_fd(field: &dyn Fn(&[f64]) -> Form<f64>, z: &[f64], h: f64) -> Form<f64> {
    let central = |h: f64| {
        let dim = z.len();
        let mut out = Form::zero(dim, &1.0);
        for v in 0..dim {
            let mut zp = z.to_vec();
            let mut zm = z.to_vec();
            zp[v] += h;
            zm[v] -= h;
            let (fp, fm) = (field(&zp), field(&zm));
            let diff = fp.sub(&fm).scale(0.5 / h);
            let mut dv = Form::zero(dim, &1.0);
            dv.add_term(1 << v, 1.0);
            out = out.add(&dv.wedge(&diff));
        }
        out
    };
    let coarse = central(h);
    let fine = central(0.5 * h);
    fine.scale(4.0 / 3.0).sub(&coarse.scale(1.0 / 3.0))
}
