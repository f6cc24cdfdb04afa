//! Sphere-bundle points and the local geometry around them.
//!
//! Chart coordinates on `SM` are `z = (x¹…xⁿ, θ¹…θ^{n−1})`. The fiber
//! direction is `u(θ)` (the unit circle for `n = 2`, spherical angles for
//! `n = 3`) and the point of `SM` is `y = u / F(x, u)`. [`SmGeometry`] holds
//! every quantity as a jet in `z`, so exterior derivatives are exact.

use crate::error::{GbcError, Result};
use crate::jet::{JetSpace, OJet, Scalar};
use crate::linalg::{bilinear, inverse, Mat};

use super::metric::Metric;
use super::tensors::{FinslerJets, Tensor3};

/// A point of `SM` in chart coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SpherePoint {
    pub chart: usize,
    pub x: Vec<f64>,
    pub theta: Vec<f64>,
}

impl SpherePoint {
    pub fn new(chart: usize, x: Vec<f64>, theta: Vec<f64>) -> Result<Self> {
        if theta.len() + 1 != x.len() {
            return Err(GbcError::Dimension(format!("{} base and {} fiber coordinates", x.len(), theta.len())));
        }
        Ok(SpherePoint { chart, x, theta })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// `z = (x, θ)`.
    pub fn z(&self) -> Vec<f64> {
        self.x.iter().chain(&self.theta).copied().collect()
    }

    pub fn from_z(chart: usize, n: usize, z: &[f64]) -> Self {
        SpherePoint { chart, x: z[..n].to_vec(), theta: z[n..].to_vec() }
    }

    /// The representative `y` with `F(x, y) = 1`.
    pub fn y(&self, metric: &Metric) -> Vec<f64> {
        let u = direction(&self.theta);
        let f = metric.f(self.chart, &self.x, &u);
        u.iter().map(|v| v / f).collect()
    }
}

/// Euclidean unit direction with fiber coordinates `θ`.
pub fn direction<S: Scalar>(theta: &[S]) -> Vec<S> {
    match theta.len() {
        1 => vec![theta[0].cos(), theta[0].sin()],
        2 => {
            let s = theta[0].sin();
            vec![s.clone() * theta[1].cos(), s * theta[1].sin(), theta[0].cos()]
        }
        k => panic!("fiber charts exist for n = 2, 3 only (got {k} angles)"),
    }
}

/// Gram–Schmidt frame with `e_n = y` (assumes `g(y, y) = 1`). Coordinate
/// vectors are taken in index order, skipping the one most aligned with `y`;
/// the pivot choice is made on values so the frame is smooth nearby.
pub fn gram_schmidt_frame<S: Scalar>(g: &Mat<S>, y: &[S]) -> Result<Mat<S>> {
    gram_schmidt_frame_skipping(g, y, None).map(|(f, _)| f)
}

/// As [`gram_schmidt_frame`], optionally with a prescribed skipped coordinate
/// vector. Returns the frame and the index actually skipped.
pub fn gram_schmidt_frame_skipping<S: Scalar>(g: &Mat<S>, y: &[S], fixed: Option<usize>) -> Result<(Mat<S>, usize)> {
    let n = y.len();
    let zero = y[0].zero_like();
    let basis = |i: usize| -> Vec<S> { (0..n).map(|k| zero.lift(if k == i { 1.0 } else { 0.0 })).collect() };
    let mut order: Vec<usize> = (0..n).collect();
    let align: Vec<f64> = (0..n).map(|i| bilinear(g, &basis(i), y).re().abs()).collect();
    let skip = fixed.unwrap_or_else(|| (0..n).max_by(|&a, &b| align[a].total_cmp(&align[b])).unwrap_or(0));
    order.retain(|&i| i != skip);
    let mut cols: Vec<Vec<S>> = Vec::with_capacity(n);
    for &i in &order {
        let mut v = basis(i);
        for e in cols.iter().chain(std::iter::once(&y.to_vec())) {
            let c = bilinear(g, &v, e);
            v = v.iter().zip(e).map(|(a, b)| a.clone() - c.clone() * b.clone()).collect();
        }
        let norm2 = bilinear(g, &v, &v);
        if norm2.re() < 1e-20 {
            return Err(GbcError::Chart("degenerate Gram–Schmidt pivot".into()));
        }
        let inv = norm2.sqrt().recip();
        cols.push(v.into_iter().map(|a| a * inv.clone()).collect());
    }
    cols.push(y.to_vec());
    // E[i][a] = component i of e_a
    Ok(((0..n).map(|i| (0..n).map(|a| cols[a][i].clone()).collect()).collect(), skip))
}

/// `M[α][β] = −g(e_α, ∂y/∂θ^β)`: the restriction of `ϖ^n_α` to the fiber.
/// Its determinant is the fiber volume density.
pub fn fiber_density_matrix<S: Scalar>(g: &Mat<S>, frame: &Mat<S>, dy: &[Vec<S>]) -> Mat<S> {
    let n = frame.len();
    (0..n - 1)
        .map(|a| {
            let ea: Vec<S> = (0..n).map(|i| frame[i][a].clone()).collect();
            dy.iter().map(|d| -bilinear(g, &ea, d)).collect()
        })
        .collect()
}

/// Flip `e_1` if needed so that the fiber volume density is positive.
/// Returns whether it flipped.
pub fn orient_frame<S: Scalar>(frame: &mut Mat<S>, g: &Mat<S>, dy: &[Vec<S>]) -> Result<bool> {
    let m = fiber_density_matrix(g, frame, dy);
    let vals: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|v| v.re()).collect()).collect();
    let d = crate::linalg::det_f64(&vals);
    if d.abs() < 1e-14 {
        return Err(GbcError::Orientation("fiber chart is degenerate here".into()));
    }
    if d < 0.0 {
        flip_first(frame);
    }
    Ok(d < 0.0)
}

fn flip_first<S: Scalar>(frame: &mut Mat<S>) {
    for row in frame.iter_mut() {
        row[0] = -row[0].clone();
    }
}

/// Everything needed for connection and curvature forms at one point, as jets
/// of order `order` in the chart coordinates `z`.
#[derive(Clone, Debug)]
pub struct SmGeometry {
    pub n: usize,
    pub point: SpherePoint,
    /// The jet variables `z`.
    pub z: Vec<OJet>,
    pub x: Vec<OJet>,
    pub y: Vec<OJet>,
    pub jets: FinslerJets<OJet>,
    pub ginv: Mat<OJet>,
    pub spray: Vec<OJet>,
    pub nonlinear: Mat<OJet>,
    /// `gamma[l][j][k] = Γ^l_{jk}` (Chern).
    pub gamma: Tensor3<OJet>,
    /// Columns are the orthonormal frame `e_a` in the `∂/∂x` basis.
    pub frame: Mat<OJet>,
    pub frame_inv: Mat<OJet>,
    /// Cartan tensor in the frame, `A_{abc}`.
    pub cartan: Tensor3<OJet>,
    /// Frame choices made at this point; pass them to [`SmGeometry::with_frame`]
    /// to get the same smooth frame at nearby points.
    pub frame_choice: FrameChoice,
}

/// Discrete choices in building the frame: the skipped coordinate vector and
/// whether `e_1` was flipped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FrameChoice {
    pub skip: usize,
    pub flipped: bool,
}

impl SmGeometry {
    pub fn new(metric: &Metric, point: &SpherePoint, order: usize) -> Result<Self> {
        Self::build(metric, point, order, None, None)
    }

    /// Same frame branch as `choice`, no re-pivoting or re-orienting.
    pub fn with_frame(metric: &Metric, point: &SpherePoint, order: usize, choice: FrameChoice) -> Result<Self> {
        Self::build(metric, point, order, Some(choice.skip), Some(choice.flipped))
    }

    /// Gram–Schmidt skipping coordinate vector `skip`, then oriented as usual.
    /// Different pivots give frames related by an oriented rotation of `e_1..e_{n−1}`.
    pub fn with_pivot(metric: &Metric, point: &SpherePoint, order: usize, skip: usize) -> Result<Self> {
        if skip >= point.dim() {
            return Err(GbcError::Dimension(format!("pivot {skip} out of range")));
        }
        Self::build(metric, point, order, Some(skip), None)
    }

    fn build(metric: &Metric, point: &SpherePoint, order: usize, skip: Option<usize>, flip: Option<bool>) -> Result<Self> {
        let n = point.dim();
        if n != metric.dim() {
            return Err(GbcError::Dimension(format!("point of dimension {n} for a metric of dimension {}", metric.dim())));
        }
        let m = 2 * n - 1;
        let space = JetSpace::get(m, order);
        let zv = point.z();
        let z: Vec<OJet> = (0..m).map(|i| OJet::variable(space, zv[i], i)).collect();
        let x = z[..n].to_vec();
        let u = direction(&z[n..]);
        let fu = metric.f(point.chart, &x, &u);
        let y: Vec<OJet> = u.iter().map(|v| v.clone() / fu.clone()).collect();
        let jets = FinslerJets::compute(metric, point.chart, &x, &y);
        let gvals: Vec<Vec<f64>> = jets.g.iter().map(|r| r.iter().map(|v| v.re()).collect()).collect();
        for k in 1..=n {
            let minor: Vec<Vec<f64>> = gvals[..k].iter().map(|r| r[..k].to_vec()).collect();
            if crate::linalg::det_f64(&minor) <= 0.0 {
                return Err(GbcError::MetricDomain("fundamental tensor is not positive definite".into()));
            }
        }
        let ginv = inverse(&jets.g)?;
        let (spray, nonlinear) = jets.spray(&ginv, &y);
        let gamma = jets.chern_gamma(&ginv, &nonlinear);
        let (mut frame, skip) = gram_schmidt_frame_skipping(&jets.g, &y, skip)?;
        let flipped = match flip {
            Some(f) => {
                if f {
                    flip_first(&mut frame);
                }
                f
            }
            None => {
                if order == 0 {
                    return Err(GbcError::Truncation("frame orientation needs first derivatives".into()));
                }
                let dy: Vec<Vec<OJet>> = (0..n - 1).map(|b| y.iter().map(|v| v.partial(n + b)).collect()).collect();
                orient_frame(&mut frame, &jets.g, &dy)?
            }
        };
        let frame_inv = inverse(&frame)?;
        let a = jets.cartan();
        let zero = z[0].zero_like();
        let cartan = (0..n)
            .map(|p| {
                (0..n)
                    .map(|q| {
                        (0..n)
                            .map(|r| {
                                let mut acc = zero.clone();
                                for i in 0..n {
                                    for j in 0..n {
                                        for k in 0..n {
                                            acc = acc
                                                + a[i][j][k].clone()
                                                    * frame[i][p].clone()
                                                    * frame[j][q].clone()
                                                    * frame[k][r].clone();
                                        }
                                    }
                                }
                                acc
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(SmGeometry {
            n,
            point: point.clone(),
            z,
            x,
            y,
            jets,
            ginv,
            spray,
            nonlinear,
            gamma,
            frame,
            frame_inv,
            cartan,
            frame_choice: FrameChoice { skip, flipped },
        })
    }

    /// Number of chart coordinates on `SM`.
    pub fn m(&self) -> usize {
        2 * self.n - 1
    }

    pub fn order(&self) -> usize {
        self.z[0].order()
    }
}
