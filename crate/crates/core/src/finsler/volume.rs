//! Fiber volume `V(x)` of the indicatrix in the `g`-induced metric.
//!
//! The integrand is the restriction of `ϖ^n_1∧…∧ϖ^n_{n−1}` to `S_xM`, which
//! in fiber coordinates is `det[−g(e_α, ∂y/∂θ^β)]`. We integrate over the
//! full indicatrix (both `±y`), which is the natural reading for
//! non-reversible metrics.

use crate::error::{GbcError, Result};
use crate::jet::{Dual, Jet, JetSpace, OJet, Scalar, DUAL_VARS};
use crate::linalg::{det, Mat};
use crate::numeric::{gauss_legendre_on, trapezoid_periodic, CompensatedSum};

use super::geometry::{direction, fiber_density_matrix, gram_schmidt_frame, orient_frame};
use super::metric::Metric;

/// Fiber quadrature nodes `(θ, weight)`: periodic trapezoid for `n = 2`;
/// Gauss–Legendre in the polar angle times trapezoid in azimuth for `n = 3`.
pub fn fiber_nodes(n: usize, order: usize) -> Vec<(Vec<f64>, f64)> {
    match n {
        2 => trapezoid_periodic(order).into_iter().map(|(t, w)| (vec![t], w)).collect(),
        3 => {
            let polar = gauss_legendre_on(order.div_ceil(2).max(2), 0.0, std::f64::consts::PI);
            let az = trapezoid_periodic(order);
            polar
                .iter()
                .flat_map(|&(a, wa)| az.iter().map(move |&(b, wb)| (vec![a, b], wa * wb)))
                .collect()
        }
        _ => panic!("fiber quadrature exists for n = 2, 3 only"),
    }
}

/// Density of `dV` at fiber coordinate `θ`, generic in the base point.
pub fn fiber_density<S: Scalar>(metric: &Metric, chart: usize, x: &[S], theta: &[f64]) -> Result<S> {
    let n = x.len();
    let space = JetSpace::get(n, 2);
    let proto = x[0].zero_like();
    let th: Vec<f64> = theta.to_vec();
    let u = direction(&th);
    let ud: Vec<Jet<S>> = (0..n).map(|i| Jet::variable(space, proto.lift(u[i]), i)).collect();
    let xs: Vec<Jet<S>> = x.iter().map(|v| Jet::constant(space, v.clone())).collect();
    let p = metric.f2(chart, &xs, &ud);
    let e = |idx: &[usize]| {
        let mut ex = vec![0u8; n];
        for &i in idx {
            ex[i] += 1;
        }
        p.deriv(&ex)
    };
    let g: Mat<S> = (0..n).map(|a| (0..n).map(|b| e(&[a, b]) * 0.5).collect()).collect();
    let f = p.value().sqrt();
    let grad: Vec<S> = (0..n).map(|a| e(&[a]) / (f.clone() * 2.0)).collect();
    let y: Vec<S> = u.iter().map(|v| f.recip() * *v).collect();
    // ∂u/∂θ^β as plain numbers
    let du: Vec<Vec<f64>> = (0..n - 1)
        .map(|b| {
            let sp = JetSpace::get(n - 1, 1);
            let tj: Vec<OJet> = (0..n - 1).map(|i| OJet::variable(sp, th[i], i)).collect();
            direction(&tj).iter().map(|c| c.partial(b).re()).collect()
        })
        .collect();
    let dy: Vec<Vec<S>> = du
        .iter()
        .map(|d| {
            let df = (0..n).fold(proto.clone(), |acc, i| acc + grad[i].clone() * d[i]);
            (0..n).map(|i| (y[i].clone() * -df.clone() + d[i]) / f.clone()).collect()
        })
        .collect();
    let mut frame = gram_schmidt_frame(&g, &y)?;
    orient_frame(&mut frame, &g, &dy)?;
    let dens = det(&fiber_density_matrix(&g, &frame, &dy));
    if dens.re() <= 0.0 {
        return Err(GbcError::Orientation(format!("fiber density {} is not positive", dens.re())));
    }
    Ok(dens)
}

/// `V(x) = ∫_{S_xM} dV`, generic in `x` so jets give its derivatives.
pub fn fiber_volume_generic<S: Scalar>(metric: &Metric, chart: usize, x: &[S], order: usize) -> Result<S> {
    let nodes = fiber_nodes(x.len(), order);
    let mut acc = x[0].zero_like();
    for (theta, w) in &nodes {
        acc = acc + fiber_density(metric, chart, x, theta)? * *w;
    }
    Ok(acc)
}

/// `V(x)` at a base point.
pub fn fiber_volume(metric: &Metric, chart: usize, x: &[f64], order: usize) -> Result<f64> {
    let nodes = fiber_nodes(x.len(), order);
    let mut acc = CompensatedSum::new();
    for (theta, w) in &nodes {
        acc.add(fiber_density(metric, chart, x, theta)? * w);
    }
    Ok(acc.value())
}

/// `V(x)` together with the components of `d log V`.
pub fn fiber_volume_with_dlog(metric: &Metric, chart: usize, x: &[f64], order: usize) -> Result<(f64, Vec<f64>)> {
    let n = x.len();
    if n > DUAL_VARS {
        return Err(GbcError::Dimension(format!("d log V supports n ≤ {DUAL_VARS}")));
    }
    let xs: Vec<Dual> = (0..n).map(|i| Dual::variable(x[i], i)).collect();
    let v = fiber_volume_generic(metric, chart, &xs, order)?;
    Ok((v.v, (0..n).map(|i| v.d[i] / v.v).collect()))
}

/// Components `∂ log V / ∂x^i`.
pub fn dlog_fiber_volume(metric: &Metric, chart: usize, x: &[f64], order: usize) -> Result<Vec<f64>> {
    Ok(fiber_volume_with_dlog(metric, chart, x, order)?.1)
}
