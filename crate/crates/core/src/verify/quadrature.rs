//! Quadrature nodes on the base surface minus small disks around the zeros.
//!
//! Regions are nested so one pass serves every excision radius: an outer
//! region bounded by the largest radius `ε₀`, then rings `ε_{j+1} ≤ r ≤ ε_j`.
//! `I(ε_i) = outer + Σ_{j<i} ring_j`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{GbcError, Result};
use crate::numeric::{gauss_legendre_on, trapezoid_periodic};

use super::field::{VectorField, Zero};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    /// Nodes per direction: radial × angular per sphere chart; per torus axis,
    /// rounded up to whole cells of `cell_order` Gauss points, six cells at a time.
    pub grid: usize,
    /// Gauss–Legendre points per torus cell and direction.
    pub cell_order: usize,
    /// Half-width, in cells, of the square patch around a torus zero.
    pub patch_cells: usize,
    /// Radial nodes in each ring between consecutive radii.
    pub ring_nodes: usize,
    /// Excision radii, strictly decreasing.
    pub epsilons: Vec<f64>,
    /// Nodes of the fiber-volume rule.
    pub fiber_order: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            grid: 200,
            cell_order: 4,
            patch_cells: 2,
            ring_nodes: 12,
            epsilons: vec![0.08, 0.04, 0.02, 0.01],
            fiber_order: 32,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.epsilons.is_empty() {
            return Err(GbcError::Config("at least one excision radius is required".into()));
        }
        if self.epsilons.windows(2).any(|w| w[1] >= w[0]) || self.epsilons.iter().any(|e| *e <= 0.0) {
            return Err(GbcError::Config("excision radii must be positive and strictly decreasing".into()));
        }
        if self.grid < 8 || self.cell_order == 0 || self.ring_nodes == 0 || self.fiber_order < 8 {
            return Err(GbcError::Config("quadrature resolution too small".into()));
        }
        Ok(())
    }
}

/// Which part of the decomposition a node belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Outer,
    /// Between `epsilons[j+1]` and `epsilons[j]`.
    Ring(usize),
}

#[derive(Clone, Debug)]
pub struct Node {
    pub chart: usize,
    pub x: Vec<f64>,
    pub weight: f64,
    pub region: Region,
}

fn polar_rings(zero: &Zero, eps: &[f64], spec: &QuadratureSpec, angular: usize, out: &mut Vec<Node>) {
    let phis = trapezoid_periodic(angular);
    for j in 0..eps.len().saturating_sub(1) {
        for (r, wr) in gauss_legendre_on(spec.ring_nodes, eps[j + 1], eps[j]) {
            for &(phi, wp) in &phis {
                let x = vec![zero.location[0] + r * phi.cos(), zero.location[1] + r * phi.sin()];
                out.push(Node { chart: zero.chart, x, weight: r * wr * wp, region: Region::Ring(j) });
            }
        }
    }
}

/// Sphere atlas: each chart covers its unit disk, the zero sits at the chart
/// center, and the disks meet along the equator `|x| = 1`.
fn sphere_nodes(field: &VectorField, spec: &QuadratureSpec) -> Result<Vec<Node>> {
    let zeros = field.zeros();
    let eps = &spec.epsilons;
    if eps[0] >= 1.0 {
        return Err(GbcError::Config("sphere excision radius must be below 1".into()));
    }
    let mut out = Vec::new();
    for chart in 0..2 {
        let zero = zeros
            .iter()
            .find(|z| z.chart == chart && z.location.iter().all(|c| *c == 0.0))
            .ok_or_else(|| GbcError::Config("sphere fields must vanish at the chart centers".into()))?;
        let phis = trapezoid_periodic(spec.grid);
        for (r, wr) in gauss_legendre_on(spec.grid, eps[0], 1.0) {
            for &(phi, wp) in &phis {
                out.push(Node { chart, x: vec![r * phi.cos(), r * phi.sin()], weight: r * wr * wp, region: Region::Outer });
            }
        }
        polar_rings(zero, eps, spec, spec.grid, &mut out);
    }
    Ok(out)
}

/// Torus `[−π, π)²`: Gauss cells, except square patches around the zeros
/// which are swept from the circle `ε₀` to the square boundary.
fn torus_nodes(field: &VectorField, spec: &QuadratureSpec) -> Result<Vec<Node>> {
    let q = spec.cell_order;
    // zeros at multiples of π/3 sit on cell corners when the cell count is a multiple of 6
    let cells = spec.grid.div_ceil(q).div_ceil(6) * 6;
    let h = 2.0 * PI / cells as f64;
    let zeros = field.zeros();
    let k = spec.patch_cells as i64;
    let half = k as f64 * h;
    let eps = &spec.epsilons;
    if eps[0] >= half {
        return Err(GbcError::Config(format!("excision radius {} exceeds the patch half-width {half}", eps[0])));
    }
    let corner = |z: &Zero| -> (i64, i64) {
        let c = |v: f64| ((v + PI) / h).round() as i64;
        (c(z.location[0]), c(z.location[1]))
    };
    let patches: Vec<(i64, i64)> = zeros.iter().map(corner).collect();
    let n = cells as i64;
    let gap = |a: i64, b: i64| (a - b).rem_euclid(n).min((b - a).rem_euclid(n));
    let overlap = 2 * k > n
        || patches.iter().enumerate().any(|(i, p)| patches[i + 1..].iter().any(|q| gap(p.0, q.0) < 2 * k && gap(p.1, q.1) < 2 * k));
    if overlap {
        return Err(GbcError::Config(format!("grid {} is too coarse: the patches around the zeros overlap", spec.grid)));
    }
    let in_patch = |i: i64, j: i64| {
        patches.iter().any(|&(ci, cj)| i >= ci - k && i < ci + k && j >= cj - k && j < cj + k)
    };
    let rule = gauss_legendre_on(q, 0.0, h);
    let mut out = Vec::new();
    for i in 0..cells as i64 {
        for j in 0..cells as i64 {
            if in_patch(i, j) {
                continue;
            }
            let (x0, y0) = (-PI + i as f64 * h, -PI + j as f64 * h);
            for &(a, wa) in &rule {
                for &(b, wb) in &rule {
                    out.push(Node { chart: 0, x: vec![x0 + a, y0 + b], weight: wa * wb, region: Region::Outer });
                }
            }
        }
    }
    let ns = 2 * q * spec.patch_cells.max(3);
    for z in &zeros {
        // x = z + R(s, φ) (cos φ, sin φ), R = (1−s)ε₀ + s·half·ρ(φ), ρ = 1/max(|cos φ|, |sin φ|)
        for sector in 0..4 {
            let a = -PI / 4.0 + sector as f64 * PI / 2.0;
            for (phi, wp) in gauss_legendre_on(ns, a, a + PI / 2.0) {
                let rho = 1.0 / phi.cos().abs().max(phi.sin().abs());
                for (s, ws) in gauss_legendre_on(ns, 0.0, 1.0) {
                    let r = (1.0 - s) * eps[0] + s * half * rho;
                    let jac = (half * rho - eps[0]) * r;
                    let x = vec![z.location[0] + r * phi.cos(), z.location[1] + r * phi.sin()];
                    out.push(Node { chart: 0, x, weight: jac * ws * wp, region: Region::Outer });
                }
            }
        }
        polar_rings(z, eps, spec, 4 * ns, &mut out);
    }
    Ok(out)
}

/// All nodes for integrating over the base manifold of `field`.
pub fn build_nodes(field: &VectorField, spec: &QuadratureSpec) -> Result<Vec<Node>> {
    spec.validate()?;
    if field.on_sphere() {
        sphere_nodes(field, spec)
    } else {
        torus_nodes(field, spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::CompensatedSum;

    fn area(field: &VectorField, spec: &QuadratureSpec, upto_ring: Option<usize>) -> f64 {
        build_nodes(field, spec)
            .unwrap()
            .iter()
            .filter(|n| match (n.region, upto_ring) {
                (Region::Outer, _) => true,
                (Region::Ring(j), Some(u)) => j < u,
                _ => false,
            })
            .map(|n| n.weight)
            .collect::<CompensatedSum>()
            .value()
    }

    #[test]
    fn torus_weights_sum_to_area_minus_disks() {
        let spec = QuadratureSpec { grid: 48, ..Default::default() };
        let f = VectorField::TorusPairA;
        let full = 4.0 * PI * PI;
        let outer = area(&f, &spec, None);
        assert!((outer - (full - 2.0 * PI * 0.08f64.powi(2))).abs() < 1e-10, "{outer}");
        let all = area(&f, &spec, Some(3));
        assert!((all - (full - 2.0 * PI * 0.01f64.powi(2))).abs() < 1e-10);
        let none = area(&VectorField::TorusConstant { angle: 0.0 }, &spec, None);
        assert!((none - full).abs() < 1e-10);
    }

    #[test]
    fn sphere_weights_cover_two_unit_disks() {
        let spec = QuadratureSpec { grid: 40, ..Default::default() };
        let a = area(&VectorField::SphereDipole, &spec, Some(3));
        assert!((a - 2.0 * PI * (1.0 - 0.01f64.powi(2))).abs() < 1e-10);
    }

    #[test]
    fn bad_specs_are_rejected() {
        let spec = QuadratureSpec { epsilons: vec![0.5, 0.1], ..Default::default() };
        assert!(build_nodes(&VectorField::TorusPairA, &spec).is_err());
        // six cells: the two patches of half-width two cells would overlap
        let spec = QuadratureSpec { grid: 24, ..Default::default() };
        assert!(build_nodes(&VectorField::TorusPairA, &spec).is_err());
        assert!(build_nodes(&VectorField::TorusConstant { angle: 0.0 }, &spec).is_ok());
        let spec = QuadratureSpec { grid: 32, ..Default::default() };
        assert!(build_nodes(&VectorField::TorusPairA, &spec).is_ok());
        let spec = QuadratureSpec { epsilons: vec![0.01, 0.02], ..Default::default() };
        assert!(build_nodes(&VectorField::TorusPairA, &spec).is_err());
    }
}
