//! Vector fields with isolated zeros, their sphere-bundle lifts and indices.

use std::f64::consts::PI;

use crate::error::{GbcError, Result};
use crate::exterior::Form;
use crate::finsler::{Metric, SpherePoint};
use crate::jet::{JetSpace, OJet, Scalar};

/// An isolated zero with its Poincaré–Hopf index.
#[derive(Clone, Debug, PartialEq)]
pub struct Zero {
    pub chart: usize,
    pub location: Vec<f64>,
    pub index: i32,
}

#[derive(Clone, Debug, PartialEq)]
pub enum VectorField {
    /// `X = x` in chart 0 and `X = −x` in chart 1: zeros at both poles.
    SphereDipole,
    /// `X = (−x², x¹)` in chart 0 and `(x², −x¹)` in chart 1.
    SphereRotation,
    /// `(sin x¹, cos x¹ + cos x² − 3/2)` on the torus; zeros `(0, ±π/3)`.
    TorusPairA,
    /// `(cos x¹ + cos x² − 3/2, −sin x²)` on the torus; zeros `(±π/3, 0)`.
    TorusPairB,
    /// Constant direction at angle `angle`; no zeros.
    TorusConstant { angle: f64 },
    /// `(x¹, x²)` on a plane patch.
    PlaneSource,
    /// `(x¹, −x²)` on a plane patch.
    PlaneSaddle,
}

impl VectorField {
    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "sphere_dipole" => VectorField::SphereDipole,
            "sphere_rotation" => VectorField::SphereRotation,
            "torus_pair_a" => VectorField::TorusPairA,
            "torus_pair_b" => VectorField::TorusPairB,
            "torus_constant" => VectorField::TorusConstant { angle: 0.3 },
            "plane_source" => VectorField::PlaneSource,
            "plane_saddle" => VectorField::PlaneSaddle,
            other => return Err(GbcError::Config(format!("unknown vector field '{other}'"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            VectorField::SphereDipole => "sphere_dipole",
            VectorField::SphereRotation => "sphere_rotation",
            VectorField::TorusPairA => "torus_pair_a",
            VectorField::TorusPairB => "torus_pair_b",
            VectorField::TorusConstant { .. } => "torus_constant",
            VectorField::PlaneSource => "plane_source",
            VectorField::PlaneSaddle => "plane_saddle",
        }
    }

    /// Whether the field lives on the sphere atlas (otherwise a torus or plane chart).
    pub fn on_sphere(&self) -> bool {
        matches!(self, VectorField::SphereDipole | VectorField::SphereRotation)
    }

    pub fn eval<S: Scalar>(&self, chart: usize, x: &[S]) -> Vec<S> {
        let flip = if chart == 0 { 1.0 } else { -1.0 };
        match *self {
            VectorField::SphereDipole => vec![x[0].clone() * flip, x[1].clone() * flip],
            VectorField::SphereRotation => vec![-x[1].clone() * flip, x[0].clone() * flip],
            VectorField::TorusPairA => vec![x[0].sin(), x[0].cos() + x[1].cos() - 1.5],
            VectorField::TorusPairB => vec![x[0].cos() + x[1].cos() - 1.5, -x[1].sin()],
            VectorField::TorusConstant { angle } => vec![x[0].lift(angle.cos()), x[0].lift(angle.sin())],
            VectorField::PlaneSource => vec![x[0].clone(), x[1].clone()],
            VectorField::PlaneSaddle => vec![x[0].clone(), -x[1].clone()],
        }
    }

    pub fn zeros(&self) -> Vec<Zero> {
        let z = |chart, location: Vec<f64>, index| Zero { chart, location, index };
        match self {
            VectorField::SphereDipole | VectorField::SphereRotation => {
                vec![z(0, vec![0.0, 0.0], 1), z(1, vec![0.0, 0.0], 1)]
            }
            VectorField::TorusPairA => vec![z(0, vec![0.0, PI / 3.0], -1), z(0, vec![0.0, -PI / 3.0], 1)],
            VectorField::TorusPairB => vec![z(0, vec![PI / 3.0, 0.0], 1), z(0, vec![-PI / 3.0, 0.0], -1)],
            VectorField::TorusConstant { .. } => vec![],
            VectorField::PlaneSource => vec![z(0, vec![0.0, 0.0], 1)],
            VectorField::PlaneSaddle => vec![z(0, vec![0.0, 0.0], -1)],
        }
    }

    /// Check that the field fits the manifold of `metric`.
    pub fn check_compatible(&self, metric: &Metric) -> Result<()> {
        let plane = matches!(self, VectorField::PlaneSource | VectorField::PlaneSaddle);
        if metric.dim() != 2 {
            return Err(GbcError::Config("vector fields are provided for surfaces only".into()));
        }
        if !plane && self.on_sphere() != metric.is_sphere() {
            return Err(GbcError::Config(format!("field '{}' does not live on '{}'", self.name(), metric.name())));
        }
        Ok(())
    }
}

/// Fiber angle `θ(x) = atan2(X²(x), X¹(x))` of the section, generic in `x`.
pub fn section_angle<S: Scalar>(field: &VectorField, chart: usize, x: &[S]) -> Result<S> {
    let v = field.eval(chart, x);
    let norm = v[0].re().hypot(v[1].re());
    if norm < 1e-12 {
        return Err(GbcError::Excision(format!("|X| = {norm:e} at {:?}", x.iter().map(|c| c.re()).collect::<Vec<_>>())));
    }
    Ok(v[1].atan2(&v[0]))
}

/// `[X](x)`: the point `(x, X/F(X))` of `SM`.
pub fn section_lift(field: &VectorField, chart: usize, x: &[f64]) -> Result<SpherePoint> {
    let th = section_angle(field, chart, x)?;
    SpherePoint::new(chart, x.to_vec(), vec![th])
}

/// Jacobian `∂z^a/∂x^b` of the section `x ↦ (x, θ(x))`, rows over `z`.
pub fn section_jacobian(field: &VectorField, chart: usize, x: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = x.len();
    let space = JetSpace::get(n, 1);
    let xs: Vec<OJet> = (0..n).map(|i| OJet::variable(space, x[i], i)).collect();
    let th = section_angle(field, chart, &xs)?;
    let mut jac: Vec<Vec<f64>> = (0..n).map(|a| (0..n).map(|b| if a == b { 1.0 } else { 0.0 }).collect()).collect();
    jac.push((0..n).map(|b| th.partial(b).re()).collect());
    Ok(jac)
}

/// `[X]^* α` at `x` for a form `α` on `SM` given by its values at `[X](x)`.
pub fn pullback(form: &Form<f64>, field: &VectorField, chart: usize, x: &[f64]) -> Result<Form<f64>> {
    Ok(form.pullback(&section_jacobian(field, chart, x)?))
}

/// Winding number of `X/|X|` around `zero` on a circle of the given radius.
pub fn winding_index(field: &VectorField, zero: &Zero, radius: f64) -> Result<i32> {
    let samples = 512;
    let mut total = 0.0;
    let angle = |k: usize| -> Result<f64> {
        let phi = 2.0 * PI * k as f64 / samples as f64;
        let x = [zero.location[0] + radius * phi.cos(), zero.location[1] + radius * phi.sin()];
        let v = field.eval(zero.chart, &x);
        if v[0].hypot(v[1]) < 1e-12 {
            return Err(GbcError::Excision(format!("field vanishes on the circle of radius {radius}")));
        }
        Ok(v[1].atan2(v[0]))
    };
    let mut prev = angle(0)?;
    for k in 1..=samples {
        let a = angle(k % samples)?;
        let mut d = a - prev;
        while d > PI {
            d -= 2.0 * PI;
        }
        while d < -PI {
            d += 2.0 * PI;
        }
        total += d;
        prev = a;
    }
    Ok((total / (2.0 * PI)).round() as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declared_indices_match_winding_numbers() {
        for f in [
            VectorField::SphereDipole,
            VectorField::SphereRotation,
            VectorField::TorusPairA,
            VectorField::TorusPairB,
            VectorField::PlaneSource,
            VectorField::PlaneSaddle,
        ] {
            for z in f.zeros() {
                assert_eq!(winding_index(&f, &z, 0.05).unwrap(), z.index, "{}", f.name());
                assert_eq!(winding_index(&f, &z, 0.025).unwrap(), z.index, "{}", f.name());
            }
        }
    }

    #[test]
    fn lift_has_unit_length() {
        let m = Metric::RandersTorus { dim: 2, b0: 0.2, b1: 0.1 };
        let p = section_lift(&VectorField::TorusPairA, 0, &[0.4, 1.3]).unwrap();
        assert!((m.f(0, &p.x, &p.y(&m)) - 1.0).abs() < 1e-12);
        assert!(section_lift(&VectorField::PlaneSource, 0, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn constant_field_has_constant_lift() {
        let jac = section_jacobian(&VectorField::TorusConstant { angle: 0.3 }, 0, &[1.0, 2.0]).unwrap();
        assert!(jac[2].iter().all(|v| *v == 0.0));
    }
}
