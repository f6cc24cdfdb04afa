//! The metric zoo. Every metric is evaluated as `F²(x, y)` generically over
//! [`Scalar`], so derivatives in `x` and `y` come from jets.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{GbcError, Result};
use crate::jet::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Riemannian,
    Randers,
    Minkowski,
}

/// A coordinate chart of the base manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartInfo {
    pub id: usize,
    pub domain: &'static str,
    pub transition: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    /// Flat torus `R^n / 2πZ^n`.
    Euclidean { dim: usize },
    /// Unit round sphere in two stereographic charts, `a = λ²δ`, `λ = 2/(1+|x|²)`.
    RoundSphere,
    /// `F = |y| + b(x¹) y¹` on the flat torus with `b = b0 + b1 sin x¹`.
    RandersTorus { dim: usize, b0: f64, b1: f64 },
    /// Zermelo deformation of the round sphere by the rotational wind of speed `wind`.
    RandersSphere { wind: f64 },
    /// `F = (|y|⁴ + eps (y1⁴ + y2⁴))^{1/4}` on the flat 2-torus.
    MinkowskiTorus { eps: f64 },
}

impl Metric {
    /// Look up a zoo entry by name with its parameters (missing ones take defaults).
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let allowed: &[&str] = match name {
            "euclidean" | "flat_torus" => &["dim"],
            "randers_torus" => &["dim", "b0", "b1"],
            "randers_sphere" => &["wind"],
            "minkowski_torus" => &["eps"],
            "round_sphere" => &[],
            other => return Err(GbcError::Config(format!("unknown metric '{other}'"))),
        };
        if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(GbcError::Config(format!("metric '{name}' has no parameter '{k}'")));
        }
        let get = |k: &str, d: f64| params.get(k).copied().unwrap_or(d);
        let dim = |d: f64| -> Result<usize> {
            let v = get("dim", d);
            if v.fract() != 0.0 || !(2.0..=3.0).contains(&v) {
                return Err(GbcError::Config(format!("dim must be 2 or 3, got {v}")));
            }
            Ok(v as usize)
        };
        let m = match name {
            "euclidean" | "flat_torus" => Metric::Euclidean { dim: dim(2.0)? },
            "round_sphere" => Metric::RoundSphere,
            "randers_torus" => Metric::RandersTorus { dim: dim(2.0)?, b0: get("b0", 0.2), b1: get("b1", 0.1) },
            "randers_sphere" => Metric::RandersSphere { wind: get("wind", 0.3) },
            "minkowski_torus" => Metric::MinkowskiTorus { eps: get("eps", 0.3) },
            other => return Err(GbcError::Config(format!("unknown metric '{other}'"))),
        };
        m.validate()?;
        Ok(m)
    }

    /// The default zoo used by the identity checks: one entry of each kind.
    pub fn zoo() -> Vec<Metric> {
        vec![
            Metric::Euclidean { dim: 2 },
            Metric::RoundSphere,
            Metric::RandersTorus { dim: 2, b0: 0.2, b1: 0.1 },
            Metric::RandersSphere { wind: 0.3 },
            Metric::MinkowskiTorus { eps: 0.3 },
        ]
    }

    /// Zoo parameters as `from_name` takes them.
    pub fn params(&self) -> BTreeMap<String, f64> {
        let kv: Vec<(&str, f64)> = match *self {
            Metric::Euclidean { dim } => vec![("dim", dim as f64)],
            Metric::RoundSphere => vec![],
            Metric::RandersTorus { dim, b0, b1 } => vec![("dim", dim as f64), ("b0", b0), ("b1", b1)],
            Metric::RandersSphere { wind } => vec![("wind", wind)],
            Metric::MinkowskiTorus { eps } => vec![("eps", eps)],
        };
        kv.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Euclidean { .. } => "euclidean",
            Metric::RoundSphere => "round_sphere",
            Metric::RandersTorus { .. } => "randers_torus",
            Metric::RandersSphere { .. } => "randers_sphere",
            Metric::MinkowskiTorus { .. } => "minkowski_torus",
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Metric::Euclidean { dim } | Metric::RandersTorus { dim, .. } => dim,
            _ => 2,
        }
    }

    pub fn kind(&self) -> MetricKind {
        match self {
            Metric::Euclidean { .. } | Metric::RoundSphere => MetricKind::Riemannian,
            Metric::RandersTorus { .. } | Metric::RandersSphere { .. } => MetricKind::Randers,
            Metric::MinkowskiTorus { .. } => MetricKind::Minkowski,
        }
    }

    pub fn is_sphere(&self) -> bool {
        matches!(self, Metric::RoundSphere | Metric::RandersSphere { .. })
    }

    pub fn euler_characteristic(&self) -> i32 {
        if self.is_sphere() {
            2
        } else {
            0
        }
    }

    pub fn charts(&self) -> Vec<ChartInfo> {
        if self.is_sphere() {
            vec![
                ChartInfo { id: 0, domain: "stereographic plane from the north pole", transition: "z' = 1/z" },
                ChartInfo { id: 1, domain: "stereographic plane from the south pole", transition: "z' = 1/z" },
            ]
        } else {
            vec![ChartInfo { id: 0, domain: "[0, 2π)^n with periodic identification", transition: "none" }]
        }
    }

    /// Map chart coordinates to the other sphere chart: `z ↦ 1/z` in complex notation.
    pub fn chart_transition(&self, from: usize, x: &[f64]) -> Result<(usize, Vec<f64>)> {
        if !self.is_sphere() {
            return Ok((from, x.to_vec()));
        }
        let r2 = x[0] * x[0] + x[1] * x[1];
        if r2 < 1e-300 {
            return Err(GbcError::Chart("chart center has no image in the other chart".into()));
        }
        Ok((1 - from, vec![x[0] / r2, -x[1] / r2]))
    }

    /// Parameter checks plus a strong-convexity scan on a sample grid.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Metric::RandersTorus { b0, b1, .. } if b0.abs() + b1.abs() >= 1.0 => {
                return Err(GbcError::MetricDomain(format!("‖β‖ = {} must be below 1", b0.abs() + b1.abs())));
            }
            Metric::RandersSphere { wind } if !(0.0..1.0).contains(&wind.abs()) => {
                return Err(GbcError::MetricDomain(format!("wind speed {wind} must be below 1")));
            }
            Metric::MinkowskiTorus { eps } if !(-0.5..=2.0).contains(&eps) => {
                return Err(GbcError::MetricDomain(format!("quartic weight {eps} outside [-0.5, 2]")));
            }
            _ => {}
        }
        let n = self.dim();
        for chart in 0..self.charts().len() {
            for k in 0..12 {
                let t = k as f64 * 0.53;
                let x: Vec<f64> = (0..n).map(|i| if self.is_sphere() { 0.9 * (t + i as f64).sin() } else { t * (i + 1) as f64 }).collect();
                for j in 0..16 {
                    let a = j as f64 * PI / 8.0 + 0.1;
                    let mut y = vec![0.0; n];
                    y[0] = a.cos();
                    y[1] = a.sin();
                    if n == 3 {
                        y[2] = (2.0 * a).sin();
                    }
                    super::tensors::fundamental_tensor(self, chart, &x, &y)?;
                }
            }
        }
        Ok(())
    }

    /// `F²(x, y)` in chart `chart`.
    pub fn f2<S: Scalar>(&self, chart: usize, x: &[S], y: &[S]) -> S {
        let yy = dot(y, y);
        match *self {
            Metric::Euclidean { .. } => yy,
            Metric::RoundSphere => {
                let lam = stereo_factor(x);
                lam.square() * yy
            }
            Metric::RandersTorus { b0, b1, .. } => {
                let b = x[0].sin() * b1 + b0;
                (yy.sqrt() + b * y[0].clone()).square()
            }
            Metric::RandersSphere { wind } => {
                let lam = stereo_factor(x);
                let h = lam.square();
                let w = sphere_wind(chart, x, wind);
                let wy = (w[0].clone() * y[0].clone() + w[1].clone() * y[1].clone()) * h.clone();
                let ww = (w[0].square() + w[1].square()) * h.clone();
                let lz = -ww + 1.0;
                let root = (lz.clone() * yy * h + wy.square()).sqrt();
                ((root - wy) / lz).square()
            }
            Metric::MinkowskiTorus { eps } => {
                let q = yy.square() + (y[0].square().square() + y[1].square().square()) * eps;
                q.sqrt()
            }
        }
    }

    /// `F(x, y)`.
    pub fn f<S: Scalar>(&self, chart: usize, x: &[S], y: &[S]) -> S {
        self.f2(chart, x, y).sqrt()
    }
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(a[0].zero_like(), |acc, (p, q)| acc + p.clone() * q.clone())
}

/// Conformal factor `2/(1+|x|²)` of the stereographic round metric.
pub fn stereo_factor<S: Scalar>(x: &[S]) -> S {
    (dot(x, x) + 1.0).recip() * 2.0
}

/// Rotation wind `κ(−x², x¹)` in chart 0; its image `κ(x², −x¹)` in chart 1.
pub fn sphere_wind<S: Scalar>(chart: usize, x: &[S], kappa: f64) -> [S; 2] {
    if chart == 0 {
        [-x[1].clone() * kappa, x[0].clone() * kappa]
    } else {
        [x[1].clone() * kappa, -x[0].clone() * kappa]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zoo() -> Vec<Metric> {
        Metric::zoo()
    }

    #[test]
    fn params_round_trip() {
        for m in zoo() {
            assert_eq!(Metric::from_name(m.name(), &m.params()).unwrap(), m);
        }
    }

    #[test]
    fn positively_homogeneous() {
        for m in zoo() {
            let x = [0.3, -0.7];
            let y = [0.4, 1.1];
            let f = m.f(0, &x, &y);
            for lam in [0.5, 2.0, 7.0] {
                let ys = [lam * y[0], lam * y[1]];
                assert!((m.f(0, &x, &ys) - lam * f).abs() < 1e-10 * lam * f, "{}", m.name());
            }
        }
    }

    #[test]
    fn zermelo_metrics_agree_across_charts() {
        // F is a function on TM: the chart transition must preserve it.
        for m in [Metric::RoundSphere, Metric::RandersSphere { wind: 0.3 }] {
            let x = [0.4, -0.3];
            let y = [0.7, 0.2];
            let (c1, x1) = m.chart_transition(0, &x).unwrap();
            // Jacobian of z ↦ 1/z applied to y: dw = −dz / z²
            let (a, b) = (x[0], x[1]);
            let r4 = (a * a + b * b).powi(2);
            let (zr, zi) = ((a * a - b * b) / r4, -2.0 * a * b / r4);
            let y1 = [-(zr * y[0] - zi * y[1]), -(zr * y[1] + zi * y[0])];
            assert!((m.f(0, &x, &y) - m.f(c1, &x1, &y1)).abs() < 1e-12, "{}", m.name());
        }
    }

    #[test]
    fn parameter_validation() {
        let mut p = BTreeMap::new();
        p.insert("b0".to_string(), 0.8);
        p.insert("b1".to_string(), 0.3);
        assert!(matches!(Metric::from_name("randers_torus", &p), Err(GbcError::MetricDomain(_))));
        assert!(matches!(Metric::from_name("nope", &p), Err(GbcError::Config(_))));
        assert!(Metric::from_name("randers_sphere", &BTreeMap::new()).is_ok());
    }
}
