//! Pointwise identity checks at random sphere-bundle points.
//!
//! Every check evaluates both sides of an identity with jets at one point of
//! `SM` and records the largest coefficient of the difference. A separate
//! finite-difference pass measures how fast the jet derivative and the
//! difference oracle agree as the step shrinks.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connection::{cartan_forms, chern_forms, metric_compatible_family, structure_residual, ConnectionForms, Perturbation};
use crate::curvature::{curvature_forms, ell, ext_d_fd, u_t_variation_residual, nabla_ell, nabla_on_a, skew_to_mv, twisted_derivative_norm, u_t};
use crate::error::Result;
use crate::exterior::{contract, Cx, Form, Multivector};
use crate::finsler::volume::fiber_volume_generic;
use crate::finsler::{Metric, SmGeometry, SpherePoint};
use crate::gbc::{assemble_pi, quotient_residual, exactness_residual, omega_euler, omega_euler_epsilon, phi_k, transgression_upsilon3, GbcForms};
use crate::jet::{OJet, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LemmaSettings {
    pub points: usize,
    pub seed: u64,
    pub t_grid: Vec<f64>,
    /// Strength `c` of the skew perturbation `B`.
    pub perturbation: f64,
    pub tolerance: f64,
    /// Step of the central difference in `t`.
    pub t_step: f64,
    /// Points at which the finite-difference order is measured.
    pub fd_points: usize,
    pub fiber_order: usize,
    /// Negative control: add this much `ω¹` to the Cartan form `ϖ^2_1`.
    pub corrupt_connection: f64,
}

impl Default for LemmaSettings {
    fn default() -> Self {
        LemmaSettings {
            points: 100,
            seed: 7,
            t_grid: vec![0.25, 0.5, 1.0, 2.0, 4.0],
            perturbation: 0.1,
            tolerance: 1e-5,
            t_step: 1e-4,
            fd_points: 8,
            fiber_order: 32,
            corrupt_connection: 0.0,
        }
    }
}

/// Identity names, in report order.
pub const CHECKS: &[&str] = &[
    "structure_cartan_torsion",
    "structure_cartan_skew",
    "structure_chern_torsion",
    "structure_chern_almost_compatible",
    "curvature_skew",
    "bianchi",
    "ell_contract_nabla_ell",
    "nabla_nabla_ell",
    "berezin_commutes_with_d",
    "twisted_flat_exp",
    "twisted_flat_cubic",
    "u_t_closed",
    "u_t_variation",
    "euler_form_exact",
    "euler_form_exact_perturbed",
    "euler_routes_agree",
    "euler_form_imaginary",
    "quotient_identity",
    "family_curvature_derivative",
    "connection_change_transgression",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaRow {
    pub metric: String,
    pub dim: usize,
    pub check: String,
    pub points: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdOrderRow {
    pub metric: String,
    pub dim: usize,
    /// Points at which the order was measured.
    pub points: usize,
    pub steps: (f64, f64),
    /// Largest `|d_jet Π − d_fd Π|` at each step.
    pub errors: (f64, f64),
    /// Smallest observed order over the sampled points.
    pub order: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub rows: Vec<LemmaRow>,
    pub fd_orders: Vec<FdOrderRow>,
}

impl LemmaReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass) && self.fd_orders.iter().all(|r| r.pass)
    }

    pub fn max_residual(&self, metric: &str, check: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.metric == metric && r.check == check).map(|r| r.max_residual)
    }
}

/// Random points of `SM` in the metric's charts. Sphere charts are sampled in
/// their unit disks; polar fiber angles stay away from the coordinate poles.
pub fn random_points(metric: &Metric, count: usize, rng: &mut ChaCha8Rng) -> Vec<SpherePoint> {
    let n = metric.dim();
    (0..count)
        .map(|_| {
            let (chart, x) = if metric.is_sphere() {
                let r = rng.gen::<f64>().sqrt();
                let a = rng.gen_range(0.0..2.0 * PI);
                (rng.gen_range(0..2), vec![r * a.cos(), r * a.sin()])
            } else {
                (0, (0..n).map(|_| rng.gen_range(-PI..PI)).collect())
            };
            let theta = match n {
                2 => vec![rng.gen_range(0.0..2.0 * PI)],
                _ => vec![rng.gen_range(0.3..PI - 0.3), rng.gen_range(0.0..2.0 * PI)],
            };
            SpherePoint::new(chart, x, theta).expect("consistent dimensions")
        })
        .collect()
}

/// A smooth random element of the mixed algebra: quadratic polynomials in
/// the chart coordinates times `sin z¹`, on every fiber monomial.
fn random_element(geo: &SmGeometry, rng: &mut ChaCha8Rng) -> Multivector<OJet> {
    let (n, m) = (geo.n, geo.m());
    let z0: Vec<f64> = geo.z.iter().map(|v| v.re()).collect();
    let dz: Vec<OJet> = geo.z.iter().zip(&z0).map(|(v, c)| v.clone() - *c).collect();
    let poly = |rng: &mut ChaCha8Rng| {
        let mut c = geo.z[0].lift(rng.gen_range(-1.0..1.0));
        for i in 0..m {
            c = c + dz[i].clone() * rng.gen_range(-1.0..1.0);
            for j in i..m {
                c = c + dz[i].clone() * dz[j].clone() * rng.gen_range(-1.0..1.0);
            }
        }
        c * geo.z[0].sin()
    };
    let mut out = Multivector::zero(m, n, &geo.z[0]);
    for fiber in 0u32..(1 << n) {
        for form in 0u32..(1 << m) {
            if form.count_ones() as usize + 1 == n || rng.gen_bool(0.15) {
                let re = poly(rng);
                let im = poly(rng);
                out.add_term(form, fiber, Cx::new(re, im));
            }
        }
    }
    out
}

/// `e^{−u}` and a cubic, with derivatives at `u₀`.
fn exp_derivs(u0: f64, k: usize) -> Vec<f64> {
    (0..k).map(|j| if j % 2 == 0 { (-u0).exp() } else { -(-u0).exp() }).collect()
}

fn cubic_derivs(u0: f64, k: usize) -> Vec<f64> {
    // f(u) = 1 + 2u − u² + u³/2
    let d = [1.0 + 2.0 * u0 - u0 * u0 + 0.5 * u0.powi(3), 2.0 - 2.0 * u0 + 1.5 * u0 * u0, -2.0 + 3.0 * u0, 3.0];
    (0..k).map(|j| d.get(j).copied().unwrap_or(0.0)).collect()
}

fn pi_of(cf: &ConnectionForms, curv: &crate::curvature::CurvatureData) -> Result<Form<OJet>> {
    let n = cf.n;
    let phis = (0..=(n - 1) / 2).map(|k| phi_k(cf, curv, k)).collect::<Result<Vec<_>>>()?;
    Ok(assemble_pi(&phis, n).pi)
}

struct PointDraw {
    point: SpherePoint,
    seed: u64,
    s: f64,
}

/// All residuals at one point, in `CHECKS` order.
fn point_residuals(metric: &Metric, draw: &PointDraw, cfg: &LemmaSettings) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(draw.seed);
    let geo = SmGeometry::new(metric, &draw.point, 3)?;
    let n = geo.n;
    let m = geo.m();
    let mut cartan = cartan_forms(&geo);
    if cfg.corrupt_connection != 0.0 {
        cartan.corrupt(1, 0, cfg.corrupt_connection);
    }
    let chern = chern_forms(&geo);
    let curv = curvature_forms(&cartan);
    let om = curv.as_mv();
    let ne = nabla_ell(&cartan);
    let l = ell(n, m, &geo.z[0]);

    let sc = structure_residual(&cartan, &geo);
    let sh = structure_residual(&chern, &geo);
    let bianchi = nabla_on_a(&om, &cartan.pi).values().max_abs();
    let ell_contract = contract(&l, &ne)?.values().max_abs();
    let nn = nabla_on_a(&ne, &cartan.pi).values().sub(&contract(&l, &om)?.values())?.max_abs();

    let xi = random_element(&geo, &mut rng);
    let berezin_d = xi.berezin().ext_d().values().sub(&nabla_on_a(&xi, &cartan.pi).berezin().values())?.max_abs();

    let (mut tw_exp, mut tw_cubic, mut closed, mut variation): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for &t in &cfg.t_grid {
        let u0 = 0.5 * t * t;
        let fe = Multivector::f_of_theta(&exp_derivs(u0, n + 1), t, &ne, &om)?;
        tw_exp = tw_exp.max(twisted_derivative_norm(&fe, &cartan.pi, t)?);
        let fc = Multivector::f_of_theta(&cubic_derivs(u0, n + 1), t, &ne, &om)?;
        tw_cubic = tw_cubic.max(twisted_derivative_norm(&fc, &cartan.pi, t)?);
        closed = closed.max(u_t(&cartan, &curv, t)?.ext_d().values().max_abs());
        variation = variation.max(u_t_variation_residual(&cartan, &curv, t, cfg.t_step)?);
    }

    let exact = exactness_residual(&cartan, &curv)?;
    let b = Perturbation { c: cfg.perturbation }.forms(&geo);
    let d_conn = metric_compatible_family(&cartan, &b, 0.0)?;
    let d_curv = curvature_forms(&d_conn);
    let exact_d = exactness_residual(&d_conn, &d_curv)?;
    let (oe, imag) = omega_euler(&curv)?;
    let routes = oe.values().sub(&omega_euler_epsilon(&curv).values()).max_abs();

    let v = fiber_volume_generic(metric, draw.point.chart, &geo.x, cfg.fiber_order)?;
    let dlog = Form::scalar(m, v.clone()).d().scale_s(&v.recip());
    let gbc = GbcForms::new(&cartan, &curv, &dlog)?;
    let quotient = quotient_residual(&gbc, &v);

    // ∂Ω_s/∂s = D_s(∂D_s/∂s) with ∂D_s/∂s = −B; Ω_s is quadratic in s
    let h = 1e-3;
    let curv_at = |s: f64| -> Result<Multivector<f64>> {
        Ok(curvature_forms(&metric_compatible_family(&cartan, &b, s)?).as_mv().values())
    };
    let ds = curv_at(draw.s + h)?.sub(&curv_at(draw.s - h)?)?.scale(0.5 / h);
    let fam = metric_compatible_family(&cartan, &b, draw.s)?;
    let family = ds.sub(&nabla_on_a(&skew_to_mv(&b).neg(), &fam.pi).values())?.max_abs();

    let (od, _) = omega_euler(&d_curv)?;
    let ups3 = transgression_upsilon3(&cartan, &b)?;
    let change = oe.sub(&od).sub(&ups3.d()).values().max_abs();

    Ok(vec![
        sc.torsion,
        sc.compatibility,
        sh.torsion,
        sh.compatibility,
        curv.skew_defect(),
        bianchi,
        ell_contract,
        nn,
        berezin_d,
        tw_exp,
        tw_cubic,
        closed,
        variation,
        exact,
        exact_d,
        routes,
        imag,
        quotient,
        family,
        change,
    ])
}

/// A fixed combination of `Π`, the solder forms and the connection forms;
/// never closed, so its exterior derivative is a real test.
fn probe_form(cf: &ConnectionForms) -> Result<Form<OJet>> {
    let mut f = pi_of(cf, &curvature_forms(cf))?;
    for (a, w) in cf.omega.iter().enumerate() {
        f = f.add(&w.scale(0.5 + 0.25 * a as f64));
    }
    for i in 0..cf.n {
        for j in 0..cf.n {
            f = f.add(&cf.pi[i][j].scale(0.3 + 0.1 * (i + 2 * j) as f64));
        }
    }
    Ok(f)
}

/// `|d_jet α − d_fd α|` at steps `h` and `h/2` for the probe form `α`, where
/// the difference oracle re-evaluates `α` from scratch at shifted chart
/// coordinates.
pub fn fd_errors(metric: &Metric, point: &SpherePoint, h: f64) -> Result<(f64, f64)> {
    let geo = SmGeometry::new(metric, point, 3)?;
    let ad = probe_form(&cartan_forms(&geo))?.d().values();
    let n = geo.n;
    let chart = point.chart;
    let field = |z: &[f64]| -> Form<f64> {
        let p = SpherePoint::from_z(chart, n, z);
        let g = SmGeometry::with_frame(metric, &p, 2, geo.frame_choice).expect("neighbouring point stays in the domain");
        probe_form(&cartan_forms(&g)).expect("valid k range").values()
    };
    let z = point.z();
    let e1 = ad.sub(&ext_d_fd(&field, &z, h)).max_abs();
    let e2 = ad.sub(&ext_d_fd(&field, &z, 0.5 * h)).max_abs();
    Ok((e1, e2))
}

fn stream_seed(seed: u64, metric_index: usize, point: usize) -> u64 {
    seed ^ ((metric_index as u64) << 40) ^ (point as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Run every check at `cfg.points` random points of each metric.
pub fn run_lemmas(metrics: &[Metric], cfg: &LemmaSettings) -> Result<LemmaReport> {
    let mut report = LemmaReport::default();
    for (mi, metric) in metrics.iter().enumerate() {
        metric.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(cfg.seed, mi, usize::MAX));
        let draws: Vec<PointDraw> = random_points(metric, cfg.points, &mut rng)
            .into_iter()
            .enumerate()
            .map(|(i, point)| PointDraw { point, seed: stream_seed(cfg.seed, mi, i), s: rng.gen_range(0.0..1.0) })
            .collect();
        let residuals: Vec<Vec<f64>> =
            draws.par_iter().map(|d| point_residuals(metric, d, cfg)).collect::<Result<Vec<_>>>()?;
        for (ci, name) in CHECKS.iter().enumerate() {
            let worst = residuals.iter().map(|r| r[ci]).fold(0.0, f64::max);
            report.rows.push(LemmaRow {
                metric: metric.name().into(),
                dim: metric.dim(),
                check: (*name).into(),
                points: draws.len(),
                max_residual: worst,
                tolerance: cfg.tolerance,
                pass: worst < cfg.tolerance,
            });
        }
        if metric.dim() % 2 == 1 {
            // odd dimension: the Euler form itself vanishes
            let worst = draws
                .par_iter()
                .map(|d| -> Result<f64> {
                    let geo = SmGeometry::new(metric, &d.point, 2)?;
                    Ok(omega_euler(&curvature_forms(&cartan_forms(&geo)))?.0.values().max_abs())
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            report.rows.push(LemmaRow {
                metric: metric.name().into(),
                dim: metric.dim(),
                check: "euler_form_vanishes_odd_dim".into(),
                points: draws.len(),
                max_residual: worst,
                tolerance: cfg.tolerance,
                pass: worst < cfg.tolerance,
            });
        }

        let steps = (0.04, 0.02);
        let fd: Vec<(f64, f64)> = draws
            .par_iter()
            .take(cfg.fd_points)
            .map(|d| fd_errors(metric, &d.point, steps.0))
            .collect::<Result<Vec<_>>>()?;
        let order = fd
            .iter()
            .filter(|(a, b)| *a > 1e-11 && *b > 0.0)
            .map(|(a, b)| (a / b).log2())
            .fold(f64::INFINITY, f64::min);
        let errors = fd.iter().fold((0.0f64, 0.0f64), |acc, e| (acc.0.max(e.0), acc.1.max(e.1)));
        // when the difference is already at rounding level there is no order to measure
        let order = if order.is_finite() { order } else { f64::NAN };
        report.fd_orders.push(FdOrderRow {
            metric: metric.name().into(),
            dim: metric.dim(),
            points: fd.len(),
            steps,
            errors,
            order,
            pass: order.is_nan() && errors.0 < 1e-10 || order >= 2.0,
        });
    }
    Ok(report)
}
