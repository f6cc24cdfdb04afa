//! Chern and Cartan connection forms in the orthonormal frame.
//!
//! Index convention: `pi[i][j]` is the component along `e_i` of `∇e_j`, i.e.
//! `∇e_j = Σ_i pi[i][j] ⊗ e_i`. Written with the lower index first this is
//! `ϖ_j^i`; the vertical forms `ϖ^n_α` are `pi[n-1][α]` and `∇ℓ = Σ_k pi[k][n-1] e_k`.
//! With that reading the structure equations are
//!
//! * Chern: `dω^i = Σ_j ω^j ∧ ϖ̄[i][j]`, and `ϖ̄[i][j] + ϖ̄[j][i] = −2 A_{ijα} ϖ̄[α][n]`;
//! * Cartan: `ϖ[j][i] = ϖ̄[j][i] + A_{jiα} ϖ̄[α][n]` (skew), and
//!   `dω^i − Σ_j ω^j ∧ ϖ[i][j] = −Σ_{j,α} A_{ijα} ω^j ∧ ϖ[α][n]`.

use crate::error::{GbcError, Result};
use crate::exterior::Form;
use crate::finsler::SmGeometry;
use crate::jet::{OJet, Scalar};

pub type FormMatrix = Vec<Vec<Form<OJet>>>;

#[derive(Clone, Debug, PartialEq)]
pub enum Flavor {
    Cartan,
    Chern,
    /// `ϖ + (1 − s) B`.
    Family(f64),
}

impl Flavor {
    pub fn label(&self) -> String {
        match self {
            Flavor::Cartan => "cartan".into(),
            Flavor::Chern => "chern".into(),
            Flavor::Family(s) => format!("family({s})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConnectionForms {
    pub n: usize,
    pub flavor: Flavor,
    /// Solder forms `ω^a = Σ_i (E⁻¹)^a_i dx^i`.
    pub omega: Vec<Form<OJet>>,
    pub pi: FormMatrix,
}

/// Solder forms of the frame.
fn solder(geo: &SmGeometry) -> Vec<Form<OJet>> {
    let (n, m) = (geo.n, geo.m());
    let zero = geo.z[0].zero_like();
    (0..n)
        .map(|a| Form::one_form((0..m).map(|i| if i < n { geo.frame_inv[a][i].clone() } else { zero.clone() }).collect()))
        .collect()
}

/// Chern connection forms, from `Γ` and the frame:
/// `ϖ̄[a][j] = Σ_i (E⁻¹)^a_i (dE^i_j + Σ_{k,l} Γ^i_{kl} E^k_j dx^l)`.
pub fn chern_forms(geo: &SmGeometry) -> ConnectionForms {
    let (n, m) = (geo.n, geo.m());
    let zero = geo.z[0].zero_like();
    let e = &geo.frame;
    // ∇e_j in the coordinate basis, one 1-form per component i
    let nabla_e: Vec<Vec<Form<OJet>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let comps = (0..m)
                        .map(|v| {
                            let mut c = e[i][j].partial(v);
                            if v < n {
                                for k in 0..n {
                                    c = c + geo.gamma[i][k][v].clone() * e[k][j].clone();
                                }
                            }
                            c
                        })
                        .collect();
                    Form::one_form(comps)
                })
                .collect()
        })
        .collect();
    let pi = (0..n)
        .map(|a| {
            (0..n)
                .map(|j| {
                    let mut f = Form::zero(m, &zero);
                    for i in 0..n {
                        f = f.add(&nabla_e[i][j].scale_s(&geo.frame_inv[a][i]));
                    }
                    f
                })
                .collect()
        })
        .collect();
    ConnectionForms { n, flavor: Flavor::Chern, omega: solder(geo), pi }
}

/// Cartan connection forms, stored skew: `ϖ[j][i]` for `j < i` from the
/// defining relation, `ϖ[i][j] = −ϖ[j][i]`, zero diagonal.
pub fn cartan_forms(geo: &SmGeometry) -> ConnectionForms {
    let chern = chern_forms(geo);
    cartan_from_chern(geo, &chern)
}

pub fn cartan_from_chern(geo: &SmGeometry, chern: &ConnectionForms) -> ConnectionForms {
    let n = geo.n;
    let last = n - 1;
    let bar = &chern.pi;
    let zero_form = Form::zero(geo.m(), &geo.z[0]);
    let mut pi: FormMatrix = vec![vec![zero_form.clone(); n]; n];
    for j in 0..n {
        for i in j + 1..n {
            let mut f = bar[j][i].clone();
            for alpha in 0..last {
                f = f.add(&bar[alpha][last].scale_s(&geo.cartan[j][i][alpha]));
            }
            pi[i][j] = f.neg();
            pi[j][i] = f;
        }
    }
    ConnectionForms { n, flavor: Flavor::Cartan, omega: chern.omega.clone(), pi }
}

/// Residual norms of the structure equations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StructureResidual {
    /// Torsion equation of the flavor's system.
    pub torsion: f64,
    /// Almost-compatibility (Chern) or skewness (other flavors).
    pub compatibility: f64,
}

/// Evaluate the structure equations of `cf` at its base point. Chern forms
/// are checked against the Chern system; every other flavor against the
/// Cartan system.
pub fn structure_residual(cf: &ConnectionForms, geo: &SmGeometry) -> StructureResidual {
    let n = cf.n;
    let last = n - 1;
    let mut torsion: f64 = 0.0;
    for i in 0..n {
        let mut r = cf.omega[i].d();
        for j in 0..n {
            r = r.sub(&cf.omega[j].wedge(&cf.pi[i][j]));
            if cf.flavor != Flavor::Chern {
                for alpha in 0..last {
                    r = r.add(&cf.omega[j].wedge(&cf.pi[alpha][last]).scale_s(&geo.cartan[i][j][alpha]));
                }
            }
        }
        torsion = torsion.max(r.max_abs());
    }
    let mut compatibility: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut r = cf.pi[i][j].add(&cf.pi[j][i]);
            if cf.flavor == Flavor::Chern {
                for alpha in 0..last {
                    r = r.add(&cf.pi[alpha][last].scale_s(&geo.cartan[i][j][alpha]).scale(2.0));
                }
            }
            compatibility = compatibility.max(r.max_abs());
        }
    }
    StructureResidual { torsion, compatibility }
}

/// Check that a matrix of 1-forms is skew.
pub fn check_skew(b: &FormMatrix) -> Result<()> {
    for i in 0..b.len() {
        for j in 0..b.len() {
            let r = b[i][j].add(&b[j][i]).max_abs();
            if r > 1e-12 {
                return Err(GbcError::Domain(format!("perturbation is not skew: |B[{i}][{j}] + B[{j}][{i}]| = {r:e}")));
            }
        }
    }
    Ok(())
}

/// `ϖ_s = ϖ + (1 − s) B` for the metric-compatible `D = ∇ + B`.
pub fn metric_compatible_family(cartan: &ConnectionForms, b: &FormMatrix, s: f64) -> Result<ConnectionForms> {
    check_skew(b)?;
    let n = cartan.n;
    let pi = (0..n).map(|i| (0..n).map(|j| cartan.pi[i][j].add(&b[i][j].scale(1.0 - s))).collect()).collect();
    Ok(ConnectionForms { n, flavor: Flavor::Family(s), omega: cartan.omega.clone(), pi })
}

/// The smooth skew perturbation `B[0][1] = c f β = −B[1][0]` with
/// `f = 1 + ½ sin(x¹ + θ¹)` and `β = cos x² dx¹ + sin x¹ dx² + ½ cos θ¹ dθ¹`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Perturbation {
    pub c: f64,
}

impl Perturbation {
    pub fn forms(&self, geo: &SmGeometry) -> FormMatrix {
        let (n, m) = (geo.n, geo.m());
        let z = &geo.z;
        let th = &z[n];
        let f = (z[0].clone() + th.clone()).sin() * 0.5 + 1.0;
        let zero = z[0].zero_like();
        let mut comps = vec![zero.clone(); m];
        comps[0] = z[1].cos();
        comps[1] = z[0].sin();
        comps[n] = th.cos() * 0.5;
        let beta = Form::one_form(comps).scale_s(&(f * self.c));
        let zero_form = Form::zero(m, &zero);
        let mut b = vec![vec![zero_form; n]; n];
        b[1][0] = beta.neg();
        b[0][1] = beta;
        b
    }
}

impl ConnectionForms {
    /// Add `amount · dx¹` to one entry (negative control for residual checks).
    pub fn corrupt(&mut self, i: usize, j: usize, amount: f64) {
        let m = self.pi[i][j].dim();
        let mut f = Form::zero(m, self.pi[i][j].unit());
        f.add_term(1, self.pi[i][j].unit().lift(amount));
        self.pi[i][j] = self.pi[i][j].add(&f);
    }

    /// Values `pi[i][j]` as plain coefficient vectors over the chart cobasis.
    pub fn values(&self) -> Vec<Vec<Vec<f64>>> {
        self.pi
            .iter()
            .map(|row| row.iter().map(|f| (0..f.dim()).map(|v| f.coeff(&[v]).re()).collect()).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finsler::{Metric, SpherePoint};

    #[test]
    fn euclidean_connection_is_dtheta() {
        let m = Metric::Euclidean { dim: 2 };
        let p = SpherePoint::new(0, vec![0.3, 0.1], vec![1.2]).unwrap();
        let geo = SmGeometry::new(&m, &p, 2).unwrap();
        let cf = cartan_forms(&geo);
        let v = cf.values();
        assert!(v[1][0][0].abs() < 1e-14 && v[1][0][1].abs() < 1e-14);
        assert!((v[1][0][2] - 1.0).abs() < 1e-14);
        let r = structure_residual(&cf, &geo);
        assert!(r.torsion < 1e-12 && r.compatibility < 1e-12);
    }

    #[test]
    fn randers_structure_equations_hold() {
        let m = Metric::RandersTorus { dim: 2, b0: 0.2, b1: 0.1 };
        let p = SpherePoint::new(0, vec![0.7, -1.1], vec![2.4]).unwrap();
        let geo = SmGeometry::new(&m, &p, 2).unwrap();
        let chern = chern_forms(&geo);
        let rc = structure_residual(&chern, &geo);
        assert!(rc.torsion < 1e-10 && rc.compatibility < 1e-10, "{rc:?}");
        let cartan = cartan_from_chern(&geo, &chern);
        let ra = structure_residual(&cartan, &geo);
        assert!(ra.torsion < 1e-10 && ra.compatibility == 0.0, "{ra:?}");
        let (vc, va) = (chern.values(), cartan.values());
        for i in 0..2 {
            for v in 0..3 {
                assert!((vc[i][1][v] - va[i][1][v]).abs() < 1e-10, "vertical forms must agree");
            }
        }
    }

    #[test]
    fn corruption_is_detected() {
        let m = Metric::RoundSphere;
        let p = SpherePoint::new(0, vec![0.3, 0.1], vec![1.2]).unwrap();
        let geo = SmGeometry::new(&m, &p, 2).unwrap();
        let mut cf = cartan_forms(&geo);
        cf.corrupt(1, 0, 1e-3);
        assert!(structure_residual(&cf, &geo).torsion >= 1e-4);
    }

    #[test]
    fn family_endpoints() {
        let m = Metric::RandersTorus { dim: 2, b0: 0.2, b1: 0.1 };
        let p = SpherePoint::new(0, vec![0.7, -1.1], vec![2.4]).unwrap();
        let geo = SmGeometry::new(&m, &p, 2).unwrap();
        let cartan = cartan_forms(&geo);
        let b = Perturbation { c: 0.1 }.forms(&geo);
        let one = metric_compatible_family(&cartan, &b, 1.0).unwrap();
        let zero = metric_compatible_family(&cartan, &b, 0.0).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!(one.pi[i][j].sub(&cartan.pi[i][j]).max_abs() == 0.0);
                assert!(zero.pi[i][j].sub(&cartan.pi[i][j]).sub(&b[i][j]).max_abs() < 1e-15);
            }
        }
        let mut bad = b.clone();
        bad[0][0] = b[0][1].clone();
        assert!(metric_compatible_family(&cartan, &bad, 0.5).is_err());
    }
}
