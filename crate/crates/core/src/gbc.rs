//! The Euler form, the transgression `Π = Υ₁ + Υ₂`, the correction `𝔇`, and
//! the connection-change transgression `Υ₃`.

use std::f64::consts::PI;

use crate::connection::{metric_compatible_family, ConnectionForms, FormMatrix};
use crate::curvature::{curvature_forms, skew_to_mv, CurvatureData};
use crate::error::{GbcError, Result};
use crate::exterior::{Form, Multivector};
use crate::jet::{OJet, Scalar};
use crate::numeric::gauss_legendre_on;

/// Permutations of `0..k` with their signs, in lexicographic order.
pub fn signed_permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(rest: &mut Vec<usize>, cur: &mut Vec<usize>, sign: f64, out: &mut Vec<(Vec<usize>, f64)>) {
        if rest.is_empty() {
            out.push((cur.clone(), sign));
            return;
        }
        for pos in 0..rest.len() {
            let v = rest.remove(pos);
            cur.push(v);
            // picking the element at `pos` passes over `pos` smaller-position ones
            rec(rest, cur, if pos % 2 == 0 { sign } else { -sign }, out);
            cur.pop();
            rest.insert(pos, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut (0..k).collect(), &mut Vec::new(), 1.0, &mut out);
    out
}

/// `Γ(s)` for `s ∈ ½ℕ`.
pub fn gamma_half_integer(s: f64) -> f64 {
    let twice = (2.0 * s).round() as i64;
    assert!(twice >= 1 && (2.0 * s - twice as f64).abs() < 1e-12, "Γ needs a positive half-integer");
    if twice % 2 == 0 {
        (1..twice / 2).map(|k| k as f64).product()
    } else {
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while x < s - 1e-9 {
            g *= x;
            x += 1.0;
        }
        g
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `vol(S^{n−1}) = 2π^{n/2}/Γ(n/2)`.
pub fn sphere_volume(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half_integer(n as f64 / 2.0)
}

/// Coefficient `c_k` of `Φ_k` in `Π = Σ_k c_k Φ_k`:
/// `c_k = (−1)^n π^{−n/2} (−1)^k Γ((n−2k)/2) / (k! (n−1−2k)! 2^{2k+1})`.
pub fn pi_coefficient(n: usize, k: usize) -> f64 {
    let sn = if n % 2 == 0 { 1.0 } else { -1.0 };
    let sk = if k % 2 == 0 { 1.0 } else { -1.0 };
    sn * sk * gamma_half_integer((n - 2 * k) as f64 / 2.0)
        / (PI.powf(n as f64 / 2.0) * factorial(k) * factorial(n - 1 - 2 * k) * 2f64.powi(2 * k as i32 + 1))
}

/// `Φ_k = Σ_α sgn(α) Ω[α₂][α₁] ∧ … ∧ Ω[α_{2k}][α_{2k−1}] ∧ ϖ[n][α_{2k+1}] ∧ … ∧ ϖ[n][α_{n−1}]`.
pub fn phi_k(cf: &ConnectionForms, curv: &CurvatureData, k: usize) -> Result<Form<OJet>> {
    let n = cf.n;
    if 2 * k > n - 1 {
        return Err(GbcError::Domain(format!("Φ_{k} needs 2k ≤ n − 1 = {}", n - 1)));
    }
    let last = n - 1;
    let dim = cf.pi[0][0].dim();
    let proto = cf.pi[0][0].unit().clone();
    let mut acc = Form::zero(dim, &proto);
    for (perm, sign) in signed_permutations(n - 1) {
        let mut term = Form::scalar(dim, proto.lift(sign));
        for p in 0..k {
            term = term.wedge(&curv.omega[perm[2 * p + 1]][perm[2 * p]]);
        }
        for &a in &perm[2 * k..] {
            term = term.wedge(&cf.pi[last][a]);
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// `Π = Υ₁ + Υ₂` from `Φ_0 … Φ_{⌊(n−1)/2⌋}`.
#[derive(Clone, Debug)]
pub struct PiSplit {
    pub pi: Form<OJet>,
    pub upsilon1: Form<OJet>,
    pub upsilon2: Form<OJet>,
}

pub fn assemble_pi(phis: &[Form<OJet>], n: usize) -> PiSplit {
    let upsilon1 = phis[0].scale(pi_coefficient(n, 0));
    let mut upsilon2 = Form::zero(phis[0].dim(), phis[0].unit());
    for (k, phi) in phis.iter().enumerate().skip(1) {
        upsilon2 = upsilon2.add(&phi.scale(pi_coefficient(n, k)));
    }
    PiSplit { pi: upsilon1.add(&upsilon2), upsilon1, upsilon2 }
}

/// The classical closed form: for `n = 2p`, `(2π)^{−p} (−1)^k / ((2p−2k−1)!! k! 2^k)`;
/// for `n = 2p+1`, `(−1)^{k+1} C(p, k) / (π^p 2^{2p+1} p!)`.
pub fn pi_coefficient_classical(n: usize, k: usize) -> f64 {
    let sk = if k % 2 == 0 { 1.0 } else { -1.0 };
    let p = n / 2;
    if n % 2 == 0 {
        let dfact: f64 = (1..=(2 * p - 2 * k - 1)).filter(|i| i % 2 == 1).map(|i| i as f64).product();
        sk / ((2.0 * PI).powi(p as i32) * dfact * factorial(k) * 2f64.powi(k as i32))
    } else {
        let binom = factorial(p) / (factorial(k) * factorial(p - k));
        -sk * binom / (PI.powi(p as i32) * 2f64.powi(2 * p as i32 + 1) * factorial(p))
    }
}

/// `Ω^∇ = −(2π)^{−n/2} ℬ(exp(−Ω))`, complex in general; real part returned,
/// with the imaginary part's size.
pub fn omega_euler(curv: &CurvatureData) -> Result<(Form<OJet>, f64)> {
    let n = curv.n;
    let top = curv.as_mv().neg().exp_even(None)?.berezin();
    let scaled = top.scale(-(2.0 * PI).powf(-(n as f64) / 2.0));
    Ok((scaled.real_form(), scaled.max_imag()))
}

/// `Ω^∇` from the ε-symbol display: zero for odd `n`, and for `n = 2p`
/// `(−1)^{p−1}/(2^{2p} π^p p!) Σ sgn(i) Ω[i₂][i₁] ∧ … ∧ Ω[i_{2p}][i_{2p−1}]`.
pub fn omega_euler_epsilon(curv: &CurvatureData) -> Form<OJet> {
    let n = curv.n;
    let dim = curv.omega[0][0].dim();
    let proto = curv.omega[0][0].unit().clone();
    if n % 2 == 1 {
        return Form::zero(dim, &proto);
    }
    let p = n / 2;
    let mut acc = Form::zero(dim, &proto);
    for (perm, sign) in signed_permutations(n) {
        let mut term = Form::scalar(dim, proto.lift(sign));
        for q in 0..p {
            term = term.wedge(&curv.omega[perm[2 * q + 1]][perm[2 * q]]);
        }
        acc = acc.add(&term);
    }
    let sp = if p % 2 == 1 { 1.0 } else { -1.0 };
    acc.scale(sp / (2f64.powi(2 * p as i32) * PI.powi(p as i32) * factorial(p)))
}

/// Everything of the transgression tower at one point.
#[derive(Clone, Debug)]
pub struct GbcForms {
    pub phi: Vec<Form<OJet>>,
    pub split: PiSplit,
    pub omega_euler: Form<OJet>,
    /// `𝔇 = −dΥ₂ − d log V ∧ Υ₁`.
    pub d_form: Form<OJet>,
}

impl GbcForms {
    /// `dlog_v` is `d log V` as a 1-form on `SM` (pulled back from `M`).
    pub fn new(cf: &ConnectionForms, curv: &CurvatureData, dlog_v: &Form<OJet>) -> Result<Self> {
        let n = cf.n;
        let phi = (0..=(n - 1) / 2).map(|k| phi_k(cf, curv, k)).collect::<Result<Vec<_>>>()?;
        let split = assemble_pi(&phi, n);
        let (omega_euler, _) = omega_euler(curv)?;
        let d_form = d_correction(&split, dlog_v);
        Ok(GbcForms { phi, split, omega_euler, d_form })
    }
}

/// `𝔇 = −dΥ₂ − d log V ∧ Υ₁`. `dΥ₂` is skipped when `Υ₂` vanishes identically.
pub fn d_correction(split: &PiSplit, dlog_v: &Form<OJet>) -> Form<OJet> {
    let mut d = dlog_v.wedge(&split.upsilon1).neg();
    if split.upsilon2.terms().next().is_some() {
        d = d.sub(&split.upsilon2.d());
    }
    d
}

/// `‖Ω^∇ − dΠ‖`.
pub fn exactness_residual(cf: &ConnectionForms, curv: &CurvatureData) -> Result<f64> {
    let n = cf.n;
    let phi = (0..=(n - 1) / 2).map(|k| phi_k(cf, curv, k)).collect::<Result<Vec<_>>>()?;
    let split = assemble_pi(&phi, n);
    let (om, _) = omega_euler(curv)?;
    Ok(om.sub(&split.pi.d()).max_abs())
}

/// `‖Ω^∇/V − d(Υ₁/V) + 𝔇/V‖` with `V` a jet in the chart coordinates of `SM`.
/// `forms.d_form` must have been built from `d log V` of the same `V`.
pub fn quotient_residual(forms: &GbcForms, v: &OJet) -> f64 {
    let inv = v.recip();
    let lhs = forms.omega_euler.add(&forms.d_form).scale_s(&inv);
    lhs.sub(&forms.split.upsilon1.scale_s(&inv).d()).max_abs()
}

/// `∂D_s/∂s = −B` in bidegree `(1, 2)`.
pub fn d_family_ds(b: &FormMatrix) -> Multivector<OJet> {
    skew_to_mv(b).neg()
}

/// `Υ₃ = (2π)^{−n/2} ∫₀¹ ℬ(exp(−Ω_s) · ∂D_s/∂s) ds` by 8-node Gauss–Legendre in `s`.
pub fn transgression_upsilon3(cartan: &ConnectionForms, b: &FormMatrix) -> Result<Form<OJet>> {
    let n = cartan.n;
    let dds = d_family_ds(b);
    let mut acc = Form::zero(dds.n_form(), dds.unit());
    for (s, w) in gauss_legendre_on(8, 0.0, 1.0) {
        let fam = metric_compatible_family(cartan, b, s)?;
        let om_s = curvature_forms(&fam).as_mv();
        let integrand = om_s.neg().exp_even(None)?.product(&dds)?.berezin();
        acc = acc.add(&integrand.real_form().scale(w));
    }
    Ok(acc.scale((2.0 * PI).powf(-(n as f64) / 2.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_and_sphere_volumes() {
        assert!((gamma_half_integer(0.5) - PI.sqrt()).abs() < 1e-15);
        assert!((gamma_half_integer(3.0) - 2.0).abs() < 1e-15);
        assert!((sphere_volume(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_volume(3) - 4.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn two_dimensional_coefficients() {
        assert!((pi_coefficient(2, 0) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((pi_coefficient(3, 0) + 1.0 / (8.0 * PI)).abs() < 1e-15);
        assert!((pi_coefficient(3, 1) - 1.0 / (8.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn permutation_signs() {
        let p = signed_permutations(3);
        assert_eq!(p.len(), 6);
        for (perm, s) in p {
            let inversions = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| perm[i] > perm[j]).count();
            assert_eq!(s, if inversions % 2 == 0 { 1.0 } else { -1.0 });
        }
    }
}
