//! Pointwise elements of the bigraded algebra `Λ T*SM ⊗ Λ π*TM`.
//!
//! A term is a form monomial `dz^I` (bit mask over the form generators)
//! tensored with a fiber monomial `e_J` (bit mask over the orthonormal frame),
//! with a complex coefficient. Masks store strictly increasing multi-indices,
//! so each monomial has exactly one representation.

use std::collections::BTreeMap;

use super::cx::Cx;
use crate::error::{GbcError, Result};
use crate::jet::{OJet, Scalar};

pub type Mask = u32;

/// Sign of `dz^a ∧ dz^b` relative to the sorted monomial, or `None` if they share a generator.
pub fn wedge_sign(a: Mask, b: Mask) -> Option<f64> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut bb = b;
    while bb != 0 {
        let q = bb.trailing_zeros();
        swaps += (a >> (q + 1)).count_ones();
        bb &= bb - 1;
    }
    Some(if swaps % 2 == 0 { 1.0 } else { -1.0 })
}

/// Sort a generator list into a mask with the permutation sign; `None` on repeats.
pub fn sort_sign(indices: &[usize]) -> Option<(Mask, f64)> {
    let mut mask: Mask = 0;
    let mut sign = 1.0;
    for &i in indices {
        let bit = 1 << i;
        sign *= wedge_sign(mask, bit)?;
        mask |= bit;
    }
    Some((mask, sign))
}

pub fn degree(m: Mask) -> usize {
    m.count_ones() as usize
}

#[derive(Clone, Debug)]
pub struct Multivector<S> {
    n_form: usize,
    n_fiber: usize,
    unit: S,
    terms: BTreeMap<(Mask, Mask), Cx<S>>,
}

impl<S: Scalar> Multivector<S> {
    /// The zero element; `proto` fixes the coefficient shape.
    pub fn zero(n_form: usize, n_fiber: usize, proto: &S) -> Self {
        assert!(n_form <= 32 && n_fiber <= 32, "at most 32 generators per slot");
        Multivector { n_form, n_fiber, unit: proto.lift(1.0), terms: BTreeMap::new() }
    }

    pub fn scalar(n_form: usize, n_fiber: usize, c: Cx<S>) -> Self {
        let mut m = Self::zero(n_form, n_fiber, &c.re);
        m.terms.insert((0, 0), c);
        m
    }

    pub fn one(n_form: usize, n_fiber: usize, proto: &S) -> Self {
        Self::scalar(n_form, n_fiber, Cx::lift(proto, 1.0, 0.0))
    }

    /// `1 ⊗ e_i`.
    pub fn fiber_generator(n_form: usize, n_fiber: usize, i: usize, proto: &S) -> Self {
        let mut m = Self::zero(n_form, n_fiber, proto);
        m.terms.insert((0, 1 << i), Cx::lift(proto, 1.0, 0.0));
        m
    }

    pub fn n_form(&self) -> usize {
        self.n_form
    }
    pub fn n_fiber(&self) -> usize {
        self.n_fiber
    }
    pub fn unit(&self) -> &S {
        &self.unit
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Mask, Mask), &Cx<S>)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, form: Mask, fiber: Mask) -> Option<&Cx<S>> {
        self.terms.get(&(form, fiber))
    }

    /// Add `c · dz^form ⊗ e_fiber` with canonical masks.
    pub fn add_term(&mut self, form: Mask, fiber: Mask, c: Cx<S>) {
        debug_assert!(form >> self.n_form == 0 && fiber >> self.n_fiber == 0);
        match self.terms.remove(&(form, fiber)) {
            Some(old) => {
                self.terms.insert((form, fiber), old + c);
            }
            None => {
                self.terms.insert((form, fiber), c);
            }
        }
    }

    /// Add `c · dz^{i_1}∧… ⊗ e_{j_1}∧…` for arbitrary generator orders.
    pub fn add_monomial(&mut self, form: &[usize], fiber: &[usize], c: Cx<S>) -> Result<()> {
        if form.iter().any(|&i| i >= self.n_form) || fiber.iter().any(|&j| j >= self.n_fiber) {
            return Err(GbcError::Dimension("generator index out of range".into()));
        }
        if let (Some((fm, fs)), Some((bm, bs))) = (sort_sign(form), sort_sign(fiber)) {
            self.add_term(fm, bm, c.scale(fs * bs));
        }
        Ok(())
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.n_form != other.n_form || self.n_fiber != other.n_fiber {
            return Err(GbcError::Dimension(format!(
                "generator counts ({}, {}) vs ({}, {})",
                self.n_form, self.n_fiber, other.n_form, other.n_fiber
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (&(f, b), c) in &other.terms {
            out.add_term(f, b, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c.clone())
    }

    pub fn scale(&self, k: f64) -> Self {
        self.map(|c| c.scale(k))
    }

    pub fn scale_c(&self, a: f64, b: f64) -> Self {
        self.map(|c| c.mul_c(a, b))
    }

    pub fn scale_cx(&self, k: &Cx<S>) -> Self {
        self.map(|c| c.clone() * k.clone())
    }

    fn map(&self, f: impl Fn(&Cx<S>) -> Cx<S>) -> Self {
        Multivector {
            n_form: self.n_form,
            n_fiber: self.n_fiber,
            unit: self.unit.clone(),
            terms: self.terms.iter().map(|(k, c)| (*k, f(c))).collect(),
        }
    }

    /// `(a⊗b)·(c⊗d) = (−1)^{deg b · deg c} (a∧c)⊗(b∧d)`, extended bilinearly.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = Self::zero(self.n_form, self.n_fiber, &self.unit);
        for (&(fa, ba), ca) in &self.terms {
            for (&(fc, bc), cc) in &other.terms {
                let (Some(sf), Some(sb)) = (wedge_sign(fa, fc), wedge_sign(ba, bc)) else {
                    continue;
                };
                let koszul = if (degree(ba) * degree(fc)) % 2 == 0 { 1.0 } else { -1.0 };
                out.add_term(fa | fc, ba | bc, (ca.clone() * cc.clone()).scale(sf * sb * koszul));
            }
        }
        Ok(out)
    }

    pub fn powi(&self, k: usize) -> Result<Self> {
        let mut out = Self::one(self.n_form, self.n_fiber, &self.unit);
        for _ in 0..k {
            out = out.product(self)?;
        }
        Ok(out)
    }

    /// Part of bidegree `(i, j)`.
    pub fn component(&self, i: usize, j: usize) -> Self {
        let mut out = Self::zero(self.n_form, self.n_fiber, &self.unit);
        for (&(f, b), c) in &self.terms {
            if degree(f) == i && degree(b) == j {
                out.terms.insert((f, b), c.clone());
            }
        }
        out
    }

    pub fn is_bidegree(&self, i: usize, j: usize) -> bool {
        self.terms.keys().all(|&(f, b)| degree(f) == i && degree(b) == j)
    }

    /// Berezin integral: top fiber-degree coefficient, form part unchanged.
    pub fn berezin(&self) -> Self {
        let top: Mask = if self.n_fiber == 32 { u32::MAX } else { (1 << self.n_fiber) - 1 };
        let mut out = Self::zero(self.n_form, self.n_fiber, &self.unit);
        for (&(f, b), c) in &self.terms {
            if b == top {
                out.terms.insert((f, 0), c.clone());
            }
        }
        out
    }

    /// `exp(m)` for an element of even total degree. The scalar part is
    /// exponentiated exactly; the nilpotent remainder is summed up to `truncation`
    /// total degree (default: all generators).
    pub fn exp_even(&self, truncation: Option<usize>) -> Result<Self> {
        if let Some((&(f, b), _)) = self.terms.iter().find(|(&(f, b), _)| (degree(f) + degree(b)) % 2 == 1) {
            return Err(GbcError::Domain(format!("odd-degree term (form {f:#b}, fiber {b:#b}) in exp_even")));
        }
        let max_deg = truncation.unwrap_or(self.n_form + self.n_fiber);
        let scalar = self.terms.get(&(0, 0)).cloned();
        let mut nil = self.clone();
        nil.terms.remove(&(0, 0));
        let mut sum = Self::one(self.n_form, self.n_fiber, &self.unit);
        let mut power = sum.clone();
        let mut k = 1usize;
        while 2 * k <= max_deg {
            power = power.product(&nil)?.scale(1.0 / k as f64);
            if power.terms.is_empty() {
                break;
            }
            sum = sum.add(&power)?;
            k += 1;
        }
        Ok(match scalar {
            Some(c) => sum.scale_cx(&c.exp()),
            None => sum,
        })
    }

    /// `Σ_k f^{(k)}(t²/2)/k! · (i t ∇ℓ + Ω)^k`, given the derivatives of `f`.
    pub fn f_of_theta(f_derivs: &[f64], t: f64, nabla_ell: &Self, omega: &Self) -> Result<Self> {
        let nil = nabla_ell.scale_c(0.0, t).add(omega)?;
        let needed = nil.n_fiber + 1;
        if f_derivs.len() < needed {
            return Err(GbcError::Truncation(format!(
                "{} derivatives supplied, {needed} required",
                f_derivs.len()
            )));
        }
        let mut sum = Self::zero(nil.n_form, nil.n_fiber, &nil.unit);
        let mut power = Self::one(nil.n_form, nil.n_fiber, &nil.unit);
        let mut fact = 1.0;
        for (k, d) in f_derivs.iter().take(needed).enumerate() {
            if k > 0 {
                power = power.product(&nil)?;
                fact *= k as f64;
            }
            sum = sum.add(&power.scale(d / fact))?;
        }
        Ok(sum)
    }

    /// Largest coefficient modulus (innermost values).
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(Cx::abs_re).fold(0.0, f64::max)
    }

    /// Largest imaginary part (innermost values).
    pub fn max_imag(&self) -> f64 {
        self.terms.values().map(|c| c.im.re().abs()).fold(0.0, f64::max)
    }
}

/// Contraction `ι(s)` with `s ∈ 𝒜^{0,1}` in an orthonormal frame.
pub fn contract<S: Scalar>(s: &Multivector<S>, m: &Multivector<S>) -> Result<Multivector<S>> {
    s.check_shape(m)?;
    if !s.is_bidegree(0, 1) {
        return Err(GbcError::Domain("contraction vector must have bidegree (0,1)".into()));
    }
    let mut out = Multivector::zero(m.n_form, m.n_fiber, &m.unit);
    for (&(_, bs), cs) in &s.terms {
        for (&(f, b), c) in &m.terms {
            if b & bs == 0 {
                continue;
            }
            // position k (1-based) of e_idx inside the fiber monomial
            let k = (b & (bs - 1)).count_ones() as usize + 1;
            let i = degree(f);
            let sign = if (i + k - 1) % 2 == 0 { 1.0 } else { -1.0 };
            out.add_term(f, b & !bs, (cs.clone() * c.clone()).scale(sign));
        }
    }
    Ok(out)
}

impl Multivector<OJet> {
    /// Coefficient-wise exterior derivative of the form part, with `dz^c` the
    /// jet variables.
    pub fn ext_d(&self) -> Multivector<OJet> {
        let nvars = self.unit.space().nvars();
        assert_eq!(nvars, self.n_form, "jet variables must match the form generators");
        let unit = self.unit.truncate(self.unit.order().saturating_sub(1));
        let mut out = Multivector::zero(self.n_form, self.n_fiber, &unit);
        for (&(f, b), c) in &self.terms {
            for var in 0..nvars {
                if let Some(s) = wedge_sign(1 << var, f) {
                    let dc = Cx::new(c.re.partial(var), c.im.partial(var));
                    out.add_term(f | (1 << var), b, dc.scale(s));
                }
            }
        }
        out
    }

    /// Innermost values as a plain multivector.
    pub fn values(&self) -> Multivector<f64> {
        let mut out = Multivector::zero(self.n_form, self.n_fiber, &1.0);
        for (&(f, b), c) in &self.terms {
            out.add_term(f, b, Cx::new(c.re.re(), c.im.re()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Cx<f64> {
        Cx::new(x, 0.0)
    }

    #[test]
    fn product_sign_rule() {
        let mut a = Multivector::zero(2, 2, &1.0);
        a.add_monomial(&[0], &[0], c(1.0)).unwrap();
        let mut b = Multivector::zero(2, 2, &1.0);
        b.add_monomial(&[1], &[1], c(1.0)).unwrap();
        let p = a.product(&b).unwrap();
        assert_eq!(p.coefficient(0b11, 0b11).unwrap().re, -1.0);
    }

    #[test]
    fn berezin_signs() {
        let mut m = Multivector::zero(0, 3, &1.0);
        m.add_monomial(&[], &[1, 0, 2], c(1.0)).unwrap();
        assert_eq!(m.berezin().coefficient(0, 0).unwrap().re, -1.0);
        let mut low = Multivector::zero(0, 3, &1.0);
        low.add_monomial(&[], &[0, 1], c(4.0)).unwrap();
        assert!(low.berezin().terms.is_empty());
    }

    #[test]
    fn contraction_of_ell_with_itself() {
        let ell = Multivector::fiber_generator(3, 2, 1, &1.0);
        let r = contract(&ell, &ell).unwrap();
        assert_eq!(r.coefficient(0, 0).unwrap().re, 1.0);
        let e0 = Multivector::fiber_generator(3, 2, 0, &1.0);
        assert!(contract(&e0, &ell).unwrap().terms.is_empty());
        assert!(contract(&ell.scale(2.0).add(&Multivector::one(3, 2, &1.0)).unwrap(), &ell).is_err());
    }

    #[test]
    fn exp_even_rejects_odd_terms_and_truncates() {
        let ell = Multivector::fiber_generator(2, 2, 0, &1.0);
        assert!(ell.exp_even(None).is_err());
        let zero = Multivector::zero(2, 2, &1.0);
        let e = zero.exp_even(None).unwrap();
        assert_eq!(e.coefficient(0, 0).unwrap().re, 1.0);
        let mut a = Multivector::zero(2, 0, &1.0);
        a.add_monomial(&[0, 1], &[], c(0.7)).unwrap();
        let e = a.exp_even(None).unwrap();
        assert_eq!(e.coefficient(0, 0).unwrap().re, 1.0);
        assert_eq!(e.coefficient(0b11, 0).unwrap().re, 0.7);
        assert_eq!(e.terms.len(), 2);
    }

    #[test]
    fn mismatched_shapes_error() {
        let a = Multivector::one(2, 2, &1.0);
        let b = Multivector::one(3, 2, &1.0);
        assert!(matches!(a.product(&b), Err(GbcError::Dimension(_))));
    }

    #[test]
    fn f_of_theta_requires_enough_derivatives() {
        let z = Multivector::zero(3, 2, &1.0);
        assert!(matches!(Multivector::f_of_theta(&[1.0, 0.0], 0.5, &z, &z), Err(GbcError::Truncation(_))));
        let one = Multivector::f_of_theta(&[1.0, 0.0, 0.0], 0.5, &z, &z).unwrap();
        assert_eq!(one.coefficient(0, 0).unwrap().re, 1.0);
    }
}
