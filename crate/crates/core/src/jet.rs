//! Truncated multivariate Taylor jets.
//!
//! A [`Jet`] stores the Taylor coefficients `f^(α)(p) / α!` of a function of
//! `nvars` variables up to a total degree `order`. Coefficients live in any
//! [`Scalar`], so jets nest: `Jet<Jet<f64>>` differentiates in two independent
//! groups of variables at once. All geometric quantities in this crate are
//! computed generically over [`Scalar`] and differentiated this way.

use std::collections::HashMap;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

/// Elementary functions that every [`Scalar`] can evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Elem {
    /// `a^p` for real `p` (requires `a > 0` unless `p` is a non-negative integer).
    Powf(f64),
    Exp,
    Ln,
    Sin,
    Cos,
    Atan,
}

/// Ring of real-valued quantities that can be differentiated.
pub trait Scalar:
    Clone
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    /// A constant with the same shape as `self`.
    fn lift(&self, v: f64) -> Self;
    /// The innermost real value.
    fn re(&self) -> f64;
    /// `f^(k)(self) / k!` for `k = 0..=n`.
    fn derivs(&self, f: Elem, n: usize) -> Vec<Self>;
    fn apply(&self, f: Elem) -> Self;

    fn zero_like(&self) -> Self {
        self.lift(0.0)
    }
    /// `self += a · b` without intermediate allocations where possible.
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self = self.clone() + a.clone() * b.clone();
    }
    /// `self += a`.
    fn add_assign_ref(&mut self, a: &Self) {
        *self = self.clone() + a.clone();
    }
    fn sqrt(&self) -> Self {
        self.apply(Elem::Powf(0.5))
    }
    fn recip(&self) -> Self {
        self.apply(Elem::Powf(-1.0))
    }
    fn powf(&self, p: f64) -> Self {
        self.apply(Elem::Powf(p))
    }
    fn exp(&self) -> Self {
        self.apply(Elem::Exp)
    }
    fn ln(&self) -> Self {
        self.apply(Elem::Ln)
    }
    fn sin(&self) -> Self {
        self.apply(Elem::Sin)
    }
    fn cos(&self) -> Self {
        self.apply(Elem::Cos)
    }
    fn atan(&self) -> Self {
        self.apply(Elem::Atan)
    }
    fn square(&self) -> Self {
        self.clone() * self.clone()
    }
    /// Two-argument arctangent, continuous in a neighborhood of the base value.
    fn atan2(&self, x: &Self) -> Self {
        let (y0, x0) = (self.re(), x.re());
        let base = y0.atan2(x0);
        let num = x.clone() * (-y0) + self.clone() * x0;
        let den = x.clone() * x0 + self.clone() * y0;
        (num / den).atan() + base
    }
}

fn binomial_real(p: f64, k: usize) -> f64 {
    let mut b = 1.0;
    for i in 0..k {
        b *= (p - i as f64) / (i as f64 + 1.0);
    }
    b
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Taylor coefficients of `atan` at `a` from `(1 + a²) f' = 1`.
fn atan_derivs<S: Scalar>(a: &S, n: usize, atan_a: S) -> Vec<S> {
    let mut out = vec![atan_a];
    if n == 0 {
        return out;
    }
    let q = (a.square() + 1.0).recip();
    out.push(q.clone());
    for k in 1..n {
        // (1+a²)(k+1) t_{k+1} + 2a k t_k + (k-1) t_{k-1} = 0
        let rhs = a.clone() * out[k].clone() * (2.0 * k as f64) + out[k - 1].clone() * (k as f64 - 1.0);
        out.push(-(rhs * q.clone()) / (k as f64 + 1.0));
    }
    out
}

impl Scalar for f64 {
    fn lift(&self, v: f64) -> Self {
        v
    }
    #[inline]
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    #[inline]
    fn add_assign_ref(&mut self, a: &Self) {
        *self += a;
    }
    fn re(&self) -> f64 {
        *self
    }
    fn derivs(&self, f: Elem, n: usize) -> Vec<Self> {
        let a = *self;
        match f {
            Elem::Powf(p) => (0..=n).map(|k| binomial_real(p, k) * a.powf(p - k as f64)).collect(),
            Elem::Exp => (0..=n).map(|k| a.exp() / factorial(k)).collect(),
            Elem::Ln => (0..=n)
                .map(|k| {
                    if k == 0 {
                        a.ln()
                    } else {
                        let s = if k % 2 == 1 { 1.0 } else { -1.0 };
                        s / (k as f64 * a.powi(k as i32))
                    }
                })
                .collect(),
            Elem::Sin | Elem::Cos => {
                let (s, c) = a.sin_cos();
                let cycle = if f == Elem::Sin { [s, c, -s, -c] } else { [c, -s, -c, s] };
                (0..=n).map(|k| cycle[k % 4] / factorial(k)).collect()
            }
            Elem::Atan => atan_derivs(self, n, a.atan()),
        }
    }
    fn apply(&self, f: Elem) -> Self {
        match f {
            Elem::Powf(p) => {
                if p == 0.5 {
                    f64::sqrt(*self)
                } else if p == -1.0 {
                    1.0 / self
                } else {
                    f64::powf(*self, p)
                }
            }
            Elem::Exp => f64::exp(*self),
            Elem::Ln => f64::ln(*self),
            Elem::Sin => f64::sin(*self),
            Elem::Cos => f64::cos(*self),
            Elem::Atan => f64::atan(*self),
        }
    }
}

/// Monomial layout and multiplication table for `nvars` variables up to `order`.
///
/// Monomials are graded (all degree-`d` monomials precede degree `d+1`), so the
/// coefficient vector of a lower-order jet is a prefix of a higher-order one.
#[derive(Debug)]
pub struct JetSpace {
    nvars: usize,
    order: usize,
    exps: Vec<Vec<u8>>,
    lookup: HashMap<Vec<u8>, usize>,
    /// `(i, j, k)` with `exps[i] + exps[j] = exps[k]`.
    mul: Vec<(u32, u32, u32)>,
    /// Per variable: `(target, source, factor)` for the partial derivative.
    partials: Vec<Vec<(u32, u32, f64)>>,
}

fn monomials_of_degree(nvars: usize, d: usize) -> Vec<Vec<u8>> {
    if nvars == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in monomials_of_degree(nvars - 1, d - first) {
            rest.insert(0, first as u8);
            out.push(rest);
        }
    }
    out
}

impl JetSpace {
    /// Shared space for `(nvars, order)`. Spaces are created once and leaked.
    pub fn get(nvars: usize, order: usize) -> &'static JetSpace {
        static SPACES: OnceLock<Mutex<HashMap<(usize, usize), &'static JetSpace>>> = OnceLock::new();
        let map = SPACES.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = map.lock().expect("jet space cache poisoned");
        guard
            .entry((nvars, order))
            .or_insert_with(|| Box::leak(Box::new(JetSpace::build(nvars, order))))
    }

    fn build(nvars: usize, order: usize) -> JetSpace {
        let mut exps = Vec::new();
        let mut len_upto = Vec::new();
        for d in 0..=order {
            exps.extend(monomials_of_degree(nvars, d));
            len_upto.push(exps.len());
        }
        let lookup: HashMap<Vec<u8>, usize> = exps.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let mut mul = Vec::new();
        for (i, a) in exps.iter().enumerate() {
            for (j, b) in exps.iter().enumerate() {
                let s: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                if let Some(&k) = lookup.get(&s) {
                    mul.push((i as u32, j as u32, k as u32));
                }
            }
        }
        let mut partials = vec![Vec::new(); nvars];
        if order > 0 {
            for (var, list) in partials.iter_mut().enumerate() {
                for (t, e) in exps[..len_upto[order - 1]].iter().enumerate() {
                    let mut src = e.clone();
                    src[var] += 1;
                    list.push((t as u32, lookup[&src] as u32, f64::from(src[var])));
                }
            }
        }
        JetSpace { nvars, order, exps, lookup, mul, partials }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }
    pub fn order(&self) -> usize {
        self.order
    }
    pub fn len(&self) -> usize {
        self.exps.len()
    }
    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }
    pub fn index_of(&self, exps: &[u8]) -> Option<usize> {
        self.lookup.get(exps).copied()
    }
    pub fn exponents(&self, idx: usize) -> &[u8] {
        &self.exps[idx]
    }
}

/// Truncated Taylor expansion with coefficients in `C`.
#[derive(Clone, Debug)]
pub struct Jet<C> {
    space: &'static JetSpace,
    c: Vec<C>,
}

/// Jet with real coefficients: the workhorse for derivatives on the sphere bundle.
pub type OJet = Jet<f64>;

impl<C: Scalar> Jet<C> {
    pub fn constant(space: &'static JetSpace, value: C) -> Self {
        let zero = value.zero_like();
        let mut c = vec![zero; space.len()];
        c[0] = value;
        Jet { space, c }
    }

    /// The coordinate function `value + t_var`.
    pub fn variable(space: &'static JetSpace, value: C, var: usize) -> Self {
        assert!(var < space.nvars, "variable index out of range");
        let one = value.lift(1.0);
        let mut j = Self::constant(space, value);
        if space.order > 0 {
            let mut e = vec![0u8; space.nvars];
            e[var] = 1;
            j.c[space.lookup[&e]] = one;
        }
        j
    }

    pub fn space(&self) -> &'static JetSpace {
        self.space
    }
    pub fn order(&self) -> usize {
        self.space.order
    }
    pub fn value(&self) -> &C {
        &self.c[0]
    }
    pub fn coeffs(&self) -> &[C] {
        &self.c
    }

    /// Taylor coefficient of the monomial `exps` (zero if truncated away).
    pub fn coeff(&self, exps: &[u8]) -> C {
        match self.space.index_of(exps) {
            Some(i) => self.c[i].clone(),
            None => self.c[0].zero_like(),
        }
    }

    /// Mixed partial derivative `∂^exps` at the base point.
    pub fn deriv(&self, exps: &[u8]) -> C {
        let fact: f64 = exps.iter().map(|&e| factorial(e as usize)).product();
        self.coeff(exps) * fact
    }

    /// Partial derivative in variable `var`, as a jet of one lower order.
    pub fn partial(&self, var: usize) -> Self {
        assert!(self.space.order > 0, "cannot differentiate an order-0 jet");
        let target = JetSpace::get(self.space.nvars, self.space.order - 1);
        let zero = self.c[0].zero_like();
        let mut c = vec![zero; target.len()];
        for &(t, s, f) in &self.space.partials[var] {
            c[t as usize] = self.c[s as usize].clone() * f;
        }
        Jet { space: target, c }
    }

    /// Drop all terms above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        if order >= self.space.order {
            return self.clone();
        }
        let target = JetSpace::get(self.space.nvars, order);
        Jet { space: target, c: self.c[..target.len()].to_vec() }
    }

    pub fn scale(&self, k: &C) -> Self {
        Jet { space: self.space, c: self.c.iter().map(|x| x.clone() * k.clone()).collect() }
    }

    fn common(a: &Self, b: &Self) -> &'static JetSpace {
        assert_eq!(a.space.nvars, b.space.nvars, "jets over different variable sets");
        if a.space.order <= b.space.order {
            a.space
        } else {
            b.space
        }
    }

    fn zip(self, rhs: Self, f: impl Fn(C, C) -> C) -> Self {
        let space = Self::common(&self, &rhs);
        let n = space.len();
        let c = self.c.into_iter().take(n).zip(rhs.c.into_iter().take(n)).map(|(a, b)| f(a, b)).collect();
        Jet { space, c }
    }

    fn mul_jet(&self, rhs: &Self) -> Self {
        let space = Self::common(self, rhs);
        let n = space.len();
        let zero = self.c[0].zero_like();
        let mut c = vec![zero; n];
        for &(i, j, k) in &space.mul {
            c[k as usize].mul_add_assign(&self.c[i as usize], &rhs.c[j as usize]);
        }
        Jet { space, c }
    }

    /// Compose an elementary function with this jet via its Taylor series.
    fn compose(&self, f: Elem) -> Self {
        let order = self.space.order;
        let d = self.c[0].derivs(f, order);
        let mut h = self.clone();
        h.c[0] = h.c[0].zero_like();
        let mut r = Jet::constant(self.space, d[order].clone());
        for k in (0..order).rev() {
            r = r.mul_jet(&h);
            r.c[0] = r.c[0].clone() + d[k].clone();
        }
        r
    }
}

impl<C: Scalar> Add for Jet<C> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        if self.space.order <= rhs.space.order {
            Self::common(&self, &rhs);
            for (a, b) in self.c.iter_mut().zip(&rhs.c) {
                a.add_assign_ref(b);
            }
            self
        } else {
            self.zip(rhs, |a, b| a + b)
        }
    }
}

impl<C: Scalar> Sub for Jet<C> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<C: Scalar> Mul for Jet<C> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mul_jet(&rhs)
    }
}

impl<C: Scalar> Div for Jet<C> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self.mul_jet(&rhs.recip())
    }
}

impl<C: Scalar> Neg for Jet<C> {
    type Output = Self;
    fn neg(self) -> Self {
        Jet { space: self.space, c: self.c.into_iter().map(|x| -x).collect() }
    }
}

impl<C: Scalar> Add<f64> for Jet<C> {
    type Output = Self;
    fn add(mut self, rhs: f64) -> Self {
        self.c[0] = self.c[0].clone() + rhs;
        self
    }
}

impl<C: Scalar> Sub<f64> for Jet<C> {
    type Output = Self;
    fn sub(mut self, rhs: f64) -> Self {
        self.c[0] = self.c[0].clone() - rhs;
        self
    }
}

impl<C: Scalar> Mul<f64> for Jet<C> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Jet { space: self.space, c: self.c.into_iter().map(|x| x * rhs).collect() }
    }
}

impl<C: Scalar> Div<f64> for Jet<C> {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        self * (1.0 / rhs)
    }
}

impl<C: Scalar> Scalar for Jet<C> {
    fn lift(&self, v: f64) -> Self {
        Jet::constant(self.space, self.c[0].lift(v))
    }
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        let space = Self::common(a, b);
        if space.order > self.space.order {
            *self = self.clone() + a.mul_jet(b);
            return;
        }
        if space.order < self.space.order {
            self.c.truncate(space.len());
            self.space = space;
        }
        for &(i, j, k) in &space.mul {
            self.c[k as usize].mul_add_assign(&a.c[i as usize], &b.c[j as usize]);
        }
    }
    fn add_assign_ref(&mut self, a: &Self) {
        if a.space.order < self.space.order {
            self.c.truncate(a.space.len());
            self.space = a.space;
        }
        for (x, y) in self.c.iter_mut().zip(&a.c) {
            x.add_assign_ref(y);
        }
    }
    fn re(&self) -> f64 {
        self.c[0].re()
    }
    fn derivs(&self, f: Elem, n: usize) -> Vec<Self> {
        let pows = |base: &Self| {
            let mut out = vec![self.lift(1.0)];
            for k in 1..=n {
                out.push(out[k - 1].mul_jet(base));
            }
            out
        };
        match f {
            Elem::Powf(p) => {
                let ap = self.apply(f);
                if n == 0 {
                    return vec![ap];
                }
                let r = self.recip();
                pows(&r).into_iter().enumerate().map(|(k, rk)| ap.mul_jet(&rk) * binomial_real(p, k)).collect()
            }
            Elem::Exp => {
                let e = self.apply(Elem::Exp);
                (0..=n).map(|k| e.clone() / factorial(k)).collect()
            }
            Elem::Ln => {
                let r = self.recip();
                let mut out = pows(&r);
                out[0] = self.apply(Elem::Ln);
                for (k, item) in out.iter_mut().enumerate().skip(1) {
                    let s = if k % 2 == 1 { 1.0 } else { -1.0 };
                    *item = item.clone() * (s / k as f64);
                }
                out
            }
            Elem::Sin | Elem::Cos => {
                let s = self.apply(Elem::Sin);
                let c = self.apply(Elem::Cos);
                let cycle = if f == Elem::Sin {
                    [s.clone(), c.clone(), -s, -c]
                } else {
                    [c.clone(), -s.clone(), -c, s]
                };
                (0..=n).map(|k| cycle[k % 4].clone() / factorial(k)).collect()
            }
            Elem::Atan => atan_derivs(self, n, self.apply(Elem::Atan)),
        }
    }
    fn apply(&self, f: Elem) -> Self {
        self.compose(f)
    }
}

/// First-order forward dual number in at most [`DUAL_VARS`] variables, kept
/// on the stack. Used where only a gradient is needed in an inner loop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub d: [f64; DUAL_VARS],
}

pub const DUAL_VARS: usize = 3;

impl Dual {
    pub fn constant(v: f64) -> Self {
        Dual { v, d: [0.0; DUAL_VARS] }
    }

    pub fn variable(v: f64, var: usize) -> Self {
        let mut d = [0.0; DUAL_VARS];
        d[var] = 1.0;
        Dual { v, d }
    }

    fn map_d(self, f: impl Fn(f64) -> f64) -> [f64; DUAL_VARS] {
        self.d.map(f)
    }
}

impl Add for Dual {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Dual { v: self.v + r.v, d: std::array::from_fn(|i| self.d[i] + r.d[i]) }
    }
}

impl Sub for Dual {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Dual { v: self.v - r.v, d: std::array::from_fn(|i| self.d[i] - r.d[i]) }
    }
}

impl Mul for Dual {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        Dual { v: self.v * r.v, d: std::array::from_fn(|i| self.d[i] * r.v + self.v * r.d[i]) }
    }
}

impl Div for Dual {
    type Output = Self;
    fn div(self, r: Self) -> Self {
        let q = self.v / r.v;
        Dual { v: q, d: std::array::from_fn(|i| (self.d[i] - q * r.d[i]) / r.v) }
    }
}

impl Neg for Dual {
    type Output = Self;
    fn neg(self) -> Self {
        Dual { v: -self.v, d: self.map_d(|x| -x) }
    }
}

impl Add<f64> for Dual {
    type Output = Self;
    fn add(self, r: f64) -> Self {
        Dual { v: self.v + r, d: self.d }
    }
}

impl Sub<f64> for Dual {
    type Output = Self;
    fn sub(self, r: f64) -> Self {
        Dual { v: self.v - r, d: self.d }
    }
}

impl Mul<f64> for Dual {
    type Output = Self;
    fn mul(self, r: f64) -> Self {
        Dual { v: self.v * r, d: self.map_d(|x| x * r) }
    }
}

impl Div<f64> for Dual {
    type Output = Self;
    fn div(self, r: f64) -> Self {
        self * (1.0 / r)
    }
}

impl Scalar for Dual {
    fn lift(&self, v: f64) -> Self {
        Dual::constant(v)
    }
    fn re(&self) -> f64 {
        self.v
    }
    #[inline]
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        self.v += a.v * b.v;
        for i in 0..DUAL_VARS {
            self.d[i] += a.d[i] * b.v + a.v * b.d[i];
        }
    }
    #[inline]
    fn add_assign_ref(&mut self, a: &Self) {
        self.v += a.v;
        for i in 0..DUAL_VARS {
            self.d[i] += a.d[i];
        }
    }
    fn derivs(&self, f: Elem, n: usize) -> Vec<Self> {
        // t_k = f^(k)/k!, and d t_k = (k+1) t_{k+1} da
        let t = self.v.derivs(f, n + 1);
        (0..=n).map(|k| Dual { v: t[k], d: self.map_d(|x| x * t[k + 1] * (k + 1) as f64) }).collect()
    }
    fn apply(&self, f: Elem) -> Self {
        self.derivs(f, 0).swap_remove(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn dual_matches_jet_gradient() {
        let sp = JetSpace::get(2, 1);
        let (a, b) = (0.8, -0.3);
        let fj = |x: OJet, y: OJet| (x.clone() * y.clone()).sin() / (x.square() + 2.0).sqrt() + y.atan().exp();
        let fd = |x: Dual, y: Dual| (x * y).sin() / (x.square() + 2.0).sqrt() + y.atan().exp();
        let j = fj(OJet::variable(sp, a, 0), OJet::variable(sp, b, 1));
        let d = fd(Dual::variable(a, 0), Dual::variable(b, 1));
        assert!(close(d.v, j.re(), 1e-15));
        assert!(close(d.d[0], j.deriv(&[1, 0]), 1e-14) && close(d.d[1], j.deriv(&[0, 1]), 1e-14));
    }

    #[test]
    fn space_layout_is_graded() {
        let s = JetSpace::get(3, 3);
        assert_eq!(s.len(), 20);
        let degrees: Vec<u8> = (0..s.len()).map(|i| s.exponents(i).iter().sum()).collect();
        assert!(degrees.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(degrees.iter().filter(|&&d| d == 2).count(), 6);
        let lower = JetSpace::get(3, 2);
        for i in 0..lower.len() {
            assert_eq!(lower.exponents(i), s.exponents(i));
        }
    }

    #[test]
    fn univariate_derivatives_of_elementary_functions() {
        let s = JetSpace::get(1, 4);
        let x = Jet::variable(s, 0.7, 0);
        let f = x.sin() * x.exp();
        // d/dx (sin x e^x) = e^x (sin x + cos x); second: 2 e^x cos x
        let e = 0.7f64.exp();
        assert!(close(f.deriv(&[1]), e * (0.7f64.sin() + 0.7f64.cos()), 1e-14));
        assert!(close(f.deriv(&[2]), 2.0 * e * 0.7f64.cos(), 1e-14));
        let g = x.sqrt();
        assert!(close(g.deriv(&[3]), 3.0 / 8.0 * 0.7f64.powf(-2.5), 1e-13));
        let h = x.atan();
        // atan'' = -2x/(1+x²)²
        assert!(close(h.deriv(&[2]), -1.4 / (1.49f64).powi(2), 1e-14));
        let l = x.ln();
        assert!(close(l.deriv(&[4]), -6.0 / 0.7f64.powi(4), 1e-12));
    }

    #[test]
    fn nested_jets_give_mixed_partials() {
        // f(x, y) = x² y³ with x in the outer jet and y in the inner jet.
        let outer = JetSpace::get(1, 2);
        let inner = JetSpace::get(1, 3);
        let x = Jet::variable(outer, 1.5, 0);
        let y = Jet::variable(inner, Jet::constant(outer, 2.0), 0);
        let xx = Jet::constant(inner, x.clone() * x);
        let f = xx * y.clone() * y.clone() * y;
        // ∂y³ f = 6 x², ∂x of that = 12 x
        let d3 = f.deriv(&[3]);
        assert!(close(d3.deriv(&[0]), 6.0 * 2.25, 1e-14));
        assert!(close(d3.deriv(&[1]), 18.0, 1e-14));
    }

    #[test]
    fn atan2_tracks_angle_derivatives() {
        let s = JetSpace::get(2, 2);
        let x = Jet::variable(s, -0.4, 0);
        let y = Jet::variable(s, 0.9, 1);
        let th = y.atan2(&x);
        let r2 = 0.4f64.powi(2) + 0.81;
        assert!(close(th.re(), 0.9f64.atan2(-0.4), 1e-15));
        assert!(close(th.deriv(&[1, 0]), -0.9 / r2, 1e-14));
        assert!(close(th.deriv(&[0, 1]), -0.4 / r2, 1e-14));
        // ∂x∂y atan2(y,x) = (y² - x²)/r⁴
        assert!(close(th.deriv(&[1, 1]), (0.81 - 0.16) / (r2 * r2), 1e-13));
    }

    #[test]
    fn partial_lowers_order() {
        let s = JetSpace::get(2, 3);
        let x = Jet::variable(s, 0.3, 0);
        let y = Jet::variable(s, -0.2, 1);
        let f = (x.clone() * y.clone()).cos();
        let fx = f.partial(0);
        assert_eq!(fx.order(), 2);
        assert!(close(fx.deriv(&[0, 1]), f.deriv(&[1, 1]), 1e-14));
        assert!(close(fx.deriv(&[1, 1]), f.deriv(&[2, 1]), 1e-14));
    }
}
