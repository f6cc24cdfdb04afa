//! Real differential forms at a point, in a coordinate cobasis `dz^0 … dz^{m-1}`.

use std::collections::BTreeMap;

use super::cx::Cx;
use super::multivector::{degree, sort_sign, wedge_sign, Mask, Multivector};
use crate::jet::{OJet, Scalar};

#[derive(Clone, Debug)]
pub struct Form<S> {
    dim: usize,
    unit: S,
    terms: BTreeMap<Mask, S>,
}

impl<S: Scalar> Form<S> {
    pub fn zero(dim: usize, proto: &S) -> Self {
        Form { dim, unit: proto.lift(1.0), terms: BTreeMap::new() }
    }

    pub fn scalar(dim: usize, c: S) -> Self {
        let mut f = Self::zero(dim, &c);
        f.terms.insert(0, c);
        f
    }

    /// `Σ_a comps[a] dz^a`.
    pub fn one_form(comps: Vec<S>) -> Self {
        let mut f = Self::zero(comps.len(), &comps[0]);
        for (a, c) in comps.into_iter().enumerate() {
            f.terms.insert(1 << a, c);
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn unit(&self) -> &S {
        &self.unit
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mask, &S)> {
        self.terms.iter()
    }

    /// Coefficient of `dz^{i_1}∧…` for the given (possibly unsorted) indices.
    pub fn coeff(&self, idx: &[usize]) -> S {
        match sort_sign(idx) {
            Some((m, s)) => self.terms.get(&m).map(|c| c.clone() * s).unwrap_or_else(|| self.unit.zero_like()),
            None => self.unit.zero_like(),
        }
    }

    pub fn coeff_mask(&self, m: Mask) -> S {
        self.terms.get(&m).cloned().unwrap_or_else(|| self.unit.zero_like())
    }

    pub fn add_term(&mut self, m: Mask, c: S) {
        let v = match self.terms.remove(&m) {
            Some(old) => old + c,
            None => c,
        };
        self.terms.insert(m, v);
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "forms over different cobases");
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.add_term(m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c.clone())
    }

    pub fn scale(&self, k: f64) -> Self {
        self.map(|c| c.clone() * k)
    }

    pub fn scale_s(&self, k: &S) -> Self {
        self.map(|c| c.clone() * k.clone())
    }

    fn map(&self, f: impl Fn(&S) -> S) -> Self {
        Form { dim: self.dim, unit: self.unit.clone(), terms: self.terms.iter().map(|(m, c)| (*m, f(c))).collect() }
    }

    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "forms over different cobases");
        let mut out = Self::zero(self.dim, &self.unit);
        for (&a, ca) in &self.terms {
            for (&b, cb) in &other.terms {
                if let Some(s) = wedge_sign(a, b) {
                    out.add_term(a | b, ca.clone() * cb.clone() * s);
                }
            }
        }
        out
    }

    /// Part of degree `p`.
    pub fn degree_part(&self, p: usize) -> Self {
        let mut out = Self::zero(self.dim, &self.unit);
        for (&m, c) in &self.terms {
            if degree(m) == p {
                out.terms.insert(m, c.clone());
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.re().abs()).fold(0.0, f64::max)
    }

    /// Pull back along a map with Jacobian `jac[a][b] = ∂z^a/∂w^b` (source rows,
    /// target columns).
    pub fn pullback(&self, jac: &[Vec<S>]) -> Self {
        assert_eq!(jac.len(), self.dim, "Jacobian rows must match the cobasis");
        let target = jac.first().map_or(0, |r| r.len());
        let mut out = Self::zero(target, &self.unit);
        for (&m, c) in &self.terms {
            let src: Vec<usize> = (0..self.dim).filter(|a| m & (1 << a) != 0).collect();
            let p = src.len();
            if p > target {
                continue;
            }
            for cols in combinations(target, p) {
                let minor: Vec<Vec<S>> = src.iter().map(|&a| cols.iter().map(|&b| jac[a][b].clone()).collect()).collect();
                let det = if p == 0 { self.unit.clone() } else { crate::linalg::det(&minor) };
                let tm: Mask = cols.iter().fold(0, |acc, &b| acc | (1 << b));
                out.add_term(tm, c.clone() * det);
            }
        }
        out
    }

    /// Embed as `Σ c · dz^I ⊗ e_fiber` with complex weight `w`.
    pub fn to_multivector(&self, n_fiber: usize, fiber: Mask, w: (f64, f64)) -> Multivector<S> {
        let mut out = Multivector::zero(self.dim, n_fiber, &self.unit);
        for (&m, c) in &self.terms {
            out.add_term(m, fiber, Cx::real(c.clone()).mul_c(w.0, w.1));
        }
        out
    }
}

/// All increasing `k`-subsets of `0..n`.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

impl Form<OJet> {
    /// Exterior derivative; the jet variables are the cobasis coordinates.
    pub fn d(&self) -> Form<OJet> {
        let nvars = self.unit.space().nvars();
        assert_eq!(nvars, self.dim, "jet variables must match the cobasis");
        let unit = self.unit.truncate(self.unit.order().saturating_sub(1));
        let mut out = Form::zero(self.dim, &unit);
        for (&m, c) in &self.terms {
            for var in 0..nvars {
                if let Some(s) = wedge_sign(1 << var, m) {
                    out.add_term(m | (1 << var), c.partial(var) * s);
                }
            }
        }
        out
    }

    pub fn values(&self) -> Form<f64> {
        let mut out = Form::zero(self.dim, &1.0);
        for (&m, c) in &self.terms {
            out.terms.insert(m, c.re());
        }
        out
    }

    pub fn truncate(&self, order: usize) -> Form<OJet> {
        Form {
            dim: self.dim,
            unit: self.unit.truncate(order),
            terms: self.terms.iter().map(|(m, c)| (*m, c.truncate(order))).collect(),
        }
    }
}

impl Multivector<OJet> {
    /// Real part of a fiber-degree-0 element as a form.
    pub fn real_form(&self) -> Form<OJet> {
        let mut out = Form::zero(self.n_form(), self.unit());
        for (&(f, b), c) in self.terms() {
            if b == 0 {
                out.add_term(f, c.re.clone());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::JetSpace;

    #[test]
    fn d_of_x_dy_is_dx_dy() {
        let s = JetSpace::get(2, 2);
        let x = OJet::variable(s, 0.3, 0);
        let zero = x.zero_like();
        let f = Form::one_form(vec![zero, x]);
        let df = f.d();
        assert!((df.coeff(&[0, 1]).re() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn d_squared_vanishes() {
        let s = JetSpace::get(3, 3);
        let z: Vec<OJet> = (0..3).map(|i| OJet::variable(s, 0.2 + 0.1 * i as f64, i)).collect();
        let f = Form::one_form(vec![
            (z[0].clone() * z[1].clone()).sin(),
            z[2].exp() * z[0].clone(),
            (z[1].clone() + z[2].square()).cos(),
        ]);
        assert!(f.d().d().max_abs() < 1e-13);
    }

    #[test]
    fn pullback_of_area_form() {
        // z = (w0, w1, w0 + 2 w1): dz0∧dz2 pulls back to 2 dw0∧dw1
        let jac = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 2.0]];
        let mut f = Form::zero(3, &1.0);
        f.add_term(0b101, 1.0);
        let p = f.pullback(&jac);
        assert!((p.coeff(&[0, 1]) - 2.0).abs() < 1e-15);
    }
}
