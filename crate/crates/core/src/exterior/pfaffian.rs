//! Skew matrices, the `𝔰𝔬 ↔ Λ²` identification and the combinatorial Pfaffian.

use super::cx::Cx;
use super::multivector::Multivector;
use crate::error::{GbcError, Result};
use crate::jet::Scalar;

/// Entries usable in the matching sum: reals, or commuting even forms.
pub trait MatchingRing: Clone {
    fn ring_zero(&self) -> Self;
    fn ring_one(&self) -> Self;
    fn ring_add(&self, other: &Self) -> Self;
    fn ring_mul(&self, other: &Self) -> Self;
    fn ring_neg(&self) -> Self;
}

impl MatchingRing for f64 {
    fn ring_zero(&self) -> Self {
        0.0
    }
    fn ring_one(&self) -> Self {
        1.0
    }
    fn ring_add(&self, o: &Self) -> Self {
        self + o
    }
    fn ring_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn ring_neg(&self) -> Self {
        -self
    }
}

/// Even-degree forms commute, so they can stand in for matrix entries.
impl<S: Scalar> MatchingRing for Multivector<S> {
    fn ring_zero(&self) -> Self {
        Multivector::zero(self.n_form(), self.n_fiber(), self.unit())
    }
    fn ring_one(&self) -> Self {
        Multivector::one(self.n_form(), self.n_fiber(), self.unit())
    }
    fn ring_add(&self, o: &Self) -> Self {
        self.add(o).expect("entries share a shape")
    }
    fn ring_mul(&self, o: &Self) -> Self {
        self.product(o).expect("entries share a shape")
    }
    fn ring_neg(&self) -> Self {
        self.neg()
    }
}

/// Antisymmetric matrix stored by its strict upper triangle.
#[derive(Clone, Debug)]
pub struct SkewMatrix<T = f64> {
    dim: usize,
    upper: Vec<T>,
}

fn upper_index(dim: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < dim);
    i * dim - i * (i + 1) / 2 + (j - i - 1)
}

impl<T: MatchingRing> SkewMatrix<T> {
    /// Build from `entry(i, j)` for `i < j`.
    pub fn from_upper(dim: usize, mut entry: impl FnMut(usize, usize) -> T) -> Self {
        let mut upper = Vec::with_capacity(dim * dim.saturating_sub(1) / 2);
        for i in 0..dim {
            for j in i + 1..dim {
                upper.push(entry(i, j));
            }
        }
        SkewMatrix { dim, upper }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `(i, j)`; `zero` supplies the diagonal.
    pub fn get(&self, i: usize, j: usize, zero: &T) -> T {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.upper[upper_index(self.dim, i, j)].clone(),
            Greater => self.upper[upper_index(self.dim, j, i)].ring_neg(),
            Equal => zero.ring_zero(),
        }
    }

    pub fn neg(&self) -> Self {
        SkewMatrix { dim: self.dim, upper: self.upper.iter().map(T::ring_neg).collect() }
    }
}

impl SkewMatrix<f64> {
    /// Validate and wrap a dense antisymmetric matrix.
    pub fn from_dense(m: &[Vec<f64>]) -> Result<Self> {
        let dim = m.len();
        for i in 0..dim {
            if m[i].len() != dim {
                return Err(GbcError::Dimension("matrix is not square".into()));
            }
            for j in 0..dim {
                let tol = 1e-12 * (1.0 + m[i][j].abs());
                if (m[i][j] + m[j][i]).abs() > tol {
                    return Err(GbcError::Domain(format!("entries ({i},{j}) and ({j},{i}) are not antisymmetric")));
                }
            }
        }
        Ok(Self::from_upper(dim, |i, j| m[i][j]))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j, &0.0)).collect()).collect()
    }

    /// `Σ_{i<j} a_ij e_i∧e_j`, the bivector whose exponential integrates to `Pf(a)`.
    pub fn to_bivector(&self, n_form: usize) -> Multivector<f64> {
        let mut m = Multivector::zero(n_form, self.dim, &1.0);
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let a = self.get(i, j, &0.0);
                if a != 0.0 {
                    m.add_term(0, (1 << i) | (1 << j), Cx::new(a, 0.0));
                }
            }
        }
        m
    }
}

/// Signed sum over perfect matchings, `Pf(A) = Σ sgn(μ) Π A_{i j}`. Odd
/// dimensions give zero.
pub fn pfaffian_matching<T: MatchingRing>(a: &SkewMatrix<T>, zero: &T) -> T {
    fn rec<T: MatchingRing>(a: &SkewMatrix<T>, idx: &[usize], zero: &T) -> T {
        if idx.is_empty() {
            return zero.ring_one();
        }
        if idx.len() % 2 == 1 {
            return zero.ring_zero();
        }
        let first = idx[0];
        let mut acc = zero.ring_zero();
        for (pos, &j) in idx.iter().enumerate().skip(1) {
            let rest: Vec<usize> = idx.iter().enumerate().filter(|&(p, _)| p != 0 && p != pos).map(|(_, &v)| v).collect();
            let term = a.get(first, j, zero).ring_mul(&rec(a, &rest, zero));
            // pairing idx[0] with idx[pos] costs pos - 1 transpositions
            acc = if pos % 2 == 1 { acc.ring_add(&term) } else { acc.ring_add(&term.ring_neg()) };
        }
        acc
    }
    let idx: Vec<usize> = (0..a.dim()).collect();
    rec(a, &idx, zero)
}

/// `B ↦ ½ Σ g(B e_i, e_j) e_i∧e_j` in an orthonormal frame, i.e. `Σ_{i<j} B_{ji} e_i∧e_j`.
pub fn so_to_wedge2(b: &SkewMatrix<f64>, n_form: usize) -> Multivector<f64> {
    b.neg().to_bivector(n_form)
}

/// Inverse of [`so_to_wedge2`] on elements of bidegree `(0, 2)`.
pub fn wedge2_to_so(m: &Multivector<f64>) -> Result<SkewMatrix<f64>> {
    if !m.is_bidegree(0, 2) {
        return Err(GbcError::Domain("expected an element of bidegree (0,2)".into()));
    }
    let n = m.n_fiber();
    Ok(SkewMatrix::from_upper(n, |i, j| {
        -m.coefficient(0, (1 << i) | (1 << j)).map_or(0.0, |c| c.re)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(dim: usize) -> SkewMatrix<f64> {
        SkewMatrix::from_upper(dim, |i, j| (1.0 + i as f64) * 0.3 - (j as f64).sin())
    }

    #[test]
    fn pfaffian_squares_to_determinant() {
        for dim in [2, 4, 6] {
            let a = sample(dim);
            let pf = pfaffian_matching(&a, &0.0);
            let det = crate::linalg::det_f64(&a.to_dense());
            assert!((pf * pf - det).abs() < 1e-10 * det.abs().max(1.0), "dim {dim}");
        }
        assert_eq!(pfaffian_matching(&sample(3), &0.0), 0.0);
    }

    #[test]
    fn four_by_four_closed_form() {
        let a = sample(4);
        let g = |i, j| a.get(i, j, &0.0);
        let expected = g(0, 1) * g(2, 3) - g(0, 2) * g(1, 3) + g(0, 3) * g(1, 2);
        assert!((pfaffian_matching(&a, &0.0) - expected).abs() < 1e-14);
    }

    #[test]
    fn so_wedge2_round_trip() {
        let b = sample(4);
        let back = wedge2_to_so(&so_to_wedge2(&b, 0)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((back.get(i, j, &0.0) - b.get(i, j, &0.0)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rejects_non_antisymmetric() {
        assert!(SkewMatrix::from_dense(&[vec![0.0, 1.0], vec![1.0, 0.0]]).is_err());
    }
}
