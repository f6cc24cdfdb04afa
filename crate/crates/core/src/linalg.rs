//! Small dense linear algebra over any [`Scalar`].

use crate::error::{GbcError, Result};
use crate::jet::Scalar;

pub type Mat<S> = Vec<Vec<S>>;

fn identity_like<S: Scalar>(proto: &S, n: usize) -> Mat<S> {
    (0..n).map(|i| (0..n).map(|j| proto.lift(if i == j { 1.0 } else { 0.0 })).collect()).collect()
}

/// Gauss-Jordan inverse with partial pivoting on the real value.
pub fn inverse<S: Scalar>(a: &Mat<S>) -> Result<Mat<S>> {
    let n = a.len();
    let mut m: Mat<S> = a.clone();
    let mut inv = identity_like(&a[0][0], n);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].re().abs().total_cmp(&m[j][col].re().abs()))
            .unwrap_or(col);
        if m[piv][col].re().abs() < 1e-300 {
            return Err(GbcError::Domain("singular matrix".into()));
        }
        m.swap(col, piv);
        inv.swap(col, piv);
        let p = m[col][col].recip();
        for j in 0..n {
            m[col][j] = m[col][j].clone() * p.clone();
            inv[col][j] = inv[col][j].clone() * p.clone();
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = m[i][col].clone();
            for j in 0..n {
                m[i][j] = m[i][j].clone() - f.clone() * m[col][j].clone();
                inv[i][j] = inv[i][j].clone() - f.clone() * inv[col][j].clone();
            }
        }
    }
    Ok(inv)
}

/// Determinant by Laplace expansion along the first row (n is tiny here).
pub fn det<S: Scalar>(a: &Mat<S>) -> S {
    let n = a.len();
    match n {
        1 => a[0][0].clone(),
        2 => a[0][0].clone() * a[1][1].clone() - a[0][1].clone() * a[1][0].clone(),
        _ => {
            let mut acc = a[0][0].zero_like();
            for j in 0..n {
                let minor: Mat<S> =
                    (1..n).map(|i| (0..n).filter(|&k| k != j).map(|k| a[i][k].clone()).collect()).collect();
                let term = a[0][j].clone() * det(&minor);
                acc = if j % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}

/// Determinant of a real matrix by LU with partial pivoting.
pub fn det_f64(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = 1.0;
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap_or(col);
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(piv, col);
            d = -d;
        }
        d *= m[col][col];
        for i in col + 1..n {
            let f = m[i][col] / m[col][col];
            for j in col..n {
                m[i][j] -= f * m[col][j];
            }
        }
    }
    d
}

pub fn mat_vec<S: Scalar>(a: &Mat<S>, v: &[S]) -> Vec<S> {
    a.iter()
        .map(|row| {
            row.iter().zip(v).fold(v[0].zero_like(), |acc, (x, y)| acc + x.clone() * y.clone())
        })
        .collect()
}

/// Bilinear form `u^T g v`.
pub fn bilinear<S: Scalar>(g: &Mat<S>, u: &[S], v: &[S]) -> S {
    let gv = mat_vec(g, v);
    u.iter().zip(gv).fold(u[0].zero_like(), |acc, (x, y)| acc + x.clone() * y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_det_agree() {
        let a = vec![vec![2.0, 1.0, 0.5], vec![0.3, 3.0, -1.0], vec![1.0, 0.0, 4.0]];
        let inv = inverse(&a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| a[i][k] * inv[k][j]).sum();
                assert!((s - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        assert!((det(&a) - det_f64(&a)).abs() < 1e-12);
    }
}
