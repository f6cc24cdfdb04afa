//! Helpers shared by the integration tests: random elements of the bigraded
//! algebra and the closed-form Randers arc-length oracle.
#![allow(dead_code)]

use finsler_gbc::exterior::{contract, Cx, Mask, Multivector, SkewMatrix};
use finsler_gbc::numeric::trapezoid_periodic;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const N_FORM: usize = 5;
pub const N_FIBER: usize = 3;

pub fn masks(n: usize, deg: usize) -> Vec<Mask> {
    (0..1u32 << n).filter(|m| m.count_ones() as usize == deg).collect()
}

/// Random element of bidegree `(i, j)` with complex coefficients.
pub fn random_mv(rng: &mut ChaCha8Rng, i: usize, j: usize) -> Multivector<f64> {
    let mut m = Multivector::zero(N_FORM, N_FIBER, &1.0);
    for f in masks(N_FORM, i) {
        for b in masks(N_FIBER, j) {
            if rng.gen_bool(0.6) {
                m.add_term(f, b, Cx::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
        }
    }
    m
}

pub fn random_vector(rng: &mut ChaCha8Rng) -> Multivector<f64> {
    let mut s = Multivector::zero(N_FORM, N_FIBER, &1.0);
    for k in 0..N_FIBER {
        s.add_term(0, 1 << k, Cx::new(rng.gen_range(-1.0..1.0), 0.0));
    }
    s
}

pub fn random_skew(rng: &mut ChaCha8Rng, dim: usize) -> SkewMatrix<f64> {
    SkewMatrix::from_upper(dim, |_, _| rng.gen_range(-1.0..1.0))
}

pub fn diff(a: &Multivector<f64>, b: &Multivector<f64>) -> f64 {
    a.sub(b).unwrap().max_abs()
}

/// `α·β − β·α` for `α ∈ 𝒜^{i,j}`, `β ∈ 𝒜^{k,k}`.
pub fn commutator_defect(seed: u64, i: usize, j: usize, k: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_mv(&mut rng, i, j);
    let b = random_mv(&mut rng, k, k);
    diff(&a.product(&b).unwrap(), &b.product(&a).unwrap())
}

/// `ι(s)(α·β) − (ι(s)α)·β − (−1)^{i+j} α·(ι(s)β)`.
pub fn leibniz_defect(seed: u64, i: usize, j: usize, k: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_mv(&mut rng, i, j);
    let b = random_mv(&mut rng, k, k);
    let s = random_vector(&mut rng);
    let lhs = contract(&s, &a.product(&b).unwrap()).unwrap();
    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
    let rhs = contract(&s, &a)
        .unwrap()
        .product(&b)
        .unwrap()
        .add(&a.product(&contract(&s, &b).unwrap()).unwrap().scale(sign))
        .unwrap();
    diff(&lhs, &rhs)
}

/// Length of `y(θ) = (cos θ, sin θ)/(1 + b cos θ)` in `g_y` for `F = |y| + b y¹`,
/// with the closed-form Randers fundamental tensor.
pub fn randers_arc_length(b: f64, nodes: usize, shift: f64) -> f64 {
    trapezoid_periodic(nodes)
        .iter()
        .map(|&(t, w)| {
            let t = t + shift;
            let (c, s) = (t.cos(), t.sin());
            let fu = 1.0 + b * c;
            let y = [c / fu, s / fu];
            let dy = [-s / (fu * fu), (c + b) / (fu * fu)];
            let alpha = (y[0] * y[0] + y[1] * y[1]).sqrt();
            let f = alpha + b * y[0];
            let yh = [y[0] / alpha, y[1] / alpha];
            let bv = [b, 0.0];
            let g = |i: usize, j: usize| {
                let d = if i == j { 1.0 } else { 0.0 };
                f / alpha * (d - yh[i] * yh[j]) + (yh[i] + bv[i]) * (yh[j] + bv[j])
            };
            let q: f64 = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| g(i, j) * dy[i] * dy[j]).sum();
            w * q.sqrt()
        })
        .sum()
}
