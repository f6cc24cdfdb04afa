//! Randomized checks of the bigraded algebra: graded commutativity, the
//! contraction Leibniz rule, associativity, and the Berezin route to the
//! Pfaffian against the matching-sum oracle.

mod common;

use common::*;
use finsler_gbc::exterior::{pfaffian_matching, so_to_wedge2, wedge2_to_so, Cx, Multivector, SkewMatrix};
use finsler_gbc::linalg::det_f64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `(i, j)` with `i + j ≤ 4` and `j ≤ N_FIBER`.
fn bidegree() -> impl Strategy<Value = (usize, usize)> {
    (0usize..=4).prop_flat_map(|i| (Just(i), 0..=(4 - i).min(N_FIBER)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn equal_bidegree_elements_are_central(seed in any::<u64>(), (i, j) in bidegree(), k in 0usize..=2) {
        prop_assert!(commutator_defect(seed, i, j, k) < 1e-12);
    }

    #[test]
    fn contraction_is_a_graded_derivation(seed in any::<u64>(), (i, j) in bidegree(), k in 0usize..=2) {
        prop_assert!(leibniz_defect(seed, i, j, k) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn product_is_associative_and_bilinear(seed in any::<u64>(), d in proptest::collection::vec((0usize..=2, 0usize..=2), 3)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_mv(&mut rng, d[0].0, d[0].1);
        let b = random_mv(&mut rng, d[1].0, d[1].1);
        let c = random_mv(&mut rng, d[2].0, d[2].1);
        let left = a.product(&b).unwrap().product(&c).unwrap();
        let right = a.product(&b.product(&c).unwrap()).unwrap();
        prop_assert!(diff(&left, &right) < 1e-12);
        let lin = a.scale(2.5).add(&c).unwrap().product(&b).unwrap();
        let split = a.product(&b).unwrap().scale(2.5).add(&c.product(&b).unwrap()).unwrap();
        prop_assert!(diff(&lin, &split) < 1e-12);
    }

    #[test]
    fn berezin_ignores_lower_fiber_degree(seed in any::<u64>(), i in 0usize..=3, j in 0usize..N_FIBER) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(random_mv(&mut rng, i, j).berezin().max_abs(), 0.0);
    }
}

#[test]
fn exhaustive_bidegree_sweep() {
    let mut worst: f64 = 0.0;
    for i in 0..=4 {
        for j in 0..=(4 - i).min(N_FIBER) {
            for k in 0..=2 {
                for seed in 0..20 {
                    let s = (i * 100 + j * 10 + k) as u64 * 1000 + seed;
                    worst = worst.max(commutator_defect(s, i, j, k)).max(leibniz_defect(s, i, j, k));
                }
            }
        }
    }
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn product_sign_on_mixed_generators() {
    let mut a = Multivector::zero(2, 2, &1.0);
    a.add_monomial(&[0], &[0], Cx::real(1.0)).unwrap();
    let mut b = Multivector::zero(2, 2, &1.0);
    b.add_monomial(&[1], &[1], Cx::real(1.0)).unwrap();
    let p = a.product(&b).unwrap();
    assert_eq!(p.coefficient(0b11, 0b11).unwrap().re, -1.0);
    let one = Multivector::one(2, 2, &1.0);
    assert_eq!(diff(&one.product(&p).unwrap(), &p), 0.0);
}

#[test]
fn berezin_of_exponential_is_the_matching_pfaffian() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for dim in 1..=8 {
        for _ in 0..100 {
            let a = random_skew(&mut rng, dim);
            let minus = a.neg();
            let route = minus.to_bivector(0).exp_even(None).unwrap().berezin();
            let value = route.coefficient(0, 0).map_or(0.0, |c| c.re);
            let oracle = pfaffian_matching(&minus, &0.0);
            assert!((value - oracle).abs() < 1e-10, "dim {dim}: {value} vs {oracle}");
            if dim % 2 == 1 {
                assert_eq!(oracle, 0.0);
            }
        }
    }
}

#[test]
fn pfaffian_squared_is_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for dim in 2..=8 {
        for _ in 0..100 {
            let a = random_skew(&mut rng, dim);
            let pf = pfaffian_matching(&a, &0.0);
            let det = det_f64(&a.to_dense());
            assert!((pf * pf - det).abs() < 1e-10 * det.abs().max(1.0), "dim {dim}");
        }
    }
}

#[test]
fn pfaffian_small_cases() {
    let a = SkewMatrix::from_upper(2, |_, _| 0.7);
    assert_eq!(pfaffian_matching(&a, &0.0), 0.7);
    let (p, q) = (1.5, -0.4);
    let blocks = SkewMatrix::from_upper(4, |i, j| match (i, j) {
        (0, 1) => p,
        (2, 3) => q,
        _ => 0.0,
    });
    assert!((pfaffian_matching(&blocks, &0.0) - p * q).abs() < 1e-15);
}

/// Entries are random 2-forms; both routes must agree as forms.
#[test]
fn form_valued_pfaffian_matches_berezin_route() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for dim in 2..=8 {
        let n_form = dim.min(6);
        for _ in 0..5 {
            let entry = |rng: &mut ChaCha8Rng| {
                let mut e = Multivector::zero(n_form, 0, &1.0);
                for f in masks(n_form, 2) {
                    e.add_term(f, 0, Cx::real(rng.gen_range(-1.0..1.0)));
                }
                e
            };
            let ents: Vec<Multivector<f64>> = (0..dim * (dim - 1) / 2).map(|_| entry(&mut rng)).collect();
            let mut it = ents.iter().cloned();
            let a = SkewMatrix::from_upper(dim, |_, _| it.next().unwrap());
            let zero = Multivector::zero(n_form, 0, &1.0);
            let oracle = pfaffian_matching(&a, &zero);

            let mut omega = Multivector::zero(n_form, dim, &1.0);
            for i in 0..dim {
                for j in i + 1..dim {
                    for (&(f, _), c) in a.get(i, j, &zero).terms() {
                        omega.add_term(f, (1 << i) | (1 << j), c.clone());
                    }
                }
            }
            let route = omega.exp_even(None).unwrap().berezin();
            let mut worst: f64 = 0.0;
            for (&(f, _), c) in oracle.terms() {
                let r = route.coefficient(f, 0).map_or(0.0, |x| x.re);
                worst = worst.max((r - c.re).abs());
            }
            for (&(f, _), c) in route.terms() {
                if oracle.coefficient(f, 0).is_none() {
                    worst = worst.max(c.re.abs());
                }
            }
            assert!(worst < 1e-10, "dim {dim}: {worst}");
        }
    }
}

#[test]
fn so_identification_examples() {
    let j = SkewMatrix::from_upper(2, |_, _| 1.0);
    let w = so_to_wedge2(&j, 0);
    assert_eq!(w.coefficient(0, 0b11).unwrap().re, -1.0);
    let z = SkewMatrix::from_upper(3, |_, _| 0.0);
    assert_eq!(so_to_wedge2(&z, 0).max_abs(), 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for dim in 2..=5 {
        let (a, b) = (random_skew(&mut rng, dim), random_skew(&mut rng, dim));
        let sum = SkewMatrix::from_upper(dim, |i, k| 2.0 * a.get(i, k, &0.0) - b.get(i, k, &0.0));
        let lhs = so_to_wedge2(&sum, 0);
        let rhs = so_to_wedge2(&a, 0).scale(2.0).sub(&so_to_wedge2(&b, 0)).unwrap();
        assert!(diff(&lhs, &rhs) < 1e-15);
        let back = wedge2_to_so(&so_to_wedge2(&a, 0)).unwrap();
        assert!((0..dim).all(|i| (0..dim).all(|k| back.get(i, k, &0.0) == a.get(i, k, &0.0))));
    }
}
