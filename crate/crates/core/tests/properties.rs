use coep::classification::{
    check_rem10, check_rem34, classify, gen_coep_non_hermitian, gen_ep, gen_hermitian_coep, gen_random,
};
use coep::hermitian::{derivative_verdict, is_hermitian, sampled_verdict};
use coep::lifted::{check_pro37, check_pro38, check_thm39};
use coep::linalg::{
    matrix_exp, null_basis, operator_norm, range_basis, subspace_intersect, subspace_sum, ComplexMatrix, NormSpec,
    Subspace, ToleranceConfig,
};
use coep::perturbation::{gen_perturbation, perturbation_report, PerturbationPair};
use coep::pseudoinverse::{mp_inverse_euclidean, mp_inverse_rank_factorization, mp_verify};
use coep::random::{ginibre, rng_from_seed};
use proptest::prelude::*;
use rand::Rng;

fn cfg() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn pinv(a: &ComplexMatrix) -> ComplexMatrix {
    mp_inverse_euclidean(a, &cfg()).unwrap().0
}

fn gap(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    x.max_abs_diff(y) / x.max_abs().max(y.max_abs()).max(1.0)
}

/// Generic matrix of rank `r`.
fn low_rank(n: usize, r: usize, seed: u64) -> ComplexMatrix {
    let mut rng = rng_from_seed(seed);
    let f = ginibre(&mut rng, n, r);
    let g = ginibre(&mut rng, r, n);
    &f * &g
}

fn any_instance(kind: u8, half: usize, seed: u64) -> ComplexMatrix {
    let n = 2 * half;
    match kind % 4 {
        0 => gen_hermitian_coep(n, seed).unwrap(),
        1 => gen_coep_non_hermitian(n, seed).unwrap(),
        2 => gen_ep(n, seed).unwrap(),
        _ => gen_random(n, seed).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_nullity(n in 1usize..=7, r in 0usize..=7, seed: u64) {
        let r = r.min(n);
        let a = if r == 0 { ComplexMatrix::zeros(n, n) } else { low_rank(n, r, seed) };
        let c = cfg();
        let range = range_basis(&a, &c).dim();
        prop_assert_eq!(range, r);
        prop_assert_eq!(range + null_basis(&a, &c).dim(), n);
    }

    #[test]
    fn exp_inverse_pair(n in 1usize..=6, scale in 0.0f64..10.0, seed: u64) {
        let g = ginibre(&mut rng_from_seed(seed), n, n);
        let a = g.scale_real(scale / operator_norm(&g, &NormSpec::l2()).unwrap());
        let prod = matrix_exp(&a).unwrap() * matrix_exp(&a.scale_real(-1.0)).unwrap();
        prop_assert!(gap(&prod, &ComplexMatrix::identity(n)) <= cfg().residual);
    }

    #[test]
    fn subspace_dimension_formula(n in 2usize..=8, p in 0usize..=8, q in 0usize..=8, shared in 0usize..=4, seed: u64) {
        let mut rng = rng_from_seed(seed);
        let (p, q) = (p.min(n), q.min(n));
        let shared = shared.min(p).min(q);
        let common = ginibre(&mut rng, n, shared);
        let u = common.hstack(&ginibre(&mut rng, n, p - shared));
        let v = common.hstack(&ginibre(&mut rng, n, q - shared));
        let c = cfg();
        let (u, v) = (Subspace::span(&u, &c), Subspace::span(&v, &c));
        let sum = subspace_sum(&u, &v, &c).unwrap().dim();
        let cap = subspace_intersect(&u, &v, &c).unwrap().dim();
        prop_assert_eq!(sum + cap, u.dim() + v.dim());
    }

    #[test]
    fn norms_are_submultiplicative(n in 1usize..=6, seed: u64, k in 0usize..4) {
        let mut rng = rng_from_seed(seed);
        let (a, b) = (ginibre(&mut rng, n, n), ginibre(&mut rng, n, n));
        let norm = [NormSpec::l1(), NormSpec::l2(), NormSpec::linf(), NormSpec::lp(3.0).unwrap()][k];
        let ab = operator_norm(&(&a * &b), &norm).unwrap();
        let bound = operator_norm(&a, &norm).unwrap() * operator_norm(&b, &norm).unwrap();
        prop_assert!(ab <= bound * (1.0 + 1e-9) + 1e-12, "{} > {}", ab, bound);
    }

    #[test]
    fn hermitian_set_is_real_linear_and_closed_under_complement(
        n in 1usize..=5, s in -3.0f64..3.0, t in -3.0f64..3.0, k in 0usize..3, seed: u64,
    ) {
        let norm = [NormSpec::l1(), NormSpec::l2(), NormSpec::linf()][k];
        let mut rng = rng_from_seed(seed);
        let mut draw = || if norm.is_euclidean() {
            let g = ginibre(&mut rng, n, n);
            (&g + g.adjoint()).scale_real(0.5)
        } else {
            let d: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            ComplexMatrix::from_real_diagonal(&d)
        };
        let (a, b) = (draw(), draw());
        let c = cfg();
        let combo = a.scale_real(s) + b.scale_real(t);
        let complement = ComplexMatrix::identity(n) - &a;
        prop_assert!(is_hermitian(&combo, &norm, &c).unwrap().is_hermitian);
        prop_assert!(is_hermitian(&complement, &norm, &c).unwrap().is_hermitian);
    }

    #[test]
    fn sampled_and_derivative_tests_agree(n in 1usize..=4, hermitian: bool, k in 0usize..3, seed: u64) {
        let norm = [NormSpec::l1(), NormSpec::l2(), NormSpec::linf()][k];
        let mut rng = rng_from_seed(seed);
        let a = match (hermitian, norm.is_euclidean()) {
            (true, true) => {
                let g = ginibre(&mut rng, n, n);
                (&g + g.adjoint()).scale_real(0.5)
            }
            (true, false) => {
                let d: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
                ComplexMatrix::from_real_diagonal(&d)
            }
            (false, _) => ginibre(&mut rng, n, n),
        };
        let c = cfg();
        let sampled = sampled_verdict(&a, &norm, &c).unwrap().is_hermitian;
        let slope = derivative_verdict(&a, &norm, &c).unwrap().is_hermitian;
        prop_assert_eq!(sampled, slope);
        prop_assert_eq!(sampled, hermitian);
    }

    #[test]
    fn mp_inverse_is_unique_and_involutive(n in 1usize..=7, r in 1usize..=7, seed: u64) {
        let a = low_rank(n, r.min(n), seed);
        let c = cfg();
        let l2 = NormSpec::l2();
        let (x, cert) = mp_inverse_euclidean(&a, &c).unwrap();
        let y = mp_inverse_rank_factorization(&a, &c).unwrap();
        prop_assert!(cert.valid);
        prop_assert!(mp_verify(&a, &y, &l2, &c).unwrap().valid);
        prop_assert!(gap(&x, &y) <= 1e-9);
        prop_assert!(gap(&pinv(&x), &a) <= 1e-9);
    }

    #[test]
    fn lifted_equivalences_agree(kind: u8, half in 1usize..=3, seed: u64) {
        let a = any_instance(kind, half, seed);
        let d = pinv(&a);
        let c = cfg();
        prop_assert!(check_pro37(&a, &d, &c).unwrap().agrees);
        prop_assert!(check_pro38(&a, &d, &c).unwrap().agrees);
        prop_assert!(check_thm39(&a, &d, &c).unwrap().agrees);
    }

    #[test]
    fn canonical_idempotent_identities(kind in 0u8..2, half in 1usize..=4, seed: u64) {
        let a = any_instance(kind, half, seed);
        let c = cfg();
        let r = classify(&a, &NormSpec::l2(), &c).unwrap();
        prop_assert_eq!(r.is_co_ep, Some(true));
        let d = r.mp_inverse.unwrap();
        let (h, k) = (r.h.unwrap(), r.k.unwrap());
        let zero = ComplexMatrix::zeros(a.rows(), a.rows());
        for (lhs, rhs) in [
            (&h * &h, h.clone()),
            (&h * &a, a.clone()),
            (&h * &d, zero.clone()),
            (&k * &k, k.clone()),
            (&a * &k, zero),
            (&d * &k, d.clone()),
        ] {
            prop_assert!(gap(&lhs, &rhs) <= c.residual);
        }
        prop_assert!(check_rem10(&a, &c).unwrap().holds);
    }

    #[test]
    fn hermitian_coep_characterizations(kind: u8, half in 1usize..=3, seed: u64) {
        let a = any_instance(kind, half, seed);
        let c = cfg();
        let r = classify(&a, &NormSpec::l2(), &c).unwrap();
        let d = r.mp_inverse.as_ref().unwrap();
        let n = a.rows();
        let sum_is_one = gap(&(&a * d + d * &a), &ComplexMatrix::identity(n)) <= c.residual;
        let nilpotent = (&a * &a).max_abs() <= c.residual * a.max_abs().max(1.0);
        let hermitian = r.is_hermitian_co_ep.unwrap();
        prop_assert_eq!(hermitian, sum_is_one);
        prop_assert_eq!(hermitian, r.is_co_ep.unwrap() && nilpotent);
        prop_assert!(!(r.is_ep.unwrap() && r.is_co_ep.unwrap()));
        prop_assert!(check_rem34(&a, d, &c).unwrap().holds);
    }

    #[test]
    fn perturbation_consequences(kind: u8, half in 1usize..=3, eps in 0.01f64..0.95, seed: u64) {
        let a = any_instance(kind, half, seed);
        let d = pinv(&a);
        let c = cfg();
        let b = gen_perturbation(&a, &d, eps, &NormSpec::l2(), seed ^ 0x9e37).unwrap();
        let corner = &a * &d * (&b - &a) * &d * &a;
        prop_assert!(gap(&corner, &(&b - &a)) <= 1e-12);
        let pair = PerturbationPair::euclidean(a.clone(), b, &c).unwrap();
        let r = perturbation_report(&pair, &c).unwrap();
        prop_assert!(r.condition.holds);
        prop_assert!((r.condition.contraction - eps).abs() <= 1e-12);
        prop_assert!(r.svd_gap.unwrap() <= 1e-9);
        let e = r.error_bound.unwrap();
        prop_assert!(e.realized <= e.bound * (1.0 + 1e-12));
        if let Some(p) = r.class_preservation {
            prop_assert!(p.holds);
        }
    }
}
