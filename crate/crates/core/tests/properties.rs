use frobrep_core::fp::Prime;
use frobrep_core::glnrep::{dim_gln_irreducible, mod_p_reduce};
use frobrep_core::irreducibles::{classify, dim_irreducible_g, verify_socle_generic_scaled, Case};
use proptest::prelude::*;

fn dominant_pair() -> impl Strategy<Value = Vec<i32>> {
    (0i32..7, 0i32..7).prop_map(|(a, b)| vec![a.max(b), a.min(b)])
}

fn odd_prime() -> impl Strategy<Value = Prime> {
    prop::sample::select(vec![3u32, 5]).prop_map(|p| Prime::new(p).unwrap())
}

/// (p, r) with r = 2 only at p = 3, where Ω_2 stays small.
fn level() -> impl Strategy<Value = (Prime, u32)> {
    prop_oneof![odd_prime().prop_map(|p| (p, 1)), Just((Prime::new(3).unwrap(), 2))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dispatch_agrees_with_reduction(lam in dominant_pair(), p in odd_prime()) {
        let dec = mod_p_reduce(&lam, p);
        let case = classify(&lam, p);
        prop_assert_eq!(case == Case::RZero, dec.is_zero());
        prop_assert_eq!(matches!(case, Case::Fundamental(_)), !dec.is_zero() && dec.fundamental_index().is_some());
        let rep = dim_irreducible_g(&lam, 2, 1, p).unwrap();
        prop_assert_eq!(rep.case, case);
        prop_assert!(rep.dim > 0);
    }

    #[test]
    fn bounded_by_induced_dimension(lam in dominant_pair(), (p, r) in level()) {
        let rep = dim_irreducible_g(&lam, 2, r, p).unwrap();
        let full = (p.get() as u64).pow(2 * r) * dim_gln_irreducible(&lam, p).unwrap().dim;
        prop_assert!(rep.dim <= full);
        prop_assert_eq!(rep.dim == full, rep.case == Case::Generic);
    }

    #[test]
    fn determinant_periodicity(lam in dominant_pair(), (p, r) in level()) {
        let q = (p.get() as i32).pow(r);
        let shifted: Vec<i32> = lam.iter().map(|x| x + q).collect();
        prop_assert_eq!(dim_irreducible_g(&lam, 2, r, p).unwrap().dim, dim_irreducible_g(&shifted, 2, r, p).unwrap().dim);
    }

    #[test]
    fn character_evaluates_to_dimension(k in 0i32..20, p in odd_prime(), r in 1u32..3) {
        let rep = dim_irreducible_g(&[k], 1, r, p).unwrap();
        prop_assert_eq!(rep.character.evaluate_at_one(), rep.dim as i128);
    }

    #[test]
    fn generic_closure_is_linear_in_the_seed(k in 2i32..5, c in 1u32..5) {
        let p = Prime::new(5).unwrap();
        let base = verify_socle_generic_scaled(&[k], 1, 1, p, 1).unwrap();
        let scaled = verify_socle_generic_scaled(&[k], 1, 1, p, c).unwrap();
        prop_assert_eq!(base.closure_dim, scaled.closure_dim);
        prop_assert_eq!(base.closure_trace, scaled.closure_trace);
    }
}
