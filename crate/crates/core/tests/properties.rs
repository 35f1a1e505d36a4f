//! Property suites for the invariants that hold across the whole input
//! space rather than at golden points.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use proptest::prelude::*;

use polignac::arith::{crt, factorize, FactorBudget, ResidueClass};
use polignac::represent::{
    crocker_divisibility, find_rep_p2a2b, find_rep_p2b, find_rep_ppow2a2b, prime_power,
    scan_density, Form, DEFAULT_SCAN_BUDGET,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factorization_recomposes_exactly(n in 1u64..=1_000_000_000_000) {
        let budget = FactorBudget::default();
        let f = factorize(&BigUint::from(n), &budget);
        prop_assert_eq!(f.recompose(), BigUint::from(n));
        prop_assert!(f.verify().is_ok());
        // All budgets in range factor 10^12 completely.
        prop_assert!(f.complete);
    }

    #[test]
    fn factorization_is_deterministic(n in 2u64..=u64::MAX) {
        let budget = FactorBudget { trial_bound: 10_000, rho_iterations: 1 << 16 };
        let a = factorize(&BigUint::from(n), &budget);
        let b = factorize(&BigUint::from(n), &budget);
        prop_assert_eq!(a.recompose(), BigUint::from(n));
        prop_assert_eq!(a.complete, b.complete);
        prop_assert_eq!(a.factors, b.factors);
    }

    #[test]
    fn crt_round_trip(r1 in 0u64..3, r2 in 0u64..5, r3 in 0u64..7, r4 in 0u64..11) {
        let classes = [
            ResidueClass::new(BigUint::from(r1), BigUint::from(3u32)).unwrap(),
            ResidueClass::new(BigUint::from(r2), BigUint::from(5u32)).unwrap(),
            ResidueClass::new(BigUint::from(r3), BigUint::from(7u32)).unwrap(),
            ResidueClass::new(BigUint::from(r4), BigUint::from(11u32)).unwrap(),
        ];
        let out = crt(&classes).unwrap();
        prop_assert_eq!(&out.modulus, &BigUint::from(3u32 * 5 * 7 * 11));
        for class in &classes {
            prop_assert_eq!(&out.residue % &class.modulus, class.residue.clone());
        }
    }

    #[test]
    fn witnesses_recompose(n_half in 1u64..500_000, c in 1u64..4) {
        let n = BigUint::from(2 * n_half + 1);
        if let Some(w) = find_rep_p2b(&n) {
            prop_assert_eq!(w.recompose(), n.clone());
            prop_assert!(polignac::arith::is_prime(&w.p));
            prop_assert!(w.a.is_none());
        }
        if let Some(w) = find_rep_p2a2b(&n, c) {
            prop_assert_eq!(w.recompose(), n.clone());
            prop_assert!(polignac::arith::is_prime(&w.p));
            prop_assert_eq!(w.alpha, 1);
            prop_assert!(w.a.unwrap() <= w.b);
        }
        if let Some(w) = find_rep_ppow2a2b(&n) {
            prop_assert_eq!(w.recompose(), n.clone());
            prop_assert!(polignac::arith::is_prime(&w.p));
            prop_assert!(w.alpha >= 1);
        }
    }

    #[test]
    fn crocker_identity_holds(a in 0u64..64, delta in 1u64..64) {
        let b = a + delta;
        if b <= 64 {
            let ck = crocker_divisibility(a, b).unwrap();
            prop_assert!(ck.divides);
            prop_assert_eq!(ck.modulus, (BigUint::one() << (1u64 << ck.s)) + 1u32);
        }
    }

    #[test]
    fn prime_power_agrees_with_recomposition(p_idx in 0usize..10, alpha in 1u32..7) {
        let primes = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29];
        let p = BigUint::from(primes[p_idx]);
        let v = p.pow(alpha);
        let (q, e) = prime_power(&v).unwrap();
        prop_assert_eq!(q, p);
        prop_assert_eq!(e, alpha);
    }

    #[test]
    fn scan_is_partition_independent(split in 3u64..4_000) {
        let hi = 4_001u64;
        let whole = scan_density(1, hi, Form::PrimePlus2a2b, 1, 2, DEFAULT_SCAN_BUDGET).unwrap();
        let left = scan_density(1, split, Form::PrimePlus2a2b, 1, 2, DEFAULT_SCAN_BUDGET).unwrap();
        let right = scan_density(split + 1, hi, Form::PrimePlus2a2b, 1, 2, DEFAULT_SCAN_BUDGET).unwrap();
        prop_assert_eq!(whole.scanned, left.scanned + right.scanned);
        prop_assert_eq!(whole.representable, left.representable + right.representable);
        prop_assert_eq!(
            whole.non_representable,
            left.non_representable + right.non_representable
        );
        let mut merged = left.smallest_non_representable.clone();
        merged.extend(&right.smallest_non_representable);
        prop_assert_eq!(whole.smallest_non_representable, merged);
    }
}

#[test]
fn non_prime_powers_rejected() {
    for v in [0u64, 1, 6, 12, 36, 100, 1000] {
        assert!(prime_power(&BigUint::from(v)).is_none(), "{v}");
    }
}

#[test]
fn factorization_handles_cofactor_piles() {
    // Several composites beyond the trial bound at once.
    let p1 = BigUint::from(1_048_583u64);
    let p2 = BigUint::from(1_048_589u64);
    let n = &p1 * &p1 * &p2;
    let f = factorize(&n, &FactorBudget::default());
    assert!(f.complete);
    assert_eq!(f.factors, vec![(p1, 2), (p2, 1)]);
    assert!(f.cofactor().is_one());
    assert!(!f.n.is_zero());
}
