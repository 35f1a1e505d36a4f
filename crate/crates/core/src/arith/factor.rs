//! Integer factorization: trial division, then Brent-cycle Pollard rho.
//!
//! Everything here is deterministic. The rho polynomial is x^2 + c with c
//! stepped 1, 2, 3, ... on cycle failure, and the starting point is always 2,
//! so identical inputs and budgets reproduce identical outputs, bit for bit.
//!
//! Mersenne numbers 2^p - 1 get a dedicated entry point whose trial division
//! walks only candidates q = 2pk + 1 with q = +-1 (mod 8); every divisor of
//! 2^p - 1 lies in that class, so the first hit is the smallest prime factor.
//! Fermat numbers 2^(2^k) + 1 get the analogous walk over q = 1 (mod 2^(k+2)).

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;

use super::primality::{is_prime, is_prime_u64, powmod_u64};
use super::{sieve_primes_bounded, FactorList};
use crate::error::{Error, Result};

/// Effort descriptor for [`factorize`] and the Mersenne/Fermat helpers.
///
/// The defaults are sized so 2^p - 1 factors completely for every prime
/// p <= 101.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorBudget {
    /// Trial division by every prime up to this bound.
    pub trial_bound: u64,
    /// Per-polynomial iteration cap for Brent rho.
    pub rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            trial_bound: 1 << 20,
            rho_iterations: 1 << 23,
        }
    }
}

/// How many polynomial offsets c = 1, 2, 3, ... to try before giving up on a
/// composite.
const RHO_POLY_ATTEMPTS: u64 = 24;

/// Complete-or-partial factorization of `n >= 1` within `budget`.
///
/// Running out of budget is not an error: the result carries
/// `complete = false` and the unfactored composite part stays in the
/// cofactor (`FactorList::cofactor`).
pub fn factorize(n: &BigUint, budget: &FactorBudget) -> FactorList {
    assert!(!n.is_zero(), "factorize requires n >= 1");
    let mut counts: BTreeMap<BigUint, u32> = BTreeMap::new();
    let mut remaining = n.clone();

    // Powers of 2 first.
    let twos = remaining.trailing_zeros().unwrap_or(0);
    if twos > 0 && !remaining.is_zero() {
        remaining >>= twos;
        counts.insert(BigUint::from(2u32), twos as u32);
    }

    // Trial division by odd primes.
    if !remaining.is_one() {
        let bound = effective_trial_bound(&remaining, budget.trial_bound);
        if bound >= 3 {
            let primes = sieve_primes_bounded(bound, u64::MAX).expect("bound >= 2");
            for &p in primes.iter().skip(1) {
                if BigUint::from(p).pow(2) > remaining {
                    break;
                }
                while (&remaining % p).is_zero() {
                    remaining /= p;
                    *counts.entry(BigUint::from(p)).or_insert(0) += 1;
                }
                if remaining.is_one() {
                    break;
                }
            }
        }
    }

    let complete = split_remaining(remaining, budget, &mut counts);
    let factors: Vec<(BigUint, u32)> = counts.into_iter().collect();
    FactorList {
        n: n.clone(),
        factors,
        complete,
    }
}

/// Don't trial-divide past the square root.
fn effective_trial_bound(n: &BigUint, bound: u64) -> u64 {
    match n.sqrt().to_u64() {
        Some(r) => bound.min(r),
        None => bound,
    }
}

/// Splits what trial division left over; returns whether everything reduced
/// to primes.
fn split_remaining(
    first: BigUint,
    budget: &FactorBudget,
    counts: &mut BTreeMap<BigUint, u32>,
) -> bool {
    let mut complete = true;
    let mut stack = vec![first];
    while let Some(piece) = stack.pop() {
        if piece.is_one() {
            continue;
        }
        if is_prime(&piece) {
            *counts.entry(piece).or_insert(0) += 1;
            continue;
        }
        if let Some((root, e)) = perfect_power(&piece) {
            for _ in 0..e {
                stack.push(root.clone());
            }
            continue;
        }
        match rho_split(&piece, budget) {
            Some(d) => {
                let q = &piece / &d;
                stack.push(d);
                stack.push(q);
            }
            None => {
                complete = false;
            }
        }
    }
    complete
}

/// n = root^e with e >= 2, if such a decomposition exists.
fn perfect_power(n: &BigUint) -> Option<(BigUint, u32)> {
    let bits = n.bits() as u32;
    for e in 2..=bits {
        let root = n.nth_root(e);
        if root < BigUint::from(2u32) {
            break;
        }
        if root.pow(e) == *n {
            return Some((root, e));
        }
    }
    None
}

/// One nontrivial divisor of an odd composite, or None if every polynomial
/// ran out of iterations.
fn rho_split(n: &BigUint, budget: &FactorBudget) -> Option<BigUint> {
    if let Some(n64) = n.to_u64() {
        for c in 1..=RHO_POLY_ATTEMPTS {
            if let Some(d) = rho_u64(n64, c, budget.rho_iterations) {
                return Some(BigUint::from(d));
            }
        }
        return None;
    }
    for c in 1..=RHO_POLY_ATTEMPTS {
        if let Some(d) = rho_big(n, c, budget.rho_iterations) {
            return Some(d);
        }
    }
    None
}

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Brent's cycle variant of Pollard rho for odd composite n < 2^64.
fn rho_u64(n: u64, c: u64, max_iters: u64) -> Option<u64> {
    let f = |x: u64| (mulmod_u64(x, x, n) + c) % n;
    let mut y = 2u64;
    let mut r = 1u64;
    let mut q = 1u64;
    let mut g = 1u64;
    let mut x = y;
    let mut ys = y;
    let mut spent = 0u64;
    const BATCH: u64 = 128;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        spent += r;
        if spent > max_iters {
            return None;
        }
        let mut k = 0u64;
        while k < r && g == 1 {
            ys = y;
            let lim = BATCH.min(r - k);
            for _ in 0..lim {
                y = f(y);
                q = mulmod_u64(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += lim;
        }
        r <<= 1;
    }
    if g == n {
        // Batch overshot past the factor; replay one step at a time.
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    if g == n {
        None
    } else {
        Some(g)
    }
}

/// Brent's cycle variant for n >= 2^64.
fn rho_big(n: &BigUint, c: u64, max_iters: u64) -> Option<BigUint> {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let abs_diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    let mut y = BigUint::from(2u32);
    let mut r = 1u64;
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut spent = 0u64;
    const BATCH: u64 = 128;
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        spent += r;
        if spent > max_iters {
            return None;
        }
        let mut k = 0u64;
        while k < r && g.is_one() {
            ys = y.clone();
            let lim = BATCH.min(r - k);
            for _ in 0..lim {
                y = f(&y);
                q = &q * abs_diff(&x, &y) % n;
            }
            g = q.gcd(n);
            k += lim;
        }
        r <<= 1;
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = abs_diff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    if &g == n {
        None
    } else {
        Some(g)
    }
}

/// Factorization of 2^p - 1 for prime p, exploiting that every divisor is
/// congruent to 1 (mod 2p) and to +-1 (mod 8) once p is odd.
pub fn mersenne_factor_list(p: u64, budget: &FactorBudget) -> Result<FactorList> {
    if !is_prime_u64(p) {
        return Err(Error::Domain(format!(
            "Mersenne exponent must be prime, got {p}"
        )));
    }
    let n = (BigUint::one() << p) - 1u32;
    if is_prime(&n) {
        return Ok(FactorList {
            n: n.clone(),
            factors: vec![(n, 1)],
            complete: true,
        });
    }
    let mut counts: BTreeMap<BigUint, u32> = BTreeMap::new();
    let mut remaining = n.clone();
    let step = 2 * p;
    let mut q = step + 1;
    while q <= budget.trial_bound {
        let q_mod_8 = q % 8;
        if q_mod_8 == 1 || q_mod_8 == 7 {
            if BigUint::from(q).pow(2) > remaining {
                break;
            }
            while (&remaining % q).is_zero() {
                remaining /= q;
                *counts.entry(BigUint::from(q)).or_insert(0) += 1;
            }
        }
        q += step;
    }
    let complete = split_remaining(remaining, budget, &mut counts);
    Ok(FactorList {
        n,
        factors: counts.into_iter().collect(),
        complete,
    })
}

/// The largest prime factor of 2^p - 1, or an explicit incomplete-factorization
/// error naming the unfactored cofactor when the budget runs out.
pub fn mersenne_largest_prime_factor(p: u64, budget: &FactorBudget) -> Result<BigUint> {
    let list = mersenne_factor_list(p, budget)?;
    if !list.complete {
        return Err(Error::IncompleteFactorization {
            cofactor: list.cofactor(),
            n: list.n,
        });
    }
    let q = list
        .factors
        .last()
        .map(|(p, _)| p.clone())
        .expect("2^p - 1 > 1 always has a factor");
    // Order-theoretic cross-check: 2 has order exactly p modulo q.
    if super::mod_pow(&BigUint::from(2u32), &BigUint::from(p), &q)? != BigUint::one() {
        return Err(Error::Consistency(format!(
            "2^{p} != 1 (mod {q}) for reported factor of 2^{p} - 1"
        )));
    }
    if p > 2 && (&q % (2 * p)) != BigUint::one() {
        return Err(Error::Consistency(format!(
            "factor {q} of 2^{p} - 1 is not 1 (mod {})",
            2 * p
        )));
    }
    Ok(q)
}

/// Candidate budget for [`fermat_smallest_prime_factor`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FermatBudget {
    /// Largest index k accepted.
    pub max_k: u32,
    /// How many candidates 1 (mod 2^(k+2)) to try before giving up.
    pub max_candidates: u64,
}

impl Default for FermatBudget {
    fn default() -> Self {
        FermatBudget {
            max_k: 8,
            max_candidates: 1_000_000,
        }
    }
}

/// The smallest prime factor of 2^(2^k) + 1.
///
/// Every prime factor is 1 (mod 2^(k+2)) for k >= 2, and products of such
/// primes stay in that class, so walking the class upward and returning the
/// first divisor yields the smallest prime factor. The default candidate
/// budget resolves k <= 6 instantly; k = 7 and k = 8 have smallest factors
/// near 2^56 and 2^50 and need a raised budget.
pub fn fermat_smallest_prime_factor(k: u32, budget: &FermatBudget) -> Result<BigUint> {
    if k > budget.max_k {
        return Err(Error::Budget(format!(
            "Fermat index {k} beyond feasibility bound {}",
            budget.max_k
        )));
    }
    let exponent = 1u64 << k;
    let f = (BigUint::one() << exponent) + 1u32;
    if is_prime(&f) {
        return Ok(f);
    }
    // Composite, so k >= 5 here and the candidate walk applies.
    let step = 1u64 << (k + 2);
    for j in 1..=budget.max_candidates {
        let c = step
            .checked_mul(j)
            .and_then(|v| v.checked_add(1))
            .ok_or_else(|| Error::Budget("Fermat candidate overflowed u64".into()))?;
        if powmod_u64(2, exponent, c) == c - 1 {
            return Ok(BigUint::from(c));
        }
        if BigUint::from(c).pow(2) > f {
            return Err(Error::Consistency(format!(
                "2^(2^{k}) + 1 failed the primality test but has no factor"
            )));
        }
    }
    Err(Error::Budget(format!(
        "no factor of 2^(2^{k}) + 1 among the first {} candidates 1 (mod {step})",
        budget.max_candidates
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fl(n: u64) -> FactorList {
        factorize(&BigUint::from(n), &FactorBudget::default())
    }

    #[test]
    fn one_is_empty_and_complete() {
        let f = fl(1);
        assert!(f.factors.is_empty());
        assert!(f.complete);
        assert!(f.cofactor().is_one());
    }

    #[test]
    fn small_composites() {
        // 8194 = 2 * 17 * 241, checked by plain trial division.
        let f = fl(8194);
        assert!(f.complete);
        assert_eq!(
            f.factors,
            vec![
                (BigUint::from(2u32), 1),
                (BigUint::from(17u32), 1),
                (BigUint::from(241u32), 1)
            ]
        );
        let f = fl(2047);
        assert_eq!(
            f.factors,
            vec![(BigUint::from(23u32), 1), (BigUint::from(89u32), 1)]
        );
    }

    #[test]
    fn prime_powers() {
        let f = fl(1024);
        assert_eq!(f.factors, vec![(BigUint::from(2u32), 10)]);
        let f = fl(3_486_784_401); // 3^20
        assert_eq!(f.factors, vec![(BigUint::from(3u32), 20)]);
        // Square of a prime beyond the trial bound.
        let p = 1_048_583u64; // smallest prime > 2^20
        let f = fl(p * p);
        assert_eq!(f.factors, vec![(BigUint::from(p), 2)]);
        assert!(f.complete);
    }

    #[test]
    fn recomposition_matches_for_various_inputs() {
        for n in [2u64, 6, 96, 97, 5040, 123_456_789, 999_999_999_989, 614_889_782_588_491_410] {
            let f = fl(n);
            assert_eq!(f.recompose(), BigUint::from(n), "n = {n}");
            f.verify().unwrap();
        }
    }

    #[test]
    fn budget_exhaustion_is_data_not_error() {
        // 2^101 - 1 = 7432339208719 * 341117531003194129; a starved budget
        // must leave the whole thing as cofactor, completely and honestly.
        let n = (BigUint::one() << 101u32) - 1u32;
        let tiny = FactorBudget {
            trial_bound: 100,
            rho_iterations: 4,
        };
        let f = factorize(&n, &tiny);
        assert!(!f.complete);
        assert_eq!(f.recompose(), n);
        f.verify().unwrap();
    }

    #[test]
    fn determinism_across_runs() {
        let n = BigUint::from(614_889_782_588_491_410u64);
        let b = FactorBudget::default();
        let a = factorize(&n, &b);
        let c = factorize(&n, &b);
        assert_eq!(a.factors, c.factors);
        assert_eq!(a.complete, c.complete);
    }

    #[test]
    fn mersenne_small() {
        let b = FactorBudget::default();
        assert_eq!(
            mersenne_largest_prime_factor(2, &b).unwrap(),
            BigUint::from(3u32)
        );
        assert_eq!(
            mersenne_largest_prime_factor(3, &b).unwrap(),
            BigUint::from(7u32)
        );
        assert_eq!(
            mersenne_largest_prime_factor(11, &b).unwrap(),
            BigUint::from(89u32)
        );
        // 2^23 - 1 = 8388607 = 47 * 178481.
        assert_eq!(
            mersenne_largest_prime_factor(23, &b).unwrap(),
            BigUint::from(178_481u32)
        );
    }

    #[test]
    fn mersenne_defaults_cover_exponents_to_101() {
        // The default budget is sized exactly for this range; the slowest
        // case is p = 101, whose rho split takes a few seconds.
        let budget = FactorBudget::default();
        for p in super::super::sieve_primes(101).unwrap() {
            let f = mersenne_factor_list(p, &budget).unwrap();
            assert!(f.complete, "2^{p} - 1 incomplete at default budget");
            assert_eq!(f.recompose(), f.n);
            f.verify().unwrap();
        }
    }

    #[test]
    fn mersenne_rejects_composite_exponent() {
        assert!(matches!(
            mersenne_factor_list(15, &FactorBudget::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn mersenne_incomplete_budget_reports_cofactor() {
        let starved = FactorBudget {
            trial_bound: 1_000,
            rho_iterations: 4,
        };
        match mersenne_largest_prime_factor(101, &starved) {
            Err(Error::IncompleteFactorization { n, cofactor }) => {
                assert_eq!(n, (BigUint::one() << 101u32) - 1u32);
                assert!(!cofactor.is_one());
                assert!((&n % &cofactor).is_zero());
            }
            other => panic!("expected incomplete factorization, got {other:?}"),
        }
    }

    #[test]
    fn fermat_small_indices() {
        let b = FermatBudget::default();
        let expect: [(u32, u64); 7] = [
            (0, 3),
            (1, 5),
            (2, 17),
            (3, 257),
            (4, 65_537),
            (5, 641),
            (6, 274_177),
        ];
        for (k, q) in expect {
            assert_eq!(
                fermat_smallest_prime_factor(k, &b).unwrap(),
                BigUint::from(q),
                "k = {k}"
            );
        }
    }

    #[test]
    fn fermat_factors_satisfy_congruence_invariants() {
        // gamma_k = 1 (mod 2^(k+1)), gamma_k > 2^(k+1), gamma_k | 2^(2^k)+1.
        let b = FermatBudget::default();
        for k in 0u32..=6 {
            let g = fermat_smallest_prime_factor(k, &b).unwrap();
            let step = BigUint::one() << (k + 1);
            assert!(g > step, "k = {k}");
            assert!(((&g - 1u32) % &step).is_zero(), "k = {k}");
            let r = BigUint::from(2u32).modpow(&BigUint::from(1u64 << k), &g);
            assert_eq!((r + 1u32) % &g, BigUint::ZERO, "k = {k}");
        }
    }

    #[test]
    fn fermat_budget_errors() {
        let b = FermatBudget::default();
        assert!(matches!(
            fermat_smallest_prime_factor(9, &b),
            Err(Error::Budget(_))
        ));
        let starved = FermatBudget {
            max_k: 8,
            max_candidates: 3,
        };
        assert!(matches!(
            fermat_smallest_prime_factor(5, &starved),
            Err(Error::Budget(_))
        ));
    }
}
