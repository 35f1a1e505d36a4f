//! Sieve of Eratosthenes over the odd integers, one bit per candidate.

use crate::error::{Error, Result};

/// Largest limit accepted without an explicit budget override (~256 MiB of
/// sieve bits at one bit per odd integer).
pub const DEFAULT_SIEVE_BUDGET: u64 = 1 << 32;

/// All primes `<= limit` in increasing order.
pub fn sieve_primes(limit: u64) -> Result<Vec<u64>> {
    sieve_primes_bounded(limit, DEFAULT_SIEVE_BUDGET)
}

/// All primes `<= limit`, refusing limits above `budget`.
pub fn sieve_primes_bounded(limit: u64, budget: u64) -> Result<Vec<u64>> {
    if limit < 2 {
        return Err(Error::Domain(format!("sieve limit must be >= 2, got {limit}")));
    }
    if limit > budget {
        return Err(Error::Budget(format!(
            "sieve limit {limit} exceeds memory budget {budget}"
        )));
    }
    // Index i represents the odd number 2i + 3.
    let n_odd = ((limit.saturating_sub(1)) / 2) as usize;
    let mut composite = vec![false; n_odd];
    let mut primes = Vec::with_capacity(est_prime_count(limit));
    primes.push(2);
    let mut i = 0usize;
    while let Some(p) = (2 * i as u64 + 3).checked_mul(2 * i as u64 + 3) {
        if p > limit {
            break;
        }
        if !composite[i] {
            let q = 2 * i as u64 + 3;
            // First composite to strike is q^2, at index (q^2 - 3) / 2.
            let mut j = ((q * q - 3) / 2) as usize;
            while j < n_odd {
                composite[j] = true;
                j += q as usize;
            }
        }
        i += 1;
    }
    for (i, &c) in composite.iter().enumerate() {
        if !c {
            primes.push(2 * i as u64 + 3);
        }
    }
    Ok(primes)
}

fn est_prime_count(limit: u64) -> usize {
    if limit < 17 {
        8
    } else {
        let x = limit as f64;
        (x / (x.ln() - 1.1)) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_limits() {
        assert_eq!(sieve_primes(2).unwrap(), vec![2]);
        assert_eq!(sieve_primes(3).unwrap(), vec![2, 3]);
        assert_eq!(sieve_primes(10).unwrap(), vec![2, 3, 5, 7]);
        assert!(sieve_primes(1).is_err());
    }

    #[test]
    fn hundred() {
        let ps = sieve_primes(100).unwrap();
        assert_eq!(ps.len(), 25);
        assert_eq!(*ps.last().unwrap(), 97);
    }

    #[test]
    fn agrees_with_primality_test_to_100k() {
        let ps = sieve_primes(100_000).unwrap();
        let mut idx = 0;
        for n in 0..=100_000u64 {
            let in_sieve = idx < ps.len() && ps[idx] == n;
            if in_sieve {
                idx += 1;
            }
            assert_eq!(in_sieve, super::super::primality::is_prime_u64(n), "at {n}");
        }
        assert_eq!(ps.len(), 9592);
    }

    #[test]
    fn budget_enforced() {
        let err = sieve_primes_bounded(1_000_000, 1_000).unwrap_err();
        assert!(matches!(err, Error::Budget(_)));
    }
}
