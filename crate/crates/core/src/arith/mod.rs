//! Big-integer arithmetic primitives: primality, sieving, factorization
//! specialized for Mersenne and Fermat numbers, modular exponentiation, and
//! the Chinese remainder theorem.
//!
//! Every operation is a pure function of its inputs and safe to call from
//! many threads at once.

mod crt;
mod factor;
mod primality;
mod sieve;

pub use crt::{crt, mod_inverse};
pub use factor::{
    factorize, fermat_smallest_prime_factor, mersenne_factor_list, mersenne_largest_prime_factor,
    FactorBudget, FermatBudget,
};
pub use primality::{is_prime, is_prime_u64};
pub use sieve::{sieve_primes, sieve_primes_bounded, DEFAULT_SIEVE_BUDGET};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::serde_util::{dec, dec_pairs};

/// A complete or partial prime factorization of `n`.
///
/// The product of `prime^exponent` over `factors` times [`FactorList::cofactor`]
/// equals `n` exactly; `complete` is true exactly when the cofactor is 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorList {
    #[serde(with = "dec")]
    pub n: BigUint,
    /// `(prime, exponent)` pairs, primes strictly increasing.
    #[serde(with = "dec_pairs")]
    pub factors: Vec<(BigUint, u32)>,
    pub complete: bool,
}

impl FactorList {
    /// Product of the listed prime powers.
    pub fn factored_part(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e))
    }

    /// The unfactored remainder `n / factored_part`; 1 when complete.
    pub fn cofactor(&self) -> BigUint {
        &self.n / self.factored_part()
    }

    /// `factored_part * cofactor`, which must reproduce `n`.
    pub fn recompose(&self) -> BigUint {
        self.factored_part() * self.cofactor()
    }

    pub fn largest_prime_factor(&self) -> Option<&BigUint> {
        self.factors.last().map(|(p, _)| p)
    }

    /// Checks every stated invariant; used when accepting serialized lists.
    pub fn verify(&self) -> Result<()> {
        let mut prev: Option<&BigUint> = None;
        for (p, e) in &self.factors {
            if *e == 0 {
                return Err(Error::Consistency(format!("zero exponent on {p}")));
            }
            if let Some(q) = prev {
                if q >= p {
                    return Err(Error::Consistency(format!(
                        "factors not strictly increasing at {p}"
                    )));
                }
            }
            if !is_prime(p) {
                return Err(Error::Consistency(format!("listed factor {p} is not prime")));
            }
            prev = Some(p);
        }
        let fp = self.factored_part();
        if (&self.n % &fp) != BigUint::ZERO {
            return Err(Error::Consistency(
                "factored part does not divide n".into(),
            ));
        }
        let cof = &self.n / fp;
        if self.complete && !cof.is_one() {
            return Err(Error::Consistency(format!(
                "complete factorization with cofactor {cof}"
            )));
        }
        Ok(())
    }
}

/// A congruence class `residue (mod modulus)` with `0 <= residue < modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueClass {
    #[serde(with = "dec")]
    pub residue: BigUint,
    #[serde(with = "dec")]
    pub modulus: BigUint,
}

impl ResidueClass {
    pub fn new(residue: BigUint, modulus: BigUint) -> Result<Self> {
        let rc = ResidueClass { residue, modulus };
        rc.validate()?;
        Ok(rc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.modulus.is_zero() {
            return Err(Error::Domain("modulus must be >= 1".into()));
        }
        if self.residue >= self.modulus {
            return Err(Error::Domain(format!(
                "residue {} not reduced modulo {}",
                self.residue, self.modulus
            )));
        }
        Ok(())
    }
}

/// `base^exp (mod modulus)` for `modulus >= 2`.
pub fn mod_pow(base: &BigUint, exp: &BigUint, modulus: &BigUint) -> Result<BigUint> {
    if modulus < &BigUint::from(2u32) {
        return Err(Error::Domain(format!("modulus must be >= 2, got {modulus}")));
    }
    Ok(base.modpow(exp, modulus))
}

/// 2-adic valuation of `x > 0`.
pub fn v2(x: u64) -> u32 {
    assert!(x > 0, "v2 undefined at 0");
    x.trailing_zeros()
}

/// Natural log of a big natural, accurate to f64 precision at any size.
pub fn ln_big(n: &BigUint) -> f64 {
    use num_traits::ToPrimitive;
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 53 {
        return n.to_f64().expect("fits f64").ln();
    }
    let shift = bits - 53;
    let top = (n >> shift).to_f64().expect("53 bits fit");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mod_pow_examples() {
        let two = BigUint::from(2u32);
        assert_eq!(
            mod_pow(&two, &BigUint::ZERO, &BigUint::from(7u32)).unwrap(),
            BigUint::one()
        );
        // 89 divides 2^11 - 1.
        assert_eq!(
            mod_pow(&two, &BigUint::from(11u32), &BigUint::from(89u32)).unwrap(),
            BigUint::one()
        );
        // 641 divides 2^32 + 1, so 2^32 = -1 there.
        assert_eq!(
            mod_pow(&two, &BigUint::from(32u32), &BigUint::from(641u32)).unwrap(),
            BigUint::from(640u32)
        );
        assert!(mod_pow(&two, &two, &BigUint::one()).is_err());
    }

    #[test]
    fn factor_list_invariants_catch_corruption() {
        let good = factorize(&BigUint::from(8194u32), &FactorBudget::default());
        good.verify().unwrap();
        let mut bad = good.clone();
        bad.factors[0].0 = BigUint::from(4u32);
        assert!(bad.verify().is_err());
        let mut bad = good.clone();
        bad.factors.swap(0, 1);
        assert!(bad.verify().is_err());
        let mut bad = good;
        bad.factors[2].1 = 2;
        assert!(bad.verify().is_err());
    }

    #[test]
    fn residue_class_validation() {
        assert!(ResidueClass::new(BigUint::ZERO, BigUint::one()).is_ok());
        assert!(ResidueClass::new(BigUint::from(3u32), BigUint::from(3u32)).is_err());
        assert!(ResidueClass::new(BigUint::ZERO, BigUint::ZERO).is_err());
    }

    #[test]
    fn ln_big_matches_f64_and_scales() {
        let n = BigUint::from(1_000_000u64);
        assert!((ln_big(&n) - 1_000_000f64.ln()).abs() < 1e-12);
        let m = BigUint::one() << 1000u32;
        assert!((ln_big(&m) - 1000.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn v2_values() {
        assert_eq!(v2(1), 0);
        assert_eq!(v2(12), 2);
        assert_eq!(v2(1 << 40), 40);
    }
}
