//! Chinese remainder theorem over pairwise coprime moduli.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed};

use super::ResidueClass;
use crate::error::{Error, Result};

/// Solves a simultaneous congruence system with pairwise coprime moduli,
/// returning the unique class modulo the product.
///
/// Coprimality is checked up front; a violation reports the offending pair.
/// An empty system yields the trivial class 0 (mod 1).
pub fn crt(classes: &[ResidueClass]) -> Result<ResidueClass> {
    for class in classes {
        class.validate()?;
    }
    for i in 0..classes.len() {
        for j in (i + 1)..classes.len() {
            let g = classes[i].modulus.gcd(&classes[j].modulus);
            if !g.is_one() {
                return Err(Error::Domain(format!(
                    "moduli not pairwise coprime: gcd({}, {}) = {g}",
                    classes[i].modulus, classes[j].modulus
                )));
            }
        }
    }
    let mut acc = ResidueClass::new(BigUint::ZERO, BigUint::one())?;
    for class in classes {
        acc = merge(&acc, class)?;
    }
    Ok(acc)
}

fn merge(a: &ResidueClass, b: &ResidueClass) -> Result<ResidueClass> {
    // x = a.residue + a.modulus * t, with t chosen so x = b.residue (mod b.modulus).
    let inv = mod_inverse(&a.modulus, &b.modulus).ok_or_else(|| {
        Error::Domain(format!(
            "moduli not coprime: {} and {}",
            a.modulus, b.modulus
        ))
    })?;
    let diff = (BigInt::from(b.residue.clone()) - BigInt::from(a.residue.clone()))
        .mod_floor(&BigInt::from(b.modulus.clone()));
    let t = (diff * BigInt::from(inv)).mod_floor(&BigInt::from(b.modulus.clone()));
    let t = t.to_biguint().expect("mod_floor of positive modulus");
    let modulus = &a.modulus * &b.modulus;
    let residue = (&a.residue + &a.modulus * t) % &modulus;
    ResidueClass::new(residue, modulus)
}

/// a^-1 (mod m), if it exists.
pub fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    if m.is_one() {
        return Some(BigUint::ZERO);
    }
    let e = BigInt::from(a.clone()).extended_gcd(&BigInt::from(m.clone()));
    if !e.gcd.is_one() {
        return None;
    }
    let m_int = BigInt::from(m.clone());
    let x = e.x.mod_floor(&m_int);
    debug_assert!(!x.is_negative());
    x.to_biguint()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rc(r: u64, m: u64) -> ResidueClass {
        ResidueClass::new(BigUint::from(r), BigUint::from(m)).unwrap()
    }

    #[test]
    fn textbook_pair() {
        let out = crt(&[rc(2, 3), rc(3, 5)]).unwrap();
        assert_eq!(out, rc(8, 15));
    }

    #[test]
    fn identity_single_class() {
        let out = crt(&[rc(5, 9)]).unwrap();
        assert_eq!(out, rc(5, 9));
    }

    #[test]
    fn three_way() {
        let out = crt(&[rc(0, 3), rc(0, 5), rc(1, 2)]).unwrap();
        assert_eq!(out, rc(15, 30));
    }

    #[test]
    fn empty_system_is_trivial() {
        let out = crt(&[]).unwrap();
        assert_eq!(out, rc(0, 1));
    }

    #[test]
    fn non_coprime_pair_identified() {
        let err = crt(&[rc(1, 6), rc(3, 10)]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("gcd(6, 10) = 2"), "got: {msg}");
    }

    #[test]
    fn round_trip_property() {
        let classes = [rc(3, 7), rc(4, 11), rc(12, 13), rc(1, 2)];
        let out = crt(&classes).unwrap();
        for class in &classes {
            assert_eq!(&out.residue % &class.modulus, class.residue);
        }
        assert_eq!(out.modulus, BigUint::from(7u32 * 11 * 13 * 2));
    }

    #[test]
    fn inverse_small_cases() {
        let inv = mod_inverse(&BigUint::from(3u32), &BigUint::from(7u32)).unwrap();
        assert_eq!(inv, BigUint::from(5u32));
        assert!(mod_inverse(&BigUint::from(3u32), &BigUint::from(6u32)).is_none());
    }
}
