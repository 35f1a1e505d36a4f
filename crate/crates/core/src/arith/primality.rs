//! Primality testing.
//!
//! Below 2^64 the test is deterministic: trial division by a handful of tiny
//! primes followed by strong-probable-prime rounds to the fixed witness set
//! {2, 3, 5, 7, ..., 37}, which decides every 64-bit integer. Above 2^64 the
//! test is a base-2 strong probable prime check, a strong Lucas check with
//! Selfridge's parameters, and 40 further strong-probable-prime rounds whose
//! bases are drawn from a splitmix64 stream seeded by the low bits of the
//! input, so results are reproducible while the combined false-positive
//! probability stays below 2^-80.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Witnesses deciding primality for every n < 2^64 (indeed < 3.3 * 10^24).
const U64_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

const SMALL_PRIMES: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Extra strong-probable-prime rounds above 2^64.
const WIDE_EXTRA_ROUNDS: u64 = 40;

pub fn is_prime(n: &BigUint) -> bool {
    match n.to_u64() {
        Some(v) => is_prime_u64(v),
        None => is_prime_wide(n),
    }
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in SMALL_PRIMES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    U64_WITNESSES.iter().all(|&a| sprp_u64(n, a, d, s))
}

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn powmod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, m);
        }
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// One strong-probable-prime round; n odd, n - 1 = d * 2^s.
fn sprp_u64(n: u64, a: u64, d: u64, s: u32) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let mut x = powmod_u64(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mulmod_u64(x, x, n);
        if x == n - 1 {
            return true;
        }
        if x == 1 {
            return false;
        }
    }
    false
}

fn is_prime_wide(n: &BigUint) -> bool {
    debug_assert!(n.bits() > 64);
    for p in SMALL_PRIMES {
        if (n % p).is_zero() {
            return false;
        }
    }
    if !sprp_wide(n, &BigUint::from(2u32)) {
        return false;
    }
    if !strong_lucas(n) {
        return false;
    }
    // n mod 2^64 is nonzero here (n is odd), so the stream seed depends on n.
    let mut seed = n.iter_u64_digits().next().unwrap_or(1) ^ n.bits();
    let n_minus_3 = n - 3u32;
    for _ in 0..WIDE_EXTRA_ROUNDS {
        seed = splitmix64(seed);
        let base = BigUint::from(seed) % &n_minus_3 + 2u32;
        if !sprp_wide(n, &base) {
            return false;
        }
    }
    true
}

fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn sprp_wide(n: &BigUint, a: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().expect("n odd, n > 2");
    let d = &n_minus_1 >> s;
    let mut x = a.modpow(&d, n);
    if x == one || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = x.modpow(&BigUint::from(2u32), n);
        if x == n_minus_1 {
            return true;
        }
        if x == one {
            return false;
        }
    }
    false
}

/// Jacobi symbol (a/n) for odd n > 0.
pub(crate) fn jacobi(a: &BigInt, n: &BigUint) -> i32 {
    let mut a = a.mod_floor(&BigInt::from(n.clone()));
    let mut n = BigInt::from(n.clone());
    let mut t = 1i32;
    while !a.is_zero() {
        let twos = a.trailing_zeros().unwrap_or(0);
        if twos > 0 {
            a >>= twos;
            let n_mod_8 = (&n % 8u32).to_u8().unwrap();
            if twos % 2 == 1 && (n_mod_8 == 3 || n_mod_8 == 5) {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32).to_u8().unwrap() == 3 && (&n % 4u32).to_u8().unwrap() == 3 {
            t = -t;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        t
    } else {
        0
    }
}

/// Strong Lucas probable prime test with Selfridge's parameter choice:
/// the first D in 5, -7, 9, -11, ... with (D/n) = -1, P = 1, Q = (1 - D)/4.
fn strong_lucas(n: &BigUint) -> bool {
    if is_perfect_square(n) {
        return false;
    }
    let n_int = BigInt::from(n.clone());
    let mut d = BigInt::from(5);
    loop {
        match jacobi(&d, n) {
            -1 => break,
            0 => {
                // Shares a factor with D; composite unless n == |D| (never
                // here, n > 2^64).
                return false;
            }
            _ => {}
        }
        d = if d.is_positive() {
            -(&d + BigInt::from(2))
        } else {
            -(&d) + BigInt::from(2)
        };
    }
    let q = (BigInt::one() - &d) / BigInt::from(4);

    // n + 1 = t * 2^s with t odd.
    let n_plus_1 = n + 1u32;
    let s = n_plus_1.trailing_zeros().expect("n odd");
    let t = &n_plus_1 >> s;

    // Lucas chain for U_t, V_t (P = 1).
    let mut u = BigInt::zero();
    let mut v = BigInt::from(2);
    let mut qk = BigInt::one();
    let bits = t.bits();
    for i in (0..bits).rev() {
        // Double: U_{2k} = U_k V_k, V_{2k} = V_k^2 - 2 Q^k.
        u = (&u * &v).mod_floor(&n_int);
        v = (&v * &v - BigInt::from(2) * &qk).mod_floor(&n_int);
        qk = (&qk * &qk).mod_floor(&n_int);
        if t.bit(i) {
            // Add one: with P = 1,
            // U_{k+1} = (U_k + V_k)/2, V_{k+1} = (D U_k + V_k)/2.
            let u_next = half_mod(&(&u + &v), n);
            let v_next = half_mod(&(&d * &u + &v), n);
            u = u_next;
            v = v_next;
            qk = (&qk * &q).mod_floor(&n_int);
        }
    }

    if u.is_zero() || v.is_zero() {
        return true;
    }
    // V_{t*2^r} = 0 for some 0 <= r < s.
    for _ in 1..s {
        v = (&v * &v - BigInt::from(2) * &qk).mod_floor(&n_int);
        if v.is_zero() {
            return true;
        }
        qk = (&qk * &qk).mod_floor(&n_int);
    }
    false
}

/// (x / 2) mod n for odd n, with x already reduced or small.
fn half_mod(x: &BigInt, n: &BigUint) -> BigInt {
    let n_int = BigInt::from(n.clone());
    let x = x.mod_floor(&n_int);
    if x.is_even() {
        x / 2
    } else {
        (x + &n_int) / 2
    }
}

pub(crate) fn is_perfect_square(n: &BigUint) -> bool {
    let r = n.sqrt();
    &r * &r == *n
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use num_traits::Num;

    #[test]
    fn small_cases() {
        assert!(!is_prime_u64(0));
        assert!(!is_prime_u64(1));
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(3));
        assert!(!is_prime_u64(4));
        assert!(is_prime_u64(127));
        assert!(!is_prime_u64(2047)); // 23 * 89
    }

    #[test]
    fn carmichael_and_strong_pseudoprimes() {
        for n in [561u64, 1105, 1729, 2465, 2821, 6601, 8911, 3215031751] {
            assert!(!is_prime_u64(n), "{n} is composite");
        }
    }

    #[test]
    fn known_primes_u64() {
        for n in [
            65537u64,
            2_147_483_647,          // 2^31 - 1
            2_305_843_009_213_693_951, // 2^61 - 1
            9_007_199_254_740_881,
            18_446_744_073_709_551_557, // largest prime < 2^64
        ] {
            assert!(is_prime_u64(n), "{n} is prime");
        }
    }

    #[test]
    fn agrees_with_trial_division_below_10000() {
        let naive = |n: u64| -> bool {
            if n < 2 {
                return false;
            }
            let mut d = 2;
            while d * d <= n {
                if n.is_multiple_of(d) {
                    return false;
                }
                d += 1;
            }
            true
        };
        for n in 0..10_000u64 {
            assert_eq!(is_prime_u64(n), naive(n), "disagreement at {n}");
        }
    }

    #[test]
    fn wide_known_values() {
        // 2^89 - 1 is prime.
        let m89 = (BigUint::one() << 89u32) - 1u32;
        assert!(is_prime(&m89));
        // 2^101 - 1 = 7432339208719 * 341117531003194129.
        let m101 = (BigUint::one() << 101u32) - 1u32;
        assert!(!is_prime(&m101));
        // 2^128 + 1 is composite (641 is not a factor of this one, but
        // 59649589127497217 is).
        let f7 = (BigUint::one() << 128u32) + 1u32;
        assert!(!is_prime(&f7));
        // The 76-bit cofactor of 2^83 - 1.
        let c = BigUint::from_str_radix("57912614113275649087721", 10).unwrap();
        assert!(is_prime(&c));
        // Product of two wide primes.
        let p = BigUint::from_str_radix("57912614113275649087721", 10).unwrap();
        let composite = &p * 3u32;
        assert!(!is_prime(&composite));
    }

    #[test]
    fn jacobi_matches_legendre_for_small_primes() {
        // For odd prime p, (a/p) = a^((p-1)/2) mod p mapped to {-1, 0, 1}.
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23] {
            for a in 0..p {
                let euler = powmod_u64(a, (p - 1) / 2, p);
                let expect = if euler == 0 {
                    0
                } else if euler == 1 {
                    1
                } else {
                    -1
                };
                let got = jacobi(&BigInt::from(a), &BigUint::from(p));
                assert_eq!(got, expect, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn perfect_square_detection() {
        assert!(is_perfect_square(&BigUint::from(0u32)));
        assert!(is_perfect_square(&BigUint::from(144u32)));
        assert!(!is_perfect_square(&BigUint::from(145u32)));
        let big = BigUint::from(u64::MAX) * BigUint::from(u64::MAX);
        assert!(is_perfect_square(&big));
        assert!(!is_perfect_square(&(big + 1u32)));
    }
}
