//! Brute-force representability oracles for odd integers as a prime (or
//! prime power) plus powers of two, density scanners over ranges, and the
//! two classical covering checks: the arithmetic progression of odd numbers
//! with no `p + 2^b` representation, and the divisibility identity behind
//! `2^a + 2^b`.
//!
//! Finders are pure; [`scan_density`] fans subranges out across a worker
//! pool and merges chunk reports in ascending range order, so its output is
//! byte-identical however many workers run.

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::arith::{is_prime, is_prime_u64, mod_pow, v2};
use crate::error::{Error, Result};
use crate::serde_util::dec;

/// Default ceiling for scan ranges; override per call or via the CLI budget
/// environment variable.
pub const DEFAULT_SCAN_BUDGET: u64 = 100_000_000;

/// How many of the smallest non-representable members a report retains.
pub const NON_REPRESENTABLE_CAP: usize = 1_000;

/// First member and modulus of the progression of odd numbers with no
/// `p + 2^b` representation.
pub const COVERED_PROGRESSION_BASE: u64 = 7_629_217;
pub const COVERED_PROGRESSION_MODULUS: u64 = 11_184_810;

/// A concrete representation `n = p^alpha + c * (2^a + 2^b)`, or, when `a`
/// is absent, `n = p^alpha + c * 2^b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepWitness {
    #[serde(with = "dec")]
    pub p: BigUint,
    pub alpha: u32,
    /// `None` for the single-power form `p + 2^b`.
    pub a: Option<u64>,
    pub b: u64,
    pub c: u64,
}

impl RepWitness {
    pub fn recompose(&self) -> BigUint {
        let pow_b = BigUint::one() << self.b;
        let twos = match self.a {
            Some(a) => (BigUint::one() << a) + pow_b,
            None => pow_b,
        };
        self.p.pow(self.alpha) + twos * self.c
    }
}

/// The representation form a scan hunts for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Form {
    #[serde(rename = "p+2^b")]
    PrimePlus2b,
    #[serde(rename = "p+2^a+2^b")]
    PrimePlus2a2b,
    #[serde(rename = "p^alpha+2^a+2^b")]
    PrimePowerPlus2a2b,
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Form::PrimePlus2b => "p+2^b",
            Form::PrimePlus2a2b => "p+2^a+2^b",
            Form::PrimePowerPlus2a2b => "p^alpha+2^a+2^b",
        };
        f.write_str(s)
    }
}

impl FromStr for Form {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "p+2^b" | "p2b" => Ok(Form::PrimePlus2b),
            "p+2^a+2^b" | "p2a2b" | "p+c(2^a+2^b)" => Ok(Form::PrimePlus2a2b),
            "p^alpha+2^a+2^b" | "p^a+2^a+2^b" | "ppow2a2b" => Ok(Form::PrimePowerPlus2a2b),
            other => Err(Error::Parse(format!(
                "unknown form {other:?}; expected p+2^b, p+2^a+2^b, or p^alpha+2^a+2^b"
            ))),
        }
    }
}

/// Smallest `b` with `n - 2^b` prime, for odd `n`.
///
/// Returns `None` when no power of two below `n` leaves a prime.
pub fn find_rep_p2b(n: &BigUint) -> Option<RepWitness> {
    assert!(n.bit(0), "find_rep_p2b requires odd n");
    if let Some(n64) = to_u64(n) {
        return find_rep_p2b_u64(n64);
    }
    let mut b = 0u64;
    loop {
        let pow = BigUint::one() << b;
        if pow >= *n {
            return None;
        }
        let r = n - pow;
        if is_prime(&r) {
            return Some(RepWitness {
                p: r,
                alpha: 1,
                a: None,
                b,
                c: 1,
            });
        }
        b += 1;
    }
}

fn find_rep_p2b_u64(n: u64) -> Option<RepWitness> {
    let mut b = 0u64;
    while let Some(pow) = 1u64.checked_shl(b as u32).filter(|&p| p < n) {
        let r = n - pow;
        if is_prime_u64(r) {
            return Some(RepWitness {
                p: BigUint::from(r),
                alpha: 1,
                a: None,
                b,
                c: 1,
            });
        }
        b += 1;
    }
    None
}

/// The lexicographically first `(a, b)` with `a <= b`, `c * (2^a + 2^b) < n`
/// and `n - c * (2^a + 2^b)` prime, for odd `n` and `c >= 1`.
pub fn find_rep_p2a2b(n: &BigUint, c: u64) -> Option<RepWitness> {
    assert!(n.bit(0), "find_rep_p2a2b requires odd n");
    assert!(c >= 1, "c must be positive");
    if let Some(n64) = to_u64(n) {
        return find_rep_p2a2b_u64(n64, c);
    }
    let c_big = BigUint::from(c);
    let mut a = 0u64;
    loop {
        // Smallest value at this a is c * 2^(a+1); once that reaches n, stop.
        if (&c_big << (a + 1)) >= *n {
            return None;
        }
        let pow_a = BigUint::one() << a;
        let mut b = a;
        loop {
            let v = (&pow_a + (BigUint::one() << b)) * &c_big;
            if v >= *n {
                break;
            }
            let r = n - v;
            if is_prime(&r) {
                return Some(RepWitness {
                    p: r,
                    alpha: 1,
                    a: Some(a),
                    b,
                    c,
                });
            }
            b += 1;
        }
        a += 1;
    }
}

fn find_rep_p2a2b_u64(n: u64, c: u64) -> Option<RepWitness> {
    for a in 0u64..64 {
        let pow_a = match 1u64.checked_shl(a as u32) {
            Some(p) => p,
            None => break,
        };
        match pow_a.checked_mul(2).and_then(|t| t.checked_mul(c)) {
            Some(min_v) if min_v < n => {}
            _ => break,
        }
        for b in a..64 {
            let v = match 1u64
                .checked_shl(b as u32)
                .and_then(|pb| pb.checked_add(pow_a))
                .and_then(|t| t.checked_mul(c))
            {
                Some(v) if v < n => v,
                _ => break,
            };
            let r = n - v;
            if is_prime_u64(r) {
                return Some(RepWitness {
                    p: BigUint::from(r),
                    alpha: 1,
                    a: Some(a),
                    b,
                    c,
                });
            }
        }
    }
    None
}

/// Like [`find_rep_p2a2b`] with `c = 1` but admitting prime powers
/// `p^alpha`, `alpha >= 1`; first witness in `(a, b, alpha, p)` order.
pub fn find_rep_ppow2a2b(n: &BigUint) -> Option<RepWitness> {
    assert!(n.bit(0), "find_rep_ppow2a2b requires odd n");
    if let Some(n64) = to_u64(n) {
        return find_rep_ppow2a2b_u64(n64);
    }
    let mut a = 0u64;
    loop {
        if (BigUint::one() << (a + 1)) >= *n {
            return None;
        }
        let pow_a = BigUint::one() << a;
        let mut b = a;
        loop {
            let v = &pow_a + (BigUint::one() << b);
            if v >= *n {
                break;
            }
            let r = n - v;
            if let Some((p, alpha)) = prime_power(&r) {
                return Some(RepWitness {
                    p,
                    alpha,
                    a: Some(a),
                    b,
                    c: 1,
                });
            }
            b += 1;
        }
        a += 1;
    }
}

fn find_rep_ppow2a2b_u64(n: u64) -> Option<RepWitness> {
    for a in 0u64..64 {
        let pow_a = match 1u64.checked_shl(a as u32) {
            Some(p) if p.checked_mul(2).is_some_and(|m| m < n) => p,
            _ => break,
        };
        for b in a..64 {
            let v = match 1u64.checked_shl(b as u32).and_then(|pb| pb.checked_add(pow_a)) {
                Some(v) if v < n => v,
                _ => break,
            };
            if let Some((p, alpha)) = prime_power_u64(n - v) {
                return Some(RepWitness {
                    p: BigUint::from(p),
                    alpha,
                    a: Some(a),
                    b,
                    c: 1,
                });
            }
        }
    }
    None
}

/// Decomposes `r` as `p^alpha` with `p` prime, if possible.
pub fn prime_power(r: &BigUint) -> Option<(BigUint, u32)> {
    if let Some(r64) = to_u64(r) {
        return prime_power_u64(r64).map(|(p, e)| (BigUint::from(p), e));
    }
    if is_prime(r) {
        return Some((r.clone(), 1));
    }
    let bits = r.bits() as u32;
    for e in 2..=bits {
        let root = r.nth_root(e);
        if root < BigUint::from(2u32) {
            break;
        }
        if root.pow(e) == *r && is_prime(&root) {
            return Some((root, e));
        }
    }
    None
}

fn prime_power_u64(r: u64) -> Option<(u64, u32)> {
    if r < 2 {
        return None;
    }
    if is_prime_u64(r) {
        return Some((r, 1));
    }
    let bits = 64 - r.leading_zeros();
    for e in 2..=bits {
        let root = nth_root_u64(r, e);
        if root < 2 {
            break;
        }
        if root.checked_pow(e) == Some(r) && is_prime_u64(root) {
            return Some((root, e));
        }
    }
    None
}

fn nth_root_u64(n: u64, e: u32) -> u64 {
    if e == 1 {
        return n;
    }
    let mut r = (n as f64).powf(1.0 / e as f64).round() as u64;
    // Float estimate can be off by one either way.
    while r > 0 && r.checked_pow(e).is_none_or(|v| v > n) {
        r -= 1;
    }
    while (r + 1).checked_pow(e).is_some_and(|v| v <= n) {
        r += 1;
    }
    r
}

fn to_u64(n: &BigUint) -> Option<u64> {
    use num_traits::ToPrimitive;
    n.to_u64()
}

/// Counts of representable and non-representable odd integers over a range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityReport {
    pub range_lo: u64,
    pub range_hi: u64,
    pub form: Form,
    pub c: u64,
    /// Number of odd integers in `[range_lo, range_hi]`.
    pub scanned: u64,
    pub representable: u64,
    pub non_representable: u64,
    /// The smallest non-representable members, at most
    /// [`NON_REPRESENTABLE_CAP`] of them.
    pub smallest_non_representable: Vec<u64>,
    pub list_truncated: bool,
}

/// Applies the matching finder to every odd `n` in `[lo, hi]`.
///
/// `workers` sizes the thread pool; the merged report is identical for any
/// worker count.
pub fn scan_density(
    lo: u64,
    hi: u64,
    form: Form,
    c: u64,
    workers: usize,
    budget: u64,
) -> Result<DensityReport> {
    if lo > hi {
        return Err(Error::Domain(format!("empty range [{lo}, {hi}]")));
    }
    if lo == 0 {
        return Err(Error::Domain("range must start at 1 or above".into()));
    }
    if hi > budget {
        return Err(Error::Budget(format!(
            "range end {hi} exceeds scan budget {budget}"
        )));
    }
    if c == 0 {
        return Err(Error::Domain("c must be positive".into()));
    }
    if c != 1 && form != Form::PrimePlus2a2b {
        return Err(Error::Domain(format!("form {form} does not take c")));
    }
    if workers == 0 {
        return Err(Error::Domain("worker count must be >= 1".into()));
    }

    const CHUNK: u64 = 1 << 16;
    let mut chunks = Vec::new();
    let mut start = lo;
    while start <= hi {
        let end = hi.min(start.saturating_add(CHUNK - 1));
        chunks.push((start, end));
        start = end + 1;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Domain(format!("failed to build worker pool: {e}")))?;
    let partials: Vec<ChunkCounts> = pool.install(|| {
        chunks
            .par_iter()
            .map(|&(s, e)| scan_chunk(s, e, form, c))
            .collect()
    });

    let mut report = DensityReport {
        range_lo: lo,
        range_hi: hi,
        form,
        c,
        scanned: 0,
        representable: 0,
        non_representable: 0,
        smallest_non_representable: Vec::new(),
        list_truncated: false,
    };
    for part in partials {
        report.scanned += part.scanned;
        report.representable += part.representable;
        report.non_representable += part.non_representable;
        for n in part.non_rep_members {
            if report.smallest_non_representable.len() < NON_REPRESENTABLE_CAP {
                report.smallest_non_representable.push(n);
            } else {
                report.list_truncated = true;
                break;
            }
        }
    }
    report.list_truncated = report.non_representable > report.smallest_non_representable.len() as u64;
    Ok(report)
}

struct ChunkCounts {
    scanned: u64,
    representable: u64,
    non_representable: u64,
    non_rep_members: Vec<u64>,
}

fn scan_chunk(lo: u64, hi: u64, form: Form, c: u64) -> ChunkCounts {
    let mut out = ChunkCounts {
        scanned: 0,
        representable: 0,
        non_representable: 0,
        non_rep_members: Vec::new(),
    };
    let mut n = if lo % 2 == 1 { lo } else { lo + 1 };
    while n <= hi {
        out.scanned += 1;
        let found = match form {
            Form::PrimePlus2b => find_rep_p2b_u64(n).is_some(),
            Form::PrimePlus2a2b => find_rep_p2a2b_u64(n, c).is_some(),
            Form::PrimePowerPlus2a2b => find_rep_ppow2a2b_u64(n).is_some(),
        };
        if found {
            out.representable += 1;
        } else {
            out.non_representable += 1;
            if out.non_rep_members.len() < NON_REPRESENTABLE_CAP {
                out.non_rep_members.push(n);
            }
        }
        n += 2;
    }
    out
}

/// Result of checking the covered progression up to a limit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErdosReport {
    pub limit: u64,
    pub base: u64,
    pub modulus: u64,
    pub checked: u64,
    /// Members that unexpectedly admitted a `p + 2^b` representation.
    /// Mathematically this must stay empty; anything here is build-failing.
    pub violations: Vec<u64>,
}

/// Asserts that every `n = base (mod modulus)` up to `limit` has no
/// `p + 2^b` representation, for the classical covered progression
/// 7629217 (mod 11184810).
pub fn verify_erdos_progression(limit: u64) -> ErdosReport {
    let mut report = ErdosReport {
        limit,
        base: COVERED_PROGRESSION_BASE,
        modulus: COVERED_PROGRESSION_MODULUS,
        checked: 0,
        violations: Vec::new(),
    };
    let mut n = COVERED_PROGRESSION_BASE;
    while n <= limit {
        report.checked += 1;
        if find_rep_p2b_u64(n).is_some() {
            report.violations.push(n);
        }
        match n.checked_add(COVERED_PROGRESSION_MODULUS) {
            Some(next) => n = next,
            None => break,
        }
    }
    report
}

/// Outcome of the power-of-two divisibility identity at `(a, b)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrockerCheck {
    pub a: u64,
    pub b: u64,
    /// 2-adic valuation of `b - a`.
    pub s: u32,
    #[serde(with = "dec")]
    pub modulus: BigUint,
    pub divides: bool,
}

/// For `a < b`, writes `b - a = 2^s * t` with `t` odd and checks that
/// `2^(2^s) + 1` divides `2^a + 2^b`. `divides` is mathematically always
/// true; it is exposed so the identity stays checkable.
pub fn crocker_divisibility(a: u64, b: u64) -> Result<CrockerCheck> {
    if a >= b {
        return Err(Error::Domain(format!("need a < b, got a = {a}, b = {b}")));
    }
    let s = v2(b - a);
    if s > 30 {
        return Err(Error::Budget(format!(
            "modulus 2^(2^{s}) + 1 is too large to materialize"
        )));
    }
    let modulus = (BigUint::one() << (1u64 << s)) + 1u32;
    let two = BigUint::from(2u32);
    let pa = mod_pow(&two, &BigUint::from(a), &modulus)?;
    let pb = mod_pow(&two, &BigUint::from(b), &modulus)?;
    let divides = ((pa + pb) % &modulus) == BigUint::ZERO;
    Ok(CrockerCheck {
        a,
        b,
        s,
        modulus,
        divides,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn p2b_examples() {
        // 127 admits no p + 2^b representation.
        assert!(find_rep_p2b(&big(127)).is_none());
        let w = find_rep_p2b(&big(9)).unwrap();
        assert_eq!((w.p.clone(), w.b), (big(7), 1));
        assert_eq!(w.recompose(), big(9));
        let w = find_rep_p2b(&big(3)).unwrap();
        assert_eq!((w.p, w.b), (big(2), 0));
        assert!(find_rep_p2b(&big(1)).is_none());
    }

    #[test]
    fn p2a2b_examples() {
        // 11: (0,0) -> 9, (0,1) -> 8, (0,2) -> 6 all composite; (0,3) -> 2.
        let w = find_rep_p2a2b(&big(11), 1).unwrap();
        assert_eq!((w.p.clone(), w.a, w.b), (big(2), Some(0), 3));
        assert_eq!(w.recompose(), big(11));
        // 7 = 5 + 2^0 + 2^0.
        let w = find_rep_p2a2b(&big(7), 1).unwrap();
        assert_eq!((w.p, w.a, w.b), (big(5), Some(0), 0));
        assert!(find_rep_p2a2b(&big(1), 1).is_none());
        assert!(find_rep_p2a2b(&big(3), 1).is_none());
    }

    #[test]
    fn ppow_examples() {
        // 11 - (2^0 + 2^0) = 9 = 3^2, which beats (0,3) in (a, b) order.
        let w = find_rep_ppow2a2b(&big(11)).unwrap();
        assert_eq!((w.p.clone(), w.alpha, w.a, w.b), (big(3), 2, Some(0), 0));
        assert_eq!(w.recompose(), big(11));
        // 13 - 2 = 11 prime at (0,0).
        let w = find_rep_ppow2a2b(&big(13)).unwrap();
        assert_eq!((w.p, w.alpha, w.a, w.b), (big(11), 1, Some(0), 0));
    }

    #[test]
    fn remark_form_with_c() {
        // 11 = 2 + 3 * (2^0 + 2^0).
        let w = find_rep_p2a2b(&big(11), 3).unwrap();
        assert_eq!(w.recompose(), big(11));
        assert_eq!(w.c, 3);
    }

    #[test]
    fn big_path_agrees_with_u64_path() {
        // Same values pushed through the BigUint code path.
        let n = big(100_003 * 2 + 1);
        let via_u64 = find_rep_p2a2b(&n, 1);
        let via_big = {
            let mut a = 0u64;
            let c_big = BigUint::one();
            let mut out = None;
            'outer: loop {
                if (&c_big << (a + 1)) >= n {
                    break;
                }
                let pow_a = BigUint::one() << a;
                let mut b = a;
                loop {
                    let v = (&pow_a + (BigUint::one() << b)) * &c_big;
                    if v >= n {
                        break;
                    }
                    if is_prime(&(&n - &v)) {
                        out = Some((a, b));
                        break 'outer;
                    }
                    b += 1;
                }
                a += 1;
            }
            out
        };
        let w = via_u64.unwrap();
        assert_eq!(via_big, Some((w.a.unwrap(), w.b)));
    }

    #[test]
    fn crocker_examples() {
        let ck = crocker_divisibility(1, 13).unwrap();
        assert_eq!((ck.s, ck.modulus.clone(), ck.divides), (2, big(17), true));
        let ck = crocker_divisibility(0, 1).unwrap();
        assert_eq!((ck.s, ck.modulus.clone(), ck.divides), (0, big(3), true));
        let ck = crocker_divisibility(3, 11).unwrap();
        assert_eq!((ck.s, ck.modulus.clone(), ck.divides), (3, big(257), true));
        assert!(crocker_divisibility(5, 5).is_err());
        assert!(crocker_divisibility(7, 3).is_err());
    }

    #[test]
    fn erdos_progression_boundaries() {
        let r = verify_erdos_progression(COVERED_PROGRESSION_BASE);
        assert_eq!(r.checked, 1);
        assert!(r.violations.is_empty());
        let r = verify_erdos_progression(COVERED_PROGRESSION_BASE - 1);
        assert_eq!(r.checked, 0);
    }

    #[test]
    fn scan_unit_range() {
        let r = scan_density(1, 1, Form::PrimePlus2a2b, 1, 1, DEFAULT_SCAN_BUDGET).unwrap();
        assert_eq!((r.scanned, r.representable, r.non_representable), (1, 0, 1));
        assert_eq!(r.smallest_non_representable, vec![1]);
    }

    #[test]
    fn scan_small_range_matches_sieve_oracle() {
        // Oracle: sieve-table primality plus a plain double loop, fully
        // independent of the finder's primality path.
        let hi = 2_000u64;
        let primes = crate::arith::sieve_primes(hi).unwrap();
        let mut table = vec![false; (hi + 1) as usize];
        for p in primes {
            table[p as usize] = true;
        }
        let mut expect_non_rep = Vec::new();
        let mut n = 1u64;
        while n <= hi {
            let mut found = false;
            let mut b = 0;
            while (1u64 << b) < n {
                if table[(n - (1u64 << b)) as usize] {
                    found = true;
                    break;
                }
                b += 1;
            }
            if !found {
                expect_non_rep.push(n);
            }
            n += 2;
        }
        let r = scan_density(1, hi, Form::PrimePlus2b, 1, 2, DEFAULT_SCAN_BUDGET).unwrap();
        assert_eq!(r.smallest_non_representable, expect_non_rep);
        assert_eq!(r.non_representable, expect_non_rep.len() as u64);
        assert_eq!(r.scanned, 1_000);
        // 127 and 149 are the classical small outsiders.
        assert!(expect_non_rep.contains(&127));
        assert!(expect_non_rep.contains(&149));
    }

    #[test]
    fn scan_partition_independent_of_workers() {
        for form in [Form::PrimePlus2b, Form::PrimePlus2a2b, Form::PrimePowerPlus2a2b] {
            let one = scan_density(1, 50_000, form, 1, 1, DEFAULT_SCAN_BUDGET).unwrap();
            let eight = scan_density(1, 50_000, form, 1, 8, DEFAULT_SCAN_BUDGET).unwrap();
            assert_eq!(one, eight);
        }
    }

    #[test]
    fn scan_rejects_bad_inputs() {
        assert!(scan_density(0, 10, Form::PrimePlus2b, 1, 1, 100).is_err());
        assert!(scan_density(5, 4, Form::PrimePlus2b, 1, 1, 100).is_err());
        assert!(scan_density(1, 101, Form::PrimePlus2b, 1, 1, 100).is_err());
        assert!(scan_density(1, 10, Form::PrimePlus2b, 2, 1, 100).is_err());
        assert!(scan_density(1, 10, Form::PrimePlus2a2b, 0, 1, 100).is_err());
    }

    #[test]
    fn form_strings_round_trip() {
        for form in [Form::PrimePlus2b, Form::PrimePlus2a2b, Form::PrimePowerPlus2a2b] {
            assert_eq!(form.to_string().parse::<Form>().unwrap(), form);
        }
        assert!("p+3^b".parse::<Form>().is_err());
    }

    #[test]
    fn prime_power_cases() {
        assert_eq!(prime_power(&big(9)), Some((big(3), 2)));
        assert_eq!(prime_power(&big(64)), Some((big(2), 6)));
        assert_eq!(prime_power(&big(97)), Some((big(97), 1)));
        assert_eq!(prime_power(&big(1)), None);
        assert_eq!(prime_power(&big(36)), None);
        // 3^40 exceeds u64.
        let r = big(3).pow(40);
        assert_eq!(prime_power(&r), Some((big(3), 40)));
    }
}
