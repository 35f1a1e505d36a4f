//! C ABI over the polignac library.
//!
//! Conventions:
//! - Big integers cross the boundary as NUL-terminated decimal strings.
//! - Functions returning `char*` hand ownership to the caller; release with
//!   [`pg_string_free`]. A NULL return signals failure; fetch the message
//!   with [`pg_last_error_message`].
//! - Functions returning [`PgStatus`] report `PG_STATUS_OK` on success and
//!   leave out-parameters untouched on failure.
//! - Constructions live behind the opaque handle `PgConstruction`; release
//!   with [`pg_construction_free`].
//!
//! The generated header lands in `include/polignac.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_bigint::BigUint;
use polignac::arith::{FactorBudget, FermatBudget};
use polignac::construct::{
    assemble, attach_companions, fermat_gammas, select_prime_blocks, verify_progression,
    Construction, ExplicitParams, SieveConstants,
};
use polignac::represent::{
    crocker_divisibility, find_rep_p2a2b, find_rep_p2b, find_rep_ppow2a2b, scan_density,
    verify_erdos_progression, Form,
};
use polignac::Error;

/// Status codes mirrored from the library's error kinds.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgStatus {
    Ok = 0,
    NullArgument = 1,
    Parse = 2,
    Domain = 3,
    Budget = 4,
    Feasibility = 5,
    Regime = 6,
    IncompleteFactorization = 7,
    Consistency = 8,
    Correctness = 9,
    Io = 10,
    Panic = 11,
}

/// Representation forms accepted by the finder and scanner entry points.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgForm {
    PrimePlus2b = 0,
    PrimePlus2a2b = 1,
    PrimePowerPlus2a2b = 2,
}

impl From<PgForm> for Form {
    fn from(f: PgForm) -> Form {
        match f {
            PgForm::PrimePlus2b => Form::PrimePlus2b,
            PgForm::PrimePlus2a2b => Form::PrimePlus2a2b,
            PgForm::PrimePowerPlus2a2b => Form::PrimePowerPlus2a2b,
        }
    }
}

/// Opaque handle to an assembled construction.
pub struct PgConstruction {
    inner: Construction,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PgStatus {
    match e {
        Error::Domain(_) => PgStatus::Domain,
        Error::Budget(_) => PgStatus::Budget,
        Error::Feasibility(_) => PgStatus::Feasibility,
        Error::Regime(_) => PgStatus::Regime,
        Error::IncompleteFactorization { .. } => PgStatus::IncompleteFactorization,
        Error::Consistency(_) => PgStatus::Consistency,
        Error::Correctness(_) => PgStatus::Correctness,
        Error::Io(_) => PgStatus::Io,
        Error::Parse(_) => PgStatus::Parse,
    }
}

fn fail(e: Error) -> PgStatus {
    let status = status_of(&e);
    set_error(e.to_string());
    status
}

/// Runs a fallible body, converting panics and errors into statuses.
fn guarded<F: FnOnce() -> Result<PgStatus, Error>>(body: F) -> PgStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(status)) => status,
        Ok(Err(e)) => fail(e),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            PgStatus::Panic
        }
    }
}

/// Like [`guarded`] for functions handing back an owned C string.
fn guarded_string<F: FnOnce() -> Result<String, Error>>(body: F) -> *mut c_char {
    let mut out: *mut c_char = std::ptr::null_mut();
    let status = guarded(|| {
        let s = body()?;
        out = CString::new(s.replace('\0', " "))
            .unwrap_or_default()
            .into_raw();
        Ok(PgStatus::Ok)
    });
    if status == PgStatus::Ok {
        out
    } else {
        std::ptr::null_mut()
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, Error> {
    if ptr.is_null() {
        return Err(Error::Parse("null string argument".into()));
    }
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|e| Error::Parse(format!("invalid utf-8: {e}")))
}

fn parse_big(s: &str) -> Result<BigUint, Error> {
    let t = s.trim();
    if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("not a decimal natural: {s:?}")));
    }
    Ok(BigUint::parse_bytes(t.as_bytes(), 10).expect("validated digits"))
}

fn budget(trial_bound: u64, rho_iterations: u64) -> FactorBudget {
    let d = FactorBudget::default();
    FactorBudget {
        trial_bound: if trial_bound == 0 { d.trial_bound } else { trial_bound },
        rho_iterations: if rho_iterations == 0 { d.rho_iterations } else { rho_iterations },
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn pg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread, or NULL. The caller
/// owns the returned string.
#[no_mangle]
pub extern "C" fn pg_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| match &*e.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Releases a string allocated by this library.
///
/// # Safety
/// `s` must have been returned by a `pg_` function and not freed before.
#[no_mangle]
pub unsafe extern "C" fn pg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Primality of a decimal natural; deterministic below 2^64.
///
/// # Safety
/// `n_dec` must be a valid NUL-terminated string; `out_is_prime` must be a
/// valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pg_is_prime(n_dec: *const c_char, out_is_prime: *mut bool) -> PgStatus {
    if out_is_prime.is_null() {
        set_error("out_is_prime is null".into());
        return PgStatus::NullArgument;
    }
    guarded(|| {
        let n = parse_big(unsafe { read_str(n_dec) }?)?;
        unsafe { *out_is_prime = polignac::arith::is_prime(&n) };
        Ok(PgStatus::Ok)
    })
}

/// `base^exp (mod modulus)` as a decimal string, or NULL on error.
///
/// # Safety
/// All three pointers must be valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn pg_mod_pow(
    base_dec: *const c_char,
    exp_dec: *const c_char,
    modulus_dec: *const c_char,
) -> *mut c_char {
    guarded_string(|| {
        let base = parse_big(unsafe { read_str(base_dec) }?)?;
        let exp = parse_big(unsafe { read_str(exp_dec) }?)?;
        let modulus = parse_big(unsafe { read_str(modulus_dec) }?)?;
        Ok(polignac::arith::mod_pow(&base, &exp, &modulus)?.to_str_radix(10))
    })
}

/// Factors `n` within the budget (0 selects the defaults) and returns the
/// factor list as JSON, or NULL on error.
///
/// # Safety
/// `n_dec` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pg_factorize_json(
    n_dec: *const c_char,
    trial_bound: u64,
    rho_iterations: u64,
) -> *mut c_char {
    guarded_string(|| {
        let n = parse_big(unsafe { read_str(n_dec) }?)?;
        if n == BigUint::ZERO {
            return Err(Error::Domain("n must be >= 1".into()));
        }
        let list = polignac::arith::factorize(&n, &budget(trial_bound, rho_iterations));
        Ok(serde_json::to_string(&list).expect("factor list serializes"))
    })
}

/// Largest prime factor of `2^p - 1` as a decimal string, or NULL on error
/// (including incomplete factorization within budget; 0 selects defaults).
#[no_mangle]
pub extern "C" fn pg_mersenne_largest_prime_factor(
    p: u64,
    trial_bound: u64,
    rho_iterations: u64,
) -> *mut c_char {
    guarded_string(|| {
        let q = polignac::arith::mersenne_largest_prime_factor(p, &budget(trial_bound, rho_iterations))?;
        Ok(q.to_str_radix(10))
    })
}

/// Smallest prime factor of `2^(2^k) + 1` as a decimal string, or NULL on
/// error. `max_candidates = 0` selects the default walk budget.
#[no_mangle]
pub extern "C" fn pg_fermat_smallest_prime_factor(k: u32, max_candidates: u64) -> *mut c_char {
    let d = FermatBudget::default();
    let b = FermatBudget {
        max_k: d.max_k,
        max_candidates: if max_candidates == 0 { d.max_candidates } else { max_candidates },
    };
    guarded_string(|| Ok(polignac::arith::fermat_smallest_prime_factor(k, &b)?.to_str_radix(10)))
}

/// Finds the first representation of odd `n` in the given form. Returns the
/// witness as JSON, the string `"null"` when no representation exists, or
/// NULL on error. `c` only applies to the `p + c(2^a + 2^b)` form.
///
/// # Safety
/// `n_dec` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pg_find_rep_json(
    form: PgForm,
    n_dec: *const c_char,
    c: u64,
) -> *mut c_char {
    guarded_string(|| {
        let n = parse_big(unsafe { read_str(n_dec) }?)?;
        if !n.bit(0) {
            return Err(Error::Domain(format!("n must be odd, got {n}")));
        }
        if c == 0 {
            return Err(Error::Domain("c must be positive".into()));
        }
        if c != 1 && form != PgForm::PrimePlus2a2b {
            return Err(Error::Domain("only the p + c(2^a + 2^b) form takes c".into()));
        }
        let witness = match form {
            PgForm::PrimePlus2b => find_rep_p2b(&n),
            PgForm::PrimePlus2a2b => find_rep_p2a2b(&n, c),
            PgForm::PrimePowerPlus2a2b => find_rep_ppow2a2b(&n),
        };
        Ok(serde_json::to_string(&witness).expect("witness serializes"))
    })
}

/// Scans `[lo, hi]` for odd integers with no representation in the given
/// form; returns the density report as JSON or NULL on error.
/// `budget = 0` selects the default scan ceiling.
#[no_mangle]
pub extern "C" fn pg_scan_density_json(
    lo: u64,
    hi: u64,
    form: PgForm,
    c: u64,
    workers: usize,
    budget: u64,
) -> *mut c_char {
    let budget = if budget == 0 {
        polignac::represent::DEFAULT_SCAN_BUDGET
    } else {
        budget
    };
    guarded_string(|| {
        let report = scan_density(lo, hi, form.into(), c, workers.max(1), budget)?;
        Ok(serde_json::to_string(&report).expect("report serializes"))
    })
}

/// Checks the covered progression up to `limit`; writes how many members
/// were checked and how many violated (always 0 unless the library is
/// broken).
///
/// # Safety
/// `out_checked` and `out_violations` must be valid writable pointers.
#[no_mangle]
pub unsafe extern "C" fn pg_verify_erdos_progression(
    limit: u64,
    out_checked: *mut u64,
    out_violations: *mut u64,
) -> PgStatus {
    if out_checked.is_null() || out_violations.is_null() {
        set_error("output pointer is null".into());
        return PgStatus::NullArgument;
    }
    guarded(|| {
        let report = verify_erdos_progression(limit);
        unsafe {
            *out_checked = report.checked;
            *out_violations = report.violations.len() as u64;
        }
        Ok(PgStatus::Ok)
    })
}

/// Evaluates the divisibility identity at `a < b`: writes the 2-adic
/// valuation `s` of `b - a` and whether `2^(2^s) + 1` divides `2^a + 2^b`
/// (true unless the library is broken).
///
/// # Safety
/// `out_s` and `out_divides` must be valid writable pointers.
#[no_mangle]
pub unsafe extern "C" fn pg_crocker_divisibility(
    a: u64,
    b: u64,
    out_s: *mut u32,
    out_divides: *mut bool,
) -> PgStatus {
    if out_s.is_null() || out_divides.is_null() {
        set_error("output pointer is null".into());
        return PgStatus::NullArgument;
    }
    guarded(|| {
        let check = crocker_divisibility(a, b)?;
        unsafe {
            *out_s = check.s;
            *out_divides = check.divides;
        }
        Ok(PgStatus::Ok)
    })
}

/// Partial sum of `1/P(2^p - 1)` over primes `p <= limit` (0 budgets select
/// defaults); writes the sum and how many terms hit the factoring budget.
///
/// # Safety
/// `out_sum` and `out_incomplete_terms` must be valid writable pointers.
#[no_mangle]
pub unsafe extern "C" fn pg_c3_partial(
    limit: u64,
    trial_bound: u64,
    rho_iterations: u64,
    out_sum: *mut f64,
    out_incomplete_terms: *mut u64,
) -> PgStatus {
    if out_sum.is_null() || out_incomplete_terms.is_null() {
        set_error("output pointer is null".into());
        return PgStatus::NullArgument;
    }
    guarded(|| {
        let report = polignac::analytics::c3_partial(limit, &budget(trial_bound, rho_iterations))?;
        unsafe {
            *out_sum = report.partial_sum;
            *out_incomplete_terms = report.incomplete_terms;
        }
        Ok(PgStatus::Ok)
    })
}

/// Assembles a construction with greedy block selection. Constants at 0
/// select the defaults (`c3` then comes from the partial-sum computation).
/// Returns an opaque handle, or NULL on error.
///
/// # Safety
/// `x_dec` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pg_construction_build(
    x_dec: *const c_char,
    k: u32,
    l: f64,
    u: f64,
    m: u32,
    k_prime: u32,
    c1: f64,
    c2: f64,
    c3: f64,
) -> *mut PgConstruction {
    let mut handle: *mut PgConstruction = std::ptr::null_mut();
    let status = guarded(|| {
        let x = parse_big(unsafe { read_str(x_dec) }?)?;
        let effort = FactorBudget::default();
        let mut constants = SieveConstants::computed(&effort)?;
        if c1 > 0.0 {
            constants.c1 = c1;
        }
        if c2 > 0.0 {
            constants.c2 = c2;
        }
        if c3 > 0.0 {
            constants.c3 = c3;
        }
        let params = ExplicitParams::new(x, k, l, u, m, k_prime)?;
        let blocks = select_prime_blocks(params.u, params.k, params.l)?;
        let blocks = attach_companions(&blocks, &effort)?;
        let gammas = fermat_gammas(params.m, &FermatBudget::default())?;
        let cons = assemble(params, constants, blocks, gammas)?;
        handle = Box::into_raw(Box::new(PgConstruction { inner: cons }));
        Ok(PgStatus::Ok)
    });
    if status == PgStatus::Ok {
        handle
    } else {
        std::ptr::null_mut()
    }
}

/// Parses a construction document, audits every invariant, and returns an
/// opaque handle, or NULL on error.
///
/// # Safety
/// `json` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pg_construction_from_json(json: *const c_char) -> *mut PgConstruction {
    let mut handle: *mut PgConstruction = std::ptr::null_mut();
    let status = guarded(|| {
        let raw = unsafe { read_str(json) }?;
        let cons: Construction =
            serde_json::from_str(raw).map_err(|e| Error::Parse(e.to_string()))?;
        cons.audit()?;
        handle = Box::into_raw(Box::new(PgConstruction { inner: cons }));
        Ok(PgStatus::Ok)
    });
    if status == PgStatus::Ok {
        handle
    } else {
        std::ptr::null_mut()
    }
}

unsafe fn construction<'a>(h: *const PgConstruction) -> Result<&'a Construction, Error> {
    if h.is_null() {
        return Err(Error::Parse("null construction handle".into()));
    }
    Ok(unsafe { &(*h).inner })
}

/// Canonical JSON document for the construction, or NULL on error.
///
/// # Safety
/// `h` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn pg_construction_to_json(h: *const PgConstruction) -> *mut c_char {
    guarded_string(|| {
        let cons = unsafe { construction(h) }?;
        Ok(serde_json::to_string_pretty(cons).expect("construction serializes"))
    })
}

/// The progression residue `beta` as a decimal string, or NULL on error.
///
/// # Safety
/// `h` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn pg_construction_beta(h: *const PgConstruction) -> *mut c_char {
    guarded_string(|| Ok(unsafe { construction(h) }?.beta.to_str_radix(10)))
}

/// The modulus `W` as a decimal string (the progression runs mod `2W`), or
/// NULL on error.
///
/// # Safety
/// `h` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn pg_construction_w(h: *const PgConstruction) -> *mut c_char {
    guarded_string(|| Ok(unsafe { construction(h) }?.w.to_str_radix(10)))
}

/// Sweeps the progression up to `x` (see the library docs) and returns the
/// report as JSON, or NULL on error. `budget = 0` selects the default scan
/// ceiling.
///
/// # Safety
/// `h` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn pg_construction_verify_json(
    h: *const PgConstruction,
    x: u64,
    workers: usize,
    budget: u64,
) -> *mut c_char {
    let budget = if budget == 0 {
        polignac::represent::DEFAULT_SCAN_BUDGET
    } else {
        budget
    };
    guarded_string(|| {
        let cons = unsafe { construction(h) }?;
        let report = verify_progression(cons, x, workers.max(1), budget)?;
        Ok(serde_json::to_string(&report).expect("report serializes"))
    })
}

/// Releases a construction handle.
///
/// # Safety
/// `h` must be a live handle from this library, not freed before.
#[no_mangle]
pub unsafe extern "C" fn pg_construction_free(h: *mut PgConstruction) {
    if !h.is_null() {
        drop(unsafe { Box::from_raw(h) });
    }
}
