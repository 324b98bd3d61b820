//! C interface to `steenq`.
//!
//! Elements are opaque handles created by `steenq_element_parse` or by
//! arithmetic and released with `steenq_element_free`. Every fallible call
//! returns a `SteenqStatus`; on failure `steenq_last_error` describes the
//! most recent error on the calling thread. Strings returned through out
//! parameters are owned by the caller and released with `steenq_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use steenq::adem::rewrite_to_admissible;
use steenq::may::{filtration, format_poly, poincare_e0, Filtration};
use steenq::milnor::{antipode, milnor_product};
use steenq::parse::{parse_element, parse_word};
use steenq::unitriangular::priddy_check;
use steenq::{Error, MilnorElement, PrimePower};

/// Filtration reported for the zero element.
pub const STEENQ_FILTRATION_INFINITE: u64 = u64::MAX;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteenqStatus {
    Ok = 0,
    ParseError = 1,
    VerificationFailed = 2,
    ResourceGuard = 3,
    InvalidArgument = 4,
    NullPointer = 5,
    Panic = 6,
}

/// An element of A_q in the Milnor basis.
pub struct SteenqElement {
    inner: MilnorElement,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SteenqStatus {
    match e {
        Error::Parse { .. } => SteenqStatus::ParseError,
        Error::Verification(_) => SteenqStatus::VerificationFailed,
        Error::ResourceGuard { .. } => SteenqStatus::ResourceGuard,
        _ => SteenqStatus::InvalidArgument,
    }
}

/// Runs `f`, recording errors and turning panics into a status.
fn guarded<F>(f: F) -> SteenqStatus
where
    F: FnOnce() -> Result<(), (SteenqStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SteenqStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SteenqStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (SteenqStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (SteenqStatus, String) {
    (SteenqStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, (SteenqStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    // SAFETY: the caller passes a valid NUL-terminated string.
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map_err(|_| (SteenqStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn element<'a>(x: *const SteenqElement, what: &str) -> Result<&'a MilnorElement, (SteenqStatus, String)> {
    if x.is_null() {
        return Err(null(what));
    }
    // SAFETY: non-null handles come from this library.
    Ok(unsafe { &(*x).inner })
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), (SteenqStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    // SAFETY: checked non-null; the caller provides writable storage.
    unsafe { out.write(v) };
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), (SteenqStatus, String)> {
    let c = CString::new(s).map_err(|_| (SteenqStatus::InvalidArgument, "output has a nul byte".to_string()))?;
    unsafe { put(out, c.into_raw()) }
}

unsafe fn put_element(out: *mut *mut SteenqElement, x: MilnorElement) -> Result<(), (SteenqStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    let handle = Box::into_raw(Box::new(SteenqElement { inner: x }));
    unsafe { out.write(handle) };
    Ok(())
}

fn context(p: u32, e: u32) -> Result<PrimePower, (SteenqStatus, String)> {
    PrimePower::new(p, e).map_err(lib_err)
}

/// Message for the last failed call on this thread; empty after success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn steenq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses an element of A_q, q = p^e.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn steenq_element_parse(
    p: u32,
    e: u32,
    text: *const c_char,
    out: *mut *mut SteenqElement,
) -> SteenqStatus {
    guarded(|| {
        let ctx = context(p, e)?;
        let s = unsafe { read_str(text, "text") }?;
        let x = parse_element(s, &ctx).map_err(lib_err)?;
        unsafe { put_element(out, x) }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `x` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn steenq_element_free(x: *mut SteenqElement) {
    if !x.is_null() {
        // SAFETY: created by Box::into_raw in this library.
        drop(unsafe { Box::from_raw(x) });
    }
}

/// Product of two elements of the same algebra.
///
/// # Safety
/// `a` and `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn steenq_element_mul(
    a: *const SteenqElement,
    b: *const SteenqElement,
    out: *mut *mut SteenqElement,
) -> SteenqStatus {
    guarded(|| {
        let (x, y) = unsafe { (element(a, "a")?, element(b, "b")?) };
        let z = milnor_product(x, y).map_err(lib_err)?;
        unsafe { put_element(out, z) }
    })
}

/// The antipode χ.
///
/// # Safety
/// `a` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn steenq_element_antipode(a: *const SteenqElement, out: *mut *mut SteenqElement) -> SteenqStatus {
    guarded(|| {
        let x = unsafe { element(a, "a") }?;
        unsafe { put_element(out, antipode(x)) }
    })
}

/// Text form, e.g. "P(1,3,1) + P(4,2,1)".
///
/// # Safety
/// `a` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn steenq_element_to_string(a: *const SteenqElement, out: *mut *mut c_char) -> SteenqStatus {
    guarded(|| {
        let x = unsafe { element(a, "a") }?;
        unsafe { put_string(out, x.to_string()) }
    })
}

/// May filtration; `STEENQ_FILTRATION_INFINITE` for zero.
///
/// # Safety
/// `a` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn steenq_element_filtration(a: *const SteenqElement, out: *mut u64) -> SteenqStatus {
    guarded(|| {
        let x = unsafe { element(a, "a") }?;
        let f = match filtration(x) {
            Filtration::Finite(m) => m,
            Filtration::Infinite => STEENQ_FILTRATION_INFINITE,
        };
        unsafe { put(out, f) }
    })
}

/// Degree of a homogeneous nonzero element.
///
/// # Safety
/// `a` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn steenq_element_degree(a: *const SteenqElement, out: *mut u64) -> SteenqStatus {
    guarded(|| {
        let x = unsafe { element(a, "a") }?;
        match x.degree().map_err(lib_err)? {
            Some(d) => unsafe { put(out, d) },
            None => Err(lib_err(Error::ZeroElement)),
        }
    })
}

/// Rewrites a word such as "Sq^2 Sq^2" in the admissible basis.
///
/// # Safety
/// `word` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn steenq_rewrite(p: u32, e: u32, word: *const c_char, out: *mut *mut c_char) -> SteenqStatus {
    guarded(|| {
        let ctx = context(p, e)?;
        let w = parse_word(unsafe { read_str(word, "word") }?, &ctx).map_err(lib_err)?;
        unsafe { put_string(out, rewrite_to_admissible(&w).to_string()) }
    })
}

/// Poincaré polynomial of E⁰(A_q(n-2)) as text.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn steenq_poincare(p: u32, e: u32, n: u32, out: *mut *mut c_char) -> SteenqStatus {
    guarded(|| {
        let ctx = context(p, e)?;
        let c = poincare_e0(n as usize, &ctx).map_err(lib_err)?;
        unsafe { put_string(out, format_poly(&c)) }
    })
}

/// JSON report comparing E⁰ of the unitriangular group algebra with
/// E⁰(A_q(n-2)). Returns `VerificationFailed` (with the report still
/// written) when the comparison finds a mismatch.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn steenq_priddy_json(p: u32, e: u32, n: u32, out: *mut *mut c_char) -> SteenqStatus {
    guarded(|| {
        let ctx = context(p, e)?;
        let r = priddy_check(n as usize, ctx).map_err(lib_err)?;
        unsafe { put_string(out, r.to_json()) }?;
        if r.passed() {
            Ok(())
        } else {
            Err((SteenqStatus::VerificationFailed, format!("{} mismatches", r.mismatches.len())))
        }
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn steenq_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: created by CString::into_raw in this library.
        drop(unsafe { CString::from_raw(s) });
    }
}
