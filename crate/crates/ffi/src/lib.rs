//! C ABI over `galorb`.
//!
//! Every function returns a [`GalorbStatus`]; results go through out
//! pointers. On failure, `galorb_last_error` gives a message for the calling
//! thread. Strings returned by the library are freed with
//! `galorb_string_free`, unit-group handles with `galorb_unit_group_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use galorb::group::UnitGroup;
use galorb::quadring::{QuadExt, QuotientRing};
use galorb::Error;

/// Status codes shared by all entry points.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GalorbStatus {
    Ok = 0,
    InvalidArgument = 1,
    NotPrime = 2,
    Capacity = 3,
    Unsupported = 4,
    NullPointer = 5,
    BufferTooSmall = 6,
    Internal = 7,
    Panic = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GalorbStatus {
    match e {
        Error::InvalidArgument(_) | Error::RingMismatch => GalorbStatus::InvalidArgument,
        Error::NotPrime(_) => GalorbStatus::NotPrime,
        Error::Capacity { .. } => GalorbStatus::Capacity,
        Error::Unsupported(_) | Error::MissingFixture { .. } => GalorbStatus::Unsupported,
        _ => GalorbStatus::Internal,
    }
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (GalorbStatus, String)>) -> GalorbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GalorbStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside galorb".into());
            GalorbStatus::Panic
        }
    }
}

fn lib<T>(r: galorb::Result<T>) -> Result<T, (GalorbStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn write<T>(out: *mut T, value: T) -> Result<(), (GalorbStatus, String)> {
    if out.is_null() {
        return Err((GalorbStatus::NullPointer, "null output pointer".into()));
    }
    // SAFETY: non-null and, by contract, valid for writes of T.
    unsafe { out.write(value) };
    Ok(())
}

fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (GalorbStatus, String)> {
    let c = CString::new(s).map_err(|e| (GalorbStatus::Internal, e.to_string()))?;
    write(out, c.into_raw())
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn galorb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn galorb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of positive divisors of `a`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn galorb_sigma0(a: u64, out: *mut u64) -> GalorbStatus {
    guard(|| write(out, lib(galorb::arith::sigma0(a))?))
}

/// Hilbert symbol `(a, b)_p` as +1 or -1.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn galorb_hilbert_symbol(a: i64, b: i64, p: u64, out: *mut i32) -> GalorbStatus {
    guard(|| write(out, i32::from(lib(galorb::arith::hilbert_symbol(a, b, p))?.as_i8())))
}

/// Type-orbit counts by kind.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GalorbLtBreakdown {
    pub unramified: u64,
    pub principal_series: u64,
    pub steinberg: u64,
    pub supercuspidal_unramified: u64,
    pub supercuspidal_ramified: u64,
    pub supercuspidal_delta2: u64,
    pub supercuspidal_delta3: u64,
    pub sporadic: u64,
    pub total: u64,
}

impl From<galorb::typecensus::LtBreakdown> for GalorbLtBreakdown {
    fn from(b: galorb::typecensus::LtBreakdown) -> Self {
        GalorbLtBreakdown {
            unramified: b.unramified,
            principal_series: b.ps,
            steinberg: b.st,
            supercuspidal_unramified: b.scu,
            supercuspidal_ramified: b.scr,
            supercuspidal_delta2: b.scr_delta2,
            supercuspidal_delta3: b.scr_delta3,
            sporadic: b.sporadic,
            total: b.total(),
        }
    }
}

/// Closed-form type counts at conductor `p^n`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn galorb_lt_closed(p: u64, n: u32, out: *mut GalorbLtBreakdown) -> GalorbStatus {
    guard(|| write(out, lib(galorb::typecensus::lt_closed_form(p, n))?.into()))
}

/// Type counts by enumeration, with rings of at most `budget` elements.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn galorb_lt_enumerated(p: u64, n: u32, budget: u64, out: *mut GalorbLtBreakdown) -> GalorbStatus {
    guard(|| write(out, lib(galorb::typecensus::census(p, n, budget))?.breakdown().into()))
}

/// Closed-form `LO(p^n)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn galorb_lo_closed(p: u64, n: u32, out: *mut u64) -> GalorbStatus {
    guard(|| write(out, lib(galorb::signcensus::lo_closed_form(p, n))?))
}

/// `LO(p^n)` summed from the type census.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn galorb_lo_derived(p: u64, n: u32, budget: u64, out: *mut u64) -> GalorbStatus {
    guard(|| write(out, lib(galorb::signcensus::lo_derived(p, n, budget))?.0))
}

/// Lower bound for level `n_level`; `rigorous` is set when the level is 1, a
/// prime power or squarefree.
///
/// # Safety
/// Both out pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn galorb_bound(n_level: u64, out_bound: *mut u64, out_rigorous: *mut bool) -> GalorbStatus {
    guard(|| {
        let b = lib(galorb::bound::bound(n_level))?;
        write(out_bound, b.bound)?;
        write(out_rigorous, b.rigorous)
    })
}

/// Number of Galois orbits of primitive characters of conductor `n` on
/// `Q_p(sqrt(d))` restricting to the extension's quadratic character.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn galorb_count_primitive_orbits(
    p: u64,
    d: i64,
    n: u32,
    identify_conjugate: bool,
    budget: u64,
    out: *mut u64,
) -> GalorbStatus {
    guard(|| {
        let e = lib(QuadExt::new(p, d))?;
        write(out, lib(galorb::charenum::count_primitive_orbits(&e, n, identify_conjugate, budget))? as u64)
    })
}

/// JSON census of the type orbits at conductor `p^n`. Free the result with
/// `galorb_string_free`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn galorb_census_json(p: u64, n: u32, budget: u64, out: *mut *mut c_char) -> GalorbStatus {
    guard(|| {
        let c = lib(galorb::typecensus::census(p, n, budget))?;
        let s = serde_json::to_string(&c).map_err(|e| (GalorbStatus::Internal, e.to_string()))?;
        write_string(out, s)
    })
}

/// Opaque unit group of `O_E / p_E^n`.
pub struct GalorbUnitGroup {
    field: CString,
    group: UnitGroup,
}

/// Computes the unit group of `O_E / p_E^n` for `E = Q_p(sqrt(d))`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn galorb_unit_group_new(p: u64, d: i64, n: u32, budget: u64, out: *mut *mut GalorbUnitGroup) -> GalorbStatus {
    guard(|| {
        let e = lib(QuadExt::new(p, d))?;
        let ring = lib(QuotientRing::new(&e, n, budget))?;
        let group = lib(UnitGroup::compute(&ring))?;
        let field = CString::new(e.label()).map_err(|x| (GalorbStatus::Internal, x.to_string()))?;
        write(out, Box::into_raw(Box::new(GalorbUnitGroup { field, group })))
    })
}

/// Frees a handle. NULL is ignored.
///
/// # Safety
/// `g` must come from `galorb_unit_group_new` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn galorb_unit_group_free(g: *mut GalorbUnitGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

unsafe fn handle<'a>(g: *const GalorbUnitGroup) -> Result<&'a GalorbUnitGroup, (GalorbStatus, String)> {
    g.as_ref().ok_or((GalorbStatus::NullPointer, "null unit-group handle".into()))
}

/// Group order.
///
/// # Safety
/// `g` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn galorb_unit_group_order(g: *const GalorbUnitGroup, out: *mut u64) -> GalorbStatus {
    guard(|| write(out, handle(g)?.group.order()))
}

/// Field label, owned by the handle.
///
/// # Safety
/// `g` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn galorb_unit_group_field(g: *const GalorbUnitGroup, out: *mut *const c_char) -> GalorbStatus {
    guard(|| write(out, handle(g)?.field.as_ptr()))
}

/// Copies the invariant factors (ascending, each dividing the next) into
/// `buf`. `out_len` always receives the number of factors; if `cap` is too
/// small nothing is copied and `BufferTooSmall` is returned.
///
/// # Safety
/// `g` must be a live handle; `buf` valid for `cap` writes (may be NULL
/// when `cap` is 0); `out_len` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn galorb_unit_group_invariant_factors(
    g: *const GalorbUnitGroup,
    buf: *mut u64,
    cap: usize,
    out_len: *mut usize,
) -> GalorbStatus {
    guard(|| {
        let f = handle(g)?.group.invariant_factors();
        write(out_len, f.len())?;
        if cap < f.len() {
            return Err((GalorbStatus::BufferTooSmall, format!("need {} slots, got {cap}", f.len())));
        }
        if !f.is_empty() {
            if buf.is_null() {
                return Err((GalorbStatus::NullPointer, "null buffer".into()));
            }
            ptr::copy_nonoverlapping(f.as_ptr(), buf, f.len());
        }
        Ok(())
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn galorb_status_name(status: GalorbStatus) -> *const c_char {
    let s: &'static CStr = match status {
        GalorbStatus::Ok => c"ok",
        GalorbStatus::InvalidArgument => c"invalid argument",
        GalorbStatus::NotPrime => c"not prime",
        GalorbStatus::Capacity => c"capacity exceeded",
        GalorbStatus::Unsupported => c"unsupported",
        GalorbStatus::NullPointer => c"null pointer",
        GalorbStatus::BufferTooSmall => c"buffer too small",
        GalorbStatus::Internal => c"internal error",
        GalorbStatus::Panic => c"panic",
    };
    s.as_ptr()
}
