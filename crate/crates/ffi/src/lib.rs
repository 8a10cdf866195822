//! C interface to `relhom`.
//!
//! Structures cross the boundary as opaque `RelhomStructure` handles. Every
//! fallible call returns a `RelhomStatus`; on failure the message is available
//! from `relhom_last_error` on the same thread until the next failing call.
//! Strings returned by this library must be released with `relhom_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use relhom::dismantling::{decide_main, is_dismantlable};
use relhom::duality::is_core;
use relhom::homs::count_homs;
use relhom::{fixtures, Error, RelStructure};
use serde_json::json;

/// Opaque handle to a finite relational structure.
pub struct RelhomStructure(RelStructure);

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelhomStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    UnknownFixture = 4,
    SignatureMismatch = 5,
    NotInUniverse = 6,
    CapExceeded = 7,
    Precondition = 8,
    InvalidArgument = 9,
    Internal = 10,
    Panic = 11,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(RelhomStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Syntax { .. } | Error::Parse { .. } | Error::Structure(_) => RelhomStatus::Parse,
            Error::SignatureMismatch => RelhomStatus::SignatureMismatch,
            Error::NotInUniverse(_) | Error::EmptySet => RelhomStatus::NotInUniverse,
            Error::CapExceeded { .. } => RelhomStatus::CapExceeded,
            Error::Precondition(_) => RelhomStatus::Precondition,
            Error::InvalidArgument(_) => RelhomStatus::InvalidArgument,
            _ => RelhomStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

/// Runs `f`, recording any failure or panic in the thread-local error slot.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RelhomStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RelhomStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside relhom".into());
            RelhomStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure(RelhomStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure(RelhomStatus::InvalidUtf8, e.to_string()))
}

unsafe fn handle<'a>(h: *const RelhomStructure) -> Result<&'a RelStructure, Failure> {
    h.as_ref()
        .map(|h| &h.0)
        .ok_or_else(|| Failure(RelhomStatus::NullPointer, "null structure".into()))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(RelhomStatus::NullPointer, "null output pointer".into()));
    }
    out.write(value);
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Comma-separated element names; null or empty means no elements.
unsafe fn names(h: &RelStructure, list: *const c_char) -> Result<Vec<usize>, Failure> {
    if list.is_null() {
        return Ok(Vec::new());
    }
    let s = text(list)?;
    let parts: Vec<&str> = s.split(',').map(str::trim).filter(|p| !p.is_empty()).collect();
    Ok(h.ids_of(&parts)?)
}

/// Parses a structure from its text form.
///
/// # Safety
/// `src` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn relhom_structure_parse(
    src: *const c_char,
    out: *mut *mut RelhomStructure,
) -> RelhomStatus {
    guard(|| {
        let h = RelStructure::parse(text(src)?)?;
        write(out, Box::into_raw(Box::new(RelhomStructure(h))))
    })
}

/// Loads a built-in structure (`sft3`, `edge`, `tri`, `c3`, `k2`, `pt1`).
///
/// # Safety
/// `name` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn relhom_structure_fixture(
    name: *const c_char,
    out: *mut *mut RelhomStructure,
) -> RelhomStatus {
    guard(|| {
        let name = text(name)?;
        let h = fixtures::by_name(name)
            .ok_or_else(|| Failure(RelhomStatus::UnknownFixture, format!("no fixture `{name}`")))?;
        write(out, Box::into_raw(Box::new(RelhomStructure(h))))
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `h` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn relhom_structure_free(h: *mut RelhomStructure) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of elements, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn relhom_structure_len(h: *const RelhomStructure) -> usize {
    h.as_ref().map_or(0, |h| h.0.len())
}

/// Text form of the structure, or null on failure.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn relhom_structure_render(h: *const RelhomStructure) -> *mut c_char {
    let mut s = ptr::null_mut();
    guard(|| {
        s = owned_string(handle(h)?.render());
        Ok(())
    });
    s
}

/// Whether greedy folding reaches a single element.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn relhom_is_dismantlable(
    h: *const RelhomStructure,
    out: *mut bool,
) -> RelhomStatus {
    guard(|| write(out, is_dismantlable(handle(h)?)))
}

/// Runs the two-phase decision with the fixed elements `j` (comma-separated
/// names, may be null). Writes the verdict, and the mixing gap when it holds
/// (0 otherwise).
///
/// # Safety
/// `h` must be a live handle, `j` null or a valid string, and the outputs
/// valid pointers.
#[no_mangle]
pub unsafe extern "C" fn relhom_decide(
    h: *const RelhomStructure,
    j: *const c_char,
    out_holds: *mut bool,
    out_gap: *mut usize,
) -> RelhomStatus {
    guard(|| {
        let h = handle(h)?;
        let rep = decide_main(h, &names(h, j)?)?;
        write(out_holds, rep.holds)?;
        write(out_gap, rep.gap.unwrap_or(0))
    })
}

/// Same as `relhom_decide` with the full report as a JSON string.
///
/// # Safety
/// As for `relhom_decide`; `out` receives a string for `relhom_string_free`.
#[no_mangle]
pub unsafe extern "C" fn relhom_decide_json(
    h: *const RelhomStructure,
    j: *const c_char,
    out: *mut *mut c_char,
) -> RelhomStatus {
    guard(|| {
        let h = handle(h)?;
        let rep = decide_main(h, &names(h, j)?)?;
        let folds = |seq: &relhom::dismantling::DismantleSequence| -> Vec<[String; 2]> {
            seq.folds
                .iter()
                .map(|f| [f.removed.clone(), f.dominator.clone()])
                .collect()
        };
        let v = json!({
            "holds": rep.holds,
            "j": rep.j,
            "phase1": folds(&rep.phase1),
            "i": rep.i.names(),
            "phase2": folds(&rep.phase2),
            "k": rep.k.names(),
            "ell": rep.ell(),
            "gap": rep.gap,
            "witness": rep.witness(),
        });
        write(out, owned_string(v.to_string()))
    })
}

/// Whether every endomorphism is a bijection.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn relhom_is_core(h: *const RelhomStructure, out: *mut bool) -> RelhomStatus {
    guard(|| write(out, is_core(handle(h)?)?))
}

/// Counts homomorphisms `g -> h`, failing with `CapExceeded` past `cap`.
///
/// # Safety
/// `g` and `h` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn relhom_count_homs(
    g: *const RelhomStructure,
    h: *const RelhomStructure,
    cap: usize,
    out: *mut usize,
) -> RelhomStatus {
    guard(|| write(out, count_homs(handle(g)?, handle(h)?, cap)?))
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn relhom_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn relhom_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
