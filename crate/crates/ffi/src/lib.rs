//! C ABI over `esmin`.
//!
//! Structures are passed as opaque [`EsminModel`] handles. Every fallible call
//! returns an [`EsminStatus`]; on `ESMIN_ERROR` and friends the message is
//! available from [`esmin_last_error`] until the next call on the same thread.
//! Strings returned through out-parameters are owned by the caller and must be
//! released with [`esmin_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use esmin::behavior::decide_bisim;
use esmin::folding::{check_folding, minimize, MinClass};
use esmin::io::{parse_es, parse_map, serialize_es};
use esmin::models::{validate_model, Model};
use esmin::Error;

/// Result of a call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EsminStatus {
    /// Success, or an affirmative verdict.
    Ok = 0,
    /// A well-formed negative verdict.
    No = 1,
    /// A required pointer was null.
    NullArgument = 2,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 3,
    /// An input text could not be parsed.
    ParseError = 4,
    /// Any other library error.
    Error = 5,
    /// The library panicked; this is a bug.
    Panic = 6,
}

/// An owned, parsed structure.
pub struct EsminModel {
    model: Model,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let mut bytes = msg.into();
    bytes.retain(|&b| b != 0);
    let s = CString::new(bytes).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn fail(status: EsminStatus, msg: impl Into<Vec<u8>>) -> EsminStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> EsminStatus {
    let status = match e {
        Error::Syntax { .. } | Error::UndeclaredEvent { .. } | Error::DuplicateDeclaration { .. } | Error::KindMismatch { .. } => {
            EsminStatus::ParseError
        }
        _ => EsminStatus::Error,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> EsminStatus) -> EsminStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(EsminStatus::Panic, "internal panic"))
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, EsminStatus> {
    if p.is_null() {
        return Err(fail(EsminStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|e| fail(EsminStatus::InvalidUtf8, e.to_string()))
}

unsafe fn model<'a>(p: *const EsminModel) -> Result<&'a Model, EsminStatus> {
    p.as_ref().map(|m| &m.model).ok_or_else(|| fail(EsminStatus::NullArgument, "null model handle"))
}

unsafe fn give_string(out: *mut *mut c_char, s: String) -> EsminStatus {
    if out.is_null() {
        return EsminStatus::Ok;
    }
    let mut bytes = s.into_bytes();
    bytes.retain(|&b| b != 0);
    *out = CString::new(bytes).expect("nul bytes removed").into_raw();
    EsminStatus::Ok
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! lib {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return from_error(e),
        }
    };
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn esmin_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parse a structure in the `.es` text format.
///
/// # Safety
/// `src` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esmin_model_parse(src: *const c_char, out: *mut *mut EsminModel) -> EsminStatus {
    guard(|| {
        if out.is_null() {
            return fail(EsminStatus::NullArgument, "null output pointer");
        }
        *out = ptr::null_mut();
        let m = lib!(parse_es(tri!(text(src))));
        *out = Box::into_raw(Box::new(EsminModel { model: m }));
        EsminStatus::Ok
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `m` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn esmin_model_free(m: *mut EsminModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of events, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn esmin_model_event_count(m: *const EsminModel) -> usize {
    m.as_ref().map_or(0, |m| m.model.ids().len())
}

/// Number of configurations.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esmin_model_config_count(m: *const EsminModel, out: *mut usize) -> EsminStatus {
    guard(|| {
        let m = tri!(model(m));
        if out.is_null() {
            return fail(EsminStatus::NullArgument, "null output pointer");
        }
        *out = lib!(m.embedding(false)).family().len();
        EsminStatus::Ok
    })
}

/// Check the axioms of the structure's class. `report` may be null.
///
/// # Safety
/// `m` must be a live handle; `report`, if non-null, a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esmin_validate(m: *const EsminModel, report: *mut *mut c_char) -> EsminStatus {
    guard(|| {
        let r = validate_model(tri!(model(m)));
        give_string(report, r.to_string());
        if r.is_valid() {
            EsminStatus::Ok
        } else {
            EsminStatus::No
        }
    })
}

/// Serialise a structure to the `.es` text format.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn esmin_model_serialize(m: *const EsminModel, out: *mut *mut c_char) -> EsminStatus {
    guard(|| {
        let m = tri!(model(m));
        if out.is_null() {
            return fail(EsminStatus::NullArgument, "null output pointer");
        }
        give_string(out, serialize_es(m))
    })
}

/// Decide whether `map` (in the `.map` format) is a folding of `src` onto `dst`.
/// A map that is not a morphism yields `ESMIN_NO`. `report` may be null.
///
/// # Safety
/// Handles must be live, `map` nul-terminated, `report` null or valid.
#[no_mangle]
pub unsafe extern "C" fn esmin_check_folding(
    src: *const EsminModel,
    dst: *const EsminModel,
    map: *const c_char,
    report: *mut *mut c_char,
) -> EsminStatus {
    guard(|| {
        let (a, b) = (tri!(model(src)), tri!(model(dst)));
        let f = lib!(parse_map(tri!(text(map)), a.ids(), b.ids()));
        let (ea, eb) = (lib!(a.embedding(false)), lib!(b.embedding(false)));
        let r = match check_folding(&ea, &eb, &f) {
            Err(Error::NotAMorphism(r)) => {
                give_string(report, format!("morphism: {r}"));
                return EsminStatus::No;
            }
            other => lib!(other),
        };
        give_string(report, r.to_string());
        if r.verdict() {
            EsminStatus::Ok
        } else {
            EsminStatus::No
        }
    })
}

/// Decide hp (`hereditary` false) or hhp (`hereditary` true) bisimilarity.
///
/// # Safety
/// Both handles must be live.
#[no_mangle]
pub unsafe extern "C" fn esmin_bisim(a: *const EsminModel, b: *const EsminModel, hereditary: bool) -> EsminStatus {
    guard(|| {
        let (a, b) = (tri!(model(a)), tri!(model(b)));
        let (ea, eb) = (lib!(a.embedding(false)), lib!(b.embedding(false)));
        match lib!(decide_bisim(&ea, &eb, hereditary)) {
            Some(_) => EsminStatus::Ok,
            None => EsminStatus::No,
        }
    })
}

/// Minimise within `class` ("poset", "pes" or "aes"). On success `count`
/// receives the number of maximal solutions and `first`, if non-null, the
/// first quotient in the `.es` format.
///
/// # Safety
/// `m` must be live, `class` nul-terminated, `count` valid, `first` null or valid.
#[no_mangle]
pub unsafe extern "C" fn esmin_minimize(
    m: *const EsminModel,
    class: *const c_char,
    count: *mut usize,
    first: *mut *mut c_char,
) -> EsminStatus {
    guard(|| {
        let m = tri!(model(m));
        let class: MinClass = match tri!(text(class)).parse() {
            Ok(c) => c,
            Err(e) => return fail(EsminStatus::Error, e),
        };
        if count.is_null() {
            return fail(EsminStatus::NullArgument, "null output pointer");
        }
        let res = lib!(minimize(m, class));
        *count = res.solutions.len();
        if let Some(s) = res.solutions.first() {
            give_string(first, serialize_es(&s.quotient));
        }
        EsminStatus::Ok
    })
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn esmin_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
