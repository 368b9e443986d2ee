//! C ABI surface for the epirate library.
//!
//! Conventions: every fallible call returns an [`EpirateStatus`]; results
//! come back through out-pointers; heap objects are opaque handles paired
//! with an explicit `_free`. The last error message is kept per thread and
//! readable via [`epirate_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use epirate::inference::{ess, Chain};
use epirate::Error;

/// Status codes mirroring the CLI's exit-code taxonomy, plus FFI-specific
/// argument failures.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpirateStatus {
    Ok = 0,
    Usage = 1,
    Numerical = 2,
    Data = 3,
    NullPointer = 4,
    InvalidUtf8 = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> EpirateStatus {
    match err {
        Error::Config(_) | Error::InvalidInput(_) => EpirateStatus::Usage,
        Error::Numerical(_) | Error::FitFailed(_) | Error::UndefinedStatistic(_) => {
            EpirateStatus::Numerical
        }
        _ => EpirateStatus::Data,
    }
}

fn fail(err: Error) -> EpirateStatus {
    let code = status_of(&err);
    set_error(err.to_string());
    code
}

/// Message for the most recent error on this thread, or NULL if none.
/// The pointer stays valid until the next failing epirate call on the same
/// thread.
#[no_mangle]
pub extern "C" fn epirate_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| match &*e.borrow() {
        Some(c) => c.as_ptr(),
        None => ptr::null(),
    })
}

/// Opaque posterior-sample handle.
pub struct EpirateChain(Chain);

unsafe fn cstr<'a>(p: *const c_char) -> Result<&'a str, EpirateStatus> {
    if p.is_null() {
        set_error("null string argument".into());
        return Err(EpirateStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8".into());
        EpirateStatus::InvalidUtf8
    })
}

/// Load a persisted chain given the base path used when saving (the
/// `.chain.bin` / `.chain.json` suffixes are appended internally).
///
/// # Safety
/// `base_path` must be a NUL-terminated string; `out` must be a valid
/// pointer. On success `*out` owns the handle and must be released with
/// [`epirate_chain_free`].
#[no_mangle]
pub unsafe extern "C" fn epirate_chain_load(
    base_path: *const c_char,
    out: *mut *mut EpirateChain,
) -> EpirateStatus {
    if out.is_null() {
        set_error("null out pointer".into());
        return EpirateStatus::NullPointer;
    }
    let path = match cstr(base_path) {
        Ok(s) => s,
        Err(code) => return code,
    };
    match Chain::load(Path::new(path)) {
        Ok(chain) => {
            *out = Box::into_raw(Box::new(EpirateChain(chain)));
            EpirateStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Release a chain handle. NULL is a no-op.
///
/// # Safety
/// `chain` must be a pointer returned by [`epirate_chain_load`], released
/// at most once.
#[no_mangle]
pub unsafe extern "C" fn epirate_chain_free(chain: *mut EpirateChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

/// Number of kept posterior samples; 0 for NULL.
///
/// # Safety
/// `chain` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn epirate_chain_n_kept(chain: *const EpirateChain) -> usize {
    chain.as_ref().map_or(0, |c| c.0.n_kept())
}

/// Number of parameters; 0 for NULL.
///
/// # Safety
/// `chain` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn epirate_chain_dim(chain: *const EpirateChain) -> usize {
    chain.as_ref().map_or(0, |c| c.0.dim())
}

/// Copy the samples of the named parameter into `out` (capacity `len`,
/// which must be >= the kept-sample count).
///
/// # Safety
/// `chain` must be a live handle, `name` NUL-terminated, and `out` valid
/// for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn epirate_chain_column(
    chain: *const EpirateChain,
    name: *const c_char,
    out: *mut f64,
    len: usize,
) -> EpirateStatus {
    let Some(chain) = chain.as_ref() else {
        set_error("null chain handle".into());
        return EpirateStatus::NullPointer;
    };
    if out.is_null() {
        set_error("null out buffer".into());
        return EpirateStatus::NullPointer;
    }
    let name = match cstr(name) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let Some(col) = chain.0.column_by_name(name) else {
        return fail(Error::InvalidInput(format!("no parameter named {name:?}")));
    };
    if len < col.len() {
        return fail(Error::InvalidInput(format!(
            "buffer holds {len} values, chain has {}",
            col.len()
        )));
    }
    ptr::copy_nonoverlapping(col.as_ptr(), out, col.len());
    EpirateStatus::Ok
}

/// Effective sample size of the named parameter.
///
/// # Safety
/// `chain` must be a live handle, `name` NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn epirate_chain_ess(
    chain: *const EpirateChain,
    name: *const c_char,
    out: *mut f64,
) -> EpirateStatus {
    let Some(chain) = chain.as_ref() else {
        set_error("null chain handle".into());
        return EpirateStatus::NullPointer;
    };
    if out.is_null() {
        set_error("null out pointer".into());
        return EpirateStatus::NullPointer;
    }
    let name = match cstr(name) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let Some(col) = chain.0.column_by_name(name) else {
        return fail(Error::InvalidInput(format!("no parameter named {name:?}")));
    };
    match ess(&col) {
        Ok(v) => {
            *out = v;
            EpirateStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Empirical-distribution CRPS of `samples` against observation `y`.
///
/// # Safety
/// `samples` must be valid for `n` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn epirate_crps(
    samples: *const f64,
    n: usize,
    y: f64,
    out: *mut f64,
) -> EpirateStatus {
    if samples.is_null() || out.is_null() {
        set_error("null pointer argument".into());
        return EpirateStatus::NullPointer;
    }
    let slice = std::slice::from_raw_parts(samples, n);
    match epirate::forecast::crps(slice, y) {
        Ok(v) => {
            *out = v;
            EpirateStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Run the full CLI pipeline in-process; returns the would-be exit code.
/// `argv` is a NULL-terminated array of NUL-terminated arguments,
/// beginning with the program name.
///
/// # Safety
/// `argv` and each entry must satisfy the conventions above.
#[no_mangle]
pub unsafe extern "C" fn epirate_cli_run(argv: *const *const c_char) -> i32 {
    if argv.is_null() {
        set_error("null argv".into());
        return EpirateStatus::Usage as i32;
    }
    let mut args: Vec<String> = Vec::new();
    let mut p = argv;
    while !(*p).is_null() {
        match cstr(*p) {
            Ok(s) => args.push(s.to_string()),
            Err(code) => return code as i32,
        }
        p = p.add(1);
    }
    epirate::cli::run(args)
}
