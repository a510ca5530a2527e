//! C ABI for the proof kernel.
//!
//! Every entry point returns a [`DlStatus`]. On failure the message is kept in a
//! thread-local slot readable through [`dl_last_error`]. Strings handed out by the
//! library are released with [`dl_string_free`]; handles with their own free function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dl_kernel::axioms::Registry;
use dl_kernel::kernel::ArithMode;
use dl_kernel::parser::parse_expr;
use dl_kernel::report;
use dl_kernel::script::{check_script, ScriptError};
use dl_kernel::syntax::Expr;
use dl_kernel::usubst::{apply, parse_subst, USubst};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DlStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    Clash = 4,
    NotFound = 5,
    CheckFailed = 6,
    Panic = 7,
}

/// Arithmetic handling for [`dl_check_script`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DlArith {
    Assume = 0,
    Sample = 1,
    External = 2,
}

/// A parsed term, formula or program.
pub struct DlExpr(Expr);

/// A parsed uniform substitution.
pub struct DlSubst(USubst);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let mut bytes = msg.into();
    bytes.retain(|b| *b != 0);
    let c = CString::new(bytes).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(DlStatus, String);

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> DlStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DlStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            DlStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(DlStatus::NullArgument, "null string argument".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Fail(DlStatus::InvalidUtf8, e.to_string()))
}

unsafe fn out_ptr<'a, T>(out: *mut *mut T) -> Result<&'a mut *mut T, Fail> {
    match out.as_mut() {
        Some(o) => {
            *o = ptr::null_mut();
            Ok(o)
        }
        None => Err(Fail(DlStatus::NullArgument, "null output pointer".into())),
    }
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(DlStatus::NullArgument, "null handle".into()))
}

fn owned_string(s: String) -> *mut c_char {
    let mut bytes = s.into_bytes();
    bytes.retain(|b| *b != 0);
    CString::new(bytes).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message for the last failing call on this thread, or NULL. Valid until the next call.
#[no_mangle]
pub extern "C" fn dl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn dl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` is NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a term, formula or program.
///
/// # Safety
/// `src` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn dl_expr_parse(src: *const c_char, out: *mut *mut DlExpr) -> DlStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let e = parse_expr(text(src)?).map_err(|e| Fail(DlStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(DlExpr(e)));
        Ok(())
    })
}

/// Looks up an axiom of the standard registry by name or alias.
///
/// # Safety
/// `name` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn dl_axiom(name: *const c_char, out: *mut *mut DlExpr) -> DlStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let n = text(name)?;
        let a = Registry::standard().axiom(n).ok_or_else(|| Fail(DlStatus::NotFound, format!("unknown axiom {n}")))?;
        *out = Box::into_raw(Box::new(DlExpr(Expr::Formula(a.formula.clone()))));
        Ok(())
    })
}

/// Pretty-printed form of `e`; release with [`dl_string_free`].
///
/// # Safety
/// `e` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn dl_expr_print(e: *const DlExpr, out: *mut *mut c_char) -> DlStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = owned_string(handle(e)?.0.to_string());
        Ok(())
    })
}

/// Free, bound and must-bound variables plus signature as JSON.
///
/// # Safety
/// `e` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn dl_expr_static_json(e: *const DlExpr, out: *mut *mut c_char) -> DlStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = owned_string(report::statics(&handle(e)?.0).to_string());
        Ok(())
    })
}

/// # Safety
/// `e` is NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dl_expr_free(e: *mut DlExpr) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Parses a substitution pair list such as `((fn f 0) "x^2")`.
///
/// # Safety
/// `src` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn dl_subst_parse(src: *const c_char, out: *mut *mut DlSubst) -> DlStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let s = parse_subst(text(src)?).map_err(|e| Fail(DlStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(DlSubst(s)));
        Ok(())
    })
}

/// Applies `s` to `e`. A clash yields [`DlStatus::Clash`] and a message naming the taboo set.
///
/// # Safety
/// `s` and `e` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn dl_subst_apply(s: *const DlSubst, e: *const DlExpr, out: *mut *mut DlExpr) -> DlStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let r = apply(&handle(s)?.0, &handle(e)?.0).map_err(|x| Fail(DlStatus::Clash, x.to_string()))?;
        *out = Box::into_raw(Box::new(DlExpr(r)));
        Ok(())
    })
}

/// # Safety
/// `s` is NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dl_subst_free(s: *mut DlSubst) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Checks a proof script. On success and on check failures `out_json` receives the
/// JSON report (goals or error); release it with [`dl_string_free`].
/// `command` is only read for [`DlArith::External`].
///
/// # Safety
/// `src` is a NUL-terminated string; `command` is NULL or NUL-terminated; `out_json` is writable.
#[no_mangle]
pub unsafe extern "C" fn dl_check_script(
    src: *const c_char,
    arith: DlArith,
    seed: u64,
    command: *const c_char,
    out_json: *mut *mut c_char,
) -> DlStatus {
    guard(|| {
        let out = out_ptr(out_json)?;
        let src = text(src)?;
        let mode = match arith {
            DlArith::Assume => ArithMode::Assume,
            DlArith::Sample => ArithMode::sample(seed),
            DlArith::External => ArithMode::External { command: text(command)?.to_string() },
        };
        match check_script(src, &mode) {
            Ok(ps) => {
                *out = owned_string(report::goals(&ps).to_string());
                Ok(())
            }
            Err(e) => {
                *out = owned_string(report::script_error(&e).to_string());
                let code = match e {
                    ScriptError::Syntax { .. } => DlStatus::ParseError,
                    _ => DlStatus::CheckFailed,
                };
                Err(Fail(code, e.to_string()))
            }
        }
    })
}
