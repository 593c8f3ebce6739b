//! C ABI over the `qmassey` engine.
//!
//! Every entry point returns a [`QmStatus`]. On a non-zero status the message is available from
//! [`qm_last_error`] until the next call on the same thread. Objects are opaque handles released
//! with their `_free` function; strings handed out by the library are released with
//! [`qm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::io::Cursor;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qmassey::gw::{star_at, GwTable, PdConvention};
use qmassey::report::{replicate, RunConfig, Transcript};
use qmassey::y::{self, Convention};
use qmassey::Error;

/// Status codes shared by all functions.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Undefined = 5,
    Internal = 6,
}

/// Opaque handle to a Gromov-Witten table on the model target.
pub struct QmY {
    table: GwTable,
}

/// Opaque handle to a replication transcript.
pub struct QmTranscript {
    inner: Transcript,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: QmStatus, msg: &str) -> QmStatus {
    set_error(msg);
    status
}

fn status_of(e: &Error) -> QmStatus {
    match e {
        Error::Parse(_) | Error::UnknownLabel(_) => QmStatus::Parse,
        Error::Undefined(_) => QmStatus::Undefined,
        Error::Internal(_) | Error::Io(_) => QmStatus::Internal,
        _ => QmStatus::InvalidArgument,
    }
}

fn from_error(e: Error) -> QmStatus {
    fail(status_of(&e), &e.to_string())
}

/// Runs `f`, turning panics into `Internal`.
fn guard(f: impl FnOnce() -> QmStatus) -> QmStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(QmStatus::Internal, "panic inside qmassey"),
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, QmStatus> {
    if p.is_null() {
        return Err(fail(QmStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(QmStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> QmStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            QmStatus::Ok
        }
        Err(_) => fail(QmStatus::Internal, "output contains a NUL byte"),
    }
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(QmStatus::NullPointer, concat!("null argument `", stringify!($p), "`"));
        })+
    };
}

/// Message for the last failing call on this thread, or NULL. Owned by the library.
#[no_mangle]
pub extern "C" fn qm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn qm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds the bundled model table.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qm_y_new(out: *mut *mut QmY) -> QmStatus {
    guard(|| {
        non_null!(out);
        let table = try_ffi!(y::build_y().map_err(from_error));
        *out = Box::into_raw(Box::new(QmY { table }));
        QmStatus::Ok
    })
}

/// Builds a table from algebra and invariant texts in the dataset formats.
///
/// # Safety
/// Strings must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qm_y_from_text(algebra: *const c_char, gw: *const c_char, out: *mut *mut QmY) -> QmStatus {
    guard(|| {
        non_null!(out);
        let a = try_ffi!(read_str(algebra));
        let g = try_ffi!(read_str(gw));
        let table = try_ffi!(y::build_y_from(a, g).map_err(from_error));
        *out = Box::into_raw(Box::new(QmY { table }));
        QmStatus::Ok
    })
}

/// # Safety
/// `y` must come from `qm_y_new`/`qm_y_from_text` and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn qm_y_free(y: *mut QmY) {
    if !y.is_null() {
        drop(Box::from_raw(y));
    }
}

/// The energy-`class` product `x *_class z` rendered as a linear combination.
///
/// `class` is a name such as `0`, `F`, `R` or `2F`; `x` and `z` are linear combinations of basis
/// labels. `product_last` selects which slot of the three-point invariant carries the output.
///
/// # Safety
/// Strings must be NUL-terminated; `y` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qm_y_star(
    y: *const QmY,
    class: *const c_char,
    x: *const c_char,
    z: *const c_char,
    product_last: bool,
    out: *mut *mut c_char,
) -> QmStatus {
    guard(|| {
        non_null!(y, out);
        let t = &(*y).table;
        let a = try_ffi!(y::y_class(try_ffi!(read_str(class))).map_err(from_error));
        let xv = try_ffi!(t.target.element(try_ffi!(read_str(x))).map_err(from_error));
        let zv = try_ffi!(t.target.element(try_ffi!(read_str(z))).map_err(from_error));
        let conv = if product_last { PdConvention::ProductLast } else { PdConvention::ProductFirst };
        let v = try_ffi!(star_at(t, conv, &a, &xv, &zv).map_err(from_error));
        write_string(out, t.target.render(&v))
    })
}

/// Runs the end-to-end replication on the bundled data.
///
/// `convention` is `tabulated`, `stated`, or NULL for both. Stage failures are part of the
/// transcript, so this returns `Ok` whenever the run itself could be performed.
///
/// # Safety
/// `convention` must be NULL or NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qm_replicate(convention: *const c_char, out: *mut *mut QmTranscript) -> QmStatus {
    guard(|| {
        non_null!(out);
        let conventions = if convention.is_null() {
            Vec::new()
        } else {
            vec![try_ffi!(Convention::parse(try_ffi!(read_str(convention))).map_err(from_error))]
        };
        let cfg = RunConfig { conventions, ..RunConfig::default() };
        *out = Box::into_raw(Box::new(QmTranscript { inner: replicate(&cfg) }));
        QmStatus::Ok
    })
}

/// True iff the run completed with a nontrivial coset for every convention.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qm_transcript_verdict(t: *const QmTranscript, out: *mut bool) -> QmStatus {
    guard(|| {
        non_null!(t, out);
        *out = (*t).inner.verdict;
        QmStatus::Ok
    })
}

/// The transcript as sorted-key JSON; free with `qm_string_free`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qm_transcript_json(t: *const QmTranscript, out: *mut *mut c_char) -> QmStatus {
    guard(|| {
        non_null!(t, out);
        write_string(out, (*t).inner.to_json())
    })
}

/// The transcript as text; free with `qm_string_free`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qm_transcript_text(t: *const QmTranscript, out: *mut *mut c_char) -> QmStatus {
    guard(|| {
        non_null!(t, out);
        write_string(out, (*t).inner.to_text())
    })
}

/// # Safety
/// `t` must come from `qm_replicate` and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn qm_transcript_free(t: *mut QmTranscript) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Runs a command line as the `qmassey` binary would, without the program name.
///
/// The captured output goes to `*out` (free with `qm_string_free`) and the process exit code
/// to `*exit_code`: 0 passed, 1 a check failed, 2 usage or input error.
///
/// # Safety
/// `argv` must hold `argc` NUL-terminated strings; `out` and `exit_code` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qm_cli_run(
    argc: c_int,
    argv: *const *const c_char,
    out: *mut *mut c_char,
    exit_code: *mut c_int,
) -> QmStatus {
    guard(|| {
        non_null!(out, exit_code);
        if argc < 0 || (argc > 0 && argv.is_null()) {
            return fail(QmStatus::InvalidArgument, "bad argc/argv");
        }
        let mut args = vec!["qmassey".to_string()];
        for i in 0..argc as usize {
            args.push(try_ffi!(read_str(*argv.add(i))).to_string());
        }
        let mut buf = Cursor::new(Vec::new());
        *exit_code = qmassey::cli::run(args, &mut buf);
        let text = String::from_utf8_lossy(&buf.into_inner()).into_owned();
        write_string(out, text)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    unsafe fn take(p: *mut c_char) -> String {
        let s = CStr::from_ptr(p).to_str().unwrap().to_string();
        qm_string_free(p);
        s
    }

    #[test]
    fn star_through_handle() {
        unsafe {
            let mut y = ptr::null_mut();
            assert_eq!(qm_y_new(&mut y), QmStatus::Ok);
            let mut out = ptr::null_mut();
            let st = qm_y_star(y, c("0").as_ptr(), c("h").as_ptr(), c("l").as_ptr(), true, &mut out);
            assert_eq!(st, QmStatus::Ok);
            assert_eq!(take(out), "pt");
            qm_y_free(y);
        }
    }

    #[test]
    fn errors_set_message() {
        unsafe {
            let mut y = ptr::null_mut();
            assert_eq!(qm_y_new(&mut y), QmStatus::Ok);
            let mut out = ptr::null_mut();
            let st = qm_y_star(y, c("0").as_ptr(), c("nope").as_ptr(), c("l").as_ptr(), true, &mut out);
            assert_eq!(st, QmStatus::Parse);
            let msg = CStr::from_ptr(qm_last_error()).to_str().unwrap();
            assert!(msg.contains("nope"), "{msg}");
            assert_eq!(qm_y_star(ptr::null(), ptr::null(), ptr::null(), ptr::null(), true, &mut out), QmStatus::NullPointer);
            qm_y_free(y);
        }
    }

    #[test]
    fn replicate_transcript() {
        unsafe {
            let mut t = ptr::null_mut();
            assert_eq!(qm_replicate(c("stated").as_ptr(), &mut t), QmStatus::Ok);
            let mut v = true;
            assert_eq!(qm_transcript_verdict(t, &mut v), QmStatus::Ok);
            let mut js = ptr::null_mut();
            assert_eq!(qm_transcript_json(t, &mut js), QmStatus::Ok);
            let js = take(js);
            assert!(js.contains("\"convention\": \"stated\""));
            assert_eq!(v, js.contains("\"verdict\": true"));
            qm_transcript_free(t);
            assert_eq!(qm_replicate(c("other").as_ptr(), &mut t), QmStatus::Parse);
        }
    }

    #[test]
    fn cli_passthrough() {
        unsafe {
            let args = [c("trees"), c("enumerate"), c("--d"), c("4")];
            let ptrs: Vec<_> = args.iter().map(|a| a.as_ptr()).collect();
            let mut out = ptr::null_mut();
            let mut code = -1;
            assert_eq!(qm_cli_run(ptrs.len() as c_int, ptrs.as_ptr(), &mut out, &mut code), QmStatus::Ok);
            assert_eq!(code, 0);
            assert!(!take(out).is_empty());
            assert!(!qm_version().is_null());
        }
    }

}
