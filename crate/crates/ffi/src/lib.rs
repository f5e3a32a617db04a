//! C ABI for `forcing-lab`.
//!
//! Formulas, sets and posets cross the boundary as opaque handles owned by the
//! caller and released with the matching `*_free`. Every fallible call returns
//! an [`FlStatus`] and writes its result through an out-pointer; on failure the
//! message is kept per thread and read with [`fl_last_error_message`]. Strings
//! returned by the library are released with [`fl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use forcing_lab::forcing::{self, AtomicTuple, FrcEngine, LabeledPoset};
use forcing_lab::lab::{self, LabConfig};
use forcing_lab::semantics;
use forcing_lab::{Error, Formula, HFSet};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Malformed formula, HF literal or JSON.
    Parse = 3,
    /// The poset is not a forcing notion, or a condition is not in it.
    InvalidNotion = 4,
    /// A resource guard or enumeration bound was hit.
    Bound = 5,
    /// Any other rejected input.
    Input = 6,
    /// The library panicked; the handle arguments are still valid.
    Panic = 7,
}

pub struct FlFormula(Formula);

pub struct FlSet(HFSet);

pub struct FlPoset(LabeledPoset);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FlStatus {
    match e {
        Error::Parse(_) => FlStatus::Parse,
        Error::InvalidNotion(_) | Error::NotInP(_) | Error::NotSubsetOfP(_) | Error::Poset(_) => {
            FlStatus::InvalidNotion
        }
        Error::Hf(_) | Error::Bound(_) => FlStatus::Bound,
        _ => FlStatus::Input,
    }
}

struct Fail(FlStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

impl From<forcing_lab::ParseError> for Fail {
    fn from(e: forcing_lab::ParseError) -> Self {
        Fail(FlStatus::Parse, e.to_string())
    }
}

/// Runs `f`, recording its error (or panic) for [`fl_last_error_message`].
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FlStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_owned());
            set_error(msg);
            FlStatus::Panic
        }
    }
}

fn null() -> Fail {
    Fail(FlStatus::NullArgument, "null argument".to_owned())
}

unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Fail(FlStatus::InvalidUtf8, e.to_string()))
}

unsafe fn handle<'a, T>(h: *const T) -> Result<&'a T, Fail> {
    h.as_ref().ok_or_else(null)
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|e| Fail(FlStatus::Input, e.to_string()))?;
    write(out, c.into_raw())
}

/// The last error message on this thread, or null if there was none. The
/// returned string is owned by the caller.
#[no_mangle]
pub extern "C" fn fl_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map_or(ptr::null_mut(), |c| c.clone().into_raw())
    })
}

/// # Safety
/// `s` is null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `src` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn fl_formula_parse(src: *const c_char, out: *mut *mut FlFormula) -> FlStatus {
    guard(|| {
        let f: Formula = str_arg(src)?.parse()?;
        write(out, Box::into_raw(Box::new(FlFormula(f))))
    })
}

/// # Safety
/// `f` is null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn fl_formula_free(f: *mut FlFormula) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// `f` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn fl_formula_render(f: *const FlFormula, out: *mut *mut c_char) -> FlStatus {
    guard(|| write_string(out, handle(f)?.0.render()))
}

/// # Safety
/// `f` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn fl_formula_arity(f: *const FlFormula, out: *mut usize) -> FlStatus {
    guard(|| write(out, handle(f)?.0.arity()))
}

/// # Safety
/// `f` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn fl_formula_is_core(f: *const FlFormula, out: *mut bool) -> FlStatus {
    guard(|| write(out, handle(f)?.0.is_core()))
}

/// The forcing formula of a core formula, as a new handle.
///
/// # Safety
/// `f` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn fl_formula_forces(f: *const FlFormula, out: *mut *mut FlFormula) -> FlStatus {
    guard(|| {
        let g = forcing::forces(&handle(f)?.0)?;
        write(out, Box::into_raw(Box::new(FlFormula(g))))
    })
}

fn new_set(x: HFSet) -> *mut FlSet {
    Box::into_raw(Box::new(FlSet(x)))
}

/// # Safety
/// `src` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn fl_set_parse(src: *const c_char, out: *mut *mut FlSet) -> FlStatus {
    guard(|| {
        let x: HFSet = str_arg(src)?.parse()?;
        write(out, new_set(x))
    })
}

/// # Safety
/// `x` is null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn fl_set_free(x: *mut FlSet) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

/// # Safety
/// `x` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn fl_set_render(x: *const FlSet, out: *mut *mut c_char) -> FlStatus {
    guard(|| write_string(out, handle(x)?.0.to_string()))
}

/// The rank stage `V_n`.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn fl_set_v_stage(n: usize, out: *mut *mut FlSet) -> FlStatus {
    guard(|| write(out, new_set(HFSet::v_stage(n).map_err(Error::from)?)))
}

/// # Safety
/// `a` and `b` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn fl_set_equal(a: *const FlSet, b: *const FlSet, out: *mut bool) -> FlStatus {
    guard(|| write(out, handle(a)?.0 == handle(b)?.0))
}

/// `x ∈ y`.
///
/// # Safety
/// `x` and `y` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn fl_set_mem(x: *const FlSet, y: *const FlSet, out: *mut bool) -> FlStatus {
    guard(|| write(out, handle(y)?.0.contains(&handle(x)?.0)))
}

/// A poset from inline JSON, a file path or `builtin:trivial|C2|A2`.
///
/// # Safety
/// `src` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn fl_poset_from_json(
    src: *const c_char,
    close_leq: bool,
    out: *mut *mut FlPoset,
) -> FlStatus {
    guard(|| {
        let lp = forcing::load_poset(str_arg(src)?, close_leq)?;
        write(out, Box::into_raw(Box::new(FlPoset(lp))))
    })
}

/// # Safety
/// `p` is null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn fl_poset_free(p: *mut FlPoset) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// The condition named by `label` (or an HF literal), as a new set handle.
///
/// # Safety
/// `p` is a live handle; `label` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn fl_poset_condition(
    p: *const FlPoset,
    label: *const c_char,
    out: *mut *mut FlSet,
) -> FlStatus {
    guard(|| {
        let lp = &handle(p)?.0;
        let x = lp.resolve(str_arg(label)?)?;
        if lp.notion.index_of(&x).is_none() {
            return Err(Error::NotInP(x).into());
        }
        write(out, new_set(x))
    })
}

/// `model, env ⊨ f` for a core formula.
///
/// # Safety
/// `model` and `f` are live handles; `env` points to `env_len` live set
/// handles (or is null when `env_len` is 0); `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn fl_sats(
    model: *const FlSet,
    env: *const *const FlSet,
    env_len: usize,
    f: *const FlFormula,
    out: *mut bool,
) -> FlStatus {
    guard(|| {
        let mut e = Vec::with_capacity(env_len);
        if env_len > 0 {
            if env.is_null() {
                return Err(null());
            }
            for &h in std::slice::from_raw_parts(env, env_len) {
                e.push(handle(h)?.0.clone());
            }
        }
        write(out, semantics::sats(&handle(model)?.0, &e, &handle(f)?.0)?)
    })
}

/// The atomic forcing relation; `ft` is 1 for membership and 0 for equality.
///
/// # Safety
/// All handles are live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn fl_frc_at(
    poset: *const FlPoset,
    ft: u8,
    t1: *const FlSet,
    t2: *const FlSet,
    p: *const FlSet,
    out: *mut bool,
) -> FlStatus {
    guard(|| {
        let notion = handle(poset)?.0.notion.clone();
        let t = AtomicTuple::new(ft.min(1), handle(t1)?.0.clone(), handle(t2)?.0.clone(), handle(p)?.0.clone());
        write(out, FrcEngine::new(Arc::new(notion)).frc_at(&t)?)
    })
}

/// `val(G, name)` as a new set handle.
///
/// # Safety
/// `g` and `name` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn fl_val(g: *const FlSet, name: *const FlSet, out: *mut *mut FlSet) -> FlStatus {
    guard(|| write(out, new_set(forcing::val(&handle(g)?.0, &handle(name)?.0))))
}

/// The fully generic filters of a poset as a JSON array of arrays of HF literals.
///
/// # Safety
/// `poset` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn fl_generic_filters_json(poset: *const FlPoset, out: *mut *mut c_char) -> FlStatus {
    guard(|| {
        let gs = forcing::generic_filters(&handle(poset)?.0.notion)?;
        let rows: Vec<Vec<String>> = gs
            .iter()
            .map(|g| g.elems.iter().map(|x| x.to_string()).collect())
            .collect();
        write_string(out, serde_json::to_string(&rows).expect("serializes"))
    })
}

/// The replacement-instance registry as JSON.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn fl_registry_json(out: *mut *mut c_char) -> FlStatus {
    guard(|| write_string(out, serde_json::to_string(&semantics::registry()).expect("serializes")))
}

/// Runs a lab experiment and writes its JSON report. `config_json` may be
/// null for the defaults; missing fields take their defaults. `pass` may be null.
///
/// # Safety
/// `experiment` is a nul-terminated string; `config_json` is null or one;
/// `out` is writable; `pass` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn fl_lab_run_json(
    experiment: *const c_char,
    config_json: *const c_char,
    out: *mut *mut c_char,
    pass: *mut bool,
) -> FlStatus {
    guard(|| {
        let name = str_arg(experiment)?;
        let cfg: LabConfig = if config_json.is_null() {
            LabConfig::default()
        } else {
            serde_json::from_str(str_arg(config_json)?).map_err(|e| Fail(FlStatus::Parse, e.to_string()))?
        };
        let report = lab::run(name, &cfg)?;
        if !pass.is_null() {
            pass.write(report.pass);
        }
        write_string(out, report.to_json())
    })
}
