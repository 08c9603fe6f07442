//! C ABI for dpcalc.
//!
//! Every fallible entry point returns a [`DpcStatus`] and writes its results
//! through out-pointers. On failure, [`dpc_last_error`] returns a message for
//! the calling thread. Handles are opaque and owned by the caller; release
//! them with the matching `_free` function. Strings returned through
//! `char **` out-pointers are released with [`dpc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dpcalc::cli::{parse_config, run};
use dpcalc::identities::{bg_laplace_mc, cs_transform_mc, list_checks};
use dpcalc::mc;
use dpcalc::samplers::{BetaGammaSampler, DirichletSampler};
use dpcalc::transforms::{cs_eq15, cs_eq17, cs_partition_expansion, laplace_gamma, psi, ExpansionMode};
use dpcalc::{BaseMeasure, Error, Functional, RngStream, ShapeMeasure};

/// Status codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpcStatus {
    Ok = 0,
    InvalidParameter = 1,
    /// A named inequality on the inputs does not hold, e.g. `theta - q > 0`.
    Precondition = 2,
    Domain = 3,
    Parse = 4,
    UnknownCheck = 5,
    Io = 6,
    NullPointer = 7,
    InvalidUtf8 = 8,
    /// A Rust panic was caught at the boundary.
    Internal = 9,
}

/// Which random measure [`dpc_sample_functional`] draws.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpcProcess {
    /// `P(g)` for `P ~ Dirichlet(θH)`.
    Dirichlet = 0,
    /// `μ(g)` for the Gamma process with shape `θH`.
    Gamma = 1,
    /// `μ(g)` for the Beta-Gamma process with shape `θH` and parameter `d`.
    BetaGamma = 2,
}

/// A shape measure `θH`.
pub struct DpcShape(ShapeMeasure);

/// A functional `g`.
pub struct DpcFunctional(Functional);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DpcStatus {
    match e {
        Error::InvalidParameter(_) => DpcStatus::InvalidParameter,
        Error::Precondition(_) => DpcStatus::Precondition,
        Error::Domain(_) => DpcStatus::Domain,
        Error::Parse { .. } => DpcStatus::Parse,
        Error::UnknownCheck { .. } => DpcStatus::UnknownCheck,
        Error::Io(_) => DpcStatus::Io,
    }
}

struct Fail(DpcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

type FfiResult<T> = std::result::Result<T, Fail>;

fn guard<F: FnOnce() -> FfiResult<()>>(f: F) -> DpcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DpcStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            DpcStatus::Internal
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(DpcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(DpcStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> FfiResult<()> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("nul bytes removed")
        .into_raw()
}

/// Message for the last failed call on this thread, or null if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dpc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds the shape `θH` from a base-measure expression such as
/// `"0.5*delta(0)+0.5*delta(1)"` or `"uniform(0,1)"`.
///
/// # Safety
/// `base` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dpc_shape_new(
    theta: f64,
    base: *const c_char,
    out: *mut *mut DpcShape,
) -> DpcStatus {
    guard(|| {
        let h: BaseMeasure = str_arg(base, "base")?.parse()?;
        let shape = ShapeMeasure::new(theta, h)?;
        write(out, Box::into_raw(Box::new(DpcShape(shape))), "out")
    })
}

/// # Safety
/// `shape` must come from [`dpc_shape_new`] and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn dpc_shape_free(shape: *mut DpcShape) {
    if !shape.is_null() {
        drop(Box::from_raw(shape));
    }
}

/// Builds a functional from an expression such as `"id"` or `"indicator(0.5,1.5)"`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dpc_functional_new(spec: *const c_char, out: *mut *mut DpcFunctional) -> DpcStatus {
    guard(|| {
        let g: Functional = str_arg(spec, "spec")?.parse()?;
        write(out, Box::into_raw(Box::new(DpcFunctional(g))), "out")
    })
}

/// # Safety
/// `g` must come from [`dpc_functional_new`] and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn dpc_functional_free(g: *mut DpcFunctional) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// `ψ(z) = θ E_H[log(1 + z g)]`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dpc_psi(
    shape: *const DpcShape,
    g: *const DpcFunctional,
    z: f64,
    out: *mut f64,
) -> DpcStatus {
    guard(|| {
        let v = psi(&handle(shape, "shape")?.0, &handle(g, "g")?.0, z)?;
        write(out, v, "out")
    })
}

/// Gamma-process Laplace functional `exp(-ψ(z))`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dpc_laplace_gamma(
    shape: *const DpcShape,
    g: *const DpcFunctional,
    z: f64,
    out: *mut f64,
) -> DpcStatus {
    guard(|| {
        let v = laplace_gamma(&handle(shape, "shape")?.0, &handle(g, "g")?.0, z)?;
        write(out, v, "out")
    })
}

/// Order-`q` transform `E[(1 + zP(g))^{-q}]` by the Beta(q, θ-q) mixture; needs `θ ≥ q`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dpc_cs_eq15(
    shape: *const DpcShape,
    g: *const DpcFunctional,
    z: f64,
    q: f64,
    quad_order: usize,
    out: *mut f64,
) -> DpcStatus {
    guard(|| {
        let v = cs_eq15(&handle(shape, "shape")?.0, &handle(g, "g")?.0, z, q, quad_order)?;
        write(out, v, "out")
    })
}

/// Order-one transform `E[(1 + zP(g))^{-1}]` for any `θ > 0`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dpc_cs_eq17(
    shape: *const DpcShape,
    g: *const DpcFunctional,
    z: f64,
    quad_order: usize,
    out: *mut f64,
) -> DpcStatus {
    guard(|| {
        let v = cs_eq17(&handle(shape, "shape")?.0, &handle(g, "g")?.0, z, quad_order)?;
        write(out, v, "out")
    })
}

/// Order-`q` transform by the exact depth-`n` partition expansion; needs
/// `θ + n - q > 0` and a base measure without atoms.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dpc_cs_partition_expansion(
    shape: *const DpcShape,
    g: *const DpcFunctional,
    z: f64,
    q: f64,
    n: usize,
    quad_order: usize,
    out: *mut f64,
) -> DpcStatus {
    guard(|| {
        let est = cs_partition_expansion(
            &handle(shape, "shape")?.0,
            &handle(g, "g")?.0,
            z,
            q,
            n,
            &ExpansionMode::Exact,
            quad_order,
        )?;
        write(out, est.mean, "out")
    })
}

/// Monte Carlo `E[(1 + zP(g))^{-q}]` over `n_samples` stick-breaking draws.
///
/// # Safety
/// Handles must be live; `mean` and `std_error` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn dpc_cs_transform_mc(
    shape: *const DpcShape,
    g: *const DpcFunctional,
    z: f64,
    q: f64,
    n_samples: usize,
    eps: f64,
    seed: u64,
    mean: *mut f64,
    std_error: *mut f64,
) -> DpcStatus {
    guard(|| {
        let stream = RngStream::new(seed);
        let est = cs_transform_mc(
            &handle(shape, "shape")?.0,
            &handle(g, "g")?.0,
            z,
            q,
            n_samples,
            eps,
            &stream,
        )?;
        write(mean, est.mean, "mean")?;
        write(std_error, est.std_error, "std_error")
    })
}

/// Monte Carlo `E[exp(-z μ(g))]` for the Beta-Gamma process `(θH, d)`.
///
/// # Safety
/// Handles must be live; `mean` and `std_error` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn dpc_bg_laplace_mc(
    shape: *const DpcShape,
    d: f64,
    g: *const DpcFunctional,
    z: f64,
    n_samples: usize,
    eps: f64,
    seed: u64,
    mean: *mut f64,
    std_error: *mut f64,
) -> DpcStatus {
    guard(|| {
        let stream = RngStream::new(seed);
        let est = bg_laplace_mc(
            &handle(shape, "shape")?.0,
            d,
            &handle(g, "g")?.0,
            z,
            n_samples,
            eps,
            &stream,
        )?;
        write(mean, est.mean, "mean")?;
        write(std_error, est.std_error, "std_error")
    })
}

/// Fills `out[0..n]` with independent draws of the functional of `process`.
/// `d` is used only for [`DpcProcess::BetaGamma`].
///
/// # Safety
/// Handles must be live; `out` must have room for `n` doubles.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn dpc_sample_functional(
    shape: *const DpcShape,
    g: *const DpcFunctional,
    process: DpcProcess,
    d: f64,
    eps: f64,
    seed: u64,
    n: usize,
    out: *mut f64,
) -> DpcStatus {
    guard(|| {
        let shape = &handle(shape, "shape")?.0;
        let g = &handle(g, "g")?.0;
        if out.is_null() && n > 0 {
            return Err(null("out"));
        }
        let stream = RngStream::new(seed);
        let xs = match process {
            DpcProcess::Dirichlet => {
                let s = DirichletSampler::new(shape, eps)?;
                mc::draws(n, &stream, |rng| s.functional(rng, g))
            }
            DpcProcess::Gamma | DpcProcess::BetaGamma => {
                let d = if process == DpcProcess::Gamma { 0.0 } else { d };
                let s = BetaGammaSampler::new(shape, d, eps)?;
                mc::draws(n, &stream, |rng| s.functional(rng, g))
            }
        };
        if n > 0 {
            std::slice::from_raw_parts_mut(out, n).copy_from_slice(&xs);
        }
        Ok(())
    })
}

/// Parses and runs a TOML config. On success `*reports` holds one JSON
/// record per line and `*all_pass` tells whether every check passed.
///
/// # Safety
/// `config` must be a NUL-terminated string; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn dpc_run_config(
    config: *const c_char,
    reports: *mut *mut c_char,
    all_pass: *mut bool,
) -> DpcStatus {
    guard(|| {
        if reports.is_null() {
            return Err(null("reports"));
        }
        if all_pass.is_null() {
            return Err(null("all_pass"));
        }
        let cfg = parse_config(str_arg(config, "config")?)?;
        let mut buf = Vec::new();
        let pass = run(&cfg, &mut buf, false)?;
        let text = String::from_utf8(buf).expect("reports are JSON text");
        write(reports, owned_string(text), "reports")?;
        write(all_pass, pass, "all_pass")
    })
}

/// One `name  summary` line per registered check.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dpc_list_checks(out: *mut *mut c_char) -> DpcStatus {
    guard(|| write(out, owned_string(list_checks()), "out"))
}

/// # Safety
/// `s` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn dpc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
