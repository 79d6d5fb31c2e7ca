//! C ABI over `cbo-core`.
//!
//! Every fallible function returns a [`CboStatus`] and writes results through
//! out-pointers. On failure, [`cbo_last_error_message`] describes the error
//! for the calling thread. Objects are opaque handles released with their
//! matching `_free` function; handles may be shared between threads for
//! concurrent read-only use.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use cbo_core::analysis::{self, CalyxCertificate, SweepReport};
use cbo_core::dynamics::{Integrator, SimOutcome, StopReason};
use cbo_core::objective::{table_objective, table_objective_from_csv};
use cbo_core::{Error, Objective, SimConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CboStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    HypothesisViolated = 3,
    NumericalFailure = 4,
    Io = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CboIntegrator {
    Euler = 0,
    Rk4 = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CboStopReason {
    #[default]
    GapConverged = 0,
    TMaxReached = 1,
}

/// Integration settings; positions are passed separately.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CboSimConfig {
    pub lambda: f64,
    pub alpha: f64,
    pub integrator: CboIntegrator,
    pub dt: f64,
    pub gap_tol: f64,
    pub t_max: f64,
    pub sample_stride: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CboOutcome {
    pub x_inf_estimate: f64,
    pub final_gap: f64,
    pub stop_reason: CboStopReason,
    pub has_error_to_minimizer: bool,
    pub error_to_minimizer: f64,
    pub t_final: f64,
    pub steps: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CboCertificate {
    pub x_star: f64,
    pub domain_lo: f64,
    pub domain_hi: f64,
    pub r1: f64,
    pub c1: f64,
    pub big_c1: f64,
    pub f_star: f64,
    pub f1: f64,
    pub delta: f64,
    pub r2: f64,
    pub c2: f64,
    pub alpha0: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CboSweepRow {
    pub param: f64,
    pub x_inf: f64,
    pub abs_error: f64,
    pub has_bound_lower: bool,
    pub bound_lower: f64,
    pub has_bound_upper: bool,
    pub bound_upper: f64,
    pub has_oracle: bool,
    pub oracle: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CboInvariantCheck {
    /// Static, NUL-terminated; never freed by the caller.
    pub name: *const c_char,
    pub passed: bool,
    pub worst_residual: f64,
    pub threshold: f64,
}

/// Number of checks written by [`cbo_verify`].
pub const CBO_INVARIANT_COUNT: usize = 5;

/// Opaque objective handle.
pub struct CboObjective {
    inner: Objective,
}

/// Opaque sweep result handle.
pub struct CboSweepReport {
    inner: SweepReport,
}

/// Callback for custom objectives. Must be safe to call from several threads.
pub type CboObjectiveFn = Option<unsafe extern "C" fn(x: f64, user_data: *mut c_void) -> f64>;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(CboStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::HypothesisViolated(_) => CboStatus::HypothesisViolated,
            Error::NonFiniteObjective { .. }
            | Error::NonFinitePosition { .. }
            | Error::DomainExcursion { .. }
            | Error::InvariantViolation { .. } => CboStatus::NumericalFailure,
            Error::Io(_) | Error::Csv(_) => CboStatus::Io,
            _ => CboStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(CboStatus::NullPointer, format!("`{what}` is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(CboStatus::InvalidArgument, msg.into())
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, records any failure for the current thread and converts panics.
fn call(f: impl FnOnce() -> Result<(), Failure>) -> CboStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CboStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            CboStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn in_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn in_slice<'a, T>(p: *const T, n: usize, what: &str) -> Result<&'a [T], Failure> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, n))
}

unsafe fn in_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("`{what}` is not valid UTF-8")))
}

fn boxed<T>(out: &mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

// ---------------------------------------------------------------- errors

/// Message for the last failed call on this thread, or NULL after a success.
/// Valid until the next `cbo_*` call on the same thread.
#[no_mangle]
pub extern "C" fn cbo_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn cbo_status_string(status: CboStatus) -> *const c_char {
    let s: &'static CStr = match status {
        CboStatus::Ok => c"ok",
        CboStatus::NullPointer => c"null pointer",
        CboStatus::InvalidArgument => c"invalid argument",
        CboStatus::HypothesisViolated => c"hypothesis violated",
        CboStatus::NumericalFailure => c"numerical failure",
        CboStatus::Io => c"i/o error",
        CboStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

#[no_mangle]
pub extern "C" fn cbo_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ---------------------------------------------------------------- objectives

/// Creates a catalogue objective. `params` may be NULL when `n_params` is 0.
///
/// # Safety
/// `name` must be a NUL-terminated string; `params` must point to `n_params`
/// doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_objective_builtin(
    name: *const c_char,
    params: *const f64,
    n_params: usize,
    out: *mut *mut CboObjective,
) -> CboStatus {
    call(|| {
        let out = out_ref(out, "out")?;
        let name = in_str(name, "name")?;
        let params = in_slice(params, n_params, "params")?;
        let inner = cbo_core::builtin_objective(name, params)?;
        boxed(out, CboObjective { inner });
        Ok(())
    })
}

/// Piecewise-linear objective through `(xs[i], fs[i])`.
///
/// # Safety
/// `xs` and `fs` must each point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_objective_table(
    xs: *const f64,
    fs: *const f64,
    n: usize,
    out: *mut *mut CboObjective,
) -> CboStatus {
    call(|| {
        let out = out_ref(out, "out")?;
        let xs = in_slice(xs, n, "xs")?;
        let fs = in_slice(fs, n, "fs")?;
        let inner = table_objective(xs.iter().copied().zip(fs.iter().copied()).collect())?;
        boxed(out, CboObjective { inner });
        Ok(())
    })
}

/// Piecewise-linear objective read from a two-column `x,f` CSV file.
///
/// # Safety
/// `path` must be a NUL-terminated UTF-8 string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_objective_table_csv(path: *const c_char, out: *mut *mut CboObjective) -> CboStatus {
    call(|| {
        let out = out_ref(out, "out")?;
        let inner = table_objective_from_csv(in_str(path, "path")?)?;
        boxed(out, CboObjective { inner });
        Ok(())
    })
}

struct Callback {
    f: unsafe extern "C" fn(f64, *mut c_void) -> f64,
    user_data: *mut c_void,
}

// SAFETY: the caller promises the callback and its user data are thread-safe.
unsafe impl Send for Callback {}
unsafe impl Sync for Callback {}

/// Objective on `[lo, hi]` evaluated through a C callback.
///
/// # Safety
/// `f` must be callable with `user_data` from any thread for as long as the
/// returned handle (or anything derived from it) is alive, and must not unwind.
#[no_mangle]
pub unsafe extern "C" fn cbo_objective_custom(
    lo: f64,
    hi: f64,
    f: CboObjectiveFn,
    user_data: *mut c_void,
    out: *mut *mut CboObjective,
) -> CboStatus {
    call(|| {
        let out = out_ref(out, "out")?;
        let f = f.ok_or_else(|| null("f"))?;
        let cb = Callback { f, user_data };
        let inner = Objective::new(lo, hi, move |x| {
            let cb = &cb;
            // SAFETY: upheld by the caller of cbo_objective_custom
            unsafe { (cb.f)(x, cb.user_data) }
        })?;
        boxed(out, CboObjective { inner });
        Ok(())
    })
}

/// Declares the global minimizer of an objective.
///
/// # Safety
/// `obj` must be a live handle not used concurrently by another thread.
#[no_mangle]
pub unsafe extern "C" fn cbo_objective_set_minimizer(obj: *mut CboObjective, x_star: f64) -> CboStatus {
    call(|| {
        let obj = out_ref(obj, "obj")?;
        obj.inner = obj.inner.clone().with_minimizer(x_star)?;
        Ok(())
    })
}

/// Declares a Lipschitz constant, used as a safety margin by certificates.
///
/// # Safety
/// `obj` must be a live handle not used concurrently by another thread.
#[no_mangle]
pub unsafe extern "C" fn cbo_objective_set_lipschitz(obj: *mut CboObjective, lipschitz: f64) -> CboStatus {
    call(|| {
        let obj = out_ref(obj, "obj")?;
        obj.inner = obj.inner.clone().with_lipschitz(lipschitz)?;
        Ok(())
    })
}

/// # Safety
/// `obj` must be NULL or a handle from a `cbo_objective_*` constructor, freed once.
#[no_mangle]
pub unsafe extern "C" fn cbo_objective_free(obj: *mut CboObjective) {
    if !obj.is_null() {
        drop(Box::from_raw(obj));
    }
}

/// # Safety
/// `obj` must be a live handle; `lo` and `hi` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_objective_domain(obj: *const CboObjective, lo: *mut f64, hi: *mut f64) -> CboStatus {
    call(|| {
        let obj = in_ref(obj, "obj")?;
        let (a, b) = obj.inner.domain();
        *out_ref(lo, "lo")? = a;
        *out_ref(hi, "hi")? = b;
        Ok(())
    })
}

/// Writes the known minimizer, or sets `*known = false` when there is none.
///
/// # Safety
/// `obj` must be a live handle; `known` and `x_star` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_objective_minimizer(
    obj: *const CboObjective,
    known: *mut bool,
    x_star: *mut f64,
) -> CboStatus {
    call(|| {
        let obj = in_ref(obj, "obj")?;
        let known = out_ref(known, "known")?;
        let x_star = out_ref(x_star, "x_star")?;
        *known = obj.inner.known_minimizer().is_some();
        *x_star = obj.inner.known_minimizer().unwrap_or(f64::NAN);
        Ok(())
    })
}

/// # Safety
/// `obj` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_objective_eval(obj: *const CboObjective, x: f64, out: *mut f64) -> CboStatus {
    call(|| {
        let obj = in_ref(obj, "obj")?;
        let out = out_ref(out, "out")?;
        if !obj.inner.contains(x) {
            let (lo, hi) = obj.inner.domain();
            return Err(Error::OutsideDomain { x, lo, hi }.into());
        }
        *out = obj.inner.eval(x)?;
        Ok(())
    })
}

// ---------------------------------------------------------------- weights

/// Softmax weights of `-alpha f` at `positions`, written to `psi_out[0..n]`.
///
/// # Safety
/// `positions` and `psi_out` must each point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn cbo_weights(
    obj: *const CboObjective,
    alpha: f64,
    positions: *const f64,
    n: usize,
    psi_out: *mut f64,
) -> CboStatus {
    call(|| {
        let obj = in_ref(obj, "obj")?;
        let xs = in_slice(positions, n, "positions")?;
        let w = cbo_core::weights(&obj.inner, alpha, xs)?;
        if psi_out.is_null() {
            return Err(null("psi_out"));
        }
        slice::from_raw_parts_mut(psi_out, n).copy_from_slice(w.as_slice());
        Ok(())
    })
}

/// `sum psi_i x_i`, clamped to the hull of the positions.
///
/// # Safety
/// `positions` and `psi` must each point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_consensus_point(
    positions: *const f64,
    psi: *const f64,
    n: usize,
    out: *mut f64,
) -> CboStatus {
    call(|| {
        let out = out_ref(out, "out")?;
        let xs = in_slice(positions, n, "positions")?;
        let w = cbo_core::WeightVector::new(in_slice(psi, n, "psi")?.to_vec())?;
        *out = cbo_core::consensus_point(xs, &w)?;
        Ok(())
    })
}

// ---------------------------------------------------------------- dynamics

/// Defaults for the given rates: RK4, `dt = 1e-3 / lambda`, `gap_tol = 1e-10`,
/// `t_max = 200 / lambda`, stride 1.
#[no_mangle]
pub extern "C" fn cbo_sim_config_default(lambda: f64, alpha: f64) -> CboSimConfig {
    let c = SimConfig::new(lambda, alpha, Vec::new());
    CboSimConfig {
        lambda: c.lambda,
        alpha: c.alpha,
        integrator: CboIntegrator::Rk4,
        dt: c.dt,
        gap_tol: c.gap_tol,
        t_max: c.t_max,
        sample_stride: c.sample_stride,
    }
}

fn sim_config(c: &CboSimConfig, positions: &[f64]) -> SimConfig {
    SimConfig {
        lambda: c.lambda,
        alpha: c.alpha,
        initial_positions: positions.to_vec(),
        integrator: match c.integrator {
            CboIntegrator::Euler => Integrator::Euler,
            CboIntegrator::Rk4 => Integrator::Rk4,
        },
        dt: c.dt,
        gap_tol: c.gap_tol,
        t_max: c.t_max,
        sample_stride: c.sample_stride,
        record_trajectory: false,
    }
}

fn outcome(o: &SimOutcome) -> CboOutcome {
    CboOutcome {
        x_inf_estimate: o.x_inf_estimate,
        final_gap: o.final_gap,
        stop_reason: match o.stop_reason {
            StopReason::GapConverged => CboStopReason::GapConverged,
            StopReason::TMaxReached => CboStopReason::TMaxReached,
        },
        has_error_to_minimizer: o.error_to_minimizer.is_some(),
        error_to_minimizer: o.error_to_minimizer.unwrap_or(f64::NAN),
        t_final: o.t_final,
        steps: o.steps as u64,
    }
}

/// Integrates the particle system until the gap falls below `gap_tol` or
/// `t_max` is reached. Reaching `t_max` is reported in `stop_reason`, not as
/// an error.
///
/// # Safety
/// `config` must be readable, `positions` must point to `n` doubles and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_simulate(
    obj: *const CboObjective,
    config: *const CboSimConfig,
    positions: *const f64,
    n: usize,
    out: *mut CboOutcome,
) -> CboStatus {
    call(|| {
        let obj = in_ref(obj, "obj")?;
        let cfg = sim_config(in_ref(config, "config")?, in_slice(positions, n, "positions")?);
        let out = out_ref(out, "out")?;
        *out = outcome(&cbo_core::simulate(&obj.inner, &cfg)?);
        Ok(())
    })
}

/// Two-particle limit through the gap variable; `positions` holds two values.
///
/// # Safety
/// `config` must be readable, `positions` must point to 2 doubles and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_reduced_two_particle(
    obj: *const CboObjective,
    config: *const CboSimConfig,
    positions: *const f64,
    out: *mut CboOutcome,
) -> CboStatus {
    call(|| {
        let obj = in_ref(obj, "obj")?;
        let cfg = sim_config(in_ref(config, "config")?, in_slice(positions, 2, "positions")?);
        let out = out_ref(out, "out")?;
        *out = outcome(&cbo_core::reduced_two_particle(&obj.inner, &cfg)?);
        Ok(())
    })
}

// ---------------------------------------------------------------- analysis

fn to_c(c: &CalyxCertificate) -> CboCertificate {
    CboCertificate {
        x_star: c.x_star,
        domain_lo: c.domain.0,
        domain_hi: c.domain.1,
        r1: c.r1,
        c1: c.c1,
        big_c1: c.big_c1,
        f_star: c.f_star,
        f1: c.f1,
        delta: c.delta,
        r2: c.r2,
        c2: c.c2,
        alpha0: c.alpha0,
    }
}

fn from_c(c: &CboCertificate) -> CalyxCertificate {
    CalyxCertificate {
        x_star: c.x_star,
        domain: (c.domain_lo, c.domain_hi),
        r1: c.r1,
        c1: c.c1,
        big_c1: c.big_c1,
        f_star: c.f_star,
        f1: c.f1,
        delta: c.delta,
        r2: c.r2,
        c2: c.c2,
        alpha0: c.alpha0,
    }
}

/// Calyx certificate on a grid of `grid_n` points. Returns
/// `HypothesisViolated` when the curvature at the minimizer vanishes or the
/// minimizer is not isolated on the grid.
///
/// # Safety
/// `obj` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_certify(obj: *const CboObjective, grid_n: usize, out: *mut CboCertificate) -> CboStatus {
    call(|| {
        let obj = in_ref(obj, "obj")?;
        let out = out_ref(out, "out")?;
        *out = to_c(&analysis::certify_calyx(&obj.inner, grid_n)?);
        Ok(())
    })
}

/// `B(alpha) = ln 2 / (alpha c2) + sqrt(ln 2 / (alpha c1))`; `InvalidArgument`
/// when `alpha <= alpha0`.
///
/// # Safety
/// `cert` must be readable; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_certificate_bound(cert: *const CboCertificate, alpha: f64, out: *mut f64) -> CboStatus {
    call(|| {
        let cert = from_c(in_ref(cert, "cert")?);
        let out = out_ref(out, "out")?;
        *out = cert
            .bound(alpha)
            .ok_or_else(|| invalid(format!("alpha = {alpha} is not above alpha0 = {}", cert.alpha0)))?;
        Ok(())
    })
}

/// Exact error for `f(x) = x` with two particles `width` apart.
#[no_mangle]
pub extern "C" fn cbo_oracle_linear_error(alpha: f64, width: f64) -> f64 {
    analysis::oracle_linear_error(alpha, width)
}

/// Exact error for `f(x) = x` with `j` of `n` particles on the minimizer.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_oracle_nparticle_linear_error(
    alpha: f64,
    n: usize,
    j: usize,
    width: f64,
    out: *mut f64,
) -> CboStatus {
    call(|| {
        let out = out_ref(out, "out")?;
        if j == 0 || j >= n {
            return Err(invalid(format!("need 1 <= j < n, got j = {j}, n = {n}")));
        }
        *out = analysis::oracle_nparticle_linear_error(alpha, n, j, width);
        Ok(())
    })
}

/// Two-sided bound for `f(x) = x^2` on `[0, b]` with particles at `0` and `b`.
///
/// # Safety
/// `lower` and `upper` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_oracle_quadratic_bounds(alpha: f64, b: f64, lower: *mut f64, upper: *mut f64) -> CboStatus {
    call(|| {
        let q = analysis::oracle_quadratic_bounds(alpha, b);
        *out_ref(lower, "lower")? = q.lower;
        *out_ref(upper, "upper")? = q.upper;
        Ok(())
    })
}

// ---------------------------------------------------------------- sweeps

/// Error against each alpha in `alphas` (strictly increasing).
///
/// # Safety
/// `config` must be readable, `positions` must point to `n` doubles,
/// `alphas` to `n_alphas` doubles, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_sweep_alpha(
    obj: *const CboObjective,
    config: *const CboSimConfig,
    positions: *const f64,
    n: usize,
    alphas: *const f64,
    n_alphas: usize,
    out: *mut *mut CboSweepReport,
) -> CboStatus {
    call(|| {
        let obj = in_ref(obj, "obj")?;
        let cfg = sim_config(in_ref(config, "config")?, in_slice(positions, n, "positions")?);
        let alphas = in_slice(alphas, n_alphas, "alphas")?;
        let out = out_ref(out, "out")?;
        let inner = analysis::sweep_alpha(&obj.inner, &cfg, alphas)?;
        boxed(out, CboSweepReport { inner });
        Ok(())
    })
}

/// Linear objective on `[0, width]` with `j` particles at 0, for each count in `ns`.
///
/// # Safety
/// `config` must be readable, `ns` must point to `n_ns` values and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_sweep_n(
    alpha: f64,
    width: f64,
    ns: *const usize,
    n_ns: usize,
    j: usize,
    config: *const CboSimConfig,
    out: *mut *mut CboSweepReport,
) -> CboStatus {
    call(|| {
        let cfg = sim_config(in_ref(config, "config")?, &[0.0, width]);
        let ns = in_slice(ns, n_ns, "ns")?;
        let out = out_ref(out, "out")?;
        let inner = analysis::sweep_n(alpha, width, ns, j, &cfg)?;
        boxed(out, CboSweepReport { inner });
        Ok(())
    })
}

/// Number of rows; 0 for a NULL handle.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cbo_sweep_report_len(report: *const CboSweepReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.rows.len())
}

/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_sweep_report_row(
    report: *const CboSweepReport,
    index: usize,
    out: *mut CboSweepRow,
) -> CboStatus {
    call(|| {
        let rows = &in_ref(report, "report")?.inner.rows;
        let out = out_ref(out, "out")?;
        let r = rows
            .get(index)
            .ok_or_else(|| invalid(format!("row {index} out of range (len {})", rows.len())))?;
        *out = CboSweepRow {
            param: r.param,
            x_inf: r.x_inf,
            abs_error: r.abs_error,
            has_bound_lower: r.bound_lower.is_some(),
            bound_lower: r.bound_lower.unwrap_or(f64::NAN),
            has_bound_upper: r.bound_upper.is_some(),
            bound_upper: r.bound_upper.unwrap_or(f64::NAN),
            has_oracle: r.oracle.is_some(),
            oracle: r.oracle.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// Fitted slope and its standard error; `*defined = false` when fewer than
/// two rows lie above the noise floor.
///
/// # Safety
/// `report` must be a live handle; the out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_sweep_report_slope(
    report: *const CboSweepReport,
    defined: *mut bool,
    slope: *mut f64,
    stderr: *mut f64,
) -> CboStatus {
    call(|| {
        let r = &in_ref(report, "report")?.inner;
        *out_ref(defined, "defined")? = r.fitted_slope.is_some();
        *out_ref(slope, "slope")? = r.fitted_slope.unwrap_or(f64::NAN);
        *out_ref(stderr, "stderr")? = r.slope_stderr.unwrap_or(f64::NAN);
        Ok(())
    })
}

/// # Safety
/// `report` must be NULL or a handle from a sweep function, freed once.
#[no_mangle]
pub unsafe extern "C" fn cbo_sweep_report_free(report: *mut CboSweepReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

// ---------------------------------------------------------------- verification

fn static_name(name: &str) -> *const c_char {
    let s: &'static CStr = match name {
        "gap_decay" => c"gap_decay",
        "order_preservation" => c"order_preservation",
        "hull_containment" => c"hull_containment",
        "average_bound" => c"average_bound",
        "uniform_boundedness" => c"uniform_boundedness",
        _ => c"unknown",
    };
    s.as_ptr()
}

/// Runs the invariant checks and writes `CBO_INVARIANT_COUNT` entries to
/// `checks`. Failed checks are reported through `passed`, not the status.
///
/// # Safety
/// `config` must be readable, `positions` must point to `n` doubles,
/// `checks` must have room for `CBO_INVARIANT_COUNT` entries and
/// `all_passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_verify(
    obj: *const CboObjective,
    config: *const CboSimConfig,
    positions: *const f64,
    n: usize,
    checks: *mut CboInvariantCheck,
    all_passed: *mut bool,
) -> CboStatus {
    call(|| {
        let obj = in_ref(obj, "obj")?;
        let cfg = sim_config(in_ref(config, "config")?, in_slice(positions, n, "positions")?);
        let all = out_ref(all_passed, "all_passed")?;
        if checks.is_null() {
            return Err(null("checks"));
        }
        let rep = analysis::verify_invariants(&obj.inner, &cfg)?;
        let dst = slice::from_raw_parts_mut(checks, CBO_INVARIANT_COUNT);
        for (d, c) in dst.iter_mut().zip(&rep.checks) {
            *d = CboInvariantCheck {
                name: static_name(c.name),
                passed: c.passed,
                worst_residual: c.worst_residual,
                threshold: c.threshold,
            };
        }
        *all = rep.all_passed();
        Ok(())
    })
}
