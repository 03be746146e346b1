//! C ABI for the `kappa` library.
//!
//! Every function returns a [`KappaStatus`]; on failure the message is
//! available from [`kappa_last_error_message`] on the same thread. Handles
//! are opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kappa::casestudy::{load_problem, IntegralProblem, NamedProblem};
use kappa::cones::{AbsIntegralMode, ConeSpec, IndexChecker};
use kappa::greenop::{kernel_abs_integral, QuadConfig};
use kappa::solver::{picard_solve, SolveConfig, SolveResult};
use kappa::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KappaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnknownProblem = 3,
    NoConvergence = 4,
    Numerical = 5,
    Io = 6,
    Panic = 7,
}

impl From<&Error> for KappaStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::UnknownProblem { .. } => KappaStatus::UnknownProblem,
            Error::MaxIterations { .. } => KappaStatus::NoConvergence,
            Error::InvalidArgument(_) | Error::Json(_) | Error::InconsistentChain(_) | Error::GridTooCoarse { .. } => {
                KappaStatus::InvalidArgument
            }
            Error::Io(_) | Error::Csv(_) => KappaStatus::Io,
            _ => KappaStatus::Numerical,
        }
    }
}

/// An integral problem.
pub struct KappaProblem(IntegralProblem);

/// A converged Picard solution.
pub struct KappaSolution(SolveResult);

/// Solver settings; `rho <= 0` disables the ball monitor.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct KappaSolveConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub step_x: f64,
    pub step_y: f64,
    pub truncation: f64,
    pub rho: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn guard(f: impl FnOnce() -> Result<(), KappaStatus>) -> KappaStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KappaStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside kappa");
            KappaStatus::Panic
        }
    }
}

fn fail(e: Error) -> KappaStatus {
    let s = KappaStatus::from(&e);
    set_error(e.to_string());
    s
}

fn null(what: &str) -> KappaStatus {
    set_error(format!("{what} is null"));
    KappaStatus::NullPointer
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, KappaStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        KappaStatus::InvalidArgument
    })
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library.
#[no_mangle]
pub extern "C" fn kappa_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn kappa_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn kappa_solve_config_default() -> KappaSolveConfig {
    let d = SolveConfig::default();
    KappaSolveConfig {
        tol: d.tol,
        max_iter: d.max_iter,
        step_x: d.steps[0],
        step_y: d.steps[1],
        truncation: d.truncation,
        rho: d.rho_ball.unwrap_or(0.0),
    }
}

/// Loads a named integral problem such as `"hyperbolic-erf"`.
///
/// # Safety
/// `id` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kappa_problem_load(id: *const c_char, out: *mut *mut KappaProblem) -> KappaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let id = read_str(id, "id")?;
        match load_problem(id).map_err(fail)? {
            NamedProblem::Integral(p) => {
                *out = Box::into_raw(Box::new(KappaProblem(p)));
                Ok(())
            }
            _ => {
                set_error(format!("'{id}' is a demo, not an integral problem"));
                Err(KappaStatus::InvalidArgument)
            }
        }
    })
}

/// Parses a problem from its JSON definition.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kappa_problem_from_json(json: *const c_char, out: *mut *mut KappaProblem) -> KappaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = IntegralProblem::from_json(read_str(json, "json")?).map_err(fail)?;
        *out = Box::into_raw(Box::new(KappaProblem(p)));
        Ok(())
    })
}

/// # Safety
/// `problem` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn kappa_problem_free(problem: *mut KappaProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// `∫|G(t,s)| ds` at the point `t` of length `dim`.
///
/// # Safety
/// Pointers must be valid; `t` must hold `dim` values.
#[no_mangle]
pub unsafe extern "C" fn kappa_kernel_abs_integral(
    problem: *const KappaProblem,
    t: *const f64,
    dim: usize,
    out: *mut f64,
) -> KappaStatus {
    guard(|| {
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        if t.is_null() {
            return Err(null("t"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let kernel = p.0.kernel().map_err(fail)?;
        if dim != kernel.dim() {
            set_error(format!("point has {dim} coordinates, kernel has {}", kernel.dim()));
            return Err(KappaStatus::InvalidArgument);
        }
        let t = std::slice::from_raw_parts(t, dim);
        *out = kernel_abs_integral(&kernel, t, &QuadConfig::default()).map_err(fail)?;
        Ok(())
    })
}

fn steps_for(p: &IntegralProblem, x: f64, y: f64) -> Vec<f64> {
    let mut s = vec![x; p.domain.len()];
    if let Some(slot) = s.get_mut(1) {
        *slot = y;
    }
    s
}

/// Index-one condition at `rho` on the grid with the given steps.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn kappa_index_one(
    problem: *const KappaProblem,
    rho: f64,
    step_x: f64,
    step_y: f64,
    out_lhs: *mut f64,
    out_holds: *mut bool,
) -> KappaStatus {
    guard(|| {
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        if out_lhs.is_null() || out_holds.is_null() {
            return Err(null("output"));
        }
        let spec = ConeSpec::default();
        let grid = p.0.grid(&steps_for(&p.0, step_x, step_y)).map_err(fail)?;
        let checker = IndexChecker::new(
            &p.0.kernel().map_err(fail)?,
            &p.0.nonlinearity,
            &spec,
            &grid,
            AbsIntegralMode::ClosedForm,
            &QuadConfig::default(),
        )
        .map_err(fail)?;
        let c = checker.index_one(rho).map_err(fail)?;
        *out_lhs = c.lhs;
        *out_holds = c.holds;
        Ok(())
    })
}

/// Solves by Picard iteration from zero.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn kappa_solve(
    problem: *const KappaProblem,
    config: *const KappaSolveConfig,
    out: *mut *mut KappaSolution,
) -> KappaStatus {
    guard(|| {
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        let c = config.as_ref().ok_or_else(|| null("config"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = SolveConfig {
            tol: c.tol,
            max_iter: c.max_iter,
            steps: steps_for(&p.0, c.step_x, c.step_y),
            truncation: c.truncation,
            rho_ball: (c.rho > 0.0).then_some(c.rho),
            ..SolveConfig::default()
        };
        let r = picard_solve(&p.0, &cfg).map_err(fail)?;
        *out = Box::into_raw(Box::new(KappaSolution(r)));
        Ok(())
    })
}

/// # Safety
/// `solution` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn kappa_solution_free(solution: *mut KappaSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Number of Picard steps, or 0 for a null handle.
///
/// # Safety
/// `solution` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn kappa_solution_iterations(solution: *const KappaSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.0.iterations)
}

/// `sup |u|`, or NaN for a null handle.
///
/// # Safety
/// `solution` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn kappa_solution_beta(solution: *const KappaSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| s.0.beta)
}

/// PDE residual, or NaN when unavailable.
///
/// # Safety
/// `solution` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn kappa_solution_residual(solution: *const KappaSolution) -> f64 {
    solution.as_ref().and_then(|s| s.0.residual_sup).unwrap_or(f64::NAN)
}

/// Number of grid nodes.
///
/// # Safety
/// `solution` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn kappa_solution_len(solution: *const KappaSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.0.solution.samples().len())
}

/// Copies the nodal values (row-major, last axis fastest) into `buf`.
///
/// # Safety
/// `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn kappa_solution_samples(
    solution: *const KappaSolution,
    buf: *mut f64,
    len: usize,
) -> KappaStatus {
    guard(|| {
        let s = solution.as_ref().ok_or_else(|| null("solution"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let v = s.0.solution.samples();
        if len < v.len() {
            set_error(format!("buffer holds {len} values, {} needed", v.len()));
            return Err(KappaStatus::InvalidArgument);
        }
        ptr::copy_nonoverlapping(v.as_ptr(), buf, v.len());
        Ok(())
    })
}

/// Number of points in the profile at infinity.
///
/// # Safety
/// `solution` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn kappa_solution_profile_len(solution: *const KappaSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.0.asymptotic_profile.len())
}

/// Copies the first transverse coordinate and the limit value of each
/// profile point.
///
/// # Safety
/// `coord` and `value` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn kappa_solution_profile(
    solution: *const KappaSolution,
    coord: *mut f64,
    value: *mut f64,
    len: usize,
) -> KappaStatus {
    guard(|| {
        let s = solution.as_ref().ok_or_else(|| null("solution"))?;
        if coord.is_null() || value.is_null() {
            return Err(null("buffer"));
        }
        let prof = &s.0.asymptotic_profile;
        if len < prof.len() {
            set_error(format!("buffers hold {len} values, {} needed", prof.len()));
            return Err(KappaStatus::InvalidArgument);
        }
        for (k, p) in prof.iter().enumerate() {
            *coord.add(k) = p.transverse.first().copied().unwrap_or(f64::NAN);
            *value.add(k) = p.value().unwrap_or(f64::NAN);
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping() {
        let e = Error::UnknownProblem {
            id: "x".into(),
            available: vec![],
        };
        assert_eq!(KappaStatus::from(&e), KappaStatus::UnknownProblem);
        let e = Error::MaxIterations {
            iterations: 1,
            last_gap: 1.0,
            gap_history: vec![1.0],
        };
        assert_eq!(KappaStatus::from(&e), KappaStatus::NoConvergence);
    }

    #[test]
    fn panics_are_caught() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, KappaStatus::Panic);
        assert!(!kappa_last_error_message().is_null());
    }
}
