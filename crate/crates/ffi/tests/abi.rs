use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use kappa_ffi::*;

fn last_error() -> String {
    let p = kappa_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn load(id: &str) -> *mut KappaProblem {
    let id = CString::new(id).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { kappa_problem_load(id.as_ptr(), &mut p) }, KappaStatus::Ok);
    assert!(!p.is_null());
    p
}

#[test]
fn unknown_problem_sets_message() {
    let id = CString::new("nope").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { kappa_problem_load(id.as_ptr(), &mut p) }, KappaStatus::UnknownProblem);
    assert!(p.is_null());
    assert!(last_error().contains("hyperbolic-erf"));
}

#[test]
fn demo_ids_are_rejected() {
    let id = CString::new("bump-chain").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { kappa_problem_load(id.as_ptr(), &mut p) }, KappaStatus::InvalidArgument);
}

#[test]
fn null_arguments() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { kappa_problem_load(ptr::null(), &mut p) }, KappaStatus::NullPointer);
    let mut v = 0.0;
    assert_eq!(
        unsafe { kappa_kernel_abs_integral(ptr::null(), [1.0, 1.0].as_ptr(), 2, &mut v) },
        KappaStatus::NullPointer
    );
    unsafe { kappa_problem_free(ptr::null_mut()) };
    unsafe { kappa_solution_free(ptr::null_mut()) };
    assert!(unsafe { kappa_solution_beta(ptr::null()) }.is_nan());
}

#[test]
fn kernel_integral_and_index() {
    let p = load("hyperbolic-erf");
    let mut v = 0.0;
    let t = [1.0, 1.0];
    assert_eq!(unsafe { kappa_kernel_abs_integral(p, t.as_ptr(), 2, &mut v) }, KappaStatus::Ok);
    // (√π/2)·erf(1)
    assert!((v - 0.746_824_132_812_427).abs() < 1e-9);
    assert_eq!(
        unsafe { kappa_kernel_abs_integral(p, t.as_ptr(), 1, &mut v) },
        KappaStatus::InvalidArgument
    );

    let (mut lhs, mut holds) = (0.0, false);
    assert_eq!(unsafe { kappa_index_one(p, 0.5, 0.1, 0.1, &mut lhs, &mut holds) }, KappaStatus::Ok);
    assert!(holds && lhs < 0.75 * std::f64::consts::PI.sqrt() / 2.0 + 1e-12);
    assert_eq!(unsafe { kappa_index_one(p, 0.01, 0.1, 0.1, &mut lhs, &mut holds) }, KappaStatus::Ok);
    assert!(!holds);
    assert_eq!(
        unsafe { kappa_index_one(p, -1.0, 0.1, 0.1, &mut lhs, &mut holds) },
        KappaStatus::InvalidArgument
    );
    unsafe { kappa_problem_free(p) };
}

#[test]
fn solve_round_trip() {
    let p = load("hyperbolic-erf");
    let mut cfg = kappa_solve_config_default();
    assert_eq!(cfg.tol, 1e-8);
    cfg.step_x = 0.1;
    cfg.step_y = 0.1;
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { kappa_solve(p, &cfg, &mut s) }, KappaStatus::Ok);
    unsafe {
        assert!(kappa_solution_iterations(s) > 1);
        let beta = kappa_solution_beta(s);
        assert!(beta > 0.0 && beta < 0.5);
        assert!(kappa_solution_residual(s).is_finite());
        let n = kappa_solution_len(s);
        assert_eq!(n, 81 * 11);
        let mut buf = vec![0.0; n];
        assert_eq!(kappa_solution_samples(s, buf.as_mut_ptr(), n), KappaStatus::Ok);
        assert!(buf.iter().all(|v| *v >= 0.0));
        assert!((buf.iter().cloned().fold(0.0, f64::max) - beta).abs() < 1e-15);
        assert_eq!(kappa_solution_samples(s, buf.as_mut_ptr(), n - 1), KappaStatus::InvalidArgument);
        let m = kappa_solution_profile_len(s);
        assert_eq!(m, 11);
        let (mut y, mut val) = (vec![0.0; m], vec![0.0; m]);
        assert_eq!(kappa_solution_profile(s, y.as_mut_ptr(), val.as_mut_ptr(), m), KappaStatus::Ok);
        assert_eq!(y[10], 1.0);
        assert!(val[0].abs() < 1e-12 && val[10] > 0.1);
        kappa_solution_free(s);
    }

    cfg.max_iter = 1;
    cfg.tol = 1e-15;
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { kappa_solve(p, &cfg, &mut s) }, KappaStatus::NoConvergence);
    assert!(last_error().contains("did not converge"));
    unsafe { kappa_problem_free(p) };
}

#[test]
fn problem_from_json() {
    let text = CString::new(
        r#"{"id":"line","domain":[{"lo":0.0,"hi":null}],"truncation":6.0,
            "weight":{"kind":"exponential","axis":0,"rate":1.0},
            "kernel":[{"profile":{"kind":"gaussian","rate":1.0},"support":"up_to"}],
            "nonlinearity":{"source":{"kind":"constant","value":0.1},"coefficient":0.0,"power":1.0}}"#,
    )
    .unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { kappa_problem_from_json(text.as_ptr(), &mut p) }, KappaStatus::Ok, "{}", {
        let e = kappa_last_error_message();
        if e.is_null() { String::new() } else { unsafe { CStr::from_ptr(e) }.to_string_lossy().into_owned() }
    });
    unsafe { kappa_problem_free(p) };
    let bad = CString::new("{").unwrap();
    assert_eq!(unsafe { kappa_problem_from_json(bad.as_ptr(), &mut p) }, KappaStatus::InvalidArgument);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(kappa_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/kappa.h")).unwrap();
    for name in [
        "kappa_last_error_message",
        "kappa_version",
        "kappa_solve_config_default",
        "kappa_problem_load",
        "kappa_problem_from_json",
        "kappa_problem_free",
        "kappa_kernel_abs_integral",
        "kappa_index_one",
        "kappa_solve",
        "kappa_solution_free",
        "kappa_solution_samples",
        "kappa_solution_profile",
        "KAPPA_STATUS_NO_CONVERGENCE",
        "typedef struct KappaProblem KappaProblem",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
    // compile the header as C when a compiler is around
    if let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-x", "c", "-std=c99", "-Wall", "-Werror"]).arg(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("include/kappa.h"),
    ).output()
    {
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}
