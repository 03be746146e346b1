//! The `kappa` command line.
//!
//! Exit codes: 0 on success, 2 when a run finished but a reported value is
//! outside its tolerance, 1 on usage and runtime errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::casestudy::{
    arctan_demo, bump_chain_demo, gaussian_family_demo, load_problem, problem_cone_report, problem_hypotheses,
    validate_closed_forms, IntegralProblem, NamedProblem,
};
use crate::compactify::{LimitConfig, LimitStatus};
use crate::cones::rho_range;
use crate::funcspace::{write_csv, AscoliConfig};
use crate::greenop::HypothesisConfig;
use crate::solver::{picard_solve, write_convergence_csv, write_profile_csv, SolveConfig};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "kappa", version, about = "Hammerstein equations on unbounded domains via compactification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check hypotheses and index conditions, then solve by Picard iteration.
    Solve(SolveArgs),
    /// Hypothesis report and index-one sweep over a range of radii.
    CheckConditions(CheckArgs),
    /// Precompactness diagnostics for a function family.
    AscoliDemo(DemoArgs),
    /// Limits and extensions under different compactifications.
    CompactifyDemo(DemoArgs),
    /// Compare closed forms of a problem with quadrature.
    ValidateClosedForms(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    All,
}

#[derive(Debug, Args)]
struct Common {
    /// Named problem id.
    #[arg(long, default_value = "hyperbolic-erf", conflicts_with = "problem_file")]
    problem: String,
    /// JSON problem definition instead of a named id.
    #[arg(long)]
    problem_file: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "kappa-out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "all")]
    format: Format,
    /// Leave the timestamp out of JSON output.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Grid step (all axes).
    #[arg(long, default_value_t = 0.02)]
    step: f64,
    /// Grid step of the second axis; defaults to --step.
    #[arg(long)]
    step_y: Option<f64>,
    /// Where unbounded axes are cut.
    #[arg(long, default_value_t = 8.0)]
    truncation: f64,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    grid: GridArgs,
    /// Radius of the monitored ball.
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    /// Exit 2 if the PDE residual exceeds this.
    #[arg(long)]
    max_residual: Option<f64>,
    /// Skip the hypothesis report.
    #[arg(long)]
    skip_hypotheses: bool,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    grid: GridArgs,
    /// A single radius.
    #[arg(long, conflicts_with = "rho_range")]
    rho: Option<f64>,
    /// Radii as lo:hi:step.
    #[arg(long, default_value = "0.05:2.0:0.01")]
    rho_range: String,
    /// Radius of the dominator check.
    #[arg(long, default_value_t = 0.5)]
    r: f64,
}

#[derive(Debug, Args)]
struct DemoArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[command(flatten)]
    common: Common,
    /// Nodes per axis of the validation grid.
    #[arg(long, default_value_t = 20)]
    n: usize,
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VALIDATION,
        Err(Error::MaxIterations { iterations, last_gap, .. }) => {
            eprintln!("error: no convergence in {iterations} iterations (last gap {last_gap:e})");
            EXIT_VALIDATION
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

/// `Ok(passed)`
fn dispatch(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Solve(a) => solve(a),
        Command::CheckConditions(a) => check_conditions(a),
        Command::AscoliDemo(a) => demo(a, DemoKind::Ascoli),
        Command::CompactifyDemo(a) => demo(a, DemoKind::Compactify),
        Command::ValidateClosedForms(a) => validate(a),
    }
}

fn load(common: &Common) -> Result<NamedProblem> {
    match &common.problem_file {
        Some(path) => Ok(NamedProblem::Integral(IntegralProblem::from_json(&fs::read_to_string(path)?)?)),
        None => load_problem(&common.problem),
    }
}

fn integral(common: &Common) -> Result<IntegralProblem> {
    match load(common)? {
        NamedProblem::Integral(p) => Ok(p),
        other => Err(Error::InvalidArgument(format!(
            "'{}' is a demo, not an integral problem",
            other.id()
        ))),
    }
}

fn steps(grid: &GridArgs, dim: usize) -> Vec<f64> {
    let mut s = vec![grid.step; dim];
    if let (Some(y), Some(slot)) = (grid.step_y, s.get_mut(1)) {
        *slot = y;
    }
    s
}

fn parse_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::InvalidArgument(format!("rho range '{text}': {e}")))?;
    match parts.as_slice() {
        [lo, hi, step] => rho_range(*lo, *hi, *step),
        _ => Err(Error::InvalidArgument(format!("rho range '{text}' must be lo:hi:step"))),
    }
}

fn wants_json(c: &Common) -> bool {
    c.format != Format::Csv
}

fn wants_csv(c: &Common) -> bool {
    c.format != Format::Json
}

fn write_json(c: &Common, name: &str, mut value: Value) -> Result<PathBuf> {
    if !c.no_timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        if let Value::Object(m) = &mut value {
            m.insert("timestamp".into(), json!(secs));
        }
    }
    let path = c.out.join(name);
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn prepare(out: &Path) -> Result<()> {
    fs::create_dir_all(out)?;
    Ok(())
}

fn solve(a: SolveArgs) -> Result<bool> {
    let problem = integral(&a.common)?.with_truncation(a.grid.truncation);
    prepare(&a.common.out)?;
    let cfg = SolveConfig {
        tol: a.tol,
        max_iter: a.max_iter,
        steps: steps(&a.grid, problem.domain.len()),
        truncation: a.grid.truncation,
        rho_ball: Some(a.rho),
        ..SolveConfig::default()
    };
    let hypotheses = if a.skip_hypotheses {
        None
    } else {
        Some(problem_hypotheses(&problem, a.rho, &HypothesisConfig::default())?)
    };
    let cone = problem_cone_report(&problem, &cfg.steps, &[a.rho])?;
    let result = picard_solve(&problem, &cfg)?;

    if wants_csv(&a.common) {
        write_csv(&result.solution, &a.common.out.join("solution.csv"))?;
        write_convergence_csv(&result, &a.common.out.join("convergence.csv"))?;
        write_profile_csv(&result.asymptotic_profile, &a.common.out.join("profile.csv"))?;
    }
    let residual_ok = match (a.max_residual, result.residual_sup) {
        (Some(max), Some(r)) => r <= max,
        (Some(_), None) => false,
        (None, _) => true,
    };
    let passed = result.in_ball != Some(false) && result.nonnegative && residual_ok;
    let profile: Vec<Value> = result
        .asymptotic_profile
        .iter()
        .map(|p| json!({"point": p.label, "transverse": p.transverse, "value": p.value(), "oscillation": p.limit.finest_oscillation()}))
        .collect();
    if wants_json(&a.common) {
        write_json(
            &a.common,
            "summary.json",
            json!({
                "problem": problem.id,
                "config": to_value(&cfg)?,
                "hypotheses": hypotheses.as_ref().map(to_value).transpose()?,
                "cone": to_value(&cone.rows)?,
                "solve": {
                    "iterations": result.iterations,
                    "gap_history": result.gap_history,
                    "fixed_point_defect": result.fixed_point_defect,
                    "residual_sup": result.residual_sup,
                    "beta": result.beta,
                    "nonnegative": result.nonnegative,
                    "monotone": result.monotone,
                    "in_ball": result.in_ball,
                    "warnings": result.warnings,
                    "profile": profile,
                },
                "passed": passed,
            }),
        )?;
    }
    println!(
        "{}: {} iterations, gap {:.3e}, beta {:.6}, residual {}",
        problem.id,
        result.iterations,
        result.gap_history.last().copied().unwrap_or(f64::NAN),
        result.beta,
        result.residual_sup.map_or_else(|| "n/a".into(), |r| format!("{r:.3e}"))
    );
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    println!("{}", if passed { "PASS" } else { "FAIL" });
    Ok(passed)
}

fn check_conditions(a: CheckArgs) -> Result<bool> {
    let problem = integral(&a.common)?.with_truncation(a.grid.truncation);
    prepare(&a.common.out)?;
    let rhos = match a.rho {
        Some(r) => vec![r],
        None => parse_range(&a.rho_range)?,
    };
    let grid_steps = steps(&a.grid, problem.domain.len());
    let hypotheses = problem_hypotheses(&problem, a.r, &HypothesisConfig::default())?;
    let report = problem_cone_report(&problem, &grid_steps, &rhos)?;
    let passed = report.holds_range.is_some();
    if wants_json(&a.common) {
        write_json(
            &a.common,
            "cone_report.json",
            json!({
                "problem": problem.id,
                "rows": to_value(&report.rows)?,
                "holds_range": report.holds_range,
                "holds_contiguous": report.holds_contiguous,
                "plan": to_value(&report.plan)?,
            }),
        )?;
        write_json(
            &a.common,
            "summary.json",
            json!({
                "problem": problem.id,
                "config": {"steps": grid_steps, "truncation": a.grid.truncation, "rhos": rhos, "r": a.r},
                "hypotheses": to_value(&hypotheses)?,
                "cone": to_value(&report.rows)?,
                "passed": passed,
            }),
        )?;
    }
    if wants_csv(&a.common) {
        let mut w = csv::Writer::from_path(a.common.out.join("cone_report.csv"))?;
        w.write_record(["rho", "f_sup", "beta_factor", "lhs", "holds"])?;
        for r in &report.rows {
            w.write_record([
                r.rho.to_string(),
                format!("{:.17e}", r.f_sup),
                format!("{:.17e}", r.beta_factor),
                format!("{:.17e}", r.lhs),
                r.holds.to_string(),
            ])?;
        }
        w.flush()?;
    }
    for (name, c) in [("C1", &hypotheses.c1), ("C2", &hypotheses.c2), ("C3", &hypotheses.c3), ("C4", &hypotheses.c4)] {
        println!("{name}: {:?} ({})", c.status, c.note);
    }
    match report.holds_range {
        Some((lo, hi)) => println!("index-one condition holds for rho in [{lo}, {hi}]"),
        None => println!("index-one condition holds for no sampled rho"),
    }
    println!("{}", report.plan.conclusion);
    Ok(passed)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum DemoKind {
    Ascoli,
    Compactify,
}

fn demo(a: DemoArgs, kind: DemoKind) -> Result<bool> {
    let problem = load(&a.common)?;
    prepare(&a.common.out)?;
    let (report, expected) = match (kind, &problem) {
        (DemoKind::Ascoli, NamedProblem::GaussianFamily(d)) => {
            let r = gaussian_family_demo(d, &AscoliConfig::default())?;
            let p = &r.precompactness;
            println!(
                "bounded: {}, equicontinuous: {}, equiconvergent at infinity: {} (worst deviation {:.4})",
                p.uniformly_bounded, p.equicontinuous_interior, p.equiconvergent_at_infinity, p.worst_deviation
            );
            println!("separation: {:.6}", r.separation);
            let ok = p.uniformly_bounded && p.equicontinuous_interior && !p.equiconvergent_at_infinity;
            (to_value(&r)?, ok)
        }
        (_, NamedProblem::BumpChain(d)) => {
            let r = bump_chain_demo(d)?;
            println!("limit of f: {:?}", r.function_limit.status);
            println!("limit of f': {:?}", r.derivative_limit.status);
            let ok = matches!(r.function_limit.status, LimitStatus::Converged { .. })
                && r.derivative_limit.status == LimitStatus::NoLimit;
            (to_value(&r)?, ok)
        }
        (DemoKind::Compactify, NamedProblem::ArctanDemo(d)) => {
            let r = arctan_demo(d, &LimitConfig::default())?;
            for (label, v) in &r.two_point {
                println!("two-point extension at {label}: {v:.9}");
            }
            println!("one-point extension fails at: {}", r.one_point_failures.join(", "));
            let ok = r.two_point.len() == 2 && !r.one_point_failures.is_empty();
            (to_value(&r)?, ok)
        }
        (_, p) => {
            return Err(Error::InvalidArgument(format!(
                "problem '{}' has no {} demo",
                p.id(),
                if kind == DemoKind::Ascoli { "ascoli" } else { "compactify" }
            )))
        }
    };
    if wants_json(&a.common) {
        write_json(
            &a.common,
            "summary.json",
            json!({"problem": problem.id(), "report": report, "passed": expected}),
        )?;
    }
    println!("{}", if expected { "PASS" } else { "FAIL" });
    Ok(expected)
}

fn validate(a: ValidateArgs) -> Result<bool> {
    let problem = integral(&a.common)?;
    prepare(&a.common.out)?;
    let checks = validate_closed_forms(&problem, a.n)?;
    if checks.is_empty() {
        return Err(Error::InvalidArgument(format!("problem '{}' has no closed forms", problem.id)));
    }
    for c in &checks {
        println!("{}: max error {:.3e} (tolerance {:.0e})", c.name, c.max_error, c.tolerance);
    }
    let passed = checks.iter().all(|c| c.passed);
    if wants_json(&a.common) {
        write_json(
            &a.common,
            "summary.json",
            json!({"problem": problem.id, "n": a.n, "checks": to_value(&checks)?, "passed": passed}),
        )?;
    }
    println!("{}", if passed { "PASS" } else { "FAIL" });
    Ok(passed)
}
