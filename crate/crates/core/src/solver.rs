//! Picard iteration for the fixed point, PDE residuals and the profile at
//! infinity.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::casestudy::IntegralProblem;
use crate::compactify::{kappa_limit, CompactMap, LimitConfig, LimitResult, LimitStatus, Side};
use crate::cones::{AbsIntegralMode, ConeSpec, IndexChecker};
use crate::funcspace::{face_points, infinity_faces, weighted_norm, FaceValues, MultiIndex, WeightedGridFunction};
use crate::greenop::{ApplyOptions, IntegralOperator, Nonlinearity, QuadConfig};
use crate::{Error, Result};

/// Largest oscillation accepted for a profile limit.
pub const PROFILE_OSCILLATION: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    /// Stop once `‖u_{k+1} - u_k‖_{κ,φ} < tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Grid step per axis.
    pub steps: Vec<f64>,
    pub truncation: f64,
    /// Gauss–Legendre nodes per cell and axis.
    pub quad_order: usize,
    pub quad_tol: f64,
    /// Radius of the ball `{β(u) < ρ}` the iterates are monitored in.
    pub rho_ball: Option<f64>,
    pub limit: LimitConfig,
    /// Keep every iterate's samples in the result.
    pub keep_iterates: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 50,
            steps: vec![0.02, 0.02],
            truncation: 8.0,
            quad_order: 8,
            quad_tol: 1e-8,
            rho_ball: Some(0.5),
            limit: LimitConfig::default(),
            keep_iterates: false,
        }
    }
}

impl SolveConfig {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        if let Some(r) = self.rho_ball {
            if !(r > 0.0) {
                return Err(Error::InvalidArgument(format!("rho must be positive, got {r}")));
            }
        }
        Ok(())
    }
}

/// One row of the convergence log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationLog {
    pub iter: usize,
    pub gap: f64,
    pub beta: f64,
    /// PDE residual of the iterate; two-dimensional problems only.
    pub residual: Option<f64>,
}

/// Limit of `u/φ` at one point of an infinity face.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub label: String,
    pub axis: usize,
    pub side: Side,
    /// Grid coordinates of the face node with the face axis removed.
    pub transverse: Vec<f64>,
    pub limit: LimitResult,
}

impl ProfilePoint {
    pub fn value(&self) -> Option<f64> {
        self.limit.value()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub solution: WeightedGridFunction,
    pub iterations: usize,
    pub gap_history: Vec<f64>,
    pub log: Vec<IterationLog>,
    /// `‖T u* - u*‖_{κ,φ}`
    pub fixed_point_defect: f64,
    /// PDE residual; two-dimensional problems only.
    pub residual_sup: Option<f64>,
    pub beta: f64,
    pub nonnegative: bool,
    /// Every iterate dominated its predecessor at every node.
    pub monotone: bool,
    /// `β(u_k) < ρ` for every iterate; `None` without a monitored ball.
    pub in_ball: Option<bool>,
    pub asymptotic_profile: Vec<ProfilePoint>,
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub iterates: Vec<Vec<f64>>,
}

fn sup_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `u_{k+1} = T u_k` from `u_0 = 0` until the weighted-norm gap drops below
/// `cfg.tol`.
pub fn picard_solve(problem: &IntegralProblem, cfg: &SolveConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let problem = problem.clone().with_truncation(cfg.truncation);
    let grid = problem.grid(&cfg.steps)?;
    let op = problem.operator(
        grid,
        ApplyOptions {
            quad_order: cfg.quad_order,
            quad_tol: cfg.quad_tol,
            faces: false,
            limit: cfg.limit.clone(),
        },
    )?;
    picard_iterate(&op, cfg)
}

/// Picard iteration with a prepared operator.
pub fn picard_iterate(op: &IntegralOperator, cfg: &SolveConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let mut warnings = Vec::new();
    if let Some(rho) = cfg.rho_ball {
        let spec = ConeSpec::default();
        let checker = IndexChecker::new(
            op.kernel(),
            op.nonlinearity(),
            &spec,
            op.grid(),
            AbsIntegralMode::ClosedForm,
            &QuadConfig::default(),
        )?;
        let check = checker.index_one(rho)?;
        if !check.holds {
            warnings.push(format!(
                "index-one condition fails at rho = {rho} (lhs = {:.6}); the ball is not certified",
                check.lhs
            ));
        }
    }
    let two_d = op.grid().dim() == 2;
    let residual = |u: &WeightedGridFunction| if two_d { pde_residual(u, op.nonlinearity()).ok() } else { None };

    let mut u = WeightedGridFunction::new(op.grid().clone(), vec![0.0; op.grid().len()], op.weight().clone(), 0)?;
    let mut gap_history = Vec::new();
    let mut log = Vec::new();
    let mut iterates = Vec::new();
    let mut monotone = true;
    let mut in_ball = cfg.rho_ball.map(|_| true);
    if cfg.keep_iterates {
        iterates.push(u.samples().to_vec());
    }
    for iter in 1..=cfg.max_iter {
        let next = WeightedGridFunction::new(op.grid().clone(), op.apply_samples(&u)?, op.weight().clone(), 0)?;
        let gap = weighted_norm(&next.sub(&u)?);
        let beta = sup_abs(next.samples());
        monotone &= next
            .samples()
            .iter()
            .zip(u.samples())
            .all(|(a, b)| *a >= b - 1e-14 * b.abs().max(f64::MIN_POSITIVE));
        if let (Some(rho), Some(flag)) = (cfg.rho_ball, in_ball.as_mut()) {
            *flag &= beta < rho;
        }
        gap_history.push(gap);
        log.push(IterationLog {
            iter,
            gap,
            beta,
            residual: residual(&next),
        });
        if cfg.keep_iterates {
            iterates.push(next.samples().to_vec());
        }
        u = next;
        if gap < cfg.tol {
            let image = WeightedGridFunction::new(op.grid().clone(), op.apply_samples(&u)?, op.weight().clone(), 0)?;
            let fixed_point_defect = weighted_norm(&image.sub(&u)?);
            let asymptotic_profile = asymptotic_profile(&u, op.map(), &cfg.limit)?;
            let solution = u.with_faces(profile_faces(&asymptotic_profile, op.grid().dim()));
            return Ok(SolveResult {
                iterations: iter,
                fixed_point_defect,
                residual_sup: residual(&solution),
                beta: sup_abs(solution.samples()),
                nonnegative: solution.samples().iter().all(|v| *v >= 0.0),
                solution,
                gap_history,
                log,
                monotone,
                in_ball,
                asymptotic_profile,
                warnings,
                iterates,
            });
        }
    }
    Err(Error::MaxIterations {
        iterations: cfg.max_iter,
        last_gap: gap_history.last().copied().unwrap_or(f64::NAN),
        gap_history,
    })
}

fn profile_faces(profile: &[ProfilePoint], dim: usize) -> Vec<FaceValues> {
    let mut faces: Vec<FaceValues> = Vec::new();
    for p in profile {
        let v = p.value();
        match faces.iter_mut().find(|f| f.axis == p.axis && f.side == p.side) {
            Some(f) => f.values.push(v),
            None => faces.push(FaceValues {
                axis: p.axis,
                side: p.side,
                p: MultiIndex::zero(dim),
                values: vec![v],
            }),
        }
    }
    faces
}

/// `sup |D²_{xy} u - f(·, u)|` over interior nodes, with the four-point
/// centred cross difference for the mixed partial.
pub fn pde_residual(u: &WeightedGridFunction, nl: &Nonlinearity) -> Result<f64> {
    let grid = u.grid();
    if grid.dim() != 2 {
        return Err(Error::InvalidArgument(format!(
            "mixed-derivative residual needs a 2-D grid, got {} axes",
            grid.dim()
        )));
    }
    for a in 0..2 {
        let n = grid.axis(a).len();
        if n < 3 {
            return Err(Error::GridTooCoarse {
                axis: a,
                nodes: n,
                needed: 3,
            });
        }
    }
    let (xs, ys) = (grid.axis(0), grid.axis(1));
    let ny = ys.len();
    let s = u.samples();
    let at = |i: usize, j: usize| s[i * ny + j];
    let mut worst = 0.0f64;
    for i in 1..xs.len() - 1 {
        for j in 1..ny - 1 {
            let d = (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) + at(i - 1, j - 1))
                / ((xs[i + 1] - xs[i - 1]) * (ys[j + 1] - ys[j - 1]));
            worst = worst.max((d - nl.eval(&[xs[i], ys[j]], at(i, j))).abs());
        }
    }
    Ok(worst)
}

/// Limits of `u/φ` at every infinity-face node.
pub fn asymptotic_profile(u: &WeightedGridFunction, map: &CompactMap, cfg: &LimitConfig) -> Result<Vec<ProfilePoint>> {
    let q = u.quotient();
    let grid = u.grid();
    let interp = |x: &[f64]| grid.interpolate(&q, x);
    let mut out = Vec::new();
    for (axis, side) in infinity_faces(grid, map)? {
        let nodes = grid.face_nodes(axis);
        for (point, k) in face_points(grid, map, axis, side).into_iter().zip(nodes) {
            let mut transverse = grid.point(k);
            transverse.remove(axis);
            let limit = kappa_limit(&interp, &point, map, cfg)?;
            let label = point.label();
            match limit.status {
                LimitStatus::NoLimit => return Err(Error::NoLimit { point: label }),
                LimitStatus::Inconclusive => return Err(Error::Inconclusive { point: label }),
                LimitStatus::Converged { .. } => {
                    if limit.finest_oscillation().is_none_or(|o| o >= PROFILE_OSCILLATION) {
                        return Err(Error::NoLimit { point: label });
                    }
                }
            }
            out.push(ProfilePoint {
                label,
                axis,
                side,
                transverse,
                limit,
            });
        }
    }
    Ok(out)
}

/// `iter,gap,beta,residual`
pub fn write_convergence_csv(result: &SolveResult, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["iter", "gap", "beta", "residual"])?;
    for r in &result.log {
        w.write_record([
            r.iter.to_string(),
            format!("{:.17e}", r.gap),
            format!("{:.17e}", r.beta),
            r.residual.map_or_else(String::new, |v| format!("{v:.17e}")),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `y0,value,oscillation` for one transverse coordinate; `c0,c1,…` columns
/// otherwise.
pub fn write_profile_csv(profile: &[ProfilePoint], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let width = profile.first().map_or(1, |p| p.transverse.len());
    let mut header: Vec<String> = if width == 1 {
        vec!["y0".into()]
    } else {
        (0..width).map(|i| format!("c{i}")).collect()
    };
    header.extend(["value".into(), "oscillation".into()]);
    w.write_record(&header)?;
    for p in profile {
        let mut row: Vec<String> = p.transverse.iter().map(|c| format!("{c:.17e}")).collect();
        row.push(p.value().map_or_else(String::new, |v| format!("{v:.17e}")));
        row.push(p.limit.finest_oscillation().map_or_else(String::new, |v| format!("{v:.17e}")));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
