//! Cone functionals and the index conditions built on them.
//!
//! Functionals act on node samples. `f^ρ` and `f_ρ` reduce the sup/inf over
//! cone functions at level `ρ` to a pointwise sup/inf over grid nodes `t` and
//! values `v ∈ [0, ρ]`; this is exact when `f(t, ·)` is monotone and an upper
//! (lower) bound otherwise.

use serde::{Deserialize, Serialize};

use crate::funcspace::{TensorGrid, WeightedGridFunction};
use crate::greenop::{box_quadrature, kernel_abs_integral, Kernel, Nonlinearity, QuadConfig};
use crate::{Error, Result};

/// Value of `v` sampled in `[0, ρ]` when `f(t, ·)` is not monotone.
const V_SAMPLES: usize = 256;

/// A real functional evaluated on grid samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Functional {
    /// `min_t u(t)`
    Infimum,
    /// `max_t |u(t)|`
    SupAbs,
    Zero,
    /// `u(node)`, multilinearly interpolated
    PointEval { node: Vec<f64> },
}

impl Functional {
    pub fn eval(&self, u: &WeightedGridFunction) -> f64 {
        self.eval_samples(u.grid(), u.samples())
    }

    pub fn eval_samples(&self, grid: &TensorGrid, samples: &[f64]) -> f64 {
        match self {
            Functional::Infimum => samples.iter().copied().fold(f64::INFINITY, f64::min),
            Functional::SupAbs => samples.iter().fold(0.0, |m, v| m.max(v.abs())),
            Functional::Zero => 0.0,
            Functional::PointEval { node } => grid.interpolate(samples, node),
        }
    }

    /// The functional applied to `t ↦ g(t)` on `grid`; point evaluation uses
    /// `g(node)` directly.
    pub fn eval_fn(&self, grid: &TensorGrid, g: &dyn Fn(&[f64]) -> f64) -> f64 {
        match self {
            Functional::Zero => 0.0,
            Functional::PointEval { node } => g(node),
            _ => {
                let samples: Vec<f64> = grid.points().map(|t| g(&t)).collect();
                self.eval_samples(grid, &samples)
            }
        }
    }
}

/// `b` or `c` of the scale-comparison hypothesis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScaleMap {
    /// `ρ ↦ factor · ρ`
    Linear { factor: f64 },
}

impl ScaleMap {
    pub fn eval(&self, rho: f64) -> f64 {
        match self {
            ScaleMap::Linear { factor } => factor * rho,
        }
    }
}

/// Nonzero cone element with `γ(e) ≥ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConeElement {
    /// the weight `φ`
    Weight,
    Constant { value: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub alpha: Functional,
    pub beta: Functional,
    pub gamma: Functional,
    pub e: Option<ConeElement>,
    pub b: Option<ScaleMap>,
    pub c: Option<ScaleMap>,
    /// Whether `{u ∈ K : γ(u) < ρ}` is bounded. Supplied by the caller; a
    /// grid cannot decide it.
    pub gamma_sublevel_bounded: bool,
}

impl Default for ConeSpec {
    /// `α = inf u`, `β = sup |u|`, `γ = 0`, `e = φ`.
    fn default() -> Self {
        Self {
            alpha: Functional::Infimum,
            beta: Functional::SupAbs,
            gamma: Functional::Zero,
            e: Some(ConeElement::Weight),
            b: None,
            c: None,
            gamma_sublevel_bounded: false,
        }
    }
}

pub fn cone_membership(u: &WeightedGridFunction, spec: &ConeSpec) -> bool {
    spec.alpha.eval(u) >= -1e-12
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("rho must be positive and finite, got {rho}")))
    }
}

fn v_candidates(nl: &Nonlinearity, rho: f64, top: bool) -> Vec<f64> {
    if nl.monotone_in_u() {
        vec![if top { rho } else { 0.0 }]
    } else {
        (0..=V_SAMPLES).map(|k| rho * k as f64 / V_SAMPLES as f64).collect()
    }
}

/// `f^ρ = sup { f(t, v) / ρ : t ∈ grid, 0 ≤ v ≤ ρ }`.
pub fn f_sup_rho(nl: &Nonlinearity, rho: f64, grid: &TensorGrid) -> Result<f64> {
    check_rho(rho)?;
    let vs = v_candidates(nl, rho, true);
    Ok(grid
        .points()
        .flat_map(|t| vs.iter().map(move |&v| nl.eval(&t, v)).collect::<Vec<_>>())
        .fold(f64::NEG_INFINITY, f64::max)
        / rho)
}

/// `f_ρ = inf { f(t, v) / ρ : t ∈ grid, 0 ≤ v ≤ ρ }`.
pub fn f_inf_rho(nl: &Nonlinearity, rho: f64, grid: &TensorGrid) -> Result<f64> {
    check_rho(rho)?;
    let vs = v_candidates(nl, rho, false);
    Ok(grid
        .points()
        .flat_map(|t| vs.iter().map(move |&v| nl.eval(&t, v)).collect::<Vec<_>>())
        .fold(f64::INFINITY, f64::min)
        / rho)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexKind {
    IndexOne,
    IndexZero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexCheck {
    pub rho: f64,
    pub kind: IndexKind,
    pub lhs: f64,
    pub holds: bool,
}

/// How `t ↦ ∫|G(t,s)| ds` is evaluated on the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbsIntegralMode {
    /// closed form, falling back to quadrature where there is none
    ClosedForm,
    Quadrature,
}

/// Index-condition checker with the `ρ`-independent factors computed once.
#[derive(Clone, Debug)]
pub struct IndexChecker {
    nl: Nonlinearity,
    spec: ConeSpec,
    grid: TensorGrid,
    beta_factor: f64,
    gamma_integral: Result<f64, String>,
}

impl IndexChecker {
    pub fn new(
        kernel: &Kernel,
        nl: &Nonlinearity,
        spec: &ConeSpec,
        grid: &TensorGrid,
        mode: AbsIntegralMode,
        quad: &QuadConfig,
    ) -> Result<Self> {
        if grid.dim() != kernel.dim() {
            return Err(Error::InvalidArgument("grid and kernel dimensions differ".into()));
        }
        let mut samples = Vec::with_capacity(grid.len());
        for t in grid.points() {
            let closed = match mode {
                AbsIntegralMode::ClosedForm => kernel.closed_form_abs_integral(&t),
                AbsIntegralMode::Quadrature => None,
            };
            samples.push(match closed {
                Some(v) => v,
                None => kernel_abs_integral(kernel, &t, quad)?,
            });
        }
        let beta_factor = spec.beta.eval_samples(grid, &samples);
        let gamma_integral = gamma_kernel_integral(kernel, &spec.gamma, grid, quad).map_err(|e| e.to_string());
        Ok(Self {
            nl: nl.clone(),
            spec: spec.clone(),
            grid: grid.clone(),
            beta_factor,
            gamma_integral,
        })
    }

    /// `β(t ↦ ∫|G(t,s)| ds)`.
    pub fn beta_factor(&self) -> f64 {
        self.beta_factor
    }

    /// `∫ γ(G(·,s)) ds`.
    pub fn gamma_integral(&self) -> Result<f64> {
        self.gamma_integral
            .clone()
            .map_err(|e| Error::InvalidArgument(format!("γ(G(·,s)) is not integrable: {e}")))
    }

    pub fn index_one(&self, rho: f64) -> Result<IndexCheck> {
        let lhs = f_sup_rho(&self.nl, rho, &self.grid)? * self.beta_factor;
        Ok(IndexCheck {
            rho,
            kind: IndexKind::IndexOne,
            lhs,
            holds: lhs > 0.0 && lhs < 1.0,
        })
    }

    pub fn index_zero(&self, rho: f64) -> Result<IndexCheck> {
        if self.spec.e.is_none() {
            return Err(Error::InvalidArgument("index-zero check needs a cone element e".into()));
        }
        let lhs = f_inf_rho(&self.nl, rho, &self.grid)? * self.gamma_integral()?;
        Ok(IndexCheck {
            rho,
            kind: IndexKind::IndexZero,
            lhs,
            holds: lhs > 1.0 && self.spec.gamma_sublevel_bounded,
        })
    }

    /// Index-one rows over a list of radii.
    pub fn sweep(&self, rhos: &[f64]) -> Result<Vec<ConeRow>> {
        rhos.iter()
            .map(|&rho| {
                let f_sup = f_sup_rho(&self.nl, rho, &self.grid)?;
                let lhs = f_sup * self.beta_factor;
                Ok(ConeRow {
                    rho,
                    f_sup,
                    beta_factor: self.beta_factor,
                    lhs,
                    holds: lhs > 0.0 && lhs < 1.0,
                })
            })
            .collect()
    }
}

/// `∫ γ(G(·,s)) ds` over the kernel domain, infinite ends cut at
/// `quad.truncation`. Fails when halving the cut changes the value by more
/// than `1e-6` relative.
fn gamma_kernel_integral(kernel: &Kernel, gamma: &Functional, grid: &TensorGrid, quad: &QuadConfig) -> Result<f64> {
    if *gamma == Functional::Zero {
        return Ok(0.0);
    }
    let g = |s: &[f64]| gamma.eval_fn(grid, &|t: &[f64]| kernel.eval(t, s));
    let bounds = |cut: f64| -> Vec<(f64, f64)> {
        kernel
            .domain
            .iter()
            .map(|&(lo, hi)| (lo, if hi.is_finite() { hi } else { cut.max(lo) }))
            .collect()
    };
    let full = box_quadrature(&g, &bounds(quad.truncation), quad)?;
    if kernel.domain.iter().any(|(_, hi)| !hi.is_finite()) {
        let half = box_quadrature(&g, &bounds(0.5 * quad.truncation), quad)?;
        let change = (full - half).abs();
        if change > 1e-6 * full.abs().max(1e-300) {
            return Err(Error::QuadratureDiverged { estimate: full, change });
        }
    }
    Ok(full)
}

/// `(I¹_ρ)`: `0 < f^ρ β(∫|G(·,s)| ds) < 1`.
pub fn index_one_check(
    kernel: &Kernel,
    nl: &Nonlinearity,
    spec: &ConeSpec,
    grid: &TensorGrid,
    rho: f64,
) -> Result<IndexCheck> {
    IndexChecker::new(kernel, nl, spec, grid, AbsIntegralMode::ClosedForm, &QuadConfig::default())?.index_one(rho)
}

/// `(I⁰_ρ)`: the `γ`-sublevel set is bounded and `f_ρ ∫γ(G(·,s)) ds > 1`.
pub fn index_zero_check(
    kernel: &Kernel,
    nl: &Nonlinearity,
    spec: &ConeSpec,
    grid: &TensorGrid,
    rho: f64,
) -> Result<IndexCheck> {
    IndexChecker::new(kernel, nl, spec, grid, AbsIntegralMode::ClosedForm, &QuadConfig::default())?.index_zero(rho)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Existence {
    NoConclusion,
    AtLeastOne,
    AtLeastTwo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityPlan {
    pub verdict: Existence,
    /// Radii of the checks the conclusion rests on.
    pub chain: Vec<f64>,
    pub conclusion: String,
}

impl MultiplicityPlan {
    fn none() -> Self {
        Self {
            verdict: Existence::NoConclusion,
            chain: Vec::new(),
            conclusion: "no conclusion".into(),
        }
    }
}

/// Strongest existence statement supported by the holding checks.
///
/// Patterns, with `ρ₁ < ρ₂ < ρ₃` taken from the holding checks:
/// `I⁰ I¹` with `ρ₂ > b(ρ₁)` and `I¹ I⁰` with `ρ₂ > c(ρ₁)` give one fixed
/// point; `I⁰ I¹ I⁰` and `I¹ I⁰ I¹` with both separations give two. A lone
/// `I¹` gives a fixed point with `β(u) < ρ`.
///
/// Checks must be sorted by `ρ`. Two consecutive holding checks of opposite
/// kind whose separation map is supplied but violated make the chain
/// inconsistent.
pub fn multiplicity_plan(checks: &[IndexCheck], spec: &ConeSpec) -> Result<MultiplicityPlan> {
    if checks.windows(2).any(|w| !(w[0].rho <= w[1].rho)) {
        return Err(Error::InconsistentChain("checks are not sorted by rho".into()));
    }
    let held: Vec<&IndexCheck> = checks.iter().filter(|c| c.holds).collect();
    // separation needed to go from a check of kind `from` at `r1` to the next
    // one at `r2`; `None` when the map is missing
    let separated = |from: IndexKind, r1: f64, r2: f64| -> Option<bool> {
        let map = match from {
            IndexKind::IndexZero => spec.b.as_ref(),
            IndexKind::IndexOne => spec.c.as_ref(),
        };
        map.map(|m| r2 > m.eval(r1))
    };
    for w in held.windows(2) {
        if w[0].kind != w[1].kind && separated(w[0].kind, w[0].rho, w[1].rho) == Some(false) {
            let map = if w[0].kind == IndexKind::IndexZero { "b" } else { "c" };
            return Err(Error::InconsistentChain(format!(
                "rho = {} does not exceed {map}({}) between consecutive opposite-index checks",
                w[1].rho, w[0].rho
            )));
        }
    }
    let ok = |a: &IndexCheck, b: &IndexCheck| a.kind != b.kind && a.rho < b.rho && separated(a.kind, a.rho, b.rho) == Some(true);

    for i in 0..held.len() {
        for j in i + 1..held.len() {
            if !ok(held[i], held[j]) {
                continue;
            }
            for k in j + 1..held.len() {
                if ok(held[j], held[k]) {
                    let rhos = vec![held[i].rho, held[j].rho, held[k].rho];
                    return Ok(MultiplicityPlan {
                        verdict: Existence::AtLeastTwo,
                        conclusion: format!("at least two fixed points (radii {:?})", rhos),
                        chain: rhos,
                    });
                }
            }
        }
    }
    for i in 0..held.len() {
        for j in i + 1..held.len() {
            if ok(held[i], held[j]) {
                let rhos = vec![held[i].rho, held[j].rho];
                return Ok(MultiplicityPlan {
                    verdict: Existence::AtLeastOne,
                    conclusion: format!("at least one fixed point (radii {:?})", rhos),
                    chain: rhos,
                });
            }
        }
    }
    if let Some(c) = held.iter().find(|c| c.kind == IndexKind::IndexOne) {
        return Ok(MultiplicityPlan {
            verdict: Existence::AtLeastOne,
            chain: vec![c.rho],
            conclusion: format!("at least one fixed point with beta(u) < {}", c.rho),
        });
    }
    Ok(MultiplicityPlan::none())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeRow {
    pub rho: f64,
    pub f_sup: f64,
    pub beta_factor: f64,
    pub lhs: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    pub rows: Vec<ConeRow>,
    /// Smallest and largest `ρ` of the holding rows.
    pub holds_range: Option<(f64, f64)>,
    /// Whether the holding rows are consecutive in the sweep.
    pub holds_contiguous: bool,
    pub plan: MultiplicityPlan,
}

pub fn cone_report(checker: &IndexChecker, spec: &ConeSpec, rhos: &[f64]) -> Result<ConeReport> {
    let rows = checker.sweep(rhos)?;
    let idx: Vec<usize> = rows.iter().enumerate().filter(|(_, r)| r.holds).map(|(i, _)| i).collect();
    let holds_range = idx.first().map(|&i| (rows[i].rho, rows[idx[idx.len() - 1]].rho));
    let holds_contiguous = idx.windows(2).all(|w| w[1] == w[0] + 1);
    let mut sorted: Vec<IndexCheck> = rows
        .iter()
        .map(|r| IndexCheck {
            rho: r.rho,
            kind: IndexKind::IndexOne,
            lhs: r.lhs,
            holds: r.holds,
        })
        .collect();
    sorted.sort_by(|a, b| a.rho.total_cmp(&b.rho));
    let plan = multiplicity_plan(&sorted, spec)?;
    Ok(ConeReport {
        rows,
        holds_range,
        holds_contiguous,
        plan,
    })
}

/// `lo, lo + step, …` up to `hi` inclusive (within a tenth of a step).
pub fn rho_range(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(hi >= lo) || !(lo > 0.0) {
        return Err(Error::InvalidArgument(format!("bad rho range {lo}:{hi}:{step}")));
    }
    let n = ((hi - lo) / step + 0.1).floor() as usize;
    Ok((0..=n).map(|k| lo + k as f64 * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::Weight;
    use crate::greenop::{AxisFactor, Profile, Source, Support};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn kernel() -> Kernel {
        Kernel::new(
            vec![(0.0, f64::INFINITY), (0.0, 1.0)],
            vec![
                AxisFactor {
                    profile: Profile::Gaussian { rate: 1.0 },
                    support: Support::UpTo,
                },
                AxisFactor {
                    profile: Profile::Unit,
                    support: Support::UpTo,
                },
            ],
        )
        .unwrap()
    }

    fn nl() -> Nonlinearity {
        Nonlinearity {
            source: Source::Gaussian {
                amplitude: 0.125,
                rates: vec![1.0, 1.0],
            },
            coefficient: 1.0,
            power: 2.0,
        }
    }

    fn grid() -> TensorGrid {
        TensorGrid::uniform(&[(0.0, 8.0), (0.0, 1.0)], &[0.1, 0.1]).unwrap()
    }

    fn checker() -> IndexChecker {
        IndexChecker::new(
            &kernel(),
            &nl(),
            &ConeSpec::default(),
            &grid(),
            AbsIntegralMode::ClosedForm,
            &QuadConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn membership() {
        let g = grid();
        let w = Weight::Gaussian { axis: 0, rate: 0.5 };
        let spec = ConeSpec::default();
        let zero = WeightedGridFunction::from_fn(g.clone(), w.clone(), 0, |_| 0.0).unwrap();
        assert!(cone_membership(&zero, &spec));
        let phi = WeightedGridFunction::from_fn(g.clone(), w.clone(), 0, |t| w.value(t)).unwrap();
        assert!(cone_membership(&phi, &spec));
        let mut s = phi.samples().to_vec();
        s[17] = -0.1;
        let neg = WeightedGridFunction::new(g, s, w, 0).unwrap();
        assert!(!cone_membership(&neg, &spec));
    }

    #[test]
    fn f_sup_matches_dense_maximum() {
        assert_abs_diff_eq!(f_sup_rho(&nl(), 0.5, &grid()).unwrap(), 0.75, epsilon = 1e-15);
        // dense oracle over (t, v)
        let mut best = 0.0f64;
        for t in grid().points() {
            for k in 0..=100 {
                let v = 0.5 * k as f64 / 100.0;
                best = best.max((0.125 * (-(t[0] * t[0] + t[1] * t[1])).exp() + v * v) / 0.5);
            }
        }
        assert_abs_diff_eq!(best, 0.75, epsilon = 1e-15);
        for rho in [0.05, 0.3, 1.0, 3.0] {
            assert!(f_sup_rho(&nl(), rho, &grid()).unwrap() <= (0.125 + rho * rho) / rho + 1e-15);
        }
        assert_eq!(f_sup_rho(&Nonlinearity::zero(), 0.5, &grid()).unwrap(), 0.0);
        assert!(f_sup_rho(&nl(), 0.0, &grid()).is_err());
    }

    #[test]
    fn non_monotone_nonlinearity_is_sampled() {
        let f = Nonlinearity {
            source: Source::Constant { value: 1.0 },
            coefficient: -1.0,
            power: 2.0,
        };
        let g = TensorGrid::new(vec![vec![0.0, 1.0]]).unwrap();
        assert_abs_diff_eq!(f_sup_rho(&f, 0.5, &g).unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f_inf_rho(&f, 0.5, &g).unwrap(), 1.5, epsilon = 1e-15);
    }

    #[test]
    fn index_one_on_case_study() {
        let c = checker();
        assert_abs_diff_eq!(c.beta_factor(), PI.sqrt() / 2.0 * libm::erf(8.0), epsilon = 1e-14);
        let at_half = c.index_one(0.5).unwrap();
        assert!(at_half.holds);
        assert!(at_half.lhs <= 0.75 * PI.sqrt() / 2.0 + 1e-12);
        let small = c.index_one(0.01).unwrap();
        assert!(!small.holds);
        assert!(small.lhs >= 12.5 * c.beta_factor());
        assert!(!c.index_one(5.0).unwrap().holds);
    }

    #[test]
    fn holds_set_is_an_interval_containing_sufficient_range() {
        let c = checker();
        let rhos = rho_range(0.05, 2.0, 0.01).unwrap();
        let report = cone_report(&c, &ConeSpec::default(), &rhos).unwrap();
        assert!(report.holds_contiguous);
        let (lo, hi) = report.holds_range.unwrap();
        let a = (2.0 - 2f64.sqrt()) / 4.0;
        let b = (2.0 + 2f64.sqrt()) / 4.0;
        assert!(lo <= a && hi >= b, "{lo} {hi}");
        // roots of (1/8 + ρ²)/ρ · √π/2 = 1
        let k = 2.0 / PI.sqrt();
        let disc = (k * k - 0.5).sqrt();
        assert!(lo >= (k - disc) / 2.0 - 0.011 && hi <= (k + disc) / 2.0 + 0.011);
        assert_eq!(report.plan.verdict, Existence::AtLeastOne);
    }

    #[test]
    fn gamma_zero_gives_zero_lhs() {
        let c = checker();
        for rho in [0.1, 1.0, 10.0] {
            let z = c.index_zero(rho).unwrap();
            assert_eq!(z.lhs, 0.0);
            assert!(!z.holds);
        }
    }

    #[test]
    fn index_zero_with_point_evaluation() {
        // f ≡ c, γ(u) = u(t*), so lhs = (c/ρ) ∫ G(t*, s) ds
        let cst = 2.0;
        let f = Nonlinearity {
            source: Source::Constant { value: cst },
            coefficient: 0.0,
            power: 1.0,
        };
        let k = Kernel::new(
            vec![(0.0, 1.0), (0.0, 1.0)],
            vec![
                AxisFactor {
                    profile: Profile::Gaussian { rate: 1.0 },
                    support: Support::Full,
                },
                AxisFactor {
                    profile: Profile::Unit,
                    support: Support::UpTo,
                },
            ],
        )
        .unwrap();
        let g = TensorGrid::uniform(&[(0.0, 1.0), (0.0, 1.0)], &[0.25, 0.25]).unwrap();
        let node = vec![0.5, 0.75];
        let spec = ConeSpec {
            gamma: Functional::PointEval { node: node.clone() },
            gamma_sublevel_bounded: true,
            ..ConeSpec::default()
        };
        let oracle = box_quadrature(&|s| k.eval(&node, s), &[(0.0, 1.0), (0.0, 1.0)], &QuadConfig::default()).unwrap();
        for rho in [0.5, 1.0, 1.5, 2.0] {
            let chk = index_zero_check(&k, &f, &spec, &g, rho).unwrap();
            assert_abs_diff_eq!(chk.lhs, cst / rho * oracle, epsilon = 1e-9);
            assert_eq!(chk.holds, cst / rho * oracle > 1.0);
        }
        let unbounded = ConeSpec {
            gamma_sublevel_bounded: false,
            ..spec.clone()
        };
        assert!(!index_zero_check(&k, &f, &unbounded, &g, 0.5).unwrap().holds);
        let no_e = ConeSpec { e: None, ..spec };
        assert!(index_zero_check(&k, &f, &no_e, &g, 0.5).is_err());
        // bounded f: f_ρ → 0 as ρ → ∞
        let big = ConeSpec {
            gamma: Functional::PointEval { node: node.clone() },
            gamma_sublevel_bounded: true,
            ..ConeSpec::default()
        };
        assert!(!index_zero_check(&k, &f, &big, &g, 1e6).unwrap().holds);
    }

    #[test]
    fn non_integrable_gamma_is_an_error() {
        let f = Nonlinearity {
            source: Source::Constant { value: 1.0 },
            coefficient: 0.0,
            power: 1.0,
        };
        let k = Kernel::new(
            vec![(0.0, f64::INFINITY)],
            vec![AxisFactor {
                profile: Profile::Unit,
                support: Support::Full,
            }],
        )
        .unwrap();
        let g = TensorGrid::uniform(&[(0.0, 2.0)], &[0.5]).unwrap();
        let spec = ConeSpec {
            gamma: Functional::PointEval { node: vec![1.0] },
            gamma_sublevel_bounded: true,
            ..ConeSpec::default()
        };
        assert!(index_zero_check(&k, &f, &spec, &g, 1.0).is_err());
    }

    fn chk(rho: f64, kind: IndexKind, holds: bool) -> IndexCheck {
        IndexCheck {
            rho,
            kind,
            lhs: f64::NAN,
            holds,
        }
    }

    #[test]
    fn multiplicity_patterns() {
        use IndexKind::*;
        let spec = ConeSpec {
            b: Some(ScaleMap::Linear { factor: 2.0 }),
            c: Some(ScaleMap::Linear { factor: 1.5 }),
            ..ConeSpec::default()
        };
        assert_eq!(multiplicity_plan(&[], &spec).unwrap().verdict, Existence::NoConclusion);

        let single = multiplicity_plan(&[chk(0.5, IndexOne, true)], &ConeSpec::default()).unwrap();
        assert_eq!(single.verdict, Existence::AtLeastOne);
        assert_eq!(single.conclusion, "at least one fixed point with beta(u) < 0.5");

        let three = [chk(1.0, IndexZero, true), chk(3.0, IndexOne, true), chk(5.0, IndexZero, true)];
        let p = multiplicity_plan(&three, &spec).unwrap();
        assert_eq!(p.verdict, Existence::AtLeastTwo);
        assert_eq!(p.chain, vec![1.0, 3.0, 5.0]);

        let alt = [chk(1.0, IndexOne, true), chk(2.0, IndexZero, true), chk(5.0, IndexOne, true)];
        assert_eq!(multiplicity_plan(&alt, &spec).unwrap().verdict, Existence::AtLeastTwo);

        let pair = [chk(1.0, IndexZero, true), chk(3.0, IndexOne, true)];
        let p = multiplicity_plan(&pair, &spec).unwrap();
        assert_eq!(p.verdict, Existence::AtLeastOne);
        assert_eq!(p.chain, vec![1.0, 3.0]);

        // lone index-zero says nothing
        assert_eq!(
            multiplicity_plan(&[chk(1.0, IndexZero, true)], &spec).unwrap().verdict,
            Existence::NoConclusion
        );
        // without b or c the chain degrades to the lone index-one conclusion
        let p = multiplicity_plan(&three, &ConeSpec::default()).unwrap();
        assert_eq!(p.verdict, Existence::AtLeastOne);
        assert_eq!(p.chain, vec![3.0]);
    }

    #[test]
    fn inconsistent_chains() {
        use IndexKind::*;
        let spec = ConeSpec {
            b: Some(ScaleMap::Linear { factor: 2.0 }),
            ..ConeSpec::default()
        };
        let unsorted = [chk(2.0, IndexOne, true), chk(1.0, IndexOne, true)];
        assert!(matches!(multiplicity_plan(&unsorted, &spec), Err(Error::InconsistentChain(_))));
        let too_close = [chk(1.0, IndexZero, true), chk(1.5, IndexOne, true)];
        assert!(matches!(multiplicity_plan(&too_close, &spec), Err(Error::InconsistentChain(_))));
    }

    #[test]
    fn functional_laws_on_a_pair() {
        let g = TensorGrid::uniform(&[(0.0, 1.0)], &[0.25]).unwrap();
        let u = [0.3, -0.2, 0.5, 0.1, 0.0];
        let v = [0.1, 0.4, -0.3, 0.2, 0.6];
        let sum: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        let inf = Functional::Infimum;
        assert!(inf.eval_samples(&g, &sum) >= inf.eval_samples(&g, &u) + inf.eval_samples(&g, &v));
        let pe = Functional::PointEval { node: vec![0.375] };
        assert_abs_diff_eq!(pe.eval_samples(&g, &u), 0.15, epsilon = 1e-15);
        assert_eq!(Functional::SupAbs.eval_samples(&g, &v), 0.6);
    }

    #[test]
    fn rho_range_endpoints() {
        let r = rho_range(0.05, 1.0, 0.01).unwrap();
        assert_eq!(r.len(), 96);
        assert_abs_diff_eq!(*r.last().unwrap(), 1.0, epsilon = 1e-12);
        assert!(rho_range(1.0, 0.5, 0.1).is_err());
    }
}
