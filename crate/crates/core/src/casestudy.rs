//! Named problems: the hyperbolic test problem and the counterexample demos.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::compactify::{dyadic_levels, extend, kappa_limit, CompactMap, LimitConfig, LimitResult, LimitStatus, XPoint};
use crate::cones::{cone_report, rho_range, AbsIntegralMode, ConeReport, ConeSpec, IndexChecker};
use crate::funcspace::{
    bump_chain, gaussian_family, gaussian_family_separation, precompactness_report, AscoliConfig, MultiIndex,
    PrecompactnessReport, TensorGrid, Weight,
};
use crate::greenop::{
    check_hypotheses, default_map, kernel_abs_integral, ApplyOptions, AxisFactor, HypothesisConfig, HypothesisReport,
    IntegralOperator, Kernel, Nonlinearity, Profile, QuadConfig, Source, Support,
};
use crate::solver::{picard_solve, SolveConfig, SolveResult};
use crate::{erf, Error, Result};

pub const PROBLEM_IDS: [&str; 4] = ["hyperbolic-erf", "arctan-demo", "gaussian-family", "bump-chain"];

/// One axis of a box domain; `hi = None` means unbounded above.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisDomain {
    pub lo: f64,
    pub hi: Option<f64>,
}

/// Closed forms known for a problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedForms {
    HyperbolicErf,
}

impl ClosedForms {
    /// `∫|G(t,s)| ds = (√π/2) y erf(x)`.
    pub fn abs_integral(&self, t: &[f64]) -> f64 {
        PI.sqrt() / 2.0 * t[1] * erf(t[0])
    }

    /// `(T0)(x,y) = π/(16√2) e^{-x²/2} erf(x/√2) erf(y)`.
    pub fn t_zero(&self, t: &[f64]) -> f64 {
        let (x, y) = (t[0], t[1]);
        PI / (16.0 * 2f64.sqrt()) * (-x * x / 2.0).exp() * erf(x / 2f64.sqrt()) * erf(y)
    }

    /// `lim_{x→∞} (T0/φ)(x, y0) = π erf(y0)/(16√2)`.
    pub fn t_zero_face(&self, y0: f64) -> f64 {
        PI * erf(y0) / (16.0 * 2f64.sqrt())
    }

    /// `∂²(T0)/∂x∂y`.
    pub fn t_zero_mixed(&self, t: &[f64]) -> f64 {
        let (x, y) = (t[0], t[1]);
        0.125 * (-x * x - y * y).exp() - (2.0 * PI).sqrt() / 16.0 * x * (-x * x / 2.0 - y * y).exp() * erf(x / 2f64.sqrt())
    }
}

/// A Hammerstein problem `u = ∫ G(·,s) f(s, u(s)) ds` on a box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralProblem {
    pub id: String,
    pub domain: Vec<AxisDomain>,
    /// Where unbounded axes are cut for computation.
    pub truncation: f64,
    pub weight: Weight,
    pub kernel: Vec<AxisFactor>,
    pub nonlinearity: Nonlinearity,
    /// Defaults to the one-point compactification of unbounded axes.
    #[serde(default)]
    pub compactification: Option<CompactMap>,
    #[serde(default)]
    pub closed_forms: Option<ClosedForms>,
}

impl IntegralProblem {
    pub fn kernel(&self) -> Result<Kernel> {
        Kernel::new(
            self.domain.iter().map(|d| (d.lo, d.hi.unwrap_or(f64::INFINITY))).collect(),
            self.kernel.clone(),
        )
    }

    pub fn map(&self) -> Result<CompactMap> {
        match &self.compactification {
            Some(m) => Ok(m.clone()),
            None => default_map(&self.kernel()?),
        }
    }

    /// Domain with unbounded axes cut at the truncation radius.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        self.domain.iter().map(|d| (d.lo, d.hi.unwrap_or(self.truncation))).collect()
    }

    pub fn grid(&self, steps: &[f64]) -> Result<TensorGrid> {
        if steps.len() != self.domain.len() {
            return Err(Error::InvalidArgument(format!(
                "{} grid steps for a {}-dimensional domain",
                steps.len(),
                self.domain.len()
            )));
        }
        TensorGrid::uniform(&self.bounds(), steps)
    }

    pub fn operator(&self, grid: TensorGrid, opts: ApplyOptions) -> Result<IntegralOperator> {
        IntegralOperator::new(self.kernel()?, self.nonlinearity.clone(), self.weight.clone(), grid, self.map()?, opts)
    }

    pub fn with_truncation(mut self, truncation: f64) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(text)?;
        p.kernel()?;
        if p.domain.iter().any(|d| d.hi.is_none()) && !(p.truncation > p.domain.iter().map(|d| d.lo).fold(f64::MIN, f64::max)) {
            return Err(Error::InvalidArgument("truncation must exceed the lower bounds".into()));
        }
        Ok(p)
    }
}

/// `u_xy = (1/8) e^{-(x²+y²)} + u²` on `[0,∞) × [0,1]` in integral form.
pub fn hyperbolic_erf() -> IntegralProblem {
    IntegralProblem {
        id: "hyperbolic-erf".into(),
        domain: vec![AxisDomain { lo: 0.0, hi: None }, AxisDomain { lo: 0.0, hi: Some(1.0) }],
        truncation: 8.0,
        weight: Weight::Gaussian { axis: 0, rate: 0.5 },
        kernel: vec![
            AxisFactor {
                profile: Profile::Gaussian { rate: 1.0 },
                support: Support::UpTo,
            },
            AxisFactor {
                profile: Profile::Unit,
                support: Support::UpTo,
            },
        ],
        nonlinearity: Nonlinearity {
            source: Source::Gaussian {
                amplitude: 0.125,
                rates: vec![1.0, 1.0],
            },
            coefficient: 1.0,
            power: 2.0,
        },
        compactification: Some(CompactMap::product(vec![
            CompactMap::OnePointHalfLine,
            CompactMap::Interval { lo: 0.0, hi: 1.0 },
        ])),
        closed_forms: Some(ClosedForms::HyperbolicErf),
    }
}

/// `arctan` on the line under two compactifications.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArctanDemo {
    pub two_point: CompactMap,
    pub one_point: CompactMap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianFamilyDemo {
    pub n_max: usize,
    pub map: CompactMap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpChainDemo {
    pub map: CompactMap,
    pub limit: LimitConfig,
    /// `k` values whose derivative extremes are reported.
    pub ks: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NamedProblem {
    Integral(IntegralProblem),
    ArctanDemo(ArctanDemo),
    GaussianFamily(GaussianFamilyDemo),
    BumpChain(BumpChainDemo),
}

impl NamedProblem {
    pub fn id(&self) -> &str {
        match self {
            NamedProblem::Integral(p) => &p.id,
            NamedProblem::ArctanDemo(_) => "arctan-demo",
            NamedProblem::GaussianFamily(_) => "gaussian-family",
            NamedProblem::BumpChain(_) => "bump-chain",
        }
    }

    pub fn integral(&self) -> Option<&IntegralProblem> {
        match self {
            NamedProblem::Integral(p) => Some(p),
            _ => None,
        }
    }
}

pub fn load_problem(id: &str) -> Result<NamedProblem> {
    Ok(match id {
        "hyperbolic-erf" => NamedProblem::Integral(hyperbolic_erf()),
        "arctan-demo" => NamedProblem::ArctanDemo(ArctanDemo {
            two_point: CompactMap::TwoPointLine,
            one_point: CompactMap::OnePoint { dim: 1 },
        }),
        "gaussian-family" => NamedProblem::GaussianFamily(GaussianFamilyDemo {
            n_max: 10,
            map: CompactMap::OnePointHalfLine,
        }),
        "bump-chain" => NamedProblem::BumpChain(BumpChainDemo {
            map: CompactMap::OnePointHalfLine,
            limit: LimitConfig::default()
                .with_levels(dyadic_levels(1, 12))
                .with_tol(1e-3)
                .with_samples(1 << 21),
            ks: vec![2, 3, 4],
        }),
        _ => {
            return Err(Error::UnknownProblem {
                id: id.into(),
                available: PROBLEM_IDS.iter().map(|s| s.to_string()).collect(),
            })
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArctanReport {
    /// `(label, value)` of the extension at the infinity points.
    pub two_point: Vec<(String, f64)>,
    /// Infinity points where the one-point extension fails.
    pub one_point_failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianFamilyReport {
    pub separation: f64,
    pub precompactness: PrecompactnessReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpChainReport {
    pub function_limit: LimitResult,
    pub derivative_limit: LimitResult,
    /// `(k, f'(k - 1/(√3 k)), f'(k + 1/k))`
    pub derivative_samples: Vec<(u32, f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DemoReport {
    Arctan(ArctanReport),
    GaussianFamily(GaussianFamilyReport),
    BumpChain(BumpChainReport),
}

pub fn arctan_demo(demo: &ArctanDemo, cfg: &LimitConfig) -> Result<ArctanReport> {
    let atan = |x: &[f64]| x[0].atan();
    let ext = extend(atan, &demo.two_point, cfg)?;
    let two_point = ext.infinity_values().iter().map(|(p, v)| (p.label(), *v)).collect();
    let one_point_failures = match extend(atan, &demo.one_point, cfg) {
        Ok(_) => Vec::new(),
        Err(Error::ExtensionFailed { points }) => points,
        Err(e) => return Err(e),
    };
    Ok(ArctanReport {
        two_point,
        one_point_failures,
    })
}

pub fn gaussian_family_demo(demo: &GaussianFamilyDemo, cfg: &AscoliConfig) -> Result<GaussianFamilyReport> {
    let family = gaussian_family(demo.n_max)?;
    Ok(GaussianFamilyReport {
        separation: gaussian_family_separation(demo.n_max)?,
        precompactness: precompactness_report(&family, &demo.map, cfg)?,
    })
}

pub fn bump_chain_demo(demo: &BumpChainDemo) -> Result<BumpChainReport> {
    let inf = XPoint::infinity("inf", vec![1.0]);
    let function_limit = kappa_limit(&|x: &[f64]| bump_chain(x[0]).0, &inf, &demo.map, &demo.limit)?;
    let derivative_limit = kappa_limit(&|x: &[f64]| bump_chain(x[0]).1, &inf, &demo.map, &demo.limit)?;
    let derivative_samples = demo
        .ks
        .iter()
        .map(|&k| {
            let kf = k as f64;
            (k, bump_chain(kf - 1.0 / (3f64.sqrt() * kf)).1, bump_chain(kf + 1.0 / kf).1)
        })
        .collect();
    Ok(BumpChainReport {
        function_limit,
        derivative_limit,
        derivative_samples,
    })
}

/// Largest gap between a closed form and its quadrature counterpart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormCheck {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compares the closed forms of `problem` with quadrature on a
/// `n × n` grid of the truncated domain.
pub fn validate_closed_forms(problem: &IntegralProblem, n: usize) -> Result<Vec<ClosedFormCheck>> {
    let Some(cf) = problem.closed_forms else {
        return Ok(Vec::new());
    };
    let kernel = problem.kernel()?;
    let bounds = problem.bounds();
    let grid = TensorGrid::new(bounds.iter().map(|&(lo, hi)| TensorGrid::linspace(lo, hi, n)).collect())?;
    let quad = QuadConfig::default();
    let mut abs_err = 0.0f64;
    for t in grid.points() {
        abs_err = abs_err.max((kernel_abs_integral(&kernel, &t, &quad)? - cf.abs_integral(&t)).abs());
    }
    let op = problem.operator(grid.clone(), ApplyOptions::default())?;
    let zero = crate::funcspace::WeightedGridFunction::from_fn(grid.clone(), problem.weight.clone(), 0, |_| 0.0)?;
    let t0 = op.apply(&zero)?;
    let t0_err = t0
        .samples()
        .iter()
        .zip(grid.points())
        .map(|(v, t)| (v - cf.t_zero(&t)).abs())
        .fold(0.0, f64::max);
    let face = t0
        .faces()
        .iter()
        .find(|f| f.p == MultiIndex::zero(grid.dim()))
        .ok_or_else(|| Error::InvalidArgument("no infinity face".into()))?;
    let ys = grid.face_nodes(face.axis);
    let mut face_err = 0.0f64;
    for (k, v) in ys.iter().zip(&face.values) {
        let y0 = grid.point(*k)[1];
        let v = v.ok_or_else(|| Error::NoLimit { point: format!("y0 = {y0}") })?;
        face_err = face_err.max((v - cf.t_zero_face(y0)).abs());
    }
    let mk = |name: &str, max_error: f64, tolerance: f64| ClosedFormCheck {
        name: name.into(),
        max_error,
        tolerance,
        passed: max_error <= tolerance,
    };
    Ok(vec![
        mk("abs_kernel_integral", abs_err, 1e-6),
        mk("t_zero", t0_err, 1e-6),
        mk("t_zero_face", face_err, 1e-4),
    ])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub solve: SolveConfig,
    pub rhos: Vec<f64>,
    pub hypotheses: HypothesisConfig,
    /// Radius of the dominator check; the monitored ball when unset.
    pub r: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            solve: SolveConfig::default(),
            rhos: rho_range(0.05, 2.0, 0.01).unwrap_or_default(),
            hypotheses: HypothesisConfig::default(),
            r: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineBundle {
    pub problem: String,
    pub hypotheses: Option<HypothesisReport>,
    pub cone: Option<ConeReport>,
    pub solve: Option<SolveResult>,
    pub demo: Option<DemoReport>,
}

/// Cone report for a problem on the `t`-grid used by the solver.
pub fn problem_cone_report(problem: &IntegralProblem, steps: &[f64], rhos: &[f64]) -> Result<ConeReport> {
    let spec = ConeSpec::default();
    let checker = IndexChecker::new(
        &problem.kernel()?,
        &problem.nonlinearity,
        &spec,
        &problem.grid(steps)?,
        AbsIntegralMode::ClosedForm,
        &QuadConfig::default(),
    )?;
    cone_report(&checker, &spec, rhos)
}

pub fn problem_hypotheses(problem: &IntegralProblem, r: f64, cfg: &HypothesisConfig) -> Result<HypothesisReport> {
    let cfg = HypothesisConfig {
        truncation: problem.truncation,
        ..cfg.clone()
    };
    check_hypotheses(
        &problem.kernel()?,
        &problem.weight,
        &problem.nonlinearity,
        &problem.map()?,
        r,
        &[MultiIndex::zero(problem.domain.len())],
        &cfg,
    )
}

/// Hypotheses, cone report and solution for integral problems; the
/// diagnostic report for demos.
pub fn run_full_pipeline(id: &str, cfg: &PipelineConfig) -> Result<PipelineBundle> {
    let problem = load_problem(id)?;
    run_problem_pipeline(&problem, cfg)
}

pub fn run_problem_pipeline(problem: &NamedProblem, cfg: &PipelineConfig) -> Result<PipelineBundle> {
    let mut bundle = PipelineBundle {
        problem: problem.id().into(),
        hypotheses: None,
        cone: None,
        solve: None,
        demo: None,
    };
    match problem {
        NamedProblem::Integral(p) => {
            let p = p.clone().with_truncation(cfg.solve.truncation);
            bundle.hypotheses = Some(problem_hypotheses(&p, cfg.r, &cfg.hypotheses)?);
            bundle.cone = Some(problem_cone_report(&p, &cfg.solve.steps, &cfg.rhos)?);
            bundle.solve = Some(picard_solve(&p, &cfg.solve)?);
        }
        NamedProblem::ArctanDemo(d) => {
            bundle.demo = Some(DemoReport::Arctan(arctan_demo(d, &cfg.solve.limit)?));
        }
        NamedProblem::GaussianFamily(d) => {
            bundle.demo = Some(DemoReport::GaussianFamily(gaussian_family_demo(d, &AscoliConfig::default())?));
        }
        NamedProblem::BumpChain(d) => {
            bundle.demo = Some(DemoReport::BumpChain(bump_chain_demo(d)?));
        }
    }
    Ok(bundle)
}

/// Whether a limit result converged to `value` within `tol`.
pub fn converged_to(r: &LimitResult, value: f64, tol: f64) -> bool {
    matches!(r.status, LimitStatus::Converged { value: v } if (v - value).abs() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn unknown_id_lists_available() {
        match load_problem("x") {
            Err(Error::UnknownProblem { id, available }) => {
                assert_eq!(id, "x");
                assert_eq!(available.len(), 4);
            }
            other => panic!("{other:?}"),
        }
        for id in PROBLEM_IDS {
            assert_eq!(load_problem(id).unwrap().id(), id);
        }
    }

    #[test]
    fn hyperbolic_problem_pieces() {
        let p = hyperbolic_erf();
        let k = p.kernel().unwrap();
        assert_eq!(k.eval(&[1.0, 0.5], &[0.3, 0.6]), 0.0);
        assert_eq!(k.eval(&[1.0, 0.5], &[1.2, 0.1]), 0.0);
        assert_abs_diff_eq!(k.eval(&[1.0, 0.5], &[0.3, 0.1]), (-0.49f64).exp(), epsilon = 1e-15);
        let cf = p.closed_forms.unwrap();
        for t in [[0.5, 0.3], [2.0, 1.0], [7.5, 0.9]] {
            assert_abs_diff_eq!(cf.abs_integral(&t), k.closed_form_abs_integral(&t).unwrap(), epsilon = 1e-15);
        }
        // π/(16√2) = 0.1388409..., erf(1) = 0.8427007...
        assert_abs_diff_eq!(cf.t_zero_face(1.0), 0.117_000_655_467_775, epsilon = 1e-12);
        assert!(p.weight.value(&[3.0, 0.2]) > 0.0);
    }

    #[test]
    fn mixed_derivative_of_t_zero_by_differences() {
        let cf = ClosedForms::HyperbolicErf;
        let h = 1e-4;
        for t in [[0.4, 0.3], [1.5, 0.8], [3.0, 0.5]] {
            let (x, y) = (t[0], t[1]);
            let d = (cf.t_zero(&[x + h, y + h]) - cf.t_zero(&[x + h, y - h]) - cf.t_zero(&[x - h, y + h])
                + cf.t_zero(&[x - h, y - h]))
                / (4.0 * h * h);
            assert_abs_diff_eq!(d, cf.t_zero_mixed(&t), epsilon = 1e-7);
        }
    }

    #[test]
    fn problem_json_round_trip() {
        let p = hyperbolic_erf();
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(IntegralProblem::from_json(&text).unwrap(), p);
        assert!(IntegralProblem::from_json("{\"id\": 3}").is_err());
    }

    #[test]
    fn closed_forms_agree_with_quadrature() {
        let checks = validate_closed_forms(&hyperbolic_erf(), 20).unwrap();
        assert_eq!(checks.len(), 3);
        for c in &checks {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn arctan_demo_report() {
        let NamedProblem::ArctanDemo(d) = load_problem("arctan-demo").unwrap() else {
            panic!()
        };
        let r = arctan_demo(&d, &LimitConfig::default()).unwrap();
        let plus = r.two_point.iter().find(|(l, _)| l == "+inf").unwrap().1;
        assert_abs_diff_eq!(plus, std::f64::consts::FRAC_PI_2, epsilon = 1e-6);
        assert_eq!(r.one_point_failures.len(), 1);
    }

    #[test]
    fn bump_chain_demo_report() {
        let NamedProblem::BumpChain(d) = load_problem("bump-chain").unwrap() else {
            panic!()
        };
        let r = bump_chain_demo(&d).unwrap();
        assert!(converged_to(&r.function_limit, 0.0, 1e-3), "{:?}", r.function_limit.status);
        assert_eq!(r.derivative_limit.status, LimitStatus::NoLimit);
        for (_, peak, flat) in r.derivative_samples {
            assert_abs_diff_eq!(peak, 8.0 / (3.0 * 3f64.sqrt()), epsilon = 1e-12);
            assert_eq!(flat, 0.0);
        }
    }

    #[test]
    fn gaussian_family_pipeline() {
        let b = run_full_pipeline("gaussian-family", &PipelineConfig::default()).unwrap();
        let Some(DemoReport::GaussianFamily(r)) = b.demo else {
            panic!()
        };
        assert!(r.separation >= 1.0 - (-1.0f64).exp() - 1e-6);
        assert!(r.precompactness.uniformly_bounded);
        assert!(r.precompactness.equicontinuous_interior);
        assert!(!r.precompactness.equiconvergent_at_infinity);
    }
}
