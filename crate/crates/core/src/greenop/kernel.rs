//! Separable Green's kernels and pointwise nonlinearities.

use serde::{Deserialize, Serialize};

use super::quadrature::{box_quadrature, gaussian_window_integral, QuadConfig};
use crate::funcspace::Weight;
use crate::{erf, Error, Result};

/// Profile of one kernel factor as a function of `t_a - s_a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Unit,
    /// `exp(-rate (t_a - s_a)²)`
    Gaussian { rate: f64 },
}

/// Integration range of `s_a` for a given `t_a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    /// `lo_a ≤ s_a ≤ t_a` (Volterra type)
    UpTo,
    /// the whole axis
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisFactor {
    pub profile: Profile,
    pub support: Support,
}

impl AxisFactor {
    pub fn ln_value(&self, t: f64, s: f64) -> f64 {
        match self.profile {
            Profile::Unit => 0.0,
            Profile::Gaussian { rate } => -rate * (t - s) * (t - s),
        }
    }

    pub fn in_support(&self, t: f64, s: f64, lo: f64, hi: f64) -> bool {
        match self.support {
            Support::UpTo => s >= lo && s <= t,
            Support::Full => s >= lo && s <= hi,
        }
    }
}

/// `G(t, s) = Π_a g_a(t_a, s_a)` on a box domain; upper bounds may be
/// infinite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    pub domain: Vec<(f64, f64)>,
    pub factors: Vec<AxisFactor>,
}

impl Kernel {
    pub fn new(domain: Vec<(f64, f64)>, factors: Vec<AxisFactor>) -> Result<Self> {
        if domain.len() != factors.len() || domain.is_empty() {
            return Err(Error::InvalidArgument("kernel needs one factor per domain axis".into()));
        }
        if domain.iter().any(|(lo, hi)| !lo.is_finite() || !(hi > lo)) {
            return Err(Error::InvalidArgument("kernel domain must be [lo, hi) with finite lo < hi".into()));
        }
        Ok(Self { domain, factors })
    }

    pub fn dim(&self) -> usize {
        self.domain.len()
    }

    pub fn support(&self, t: &[f64], s: &[f64]) -> bool {
        self.factors
            .iter()
            .zip(&self.domain)
            .enumerate()
            .all(|(a, (f, (lo, hi)))| f.in_support(t[a], s[a], *lo, *hi))
    }

    pub fn eval(&self, t: &[f64], s: &[f64]) -> f64 {
        if !self.support(t, s) {
            return 0.0;
        }
        self.factors
            .iter()
            .enumerate()
            .map(|(a, f)| f.ln_value(t[a], s[a]))
            .sum::<f64>()
            .exp()
    }

    /// `G(t, s) / φ(t)`, evaluated in log space.
    pub fn eval_over_weight(&self, t: &[f64], s: &[f64], weight: &Weight) -> f64 {
        if !self.support(t, s) {
            return 0.0;
        }
        let ln: f64 = self
            .factors
            .iter()
            .enumerate()
            .map(|(a, f)| f.ln_value(t[a], s[a]))
            .sum();
        (ln - weight.ln(t)).exp()
    }

    /// `s`-box on which `G(t, ·)` can be nonzero, with infinite ends cut at
    /// `truncation`.
    pub fn support_box(&self, t: &[f64], truncation: f64) -> Vec<(f64, f64)> {
        self.factors
            .iter()
            .zip(&self.domain)
            .enumerate()
            .map(|(a, (f, &(lo, hi)))| {
                let hi = if hi.is_finite() { hi } else { truncation.max(lo) };
                match f.support {
                    Support::UpTo => (lo, t[a].clamp(lo, hi)),
                    Support::Full => (lo, hi),
                }
            })
            .collect()
    }

    /// Closed form of `∫ |G(t, s)| ds` (the kernel is nonnegative).
    pub fn closed_form_abs_integral(&self, t: &[f64]) -> Option<f64> {
        let mut acc = 1.0;
        for (a, (f, &(lo, hi))) in self.factors.iter().zip(&self.domain).enumerate() {
            let v = match (f.profile, f.support) {
                (Profile::Unit, Support::UpTo) => (t[a] - lo).max(0.0),
                (Profile::Unit, Support::Full) => {
                    if !hi.is_finite() {
                        return None;
                    }
                    hi - lo
                }
                (Profile::Gaussian { rate }, Support::UpTo) => gaussian_window_integral(rate, (t[a] - lo).max(0.0)),
                (Profile::Gaussian { rate }, Support::Full) => {
                    let k = rate.sqrt();
                    let upper = if hi.is_finite() { erf(k * (hi - t[a])) } else { 1.0 };
                    std::f64::consts::PI.sqrt() / (2.0 * k) * (erf(k * (t[a] - lo)) + upper)
                }
            };
            acc *= v;
        }
        Some(acc)
    }
}

/// `∫ |G(t, s)| ds` by nested adaptive quadrature over the support.
pub fn kernel_abs_integral(kernel: &Kernel, t: &[f64], cfg: &QuadConfig) -> Result<f64> {
    let bounds = kernel.support_box(t, cfg.truncation);
    if bounds.iter().any(|(a, b)| b <= a) {
        return Ok(0.0);
    }
    box_quadrature(&|s| kernel.eval(t, s).abs(), &bounds, cfg)
}

/// `amplitude · exp(-Σ_a rates[a] t_a²)` and simpler sources.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    Zero,
    Constant { value: f64 },
    Gaussian { amplitude: f64, rates: Vec<f64> },
}

impl Source {
    pub fn eval(&self, t: &[f64]) -> f64 {
        match self {
            Source::Zero => 0.0,
            Source::Constant { value } => *value,
            Source::Gaussian { amplitude, rates } => {
                amplitude * (-rates.iter().zip(t).map(|(r, x)| r * x * x).sum::<f64>()).exp()
            }
        }
    }

    /// `sup_t` of the source over the domain box. For the Gaussian source
    /// (nonnegative rates) it sits at the point of smallest `|t_a|`.
    pub fn sup(&self, domain: &[(f64, f64)]) -> f64 {
        match self {
            Source::Zero => 0.0,
            Source::Constant { value } => *value,
            Source::Gaussian { .. } => {
                let t: Vec<f64> = domain
                    .iter()
                    .map(|&(lo, hi)| if lo <= 0.0 && hi >= 0.0 { 0.0 } else if lo > 0.0 { lo } else { hi })
                    .collect();
                self.eval(&t)
            }
        }
    }
}

/// `f(t, u) = source(t) + coefficient · |u|^power`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Nonlinearity {
    pub source: Source,
    pub coefficient: f64,
    pub power: f64,
}

impl Nonlinearity {
    pub fn zero() -> Self {
        Self {
            source: Source::Zero,
            coefficient: 0.0,
            power: 1.0,
        }
    }

    pub fn eval(&self, t: &[f64], u: f64) -> f64 {
        let growth = if self.coefficient == 0.0 { 0.0 } else { self.coefficient * u.abs().powf(self.power) };
        self.source.eval(t) + growth
    }

    /// `f(t, ·)` is nondecreasing on `[0, ∞)`.
    pub fn monotone_in_u(&self) -> bool {
        self.coefficient >= 0.0 && self.power >= 0.0
    }

    /// `f ≥ 0` everywhere.
    pub fn nonnegative(&self) -> bool {
        let src = match &self.source {
            Source::Zero => true,
            Source::Constant { value } => *value >= 0.0,
            Source::Gaussian { amplitude, .. } => *amplitude >= 0.0,
        };
        src && self.coefficient >= 0.0
    }

    /// `Φ_r(t) = source(t) + c (r φ(t))^p`, dominating `f(t, y φ(t))` for
    /// `|y| ≤ r`.
    pub fn dominator(&self, r: f64, weight: &Weight, t: &[f64]) -> f64 {
        let growth = if self.coefficient == 0.0 {
            0.0
        } else {
            self.coefficient.abs() * (self.power * (r.ln() + weight.ln(t))).exp()
        };
        self.source.eval(t) + growth
    }
}
