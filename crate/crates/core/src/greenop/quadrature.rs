//! Gauss–Legendre rules and adaptive composite quadrature.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{erf, Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = x;
                p0 = 1.0;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// A Gauss–Legendre rule mapped onto arbitrary panels.
#[derive(Clone, Debug)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `(s, w)` pairs of the rule on `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (c + h * x, h * w))
    }

    pub fn integrate(&self, f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        self.on(a, b).map(|(s, w)| w * f(s)).sum()
    }

    /// Composite rule on `panels` equal panels of `[a, b]`.
    pub fn composite(&self, f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|k| self.integrate(f, a + k as f64 * h, a + (k + 1) as f64 * h))
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Stop when successive dyadic refinements differ by less than this.
    pub tol: f64,
    /// Nodes per panel.
    pub order: usize,
    pub max_refinements: u32,
    /// Upper end used for half-infinite ranges.
    pub truncation: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            order: 16,
            max_refinements: 14,
            truncation: 8.0,
        }
    }
}

/// Composite Gauss–Legendre on `[a, b]` with `1, 2, 4, …` panels until two
/// successive estimates differ by less than `cfg.tol`.
pub fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, cfg: &QuadConfig) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let rule = GaussRule::new(cfg.order);
    let mut prev = rule.composite(f, a, b, 1);
    let mut change = f64::INFINITY;
    for k in 1..=cfg.max_refinements {
        let next = rule.composite(f, a, b, 1 << k);
        change = (next - prev).abs();
        if change < cfg.tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureDiverged {
        estimate: prev,
        change,
    })
}

/// Known envelope of an integrand beyond the truncation point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailEnvelope {
    /// `|g(t)| ≤ amplitude · exp(-rate t²)`
    Gaussian { amplitude: f64, rate: f64 },
    /// `|g(t)| ≤ amplitude · exp(-rate t)`
    Exponential { amplitude: f64, rate: f64 },
}

impl TailEnvelope {
    /// Bound on `∫_R^∞ |g|`.
    pub fn bound(&self, r: f64) -> f64 {
        match *self {
            TailEnvelope::Gaussian { amplitude, rate } => {
                let k = rate.sqrt();
                amplitude * PI.sqrt() / (2.0 * k) * libm::erfc(k * r)
            }
            TailEnvelope::Exponential { amplitude, rate } => amplitude * (-rate * r).exp() / rate,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    /// Estimate on the truncated range.
    pub value: f64,
    /// Bound on the neglected tail (infinite when no envelope is known).
    pub tail_bound: f64,
}

/// `∫_lo^∞ g` computed on `[lo, cfg.truncation]` with a tail bound from the
/// envelope.
pub fn unbounded_quadrature(
    g: &dyn Fn(f64) -> f64,
    lo: f64,
    envelope: Option<TailEnvelope>,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let hi = cfg.truncation.max(lo);
    let value = adaptive(g, lo, hi, cfg)?;
    let tail_bound = envelope.map_or(f64::INFINITY, |e| e.bound(hi));
    Ok(QuadResult { value, tail_bound })
}

/// Nested adaptive quadrature over a box; the last axis is innermost.
pub fn box_quadrature(g: &dyn Fn(&[f64]) -> f64, bounds: &[(f64, f64)], cfg: &QuadConfig) -> Result<f64> {
    fn rec(g: &dyn Fn(&[f64]) -> f64, bounds: &[(f64, f64)], prefix: &[f64], cfg: &QuadConfig) -> Result<f64> {
        let depth = prefix.len();
        let (a, b) = bounds[depth];
        if depth + 1 == bounds.len() {
            let mut buf = prefix.to_vec();
            buf.push(0.0);
            let inner = |s: f64| {
                let mut x = buf.clone();
                x[depth] = s;
                g(&x)
            };
            return adaptive(&inner, a, b, cfg);
        }
        let err = std::cell::RefCell::new(None);
        let outer = |s: f64| {
            let mut p = prefix.to_vec();
            p.push(s);
            match rec(g, bounds, &p, cfg) {
                Ok(v) => v,
                Err(e) => {
                    err.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            }
        };
        let v = adaptive(&outer, a, b, cfg);
        if let Some(e) = err.into_inner() {
            return Err(e);
        }
        v
    }
    if bounds.iter().any(|(a, b)| !(a.is_finite() && b.is_finite())) {
        return Err(Error::InvalidArgument("box bounds must be finite".into()));
    }
    rec(g, bounds, &[], cfg)
}

/// `∫_0^x e^{-rate (x-t)²} dt = √π/(2√rate) · erf(√rate · x)`.
pub fn gaussian_window_integral(rate: f64, len: f64) -> f64 {
    let k = rate.sqrt();
    PI.sqrt() / (2.0 * k) * erf(k * len)
}
