//! Metric compactifications of unbounded Euclidean domains.
//!
//! A compactification is a map `κ: Ā → X` into a compact metric space with
//! dense image. Points of `X \ κ(Ā)` are the points at infinity. Every map here
//! works with explicit coordinates on `X`:
//!
//! | kind                 | Ā           | X                    | κ(x)            |
//! |----------------------|-------------|----------------------|-----------------|
//! | `Ball`               | `R^n`       | closed unit ball     | `x / (1+‖x‖)`   |
//! | `OnePoint`           | `R^n`       | ball, boundary = ∞   | `x / (1+‖x‖)`   |
//! | `OnePointHalfLine`   | `[0,∞)`     | `[0,1]`, `1 = ∞`     | `x / (1+x)`     |
//! | `TwoPointLine`       | `R`         | `[-1,1]`, `±1 = ±∞`  | `x / (1+|x|)`   |
//! | `Interval`           | `[lo,hi]`   | `[lo,hi]`            | identity        |
//! | `Product`            | product     | product, max metric  | componentwise   |
//!
//! Limits at infinity points are certified numerically by [`kappa_limit`],
//! which samples preimages of shrinking metric balls.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Round-trip tolerance used when deciding whether two points of `X` agree.
const POINT_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CompactMap {
    /// Directional compactification of `R^n`: one infinity point per direction.
    Ball { dim: usize },
    /// Alexandroff compactification of `R^n`: the whole boundary sphere is a
    /// single point.
    OnePoint { dim: usize },
    /// `[0, ∞]` with a single point at infinity.
    OnePointHalfLine,
    /// `[-∞, ∞]`.
    TwoPointLine,
    /// A bounded factor, already compact.
    Interval { lo: f64, hi: f64 },
    /// Componentwise product; metric is the max of the factor metrics.
    Product { factors: Vec<CompactMap> },
}

/// End of a one-dimensional factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Lower,
    Upper,
}

/// A point of the compact space `X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum XPoint {
    /// `κ(x)` for `x` in the domain; stores the domain coordinates.
    Finite { coords: Vec<f64> },
    /// A point of `X \ κ(Ā)`; stores its coordinates in `X`.
    Infinity { label: String, coords: Vec<f64> },
}

impl XPoint {
    pub fn finite(coords: Vec<f64>) -> Self {
        XPoint::Finite { coords }
    }

    pub fn infinity(label: impl Into<String>, coords: Vec<f64>) -> Self {
        XPoint::Infinity {
            label: label.into(),
            coords,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, XPoint::Infinity { .. })
    }

    /// Coordinates of the point in `X`.
    pub fn x_coords(&self, map: &CompactMap) -> Vec<f64> {
        match self {
            XPoint::Finite { coords } => map.forward(coords),
            XPoint::Infinity { coords, .. } => coords.clone(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            XPoint::Finite { coords } => format!("{coords:?}"),
            XPoint::Infinity { label, .. } => label.clone(),
        }
    }
}

impl fmt::Display for XPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// `x / (1 + |x|)`, extended by `±1` at `±∞`.
#[inline]
fn squash(x: f64) -> f64 {
    if x.is_infinite() {
        x.signum()
    } else {
        x / (1.0 + x.abs())
    }
}

/// Distance on `[0, ∞]`: `|h(a) - h(b)|` with `h(x) = x/(1+x)` and `h(∞) = 1`.
pub fn halfline_metric(a: f64, b: f64) -> f64 {
    (squash(a) - squash(b)).abs()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Maps `y` from the open unit ball back to `R^n`.
pub fn ball_inverse(y: &[f64]) -> Result<Vec<f64>> {
    let r = norm(y);
    if !(r < 1.0) {
        return Err(Error::Domain(format!(
            "point {y:?} with norm {r} is not in the open unit ball"
        )));
    }
    Ok(y.iter().map(|v| v / (1.0 - r)).collect())
}

/// `κ(x) = x / (1 + ‖x‖)`.
pub fn ball_map(x: &[f64]) -> Vec<f64> {
    let r = norm(x);
    x.iter().map(|v| v / (1.0 + r)).collect()
}

impl CompactMap {
    pub fn product(factors: Vec<CompactMap>) -> Self {
        CompactMap::Product { factors }
    }

    /// Dimension of the domain `Ā` (and of the coordinates used on `X`).
    pub fn dim(&self) -> usize {
        match self {
            CompactMap::Ball { dim } | CompactMap::OnePoint { dim } => *dim,
            CompactMap::OnePointHalfLine | CompactMap::TwoPointLine | CompactMap::Interval { .. } => 1,
            CompactMap::Product { factors } => factors.iter().map(CompactMap::dim).sum(),
        }
    }

    /// Splits a coordinate vector into per-factor slices.
    fn split<'a>(&self, v: &'a [f64]) -> Vec<&'a [f64]> {
        match self {
            CompactMap::Product { factors } => {
                let mut out = Vec::with_capacity(factors.len());
                let mut at = 0;
                for f in factors {
                    let d = f.dim();
                    out.push(&v[at..at + d]);
                    at += d;
                }
                out
            }
            _ => vec![v],
        }
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        match self {
            CompactMap::Ball { .. } | CompactMap::OnePoint { .. } => ball_map(x),
            CompactMap::OnePointHalfLine | CompactMap::TwoPointLine => vec![squash(x[0])],
            CompactMap::Interval { .. } => vec![x[0]],
            CompactMap::Product { factors } => factors
                .iter()
                .zip(self.split(x))
                .flat_map(|(f, part)| f.forward(part))
                .collect(),
        }
    }

    /// Inverse of `κ` on `κ(Ā)`; infinity points have no preimage.
    pub fn inverse(&self, y: &[f64]) -> Result<Vec<f64>> {
        match self {
            CompactMap::Ball { .. } | CompactMap::OnePoint { .. } => ball_inverse(y),
            CompactMap::OnePointHalfLine => {
                let v = y[0];
                if !(0.0..1.0).contains(&v) {
                    return Err(Error::Domain(format!("{v} is not in κ([0,∞)) = [0,1)")));
                }
                Ok(vec![v / (1.0 - v)])
            }
            CompactMap::TwoPointLine => {
                let v = y[0];
                if !(v.abs() < 1.0) {
                    return Err(Error::Domain(format!("{v} is not in κ(R) = (-1,1)")));
                }
                Ok(vec![v / (1.0 - v.abs())])
            }
            CompactMap::Interval { lo, hi } => {
                let v = y[0];
                if !(v >= *lo && v <= *hi) {
                    return Err(Error::Domain(format!("{v} is outside [{lo}, {hi}]")));
                }
                Ok(vec![v])
            }
            CompactMap::Product { factors } => {
                let mut out = Vec::with_capacity(y.len());
                for (f, part) in factors.iter().zip(self.split(y)) {
                    out.extend(f.inverse(part)?);
                }
                Ok(out)
            }
        }
    }

    /// Metric on `X`, in `X` coordinates.
    pub fn metric(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            CompactMap::Ball { .. } => euclid(a, b),
            CompactMap::OnePoint { .. } => {
                // quotient metric collapsing the boundary sphere to one point
                let direct = euclid(a, b);
                let via_boundary = (1.0 - norm(a)).max(0.0) + (1.0 - norm(b)).max(0.0);
                direct.min(via_boundary)
            }
            CompactMap::OnePointHalfLine | CompactMap::TwoPointLine | CompactMap::Interval { .. } => {
                (a[0] - b[0]).abs()
            }
            CompactMap::Product { factors } => factors
                .iter()
                .zip(self.split(a).into_iter().zip(self.split(b)))
                .map(|(f, (pa, pb))| f.metric(pa, pb))
                .fold(0.0, f64::max),
        }
    }

    /// Whether `y` (in `X` coordinates) is a point at infinity.
    pub fn is_infinity(&self, y: &[f64]) -> bool {
        match self {
            CompactMap::Ball { .. } | CompactMap::OnePoint { .. } => norm(y) >= 1.0,
            CompactMap::OnePointHalfLine => y[0] >= 1.0,
            CompactMap::TwoPointLine => y[0].abs() >= 1.0,
            CompactMap::Interval { .. } => false,
            CompactMap::Product { factors } => factors
                .iter()
                .zip(self.split(y))
                .any(|(f, part)| f.is_infinity(part)),
        }
    }

    /// Distance between `κ(x)` for a domain point and a point of `X`.
    pub fn distance_to(&self, x: &[f64], y: &[f64]) -> f64 {
        self.metric(&self.forward(x), y)
    }

    /// The one-dimensional factors of the map, when it is a product of them.
    pub fn factors_1d(&self) -> Option<Vec<CompactMap>> {
        match self {
            CompactMap::OnePointHalfLine | CompactMap::TwoPointLine | CompactMap::Interval { .. } => {
                Some(vec![self.clone()])
            }
            CompactMap::Ball { dim: 1 } => Some(vec![CompactMap::TwoPointLine]),
            CompactMap::Product { factors } => {
                let mut out = Vec::new();
                for f in factors {
                    out.extend(f.factors_1d()?);
                }
                Some(out)
            }
            _ => None,
        }
    }

    /// Infinity ends of a one-dimensional factor, as `(side, X coordinate)`.
    pub(crate) fn infinity_ends(&self) -> Vec<(Side, f64)> {
        match self {
            CompactMap::OnePointHalfLine => vec![(Side::Upper, 1.0)],
            CompactMap::TwoPointLine => vec![(Side::Lower, -1.0), (Side::Upper, 1.0)],
            _ => Vec::new(),
        }
    }

    /// Representative points at infinity.
    ///
    /// Finite sets are returned in full. Parameterised sets (the boundary
    /// sphere of `Ball`, the faces of a product) are sampled with `resolution`
    /// points along each free coordinate.
    pub fn infinity_points(&self, resolution: usize) -> Vec<XPoint> {
        let resolution = resolution.max(2);
        match self {
            CompactMap::OnePointHalfLine => vec![XPoint::infinity("+inf", vec![1.0])],
            CompactMap::TwoPointLine => vec![
                XPoint::infinity("-inf", vec![-1.0]),
                XPoint::infinity("+inf", vec![1.0]),
            ],
            CompactMap::OnePoint { dim } => {
                let mut c = vec![0.0; *dim];
                c[0] = 1.0;
                vec![XPoint::infinity("inf", c)]
            }
            CompactMap::Ball { dim } => {
                let mut pts = Vec::new();
                for axis in 0..*dim {
                    for sign in [-1.0, 1.0] {
                        let mut c = vec![0.0; *dim];
                        c[axis] = sign;
                        pts.push(XPoint::infinity(format!("dir{c:?}"), c));
                    }
                }
                if *dim >= 2 {
                    let s = 1.0 / (*dim as f64).sqrt();
                    for mask in 0..(1usize << dim.min(&3)) {
                        let c: Vec<f64> = (0..*dim)
                            .map(|i| if mask >> i & 1 == 1 { -s } else { s })
                            .collect();
                        pts.push(XPoint::infinity(format!("dir{c:?}"), c));
                    }
                }
                pts
            }
            CompactMap::Interval { .. } => Vec::new(),
            CompactMap::Product { factors } => {
                let Some(_) = self.factors_1d() else {
                    return Vec::new();
                };
                let grids: Vec<Vec<f64>> = factors.iter().map(|f| f.face_grid(resolution)).collect();
                let mut pts: Vec<XPoint> = Vec::new();
                for (i, f) in factors.iter().enumerate() {
                    for (_, end) in f.infinity_ends() {
                        let mut combos: Vec<Vec<f64>> = vec![Vec::new()];
                        for (j, g) in grids.iter().enumerate() {
                            let choices: Vec<f64> = if j == i { vec![end] } else { g.clone() };
                            combos = combos
                                .into_iter()
                                .flat_map(|c| {
                                    choices.iter().map(move |v| {
                                        let mut c = c.clone();
                                        c.push(*v);
                                        c
                                    })
                                })
                                .collect();
                        }
                        for c in combos {
                            if pts.iter().any(|p| match p {
                                XPoint::Infinity { coords, .. } => self.metric(coords, &c) < POINT_EPS,
                                _ => false,
                            }) {
                                continue;
                            }
                            let label = self.label_x(&c);
                            pts.push(XPoint::infinity(label, c));
                        }
                    }
                }
                pts
            }
        }
    }

    /// Evenly spaced `X` coordinates of a 1-D factor, endpoints included.
    fn face_grid(&self, resolution: usize) -> Vec<f64> {
        let (a, b) = match self {
            CompactMap::OnePointHalfLine => (0.0, 1.0),
            CompactMap::TwoPointLine => (-1.0, 1.0),
            CompactMap::Interval { lo, hi } => (*lo, *hi),
            _ => return Vec::new(),
        };
        (0..resolution)
            .map(|k| a + (b - a) * k as f64 / (resolution - 1) as f64)
            .collect()
    }

    /// Human-readable label of an `X` point of a product of 1-D factors.
    pub fn label_x(&self, y: &[f64]) -> String {
        let factors = self.factors_1d().unwrap_or_else(|| vec![self.clone()]);
        if factors.len() != y.len() {
            return format!("{y:?}");
        }
        let parts: Vec<String> = factors
            .iter()
            .zip(y)
            .map(|(f, v)| {
                if f.is_infinity(&[*v]) {
                    if *v > 0.0 { "+inf".to_string() } else { "-inf".to_string() }
                } else {
                    match f.inverse(&[*v]) {
                        Ok(x) => format!("{:.6}", x[0]),
                        Err(_) => format!("{v}"),
                    }
                }
            })
            .collect();
        format!("({})", parts.join(", "))
    }

    /// Draws `n` domain points whose images approach `target` (in `X`
    /// coordinates) at geometrically spread distances. Returned as a flat
    /// array of `n * dim` coordinates.
    pub fn sample_near(&self, target: &[f64], n: usize, cap: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let dim = self.dim();
        let scales = ((1.0 + cap).log2().ceil() as u32 + 2).max(4);
        let mut out = Vec::with_capacity(n * dim);
        let mut buf = Vec::with_capacity(dim);
        for _ in 0..n {
            buf.clear();
            self.sample_one(target, scales, cap, rng, &mut buf);
            out.extend_from_slice(&buf);
        }
        out
    }

    fn sample_one(&self, target: &[f64], scales: u32, cap: f64, rng: &mut ChaCha8Rng, out: &mut Vec<f64>) {
        // smallest admissible distance to the boundary keeps ‖x‖ ≤ cap
        let edge = 1.0 / (1.0 + cap);
        let gap = |rng: &mut ChaCha8Rng| -> f64 {
            let i = rng.random_range(1..=scales);
            let u: f64 = 1.0 - rng.random::<f64>();
            u * 0.5f64.powi(i as i32)
        };
        match self {
            CompactMap::OnePointHalfLine | CompactMap::TwoPointLine | CompactMap::Interval { .. } => {
                let c = target[0];
                let (lo, hi) = match self {
                    CompactMap::OnePointHalfLine => (0.0, 1.0 - edge),
                    CompactMap::TwoPointLine => (-1.0 + edge, 1.0 - edge),
                    CompactMap::Interval { lo, hi } => (*lo, *hi),
                    _ => unreachable!(),
                };
                let span = match self {
                    CompactMap::Interval { lo, hi } => (hi - lo).max(f64::MIN_POSITIVE),
                    _ => 1.0,
                };
                let e = gap(rng) * span;
                let up = c < hi && (c <= lo || rng.random::<bool>());
                let y = if up { c + e } else { c - e };
                let y = y.clamp(lo, hi);
                // inverse cannot fail on the clamped range
                out.extend(self.inverse(&[y]).unwrap_or_else(|_| vec![y]));
            }
            CompactMap::Ball { dim } | CompactMap::OnePoint { dim } => {
                let r_target = norm(target);
                let dir: Vec<f64> = if matches!(self, CompactMap::OnePoint { .. }) && r_target >= 1.0 {
                    random_unit(*dim, rng)
                } else if r_target >= 1.0 {
                    let j = rng.random_range(0..=scales);
                    let eta = (1.0 - rng.random::<f64>()) * 0.5f64.powi(j as i32);
                    let w = random_unit(*dim, rng);
                    let v: Vec<f64> = target
                        .iter()
                        .zip(&w)
                        .map(|(c, w)| c / r_target + eta * w)
                        .collect();
                    let nv = norm(&v);
                    v.into_iter().map(|x| x / nv).collect()
                } else {
                    Vec::new()
                };
                let y: Vec<f64> = if r_target >= 1.0 {
                    let e = gap(rng).max(edge);
                    dir.iter().map(|d| d * (1.0 - e)).collect()
                } else {
                    let e = gap(rng);
                    let w = random_unit(*dim, rng);
                    let mut y: Vec<f64> = target.iter().zip(&w).map(|(c, w)| c + e * w).collect();
                    let ny = norm(&y);
                    if ny > 1.0 - edge {
                        let s = (1.0 - edge) / ny;
                        y.iter_mut().for_each(|v| *v *= s);
                    }
                    y
                };
                out.extend(ball_inverse(&y).unwrap_or_else(|_| vec![0.0; *dim]));
            }
            CompactMap::Product { factors } => {
                for (f, part) in factors.iter().zip(self.split(target)) {
                    f.sample_one(part, scales, cap, rng, out);
                }
            }
        }
    }
}

fn random_unit(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Configuration of the numerical ε–δ limit certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitConfig {
    /// Strictly decreasing ball radii δ.
    pub levels: Vec<f64>,
    /// Oscillation threshold at the finest level.
    pub tol: f64,
    /// Number of preimage samples drawn.
    pub samples: usize,
    /// Largest domain norm sampled.
    pub cap: f64,
    pub seed: u64,
}

impl Default for LimitConfig {
    fn default() -> Self {
        Self {
            levels: dyadic_levels(1, 40),
            tol: 1e-6,
            samples: 1 << 14,
            cap: 1e13,
            seed: 0,
        }
    }
}

impl LimitConfig {
    pub fn with_levels(mut self, levels: Vec<f64>) -> Self {
        self.levels = levels;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// `2^{-k}` for `k = first..=last`.
pub fn dyadic_levels(first: u32, last: u32) -> Vec<f64> {
    (first..=last).map(|k| 0.5f64.powi(k as i32)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LimitStatus {
    Converged { value: f64 },
    NoLimit,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelEvidence {
    pub delta: f64,
    pub oscillation: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitResult {
    pub status: LimitStatus,
    pub evidence: Vec<LevelEvidence>,
}

impl LimitResult {
    pub fn value(&self) -> Option<f64> {
        match self.status {
            LimitStatus::Converged { value } => Some(value),
            _ => None,
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self.status, LimitStatus::Converged { .. })
    }

    /// Oscillation at the finest level that had samples.
    pub fn finest_oscillation(&self) -> Option<f64> {
        self.evidence
            .iter()
            .rev()
            .find(|e| e.samples > 0)
            .map(|e| e.oscillation)
    }
}

/// Numerical κ-limit of `f` at an infinity point.
///
/// Samples `f` on preimages of the metric balls `B(point, δ)` for each level δ
/// and reports the oscillation `max - min` on each. The limit is certified when
/// the oscillation at the finest level is below `cfg.tol`; the reported value
/// is `f` at the sample closest to the point.
pub fn kappa_limit<F>(f: &F, point: &XPoint, map: &CompactMap, cfg: &LimitConfig) -> Result<LimitResult>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let XPoint::Infinity { coords: target, .. } = point else {
        return Err(Error::InvalidArgument(format!(
            "kappa_limit needs an infinity point, got {point}"
        )));
    };
    if !map.is_infinity(target) {
        return Err(Error::InvalidArgument(format!("{point} is not a point at infinity")));
    }
    if cfg.levels.is_empty() || cfg.levels.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::InvalidArgument("levels must be positive and non-empty".into()));
    }
    if cfg.levels.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument("levels must be strictly decreasing".into()));
    }

    let dim = map.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let flat = map.sample_near(target, cfg.samples, cfg.cap, &mut rng);
    let mut samples: Vec<(f64, f64)> = flat
        .chunks_exact(dim)
        .filter_map(|x| {
            let v = f(x);
            v.is_finite().then(|| (map.distance_to(x, target), v))
        })
        .collect();
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));

    // running extrema from the point outward
    let mut lo = Vec::with_capacity(samples.len());
    let mut hi = Vec::with_capacity(samples.len());
    let (mut mn, mut mx) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(_, v) in &samples {
        mn = mn.min(v);
        mx = mx.max(v);
        lo.push(mn);
        hi.push(mx);
    }

    let mut evidence = Vec::with_capacity(cfg.levels.len());
    let mut empty = false;
    for &delta in &cfg.levels {
        let count = samples.partition_point(|s| s.0 < delta);
        let oscillation = if count == 0 {
            empty = true;
            f64::NAN
        } else {
            hi[count - 1] - lo[count - 1]
        };
        evidence.push(LevelEvidence {
            delta,
            oscillation,
            samples: count,
        });
    }

    let status = if empty {
        LimitStatus::Inconclusive
    } else {
        let finest = evidence.last().map(|e| e.oscillation).unwrap_or(f64::NAN);
        let monotone = evidence
            .windows(2)
            .all(|w| w[1].oscillation <= w[0].oscillation + f64::EPSILON * w[0].oscillation.abs());
        if finest < cfg.tol && monotone {
            LimitStatus::Converged { value: samples[0].1 }
        } else {
            LimitStatus::NoLimit
        }
    };
    Ok(LimitResult { status, evidence })
}

/// The continuous extension `f̃: X → R` of a function on the domain.
pub struct Extension<F> {
    f: F,
    map: CompactMap,
    cfg: LimitConfig,
    values: Vec<(XPoint, f64)>,
}

impl<F> fmt::Debug for Extension<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Extension")
            .field("map", &self.map)
            .field("values", &self.values)
            .finish_non_exhaustive()
    }
}

impl<F: Fn(&[f64]) -> f64> Extension<F> {
    /// Values at the representative infinity points.
    pub fn infinity_values(&self) -> &[(XPoint, f64)] {
        &self.values
    }

    /// Value at the representative infinity point with the given label.
    pub fn value_at(&self, label: &str) -> Option<f64> {
        self.values
            .iter()
            .find(|(p, _)| p.label() == label)
            .map(|(_, v)| *v)
    }

    /// Evaluates the extension at a point of `X`, given in `X` coordinates.
    pub fn eval(&self, y: &[f64]) -> Result<f64> {
        if !self.map.is_infinity(y) {
            let x = self.map.inverse(y)?;
            return Ok((self.f)(&x));
        }
        if let Some((_, v)) = self.values.iter().find(|(p, _)| match p {
            XPoint::Infinity { coords, .. } => self.map.metric(coords, y) < POINT_EPS,
            _ => false,
        }) {
            return Ok(*v);
        }
        let point = XPoint::infinity(self.map.label_x(y), y.to_vec());
        let res = kappa_limit(&self.f, &point, &self.map, &self.cfg)?;
        res.value().ok_or(Error::NoLimit {
            point: point.label(),
        })
    }

    /// Evaluates at a domain point: `f̃(κ(x)) = f(x)`.
    pub fn eval_domain(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// Builds the continuous extension of `f` to the compactification, or fails
/// naming the infinity points where no limit could be certified.
pub fn extend<F>(f: F, map: &CompactMap, cfg: &LimitConfig) -> Result<Extension<F>>
where
    F: Fn(&[f64]) -> f64,
{
    let mut values = Vec::new();
    let mut failures = Vec::new();
    for point in map.infinity_points(5) {
        let res = kappa_limit(&f, &point, map, cfg)?;
        match res.status {
            LimitStatus::Converged { value } => values.push((point, value)),
            LimitStatus::NoLimit => failures.push(format!("{point} (no limit)")),
            LimitStatus::Inconclusive => failures.push(format!("{point} (inconclusive)")),
        }
    }
    if !failures.is_empty() {
        return Err(Error::ExtensionFailed { points: failures });
    }
    Ok(Extension {
        f,
        map: map.clone(),
        cfg: cfg.clone(),
        values,
    })
}
