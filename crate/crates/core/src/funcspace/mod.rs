//! Discrete weighted spaces `C^m_{κ,φ}`.
//!
//! A [`WeightedGridFunction`] stores samples of `f` on a tensor grid over the
//! truncated domain together with the weight `φ`, the derivative order `m`
//! and (optionally) the values of `Γ_p f` on the infinity faces of the
//! compactification.

mod ascoli;
mod examples;
mod grid;
mod io;

use serde::{Deserialize, Serialize};

use crate::compactify::{kappa_limit, CompactMap, LimitConfig, LimitStatus, Side, XPoint};
use crate::{Error, Result};

pub use ascoli::{precompactness_report, AscoliConfig, PrecompactnessReport};
pub use examples::{bump_chain, gaussian_family, gaussian_family_separation};
pub use grid::TensorGrid;
pub use io::{read_csv, write_csv, Sidecar};

/// Positive weight `φ` on the domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Weight {
    Unit,
    /// `exp(-rate · x_axis²)`
    Gaussian { axis: usize, rate: f64 },
    /// `exp(-rate · |x_axis|)`
    Exponential { axis: usize, rate: f64 },
}

impl Weight {
    pub fn ln(&self, x: &[f64]) -> f64 {
        match self {
            Weight::Unit => 0.0,
            Weight::Gaussian { axis, rate } => -rate * x[*axis] * x[*axis],
            Weight::Exponential { axis, rate } => -rate * x[*axis].abs(),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.ln(x).exp()
    }

    pub fn describe(&self) -> String {
        match self {
            Weight::Unit => "1".into(),
            Weight::Gaussian { axis, rate } => format!("exp(-{rate}*x{axis}^2)"),
            Weight::Exponential { axis, rate } => format!("exp(-{rate}*|x{axis}|)"),
        }
    }
}

/// Multi-index `p` with order `|p| = Σ p_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, axis: usize) -> Self {
        let mut v = vec![0; n];
        v[axis] = 1;
        MultiIndex(v)
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// All multi-indices in `n` variables with order at most `m` (the set `P_m`).
    pub fn up_to(n: usize, m: u32) -> Vec<MultiIndex> {
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|v: Vec<u32>| {
                    let used: u32 = v.iter().sum();
                    (0..=m - used).map(move |k| {
                        let mut w = v.clone();
                        w.push(k);
                        w
                    })
                })
                .collect();
        }
        let mut out: Vec<MultiIndex> = out.into_iter().map(MultiIndex).collect();
        out.sort_by_key(|p| (p.order(), std::cmp::Reverse(p.0.clone())));
        out
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Stored values of `Γ_p f` on one infinity face. `values[j]` belongs to the
/// `j`-th node of [`TensorGrid::face_nodes`]`(axis)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceValues {
    pub axis: usize,
    pub side: Side,
    pub p: MultiIndex,
    pub values: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedGridFunction {
    grid: TensorGrid,
    samples: Vec<f64>,
    weight: Weight,
    order: u32,
    #[serde(default)]
    faces: Vec<FaceValues>,
}

impl WeightedGridFunction {
    pub fn new(grid: TensorGrid, samples: Vec<f64>, weight: Weight, order: u32) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "{} samples for a grid of {} nodes",
                samples.len(),
                grid.len()
            )));
        }
        for (axis, n) in grid.shape().into_iter().enumerate() {
            if n < order as usize + 1 {
                return Err(Error::GridTooCoarse {
                    axis,
                    nodes: n,
                    needed: order as usize + 1,
                });
            }
        }
        match &weight {
            Weight::Gaussian { axis, .. } | Weight::Exponential { axis, .. } if *axis >= grid.dim() => {
                return Err(Error::InvalidArgument(format!("weight axis {axis} out of range")));
            }
            _ => {}
        }
        if let Some(k) = (0..grid.len()).find(|&k| !(weight.value(&grid.point(k)) > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "weight is not positive at node {:?}",
                grid.point(k)
            )));
        }
        Ok(Self {
            grid,
            samples,
            weight,
            order,
            faces: Vec::new(),
        })
    }

    pub fn from_fn(grid: TensorGrid, weight: Weight, order: u32, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let samples = grid.points().map(|p| f(&p)).collect();
        Self::new(grid, samples, weight, order)
    }

    /// Builds `f` from its quotient `q = f/φ`.
    pub fn from_quotient(grid: TensorGrid, weight: Weight, order: u32, q: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let samples = grid.points().map(|p| q(&p) * weight.value(&p)).collect();
        Self::new(grid, samples, weight, order)
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            samples: vec![0.0; self.samples.len()],
            faces: Vec::new(),
            ..self.clone()
        }
    }

    pub fn grid(&self) -> &TensorGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn faces(&self) -> &[FaceValues] {
        &self.faces
    }

    pub fn with_faces(mut self, faces: Vec<FaceValues>) -> Self {
        self.faces = faces;
        self
    }

    pub fn face(&self, axis: usize, side: Side, p: &MultiIndex) -> Option<&FaceValues> {
        self.faces
            .iter()
            .find(|fv| fv.axis == axis && fv.side == side && &fv.p == p)
    }

    /// Values of `f/φ` at the nodes.
    pub fn quotient(&self) -> Vec<f64> {
        self.samples
            .iter()
            .enumerate()
            .map(|(k, v)| v * (-self.weight.ln(&self.grid.point(k))).exp())
            .collect()
    }

    /// Interpolated `f/φ` at an arbitrary domain point (flat past the grid).
    pub fn quotient_at(&self, x: &[f64]) -> f64 {
        self.grid.interpolate(&self.quotient(), x)
    }

    /// Interpolated `f` at an arbitrary domain point, via the quotient.
    pub fn value_at(&self, x: &[f64]) -> f64 {
        self.quotient_at(x) * self.weight.value(x)
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.weight != other.weight || self.order != other.order {
            return Err(Error::InvalidArgument(
                "grid functions do not share grid, weight and order".into(),
            ));
        }
        Ok(())
    }

    /// `a·self + b·other`; face values are combined where both are present.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.compatible(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(u, v)| a * u + b * v)
            .collect();
        let faces = self
            .faces
            .iter()
            .filter_map(|fa| {
                let fb = other.face(fa.axis, fa.side, &fa.p)?;
                Some(FaceValues {
                    values: fa
                        .values
                        .iter()
                        .zip(&fb.values)
                        .map(|(x, y)| Some(a * (*x)? + b * (*y)?))
                        .collect(),
                    ..fa.clone()
                })
            })
            .collect();
        Ok(Self {
            samples,
            faces,
            ..self.clone()
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.linear_combination(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.linear_combination(1.0, other, -1.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|v| c * v).collect(),
            faces: self
                .faces
                .iter()
                .map(|fv| FaceValues {
                    values: fv.values.iter().map(|v| v.map(|v| c * v)).collect(),
                    ..fv.clone()
                })
                .collect(),
            ..self.clone()
        }
    }

    /// Computes and stores `Γ_p f` on every infinity face for every `p ∈ P_m`.
    pub fn with_computed_faces(mut self, map: &CompactMap, cfg: &LimitConfig) -> Result<Self> {
        let mut faces = Vec::new();
        for p in MultiIndex::up_to(self.grid.dim(), self.order) {
            let gamma = gamma_p(&self, &p, map, cfg)?;
            faces.extend(gamma.faces);
        }
        self.faces = faces;
        Ok(self)
    }
}

/// Infinity faces `(axis, side)` of the compactified grid domain.
pub fn infinity_faces(grid: &TensorGrid, map: &CompactMap) -> Result<Vec<(usize, Side)>> {
    let factors = map.factors_1d().ok_or_else(|| {
        Error::InvalidArgument("grid functions need a product of one-dimensional factors".into())
    })?;
    if factors.len() != grid.dim() {
        return Err(Error::InvalidArgument(format!(
            "compactification has {} factors but the grid has {} axes",
            factors.len(),
            grid.dim()
        )));
    }
    Ok(factors
        .iter()
        .enumerate()
        .flat_map(|(a, f)| f.infinity_ends().into_iter().map(move |(s, _)| (a, s)))
        .collect())
}

/// Infinity points of a face, one per face node, in face-node order.
pub fn face_points(grid: &TensorGrid, map: &CompactMap, axis: usize, side: Side) -> Vec<XPoint> {
    let end = match side {
        Side::Upper => 1.0,
        Side::Lower => -1.0,
    };
    grid.face_nodes(axis)
        .into_iter()
        .map(|k| {
            let mut y = map.forward(&grid.point(k));
            y[axis] = end;
            XPoint::infinity(map.label_x(&y), y)
        })
        .collect()
}

/// First derivative along one axis: second-order central differences on the
/// (possibly nonuniform) interior, first-order one-sided at the two edges.
fn diff_axis(grid: &TensorGrid, values: &[f64], axis: usize) -> Vec<f64> {
    let ax = grid.axis(axis);
    let n = ax.len();
    let stride = grid.strides()[axis];
    let mut out = vec![0.0; values.len()];
    for (k, o) in out.iter_mut().enumerate() {
        let i = (k / stride) % n;
        *o = if i == 0 {
            (values[k + stride] - values[k]) / (ax[1] - ax[0])
        } else if i == n - 1 {
            (values[k] - values[k - stride]) / (ax[i] - ax[i - 1])
        } else {
            let h1 = ax[i] - ax[i - 1];
            let h2 = ax[i + 1] - ax[i];
            -h2 / (h1 * (h1 + h2)) * values[k - stride]
                + (h2 - h1) / (h1 * h2) * values[k]
                + h1 / (h2 * (h1 + h2)) * values[k + stride]
        };
    }
    out
}

/// Nodal values of `∂_p(f/φ)`. Mixed partials compose the per-axis stencil.
pub fn quotient_derivative(f: &WeightedGridFunction, p: &MultiIndex) -> Result<Vec<f64>> {
    if p.dim() != f.grid.dim() {
        return Err(Error::InvalidArgument(format!(
            "multi-index {p} does not match a {}-dimensional grid",
            f.grid.dim()
        )));
    }
    if p.order() > f.order {
        return Err(Error::InvalidArgument(format!(
            "|p| = {} exceeds the order m = {}",
            p.order(),
            f.order
        )));
    }
    let mut values = f.quotient();
    for (axis, &k) in p.0.iter().enumerate() {
        let nodes = f.grid.axis(axis).len();
        if k > 0 && nodes < k as usize + 1 {
            return Err(Error::GridTooCoarse {
                axis,
                nodes,
                needed: k as usize + 1,
            });
        }
        for _ in 0..k {
            values = diff_axis(&f.grid, &values, axis);
        }
    }
    Ok(values)
}

/// `‖f‖_{κ,φ} = max_{p ∈ P_m} sup |∂_p(f/φ)|` over the nodes and the stored
/// face values.
pub fn weighted_norm(f: &WeightedGridFunction) -> f64 {
    MultiIndex::up_to(f.grid.dim(), f.order)
        .iter()
        .map(|p| {
            // stencil sizes were validated at construction
            let nodal = quotient_derivative(f, p)
                .map(|d| d.iter().fold(0.0f64, |m, v| m.max(v.abs())))
                .unwrap_or(f64::NAN);
            let faces = f
                .faces
                .iter()
                .filter(|fv| &fv.p == p)
                .flat_map(|fv| fv.values.iter().flatten())
                .fold(0.0f64, |m, v| m.max(v.abs()));
            nodal.max(faces)
        })
        .fold(0.0, f64::max)
}

/// `Γ_p f` sampled on `X`: finite nodes pushed through `κ` plus the faces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaFunction {
    pub p: MultiIndex,
    /// `(κ(node), ∂_p(f/φ)(node))` in node order.
    pub finite: Vec<(Vec<f64>, f64)>,
    pub faces: Vec<FaceValues>,
    pub infinity: Vec<(XPoint, f64)>,
}

impl GammaFunction {
    pub fn sup_norm(&self) -> f64 {
        self.finite
            .iter()
            .map(|(_, v)| v.abs())
            .chain(self.infinity.iter().map(|(_, v)| v.abs()))
            .fold(0.0, f64::max)
    }

    /// All sampled values, finite points first.
    pub fn values(&self) -> Vec<f64> {
        self.finite
            .iter()
            .map(|(_, v)| *v)
            .chain(self.infinity.iter().map(|(_, v)| *v))
            .collect()
    }
}

/// `Γ_p f` on `X`. Face values come from the stored faces when present and
/// from [`kappa_limit`] of the interpolated `∂_p(f/φ)` otherwise.
pub fn gamma_p(
    f: &WeightedGridFunction,
    p: &MultiIndex,
    map: &CompactMap,
    cfg: &LimitConfig,
) -> Result<GammaFunction> {
    let d = quotient_derivative(f, p)?;
    let finite = (0..f.grid.len())
        .map(|k| (map.forward(&f.grid.point(k)), d[k]))
        .collect();
    let interp = |x: &[f64]| f.grid.interpolate(&d, x);
    let mut faces = Vec::new();
    let mut infinity = Vec::new();
    for (axis, side) in infinity_faces(&f.grid, map)? {
        let stored = f.face(axis, side, p);
        let mut values = Vec::new();
        for (j, point) in face_points(&f.grid, map, axis, side).into_iter().enumerate() {
            let v = match stored.and_then(|fv| fv.values.get(j).copied().flatten()) {
                Some(v) => v,
                None => {
                    let res = kappa_limit(&interp, &point, map, cfg)?;
                    match res.status {
                        LimitStatus::Converged { value } => value,
                        LimitStatus::NoLimit => return Err(Error::NoLimit { point: point.label() }),
                        LimitStatus::Inconclusive => {
                            return Err(Error::Inconclusive { point: point.label() })
                        }
                    }
                }
            };
            values.push(Some(v));
            infinity.push((point, v));
        }
        faces.push(FaceValues {
            axis,
            side,
            p: p.clone(),
            values,
        });
    }
    Ok(GammaFunction {
        p: p.clone(),
        finite,
        faces,
        infinity,
    })
}

/// Largest disagreement between the stored `p = 0` faces and `kappa_limit`
/// of `f/φ`. `None` when no `p = 0` face is stored.
pub fn face_consistency(f: &WeightedGridFunction, map: &CompactMap, cfg: &LimitConfig) -> Result<Option<f64>> {
    let p = MultiIndex::zero(f.grid.dim());
    if !f.faces.iter().any(|fv| fv.p == p) {
        return Ok(None);
    }
    let computed = gamma_p(&f.clone().with_faces(Vec::new()), &p, map, cfg)?;
    let mut worst = 0.0f64;
    for fv in f.faces.iter().filter(|fv| fv.p == p) {
        if let Some(c) = computed.faces.iter().find(|c| c.axis == fv.axis && c.side == fv.side) {
            for (a, b) in fv.values.iter().zip(&c.values) {
                if let (Some(a), Some(b)) = (a, b) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    Ok(Some(worst))
}
