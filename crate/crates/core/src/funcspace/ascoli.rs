//! Finite surrogate of the three-condition precompactness criterion.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{face_points, gamma_p, infinity_faces, quotient_derivative, MultiIndex, WeightedGridFunction};
use crate::compactify::{dyadic_levels, CompactMap, LimitConfig};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AscoliConfig {
    /// Tested ε values.
    pub eps_ladder: Vec<f64>,
    /// Radii around infinity points used for condition 3.
    pub deltas: Vec<f64>,
    /// Used for face values that are not stored.
    pub limit: LimitConfig,
}

impl Default for AscoliConfig {
    fn default() -> Self {
        Self {
            eps_ladder: vec![0.1, 0.03, 0.01],
            deltas: dyadic_levels(1, 40),
            limit: LimitConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundWitness {
    pub p: MultiIndex,
    /// `max_F max_nodes |∂_p(f/φ)|`
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusWitness {
    pub eps: f64,
    /// Witness δ: every pair of neighbouring nodes closer than this satisfies
    /// the ε bound, uniformly over the family. Zero when none does.
    pub delta: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfinityWitness {
    pub point: String,
    pub p: MultiIndex,
    /// Smallest radius at which grid nodes were found.
    pub delta: Option<f64>,
    /// `sup_F |Γ_p f(x) - ∂_p(f/φ)(y)|` over nodes `y` in that ball.
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecompactnessReport {
    pub uniformly_bounded: bool,
    pub bounds: Vec<BoundWitness>,
    pub equicontinuous_interior: bool,
    /// Largest difference of `∂_p(f/φ)` between neighbouring nodes.
    pub worst_modulus: f64,
    pub modulus: Vec<ModulusWitness>,
    pub equiconvergent_at_infinity: bool,
    pub worst_deviation: f64,
    pub infinity: Vec<InfinityWitness>,
    pub verdict: bool,
}

/// Pairs of neighbouring nodes (offsets in {-1,0,1} per axis, diagonals
/// included), each listed once, with their distance.
fn neighbour_pairs(grid: &super::TensorGrid) -> Vec<(usize, usize, f64)> {
    let d = grid.dim();
    let shape = grid.shape();
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(d as u32))
        .map(|mut c| {
            (0..d)
                .map(|_| {
                    let o = (c % 3) as i64 - 1;
                    c /= 3;
                    o
                })
                .collect::<Vec<i64>>()
        })
        // keep one of each ±offset pair
        .filter(|o| o.iter().find(|v| **v != 0).is_some_and(|v| *v > 0))
        .collect();
    let mut out = Vec::new();
    for k in 0..grid.len() {
        let idx = grid.multi(k);
        for off in &offsets {
            let j: Option<Vec<usize>> = idx
                .iter()
                .zip(off)
                .zip(&shape)
                .map(|((i, o), n)| {
                    let v = *i as i64 + o;
                    (v >= 0 && v < *n as i64).then_some(v as usize)
                })
                .collect();
            if let Some(j) = j {
                let a = grid.point(k);
                let b = grid.point(grid.flat(&j));
                let dist = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
                out.push((k, grid.flat(&j), dist));
            }
        }
    }
    out
}

/// Checks the three conditions on a finite family sharing grid, weight and
/// order. Members are processed in parallel; reductions run in member order.
pub fn precompactness_report(
    family: &[WeightedGridFunction],
    map: &CompactMap,
    cfg: &AscoliConfig,
) -> Result<PrecompactnessReport> {
    let Some(first) = family.first() else {
        return Err(Error::InvalidArgument("empty family".into()));
    };
    for f in &family[1..] {
        f.compatible(first)?;
    }
    let grid = first.grid();
    let p_set = MultiIndex::up_to(grid.dim(), first.order());
    let faces = infinity_faces(grid, map)?;
    let pairs = neighbour_pairs(grid);

    // derivative grids and Γ_p face values, per member and p
    type Member = Vec<(Vec<f64>, Vec<f64>)>;
    let members: Vec<Member> = family
        .par_iter()
        .map(|f| {
            p_set
                .iter()
                .map(|p| {
                    let d = quotient_derivative(f, p)?;
                    let g = gamma_p(f, p, map, &cfg.limit)?;
                    Ok((d, g.infinity.iter().map(|(_, v)| *v).collect()))
                })
                .collect::<Result<Member>>()
        })
        .collect::<Result<Vec<_>>>()?;

    // condition 1
    let bounds: Vec<BoundWitness> = p_set
        .iter()
        .enumerate()
        .map(|(pi, p)| BoundWitness {
            p: p.clone(),
            bound: members
                .iter()
                .flat_map(|m| m[pi].0.iter().chain(&m[pi].1))
                .fold(0.0f64, |a, v| a.max(v.abs())),
        })
        .collect();
    let uniformly_bounded = bounds.iter().all(|b| b.bound.is_finite());

    // condition 2
    let pair_diff: Vec<f64> = pairs
        .iter()
        .map(|&(a, b, _)| {
            members
                .iter()
                .flat_map(|m| m.iter().map(move |(d, _)| (d[a] - d[b]).abs()))
                .fold(0.0f64, f64::max)
        })
        .collect();
    let worst_modulus = pair_diff.iter().copied().fold(0.0, f64::max);
    let modulus: Vec<ModulusWitness> = cfg
        .eps_ladder
        .iter()
        .map(|&eps| {
            // first neighbour distance at which the bound breaks
            let broken = pairs
                .iter()
                .zip(&pair_diff)
                .filter(|(_, d)| **d >= eps)
                .map(|(p, _)| p.2)
                .fold(f64::INFINITY, f64::min);
            let longest = pairs.iter().map(|p| p.2).fold(0.0, f64::max);
            let holds = broken.is_infinite();
            ModulusWitness {
                eps,
                delta: if holds { longest } else { 0.0 },
                holds,
            }
        })
        .collect();
    let equicontinuous_interior = modulus.iter().all(|m| m.holds);

    // condition 3
    let forward: Vec<Vec<f64>> = grid.points().map(|x| map.forward(&x)).collect();
    let mut infinity = Vec::new();
    let mut offset = 0;
    for (axis, side) in faces {
        let points = face_points(grid, map, axis, side);
        for (j, point) in points.iter().enumerate() {
            let y = point.x_coords(map);
            let dist: Vec<f64> = forward.iter().map(|fx| map.metric(fx, &y)).collect();
            for (pi, p) in p_set.iter().enumerate() {
                let mut best: Option<(f64, f64)> = None;
                for &delta in &cfg.deltas {
                    let inside: Vec<usize> = (0..dist.len()).filter(|&k| dist[k] < delta).collect();
                    if inside.is_empty() {
                        break;
                    }
                    let dev = members
                        .iter()
                        .map(|m| {
                            let g = m[pi].1[offset + j];
                            inside.iter().map(|&k| (g - m[pi].0[k]).abs()).fold(0.0, f64::max)
                        })
                        .fold(0.0f64, f64::max);
                    if best.is_none_or(|(_, b)| dev < b) {
                        best = Some((delta, dev));
                    }
                }
                infinity.push(InfinityWitness {
                    point: point.label(),
                    p: p.clone(),
                    delta: best.map(|b| b.0),
                    deviation: best.map_or(f64::INFINITY, |b| b.1),
                });
            }
        }
        offset += points.len();
    }
    let eps_min = cfg.eps_ladder.iter().copied().fold(f64::INFINITY, f64::min);
    let worst_deviation = infinity.iter().map(|w| w.deviation).fold(0.0, f64::max);
    let equiconvergent_at_infinity = worst_deviation < eps_min;

    Ok(PrecompactnessReport {
        uniformly_bounded,
        bounds,
        equicontinuous_interior,
        worst_modulus,
        modulus,
        equiconvergent_at_infinity,
        worst_deviation,
        infinity,
        verdict: uniformly_bounded && equicontinuous_interior && equiconvergent_at_infinity,
    })
}
