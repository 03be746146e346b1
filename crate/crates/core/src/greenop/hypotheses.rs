//! Numerical checks of the kernel and nonlinearity hypotheses that make `T`
//! well defined, continuous and compact.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::{Kernel, Nonlinearity};
use super::quadrature::{box_quadrature, QuadConfig};
use crate::compactify::{kappa_limit, CompactMap, LimitConfig, LimitStatus, XPoint};
use crate::funcspace::{face_points, infinity_faces, quotient_derivative, MultiIndex, TensorGrid, Weight, WeightedGridFunction};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Verified,
    VerifiedOnTruncation,
    Unverified,
    Violated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub status: Status,
    pub note: String,
}

impl Check {
    fn new(status: Status, note: impl Into<String>) -> Self {
        Self {
            status,
            note: note.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisConfig {
    /// Steps of the `s` sampling grid.
    pub s_steps: Vec<f64>,
    /// Steps of the `t` grid the suprema are taken over.
    pub t_steps: Vec<f64>,
    pub truncation: f64,
    /// Face points per free coordinate when sampling `z_p^x`.
    pub face_resolution: usize,
    /// An integral counts as convergent when the outer half of the truncated
    /// range contributes less than this fraction.
    pub tail_fraction: f64,
    pub limit: LimitConfig,
}

impl Default for HypothesisConfig {
    fn default() -> Self {
        Self {
            s_steps: vec![0.25, 0.25],
            t_steps: vec![0.02, 0.05],
            truncation: 8.0,
            face_resolution: 5,
            tail_fraction: 1e-3,
            limit: LimitConfig::default().with_samples(1 << 12),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub s: Vec<f64>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceSample {
    pub s: Vec<f64>,
    pub point: String,
    /// `None` when the limit could not be certified.
    pub value: Option<f64>,
}

/// `∫` over the truncated domain, and over its inner half.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    /// Reported only when the tail test passes.
    pub value: Option<f64>,
    pub truncated: f64,
    pub inner_half: f64,
}

impl Integral {
    fn from_parts(truncated: f64, inner_half: f64, tail_fraction: f64) -> Self {
        let converged = truncated.is_finite() && (truncated - inner_half).abs() <= tail_fraction * truncated.abs().max(1e-300);
        Self {
            value: converged.then_some(truncated),
            truncated,
            inner_half,
        }
    }

    pub fn converged(&self) -> bool {
        self.value.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderReport {
    pub p: MultiIndex,
    /// `M_p(s) = sup_t |∂_p(G(·,s)/φ)(t)|`
    pub m_profile: Vec<Sample>,
    /// `z_p^x(s)`, limits of `∂_p(G(·,s)/φ)` at infinity points.
    pub z_profile: Vec<FaceSample>,
    /// Observed modulus ratio `w_p(s)`.
    pub w_profile: Vec<Sample>,
    pub m_phi: Integral,
    pub z_phi: Integral,
    pub w_phi: Integral,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub r: f64,
    pub c1: Check,
    pub c2: Check,
    pub c3: Check,
    pub c4: Check,
    pub dominator_violations: usize,
    pub dominator_integral: Integral,
    pub orders: Vec<OrderReport>,
}

/// `∂_p` of `t ↦ g(t)` by nested central differences with step `h`.
fn closure_derivative(g: &dyn Fn(&[f64]) -> f64, t: &[f64], p: &MultiIndex, h: f64) -> f64 {
    fn rec(g: &dyn Fn(&[f64]) -> f64, t: &mut Vec<f64>, p: &[u32], axis: usize, h: f64) -> f64 {
        if axis == p.len() {
            return g(t);
        }
        if p[axis] == 0 {
            return rec(g, t, p, axis + 1, h);
        }
        let mut rest = p.to_vec();
        rest[axis] -= 1;
        let c = t[axis];
        t[axis] = c + h;
        let plus = rec(g, t, &rest, axis, h);
        t[axis] = c - h;
        let minus = rec(g, t, &rest, axis, h);
        t[axis] = c;
        (plus - minus) / (2.0 * h)
    }
    rec(g, &mut t.to_vec(), &p.0, 0, h)
}

fn sample_grid(kernel: &Kernel, steps: &[f64], truncation: f64) -> Result<TensorGrid> {
    if steps.len() != kernel.dim() {
        return Err(Error::InvalidArgument("one step per axis expected".into()));
    }
    let bounds: Vec<(f64, f64)> = kernel
        .domain
        .iter()
        .map(|&(lo, hi)| (lo, if hi.is_finite() { hi } else { truncation }))
        .collect();
    TensorGrid::uniform(&bounds, steps)
}

/// Trapezoidal weights of a tensor grid; with `half` set, unbounded axes are
/// cut at the midpoint of their truncated range.
fn trapezoid_weights(grid: &TensorGrid, kernel: &Kernel, half: bool) -> Vec<f64> {
    let per_axis: Vec<Vec<f64>> = (0..grid.dim())
        .map(|a| {
            let ax = grid.axis(a);
            let cut = if half && !kernel.domain[a].1.is_finite() {
                0.5 * (ax[0] + ax[ax.len() - 1])
            } else {
                f64::INFINITY
            };
            let mut w = vec![0.0; ax.len()];
            for k in 0..ax.len().saturating_sub(1) {
                if ax[k + 1] <= cut + 1e-12 {
                    let h = ax[k + 1] - ax[k];
                    w[k] += 0.5 * h;
                    w[k + 1] += 0.5 * h;
                }
            }
            w
        })
        .collect();
    (0..grid.len())
        .map(|k| grid.multi(k).iter().enumerate().map(|(a, &i)| per_axis[a][i]).product())
        .collect()
}

/// Estimates the quantities in the hypotheses on sampled `s` and `t` grids.
pub fn check_hypotheses(
    kernel: &Kernel,
    weight: &Weight,
    nl: &Nonlinearity,
    map: &CompactMap,
    r: f64,
    p_set: &[MultiIndex],
    cfg: &HypothesisConfig,
) -> Result<HypothesisReport> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("r = {r} must be positive")));
    }
    let order = p_set.iter().map(MultiIndex::order).max().unwrap_or(0);
    let s_grid = sample_grid(kernel, &cfg.s_steps, cfg.truncation)?;
    let t_grid = sample_grid(kernel, &cfg.t_steps, cfg.truncation)?;
    let t_forward: Vec<Vec<f64>> = t_grid.points().map(|t| map.forward(&t)).collect();

    // face points of the compactified t-domain
    let face_grid = TensorGrid::new(
        kernel
            .domain
            .iter()
            .map(|&(lo, hi)| {
                if hi.is_finite() {
                    TensorGrid::linspace(lo, hi, cfg.face_resolution.max(2))
                } else {
                    vec![lo, lo + 1.0]
                }
            })
            .collect(),
    )?;
    let faces: Vec<XPoint> = infinity_faces(&face_grid, map)?
        .into_iter()
        .flat_map(|(axis, side)| face_points(&face_grid, map, axis, side))
        .collect();

    let phi_r: Vec<f64> = s_grid.points().map(|s| nl.dominator(r, weight, &s)).collect();
    let w_full = trapezoid_weights(&s_grid, kernel, false);
    let w_half = trapezoid_weights(&s_grid, kernel, true);
    let integral = |profile: &[f64]| {
        let full: f64 = profile.iter().zip(&phi_r).zip(&w_full).map(|((m, p), w)| m * p * w).sum();
        let half: f64 = profile.iter().zip(&phi_r).zip(&w_half).map(|((m, p), w)| m * p * w).sum();
        Integral::from_parts(full, half, cfg.tail_fraction)
    };

    let mut orders = Vec::new();
    let mut z_failed = false;
    let mut z_unknown = false;
    for p in p_set {
        type Row = (f64, f64, Vec<(String, Option<f64>, bool)>);
        let rows: Vec<Row> = (0..s_grid.len())
            .into_par_iter()
            .map(|k| {
                let s = s_grid.point(k);
                let f = WeightedGridFunction::from_quotient(t_grid.clone(), weight.clone(), order, |t| {
                    kernel.eval_over_weight(t, &s, weight)
                })?;
                let d = quotient_derivative(&f, p)?;
                let m = d.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                // modulus ratio along axis neighbours, in the metric of X
                let strides = t_grid.strides();
                let mut w = 0.0f64;
                for (i, fi) in t_forward.iter().enumerate() {
                    let idx = t_grid.multi(i);
                    for a in 0..t_grid.dim() {
                        if idx[a] + 1 < t_grid.axis(a).len() {
                            let j = i + strides[a];
                            let dist = map.metric(fi, &t_forward[j]);
                            if dist > 0.0 {
                                w = w.max((d[i] - d[j]).abs() / dist);
                            }
                        }
                    }
                }
                let g = |t: &[f64]| {
                    if p.order() == 0 {
                        kernel.eval_over_weight(t, &s, weight)
                    } else {
                        closure_derivative(&|t| kernel.eval_over_weight(t, &s, weight), t, p, 1e-4)
                    }
                };
                let mut z = Vec::new();
                for point in &faces {
                    let res = kappa_limit(&g, point, map, &cfg.limit)?;
                    let failed = res.status == LimitStatus::NoLimit;
                    z.push((point.label(), res.value(), failed));
                }
                Ok((m, w, z))
            })
            .collect::<Result<Vec<_>>>()?;

        let s_points: Vec<Vec<f64>> = s_grid.points().collect();
        let m_vals: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let w_vals: Vec<f64> = rows.iter().map(|r| r.1).collect();
        // worst |z| over the sampled faces, per s
        let z_vals: Vec<f64> = rows
            .iter()
            .map(|r| r.2.iter().map(|z| z.1.map_or(f64::NAN, f64::abs)).fold(0.0, f64::max))
            .collect();
        let mut z_profile = Vec::new();
        for (s, row) in s_points.iter().zip(&rows) {
            for (label, value, failed) in &row.2 {
                z_failed |= *failed;
                z_unknown |= value.is_none();
                z_profile.push(FaceSample {
                    s: s.clone(),
                    point: label.clone(),
                    value: *value,
                });
            }
        }
        orders.push(OrderReport {
            p: p.clone(),
            m_profile: s_points.iter().zip(&m_vals).map(|(s, v)| Sample { s: s.clone(), value: *v }).collect(),
            z_profile,
            w_profile: s_points.iter().zip(&w_vals).map(|(s, v)| Sample { s: s.clone(), value: *v }).collect(),
            m_phi: integral(&m_vals),
            z_phi: integral(&z_vals),
            w_phi: integral(&w_vals),
        });
    }

    let m_finite = orders.iter().all(|o| o.m_profile.iter().all(|s| s.value.is_finite()));
    let c1 = if z_failed {
        Check::new(Status::Violated, "some limit of G(·,s)/φ at infinity does not exist")
    } else if !m_finite || z_unknown {
        Check::new(Status::Unverified, "suprema or limits at infinity could not be certified")
    } else {
        Check::new(
            Status::VerifiedOnTruncation,
            "M_p(s) finite on the truncated t-grid and every sampled limit at infinity converged",
        )
    };
    let w_finite = orders.iter().all(|o| o.w_profile.iter().all(|s| s.value.is_finite()));
    let c2 = Check::new(
        if w_finite { Status::VerifiedOnTruncation } else { Status::Unverified },
        "w_p estimated as the largest neighbour ratio on the truncated t-grid",
    );

    // dominator on sampled (t, y) pairs, |y| ≤ r
    let ys: Vec<f64> = (0..=20).map(|k| -r + 2.0 * r * k as f64 / 20.0).collect();
    let dominator_violations = s_grid
        .points()
        .map(|t| {
            let bound = nl.dominator(r, weight, &t);
            let phi = weight.value(&t);
            ys.iter()
                .filter(|y| nl.eval(&t, **y * phi) > bound * (1.0 + 1e-12) + 1e-300)
                .count()
        })
        .sum();
    let qcfg = QuadConfig {
        tol: 1e-10,
        order: 8,
        ..QuadConfig::default()
    };
    let bounds = |cut: f64| -> Vec<(f64, f64)> {
        kernel
            .domain
            .iter()
            .map(|&(lo, hi)| (lo, if hi.is_finite() { hi } else { cut }))
            .collect()
    };
    let dom = |t: &[f64]| nl.dominator(r, weight, t);
    let full = box_quadrature(&dom, &bounds(cfg.truncation), &qcfg)?;
    let half = box_quadrature(&dom, &bounds(cfg.truncation / 2.0), &qcfg)?;
    let dominator_integral = Integral::from_parts(full, half, cfg.tail_fraction);
    let c3 = if dominator_violations > 0 {
        Check::new(Status::Violated, format!("{dominator_violations} sampled (t, y) pairs exceed Φ_r"))
    } else if dominator_integral.converged() {
        Check::new(Status::Verified, "Φ_r dominates f on samples and ∫Φ_r converges")
    } else {
        Check::new(Status::Unverified, "∫Φ_r does not settle on the truncated domain")
    };

    let all_converged = orders
        .iter()
        .all(|o| o.m_phi.converged() && o.z_phi.converged() && o.w_phi.converged());
    let failing: Vec<String> = orders
        .iter()
        .flat_map(|o| {
            [("M_p Φ_r", &o.m_phi), ("|z_p| Φ_r", &o.z_phi), ("w_p Φ_r", &o.w_phi)]
                .into_iter()
                .filter(|(_, i)| !i.converged())
                .map(move |(n, _)| format!("{n} for p = {}", o.p))
        })
        .collect();
    let c4 = if all_converged {
        Check::new(Status::VerifiedOnTruncation, "all products integrable on the truncated domain")
    } else {
        Check::new(Status::Unverified, format!("not integrable on the truncated domain: {}", failing.join(", ")))
    };

    Ok(HypothesisReport {
        r,
        c1,
        c2,
        c3,
        c4,
        dominator_violations,
        dominator_integral,
        orders,
    })
}


#[cfg(test)]
mod hyperbolic_tests {
    use super::*;
    use crate::greenop::{default_map, AxisFactor, Profile, Source, Support};
    use std::f64::consts::PI;

    fn report(r: f64) -> HypothesisReport {
        let kernel = Kernel::new(
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
        .unwrap();
        let nl = Nonlinearity {
            source: Source::Gaussian {
                amplitude: 0.125,
                rates: vec![1.0, 1.0],
            },
            coefficient: 1.0,
            power: 2.0,
        };
        let map = default_map(&kernel).unwrap();
        check_hypotheses(
            &kernel,
            &Weight::Gaussian { axis: 0, rate: 0.5 },
            &nl,
            &map,
            r,
            &[MultiIndex::zero(2)],
            &HypothesisConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn hyperbolic_kernel_profiles() {
        let rep = report(0.5);
        let o = &rep.orders[0];
        // sup_t exp(-(t-s)² + t²/2) = exp(s²), attained at t = 2s
        for m in o.m_profile.iter().filter(|m| m.s[0] <= 3.0) {
            let oracle = (m.s[0] * m.s[0]).exp();
            assert!((m.value - oracle).abs() <= 1e-3 * oracle, "{m:?}");
        }
        for z in &o.z_profile {
            assert_eq!(z.value, Some(0.0), "{z:?}");
        }
        assert_eq!(rep.c3.status, Status::Verified);
        let phi_int = 0.125 * (PI.sqrt() / 2.0) * (PI.sqrt() / 2.0 * crate::erf(1.0)) + 0.25 * PI.sqrt() / 2.0;
        assert!((rep.dominator_integral.value.unwrap() - phi_int).abs() < 1e-8);
        assert!(!o.m_phi.converged());
        assert_eq!(rep.c4.status, Status::Unverified);
        assert_eq!(rep.dominator_violations, 0);
    }
}
