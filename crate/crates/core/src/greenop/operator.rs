//! The Hammerstein operator `T u(t) = ∫ G(t,s) f(s, u(s)) ds` on grid functions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::{Kernel, Nonlinearity, Support};
use super::quadrature::GaussRule;
use crate::compactify::{kappa_limit, CompactMap, LimitConfig, LimitStatus, XPoint};
use crate::funcspace::{weighted_norm, TensorGrid, Weight, WeightedGridFunction};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApplyOptions {
    /// Gauss–Legendre nodes per grid cell and axis.
    pub quad_order: usize,
    /// Tolerance the quadrature is expected to meet; see
    /// [`IntegralOperator::refinement_gap`].
    pub quad_tol: f64,
    /// Compute infinity-face values of the output.
    pub faces: bool,
    pub limit: LimitConfig,
}

impl Default for ApplyOptions {
    fn default() -> Self {
        Self {
            quad_order: 8,
            quad_tol: 1e-8,
            faces: true,
            limit: LimitConfig::default(),
        }
    }
}

/// Compactification matching a kernel domain: `[lo, ∞)` axes become
/// one-point half-lines, bounded axes stay intervals.
pub fn default_map(kernel: &Kernel) -> Result<CompactMap> {
    let factors = kernel
        .domain
        .iter()
        .map(|&(lo, hi)| {
            if hi.is_finite() {
                Ok(CompactMap::Interval { lo, hi })
            } else if lo == 0.0 {
                Ok(CompactMap::OnePointHalfLine)
            } else {
                Err(Error::InvalidArgument(format!("unbounded axis must start at 0, got {lo}")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(if factors.len() == 1 {
        factors.into_iter().next().unwrap_or(CompactMap::OnePointHalfLine)
    } else {
        CompactMap::product(factors)
    })
}

/// Per-axis quadrature data.
#[derive(Clone, Debug)]
struct AxisQuad {
    /// Quadrature points (all cells, in order).
    points: Vec<f64>,
    /// Cell index and position inside the cell of each point.
    hats: Vec<(usize, f64)>,
    /// For each output node: first column and the weights `w_q g(t_i, s_q)`.
    rows: Vec<(usize, Vec<f64>)>,
}

impl AxisQuad {
    fn new(kernel: &Kernel, axis: usize, nodes: &[f64], rule: &GaussRule) -> Self {
        let q = rule.order();
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let mut hats = Vec::new();
        for c in 0..nodes.len() - 1 {
            let (a, b) = (nodes[c], nodes[c + 1]);
            for (s, w) in rule.on(a, b) {
                points.push(s);
                weights.push(w);
                hats.push((c, (s - a) / (b - a)));
            }
        }
        let factor = kernel.factors[axis];
        let rows = nodes
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let end = match factor.support {
                    Support::UpTo => i * q,
                    Support::Full => points.len(),
                };
                let row = (0..end).map(|k| weights[k] * factor.ln_value(t, points[k]).exp()).collect();
                (0, row)
            })
            .collect();
        Self { points, hats, rows }
    }
}

/// `out[o, j, r] = Σ_k row_j[k] · data[o, start_j + k, r]`.
fn contract_rows(data: &[f64], shape: &[usize], axis: usize, rows: &[(usize, Vec<f64>)]) -> (Vec<f64>, Vec<usize>) {
    let n = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let m = rows.len();
    let mut out_shape = shape.to_vec();
    out_shape[axis] = m;
    let total: usize = out_shape.iter().product();
    let mut out = vec![0.0; total];
    out.par_chunks_mut(inner).enumerate().for_each(|(oj, chunk)| {
        let (o, j) = (oj / m, oj % m);
        let (start, w) = &rows[j];
        for (k, wk) in w.iter().enumerate() {
            let base = (o * n + start + k) * inner;
            for (c, d) in chunk.iter_mut().zip(&data[base..base + inner]) {
                *c += wk * d;
            }
        }
    });
    (out, out_shape)
}

/// Linear interpolation along one axis from nodes to quadrature points.
fn contract_hats(data: &[f64], shape: &[usize], axis: usize, hats: &[(usize, f64)]) -> (Vec<f64>, Vec<usize>) {
    let n = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let m = hats.len();
    let mut out_shape = shape.to_vec();
    out_shape[axis] = m;
    let total: usize = out_shape.iter().product();
    let mut out = vec![0.0; total];
    out.par_chunks_mut(inner).enumerate().for_each(|(oj, chunk)| {
        let (o, j) = (oj / m, oj % m);
        let (c, t) = hats[j];
        let b0 = (o * n + c) * inner;
        let b1 = b0 + inner;
        for (r, v) in chunk.iter_mut().enumerate() {
            *v = (1.0 - t) * data[b0 + r] + t * data[b1 + r];
        }
    });
    (out, out_shape)
}

/// `T` discretized on a fixed grid. Quadrature tables are built once and
/// reused for every application.
#[derive(Clone, Debug)]
pub struct IntegralOperator {
    kernel: Kernel,
    nl: Nonlinearity,
    weight: Weight,
    grid: TensorGrid,
    map: CompactMap,
    opts: ApplyOptions,
    axes: Vec<AxisQuad>,
    phi_s: Vec<f64>,
    source_s: Vec<f64>,
}

impl IntegralOperator {
    pub fn new(
        kernel: Kernel,
        nl: Nonlinearity,
        weight: Weight,
        grid: TensorGrid,
        map: CompactMap,
        opts: ApplyOptions,
    ) -> Result<Self> {
        if grid.dim() != kernel.dim() {
            return Err(Error::InvalidArgument("grid and kernel dimensions differ".into()));
        }
        if opts.quad_order == 0 {
            return Err(Error::InvalidArgument("quadrature order must be positive".into()));
        }
        for (a, &(lo, hi)) in kernel.domain.iter().enumerate() {
            let ax = grid.axis(a);
            if ax.len() < 2 {
                return Err(Error::GridTooCoarse {
                    axis: a,
                    nodes: ax.len(),
                    needed: 2,
                });
            }
            if (ax[0] - lo).abs() > 1e-12 || ax[ax.len() - 1] > hi + 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "grid axis {a} spans [{}, {}] outside the domain [{lo}, {hi}]",
                    ax[0],
                    ax[ax.len() - 1]
                )));
            }
        }
        let rule = GaussRule::new(opts.quad_order);
        let axes: Vec<AxisQuad> = (0..grid.dim())
            .map(|a| AxisQuad::new(&kernel, a, grid.axis(a), &rule))
            .collect();
        let qgrid = TensorGrid::new(axes.iter().map(|q| q.points.clone()).collect())?;
        let (phi_s, source_s): (Vec<f64>, Vec<f64>) = (0..qgrid.len())
            .into_par_iter()
            .map(|k| {
                let s = qgrid.point(k);
                (weight.value(&s), nl.source.eval(&s))
            })
            .unzip();
        Ok(Self {
            kernel,
            nl,
            weight,
            grid,
            map,
            opts,
            axes,
            phi_s,
            source_s,
        })
    }

    pub fn grid(&self) -> &TensorGrid {
        &self.grid
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nl
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn map(&self) -> &CompactMap {
        &self.map
    }

    pub fn options(&self) -> &ApplyOptions {
        &self.opts
    }

    /// Same operator with different options.
    pub fn with_options(&self, opts: ApplyOptions) -> Result<Self> {
        Self::new(
            self.kernel.clone(),
            self.nl.clone(),
            self.weight.clone(),
            self.grid.clone(),
            self.map.clone(),
            opts,
        )
    }

    /// `f(s, u(s))` at the tensor quadrature points, with `u/φ` interpolated
    /// multilinearly.
    fn integrand(&self, u: &WeightedGridFunction) -> Vec<f64> {
        let mut data = u.quotient();
        let mut shape = self.grid.shape();
        for (a, q) in self.axes.iter().enumerate() {
            (data, shape) = contract_hats(&data, &shape, a, &q.hats);
        }
        let (c, p) = (self.nl.coefficient, self.nl.power);
        data.par_iter_mut()
            .zip(&self.phi_s)
            .zip(&self.source_s)
            .for_each(|((v, phi), src)| {
                let growth = if c == 0.0 { 0.0 } else { c * (phi * *v).abs().powf(p) };
                *v = src + growth;
            });
        data
    }

    /// Samples of `T u` at the grid nodes.
    pub fn apply_samples(&self, u: &WeightedGridFunction) -> Result<Vec<f64>> {
        if u.grid() != &self.grid || u.weight() != &self.weight {
            return Err(Error::InvalidArgument("u does not live on the operator's grid and weight".into()));
        }
        let mut data = self.integrand(u);
        let mut shape: Vec<usize> = self.axes.iter().map(|q| q.points.len()).collect();
        for a in (0..self.axes.len()).rev() {
            (data, shape) = contract_rows(&data, &shape, a, &self.axes[a].rows);
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::QuadratureAtNode {
                node: self.grid.point(k),
                reason: format!("non-finite value {}", data[k]),
            });
        }
        Ok(data)
    }

    /// `T u` as a grid function; faces are filled when `opts.faces` is set.
    pub fn apply(&self, u: &WeightedGridFunction) -> Result<WeightedGridFunction> {
        let samples = self.apply_samples(u)?;
        let out = WeightedGridFunction::new(self.grid.clone(), samples, self.weight.clone(), u.order())?;
        if self.opts.faces {
            out.with_computed_faces(&self.map, &self.opts.limit)
        } else {
            Ok(out)
        }
    }

    /// `‖T_Q u - T_{2Q} u‖_{κ,φ}` for the configured order `Q`.
    pub fn refinement_gap(&self, u: &WeightedGridFunction) -> Result<f64> {
        let fine = self.with_options(ApplyOptions {
            quad_order: 2 * self.opts.quad_order,
            faces: false,
            ..self.opts.clone()
        })?;
        let a = WeightedGridFunction::new(self.grid.clone(), self.apply_samples(u)?, self.weight.clone(), 0)?;
        let b = WeightedGridFunction::new(self.grid.clone(), fine.apply_samples(u)?, self.weight.clone(), 0)?;
        Ok(weighted_norm(&a.sub(&b)?))
    }

    /// Face value of `Tu/φ` through the limit-inside-the-integral route:
    /// `∫ z^x(s) f(s, u(s)) ds` with `z^x(s)` the limit of `G(·,s)/φ` at the
    /// face point. Uses a two-point rule per cell.
    pub fn limit_integral_face(&self, u: &WeightedGridFunction, point: &XPoint) -> Result<f64> {
        let coarse = self.with_options(ApplyOptions {
            quad_order: 2,
            faces: false,
            ..self.opts.clone()
        })?;
        let f_s = coarse.integrand(u);
        let rule = GaussRule::new(2);
        let per_axis: Vec<Vec<(f64, f64)>> = (0..self.grid.dim())
            .map(|a| {
                let ax = self.grid.axis(a);
                ax.windows(2).flat_map(|w| rule.on(w[0], w[1]).collect::<Vec<_>>()).collect()
            })
            .collect();
        let qgrid = TensorGrid::new(per_axis.iter().map(|v| v.iter().map(|p| p.0).collect()).collect())?;
        let cfg = LimitConfig {
            samples: 1 << 10,
            ..self.opts.limit.clone()
        };
        let terms: Vec<Result<f64>> = (0..qgrid.len())
            .into_par_iter()
            .map(|k| {
                if f_s[k] == 0.0 {
                    return Ok(0.0);
                }
                let idx = qgrid.multi(k);
                let s: Vec<f64> = idx.iter().enumerate().map(|(a, &i)| per_axis[a][i].0).collect();
                let w: f64 = idx.iter().enumerate().map(|(a, &i)| per_axis[a][i].1).product();
                let z = |t: &[f64]| self.kernel.eval_over_weight(t, &s, &self.weight);
                let res = kappa_limit(&z, point, &self.map, &cfg)?;
                match res.status {
                    LimitStatus::Converged { value } => Ok(w * value * f_s[k]),
                    LimitStatus::NoLimit => Err(Error::NoLimit { point: point.label() }),
                    LimitStatus::Inconclusive => Err(Error::Inconclusive { point: point.label() }),
                }
            })
            .collect();
        terms.into_iter().sum()
    }
}

/// `T u` on `u`'s grid with default options and the compactification
/// matching the kernel domain.
pub fn apply_t(u: &WeightedGridFunction, kernel: &Kernel, nl: &Nonlinearity) -> Result<WeightedGridFunction> {
    let op = IntegralOperator::new(
        kernel.clone(),
        nl.clone(),
        u.weight().clone(),
        u.grid().clone(),
        default_map(kernel)?,
        ApplyOptions::default(),
    )?;
    op.apply(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::erf;
    use crate::greenop::{AxisFactor, Profile, Source};
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

    fn nonlinearity() -> Nonlinearity {
        Nonlinearity {
            source: Source::Gaussian {
                amplitude: 0.125,
                rates: vec![1.0, 1.0],
            },
            coefficient: 1.0,
            power: 2.0,
        }
    }

    fn weight() -> Weight {
        Weight::Gaussian { axis: 0, rate: 0.5 }
    }

    fn t0(x: f64, y: f64) -> f64 {
        PI / (16.0 * 2f64.sqrt()) * (-x * x / 2.0).exp() * erf(x / 2f64.sqrt()) * erf(y)
    }

    fn operator(nx: usize, ny: usize, faces: bool) -> IntegralOperator {
        let grid = TensorGrid::new(vec![TensorGrid::linspace(0.0, 8.0, nx), TensorGrid::linspace(0.0, 1.0, ny)]).unwrap();
        let k = kernel();
        let map = default_map(&k).unwrap();
        IntegralOperator::new(
            k,
            nonlinearity(),
            weight(),
            grid,
            map,
            ApplyOptions {
                faces,
                ..ApplyOptions::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn image_of_zero_matches_closed_form() {
        let op = operator(50, 50, true);
        let zero = WeightedGridFunction::from_fn(op.grid().clone(), weight(), 0, |_| 0.0).unwrap();
        let tu = op.apply(&zero).unwrap();
        for (k, v) in tu.samples().iter().enumerate() {
            let p = op.grid().point(k);
            assert_abs_diff_eq!(*v, t0(p[0], p[1]), epsilon = 1e-6);
        }
        let face = &tu.faces()[0];
        for (j, v) in face.values.iter().enumerate() {
            let y0 = op.grid().axis(1)[j];
            assert_abs_diff_eq!(v.unwrap(), PI / (16.0 * 2f64.sqrt()) * erf(y0), epsilon = 1e-4);
        }
    }

    #[test]
    fn apply_t_entry_point() {
        let grid = TensorGrid::uniform(&[(0.0, 8.0), (0.0, 1.0)], &[0.25, 0.25]).unwrap();
        let zero = WeightedGridFunction::from_fn(grid, weight(), 0, |_| 0.0).unwrap();
        let tu = apply_t(&zero, &kernel(), &nonlinearity()).unwrap();
        let k = tu.grid().flat(&[4, 4]);
        assert_abs_diff_eq!(tu.samples()[k], t0(1.0, 1.0), epsilon = 1e-6);
    }

    #[test]
    fn limit_inside_integral_misses_face_value() {
        let op = operator(41, 11, false);
        let zero = WeightedGridFunction::from_fn(op.grid().clone(), weight(), 0, |_| 0.0).unwrap();
        let point = XPoint::infinity("(+inf, 1)", vec![1.0, 1.0]);
        let z_route = op.limit_integral_face(&zero, &point).unwrap();
        assert!(z_route.abs() < 1e-12);
        let truth = PI / (16.0 * 2f64.sqrt()) * erf(1.0);
        assert!((truth - z_route).abs() > 0.1);
    }

    #[test]
    fn refinement_within_tolerance() {
        let op = operator(81, 21, false);
        let u = WeightedGridFunction::from_quotient(op.grid().clone(), weight(), 0, |t| 0.3 * erf(t[0]) * t[1]).unwrap();
        assert!(op.refinement_gap(&u).unwrap() < op.options().quad_tol);
    }

    #[test]
    fn monotone_and_positive() {
        let op = operator(41, 11, false);
        let u = WeightedGridFunction::from_quotient(op.grid().clone(), weight(), 0, |t| 0.2 * t[1] / (1.0 + t[0])).unwrap();
        let v = WeightedGridFunction::from_quotient(op.grid().clone(), weight(), 0, |t| 0.2 * t[1] / (1.0 + t[0]) + 0.1).unwrap();
        let tu = op.apply_samples(&u).unwrap();
        let tv = op.apply_samples(&v).unwrap();
        assert!(tu.iter().all(|x| *x >= 0.0));
        assert!(tu.iter().zip(&tv).all(|(a, b)| a <= b));
    }

    #[test]
    fn zero_nonlinearity_gives_zero() {
        let k = kernel();
        let grid = TensorGrid::uniform(&[(0.0, 8.0), (0.0, 1.0)], &[0.5, 0.5]).unwrap();
        let u = WeightedGridFunction::from_fn(grid, weight(), 0, |_| 0.0).unwrap();
        let tu = apply_t(&u, &k, &Nonlinearity::zero()).unwrap();
        assert!(tu.samples().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn rejects_grid_outside_domain() {
        let grid = TensorGrid::uniform(&[(0.0, 8.0), (0.0, 2.0)], &[0.5, 0.5]).unwrap();
        let k = kernel();
        let map = default_map(&k).unwrap();
        assert!(IntegralOperator::new(k, nonlinearity(), weight(), grid, map, ApplyOptions::default()).is_err());
    }
}
