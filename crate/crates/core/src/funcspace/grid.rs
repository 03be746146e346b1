use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tensor-product grid over a truncated box. Nodes are stored row-major with
/// the last axis varying fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorGrid {
    axes: Vec<Vec<f64>>,
}

impl TensorGrid {
    pub fn new(axes: Vec<Vec<f64>>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidArgument("grid needs at least one axis".into()));
        }
        for (i, a) in axes.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::InvalidArgument(format!("axis {i} has no nodes")));
            }
            if a.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!("axis {i} has non-finite nodes")));
            }
            if a.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::InvalidArgument(format!("axis {i} is not strictly increasing")));
            }
        }
        Ok(Self { axes })
    }

    /// Evenly spaced nodes `lo, lo+h, …, hi` with `n` nodes.
    pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![lo];
        }
        (0..n)
            .map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
            .collect()
    }

    /// Nodes `lo + k·step` up to `hi` (inclusive when it lands on the lattice).
    pub fn stepped(lo: f64, hi: f64, step: f64) -> Vec<f64> {
        let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        Self::linspace(lo, lo + step * (n - 1) as f64, n)
    }

    pub fn uniform(bounds: &[(f64, f64)], steps: &[f64]) -> Result<Self> {
        if bounds.len() != steps.len() {
            return Err(Error::InvalidArgument("bounds and steps differ in length".into()));
        }
        if steps.iter().any(|h| !(*h > 0.0)) {
            return Err(Error::InvalidArgument("grid steps must be positive".into()));
        }
        Self::new(
            bounds
                .iter()
                .zip(steps)
                .map(|(&(lo, hi), &h)| Self::stepped(lo, hi, h))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn axis(&self, a: usize) -> &[f64] {
        &self.axes[a]
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dim()];
        for a in (0..self.dim().saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.axes[a + 1].len();
        }
        s
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().zip(self.strides()).map(|(i, s)| i * s).sum()
    }

    pub fn multi(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            let n = self.axes[a].len();
            idx[a] = flat % n;
            flat /= n;
        }
        idx
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.axes[a][i])
            .collect()
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(|k| self.point(k))
    }

    /// Flat indices of the nodes with index 0 along `axis`, in row-major
    /// order. These label the nodes of a face orthogonal to `axis`.
    pub fn face_nodes(&self, axis: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&k| self.multi(k)[axis] == 0)
            .collect()
    }

    /// Number of nodes on a face orthogonal to `axis`.
    pub fn face_len(&self, axis: usize) -> usize {
        self.len() / self.axes[axis].len()
    }

    /// Largest node spacing over all axes.
    pub fn max_step(&self) -> f64 {
        self.axes
            .iter()
            .flat_map(|a| a.windows(2).map(|w| w[1] - w[0]))
            .fold(0.0, f64::max)
    }

    /// Multilinear interpolation of nodal values; constant beyond the grid.
    pub fn interpolate(&self, values: &[f64], x: &[f64]) -> f64 {
        let d = self.dim();
        let strides = self.strides();
        let mut base = 0usize;
        let mut frac = vec![0.0; d];
        let mut step = vec![0usize; d];
        for a in 0..d {
            let ax = &self.axes[a];
            let v = x[a];
            let (i, t) = if ax.len() == 1 || v <= ax[0] {
                (0, 0.0)
            } else if v >= ax[ax.len() - 1] {
                (ax.len() - 1, 0.0)
            } else {
                let j = ax.partition_point(|n| *n <= v) - 1;
                (j, (v - ax[j]) / (ax[j + 1] - ax[j]))
            };
            base += i * strides[a];
            frac[a] = t;
            step[a] = if t > 0.0 { strides[a] } else { 0 };
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << d) {
            let mut w = 1.0;
            let mut k = base;
            for a in 0..d {
                if corner >> a & 1 == 1 {
                    if step[a] == 0 {
                        w = 0.0;
                        break;
                    }
                    w *= frac[a];
                    k += step[a];
                } else {
                    w *= 1.0 - frac[a];
                }
            }
            if w != 0.0 {
                acc += w * values[k];
            }
        }
        acc
    }
}
