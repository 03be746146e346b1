//! The two counterexample families.

use rayon::prelude::*;

use super::{TensorGrid, Weight, WeightedGridFunction};
use crate::{Error, Result};

/// `f(x) = Σ_{k≥2} g(kx - k²)/k` with `g(z) = (1-z²)²` on `[-1,1]`.
///
/// The summands have disjoint supports `|x - k| < 1/k`, so at most one of
/// them is nonzero. Returns `(f(x), f'(x))`.
pub fn bump_chain(x: f64) -> (f64, f64) {
    let k = x.round();
    if k < 2.0 || !x.is_finite() {
        return (0.0, 0.0);
    }
    let z = k * x - k * k;
    if z.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let s = 1.0 - z * z;
    (s * s / k, -4.0 * z * s)
}

/// Grid used for the translating-Gaussian family: `[0, n_max + 1]`, step 0.005.
pub fn gaussian_family_grid(n_max: usize) -> Result<TensorGrid> {
    TensorGrid::uniform(&[(0.0, n_max as f64 + 1.0)], &[0.005])
}

/// `{e^{-(x-n)²} : n = 2..=n_max}` on the half-line with unit weight.
pub fn gaussian_family(n_max: usize) -> Result<Vec<WeightedGridFunction>> {
    if n_max < 3 {
        return Err(Error::InvalidArgument(format!("n_max = {n_max} must be at least 3")));
    }
    let grid = gaussian_family_grid(n_max)?;
    (2..=n_max)
        .map(|n| {
            let n = n as f64;
            WeightedGridFunction::from_fn(grid.clone(), Weight::Unit, 0, |x| (-(x[0] - n).powi(2)).exp())
        })
        .collect()
}

/// `min_{2 ≤ n < m ≤ n_max} sup_x |f_n(x) - f_m(x)|` on a grid of step 1e-3
/// that contains every integer.
pub fn gaussian_family_separation(n_max: usize) -> Result<f64> {
    if n_max < 3 {
        return Err(Error::InvalidArgument(format!("n_max = {n_max} must be at least 3")));
    }
    let hi = (n_max + 3) * 1000;
    let xs: Vec<f64> = (0..=hi).map(|k| k as f64 / 1000.0).collect();
    let rows: Vec<Vec<f64>> = (2..=n_max)
        .map(|n| xs.iter().map(|x| (-(x - n as f64).powi(2)).exp()).collect())
        .collect();
    let per_n: Vec<f64> = (0..rows.len())
        .into_par_iter()
        .map(|i| {
            (i + 1..rows.len())
                .map(|j| {
                    rows[i]
                        .iter()
                        .zip(&rows[j])
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    Ok(per_n.into_iter().fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{quotient_derivative, MultiIndex};
    use approx::assert_abs_diff_eq;

    const PEAK: f64 = 1.539_600_717_839_002; // 8/(3√3)

    #[test]
    fn bump_derivative_peaks() {
        assert_abs_diff_eq!(PEAK, 8.0 / (3.0 * 3f64.sqrt()), epsilon = 1e-15);
        for k in [2.0, 3.0, 4.0] {
            let x = k - 1.0 / (3f64.sqrt() * k);
            assert_abs_diff_eq!(bump_chain(x).1, PEAK, epsilon = 1e-12);
            assert_eq!(bump_chain(k + 1.0 / k).1, 0.0);
        }
    }

    #[test]
    fn bump_value_bounded_by_inverse_k() {
        for i in 0..20000 {
            let x = 1.5 + i as f64 * 0.001;
            let k = x.round();
            assert!(bump_chain(x).0 <= 1.0 / k + 1e-15);
        }
        assert_eq!(bump_chain(0.3), (0.0, 0.0));
    }

    #[test]
    fn bump_finite_difference_peak() {
        let grid = TensorGrid::uniform(&[(0.0, 5.0)], &[1e-4]).unwrap();
        let f = WeightedGridFunction::from_fn(grid.clone(), Weight::Unit, 1, |x| bump_chain(x[0]).0).unwrap();
        let d = quotient_derivative(&f, &MultiIndex(vec![1])).unwrap();
        let x = 3.0 - 1.0 / (3f64.sqrt() * 3.0);
        let k = (x / 1e-4).round() as usize;
        assert!((d[k] - PEAK).abs() < 1e-3);
    }

    #[test]
    fn separation_bound() {
        let bound = 1.0 - (-1.0f64).exp();
        assert!(gaussian_family_separation(3).unwrap() >= bound);
        assert!(gaussian_family_separation(10).unwrap() >= bound);
        assert!(gaussian_family_separation(2).is_err());
    }
}
