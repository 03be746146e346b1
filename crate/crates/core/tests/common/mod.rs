//! Laws shared by the property suites and the acceptance target.
#![allow(dead_code)]

use std::sync::OnceLock;

use kappa::casestudy::hyperbolic_erf;
use kappa::compactify::{CompactMap, LimitConfig};
use kappa::cones::Functional;
use kappa::funcspace::{gamma_p, weighted_norm, MultiIndex, TensorGrid, Weight, WeightedGridFunction};
use kappa::greenop::{ApplyOptions, IntegralOperator};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const CASES: u32 = 256;

pub fn strip_grid() -> TensorGrid {
    TensorGrid::uniform(&[(0.0, 3.0), (0.0, 1.0)], &[0.5, 0.25]).unwrap()
}

pub fn strip_map() -> CompactMap {
    CompactMap::product(vec![CompactMap::OnePointHalfLine, CompactMap::Interval { lo: 0.0, hi: 1.0 }])
}

pub fn gauss_weight() -> Weight {
    Weight::Gaussian { axis: 0, rate: 0.5 }
}

/// Sample vectors for `strip_grid`.
pub fn samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, strip_grid().len())
}

pub fn nonneg_samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..0.5, strip_grid().len())
}

fn wgf(s: &[f64], order: u32) -> WeightedGridFunction {
    WeightedGridFunction::new(strip_grid(), s.to_vec(), gauss_weight(), order).unwrap()
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-10 * scale.max(1.0)
}

pub fn norm_axioms(f: &[f64], g: &[f64], lambda: f64, order: u32) -> Result<(), TestCaseError> {
    let (f, g) = (wgf(f, order), wgf(g, order));
    let nf = weighted_norm(&f);
    let ng = weighted_norm(&g);
    prop_assert!(nf >= 0.0);
    prop_assert_eq!(weighted_norm(&f.zeros_like()), 0.0);
    let ns = weighted_norm(&f.scale(lambda));
    prop_assert!(close(ns, lambda.abs() * nf, nf), "{} vs {}", ns, lambda.abs() * nf);
    let nsum = weighted_norm(&f.add(&g).unwrap());
    prop_assert!(nsum <= nf + ng + 1e-10 * (nf + ng).max(1.0));
    Ok(())
}

/// A point of `X` for `map`, from raw coordinates in `[-1, 1]`.
pub fn x_point(map: &CompactMap, raw: &[f64]) -> Vec<f64> {
    match map {
        CompactMap::OnePointHalfLine => vec![raw[0].abs()],
        CompactMap::TwoPointLine => vec![raw[0]],
        CompactMap::Interval { lo, hi } => vec![lo + (hi - lo) * 0.5 * (raw[0] + 1.0)],
        CompactMap::Ball { dim } | CompactMap::OnePoint { dim } => {
            let v = &raw[..*dim];
            let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            if n > 1.0 {
                v.iter().map(|c| c / n).collect()
            } else {
                v.to_vec()
            }
        }
        CompactMap::Product { factors } => {
            let mut out = Vec::new();
            let mut at = 0;
            for f in factors {
                out.extend(x_point(f, &raw[at..at + f.dim()]));
                at += f.dim();
            }
            out
        }
    }
}

pub fn all_maps() -> Vec<CompactMap> {
    vec![
        CompactMap::OnePointHalfLine,
        CompactMap::TwoPointLine,
        CompactMap::Interval { lo: -1.0, hi: 2.0 },
        CompactMap::Ball { dim: 2 },
        CompactMap::OnePoint { dim: 2 },
        strip_map(),
        CompactMap::product(vec![CompactMap::TwoPointLine, CompactMap::OnePoint { dim: 2 }]),
    ]
}

pub fn metric_axioms(map: &CompactMap, a: &[f64], b: &[f64], c: &[f64]) -> Result<(), TestCaseError> {
    let (a, b, c) = (x_point(map, a), x_point(map, b), x_point(map, c));
    let d = |p: &[f64], q: &[f64]| map.metric(p, q);
    prop_assert_eq!(d(&a, &a), 0.0);
    prop_assert!(d(&a, &b) >= 0.0);
    prop_assert_eq!(d(&a, &b), d(&b, &a));
    prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-12);
    // distinct finite points are separated
    if a != b && !map.is_infinity(&a) && !map.is_infinity(&b) {
        prop_assert!(d(&a, &b) > 0.0);
    }
    Ok(())
}

pub fn gamma_laws(f: &[f64], g: &[f64], a: f64, b: f64) -> Result<(), TestCaseError> {
    let map = strip_map();
    let cfg = LimitConfig::default().with_samples(1 << 10);
    let (f, g) = (wgf(f, 1), wgf(g, 1));
    let h = f.linear_combination(a, &g, b).unwrap();
    for p in MultiIndex::up_to(2, 1) {
        let gf = gamma_p(&f, &p, &map, &cfg).unwrap();
        let gg = gamma_p(&g, &p, &map, &cfg).unwrap();
        let gh = gamma_p(&h, &p, &map, &cfg).unwrap();
        let scale = gf.sup_norm() + gg.sup_norm();
        for ((x, y), z) in gf.values().iter().zip(gg.values()).zip(gh.values()) {
            prop_assert!(close(z, a * x + b * y, scale * (a.abs() + b.abs())), "{} vs {}", z, a * x + b * y);
        }
        let with_faces = f.clone().with_computed_faces(&map, &cfg).unwrap();
        prop_assert!(gf.sup_norm() <= weighted_norm(&with_faces) + 1e-12);
    }
    Ok(())
}

pub fn cone_laws(u: &[f64], v: &[f64], lambda: f64) -> Result<(), TestCaseError> {
    let grid = strip_grid();
    let alpha = Functional::Infimum;
    let beta = Functional::SupAbs;
    let sum: Vec<f64> = u.iter().zip(v).map(|(a, b)| a + b).collect();
    let scaled: Vec<f64> = u.iter().map(|a| lambda * a).collect();
    let neg: Vec<f64> = u.iter().map(|a| -a).collect();
    let (au, av) = (alpha.eval_samples(&grid, u), alpha.eval_samples(&grid, v));
    // (P1), (P2)
    prop_assert!(alpha.eval_samples(&grid, &sum) >= au + av - 1e-12);
    prop_assert!(close(alpha.eval_samples(&grid, &scaled), lambda * au, au.abs()));
    // (P3)
    if au >= 0.0 && alpha.eval_samples(&grid, &neg) >= 0.0 {
        prop_assert!(u.iter().all(|x| *x == 0.0));
    }
    // (C6) on the cone: homogeneity and monotonicity of β
    let cu: Vec<f64> = u.iter().map(|a| a.abs()).collect();
    let cv: Vec<f64> = cu.iter().zip(v).map(|(a, b)| a + b.abs()).collect();
    let bu = beta.eval_samples(&grid, &cu);
    let lu: Vec<f64> = cu.iter().map(|a| lambda * a).collect();
    prop_assert!(close(beta.eval_samples(&grid, &lu), lambda * bu, bu));
    prop_assert!(beta.eval_samples(&grid, &cu) <= beta.eval_samples(&grid, &cv));
    Ok(())
}

pub fn operator() -> &'static IntegralOperator {
    static OP: OnceLock<IntegralOperator> = OnceLock::new();
    OP.get_or_init(|| {
        let p = hyperbolic_erf().with_truncation(3.0);
        p.operator(
            strip_grid(),
            ApplyOptions {
                faces: false,
                ..ApplyOptions::default()
            },
        )
        .unwrap()
    })
}

pub fn operator_laws(u: &[f64], bump: &[f64]) -> Result<(), TestCaseError> {
    let op = operator();
    let v: Vec<f64> = u.iter().zip(bump).map(|(a, b)| a + b).collect();
    let tu = op.apply_samples(&wgf(u, 0)).unwrap();
    let tv = op.apply_samples(&wgf(&v, 0)).unwrap();
    prop_assert!(tu.iter().all(|x| *x >= 0.0));
    for (a, b) in tu.iter().zip(&tv) {
        prop_assert!(*b >= *a - 1e-15, "{} < {}", b, a);
    }
    Ok(())
}
