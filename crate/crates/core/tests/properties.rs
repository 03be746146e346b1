mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn weighted_norm_axioms(f in samples(), g in samples(), lambda in -3.0f64..3.0, order in 0u32..=1) {
        norm_axioms(&f, &g, lambda, order)?;
    }

    #[test]
    fn compactification_metrics(
        k in 0usize..7,
        a in prop::collection::vec(-1.2f64..1.2, 4),
        b in prop::collection::vec(-1.2f64..1.2, 4),
        c in prop::collection::vec(-1.2f64..1.2, 4),
    ) {
        metric_axioms(&all_maps()[k], &a, &b, &c)?;
    }

    #[test]
    fn gamma_is_linear_and_bounded(f in samples(), g in samples(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        gamma_laws(&f, &g, a, b)?;
    }

    #[test]
    fn cone_functionals(u in samples(), v in samples(), lambda in 0.0f64..4.0) {
        cone_laws(&u, &v, lambda)?;
    }

    #[test]
    fn operator_positive_and_monotone(u in nonneg_samples(), bump in nonneg_samples()) {
        operator_laws(&u, &bump)?;
    }

    #[test]
    fn forward_inverse_round_trip(x in -1e6f64..1e6, y in 0.0f64..1e6) {
        let two = kappa::compactify::CompactMap::TwoPointLine;
        let back = two.inverse(&two.forward(&[x])).unwrap()[0];
        prop_assert!((back - x).abs() <= 1e-9 * x.abs().max(1.0));
        let half = kappa::compactify::CompactMap::OnePointHalfLine;
        let back = half.inverse(&half.forward(&[y])).unwrap()[0];
        prop_assert!((back - y).abs() <= 1e-9 * y.max(1.0));
    }
}

#[test]
fn zero_vector_satisfies_p3() {
    let u = vec![0.0; strip_grid().len()];
    cone_laws(&u, &u, 1.0).unwrap();
}
