//! Property tests across modules: embeddings, negative type, kernels.

use dgmspace::embeddings::{kuratowski_embed, verify_annulus, Scale};
use dgmspace::negtype::{
    enflo_check, neg_type_holds, neg_type_supremum, quadratic_form, schoenberg_gaussian_psd,
    RoundnessConfig, DEFAULT_TOLERANCE,
};
use dgmspace::FiniteMetricSpace;
use proptest::prelude::*;

/// Shortest-path closure of symmetric weights in `[lo, 1]`.
fn closure(n: usize, weights: &[f64]) -> FiniteMetricSpace {
    let mut d = vec![vec![0.0; n]; n];
    let mut w = weights.iter();
    for i in 0..n {
        for j in (i + 1)..n {
            let x = *w.next().expect("enough weights");
            d[i][j] = x;
            d[j][i] = x;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    FiniteMetricSpace::from_rows(&d).expect("valid metric")
}

fn metric(max_n: usize) -> impl Strategy<Value = FiniteMetricSpace> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec(0.1f64..1.0, n * (n - 1) / 2).prop_map(move |w| closure(n, &w))
    })
}

/// Points on a line with the absolute-difference metric; of negative type 1.
fn line_metric(max_n: usize) -> impl Strategy<Value = FiniteMetricSpace> {
    prop::collection::vec(-5.0f64..5.0, 2..=max_n).prop_map(|xs| {
        let n = xs.len();
        FiniteMetricSpace::from_fn(n, |i, j| (xs[i] - xs[j]).abs()).expect("valid")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn embedding_is_isometric_and_in_annulus(space in metric(10)) {
        let result = kuratowski_embed(&space, Scale::Auto).unwrap();
        prop_assert!(result.residuals().amax() <= 1e-12 * result.scale());
        prop_assert!(verify_annulus(&result).pass());
    }

    #[test]
    fn embedding_with_larger_fixed_scale(space in metric(6), extra in 0.0f64..10.0) {
        let c = space.diameter() + 0.01 + extra;
        let result = kuratowski_embed(&space, Scale::Fixed(c)).unwrap();
        prop_assert!(result.residuals().amax() <= 1e-12 * c);
    }

    #[test]
    fn negative_type_is_downward_closed(space in metric(8), q in 0.05f64..4.0) {
        if neg_type_holds(&space, q, DEFAULT_TOLERANCE).unwrap().holds() {
            for k in 1..=4 {
                let lower = q * k as f64 / 5.0;
                prop_assert!(neg_type_holds(&space, lower, DEFAULT_TOLERANCE).unwrap().holds());
            }
        }
    }

    #[test]
    fn supremum_separates_verdicts(space in metric(7)) {
        let sup = neg_type_supremum(&space, 8.0, DEFAULT_TOLERANCE).unwrap();
        if !sup.at_least {
            prop_assert!(neg_type_holds(&space, 0.98 * sup.value, DEFAULT_TOLERANCE).unwrap().holds());
            prop_assert!(!neg_type_holds(&space, 1.02 * sup.value + 1e-6, DEFAULT_TOLERANCE).unwrap().holds());
        }
    }

    #[test]
    fn failure_witness_is_valid(space in metric(8), q in 1.0f64..6.0) {
        let cert = neg_type_holds(&space, q, DEFAULT_TOLERANCE).unwrap();
        if let Some(w) = &cert.witness {
            prop_assert!(!cert.holds());
            prop_assert!(w.iter().sum::<f64>().abs() <= 1e-9);
            prop_assert!(quadratic_form(&space, q, w).unwrap() > 0.0);
        }
    }

    #[test]
    fn subspaces_inherit_negative_type(space in metric(8), q in 0.1f64..3.0) {
        if neg_type_holds(&space, q, DEFAULT_TOLERANCE).unwrap().holds() {
            let half: Vec<usize> = (0..space.len()).step_by(2).collect();
            let sub = space.subspace(&half).unwrap();
            prop_assert!(neg_type_holds(&sub, q, DEFAULT_TOLERANCE).unwrap().holds());
        }
    }

    #[test]
    fn negative_type_implies_enflo(space in metric(8), q in 0.1f64..3.0, rotate in 0usize..8) {
        let n = space.len();
        if n >= 4 && neg_type_holds(&space, q, DEFAULT_TOLERANCE).unwrap().holds() {
            let order: Vec<usize> = (0..n).map(|i| (i + rotate) % n).collect();
            let k = n / 2;
            let config = RoundnessConfig::new(&space, order[..k].to_vec(), order[k..2 * k].to_vec()).unwrap();
            prop_assert!(enflo_check(&config, q, DEFAULT_TOLERANCE).holds);
        }
    }

    #[test]
    fn line_metrics_have_psd_gaussian_kernels(space in line_metric(9), t in 0.01f64..10.0) {
        prop_assert!(neg_type_holds(&space, 1.0, DEFAULT_TOLERANCE).unwrap().holds());
        prop_assert!(schoenberg_gaussian_psd(&space, t, DEFAULT_TOLERANCE).unwrap().psd);
    }
}
