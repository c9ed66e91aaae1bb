mod common;

use common::ch;
use proptest::prelude::*;
use zzb_core::{high_noise_bound, valley_fill, zz_scalar, QuadratureSpec, ScalarPrior};

fn nodes() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.01..1.0f64, 0.0..1.0f64), 1..60).prop_map(|v| {
        let mut t = 0.0;
        v.into_iter()
            .map(|(dt, y)| {
                t += dt;
                (t, y)
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn valley_fill_is_monotone_envelope(n in nodes()) {
        let v = valley_fill(&n).unwrap();
        prop_assert_eq!(v.len(), n.len());
        for (a, b) in n.iter().zip(&v) {
            prop_assert_eq!(a.0, b.0);
            prop_assert!(b.1 >= a.1);
        }
        prop_assert!(v.windows(2).all(|w| w[1].1 <= w[0].1));
        prop_assert_eq!(valley_fill(&v).unwrap(), v.clone());
        for (j, b) in v.iter().enumerate() {
            let suffix = n[j..].iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!(b.1, suffix);
        }
    }

    #[test]
    fn integrand_ratios_lie_in_unit_interval(
        idx in 0usize..8, eta in 0.05..5.0f64, m in 2usize..4, vf in any::<bool>()
    ) {
        let (_, p) = common::zoo().swap_remove(idx);
        let q = QuadratureSpec { t_nodes: 64, ..QuadratureSpec::default() };
        let r = zz_scalar(&p, &ch(eta), m, vf, &q).unwrap();
        prop_assert!(r.value >= 0.0);
        for (_, h, f) in &r.per_t {
            prop_assert!(*h >= 0.0 && *h <= 1.0 + 1e-12 && *f >= *h && *f <= 1.0 + 1e-12);
        }
    }
}

#[test]
fn doubling_grids_moves_value_little() {
    let base = QuadratureSpec::default();
    let fine = QuadratureSpec {
        t_nodes: 2 * base.t_nodes,
        y_tol: base.y_tol / 2.0,
        y_window_sigma: 2.0 * base.y_window_sigma,
        ..base.clone()
    };
    for (name, p) in common::zoo() {
        for vf in [false, true] {
            let a = zz_scalar(&p, &ch(0.5), 2, vf, &base).unwrap().value;
            let b = zz_scalar(&p, &ch(0.5), 2, vf, &fine).unwrap().value;
            assert!((a - b).abs() < 10.0 * base.refine_tol, "{name} vf={vf}: {a} vs {b}");
        }
    }
}

#[test]
fn unimodal_high_noise_is_m_independent() {
    let q = QuadratureSpec::default();
    for p in [ScalarPrior::gaussian(0.0, 1.0).unwrap(), common::logistic()] {
        let v: Vec<f64> = (2..=4)
            .map(|m| high_noise_bound(&p, m, false, &q).unwrap().value)
            .collect();
        for a in &v {
            for b in &v {
                assert!((a - b).abs() < 1e-3, "{v:?}");
            }
        }
    }
}
