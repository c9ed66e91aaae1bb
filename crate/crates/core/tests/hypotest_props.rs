use proptest::prelude::*;
use zzb_core::{
    binary_gaussian_error, high_noise_error, map_error, GaussianChannel, HypothesisProblem,
    QuadratureSpec,
};

fn priors(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01..1.0f64, m).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.iter().map(|x| x / s).collect()
    })
}

fn scalar_problem() -> impl Strategy<Value = HypothesisProblem> {
    (2usize..5)
        .prop_flat_map(|m| (priors(m), prop::collection::vec(-3.0..3.0f64, m)))
        .prop_map(|(p, offs)| HypothesisProblem::scalar(0.0, &offs, p).unwrap())
}

fn planar_problem() -> impl Strategy<Value = HypothesisProblem> {
    (2usize..4)
        .prop_flat_map(|m| {
            (priors(m), prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), m))
        })
        .prop_map(|(p, offs)| {
            let offs = offs.into_iter().map(|(a, b)| vec![a, b]).collect();
            HypothesisProblem::new(vec![0.0, 0.0], offs, p).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn error_between_zero_and_guessing(p in scalar_problem(), eta in 0.01..10.0f64) {
        let c = GaussianChannel::scalar(eta).unwrap();
        let e = map_error(&p, &c, &QuadratureSpec::default()).unwrap();
        let best = p.priors().iter().cloned().fold(0.0, f64::max);
        prop_assert!(e >= -1e-9 && e <= 1.0 - best + 1e-9, "{}", e);
    }

    #[test]
    fn planar_error_between_zero_and_guessing(p in planar_problem(), eta in 0.1..4.0f64) {
        let c = GaussianChannel::new(eta, 2).unwrap();
        let q = QuadratureSpec { y_tol: 1e-6, ..QuadratureSpec::default() };
        let e = map_error(&p, &c, &q).unwrap();
        let best = p.priors().iter().cloned().fold(0.0, f64::max);
        prop_assert!(e >= -1e-6 && e <= 1.0 - best + 1e-6, "{}", e);
    }

    #[test]
    fn relabeling_symmetry(q0 in 0.01..0.99f64, delta in 0.01..5.0f64, eta in 0.01..10.0f64) {
        let a = binary_gaussian_error(q0, 1.0 - q0, delta, eta).unwrap();
        let b = binary_gaussian_error(1.0 - q0, q0, delta, eta).unwrap();
        prop_assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn error_grows_with_noise(p in scalar_problem()) {
        let q = QuadratureSpec::default();
        let mut prev = -1.0;
        for k in 0..20 {
            let eta = 10f64.powf(-2.0 + 4.0 * k as f64 / 19.0);
            let e = map_error(&p, &GaussianChannel::scalar(eta).unwrap(), &q).unwrap();
            prop_assert!(e >= prev - 1e-9, "eta {}: {} < {}", eta, e, prev);
            prev = e;
        }
    }
}

#[test]
fn binary_high_noise_limit() {
    let q = QuadratureSpec::default();
    for (q0, delta) in [(0.3, 1.0), (0.5, 0.2), (0.9, 3.0)] {
        let p = HypothesisProblem::scalar(0.0, &[0.0, delta], vec![q0, 1.0 - q0]).unwrap();
        let c = GaussianChannel::scalar(1e6 * delta * delta).unwrap();
        let e = map_error(&p, &c, &q).unwrap();
        assert!((e - high_noise_error(&[q0, 1.0 - q0])).abs() < 1e-3, "{e}");
    }
}
