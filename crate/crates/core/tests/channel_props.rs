use proptest::prelude::*;
use zzb_core::quad::{integrate, Tolerance};
use zzb_core::{Channel, GaussianChannel};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn likelihood_integrates_to_one(eta in 1e-4..1e2f64, x in -10.0..10.0f64) {
        let c = GaussianChannel::scalar(eta).unwrap();
        let s = eta.sqrt();
        let r = integrate(|y| c.likelihood(&[y], &[x]).unwrap(), x - 10.0 * s, x + 10.0 * s, &[x],
            Tolerance::new(1e-12, 1e-12, 10_000));
        prop_assert!((r.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn likelihood_depends_on_difference(eta in 0.01..10.0f64, y in -5.0..5.0f64, x in -5.0..5.0f64, s in -50.0..50.0f64) {
        let c = GaussianChannel::new(eta, 2).unwrap();
        let a = c.likelihood(&[y, -y], &[x, 0.5 * x]).unwrap();
        let b = c.likelihood(&[y + s, -y + s], &[x + s, 0.5 * x + s]).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
    }
}

#[test]
fn observe_noise_variance() {
    let c = GaussianChannel::scalar(1.0).unwrap();
    let x = vec![0.0; 1_000_000];
    let c6 = GaussianChannel::new(1.0, x.len()).unwrap();
    let y = c6.observe(&x, 17).unwrap();
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (y.len() - 1) as f64;
    assert!((0.993..=1.007).contains(&var), "{var}");
    assert_eq!(c.observe(&[0.3], 4).unwrap(), c.observe(&[0.3], 4).unwrap());
}
