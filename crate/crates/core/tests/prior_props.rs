mod common;

use proptest::prelude::*;
use zzb_core::quad::{integrate, Tolerance};
use zzb_core::{AtomList, ContinuousLaw, ScalarPrior};

fn law() -> impl Strategy<Value = ContinuousLaw> {
    prop_oneof![
        (-3.0..3.0f64, 0.1..4.0f64).prop_map(|(mean, var)| ContinuousLaw::Gaussian { mean, var }),
        (-3.0..3.0f64, 0.1..3.0f64).prop_map(|(a, w)| ContinuousLaw::Uniform { a, b: a + w }),
        (0.2..5.0f64).prop_map(|rate| ContinuousLaw::Exponential { rate }),
        (0.1..0.9f64, -4.0..0.0f64, 0.0..4.0f64, 0.05..2.0f64).prop_map(|(w, m0, m1, v)| {
            ContinuousLaw::GaussianMixture {
                weights: vec![w, 1.0 - w],
                means: vec![m0, m1],
                vars: vec![v, 2.0 * v],
            }
        }),
    ]
}

fn atoms() -> impl Strategy<Value = AtomList> {
    prop::collection::vec((-5i32..5, 1u32..10), 1..5).prop_map(|v| {
        let total: u32 = v.iter().map(|p| p.1).sum();
        let pairs: Vec<(f64, f64)> = v
            .iter()
            .map(|(x, w)| (*x as f64 * 0.5, *w as f64 / total as f64))
            .collect();
        AtomList::new(&pairs).unwrap()
    })
}

fn prior() -> impl Strategy<Value = ScalarPrior> {
    (0.0..=1.0f64, law(), atoms()).prop_map(|(alpha, c, a)| {
        let alpha = (alpha * 4.0).round() / 4.0;
        ScalarPrior::mixture(alpha, Some(c), Some(a)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn total_mass_is_one(p in prior()) {
        let (lo, hi) = p.effective_support();
        let breaks: Vec<f64> = p.continuous_part().map(|c| c.landmarks()).unwrap_or_default();
        let cont = integrate(|x| p.continuous_density(x), lo - 1.0, hi + 1.0, &breaks,
            Tolerance::new(1e-12, 1e-12, 100_000)).value;
        let atoms: f64 = p.atom_part().map(|a| a.masses().iter().sum()).unwrap_or(0.0);
        prop_assert!((p.alpha() * cont + (1.0 - p.alpha()) * atoms - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cdf_is_monotone_and_jumps_by_mass(p in prior()) {
        let (lo, hi) = p.effective_support();
        let mut prev = 0.0;
        for i in 0..=400 {
            let x = lo - 1.0 + (hi - lo + 2.0) * i as f64 / 400.0;
            let c = p.cdf_at(x);
            prop_assert!(c >= prev - 1e-15 && c <= 1.0 + 1e-12);
            prev = c;
        }
        if let Some(a) = p.atom_part() {
            for x in a.locations() {
                let jump = p.cdf_at(*x) - p.cdf_at(x - 1e-10);
                prop_assert!((jump - p.mass_at(*x)).abs() < 1e-8, "{} vs {}", jump, p.mass_at(*x));
            }
        }
    }

    #[test]
    fn alignment_points_make_supports_meet(a in atoms(), m in 2usize..5) {
        let p = ScalarPrior::mixture(0.0, None, Some(a.clone())).unwrap();
        let set = p.alignment_set(m).unwrap();
        let next = p.alignment_set(m + 1).unwrap();
        for t in &set {
            prop_assert!(next.iter().any(|u| (u - t).abs() < 1e-12));
            // some pair of shifted supports {X - k t} must intersect
            let hit = (0..m).any(|k| (0..k).any(|j| a.locations().iter().any(|x| {
                a.locations().iter().any(|z| ((x - k as f64 * t) - (z - j as f64 * t)).abs() < 1e-9)
            })));
            prop_assert!(hit, "t = {}", t);
        }
    }
}

fn assert_moments(name: &str, p: &ScalarPrior) {
    let n = 1_000_000;
    let xs = p.sample(n, 11).unwrap();
    let (mean, var) = p.moments();
    let m: f64 = xs.iter().sum::<f64>() / n as f64;
    let v: f64 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    let se_mean = (var / n as f64).sqrt();
    let m4: f64 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n as f64;
    let nf = n as f64;
    let se_var = ((m4 - var * var * (nf - 3.0) / (nf - 1.0)) / nf).sqrt();
    assert!((m - mean).abs() <= 5.0 * se_mean + 1e-15, "{name}: mean {m} vs {mean}");
    assert!((v - var).abs() <= 5.0 * se_var + 1e-15, "{name}: var {v} vs {var}");
}

#[test]
fn sampled_moments_match_every_family() {
    for (name, p) in common::zoo() {
        assert_moments(name, &p);
    }
    assert_moments("logistic", &common::logistic());
}

#[test]
fn sampling_examples() {
    let b = ScalarPrior::bernoulli(0.3).unwrap().sample(1_000_000, 7).unwrap();
    let m = b.iter().sum::<f64>() / b.len() as f64;
    assert!((0.2977..=0.3023).contains(&m), "{m}");
    let d = ScalarPrior::discrete(&[(2.0, 1.0)]).unwrap().sample(1000, 3).unwrap();
    assert!(d.iter().all(|x| *x == 2.0));
    let g = ScalarPrior::gaussian(0.0, 1.0).unwrap().sample(1_000_000, 5).unwrap();
    let mean = g.iter().sum::<f64>() / 1e6;
    let var = g.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (1e6 - 1.0);
    assert!((0.993..=1.007).contains(&var), "{var}");
    let p = ScalarPrior::exponential(2.0).unwrap();
    assert_eq!(p.sample(100, 9).unwrap(), p.sample(100, 9).unwrap());
}
