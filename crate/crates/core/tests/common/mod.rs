#![allow(dead_code)]

use zzb_core::{AtomList, ContinuousLaw, GaussianChannel, ScalarPrior, Table};

pub fn ch(eta: f64) -> GaussianChannel {
    GaussianChannel::scalar(eta).unwrap()
}

/// Two Gaussian components at -3 and 3: a narrow one (var 0.01) and a wide
/// one (var 9), equal weights.
pub fn bimodal() -> ScalarPrior {
    ScalarPrior::gaussian_mixture(vec![0.5, 0.5], vec![-3.0, 3.0], vec![0.01, 9.0]).unwrap()
}

/// Equal components at -3 and 3 with variance 0.5; the posterior at y = 0 has
/// two modes when eta = 0.1.
pub fn symmetric_bimodal() -> ScalarPrior {
    ScalarPrior::gaussian_mixture(vec![0.5, 0.5], vec![-3.0, 3.0], vec![0.5, 0.5]).unwrap()
}

pub fn triangle() -> ScalarPrior {
    ScalarPrior::tabulated(Table::new(vec![-1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]).unwrap()).unwrap()
}

pub fn logistic() -> ScalarPrior {
    let xs: Vec<f64> = (0..=4000).map(|i| -40.0 + 0.02 * i as f64).collect();
    let fs = xs
        .iter()
        .map(|x| {
            let e = (-x.abs()).exp();
            e / ((1.0 + e) * (1.0 + e))
        })
        .collect();
    ScalarPrior::tabulated(Table::normalized(xs, fs).unwrap()).unwrap()
}

pub fn gauss_atom_mixture() -> ScalarPrior {
    ScalarPrior::mixture(
        0.5,
        Some(ContinuousLaw::Gaussian { mean: 0.0, var: 1.0 }),
        Some(AtomList::new(&[(0.0, 1.0)]).unwrap()),
    )
    .unwrap()
}

pub fn plus_minus_one() -> ScalarPrior {
    ScalarPrior::discrete(&[(-1.0, 0.5), (1.0, 0.5)]).unwrap()
}

/// The eight reference priors.
pub fn zoo() -> Vec<(&'static str, ScalarPrior)> {
    vec![
        ("gaussian", ScalarPrior::gaussian(0.0, 1.0).unwrap()),
        ("uniform", ScalarPrior::uniform(0.0, 1.0).unwrap()),
        ("exponential", ScalarPrior::exponential(1.0).unwrap()),
        ("bimodal", bimodal()),
        ("triangle", triangle()),
        ("bernoulli", ScalarPrior::bernoulli(0.3).unwrap()),
        ("plus_minus_one", plus_minus_one()),
        ("gauss_atom", gauss_atom_mixture()),
    ]
}

/// Composite Simpson weights for `n` (odd) equally spaced nodes on `[a, b]`.
pub fn simpson_nodes(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 3 && n % 2 == 1);
    let h = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| {
            let w = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            (a + i as f64 * h, w * h / 3.0)
        })
        .collect()
}

/// `h(t)` of a two-coordinate product of standard normals with offsets
/// `{0, t e_axis}`, by integrating the planar MAP error over an `x` grid.
pub fn brute_planar_h(t: f64, axis: usize, eta: f64, x_nodes: usize) -> f64 {
    use zzb_core::{map_error, HypothesisProblem, QuadratureSpec};
    let f = |x: &[f64]| zzb_core::special::normal_pdf(x[0]) * zzb_core::special::normal_pdf(x[1]);
    let c = GaussianChannel::new(eta, 2).unwrap();
    let q = QuadratureSpec { y_tol: 1e-6, ..QuadratureSpec::default() };
    let mut u = vec![0.0, 0.0];
    u[axis] = t;
    let grid = simpson_nodes(-6.0 - t, 6.0, x_nodes);
    let mut total = 0.0;
    for (x0, w0) in &grid {
        for (x1, w1) in &grid {
            let x = [*x0, *x1];
            let shifted = [x[0] + u[0], x[1] + u[1]];
            let (a, b) = (f(&x), f(&shifted));
            if a + b < 1e-14 {
                continue;
            }
            let prob = HypothesisProblem::new(
                x.to_vec(),
                vec![vec![0.0, 0.0], u.clone()],
                vec![a / (a + b), b / (a + b)],
            )
            .unwrap();
            total += w0 * w1 * (a + b) * map_error(&prob, &c, &q).unwrap();
        }
    }
    total
}
