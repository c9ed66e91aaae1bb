//! High-noise limits of the bound, the unimodal shortcut for the overlap
//! integral, the Bernoulli closed form and low-noise slope tables.

use serde::Serialize;

use crate::channel::GaussianChannel;
use crate::error::{Result, ZzbError};
use crate::prior::{ContinuousLaw, Prior, ScalarPrior};
use crate::zzb::{
    continuous_integral, discrete_sum, prior_t_breaks, zz_product, zz_scalar, Curve,
    QuadratureSpec,
};

/// High-noise limit of the bound, compared against the prior variance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HighNoiseReport {
    pub value: f64,
    pub variance: f64,
    /// `variance - value`
    pub gap: f64,
    /// `(t, H(t), valley-filled (M - H) / (M - 1))` on the node grid.
    pub per_t: Vec<(f64, f64, f64)>,
    pub truncation_estimate: f64,
    pub converged: bool,
    pub t_max: f64,
    pub m: usize,
    pub with_valley_fill: bool,
}

/// One row of a low-noise slope table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeEntry {
    pub eta: f64,
    pub zz_over_eta: f64,
    pub converged: bool,
}

/// `sum(w) - max(w)`: the missing mass when only the largest weight counts.
fn deficit(w: &[f64]) -> f64 {
    let total: f64 = w.iter().sum();
    let max = w.iter().copied().fold(0.0, f64::max);
    (total - max).max(0.0)
}

/// `(M - H_c) / (M - 1)` and `(M - H_d) / (M - 1)`, unweighted by alpha.
fn deficit_parts(prior: &ScalarPrior, t: f64, m: usize, quad: &QuadratureSpec) -> (f64, f64, bool) {
    let scale = (m - 1) as f64;
    let (c, ok) = match prior.continuous_part() {
        Some(law) => continuous_integral(law, t, m, deficit, quad),
        None => (0.0, true),
    };
    let d = prior.atom_part().map_or(0.0, |a| discrete_sum(a, t, m, deficit));
    ((c / scale).clamp(0.0, 1.0), (d / scale).clamp(0.0, 1.0), ok)
}

fn check_m(m: usize) -> Result<()> {
    if m < 2 {
        return Err(ZzbError::InvalidProblem(format!("M must be at least 2, got {m}")));
    }
    Ok(())
}

/// `H(t) = integral of max_j dP_X(x + j t)`, in `[1, M]`.
pub fn h_overlap(prior: &ScalarPrior, t: f64, m: usize, quad: &QuadratureSpec) -> Result<f64> {
    check_m(m)?;
    quad.validate()?;
    if !(t > 0.0) {
        return Err(ZzbError::InvalidProblem(format!("t must be positive, got {t}")));
    }
    let (c, d, _) = deficit_parts(prior, t, m, quad);
    let a = prior.alpha();
    Ok(m as f64 - (m - 1) as f64 * (a * c + (1.0 - a) * d))
}

/// Whether the density has a single rise-then-fall shape on a fine grid of its
/// effective support.
pub fn is_unimodal(law: &ContinuousLaw) -> bool {
    let (lo, hi) = law.effective_support();
    let n = 2001;
    let h = (hi - lo) / (n - 1) as f64;
    let f: Vec<f64> = (0..n).map(|i| law.density(lo + i as f64 * h)).collect();
    let tol = 1e-10 * f.iter().copied().fold(0.0, f64::max);
    let mut falling = false;
    for w in f.windows(2) {
        let d = w[1] - w[0];
        if d < -tol {
            falling = true;
        } else if d > tol && falling {
            return false;
        }
    }
    true
}

/// `H(t) = 1 + (M - 1) (F(a + t) - F(a))` where `f(a) = f(a + t)`, valid for
/// unimodal continuous priors.
pub fn h_unimodal(prior: &ScalarPrior, t: f64, m: usize) -> Result<f64> {
    check_m(m)?;
    if !(t > 0.0) {
        return Err(ZzbError::InvalidProblem(format!("t must be positive, got {t}")));
    }
    let law = match prior.continuous_part() {
        Some(law) if prior.is_purely_continuous() => law,
        _ => {
            return Err(ZzbError::Precondition(
                "unimodal shortcut needs a purely continuous prior".into(),
            ))
        }
    };
    if !is_unimodal(law) {
        return Err(ZzbError::Precondition("density is not unimodal".into()));
    }
    let mode = law.mode();
    let gap = |a: f64| law.density(a) - law.density(a + t);
    let (mut lo, mut hi) = (mode - t, mode);
    while hi - lo > 1e-12 * (1.0 + mode.abs().max(t)) {
        let mid = 0.5 * (lo + hi);
        if gap(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let a = 0.5 * (lo + hi);
    Ok(1.0 + (m - 1) as f64 * (law.cdf(a + t) - law.cdf(a)))
}

/// `integral of (t/2) (M - H(t)) / (M - 1) dt`, valley-filled or not.
pub fn high_noise_bound(
    prior: &ScalarPrior,
    m: usize,
    with_valley_fill: bool,
    quad: &QuadratureSpec,
) -> Result<HighNoiseReport> {
    check_m(m)?;
    quad.validate()?;
    let scale = (m - 1) as f64;
    let cont = |t: f64| {
        let law = prior.continuous_part().expect("continuous part");
        let (v, ok) = continuous_integral(law, t, m, deficit, quad);
        ((v / scale).clamp(0.0, 1.0), ok)
    };
    let disc = |t: f64| {
        let atoms = prior.atom_part().expect("atom part");
        (discrete_sum(atoms, t, m, deficit) / scale).clamp(0.0, 1.0)
    };
    let (_, variance) = prior.moments();
    let sd = variance.sqrt();
    let curve = Curve {
        alpha: prior.alpha(),
        cont: prior.continuous_part().map(|_| &cont as &(dyn Fn(f64) -> (f64, bool) + Sync)),
        disc: prior.atom_part().map(|_| &disc as &(dyn Fn(f64) -> f64 + Sync)),
        alignment: prior.alignment_set(m).unwrap_or_default(),
        t_breaks: prior_t_breaks(prior, m),
        fine_scale: None,
        tail_scale: sd,
        default_t_max: prior.spread() + 12.0 * sd,
    };
    let r = curve.evaluate(quad);
    let (value, trunc) = if with_valley_fill {
        (r.filled, r.truncation_filled)
    } else {
        (r.plain, r.truncation_plain)
    };
    let value = value.max(0.0);
    Ok(HighNoiseReport {
        value,
        variance,
        gap: variance - value,
        per_t: r
            .nodes
            .iter()
            .map(|(t, g, v)| (*t, m as f64 - scale * g, *v))
            .collect(),
        truncation_estimate: trunc,
        converged: r.converged && trunc < quad.refine_tol,
        t_max: r.t_max,
        m,
        with_valley_fill,
    })
}

/// Valley-filled high-noise limit for `Ber(p)` and `M = 2`: `min(p, 1 - p) / 4`.
pub fn bernoulli_high_noise(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(ZzbError::InvalidPrior(format!(
            "bernoulli parameter {p} must lie in (0, 1)"
        )));
    }
    Ok(0.25 * p.min(1.0 - p))
}

/// `ZZ(eta) / eta` for `M = 2` without valley filling, one row per noise level.
pub fn low_noise_slope(prior: &Prior, etas: &[f64], quad: &QuadratureSpec) -> Result<Vec<SlopeEntry>> {
    if etas.is_empty() || etas.iter().any(|e| !(*e > 0.0)) {
        return Err(ZzbError::Misuse("noise levels must be positive".into()));
    }
    if etas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(ZzbError::Misuse("noise levels must be strictly decreasing".into()));
    }
    etas.iter()
        .map(|&eta| {
            let report = match prior {
                Prior::Scalar(p) => zz_scalar(p, &GaussianChannel::scalar(eta)?, 2, false, quad)?,
                Prior::Product(p) => {
                    let channels = vec![GaussianChannel::scalar(eta)?; p.dim()];
                    zz_product(p, &channels, 2, false, quad)?
                }
            };
            Ok(SlopeEntry {
                eta,
                zz_over_eta: report.value / eta,
                converged: report.converged,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::normal_cdf;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn overlap_examples() {
        for p in [0.2, 0.5, 0.9] {
            let b = ScalarPrior::bernoulli(p).unwrap();
            let h = h_overlap(&b, 1.0, 2, &q()).unwrap();
            assert!((h - (1.0 + p.max(1.0 - p))).abs() < 1e-15);
            assert_eq!(h_overlap(&b, 0.37, 2, &q()).unwrap(), 2.0);
        }
        let g = ScalarPrior::gaussian(0.0, 1.0).unwrap();
        let h = h_overlap(&g, 1.0, 2, &q()).unwrap();
        assert!((h - 2.0 * normal_cdf(0.5)).abs() < 1e-9, "{h}");
        assert!((h - 1.382_924_922_5).abs() < 1e-9);
    }

    #[test]
    fn unimodal_examples() {
        let g = ScalarPrior::gaussian(0.0, 1.0).unwrap();
        for t in [0.1, 1.0, 3.0] {
            let h = h_unimodal(&g, t, 2).unwrap();
            assert!((h - 2.0 * normal_cdf(t / 2.0)).abs() < 1e-12);
            assert!((h - h_overlap(&g, t, 2, &q()).unwrap()).abs() < 1e-6);
        }
        assert!((h_unimodal(&g, 1e-9, 3).unwrap() - 1.0).abs() < 1e-8);
        let u = ScalarPrior::uniform(-0.5, 0.5).unwrap();
        assert!((h_unimodal(&u, 0.2, 2).unwrap() - 1.2).abs() < 1e-12);
        let bimodal =
            ScalarPrior::gaussian_mixture(vec![0.5, 0.5], vec![-3.0, 3.0], vec![0.25, 0.25])
                .unwrap();
        assert!(matches!(
            h_unimodal(&bimodal, 1.0, 2),
            Err(ZzbError::Precondition(_))
        ));
    }

    #[test]
    fn bernoulli_closed_form() {
        assert!((bernoulli_high_noise(0.3).unwrap() - 0.075).abs() < 1e-15);
        assert_eq!(bernoulli_high_noise(0.5).unwrap(), 0.125);
        assert!(bernoulli_high_noise(0.0).is_err());
        assert!(bernoulli_high_noise(1.0).is_err());
    }

    #[test]
    fn bernoulli_high_noise_bound() {
        let b = ScalarPrior::bernoulli(0.3).unwrap();
        let vf = high_noise_bound(&b, 2, true, &q()).unwrap();
        assert!((vf.value - 0.075).abs() < 1e-12, "{}", vf.value);
        let plain = high_noise_bound(&b, 2, false, &q()).unwrap();
        assert!(plain.value.abs() < 1e-9);
        assert!(vf.gap > 0.0);
    }

    #[test]
    fn gaussian_high_noise_bound() {
        let g = ScalarPrior::gaussian(0.0, 1.0).unwrap();
        for vf in [false, true] {
            let r = high_noise_bound(&g, 2, vf, &q()).unwrap();
            assert!((r.value - 1.0).abs() < 1e-6, "{}", r.value);
            assert!(r.converged);
        }
    }

    #[test]
    fn slope_rejects_bad_lists() {
        let g: Prior = ScalarPrior::gaussian(0.0, 1.0).unwrap().into();
        assert!(low_noise_slope(&g, &[], &q()).is_err());
        assert!(low_noise_slope(&g, &[1e-3, 1e-2], &q()).is_err());
        assert!(low_noise_slope(&g, &[0.0], &q()).is_err());
    }
}
