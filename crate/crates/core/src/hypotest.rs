//! M-ary hypothesis tests between shifted copies of a prior: data-dependent
//! hypothesis weights, the minimum (MAP) error probability and its closed
//! forms.

use serde::Serialize;

use crate::channel::{Channel, GaussianChannel};
use crate::error::{Result, ZzbError};
use crate::prior::{Prior, ScalarPrior};
use std::cell::Cell;

use crate::quad::{integrate, simpson_refined, QuadResult, Tolerance};
use crate::special::{gaussian_log_pdf, normal_cdf, q_function};
use crate::zzb::QuadratureSpec;

/// Hypotheses `H_k: X = center + offsets[k]` with prior weights `priors[k]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisProblem {
    center: Vec<f64>,
    offsets: Vec<Vec<f64>>,
    priors: Vec<f64>,
}

impl HypothesisProblem {
    pub fn new(center: Vec<f64>, offsets: Vec<Vec<f64>>, priors: Vec<f64>) -> Result<Self> {
        let bad = |m: &str| Err(ZzbError::InvalidProblem(m.to_string()));
        if offsets.len() < 2 {
            return bad("need at least two hypotheses");
        }
        if offsets.len() != priors.len() {
            return bad("offsets and priors differ in length");
        }
        if center.is_empty() || offsets.iter().any(|u| u.len() != center.len()) {
            return bad("offsets must have the dimension of the center point");
        }
        if priors.iter().any(|p| !(*p >= 0.0)) {
            return bad("prior weights must be nonnegative");
        }
        if (priors.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return bad("prior weights must sum to 1");
        }
        Ok(Self {
            center,
            offsets,
            priors,
        })
    }

    /// Scalar problem with offsets `u_k` and the given weights.
    pub fn scalar(center: f64, offsets: &[f64], priors: Vec<f64>) -> Result<Self> {
        Self::new(
            vec![center],
            offsets.iter().map(|u| vec![*u]).collect(),
            priors,
        )
    }

    /// Problem whose weights are the data-dependent priors of `prior` at `x`.
    pub fn from_prior(prior: &Prior, center: Vec<f64>, offsets: Vec<Vec<f64>>) -> Result<Self> {
        let priors = priors_at(prior, &center, &offsets)?;
        Self::new(center, offsets, priors)
    }

    pub fn m(&self) -> usize {
        self.priors.len()
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn offsets(&self) -> &[Vec<f64>] {
        &self.offsets
    }

    /// Mean of each hypothesis, `center + u_k`.
    pub fn means(&self) -> Vec<Vec<f64>> {
        self.offsets
            .iter()
            .map(|u| u.iter().zip(&self.center).map(|(a, b)| a + b).collect())
            .collect()
    }
}

/// Weights `p_k` proportional to the density (or mass) of the prior at
/// `x + u_k`, normalized to sum to one.
///
/// Per coordinate, masses are used as soon as one of the shifted points hits
/// an atom (the shift mixture then has an atom there and every continuous
/// part has zero weight); otherwise the weighted densities are used.
pub fn priors_at(prior: &Prior, x: &[f64], offsets: &[Vec<f64>]) -> Result<Vec<f64>> {
    let factors = prior.factors();
    if x.len() != factors.len() {
        return Err(ZzbError::DimensionMismatch {
            expected: factors.len(),
            got: x.len(),
        });
    }
    if let Some(u) = offsets.iter().find(|u| u.len() != x.len()) {
        return Err(ZzbError::DimensionMismatch {
            expected: x.len(),
            got: u.len(),
        });
    }
    let mut w = vec![1.0; offsets.len()];
    for (i, factor) in factors.iter().enumerate() {
        let shifted: Vec<f64> = offsets.iter().map(|u| x[i] + u[i]).collect();
        let on_atom = factor.has_atoms() && shifted.iter().any(|p| factor.atom_mass(*p) > 0.0);
        for (wk, p) in w.iter_mut().zip(&shifted) {
            *wk *= if on_atom {
                factor.mass_at(*p)
            } else {
                factor.density_at(*p)
            };
        }
    }
    normalize(w)
}

/// Scalar form of [`priors_at`].
pub fn priors_at_scalar(prior: &ScalarPrior, x: f64, offsets: &[f64]) -> Result<Vec<f64>> {
    let on_atom = prior.has_atoms() && offsets.iter().any(|u| prior.atom_mass(x + u) > 0.0);
    let w = offsets
        .iter()
        .map(|u| {
            if on_atom {
                prior.mass_at(x + u)
            } else {
                prior.density_at(x + u)
            }
        })
        .collect();
    normalize(w)
}

fn normalize(mut w: Vec<f64>) -> Result<Vec<f64>> {
    let total: f64 = w.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(ZzbError::OutsideSupport);
    }
    w.iter_mut().for_each(|v| *v /= total);
    Ok(w)
}

/// `1 - max_k p_k`, the error of always declaring the most likely hypothesis.
pub fn high_noise_error(priors: &[f64]) -> f64 {
    1.0 - priors.iter().copied().fold(0.0, f64::max)
}

/// MAP error of two hypotheses `N(0, eta)` and `N(delta, eta)` with weights
/// `q0`, `q1`.
pub fn binary_gaussian_error(q0: f64, q1: f64, delta: f64, eta: f64) -> Result<f64> {
    if !(q0 > 0.0 && q1 > 0.0) || (q0 + q1 - 1.0).abs() > 1e-12 {
        return Err(ZzbError::InvalidProblem(
            "binary weights must be positive and sum to 1".into(),
        ));
    }
    if !(delta > 0.0) || !(eta > 0.0) {
        return Err(ZzbError::InvalidProblem(
            "separation and noise level must be positive".into(),
        ));
    }
    let s = eta.sqrt();
    let a = delta / (2.0 * s);
    let b = s * (q0 / q1).ln() / delta;
    Ok(q0 * q_function(a + b) + q1 * q_function(a - b))
}

/// Unnormalized MAP error between scalar Gaussians `w_l * N(means[l], eta)`:
/// `sum(w) - integral of max_l w_l phi(z - m_l)`, computed exactly from the
/// upper envelope of the log-likelihood lines.
pub fn weighted_error(weights: &[f64], means: &[f64], eta: f64) -> f64 {
    debug_assert_eq!(weights.len(), means.len());
    // after dropping -z^2/(2 eta) and scaling by eta, hypothesis l is the line
    // z -> m_l z + eta ln w_l - m_l^2 / 2
    let mut lines: Vec<(f64, f64, usize)> = weights
        .iter()
        .zip(means)
        .enumerate()
        .filter(|(_, (w, _))| **w > 0.0)
        .map(|(i, (w, m))| (*m, w.ln(), i))
        .collect();
    if lines.len() < 2 {
        return 0.0;
    }
    lines.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
    let cross = |a: &(f64, f64, usize), b: &(f64, f64, usize)| {
        0.5 * (a.0 + b.0) + eta * (a.1 - b.1) / (b.0 - a.0)
    };

    let mut lost = 0.0;
    let mut hull: Vec<(f64, f64, usize)> = Vec::with_capacity(lines.len());
    for line in lines {
        if let Some(top) = hull.last() {
            if top.0 == line.0 {
                // parallel: only the larger weight can ever win
                if top.1 >= line.1 {
                    lost += weights[line.2];
                    continue;
                }
                lost += weights[top.2];
                hull.pop();
            }
        }
        while hull.len() >= 2 {
            let n = hull.len();
            if cross(&hull[n - 2], &line) <= cross(&hull[n - 2], &hull[n - 1]) {
                lost += weights[hull[n - 1].2];
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(line);
    }
    let s = eta.sqrt();
    for (k, line) in hull.iter().enumerate() {
        let w = weights[line.2];
        if k > 0 {
            lost += w * normal_cdf((cross(&hull[k - 1], line) - line.0) / s);
        }
        if k + 1 < hull.len() {
            lost += w * q_function((cross(line, &hull[k + 1]) - line.0) / s);
        }
    }
    lost
}

/// Minimum error probability of the problem, by Simpson quadrature of
/// `1 - integral of max_k p_k f(y | x + u_k)` over a window around the means.
pub fn map_error(
    problem: &HypothesisProblem,
    channel: &GaussianChannel,
    quad: &QuadratureSpec,
) -> Result<f64> {
    Ok(map_error_detailed(problem, channel, quad)?.value)
}

/// [`map_error`] together with the quadrature diagnostics.
pub fn map_error_detailed(
    problem: &HypothesisProblem,
    channel: &GaussianChannel,
    quad: &QuadratureSpec,
) -> Result<QuadResult> {
    let d = problem.dim();
    if channel.dim() != d {
        return Err(ZzbError::DimensionMismatch {
            expected: channel.dim(),
            got: d,
        });
    }
    let done = |value| QuadResult {
        value,
        error: 0.0,
        evals: 0,
        converged: true,
    };
    if problem.priors.iter().any(|p| *p >= 1.0) {
        return Ok(done(0.0));
    }
    let truncated = d as f64 * 2.0 * q_function(quad.y_window_sigma);
    if truncated > quad.y_tol {
        return Err(ZzbError::WindowTooSmall {
            truncated,
            tol: quad.y_tol,
        });
    }
    let eta = channel.eta();
    let half = quad.y_window_sigma * eta.sqrt();
    let means = problem.means();
    let active: Vec<usize> = (0..problem.m())
        .filter(|k| problem.priors[*k] > 0.0)
        .collect();
    let log_p: Vec<f64> = problem.priors.iter().map(|p| p.ln()).collect();

    if d == 1 {
        let ms: Vec<f64> = means.iter().map(|m| m[0]).collect();
        let lo = active.iter().map(|k| ms[*k]).fold(f64::INFINITY, f64::min) - half;
        let hi = active.iter().map(|k| ms[*k]).fold(f64::NEG_INFINITY, f64::max) + half;
        // split at every pairwise crossing so each Simpson piece is smooth
        let mut cuts = vec![lo, hi];
        for (a, &i) in active.iter().enumerate() {
            for &j in &active[a + 1..] {
                if ms[i] != ms[j] {
                    let y = 0.5 * (ms[i] + ms[j]) + eta * (log_p[i] - log_p[j]) / (ms[j] - ms[i]);
                    if y > lo && y < hi {
                        cuts.push(y);
                    }
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let f = |y: f64| {
            active
                .iter()
                .map(|k| log_p[*k] + gaussian_log_pdf(y, ms[*k], eta))
                .fold(f64::NEG_INFINITY, f64::max)
                .exp()
        };
        let pieces = (cuts.len() - 1) as f64;
        let mut total = QuadResult {
            value: 0.0,
            error: 0.0,
            evals: 0,
            converged: true,
        };
        for w in cuts.windows(2) {
            let r = simpson_refined(f, w[0], w[1], quad.y_tol / pieces, 16, quad.node_cap);
            total.value += r.value;
            total.error += r.error;
            total.evals += r.evals;
            total.converged &= r.converged;
        }
        total.value = (1.0 - total.value).clamp(0.0, high_noise_error(&problem.priors));
        return Ok(total);
    }

    let lo: Vec<f64> = (0..d)
        .map(|i| active.iter().map(|k| means[*k][i]).fold(f64::INFINITY, f64::min) - half)
        .collect();
    let hi: Vec<f64> = (0..d)
        .map(|i| active.iter().map(|k| means[*k][i]).fold(f64::NEG_INFINITY, f64::max) + half)
        .collect();
    let f = |y: &[f64]| {
        active
            .iter()
            .map(|k| {
                log_p[*k]
                    + y.iter()
                        .zip(&means[*k])
                        .map(|(yi, mi)| gaussian_log_pdf(*yi, *mi, eta))
                        .sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max)
            .exp()
    };
    if d == 2 {
        return Ok(planar_error(problem, &means, &active, &log_p, eta, &lo, &hi, quad));
    }
    let mut n = 16usize;
    let mut prev = tensor_simpson(&f, &lo, &hi, n);
    let mut evals = (n + 1).pow(d as u32);
    let mut result = QuadResult {
        value: prev,
        error: f64::NAN,
        evals,
        converged: false,
    };
    while (2 * n + 1).saturating_pow(d as u32) <= quad.node_cap {
        n *= 2;
        let next = tensor_simpson(&f, &lo, &hi, n);
        evals += (n + 1).pow(d as u32);
        let diff = (next - prev).abs();
        result = QuadResult {
            value: next,
            error: diff,
            evals,
            converged: diff < quad.y_tol,
        };
        if result.converged {
            break;
        }
        prev = next;
    }
    result.value = (1.0 - result.value).clamp(0.0, high_noise_error(&problem.priors));
    Ok(result)
}

/// Two-dimensional case: nested adaptive Gauss-Kronrod. Decision boundaries
/// are the lines `a . y = c` where two weighted densities meet; the inner
/// integral splits where they cross the current `y_1`, the outer one where a
/// boundary is parallel to the `y_2` axis or two boundaries intersect.
#[allow(clippy::too_many_arguments)]
fn planar_error(
    problem: &HypothesisProblem,
    means: &[Vec<f64>],
    active: &[usize],
    log_p: &[f64],
    eta: f64,
    lo: &[f64],
    hi: &[f64],
    quad: &QuadratureSpec,
) -> QuadResult {
    let mut lines: Vec<([f64; 2], f64)> = Vec::new();
    for (n, &i) in active.iter().enumerate() {
        for &j in &active[n + 1..] {
            let a = [means[i][0] - means[j][0], means[i][1] - means[j][1]];
            if a == [0.0, 0.0] {
                continue;
            }
            let sq = |k: usize| means[k][0] * means[k][0] + means[k][1] * means[k][1];
            let c = eta * (log_p[j] - log_p[i]) + 0.5 * (sq(i) - sq(j));
            lines.push((a, c));
        }
    }
    let mut outer_breaks: Vec<f64> = active.iter().map(|k| means[*k][0]).collect();
    for (n, (a, c)) in lines.iter().enumerate() {
        if a[1] == 0.0 {
            outer_breaks.push(c / a[0]);
        }
        for (b, e) in &lines[n + 1..] {
            let det = a[0] * b[1] - a[1] * b[0];
            if det != 0.0 {
                outer_breaks.push((c * b[1] - a[1] * e) / det);
            }
        }
    }
    let density = |y0: f64, y1: f64| {
        active
            .iter()
            .map(|k| {
                log_p[*k]
                    + gaussian_log_pdf(y0, means[*k][0], eta)
                    + gaussian_log_pdf(y1, means[*k][1], eta)
            })
            .fold(f64::NEG_INFINITY, f64::max)
            .exp()
    };
    let width = hi[0] - lo[0];
    let inner_tol = Tolerance::new(0.1 * quad.y_tol / width, 0.0, 50_000);
    let outer_tol = Tolerance::new(0.5 * quad.y_tol, 0.0, 50_000);
    let evals = Cell::new(0usize);
    let inner_ok = Cell::new(true);
    let outer = integrate(
        |y0| {
            let mut breaks: Vec<f64> = active.iter().map(|k| means[*k][1]).collect();
            breaks.extend(
                lines
                    .iter()
                    .filter(|(a, _)| a[1] != 0.0)
                    .map(|(a, c)| (c - a[0] * y0) / a[1]),
            );
            let r = integrate(|y1| density(y0, y1), lo[1], hi[1], &breaks, inner_tol);
            evals.set(evals.get() + r.evals);
            inner_ok.set(inner_ok.get() && r.converged);
            r.value
        },
        lo[0],
        hi[0],
        &outer_breaks,
        outer_tol,
    );
    QuadResult {
        value: (1.0 - outer.value).clamp(0.0, high_noise_error(&problem.priors)),
        error: outer.error + 0.1 * quad.y_tol,
        evals: evals.get(),
        converged: outer.converged && inner_ok.get(),
    }
}

/// Tensor-product composite Simpson rule with `n` panels per axis.
fn tensor_simpson<F: Fn(&[f64]) -> f64>(f: &F, lo: &[f64], hi: &[f64], n: usize) -> f64 {
    let d = lo.len();
    let h: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| (b - a) / n as f64).collect();
    let weight = |i: usize| {
        if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let mut idx = vec![0usize; d];
    let mut y = lo.to_vec();
    let mut sum = 0.0;
    loop {
        let w: f64 = idx.iter().map(|i| weight(*i)).product();
        sum += w * f(&y);
        let mut axis = 0;
        loop {
            if axis == d {
                let scale: f64 = h.iter().map(|v| v / 3.0).product();
                return sum * scale;
            }
            idx[axis] += 1;
            if idx[axis] <= n {
                y[axis] = lo[axis] + idx[axis] as f64 * h[axis];
                break;
            }
            idx[axis] = 0;
            y[axis] = lo[axis];
            axis += 1;
        }
    }
}
