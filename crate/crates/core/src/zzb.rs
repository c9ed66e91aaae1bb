//! The Ziv-Zakai bound: the error integral `h(t, M)`, valley filling and the
//! outer `t`-integral, for scalar priors and independent products.
//!
//! Offsets are fixed to `u_k = k t`. In one dimension this is forced; for
//! product priors the per-coordinate (axis-aligned) choice is what makes the
//! bound split into a sum of scalar bounds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{Channel, GaussianChannel};
use crate::error::{Result, ZzbError};
use crate::hypotest::weighted_error;
use crate::prior::{same_point, AtomList, ContinuousLaw, ProductPrior, ScalarPrior};
use crate::quad::{integrate, Tolerance};

/// Default cap on quadrature nodes; the CLI lets `ZZB_NODE_CAP` override it.
pub const DEFAULT_NODE_CAP: usize = 1 << 20;

/// Grids and tolerances for the `t`, `x` and `y` integrations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    /// Truncation of the outer integral; `None` picks it from the prior and
    /// noise scales.
    pub t_max: Option<f64>,
    /// Uniform nodes on `(0, t_max]` used for valley filling.
    pub t_nodes: usize,
    /// Restricts the `x`-integration; `None` uses the prior's support.
    pub x_window: Option<(f64, f64)>,
    /// Half-width of the `y` window in noise standard deviations.
    pub y_window_sigma: f64,
    /// Stopping tolerance of the Simpson refinement in [`crate::hypotest::map_error`].
    pub y_tol: f64,
    pub refine_tol: f64,
    /// Extra `t` nodes, all in `(0, t_max]`.
    pub extra_t_nodes: Vec<f64>,
    /// When false, atoms get no special treatment: the bound is a plain
    /// quadrature over the node grid and alignment points are not injected.
    pub alignment_aware: bool,
    pub node_cap: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            t_max: None,
            t_nodes: 400,
            x_window: None,
            y_window_sigma: 10.0,
            y_tol: 1e-9,
            refine_tol: 1e-7,
            extra_t_nodes: Vec::new(),
            alignment_aware: true,
            node_cap: DEFAULT_NODE_CAP,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(ZzbError::InvalidQuadrature(m));
        if let Some(t) = self.t_max {
            if !(t > 0.0) || !t.is_finite() {
                return bad(format!("t_max must be positive, got {t}"));
            }
        }
        if self.t_nodes < 16 {
            return bad(format!("t_nodes must be at least 16, got {}", self.t_nodes));
        }
        if !(self.refine_tol > 0.0) || !(self.y_tol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if !(self.y_window_sigma > 0.0) {
            return bad("y_window_sigma must be positive".into());
        }
        if let Some((a, b)) = self.x_window {
            if !(b > a) {
                return bad("x_window must be a nonempty interval".into());
            }
        }
        if self.node_cap < 64 {
            return bad("node_cap must be at least 64".into());
        }
        let hi = self.t_max.unwrap_or(f64::INFINITY);
        if let Some(t) = self.extra_t_nodes.iter().find(|t| !(**t > 0.0 && **t <= hi)) {
            return bad(format!("extra t node {t} outside (0, t_max]"));
        }
        Ok(())
    }

    fn inner_tolerance(&self) -> Tolerance {
        Tolerance::new(1e-4 * self.refine_tol, 1e-10, 200_000)
    }
}

/// A bound value with its integrand on the node grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub value: f64,
    /// `(t, h / (M - 1), valley-filled h / (M - 1))` at every grid node.
    pub per_t: Vec<(f64, f64, f64)>,
    pub truncation_estimate: f64,
    pub converged: bool,
    pub t_max: f64,
    pub m: usize,
    pub with_valley_fill: bool,
    pub spec_echo: QuadratureSpec,
    /// Per-coordinate reports of a product bound; empty for scalar priors.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<BoundReport>,
}

/// Reverse running maximum `sup_{u >= t}` on a sorted node list.
pub fn valley_fill(nodes: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    if nodes.is_empty() {
        return Err(ZzbError::Misuse("valley_fill on an empty node list".into()));
    }
    if nodes.windows(2).any(|w| w[1].0 < w[0].0) {
        return Err(ZzbError::Misuse("valley_fill nodes must be sorted by t".into()));
    }
    let mut out = nodes.to_vec();
    let mut run = f64::NEG_INFINITY;
    for node in out.iter_mut().rev() {
        run = run.max(node.1);
        node.1 = run;
    }
    Ok(out)
}

/// `integral over x of err(f(x), f(x + t), ..., f(x + (M-1)t))` for an
/// unweighted continuous law, where `err` is homogeneous in the weights.
pub(crate) fn continuous_integral<E>(
    law: &ContinuousLaw,
    t: f64,
    m: usize,
    err: E,
    quad: &QuadratureSpec,
) -> (f64, bool)
where
    E: Fn(&[f64]) -> f64,
{
    let (lo, hi) = law.effective_support();
    let (mut a, mut b) = (lo - (m - 1) as f64 * t, hi);
    if let Some((wa, wb)) = quad.x_window {
        a = a.max(wa);
        b = b.min(wb);
    }
    if !(b > a) {
        return (0.0, true);
    }
    let mut breaks = Vec::new();
    for p in law.landmarks().into_iter().chain([lo, hi]) {
        for l in 0..m {
            breaks.push(p - l as f64 * t);
        }
    }
    let r = integrate(
        |x| {
            let mut ws = [0.0; 16];
            if m <= ws.len() {
                for (l, w) in ws[..m].iter_mut().enumerate() {
                    *w = law.density(x + l as f64 * t);
                }
                err(&ws[..m])
            } else {
                let ws: Vec<f64> = (0..m).map(|l| law.density(x + l as f64 * t)).collect();
                err(&ws)
            }
        },
        a,
        b,
        &breaks,
        quad.inner_tolerance(),
    );
    (r.value.max(0.0), r.converged)
}

/// `sum over the union of shifted atom supports of err(p(x), ..., p(x + (M-1)t))`.
pub(crate) fn discrete_sum<E>(atoms: &AtomList, t: f64, m: usize, err: E) -> f64
where
    E: Fn(&[f64]) -> f64,
{
    let mut xs: Vec<f64> = atoms
        .locations()
        .iter()
        .flat_map(|s| (0..m).map(move |l| s - l as f64 * t))
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| same_point(*a, *b));
    let mut ws = vec![0.0; m];
    xs.iter()
        .map(|x| {
            for (l, w) in ws.iter_mut().enumerate() {
                *w = atoms.mass(x + l as f64 * t);
            }
            err(&ws)
        })
        .sum()
}

fn shift_means(m: usize, t: f64) -> Vec<f64> {
    (0..m).map(|l| l as f64 * t).collect()
}

/// Continuous and atomic parts of `h / (M - 1)` at `t`, both unweighted by
/// `alpha`, plus the inner convergence flag.
fn h_parts(prior: &ScalarPrior, eta: f64, t: f64, m: usize, quad: &QuadratureSpec) -> (f64, f64, bool) {
    let means = shift_means(m, t);
    let err = |w: &[f64]| weighted_error(w, &means, eta);
    let scale = (m - 1) as f64;
    let (c, ok) = match prior.continuous_part() {
        Some(law) => continuous_integral(law, t, m, err, quad),
        None => (0.0, true),
    };
    let d = prior.atom_part().map_or(0.0, |a| discrete_sum(a, t, m, err));
    ((c / scale).clamp(0.0, 1.0), (d / scale).clamp(0.0, 1.0), ok)
}

fn check_scalar_args(channel: &GaussianChannel, m: usize, quad: &QuadratureSpec) -> Result<()> {
    if channel.dim() != 1 {
        return Err(ZzbError::DimensionMismatch {
            expected: 1,
            got: channel.dim(),
        });
    }
    if m < 2 {
        return Err(ZzbError::InvalidProblem(format!("M must be at least 2, got {m}")));
    }
    quad.validate()
}

/// `h(t, M)` for offsets `u_k = k t`, in `[0, M - 1]`.
pub fn h_scalar(
    prior: &ScalarPrior,
    channel: &GaussianChannel,
    t: f64,
    m: usize,
    quad: &QuadratureSpec,
) -> Result<f64> {
    check_scalar_args(channel, m, quad)?;
    if !(t > 0.0) {
        return Err(ZzbError::InvalidProblem(format!("t must be positive, got {t}")));
    }
    let (c, d, _) = h_parts(prior, channel.eta(), t, m, quad);
    let a = prior.alpha();
    Ok((m - 1) as f64 * (a * c + (1.0 - a) * d))
}

/// An integrand `g(t) = alpha g_c(t) + (1 - alpha) g_d(t)` ready for the
/// outer integral, where `g_d` vanishes off the alignment set.
pub(crate) struct Curve<'a> {
    pub alpha: f64,
    pub cont: Option<&'a (dyn Fn(f64) -> (f64, bool) + Sync)>,
    pub disc: Option<&'a (dyn Fn(f64) -> f64 + Sync)>,
    pub alignment: Vec<f64>,
    pub t_breaks: Vec<f64>,
    /// Length scale near `t = 0` that needs extra nodes.
    pub fine_scale: Option<f64>,
    /// Multiplies `(t_max / 2) g(t_max)` in the truncation estimate.
    pub tail_scale: f64,
    /// Starting truncation when the `QuadratureSpec` leaves `t_max` open.
    pub default_t_max: f64,
}

pub(crate) struct CurveResult {
    pub plain: f64,
    pub filled: f64,
    /// `(t, g, valley-filled g)`
    pub nodes: Vec<(f64, f64, f64)>,
    pub truncation_plain: f64,
    pub truncation_filled: f64,
    pub converged: bool,
    pub t_max: f64,
}

impl Curve<'_> {
    fn cont_at(&self, t: f64) -> (f64, bool) {
        self.cont.map_or((0.0, true), |f| f(t))
    }

    fn disc_at(&self, t: f64) -> f64 {
        self.disc.map_or(0.0, |f| f(t))
    }

    fn total_at(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 1.0;
        }
        self.alpha * self.cont_at(t).0 + (1.0 - self.alpha) * self.disc_at(t)
    }

    fn resolve_t_max(&self, quad: &QuadratureSpec) -> f64 {
        if let Some(t) = quad.t_max {
            return t;
        }
        let mut t = self.default_t_max;
        for _ in 0..12 {
            if 0.5 * t * self.total_at(t) * self.tail_scale < quad.refine_tol {
                break;
            }
            t *= 1.5;
        }
        t
    }

    fn grid(&self, t_max: f64, quad: &QuadratureSpec) -> Vec<f64> {
        let n = quad.t_nodes;
        let mut ts: Vec<f64> = (0..=n).map(|i| (i as f64 * t_max) / n as f64).collect();
        if let Some(s) = self.fine_scale {
            ts.extend((1..=64).map(|k| 0.25 * k as f64 * s).filter(|t| *t < t_max));
        }
        ts.extend(quad.extra_t_nodes.iter().copied());
        ts.extend(self.t_breaks.iter().copied().filter(|t| *t > 0.0 && *t < t_max));
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|a, b| same_point(*a, *b));
        if quad.alignment_aware {
            let align: Vec<f64> = self
                .alignment
                .iter()
                .copied()
                .filter(|t| *t <= t_max)
                .collect();
            ts.retain(|t| !align.iter().any(|a| same_point(*a, *t)));
            ts.extend(align);
            ts.sort_by(f64::total_cmp);
        }
        ts
    }

    pub fn evaluate(&self, quad: &QuadratureSpec) -> CurveResult {
        let t_max = self.resolve_t_max(quad);
        let ts = self.grid(t_max, quad);
        let evals: Vec<(f64, f64, bool)> = ts
            .par_iter()
            .map(|&t| {
                if t == 0.0 {
                    return (1.0, 1.0, true);
                }
                let (c, ok) = self.cont_at(t);
                (c, self.disc_at(t), ok)
            })
            .collect();
        let mut converged = evals.iter().all(|e| e.2);
        let total: Vec<f64> = evals
            .iter()
            .map(|(c, d, _)| self.alpha * c + (1.0 - self.alpha) * d)
            .collect();
        let mut filled_vals = total.clone();
        for k in (0..filled_vals.len() - 1).rev() {
            filled_vals[k] = filled_vals[k].max(filled_vals[k + 1]);
        }

        // piecewise-linear model of the part of g that is integrated as a
        // function; in alignment-aware mode atom spikes are left out of it
        let smooth: Vec<f64> = if quad.alignment_aware {
            evals.iter().map(|(c, _, _)| self.alpha * c).collect()
        } else {
            total.clone()
        };

        let plain = if quad.alignment_aware {
            match self.cont {
                Some(_) if self.alpha > 0.0 => {
                    let mut breaks = self.t_breaks.clone();
                    if let Some(s) = self.fine_scale {
                        breaks.extend((0..8).map(|k| s * 2f64.powi(k)));
                    }
                    let r = integrate(
                        |t| 0.5 * t * self.cont_at(t).0,
                        0.0,
                        t_max,
                        &breaks,
                        Tolerance::new(0.1 * quad.refine_tol, 1e-10, 20_000),
                    );
                    converged &= r.converged;
                    self.alpha * r.value
                }
                _ => 0.0,
            }
        } else {
            ts.windows(2)
                .zip(smooth.windows(2))
                .map(|(t, y)| half_t_linear(t[0], t[1], y[0], y[1]))
                .sum()
        };

        let mut correction = 0.0;
        for j in 0..ts.len() - 1 {
            let k = filled_vals[j + 1];
            let (a, b) = (ts[j], ts[j + 1]);
            let (pa, pb) = (k - smooth[j], k - smooth[j + 1]);
            correction += if pa >= 0.0 && pb >= 0.0 {
                half_t_linear(a, b, pa, pb)
            } else if pa > 0.0 {
                let r = a + (b - a) * pa / (pa - pb);
                half_t_linear(a, r, pa, 0.0)
            } else if pb > 0.0 {
                let r = a + (b - a) * pa / (pa - pb);
                half_t_linear(r, b, 0.0, pb)
            } else {
                0.0
            };
        }

        let last = *total.last().unwrap();
        let trunc = 0.5 * t_max * last * self.tail_scale;
        let trunc_filled = 0.5 * t_max * filled_vals.last().unwrap() * self.tail_scale;
        CurveResult {
            plain,
            filled: plain + correction,
            nodes: ts
                .iter()
                .zip(total.iter().zip(&filled_vals))
                .map(|(t, (g, v))| (*t, *g, *v))
                .collect(),
            truncation_plain: trunc,
            truncation_filled: trunc_filled,
            converged,
            t_max,
        }
    }
}

/// `integral over [a, b] of (t / 2) * L(t)` for `L` linear with `L(a) = ya`,
/// `L(b) = yb` (Simpson is exact for this quadratic).
fn half_t_linear(a: f64, b: f64, ya: f64, yb: f64) -> f64 {
    let mid = 0.5 * (a + b);
    (b - a) / 6.0 * (0.5 * a * ya + mid * (ya + yb) + 0.5 * b * yb)
}

/// Breakpoints for the outer integral coming from the prior's geometry.
pub(crate) fn prior_t_breaks(prior: &ScalarPrior, m: usize) -> Vec<f64> {
    let sd = prior.std_dev();
    let mut bps: Vec<f64> = [0.5, 1.0, 2.0, 4.0].iter().map(|k| k * sd).collect();
    if let Some((a, b)) = prior.continuous_part().and_then(|c| c.bounded_support()) {
        bps.extend((1..m).map(|k| (b - a) / k as f64));
    }
    if let Ok(align) = prior.alignment_set(m) {
        bps.extend(align);
    }
    bps.retain(|t| *t > 0.0 && t.is_finite());
    bps
}

/// The scalar bound `integral of (t/2) g(t) dt` with `g = h / (M - 1)`, or its
/// valley-filled envelope.
pub fn zz_scalar(
    prior: &ScalarPrior,
    channel: &GaussianChannel,
    m: usize,
    with_valley_fill: bool,
    quad: &QuadratureSpec,
) -> Result<BoundReport> {
    check_scalar_args(channel, m, quad)?;
    let eta = channel.eta();
    let s = eta.sqrt();
    let scale = (m - 1) as f64;
    let means = shift_means(m, 1.0);
    let cont = |t: f64| {
        let means: Vec<f64> = means.iter().map(|l| l * t).collect();
        let law = prior.continuous_part().expect("continuous part");
        let (v, ok) = continuous_integral(law, t, m, |w| weighted_error(w, &means, eta), quad);
        ((v / scale).clamp(0.0, 1.0), ok)
    };
    let disc = |t: f64| {
        let means: Vec<f64> = means.iter().map(|l| l * t).collect();
        let atoms = prior.atom_part().expect("atom part");
        (discrete_sum(atoms, t, m, |w| weighted_error(w, &means, eta)) / scale).clamp(0.0, 1.0)
    };
    let mut t_breaks = prior_t_breaks(prior, m);
    t_breaks.extend((0..8).map(|k| s * 2f64.powi(k)));
    let sd = prior.std_dev();
    let curve = Curve {
        alpha: prior.alpha(),
        cont: prior.continuous_part().map(|_| &cont as &(dyn Fn(f64) -> (f64, bool) + Sync)),
        disc: prior.atom_part().map(|_| &disc as &(dyn Fn(f64) -> f64 + Sync)),
        alignment: prior.alignment_set(m).unwrap_or_default(),
        t_breaks,
        fine_scale: Some(s),
        tail_scale: sd + s,
        default_t_max: prior.spread() + 12.0 * sd + 12.0 * s,
    };
    let r = curve.evaluate(quad);
    Ok(report(r, m, with_valley_fill, quad))
}

pub(crate) fn report(r: CurveResult, m: usize, vf: bool, quad: &QuadratureSpec) -> BoundReport {
    let (value, trunc) = if vf {
        (r.filled, r.truncation_filled)
    } else {
        (r.plain, r.truncation_plain)
    };
    BoundReport {
        value: value.max(0.0),
        per_t: r.nodes,
        truncation_estimate: trunc,
        converged: r.converged && trunc < quad.refine_tol,
        t_max: r.t_max,
        m,
        with_valley_fill: vf,
        spec_echo: quad.clone(),
        components: Vec::new(),
    }
}

/// Sum of the scalar bounds of independent coordinates observed through
/// independent channels.
pub fn zz_product(
    prior: &ProductPrior,
    channels: &[GaussianChannel],
    m: usize,
    with_valley_fill: bool,
    quad: &QuadratureSpec,
) -> Result<BoundReport> {
    if channels.len() != prior.dim() {
        return Err(ZzbError::DimensionMismatch {
            expected: prior.dim(),
            got: channels.len(),
        });
    }
    let components = prior
        .factors()
        .iter()
        .zip(channels)
        .map(|(f, c)| zz_scalar(f, c, m, with_valley_fill, quad))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundReport {
        value: components.iter().map(|c| c.value).sum(),
        per_t: Vec::new(),
        truncation_estimate: components.iter().map(|c| c.truncation_estimate).sum(),
        converged: components.iter().all(|c| c.converged),
        t_max: components.iter().map(|c| c.t_max).fold(0.0, f64::max),
        m,
        with_valley_fill,
        spec_echo: quad.clone(),
        components,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::q_function;

    fn ch(eta: f64) -> GaussianChannel {
        GaussianChannel::scalar(eta).unwrap()
    }

    #[test]
    fn valley_fill_examples() {
        let up = [(1.0, 0.9), (2.0, 0.5), (3.0, 0.5)];
        assert_eq!(valley_fill(&up).unwrap(), up.to_vec());
        let v = valley_fill(&[(1.0, 0.0), (2.0, 1.0), (3.0, 0.0)]).unwrap();
        assert_eq!(v, vec![(1.0, 1.0), (2.0, 1.0), (3.0, 0.0)]);
        let z = valley_fill(&[(1.0, 0.0), (2.0, 0.0)]).unwrap();
        assert_eq!(z, vec![(1.0, 0.0), (2.0, 0.0)]);
        assert!(matches!(valley_fill(&[]), Err(ZzbError::Misuse(_))));
        assert!(valley_fill(&[(2.0, 0.0), (1.0, 0.0)]).is_err());
    }

    #[test]
    fn h_gaussian_matches_posterior_error() {
        let p = ScalarPrior::gaussian(0.0, 1.0).unwrap();
        let h = h_scalar(&p, &ch(1.0), 1.0, 2, &QuadratureSpec::default()).unwrap();
        let want = 2.0 * q_function(1.0 / 2f64.sqrt());
        assert!((want - 0.4795001222).abs() < 1e-10);
        assert!((h - want).abs() < 1e-8, "{h}");
    }

    #[test]
    fn h_discrete_vanishes_off_alignment() {
        let p = ScalarPrior::bernoulli(0.3).unwrap();
        let h = h_scalar(&p, &ch(1e6), 0.37, 2, &QuadratureSpec::default()).unwrap();
        assert!(h <= 1e-6, "{h}");
    }

    #[test]
    fn h_tends_to_m_minus_one_at_small_t() {
        let q = QuadratureSpec::default();
        for p in [
            ScalarPrior::gaussian(0.0, 1.0).unwrap(),
            ScalarPrior::uniform(0.0, 1.0).unwrap(),
        ] {
            for m in [2, 3] {
                let t = 1e-8 * (p.spread() + p.std_dev());
                let r = h_scalar(&p, &ch(0.5), t, m, &q).unwrap() / (m - 1) as f64;
                assert!((r - 1.0).abs() < 1e-6, "{r}");
            }
        }
    }

    #[test]
    fn scalar_examples() {
        let q = QuadratureSpec::default();
        let g = zz_scalar(&ScalarPrior::gaussian(0.0, 1.0).unwrap(), &ch(1.0), 2, false, &q).unwrap();
        assert!((g.value - 0.5).abs() < 1e-3 && g.converged);
        for eta in [0.1, 1.0, 10.0] {
            let b = zz_scalar(&ScalarPrior::bernoulli(0.3).unwrap(), &ch(eta), 2, false, &q).unwrap();
            assert!(b.value.abs() < 1e-9, "{}", b.value);
        }
        let eta = 1e-6;
        let u = zz_scalar(&ScalarPrior::uniform(0.0, 1.0).unwrap(), &ch(eta), 2, false, &q).unwrap();
        let r = u.value / eta;
        assert!((0.95..=1.05).contains(&r), "{r}");
    }

    #[test]
    fn report_invariants() {
        let q = QuadratureSpec::default();
        let p = ScalarPrior::mixture(
            0.5,
            Some(ContinuousLaw::Gaussian { mean: 0.0, var: 1.0 }),
            Some(AtomList::new(&[(-1.0, 0.5), (1.0, 0.5)]).unwrap()),
        )
        .unwrap();
        let r = zz_scalar(&p, &ch(0.5), 3, true, &q).unwrap();
        assert!(r.value >= 0.0);
        for (_, h, v) in &r.per_t {
            assert!((0.0..=1.0).contains(h) && (0.0..=1.0).contains(v));
            assert!(v >= h);
        }
        assert!(r.per_t.windows(2).all(|w| w[1].0 > w[0].0 && w[1].2 <= w[0].2));
    }

    #[test]
    fn mixed_h_dominates_scaled_continuous_part() {
        let q = QuadratureSpec::default();
        let law = ContinuousLaw::Gaussian { mean: 0.0, var: 1.0 };
        let mixed = ScalarPrior::mixture(
            0.4,
            Some(law.clone()),
            Some(AtomList::new(&[(0.0, 0.7), (2.0, 0.3)]).unwrap()),
        )
        .unwrap();
        let cont = ScalarPrior::continuous(law).unwrap();
        for t in [0.3, 1.0, 2.0, 2.5] {
            let hm = h_scalar(&mixed, &ch(1.0), t, 2, &q).unwrap();
            let hc = h_scalar(&cont, &ch(1.0), t, 2, &q).unwrap();
            assert!(hm >= 0.4 * hc - 1e-12, "t={t}: {hm} vs {hc}");
        }
    }

    #[test]
    fn product_examples() {
        let q = QuadratureSpec::default();
        let g = ScalarPrior::gaussian(0.0, 1.0).unwrap();
        let two = ProductPrior::new(vec![g.clone(), g.clone()]).unwrap();
        let r = zz_product(&two, &[ch(1.0), ch(1.0)], 2, false, &q).unwrap();
        assert!((r.value - 1.0).abs() < 2e-3);
        assert_eq!(r.components.len(), 2);
        let one = zz_product(&ProductPrior::new(vec![g.clone()]).unwrap(), &[ch(1.0)], 2, false, &q)
            .unwrap();
        let s = zz_scalar(&g, &ch(1.0), 2, false, &q).unwrap();
        assert_eq!(one.value, s.value);
        let gb = ProductPrior::new(vec![g, ScalarPrior::bernoulli(0.3).unwrap()]).unwrap();
        let r = zz_product(&gb, &[ch(1.0), ch(1.0)], 2, false, &q).unwrap();
        assert!((r.value - 0.5).abs() < 1e-3);
        assert!(matches!(
            zz_product(&gb, &[ch(1.0)], 2, false, &q),
            Err(ZzbError::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn quadrature_spec_validation() {
        let ok = QuadratureSpec::default();
        assert!(ok.validate().is_ok());
        let bad = [
            QuadratureSpec { t_max: Some(0.0), ..ok.clone() },
            QuadratureSpec { t_nodes: 15, ..ok.clone() },
            QuadratureSpec { refine_tol: 0.0, ..ok.clone() },
            QuadratureSpec { t_max: Some(1.0), extra_t_nodes: vec![1.5], ..ok.clone() },
        ];
        for q in bad {
            assert!(matches!(q.validate(), Err(ZzbError::InvalidQuadrature(_))));
        }
        let p = ScalarPrior::gaussian(0.0, 1.0).unwrap();
        assert!(zz_scalar(&p, &ch(1.0), 1, false, &ok).is_err());
    }
}
