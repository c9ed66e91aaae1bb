//! Reference MMSE values (nested quadrature, Monte Carlo, conjugate closed
//! form) and grid-based falsifiers of the tightness conditions.
//!
//! The checkers can only refute: a pass means no violation was found on the
//! supplied grids.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{Channel, GaussianChannel};
use crate::error::{Result, ZzbError};
use crate::prior::ScalarPrior;
use crate::quad::{integrate, integrate_pair, Tolerance};
use crate::zzb::QuadratureSpec;

/// Half-width, in noise standard deviations, of the `x` window searched for
/// posterior mass around an observation.
const LIKELIHOOD_REACH: f64 = 40.0;
/// Observations whose marginal density is below the smallest positive double
/// are rejected as out of range.
const UNDERFLOW_LOG: f64 = -745.0;

/// Posterior of `X` given one scalar observation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorSlice {
    pub y: f64,
    pub x_grid: Vec<f64>,
    /// Posterior density of the continuous part on `x_grid`; integrates to
    /// `continuous_mass`.
    pub densities: Vec<f64>,
    pub atom_posteriors: Vec<(f64, f64)>,
    pub continuous_mass: f64,
    pub conditional_mean: f64,
    pub conditional_variance: f64,
}

/// Unnormalized posterior at one `y`, scaled by `exp(-shift)`.
struct Evidence<'a> {
    prior: &'a ScalarPrior,
    eta: f64,
    y: f64,
    shift: f64,
    window: Option<(f64, f64)>,
    breaks: Vec<f64>,
    width: f64,
    z_cont: f64,
    atoms: Vec<(f64, f64)>,
    mean: f64,
    converged: bool,
    precision: Precision,
}

/// How tightly posterior integrals are resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Precision {
    Fine,
    /// Enough for a per-sample conditional mean in Monte Carlo.
    Sample,
}

impl Precision {
    fn tolerance(self, scale: f64) -> Tolerance {
        match self {
            Self::Fine => Tolerance::new(1e-12 * scale, 1e-11, 50_000),
            Self::Sample => Tolerance::new(1e-8 * scale, 1e-7, 20_000),
        }
    }

    fn scan_nodes(self) -> usize {
        match self {
            Self::Fine => 129,
            Self::Sample => 33,
        }
    }
}

impl<'a> Evidence<'a> {
    fn new(prior: &'a ScalarPrior, eta: f64, y: f64, precision: Precision) -> Result<Self> {
        let s = eta.sqrt();
        let mut ev = Evidence {
            prior,
            eta,
            y,
            shift: f64::NEG_INFINITY,
            window: None,
            breaks: Vec::new(),
            width: s,
            z_cont: 0.0,
            atoms: Vec::new(),
            mean: 0.0,
            converged: true,
            precision,
        };
        let mut center = f64::NAN;
        if let Some(law) = prior.continuous_part() {
            // posterior mass sits where the prior or the likelihood is
            // non-negligible; the effective support alone misses far-out y
            let (elo, ehi) = law.effective_support();
            let (slo, shi) = law.support_bounds();
            let reach = LIKELIHOOD_REACH * s;
            let (a, b) = (
                slo.max(elo.min(y - reach)),
                shi.min(ehi.max(y + reach)),
            );
            if b > a {
                let local = (y - 8.0 * s).max(a)..=(y + 8.0 * s).min(b);
                let landmarks: Vec<f64> = law
                    .landmarks()
                    .into_iter()
                    .chain([y])
                    .filter(|x| *x > a && *x < b)
                    .collect();
                let nodes = precision.scan_nodes();
                let coarse = linspace(a, b, nodes);
                let near = if local.start() < local.end() {
                    linspace(*local.start(), *local.end(), nodes / 2 + 1)
                } else {
                    Vec::new()
                };
                let scan: Vec<(f64, f64)> = coarse
                    .into_iter()
                    .chain(near)
                    .chain(landmarks.iter().copied())
                    .map(|x| (x, ev.log_cont(x)))
                    .collect();
                for &(x, v) in &scan {
                    if v > ev.shift {
                        ev.shift = v;
                        center = x;
                    }
                }
                if ev.shift > f64::NEG_INFINITY {
                    ev.window = Some((a, b));
                    if precision == Precision::Sample {
                        // drop stretches the scan puts below e^-60 of the peak
                        let step = (b - a) / (nodes - 1) as f64;
                        let keep = scan.iter().filter(|(_, v)| *v > ev.shift - 60.0);
                        let lo = keep.clone().map(|p| p.0).fold(f64::INFINITY, f64::min);
                        let hi = keep.map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
                        ev.window = Some(((lo - step).max(a), (hi + step).min(b)));
                    }
                    ev.width = s.min(law.mean_var().1.sqrt());
                    ev.breaks = landmarks;
                    for k in [1.0, 3.0, 8.0] {
                        ev.breaks.push(center - k * ev.width);
                        ev.breaks.push(center + k * ev.width);
                    }
                }
            }
        }
        if let Some(atoms) = prior.atom_part() {
            for (x, _) in atoms.iter() {
                let v = ev.log_atom(x);
                ev.atoms.push((x, v));
                if v > ev.shift {
                    ev.shift = v;
                    center = x;
                }
            }
        }
        if ev.shift == f64::NEG_INFINITY {
            return Err(ZzbError::OutOfRange(y));
        }
        let shift = ev.shift;
        ev.atoms = ev
            .atoms
            .iter()
            .map(|(x, v)| (*x, (v - shift).exp()))
            .filter(|(_, w)| *w > 0.0)
            .collect();
        let mut first = 0.0;
        if let Some((a, b)) = ev.window {
            let [mass, moment] = integrate_pair(
                |x| {
                    let w = ev.cont_weight(x);
                    (w, (x - center) * w)
                },
                a,
                b,
                &ev.breaks,
                [
                    precision.tolerance(ev.width),
                    precision.tolerance(ev.width * ev.width),
                ],
            );
            ev.z_cont = mass.value;
            first = moment.value;
            ev.converged &= mass.converged;
        }
        let z = ev.total();
        if ev.log_evidence(z) < UNDERFLOW_LOG {
            return Err(ZzbError::OutOfRange(y));
        }
        let atom_first: f64 = ev.atoms.iter().map(|(x, w)| (x - center) * w).sum();
        ev.mean = center + (first + atom_first) / z;
        Ok(ev)
    }

    /// `ln f_Y(y)` given the scaled total mass `z`.
    fn log_evidence(&self, z: f64) -> f64 {
        self.shift + z.ln() - 0.5 * (2.0 * std::f64::consts::PI * self.eta).ln()
    }

    fn log_cont(&self, x: f64) -> f64 {
        let law = self.prior.continuous_part().expect("continuous part");
        let d = self.y - x;
        self.prior.alpha().ln() + law.log_density(x) - 0.5 * d * d / self.eta
    }

    fn log_atom(&self, x: f64) -> f64 {
        let d = self.y - x;
        self.prior.mass_at(x).ln() - 0.5 * d * d / self.eta
    }

    fn cont_weight(&self, x: f64) -> f64 {
        (self.log_cont(x) - self.shift).exp()
    }

    fn integrate_cont<G: Fn(f64) -> f64>(&self, g: G, scale: f64) -> (f64, bool) {
        let (a, b) = self.window.expect("window");
        let r = integrate(
            |x| g(x) * self.cont_weight(x),
            a,
            b,
            &self.breaks,
            self.precision.tolerance(scale),
        );
        (r.value, r.converged)
    }

    fn total(&self) -> f64 {
        self.z_cont + self.atoms.iter().map(|(_, w)| w).sum::<f64>()
    }

    /// Unnormalized `integral of (x - mean)^2` against the scaled posterior.
    fn central_second(&mut self) -> f64 {
        let m = self.mean;
        let cont = if self.window.is_some() {
            let (v, ok) = self.integrate_cont(|x| (x - m) * (x - m), self.width.powi(3));
            self.converged &= ok;
            v
        } else {
            0.0
        };
        cont + self.atoms.iter().map(|(x, w)| (x - m).powi(2) * w).sum::<f64>()
    }
}

fn scalar_eta(channel: &GaussianChannel) -> Result<f64> {
    if channel.dim() != 1 {
        return Err(ZzbError::DimensionMismatch {
            expected: 1,
            got: channel.dim(),
        });
    }
    Ok(channel.eta())
}

/// `E[X | Y = y]`.
pub fn conditional_mean(prior: &ScalarPrior, channel: &GaussianChannel, y: f64) -> Result<f64> {
    Ok(Evidence::new(prior, scalar_eta(channel)?, y, Precision::Fine)?.mean)
}

/// Posterior slice at `y` with the continuous density tabulated on 257 nodes
/// spanning six conditional standard deviations around the mean.
pub fn posterior(
    prior: &ScalarPrior,
    channel: &GaussianChannel,
    y: f64,
    _quad: &QuadratureSpec,
) -> Result<PosteriorSlice> {
    let mut ev = Evidence::new(prior, scalar_eta(channel)?, y, Precision::Fine)?;
    let z = ev.total();
    let var = (ev.central_second() / z).max(0.0);
    let mean = ev.mean;
    let (x_grid, densities) = match ev.window {
        Some((a, b)) if var > 0.0 => {
            let sd = var.sqrt();
            let (lo, hi) = ((mean - 6.0 * sd).max(a), (mean + 6.0 * sd).min(b));
            let n = 257;
            let xs: Vec<f64> = (0..n)
                .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                .collect();
            let fs = xs.iter().map(|x| ev.cont_weight(*x) / z).collect();
            (xs, fs)
        }
        _ => (Vec::new(), Vec::new()),
    };
    Ok(PosteriorSlice {
        y,
        x_grid,
        densities,
        atom_posteriors: ev.atoms.iter().map(|(x, w)| (*x, w / z)).collect(),
        continuous_mass: ev.z_cont / z,
        conditional_mean: mean,
        conditional_variance: var,
    })
}

/// A quadrature value with its convergence flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleValue {
    pub value: f64,
    pub converged: bool,
}

/// `integral of f_Y(y) Var(X | Y = y) dy` by nested adaptive quadrature.
pub fn mmse_quadrature(
    prior: &ScalarPrior,
    channel: &GaussianChannel,
    quad: &QuadratureSpec,
) -> Result<OracleValue> {
    let eta = scalar_eta(channel)?;
    quad.validate()?;
    let s = eta.sqrt();
    let (lo, hi) = prior.effective_support();
    let log_norm = -0.5 * (2.0 * std::f64::consts::PI * eta).ln();
    let mut breaks = Vec::new();
    let mut centers: Vec<f64> = prior
        .continuous_part()
        .map(|c| c.landmarks())
        .unwrap_or_default();
    if let Some(a) = prior.atom_part() {
        centers.extend(a.locations());
    }
    for c in centers {
        for k in [0.0, 2.0, 4.0, 8.0] {
            breaks.push(c - k * s);
            breaks.push(c + k * s);
        }
    }
    let inner_ok = std::sync::atomic::AtomicBool::new(true);
    let integrand = |y: f64| match Evidence::new(prior, eta, y, Precision::Fine) {
        Ok(mut ev) => {
            let v = ev.central_second();
            if !ev.converged {
                inner_ok.store(false, std::sync::atomic::Ordering::Relaxed);
            }
            (ev.shift + log_norm).exp() * v
        }
        Err(_) => 0.0,
    };
    let r = integrate(
        integrand,
        lo - 12.0 * s,
        hi + 12.0 * s,
        &breaks,
        Tolerance::new(0.01 * quad.refine_tol, 1e-10, 60_000),
    );
    let (_, var) = prior.moments();
    Ok(OracleValue {
        value: r.value.clamp(0.0, var),
        converged: r.converged && inner_ok.into_inner(),
    })
}

/// Monte Carlo estimate of `E[(X - E[X|Y])^2]` and its standard error.
/// Draws come in chunks of 1024, chunk `c` using stream `c` of a ChaCha8
/// generator seeded with `seed`, so results do not depend on thread count.
pub fn mmse_monte_carlo(
    prior: &ScalarPrior,
    channel: &GaussianChannel,
    n: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let eta = scalar_eta(channel)?;
    if n < 1000 {
        return Err(ZzbError::Misuse(format!(
            "Monte Carlo needs at least 1000 samples, got {n}"
        )));
    }
    const CHUNK: usize = 1024;
    let s = eta.sqrt();
    let chunks = n.div_ceil(CHUNK);
    let sums: Vec<Result<(f64, f64)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            let mut acc = (0.0, 0.0);
            for _ in 0..len {
                let x = prior.sample_with(&mut rng);
                let z: f64 = StandardNormal.sample(&mut rng);
                let m = Evidence::new(prior, eta, x + s * z, Precision::Sample)?.mean;
                let e = (x - m) * (x - m);
                acc.0 += e;
                acc.1 += e * e;
            }
            Ok(acc)
        })
        .collect();
    let mut total = 0.0;
    let mut total_sq = 0.0;
    for r in sums {
        let (a, b) = r?;
        total += a;
        total_sq += b;
    }
    let nf = n as f64;
    let mean = total / nf;
    let var = ((total_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    Ok((mean, (var / nf).sqrt()))
}

/// `sigma2 * eta / (sigma2 + eta)`.
pub fn mmse_linear_gaussian(sigma2: f64, eta: f64) -> Result<f64> {
    if !(sigma2 > 0.0) || !(eta > 0.0) {
        return Err(ZzbError::InvalidProblem(
            "variance and noise level must be positive".into(),
        ));
    }
    Ok(sigma2 * eta / (sigma2 + eta))
}

/// First violation found by a checker.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub t: Option<f64>,
    pub x: f64,
    pub y: f64,
    pub argmax_set: Vec<usize>,
    pub argmin_set: Vec<usize>,
    pub reason: String,
}

/// Grids a checker ran on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridEcho {
    pub t_list: Vec<f64>,
    pub x_grid: Vec<f64>,
    pub x_nodes: usize,
    pub y_grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub pass: bool,
    pub counterexample: Option<Counterexample>,
    pub grid_echo: GridEcho,
}

const X_NODES: usize = 257;
const Y_NODES: usize = 65;

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// 65 observations spanning six standard deviations of `Y`.
pub fn default_y_grid(prior: &ScalarPrior, channel: &GaussianChannel) -> Vec<f64> {
    let (m, v) = prior.moments();
    let r = 6.0 * (v + channel.eta()).sqrt();
    linspace(m - r, m + r, Y_NODES)
}

/// 257 points spanning six prior standard deviations.
pub fn default_x_grid(prior: &ScalarPrior) -> Vec<f64> {
    let (m, v) = prior.moments();
    let r = 6.0 * v.sqrt();
    linspace(m - r, m + r, X_NODES)
}

/// Shift scales from an eighth to four prior standard deviations.
pub fn default_t_list(prior: &ScalarPrior) -> Vec<f64> {
    let sd = prior.std_dev();
    [0.125, 0.25, 0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|k| k * sd)
        .collect()
}

/// Tests at each `y` that the posterior density is unimodal (one sign change
/// of its finite differences, tolerance 1e-9 of the peak) and mirror
/// symmetric about its centre (relative tolerance 1e-6). The centre is the
/// conditional mean, which coincides with the mode for any symmetric
/// unimodal density.
pub fn check_unimodal_symmetric(
    prior: &ScalarPrior,
    channel: &GaussianChannel,
    y_grid: Option<&[f64]>,
    quad: &QuadratureSpec,
) -> Result<CheckReport> {
    if !prior.is_purely_continuous() {
        return Err(ZzbError::Precondition(
            "the unimodal/symmetric check needs a purely continuous prior".into(),
        ));
    }
    let ys = y_grid.map_or_else(|| default_y_grid(prior, channel), <[f64]>::to_vec);
    let eta = scalar_eta(channel)?;
    let mut counterexample = None;
    for &y in &ys {
        let slice = posterior(prior, channel, y, quad)?;
        let ev = Evidence::new(prior, eta, y, Precision::Fine)?;
        let z = ev.total();
        let density = |x: f64| ev.cont_weight(x) / z;
        let peak = slice.densities.iter().copied().fold(0.0, f64::max);
        let tol = 1e-9 * peak;
        let mut falling = false;
        let mut bad = None;
        for (i, w) in slice.densities.windows(2).enumerate() {
            let d = w[1] - w[0];
            if d < -tol {
                falling = true;
            } else if d > tol && falling {
                bad = Some((slice.x_grid[i], "posterior density rises again (not unimodal)"));
                break;
            }
        }
        if bad.is_none() {
            let m = slice.conditional_mean;
            bad = slice
                .x_grid
                .iter()
                .find(|x| (density(**x) - density(2.0 * m - **x)).abs() > 1e-6 * peak)
                .map(|x| (*x, "posterior density is not symmetric about its centre"));
        }
        if let Some((x, reason)) = bad {
            counterexample = Some(Counterexample {
                t: None,
                x,
                y,
                argmax_set: Vec::new(),
                argmin_set: Vec::new(),
                reason: reason.into(),
            });
            break;
        }
    }
    Ok(CheckReport {
        pass: counterexample.is_none(),
        counterexample,
        grid_echo: GridEcho {
            t_list: Vec::new(),
            x_grid: Vec::new(),
            x_nodes: X_NODES,
            y_grid: ys,
        },
    })
}

/// Tests, at every `(t, x, y)` of the grids, that some hypothesis index
/// maximizing the posterior weight of `x + k t` also minimizes
/// `|E[X|Y=y] - x - k t|`. Ties are taken within a relative 1e-9.
#[allow(clippy::too_many_arguments)]
pub fn check_zz_condition(
    prior: &ScalarPrior,
    channel: &GaussianChannel,
    t_list: Option<&[f64]>,
    m: usize,
    x_grid: Option<&[f64]>,
    y_grid: Option<&[f64]>,
    _quad: &QuadratureSpec,
) -> Result<CheckReport> {
    if m < 2 {
        return Err(ZzbError::InvalidProblem(format!("M must be at least 2, got {m}")));
    }
    let eta = scalar_eta(channel)?;
    let ts = t_list.map_or_else(|| default_t_list(prior), <[f64]>::to_vec);
    let xs = x_grid.map_or_else(|| default_x_grid(prior), <[f64]>::to_vec);
    let ys = y_grid.map_or_else(|| default_y_grid(prior, channel), <[f64]>::to_vec);
    let means: Vec<f64> = ys
        .iter()
        .map(|y| Evidence::new(prior, eta, *y, Precision::Fine).map(|e| e.mean))
        .collect::<Result<_>>()?;

    let log_weight = |p: f64, y: f64, on_atom: bool| {
        let base = if on_atom {
            prior.mass_at(p)
        } else {
            prior.density_at(p)
        };
        base.ln() - 0.5 * (y - p) * (y - p) / eta
    };
    let mut counterexample = None;
    'outer: for &t in &ts {
        for (&y, &cm) in ys.iter().zip(&means) {
            for &x in &xs {
                let pts: Vec<f64> = (0..m).map(|k| x + k as f64 * t).collect();
                let on_atom = prior.has_atoms() && pts.iter().any(|p| prior.atom_mass(*p) > 0.0);
                let lw: Vec<f64> = pts.iter().map(|p| log_weight(*p, y, on_atom)).collect();
                let best = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if best == f64::NEG_INFINITY {
                    continue;
                }
                let cut = best + (-1e-9f64).ln_1p();
                let argmax: Vec<usize> = (0..m).filter(|k| lw[*k] >= cut).collect();
                let dist: Vec<f64> = pts.iter().map(|p| (cm - p).abs()).collect();
                let dmin = dist.iter().copied().fold(f64::INFINITY, f64::min);
                let argmin: Vec<usize> = (0..m)
                    .filter(|k| dist[*k] <= dmin + 1e-9 * dmin.max(f64::MIN_POSITIVE))
                    .collect();
                if !argmax.iter().any(|k| argmin.contains(k)) {
                    counterexample = Some(Counterexample {
                        t: Some(t),
                        x,
                        y,
                        argmax_set: argmax,
                        argmin_set: argmin,
                        reason: "most probable hypothesis is not the closest to the conditional mean"
                            .into(),
                    });
                    break 'outer;
                }
            }
        }
    }
    Ok(CheckReport {
        pass: counterexample.is_none(),
        counterexample,
        grid_echo: GridEcho {
            t_list: ts,
            x_nodes: xs.len(),
            x_grid: xs,
            y_grid: ys,
        },
    })
}
