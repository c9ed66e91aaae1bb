//! Scalar and product priors: continuous families, tabulated densities,
//! finite atom lists and their alpha-mixtures.
//!
//! A [`ScalarPrior`] is the triple `(alpha, continuous, atoms)` describing
//! `alpha * P_C + (1 - alpha) * P_D`. Shifted laws `P_{X-u}` are never
//! materialised; callers evaluate the prior at `x + u` instead.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::Serialize;

use crate::error::{Result, ZzbError};
use crate::special::{gaussian_log_pdf, gaussian_pdf, normal_cdf};

/// Resolution used to canonicalise atom locations and to match points
/// against them.
pub const ATOM_TOL: f64 = 1e-12;

/// Name of the generator behind every seeded draw in this crate.
pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64)";

/// Effective support of unbounded Gaussian families, in standard deviations.
const TAIL_SIGMAS: f64 = 14.0;
/// Effective support of the exponential family, in units of `1/rate`.
const EXP_TAIL: f64 = 50.0;

fn canonical(x: f64) -> f64 {
    (x / ATOM_TOL).round() * ATOM_TOL
}

pub(crate) fn same_point(a: f64, b: f64) -> bool {
    (a - b).abs() <= ATOM_TOL * a.abs().max(b.abs()).max(1.0)
}

fn invalid(msg: impl Into<String>) -> ZzbError {
    ZzbError::InvalidPrior(msg.into())
}

/// Piecewise-linear density on strictly increasing abscissae, zero outside.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    xs: Vec<f64>,
    fs: Vec<f64>,
    #[serde(skip)]
    cum: Vec<f64>,
}

impl Table {
    pub fn new(xs: Vec<f64>, fs: Vec<f64>) -> Result<Self> {
        Self::build(xs, fs, false)
    }

    /// Like [`Table::new`] but rescales the ordinates to integrate to one.
    pub fn normalized(xs: Vec<f64>, fs: Vec<f64>) -> Result<Self> {
        Self::build(xs, fs, true)
    }

    fn build(xs: Vec<f64>, mut fs: Vec<f64>, rescale: bool) -> Result<Self> {
        if xs.len() != fs.len() || xs.len() < 2 {
            return Err(invalid("table needs at least two (x, f) pairs"));
        }
        if xs.iter().any(|x| !x.is_finite()) || fs.iter().any(|f| !f.is_finite()) {
            return Err(invalid("table entries must be finite"));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("table abscissae must be strictly increasing"));
        }
        if fs.iter().any(|f| *f < 0.0) {
            return Err(invalid("table ordinates must be nonnegative"));
        }
        let total: f64 = xs
            .windows(2)
            .zip(fs.windows(2))
            .map(|(x, f)| 0.5 * (x[1] - x[0]) * (f[0] + f[1]))
            .sum();
        if rescale {
            if total <= 0.0 {
                return Err(invalid("table has zero mass"));
            }
            fs.iter_mut().for_each(|f| *f /= total);
        } else if (total - 1.0).abs() > 1e-9 {
            return Err(invalid(format!(
                "table integrates to {total}, expected 1 within 1e-9"
            )));
        }
        let mut cum = Vec::with_capacity(xs.len());
        cum.push(0.0);
        for i in 1..xs.len() {
            let seg = 0.5 * (xs[i] - xs[i - 1]) * (fs[i] + fs[i - 1]);
            cum.push(cum[i - 1] + seg);
        }
        Ok(Self { xs, fs, cum })
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.xs
    }

    pub fn ordinates(&self) -> &[f64] {
        &self.fs
    }

    fn segment(&self, x: f64) -> Option<usize> {
        if x < self.xs[0] || x > *self.xs.last().unwrap() {
            return None;
        }
        let i = self.xs.partition_point(|v| *v <= x);
        Some(i.saturating_sub(1).min(self.xs.len() - 2))
    }

    pub fn density(&self, x: f64) -> f64 {
        match self.segment(x) {
            None => 0.0,
            Some(i) => {
                let (x0, x1) = (self.xs[i], self.xs[i + 1]);
                let w = (x - x0) / (x1 - x0);
                self.fs[i] + w * (self.fs[i + 1] - self.fs[i])
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.xs[0] {
            return 0.0;
        }
        let n = self.xs.len();
        if x >= self.xs[n - 1] {
            return self.cum[n - 1];
        }
        let i = self.segment(x).unwrap();
        let u = x - self.xs[i];
        let slope = (self.fs[i + 1] - self.fs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.cum[i] + self.fs[i] * u + 0.5 * slope * u * u
    }

    fn inverse_cdf(&self, p: f64) -> f64 {
        let n = self.xs.len();
        let target = p * self.cum[n - 1];
        let i = self
            .cum
            .partition_point(|c| *c < target)
            .clamp(1, n - 1)
            - 1;
        let r = target - self.cum[i];
        let f0 = self.fs[i];
        let h = self.xs[i + 1] - self.xs[i];
        let slope = (self.fs[i + 1] - f0) / h;
        let disc = (f0 * f0 + 2.0 * slope * r).max(0.0);
        let denom = f0 + disc.sqrt();
        let u = if denom > 0.0 { 2.0 * r / denom } else { 0.0 };
        self.xs[i] + u.clamp(0.0, h)
    }

    fn mean_var(&self) -> (f64, f64) {
        // Simpson is exact for the quadratic x*f and cubic x^2*f integrands.
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for i in 0..self.xs.len() - 1 {
            let (x0, x1) = (self.xs[i], self.xs[i + 1]);
            let (f0, f1) = (self.fs[i], self.fs[i + 1]);
            let xm = 0.5 * (x0 + x1);
            let fm = 0.5 * (f0 + f1);
            let h = x1 - x0;
            m1 += h / 6.0 * (x0 * f0 + 4.0 * xm * fm + x1 * f1);
            m2 += h / 6.0 * (x0 * x0 * f0 + 4.0 * xm * xm * fm + x1 * x1 * f1);
        }
        (m1, (m2 - m1 * m1).max(0.0))
    }
}

/// Absolutely continuous part of a prior.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ContinuousLaw {
    Gaussian {
        mean: f64,
        var: f64,
    },
    Uniform {
        a: f64,
        b: f64,
    },
    Exponential {
        rate: f64,
    },
    GaussianMixture {
        weights: Vec<f64>,
        means: Vec<f64>,
        vars: Vec<f64>,
    },
    Tabulated(Table),
}

impl ContinuousLaw {
    pub(crate) fn validate(&self) -> Result<()> {
        match self {
            Self::Gaussian { mean, var } => {
                if !mean.is_finite() || !(*var > 0.0) || !var.is_finite() {
                    return Err(invalid("gaussian needs finite mean and var > 0"));
                }
            }
            Self::Uniform { a, b } => {
                if !a.is_finite() || !b.is_finite() || !(b > a) {
                    return Err(invalid("uniform needs finite a < b"));
                }
            }
            Self::Exponential { rate } => {
                if !(*rate > 0.0) || !rate.is_finite() {
                    return Err(invalid("exponential needs rate > 0"));
                }
            }
            Self::GaussianMixture {
                weights,
                means,
                vars,
            } => {
                if weights.is_empty() || weights.len() != means.len() || means.len() != vars.len()
                {
                    return Err(invalid(
                        "gaussian mixture needs equally long, nonempty weights/means/vars",
                    ));
                }
                if weights.iter().any(|w| !(*w > 0.0)) {
                    return Err(invalid("gaussian mixture weights must be positive"));
                }
                if (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                    return Err(invalid("gaussian mixture weights must sum to 1"));
                }
                if vars.iter().any(|v| !(*v > 0.0)) || means.iter().any(|m| !m.is_finite()) {
                    return Err(invalid("gaussian mixture needs finite means and vars > 0"));
                }
            }
            Self::Tabulated(_) => {}
        }
        Ok(())
    }

    pub fn density(&self, x: f64) -> f64 {
        match self {
            Self::Gaussian { mean, var } => gaussian_pdf(x, *mean, *var),
            Self::Uniform { a, b } => {
                if x >= *a && x <= *b {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
            Self::Exponential { rate } => {
                if x >= 0.0 {
                    rate * (-rate * x).exp()
                } else {
                    0.0
                }
            }
            Self::GaussianMixture {
                weights,
                means,
                vars,
            } => weights
                .iter()
                .zip(means)
                .zip(vars)
                .map(|((w, m), v)| w * gaussian_pdf(x, *m, *v))
                .sum(),
            Self::Tabulated(t) => t.density(x),
        }
    }

    /// Natural log of the density; `-inf` off the support.
    pub fn log_density(&self, x: f64) -> f64 {
        match self {
            Self::Gaussian { mean, var } => gaussian_log_pdf(x, *mean, *var),
            Self::GaussianMixture {
                weights,
                means,
                vars,
            } => {
                let term = |i: usize| weights[i].ln() + gaussian_log_pdf(x, means[i], vars[i]);
                let top = (0..weights.len()).map(term).fold(f64::NEG_INFINITY, f64::max);
                top + (0..weights.len())
                    .map(|i| (term(i) - top).exp())
                    .sum::<f64>()
                    .ln()
            }
            Self::Exponential { rate } => {
                if x >= 0.0 {
                    rate.ln() - rate * x
                } else {
                    f64::NEG_INFINITY
                }
            }
            _ => self.density(x).ln(),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::Gaussian { mean, var } => normal_cdf((x - mean) / var.sqrt()),
            Self::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            Self::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            Self::GaussianMixture {
                weights,
                means,
                vars,
            } => weights
                .iter()
                .zip(means)
                .zip(vars)
                .map(|((w, m), v)| w * normal_cdf((x - m) / v.sqrt()))
                .sum(),
            Self::Tabulated(t) => t.cdf(x),
        }
    }

    pub fn mean_var(&self) -> (f64, f64) {
        match self {
            Self::Gaussian { mean, var } => (*mean, *var),
            Self::Uniform { a, b } => (0.5 * (a + b), (b - a).powi(2) / 12.0),
            Self::Exponential { rate } => (1.0 / rate, 1.0 / (rate * rate)),
            Self::GaussianMixture {
                weights,
                means,
                vars,
            } => {
                let m1: f64 = weights.iter().zip(means).map(|(w, m)| w * m).sum();
                let m2: f64 = weights
                    .iter()
                    .zip(means)
                    .zip(vars)
                    .map(|((w, m), v)| w * (v + m * m))
                    .sum();
                (m1, (m2 - m1 * m1).max(0.0))
            }
            Self::Tabulated(t) => t.mean_var(),
        }
    }

    /// Interval outside of which the density is negligible (exactly zero for
    /// bounded families).
    pub fn effective_support(&self) -> (f64, f64) {
        match self {
            Self::Gaussian { mean, var } => {
                let s = TAIL_SIGMAS * var.sqrt();
                (mean - s, mean + s)
            }
            Self::Uniform { a, b } => (*a, *b),
            Self::Exponential { rate } => (0.0, EXP_TAIL / rate),
            Self::GaussianMixture { means, vars, .. } => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for (m, v) in means.iter().zip(vars) {
                    let s = TAIL_SIGMAS * v.sqrt();
                    lo = lo.min(m - s);
                    hi = hi.max(m + s);
                }
                (lo, hi)
            }
            Self::Tabulated(t) => (t.xs[0], *t.xs.last().unwrap()),
        }
    }

    /// Support bounds that are genuine (not tail truncations).
    pub fn bounded_support(&self) -> Option<(f64, f64)> {
        match self {
            Self::Uniform { .. } | Self::Tabulated(_) => Some(self.effective_support()),
            _ => None,
        }
    }

    /// Closed support, with infinite ends for unbounded families.
    pub fn support_bounds(&self) -> (f64, f64) {
        match self {
            Self::Exponential { .. } => (0.0, f64::INFINITY),
            Self::Uniform { .. } | Self::Tabulated(_) => self.effective_support(),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Points where the density may jump.
    pub fn discontinuities(&self) -> Vec<f64> {
        match self {
            Self::Uniform { a, b } => vec![*a, *b],
            Self::Exponential { .. } => vec![0.0],
            Self::Tabulated(t) => vec![t.xs[0], *t.xs.last().unwrap()],
            _ => Vec::new(),
        }
    }

    /// Points around which the density changes character: jumps, kinks,
    /// component centres.
    pub fn landmarks(&self) -> Vec<f64> {
        let mut pts = self.discontinuities();
        match self {
            Self::Gaussian { mean, .. } => pts.push(*mean),
            Self::GaussianMixture { means, .. } => pts.extend(means),
            Self::Tabulated(t) if t.xs.len() <= 64 => pts.extend(&t.xs),
            Self::Tabulated(_) => pts.push(self.mode()),
            _ => {}
        }
        pts
    }

    /// A global maximiser of the density.
    pub fn mode(&self) -> f64 {
        match self {
            Self::Gaussian { mean, .. } => *mean,
            Self::Uniform { a, b } => 0.5 * (a + b),
            Self::Exponential { .. } => 0.0,
            Self::Tabulated(t) => {
                let (i, _) = t
                    .fs
                    .iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |acc, (i, f)| {
                        if *f > acc.1 {
                            (i, *f)
                        } else {
                            acc
                        }
                    });
                t.xs[i]
            }
            Self::GaussianMixture { .. } => {
                let (lo, hi) = self.effective_support();
                let n = 4001;
                let h = (hi - lo) / (n - 1) as f64;
                let mut best = lo;
                let mut best_f = f64::NEG_INFINITY;
                for i in 0..n {
                    let x = lo + i as f64 * h;
                    let f = self.density(x);
                    if f > best_f {
                        best_f = f;
                        best = x;
                    }
                }
                golden_max(|x| self.density(x), best - h, best + h)
            }
        }
    }

    fn sample_one<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Gaussian { mean, var } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + var.sqrt() * z
            }
            Self::Uniform { a, b } => a + (b - a) * rng.random::<f64>(),
            Self::Exponential { rate } => Exp::new(*rate).expect("validated rate").sample(rng),
            Self::GaussianMixture {
                weights,
                means,
                vars,
            } => {
                let k = pick(weights, rng.random::<f64>());
                let z: f64 = StandardNormal.sample(rng);
                means[k] + vars[k].sqrt() * z
            }
            Self::Tabulated(t) => t.inverse_cdf(rng.random::<f64>()),
        }
    }
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-13 * (1.0 + a.abs()) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Index drawn from a probability vector by inversion.
fn pick(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

/// Finite list of atoms, sorted by canonical location.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomList {
    locations: Vec<f64>,
    masses: Vec<f64>,
}

impl AtomList {
    pub fn new(atoms: &[(f64, f64)]) -> Result<Self> {
        if atoms.is_empty() {
            return Err(invalid("atom list is empty"));
        }
        let mut pts: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for &(x, p) in atoms {
            if !x.is_finite() {
                return Err(invalid("atom locations must be finite"));
            }
            if !(p > 0.0) {
                return Err(invalid(format!("atom mass at {x} must be positive")));
            }
            pts.push((canonical(x), p));
        }
        let total: f64 = pts.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("atom masses sum to {total}, expected 1")));
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut locations: Vec<f64> = Vec::new();
        let mut masses: Vec<f64> = Vec::new();
        for (x, p) in pts {
            match locations.last() {
                Some(&last) if same_point(last, x) => *masses.last_mut().unwrap() += p,
                _ => {
                    locations.push(x);
                    masses.push(p);
                }
            }
        }
        Ok(Self { locations, masses })
    }

    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.locations.iter().copied().zip(self.masses.iter().copied())
    }

    /// Mass at `x` (matched at [`ATOM_TOL`]), zero if `x` is not an atom.
    pub fn mass(&self, x: f64) -> f64 {
        let i = self.locations.partition_point(|v| *v < x);
        for j in [i.wrapping_sub(1), i] {
            if let Some(&loc) = self.locations.get(j) {
                if same_point(loc, x) {
                    return self.masses[j];
                }
            }
        }
        0.0
    }

    fn cdf(&self, x: f64) -> f64 {
        self.iter()
            .take_while(|(loc, _)| *loc <= x || same_point(*loc, x))
            .map(|(_, p)| p)
            .sum()
    }

    fn mean_var(&self) -> (f64, f64) {
        let m1: f64 = self.iter().map(|(x, p)| x * p).sum();
        let var: f64 = self.iter().map(|(x, p)| p * (x - m1).powi(2)).sum();
        (m1, var)
    }

    fn sample_one<R: Rng>(&self, rng: &mut R) -> f64 {
        self.locations[pick(&self.masses, rng.random::<f64>())]
    }
}

/// A scalar prior `alpha * P_C + (1 - alpha) * P_D`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarPrior {
    alpha: f64,
    continuous: Option<ContinuousLaw>,
    atoms: Option<AtomList>,
}

impl ScalarPrior {
    /// General constructor; parts with zero weight are dropped.
    pub fn mixture(
        alpha: f64,
        continuous: Option<ContinuousLaw>,
        atoms: Option<AtomList>,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(invalid(format!("mixture weight {alpha} outside [0, 1]")));
        }
        let continuous = if alpha > 0.0 {
            let c = continuous.ok_or_else(|| invalid("alpha > 0 needs a continuous part"))?;
            c.validate()?;
            Some(c)
        } else {
            None
        };
        let atoms = if alpha < 1.0 {
            Some(atoms.ok_or_else(|| invalid("alpha < 1 needs an atom part"))?)
        } else {
            None
        };
        Ok(Self {
            alpha,
            continuous,
            atoms,
        })
    }

    pub fn continuous(law: ContinuousLaw) -> Result<Self> {
        Self::mixture(1.0, Some(law), None)
    }

    pub fn discrete(atoms: &[(f64, f64)]) -> Result<Self> {
        Self::mixture(0.0, None, Some(AtomList::new(atoms)?))
    }

    pub fn gaussian(mean: f64, var: f64) -> Result<Self> {
        Self::continuous(ContinuousLaw::Gaussian { mean, var })
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        Self::continuous(ContinuousLaw::Uniform { a, b })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Self::continuous(ContinuousLaw::Exponential { rate })
    }

    pub fn gaussian_mixture(weights: Vec<f64>, means: Vec<f64>, vars: Vec<f64>) -> Result<Self> {
        Self::continuous(ContinuousLaw::GaussianMixture {
            weights,
            means,
            vars,
        })
    }

    pub fn tabulated(table: Table) -> Result<Self> {
        Self::continuous(ContinuousLaw::Tabulated(table))
    }

    /// `Ber(p)` as the atom list `{(0, 1-p), (1, p)}`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(invalid(format!("bernoulli parameter {p} must lie in (0, 1)")));
        }
        Self::discrete(&[(0.0, 1.0 - p), (1.0, p)])
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn continuous_part(&self) -> Option<&ContinuousLaw> {
        self.continuous.as_ref()
    }

    pub fn atom_part(&self) -> Option<&AtomList> {
        self.atoms.as_ref()
    }

    pub fn has_atoms(&self) -> bool {
        self.atoms.is_some()
    }

    pub fn is_purely_continuous(&self) -> bool {
        self.alpha == 1.0
    }

    pub fn is_purely_discrete(&self) -> bool {
        self.alpha == 0.0
    }

    /// `alpha * f_C(x)`.
    pub fn density_at(&self, x: f64) -> f64 {
        self.alpha * self.continuous_density(x)
    }

    /// Unweighted density of the continuous part (zero if there is none).
    pub fn continuous_density(&self, x: f64) -> f64 {
        self.continuous.as_ref().map_or(0.0, |c| c.density(x))
    }

    /// `(1 - alpha) * p_D(x)`.
    pub fn mass_at(&self, x: f64) -> f64 {
        (1.0 - self.alpha) * self.atom_mass(x)
    }

    /// Unweighted mass of the atom part at `x`.
    pub fn atom_mass(&self, x: f64) -> f64 {
        self.atoms.as_ref().map_or(0.0, |a| a.mass(x))
    }

    pub fn cdf_at(&self, x: f64) -> f64 {
        let c = self.continuous.as_ref().map_or(0.0, |c| c.cdf(x));
        let d = self.atoms.as_ref().map_or(0.0, |a| a.cdf(x));
        self.alpha * c + (1.0 - self.alpha) * d
    }

    /// `(mean, variance)` of the full mixture.
    pub fn moments(&self) -> (f64, f64) {
        let (cm, cv) = self
            .continuous
            .as_ref()
            .map_or((0.0, 0.0), |c| c.mean_var());
        let (dm, dv) = self.atoms.as_ref().map_or((0.0, 0.0), |a| a.mean_var());
        let a = self.alpha;
        let mean = a * cm + (1.0 - a) * dm;
        let second = a * (cv + cm * cm) + (1.0 - a) * (dv + dm * dm);
        (mean, (second - mean * mean).max(0.0))
    }

    pub fn std_dev(&self) -> f64 {
        self.moments().1.sqrt()
    }

    /// Hull of the effective supports of both parts.
    pub fn effective_support(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        if let Some(c) = &self.continuous {
            let (a, b) = c.effective_support();
            lo = lo.min(a);
            hi = hi.max(b);
        }
        if let Some(atoms) = &self.atoms {
            lo = lo.min(atoms.locations[0]);
            hi = hi.max(*atoms.locations.last().unwrap());
        }
        (lo, hi)
    }

    /// Width of the genuinely bounded part of the support: the atom range and
    /// any bounded continuous support. Zero for unbounded continuous priors.
    pub fn spread(&self) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        if let Some((a, b)) = self.continuous.as_ref().and_then(|c| c.bounded_support()) {
            lo = lo.min(a);
            hi = hi.max(b);
        }
        if let Some(atoms) = &self.atoms {
            lo = lo.min(atoms.locations[0]);
            hi = hi.max(*atoms.locations.last().unwrap());
        }
        if hi > lo {
            hi - lo
        } else {
            0.0
        }
    }

    /// Same law translated by `-shift` (i.e. the law of `X - shift`).
    pub fn shifted(&self, shift: f64) -> Result<Self> {
        let continuous = self.continuous.as_ref().map(|c| match c {
            ContinuousLaw::Gaussian { mean, var } => ContinuousLaw::Gaussian {
                mean: mean - shift,
                var: *var,
            },
            ContinuousLaw::Uniform { a, b } => ContinuousLaw::Uniform {
                a: a - shift,
                b: b - shift,
            },
            ContinuousLaw::GaussianMixture {
                weights,
                means,
                vars,
            } => ContinuousLaw::GaussianMixture {
                weights: weights.clone(),
                means: means.iter().map(|m| m - shift).collect(),
                vars: vars.clone(),
            },
            ContinuousLaw::Tabulated(t) => ContinuousLaw::Tabulated(Table {
                xs: t.xs.iter().map(|x| x - shift).collect(),
                fs: t.fs.clone(),
                cum: t.cum.clone(),
            }),
            ContinuousLaw::Exponential { rate } => {
                // no closed family for a shifted exponential; tabulate it
                let n = 4001;
                let hi = EXP_TAIL / rate;
                let xs: Vec<f64> = (0..n).map(|i| hi * i as f64 / (n - 1) as f64).collect();
                let fs: Vec<f64> = xs.iter().map(|x| rate * (-rate * x).exp()).collect();
                let table = Table::normalized(xs.iter().map(|x| x - shift).collect(), fs)
                    .expect("exponential table is valid");
                ContinuousLaw::Tabulated(table)
            }
        });
        let atoms = match &self.atoms {
            Some(a) => {
                let pts: Vec<(f64, f64)> = a.iter().map(|(x, p)| (x - shift, p)).collect();
                Some(AtomList::new(&pts)?)
            }
            None => None,
        };
        Self::mixture(self.alpha, continuous, atoms)
    }

    /// Same law re-centred to zero mean.
    pub fn centered(&self) -> Result<Self> {
        self.shifted(self.moments().0)
    }

    pub fn sample_with<R: Rng>(&self, rng: &mut R) -> f64 {
        let use_continuous = match (&self.continuous, &self.atoms) {
            (Some(_), None) => true,
            (None, Some(_)) => false,
            _ => rng.random::<f64>() < self.alpha,
        };
        if use_continuous {
            self.continuous.as_ref().unwrap().sample_one(rng)
        } else {
            self.atoms.as_ref().unwrap().sample_one(rng)
        }
    }

    /// `count` seeded draws from the prior; see [`RNG_NAME`].
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<f64>> {
        if count == 0 {
            return Err(ZzbError::Misuse("sample count must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok((0..count).map(|_| self.sample_with(&mut rng)).collect())
    }

    /// Every `t > 0` at which two translates `X - a t` and `X - b t`
    /// (`1 <= |a - b| <= m - 1`) of the atom support intersect.
    pub fn alignment_set(&self, m: usize) -> Result<Vec<f64>> {
        let atoms = self.atoms.as_ref().ok_or_else(|| {
            ZzbError::Misuse("alignment set requested for a prior without atoms".into())
        })?;
        if m < 2 {
            return Err(ZzbError::Misuse("alignment set needs M >= 2".into()));
        }
        let locs = atoms.locations();
        let mut ts = Vec::new();
        for (i, xi) in locs.iter().enumerate() {
            for xj in &locs[i + 1..] {
                let diff = xj - xi;
                for gap in 1..m {
                    ts.push(diff / gap as f64);
                }
            }
        }
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|a, b| same_point(*a, *b));
        Ok(ts)
    }
}

/// Independent product of scalar priors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductPrior {
    factors: Vec<ScalarPrior>,
}

impl ProductPrior {
    pub fn new(factors: Vec<ScalarPrior>) -> Result<Self> {
        if factors.is_empty() {
            return Err(invalid("product prior needs at least one factor"));
        }
        Ok(Self { factors })
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[ScalarPrior] {
        &self.factors
    }

    /// Per-coordinate `(mean, variance)`.
    pub fn moments(&self) -> Vec<(f64, f64)> {
        self.factors.iter().map(ScalarPrior::moments).collect()
    }
}

impl From<ScalarPrior> for ProductPrior {
    fn from(p: ScalarPrior) -> Self {
        Self { factors: vec![p] }
    }
}

/// Either kind of prior, for APIs that accept both.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Prior {
    Scalar(ScalarPrior),
    Product(ProductPrior),
}

impl Prior {
    pub fn dim(&self) -> usize {
        match self {
            Self::Scalar(_) => 1,
            Self::Product(p) => p.dim(),
        }
    }

    pub fn factors(&self) -> &[ScalarPrior] {
        match self {
            Self::Scalar(p) => std::slice::from_ref(p),
            Self::Product(p) => p.factors(),
        }
    }
}

impl From<ScalarPrior> for Prior {
    fn from(p: ScalarPrior) -> Self {
        Self::Scalar(p)
    }
}

impl From<ProductPrior> for Prior {
    fn from(p: ProductPrior) -> Self {
        Self::Product(p)
    }
}
