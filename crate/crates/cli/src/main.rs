//! `zzb`: evaluate Ziv-Zakai bounds, sweeps, asymptotics and oracle checks
//! from the command line.
//!
//! Exit codes: 0 success, 2 invalid input, 3 quadrature did not converge
//! (output is still written), 4 a sweep row broke the bound ordering.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use zzb_core::{
    channel_from_json, check_unimodal_symmetric, check_zz_condition, high_noise_bound,
    low_noise_slope, mmse_linear_gaussian, mmse_monte_carlo, mmse_quadrature, prior_from_json,
    prior_from_shorthand, zz_product, zz_scalar, BoundReport, Channel, ContinuousLaw,
    GaussianChannel, Prior, QuadratureSpec, ScalarPrior, ZzbError,
};

use output::{Meta, Table};

#[derive(Parser, Debug)]
#[command(name = "zzb", version, about = "Ziv-Zakai lower bounds on the MMSE under Gaussian noise")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bound value and integrand for one noise level.
    Eval(Common),
    /// Bounds with and without valley filling against the MMSE over a list of noise levels.
    Sweep(Common),
    /// High-noise limit of the bound.
    Asymptotic(Common),
    /// Low-noise slope `zz / eta` over strictly decreasing noise levels.
    Slope(Common),
    /// Reference MMSE by quadrature, optionally Monte Carlo (`--samples`).
    Mmse(Common),
    /// Run the tightness falsifiers.
    Verify(Common),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Common {
    /// Prior: a JSON spec file or shorthand such as `gaussian:0,1`, `bernoulli:0.3`,
    /// `atoms:-1@0.5,1@0.5`, `mixture:0.5|gaussian:0,1|atoms:0@1`; join factors with `*`.
    #[arg(long)]
    prior: String,
    /// Noise level(s), comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    eta: Vec<f64>,
    /// Channel JSON spec file; replaces `--eta`.
    #[arg(long)]
    channel: Option<PathBuf>,
    /// Number of hypotheses.
    #[arg(long = "M", default_value_t = 2)]
    m: usize,
    /// Use the valley-filled bound (default).
    #[arg(long, overrides_with = "no_vf")]
    vf: bool,
    /// Use the plain bound.
    #[arg(long = "no-vf")]
    no_vf: bool,
    /// QuadratureSpec JSON file; the flags below override its fields.
    #[arg(long)]
    quad: Option<PathBuf>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    t_nodes: Option<usize>,
    #[arg(long)]
    refine_tol: Option<f64>,
    #[arg(long)]
    y_tol: Option<f64>,
    #[arg(long)]
    y_window_sigma: Option<f64>,
    /// Extra t nodes, comma separated.
    #[arg(long, value_delimiter = ',')]
    extra_t: Vec<f64>,
    /// Plain node-grid quadrature with no special handling of atoms.
    #[arg(long)]
    pure_quadrature: bool,
    #[arg(long, env = "ZZB_NODE_CAP")]
    node_cap: Option<usize>,
    /// Monte Carlo sample count for `mmse`.
    #[arg(long, default_value_t = 0)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit the timestamp so identical runs give identical bytes.
    #[arg(long)]
    deterministic: bool,
    /// Write the integrand of `eval` as CSV (t, h_ratio, vf_ratio) to this file.
    #[arg(long)]
    dump_integrand: Option<PathBuf>,
}

enum Failure {
    Invalid(String),
    Inconsistent(String),
}

impl From<ZzbError> for Failure {
    fn from(e: ZzbError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

type Run<T> = std::result::Result<T, Failure>;

/// Everything a subcommand produces: the JSON body, the CSV table and
/// whether all quadratures converged.
struct Outcome {
    json: Value,
    table: Table,
    converged: bool,
}

fn load_prior(arg: &str) -> Run<Prior> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Invalid(format!("cannot read {arg}: {e}")))?;
        return prior_from_json(&text).map_err(|e| Failure::Invalid(format!("{arg}: {e}")));
    }
    if arg.ends_with(".json") {
        return Err(Failure::Invalid(format!("prior file {arg} does not exist")));
    }
    Ok(prior_from_shorthand(arg)?)
}

fn quadrature(c: &Common) -> Run<QuadratureSpec> {
    let mut q = match &c.quad {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| {
                Failure::Invalid(format!(
                    "{}: line {}, column {}: {e}",
                    p.display(),
                    e.line(),
                    e.column()
                ))
            })?
        }
        None => QuadratureSpec::default(),
    };
    if c.t_max.is_some() {
        q.t_max = c.t_max;
    }
    if let Some(n) = c.t_nodes {
        q.t_nodes = n;
    }
    if let Some(v) = c.refine_tol {
        q.refine_tol = v;
    }
    if let Some(v) = c.y_tol {
        q.y_tol = v;
    }
    if let Some(v) = c.y_window_sigma {
        q.y_window_sigma = v;
    }
    if !c.extra_t.is_empty() {
        q.extra_t_nodes = c.extra_t.clone();
    }
    if c.pure_quadrature {
        q.alignment_aware = false;
    }
    if let Some(n) = c.node_cap {
        q.node_cap = n;
    }
    q.validate()?;
    Ok(q)
}

/// Noise levels from `--channel` or `--eta`.
fn etas(c: &Common, dim: usize) -> Run<Vec<f64>> {
    if let Some(p) = &c.channel {
        let text = std::fs::read_to_string(p)
            .map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", p.display())))?;
        let ch = channel_from_json(&text)
            .map_err(|e| Failure::Invalid(format!("{}: {e}", p.display())))?;
        if ch.dim() != dim {
            return Err(Failure::Invalid(format!(
                "channel dim {} does not match prior dim {dim}",
                ch.dim()
            )));
        }
        return Ok(vec![ch.eta()]);
    }
    if c.eta.is_empty() {
        return Err(Failure::Invalid("--eta or --channel is required".into()));
    }
    for e in &c.eta {
        GaussianChannel::scalar(*e)?;
    }
    Ok(c.eta.clone())
}

fn single_eta(c: &Common, dim: usize) -> Run<f64> {
    match etas(c, dim)?.as_slice() {
        [e] => Ok(*e),
        v => Err(Failure::Invalid(format!("expected one noise level, got {}", v.len()))),
    }
}

fn scalar_prior(p: &Prior) -> Run<&ScalarPrior> {
    match p {
        Prior::Scalar(s) => Ok(s),
        Prior::Product(_) => Err(Failure::Invalid("this command needs a scalar prior".into())),
    }
}

fn bound(p: &Prior, eta: f64, m: usize, vf: bool, q: &QuadratureSpec) -> Run<BoundReport> {
    let ch = GaussianChannel::scalar(eta)?;
    Ok(match p {
        Prior::Scalar(s) => zz_scalar(s, &ch, m, vf, q)?,
        Prior::Product(pp) => zz_product(pp, &vec![ch; pp.dim()], m, vf, q)?,
    })
}

/// MMSE of a (product of) scalar prior(s): coordinates add up.
fn mmse(p: &Prior, eta: f64, q: &QuadratureSpec) -> Run<(f64, bool)> {
    let ch = GaussianChannel::scalar(eta)?;
    let mut total = (0.0, true);
    for f in p.factors() {
        let v = mmse_quadrature(f, &ch, q)?;
        total.0 += v.value;
        total.1 &= v.converged;
    }
    Ok(total)
}

fn eval(c: &Common, prior: &Prior, q: &QuadratureSpec, vf: bool) -> Run<Outcome> {
    let eta = single_eta(c, prior.dim())?;
    let r = bound(prior, eta, c.m, vf, q)?;
    let mut table = Table::new(&["t", "h_ratio", "vf_ratio"]);
    for (t, h, v) in &r.per_t {
        table.push(vec![*t, *h, *v]);
    }
    if let Some(path) = &c.dump_integrand {
        std::fs::write(path, table.to_csv(None))
            .map_err(|e| Failure::Invalid(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(Outcome {
        json: json!({ "eta": eta, "report": r }),
        converged: r.converged,
        table,
    })
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else {
        f64::NAN
    }
}

fn sweep(c: &Common, prior: &Prior, q: &QuadratureSpec) -> Run<Outcome> {
    let etas = etas(c, prior.dim())?;
    let rows: Vec<Run<(Vec<f64>, bool)>> = etas
        .par_iter()
        .map(|&eta| {
            let a = bound(prior, eta, c.m, false, q)?;
            let b = bound(prior, eta, c.m, true, q)?;
            let (m, ok) = mmse(prior, eta, q)?;
            let tol = 10.0 * q.refine_tol + a.truncation_estimate + b.truncation_estimate;
            if a.value > b.value + tol || b.value > m + tol {
                return Err(Failure::Inconsistent(format!(
                    "eta {eta}: zz_novf {} <= zz_vf {} <= mmse {m} does not hold",
                    a.value, b.value
                )));
            }
            let row = vec![eta, a.value, b.value, m, ratio(a.value, m), ratio(b.value, m)];
            Ok((row, a.converged && b.converged && ok))
        })
        .collect();
    let mut table = Table::new(&["eta", "zz_novf", "zz_vf", "mmse", "ratio_novf", "ratio_vf"]);
    let mut converged = true;
    for r in rows {
        let (row, ok) = r?;
        converged &= ok;
        table.push(row);
    }
    Ok(Outcome {
        json: json!({ "rows": table.as_json() }),
        table,
        converged,
    })
}

fn asymptotic(c: &Common, prior: &Prior, q: &QuadratureSpec, vf: bool) -> Run<Outcome> {
    let s = scalar_prior(prior)?;
    let r = high_noise_bound(s, c.m, vf, q)?;
    let mut table = Table::new(&["t", "value"]);
    for (t, _, g) in &r.per_t {
        table.push(vec![*t, *g]);
    }
    Ok(Outcome {
        json: json!({ "report": r }),
        converged: r.converged,
        table,
    })
}

fn slope(c: &Common, prior: &Prior, q: &QuadratureSpec) -> Run<Outcome> {
    let etas = etas(c, prior.dim())?;
    let rows = low_noise_slope(prior, &etas, q)?;
    let mut table = Table::new(&["eta", "value"]);
    for r in &rows {
        table.push(vec![r.eta, r.zz_over_eta]);
    }
    Ok(Outcome {
        json: json!({ "rows": rows }),
        converged: rows.iter().all(|r| r.converged),
        table,
    })
}

fn mmse_cmd(c: &Common, prior: &Prior, q: &QuadratureSpec) -> Run<Outcome> {
    let eta = single_eta(c, prior.dim())?;
    let (value, converged) = mmse(prior, eta, q)?;
    let mut table = Table::new(&["method", "value", "std_error"]);
    table.push_labeled("quadrature", vec![value, 0.0]);
    let mut body = json!({ "eta": eta, "quadrature": { "value": value, "converged": converged } });
    if c.samples > 0 {
        let ch = GaussianChannel::scalar(eta)?;
        let (mut est, mut var) = (0.0, 0.0);
        for f in prior.factors() {
            let (e, se) = mmse_monte_carlo(f, &ch, c.samples, c.seed)?;
            est += e;
            var += se * se;
        }
        table.push_labeled("monte_carlo", vec![est, var.sqrt()]);
        body["monte_carlo"] = json!({ "estimate": est, "std_error": var.sqrt(), "samples": c.samples });
    }
    let gaussian_vars: Option<Vec<f64>> = prior
        .factors()
        .iter()
        .map(|f| match f.continuous_part() {
            Some(ContinuousLaw::Gaussian { var, .. }) if f.is_purely_continuous() => Some(*var),
            _ => None,
        })
        .collect();
    if let Some(vars) = gaussian_vars {
        let mut lg = 0.0;
        for v in vars {
            lg += mmse_linear_gaussian(v, eta)?;
        }
        table.push_labeled("linear_gaussian", vec![lg, 0.0]);
        body["linear_gaussian"] = json!(lg);
    }
    Ok(Outcome {
        json: body,
        table,
        converged,
    })
}

fn verify(c: &Common, prior: &Prior, q: &QuadratureSpec) -> Run<Outcome> {
    let s = scalar_prior(prior)?;
    let ch = GaussianChannel::scalar(single_eta(c, 1)?)?;
    let us = check_unimodal_symmetric(s, &ch, None, q)?;
    let zz = check_zz_condition(s, &ch, None, c.m, None, None, q)?;
    let mut table = Table::new(&["check", "pass"]);
    table.push_labeled("unimodal_symmetric", vec![f64::from(u8::from(us.pass))]);
    table.push_labeled("zz_condition", vec![f64::from(u8::from(zz.pass))]);
    Ok(Outcome {
        json: json!({ "unimodal_symmetric": us, "zz_condition": zz }),
        table,
        converged: true,
    })
}

fn run(cli: Cli) -> Run<bool> {
    let (name, c) = match &cli.command {
        Command::Eval(c) => ("eval", c),
        Command::Sweep(c) => ("sweep", c),
        Command::Asymptotic(c) => ("asymptotic", c),
        Command::Slope(c) => ("slope", c),
        Command::Mmse(c) => ("mmse", c),
        Command::Verify(c) => ("verify", c),
    };
    if c.m < 2 {
        return Err(Failure::Invalid(format!("M must be at least 2, got {}", c.m)));
    }
    let vf = !c.no_vf;
    let prior = load_prior(&c.prior)?;
    let q = quadrature(c)?;
    let out = match &cli.command {
        Command::Eval(_) => eval(c, &prior, &q, vf)?,
        Command::Sweep(_) => sweep(c, &prior, &q)?,
        Command::Asymptotic(_) => asymptotic(c, &prior, &q, vf)?,
        Command::Slope(_) => slope(c, &prior, &q)?,
        Command::Mmse(_) => mmse_cmd(c, &prior, &q)?,
        Command::Verify(_) => verify(c, &prior, &q)?,
    };
    let meta = Meta::new(name, c, &q, vf, c.deterministic);
    let text = match c.format {
        OutFormat::Json => output::json_document(&meta, out.json),
        OutFormat::Csv => out.table.to_csv(Some(&meta)),
    };
    output::emit(&text, c.out.as_deref()).map_err(Failure::Invalid)?;
    Ok(out.converged)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("warning: quadrature did not converge; results are best effort");
            ExitCode::from(3)
        }
        Err(Failure::Invalid(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Inconsistent(m)) => {
            eprintln!("internal consistency failure: {m}");
            ExitCode::from(4)
        }
    }
}
