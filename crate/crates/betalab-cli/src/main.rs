//! Seeded, reproducible experiment runner over the betalab toolkit.
//!
//! Every command emits a JSON envelope (or CSV via `--format csv`) carrying
//! provenance: the command name, crate versions, the seed when one is used,
//! and a timestamp that `--no-timestamp` suppresses so identical runs are
//! byte-identical. Exit codes: 0 success, 1 a verification check failed,
//! 2 configuration error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use num::rational::BigRational;
use num::Zero;
use serde_json::{json, Map, Value};

use betalab::ballot::{
    ballot_identity_residual, bridge_counts, bridge_partition_enum, bridge_series,
    WeightedStepSystem,
};
use betalab::brownian::{airy_laplace_first_moment, sample_brownian_excursion};
use betalab::dunkl::dunkl_moment_from_cumulants;
use betalab::edge::{
    contour_moment, edge_parameters, steepest_descent_moment, universality_residual,
    EdgeParameters, ScaledMoment,
};
use betalab::exact::{format_rational, int, parse_rational, rational_to_f64};
use betalab::excursion::{downstep_fraction, BridgeSampler};
use betalab::mc::{stream_rng, RunningStats};
use betalab::moments::{moment_coefficient, moment_nc};
use betalab::spectra::{
    empirical_laplace, empirical_power_sum, finite_n_edge, sample_spectrum, top_rescaled,
};
use betalab::walks::moment_walk_sum;
use betalab::{
    classify_against_walks, dunkl_joint_moment, dunkl_moment, sample_classical_addition,
    Centering, ClassicalBeta, Component, CumulantSequence, EnsembleSpec, LowerConvention,
    StepDistribution, VoiculescuTransform,
};

/// Number-of-variables cap of the joint operator engine, mirrored here so
/// the config error names the limit instead of bubbling a library error.
const JOINT_N_CAP: u32 = 4;
const JOINT_TOTAL_CAP: u32 = 7;
/// Largest bridge table the walk sampler will build (~1 GB at the cap).
const WALK_M_CAP: usize = 1 << 16;
/// Moment caps per route: enumeration grows as the Catalan numbers, the
/// coefficient route as a polynomial power.
const NC_M_CAP: u32 = 14;
const COEFF_M_CAP: u32 = 300;

#[derive(Parser)]
#[command(
    name = "betalab",
    version,
    about = "Exact and stochastic checks for beta-ensemble edge machinery"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Omit the timestamp so identical command + seed runs are byte-identical.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Worker threads. This build reduces deterministically on one thread,
    /// so only 1 is accepted.
    #[arg(long, global = true, default_value_t = 1)]
    threads: u32,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    /// Non-crossing partition sum (exact).
    Nc,
    /// Coefficient extraction from the cumulant-polynomial power (exact).
    Coeff,
    /// Numerical contour quadrature around the critical circle.
    Contour,
    /// Single-saddle steepest-descent asymptotic.
    Asymptotic,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    /// Finite-N lowering coefficients (moments are exact).
    Exact,
    /// Leading-order lowering used by the walk classification.
    Simplified,
}

impl From<Convention> for LowerConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Exact => LowerConvention::Exact,
            Convention::Simplified => LowerConvention::Simplified,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Stat {
    /// (λ₁ − μ₊N)/(C₀N^{1/3}).
    Top,
    /// Σ exp(T·λ′ᵢ/μ₊).
    Laplace,
    /// Σ (λᵢ/μ₊N)^{⌊T·N^{2/3}⌋}.
    Powersum,
}

#[derive(Subcommand)]
enum Cmd {
    /// Free or finite-N cumulants of a spec.
    Cumulants {
        #[arg(long)]
        spec: PathBuf,
        /// Highest cumulant order to report.
        #[arg(long)]
        order: u32,
        /// Finite matrix size; omit for the limiting sequence.
        #[arg(long = "N")]
        n: Option<u32>,
    },
    /// One moment of the spec's limiting measure by the chosen route.
    Moments {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "M")]
        m: u32,
        #[arg(long, value_enum)]
        method: Method,
    },
    /// Critical point and edge parameters (limiting or finite-N).
    EdgeParams {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "N")]
        n: Option<u32>,
    },
    /// Closed-form edge identity; exit 1 when the residual exceeds 1e-10.
    UniversalityCheck {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Rotation identity on weighted lattice bridges; exit 1 on any mismatch.
    BallotVerify {
        /// Take step weights from this spec's free cumulants.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Explicit rational step weights for steps -1, 0, 1, ... ("1,1/2,3").
        #[arg(long)]
        weights: Option<String>,
        /// Check every start height y0 <= length <= this bound.
        #[arg(long, default_value_t = 10)]
        max_len: u32,
    },
    /// Operator-power expansion ledger, or a joint moment with --powers.
    DunklExpand {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "N")]
        n: u32,
        /// Rational theta = beta/2, e.g. "1" or "1/2".
        #[arg(long)]
        theta: String,
        #[arg(long = "M")]
        m: Option<u32>,
        #[arg(long, value_enum, default_value_t = Convention::Exact)]
        convention: Convention,
        /// Power-sum exponents for a joint moment, e.g. "2,1".
        #[arg(long)]
        powers: Option<String>,
    },
    /// Conditioned-walk Monte Carlo against exact lattice statistics.
    WalkMc {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "M")]
        m: usize,
        #[arg(long)]
        paths: u32,
        #[arg(long)]
        seed: u64,
        /// Down-step window start, as a fraction of the path length.
        #[arg(long, default_value_t = 0.25)]
        t1: f64,
        /// Down-step window end, as a fraction of the path length.
        #[arg(long, default_value_t = 0.75)]
        t2: f64,
    },
    /// Brownian-excursion Monte Carlo (area, maximum, midpoint).
    ExcursionMc {
        #[arg(long)]
        paths: u32,
        #[arg(long, default_value_t = 2048)]
        grid: usize,
        #[arg(long)]
        seed: u64,
    },
    /// First moment of the Airy Laplace transform via excursion functionals.
    AiryLaplace {
        #[arg(long = "T")]
        t: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 100_000)]
        paths: usize,
        #[arg(long, default_value_t = 8192)]
        grid: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Tridiagonal-model spectra reduced to one edge statistic per draw.
    TridiagMc {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "N")]
        n: u32,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        reps: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Stat::Top)]
        stat: Stat,
        #[arg(long = "T", default_value_t = 1.0)]
        t: f64,
    },
    /// Classical-addition MC joint moments against the operator engine;
    /// exit 1 when any |z| exceeds 4.
    AdditionMc {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "N")]
        n: u32,
        /// Classical beta: 1 (real) or 2 (complex).
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        reps: u32,
        #[arg(long)]
        seed: u64,
        /// Power-sum exponents of the joint moment, e.g. "2,1".
        #[arg(long, default_value = "2")]
        powers: String,
    },
    /// Exact-equality battery over one spec or the built-in set;
    /// exit 1 unless every check passes.
    VerifyAll {
        #[arg(long)]
        spec: Option<PathBuf>,
    },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Cumulants { .. } => "cumulants",
            Cmd::Moments { .. } => "moments",
            Cmd::EdgeParams { .. } => "edge-params",
            Cmd::UniversalityCheck { .. } => "universality-check",
            Cmd::BallotVerify { .. } => "ballot-verify",
            Cmd::DunklExpand { .. } => "dunkl-expand",
            Cmd::WalkMc { .. } => "walk-mc",
            Cmd::ExcursionMc { .. } => "excursion-mc",
            Cmd::AiryLaplace { .. } => "airy-laplace",
            Cmd::TridiagMc { .. } => "tridiag-mc",
            Cmd::AdditionMc { .. } => "addition-mc",
            Cmd::VerifyAll { .. } => "verify-all",
        }
    }
}

/// What a command produced: the JSON result, an optional row table that CSV
/// output prefers, the seed (echoed as provenance), and whether a
/// verification performed by the command failed.
struct Outcome {
    result: Value,
    table: Option<(Vec<String>, Vec<Vec<String>>)>,
    seed: Option<u64>,
    check_failed: bool,
}

impl Outcome {
    fn of(result: Value) -> Self {
        Outcome {
            result,
            table: None,
            seed: None,
            check_failed: false,
        }
    }

    fn seeded(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    fn checked(mut self, pass: bool) -> Self {
        self.check_failed = !pass;
        self
    }

    fn with_table(mut self, headers: Vec<String>, rows: Vec<Vec<String>>) -> Self {
        self.table = Some((headers, rows));
        self
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads != 1 {
        eprintln!(
            "error: this build reduces deterministically on a single thread; --threads must be 1"
        );
        return ExitCode::from(2);
    }
    let name = cli.command.name();
    match run(&cli.command) {
        Ok(outcome) => {
            let rendered = render(name, &outcome, cli.format, cli.no_timestamp);
            if let Some(path) = &cli.output {
                if let Err(e) = fs::write(path, &rendered) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{rendered}");
            }
            if outcome.check_failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn render(name: &str, outcome: &Outcome, format: Format, no_timestamp: bool) -> String {
    match format {
        Format::Json => {
            let mut envelope = Map::new();
            envelope.insert("command".into(), json!(name));
            if let Some(seed) = outcome.seed {
                envelope.insert("seed".into(), json!(seed));
            }
            envelope.insert(
                "versions".into(),
                json!({"betalab": betalab::VERSION, "betalab-cli": env!("CARGO_PKG_VERSION")}),
            );
            if !no_timestamp {
                envelope.insert("unix_time".into(), json!(unix_time()));
            }
            envelope.insert("result".into(), outcome.result.clone());
            let mut text = serde_json::to_string_pretty(&Value::Object(envelope))
                .expect("output value serializes");
            text.push('\n');
            text
        }
        Format::Csv => {
            let mut text = String::new();
            text.push_str(&format!("# command: {name}\n"));
            if let Some(seed) = outcome.seed {
                text.push_str(&format!("# seed: {seed}\n"));
            }
            text.push_str(&format!(
                "# versions: betalab {}, betalab-cli {}\n",
                betalab::VERSION,
                env!("CARGO_PKG_VERSION")
            ));
            if !no_timestamp {
                text.push_str(&format!("# unix_time: {}\n", unix_time()));
            }
            match &outcome.table {
                Some((headers, rows)) => {
                    text.push_str(&headers.join(","));
                    text.push('\n');
                    for row in rows {
                        let cells: Vec<String> = row.iter().map(|c| csv_escape(c)).collect();
                        text.push_str(&cells.join(","));
                        text.push('\n');
                    }
                }
                None => {
                    text.push_str("key,value\n");
                    flatten_csv("", &outcome.result, &mut text);
                }
            }
            text
        }
    }
}

fn unix_time() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn csv_escape(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

fn flatten_csv(prefix: &str, value: &Value, out: &mut String) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten_csv(&key, v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten_csv(&format!("{prefix}[{i}]"), v, out);
            }
        }
        scalar => {
            let text = match scalar {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{},{}\n", csv_escape(prefix), csv_escape(&text)));
        }
    }
}

fn load_spec(path: &Path) -> Result<EnsembleSpec, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read spec file {}: {e}", path.display()))?;
    EnsembleSpec::from_json(&text).map_err(|e| format!("invalid spec {}: {e}", path.display()))
}

fn parse_rational_arg(text: &str, what: &str) -> Result<BigRational, String> {
    parse_rational(text.trim()).map_err(|e| format!("invalid {what} {text:?}: {e}"))
}

fn parse_powers(text: &str) -> Result<Vec<u32>, String> {
    let powers: Vec<u32> = text
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<u32>()
                .map_err(|e| format!("invalid power {p:?}: {e}"))
        })
        .collect::<Result<_, _>>()?;
    if powers.is_empty() || powers.contains(&0) {
        return Err("powers must be a nonempty list of positive integers".into());
    }
    Ok(powers)
}

fn rational_value(r: &BigRational) -> Value {
    json!({"exact": format_rational(r), "approx": rational_to_f64(r)})
}

fn scaled_moment_value(m: &ScaledMoment, mu_plus: f64) -> Value {
    json!({
        "scaled_by_edge_power": m.scaled,
        "log10_abs": m.log10_abs,
        "raw": if m.raw.is_finite() { json!(m.raw) } else { Value::Null },
        "mu_plus": mu_plus,
    })
}

fn edge_value(params: &EdgeParameters) -> Value {
    let mut v = serde_json::to_value(params).expect("edge parameters serialize");
    v["sigma"] = json!(params.sigma());
    v
}

fn run(cmd: &Cmd) -> Result<Outcome, String> {
    match cmd {
        Cmd::Cumulants { spec, order, n } => cumulants_cmd(spec, *order, *n),
        Cmd::Moments { spec, m, method } => moments_cmd(spec, *m, *method),
        Cmd::EdgeParams { spec, n } => edge_params_cmd(spec, *n),
        Cmd::UniversalityCheck { spec } => universality_cmd(spec),
        Cmd::BallotVerify {
            spec,
            weights,
            max_len,
        } => ballot_cmd(spec.as_deref(), weights.as_deref(), *max_len),
        Cmd::DunklExpand {
            spec,
            n,
            theta,
            m,
            convention,
            powers,
        } => dunkl_cmd(spec, *n, theta, *m, *convention, powers.as_deref()),
        Cmd::WalkMc {
            spec,
            m,
            paths,
            seed,
            t1,
            t2,
        } => walk_mc_cmd(spec, *m, *paths, *seed, *t1, *t2),
        Cmd::ExcursionMc { paths, grid, seed } => excursion_mc_cmd(*paths, *grid, *seed),
        Cmd::AiryLaplace {
            t,
            beta,
            paths,
            grid,
            seed,
        } => airy_laplace_cmd(*t, *beta, *paths, *grid, *seed),
        Cmd::TridiagMc {
            spec,
            n,
            beta,
            reps,
            seed,
            stat,
            t,
        } => tridiag_mc_cmd(spec, *n, *beta, *reps, *seed, *stat, *t),
        Cmd::AdditionMc {
            spec,
            n,
            beta,
            reps,
            seed,
            powers,
        } => addition_mc_cmd(spec, *n, *beta, *reps, *seed, powers),
        Cmd::VerifyAll { spec } => verify_all_cmd(spec.as_deref()),
    }
}

fn cumulants_cmd(spec_path: &Path, order: u32, n: Option<u32>) -> Result<Outcome, String> {
    if order == 0 || order > 64 {
        return Err("--order must be between 1 and 64".into());
    }
    let spec = load_spec(spec_path)?;
    let kappas = match n {
        Some(n) => CumulantSequence::finite_n(&spec, n, order),
        None => CumulantSequence::limiting(&spec, order),
    }
    .map_err(|e| e.to_string())?;
    let values: Vec<Value> = (1..=order)
        .map(|l| {
            let mut row = rational_value(kappas.kappa(l));
            row["l"] = json!(l);
            row
        })
        .collect();
    let rows = (1..=order)
        .map(|l| {
            vec![
                l.to_string(),
                format_rational(kappas.kappa(l)),
                rational_to_f64(kappas.kappa(l)).to_string(),
            ]
        })
        .collect();
    Ok(Outcome::of(json!({
        "order": order,
        "n": n,
        "cumulants": values,
    }))
    .with_table(
        vec!["l".into(), "exact".into(), "approx".into()],
        rows,
    ))
}

fn moments_cmd(spec_path: &Path, m: u32, method: Method) -> Result<Outcome, String> {
    if m == 0 {
        return Err("--M must be at least 1".into());
    }
    let spec = load_spec(spec_path)?;
    let result = match method {
        Method::Nc | Method::Coeff => {
            let cap = if matches!(method, Method::Nc) {
                NC_M_CAP
            } else {
                COEFF_M_CAP
            };
            if m > cap {
                return Err(format!("this route supports --M up to {cap}"));
            }
            let kappas = CumulantSequence::limiting(&spec, m).map_err(|e| e.to_string())?;
            let value = match method {
                Method::Nc => moment_nc(&kappas, m),
                _ => moment_coefficient(&kappas, m),
            }
            .map_err(|e| e.to_string())?;
            let mut v = rational_value(&value);
            v["m"] = json!(m);
            v["method"] = json!(match method {
                Method::Nc => "nc",
                _ => "coeff",
            });
            v
        }
        Method::Contour => {
            let vt = VoiculescuTransform::limiting(&spec);
            let quad = contour_moment(&vt, m).map_err(|e| e.to_string())?;
            let params = edge_parameters(&vt).map_err(|e| e.to_string())?;
            let mut v = scaled_moment_value(&quad.moment, params.mu_plus);
            v["m"] = json!(m);
            v["method"] = json!("contour");
            v["nodes"] = json!(quad.nodes);
            v
        }
        Method::Asymptotic => {
            let vt = VoiculescuTransform::limiting(&spec);
            let saddle = steepest_descent_moment(&vt, m).map_err(|e| e.to_string())?;
            let params = edge_parameters(&vt).map_err(|e| e.to_string())?;
            let mut v = scaled_moment_value(&saddle, params.mu_plus);
            v["m"] = json!(m);
            v["method"] = json!("asymptotic");
            v
        }
    };
    Ok(Outcome::of(result))
}

fn edge_params_cmd(spec_path: &Path, n: Option<u32>) -> Result<Outcome, String> {
    let spec = load_spec(spec_path)?;
    let vt = match n {
        Some(n) => VoiculescuTransform::finite_n(&spec, n),
        None => VoiculescuTransform::limiting(&spec),
    };
    let params = edge_parameters(&vt).map_err(|e| e.to_string())?;
    Ok(Outcome::of(json!({
        "n": n,
        "edge": edge_value(&params),
    })))
}

fn universality_cmd(spec_path: &Path) -> Result<Outcome, String> {
    let spec = load_spec(spec_path)?;
    let params =
        edge_parameters(&VoiculescuTransform::limiting(&spec)).map_err(|e| e.to_string())?;
    let residual = universality_residual(&params);
    let pass = residual.abs() < 1e-10;
    Ok(Outcome::of(json!({
        "residual": residual,
        "threshold": 1e-10,
        "pass": pass,
        "edge": edge_value(&params),
    }))
    .checked(pass))
}

fn ballot_cmd(
    spec_path: Option<&Path>,
    weights: Option<&str>,
    max_len: u32,
) -> Result<Outcome, String> {
    if !(1..=16).contains(&max_len) {
        return Err("--max-len must be between 1 and 16".into());
    }
    let sys = match (spec_path, weights) {
        (Some(_), Some(_)) => {
            return Err("pass either --spec or --weights, not both".into());
        }
        (None, None) => {
            return Err("step weights needed: pass --spec or --weights".into());
        }
        (Some(path), None) => {
            let spec = load_spec(path)?;
            let kappas =
                CumulantSequence::limiting(&spec, max_len + 1).map_err(|e| e.to_string())?;
            WeightedStepSystem::from_cumulants(&kappas)
        }
        (None, Some(text)) => {
            let parsed: Vec<BigRational> = text
                .split(',')
                .map(|w| parse_rational_arg(w, "step weight"))
                .collect::<Result<_, _>>()?;
            if parsed.is_empty() {
                return Err("--weights needs at least the step -1 weight".into());
            }
            WeightedStepSystem::new(parsed)
        }
    };
    let weight_strings: Vec<String> = (-1..=sys.max_step())
        .map(|s| format_rational(&sys.weight(s)))
        .collect();
    let mut cells = 0u32;
    let mut failures = Vec::new();
    for len in 1..=max_len {
        for y0 in 1..=len {
            let counts = bridge_counts(&sys, y0, len).map_err(|e| e.to_string())?;
            if !ballot_identity_residual(&counts, y0, len).is_zero() {
                failures.push(json!({"y0": y0, "len": len}));
            }
            cells += 1;
        }
    }
    let pass = failures.is_empty();
    Ok(Outcome::of(json!({
        "max_len": max_len,
        "cells": cells,
        "weights": weight_strings,
        "failures": failures,
        "pass": pass,
    }))
    .checked(pass))
}

fn dunkl_cmd(
    spec_path: &Path,
    n: u32,
    theta_text: &str,
    m: Option<u32>,
    convention: Convention,
    powers: Option<&str>,
) -> Result<Outcome, String> {
    let spec = load_spec(spec_path)?;
    let theta = parse_rational_arg(theta_text, "theta")?;
    match powers {
        Some(text) => {
            let powers = parse_powers(text)?;
            let total: u32 = powers.iter().sum();
            if n > JOINT_N_CAP || total > JOINT_TOTAL_CAP {
                return Err(format!(
                    "joint moments support N <= {JOINT_N_CAP} and total power <= {JOINT_TOTAL_CAP}"
                ));
            }
            let value =
                dunkl_joint_moment(&spec, n, &theta, &powers).map_err(|e| e.to_string())?;
            let mut v = rational_value(&value);
            v["n"] = json!(n);
            v["theta"] = json!(format_rational(&theta));
            v["powers"] = json!(powers);
            Ok(Outcome::of(v))
        }
        None => {
            let m = m.ok_or("--M is required unless --powers is given")?;
            let expansion = dunkl_moment(&spec, n, &theta, m, convention.into())
                .map_err(|e| e.to_string())?;
            let classes: Value = serde_json::from_str(&expansion.ledger_json())
                .expect("ledger JSON parses");
            let moment = expansion.moment();
            Ok(Outcome::of(json!({
                "n": n,
                "theta": format_rational(&theta),
                "m": m,
                "convention": match convention {
                    Convention::Exact => "exact",
                    Convention::Simplified => "simplified",
                },
                "moment": rational_value(&moment),
                "classes": classes,
            })))
        }
    }
}

fn walk_mc_cmd(
    spec_path: &Path,
    m: usize,
    paths: u32,
    seed: u64,
    t1: f64,
    t2: f64,
) -> Result<Outcome, String> {
    if !(2..=WALK_M_CAP).contains(&m) {
        return Err(format!("--M must be between 2 and {WALK_M_CAP}"));
    }
    if paths == 0 {
        return Err("--paths must be at least 1".into());
    }
    if !(0.0 < t1 && t1 < t2 && t2 < 1.0) {
        return Err("window needs 0 < t1 < t2 < 1".into());
    }
    let spec = load_spec(spec_path)?;
    let (dist, params) =
        StepDistribution::at_critical_point(&spec).map_err(|e| e.to_string())?;
    let sampler = BridgeSampler::new(&dist, m).map_err(|e| e.to_string())?;
    let mut rng = stream_rng(seed, 0);
    let mut area = RunningStats::new();
    let mut midpoint = RunningStats::new();
    let mut window = RunningStats::new();
    for _ in 0..paths {
        let walk = sampler.sample(&mut rng);
        let stats = betalab::excursion::walk_stats(&walk);
        area.push(stats.rescaled_area(sampler.sigma(), m));
        midpoint.push(stats.rescaled_midpoint(sampler.sigma(), m));
        window.push(downstep_fraction(&walk, t1, t2));
    }
    let exact = sampler.exact_stats();
    let lo = ((t1 * m as f64).ceil() as usize).max(1);
    let hi = ((t2 * m as f64).floor() as usize).min(m);
    let exact_window = sampler.exact_downstep_window(lo, hi);
    let scale = sampler.sigma() * (m as f64).powf(1.5);
    Ok(Outcome::of(json!({
        "m": m,
        "paths": paths,
        "area": {"mean": area.mean(), "std_error": area.std_error(),
                 "lattice_exact": exact.mean_area / scale},
        "midpoint": {"mean": midpoint.mean(), "std_error": midpoint.std_error()},
        "downstep_window": {"t1": t1, "t2": t2,
                            "mean": window.mean(), "std_error": window.std_error(),
                            "lattice_exact": exact_window,
                            "p_minus1": params.p_minus1},
    }))
    .seeded(seed))
}

fn excursion_mc_cmd(paths: u32, grid: usize, seed: u64) -> Result<Outcome, String> {
    if paths == 0 {
        return Err("--paths must be at least 1".into());
    }
    if !(2..=1 << 20).contains(&grid) {
        return Err("--grid must be between 2 and 2^20".into());
    }
    let mut rng = stream_rng(seed, 0);
    let mut area = RunningStats::new();
    let mut max = RunningStats::new();
    let mut midpoint = RunningStats::new();
    for _ in 0..paths {
        let path = sample_brownian_excursion(grid, &mut rng);
        area.push(path.area());
        max.push(path.max());
        midpoint.push(path.midpoint());
    }
    Ok(Outcome::of(json!({
        "paths": paths,
        "grid": grid,
        "area": {"mean": area.mean(), "std_error": area.std_error()},
        "max": {"mean": max.mean(), "std_error": max.std_error()},
        "midpoint": {"mean": midpoint.mean(), "std_error": midpoint.std_error()},
    }))
    .seeded(seed))
}

fn airy_laplace_cmd(
    t: f64,
    beta: f64,
    paths: usize,
    grid: usize,
    seed: u64,
) -> Result<Outcome, String> {
    if !t.is_finite() || t <= 0.0 || !beta.is_finite() || beta <= 0.0 {
        return Err("--T and --beta must be positive".into());
    }
    if paths == 0 || !(2..=1 << 20).contains(&grid) {
        return Err("--paths must be positive and --grid between 2 and 2^20".into());
    }
    let estimate =
        airy_laplace_first_moment(t, beta, paths, grid, seed).map_err(|e| e.to_string())?;
    Ok(Outcome::of(json!({
        "T": t,
        "beta": beta,
        "paths": paths,
        "grid": grid,
        "mean": estimate.mean,
        "std_error": estimate.std_error,
    }))
    .seeded(seed))
}

fn tridiag_mc_cmd(
    spec_path: &Path,
    n: u32,
    beta: f64,
    reps: u32,
    seed: u64,
    stat: Stat,
    t: f64,
) -> Result<Outcome, String> {
    if n == 0 || n > 20_000 {
        return Err("--N must be between 1 and 20000".into());
    }
    if reps == 0 {
        return Err("--reps must be at least 1".into());
    }
    if !beta.is_finite() || beta <= 0.0 {
        return Err("--beta must be positive".into());
    }
    let spec = load_spec(spec_path)?;
    if !(spec.is_gaussian_only() || (spec.delta().is_zero() && spec.components().len() == 1)) {
        return Err(
            "tridiagonal models cover Gaussian-only and single-Laguerre specs; \
             use addition-mc for mixtures"
                .into(),
        );
    }
    let params = finite_n_edge(&spec, n).map_err(|e| e.to_string())?;
    let mut stats = RunningStats::new();
    let mut rows = Vec::with_capacity(reps as usize);
    for rep in 0..reps {
        let mut rng = stream_rng(seed, rep as u64);
        let eig = sample_spectrum(&spec, n as usize, beta, &mut rng).map_err(|e| e.to_string())?;
        let value = match stat {
            Stat::Top => top_rescaled(&eig, &params),
            Stat::Laplace => empirical_laplace(&eig, t, &params),
            Stat::Powersum => empirical_power_sum(&eig, t, &params),
        };
        stats.push(value);
        rows.push(vec![rep.to_string(), format!("{value:.17e}")]);
    }
    let stat_name = match stat {
        Stat::Top => "top",
        Stat::Laplace => "laplace",
        Stat::Powersum => "powersum",
    };
    Ok(Outcome::of(json!({
        "stat": stat_name,
        "T": t,
        "n": n,
        "beta": beta,
        "reps": reps,
        "mean": stats.mean(),
        "std_error": stats.std_error(),
        "edge": edge_value(&params),
    }))
    .seeded(seed)
    .with_table(vec!["rep".into(), stat_name.into()], rows))
}

fn addition_mc_cmd(
    spec_path: &Path,
    n: u32,
    beta: f64,
    reps: u32,
    seed: u64,
    powers_text: &str,
) -> Result<Outcome, String> {
    let spec = load_spec(spec_path)?;
    let powers = parse_powers(powers_text)?;
    let total: u32 = powers.iter().sum();
    if n == 0 || n > JOINT_N_CAP || total > JOINT_TOTAL_CAP {
        return Err(format!(
            "the exact oracle supports N <= {JOINT_N_CAP} and total power <= {JOINT_TOTAL_CAP}"
        ));
    }
    if reps == 0 {
        return Err("--reps must be at least 1".into());
    }
    let classical = ClassicalBeta::from_beta(beta)
        .ok_or("--beta must be 1 or 2: only the classical matrix models have samplers")?;
    let theta = BigRational::new((beta as i64).into(), 2.into());
    let exact = dunkl_joint_moment(&spec, n, &theta, &powers).map_err(|e| e.to_string())?;
    let truth = rational_to_f64(&exact);
    let mut stats = RunningStats::new();
    for rep in 0..reps {
        let mut rng = stream_rng(seed, rep as u64);
        let eig = sample_classical_addition(&spec, n as usize, classical, &mut rng)
            .map_err(|e| e.to_string())?;
        let value: f64 = powers
            .iter()
            .map(|&k| eig.iter().map(|x| x.powi(k as i32)).sum::<f64>())
            .product();
        stats.push(value);
    }
    let estimate = stats.estimate(seed);
    let z = estimate.z_against(truth);
    let pass = z.abs() <= 4.0;
    Ok(Outcome::of(json!({
        "n": n,
        "beta": beta,
        "powers": powers,
        "reps": reps,
        "exact": format_rational(&exact),
        "exact_approx": truth,
        "mc_mean": estimate.mean,
        "std_error": estimate.std_error,
        "z": z,
        "pass": pass,
    }))
    .seeded(seed)
    .checked(pass))
}

/// The built-in battery: the Gaussian spec, two Laguerre aspect ratios, and
/// a signed Gaussian+Laguerre mixture.
fn battery() -> Vec<EnsembleSpec> {
    let mixed = EnsembleSpec::new(
        BigRational::new(1.into(), 2.into()),
        vec![
            Component::new(int(1), BigRational::new(3.into(), 2.into())),
            Component::new(BigRational::new((-1).into(), 3.into()), int(1)),
        ],
        Centering::Uncentered,
    )
    .expect("battery spec is valid");
    vec![
        EnsembleSpec::semicircle(),
        EnsembleSpec::marchenko_pastur(int(1)).expect("gamma 1 is valid"),
        EnsembleSpec::marchenko_pastur(int(2)).expect("gamma 2 is valid"),
        mixed,
    ]
}

fn verify_all_cmd(spec_path: Option<&Path>) -> Result<Outcome, String> {
    let specs = match spec_path {
        Some(path) => vec![load_spec(path)?],
        None => battery(),
    };
    let mut reports = Vec::new();
    let mut all_pass = true;
    for spec in &specs {
        let mut checks = Vec::new();
        let mut push = |name: &str, outcome: Result<String, String>| match outcome {
            Ok(detail) => checks.push(json!({"name": name, "pass": true, "detail": detail})),
            Err(detail) => {
                all_pass = false;
                checks.push(json!({"name": name, "pass": false, "detail": detail}));
            }
        };
        push("cross-route moments", cross_route_check(spec));
        push("ballot identity", ballot_check(spec));
        push("bridge series", bridge_series_check(spec));
        push("three-step ledger", ledger_check(spec));
        push("walk-functional classes", classification_check(spec));
        push("edge universality identity", universality_check(spec));
        reports.push(json!({
            "spec": serde_json::from_str::<Value>(&spec.to_json()).expect("spec serializes"),
            "checks": checks,
        }));
    }
    Ok(Outcome::of(json!({
        "specs": reports,
        "pass": all_pass,
    }))
    .checked(all_pass))
}

fn cross_route_check(spec: &EnsembleSpec) -> Result<String, String> {
    let kappas = CumulantSequence::limiting(spec, 8).map_err(|e| e.to_string())?;
    for m in 1..=8 {
        let nc = moment_nc(&kappas, m).map_err(|e| e.to_string())?;
        let coeff = moment_coefficient(&kappas, m).map_err(|e| e.to_string())?;
        let walk = moment_walk_sum(&kappas, m).map_err(|e| e.to_string())?;
        if nc != coeff || nc != walk {
            return Err(format!("routes disagree at m = {m}"));
        }
    }
    Ok("partition, coefficient, and walk routes identical for M <= 8".into())
}

fn ballot_check(spec: &EnsembleSpec) -> Result<String, String> {
    let kappas = CumulantSequence::limiting(spec, 9).map_err(|e| e.to_string())?;
    let sys = WeightedStepSystem::from_cumulants(&kappas);
    for len in 1..=8 {
        for y0 in 1..=len {
            let counts = bridge_counts(&sys, y0, len).map_err(|e| e.to_string())?;
            if !ballot_identity_residual(&counts, y0, len).is_zero() {
                return Err(format!("residual nonzero at y0 = {y0}, len = {len}"));
            }
        }
    }
    Ok("rotation identity exact for y0 <= L <= 8".into())
}

fn bridge_series_check(spec: &EnsembleSpec) -> Result<String, String> {
    let kappas = CumulantSequence::limiting(spec, 8).map_err(|e| e.to_string())?;
    for h in 0..=3u32 {
        for m in h.max(1)..=8 {
            let direct = bridge_partition_enum(&kappas, h, m).map_err(|e| e.to_string())?;
            let series = bridge_series(&kappas, h, m).map_err(|e| e.to_string())?;
            if direct != series {
                return Err(format!("series mismatch at h = {h}, m = {m}"));
            }
        }
    }
    Ok("series formula equals enumeration for H <= 3, M <= 8".into())
}

fn ledger_check(spec: &EnsembleSpec) -> Result<String, String> {
    let kappas = CumulantSequence::limiting(spec, 3).map_err(|e| e.to_string())?;
    let (k1, k2, k3) = (kappas.kappa(1), kappas.kappa(2), kappas.kappa(3));
    for n in 2..=4u32 {
        for theta in [int(1), BigRational::new(1.into(), 2.into())] {
            let e = dunkl_moment_from_cumulants(&kappas, n, &theta, 3, LowerConvention::Simplified)
                .map_err(|e| e.to_string())?;
            let nn = int(n as i64);
            let walk = k3 + int(3) * k2 * k1 + k1 * k1 * k1;
            let p1 = int(3) * (k3 + k1 * k2) / (&nn * &theta);
            let p2 = int(2) * k3 / (&nn * &nn * &theta * &theta);
            let pair = -k3 / (&nn * &nn);
            if e.class(&[], 0) != walk
                || e.class(&[], 1) != p1
                || e.class(&[], 2) != p2
                || e.collapsed_class(&[2], 0) != int(n as i64 - 1) * pair
            {
                return Err(format!("class mismatch at n = {n}, theta = {theta}"));
            }
        }
    }
    Ok("three-step class sums match closed forms for N <= 4".into())
}

fn classification_check(spec: &EnsembleSpec) -> Result<String, String> {
    let kappas = CumulantSequence::limiting(spec, 5).map_err(|e| e.to_string())?;
    for n in 2..=3u32 {
        for m in 1..=5u32 {
            let theta = BigRational::new(1.into(), 2.into());
            let e = dunkl_moment_from_cumulants(&kappas, n, &theta, m, LowerConvention::Simplified)
                .map_err(|e| e.to_string())?;
            classify_against_walks(&e, &kappas).map_err(|e| e.to_string())?;
        }
    }
    Ok("ledger classes equal walk-functional sums for N <= 3, M <= 5".into())
}

fn universality_check(spec: &EnsembleSpec) -> Result<String, String> {
    let params =
        edge_parameters(&VoiculescuTransform::limiting(spec)).map_err(|e| e.to_string())?;
    let residual = universality_residual(&params);
    if residual.abs() < 1e-10 {
        Ok(format!("residual {residual:.2e} within 1e-10"))
    } else {
        Err(format!("residual {residual:.2e} exceeds 1e-10"))
    }
}
