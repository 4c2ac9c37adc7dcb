use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use super::checks::{direct_check, inverse_check, rate_sweep, theorem_suite};
use super::config::{parse_doubling_range, parse_geometric_range, ExperimentConfig, OutputFormat};
use super::lemmas::lemma_suite;
use super::output::{dump_operator_csv, inverse_csv, lemma_csv, rate_csv, suite_csv};
use crate::error::Error;
use crate::operator::{build_operator, OperatorInstance};

const EXIT_PASS: i32 = 0;
const EXIT_FAIL: i32 = 1;
const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "inner-bernstein", version, about = "Modified Bernstein operators with an inner singularity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bounded-constant and decay checks for the moment sums, the operator
    /// norm, the quadrature bound and the blended function.
    Lemmas(Flags),
    /// Weighted error against the modulus at the local scale.
    Direct(Flags),
    /// Exponent recovery from the modulus and the normalised error.
    Inverse(Flags),
    /// Weighted sup-norm error per degree against its nominal rate.
    Rates(Flags),
    /// Normalised second-derivative sups of the operator.
    Theorems(Flags),
    /// Lattice samples of the blended function.
    DumpOperator(Flags),
}

#[derive(Debug, Args)]
struct Flags {
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta0: Option<f64>,
    #[arg(long)]
    beta1: Option<f64>,
    #[arg(long)]
    function: Option<String>,
    /// Degrees `min:max`, doubling.
    #[arg(long = "n", value_name = "MIN:MAX")]
    n: Option<String>,
    /// Scales `min:max`, doubling.
    #[arg(long = "t", value_name = "MIN:MAX")]
    t: Option<String>,
    /// Uniform grid points.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// JSON file whose keys override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::UnknownFunction(_) | Error::InvalidParameter(_) | Error::InvalidDegree { .. } => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Run(e.to_string()),
        }
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// exit status: 0 when every verdict passes, 1 when one fails or a run
/// errors, 2 on a usage or configuration error.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match run(cli.command) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("usage: inner-bernstein <lemmas|direct|inverse|rates|theorems|dump-operator> --xi <XI> [OPTIONS]");
            EXIT_USAGE
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            EXIT_FAIL
        }
    }
}

fn build_config(flags: &Flags) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::default();
    let mut has_xi = flags.xi.is_some();
    if let Some(v) = flags.xi {
        cfg.params.xi = v;
    }
    if let Some(v) = flags.alpha {
        cfg.params.alpha = v;
    }
    if let Some(v) = flags.beta0 {
        cfg.sw.beta0 = v;
    }
    if let Some(v) = flags.beta1 {
        cfg.sw.beta1 = v;
    }
    if let Some(v) = &flags.function {
        cfg.function_name = v.clone();
    }
    if let Some(v) = &flags.n {
        cfg.n_values = parse_doubling_range(v)?;
    }
    if let Some(v) = &flags.t {
        cfg.t_values = parse_geometric_range(v)?;
    }
    if let Some(v) = flags.grid {
        cfg.grid = v;
    }
    if let Some(v) = &flags.out {
        cfg.out = Some(v.clone());
    }
    if let Some(v) = flags.format {
        cfg.format = v;
    }
    if let Some(path) = &flags.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        let overlay: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let serde_json::Value::Object(keys) = overlay else {
            return Err(Failure::Usage(format!("{}: expected a JSON object", path.display())));
        };
        has_xi |= keys.contains_key("xi");
        let mut merged = serde_json::to_value(&cfg).map_err(|e| Failure::Usage(e.to_string()))?;
        if let serde_json::Value::Object(base) = &mut merged {
            base.extend(keys);
        }
        cfg = serde_json::from_value(merged).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    }
    if !has_xi {
        return Err(Failure::Usage("--xi is required unless the config file sets xi".into()));
    }
    Ok(cfg)
}

fn emit(cfg: &ExperimentConfig, csv: impl FnOnce() -> String, json: &impl Serialize) -> Result<(), Failure> {
    let text = match cfg.format {
        OutputFormat::Csv => csv(),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(json).map_err(|e| Failure::Run(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Run(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Run(e.to_string())),
    }
}

fn summary(name: &str, passed: bool) -> bool {
    eprintln!("{name}: {}", if passed { "pass" } else { "fail" });
    passed
}

#[derive(Serialize)]
struct OperatorDump<'a> {
    n: usize,
    knots: [f64; 4],
    fbar_samples: &'a [f64],
}

fn run(command: Command) -> Result<bool, Failure> {
    match command {
        Command::Lemmas(flags) => {
            let cfg = build_config(&flags)?;
            cfg.validate()?;
            let r = lemma_suite(&cfg)?;
            emit(&cfg, || lemma_csv(&r), &r)?;
            Ok(summary("lemmas", r.passed()))
        }
        Command::Direct(flags) => {
            let cfg = build_config(&flags)?;
            cfg.validate_for_theorems()?;
            let r = direct_check(&cfg)?;
            emit(&cfg, || rate_csv(&r), &r)?;
            Ok(summary("direct", r.passed()))
        }
        Command::Inverse(flags) => {
            let cfg = build_config(&flags)?;
            cfg.validate_for_theorems()?;
            let r = inverse_check(&cfg)?;
            emit(&cfg, || inverse_csv(&r), &r)?;
            Ok(summary("inverse", r.verdict.passed()))
        }
        Command::Rates(flags) => {
            let cfg = build_config(&flags)?;
            cfg.validate()?;
            let r = rate_sweep(&cfg)?;
            emit(&cfg, || rate_csv(&r), &r)?;
            Ok(summary("rates", r.passed()))
        }
        Command::Theorems(flags) => {
            let cfg = build_config(&flags)?;
            cfg.validate_for_theorems()?;
            let r = theorem_suite(&cfg)?;
            emit(&cfg, || suite_csv(&r), &r)?;
            Ok(summary("theorems", r.verdict.passed()))
        }
        Command::DumpOperator(flags) => {
            let cfg = build_config(&flags)?;
            cfg.validate()?;
            let f = cfg.function()?;
            let ops = cfg
                .n_values
                .iter()
                .map(|&n| build_operator(&f, n, &cfg.params))
                .collect::<crate::error::Result<Vec<OperatorInstance>>>()?;
            let dump: Vec<OperatorDump> = ops
                .iter()
                .map(|op| OperatorDump {
                    n: op.n,
                    knots: [op.knots.x1, op.knots.x2, op.knots.x3, op.knots.x4],
                    fbar_samples: &op.fbar_samples,
                })
                .collect();
            emit(&cfg, || dump_operator_csv(&ops), &dump)?;
            Ok(true)
        }
    }
}
