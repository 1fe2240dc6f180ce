//! `banach-index`: analyze space expressions, run registered numeric
//! experiments, and inspect the deduction rule catalog.
//!
//! Exit codes: 0 on success, 1 on a parse or domain error, 2 when an
//! experiment ran but missed its registered expectation.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use banach_index::dsl::parse;
use banach_index::engine::{analyze, explain};
use banach_index::experiments::{run_experiment, ExperimentParams};
use banach_index_cli::{
    render_analyze, render_experiment, render_rules, rule_outputs, AnalyzeOutput, ExplainOutput,
};

const SEED_ENV: &str = "BANACH_INDEX_SEED";

#[derive(Parser)]
#[command(
    name = "banach-index",
    version,
    about = "Interval bounds and sphere oracles for Banach-space thickness and thinness indices"
)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a space expression and report its index intervals.
    Analyze { expression: String },
    /// Run a registered experiment against its recorded expectation.
    Oracle {
        /// Experiment name, e.g. lp-basis-thinness (see the catalog in the
        /// long help of this subcommand).
        experiment: String,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Print the deduction rule catalog with citations.
    ListRules,
    /// Print the derivation tree behind an expression's intervals.
    Explain { expression: String },
}

/// Overrides for experiment defaults; expectations stay as registered and
/// are always printed.
#[derive(Args)]
struct ParamArgs {
    /// Witness count / model size.
    #[arg(long)]
    n: Option<usize>,
    /// Block or projection dimension.
    #[arg(long)]
    dim: Option<usize>,
    /// Norm exponent p (>= 1).
    #[arg(long)]
    p: Option<f64>,
    /// Boundary coupling ratio r (> 1).
    #[arg(long)]
    r: Option<f64>,
    /// Grid size / sample count.
    #[arg(long)]
    grid: Option<usize>,
    /// Number of theta values.
    #[arg(long)]
    thetas: Option<usize>,
    /// Random starts per oracle call.
    #[arg(long)]
    multistarts: Option<usize>,
    /// RNG seed (falls back to the BANACH_INDEX_SEED environment variable).
    #[arg(long)]
    seed: Option<u64>,
}

fn resolve_seed(flag: Option<u64>) -> Result<Option<u64>, String> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(SEED_ENV) {
        Ok(raw) => raw
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| format!("{SEED_ENV} must be an unsigned integer, got {raw:?}")),
        Err(_) => Ok(None),
    }
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn emit<T: serde::Serialize>(json: bool, value: &T, text: String) {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(value).expect("report serialization")
        );
    } else {
        print!("{text}");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let ok = e.exit_code() == 0;
            let _ = e.print();
            return ExitCode::from(if ok { 0 } else { 1 });
        }
    };
    match cli.command {
        Command::Analyze { expression } => {
            let expr = match parse(&expression) {
                Ok(e) => e,
                Err(e) => return fail(e),
            };
            let report = match analyze(&expr) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            let out = AnalyzeOutput::from_report(&report);
            emit(cli.json, &out, render_analyze(&out));
            ExitCode::SUCCESS
        }
        Command::Oracle { experiment, params } => {
            let seed = match resolve_seed(params.seed) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            let eparams = ExperimentParams {
                n: params.n,
                dim: params.dim,
                p: params.p,
                r: params.r,
                grid: params.grid,
                thetas: params.thetas,
                multistarts: params.multistarts,
                seed,
            };
            let report = match run_experiment(&experiment, &eparams) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            emit(cli.json, &report, render_experiment(&report));
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Command::ListRules => {
            let rules = rule_outputs();
            emit(cli.json, &rules, render_rules(&rules));
            ExitCode::SUCCESS
        }
        Command::Explain { expression } => {
            let expr = match parse(&expression) {
                Ok(e) => e,
                Err(e) => return fail(e),
            };
            let report = match analyze(&expr) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            let out = ExplainOutput {
                expr: report.expr.to_string(),
                derivations: report.derivations.clone(),
                rendered: explain(&report),
            };
            emit(cli.json, &out, out.rendered.clone());
            ExitCode::SUCCESS
        }
    }
}
