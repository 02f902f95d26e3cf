//! Command-line interface.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid input files, 3 runtime failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::engine::{self, DEFAULT_HORIZON, DEFAULT_PATHS};
use crate::error::Error;
use crate::params::Params;
use crate::report::{self, EnsembleStats, DEFAULT_QUANTILES};
use crate::scenario::{Scenario, ScenarioSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "crisis-sim", version, about = "Monte Carlo simulator for debt and balance-of-payments stress scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run ensembles and write summary tables and plot data.
    Run(RunArgs),
    /// Check parameter and scenario files.
    Validate(ValidateArgs),
    /// Print the zero-shock deterministic path of a scenario.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
#[group(id = "input", required = true, multiple = false)]
struct ScenarioInput {
    /// Single scenario file.
    #[arg(long, group = "input")]
    scenario: Option<PathBuf>,
    /// Scenario-set file listing scenario files.
    #[arg(long = "scenario-set", group = "input")]
    scenario_set: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    input: ScenarioInput,
    /// Parameter file (defaults to the shipped reference calibration).
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_PATHS)]
    paths: u64,
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    horizon: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated quantile levels for the trajectory fan.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_QUANTILES.to_vec())]
    quantiles: Vec<f64>,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    scenario: Vec<PathBuf>,
    #[arg(long = "scenario-set")]
    scenario_set: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    horizon: u32,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    horizon: u32,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Parse { .. } | Error::Validation(_) | Error::EmptyInput(_) => EXIT_VALIDATION,
        Error::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound => EXIT_VALIDATION,
        _ => EXIT_RUNTIME,
    }
}

fn load_params(path: &Option<PathBuf>) -> crate::Result<Params> {
    match path {
        Some(p) => Params::load(p),
        None => {
            let p = Params::reference();
            p.check()?;
            Ok(p)
        }
    }
}

fn load_scenarios(input: &ScenarioInput, horizon: u32) -> crate::Result<Vec<Scenario>> {
    let list = match (&input.scenario, &input.scenario_set) {
        (Some(f), _) => vec![Scenario::from_file(f)?],
        (None, Some(set)) => ScenarioSet::from_file(set)?.load_scenarios()?,
        (None, None) => return Err(Error::EmptyInput("no scenario given")),
    };
    for s in &list {
        s.check(horizon)?;
    }
    Ok(list)
}

fn run(args: &RunArgs, out: &mut dyn Write) -> crate::Result<()> {
    if args.paths == 0 {
        return Err(Error::Config("--paths must be at least 1".into()));
    }
    if args.quantiles.is_empty() || args.quantiles.iter().any(|q| !(0.0..=1.0).contains(q)) {
        return Err(Error::Config("--quantiles must be levels in [0, 1]".into()));
    }
    let params = load_params(&args.params)?;
    let scenarios = load_scenarios(&args.input, args.horizon)?;
    let stats = engine::with_threads(args.threads, || {
        scenarios
            .iter()
            .map(|s| {
                let paths = engine::run_ensemble(s, &params, args.seed, args.paths, args.horizon)?;
                EnsembleStats::from_paths(&paths, &args.quantiles)
            })
            .collect::<crate::Result<Vec<_>>>()
    })??;
    let written = report::emit_all(&stats, &args.out)?;
    for row in report::rank_strategies(&stats.iter().map(|s| s.summary.clone()).collect::<Vec<_>>(), report::RankKey::Debt) {
        let _ = writeln!(
            out,
            "{:<45} GDP {:>8.2}  Debt {:>8.2}  Welfare {:>7.2}  Reserves {:>6.2}  aborted {}",
            row.scenario, row.gdp_med, row.debt_med, row.welfare_med, row.reserves_med, row.n_aborted
        );
    }
    for p in written {
        let _ = writeln!(out, "wrote {}", p.display());
    }
    Ok(())
}

fn validate(args: &ValidateArgs, out: &mut dyn Write) -> crate::Result<()> {
    let mut problems = Vec::new();
    match load_params(&args.params) {
        Ok(_) => {
            let _ = writeln!(out, "params: ok");
        }
        Err(e) => problems.push(format!("params: {e}")),
    }
    let mut files = args.scenario.clone();
    if let Some(set) = &args.scenario_set {
        match ScenarioSet::from_file(set).and_then(|s| s.load_scenarios().map(|_| s)) {
            Ok(s) => files.extend(s.scenarios),
            Err(e) => problems.push(format!("{}: {e}", set.display())),
        }
    }
    for f in &files {
        match Scenario::from_file(f).and_then(|s| s.check(args.horizon)) {
            Ok(()) => {
                let _ = writeln!(out, "{}: ok", f.display());
            }
            Err(e) => problems.push(format!("{}: {e}", f.display())),
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::Config(problems.join("\n")))
    }
}

fn oracle(args: &OracleArgs, out: &mut dyn Write) -> crate::Result<()> {
    let params = load_params(&args.params)?;
    let scenario = match &args.scenario {
        Some(f) => Scenario::from_file(f)?,
        None => Scenario::baseline("baseline"),
    };
    let path = engine::deterministic_path(&scenario, &params, args.horizon)?;
    let names: Vec<&str> = path.trajectory[0].numeric_fields().iter().map(|(n, _)| *n).collect();
    let mut text = format!("t,regime,{}\n", names.join(","));
    for s in &path.trajectory {
        let vals: Vec<String> = s.numeric_fields().iter().map(|(_, x)| format!("{x:e}")).collect();
        text.push_str(&format!("{},{},{}\n", s.t, s.regime, vals.join(",")));
    }
    if let Some(a) = &path.abort {
        text.push_str(&format!("# aborted at quarter {}: {}\n", a.quarter, a.reason));
    }
    out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = out.write_all(rendered.as_bytes());
            } else {
                let _ = err.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let res = match &cli.command {
        Command::Run(a) => run(a, out),
        Command::Validate(a) => validate(a, out),
        Command::Oracle(a) => oracle(a, out),
    };
    match res {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
