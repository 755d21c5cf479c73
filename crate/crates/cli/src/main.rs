//! `qogsim`: run, fit and check the cognition circuit scenarios.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use qogsim_core::report::{self, RunMode, RunOptions, DEFAULT_SHOTS};
use qogsim_core::scenario::ScenarioSpec;
use qogsim_core::verify::{run_suite, CheckOutcome, Suite};
use qogsim_core::Error;

#[derive(Parser, Debug)]
#[command(name = "qogsim", version, about = "Quantum-cognition circuit scenarios on a state-vector simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a scenario's circuits, run them and report model vs observed rates
    Run(RunArgs),
    /// Fit a scenario's free angle to its observed target
    Fit {
        scenario: PathBuf,
        /// Parameter to fit; defaults to the scenario's own
        #[arg(long)]
        parameter: Option<String>,
        /// Store the fitted value back into the scenario file
        #[arg(long)]
        write: bool,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Run the built-in model checks
    Verify {
        #[arg(value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        /// Shots per circuit for the sampled checks
        #[arg(long, default_value_t = DEFAULT_SHOTS)]
        shots: u64,
    },
    /// Print a scenario's circuits in the text format
    EmitCircuit {
        scenario: PathBuf,
        /// Write to this file instead of stdout
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    scenario: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    shots: u64,
    #[arg(long, env = "QOGSIM_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Also write the circuits that were run, in the text format
    #[arg(long, value_name = "PATH")]
    emit_circuit: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Exact,
    Sample,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SuiteArg {
    Classical,
    Order,
    Disjunction,
    All,
}

/// Everything `run` needs, after defaults and the seed fallback are applied.
#[derive(Debug, Clone, PartialEq)]
struct RunConfig {
    scenario_path: PathBuf,
    options: RunOptions,
    output_format: Format,
    emit_circuit: Option<PathBuf>,
}

impl From<RunArgs> for RunConfig {
    fn from(args: RunArgs) -> Self {
        let mode = match args.mode {
            Mode::Exact => RunMode::Exact,
            Mode::Sample => RunMode::Sample,
        };
        RunConfig {
            scenario_path: args.scenario,
            options: RunOptions { mode, shots: args.shots, seed: args.seed },
            output_format: args.format,
            emit_circuit: args.emit_circuit,
        }
    }
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Io { path: path.clone(), message: e.to_string() })
}

fn cmd_run(config: RunConfig) -> Result<(), Error> {
    let spec = ScenarioSpec::load(&config.scenario_path)?;
    let report = report::run(&spec, config.options)?;
    if let Some(path) = &config.emit_circuit {
        write_file(path, &report::emit_circuits(&spec)?)?;
    }
    let text = match config.output_format {
        Format::Table => report.to_table(),
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    print!("{text}");
    Ok(())
}

fn cmd_fit(path: PathBuf, parameter: Option<String>, write: bool, format: Format) -> Result<(), Error> {
    let mut spec = ScenarioSpec::load(&path)?;
    let fit = spec.fit(parameter.as_deref()).inspect_err(|e| {
        // the closed-form solver reports a cosine, not the range
        if matches!(e, Error::InfeasibleTarget { .. }) {
            if let Ok((min, max)) = spec.attainable_range(spec.kind.parameter().0) {
                eprintln!("attainable range: [{min}, {max}]");
            }
        }
    })?;
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&fit).expect("fit serializes")),
        Format::Csv => {
            println!("parameter_name,value,residual,method,evaluations");
            println!("{},{},{},{},{}", fit.parameter_name, fit.value, fit.residual, fit.method, fit.evaluations);
        }
        Format::Table => println!(
            "{} = {:.4} ({}), residual {:.2e}, {} evaluations",
            fit.parameter_name, fit.value, fit.method, fit.residual, fit.evaluations
        ),
    }
    if write {
        spec.set_parameter(fit.value);
        spec.save(&path)?;
    }
    Ok(())
}

fn print_outcome(outcome: &CheckOutcome) {
    println!(
        "{} {} / {} ({:.3}s): {}",
        if outcome.passed { "PASS" } else { "FAIL" },
        outcome.suite,
        outcome.name,
        outcome.seconds,
        outcome.detail
    );
}

fn cmd_verify(suite: SuiteArg, shots: u64) -> Result<bool, Error> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let suites = match suite {
        SuiteArg::Classical => vec![Suite::Classical],
        SuiteArg::Order => vec![Suite::Order],
        SuiteArg::Disjunction => vec![Suite::Disjunction],
        SuiteArg::All => Suite::ALL.to_vec(),
    };
    let start = Instant::now();
    let outcomes: Vec<CheckOutcome> = std::thread::scope(|scope| {
        let handles: Vec<_> = suites.iter().map(|&s| scope.spawn(move || run_suite(s, shots))).collect();
        handles.into_iter().flat_map(|h| h.join().expect("check thread panicked")).collect()
    });
    for outcome in &outcomes {
        print_outcome(outcome);
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("{passed}/{} checks passed in {:.3}s", outcomes.len(), start.elapsed().as_secs_f64());
    Ok(passed == outcomes.len())
}

fn cmd_emit(path: PathBuf, output: Option<PathBuf>) -> Result<(), Error> {
    let text = report::emit_circuits(&ScenarioSpec::load(&path)?)?;
    match output {
        Some(out) => write_file(&out, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args.into()).map(|_| true),
        Command::Fit { scenario, parameter, write, format } => {
            cmd_fit(scenario, parameter, write, format).map(|_| true)
        }
        Command::Verify { suite, shots } => cmd_verify(suite, shots),
        Command::EmitCircuit { scenario, output } => cmd_emit(scenario, output).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
