use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use codedspline::adversary::Strategy;
use codedspline::codec::choose_lambda_d;
use codedspline::error::Error;
use codedspline::experiments::{
    fit_slope, loglog_path, read_csv, run_sweep, validate, write_loglog, ExperimentConfig, Suite,
};
use codedspline::simulation::{registry_get, run_repeated, RepeatSpec};

const EXIT_CONFIG: u8 = 2;
const EXIT_VALIDATION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "codedspline",
    version,
    about = "Coded computing with smoothing splines under adversarial workers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep over N and write one CSV row per N.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_path` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the log-log slope of a sweep CSV.
    Slope {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Run a validation suite: splines, kernels, norms, impossibility or all.
    Validate {
        #[arg(long)]
        suite: String,
    },
    /// Run the pipeline for one configuration and print the result as JSON.
    Run {
        #[arg(long)]
        function: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        gamma: usize,
        #[arg(long, default_value = "cluster_max")]
        strategy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Decoder smoothing parameter; defaults to the rule with exponent `a`.
        #[arg(long)]
        lambda_d: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        j: f64,
        #[arg(long, default_value_t = 1)]
        repetitions: usize,
    },
}

enum Failure {
    Config(String),
    Validation(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. }
            | Error::NotFound(_)
            | Error::Unsupported(_)
            | Error::InvalidExponent(_)
            | Error::InvalidLambda(_)
            | Error::InvalidTask(_)
            | Error::BudgetExceeded { .. } => Failure::Config(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("validation failed: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Sweep { config, out } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let path = out.or_else(|| cfg.output_path.clone());
            let rows = run_sweep(&cfg, path.as_deref())?;
            for r in &rows {
                println!("{}", r.to_csv());
            }
            if let Some(path) = path {
                if rows.len() >= 3 {
                    let fit = fit_slope(&rows)?;
                    write_loglog(&loglog_path(&path), &rows, &fit)?;
                    println!("slope {:.4} (r^2 = {:.4})", fit.slope, fit.r_squared);
                }
            }
            Ok(())
        }
        Command::Slope { input } => {
            let rows = read_csv(&input)?;
            let fit = fit_slope(&rows)?;
            println!(
                "{}",
                json!({ "slope": fit.slope, "intercept": fit.intercept, "r_squared": fit.r_squared })
            );
            Ok(())
        }
        Command::Validate { suite } => {
            let suite: Suite = suite.parse()?;
            let report = validate(suite)?;
            print!("{report}");
            if report.pass() {
                Ok(())
            } else {
                let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
                Err(Failure::Validation(names.join(", ")))
            }
        }
        Command::Run {
            function,
            n,
            k,
            gamma,
            strategy,
            seed,
            lambda_d,
            a,
            j,
            repetitions,
        } => {
            let f = registry_get(&function)?;
            let strategy: Strategy = strategy.parse()?;
            let lambda_d = match lambda_d {
                Some(l) => l,
                None => choose_lambda_d(n, a, j, 1.0)?,
            };
            let spec = RepeatSpec {
                function: f,
                k,
                n,
                gamma,
                strategy,
                delta: 1.0,
                lambda_d,
                lambda_e: 0.0,
                sort_inputs: true,
            };
            let rep = run_repeated(&spec, repetitions, seed)?;
            let first = &rep.results[0];
            let out = json!({
                "function": function,
                "N": n,
                "K": k,
                "gamma": gamma,
                "strategy": strategy.name(),
                "seed": seed,
                "lambda_d": lambda_d,
                "repetitions": repetitions,
                "mean_error": rep.mean,
                "stddev": rep.stddev,
                "estimates": first.estimates,
                "truth": first.truth,
                "corrupted": first.corrupted,
                "sup_error": first.sup_error,
            });
            println!("{}", serde_json::to_string_pretty(&out).expect("json"));
            Ok(())
        }
    }
}
