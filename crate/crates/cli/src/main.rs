mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{flag_source, read_config_file, RunConfig, Sources};
use error::CliError;

#[derive(Parser)]
#[command(
    name = "tplab",
    version,
    about = "Tempered fractional Gaussian processes: curves, paths, estimates, validation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a covariance curve as CSV (t, value). Without --s, reduced
    /// families give the variance and stationary ones C(t).
    Cov(Flags),
    /// Sample paths as JSON lines.
    Sample(Flags),
    /// Run estimators over a path file.
    Estimate(Flags),
    /// Run a validation suite and write a JSON report.
    Validate(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// key = value file, or a previous JSON report to re-run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// fou | tfbm | mixed | tfbm2 | tmbm | tfgn
    #[arg(long)]
    process: Option<String>,
    /// Index α; comma-separated for mixed.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    /// Tempering rate; one value or one per α for mixed.
    #[arg(long)]
    lambda: Option<String>,
    /// Mixture weights, comma-separated.
    #[arg(long)]
    weights: Option<String>,
    /// JSON file with an index profile for tmbm.
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    t0: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    paths: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// specfun | oracle | identities | scaling | asymptotics | tmbm-equivalence | mc | all
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// Second time argument for cov.
    #[arg(long)]
    s: Option<String>,
    /// FOU and TFBM curves at s = 0.5, λ = 0.5, H = 0.75.
    #[arg(long)]
    figure1: bool,
    /// exact | spectral
    #[arg(long)]
    method: Option<String>,
    /// Path file for estimate.
    #[arg(long)]
    input: Option<String>,
    /// variogram | hurst | dimension | windowed | plateau | all
    #[arg(long)]
    estimator: Option<String>,
    #[arg(long)]
    t_index: Option<String>,
    #[arg(long)]
    lags: Option<String>,
    #[arg(long)]
    tau_steps: Option<String>,
    #[arg(long)]
    window: Option<String>,
    /// Tolerance override GROUP=VALUE; repeatable.
    #[arg(long = "tol", value_name = "GROUP=VALUE")]
    tol: Vec<String>,
}

impl Flags {
    fn pairs(&self) -> Result<Vec<(String, String)>, CliError> {
        let mut v = Vec::new();
        let mut put = |k: &str, x: &Option<String>| {
            if let Some(x) = x {
                v.push((k.to_string(), x.clone()));
            }
        };
        put("process", &self.process);
        put("alpha", &self.alpha);
        put("beta", &self.beta);
        put("lambda", &self.lambda);
        put("weights", &self.weights);
        put("profile", &self.profile);
        put("t0", &self.t0);
        put("dt", &self.dt);
        put("n", &self.n);
        put("paths", &self.paths);
        put("seed", &self.seed);
        put("suite", &self.suite);
        put("out", &self.out);
        put("s", &self.s);
        put("method", &self.method);
        put("input", &self.input);
        put("estimator", &self.estimator);
        put("t_index", &self.t_index);
        put("lags", &self.lags);
        put("tau_steps", &self.tau_steps);
        put("window", &self.window);
        if self.figure1 {
            v.push(("figure1".into(), "true".into()));
        }
        for t in &self.tol {
            let (g, x) = t
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--tol expects GROUP=VALUE, got '{t}'")))?;
            v.push((format!("tol.{g}"), x.to_string()));
        }
        Ok(v)
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("TPLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("TPLAB_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let (Command::Cov(flags) | Command::Sample(flags) | Command::Estimate(flags) | Command::Validate(flags)) =
        &cli.command;
    let mut sources = match &flags.config {
        Some(path) => read_config_file(path)?,
        None => Sources::default(),
    };
    sources.flags.extend(flag_source(flags.pairs()?));
    let echo = RunConfig::resolve(sources)?;
    match cli.command {
        Command::Cov(_) => commands::cov(&echo),
        Command::Sample(_) => commands::sample(&echo),
        Command::Estimate(_) => commands::estimate(&echo),
        Command::Validate(_) => commands::validate(&echo),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::ValidationFailed(..)) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
