use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use secalign::Exec;
use secalign_cli::config::{parse_number_list, Command, ExperimentConfig, FileConfig, Overrides};
use secalign_cli::figures::{run_figure1, run_figure2};
use secalign_cli::query::{query, QueryArgs};
use secalign_cli::scaling::run_dof;

/// Environment variable holding the number of worker threads.
const WORKERS_VAR: &str = "SECALIGN_WORKERS";

#[derive(Parser)]
#[command(
    name = "secalign",
    version,
    about = "Ergodic secrecy-rate experiments for the fading MAC wiretap channel"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sum rate of SBA and ESA (on/off policies) and the GS/CJ baseline against SNR.
    Figure1(RunArgs),
    /// ESA with and without power control, ESA/CJ, and the GS/CJ baseline against SNR.
    Figure2(RunArgs),
    /// Sum rate at large powers and the fitted scaling slope.
    Dof(RunArgs),
    /// Rates or power control for a single state.
    Query(QueryCli),
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo samples per point.
    #[arg(long)]
    samples: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated average SNR values in dB.
    #[arg(long = "snr-db", value_name = "LIST")]
    snr_db: Option<String>,
    /// Comma-separated schemes: gs-cj, sba, esa, esa-cj.
    #[arg(long, value_name = "LIST")]
    scheme: Option<String>,
}

#[derive(Args)]
struct QueryCli {
    /// One of gs-cj, sba, esa, esa-cj.
    #[arg(long)]
    scheme: String,
    /// Complex gains, e.g. h1=1+0.5i,h2=0.3,g1=-0.2i,g2=1.
    #[arg(long)]
    state: Option<String>,
    /// Even-slot gains for sba.
    #[arg(long)]
    even: Option<String>,
    /// Effective gains 2|.|^2, e.g. h1=2,h2=1,g1=0.5,g2=0.5.
    #[arg(long)]
    effective: Option<String>,
    /// Multipliers, e.g. l1=0.1,l2=0.2.
    #[arg(long)]
    duals: Option<String>,
    /// Powers, e.g. p1=1,p2=1 (q1, q2 optional).
    #[arg(long)]
    powers: Option<String>,
}

fn resolve(command: Command, args: &RunArgs) -> Result<ExperimentConfig> {
    let file = args.config.as_deref().map(FileConfig::load).transpose()?;
    let flags = Overrides {
        seed: args.seed,
        samples: args.samples,
        out: args.out.clone(),
        snr_db: args
            .snr_db
            .as_deref()
            .map(parse_number_list)
            .transpose()
            .context("--snr-db")?,
        schemes: args
            .scheme
            .as_deref()
            .map(|s| s.split(',').map(|t| t.trim().to_string()).collect()),
    };
    ExperimentConfig::resolve(command, file.as_ref(), &flags)
}

fn configure_workers() -> Result<()> {
    let Ok(value) = std::env::var(WORKERS_VAR) else {
        return Ok(());
    };
    let workers: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|w| *w > 0)
        .with_context(|| format!("{WORKERS_VAR} must be a positive integer, got '{value}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .context("configuring the worker pool")?;
    Ok(())
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    configure_workers()?;
    let exec = Exec::default();
    match cli.command {
        Cmd::Figure1(args) => {
            let config = resolve(Command::Figure1, &args)?;
            emit(config.out.as_ref(), &run_figure1(&config, exec)?)
        }
        Cmd::Figure2(args) => {
            let config = resolve(Command::Figure2, &args)?;
            emit(config.out.as_ref(), &run_figure2(&config, exec)?)
        }
        Cmd::Dof(args) => {
            let config = resolve(Command::Dof, &args)?;
            let report = run_dof(&config, exec)?;
            emit(config.out.as_ref(), &report.csv)?;
            eprint!("{}", report.summary);
            Ok(())
        }
        Cmd::Query(q) => {
            if q.scheme.contains(',') {
                bail!("query takes a single scheme");
            }
            let report = query(&QueryArgs {
                scheme: Some(q.scheme),
                state: q.state,
                even: q.even,
                effective: q.effective,
                duals: q.duals,
                powers: q.powers,
            })?;
            emit(None, &report)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
