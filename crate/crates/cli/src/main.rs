use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::info;

use amts_core::harness::{
    experiment_error_vs_work, experiment_mts_vs_stale, run_scenario, write_csv, Scenario, WorkMethod,
};
use amts_core::model1d::{beta_sweep, exact_solution, SweepConfig};
use amts_core::Error;

#[derive(Parser)]
#[command(name = "amts", version, about = "Space-charge integrators: scenario runs and experiments")]
struct Cli {
    /// Override the bunch seed of the scenario.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for independent experiment runs (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Only report errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario; writes diagnostics.csv and trace.csv.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Error of adaptive Verlet on the 1D model problem against the Sundman exponent.
    SweepBeta {
        #[arg(long)]
        out: PathBuf,
    },
    /// Final emittance error against self-solve budget.
    ErrorVsWork {
        #[arg(long)]
        config: PathBuf,
        /// Comma separated: mts, amts-beta-<beta>, amts-beam-size.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// MTS against Boris-Buneman with stale self fields.
    MtsVsStale {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the exact state of the 1D model problem at time t.
    Oracle1d {
        #[arg(long, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long, allow_hyphen_values = true)]
        v0: f64,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
}

fn load(config: &Path, seed: Option<u64>) -> amts_core::Result<Scenario> {
    let mut scenario = Scenario::load(config)?;
    if let Some(seed) = seed {
        scenario.bunch.seed = seed;
    }
    Ok(scenario)
}

fn execute(cli: Cli) -> amts_core::Result<()> {
    match cli.command {
        Command::Run { config, out } => {
            let scenario = load(&config, cli.seed)?;
            let result = run_scenario(&scenario)?;
            result.write(&out)?;
            info!(
                "{} outer steps, {} self-field solves; wrote {}",
                result.trace.records.len(),
                result.self_solves,
                out.display()
            );
        }
        Command::SweepBeta { out } => {
            let rows = beta_sweep(&SweepConfig::default())?;
            std::fs::create_dir_all(&out)?;
            write_csv(&out.join("beta_sweep.csv"), &rows)?;
            info!("{} sweep rows written to {}", rows.len(), out.display());
        }
        Command::ErrorVsWork { config, methods, out } => {
            let scenario = load(&config, cli.seed)?;
            let methods = match methods {
                None => WorkMethod::all(),
                Some(names) => names
                    .iter()
                    .map(|n| {
                        WorkMethod::parse(n).ok_or_else(|| Error::InvalidConfig(format!("unknown method `{n}`")))
                    })
                    .collect::<amts_core::Result<_>>()?,
            };
            let report = experiment_error_vs_work(&scenario, &methods)?;
            report.write(&out)?;
            info!("{} runs written to {}", report.runs.len() + 1, out.display());
        }
        Command::MtsVsStale { config, out } => {
            let scenario = load(&config, cli.seed)?;
            let report = experiment_mts_vs_stale(&scenario)?;
            report.write(&out)?;
            info!("{} runs written to {}", report.runs.len() + 1, out.display());
        }
        Command::Oracle1d { x0, v0, t } => {
            let s = exact_solution(x0, v0, t)?;
            println!("x,v,t\n{},{},{}", s.x, s.v, s.t);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { log::LevelFilter::Error } else { log::LevelFilter::Info };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
