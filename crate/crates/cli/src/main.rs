//! `catgrav`: figure data, the sensitivity table, sweeps and damping budgets.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use catgrav::config::ExperimentConfig;
use catgrav::experiments::{self, default_config, run_damping, run_figure, run_sweep, run_table1, FigureId};
use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "catgrav", version, about = "Mechanical-qubit gravimetry: figure data, tables and sweeps")]
struct Cli {
    /// Worker threads for sweep points.
    #[arg(long, global = true, env = "CATGRAV_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the CSV datasets and JSON sidecar of one figure.
    Figure {
        #[arg(long, value_parser = parse_figure)]
        id: FigureId,
        /// Flat TOML config; defaults to the figure's built-in axes.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the sensitivity comparison table.
    Table1 {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Print JSON rows instead of the text table.
        #[arg(long)]
        json: bool,
    },
    /// Evaluate `sweep_quantity` over the configured axes.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; the CSV goes to stdout when neither this nor
        /// `output` in the config is set.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the gas and blackbody damping budget as JSON.
    Damping {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the built-in oracle checks.
    Selftest,
}

fn parse_figure(s: &str) -> Result<FigureId, String> {
    s.parse().map_err(|e: catgrav::Error| e.to_string())
}

fn load(path: &Path) -> catgrav::Result<ExperimentConfig> {
    ExperimentConfig::from_path(path)
}

fn out_dir(flag: Option<PathBuf>, cfg: &ExperimentConfig) -> Option<PathBuf> {
    flag.or_else(|| cfg.output.clone())
}

fn run(cli: Cli) -> catgrav::Result<bool> {
    if let Some(jobs) = cli.jobs {
        experiments::set_jobs(jobs)?;
    }
    match cli.command {
        Command::Figure { id, config, out } => {
            let cfg = match config {
                Some(path) => load(&path)?,
                None => default_config(id),
            };
            let dir = out_dir(out, &cfg).unwrap_or_else(|| PathBuf::from("out"));
            let output = run_figure(id, &cfg)?;
            for path in output.write(&dir)? {
                println!("{}", path.display());
            }
        }
        Command::Table1 { config, json } => {
            let cfg = match config {
                Some(path) => load(&path)?,
                None => ExperimentConfig::default(),
            };
            let table = run_table1(&cfg)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&table.rows)?);
            } else {
                print!("{}", table.text);
            }
        }
        Command::Sweep { config, out } => {
            let cfg = load(&config)?;
            let output = run_sweep(&cfg)?;
            match out_dir(out, &cfg) {
                Some(dir) => {
                    for path in output.write(&dir)? {
                        println!("{}", path.display());
                    }
                }
                None => print!("{}", output.datasets[0].to_csv()),
            }
        }
        Command::Damping { config } => {
            let cfg = load(&config)?;
            let report = run_damping(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Selftest => {
            let checks = experiments::selftest();
            let mut all = true;
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                all &= c.passed;
            }
            return Ok(all);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 3 })
        }
    }
}
