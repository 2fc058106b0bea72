use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sptchain::config::ExperimentConfig;
use sptchain::experiment::{
    exact_csv, recompile_csv, run_exact, run_recompile, run_sweep, run_trajectory, sample_dump,
    sweep_csv, trajectory_csv, write_atomic, DEFAULT_SWEEP_VALUES,
};
use sptchain::noise::SweepParam;
use sptchain::{Result, SimError};

/// Adiabatic preparation of symmetry-protected topological phases on a simulated spin chain.
#[derive(Parser)]
#[command(name = "sptchain", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// First of the consecutive sampling seeds, replacing the configured ones.
    #[arg(long)]
    seed: Option<u64>,
    /// Keep shots outside the alternating-state magnetization sector.
    #[arg(long)]
    no_postselect: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Ground-state string orders and occupancies.
    Exact(Common),
    /// Shot-sampled string orders at every step boundary of the preparation path.
    Trajectory(Common),
    /// Final-state string order trajectories while one noise parameter varies.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// theta, zeta, chi, gamma or phi; theta values are offsets from pi/4.
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated values; defaults to 0,0.05,0.1,0.2.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        values: Option<Vec<f64>>,
    },
    /// Fit the brick-layer ansatz to every trajectory state.
    Recompile {
        #[command(flatten)]
        common: Common,
        /// Directory receiving one circuit file per trajectory point.
        #[arg(long)]
        circuits: Option<PathBuf>,
    },
    /// Dump measured bitstrings of one state.
    SampleDump {
        #[command(flatten)]
        common: Common,
        /// Trajectory point to sample; the last one by default.
        #[arg(long)]
        step: Option<usize>,
    },
}

fn load(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::from_path(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.reseed(seed);
    }
    Ok(cfg)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Exact(c) => emit(c.out.as_deref(), &exact_csv(&run_exact(&load(&c)?)?)),
        Command::Trajectory(c) => emit(
            c.out.as_deref(),
            &trajectory_csv(&run_trajectory(&load(&c)?, !c.no_postselect)?),
        ),
        Command::Sweep {
            common,
            param,
            values,
        } => {
            let values = values.unwrap_or_else(|| DEFAULT_SWEEP_VALUES.to_vec());
            if values.is_empty() {
                return Err(SimError::Config("--values needs at least one value".into()));
            }
            emit(
                common.out.as_deref(),
                &sweep_csv(&run_sweep(&load(&common)?, param, &values)?),
            )
        }
        Command::Recompile { common, circuits } => {
            let points = run_recompile(&load(&common)?)?;
            if let Some(dir) = circuits {
                std::fs::create_dir_all(&dir)?;
                for (m, (_, c)) in points.iter().enumerate() {
                    write_atomic(&dir.join(format!("point_{m:02}.txt")), &c.to_text())?;
                }
            }
            emit(common.out.as_deref(), &recompile_csv(&points))
        }
        Command::SampleDump { common, step } => {
            let shots = sample_dump(&load(&common)?, step, !common.no_postselect)?;
            emit(common.out.as_deref(), &shots.to_text())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
