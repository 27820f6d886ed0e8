//! `lab`: run experiment presets and emit convergence, conditioning, point-set,
//! and spectrum CSV data.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use linnet_core::lab::{self, ExperimentConfig};

#[derive(Parser)]
#[command(name = "lab", about = "Linearized shallow-network experiment runner", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a convergence experiment and print its geometric-mean table.
    Run {
        config: PathBuf,
        /// Directory for per-seed and geometric-mean CSV files.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Restore the full-size quadrature settings from [paper_scale].
        #[arg(long)]
        paper_scale: bool,
    },
    /// Mass-matrix condition numbers over the configured n-sweep.
    Condition {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        paper_scale: bool,
    },
    /// Emit a hidden-parameter point set as CSV.
    Pointset {
        /// Scheme spec, e.g. "circle_grid" or "sphere_scheme:r=4".
        spec: String,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        dimension: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Singular spectrum of the configured system at the largest n.
    Spectrum {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        paper_scale: bool,
    },
}

fn load_config(path: &PathBuf) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    ExperimentConfig::from_toml(&text)
        .with_context(|| format!("parsing config {}", path.display()))
}

fn emit(out: Option<&PathBuf>, name: &str, csv: &str) -> Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(name);
            std::fs::write(&path, csv)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            out,
            paper_scale,
        } => {
            let cfg = load_config(&config)?;
            let output = lab::run(&cfg, paper_scale)?;
            if let Some(dir) = &out {
                for (seed, _) in &output.per_seed {
                    let csv = output.seed_csv(*seed).expect("seed table exists");
                    emit(Some(dir), &format!("{}_seed{}.csv", output.name, seed), &csv)?;
                }
            }
            emit(out.as_ref(), &format!("{}.csv", output.name), &output.geomean_csv())?;
        }
        Command::Condition {
            config,
            out,
            paper_scale,
        } => {
            let cfg = load_config(&config)?;
            let study = lab::condition_study(&cfg, paper_scale)?;
            emit(out.as_ref(), &format!("{}_cond.csv", study.name), &study.csv())?;
        }
        Command::Pointset {
            spec,
            n,
            dimension,
            seed,
            out,
        } => {
            let csv = lab::pointset_csv(&spec, n, dimension, seed)?;
            emit(out.as_ref(), "pointset.csv", &csv)?;
        }
        Command::Spectrum {
            config,
            out,
            paper_scale,
        } => {
            let cfg = load_config(&config)?;
            let csv = lab::spectrum(&cfg, paper_scale)?;
            emit(
                out.as_ref(),
                &format!("{}_spectrum.csv", cfg.experiment.name),
                &csv,
            )?;
        }
    }
    Ok(())
}
