use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use scanplan::config::{Config, Strategy};
use scanplan::pipeline::{self, StageError};

#[derive(Parser)]
#[command(name = "scanplan", version, about = "Uncertainty-aware viewpoint and route planning for optical scanning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Planner configuration (TOML).
    #[arg(short, long)]
    config: PathBuf,
    /// Override a config key, e.g. `--set sampler.max_iterations=2000`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Plan and write plan.txt, metrics.txt, heatmap.ply and graph.txt.
    Plan {
        #[command(flatten)]
        common: Common,
        /// Output directory, relative to the working directory.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run several strategies on the same candidates and print a table.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "rrt,baseline")]
        strategies: Vec<Strategy>,
        /// Also write the table to this file.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Plan and write only the colored mesh.
    Heatmap {
        #[command(flatten)]
        common: Common,
        #[arg(short, long, default_value = "heatmap.ply")]
        out: PathBuf,
    },
    /// Check the config and its inputs up to candidate generation.
    ValidateConfig {
        #[command(flatten)]
        common: Common,
    },
}

fn load(common: &Common) -> Result<Config, StageError> {
    Config::load(&common.config, &common.overrides).map_err(|error| StageError { stage: "config", error })
}

fn write(path: &PathBuf, body: &str) -> Result<(), StageError> {
    fs::write(path, body).map_err(|e| StageError {
        stage: "export",
        error: scanplan::PlanError::Io {
            path: path.clone(),
            source: e,
        },
    })
}

fn run(cli: Cli) -> Result<(), StageError> {
    match cli.command {
        Command::Plan { common, out } => {
            let mut cfg = load(&common)?;
            if let Some(out) = out {
                cfg.output.dir = out;
            }
            let a = pipeline::run_pipeline(&cfg)?;
            println!(
                "{}: {} viewpoints, {:.2} s, compliance {:.1}%, written to {}",
                cfg.strategy.as_str(),
                a.metrics.viewpoints,
                a.metrics.total_time,
                100.0 * a.metrics.compliance_ratio(),
                cfg.output.dir.display()
            );
        }
        Command::Compare { common, strategies, out } => {
            let cfg = load(&common)?;
            let (_, table) = pipeline::compare_strategies(&cfg, &strategies)?;
            print!("{table}");
            if let Some(out) = out {
                write(&out, &table)?;
            }
        }
        Command::Heatmap { common, out } => {
            let cfg = load(&common)?;
            write(&out, &pipeline::heatmap(&cfg)?)?;
            println!("heatmap written to {}", out.display());
        }
        Command::ValidateConfig { common } => {
            let cfg = load(&common)?;
            let p = pipeline::prepare(&cfg)?;
            println!(
                "ok: {} triangles, {} measurement points, {} candidates",
                p.mesh.len(),
                p.mps.len(),
                p.candidates.len()
            );
        }
    }
    Ok(())
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
