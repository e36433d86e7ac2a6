use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fhtgibbs::commands::{
    cmd_diagnose, cmd_fit, cmd_pipeline, cmd_sample, MODEL_FILE, SAMPLES_FILE,
};
use fhtgibbs::{CliError, RunConfig};

#[derive(Parser)]
#[command(
    name = "fhtgibbs",
    version,
    about = "Annealed ensemble sampling and FHT density fitting for lattice Gibbs models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Master seed (overrides io.seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, 0 for all cores (overrides io.workers).
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory (overrides io.out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also run plain MALA at the target temperature.
    #[arg(long)]
    baseline: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Burn-in, annealing and optional baseline sampling.
    Sample(Common),
    /// Fit an FHT density to a sample file.
    Fit {
        #[command(flatten)]
        common: Common,
        /// Sample file; defaults to the one in the output directory.
        #[arg(long)]
        samples: Option<PathBuf>,
    },
    /// Ratio, moments, marginals and mode masses.
    /// Without --samples or --model, uses whichever of the two exist in the
    /// output directory.
    Diagnose {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        samples: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Sample, fit and diagnose in one output directory.
    Pipeline(Common),
}

fn load(c: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(&c.config)?;
    if let Some(s) = c.seed {
        cfg.io.seed = s;
    }
    if let Some(w) = c.workers {
        cfg.io.workers = w;
    }
    if let Some(o) = &c.out {
        cfg.io.out = o.clone();
    }
    if c.baseline {
        cfg.sampler.baseline = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sample(c) => cmd_sample(&load(&c)?),
        Command::Fit { common, samples } => {
            let cfg = load(&common)?;
            let samples = samples.unwrap_or_else(|| cfg.io.out.join(SAMPLES_FILE));
            cmd_fit(&cfg, &samples)
        }
        Command::Diagnose {
            common,
            samples,
            model,
        } => {
            let cfg = load(&common)?;
            let (samples, model) = if samples.is_none() && model.is_none() {
                let existing = |name| Some(cfg.io.out.join(name)).filter(|p| p.exists());
                (existing(SAMPLES_FILE), existing(MODEL_FILE))
            } else {
                (samples, model)
            };
            cmd_diagnose(&cfg, samples.as_deref(), model.as_deref())
        }
        Command::Pipeline(c) => cmd_pipeline(&load(&c)?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
