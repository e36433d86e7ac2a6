//! Subcommands: each reads its inputs, runs on a dedicated thread pool and
//! writes its outputs plus a manifest into the output directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use fhtgibbs_core::FhtModel;

use crate::config::RunConfig;
use crate::diagnose::run_diagnose;
use crate::error::{CliError, Result};
use crate::fit::{checkpoints_csv, fit_params, ranks_csv, run_fit};
use crate::formats::{decode_model, decode_samples, encode_model, encode_samples, SampleSet};
use crate::sample::{run_sampler, trace_csv};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const SAMPLES_FILE: &str = "samples.gls";
pub const BASELINE_SAMPLES_FILE: &str = "baseline_samples.gls";
pub const TRACE_FILE: &str = "trace.csv";
pub const BASELINE_TRACE_FILE: &str = "baseline_trace.csv";
pub const LEVELS_FILE: &str = "levels.csv";
pub const MODEL_FILE: &str = "model.fht";
pub const RANKS_FILE: &str = "ranks.csv";
pub const CHECKPOINTS_FILE: &str = "checkpoints.csv";
pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'a str,
    command: &'a str,
    config: &'a RunConfig,
}

pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

fn write(dir: &Path, name: &str, bytes: impl AsRef<[u8]>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| CliError::io(path, e))
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

pub fn read_samples(path: &Path) -> Result<SampleSet> {
    decode_samples(&read(path)?).map_err(|source| CliError::Format {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_model(path: &Path) -> Result<FhtModel> {
    decode_model(&read(path)?).map_err(|source| CliError::Format {
        path: path.to_path_buf(),
        source,
    })
}

fn prepare(cfg: &RunConfig, command: &str) -> Result<PathBuf> {
    cfg.validate()?;
    let dir = cfg.io.out.clone();
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let manifest = Manifest {
        version: VERSION,
        command,
        config: cfg,
    };
    let text = toml::to_string(&manifest).expect("manifest serializes");
    write(&dir, MANIFEST_FILE, text)?;
    Ok(dir)
}

pub fn cmd_sample(cfg: &RunConfig) -> Result<()> {
    let dir = prepare(cfg, "sample")?;
    sample_into(cfg, &dir)
}

fn sample_into(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let out = with_workers(cfg.io.workers, || run_sampler(cfg, cfg.sampler.baseline))??;
    write(dir, SAMPLES_FILE, encode_samples(&out.samples, None))?;
    write(dir, TRACE_FILE, trace_csv(&out.trace))?;
    let mut levels =
        String::from("ensemble,level,beta,snooker_accepted,kills,duplications,mala_acceptance\n");
    for (e, reps) in out.reports.iter().enumerate() {
        for r in reps {
            levels.push_str(&format!(
                "{e},{},{},{},{},{},{}\n",
                r.level, r.beta, r.snooker_accepted, r.kills, r.duplications, r.mala_acceptance
            ));
        }
    }
    write(dir, LEVELS_FILE, levels)?;
    if let Some(p) = out.trace.last() {
        log::info!("final ratio {:.4} at time {:.3}", p.iota, p.time);
    }
    if let Some((samples, trace)) = &out.baseline {
        write(dir, BASELINE_SAMPLES_FILE, encode_samples(samples, None))?;
        write(dir, BASELINE_TRACE_FILE, trace_csv(trace))?;
        if let Some(p) = trace.last() {
            log::info!("baseline final ratio {:.4} at time {:.3}", p.iota, p.time);
        }
    }
    Ok(())
}

pub fn cmd_fit(cfg: &RunConfig, samples: &Path) -> Result<()> {
    let dir = prepare(cfg, "fit")?;
    fit_into(cfg, samples, &dir)
}

fn fit_into(cfg: &RunConfig, samples: &Path, dir: &Path) -> Result<()> {
    let set = read_samples(samples)?;
    let out = with_workers(cfg.io.workers, || {
        run_fit(cfg, &set.samples, set.weights.as_deref())
    })??;
    write(dir, MODEL_FILE, encode_model(&out.model))?;
    let (_, _, params) = fit_params(cfg)?;
    write(dir, RANKS_FILE, ranks_csv(&out, &params.ranks))?;
    write(
        dir,
        CHECKPOINTS_FILE,
        checkpoints_csv(&out.model, &set.samples)?,
    )?;
    Ok(())
}

pub fn cmd_diagnose(cfg: &RunConfig, samples: Option<&Path>, model: Option<&Path>) -> Result<()> {
    let dir = prepare(cfg, "diagnose")?;
    diagnose_into(cfg, samples, model, &dir)
}

fn diagnose_into(
    cfg: &RunConfig,
    samples: Option<&Path>,
    model: Option<&Path>,
    dir: &Path,
) -> Result<()> {
    let samples = samples.map(read_samples).transpose()?;
    let model = model.map(read_model).transpose()?;
    let tables = with_workers(cfg.io.workers, || {
        run_diagnose(cfg, samples.as_ref().map(|s| &s.samples), model.as_ref())
    })??;
    for (name, text) in tables {
        write(dir, &name, text)?;
    }
    Ok(())
}

/// Sample, fit and diagnose into one directory.
pub fn cmd_pipeline(cfg: &RunConfig) -> Result<()> {
    let dir = prepare(cfg, "pipeline")?;
    sample_into(cfg, &dir)?;
    let samples = dir.join(SAMPLES_FILE);
    fit_into(cfg, &samples, &dir)?;
    diagnose_into(cfg, Some(&samples), Some(&dir.join(MODEL_FILE)), &dir)
}
