//! Fitting an FHT density to a sample file.

use fhtgibbs_core::fht::{build_tree, FhtModel, FourierBasis};
use fhtgibbs_core::sketch::{sketch_fit, uniform_ranks, FitOutput, FitParams};
use fhtgibbs_core::ParticleEnsemble;

use crate::config::RunConfig;
use crate::error::{CliError, Result};

/// Number of training samples at which the fitted density is recorded.
pub const CHECKPOINTS: usize = 16;

pub fn fit_params(
    cfg: &RunConfig,
) -> Result<(fhtgibbs_core::DimensionTree, FourierBasis, FitParams)> {
    let tree = build_tree(cfg.potential.d, cfg.site_order())?;
    let basis = FourierBasis::new(cfg.fht.q, cfg.fht.half_width)?;
    let params = FitParams {
        ranks: uniform_ranks(&tree, cfg.fht.rank),
        oversampling: cfg.fht.oversampling,
        seed: cfg.fht.sketch_seed,
        svd_tol: cfg.fht.svd_tol,
    };
    Ok((tree, basis, params))
}

pub fn run_fit(
    cfg: &RunConfig,
    samples: &ParticleEnsemble,
    weights: Option<&[f64]>,
) -> Result<FitOutput> {
    if samples.dim() != cfg.potential.d {
        return Err(CliError::Config(format!(
            "sample dimension {} does not match potential.d = {}",
            samples.dim(),
            cfg.potential.d
        )));
    }
    let w = cfg.fht.half_width;
    let outside = samples
        .iter()
        .filter(|x| x.iter().any(|v| v.abs() > w))
        .count();
    if outside > 0 {
        log::warn!(
            "{outside} of {} samples leave the box [-{w}, {w}]",
            samples.len()
        );
    }
    let (tree, basis, params) = fit_params(cfg)?;
    let out = sketch_fit(samples, weights, &tree, &basis, &params)?;
    log::info!(
        "fitted {} samples; effective ranks per edge {:?}",
        out.sample_count,
        out.effective_ranks()
    );
    Ok(out)
}

pub fn ranks_csv(out: &FitOutput, requested: &[usize]) -> String {
    let mut s = String::from("node,requested,effective\n");
    for (k, r) in out.effective_ranks().iter().enumerate() {
        s.push_str(&format!("{},{},{}\n", k + 1, requested[k + 1], r));
    }
    s
}

/// Density values at the first few training samples.
pub fn checkpoints_csv(model: &FhtModel, samples: &ParticleEnsemble) -> Result<String> {
    let mut s = String::from("index,density\n");
    for (k, x) in samples.iter().take(CHECKPOINTS).enumerate() {
        s.push_str(&format!("{},{}\n", k, model.eval(x)?));
    }
    Ok(s)
}
