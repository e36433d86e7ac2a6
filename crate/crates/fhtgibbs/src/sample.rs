//! Burn-in, annealing and baseline runs over many independent ensembles.

use std::fmt;

use rayon::prelude::*;

use fhtgibbs_core::ais::{ais_run, AisEvent, AisParams, LevelReport};
use fhtgibbs_core::diagnostics::RatioAccumulator;
use fhtgibbs_core::kernels::{run_mala_streams, KernelParams, ScaledTarget};
use fhtgibbs_core::rng::StreamRng;
use fhtgibbs_core::{build_potential, make_schedule, GinzburgLandau, ParticleEnsemble, SeedPath};

use crate::config::{InitMode, RunConfig};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    BurnIn,
    Anneal,
    Baseline,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::BurnIn => "burn_in",
            Phase::Anneal => "anneal",
            Phase::Baseline => "baseline",
        })
    }
}

/// Pooled ratio at one checkpoint. `time` is in unscaled units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TracePoint {
    pub phase: Phase,
    pub time: f64,
    pub iota: f64,
    pub u_plus: f64,
    pub u_minus: f64,
}

#[derive(Clone, Debug)]
pub struct SampleOutput {
    /// Final annealed particles, ensembles concatenated in order.
    pub samples: ParticleEnsemble,
    /// Burn-in followed by annealing checkpoints.
    pub trace: Vec<TracePoint>,
    pub baseline: Option<(ParticleEnsemble, Vec<TracePoint>)>,
    /// Level reports per ensemble.
    pub reports: Vec<Vec<LevelReport>>,
}

type Checkpoints = Vec<(Phase, f64, RatioAccumulator)>;

fn ratio_of(ensemble: &ParticleEnsemble) -> RatioAccumulator {
    let mut acc = RatioAccumulator::new();
    for y in ensemble.iter() {
        acc.push(y);
    }
    acc
}

fn seed_streams(seed: SeedPath, n: usize) -> Vec<StreamRng> {
    (0..n).map(|i| seed.child(i as u64).rng()).collect()
}

/// Stream layout under the master seed: `child(0).child(e)` drives ensemble
/// `e` (initial state, burn-in, annealing); `child(1).child(e)` drives its
/// baseline run.
fn ensemble_seed(cfg: &RunConfig, e: usize) -> SeedPath {
    SeedPath::new(cfg.io.seed).child(0).child(e as u64)
}

fn baseline_seed(cfg: &RunConfig, e: usize) -> SeedPath {
    SeedPath::new(cfg.io.seed).child(1).child(e as u64)
}

fn initial_ensemble(cfg: &RunConfig, seed: SeedPath) -> ParticleEnsemble {
    let (n, d) = (cfg.sampler.particles_per_ensemble, cfg.potential.d);
    match cfg.sampler.init {
        InitMode::AllPlus => ParticleEnsemble::constant(n, d, 1.0),
        InitMode::AllMinus => ParticleEnsemble::constant(n, d, -1.0),
        InitMode::Gaussian => ParticleEnsemble::gaussian(n, d, &mut seed.rng()),
    }
}

/// Plain MALA for `steps` steps with a checkpoint every `every` steps (and
/// at the start). Times are offset by `t0`.
#[allow(clippy::too_many_arguments)]
fn mala_traced(
    ensemble: &mut ParticleEnsemble,
    potential: &GinzburgLandau,
    beta: f64,
    cfg: &RunConfig,
    steps: usize,
    seed: SeedPath,
    phase: Phase,
    t0: f64,
    trace: &mut Checkpoints,
) -> Result<()> {
    let target = ScaledTarget::new(potential, beta)?;
    let kernel = KernelParams::new(cfg.step())?;
    let mut rngs = seed_streams(seed, ensemble.len());
    trace.push((phase, t0, ratio_of(ensemble)));
    let mut done = 0;
    while done < steps {
        let chunk = cfg.sampler.trace_every.min(steps - done);
        run_mala_streams(ensemble, &target, &kernel, chunk, &mut rngs)?;
        done += chunk;
        trace.push((phase, t0 + done as f64 * cfg.sampler.dt, ratio_of(ensemble)));
    }
    Ok(())
}

fn run_ensemble(
    cfg: &RunConfig,
    potential: &GinzburgLandau,
    e: usize,
) -> Result<(ParticleEnsemble, Checkpoints, Vec<LevelReport>)> {
    let s = &cfg.sampler;
    let seed = ensemble_seed(cfg, e);
    let mut ensemble = initial_ensemble(cfg, seed.child(0));
    let mut trace = Checkpoints::new();
    let burn_in = cfg.burn_in_steps();
    mala_traced(
        &mut ensemble,
        potential,
        s.beta0,
        cfg,
        burn_in,
        seed.child(1),
        Phase::BurnIn,
        0.0,
        &mut trace,
    )?;

    let schedule = make_schedule(s.beta0, s.beta, s.levels, cfg.schedule_kind())?;
    let params = AisParams {
        dt: cfg.step(),
        mala_steps: s.mala_steps,
        ula_substeps: cfg.ula_substeps(),
        stretch: s.stretch,
        snooker: s.snooker,
        birth_death: s.birth_death,
        checkpoint_every: s.trace_every,
    };
    let t_start = burn_in as f64 * s.dt;
    let ula_time = params.ula_substeps as f64 * s.dt;
    let level_time = ula_time + s.mala_steps as f64 * s.dt;
    let reports = ais_run(
        &mut ensemble,
        &schedule,
        potential,
        &params,
        seed.child(2),
        |ev| {
            if let AisEvent::Checkpoint {
                level,
                mala_steps_done,
                ensemble,
                ..
            } = ev
            {
                let t = t_start
                    + (level - 1) as f64 * level_time
                    + ula_time
                    + mala_steps_done as f64 * s.dt;
                trace.push((Phase::Anneal, t, ratio_of(ensemble)));
            }
        },
    )?;
    Ok((ensemble, trace, reports))
}

fn run_baseline(
    cfg: &RunConfig,
    potential: &GinzburgLandau,
    e: usize,
) -> Result<(ParticleEnsemble, Checkpoints)> {
    let seed = baseline_seed(cfg, e);
    let mut ensemble = initial_ensemble(cfg, seed.child(0));
    let mut trace = Checkpoints::new();
    mala_traced(
        &mut ensemble,
        potential,
        cfg.sampler.beta,
        cfg,
        cfg.baseline_steps(),
        seed.child(1),
        Phase::Baseline,
        0.0,
        &mut trace,
    )?;
    Ok((ensemble, trace))
}

/// Merges per-ensemble checkpoints position by position, in ensemble order.
fn pool_traces(traces: &[&Checkpoints]) -> Result<Vec<TracePoint>> {
    let Some(first) = traces.first() else {
        return Ok(Vec::new());
    };
    (0..first.len())
        .map(|k| {
            let (phase, time, _) = first[k];
            let mut acc = RatioAccumulator::new();
            for t in traces {
                acc.merge(&t[k].2);
            }
            let r = acc.report()?;
            Ok(TracePoint {
                phase,
                time,
                iota: r.iota,
                u_plus: r.u_plus,
                u_minus: r.u_minus,
            })
        })
        .collect()
}

/// Runs every ensemble on the current rayon pool. The result does not depend
/// on the number of worker threads.
pub fn run_sampler(cfg: &RunConfig, with_baseline: bool) -> Result<SampleOutput> {
    cfg.validate()?;
    let potential = build_potential(cfg.potential_spec())?;
    let n_ens = cfg.sampler.n_ensembles;
    if n_ens * cfg.sampler.particles_per_ensemble == 1 {
        log::warn!("a single particle in total: the run reduces to plain Langevin dynamics");
    }
    log::info!(
        "sampling: {n_ens} ensembles x {} particles, d = {}, burn-in {} steps, {} levels x ({} ULA + {} MALA)",
        cfg.sampler.particles_per_ensemble,
        cfg.potential.d,
        cfg.burn_in_steps(),
        cfg.sampler.levels,
        cfg.ula_substeps(),
        cfg.sampler.mala_steps
    );
    let runs: Vec<_> = (0..n_ens)
        .into_par_iter()
        .map(|e| run_ensemble(cfg, &potential, e))
        .collect::<Result<_>>()?;
    let trace = pool_traces(&runs.iter().map(|r| &r.1).collect::<Vec<_>>())?;
    let samples = ParticleEnsemble::pooled(cfg.potential.d, runs.iter().map(|r| &r.0))?;
    let reports = runs.into_iter().map(|r| r.2).collect();

    let baseline = if with_baseline {
        log::info!(
            "baseline: {} MALA steps at beta = {}",
            cfg.baseline_steps(),
            cfg.sampler.beta
        );
        let runs: Vec<_> = (0..n_ens)
            .into_par_iter()
            .map(|e| run_baseline(cfg, &potential, e))
            .collect::<Result<_>>()?;
        let trace = pool_traces(&runs.iter().map(|r| &r.1).collect::<Vec<_>>())?;
        let samples = ParticleEnsemble::pooled(cfg.potential.d, runs.iter().map(|r| &r.0))?;
        Some((samples, trace))
    } else {
        None
    };
    Ok(SampleOutput {
        samples,
        trace,
        baseline,
        reports,
    })
}

pub fn trace_csv(trace: &[TracePoint]) -> String {
    let mut s = String::from("phase,time,iota,u_plus,u_minus\n");
    for p in trace {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            p.phase, p.time, p.iota, p.u_plus, p.u_minus
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> RunConfig {
        RunConfig::from_toml(
            r#"
            potential.geometry = "chain"
            potential.d = 4
            potential.lambda_factor = 0.1
            sampler.beta0 = 1.0
            sampler.beta = 2.0
            sampler.scale = 4.0
            sampler.levels = 2
            sampler.mala_steps = 30
            sampler.n_ensembles = 3
            sampler.particles_per_ensemble = 5
            sampler.burn_in_time = 0.02
            sampler.trace_every = 10
            "#,
        )
        .unwrap()
    }

    #[test]
    fn trace_times_follow_the_step_budget() {
        let cfg = tiny();
        let out = run_sampler(&cfg, true).unwrap();
        assert_eq!(out.samples.len(), 15);
        let burn: Vec<_> = out
            .trace
            .iter()
            .filter(|p| p.phase == Phase::BurnIn)
            .collect();
        assert_eq!(burn.len(), 1 + 4);
        assert_eq!(burn[0].time, 0.0);
        assert!(burn[0].iota > 0.999);
        let last = out.trace.last().unwrap();
        let s = cfg.ula_substeps();
        let expect = (40 + 2 * (s + 30)) as f64 * cfg.sampler.dt;
        assert!((last.time - expect).abs() < 1e-12);
        // per level: one point after the sequential sweep, three MALA chunks
        assert_eq!(out.trace.len(), 5 + 2 * 4);
        let (bs, bt) = out.baseline.unwrap();
        assert_eq!(bs.len(), 15);
        assert_eq!(bt.len(), 1 + cfg.baseline_steps().div_ceil(10));
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let cfg = tiny();
        let run = |w| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .unwrap()
                .install(|| run_sampler(&cfg, false).unwrap())
        };
        let (a, b) = (run(1), run(3));
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.trace, b.trace);
    }
}
