//! Ensemble annealed importance sampling: snooker exploration, birth-death
//! reweighting, the composite level-by-level driver, and classical weighted
//! AIS.

use alloc::vec::Vec;

use rand::Rng;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::ensemble::ParticleEnsemble;
use crate::error::{check_dim, Error, Result};
use crate::kernels::{mala_run, run_mala_streams, ula_run, KernelParams, ScaledTarget};
use crate::potential::Potential;
use crate::rng::{SeedPath, StreamRng};
use crate::schedule::AnnealingSchedule;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnookerOutcome {
    pub anchor: usize,
    pub r: f64,
    pub log_accept: f64,
    pub accepted: bool,
}

/// Draws `z` on `[1/a, a]` with density proportional to `1/sqrt(z)`.
pub fn sample_stretch<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    let s = (a - 1.0) * u + 1.0;
    s * s / a
}

/// `min(0, (d - 1) ln r - U(y) + U(x))`; `-inf` if `U(y)` is not finite.
pub fn snooker_log_accept(dim: usize, r: f64, u_proposal: f64, u_current: f64) -> f64 {
    if !u_proposal.is_finite() {
        return f64::NEG_INFINITY;
    }
    let jac = if dim > 1 {
        (dim - 1) as f64 * r.abs().ln()
    } else {
        0.0
    };
    let v = jac - u_proposal + u_current;
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v.min(0.0)
    }
}

fn other_index<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> usize {
    let j = rng.random_range(0..n - 1);
    if j >= k {
        j + 1
    } else {
        j
    }
}

/// Core of the snooker move with all randomness supplied. `u_current` is
/// `U(x_k)`; returns `U` at the resulting state alongside the outcome.
fn snooker_apply<U: Potential + ?Sized>(
    ensemble: &mut ParticleEnsemble,
    k: usize,
    anchor: usize,
    r: f64,
    accept_u: f64,
    target: &U,
    u_current: f64,
) -> (SnookerOutcome, f64) {
    let d = ensemble.dim();
    let proposal: Vec<f64> = ensemble
        .particle(anchor)
        .iter()
        .zip(ensemble.particle(k))
        .map(|(&a, &x)| (1.0 - r) * a + r * x)
        .collect();
    let u_prop = target.value(&proposal);
    let log_accept = snooker_log_accept(d, r, u_prop, u_current);
    let accepted =
        log_accept >= 0.0 || (log_accept > f64::NEG_INFINITY && accept_u.ln() < log_accept);
    let outcome = SnookerOutcome {
        anchor,
        r,
        log_accept,
        accepted,
    };
    if accepted {
        ensemble.particle_mut(k).copy_from_slice(&proposal);
        (outcome, u_prop)
    } else {
        (outcome, u_current)
    }
}

/// Snooker move of particle `k` with a given anchor, line parameter `r`, and
/// acceptance uniform.
pub fn snooker_move_with<U: Potential + ?Sized>(
    ensemble: &mut ParticleEnsemble,
    k: usize,
    anchor: usize,
    r: f64,
    accept_u: f64,
    target: &U,
) -> Result<SnookerOutcome> {
    check_dim(target.dim(), ensemble.dim())?;
    let n = ensemble.len();
    for idx in [k, anchor] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, dim: n });
        }
    }
    let u_current = target.value(ensemble.particle(k));
    Ok(snooker_apply(ensemble, k, anchor, r, accept_u, target, u_current).0)
}

/// Snooker move of particle `k` along the line through a uniformly chosen
/// other particle, with the line parameter from the stretch distribution.
/// Returns `None` (and logs) when the ensemble has fewer than two particles.
pub fn snooker_move<U: Potential + ?Sized, R: Rng + ?Sized>(
    ensemble: &mut ParticleEnsemble,
    k: usize,
    target: &U,
    stretch: f64,
    rng: &mut R,
) -> Result<Option<SnookerOutcome>> {
    let n = ensemble.len();
    if n < 2 {
        log::warn!("snooker move skipped: ensemble has {n} particle(s)");
        return Ok(None);
    }
    let anchor = other_index(n, k, rng);
    let r = sample_stretch(stretch, rng);
    let accept_u: f64 = rng.random();
    snooker_move_with(ensemble, k, anchor, r, accept_u, target).map(Some)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BirthDeath {
    Unchanged,
    /// `victim` was overwritten by a copy of `source`.
    Killed {
        victim: usize,
        source: usize,
    },
    /// `source` was copied over `victim`.
    Duplicated {
        source: usize,
        victim: usize,
    },
}

/// `1 - exp(-excess / levels)`, the kill (or duplication) probability for a
/// rate excess `|gamma_k - mean gamma|`.
pub fn event_probability(excess: f64, levels: usize) -> f64 {
    -(-excess.abs() / levels as f64).exp_m1()
}

/// Birth-death step on `energies[j] = V(x_j)` with rates `rate_scale * V`.
/// Keeps `energies` in sync with the ensemble.
fn birth_death_cached<R: Rng + ?Sized>(
    ensemble: &mut ParticleEnsemble,
    energies: &mut [f64],
    rate_scale: f64,
    k: usize,
    levels: usize,
    rng: &mut R,
) -> BirthDeath {
    let n = ensemble.len();
    let mean = energies.iter().sum::<f64>() / n as f64;
    let excess = rate_scale * (energies[k] - mean);
    let p = event_probability(excess, levels);
    let u: f64 = rng.random();
    if !(u < p) {
        return BirthDeath::Unchanged;
    }
    let j = other_index(n, k, rng);
    if excess > 0.0 {
        ensemble.copy_particle(j, k);
        energies[k] = energies[j];
        BirthDeath::Killed {
            victim: k,
            source: j,
        }
    } else {
        ensemble.copy_particle(k, j);
        energies[j] = energies[k];
        BirthDeath::Duplicated {
            source: k,
            victim: j,
        }
    }
}

/// Birth-death move for particle `k` given the per-particle rates.
pub fn birth_death_with_rates<R: Rng + ?Sized>(
    ensemble: &mut ParticleEnsemble,
    rates: &[f64],
    k: usize,
    levels: usize,
    rng: &mut R,
) -> Result<BirthDeath> {
    let n = ensemble.len();
    check_dim(n, rates.len())?;
    if k >= n {
        return Err(Error::IndexOutOfRange { index: k, dim: n });
    }
    if levels < 1 {
        return Err(Error::invalid("levels", "must be at least 1"));
    }
    if n < 2 {
        log::warn!("birth-death skipped: ensemble has {n} particle(s)");
        return Ok(BirthDeath::Unchanged);
    }
    let mut rates = rates.to_vec();
    Ok(birth_death_cached(
        ensemble, &mut rates, 1.0, k, levels, rng,
    ))
}

/// Birth-death move for particle `k` at level `l` with rates
/// `gamma_j = dbeta_at(l) * V(x_j)`.
pub fn birth_death<P: Potential + ?Sized, R: Rng + ?Sized>(
    ensemble: &mut ParticleEnsemble,
    k: usize,
    schedule: &AnnealingSchedule,
    l: usize,
    potential: &P,
    rng: &mut R,
) -> Result<BirthDeath> {
    check_dim(potential.dim(), ensemble.dim())?;
    if l < 1 || l > schedule.levels() {
        return Err(Error::IndexOutOfRange {
            index: l,
            dim: schedule.levels() + 1,
        });
    }
    let scale = schedule.dbeta_at(l);
    let rates: Vec<f64> = ensemble
        .iter()
        .map(|x| scale * potential.value(x))
        .collect();
    birth_death_with_rates(ensemble, &rates, k, schedule.levels(), rng)
}

/// `round(1 / (levels * dt))`, at least 1: ULA steps covering time `1/levels`.
pub fn default_ula_substeps(levels: usize, dt: f64) -> usize {
    let s = (1.0 / (levels as f64 * dt)).round();
    if s < 1.0 {
        1
    } else {
        s as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AisParams {
    /// Absolute Langevin step.
    pub dt: f64,
    /// MALA steps per level.
    pub mala_steps: usize,
    /// ULA steps per particle per level.
    pub ula_substeps: usize,
    pub stretch: f64,
    pub snooker: bool,
    pub birth_death: bool,
    /// Report a checkpoint every this many MALA steps within a level; 0 reports
    /// only at the end of each level.
    pub checkpoint_every: usize,
}

impl AisParams {
    pub fn new(dt: f64, mala_steps: usize, levels: usize) -> Self {
        AisParams {
            dt,
            mala_steps,
            ula_substeps: default_ula_substeps(levels, dt),
            stretch: 2.0,
            snooker: true,
            birth_death: true,
            checkpoint_every: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        KernelParams::new(self.dt)?;
        if !(self.stretch > 1.0 && self.stretch.is_finite()) {
            return Err(Error::invalid(
                "stretch",
                alloc::format!("must exceed 1, got {}", self.stretch),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelReport {
    pub level: usize,
    pub beta: f64,
    pub snooker_accepted: usize,
    pub kills: usize,
    pub duplications: usize,
    pub mala_acceptance: f64,
}

/// Progress notifications from [`ais_run`].
#[derive(Debug)]
pub enum AisEvent<'a> {
    /// State after the sequential ULA/snooker/birth-death sweep of a level
    /// (`mala_steps_done == 0`) or after a block of MALA steps.
    Checkpoint {
        level: usize,
        beta: f64,
        mala_steps_done: usize,
        ensemble: &'a ParticleEnsemble,
    },
    LevelDone {
        report: &'a LevelReport,
        ensemble: &'a ParticleEnsemble,
    },
}

/// Runs the composite annealing driver. For each level `l = 1..=L` every
/// particle in turn gets ULA substeps at `beta_l V`, one snooker move and one
/// birth-death move; then all particles take the configured MALA steps at
/// `beta_l V`. `ensemble` should approximate `exp(-beta0 V)` on entry.
pub fn ais_run<P, F>(
    ensemble: &mut ParticleEnsemble,
    schedule: &AnnealingSchedule,
    potential: &P,
    params: &AisParams,
    seed: SeedPath,
    mut observer: F,
) -> Result<Vec<LevelReport>>
where
    P: Potential + ?Sized,
    F: FnMut(AisEvent<'_>),
{
    params.validate()?;
    check_dim(potential.dim(), ensemble.dim())?;
    let n = ensemble.len();
    if n == 0 {
        return Err(Error::Empty("ensemble"));
    }
    let interacting = n >= 2;
    if !interacting && (params.snooker || params.birth_death) {
        log::warn!(
            "single-particle ensemble: snooker and birth-death disabled, running plain Langevin"
        );
    }
    let kernel = KernelParams::new(params.dt)?;
    let mut energies: Vec<f64> = ensemble.iter().map(|x| potential.value(x)).collect();
    let mut reports = Vec::with_capacity(schedule.levels());

    for l in 1..=schedule.levels() {
        let beta = schedule.beta_at(l);
        let rate_scale = schedule.dbeta_at(l);
        let target = ScaledTarget::new(potential, beta)?;
        let level_seed = seed.child(l as u64);
        let mut rng = level_seed.child(0).rng();
        let mut report = LevelReport {
            level: l,
            beta,
            snooker_accepted: 0,
            kills: 0,
            duplications: 0,
            mala_acceptance: 1.0,
        };

        for i in 0..n {
            ula_run(
                &target,
                &kernel,
                ensemble.particle_mut(i),
                params.ula_substeps,
                &mut rng,
            )
            .map_err(|_| Error::Diverged {
                particle: i,
                context: "ULA gradient",
            })?;
            if !ensemble.particle(i).iter().all(|v| v.is_finite()) {
                return Err(Error::Diverged {
                    particle: i,
                    context: "ULA state",
                });
            }
            energies[i] = potential.value(ensemble.particle(i));
            if !interacting {
                continue;
            }
            if params.snooker {
                let anchor = other_index(n, i, &mut rng);
                let r = sample_stretch(params.stretch, &mut rng);
                let accept_u: f64 = rng.random();
                let (outcome, u_new) = snooker_apply(
                    ensemble,
                    i,
                    anchor,
                    r,
                    accept_u,
                    &target,
                    beta * energies[i],
                );
                if outcome.accepted {
                    energies[i] = u_new / beta;
                    report.snooker_accepted += 1;
                }
            }
            if params.birth_death {
                match birth_death_cached(
                    ensemble,
                    &mut energies,
                    rate_scale,
                    i,
                    schedule.levels(),
                    &mut rng,
                ) {
                    BirthDeath::Unchanged => {}
                    BirthDeath::Killed { .. } => report.kills += 1,
                    BirthDeath::Duplicated { .. } => report.duplications += 1,
                }
            }
        }
        observer(AisEvent::Checkpoint {
            level: l,
            beta,
            mala_steps_done: 0,
            ensemble,
        });

        let mut rngs: Vec<StreamRng> = (0..n)
            .map(|i| level_seed.child(1).child(i as u64).rng())
            .collect();
        let chunk = if params.checkpoint_every == 0 {
            params.mala_steps
        } else {
            params.checkpoint_every
        };
        let mut done = 0;
        let mut accepted = 0u64;
        while done < params.mala_steps {
            let steps = chunk.min(params.mala_steps - done);
            accepted += run_mala_streams(ensemble, &target, &kernel, steps, &mut rngs)?;
            done += steps;
            observer(AisEvent::Checkpoint {
                level: l,
                beta,
                mala_steps_done: done,
                ensemble,
            });
        }
        if params.mala_steps > 0 {
            report.mala_acceptance = accepted as f64 / (n as f64 * params.mala_steps as f64);
            for (e, x) in energies.iter_mut().zip(ensemble.iter()) {
                *e = potential.value(x);
            }
        }
        log::debug!(
            "level {l}: beta {beta:.4}, snooker accepted {}, kills {}, duplications {}, MALA acceptance {:.3}",
            report.snooker_accepted,
            report.kills,
            report.duplications,
            report.mala_acceptance
        );
        observer(AisEvent::LevelDone {
            report: &report,
            ensemble,
        });
        reports.push(report);
    }
    Ok(reports)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSample {
    pub state: Vec<f64>,
    pub log_weight: f64,
}

/// Classical weighted AIS along `betas[0] < ... < betas[L]` with MALA
/// transitions at each intermediate level. Chain `i` starts from particle `i`
/// of `initial` (draws from `exp(-betas[0] V)`) and uses stream `seed.child(i)`.
pub fn ais_weighted<P: Potential + ?Sized>(
    initial: &ParticleEnsemble,
    betas: &[f64],
    potential: &P,
    params: &KernelParams,
    mala_steps: usize,
    seed: SeedPath,
) -> Result<Vec<WeightedSample>> {
    check_dim(potential.dim(), initial.dim())?;
    if betas.len() < 2 {
        return Err(Error::invalid(
            "betas",
            "need at least two inverse temperatures",
        ));
    }
    if !betas.iter().all(|&b| b > 0.0 && b.is_finite()) {
        return Err(Error::invalid("betas", "must be positive and finite"));
    }
    let levels = betas.len() - 1;
    let targets: Vec<ScaledTarget<&P>> = betas
        .iter()
        .map(|&b| ScaledTarget::new(potential, b))
        .collect::<Result<_>>()?;

    let run_chain = |i: usize, x0: &[f64]| -> Result<WeightedSample> {
        let mut rng = seed.child(i as u64).rng();
        let mut x = x0.to_vec();
        let mut log_weight = 0.0;
        for l in 1..=levels {
            log_weight += targets[l - 1].value(&x) - targets[l].value(&x);
            if l < levels {
                mala_run(&targets[l], params, &mut x, mala_steps, &mut rng).map_err(|_| {
                    Error::Diverged {
                        particle: i,
                        context: "weighted AIS chain",
                    }
                })?;
            }
        }
        if !log_weight.is_finite() {
            return Err(Error::Diverged {
                particle: i,
                context: "weighted AIS log-weight",
            });
        }
        Ok(WeightedSample {
            state: x,
            log_weight,
        })
    };

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        initial
            .as_flat()
            .par_chunks(initial.dim())
            .enumerate()
            .map(|(i, x)| run_chain(i, x))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        initial
            .iter()
            .enumerate()
            .map(|(i, x)| run_chain(i, x))
            .collect()
    }
}

/// Mean of `exp(log_weight)` and its standard error.
pub fn mean_weight(samples: &[WeightedSample]) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::Empty("weighted samples"));
    }
    let n = samples.len() as f64;
    let w: Vec<f64> = samples.iter().map(|s| s.log_weight.exp()).collect();
    let mean = w.iter().sum::<f64>() / n;
    let var = w.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok((mean, (var / n).sqrt()))
}
