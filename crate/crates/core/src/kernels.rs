//! Langevin kernels: unadjusted (ULA) and Metropolis-adjusted (MALA).

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::ensemble::ParticleEnsemble;
use crate::error::{check_dim, Error, Result};
use crate::potential::Potential;
use crate::rng::{SeedPath, StreamRng};

/// `U = beta_eff * V`.
#[derive(Clone, Debug)]
pub struct ScaledTarget<P> {
    potential: P,
    beta_eff: f64,
}

impl<P: Potential> ScaledTarget<P> {
    pub fn new(potential: P, beta_eff: f64) -> Result<Self> {
        if !(beta_eff > 0.0 && beta_eff.is_finite()) {
            return Err(Error::invalid(
                "beta_eff",
                alloc::format!("must be positive, got {beta_eff}"),
            ));
        }
        Ok(ScaledTarget {
            potential,
            beta_eff,
        })
    }

    pub fn beta_eff(&self) -> f64 {
        self.beta_eff
    }

    pub fn potential(&self) -> &P {
        &self.potential
    }
}

impl<P: Potential> Potential for ScaledTarget<P> {
    fn dim(&self) -> usize {
        self.potential.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.beta_eff * self.potential.value(x)
    }

    fn value_and_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let v = self.potential.value_and_grad(x, grad);
        for g in grad.iter_mut() {
            *g *= self.beta_eff;
        }
        self.beta_eff * v
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelParams {
    pub dt: f64,
}

impl KernelParams {
    pub fn new(dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid(
                "dt",
                alloc::format!("must be positive, got {dt}"),
            ));
        }
        Ok(KernelParams { dt })
    }
}

fn fill_gaussian<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    for v in out {
        *v = rng.sample(StandardNormal);
    }
}

/// One ULA step `x <- x - dt grad U(x) + sqrt(2 dt) noise`, in place.
pub fn ula_step_with_noise<U: Potential + ?Sized>(
    target: &U,
    params: &KernelParams,
    x: &mut [f64],
    noise: &[f64],
    grad: &mut [f64],
) -> Result<()> {
    check_dim(target.dim(), x.len())?;
    check_dim(x.len(), noise.len())?;
    target.value_and_grad(x, grad);
    if !grad.iter().all(|g| g.is_finite()) {
        return Err(Error::NonFinite {
            context: "ULA gradient",
        });
    }
    let amp = (2.0 * params.dt).sqrt();
    for ((xi, g), z) in x.iter_mut().zip(grad.iter()).zip(noise) {
        *xi += -params.dt * g + amp * z;
    }
    Ok(())
}

pub fn ula_step<U: Potential + ?Sized, R: Rng + ?Sized>(
    target: &U,
    params: &KernelParams,
    x: &mut [f64],
    rng: &mut R,
) -> Result<()> {
    ula_run(target, params, x, 1, rng)
}

/// `steps` consecutive ULA steps reusing scratch buffers.
pub fn ula_run<U: Potential + ?Sized, R: Rng + ?Sized>(
    target: &U,
    params: &KernelParams,
    x: &mut [f64],
    steps: usize,
    rng: &mut R,
) -> Result<()> {
    let d = x.len();
    let mut grad = alloc::vec![0.0; d];
    let mut noise = alloc::vec![0.0; d];
    for _ in 0..steps {
        fill_gaussian(rng, &mut noise);
        ula_step_with_noise(target, params, x, &noise, &mut grad)?;
    }
    Ok(())
}

/// Log Metropolis-Hastings ratio for moving from `x` to `x_hat` under the
/// Langevin proposal. Returns `-inf` when the proposal energy is not finite.
pub fn mala_log_accept<U: Potential + ?Sized>(
    target: &U,
    dt: f64,
    x: &[f64],
    x_hat: &[f64],
) -> f64 {
    let d = x.len();
    let mut g = alloc::vec![0.0; d];
    let mut g_hat = alloc::vec![0.0; d];
    let u = target.value_and_grad(x, &mut g);
    let u_hat = target.value_and_grad(x_hat, &mut g_hat);
    log_accept_parts(dt, x, u, &g, x_hat, u_hat, &g_hat)
}

fn log_accept_parts(
    dt: f64,
    x: &[f64],
    u: f64,
    g: &[f64],
    x_hat: &[f64],
    u_hat: f64,
    g_hat: &[f64],
) -> f64 {
    if !u_hat.is_finite() || !g_hat.iter().all(|v| v.is_finite()) {
        return f64::NEG_INFINITY;
    }
    // Reverse proposal density uses the drift at x_hat, forward at x.
    let mut rev = 0.0;
    let mut fwd = 0.0;
    for i in 0..x.len() {
        let r = x[i] - x_hat[i] + dt * g_hat[i];
        let f = x_hat[i] - x[i] + dt * g[i];
        rev += r * r;
        fwd += f * f;
    }
    let log_ratio = -u_hat + u - rev / (4.0 * dt) + fwd / (4.0 * dt);
    if log_ratio.is_nan() {
        f64::NEG_INFINITY
    } else {
        log_ratio.min(0.0)
    }
}

/// A MALA chain caching the energy and gradient at the current state, so each
/// step costs one gradient evaluation.
#[derive(Clone, Debug)]
pub struct MalaChain<'t, U: ?Sized> {
    target: &'t U,
    dt: f64,
    x: Vec<f64>,
    u: f64,
    grad: Vec<f64>,
    prop: Vec<f64>,
    prop_grad: Vec<f64>,
    noise: Vec<f64>,
    steps: u64,
    accepted: u64,
}

impl<'t, U: Potential + ?Sized> MalaChain<'t, U> {
    pub fn new(target: &'t U, params: &KernelParams, x: &[f64]) -> Result<Self> {
        check_dim(target.dim(), x.len())?;
        let d = x.len();
        let mut grad = alloc::vec![0.0; d];
        let u = target.value_and_grad(x, &mut grad);
        if !u.is_finite() || !grad.iter().all(|g| g.is_finite()) {
            return Err(Error::NonFinite {
                context: "MALA initial state",
            });
        }
        Ok(MalaChain {
            target,
            dt: params.dt,
            x: x.to_vec(),
            u,
            grad,
            prop: alloc::vec![0.0; d],
            prop_grad: alloc::vec![0.0; d],
            noise: alloc::vec![0.0; d],
            steps: 0,
            accepted: 0,
        })
    }

    pub fn state(&self) -> &[f64] {
        &self.x
    }

    pub fn into_state(self) -> Vec<f64> {
        self.x
    }

    pub fn energy(&self) -> f64 {
        self.u
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        let mut noise = core::mem::take(&mut self.noise);
        fill_gaussian(rng, &mut noise);
        let accept_u: f64 = rng.random();
        let accepted = self.step_inner(&noise, accept_u);
        self.noise = noise;
        accepted
    }

    /// Step with caller-provided proposal noise and acceptance uniform.
    pub fn step_with(&mut self, noise: &[f64], accept_u: f64) -> bool {
        self.step_inner(noise, accept_u)
    }

    fn step_inner(&mut self, noise: &[f64], accept_u: f64) -> bool {
        let dt = self.dt;
        let amp = (2.0 * dt).sqrt();
        for i in 0..self.x.len() {
            self.prop[i] = self.x[i] - dt * self.grad[i] + amp * noise[i];
        }
        let u_hat = self.target.value_and_grad(&self.prop, &mut self.prop_grad);
        let log_a = log_accept_parts(
            dt,
            &self.x,
            self.u,
            &self.grad,
            &self.prop,
            u_hat,
            &self.prop_grad,
        );
        self.steps += 1;
        let accept = log_a >= 0.0 || (log_a > f64::NEG_INFINITY && accept_u.ln() < log_a);
        if accept {
            core::mem::swap(&mut self.x, &mut self.prop);
            core::mem::swap(&mut self.grad, &mut self.prop_grad);
            self.u = u_hat;
            self.accepted += 1;
        }
        accept
    }
}

/// One MALA step from `x`; returns the new state and whether it was accepted.
pub fn mala_step<U: Potential + ?Sized, R: Rng + ?Sized>(
    target: &U,
    params: &KernelParams,
    x: &[f64],
    rng: &mut R,
) -> Result<(Vec<f64>, bool)> {
    let mut chain = MalaChain::new(target, params, x)?;
    let acc = chain.step(rng);
    Ok((chain.into_state(), acc))
}

/// Runs `steps` MALA steps on `x` in place, returning the accepted count.
pub fn mala_run<U: Potential + ?Sized, R: Rng + ?Sized>(
    target: &U,
    params: &KernelParams,
    x: &mut [f64],
    steps: usize,
    rng: &mut R,
) -> Result<u64> {
    if steps == 0 {
        return Ok(0);
    }
    let mut chain = MalaChain::new(target, params, x)?;
    for _ in 0..steps {
        chain.step(rng);
    }
    x.copy_from_slice(chain.state());
    Ok(chain.accepted())
}

/// Applies `steps` MALA steps to every particle, each on its own stream
/// `seed.child(i)`. Returns the mean acceptance rate (1 when `steps == 0`).
pub fn run_mala<U: Potential + ?Sized>(
    ensemble: &mut ParticleEnsemble,
    target: &U,
    params: &KernelParams,
    steps: usize,
    seed: SeedPath,
) -> Result<f64> {
    let mut rngs: Vec<StreamRng> = (0..ensemble.len())
        .map(|i| seed.child(i as u64).rng())
        .collect();
    let accepted = run_mala_streams(ensemble, target, params, steps, &mut rngs)?;
    if steps == 0 || ensemble.is_empty() {
        return Ok(1.0);
    }
    Ok(accepted as f64 / (ensemble.len() as f64 * steps as f64))
}

/// Like [`run_mala`] with caller-held per-particle streams, so a long run can
/// be split into chunks without changing its output. Returns the accepted count.
pub fn run_mala_streams<U: Potential + ?Sized>(
    ensemble: &mut ParticleEnsemble,
    target: &U,
    params: &KernelParams,
    steps: usize,
    rngs: &mut [StreamRng],
) -> Result<u64> {
    check_dim(target.dim(), ensemble.dim())?;
    check_dim(ensemble.len(), rngs.len())?;
    if steps == 0 || ensemble.is_empty() {
        return Ok(0);
    }
    let d = ensemble.dim();
    let run_one = |i: usize, x: &mut [f64], rng: &mut StreamRng| -> Result<u64> {
        mala_run(target, params, x, steps, rng).map_err(|e| match e {
            Error::NonFinite { context } => Error::Diverged {
                particle: i,
                context,
            },
            other => other,
        })
    };
    #[cfg(feature = "parallel")]
    let accepted: Result<u64> = {
        use rayon::prelude::*;
        ensemble
            .as_flat_mut()
            .par_chunks_mut(d)
            .zip(rngs.par_iter_mut())
            .enumerate()
            .map(|(i, (x, rng))| run_one(i, x, rng))
            .try_reduce(|| 0, |a, b| Ok(a + b))
    };
    #[cfg(not(feature = "parallel"))]
    let accepted: Result<u64> = ensemble
        .as_flat_mut()
        .chunks_mut(d)
        .zip(rngs.iter_mut())
        .enumerate()
        .try_fold(0u64, |acc, (i, (x, rng))| Ok(acc + run_one(i, x, rng)?));
    accepted
}
