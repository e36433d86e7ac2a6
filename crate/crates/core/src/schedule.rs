//! Inverse-temperature paths from `beta0` to `beta`.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScheduleKind {
    Linear,
    Geometric,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnnealingSchedule {
    beta0: f64,
    beta: f64,
    levels: usize,
    kind: ScheduleKind,
}

pub fn make_schedule(
    beta0: f64,
    beta: f64,
    levels: usize,
    kind: ScheduleKind,
) -> Result<AnnealingSchedule> {
    if !(beta0 > 0.0 && beta0.is_finite()) {
        return Err(Error::invalid(
            "beta0",
            alloc::format!("must be positive, got {beta0}"),
        ));
    }
    if !(beta > beta0 && beta.is_finite()) {
        return Err(Error::invalid(
            "beta",
            alloc::format!("must exceed beta0 = {beta0}, got {beta}"),
        ));
    }
    if levels < 1 {
        return Err(Error::invalid("levels", "must be at least 1"));
    }
    Ok(AnnealingSchedule {
        beta0,
        beta,
        levels,
        kind,
    })
}

impl AnnealingSchedule {
    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    /// Inverse temperature at level `l`, `0 <= l <= levels`.
    pub fn beta_at(&self, l: usize) -> f64 {
        if l == 0 {
            return self.beta0;
        }
        if l >= self.levels {
            return self.beta;
        }
        let t = l as f64 / self.levels as f64;
        match self.kind {
            ScheduleKind::Linear => self.beta0 + t * (self.beta - self.beta0),
            ScheduleKind::Geometric => self.beta0 * (self.beta / self.beta0).powf(t),
        }
    }

    /// `d beta_t / dt` at `t = l / levels`.
    pub fn dbeta_at(&self, l: usize) -> f64 {
        match self.kind {
            ScheduleKind::Linear => self.beta - self.beta0,
            ScheduleKind::Geometric => self.beta_at(l) * (self.beta / self.beta0).ln(),
        }
    }

    /// `beta_at(0..=levels)`.
    pub fn betas(&self) -> Vec<f64> {
        (0..=self.levels).map(|l| self.beta_at(l)).collect()
    }
}
