use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_dim, Error, Result};

/// `n` particles in `R^dim`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ParticleEnsemble {
    dim: usize,
    data: Vec<f64>,
}

impl ParticleEnsemble {
    pub fn from_flat(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", "must be positive"));
        }
        if data.len() % dim != 0 {
            return Err(Error::Shape(alloc::format!(
                "{} values do not split into particles of dimension {dim}",
                data.len()
            )));
        }
        Ok(ParticleEnsemble { dim, data })
    }

    pub fn from_particles(dim: usize, particles: &[Vec<f64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(dim * particles.len());
        for p in particles {
            check_dim(dim, p.len())?;
            data.extend_from_slice(p);
        }
        Self::from_flat(dim, data)
    }

    pub fn constant(n: usize, dim: usize, value: f64) -> Self {
        ParticleEnsemble {
            dim,
            data: alloc::vec![value; n * dim],
        }
    }

    pub fn gaussian<R: Rng + ?Sized>(n: usize, dim: usize, rng: &mut R) -> Self {
        let data = (0..n * dim)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        ParticleEnsemble { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn particle(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn particle_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> core::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn as_flat_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.data
    }

    /// Overwrites particle `dst` with a copy of particle `src`.
    pub fn copy_particle(&mut self, src: usize, dst: usize) {
        if src != dst {
            let d = self.dim;
            self.data.copy_within(src * d..(src + 1) * d, dst * d);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Concatenates ensembles of equal dimension.
    pub fn pooled<'a, I>(dim: usize, parts: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a ParticleEnsemble>,
    {
        let mut data = Vec::new();
        for e in parts {
            check_dim(dim, e.dim)?;
            data.extend_from_slice(&e.data);
        }
        Self::from_flat(dim, data)
    }
}
