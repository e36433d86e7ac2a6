use alloc::vec::Vec;

use rand::Rng;

use crate::ensemble::ParticleEnsemble;
use crate::error::{Error, Result};
use crate::fht::model::{Block, FhtModel};
use crate::rng::SeedPath;

/// Restarts allowed per sample when a conditional has no positive mass.
pub const MAX_RESTARTS: usize = 64;

/// Draws `count` points from the model by sequential conditionals in leaf
/// order. Each conditional is evaluated at the centers of `grid_resolution`
/// cells over `[-w, w]`, clipped at zero, and sampled by inverse CDF with a
/// uniform offset inside the chosen cell. Sample `i` uses stream
/// `seed.child(i)`.
pub fn fht_sample(
    model: &FhtModel,
    count: usize,
    grid_resolution: usize,
    seed: SeedPath,
) -> Result<ParticleEnsemble> {
    if grid_resolution < 64 {
        return Err(Error::invalid(
            "grid_resolution",
            alloc::format!("must be at least 64, got {grid_resolution}"),
        ));
    }
    let sampler = ConditionalSampler::new(model, grid_resolution);
    let d = model.dim();
    let mut data = alloc::vec![0.0; count * d];

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        data.par_chunks_mut(d)
            .enumerate()
            .try_for_each(|(i, x)| sampler.draw(x, &mut seed.child(i as u64).rng()))?;
    }
    #[cfg(not(feature = "parallel"))]
    for (i, x) in data.chunks_mut(d).enumerate() {
        sampler.draw(x, &mut seed.child(i as u64).rng())?;
    }
    ParticleEnsemble::from_flat(d, data)
}

struct ConditionalSampler<'m> {
    model: &'m FhtModel,
    /// Basis values at cell centers, `grid x n`.
    table: Vec<f64>,
    grid: usize,
    integrated: Vec<Block>,
}

impl<'m> ConditionalSampler<'m> {
    fn new(model: &'m FhtModel, grid: usize) -> Self {
        let basis = model.basis();
        let n = basis.len();
        let w = basis.half_width();
        let cell = 2.0 * w / grid as f64;
        let mut table = alloc::vec![0.0; grid * n];
        for c in 0..grid {
            basis.eval_into(-w + (c as f64 + 0.5) * cell, &mut table[c * n..(c + 1) * n]);
        }
        let iota = basis.integrals();
        let tree = model.tree();
        let integrated = (0..model.dim())
            .map(|j| Block::leaf_row(model.core(tree.leaf_node(j)), &iota))
            .collect();
        ConditionalSampler {
            model,
            table,
            grid,
            integrated,
        }
    }

    fn draw<R: Rng + ?Sized>(&self, x: &mut [f64], rng: &mut R) -> Result<()> {
        let model = self.model;
        let tree = model.tree();
        let basis = model.basis();
        let n = basis.len();
        let d = model.dim();
        let w = basis.half_width();
        let cell = 2.0 * w / self.grid as f64;
        let mut fixed: Vec<Block> = Vec::with_capacity(d);
        let mut buf = alloc::vec![0.0; n];
        let mut density = alloc::vec![0.0; self.grid];
        let mut restarts = 0;
        'restart: loop {
            fixed.clear();
            for j in 0..d {
                let coef = model.contract(|l, c| {
                    if l < j {
                        fixed[l].clone()
                    } else if l == j {
                        Block::leaf_open(c)
                    } else {
                        self.integrated[l].clone()
                    }
                });
                let mut total = 0.0;
                for (c, v) in density.iter_mut().enumerate() {
                    let row = &self.table[c * n..(c + 1) * n];
                    let f: f64 = row.iter().zip(&coef.data).map(|(a, b)| a * b).sum();
                    *v = if f > 0.0 { f } else { 0.0 };
                    total += *v;
                }
                if !(total > 0.0 && total.is_finite()) {
                    restarts += 1;
                    if restarts > MAX_RESTARTS {
                        return Err(Error::Degenerate(
                            "conditional density has no positive mass",
                        ));
                    }
                    continue 'restart;
                }
                let target = rng.random::<f64>() * total;
                let mut acc = 0.0;
                let mut chosen = self.grid - 1;
                for (c, v) in density.iter().enumerate() {
                    acc += v;
                    if target < acc {
                        chosen = c;
                        break;
                    }
                }
                // Guard against rounding past the last positive cell.
                while density[chosen] == 0.0 && chosen > 0 {
                    chosen -= 1;
                }
                let t = -w + (chosen as f64 + rng.random::<f64>()) * cell;
                x[tree.leaf_site(j)] = t;
                basis.eval_into(t, &mut buf);
                fixed.push(Block::leaf_row(model.core(tree.leaf_node(j)), &buf));
            }
            return Ok(());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fht::basis::FourierBasis;
    use crate::fht::model::Core;
    use crate::fht::tree::{build_tree, SiteOrder};
    use crate::quadrature::gauss_legendre;

    /// Product of identical leaf densities `1/sqrt(2w) * (psi_0 + 0.6 psi_1 + 0.3 psi_2)`.
    fn separable(d: usize) -> FhtModel {
        let tree = build_tree(d, SiteOrder::Identity).unwrap();
        let basis = FourierBasis::new(1, 2.5).unwrap();
        let cores = (0..tree.node_count())
            .map(|q| {
                if tree.is_leaf(q) {
                    Core::new([3, 1, 1], alloc::vec![1.0, 0.6, 0.3]).unwrap()
                } else {
                    Core::new([1, 1, 1], alloc::vec![1.0]).unwrap()
                }
            })
            .collect();
        FhtModel::new(tree, basis, cores)
            .unwrap()
            .normalized()
            .unwrap()
    }

    #[test]
    fn returns_requested_count_inside_box() {
        let m = separable(4);
        let s = fht_sample(&m, 1000, 512, SeedPath::new(1)).unwrap();
        assert_eq!(s.len(), 1000);
        assert!(s.as_flat().iter().all(|v| v.abs() <= 2.5));
    }

    #[test]
    fn separable_means_match_quadrature() {
        let m = separable(4);
        let (x, w) = gauss_legendre(128, -2.5, 2.5);
        let dens = m.marginal_1d(0, &x).unwrap();
        let mean: f64 = x
            .iter()
            .zip(&w)
            .zip(&dens)
            .map(|((t, w), p)| w * t * p)
            .sum();
        let second: f64 = x
            .iter()
            .zip(&w)
            .zip(&dens)
            .map(|((t, w), p)| w * t * t * p)
            .sum();
        let sd = (second - mean * mean).sqrt();
        let count = 20_000;
        let s = fht_sample(&m, count, 512, SeedPath::new(2)).unwrap();
        for site in 0..4 {
            let m_hat = s.iter().map(|p| p[site]).sum::<f64>() / count as f64;
            assert!(
                (m_hat - mean).abs() < 3.0 * sd / (count as f64).sqrt() + 1e-3,
                "site {site}: {m_hat} vs {mean}"
            );
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let m = separable(2);
        let a = fht_sample(&m, 50, 64, SeedPath::new(5)).unwrap();
        let b = fht_sample(&m, 50, 64, SeedPath::new(5)).unwrap();
        assert_eq!(a, b);
        assert!(fht_sample(&m, 5, 32, SeedPath::new(5)).is_err());
    }

    #[test]
    fn negative_model_errors() {
        let m = separable(2).scaled(-1.0);
        assert!(matches!(
            fht_sample(&m, 1, 64, SeedPath::new(0)),
            Err(Error::Degenerate(_))
        ));
    }
}
