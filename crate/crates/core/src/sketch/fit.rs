use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::ensemble::ParticleEnsemble;
use crate::error::{check_dim, Error, Result};
use crate::fht::{Core, DimensionTree, FhtModel, FourierBasis};
use crate::sketch::functions::make_sketches;
use crate::sketch::moments::{estimate_moments, MomentEstimates};
use crate::sketch::solve::{core_as_matrix, gauge_from_svd, solve_core, solve_leaf, Gauge};

#[derive(Clone, Debug, PartialEq)]
pub struct FitParams {
    /// Target rank of the edge above each node (entry 0 is ignored).
    pub ranks: Vec<usize>,
    pub oversampling: f64,
    pub seed: u64,
    pub svd_tol: f64,
}

impl FitParams {
    pub fn uniform(tree: &DimensionTree, rank: usize) -> Self {
        FitParams {
            ranks: uniform_ranks(tree, rank),
            oversampling: 2.0,
            seed: 0,
            svd_tol: 1e-8,
        }
    }
}

/// Rank `rank` on every edge, 1 at the root.
pub fn uniform_ranks(tree: &DimensionTree, rank: usize) -> Vec<usize> {
    let mut r = alloc::vec![rank; tree.node_count()];
    r[0] = 1;
    r
}

#[derive(Clone, Debug)]
pub struct FitOutput {
    pub model: FhtModel,
    /// Per-node gauges (`None` at the root).
    pub gauges: Vec<Option<Gauge>>,
    pub sample_count: usize,
}

impl FitOutput {
    /// Rank kept on the edge above each non-root node, level order.
    pub fn effective_ranks(&self) -> Vec<usize> {
        self.gauges
            .iter()
            .skip(1)
            .map(|g| g.as_ref().map_or(0, Gauge::rank))
            .collect()
    }
}

/// Gauge for every non-root node from its cross-moment matrix.
pub fn node_gauges(
    moments: &MomentEstimates,
    ranks: &[usize],
    tol: f64,
) -> Result<Vec<Option<Gauge>>> {
    moments
        .nodes
        .iter()
        .enumerate()
        .map(|(q, nm)| match &nm.cross {
            None => Ok(None),
            Some(z) => {
                let z = core_as_matrix(z);
                let r = ranks[q].min(z.nrows()).min(z.ncols());
                gauge_from_svd(&z, r, tol)
                    .map(Some)
                    .map_err(|e| e.at_node(q))
            }
        })
        .collect()
}

/// Solves the core of node `q` given all gauges.
pub fn solve_node(
    tree: &DimensionTree,
    moments: &MomentEstimates,
    gauges: &[Option<Gauge>],
    q: usize,
    tol: f64,
) -> Result<Core> {
    let gauge = |k: usize| gauges[k].as_ref().expect("non-root node has a gauge");
    let nm = &moments.nodes[q];
    let out = match tree.children(q) {
        None => solve_leaf(&nm.core, &gauge(q).right, tol),
        Some((a, b)) => {
            let a_f = if q == 0 {
                DMatrix::identity(1, 1)
            } else {
                gauge(q).right.clone()
            };
            solve_core(&nm.core, &gauge(a).left, &gauge(b).left, &a_f, tol)
        }
    };
    out.map_err(|e| e.at_node(q))
}

/// Sketch-based one-pass fit: sketches, moments, per-node SVD gauges and
/// core solves, then normalization.
pub fn sketch_fit(
    samples: &ParticleEnsemble,
    weights: Option<&[f64]>,
    tree: &DimensionTree,
    basis: &FourierBasis,
    params: &FitParams,
) -> Result<FitOutput> {
    check_dim(tree.dim(), samples.dim())?;
    check_dim(tree.node_count(), params.ranks.len())?;
    if samples.is_empty() {
        return Err(Error::Empty("samples"));
    }
    let spec = make_sketches(tree, basis, &params.ranks, params.oversampling, params.seed)?;
    let unknowns = (0..tree.node_count())
        .map(|q| match tree.children(q) {
            None => basis.len() * params.ranks[q],
            Some((a, b)) => {
                params.ranks[a] * params.ranks[b] * if q == 0 { 1 } else { params.ranks[q] }
            }
        })
        .max()
        .unwrap_or(0);
    if samples.len() < 10 * unknowns {
        log::warn!(
            "{} samples for up to {unknowns} unknowns per node; estimates may be noisy",
            samples.len()
        );
    }
    let moments = estimate_moments(samples, weights, tree, &spec, basis)?;
    fit_from_moments(tree, basis, &moments, &params.ranks, params.svd_tol)
}

/// Assembles and normalizes a model from precomputed moments.
pub fn fit_from_moments(
    tree: &DimensionTree,
    basis: &FourierBasis,
    moments: &MomentEstimates,
    ranks: &[usize],
    tol: f64,
) -> Result<FitOutput> {
    let gauges = node_gauges(moments, ranks, tol)?;
    let solve = |q: usize| solve_node(tree, moments, &gauges, q, tol);
    #[cfg(feature = "parallel")]
    let cores: Vec<Core> = {
        use rayon::prelude::*;
        (0..tree.node_count())
            .into_par_iter()
            .map(solve)
            .collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let cores: Vec<Core> = (0..tree.node_count()).map(solve).collect::<Result<_>>()?;
    let model = FhtModel::new(tree.clone(), *basis, cores)?.normalized()?;
    Ok(FitOutput {
        model,
        gauges,
        sample_count: moments.sample_count,
    })
}
