use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{check_dim, Error, Result};
use crate::fht::{DimensionTree, FourierBasis};
use crate::rng::SeedPath;

/// Largest basis index used inside sketch terms (Fourier degree 2).
pub const MAX_MODE: usize = 4;

/// `coef * prod_{(site, mode)} psi_mode(x_site)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SketchTerm {
    pub coef: f64,
    pub factors: Vec<(usize, usize)>,
}

/// A sum of separable terms; no terms means the constant function 1.
#[derive(Clone, Debug, PartialEq)]
pub struct SketchFunction {
    pub terms: Vec<SketchTerm>,
}

impl SketchFunction {
    pub fn constant() -> Self {
        SketchFunction { terms: Vec::new() }
    }

    /// Evaluates given `psi[site * n + mode]` for every site.
    pub fn eval(&self, psi: &[f64], n: usize) -> f64 {
        if self.terms.is_empty() {
            return 1.0;
        }
        self.terms
            .iter()
            .map(|t| {
                t.coef
                    * t.factors
                        .iter()
                        .map(|&(s, m)| psi[s * n + m])
                        .product::<f64>()
            })
            .sum()
    }
}

/// Sketch functions on the block of a node and on its complement.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeSketch {
    pub block: Vec<SketchFunction>,
    pub complement: Vec<SketchFunction>,
}

/// Sketch functions for every non-root node of a tree (`nodes[0]` is unused).
#[derive(Clone, Debug, PartialEq)]
pub struct SketchSpec {
    pub nodes: Vec<Option<NodeSketch>>,
}

impl SketchSpec {
    pub fn node(&self, q: usize) -> &NodeSketch {
        self.nodes[q].as_ref().expect("non-root node")
    }

    /// Every function replaced by the constant 1, `size` per block.
    pub fn constant(tree: &DimensionTree, size: usize) -> Self {
        let mut nodes = alloc::vec![None];
        for _ in 1..tree.node_count() {
            nodes.push(Some(NodeSketch {
                block: alloc::vec![SketchFunction::constant(); size],
                complement: alloc::vec![SketchFunction::constant(); size],
            }));
        }
        SketchSpec { nodes }
    }
}

/// `ceil(oversampling * rank)`.
pub fn sketch_size(rank: usize, oversampling: f64) -> usize {
    (oversampling * rank as f64).ceil() as usize
}

/// Builds `ceil(oversampling * ranks[q])` functions on the block of every
/// non-root node `q` and as many on its complement. Function 0 of each family
/// is the constant; the others are Gaussian random combinations of the
/// single-site features `psi_m(x_s)`, `m = 1..=MAX_MODE`, over every site of
/// the family. Depends only on `seed` and the arguments.
pub fn make_sketches(
    tree: &DimensionTree,
    basis: &FourierBasis,
    ranks: &[usize],
    oversampling: f64,
    seed: u64,
) -> Result<SketchSpec> {
    check_dim(tree.node_count(), ranks.len())?;
    if !(oversampling >= 1.5 && oversampling.is_finite()) {
        return Err(Error::invalid(
            "oversampling",
            alloc::format!("must be at least 1.5, got {oversampling}"),
        ));
    }
    let max_mode = MAX_MODE.min(basis.len() - 1);
    let root = SeedPath::new(seed);
    let mut nodes = alloc::vec![None];
    for q in 1..tree.node_count() {
        if ranks[q] == 0 {
            return Err(Error::invalid(
                "ranks",
                alloc::format!("edge above node {q} has rank 0"),
            ));
        }
        let size = sketch_size(ranks[q], oversampling);
        let block = family(
            &tree.block_sites(q),
            size,
            max_mode,
            root.path(&[q as u64, 0]),
        );
        let complement = family(
            &tree.complement_sites(q),
            size,
            max_mode,
            root.path(&[q as u64, 1]),
        );
        nodes.push(Some(NodeSketch { block, complement }));
    }
    Ok(SketchSpec { nodes })
}

fn family(sites: &[usize], size: usize, max_mode: usize, seed: SeedPath) -> Vec<SketchFunction> {
    let mut rng = seed.rng();
    let mut out = Vec::with_capacity(size);
    out.push(SketchFunction::constant());
    let modes = max_mode.max(1);
    let norm = 1.0 / ((sites.len() * modes) as f64).sqrt();
    for _ in 1..size {
        let mut terms = Vec::with_capacity(sites.len() * modes);
        for &site in sites {
            for mode in 1..=modes {
                let mode = if max_mode == 0 { 0 } else { mode };
                let g: f64 = rng.sample(StandardNormal);
                terms.push(SketchTerm {
                    coef: norm * g,
                    factors: alloc::vec![(site, mode)],
                });
            }
        }
        out.push(SketchFunction { terms });
    }
    out
}
