use alloc::vec::Vec;

use crate::ensemble::ParticleEnsemble;
use crate::error::{check_dim, Error, Result};
use crate::fht::{Core, DimensionTree, FourierBasis};
use crate::sketch::functions::{SketchFunction, SketchSpec};

/// Samples per accumulation shard. Shards are merged pairwise in a fixed
/// order, so results do not depend on how shards are scheduled.
pub const SHARD_SIZE: usize = 4096;

/// Monte-Carlo cross-moments for one tree node. All tensors are stored as
/// [`Core`]s; matrices have a trailing unit mode.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeMoments {
    /// `E[s_I (x) s_{I^c}]`, shape `(r_I, r_c, 1)`; absent at the root.
    pub cross: Option<Core>,
    /// Leaves: `E[psi (x) s_{I^c}]`, shape `(n, r_c, 1)`. Internal nodes:
    /// `E[s_a (x) s_b (x) s_{I^c}]`, shape `(r_a, r_b, r_c)`; at the root
    /// `E[s_a (x) s_b]`, shape `(r_a, r_b, 1)`.
    pub core: Core,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentEstimates {
    pub nodes: Vec<NodeMoments>,
    pub sample_count: usize,
    pub total_weight: f64,
}

fn zeroed_like(tree: &DimensionTree, spec: &SketchSpec, n: usize) -> Vec<NodeMoments> {
    (0..tree.node_count())
        .map(|q| {
            let cross = (q > 0).then(|| {
                let ns = spec.node(q);
                Core::zeros([ns.block.len(), ns.complement.len(), 1])
            });
            let core = match tree.children(q) {
                None => Core::zeros([n, spec.node(q).complement.len(), 1]),
                Some((a, b)) => {
                    let rc = if q == 0 {
                        1
                    } else {
                        spec.node(q).complement.len()
                    };
                    Core::zeros([spec.node(a).block.len(), spec.node(b).block.len(), rc])
                }
            };
            NodeMoments { cross, core }
        })
        .collect()
}

struct Shard {
    nodes: Vec<NodeMoments>,
    count: usize,
    weight: f64,
}

impl Shard {
    fn merge(mut self, other: Shard) -> Shard {
        for (a, b) in self.nodes.iter_mut().zip(other.nodes) {
            if let (Some(x), Some(y)) = (a.cross.as_mut(), b.cross) {
                for (u, v) in x.data_mut().iter_mut().zip(y.data()) {
                    *u += v;
                }
            }
            for (u, v) in a.core.data_mut().iter_mut().zip(b.core.data()) {
                *u += v;
            }
        }
        self.count += other.count;
        self.weight += other.weight;
        self
    }
}

fn eval_family(funcs: &[SketchFunction], psi: &[f64], n: usize, out: &mut Vec<f64>) {
    out.clear();
    out.extend(funcs.iter().map(|f| f.eval(psi, n)));
}

fn accumulate_shard(
    tree: &DimensionTree,
    spec: &SketchSpec,
    basis: &FourierBasis,
    rows: &[f64],
    weights: Option<&[f64]>,
) -> Shard {
    let d = tree.dim();
    let n = basis.len();
    let nodes_n = tree.node_count();
    let mut nodes = zeroed_like(tree, spec, n);
    let mut psi = alloc::vec![0.0; d * n];
    let mut block_vals: Vec<Vec<f64>> = alloc::vec![Vec::new(); nodes_n];
    let mut comp_vals: Vec<Vec<f64>> = alloc::vec![Vec::new(); nodes_n];
    let mut weight = 0.0;
    for (i, x) in rows.chunks_exact(d).enumerate() {
        let w = weights.map_or(1.0, |w| w[i]);
        weight += w;
        for (s, &v) in x.iter().enumerate() {
            basis.eval_into(v, &mut psi[s * n..(s + 1) * n]);
        }
        for q in 1..nodes_n {
            let ns = spec.node(q);
            eval_family(&ns.block, &psi, n, &mut block_vals[q]);
            eval_family(&ns.complement, &psi, n, &mut comp_vals[q]);
        }
        for q in 0..nodes_n {
            let nm = &mut nodes[q];
            if let Some(z) = nm.cross.as_mut() {
                outer2(z.data_mut(), &block_vals[q], &comp_vals[q], w);
            }
            match tree.children(q) {
                None => {
                    let site = tree.leaf_site(q + 1 - d);
                    outer2(
                        nm.core.data_mut(),
                        &psi[site * n..(site + 1) * n],
                        &comp_vals[q],
                        w,
                    );
                }
                Some((a, b)) if q == 0 => {
                    outer2(nm.core.data_mut(), &block_vals[a], &block_vals[b], w)
                }
                Some((a, b)) => outer3(
                    nm.core.data_mut(),
                    &block_vals[a],
                    &block_vals[b],
                    &comp_vals[q],
                    w,
                ),
            }
        }
    }
    Shard {
        nodes,
        count: rows.len() / d,
        weight,
    }
}

fn outer2(out: &mut [f64], u: &[f64], v: &[f64], w: f64) {
    let m = v.len();
    for (i, &ui) in u.iter().enumerate() {
        let f = w * ui;
        for (o, vj) in out[i * m..(i + 1) * m].iter_mut().zip(v) {
            *o += f * vj;
        }
    }
}

fn outer3(out: &mut [f64], u: &[f64], v: &[f64], z: &[f64], w: f64) {
    let (mv, mz) = (v.len(), z.len());
    for (i, &ui) in u.iter().enumerate() {
        for (j, &vj) in v.iter().enumerate() {
            let f = w * ui * vj;
            let base = (i * mv + j) * mz;
            for (o, zk) in out[base..base + mz].iter_mut().zip(z) {
                *o += f * zk;
            }
        }
    }
}

/// Merges shard results pairwise: (0,1), (2,3), ... then again on the
/// results, until one remains.
fn pairwise_reduce(mut parts: Vec<Shard>) -> Shard {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => a.merge(b),
                None => a,
            });
        }
        parts = next;
    }
    parts.pop().expect("at least one shard")
}

/// Estimates every cross-moment needed by the fit in one pass over the
/// samples. With weights, averages are `sum w_i f(x_i) / sum w_i`; weights
/// that are all equal take the unweighted path.
pub fn estimate_moments(
    samples: &ParticleEnsemble,
    weights: Option<&[f64]>,
    tree: &DimensionTree,
    spec: &SketchSpec,
    basis: &FourierBasis,
) -> Result<MomentEstimates> {
    check_dim(tree.dim(), samples.dim())?;
    check_dim(tree.node_count(), spec.nodes.len())?;
    if samples.is_empty() {
        return Err(Error::Empty("samples"));
    }
    if !samples.is_finite() {
        return Err(Error::NonFinite { context: "samples" });
    }
    let weights = match weights {
        Some(w) => {
            check_dim(samples.len(), w.len())?;
            if !w.iter().all(|v| v.is_finite() && *v >= 0.0) {
                return Err(Error::invalid("weights", "must be finite and nonnegative"));
            }
            if w.iter().all(|v| *v == w[0]) {
                None
            } else {
                Some(w)
            }
        }
        None => None,
    };
    let d = tree.dim();
    let rows = samples.as_flat();
    let shard_rows = SHARD_SIZE * d;
    let shard = |k: usize| {
        let lo = k * shard_rows;
        let hi = (lo + shard_rows).min(rows.len());
        let w = weights.map(|w| &w[lo / d..hi / d]);
        accumulate_shard(tree, spec, basis, &rows[lo..hi], w)
    };
    let shards = rows.len().div_ceil(shard_rows);
    #[cfg(feature = "parallel")]
    let parts: Vec<Shard> = {
        use rayon::prelude::*;
        (0..shards).into_par_iter().map(shard).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Shard> = (0..shards).map(shard).collect();
    let total = pairwise_reduce(parts);
    if !(total.weight > 0.0) {
        return Err(Error::Degenerate("total sample weight is zero"));
    }
    let scale = match weights {
        Some(_) => total.weight,
        None => total.count as f64,
    };
    let mut nodes = total.nodes;
    for nm in &mut nodes {
        if let Some(z) = nm.cross.as_mut() {
            z.data_mut().iter_mut().for_each(|v| *v /= scale);
        }
        nm.core.data_mut().iter_mut().for_each(|v| *v /= scale);
    }
    Ok(MomentEstimates {
        nodes,
        sample_count: total.count,
        total_weight: total.weight,
    })
}
