//! Density estimation by per-node sketching: cross-moments of random
//! separable features, SVD gauges, and least-squares core solves.

mod fit;
mod functions;
mod moments;
mod solve;

pub use fit::{
    fit_from_moments, node_gauges, sketch_fit, solve_node, uniform_ranks, FitOutput, FitParams,
};
pub use functions::{
    make_sketches, sketch_size, NodeSketch, SketchFunction, SketchSpec, SketchTerm, MAX_MODE,
};
pub use moments::{estimate_moments, MomentEstimates, NodeMoments, SHARD_SIZE};
pub use solve::{gauge_from_svd, mode_product, pinv, solve_core, solve_leaf, Gauge};
