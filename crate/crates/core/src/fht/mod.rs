//! Functional hierarchical tensors over a binary dimension tree with a
//! Fourier basis.

mod basis;
pub(crate) mod model;
mod sample;
mod tree;

pub use basis::FourierBasis;
pub use model::{
    fht_eval, fht_integral, linspace, marginal_2d, normalize, quadrature_2d, trapezoid_2d, Core,
    FhtModel,
};
pub use sample::{fht_sample, MAX_RESTARTS};
pub use tree::{build_tree, DimensionTree, SiteOrder};
