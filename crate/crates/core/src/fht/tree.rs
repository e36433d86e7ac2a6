use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};

/// Assignment of lattice sites to tree leaves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SiteOrder {
    Identity,
    /// Z-order on a square grid stored row-major: leaf bit `2b` is column
    /// bit `b`, leaf bit `2b + 1` is row bit `b`.
    Morton2D,
}

impl SiteOrder {
    pub fn tag(self) -> u64 {
        match self {
            SiteOrder::Identity => 0,
            SiteOrder::Morton2D => 1,
        }
    }

    pub fn from_tag(tag: u64) -> Option<Self> {
        match tag {
            0 => Some(SiteOrder::Identity),
            1 => Some(SiteOrder::Morton2D),
            _ => None,
        }
    }
}

/// Complete binary tree over `d = 2^levels` variables in heap layout: node 0 is
/// the root, the children of `q` are `2q + 1` and `2q + 2`, and leaf `j` is
/// node `d - 1 + j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionTree {
    levels: usize,
    order: SiteOrder,
    leaf_to_site: Vec<usize>,
}

pub fn build_tree(d: usize, order: SiteOrder) -> Result<DimensionTree> {
    if d < 2 || !d.is_power_of_two() {
        return Err(Error::invalid(
            "d",
            alloc::format!("tree needs a power of two >= 2, got {d}"),
        ));
    }
    let levels = d.trailing_zeros() as usize;
    let leaf_to_site = match order {
        SiteOrder::Identity => (0..d).collect(),
        SiteOrder::Morton2D => {
            if levels % 2 != 0 {
                return Err(Error::invalid(
                    "d",
                    alloc::format!("Morton order needs a power of four, got {d}"),
                ));
            }
            let side = 1usize << (levels / 2);
            (0..d)
                .map(|j| {
                    let (mut row, mut col) = (0, 0);
                    for b in 0..levels / 2 {
                        col |= ((j >> (2 * b)) & 1) << b;
                        row |= ((j >> (2 * b + 1)) & 1) << b;
                    }
                    row * side + col
                })
                .collect()
        }
    };
    Ok(DimensionTree {
        levels,
        order,
        leaf_to_site,
    })
}

impl DimensionTree {
    pub fn dim(&self) -> usize {
        self.leaf_to_site.len()
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn site_order(&self) -> SiteOrder {
        self.order
    }

    pub fn node_count(&self) -> usize {
        2 * self.dim() - 1
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        node >= self.dim() - 1
    }

    pub fn leaf_node(&self, leaf: usize) -> usize {
        self.dim() - 1 + leaf
    }

    pub fn node_leaf(&self, node: usize) -> Option<usize> {
        self.is_leaf(node).then(|| node + 1 - self.dim())
    }

    pub fn children(&self, node: usize) -> Option<(usize, usize)> {
        (!self.is_leaf(node)).then_some((2 * node + 1, 2 * node + 2))
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        (node > 0).then(|| (node - 1) / 2)
    }

    /// Depth of `node`; the root is at level 0.
    pub fn node_level(&self, node: usize) -> usize {
        (usize::BITS - 1 - (node + 1).leading_zeros()) as usize
    }

    /// Leaf indices spanned by `node`.
    pub fn block(&self, node: usize) -> Range<usize> {
        let l = self.node_level(node);
        let k = node + 1 - (1 << l);
        let size = self.dim() >> l;
        k * size..(k + 1) * size
    }

    pub fn leaf_site(&self, leaf: usize) -> usize {
        self.leaf_to_site[leaf]
    }

    pub fn leaf_to_site(&self) -> &[usize] {
        &self.leaf_to_site
    }

    pub fn site_leaf(&self, site: usize) -> Option<usize> {
        self.leaf_to_site.iter().position(|&s| s == site)
    }

    /// Lattice sites spanned by `node`.
    pub fn block_sites(&self, node: usize) -> Vec<usize> {
        self.block(node).map(|j| self.leaf_to_site[j]).collect()
    }

    /// Sites outside the block of `node`, in leaf order.
    pub fn complement_sites(&self, node: usize) -> Vec<usize> {
        let b = self.block(node);
        (0..self.dim())
            .filter(|j| !b.contains(j))
            .map(|j| self.leaf_to_site[j])
            .collect()
    }
}
