use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fht::Core;

/// Gauge obtained from a truncated SVD `Z ~ U_r S_r V_r^T`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gauge {
    /// `U_r S_r`: the sketch of the block's gauged functions.
    pub left: DMatrix<f64>,
    /// `V_r`: the sketch of the complement's gauged functions.
    pub right: DMatrix<f64>,
    /// All singular values of `Z`, descending.
    pub singular_values: Vec<f64>,
    pub requested_rank: usize,
}

impl Gauge {
    pub fn rank(&self) -> usize {
        self.left.ncols()
    }
}

/// Truncated SVD gauge of `z` at rank `rank`. Singular values at or below
/// `tol * sigma_1` are dropped (logged). Each left singular vector is signed
/// so its first nonzero entry is positive.
pub fn gauge_from_svd(z: &DMatrix<f64>, rank: usize, tol: f64) -> Result<Gauge> {
    let (rows, cols) = z.shape();
    if rank == 0 || rank > rows.min(cols) {
        return Err(Error::invalid(
            "rank",
            alloc::format!(
                "rank {rank} not within 1..={} for a {rows}x{cols} matrix",
                rows.min(cols)
            ),
        ));
    }
    if !z.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite {
            context: "cross-moment matrix",
        });
    }
    if z.iter().all(|&v| v == 0.0) {
        return Err(Error::Degenerate("cross-moment matrix is zero"));
    }
    let svd = z.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let keep = sigma
        .iter()
        .take(rank)
        .filter(|&&s| s > tol * sigma[0])
        .count()
        .max(1);
    if keep < rank {
        log::warn!(
            "effective rank reduced from {rank} to {keep} (sigma = {:?})",
            &sigma[..rank]
        );
    }
    let mut left = DMatrix::zeros(rows, keep);
    let mut right = DMatrix::zeros(cols, keep);
    for (c, &k) in order.iter().take(keep).enumerate() {
        let ucol = u.column(k);
        let first = ucol
            .iter()
            .copied()
            .find(|v| v.abs() > 1e-12)
            .unwrap_or(1.0);
        let sign = if first < 0.0 { -1.0 } else { 1.0 };
        for i in 0..rows {
            left[(i, c)] = sign * ucol[i] * sigma[c];
        }
        for j in 0..cols {
            right[(j, c)] = sign * vt[(k, j)];
        }
    }
    Ok(Gauge {
        left,
        right,
        singular_values: sigma,
        requested_rank: rank,
    })
}

/// Moore–Penrose pseudo-inverse of a full-column-rank matrix; errors when
/// `sigma_min <= tol * sigma_max`.
pub fn pinv(a: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    let svd = a.clone().svd(true, true);
    let (mut smin, mut smax) = (f64::INFINITY, 0.0f64);
    for &s in svd.singular_values.iter() {
        smin = smin.min(s);
        smax = smax.max(s);
    }
    if a.ncols() > a.nrows() {
        smin = 0.0;
    }
    if !(smax > 0.0) || smin <= tol * smax {
        return Err(Error::Singular {
            smallest: smin,
            largest: smax,
        });
    }
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V^T");
    let mut sinv = DMatrix::zeros(vt.nrows(), u.ncols());
    for (k, s) in svd.singular_values.iter().enumerate() {
        sinv[(k, k)] = 1.0 / s;
    }
    Ok(vt.transpose() * sinv * u.transpose())
}

/// `out[..., a, ...] = sum_m p[a, m] t[..., m, ...]` along `mode`.
pub fn mode_product(t: &Core, mode: usize, p: &DMatrix<f64>) -> Result<Core> {
    let s = t.shape();
    if p.ncols() != s[mode] {
        return Err(Error::Shape(alloc::format!(
            "mode {mode} has size {}, factor has {} columns",
            s[mode],
            p.ncols()
        )));
    }
    let mut shape = s;
    shape[mode] = p.nrows();
    let mut out = Core::zeros(shape);
    for i in 0..s[0] {
        for j in 0..s[1] {
            for k in 0..s[2] {
                let v = t.get(i, j, k);
                if v == 0.0 {
                    continue;
                }
                let idx = [i, j, k];
                for a in 0..p.nrows() {
                    let mut o = idx;
                    o[mode] = a;
                    let cur = out.get(o[0], o[1], o[2]);
                    out.set(o[0], o[1], o[2], cur + p[(a, idx[mode])] * v);
                }
            }
        }
    }
    Ok(out)
}

/// Solves `B = G x_1 A_a x_2 A_b x_3 A_f` for `G` by mode-wise
/// pseudo-inverses. For the root pass `a_f = [[1]]`.
pub fn solve_core(
    b: &Core,
    a_a: &DMatrix<f64>,
    a_b: &DMatrix<f64>,
    a_f: &DMatrix<f64>,
    tol: f64,
) -> Result<Core> {
    let g = mode_product(b, 0, &pinv(a_a, tol)?)?;
    let g = mode_product(&g, 1, &pinv(a_b, tol)?)?;
    mode_product(&g, 2, &pinv(a_f, tol)?)
}

/// Leaf core from the basis moment matrix `M = E[psi (x) s_{I^c}]`:
/// solves `M = C A_f^T`.
pub fn solve_leaf(m: &Core, a_f: &DMatrix<f64>, tol: f64) -> Result<Core> {
    mode_product(m, 1, &pinv(a_f, tol)?)
}

pub(crate) fn core_as_matrix(c: &Core) -> DMatrix<f64> {
    let [r, k, one] = c.shape();
    debug_assert_eq!(one, 1);
    DMatrix::from_row_slice(r, k, c.data())
}
