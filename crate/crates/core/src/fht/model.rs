use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::fht::basis::FourierBasis;
use crate::fht::tree::DimensionTree;
use crate::quadrature::gauss_legendre;

/// A dense 3-tensor stored row-major: entry `(i, j, k)` lives at
/// `(i * shape[1] + j) * shape[2] + k`. Leaf cores are `(n, r, 1)`, internal
/// cores `(r_left, r_right, r_parent)` and the root core `(r_left, r_right, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Core {
    shape: [usize; 3],
    data: Vec<f64>,
}

impl Core {
    pub fn new(shape: [usize; 3], data: Vec<f64>) -> Result<Self> {
        let len = shape[0] * shape[1] * shape[2];
        if data.len() != len {
            return Err(Error::Shape(alloc::format!(
                "core of shape {shape:?} needs {len} values, got {}",
                data.len()
            )));
        }
        Ok(Core { shape, data })
    }

    pub fn zeros(shape: [usize; 3]) -> Self {
        Core {
            shape,
            data: alloc::vec![0.0; shape[0] * shape[1] * shape[2]],
        }
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.shape[1] + j) * self.shape[2] + k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let s = self.shape;
        self.data[(i * s[1] + j) * s[2] + k] = v;
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.data {
            *v *= c;
        }
    }
}

/// Row-major `rows x cols` matrix produced while contracting the tree.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Block {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Block {
    /// `v^T C` for a leaf core `C` of shape `(n, r, 1)`.
    pub fn leaf_row(core: &Core, v: &[f64]) -> Block {
        let [n, r, _] = core.shape;
        let mut data = alloc::vec![0.0; r];
        for a in 0..n {
            let va = v[a];
            if va != 0.0 {
                let row = &core.data[a * r..(a + 1) * r];
                for (o, c) in data.iter_mut().zip(row) {
                    *o += va * c;
                }
            }
        }
        Block {
            rows: 1,
            cols: r,
            data,
        }
    }

    /// The leaf core itself, leaving the leaf variable open.
    pub fn leaf_open(core: &Core) -> Block {
        Block {
            rows: core.shape[0],
            cols: core.shape[1],
            data: core.data.clone(),
        }
    }

    /// `R[(ia, ib), p] = sum A[ia, al] B[ib, be] G[al, be, p]`.
    pub fn combine(a: &Block, b: &Block, g: &Core) -> Block {
        let [ra, rb, rp] = g.shape;
        debug_assert_eq!(a.cols, ra);
        debug_assert_eq!(b.cols, rb);
        let mut out = alloc::vec![0.0; a.rows * b.rows * rp];
        let mut t = alloc::vec![0.0; rb * rp];
        for ia in 0..a.rows {
            t.fill(0.0);
            for al in 0..ra {
                let av = a.data[ia * ra + al];
                if av == 0.0 {
                    continue;
                }
                let gs = &g.data[al * rb * rp..(al + 1) * rb * rp];
                for (tv, gv) in t.iter_mut().zip(gs) {
                    *tv += av * gv;
                }
            }
            for ib in 0..b.rows {
                let o = &mut out[(ia * b.rows + ib) * rp..(ia * b.rows + ib + 1) * rp];
                for be in 0..rb {
                    let bv = b.data[ib * rb + be];
                    if bv == 0.0 {
                        continue;
                    }
                    for (ov, tv) in o.iter_mut().zip(&t[be * rp..(be + 1) * rp]) {
                        *ov += bv * tv;
                    }
                }
            }
        }
        Block {
            rows: a.rows * b.rows,
            cols: rp,
            data: out,
        }
    }
}

/// A functional hierarchical tensor density over a binary dimension tree.
#[derive(Clone, Debug, PartialEq)]
pub struct FhtModel {
    tree: DimensionTree,
    basis: FourierBasis,
    cores: Vec<Core>,
}

impl FhtModel {
    /// Assembles a model from per-node cores in heap order, checking that
    /// shapes agree along every edge.
    pub fn new(tree: DimensionTree, basis: FourierBasis, cores: Vec<Core>) -> Result<Self> {
        if cores.len() != tree.node_count() {
            return Err(Error::Shape(alloc::format!(
                "expected {} cores, got {}",
                tree.node_count(),
                cores.len()
            )));
        }
        let n = basis.len();
        for (q, c) in cores.iter().enumerate() {
            let s = c.shape();
            if s.iter().any(|&v| v == 0) {
                return Err(Error::Shape(alloc::format!(
                    "core {q} has empty shape {s:?}"
                )));
            }
            match tree.children(q) {
                None => {
                    if s[0] != n || s[2] != 1 {
                        return Err(Error::Shape(alloc::format!(
                            "leaf core {q} has shape {s:?}, basis size {n}"
                        )));
                    }
                }
                Some((a, b)) => {
                    let ra = edge_rank_of(&tree, &cores, a);
                    let rb = edge_rank_of(&tree, &cores, b);
                    if s[0] != ra || s[1] != rb {
                        return Err(Error::Shape(alloc::format!(
                            "core {q} has shape {s:?} but its children carry ranks ({ra}, {rb})"
                        )));
                    }
                    if q == 0 && s[2] != 1 {
                        return Err(Error::Shape(alloc::format!("root core has shape {s:?}")));
                    }
                }
            }
        }
        Ok(FhtModel { tree, basis, cores })
    }

    pub fn tree(&self) -> &DimensionTree {
        &self.tree
    }

    pub fn basis(&self) -> &FourierBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.tree.dim()
    }

    pub fn cores(&self) -> &[Core] {
        &self.cores
    }

    pub fn core(&self, node: usize) -> &Core {
        &self.cores[node]
    }

    pub fn into_cores(self) -> Vec<Core> {
        self.cores
    }

    /// Rank of the edge above `node` (1 for the root).
    pub fn edge_rank(&self, node: usize) -> usize {
        if node == 0 {
            1
        } else {
            edge_rank_of(&self.tree, &self.cores, node)
        }
    }

    /// Edge ranks above nodes `1..node_count` (level order, left to right).
    pub fn ranks(&self) -> Vec<usize> {
        (1..self.tree.node_count())
            .map(|q| self.edge_rank(q))
            .collect()
    }

    pub(crate) fn contract<F: FnMut(usize, &Core) -> Block>(&self, mut leaf: F) -> Block {
        self.contract_node(0, &mut leaf)
    }

    fn contract_node<F: FnMut(usize, &Core) -> Block>(&self, q: usize, leaf: &mut F) -> Block {
        match self.tree.children(q) {
            None => leaf(q + 1 - self.dim(), &self.cores[q]),
            Some((a, b)) => {
                let ba = self.contract_node(a, leaf);
                let bb = self.contract_node(b, leaf);
                Block::combine(&ba, &bb, &self.cores[q])
            }
        }
    }

    /// Density value at `x` (site layout).
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        let mut buf = alloc::vec![0.0; self.basis.len()];
        let out = self.contract(|j, c| {
            self.basis.eval_into(x[self.tree.leaf_site(j)], &mut buf);
            Block::leaf_row(c, &buf)
        });
        Ok(out.data[0])
    }

    /// Integral over `[-w, w]^d`.
    pub fn integral(&self) -> f64 {
        let iota = self.basis.integrals();
        self.contract(|_, c| Block::leaf_row(c, &iota)).data[0]
    }

    /// Copy with the root core divided by the integral.
    pub fn normalized(&self) -> Result<FhtModel> {
        let z = self.integral();
        if z == 0.0 || !z.is_finite() {
            return Err(Error::Degenerate("model integral is zero or not finite"));
        }
        let mut m = self.clone();
        for v in m.cores[0].data_mut() {
            *v /= z;
        }
        Ok(m)
    }

    /// Root core multiplied by `c`.
    pub fn scaled(&self, c: f64) -> FhtModel {
        let mut m = self.clone();
        m.cores[0].scale(c);
        m
    }

    fn leaf_of_site(&self, site: usize) -> Result<usize> {
        if site >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: site,
                dim: self.dim(),
            });
        }
        Ok(self.tree.site_leaf(site).expect("tree covers every site"))
    }

    /// Basis coefficients of the one-site marginal.
    pub fn marginal_coefficients_1d(&self, site: usize) -> Result<Vec<f64>> {
        let lj = self.leaf_of_site(site)?;
        let iota = self.basis.integrals();
        let out = self.contract(|j, c| {
            if j == lj {
                Block::leaf_open(c)
            } else {
                Block::leaf_row(c, &iota)
            }
        });
        Ok(out.data)
    }

    /// Basis coefficients `M[a * n + b]` of the two-site marginal in `(i, j)`.
    pub fn marginal_coefficients_2d(&self, i: usize, j: usize) -> Result<Vec<f64>> {
        let li = self.leaf_of_site(i)?;
        let lj = self.leaf_of_site(j)?;
        if i == j {
            return Err(Error::invalid(
                "pair",
                alloc::format!("marginal needs distinct sites, got ({i}, {j})"),
            ));
        }
        let iota = self.basis.integrals();
        let out = self.contract(|l, c| {
            if l == li || l == lj {
                Block::leaf_open(c)
            } else {
                Block::leaf_row(c, &iota)
            }
        });
        if li < lj {
            return Ok(out.data);
        }
        let n = self.basis.len();
        let mut t = alloc::vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                t[a * n + b] = out.data[b * n + a];
            }
        }
        Ok(t)
    }

    /// One-site marginal evaluated on `grid`.
    pub fn marginal_1d(&self, site: usize, grid: &[f64]) -> Result<Vec<f64>> {
        let c = self.marginal_coefficients_1d(site)?;
        let mut buf = alloc::vec![0.0; self.basis.len()];
        Ok(grid
            .iter()
            .map(|&t| {
                self.basis.eval_into(t, &mut buf);
                buf.iter().zip(&c).map(|(a, b)| a * b).sum()
            })
            .collect())
    }

    /// Exact two-site marginal on the tensor grid `grid_i x grid_j`, row-major
    /// with `x_i` varying slowest. Values are not clipped.
    pub fn marginal_2d(
        &self,
        i: usize,
        j: usize,
        grid_i: &[f64],
        grid_j: &[f64],
    ) -> Result<Vec<f64>> {
        let m = self.marginal_coefficients_2d(i, j)?;
        let n = self.basis.len();
        let pi: Vec<Vec<f64>> = grid_i.iter().map(|&t| self.basis.eval(t)).collect();
        let pj: Vec<Vec<f64>> = grid_j.iter().map(|&t| self.basis.eval(t)).collect();
        // h[b] = sum_a psi_a(x_i) M[a, b], then contract with psi(x_j).
        let mut out = Vec::with_capacity(grid_i.len() * grid_j.len());
        let mut h = alloc::vec![0.0; n];
        for vi in &pi {
            h.fill(0.0);
            for a in 0..n {
                for b in 0..n {
                    h[b] += vi[a] * m[a * n + b];
                }
            }
            for vj in &pj {
                out.push(h.iter().zip(vj).map(|(x, y)| x * y).sum());
            }
        }
        Ok(out)
    }

    /// `E[x_i]` and `E[x_i x_j]` (or `E[x_i^2]` when `i == j`) under the model
    /// renormalized by its integral, by Gauss–Legendre quadrature.
    pub fn moments(&self, i: usize, j: usize) -> Result<(f64, f64)> {
        let z = self.integral();
        if z == 0.0 || !z.is_finite() {
            return Err(Error::Degenerate("model integral is zero or not finite"));
        }
        let m1 = self.basis.moment_vector(1, MOMENT_POINTS);
        let ci = self.marginal_coefficients_1d(i)?;
        let mean: f64 = ci.iter().zip(&m1).map(|(a, b)| a * b).sum();
        let second = if i == j {
            let m2 = self.basis.moment_vector(2, MOMENT_POINTS);
            ci.iter().zip(&m2).map(|(a, b)| a * b).sum()
        } else {
            let m = self.marginal_coefficients_2d(i, j)?;
            let n = self.basis.len();
            let mut s = 0.0;
            for a in 0..n {
                for b in 0..n {
                    s += m[a * n + b] * m1[a] * m1[b];
                }
            }
            s
        };
        Ok((mean / z, second / z))
    }
}

pub(crate) const MOMENT_POINTS: usize = 512;

fn edge_rank_of(tree: &DimensionTree, cores: &[Core], node: usize) -> usize {
    let s = cores[node].shape();
    if tree.is_leaf(node) {
        s[1]
    } else {
        s[2]
    }
}

pub fn fht_eval(model: &FhtModel, x: &[f64]) -> Result<f64> {
    model.eval(x)
}

pub fn fht_integral(model: &FhtModel) -> f64 {
    model.integral()
}

pub fn normalize(model: &FhtModel) -> Result<FhtModel> {
    model.normalized()
}

pub fn marginal_2d(
    model: &FhtModel,
    i: usize,
    j: usize,
    grid_i: &[f64],
    grid_j: &[f64],
) -> Result<Vec<f64>> {
    model.marginal_2d(i, j, grid_i, grid_j)
}

/// `points` equispaced values spanning `[lo, hi]` inclusive.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return alloc::vec![lo];
    }
    let step = (hi - lo) / (points - 1) as f64;
    (0..points)
        .map(|k| {
            if k + 1 == points {
                hi
            } else {
                lo + k as f64 * step
            }
        })
        .collect()
}

/// Trapezoid-rule integral of row-major samples on the grid `gx x gy`.
pub fn trapezoid_2d(values: &[f64], gx: &[f64], gy: &[f64]) -> f64 {
    let wx = trapezoid_weights(gx);
    let wy = trapezoid_weights(gy);
    let mut s = 0.0;
    for (a, wa) in wx.iter().enumerate() {
        for (b, wb) in wy.iter().enumerate() {
            s += wa * wb * values[a * gy.len() + b];
        }
    }
    s
}

fn trapezoid_weights(g: &[f64]) -> Vec<f64> {
    let mut w = alloc::vec![0.0; g.len()];
    for k in 0..g.len().saturating_sub(1) {
        let h = 0.5 * (g[k + 1] - g[k]);
        w[k] += h;
        w[k + 1] += h;
    }
    w
}

/// Gauss–Legendre tensor-grid integral of a function on `[-w, w]^2`.
pub fn quadrature_2d<F: FnMut(f64, f64) -> f64>(half_width: f64, points: usize, mut f: F) -> f64 {
    let (x, w) = gauss_legendre(points, -half_width, half_width);
    let mut s = 0.0;
    for (a, wa) in x.iter().zip(&w) {
        for (b, wb) in x.iter().zip(&w) {
            s += wa * wb * f(*a, *b);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fht::tree::{build_tree, SiteOrder};
    use crate::rng::SeedPath;
    use proptest::prelude::*;
    use rand::Rng;

    pub(crate) fn random_model(d: usize, q: usize, rank: usize, seed: u64) -> FhtModel {
        let tree = build_tree(d, SiteOrder::Identity).unwrap();
        let basis = FourierBasis::new(q, 2.5).unwrap();
        let mut rng = SeedPath::new(seed).rng();
        let mut cores = Vec::new();
        for node in 0..tree.node_count() {
            let shape = if tree.is_leaf(node) {
                [basis.len(), rank, 1]
            } else if node == 0 {
                [rank, rank, 1]
            } else {
                [rank, rank, rank]
            };
            let len = shape.iter().product();
            cores.push(
                Core::new(
                    shape,
                    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect(),
                )
                .unwrap(),
            );
        }
        FhtModel::new(tree, basis, cores).unwrap()
    }

    /// Full coefficient tensor by explicit summation over every internal index.
    fn brute_force_d4(m: &FhtModel, x: &[f64]) -> f64 {
        let n = m.basis().len();
        let psi: Vec<Vec<f64>> = x.iter().map(|&t| m.basis().eval(t)).collect();
        let c = m.cores();
        let (r1, r2) = (m.edge_rank(1), m.edge_rank(2));
        let (r3, r4, r5, r6) = (
            m.edge_rank(3),
            m.edge_rank(4),
            m.edge_rank(5),
            m.edge_rank(6),
        );
        let mut total = 0.0;
        for i0 in 0..n {
            for i1 in 0..n {
                for i2 in 0..n {
                    for i3 in 0..n {
                        let mut coef = 0.0;
                        for a in 0..r1 {
                            for b in 0..r2 {
                                for e3 in 0..r3 {
                                    for e4 in 0..r4 {
                                        for e5 in 0..r5 {
                                            for e6 in 0..r6 {
                                                coef += c[0].get(a, b, 0)
                                                    * c[1].get(e3, e4, a)
                                                    * c[2].get(e5, e6, b)
                                                    * c[3].get(i0, e3, 0)
                                                    * c[4].get(i1, e4, 0)
                                                    * c[5].get(i2, e5, 0)
                                                    * c[6].get(i3, e6, 0);
                                            }
                                        }
                                    }
                                }
                            }
                        }
                        total += coef * psi[0][i0] * psi[1][i1] * psi[2][i2] * psi[3][i3];
                    }
                }
            }
        }
        total
    }

    #[test]
    fn d4_contraction_matches_brute_force() {
        let m = random_model(4, 2, 2, 7);
        let mut rng = SeedPath::new(1).rng();
        for _ in 0..100 {
            let x: Vec<f64> = (0..4).map(|_| rng.random_range(-2.5..2.5)).collect();
            let a = m.eval(&x).unwrap();
            let b = brute_force_d4(&m, &x);
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-3), "{a} vs {b}");
        }
    }

    fn constant_model(d: usize, scalar: f64) -> FhtModel {
        let tree = build_tree(d, SiteOrder::Identity).unwrap();
        let basis = FourierBasis::new(2, 2.5).unwrap();
        let cores = (0..tree.node_count())
            .map(|q| {
                if tree.is_leaf(q) {
                    let mut c = Core::zeros([basis.len(), 1, 1]);
                    c.set(0, 0, 0, 1.0);
                    c
                } else {
                    Core::new([1, 1, 1], alloc::vec![scalar]).unwrap()
                }
            })
            .collect();
        FhtModel::new(tree, basis, cores).unwrap()
    }

    #[test]
    fn constant_rank_one_model() {
        let m = constant_model(4, 1.5);
        // Three internal cores, each 1.5; each leaf contributes 1/sqrt(5).
        let want = 1.5f64.powi(3) / 25.0;
        for x in [[0.0; 4], [1.0, -2.0, 0.3, 2.4]] {
            assert!((m.eval(&x).unwrap() - want).abs() < 1e-15);
        }
        // Integral over [-2.5, 2.5]^4 of a constant.
        assert!((m.integral() - want * 625.0).abs() < 1e-12);
    }

    #[test]
    fn d2_integral_matches_quadrature() {
        let m = random_model(2, 3, 2, 4);
        let quad = quadrature_2d(2.5, 64, |a, b| m.eval(&[a, b]).unwrap());
        assert!((quad - m.integral()).abs() < 1e-10);
    }

    #[test]
    fn d2_model_is_explicit_double_sum() {
        let tree = build_tree(2, SiteOrder::Identity).unwrap();
        let basis = FourierBasis::new(1, 2.5).unwrap();
        let c1 = Core::new([3, 2, 1], alloc::vec![1.0, 0.5, -0.2, 0.3, 0.4, 0.0]).unwrap();
        let c2 = Core::new([3, 2, 1], alloc::vec![0.7, 0.1, 0.0, -1.0, 0.2, 0.9]).unwrap();
        let root = Core::new([2, 2, 1], alloc::vec![1.0, 2.0, -0.5, 0.25]).unwrap();
        let m = FhtModel::new(
            tree,
            basis,
            alloc::vec![root.clone(), c1.clone(), c2.clone()],
        )
        .unwrap();
        let x = [0.4, -1.3];
        let (p, q) = (basis.eval(x[0]), basis.eval(x[1]));
        let mut want = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let mut coef = 0.0;
                for a in 0..2 {
                    for b in 0..2 {
                        coef += c1.get(i, a, 0) * c2.get(j, b, 0) * root.get(a, b, 0);
                    }
                }
                want += coef * p[i] * q[j];
            }
        }
        assert!((m.eval(&x).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn normalize_properties() {
        let m = random_model(8, 2, 2, 9).scaled(10.0);
        let n = m.normalized().unwrap();
        assert!((n.integral() - 1.0).abs() < 1e-12);
        let nn = n.normalized().unwrap();
        for (a, b) in n.cores()[0].data().iter().zip(nn.cores()[0].data()) {
            assert!((a - b).abs() <= 1e-15 * a.abs().max(1.0));
        }
        let n7 = m.scaled(7.0).normalized().unwrap();
        let mut rng = SeedPath::new(3).rng();
        for _ in 0..20 {
            let x: Vec<f64> = (0..8).map(|_| rng.random_range(-2.5..2.5)).collect();
            let (a, b) = (n.eval(&x).unwrap(), n7.eval(&x).unwrap());
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
        }
        assert!(m.scaled(0.0).normalized().is_err());
    }

    #[test]
    fn rejects_inconsistent_shapes() {
        let m = random_model(4, 1, 2, 1);
        let mut cores = m.cores().to_vec();
        cores[1] = Core::zeros([2, 3, 2]);
        assert!(FhtModel::new(m.tree().clone(), *m.basis(), cores).is_err());
        assert!(Core::new([2, 2, 2], alloc::vec![0.0; 7]).is_err());
    }

    #[test]
    fn separable_marginal_factorizes() {
        let mut m = random_model(4, 2, 1, 12);
        m = m.normalized().unwrap();
        let g = linspace(-2.5, 2.5, 13);
        let joint = m.marginal_2d(1, 3, &g, &g).unwrap();
        let z = m.integral();
        let m1 = m.marginal_1d(1, &g).unwrap();
        let m3 = m.marginal_1d(3, &g).unwrap();
        for a in 0..g.len() {
            for b in 0..g.len() {
                let want = m1[a] * m3[b] / z;
                assert!((joint[a * g.len() + b] - want).abs() <= 1e-10 * want.abs().max(1e-8));
            }
        }
    }

    #[test]
    fn marginal_2d_integrates_to_model_integral() {
        let m = random_model(8, 3, 2, 21).normalized().unwrap();
        let g = linspace(-2.5, 2.5, 200);
        let vals = m.marginal_2d(2, 5, &g, &g).unwrap();
        assert!((trapezoid_2d(&vals, &g, &g) - 1.0).abs() < 1e-3);
        let swapped = m.marginal_2d(5, 2, &g, &g).unwrap();
        assert!((vals[3 * 200 + 150] - swapped[150 * 200 + 3]).abs() < 1e-12);
        assert!(m.marginal_2d(2, 8, &g, &g).is_err());
        assert!(m.marginal_2d(2, 2, &g, &g).is_err());
    }

    #[test]
    fn moments_match_quadrature_of_marginal() {
        let m = random_model(4, 2, 2, 5);
        let (mean, second) = m.moments(0, 2).unwrap();
        let z = m.integral();
        let qm = quadrature_2d(2.5, 64, |a, _| a * m.marginal_1d(0, &[a]).unwrap()[0]) / (5.0 * z);
        let qs = quadrature_2d(2.5, 64, |a, b| {
            a * b * m.marginal_2d(0, 2, &[a], &[b]).unwrap()[0]
        }) / z;
        assert!((mean - qm).abs() < 1e-9);
        assert!((second - qs).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn multilinear_in_each_core(node in 0usize..15, c in -3.0f64..3.0, seed in any::<u64>()) {
            let m = random_model(8, 1, 2, seed);
            let mut cores = m.cores().to_vec();
            cores[node].scale(c);
            let scaled = FhtModel::new(m.tree().clone(), *m.basis(), cores).unwrap();
            let x = [0.1, -0.4, 1.3, 2.2, -2.0, 0.0, 0.7, -1.1];
            let (a, b) = (m.eval(&x).unwrap(), scaled.eval(&x).unwrap());
            prop_assert!((b - c * a).abs() <= 1e-12 * a.abs().max(1e-6));
            prop_assert!((scaled.integral() - c * m.integral()).abs() <= 1e-12 * m.integral().abs().max(1e-6));
        }
    }
}
