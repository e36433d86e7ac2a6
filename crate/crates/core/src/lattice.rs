//! Ginzburg–Landau potentials on periodic lattices.
//!
//! For a field `x` on a periodic chain (`d` sites, mesh `h = 1/d`) or square
//! grid (`m x m` sites, mesh `h = 1/m`):
//!
//! ```text
//! V(x) = h^k * ( λ/2 Σ_{v~w} ((x_v - x_w)/h)^2 + 1/(4λ) Σ_v ((1 - x_v^2)^2 + a x_v^3) )
//! ```
//!
//! with `k = 1` on the chain, `k = 2` on the grid, `λ = lambda_factor * h`, and
//! each unordered nearest-neighbour pair counted once. Grid states are stored
//! row-major.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{check_dim, Error, Result};
use crate::potential::Potential;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Geometry {
    Chain1D,
    Grid2D,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialSpec {
    pub geometry: Geometry,
    pub d: usize,
    pub lambda_factor: f64,
    pub cubic_a: f64,
}

impl PotentialSpec {
    pub fn chain(d: usize, lambda_factor: f64, cubic_a: f64) -> Self {
        PotentialSpec {
            geometry: Geometry::Chain1D,
            d,
            lambda_factor,
            cubic_a,
        }
    }

    pub fn grid(d: usize, lambda_factor: f64, cubic_a: f64) -> Self {
        PotentialSpec {
            geometry: Geometry::Grid2D,
            d,
            lambda_factor,
            cubic_a,
        }
    }

    /// Side length of the grid; `d` itself for a chain.
    pub fn side(&self) -> Option<usize> {
        match self.geometry {
            Geometry::Chain1D => Some(self.d),
            Geometry::Grid2D => perfect_sqrt(self.d),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::invalid("d", "lattice needs at least 2 sites"));
        }
        if self.geometry == Geometry::Grid2D && perfect_sqrt(self.d).is_none() {
            return Err(Error::invalid(
                "d",
                alloc::format!("{} is not a perfect square", self.d),
            ));
        }
        if !(self.lambda_factor > 0.0 && self.lambda_factor.is_finite()) {
            return Err(Error::invalid(
                "lambda_factor",
                "must be positive and finite",
            ));
        }
        if !self.cubic_a.is_finite() {
            return Err(Error::invalid("cubic_a", "must be finite"));
        }
        Ok(())
    }
}

fn perfect_sqrt(d: usize) -> Option<usize> {
    let m = (d as f64).sqrt().round() as usize;
    (m * m == d).then_some(m)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradVector(pub Vec<f64>);

impl GradVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// A Ginzburg–Landau lattice potential. Immutable after construction.
#[derive(Clone, Debug)]
pub struct GinzburgLandau {
    spec: PotentialSpec,
    h: f64,
    lambda: f64,
    bond_coef: f64,
    local_coef: f64,
    bonds: Vec<(u32, u32)>,
}

pub fn build_potential(spec: PotentialSpec) -> Result<GinzburgLandau> {
    GinzburgLandau::new(spec)
}

impl GinzburgLandau {
    pub fn new(spec: PotentialSpec) -> Result<Self> {
        spec.validate()?;
        let d = spec.d;
        let (h, exponent, bonds) = match spec.geometry {
            Geometry::Chain1D => {
                let bonds = (0..d).map(|i| (i as u32, ((i + 1) % d) as u32)).collect();
                (1.0 / d as f64, 1, bonds)
            }
            Geometry::Grid2D => {
                let m = perfect_sqrt(d).expect("validated");
                let mut bonds = Vec::with_capacity(2 * d);
                for r in 0..m {
                    for c in 0..m {
                        let s = (r * m + c) as u32;
                        bonds.push((s, (r * m + (c + 1) % m) as u32));
                        bonds.push((s, (((r + 1) % m) * m + c) as u32));
                    }
                }
                (1.0 / m as f64, 2, bonds)
            }
        };
        let lambda = spec.lambda_factor * h;
        let scale = h.powi(exponent);
        Ok(GinzburgLandau {
            bond_coef: scale * lambda / (2.0 * h * h),
            local_coef: scale / (4.0 * lambda),
            spec,
            h,
            lambda,
            bonds,
        })
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn mesh_width(&self) -> f64 {
        self.h
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Unordered nearest-neighbour pairs.
    pub fn bonds(&self) -> &[(u32, u32)] {
        &self.bonds
    }

    pub fn energy(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.spec.d, x.len())?;
        Ok(self.value(x))
    }

    pub fn grad(&self, x: &[f64]) -> Result<GradVector> {
        check_dim(self.spec.d, x.len())?;
        let mut g = alloc::vec![0.0; x.len()];
        self.value_and_grad(x, &mut g);
        Ok(GradVector(g))
    }

    #[inline]
    fn local(&self, v: f64) -> f64 {
        let w = 1.0 - v * v;
        w * w + self.spec.cubic_a * v * v * v
    }
}

impl Potential for GinzburgLandau {
    fn dim(&self) -> usize {
        self.spec.d
    }

    fn value(&self, x: &[f64]) -> f64 {
        let kinetic: f64 = self
            .bonds
            .iter()
            .map(|&(v, w)| {
                let diff = x[v as usize] - x[w as usize];
                diff * diff
            })
            .sum();
        let local: f64 = x.iter().map(|&v| self.local(v)).sum();
        self.bond_coef * kinetic + self.local_coef * local
    }

    fn value_and_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let a = self.spec.cubic_a;
        let mut local = 0.0;
        for (g, &v) in grad.iter_mut().zip(x) {
            local += self.local(v);
            *g = self.local_coef * (-4.0 * v * (1.0 - v * v) + 3.0 * a * v * v);
        }
        let mut kinetic = 0.0;
        let two_b = 2.0 * self.bond_coef;
        for &(v, w) in &self.bonds {
            let (v, w) = (v as usize, w as usize);
            let diff = x[v] - x[w];
            kinetic += diff * diff;
            grad[v] += two_b * diff;
            grad[w] -= two_b * diff;
        }
        self.bond_coef * kinetic + self.local_coef * local
    }
}
