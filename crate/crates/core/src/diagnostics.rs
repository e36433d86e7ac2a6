//! Symmetry ratio, histograms, distances and moment tables.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::ensemble::ParticleEnsemble;
use crate::error::{Error, Result};
use crate::fht::FhtModel;
use crate::quadrature::gauss_legendre;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioReport {
    pub u_plus: f64,
    pub u_minus: f64,
    pub iota: f64,
    pub sample_count: usize,
}

/// Streaming, mergeable accumulator for the bump statistics
/// `g_pm(y) = exp(-(2/d) sum_j (y_j -+ 1)^2)`. Sums are stored relative to
/// the largest exponent seen, so nothing overflows.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioAccumulator {
    shift: f64,
    plus: f64,
    minus: f64,
    count: usize,
}

impl Default for RatioAccumulator {
    fn default() -> Self {
        RatioAccumulator {
            shift: f64::NEG_INFINITY,
            plus: 0.0,
            minus: 0.0,
            count: 0,
        }
    }
}

impl RatioAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, y: &[f64]) {
        let d = y.len() as f64;
        let (mut sp, mut sm) = (0.0, 0.0);
        for &v in y {
            sp += (v - 1.0) * (v - 1.0);
            sm += (v + 1.0) * (v + 1.0);
        }
        let lp = -2.0 / d * sp;
        let lm = -2.0 / d * sm;
        self.count += 1;
        let top = lp.max(lm);
        if !top.is_finite() {
            return;
        }
        self.rescale(top);
        self.plus += (lp - self.shift).exp();
        self.minus += (lm - self.shift).exp();
    }

    fn rescale(&mut self, top: f64) {
        if top > self.shift {
            if self.shift.is_finite() {
                let f = (self.shift - top).exp();
                self.plus *= f;
                self.minus *= f;
            }
            self.shift = top;
        }
    }

    pub fn merge(&mut self, other: &RatioAccumulator) {
        self.count += other.count;
        if !other.shift.is_finite() {
            return;
        }
        self.rescale(other.shift);
        let f = (other.shift - self.shift).exp();
        self.plus += f * other.plus;
        self.minus += f * other.minus;
    }

    pub fn report(&self) -> Result<RatioReport> {
        if self.count == 0 {
            return Err(Error::Empty("samples"));
        }
        let total = self.plus + self.minus;
        let scale = self.shift.exp() / self.count as f64;
        let (u_plus, u_minus) = (self.plus * scale, self.minus * scale);
        if !(total > 0.0) || !(u_plus + u_minus > 0.0) {
            return Err(Error::Degenerate("both bump statistics vanish"));
        }
        Ok(RatioReport {
            u_plus,
            u_minus,
            iota: self.plus / total,
            sample_count: self.count,
        })
    }
}

pub fn plus_minus_ratio(samples: &ParticleEnsemble) -> Result<RatioReport> {
    let mut acc = RatioAccumulator::new();
    for y in samples.iter() {
        acc.push(y);
    }
    acc.report()
}

/// A square 2D histogram over `[lo, hi]^2`, row-major with the first
/// coordinate varying slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram2D {
    pub bins: usize,
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    /// Normalized so that `sum density * cell_area = 1`.
    pub density: Vec<f64>,
    pub out_of_box: usize,
}

impl Histogram2D {
    pub fn cell_width(&self) -> f64 {
        (self.hi - self.lo) / self.bins as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_width() * self.cell_width()
    }

    /// Cell centers along one axis.
    pub fn centers(&self) -> Vec<f64> {
        let w = self.cell_width();
        (0..self.bins)
            .map(|k| self.lo + (k as f64 + 0.5) * w)
            .collect()
    }

    /// Histogram of the exact cell masses of `f`, by Gauss–Legendre
    /// quadrature with `points` nodes per cell and axis, normalized over the box.
    pub fn from_density<F: FnMut(f64, f64) -> f64>(
        bins: usize,
        lo: f64,
        hi: f64,
        points: usize,
        mut f: F,
    ) -> Result<Self> {
        check_binning(bins, lo, hi)?;
        let w = (hi - lo) / bins as f64;
        let (x, wt) = gauss_legendre(points, 0.0, w);
        let mut mass = alloc::vec![0.0; bins * bins];
        for a in 0..bins {
            for b in 0..bins {
                let (x0, y0) = (lo + a as f64 * w, lo + b as f64 * w);
                let mut s = 0.0;
                for (xa, wa) in x.iter().zip(&wt) {
                    for (xb, wb) in x.iter().zip(&wt) {
                        s += wa * wb * f(x0 + xa, y0 + xb);
                    }
                }
                mass[a * bins + b] = s;
            }
        }
        let total: f64 = mass.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Degenerate("density has no mass in the box"));
        }
        let area = w * w;
        Ok(Histogram2D {
            bins,
            lo,
            hi,
            counts: alloc::vec![0; bins * bins],
            density: mass.iter().map(|m| m / (total * area)).collect(),
            out_of_box: 0,
        })
    }
}

fn check_binning(bins: usize, lo: f64, hi: f64) -> Result<()> {
    if bins < 2 {
        return Err(Error::invalid(
            "bins",
            alloc::format!("need at least 2, got {bins}"),
        ));
    }
    if !(hi > lo && lo.is_finite() && hi.is_finite()) {
        return Err(Error::invalid(
            "box",
            alloc::format!("empty range [{lo}, {hi}]"),
        ));
    }
    Ok(())
}

/// Histogram of `(x_i, x_j)` pairs with `bins x bins` cells over `[lo, hi]^2`.
pub fn empirical_marginal(
    samples: &ParticleEnsemble,
    i: usize,
    j: usize,
    bins: usize,
    lo: f64,
    hi: f64,
) -> Result<Histogram2D> {
    let d = samples.dim();
    for k in [i, j] {
        if k >= d {
            return Err(Error::IndexOutOfRange { index: k, dim: d });
        }
    }
    if i == j {
        return Err(Error::invalid(
            "pair",
            alloc::format!("marginal needs distinct sites, got ({i}, {j})"),
        ));
    }
    check_binning(bins, lo, hi)?;
    let w = (hi - lo) / bins as f64;
    let cell = |v: f64| -> Option<usize> {
        if !(v >= lo && v <= hi) {
            return None;
        }
        Some((((v - lo) / w) as usize).min(bins - 1))
    };
    let mut counts = alloc::vec![0u64; bins * bins];
    let mut out_of_box = 0;
    for x in samples.iter() {
        match (cell(x[i]), cell(x[j])) {
            (Some(a), Some(b)) => counts[a * bins + b] += 1,
            _ => out_of_box += 1,
        }
    }
    let inside = (samples.len() - out_of_box) as f64;
    let area = w * w;
    let density = counts
        .iter()
        .map(|&c| {
            if inside > 0.0 {
                c as f64 / (inside * area)
            } else {
                0.0
            }
        })
        .collect();
    Ok(Histogram2D {
        bins,
        lo,
        hi,
        counts,
        density,
        out_of_box,
    })
}

/// `(1/2) sum |h1 - h2| * cell_area` over a shared binning.
pub fn tv_distance(h1: &Histogram2D, h2: &Histogram2D) -> Result<f64> {
    if h1.bins != h2.bins || h1.lo != h2.lo || h1.hi != h2.hi {
        return Err(Error::Shape(alloc::format!(
            "binning mismatch: {}x[{}, {}] vs {}x[{}, {}]",
            h1.bins,
            h1.lo,
            h1.hi,
            h2.bins,
            h2.lo,
            h2.hi
        )));
    }
    let area = h1.cell_area();
    Ok(0.5
        * h1.density
            .iter()
            .zip(&h2.density)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
        * area)
}

/// Fraction of the total mass of a gridded density lying within `radius` of
/// each center, by Riemann sums on a uniform grid. Values are taken as signed,
/// so a density estimate with negative lobes is measured by its integral.
/// `values` is row-major on `gx x gy` points.
pub fn grid_ball_masses(
    values: &[f64],
    gx: &[f64],
    gy: &[f64],
    centers: &[(f64, f64)],
    radius: f64,
) -> Result<Vec<f64>> {
    if values.len() != gx.len() * gy.len() {
        return Err(Error::Shape(alloc::format!(
            "{} values for a {}x{} grid",
            values.len(),
            gx.len(),
            gy.len()
        )));
    }
    let mut total = 0.0;
    let mut inside = alloc::vec![0.0; centers.len()];
    for (a, &x) in gx.iter().enumerate() {
        for (b, &y) in gy.iter().enumerate() {
            let v = values[a * gy.len() + b];
            total += v;
            for (m, &(cx, cy)) in inside.iter_mut().zip(centers) {
                if (x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius {
                    *m += v;
                }
            }
        }
    }
    if !(total > 0.0) {
        return Err(Error::Degenerate(
            "gridded density has no positive total mass",
        ));
    }
    Ok(inside.into_iter().map(|m| m / total).collect())
}

/// Fraction of samples whose `(x_i, x_j)` lies within `radius` of each center.
pub fn sample_ball_masses(
    samples: &ParticleEnsemble,
    i: usize,
    j: usize,
    centers: &[(f64, f64)],
    radius: f64,
) -> Result<Vec<f64>> {
    let d = samples.dim();
    for k in [i, j] {
        if k >= d {
            return Err(Error::IndexOutOfRange { index: k, dim: d });
        }
    }
    if samples.is_empty() {
        return Err(Error::Empty("samples"));
    }
    let mut inside = alloc::vec![0usize; centers.len()];
    for x in samples.iter() {
        for (m, &(cx, cy)) in inside.iter_mut().zip(centers) {
            if (x[i] - cx) * (x[i] - cx) + (x[j] - cy) * (x[j] - cy) <= radius * radius {
                *m += 1;
            }
        }
    }
    Ok(inside
        .into_iter()
        .map(|m| m as f64 / samples.len() as f64)
        .collect())
}

pub enum MomentSource<'a> {
    Samples(&'a ParticleEnsemble),
    Model(&'a FhtModel),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentRow {
    pub i: usize,
    pub j: usize,
    pub mean_i: f64,
    pub mean_j: f64,
    /// `E[x_i x_j]`.
    pub cross: f64,
}

/// `E[x_i]`, `E[x_j]` and `E[x_i x_j]` for each pair.
pub fn moment_table(source: &MomentSource<'_>, pairs: &[(usize, usize)]) -> Result<Vec<MomentRow>> {
    let d = match source {
        MomentSource::Samples(s) => s.dim(),
        MomentSource::Model(m) => m.dim(),
    };
    pairs
        .iter()
        .map(|&(i, j)| {
            for k in [i, j] {
                if k >= d {
                    return Err(Error::IndexOutOfRange { index: k, dim: d });
                }
            }
            match source {
                MomentSource::Samples(s) => {
                    if s.is_empty() {
                        return Err(Error::Empty("samples"));
                    }
                    let n = s.len() as f64;
                    let (mut mi, mut mj, mut c) = (0.0, 0.0, 0.0);
                    for x in s.iter() {
                        mi += x[i];
                        mj += x[j];
                        c += x[i] * x[j];
                    }
                    Ok(MomentRow {
                        i,
                        j,
                        mean_i: mi / n,
                        mean_j: mj / n,
                        cross: c / n,
                    })
                }
                MomentSource::Model(m) => {
                    let (mean_i, cross) = m.moments(i, j)?;
                    let mean_j = if i == j { mean_i } else { m.moments(j, j)?.0 };
                    Ok(MomentRow {
                        i,
                        j,
                        mean_i,
                        mean_j,
                        cross,
                    })
                }
            }
        })
        .collect()
}
