use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// Orthonormal Fourier basis on `[-w, w]`: index 0 is the constant
/// `1/sqrt(2w)`, index `2k - 1` is `cos(pi k (t + w) / w) / sqrt(w)` and index
/// `2k` the matching sine, `k = 1..=q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourierBasis {
    q: usize,
    half_width: f64,
}

impl FourierBasis {
    pub fn new(q: usize, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::invalid(
                "half_width",
                alloc::format!("must be positive, got {half_width}"),
            ));
        }
        Ok(FourierBasis { q, half_width })
    }

    pub fn degree(&self) -> usize {
        self.q
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        2 * self.q + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Writes all `2q + 1` basis values at `t` into `out`.
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let w = self.half_width;
        out[0] = 1.0 / (2.0 * w).sqrt();
        if self.q == 0 {
            return;
        }
        let amp = 1.0 / w.sqrt();
        let theta = core::f64::consts::PI * (t + w) / w;
        let (s1, c1) = theta.sin_cos();
        let (mut c, mut s) = (c1, s1);
        for k in 1..=self.q {
            out[2 * k - 1] = amp * c;
            out[2 * k] = amp * s;
            // Refresh from the exact angle periodically to bound drift.
            if k % 8 == 0 {
                let (sk, ck) = ((k + 1) as f64 * theta).sin_cos();
                c = ck;
                s = sk;
            } else {
                let cn = c * c1 - s * s1;
                s = s * c1 + c * s1;
                c = cn;
            }
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.len()];
        self.eval_into(t, &mut out);
        out
    }

    /// `int_{-w}^{w} psi_a(t) dt`.
    pub fn integrals(&self) -> Vec<f64> {
        let mut v = alloc::vec![0.0; self.len()];
        v[0] = (2.0 * self.half_width).sqrt();
        v
    }

    /// `int_{-w}^{w} t^power psi_a(t) dt` by `points`-point Gauss–Legendre.
    pub fn moment_vector(&self, power: i32, points: usize) -> Vec<f64> {
        let (x, wts) = gauss_legendre(points, -self.half_width, self.half_width);
        let mut out = alloc::vec![0.0; self.len()];
        let mut buf = alloc::vec![0.0; self.len()];
        for (t, w) in x.iter().zip(&wts) {
            self.eval_into(*t, &mut buf);
            let f = w * t.powi(power);
            for (o, b) in out.iter_mut().zip(&buf) {
                *o += f * b;
            }
        }
        out
    }
}
