use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{LoopMatrix, Mat2};
use crate::error::{Error, Result};

/// Values of a loop at the points of a [`CircleGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct LoopSamples {
    pub values: Vec<Mat2>,
}

impl LoopSamples {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(&Mat2) -> Mat2) -> Self {
        Self { values: self.values.iter().map(f).collect() }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(&Mat2, &Mat2) -> Mat2) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Self { values: self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect() }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| *a * *b)
    }

    /// Pointwise inverse; fails when some |det| drops below `1e-13`.
    pub fn inverse(&self) -> Result<Self> {
        let mut out = Vec::with_capacity(self.len());
        for (index, v) in self.values.iter().enumerate() {
            let det = v.det().norm();
            if det < 1e-13 {
                return Err(Error::SingularOnCircle { index, det });
            }
            out.push(v.adjugate().scale(v.det().inv()));
        }
        Ok(Self { values: out })
    }

    /// Pointwise conjugate transpose (the star operation on |λ| = 1).
    pub fn adjoint(&self) -> Self {
        self.map(Mat2::adjoint)
    }

    /// Largest pointwise Frobenius distance.
    pub fn max_distance(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (*a - *b).norm()).fold(0.0, f64::max)
    }
}

/// M equally spaced points λ_m = e^{2πim/M} on the unit circle, with cached FFT plans.
#[derive(Clone)]
pub struct CircleGrid {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for CircleGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CircleGrid").field("m", &self.m).finish()
    }
}

impl CircleGrid {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 || !m.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!("circle grid size must be even and >= 2, got {m}")));
        }
        let mut planner = FftPlanner::new();
        Ok(Self { m, forward: planner.plan_fft_forward(m), inverse: planner.plan_fft_inverse(m) })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn angle(&self, idx: usize) -> f64 {
        2.0 * PI * idx as f64 / self.m as f64
    }

    pub fn lambda(&self, idx: usize) -> Complex64 {
        Complex64::from_polar(1.0, self.angle(idx))
    }

    pub fn points(&self) -> Vec<Complex64> {
        (0..self.m).map(|i| self.lambda(i)).collect()
    }

    /// Whether coefficients on `min..=max` are recoverable from samples on this grid.
    pub fn resolves(&self, min_deg: i32, max_deg: i32) -> bool {
        self.m as i64 >= 2 * (max_deg as i64 - min_deg as i64) + 2
    }

    /// Exact samples of a Laurent polynomial (degrees wrap modulo M, which is exact on the grid).
    pub fn sample(&self, a: &LoopMatrix) -> LoopSamples {
        let mut bufs = vec![vec![Complex64::new(0.0, 0.0); self.m]; 4];
        for (n, c) in a.terms() {
            let idx = (n as i64).rem_euclid(self.m as i64) as usize;
            for (e, v) in c.entries().iter().enumerate() {
                bufs[e][idx] += v;
            }
        }
        for b in bufs.iter_mut() {
            self.inverse.process(b);
        }
        LoopSamples { values: (0..self.m).map(|i| Mat2::new(bufs[0][i], bufs[1][i], bufs[2][i], bufs[3][i])).collect() }
    }

    /// Discrete Fourier coefficients indexed by n mod M.
    pub fn raw_coefficients(&self, s: &LoopSamples) -> Vec<Mat2> {
        assert_eq!(s.len(), self.m, "sample count does not match grid");
        let mut bufs: Vec<Vec<Complex64>> =
            (0..4).map(|e| s.values.iter().map(|v| v.entries()[e]).collect()).collect();
        for b in bufs.iter_mut() {
            self.forward.process(b);
        }
        let inv_m = 1.0 / self.m as f64;
        (0..self.m)
            .map(|i| Mat2::new(bufs[0][i], bufs[1][i], bufs[2][i], bufs[3][i]).scale_re(inv_m))
            .collect()
    }

    /// Recover Laurent coefficients on degrees `−M/2+1 .. M/2−1`, dropping norms below
    /// `1e-14` (relative to the largest coefficient, floor 1). The Nyquist coefficient is
    /// discarded; its mass is returned together with the dropped mass.
    pub fn coefficients(&self, s: &LoopSamples) -> (LoopMatrix, f64) {
        let raw = self.raw_coefficients(s);
        let half = (self.m / 2) as i32;
        let mut coeffs = Vec::with_capacity(self.m - 1);
        for n in (-half + 1)..half {
            coeffs.push(raw[(n as i64).rem_euclid(self.m as i64) as usize]);
        }
        let nyquist = raw[self.m / 2].norm();
        let (l, dropped) = LoopMatrix::from_coeffs(-half + 1, coeffs).trim(super::DROP_TOL);
        (l, dropped + nyquist)
    }

    /// Mass of the coefficients in the outer eighth of the resolvable band.
    pub fn alias_mass(&self, s: &LoopSamples) -> f64 {
        let raw = self.raw_coefficients(s);
        let m = self.m;
        let scale = raw.iter().map(Mat2::norm).fold(0.0, f64::max).max(1e-300);
        let lo = m / 2 - m / 8;
        let hi = m / 2 + m / 8;
        raw[lo..=hi].iter().map(Mat2::norm).fold(0.0, f64::max) / scale
    }

    /// Spectral derivative with respect to t, λ = e^{it}: coefficient n ↦ i·n·coefficient.
    pub fn d_dt(&self, s: &LoopSamples) -> LoopSamples {
        let raw = self.raw_coefficients(s);
        let m = self.m;
        let mut bufs = vec![vec![Complex64::new(0.0, 0.0); m]; 4];
        for (idx, c) in raw.iter().enumerate() {
            let n = if idx < m / 2 {
                idx as f64
            } else if idx == m / 2 {
                0.0
            } else {
                idx as f64 - m as f64
            };
            let f = Complex64::new(0.0, n);
            for (e, v) in c.entries().iter().enumerate() {
                bufs[e][idx] = v * f;
            }
        }
        for b in bufs.iter_mut() {
            self.inverse.process(b);
        }
        LoopSamples { values: (0..m).map(|i| Mat2::new(bufs[0][i], bufs[1][i], bufs[2][i], bufs[3][i])).collect() }
    }

    /// λ·∂_λ on samples; equals −i·∂_t.
    pub fn lambda_d_lambda(&self, s: &LoopSamples) -> LoopSamples {
        self.d_dt(s).map(|v| v.scale(Complex64::new(0.0, -1.0)))
    }
}
