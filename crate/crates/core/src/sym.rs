//! Sym–Bobenko and Sym formulas: frames to points of R³ or L³.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::loops::{CircleGrid, LoopMatrix, LoopSamples, Mat2};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    Euclidean,
    /// Minkowski space with x₃ timelike.
    Minkowski,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbientPoint {
    pub x: [f64; 3],
    pub signature: Signature,
}

impl AmbientPoint {
    pub fn euclidean(x: [f64; 3]) -> Self {
        Self { x, signature: Signature::Euclidean }
    }

    pub fn sub(&self, other: &Self) -> [f64; 3] {
        [self.x[0] - other.x[0], self.x[1] - other.x[1], self.x[2] - other.x[2]]
    }

    /// Euclidean distance of the coordinate triples.
    pub fn distance(&self, other: &Self) -> f64 {
        let d = self.sub(other);
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().all(|v| v.is_finite())
    }

    /// The su(2) matrix i·Σ x_j σ_j (inverse of [`extract`]).
    pub fn to_matrix(&self) -> Mat2 {
        (Mat2::pauli(1).scale_re(self.x[0]) + Mat2::pauli(2).scale_re(self.x[1]) + Mat2::pauli(3).scale_re(self.x[2]))
            .scale(I)
    }
}

/// Nonzero mean curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanCurvature(f64);

impl MeanCurvature {
    pub fn new(h: f64) -> Result<Self> {
        if h == 0.0 || !h.is_finite() {
            return Err(Error::InvalidInput(format!("mean curvature must be finite and nonzero, got {h}")));
        }
        Ok(Self(h))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// x_j = ½·Re tr(−i·S·σ_j).
pub fn extract(s: &Mat2, signature: Signature) -> AmbientPoint {
    let m = s.scale(-I);
    let x = [1, 2, 3].map(|j| 0.5 * (m * Mat2::pauli(j)).trace().re);
    AmbientPoint { x, signature }
}

/// S = (−i/2H)[F·σ₃·F⁻¹ − 2·(λ∂_λF)·F⁻¹] from F(λ₀) and (λ∂_λF)(λ₀).
pub fn sym_bobenko_at(f: &Mat2, lambda_df: &Mat2, h: MeanCurvature) -> Result<AmbientPoint> {
    let defect = (f.adjoint() * *f - Mat2::identity()).norm();
    if !(defect <= 1e-6) {
        return Err(Error::NotUnitary { defect });
    }
    let fi = f.adjoint();
    let s = (*f * Mat2::pauli(3) * fi - (*lambda_df * fi).scale_re(2.0)).scale(-I / (2.0 * h.value()));
    // a trace means λ∂_λF·F⁻¹ left su(2): F is not unitary near λ₀ (or is under-resolved)
    let tr = s.trace().norm();
    if tr > 1e-8 * (1.0 + s.norm()) {
        return Err(Error::NotUnitary { defect: tr });
    }
    Ok(extract(&s, Signature::Euclidean))
}

/// Sym–Bobenko at λ₀ for a Laurent-polynomial frame (exact λ-derivative).
pub fn sym_bobenko(f: &LoopMatrix, h: MeanCurvature, lambda0: Complex64) -> Result<AmbientPoint> {
    sym_bobenko_at(&f.eval(lambda0), &f.lambda_d_lambda().eval(lambda0), h)
}

/// Sym–Bobenko at grid point `idx` for a sampled frame (spectral λ-derivative).
pub fn sym_bobenko_samples(f: &LoopSamples, grid: &CircleGrid, idx: usize, h: MeanCurvature) -> Result<AmbientPoint> {
    let d = grid.lambda_d_lambda(f);
    sym_bobenko_at(&f.values[idx], &d.values[idx], h)
}

/// F(λ₀) and (λ∂_λF)(λ₀) from samples. Grid points use the samples directly; other points use
/// trigonometric interpolation without the Nyquist term.
pub fn frame_at(f: &LoopSamples, grid: &CircleGrid, lambda0: Complex64) -> (Mat2, Mat2) {
    let m = grid.len();
    let k = (lambda0.arg() / grid.angle(1)).round().rem_euclid(m as f64) as usize;
    if (grid.lambda(k) - lambda0).norm() < 1e-14 {
        let d = grid.lambda_d_lambda(f);
        return (f.values[k], d.values[k]);
    }
    let raw = grid.raw_coefficients(f);
    let half = (m / 2) as i64;
    let (mut v, mut d) = (Mat2::zero(), Mat2::zero());
    for n in (-half + 1)..half {
        let c = raw[n.rem_euclid(m as i64) as usize].scale(lambda0.powi(n as i32));
        v += c;
        d += c.scale_re(n as f64);
    }
    (v, d)
}

/// Sym–Bobenko at an arbitrary λ₀ on the circle for a sampled frame.
pub fn sym_bobenko_samples_at(f: &LoopSamples, grid: &CircleGrid, lambda0: Complex64, h: MeanCurvature) -> Result<AmbientPoint> {
    let (v, d) = frame_at(f, grid, lambda0);
    sym_bobenko_at(&v, &d, h)
}

/// Sym formula f = −i·(λ∂_λF)·F⁻¹ at λ₀, Minkowski-tagged. Coordinates use the same Pauli
/// extraction as the Euclidean case applied to i·f.
pub fn sym_sl2r(f: &LoopMatrix, lambda0: Complex64) -> Result<AmbientPoint> {
    let fv = f.eval(lambda0);
    let fi = fv.inverse().ok_or_else(|| Error::Singular { context: "frame at lambda0".into() })?;
    let m = (f.lambda_d_lambda().eval(lambda0) * fi).scale(-I);
    Ok(extract(&m.scale(I), Signature::Minkowski))
}

/// τ*f = U·f·U⁻¹ + H⁻¹·(∂_tU)·U⁻¹ (the Minkowski variant uses −H⁻¹).
pub fn translational_period(u: &Mat2, du_dt: &Mat2, f: &AmbientPoint, h: MeanCurvature) -> Result<AmbientPoint> {
    let ui = u.inverse().ok_or_else(|| Error::Singular { context: "monodromy".into() })?;
    let sign = match f.signature {
        Signature::Euclidean => 1.0,
        Signature::Minkowski => -1.0,
    };
    let s = *u * f.to_matrix() * ui + (*du_dt * ui).scale_re(sign / h.value());
    Ok(extract(&s, f.signature))
}
