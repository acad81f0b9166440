//! Iwasawa splitting L = F·B: SU(2) through matrix spectral factorization of Q = L*L, and an
//! experimental SU(1,1) variant with cell detection.

mod schur;
mod su11;

pub use schur::schur_last_row;
pub use su11::{iwasawa_su11, Cell, CellReport};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::loops::{CircleGrid, LoopMatrix, LoopSamples, Mat2};

/// Largest admissible finite-section size.
pub const MAX_SECTION: usize = 4096;

#[derive(Debug, Clone)]
pub struct IwasawaPair {
    pub f: LoopMatrix,
    pub b: LoopMatrix,
    /// max over samples of ‖F·B − L‖.
    pub residual: f64,
    /// max over samples of ‖F*F − id‖.
    pub unitarity_defect: f64,
}

/// The splitting held on circle samples; F need not be a Laurent polynomial.
#[derive(Debug, Clone)]
pub struct SampledSplitting {
    pub f: LoopSamples,
    pub b: LoopMatrix,
    pub residual: f64,
    pub unitarity_defect: f64,
    /// max over samples of ‖B*B − Q‖.
    pub factor_residual: f64,
    pub section: usize,
}

/// Smallest eigenvalue of a Hermitian 2×2 matrix.
pub(crate) fn min_eigenvalue(q: &Mat2) -> f64 {
    let a = q.a11.re;
    let d = q.a22.re;
    let b = q.a12.norm();
    0.5 * (a + d - ((a - d).powi(2) + 4.0 * b * b).sqrt())
}

fn eval_many(b: &LoopMatrix, points: &[Complex64]) -> Vec<Mat2> {
    points.iter().map(|l| b.eval(*l)).collect()
}

fn factor_residual(b: &LoopMatrix, q: &LoopSamples, points: &[Complex64]) -> f64 {
    eval_many(b, points)
        .iter()
        .zip(&q.values)
        .map(|(bm, qm)| (bm.adjoint() * *bm - *qm).norm())
        .fold(0.0, f64::max)
}

/// Factor Q = B*B from Q's nonnegative coefficients, checking the result against samples of Q.
/// Returns B and the final section size.
fn factorize_checked(qk: &[Mat2], q: &LoopSamples, points: &[Complex64]) -> Result<(LoopMatrix, usize)> {
    let scale = q.values.iter().map(Mat2::norm).fold(1.0, f64::max);
    let band = qk.len().max(2);
    let mut n = (4 * band).max(8);
    let build = |n: usize| -> Result<(LoopMatrix, f64)> {
        let coeffs = schur_last_row(qk, n)?;
        let (b, _) = LoopMatrix::from_coeffs(0, coeffs).trim(1e-18);
        let r = factor_residual(&b, q, points);
        Ok((b, r))
    };
    let (_, mut r) = build(n)?;
    loop {
        let n2 = 2 * n;
        if n2 > MAX_SECTION {
            return Err(Error::NoConvergence { size: n });
        }
        let (b2, r2) = build(n2)?;
        if (r2 - r).abs() < 1e-12 * scale {
            return Ok((b2, n2));
        }
        n = n2;
        r = r2;
    }
}

fn check_positive(q: &LoopSamples) -> Result<()> {
    for (i, m) in q.values.iter().enumerate() {
        let e = min_eigenvalue(m);
        if !(e > 1e-10) {
            return Err(Error::NotPositive { context: format!("min eigenvalue {e:.3e} at sample {i}") });
        }
    }
    Ok(())
}

fn grid_for(l: &LoopMatrix) -> Result<CircleGrid> {
    let reach = l.min_deg().unsigned_abs().max(l.max_deg().unsigned_abs()) as usize;
    CircleGrid::new((8 * (reach + 1)).next_power_of_two().max(64))
}

/// B ∈ Λ₊ with B*B = Q on the circle, B(0) upper triangular with positive diagonal.
pub fn spectral_factorize(q: &LoopMatrix) -> Result<LoopMatrix> {
    if q.max_coeff_distance(&q.star()) > 1e-12 * (1.0 + q.l1_norm()) {
        return Err(Error::InvalidInput("spectral_factorize needs star(Q) = Q".into()));
    }
    let grid = grid_for(q)?;
    let samples = grid.sample(q);
    check_positive(&samples)?;
    let qk: Vec<Mat2> = (0..=q.max_deg().max(0)).map(|k| q.coeff(k)).collect();
    Ok(factorize_checked(&qk, &samples, &grid.points())?.0)
}

/// SU(2) splitting of a loop given by samples on `grid`.
pub fn iwasawa_su2_samples(l: &LoopSamples, grid: &CircleGrid) -> Result<SampledSplitting> {
    let q = l.adjoint().mul(l);
    check_positive(&q)?;
    let raw = grid.raw_coefficients(&q);
    let m = grid.len();
    let scale = raw[0].norm().max(1e-300);
    // nonnegative-degree coefficients, trimmed at the effective band
    let mut qk: Vec<Mat2> = raw[..m / 2].to_vec();
    let alias = raw[m / 2].norm() / scale;
    if alias > 1e-10 {
        return Err(Error::Aliasing { mass: alias });
    }
    while qk.len() > 1 && qk.last().is_some_and(|c| c.norm() < 1e-17 * scale) {
        qk.pop();
    }
    let points = grid.points();
    let (b, section) = factorize_checked(&qk, &q, &points)?;
    let b_samples = if b.max_deg() < (m / 2) as i32 { grid.sample(&b) } else { LoopSamples { values: eval_many(&b, &points) } };
    let f = l.mul(&b_samples.inverse()?);
    let residual = f.mul(&b_samples).max_distance(l);
    let unitarity_defect = f.values.iter().map(|x| (x.adjoint() * *x - Mat2::identity()).norm()).fold(0.0, f64::max);
    let factor_residual = factor_residual(&b, &q, &points);
    Ok(SampledSplitting { f, b, residual, unitarity_defect, factor_residual, section })
}

/// SU(2) splitting of a Laurent-polynomial loop; F is returned through its DFT coefficients.
pub fn iwasawa_su2(l: &LoopMatrix) -> Result<IwasawaPair> {
    let grid = grid_for(l)?;
    iwasawa_su2_on(l, &grid)
}

pub fn iwasawa_su2_on(l: &LoopMatrix, grid: &CircleGrid) -> Result<IwasawaPair> {
    let s = iwasawa_su2_samples(&grid.sample(l), grid)?;
    let (f, _) = grid.coefficients(&s.f);
    Ok(IwasawaPair { f, b: s.b, residual: s.residual, unitarity_defect: s.unitarity_defect })
}
