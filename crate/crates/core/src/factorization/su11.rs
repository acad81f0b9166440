//! Experimental SU(1,1) splitting: unpivoted LDL^H of the J-weighted block-Toeplitz section.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::IwasawaPair;
use crate::error::{Error, Result};
use crate::loops::{CircleGrid, LoopMatrix, LoopSamples, Mat2};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    B1,
    B2,
    Boundary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellReport {
    pub cell: Cell,
    /// Signs of the LDL^H pivots of the last attempted factorization.
    pub pivot_signs: Vec<i8>,
    pub min_pivot: f64,
}

fn j() -> Mat2 {
    Mat2::diag(Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0))
}

struct Ldl {
    b: Vec<Mat2>,
    signs: Vec<i8>,
    min_pivot: f64,
}

/// Unpivoted LDL^H of the Hermitian block-Toeplitz section built from q[k] = Q_k, k ≥ 0.
fn ldl_section(q: &[Mat2], n: usize) -> Ldl {
    let dim = 2 * n;
    let mut t = DMatrix::<Complex64>::zeros(dim, dim);
    for bi in 0..n {
        for bj in 0..n {
            let k = bj as i64 - bi as i64;
            let blk = if k >= 0 {
                q.get(k as usize).copied().unwrap_or_else(Mat2::zero)
            } else {
                q.get((-k) as usize).map(Mat2::adjoint).unwrap_or_else(Mat2::zero)
            };
            let e = blk.entries();
            for (r, c, v) in [(0, 0, e[0]), (0, 1, e[1]), (1, 0, e[2]), (1, 1, e[3])] {
                t[(2 * bi + r, 2 * bj + c)] = v;
            }
        }
    }
    let scale = t.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    // in place: strictly lower part holds L, diagonal holds D
    let mut d = vec![0.0; dim];
    let mut l = DMatrix::<Complex64>::identity(dim, dim);
    let mut signs = Vec::with_capacity(dim);
    let mut min_pivot = f64::INFINITY;
    for k in 0..dim {
        let mut dk = t[(k, k)];
        for p in 0..k {
            dk -= l[(k, p)] * l[(k, p)].conj() * d[p];
        }
        let dk = dk.re;
        d[k] = dk;
        signs.push(if dk >= 0.0 { 1 } else { -1 });
        min_pivot = min_pivot.min(dk.abs() / scale);
        if dk.abs() < 1e-300 {
            break;
        }
        for i in k + 1..dim {
            let mut s = t[(i, k)];
            for p in 0..k {
                s -= l[(i, p)] * l[(k, p)].conj() * d[p];
            }
            l[(i, k)] = s / dk;
        }
    }
    // G = L·|D|^{1/2}; B_m = (block (n−1, n−1−m) of G)^H
    let mut b = Vec::with_capacity(n);
    for m in 0..n {
        let col = n - 1 - m;
        let g = |r: usize, c: usize| l[(2 * (n - 1) + r, 2 * col + c)] * d[2 * col + c].abs().sqrt();
        b.push(Mat2::new(g(0, 0), g(0, 1), g(1, 0), g(1, 1)).adjoint());
    }
    Ldl { b, signs, min_pivot }
}

fn alternating(signs: &[i8]) -> bool {
    signs.chunks(2).all(|c| c == [1, -1])
}

fn attempt(l: &LoopSamples, grid: &CircleGrid) -> Result<(Option<(LoopMatrix, LoopSamples)>, Ldl)> {
    let jm = j();
    let q = LoopSamples { values: l.values.iter().map(|x| x.adjoint() * jm * *x).collect() };
    let raw = grid.raw_coefficients(&q);
    let scale = raw[0].norm().max(1e-300);
    let mut qk: Vec<Mat2> = raw[..grid.len() / 2].to_vec();
    while qk.len() > 1 && qk.last().is_some_and(|c| c.norm() < 1e-17 * scale) {
        qk.pop();
    }
    let n = (4 * qk.len()).max(16);
    let ldl = ldl_section(&qk, n);
    if ldl.min_pivot < 1e-8 {
        return Err(Error::CellBoundary { pivot: ldl.min_pivot });
    }
    if !alternating(&ldl.signs) {
        return Ok((None, ldl));
    }
    let (b, _) = LoopMatrix::from_coeffs(0, ldl.b.clone()).trim(1e-18);
    let bs = LoopSamples { values: grid.points().iter().map(|x| b.eval(*x)).collect() };
    let f = l.mul(&bs.inverse()?);
    Ok((Some((b, f)), ldl))
}

/// J-weighted splitting L = F·B with F*JF = J, J = diag(1, −1). Returns the pair when L lies
/// in the cell B₁; for the ω-coset B₂ only the cell tag is returned.
pub fn iwasawa_su11(l: &LoopMatrix, grid: &CircleGrid) -> Result<(Option<IwasawaPair>, CellReport)> {
    let samples = grid.sample(l);
    let (res, ldl) = attempt(&samples, grid)?;
    if let Some((b, f)) = res {
        let jm = j();
        let residual = f.mul(&grid.sample(&b)).max_distance(&samples);
        let defect = f.values.iter().map(|x| (x.adjoint() * jm * *x - jm).norm()).fold(0.0, f64::max);
        let (fl, _) = grid.coefficients(&f);
        let report = CellReport { cell: Cell::B1, pivot_signs: ldl.signs, min_pivot: ldl.min_pivot };
        return Ok((Some(IwasawaPair { f: fl, b, residual, unitarity_defect: defect }), report));
    }
    let omega_inv = grid.sample(&LoopMatrix::omega()).inverse()?;
    let shifted = omega_inv.mul(&samples);
    let (res2, ldl2) = attempt(&shifted, grid)?;
    if res2.is_some() {
        return Ok((None, CellReport { cell: Cell::B2, pivot_signs: ldl2.signs, min_pivot: ldl2.min_pivot }));
    }
    Err(Error::NotInBigCell)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn loop_from(grid: &CircleGrid, f: impl Fn(Complex64) -> Mat2) -> LoopMatrix {
        grid.coefficients(&LoopSamples { values: grid.points().iter().map(|l| f(*l)).collect() }).0
    }

    #[test]
    fn omega_is_j_antiunitary() {
        let g = CircleGrid::new(8).unwrap();
        for s in g.sample(&LoopMatrix::omega()).values {
            assert!((s.adjoint() * j() * s + j()).norm() < 1e-14);
        }
    }

    #[test]
    fn identity_is_in_the_first_cell() {
        let g = CircleGrid::new(32).unwrap();
        let (p, r) = iwasawa_su11(&LoopMatrix::identity(), &g).unwrap();
        assert_eq!(r.cell, Cell::B1);
        let p = p.unwrap();
        assert!(p.f.max_coeff_distance(&LoopMatrix::identity()) < 1e-12);
        assert!(p.b.max_coeff_distance(&LoopMatrix::identity()) < 1e-12);
    }

    #[test]
    fn omega_is_in_the_second_cell() {
        let g = CircleGrid::new(32).unwrap();
        let (p, r) = iwasawa_su11(&LoopMatrix::omega(), &g).unwrap();
        assert!(p.is_none());
        assert_eq!(r.cell, Cell::B2);
    }

    #[test]
    fn synthetic_round_trip() {
        let grid = CircleGrid::new(64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            let mut r = || rng.gen_range(-0.3..0.3);
            let (a0, a2, b1) = (r(), cx(r(), r()), cx(r(), r()));
            // su(1,1): [[iα, β], [β̄, −iα]] with α real on the circle
            let f0 = loop_from(&grid, |l| {
                let alpha = a0 + 2.0 * (a2 * l * l).re;
                let beta = b1 * l;
                Mat2::new(cx(0.0, alpha), beta, beta.conj(), cx(0.0, -alpha)).exp()
            });
            let (y0, p, q) = (r(), cx(r(), r()), cx(r(), r()));
            let b0 = loop_from(&grid, |l| (Mat2::diag(cx(y0, 0.0), cx(-y0, 0.0)) + Mat2::offdiag(p, q).scale(l)).exp());
            let (pair, rep) = iwasawa_su11(&f0.mul(&b0), &grid).unwrap();
            assert_eq!(rep.cell, Cell::B1);
            let pair = pair.unwrap();
            assert!(pair.f.max_coeff_distance(&f0) < 1e-6);
            assert!(pair.b.max_coeff_distance(&b0) < 1e-6);
            assert!(pair.unitarity_defect < 1e-6);
        }
    }
}
