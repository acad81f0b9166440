//! Twisted 2×2 loop matrices: Laurent polynomials in the spectral parameter λ with
//! diagonal entries even and off-diagonal entries odd in λ.
//!
//! Algebra runs on the coefficient table; inversion and products that would have
//! unbounded support run on circle samples (see [`CircleGrid`]).

mod grid;
mod mat2;
mod textio;

pub use grid::{CircleGrid, LoopSamples};
pub use mat2::Mat2;
pub use textio::{read_loop, write_loop};

use num_complex::Complex64;

use crate::error::Result;

/// Coefficients whose norm falls below this (relative, floor 1) are dropped.
pub const DROP_TOL: f64 = 1e-14;

/// Default symmetric band N_λ kept by truncating operations.
pub const DEFAULT_BAND: i32 = 32;

/// Default number of circle samples.
pub const DEFAULT_SAMPLES: usize = 256;

/// Band and grid used by the truncating loop operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopConfig {
    pub band: i32,
    pub samples: usize,
}

impl Default for LoopConfig {
    fn default() -> Self {
        Self { band: DEFAULT_BAND, samples: DEFAULT_SAMPLES }
    }
}

/// A finite Laurent polynomial Σₙ coeffs[n]·λⁿ with 2×2 complex coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopMatrix {
    min_deg: i32,
    coeffs: Vec<Mat2>,
}

impl Default for LoopMatrix {
    fn default() -> Self {
        Self::zero()
    }
}

impl LoopMatrix {
    pub fn zero() -> Self {
        Self { min_deg: 0, coeffs: Vec::new() }
    }

    pub fn constant(m: Mat2) -> Self {
        Self::monomial(0, m)
    }

    pub fn identity() -> Self {
        Self::constant(Mat2::identity())
    }

    pub fn monomial(deg: i32, m: Mat2) -> Self {
        Self { min_deg: deg, coeffs: vec![m] }
    }

    /// The B₂ cell representative ω = [[0, −λ], [λ⁻¹, 0]].
    pub fn omega() -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self::from_terms(&[(1, Mat2::offdiag(-one, 0.0.into())), (-1, Mat2::offdiag(0.0.into(), one))])
    }

    /// Build from a contiguous coefficient run starting at `min_deg`.
    pub fn from_coeffs(min_deg: i32, coeffs: Vec<Mat2>) -> Self {
        let mut l = Self { min_deg, coeffs };
        l.strip_zeros();
        l
    }

    /// Build from (degree, coefficient) pairs; repeated degrees accumulate.
    pub fn from_terms(terms: &[(i32, Mat2)]) -> Self {
        if terms.is_empty() {
            return Self::zero();
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap();
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![Mat2::zero(); (hi - lo + 1) as usize];
        for (n, m) in terms {
            coeffs[(n - lo) as usize] += *m;
        }
        Self::from_coeffs(lo, coeffs)
    }

    fn strip_zeros(&mut self) {
        while self.coeffs.last().is_some_and(|c| *c == Mat2::zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| **c == Mat2::zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.min_deg += lead as i32;
        }
        if self.coeffs.is_empty() {
            self.min_deg = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest degree with a stored coefficient (0 for the zero loop).
    pub fn min_deg(&self) -> i32 {
        self.min_deg
    }

    /// Highest stored degree (−1 relative to min for the zero loop).
    pub fn max_deg(&self) -> i32 {
        self.min_deg + self.coeffs.len() as i32 - 1
    }

    pub fn coeff(&self, n: i32) -> Mat2 {
        let k = n - self.min_deg;
        if k < 0 || k as usize >= self.coeffs.len() {
            Mat2::zero()
        } else {
            self.coeffs[k as usize]
        }
    }

    /// Iterator over (degree, coefficient) pairs, zero coefficients included.
    pub fn terms(&self) -> impl Iterator<Item = (i32, Mat2)> + '_ {
        self.coeffs.iter().enumerate().map(move |(k, c)| (self.min_deg + k as i32, *c))
    }

    /// Σ coeffs[n]·λⁿ.
    pub fn eval(&self, lambda: Complex64) -> Mat2 {
        // Horner from the top, then shift by λ^min_deg.
        let mut acc = Mat2::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(lambda) + *c;
        }
        acc.scale(lambda.powi(self.min_deg))
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let lo = self.min_deg.min(other.min_deg);
        let hi = self.max_deg().max(other.max_deg());
        let coeffs = (lo..=hi).map(|n| self.coeff(n) + other.coeff(n)).collect();
        Self::from_coeffs(lo, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -*c)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map_coeffs(|c| c.scale(s))
    }

    /// Multiply by λ^k.
    pub fn shift(&self, k: i32) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self { min_deg: self.min_deg + k, coeffs: self.coeffs.clone() }
    }

    pub fn map_coeffs(&self, f: impl Fn(&Mat2) -> Mat2) -> Self {
        Self::from_coeffs(self.min_deg, self.coeffs.iter().map(f).collect())
    }

    /// Left multiplication by a constant matrix.
    pub fn left_mul(&self, m: &Mat2) -> Self {
        self.map_coeffs(|c| *m * *c)
    }

    /// Right multiplication by a constant matrix.
    pub fn right_mul(&self, m: &Mat2) -> Self {
        self.map_coeffs(|c| *c * *m)
    }

    /// Untruncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Mat2::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == Mat2::zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += *a * *b;
            }
        }
        Self::from_coeffs(self.min_deg + other.min_deg, coeffs)
    }

    /// Restrict to degrees `[−band, band]`; returns the discarded ℓ¹ coefficient mass.
    pub fn truncate(&self, band: i32) -> (Self, f64) {
        let mut tail = 0.0;
        let mut kept = Vec::new();
        for (n, c) in self.terms() {
            if n.abs() <= band {
                kept.push((n, c));
            } else {
                tail += c.norm();
            }
        }
        (Self::from_terms(&kept), tail)
    }

    /// Drop coefficients with norm below `tol·max(1, largest norm)`; returns dropped mass.
    pub fn trim(&self, tol: f64) -> (Self, f64) {
        let scale = self.coeffs.iter().map(Mat2::norm).fold(1.0, f64::max);
        let mut dropped = 0.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                if c.norm() < tol * scale {
                    dropped += c.norm();
                    Mat2::zero()
                } else {
                    *c
                }
            })
            .collect();
        (Self::from_coeffs(self.min_deg, coeffs), dropped)
    }

    /// The star operation: coefficient n of the result is coeffs[−n]*.
    /// On |λ| = 1 this is the pointwise conjugate transpose.
    pub fn star(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let coeffs = self.coeffs.iter().rev().map(Mat2::adjoint).collect();
        Self::from_coeffs(-self.max_deg(), coeffs)
    }

    /// ∂_λ, exact on coefficients.
    pub fn lambda_derivative(&self) -> Self {
        let terms: Vec<(i32, Mat2)> =
            self.terms().filter(|(n, _)| *n != 0).map(|(n, c)| (n - 1, c.scale_re(n as f64))).collect();
        Self::from_terms(&terms)
    }

    /// λ·∂_λ, exact on coefficients.
    pub fn lambda_d_lambda(&self) -> Self {
        self.map_coeffs_indexed(|n, c| c.scale_re(n as f64))
    }

    fn map_coeffs_indexed(&self, f: impl Fn(i32, &Mat2) -> Mat2) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(k, c)| f(self.min_deg + k as i32, c)).collect();
        Self::from_coeffs(self.min_deg, coeffs)
    }

    /// Largest entry violating twisted parity (even degrees diagonal, odd off-diagonal).
    pub fn parity_defect(&self) -> f64 {
        self.terms()
            .map(|(n, c)| if n % 2 == 0 { c.offdiagonal_part().max_abs() } else { c.diagonal_part().max_abs() })
            .fold(0.0, f64::max)
    }

    pub fn is_twisted(&self, tol: f64) -> bool {
        self.parity_defect() <= tol
    }

    /// Project onto the twisted subspace.
    pub fn twisted_part(&self) -> Self {
        self.map_coeffs_indexed(|n, c| if n % 2 == 0 { c.diagonal_part() } else { c.offdiagonal_part() })
    }

    /// ℓ¹ norm of the coefficient table.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(Mat2::norm).sum()
    }

    /// ℓ¹ mass carried by degrees below zero.
    pub fn negative_mass(&self) -> f64 {
        self.terms().filter(|(n, _)| *n < 0).map(|(_, c)| c.norm()).sum()
    }

    /// Largest coefficient-wise distance.
    pub fn max_coeff_distance(&self, other: &Self) -> f64 {
        let lo = self.min_deg.min(other.min_deg);
        let hi = self.max_deg().max(other.max_deg());
        (lo..=hi).map(|n| (self.coeff(n) - other.coeff(n)).norm()).fold(0.0, f64::max)
    }
}

/// Product truncated to the configured band; returns the product and the truncation tail.
pub fn loop_mul(a: &LoopMatrix, b: &LoopMatrix, cfg: &LoopConfig) -> (LoopMatrix, f64) {
    a.mul(b).truncate(cfg.band)
}

/// Inverse via pointwise inversion on circle samples and coefficient recovery.
pub fn loop_inverse(a: &LoopMatrix, cfg: &LoopConfig) -> Result<LoopMatrix> {
    let grid = CircleGrid::new(cfg.samples)?;
    let inv = grid.sample(a).inverse()?;
    let (coeffs, _) = grid.coefficients(&inv);
    Ok(coeffs.truncate(cfg.band).0)
}

pub fn loop_eval(a: &LoopMatrix, lambda: Complex64) -> Mat2 {
    a.eval(lambda)
}

pub fn loop_star(a: &LoopMatrix) -> LoopMatrix {
    a.star()
}

pub fn lambda_derivative(a: &LoopMatrix) -> LoopMatrix {
    a.lambda_derivative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn a_offdiag() -> Mat2 {
        Mat2::pauli(1)
    }

    /// exp(s·λ⁻¹A) = cosh(s/λ)·id + sinh(s/λ)·A as a Laurent series, truncated.
    fn exp_inv_lambda_a(s: f64, terms: i32) -> LoopMatrix {
        let mut out = Vec::new();
        let mut fact = 1.0;
        for n in 0..terms {
            if n > 0 {
                fact *= n as f64;
            }
            let coef = s.powi(n) / fact;
            let m = if n % 2 == 0 { Mat2::identity() } else { a_offdiag() };
            out.push((-n, m.scale_re(coef)));
        }
        LoopMatrix::from_terms(&out)
    }

    #[test]
    fn identity_products() {
        let cfg = LoopConfig::default();
        let (p, tail) = loop_mul(&LoopMatrix::identity(), &LoopMatrix::identity(), &cfg);
        assert_eq!(p, LoopMatrix::identity());
        assert_eq!(tail, 0.0);
    }

    #[test]
    fn omega_squared_is_minus_identity() {
        let w = LoopMatrix::omega();
        let (p, _) = loop_mul(&w, &w, &LoopConfig::default());
        assert!(p.max_coeff_distance(&LoopMatrix::identity().neg()) < 1e-15);
        assert!(w.is_twisted(0.0));
    }

    #[test]
    fn inverse_lambda_a_squared() {
        let x = LoopMatrix::monomial(-1, a_offdiag());
        let p = x.mul(&x);
        assert!(p.max_coeff_distance(&LoopMatrix::monomial(-2, Mat2::identity())) < 1e-15);
    }

    #[test]
    fn inverse_examples() {
        let cfg = LoopConfig::default();
        let inv = loop_inverse(&LoopMatrix::identity(), &cfg).unwrap();
        assert!(inv.max_coeff_distance(&LoopMatrix::identity()) < 1e-14);

        let inv = loop_inverse(&LoopMatrix::omega(), &cfg).unwrap();
        assert!(inv.max_coeff_distance(&LoopMatrix::omega().neg()) < 1e-14);
        assert!(inv.coeff(1).a12.re > 0.99);

        // closed-form oracle: exp(λ⁻¹A)⁻¹ = exp(−λ⁻¹A)
        let e = exp_inv_lambda_a(1.0, 30);
        let inv = loop_inverse(&e, &cfg).unwrap();
        assert!(inv.max_coeff_distance(&exp_inv_lambda_a(-1.0, 30)) < 1e-13);
        let grid = CircleGrid::new(cfg.samples).unwrap();
        let prod = grid.sample(&e).mul(&grid.sample(&inv));
        let id = grid.sample(&LoopMatrix::identity());
        assert!(prod.max_distance(&id) < 1e-10);
    }

    #[test]
    fn inverse_of_singular_loop_fails() {
        let z = LoopMatrix::constant(Mat2::diag(c(1.0, 0.0), c(0.0, 0.0)));
        assert!(matches!(
            loop_inverse(&z, &LoopConfig::default()),
            Err(crate::Error::SingularOnCircle { .. })
        ));
    }

    #[test]
    fn eval_examples() {
        let l = c(0.3, -1.7);
        assert_eq!(loop_eval(&LoopMatrix::identity(), l), Mat2::identity());
        let w = loop_eval(&LoopMatrix::omega(), c(1.0, 0.0));
        assert!((w - Mat2::from_real(0.0, -1.0, 1.0, 0.0)).norm() < 1e-15);
        let x = loop_eval(&LoopMatrix::monomial(-1, a_offdiag()), c(0.0, 1.0));
        assert!((x - Mat2::offdiag(c(0.0, -1.0), c(0.0, -1.0))).norm() < 1e-15);
    }

    #[test]
    fn star_examples() {
        assert_eq!(loop_star(&LoopMatrix::identity()), LoopMatrix::identity());
        let s = loop_star(&LoopMatrix::monomial(1, Mat2::e12()));
        assert_eq!(s, LoopMatrix::monomial(-1, Mat2::e21()));
        // constant SU(2) matrix: star = inverse
        let (a, b) = (c(0.6, 0.0), c(0.0, 0.8));
        let f = LoopMatrix::constant(Mat2::new(a, -b.conj(), b, a.conj()));
        let inv = loop_inverse(&f, &LoopConfig::default()).unwrap();
        assert!(loop_star(&f).max_coeff_distance(&inv) < 1e-14);
    }

    #[test]
    fn derivative_examples() {
        assert!(lambda_derivative(&LoopMatrix::identity()).is_zero());
        let x = LoopMatrix::from_terms(&[(1, Mat2::e12()), (-1, Mat2::e21())]);
        let d = lambda_derivative(&x);
        let expected = LoopMatrix::from_terms(&[(0, Mat2::e12()), (-2, -Mat2::e21())]);
        assert!(d.max_coeff_distance(&expected) < 1e-15);

        // λ∂_λ exp(λ⁻¹A) at λ = 1 equals −A·exp(A)
        let e = exp_inv_lambda_a(1.0, 30);
        let v = e.lambda_d_lambda().eval(c(1.0, 0.0));
        let expected = -(a_offdiag() * a_offdiag().exp());
        assert!((v - expected).norm() < 1e-13);
        let v2 = e.lambda_derivative().eval(c(1.0, 0.0));
        assert!((v2 - expected).norm() < 1e-13);
    }

    #[test]
    fn truncation_reports_tail() {
        let e = exp_inv_lambda_a(1.0, 10);
        let (t, tail) = e.truncate(2);
        assert_eq!(t.min_deg(), -2);
        let expected: f64 = (3..10).map(|n| {
            let f: f64 = (1..=n).map(|k| k as f64).product();
            2f64.sqrt() / f
        }).sum();
        assert!((tail - expected).abs() < 1e-15);
    }

    fn twisted_loop(raw: Vec<(f64, f64, f64, f64)>, lo: i32) -> LoopMatrix {
        let terms: Vec<(i32, Mat2)> = raw
            .into_iter()
            .enumerate()
            .map(|(k, (a, b, x, y))| {
                let n = lo + k as i32;
                let m = if n % 2 == 0 {
                    Mat2::diag(c(a, b), c(x, y))
                } else {
                    Mat2::offdiag(c(a, b), c(x, y))
                };
                (n, m)
            })
            .collect();
        LoopMatrix::from_terms(&terms)
    }

    fn arb_twisted() -> impl Strategy<Value = LoopMatrix> {
        (proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 1..6), -3..3i32)
            .prop_map(|(raw, lo)| twisted_loop(raw, lo))
    }

    proptest! {
        #[test]
        fn parity_closure_and_star_antiautomorphism(a in arb_twisted(), b in arb_twisted()) {
            let ab = a.mul(&b);
            prop_assert!(ab.is_twisted(1e-12));
            prop_assert!(a.star().is_twisted(1e-12));
            let lhs = ab.star();
            let rhs = b.star().mul(&a.star());
            prop_assert!(lhs.max_coeff_distance(&rhs) < 1e-11);
        }

        #[test]
        fn samples_round_trip_and_det_multiplicative(a in arb_twisted(), b in arb_twisted()) {
            let grid = CircleGrid::new(64).unwrap();
            let (back, _) = grid.coefficients(&grid.sample(&a));
            prop_assert!(back.max_coeff_distance(&a) < 1e-12);
            let sa = grid.sample(&a);
            let sb = grid.sample(&b);
            let sab = grid.sample(&a.mul(&b));
            for m in 0..grid.len() {
                let d = sab.values[m].det() - sa.values[m].det() * sb.values[m].det();
                prop_assert!(d.norm() <= 1e-10);
            }
        }

        #[test]
        fn inverse_stays_twisted(a in arb_twisted()) {
            // shift toward identity so the loop is invertible on the circle
            let l = a.scale(c(0.1, 0.0)).add(&LoopMatrix::identity());
            let inv = loop_inverse(&l, &LoopConfig::default()).unwrap();
            prop_assert!(inv.is_twisted(1e-12));
        }
    }
}
