use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A 2×2 complex matrix, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2 {
    pub a11: Complex64,
    pub a12: Complex64,
    pub a21: Complex64,
    pub a22: Complex64,
}

impl Mat2 {
    pub const fn new(a11: Complex64, a12: Complex64, a21: Complex64, a22: Complex64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn from_real(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self::new(a11.into(), a12.into(), a21.into(), a22.into())
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn diag(d1: Complex64, d2: Complex64) -> Self {
        Self::new(d1, ZERO, ZERO, d2)
    }

    pub fn offdiag(upper: Complex64, lower: Complex64) -> Self {
        Self::new(ZERO, upper, lower, ZERO)
    }

    pub fn scalar(s: Complex64) -> Self {
        Self::diag(s, s)
    }

    /// Elementary matrix E₁₂.
    pub fn e12() -> Self {
        Self::offdiag(ONE, ZERO)
    }

    /// Elementary matrix E₂₁.
    pub fn e21() -> Self {
        Self::offdiag(ZERO, ONE)
    }

    /// Pauli matrices σ₁, σ₂, σ₃.
    pub fn pauli(j: usize) -> Self {
        match j {
            1 => Self::offdiag(ONE, ONE),
            2 => Self::offdiag(-I, I),
            3 => Self::diag(ONE, -ONE),
            _ => panic!("Pauli index must be 1, 2 or 3"),
        }
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    pub fn from_entries(e: [Complex64; 4]) -> Self {
        Self::new(e[0], e[1], e[2], e[3])
    }

    pub fn det(&self) -> Complex64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(&self) -> Complex64 {
        self.a11 + self.a22
    }

    /// Classical adjugate; equals the inverse when det = 1.
    pub fn adjugate(&self) -> Self {
        Self::new(self.a22, -self.a12, -self.a21, self.a11)
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 || !d.is_finite() {
            return None;
        }
        Some(self.adjugate().scale(d.inv()))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::new(self.a11.conj(), self.a21.conj(), self.a12.conj(), self.a22.conj())
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a11, self.a21, self.a12, self.a22)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        (self.a11.norm_sqr() + self.a12.norm_sqr() + self.a21.norm_sqr() + self.a22.norm_sqr())
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn diagonal_part(&self) -> Self {
        Self::diag(self.a11, self.a22)
    }

    pub fn offdiagonal_part(&self) -> Self {
        Self::offdiag(self.a12, self.a21)
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.is_finite())
    }

    /// Commutator `self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Matrix exponential in closed form: exp(X) = e^{tr/2}(cosh s·I + sinh(s)/s·X₀),
    /// with X₀ the traceless part and s² = −det X₀.
    pub fn exp(&self) -> Self {
        let half_tr = self.trace() * 0.5;
        let x0 = *self - Self::scalar(half_tr);
        let s = (-x0.det()).sqrt();
        let (ch, sh_over_s) = if s.norm() < 1e-4 {
            let s2 = s * s;
            (
                ONE + s2 / 2.0 + s2 * s2 / 24.0 + s2 * s2 * s2 / 720.0,
                ONE + s2 / 6.0 + s2 * s2 / 120.0 + s2 * s2 * s2 / 5040.0,
            )
        } else {
            (s.cosh(), s.sinh() / s)
        };
        (Self::scalar(ch) + x0.scale(sh_over_s)).scale(half_tr.exp())
    }

    /// Lower Cholesky factor C (C·C* = self) of a Hermitian positive definite matrix.
    pub fn cholesky_lower(&self) -> Option<Self> {
        let a = self.a11.re;
        if !(a > 0.0) {
            return None;
        }
        let l11 = a.sqrt();
        let l21 = self.a21 / l11;
        let s = self.a22.re - l21.norm_sqr();
        if !(s > 0.0) {
            return None;
        }
        Some(Self::new(l11.into(), ZERO, l21, s.sqrt().into()))
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a11 + o.a11, self.a12 + o.a12, self.a21 + o.a21, self.a22 + o.a22)
    }
}

impl AddAssign for Mat2 {
    fn add_assign(&mut self, o: Mat2) {
        *self = *self + o;
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a11 - o.a11, self.a12 - o.a12, self.a21 - o.a21, self.a22 - o.a22)
    }
}

impl SubAssign for Mat2 {
    fn sub_assign(&mut self, o: Mat2) {
        *self = *self - o;
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2::new(-self.a11, -self.a12, -self.a21, -self.a22)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

impl Mul<Complex64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: Complex64) -> Mat2 {
        self.scale(s)
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        self.scale_re(s)
    }
}

impl std::fmt::Display for Mat2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a11, self.a12, self.a21, self.a22)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_offdiag_is_cosh_sinh() {
        let a = Mat2::pauli(1);
        let t = 0.7;
        let e = a.scale_re(t).exp();
        let expected = Mat2::scalar(t.cosh().into()) + a.scale_re(t.sinh());
        assert!((e - expected).norm() < 1e-15);
        // tiny argument path
        let e = a.scale_re(1e-6).exp();
        let expected = Mat2::scalar(1e-6f64.cosh().into()) + a.scale_re(1e-6f64.sinh());
        assert!((e - expected).norm() < 1e-16);
    }

    #[test]
    fn exp_of_nilpotent_is_linear() {
        let n = Mat2::e21().scale(Complex64::new(2.0, 1.0));
        let e = n.exp();
        assert!((e - (Mat2::identity() + n)).norm() < 1e-15);
    }

    #[test]
    fn exp_with_trace() {
        let d = Mat2::diag(Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.5));
        let e = d.exp();
        assert!((e.a11 - d.a11.exp()).norm() < 1e-14);
        assert!((e.a22 - d.a22.exp()).norm() < 1e-14);
    }

    #[test]
    fn cholesky_reconstructs() {
        let q = Mat2::new(
            Complex64::new(4.0, 0.0),
            Complex64::new(1.0, -1.0),
            Complex64::new(1.0, 1.0),
            Complex64::new(3.0, 0.0),
        );
        let c = q.cholesky_lower().unwrap();
        assert!((c * c.adjoint() - q).norm() < 1e-14);
        assert!(Mat2::from_real(-1.0, 0.0, 0.0, 1.0).cholesky_lower().is_none());
    }

    #[test]
    fn pauli_algebra() {
        let (s1, s2, s3) = (Mat2::pauli(1), Mat2::pauli(2), Mat2::pauli(3));
        assert!((s1 * s2 - s3.scale(I)).norm() < 1e-15);
        assert!((s1 * s1 - Mat2::identity()).norm() < 1e-15);
    }
}
