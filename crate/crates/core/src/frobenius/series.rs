use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::loops::{LoopMatrix, Mat2};
use crate::potentials::ZPoint;

/// Σ_p A_p(z, λ)·(log z)^p with each A_p a power series in z truncated after order n_z − 1.
/// Every stored coefficient is exact: products drop orders ≥ n_z instead of keeping
/// partially accumulated terms.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSeries {
    n_z: usize,
    p_max: usize,
    sectors: Vec<Vec<LoopMatrix>>,
}

impl LogSeries {
    pub fn zero(p_max: usize, n_z: usize) -> Self {
        Self { n_z, p_max, sectors: vec![vec![LoopMatrix::zero(); n_z]; p_max + 1] }
    }

    /// A_p = Σ_j coeffs[j]·z^j in sector p; extra coefficients are dropped.
    pub fn from_sector(p_max: usize, n_z: usize, p: usize, coeffs: &[LoopMatrix]) -> Result<Self> {
        let mut s = Self::zero(p_max, n_z);
        if p > p_max {
            return Err(Error::OverflowOfLogPower { needed: p, max: p_max });
        }
        for (j, c) in coeffs.iter().take(n_z).enumerate() {
            s.sectors[p][j] = c.clone();
        }
        Ok(s)
    }

    pub fn constant(p_max: usize, n_z: usize, m: LoopMatrix) -> Self {
        let mut s = Self::zero(p_max, n_z);
        if n_z > 0 {
            s.sectors[0][0] = m;
        }
        s
    }

    pub fn n_z(&self) -> usize {
        self.n_z
    }

    pub fn p_max(&self) -> usize {
        self.p_max
    }

    pub fn sector(&self, p: usize) -> &[LoopMatrix] {
        &self.sectors[p]
    }

    pub fn coeff(&self, p: usize, j: usize) -> &LoopMatrix {
        &self.sectors[p][j]
    }

    pub fn set_coeff(&mut self, p: usize, j: usize, v: LoopMatrix) {
        self.sectors[p][j] = v;
    }

    /// Highest log power with a nonzero coefficient.
    pub fn log_degree(&self) -> Option<usize> {
        (0..=self.p_max).rev().find(|p| self.sectors[*p].iter().any(|c| !c.is_zero()))
    }

    fn zip(&self, other: &Self, f: impl Fn(&LoopMatrix, &LoopMatrix) -> LoopMatrix) -> Self {
        let n_z = self.n_z.min(other.n_z);
        let p_max = self.p_max.max(other.p_max);
        let empty = LoopMatrix::zero();
        let mut out = Self::zero(p_max, n_z);
        for p in 0..=p_max {
            for j in 0..n_z {
                let a = self.sectors.get(p).map_or(&empty, |s| &s[j]);
                let b = other.sectors.get(p).map_or(&empty, |s| &s[j]);
                out.sectors[p][j] = f(a, b);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.sub(b))
    }

    pub fn map(&self, f: impl Fn(&LoopMatrix) -> LoopMatrix) -> Self {
        Self {
            n_z: self.n_z,
            p_max: self.p_max,
            sectors: self.sectors.iter().map(|s| s.iter().map(&f).collect()).collect(),
        }
    }

    /// Entrywise adjugate; for det = 1 this is the inverse.
    pub fn adjugate(&self) -> Self {
        self.map(|c| c.map_coeffs(Mat2::adjugate))
    }

    pub fn left_mul_loop(&self, m: &LoopMatrix) -> Self {
        self.map(|c| m.mul(c))
    }

    pub fn right_mul_loop(&self, m: &LoopMatrix) -> Self {
        self.map(|c| c.mul(m))
    }

    /// Product; fails if a log power above p_max would be produced.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let n_z = self.n_z.min(other.n_z);
        let p_max = self.p_max.max(other.p_max);
        let (Some(da), Some(db)) = (self.log_degree(), other.log_degree()) else {
            return Ok(Self::zero(p_max, n_z));
        };
        if da + db > p_max {
            return Err(Error::OverflowOfLogPower { needed: da + db, max: p_max });
        }
        let mut out = Self::zero(p_max, n_z);
        for p in 0..=da {
            for q in 0..=db {
                for i in 0..n_z {
                    let a = &self.sectors[p][i];
                    if a.is_zero() {
                        continue;
                    }
                    for j in 0..n_z - i {
                        let b = &other.sectors[q][j];
                        if b.is_zero() {
                            continue;
                        }
                        out.sectors[p + q][i + j] = out.sectors[p + q][i + j].add(&a.mul(b));
                    }
                }
            }
        }
        Ok(out)
    }

    /// θ = z·∂_z, exact: θ(A·ℓ^p) = (θA)·ℓ^p + p·A·ℓ^{p−1}.
    pub fn theta(&self) -> Self {
        let mut out = Self::zero(self.p_max, self.n_z);
        for p in 0..=self.p_max {
            for j in 0..self.n_z {
                let a = &self.sectors[p][j];
                if a.is_zero() {
                    continue;
                }
                out.sectors[p][j] = out.sectors[p][j].add(&a.scale(Complex64::new(j as f64, 0.0)));
                if p > 0 {
                    out.sectors[p - 1][j] = out.sectors[p - 1][j].add(&a.scale(Complex64::new(p as f64, 0.0)));
                }
            }
        }
        out
    }

    /// Multiply by z^k (k ≥ 0), dropping orders beyond the truncation.
    pub fn shift_z(&self, k: usize) -> Self {
        let mut out = Self::zero(self.p_max, self.n_z);
        for p in 0..=self.p_max {
            for j in k..self.n_z {
                out.sectors[p][j] = self.sectors[p][j - k].clone();
            }
        }
        out
    }

    /// The deck transformation log z ↦ log z + 2πi.
    pub fn tau(&self) -> Self {
        let two_pi_i = Complex64::new(0.0, std::f64::consts::TAU);
        let mut out = Self::zero(self.p_max, self.n_z);
        for p in 0..=self.p_max {
            for q in 0..=p {
                let factor = two_pi_i.powu((p - q) as u32) * binomial(p, q);
                for j in 0..self.n_z {
                    if !self.sectors[p][j].is_zero() {
                        out.sectors[q][j] = out.sectors[q][j].add(&self.sectors[p][j].scale(factor));
                    }
                }
            }
        }
        out
    }

    pub fn eval(&self, z: &ZPoint, lambda: Complex64) -> Mat2 {
        let mut total = Mat2::zero();
        let mut lp = Complex64::new(1.0, 0.0);
        for p in 0..=self.p_max {
            let mut acc = Mat2::zero();
            for c in self.sectors[p].iter().rev() {
                acc = acc.scale(z.z) + c.eval(lambda);
            }
            total += acc.scale(lp);
            lp *= z.log_z;
        }
        total
    }

    /// Largest coefficient norm in sector p (over all z-orders and λ-degrees).
    pub fn sector_norm(&self, p: usize) -> f64 {
        self.sectors
            .get(p)
            .map_or(0.0, |s| s.iter().flat_map(|c| c.terms().map(|(_, m)| m.norm())).fold(0.0, f64::max))
    }

    /// Largest coefficient norm over orders 0..=max_order in every sector.
    pub fn max_norm_through(&self, max_order: usize) -> f64 {
        self.sectors
            .iter()
            .flat_map(|s| s.iter().take(max_order + 1))
            .flat_map(|c| c.terms().map(|(_, m)| m.norm()))
            .fold(0.0, f64::max)
    }

    /// ℓ¹ mass of negative λ-degrees in sector p.
    pub fn negative_mass(&self, p: usize) -> f64 {
        self.sectors.get(p).map_or(0.0, |s| s.iter().map(LoopMatrix::negative_mass).sum())
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lm(m: Mat2) -> LoopMatrix {
        LoopMatrix::constant(m)
    }

    #[test]
    fn overflow_is_loud() {
        let a = LogSeries::from_sector(2, 4, 2, &[lm(Mat2::identity())]).unwrap();
        let b = LogSeries::from_sector(2, 4, 1, &[lm(Mat2::identity())]).unwrap();
        assert!(matches!(a.mul(&b), Err(Error::OverflowOfLogPower { needed: 3, max: 2 })));
        assert!(b.mul(&b).is_ok());
        assert!(LogSeries::from_sector(1, 4, 2, &[]).is_err());
    }

    #[test]
    fn theta_of_log_and_power() {
        // θ(z²·ℓ) = 2z²ℓ + z²
        let s = LogSeries::from_sector(2, 4, 1, &[LoopMatrix::zero(), LoopMatrix::zero(), lm(Mat2::identity())]).unwrap();
        let t = s.theta();
        assert_eq!(t.coeff(1, 2).coeff(0), Mat2::identity().scale_re(2.0));
        assert_eq!(t.coeff(0, 2).coeff(0), Mat2::identity());
    }

    #[test]
    fn tau_expands_binomially() {
        let s = LogSeries::from_sector(2, 2, 2, &[lm(Mat2::identity())]).unwrap();
        let t = s.tau();
        let w = Complex64::new(0.0, std::f64::consts::TAU);
        assert!((t.coeff(1, 0).coeff(0) - Mat2::scalar(w * 2.0)).norm() < 1e-14);
        assert!((t.coeff(0, 0).coeff(0) - Mat2::scalar(w * w)).norm() < 1e-12);
    }

    #[test]
    fn eval_matches_definition() {
        let s = LogSeries::from_sector(2, 3, 1, &[lm(Mat2::identity()), lm(Mat2::pauli(1))]).unwrap();
        let z = ZPoint::principal(Complex64::new(0.3, 0.2));
        let expect = (Mat2::identity() + Mat2::pauli(1).scale(z.z)).scale(z.log_z);
        assert!((s.eval(&z, Complex64::new(1.0, 0.0)) - expect).norm() < 1e-15);
    }
}
