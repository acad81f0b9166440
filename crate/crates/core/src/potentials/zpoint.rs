use num_complex::Complex64;

/// A point of the universal cover of C∖{0}: z together with a chosen log z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZPoint {
    pub z: Complex64,
    pub log_z: Complex64,
}

impl ZPoint {
    /// The principal sheet (arg z ∈ (−π, π]). At z = 0 the log is −∞.
    pub fn principal(z: Complex64) -> Self {
        Self { z, log_z: z.ln() }
    }

    pub fn from_log(log_z: Complex64) -> Self {
        Self { z: log_z.exp(), log_z }
    }

    /// Move by a small dz, continuing log z along the straight segment.
    pub fn offset(&self, dz: Complex64) -> Self {
        Self { z: self.z + dz, log_z: self.log_z + (Complex64::new(1.0, 0.0) + dz / self.z).ln() }
    }

    /// 1/z on the cover (log negated).
    pub fn recip(&self) -> Self {
        Self { z: self.z.inv(), log_z: -self.log_z }
    }

    /// z^a = exp(a·log z) on this sheet.
    pub fn powc(&self, a: Complex64) -> Complex64 {
        (self.log_z * a).exp()
    }

    pub fn sqrt(&self) -> Complex64 {
        (self.log_z * 0.5).exp()
    }

    /// The deck transformation: one counterclockwise turn around the origin.
    pub fn deck(&self) -> Self {
        Self { z: self.z, log_z: self.log_z + Complex64::new(0.0, std::f64::consts::TAU) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_changes_sign_under_deck() {
        let p = ZPoint::principal(Complex64::new(-0.5, 0.2));
        let a = p.sqrt();
        let b = p.deck().sqrt();
        assert!((a + b).norm() < 1e-15);
        assert!((a * a - p.z).norm() < 1e-15);
    }

    #[test]
    fn offset_crosses_the_cut_continuously() {
        let p = ZPoint::principal(Complex64::new(-1.0, 1e-3));
        let q = p.offset(Complex64::new(0.0, -2e-3));
        assert!((q.log_z.im - std::f64::consts::PI).abs() < 1e-2);
        assert!(q.log_z.im > 3.1);
    }
}
