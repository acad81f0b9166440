//! Holomorphic potentials ξ = A(z, λ)·dz, gauge transformations and coordinate changes.
//!
//! Values are evaluated pointwise in (z, λ). The z-argument is a [`ZPoint`], a point of
//! the universal cover of C∖{0}, so gauges containing √z or log z are single-valued
//! along any tracked path.

mod chain;
mod zpoint;

pub use chain::{
    cylinder_potential, k_equivalence_certificate, omega, reflection_gauge, reduction_chain,
    reduction_intermediate, EquivalenceReport, ReductionChain,
};
pub use zpoint::ZPoint;

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::loops::{CircleGrid, LoopMatrix, LoopSamples, Mat2};

pub(crate) type Field = Arc<dyn Fn(&ZPoint, Complex64) -> Mat2 + Send + Sync>;

/// A potential ξ = A(z, λ)·dz; [`Potential::eval`] returns the matrix A.
#[derive(Clone)]
pub struct Potential {
    field: Field,
    descriptor: String,
    smyth: Option<(i32, Complex64)>,
    regular_at_origin: bool,
}

impl std::fmt::Debug for Potential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Potential").field("descriptor", &self.descriptor).finish()
    }
}

impl Potential {
    pub fn new(
        descriptor: impl Into<String>,
        regular_at_origin: bool,
        field: impl Fn(&ZPoint, Complex64) -> Mat2 + Send + Sync + 'static,
    ) -> Self {
        Self { field: Arc::new(field), descriptor: descriptor.into(), smyth: None, regular_at_origin }
    }

    pub fn eval(&self, z: &ZPoint, lambda: Complex64) -> Mat2 {
        (self.field)(z, lambda)
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    /// (k, c) when this is exactly λ⁻¹·offdiag(1, c·z^k).
    pub fn smyth_parameters(&self) -> Option<(i32, Complex64)> {
        self.smyth
    }

    /// Whether A(z, λ) is holomorphic at z = 0 (paths may then start at the origin).
    pub fn is_regular_at_origin(&self) -> bool {
        self.regular_at_origin
    }

    /// λ-coefficients of A at a point, recovered from circle samples.
    pub fn coefficient_loop(&self, z: &ZPoint, grid: &CircleGrid) -> LoopMatrix {
        let samples = LoopSamples { values: grid.points().iter().map(|l| self.eval(z, *l)).collect() };
        grid.coefficients(&samples).0
    }

    /// The vacuum λ⁻¹·offdiag(1, 1)·dz.
    pub fn vacuum() -> Self {
        let mut p = Self::new("vacuum", true, |_z, l| Mat2::pauli(1).scale(l.inv()));
        p.smyth = Some((0, Complex64::new(1.0, 0.0)));
        p
    }
}

/// The Smyth-type family ξ_k = λ⁻¹·[[0, 1], [c·z^k, 0]]·dz.
pub fn make_xi(k: i32, c: Complex64) -> Result<Potential> {
    if c.norm() == 0.0 || !c.is_finite() {
        return Err(Error::ZeroC);
    }
    let one = Complex64::new(1.0, 0.0);
    let mut p = Potential::new(format!("xi_k(k={k}, c={c})"), k >= 0, move |z, l| {
        Mat2::offdiag(one, c * z.z.powi(k)).scale(l.inv())
    });
    p.smyth = Some((k, c));
    Ok(p)
}

/// A positive (λ-holomorphic inside the disk) gauge p₊(z, λ) with its hand-coded z-derivative.
#[derive(Clone)]
pub struct GaugeLoop {
    name: String,
    value: Field,
    dz_value: Field,
}

impl std::fmt::Debug for GaugeLoop {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GaugeLoop").field("name", &self.name).finish()
    }
}

impl GaugeLoop {
    pub fn new(
        name: impl Into<String>,
        value: impl Fn(&ZPoint, Complex64) -> Mat2 + Send + Sync + 'static,
        dz_value: impl Fn(&ZPoint, Complex64) -> Mat2 + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), value: Arc::new(value), dz_value: Arc::new(dz_value) }
    }

    pub fn identity() -> Self {
        Self::constant("id", Mat2::identity())
    }

    /// A z-independent gauge.
    pub fn constant(name: impl Into<String>, m: Mat2) -> Self {
        Self::new(name, move |_, _| m, |_, _| Mat2::zero())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self, z: &ZPoint, lambda: Complex64) -> Mat2 {
        (self.value)(z, lambda)
    }

    pub fn dz_value(&self, z: &ZPoint, lambda: Complex64) -> Mat2 {
        (self.dz_value)(z, lambda)
    }

    /// ‖(p(z+ε) − p(z−ε))/(2ε) − ∂_z p(z)‖ for a real step ε.
    pub fn derivative_check(&self, z: &ZPoint, lambda: Complex64, eps: f64) -> f64 {
        let e = Complex64::new(eps, 0.0);
        let fd = (self.value(&z.offset(e), lambda) - self.value(&z.offset(-e), lambda)).scale_re(0.5 / eps);
        (fd - self.dz_value(z, lambda)).norm()
    }

    /// ℓ¹ mass of negative λ-degrees of p(z, ·), measured on a circle grid.
    pub fn positivity_defect(&self, z: &ZPoint, grid: &CircleGrid) -> f64 {
        let samples = LoopSamples { values: grid.points().iter().map(|l| self.value(z, *l)).collect() };
        grid.coefficients(&samples).0.negative_mass()
    }
}

fn probe_points() -> Vec<(ZPoint, Complex64)> {
    let mut out = Vec::new();
    for (k, r) in [0.5, 1.0, 2.0].iter().enumerate() {
        for j in 0..4 {
            let z = ZPoint::principal(Complex64::from_polar(*r, 0.3 + 1.1 * j as f64 + 0.2 * k as f64));
            let l = Complex64::from_polar(1.0, 0.7 * j as f64 + 0.4 * k as f64);
            out.push((z, l));
        }
    }
    out
}

/// ξ ↦ p⁻¹ξp + p⁻¹dp. Invertibility of p is checked on a fixed probe set.
pub fn apply_gauge(xi: &Potential, p: &GaugeLoop) -> Result<Potential> {
    for (z, l) in probe_points() {
        let det = p.value(&z, l).det().norm();
        if det < 1e-13 || !det.is_finite() {
            return Err(Error::SingularGauge { z: format!("{}", z.z), det });
        }
    }
    let inner = xi.field.clone();
    let value = p.value.clone();
    let dz_value = p.dz_value.clone();
    let descriptor = format!("gauge({}, {})", xi.descriptor, p.name);
    Ok(Potential::new(descriptor, false, move |z, l| {
        let g = value(z, l);
        let gi = g.adjugate().scale(g.det().inv());
        gi * inner(z, l) * g + gi * dz_value(z, l)
    }))
}

/// Pullback under z ↦ 1/z: A(z)dz becomes −A(1/w)/w²·dw.
pub fn invert_z(xi: &Potential) -> Potential {
    let inner = xi.field.clone();
    let mut out = Potential::new(format!("invert_z({})", xi.descriptor), false, move |w, l| {
        let z = w.recip();
        inner(&z, l).scale(-(w.z * w.z).inv())
    });
    if let Some((k, c)) = xi.smyth {
        // keeps the descriptor honest; the result is not of Smyth form
        out.descriptor = format!("invert_z(xi_k(k={k}, c={c}))");
    }
    out
}

/// Pullback under z = α·w: A(αw)·α·dw.
pub fn scale_z(xi: &Potential, alpha: Complex64) -> Potential {
    let inner = xi.field.clone();
    let log_alpha = alpha.ln();
    Potential::new(format!("scale_z({}, {alpha})", xi.descriptor), xi.regular_at_origin, move |w, l| {
        let z = ZPoint { z: alpha * w.z, log_z: w.log_z + log_alpha };
        inner(&z, l).scale(alpha)
    })
}

/// The coordinate change z = α·w.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordinateScale {
    pub alpha: Complex64,
}

/// Remove c from ξ₋₁: with α = 1/c and μ = c^{−1/2}, the pullback under z = αw gauged by
/// diag(μ, μ⁻¹) is exactly make_xi(−1, 1).
pub fn normalize_c(xi: &Potential) -> Result<(Potential, GaugeLoop, CoordinateScale)> {
    let (k, c) = xi
        .smyth
        .ok_or_else(|| Error::InvalidInput("normalize_c needs a potential of the form xi_k".into()))?;
    if k != -1 {
        return Err(Error::InvalidInput(format!("normalize_c needs k = -1, got k = {k}")));
    }
    let alpha = c.inv();
    let mu = c.sqrt().inv();
    let gauge = if c == Complex64::new(1.0, 0.0) {
        GaugeLoop::identity()
    } else {
        GaugeLoop::constant(format!("diag(c^-1/2, c^1/2), c={c}"), Mat2::diag(mu, mu.inv()))
    };
    let scaled = scale_z(xi, alpha);
    let mut out = apply_gauge(&scaled, &gauge)?;
    out.smyth = Some((-1, Complex64::new(1.0, 0.0)));
    out.descriptor = format!("normalize_c({})", xi.descriptor);
    Ok((out, gauge, CoordinateScale { alpha }))
}

/// Largest ‖A₁(z, λ) − A₂(z, λ)‖ over sample points.
pub fn max_residual(a: &Potential, b: &Potential, samples: &[(ZPoint, Complex64)]) -> f64 {
    samples.iter().map(|(z, l)| (a.eval(z, *l) - b.eval(z, *l)).norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub(crate) fn random_samples(n: usize, seed: u64) -> Vec<(ZPoint, Complex64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let r = rng.gen_range(0.3..2.5);
                let th = rng.gen_range(-3.0..3.0);
                let t = rng.gen_range(0.0..std::f64::consts::TAU);
                (ZPoint::principal(Complex64::from_polar(r, th)), Complex64::from_polar(1.0, t))
            })
            .collect()
    }

    #[test]
    fn make_xi_values() {
        let l = c(0.6, 0.8);
        let xi = make_xi(-1, c(1.0, 0.0)).unwrap();
        let v = xi.eval(&ZPoint::principal(c(1.0, 0.0)), l);
        assert!((v - Mat2::pauli(1).scale(l.inv())).norm() < 1e-15);

        let xi = make_xi(2, c(3.0, 0.0)).unwrap();
        let v = xi.eval(&ZPoint::principal(c(2.0, 0.0)), l);
        assert!((v - Mat2::offdiag(c(1.0, 0.0), c(12.0, 0.0)).scale(l.inv())).norm() < 1e-14);

        let xi = make_xi(0, c(0.3, 0.2)).unwrap();
        let a = xi.eval(&ZPoint::principal(c(0.1, 2.0)), l);
        let b = xi.eval(&ZPoint::principal(c(-1.5, 0.4)), l);
        assert_eq!(a, b);

        assert!(matches!(make_xi(1, c(0.0, 0.0)), Err(Error::ZeroC)));
    }

    #[test]
    fn xi_has_only_the_inverse_lambda_coefficient() {
        let grid = CircleGrid::new(16).unwrap();
        let xi = make_xi(-1, c(2.0, -1.0)).unwrap();
        let lm = xi.coefficient_loop(&ZPoint::principal(c(0.4, 0.9)), &grid);
        assert_eq!((lm.min_deg(), lm.max_deg()), (-1, -1));
        assert!(lm.is_twisted(1e-15));
    }

    #[test]
    fn identity_gauge_is_trivial() {
        let xi = make_xi(-1, c(1.5, 0.5)).unwrap();
        let g = apply_gauge(&xi, &GaugeLoop::identity()).unwrap();
        assert!(max_residual(&xi, &g, &random_samples(20, 1)) < 1e-15);
    }

    #[test]
    fn constant_diagonal_gauge_matches_conjugation() {
        let cc = c(0.7, -0.4);
        let mu = c(1.3, 0.2);
        let xi = make_xi(-1, cc).unwrap();
        let g = apply_gauge(&xi, &GaugeLoop::constant("d", Mat2::diag(mu, mu.inv()))).unwrap();
        let expected = Potential::new("oracle", false, move |z, l| {
            Mat2::offdiag((mu * mu).inv(), cc * mu * mu / z.z).scale(l.inv())
        });
        assert!(max_residual(&g, &expected, &random_samples(30, 2)) < 1e-14);
    }

    #[test]
    fn singular_gauge_is_rejected() {
        let xi = make_xi(0, c(1.0, 0.0)).unwrap();
        let p = GaugeLoop::constant("zero", Mat2::e12());
        assert!(matches!(apply_gauge(&xi, &p), Err(Error::SingularGauge { .. })));
    }

    #[test]
    fn invert_z_examples() {
        let cc = c(0.5, 2.0);
        let xi = make_xi(-1, cc).unwrap();
        let inv = invert_z(&xi);
        let l = c(0.0, 1.0);
        let v = inv.eval(&ZPoint::principal(c(1.0, 0.0)), l);
        assert!((v - Mat2::offdiag(c(-1.0, 0.0), -cc).scale(l.inv())).norm() < 1e-15);

        let samples = random_samples(40, 3);
        for k in [-3, -1, 0, 2] {
            let xi = make_xi(k, cc).unwrap();
            let twice = invert_z(&invert_z(&xi));
            assert!(max_residual(&xi, &twice, &samples) < 1e-12);
        }

        let xi = make_xi(-2, cc).unwrap();
        let expected = Potential::new("oracle", false, move |w, l| {
            Mat2::offdiag(-(w.z * w.z).inv(), -cc).scale(l.inv())
        });
        assert!(max_residual(&invert_z(&xi), &expected, &samples) < 1e-13);
    }

    #[test]
    fn normalize_c_reaches_unit_c() {
        let target = make_xi(-1, c(1.0, 0.0)).unwrap();
        let samples = random_samples(40, 4);
        let (p, g, s) = normalize_c(&make_xi(-1, c(1.0, 0.0)).unwrap()).unwrap();
        assert_eq!(g.name(), "id");
        assert_eq!(s.alpha, c(1.0, 0.0));
        assert!(max_residual(&p, &target, &samples) < 1e-15);
        for cc in [c(4.0, 0.0), c(0.0, 1.0), c(2.0, -1.0)] {
            let (p, _, s) = normalize_c(&make_xi(-1, cc).unwrap()).unwrap();
            assert!((s.alpha - cc.inv()).norm() < 1e-15);
            assert!(max_residual(&p, &target, &samples) < 1e-12, "c = {cc}");
        }
        assert!(normalize_c(&make_xi(0, c(1.0, 0.0)).unwrap()).is_err());
    }

    #[test]
    fn scale_z_pullback() {
        let xi = make_xi(3, c(1.0, 0.5)).unwrap();
        let alpha = c(0.2, 1.1);
        let s = scale_z(&xi, alpha);
        let w = ZPoint::principal(c(0.7, -0.3));
        let direct = xi.eval(&ZPoint::principal(alpha * w.z), c(1.0, 0.0)).scale(alpha);
        assert!((s.eval(&w, c(1.0, 0.0)) - direct).norm() < 1e-14);
    }
}
