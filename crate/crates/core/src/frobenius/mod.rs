//! The particular solution L̃ = L̂·P of dL = L·ξ₋₁ near z = 0 as a formal log-series,
//! and the truncation-level isotropy certificates built on it.

mod isotropy;
mod series;

pub use isotropy::{
    isotropy_kernel, isotropy_probe, kernel_certificate, sqrt_log_fit_residual, vacuum_series,
    wplus_ode_residuals, IsotropyProbe, KernelCertificate, WplusField, WplusResiduals,
};
pub use series::LogSeries;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::loops::{LoopMatrix, Mat2};
use crate::potentials::ZPoint;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// L̃ = (id + log z·D)·P for ξ₋₁ = λ⁻¹[[0, 1], [c/z, 0]]dz, D = λ⁻¹c·E₂₁.
#[derive(Debug, Clone)]
pub struct FrobeniusSolution {
    pub c: Complex64,
    pub n_z: usize,
    pub n_lambda: i32,
    /// P_j for j = 0..n_z − 1, P₀ = id.
    pub p: Vec<LoopMatrix>,
    /// η₁ⱼ and η₂ⱼ, stored as scalar multiples of the identity.
    pub eta1: Vec<LoopMatrix>,
    pub eta2: Vec<LoopMatrix>,
    /// Largest coefficient gap between P and the series rebuilt from the η tables.
    pub printed_form_mismatch: f64,
    /// ℓ¹ mass dropped by the λ-band.
    pub truncated_mass: f64,
}

/// D = λ⁻¹c·E₂₁.
pub fn d_matrix(c: Complex64) -> LoopMatrix {
    LoopMatrix::monomial(-1, Mat2::e21().scale(c))
}

/// P_j from P_{j−1}: P_j = (1/j)(1 + S/j + S²/j²)(λ⁻¹·P_{j−1}·E₁₂) with S(X) = XD − DX.
fn next_p(prev: &LoopMatrix, d: &LoopMatrix, j: usize) -> LoopMatrix {
    let r = prev.right_mul(&Mat2::e12()).shift(-1);
    let s = |x: &LoopMatrix| x.mul(d).sub(&d.mul(x));
    let jf = Complex64::new(j as f64, 0.0);
    let s1 = s(&r);
    let s2 = s(&s1);
    r.add(&s1.scale(jf.inv())).add(&s2.scale((jf * jf).inv())).scale(jf.inv())
}

/// P_0, …, P_{n−1}, exact Laurent polynomials (P_j has λ-degrees in [−3j, −j]).
pub fn p_coefficients(c: Complex64, n: usize) -> Vec<LoopMatrix> {
    let d = d_matrix(c);
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(LoopMatrix::identity());
    for j in 1..n {
        let next = next_p(&out[j - 1], &d, j);
        out.push(next);
    }
    out
}

fn scalar_entry(l: &LoopMatrix, i: usize, j: usize) -> LoopMatrix {
    l.map_coeffs(|m| Mat2::scalar(m.entries()[2 * i + j]))
}

/// Build the solution through z-order n_z − 1; λ-degrees beyond ±n_lambda are dropped
/// (and reported) only when n_lambda < 3(n_z − 1).
pub fn build_frobenius(c: Complex64, n_z: usize, n_lambda: i32) -> Result<FrobeniusSolution> {
    if c.norm() == 0.0 {
        return Err(Error::ZeroC);
    }
    if n_z < 2 {
        return Err(Error::InvalidInput(format!("build_frobenius needs N_z >= 2, got {n_z}")));
    }
    // one extra order so η₁ reaches j = n_z − 2
    let exact = p_coefficients(c, n_z);
    let mut truncated_mass = 0.0;
    let p: Vec<LoopMatrix> = exact
        .iter()
        .map(|x| {
            let (t, tail) = x.truncate(n_lambda);
            truncated_mass += tail;
            t
        })
        .collect();

    let eta1: Vec<LoopMatrix> = (0..n_z - 1).map(|j| scalar_entry(&exact[j + 1], 0, 1).shift(1)).collect();
    // α = −λη₂,₁ − λ⁻¹c; η₂,₁ cancels from P and is set to zero.
    let alpha = LoopMatrix::monomial(-1, Mat2::scalar(-c));
    let mut eta2 = vec![LoopMatrix::identity(), LoopMatrix::zero()];
    for j in 2..n_z {
        let e = scalar_entry(&exact[j], 1, 1).sub(&alpha.mul(&eta1[j - 1]).shift(-1));
        eta2.push(e);
    }
    eta2.truncate(n_z);

    let printed = printed_p(c, &eta1, &eta2);
    let printed_form_mismatch = printed
        .iter()
        .zip(&exact)
        .take(n_z - 1)
        .map(|(a, b)| a.max_coeff_distance(b))
        .fold(0.0, f64::max);

    Ok(FrobeniusSolution { c, n_z, n_lambda, p, eta1, eta2, printed_form_mismatch, truncated_mass })
}

/// P rebuilt from the η tables in the displayed form
/// [[1, 0], [α, 1]]·[[Σ(j+1)η₁ⱼzʲ, λ⁻¹zΣη₁ⱼzʲ], [λ(Σjη₂ⱼzʲ⁻¹ + λ⁻²cΣη₁ⱼzʲ), Ση₂ⱼzʲ]].
fn printed_p(c: Complex64, eta1: &[LoopMatrix], eta2: &[LoopMatrix]) -> Vec<LoopMatrix> {
    let n = eta1.len().min(eta2.len());
    let alpha = LoopMatrix::monomial(-1, Mat2::scalar(-c)).sub(&eta2.get(1).cloned().unwrap_or_default().shift(1));
    let entry = |l: &LoopMatrix, pos: Mat2| l.map_coeffs(|m| pos.scale(m.a11));
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let m11 = eta1[j].scale(Complex64::new((j + 1) as f64, 0.0));
        let m12 = if j >= 1 { eta1[j - 1].shift(-1) } else { LoopMatrix::zero() };
        let next2 = eta2.get(j + 1).cloned().unwrap_or_default().scale(Complex64::new((j + 1) as f64, 0.0));
        let m21 = next2.add(&eta1[j].scale(c).shift(-2)).shift(1);
        let m22 = eta2[j].clone();
        let p11 = m11.clone();
        let p12 = m12.clone();
        let p21 = alpha.mul(&m11).add(&m21);
        let p22 = alpha.mul(&m12).add(&m22);
        out.push(
            entry(&p11, Mat2::new(ONE, 0.0.into(), 0.0.into(), 0.0.into()))
                .add(&entry(&p12, Mat2::e12()))
                .add(&entry(&p21, Mat2::e21()))
                .add(&entry(&p22, Mat2::new(0.0.into(), 0.0.into(), 0.0.into(), ONE))),
        );
    }
    out
}

impl FrobeniusSolution {
    pub fn d(&self) -> LoopMatrix {
        d_matrix(self.c)
    }

    /// L̂ = id + log z·D as a log-series.
    pub fn l_hat(&self, p_max: usize) -> Result<LogSeries> {
        let mut s = LogSeries::constant(p_max, self.n_z, LoopMatrix::identity());
        if p_max < 1 {
            return Err(Error::OverflowOfLogPower { needed: 1, max: p_max });
        }
        s.set_coeff(1, 0, self.d());
        Ok(s)
    }

    pub fn p_series(&self, p_max: usize) -> LogSeries {
        LogSeries::from_sector(p_max, self.n_z, 0, &self.p).expect("sector 0 always exists")
    }

    /// L̃ = P + log z·D·P.
    pub fn l_tilde(&self, p_max: usize) -> Result<LogSeries> {
        self.l_hat(p_max)?.mul(&self.p_series(p_max))
    }

    /// L̂ evaluated on a sheet.
    pub fn l_hat_value(&self, z: &ZPoint, lambda: Complex64) -> Mat2 {
        Mat2::identity() + Mat2::e21().scale(self.c * z.log_z / lambda)
    }

    /// z·(dL̃ − L̃ξ) = θL̃ − L̃·(zA) with zA = λ⁻¹[[0, z], [c, 0]]; all coefficients
    /// through order n_z − 1 of this series must vanish.
    pub fn residual(&self) -> Result<LogSeries> {
        let l = self.l_tilde(2)?;
        let za_const = LogSeries::constant(2, self.n_z, LoopMatrix::monomial(-1, Mat2::e21().scale(self.c)));
        let za_lin = LogSeries::constant(2, self.n_z, LoopMatrix::monomial(-1, Mat2::e12())).shift_z(1);
        Ok(l.theta().sub(&l.mul(&za_const.add(&za_lin))?))
    }

    /// Largest residual coefficient through order n_z − 2 of dL̃ − L̃ξ.
    pub fn residual_norm(&self) -> Result<f64> {
        Ok(self.residual()?.max_norm_through(self.n_z - 1))
    }

    /// z·(z·V″ − λ⁻²c·V) for V the second column of L̃, as a log-series.
    pub fn column_ode_residual(&self) -> Result<LogSeries> {
        let v = self.l_tilde(2)?.right_mul_loop(&LoopMatrix::constant(Mat2::diag(0.0.into(), ONE)));
        let t = v.theta();
        let lhs = t.theta().sub(&t);
        let rhs = v.shift_z(1).left_mul_loop(&LoopMatrix::monomial(-2, Mat2::scalar(self.c)));
        Ok(lhs.sub(&rhs))
    }
}

/// [[1, 0], [2πic·λ⁻¹, 1]]: the log z ↦ log z + 2πi action on L̂ (P is single valued).
pub fn analytic_monodromy(sol: &FrobeniusSolution) -> LoopMatrix {
    LoopMatrix::identity().add(&sol.d().scale(Complex64::new(0.0, std::f64::consts::TAU)))
}

/// L̃(z, λ) by summing the P-recurrence numerically until the terms are negligible.
pub fn frobenius_value(c: Complex64, z: &ZPoint, lambda: Complex64) -> Mat2 {
    let d = Mat2::e21().scale(c / lambda);
    let li = lambda.inv();
    let mut term = Mat2::identity();
    let mut sum = term;
    let mut zj = ONE;
    let mut small = 0;
    for j in 1..10_000 {
        let jf = j as f64;
        let r = (term * Mat2::e12()).scale(li);
        let s1 = r.commutator(&d);
        let s2 = s1.commutator(&d);
        term = (r + s1.scale_re(1.0 / jf) + s2.scale_re(1.0 / (jf * jf))).scale_re(1.0 / jf);
        zj *= z.z;
        let t = term.scale(zj);
        sum += t;
        if t.norm() <= 1e-17 * sum.norm() {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
    (Mat2::identity() + d.scale(z.log_z)) * sum
}
