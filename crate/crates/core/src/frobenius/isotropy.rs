//! Isotropy probes and the truncated linear-algebra certificate for hL̃ = L̃W₊.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{p_coefficients, FrobeniusSolution, LogSeries};
use crate::error::{Error, Result};
use crate::loops::{LoopMatrix, Mat2};
use crate::par::Exec;
use crate::potentials::ZPoint;

/// W = L̃⁻¹hL̃ together with its obstructions to lying in Λ₊.
#[derive(Debug, Clone)]
pub struct IsotropyProbe {
    pub w: LogSeries,
    /// Largest coefficient in the (log z)^p sector, p = 1..=p_max.
    pub log_obstruction: Vec<f64>,
    /// ℓ¹ mass of negative λ-degrees in the log-free sector.
    pub negative_obstruction: f64,
}

impl IsotropyProbe {
    pub fn is_unobstructed(&self, tol: f64) -> bool {
        self.negative_obstruction <= tol && self.log_obstruction.iter().all(|x| *x <= tol)
    }
}

pub fn isotropy_probe(sol: &FrobeniusSolution, h: &LoopMatrix, p_max: usize) -> Result<IsotropyProbe> {
    if p_max < 2 {
        return Err(Error::OverflowOfLogPower { needed: 2, max: p_max });
    }
    if !h.is_twisted(1e-12) {
        return Err(Error::InvalidInput("isotropy_probe needs a twisted h".into()));
    }
    let l = sol.l_tilde(p_max)?;
    let mut lhat_inv = LogSeries::constant(p_max, sol.n_z, LoopMatrix::identity());
    lhat_inv.set_coeff(1, 0, sol.d().neg());
    let l_inv = sol.p_series(p_max).adjugate().mul(&lhat_inv)?;
    let w = l_inv.mul(&l.left_mul_loop(h))?;
    Ok(IsotropyProbe {
        log_obstruction: (1..=p_max).map(|p| w.sector_norm(p)).collect(),
        negative_obstruction: w.negative_mass(0),
        w,
    })
}

/// Singular-value certificate for the dimension of {h : hL = LW₊}.
#[derive(Debug, Clone)]
pub struct KernelCertificate {
    pub label: String,
    pub n_z: usize,
    pub n_lambda: usize,
    /// Highest z-order at which the equations are matched.
    pub n_eq: usize,
    pub rows: usize,
    pub cols: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub cutoff: f64,
    pub dimension: usize,
    /// id first, then the numerically null traceless directions.
    pub basis: Vec<LoopMatrix>,
    pub warning: Option<String>,
}

impl KernelCertificate {
    pub fn report(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("kernel certificate: {}\n", self.label));
        s.push_str(&format!("  N_z = {}, N_lambda = {}, matched through z-order {}\n", self.n_z, self.n_lambda, self.n_eq));
        s.push_str(&format!("  system: {} rows x {} traceless unknowns (+ id)\n", self.rows, self.cols));
        s.push_str(&format!("  rank cutoff: {:.3e}\n", self.cutoff));
        s.push_str("  singular values:");
        for v in &self.singular_values {
            s.push_str(&format!(" {v:.3e}"));
        }
        s.push('\n');
        s.push_str(&format!("  dimension: {}\n", self.dimension));
        for (i, b) in self.basis.iter().enumerate() {
            s.push_str(&format!("  basis[{i}]:"));
            for (n, m) in b.terms() {
                if m.norm() > 1e-12 {
                    s.push_str(&format!(" [deg {n}: {m}]"));
                }
            }
            s.push('\n');
        }
        if let Some(w) = &self.warning {
            s.push_str(&format!("  warning: {w}\n"));
        }
        s
    }
}

/// Traceless twisted positive basis of degree ≤ n_lambda.
fn traceless_basis(n_lambda: usize) -> Vec<LoopMatrix> {
    let mut out = Vec::new();
    for n in 0..=n_lambda as i32 {
        if n % 2 == 0 {
            out.push(LoopMatrix::monomial(n, Mat2::pauli(3)));
        } else {
            out.push(LoopMatrix::monomial(n, Mat2::e12()));
            out.push(LoopMatrix::monomial(n, Mat2::e21()));
        }
    }
    out
}

/// Inverse of a power series with constant term id.
fn series_inverse(l: &[LoopMatrix]) -> Vec<LoopMatrix> {
    let mut x: Vec<LoopMatrix> = vec![LoopMatrix::identity()];
    for j in 1..l.len() {
        let mut acc = LoopMatrix::zero();
        for i in 1..=j {
            acc = acc.add(&x[j - i].mul(&l[i]));
        }
        x.push(acc.neg());
    }
    x
}

type RowKey = (usize, usize, i32, usize);

/// Kernel of h ↦ (hL − LW₊) over h = span{id} ⊕ traceless twisted loops of degree ≤ n_lambda.
///
/// The log-free sector fixes W₊ = L₀⁻¹hL₀ order by order (L₀ has constant term id), so W₊
/// is eliminated and the remaining equations are: no negative λ-degrees in W₊ through
/// order n_eq, and hL_p = L_pW₊ for every log sector p ≥ 1. The identity solves the system
/// exactly and is counted separately.
pub fn kernel_certificate(
    label: &str,
    l: &LogSeries,
    n_z: usize,
    n_lambda: usize,
    exec: Exec,
) -> Result<KernelCertificate> {
    let l0 = l.sector(0);
    if l0.is_empty() || l0[0].max_coeff_distance(&LoopMatrix::identity()) > 1e-14 {
        return Err(Error::InvalidInput("kernel_certificate needs L = id + O(z)".into()));
    }
    let n_eq = l.n_z() - 1;
    let x = series_inverse(l0);
    let p_top = l.log_degree().unwrap_or(0);
    let basis = traceless_basis(n_lambda);

    // magnitude of the terms entering order j, used to recognise rows that vanish identically
    let mag: Vec<f64> = (0..=n_eq)
        .map(|j| (0..=j).map(|i| x[j - i].l1_norm() * l0[i].l1_norm()).sum::<f64>().max(1e-300))
        .collect();

    let columns: Vec<Vec<(RowKey, Complex64)>> = exec.map(basis.len(), |u| {
        let h = &basis[u];
        let mut out = Vec::new();
        let hl0: Vec<LoopMatrix> = l0.iter().map(|c| h.mul(c)).collect();
        let mut w = Vec::with_capacity(n_eq + 1);
        for j in 0..=n_eq {
            let mut acc = LoopMatrix::zero();
            for i in 0..=j {
                acc = acc.add(&x[j - i].mul(&hl0[i]));
            }
            for (n, m) in acc.terms().filter(|(n, _)| *n < 0) {
                for (e, v) in m.entries().into_iter().enumerate() {
                    out.push(((0, j, n, e), v));
                }
            }
            w.push(acc);
        }
        for p in 1..=p_top {
            let lp = l.sector(p);
            for j in 0..=n_eq {
                let mut acc = h.mul(&lp[j]);
                for i in 0..=j {
                    acc = acc.sub(&lp[i].mul(&w[j - i]));
                }
                for (n, m) in acc.terms() {
                    for (e, v) in m.entries().into_iter().enumerate() {
                        out.push(((p, j, n, e), v));
                    }
                }
            }
        }
        out
    });

    let mut rows: BTreeMap<RowKey, Vec<(usize, Complex64)>> = BTreeMap::new();
    for (u, col) in columns.iter().enumerate() {
        for (k, v) in col {
            rows.entry(*k).or_default().push((u, *v));
        }
    }
    let mut block_max: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for ((p, j, _, _), entries) in &rows {
        let m = entries.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
        let b = block_max.entry((*p, *j)).or_insert(0.0);
        *b = b.max(m);
    }
    let mut kept: Vec<Vec<(usize, Complex64)>> = Vec::new();
    for ((p, j, _, _), entries) in &rows {
        let bm = block_max[&(*p, *j)];
        let scale = if *p == 0 { mag[*j] } else { mag[*j].max(l.sector(*p)[*j].l1_norm()) };
        if bm < 1e-12 * scale {
            continue;
        }
        let m = entries.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
        if m < 1e-12 * bm {
            continue;
        }
        kept.push(entries.iter().map(|(u, v)| (*u, v / bm)).collect());
    }

    let cols = basis.len();
    let nrows = kept.len().max(cols);
    let mut a = DMatrix::<Complex64>::zeros(nrows, cols);
    for (r, entries) in kept.iter().enumerate() {
        for (u, v) in entries {
            a[(r, *u)] += *v;
        }
    }
    let col_norms: Vec<f64> = (0..cols).map(|u| a.column(u).norm().max(1e-300)).collect();
    for (u, &s) in col_norms.iter().enumerate() {
        a.column_mut(u).iter_mut().for_each(|v| *v /= s);
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.as_ref().ok_or_else(|| Error::Singular { context: "svd".into() })?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|i, j| svd.singular_values[*j].total_cmp(&svd.singular_values[*i]));
    let sv: Vec<f64> = order.iter().map(|i| svd.singular_values[*i]).collect();
    let smax = sv.first().copied().unwrap_or(0.0);
    let cutoff = 1e-8 * smax;
    let null: Vec<usize> = order.iter().copied().filter(|i| svd.singular_values[*i] < cutoff).collect();
    let ambiguous: Vec<f64> = sv.iter().copied().filter(|s| *s > cutoff * 1e-3 && *s < cutoff * 1e3).collect();
    let warning = (!ambiguous.is_empty())
        .then(|| format!("rank deficiency: {} singular value(s) within 1e3 of the cutoff", ambiguous.len()));

    let mut kernel = vec![LoopMatrix::identity()];
    for i in &null {
        let mut h = LoopMatrix::zero();
        for u in 0..cols {
            let coef = v_t[(*i, u)].conj() / col_norms[u];
            h = h.add(&basis[u].scale(coef));
        }
        kernel.push(h);
    }
    Ok(KernelCertificate {
        label: label.to_string(),
        n_z,
        n_lambda,
        n_eq,
        rows: kept.len(),
        cols,
        singular_values: sv,
        cutoff,
        dimension: kernel.len(),
        basis: kernel,
        warning,
    })
}

/// Dimension of the isotropy of L̃ for ξ₋₁ at truncation (N_z, N_λ).
/// Equations are matched through z-order N_z + N_λ.
pub fn isotropy_kernel(c: Complex64, n_z: usize, n_lambda: usize, exec: Exec) -> Result<KernelCertificate> {
    if n_z < 3 || n_lambda < 3 {
        return Err(Error::InvalidInput(format!("isotropy_kernel needs N_z, N_lambda >= 3, got {n_z}, {n_lambda}")));
    }
    if c.norm() == 0.0 {
        return Err(Error::ZeroC);
    }
    let n_eq = n_z + n_lambda;
    let p = p_coefficients(c, n_eq + 1);
    let d = super::d_matrix(c);
    let dp: Vec<LoopMatrix> = p.iter().map(|x| d.mul(x)).collect();
    let mut l = LogSeries::from_sector(1, n_eq + 1, 0, &p)?;
    for (j, v) in dp.into_iter().enumerate() {
        l.set_coeff(1, j, v);
    }
    kernel_certificate(&format!("xi_-1, c = {c}"), &l, n_z, n_lambda, exec)
}

/// exp(λ⁻¹zA), A = offdiag(1, 1), through z-order n − 1.
pub fn vacuum_series(n: usize) -> LogSeries {
    let mut coeffs = Vec::with_capacity(n);
    let mut fact = 1.0;
    for j in 0..n {
        if j > 0 {
            fact *= j as f64;
        }
        let m = if j % 2 == 0 { Mat2::identity() } else { Mat2::pauli(1) };
        coeffs.push(LoopMatrix::monomial(-(j as i32), m.scale_re(1.0 / fact)));
    }
    LogSeries::from_sector(0, n, 0, &coeffs).expect("sector 0")
}

/// Something that can supply W, W′, W″, W‴ at a point.
pub trait WplusField {
    fn jet(&self, z: &ZPoint, lambda: Complex64) -> [Mat2; 4];
}

impl WplusField for Mat2 {
    fn jet(&self, _z: &ZPoint, _lambda: Complex64) -> [Mat2; 4] {
        [*self, Mat2::zero(), Mat2::zero(), Mat2::zero()]
    }
}

impl WplusField for LogSeries {
    fn jet(&self, z: &ZPoint, lambda: Complex64) -> [Mat2; 4] {
        let t1 = self.theta();
        let t2 = t1.theta();
        let t3 = t2.theta();
        let [f, a, b, c] = [self, &t1, &t2, &t3].map(|s| s.eval(z, lambda));
        let zi = z.z.inv();
        [f, a.scale(zi), (b - a).scale(zi * zi), (c - b.scale_re(3.0) + a.scale_re(2.0)).scale(zi * zi * zi)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WplusResiduals {
    pub eq1: f64,
    pub eq2: f64,
    pub eq3: f64,
}

/// For W = [[a, b], [c, d]] with dW = [W, ξ₋₁] (coefficient κ):
/// λa′ = −λd′ = κb/z − c, λb′ = −λzc′/κ = a − d, and (λ²/2)b‴ + κb/z² − (2κ/z)b′ = 0.
pub fn wplus_ode_residuals(w: &dyn WplusField, kappa: Complex64, samples: &[(ZPoint, Complex64)]) -> WplusResiduals {
    let mut r = WplusResiduals { eq1: 0.0, eq2: 0.0, eq3: 0.0 };
    for (z, l) in samples {
        let [w0, w1, _w2, w3] = w.jet(z, *l);
        let zz = z.z;
        let (a, b, c, d) = (w0.a11, w0.a12, w0.a21, w0.a22);
        let rhs1 = kappa * b / zz - c;
        let e1 = (*l * w1.a11 - rhs1).norm().max((*l * w1.a22 + rhs1).norm());
        let e2 = (*l * w1.a12 - (a - d)).norm().max((-*l * zz * w1.a21 / kappa - (a - d)).norm());
        let e3 = (*l * *l * 0.5 * w3.a12 + kappa * b / (zz * zz) - 2.0 * kappa * w1.a12 / zz).norm();
        r.eq1 = r.eq1.max(e1);
        r.eq2 = r.eq2.max(e2);
        r.eq3 = r.eq3.max(e3);
    }
    r
}

/// Relative least-squares residual of fitting √z by f₁ + f₂·log z + f₃·(log z)², f_j Laurent
/// polynomials of degree ≤ n_laurent, on `sheets` consecutive sheets of an annulus.
///
/// With two or three sheets the fit is exact in the limit (three free functions); from four
/// sheets on the residual is bounded below by 4/√20 independently of n_laurent.
pub fn sqrt_log_fit_residual(
    r_min: f64,
    r_max: f64,
    n_r: usize,
    n_theta: usize,
    n_laurent: i32,
    sheets: usize,
) -> Result<f64> {
    if !(0.0 < r_min && r_min < r_max) || n_r < 2 || n_theta < 4 || sheets == 0 {
        return Err(Error::InvalidInput("bad annulus sampling".into()));
    }
    let mut pts = Vec::new();
    for sheet in 0..sheets {
        for i in 0..n_r {
            let r = r_min + (r_max - r_min) * i as f64 / (n_r - 1) as f64;
            for k in 0..n_theta {
                let th = std::f64::consts::TAU * (k as f64 / n_theta as f64 + sheet as f64);
                pts.push(ZPoint { z: Complex64::from_polar(r, th), log_z: Complex64::new(r.ln(), th) });
            }
        }
    }
    let ncols = 3 * (2 * n_laurent + 1) as usize;
    let mut a = DMatrix::<Complex64>::zeros(pts.len(), ncols);
    let mut b = nalgebra::DVector::<Complex64>::zeros(pts.len());
    for (r, p) in pts.iter().enumerate() {
        b[r] = p.sqrt();
        let mut col = 0;
        for pw in 0..3 {
            for n in -n_laurent..=n_laurent {
                a[(r, col)] = p.z.powi(n) * p.log_z.powu(pw);
                col += 1;
            }
        }
    }
    for u in 0..ncols {
        let s = a.column(u).norm();
        a.column_mut(u).iter_mut().for_each(|v| *v /= s);
    }
    let svd = a.clone().svd(true, true);
    let x = svd.solve(&b, 1e-13).map_err(|e| Error::Singular { context: e.to_string() })?;
    Ok((&a * x - &b).norm() / b.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::build_frobenius;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn samples() -> Vec<(ZPoint, Complex64)> {
        (0..12)
            .map(|k| {
                let z = ZPoint::principal(Complex64::from_polar(0.15 + 0.01 * k as f64, 0.5 * k as f64 - 2.5));
                (z, Complex64::from_polar(1.0, 0.53 * k as f64))
            })
            .collect()
    }

    #[test]
    fn probe_of_center_is_trivial() {
        let sol = build_frobenius(cx(1.0, 0.0), 8, 64).unwrap();
        for s in [1.0, -1.0] {
            let h = LoopMatrix::identity().scale(cx(s, 0.0));
            let p = isotropy_probe(&sol, &h, 2).unwrap();
            assert!(p.is_unobstructed(1e-12));
            let expect = LogSeries::constant(2, 8, h.clone());
            assert!(p.w.sub(&expect).max_norm_through(7) < 1e-12);
        }
    }

    #[test]
    fn probe_detects_log_obstruction() {
        let sol = build_frobenius(cx(1.0, 0.0), 8, 64).unwrap();
        let eps = 1e-2;
        let h = LoopMatrix::identity().add(&LoopMatrix::monomial(1, Mat2::e12().scale_re(eps)));
        let p = isotropy_probe(&sol, &h, 2).unwrap();
        assert!(p.log_obstruction[0] > 0.1 * eps && p.log_obstruction[0] < 10.0 * eps);
        assert!(matches!(isotropy_probe(&sol, &h, 1), Err(Error::OverflowOfLogPower { .. })));
    }

    #[test]
    fn kernel_examples() {
        for c in [cx(1.0, 0.0), cx(2.0, -1.0)] {
            let k = isotropy_kernel(c, 6, 8, Exec::Sequential).unwrap();
            assert_eq!(k.dimension, 1, "{}", k.report());
        }
    }

    #[test]
    fn vacuum_control_has_extra_isotropy() {
        let n_lambda = 8;
        let k = kernel_certificate("vacuum", &vacuum_series(6 + n_lambda + 1), 6, n_lambda, Exec::Sequential).unwrap();
        // λⁿ·offdiag(1, 1) for odd n commute with the vacuum
        assert_eq!(k.dimension, 1 + 4, "{}", k.report());
    }

    #[test]
    fn wplus_residuals() {
        let s = samples();
        let r = wplus_ode_residuals(&Mat2::identity(), cx(1.0, 0.0), &s);
        assert_eq!((r.eq1, r.eq2, r.eq3), (0.0, 0.0, 0.0));

        let sol = build_frobenius(cx(1.0, 0.0), 16, 64).unwrap();
        let p = isotropy_probe(&sol, &LoopMatrix::identity().neg(), 2).unwrap();
        let r = wplus_ode_residuals(&p.w, cx(1.0, 0.0), &s);
        assert!(r.eq1 < 1e-12 && r.eq2 < 1e-12 && r.eq3 < 1e-12, "{r:?}");

        for c in [cx(1.0, 0.0), cx(2.0, -1.0)] {
            let sol = build_frobenius(c, 18, 128).unwrap();
            let h = LoopMatrix::from_terms(&[
                (0, Mat2::diag(cx(1.2, 0.1), cx(0.8, -0.3))),
                (1, Mat2::offdiag(cx(0.4, 0.0), cx(-0.2, 0.5))),
                (2, Mat2::diag(cx(0.1, 0.0), cx(0.3, 0.2))),
            ]);
            let p = isotropy_probe(&sol, &h, 2).unwrap();
            let r = wplus_ode_residuals(&p.w, c, &s);
            assert!(r.eq1 < 1e-9 && r.eq2 < 1e-9 && r.eq3 < 1e-9, "{r:?}");
        }
    }

    #[test]
    fn sqrt_is_not_a_log_polynomial() {
        let floor = 4.0 / 20f64.sqrt();
        for k in [2, 6, 10] {
            let r = sqrt_log_fit_residual(0.5, 2.0, 6, 48, k, 4).unwrap();
            assert!(r > 0.1 && r > floor - 1e-9, "K = {k}: {r}");
        }
        // two sheets leave enough freedom for an (approximate) fit
        assert!(sqrt_log_fit_residual(0.5, 2.0, 6, 48, 8, 2).unwrap() < 1e-6);
    }
}
