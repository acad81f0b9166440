//! The k ↔ −k−4 reflection and the five-gauge reduction of ξ₋₂ to a cylinder potential.

use num_complex::Complex64;

use super::{apply_gauge, invert_z, make_xi, max_residual, GaugeLoop, Potential, ZPoint};
use crate::error::{Error, Result};
use crate::loops::Mat2;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// p₊ = [[i/z, 0], [−iλ, −iz]]. After invert_z it carries ξ_k to ξ_{−k−4}.
pub fn reflection_gauge() -> GaugeLoop {
    GaugeLoop::new(
        "reflection",
        |z, l| Mat2::new(I / z.z, Complex64::new(0.0, 0.0), -I * l, -I * z.z),
        |z, _| Mat2::diag(-I / (z.z * z.z), -I),
    )
}

#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub k: i32,
    pub partner: i32,
    pub c: Complex64,
    pub max_residual: f64,
    pub samples: usize,
}

/// Compare apply_gauge(invert_z(ξ_k), p₊) with ξ_{−k−4} at the given samples.
pub fn k_equivalence_certificate(
    k: i32,
    c: Complex64,
    samples: &[(ZPoint, Complex64)],
) -> Result<EquivalenceReport> {
    let xi = make_xi(k, c)?;
    let partner = -k - 4;
    let lhs = apply_gauge(&invert_z(&xi), &reflection_gauge())?;
    let rhs = make_xi(partner, c)?;
    Ok(EquivalenceReport { k, partner, c, max_residual: max_residual(&lhs, &rhs, samples), samples: samples.len() })
}

/// Ω(λ) = 1 + λ²/(4c).
pub fn omega(c: f64, lambda: Complex64) -> Complex64 {
    ONE + lambda * lambda / (4.0 * c)
}

/// Result of [`reduction_chain`]: the five gauges and the potential after each of them.
#[derive(Debug, Clone)]
pub struct ReductionChain {
    pub c: f64,
    pub gauges: Vec<GaugeLoop>,
    pub stages: Vec<Potential>,
}

impl ReductionChain {
    pub fn final_potential(&self) -> &Potential {
        self.stages.last().expect("five stages")
    }

    /// Closed forms of the five stages, used as oracles.
    pub fn expected_stages(&self) -> Vec<Potential> {
        let c = self.c;
        let sc = c.sqrt();
        vec![
            Potential::new("stage 1", false, move |z, l| {
                let zi = z.z.inv();
                Mat2::new(-0.5 * zi, l.inv(), (l.inv() * c + l * 0.25) * zi * zi, 0.5 * zi)
            }),
            Potential::new("stage 2", false, move |z, l| {
                Mat2::offdiag(l.inv(), l.inv() * c + l * 0.25).scale(z.z.inv())
            }),
            reduction_intermediate(c),
            Potential::new("stage 4", false, move |z, l| {
                Mat2::pauli(1).scale(omega(c, l).sqrt() * sc / (l * z.z))
            }),
            cylinder_potential(c),
        ]
    }
}

/// √c·[[0, λ⁻¹], [λ⁻¹ + λ/(4c), 0]]·dz/z.
pub fn reduction_intermediate(c: f64) -> Potential {
    let sc = c.sqrt();
    Potential::new("reduction intermediate", false, move |z, l| {
        Mat2::offdiag(l.inv(), l.inv() + l / (4.0 * c)).scale(sc / z.z)
    })
}

/// √c·λ⁻¹·offdiag(1, 1)·dz/z.
pub fn cylinder_potential(c: f64) -> Potential {
    let sc = c.sqrt();
    Potential::new(format!("cylinder(c={c})"), false, move |z, l| Mat2::pauli(1).scale(sc / (l * z.z)))
}

/// Reduce ξ₋₂ (c > 0) to √c·λ⁻¹·offdiag(1, 1)·dz/z by five successive positive gauges.
/// `lambdas` is the working λ set; Ω must stay away from zero on it.
pub fn reduction_chain(c: f64, lambdas: &[Complex64]) -> Result<ReductionChain> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidInput(format!("reduction_chain needs c > 0, got {c}")));
    }
    for l in lambdas {
        let m = omega(c, *l).norm();
        if m < 1e-8 {
            return Err(Error::BranchPointHit { lambda: format!("{l}"), modulus: m });
        }
    }
    let sc = c.sqrt();
    let mu = c.powf(-0.25);

    let p1 = GaugeLoop::new(
        "p1",
        |z, l| Mat2::new(ONE, Complex64::new(0.0, 0.0), -l / (2.0 * z.z), ONE),
        |z, l| Mat2::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), l / (2.0 * z.z * z.z), Complex64::new(0.0, 0.0)),
    );
    let p2 = GaugeLoop::new(
        "p2",
        |z, _| {
            let s = z.sqrt();
            Mat2::diag(s, s.inv())
        },
        |z, _| {
            let s = z.sqrt();
            Mat2::diag(0.5 / s, -0.5 / (s * z.z))
        },
    );
    let p3 = GaugeLoop::constant("p3", Mat2::diag(mu.into(), (1.0 / mu).into()));
    let p4 = GaugeLoop::new(
        "p4",
        move |_, l| {
            let s = omega(c, l).powf(0.25);
            let b = l / (2.0 * sc);
            Mat2::new(s, -b / s, -b * s, s * s * s)
        },
        move |_, _| Mat2::zero(),
    );
    let phi = move |l: Complex64| sc * (ONE - omega(c, l).sqrt()) / l;
    let p5 = GaugeLoop::new(
        "p5",
        move |z, l| {
            let t = phi(l) * z.log_z;
            Mat2::new(t.cosh(), t.sinh(), t.sinh(), t.cosh())
        },
        move |z, l| {
            let f = phi(l);
            let t = f * z.log_z;
            Mat2::new(t.sinh(), t.cosh(), t.cosh(), t.sinh()).scale(f / z.z)
        },
    );

    let gauges = vec![p1, p2, p3, p4, p5];
    let mut stages = Vec::with_capacity(5);
    let mut current = make_xi(-2, c.into())?;
    for g in &gauges {
        current = apply_gauge(&current, g)?;
        stages.push(current.clone());
    }
    Ok(ReductionChain { c, gauges, stages })
}
