//! Integration of dL = L·ξ along paths in C∖{0}, monodromy and closing conditions.

mod ode;
mod path;

pub use ode::{integrate, integrate_segments, Integration, OdeConfig};
pub use path::{BranchTracker, ZPath, Segment, DEFAULT_CLEARANCE};

use std::io::Write;

use num_complex::Complex64;

use crate::error::Result;
use crate::loops::{CircleGrid, LoopSamples, Mat2};
use crate::par::Exec;
use crate::potentials::{Potential, ZPoint};

/// Monodromy sampled on a λ-grid together with the closing diagnostics.
#[derive(Debug, Clone)]
pub struct MonodromyReport {
    pub angles: Vec<f64>,
    pub lambdas: Vec<Complex64>,
    pub m: LoopSamples,
    pub rho_plus: Vec<f64>,
    pub rho_minus: Vec<f64>,
    pub trace: Vec<Complex64>,
    /// ∂_t M on the grid (spectral).
    pub dm_dt: LoopSamples,
    pub delta: Vec<f64>,
    /// max_m |det M(λ_m) − 1|.
    pub det_defect: f64,
}

impl MonodromyReport {
    pub fn from_samples(grid: &CircleGrid, m: LoopSamples) -> Self {
        let id = Mat2::identity();
        let dm_dt = grid.d_dt(&m);
        Self {
            angles: (0..grid.len()).map(|i| grid.angle(i)).collect(),
            lambdas: grid.points(),
            rho_plus: m.values.iter().map(|x| (*x - id).norm()).collect(),
            rho_minus: m.values.iter().map(|x| (*x + id).norm()).collect(),
            trace: m.values.iter().map(Mat2::trace).collect(),
            delta: dm_dt.values.iter().map(Mat2::norm).collect(),
            det_defect: m.values.iter().map(|x| (x.det() - 1.0).norm()).fold(0.0, f64::max),
            m,
            dm_dt,
        }
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// min over the grid of min(ρ₊, ρ₋).
    pub fn min_distance_to_center(&self) -> f64 {
        self.rho_plus.iter().zip(&self.rho_minus).map(|(a, b)| a.min(*b)).fold(f64::INFINITY, f64::min)
    }

    pub fn max_trace_defect(&self) -> f64 {
        self.trace.iter().map(|t| (t - 2.0).norm()).fold(0.0, f64::max)
    }

    /// CSV: t, the eight real entries of M, ρ₊, ρ₋, Re/Im trace, δ.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "t,re11,im11,re12,im12,re21,im21,re22,im22,rho_plus,rho_minus,re_trace,im_trace,delta")?;
        for i in 0..self.len() {
            let e = self.m.values[i].entries();
            write!(w, "{:.17e}", self.angles[i])?;
            for x in e {
                write!(w, ",{:.17e},{:.17e}", x.re, x.im)?;
            }
            writeln!(
                w,
                ",{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                self.rho_plus[i], self.rho_minus[i], self.trace[i].re, self.trace[i].im, self.delta[i]
            )?;
        }
        Ok(())
    }
}

/// Monodromy of the solution with L(base) = init(λ) along a closed path.
pub fn monodromy_along(
    xi: &Potential,
    path: &ZPath,
    grid: &CircleGrid,
    init: &(dyn Fn(Complex64) -> Mat2 + Sync),
    cfg: &OdeConfig,
    exec: Exec,
) -> Result<MonodromyReport> {
    let values = exec.try_map(grid.len(), |i| {
        let l = grid.lambda(i);
        let l0 = init(l);
        let end = integrate(xi, path, l0, l, cfg)?;
        let inv = l0.inverse().ok_or_else(|| crate::Error::Singular { context: "initial value".into() })?;
        Ok::<_, crate::Error>(end.value * inv)
    })?;
    Ok(MonodromyReport::from_samples(grid, LoopSamples { values }))
}

/// Monodromy around the counterclockwise circle |z| = |z₀| based at z₀.
pub fn monodromy(
    xi: &Potential,
    z0: ZPoint,
    grid: &CircleGrid,
    init: &(dyn Fn(Complex64) -> Mat2 + Sync),
    cfg: &OdeConfig,
    exec: Exec,
) -> Result<MonodromyReport> {
    monodromy_along(xi, &ZPath::circle(z0, 1.0)?, grid, init, cfg, exec)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosingResidual {
    pub rho_plus: f64,
    pub rho_minus: f64,
    pub delta: f64,
    pub closes: bool,
}

/// Closing test at grid point `idx`: M(λ₀) = ±id and ∂_t M(λ₀) = 0 within `tol`.
pub fn closing_residual(report: &MonodromyReport, idx: usize, tol: f64) -> ClosingResidual {
    let (rho_plus, rho_minus, delta) = (report.rho_plus[idx], report.rho_minus[idx], report.delta[idx]);
    ClosingResidual { rho_plus, rho_minus, delta, closes: rho_plus.min(rho_minus) < tol && delta < tol }
}
