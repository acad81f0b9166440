//! Dormand–Prince 5(4) for the linear system dL/ds = L·G(s).

use num_complex::Complex64;

use super::path::{BranchTracker, ZPath, Segment};
use crate::error::{Error, Result};
use crate::loops::Mat2;
use crate::potentials::{Potential, ZPoint};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeConfig {
    /// Local error tolerance (mixed absolute/relative).
    pub tol: f64,
    /// Smallest admissible step, in arc length.
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for OdeConfig {
    fn default() -> Self {
        Self { tol: 1e-10, min_step: 1e-14, max_steps: 2_000_000 }
    }
}

/// Endpoint of an integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integration {
    pub value: Mat2,
    pub end: ZPoint,
    pub steps: usize,
    /// |det L(end) − det L₀|.
    pub det_drift: f64,
}

const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

fn combo(y: &Mat2, k: &[Mat2], a: &[f64], h: f64) -> Mat2 {
    let mut out = *y;
    for (ki, ai) in k.iter().zip(a) {
        out += ki.scale_re(h * ai);
    }
    out
}

fn step_segment(
    xi: &Potential,
    seg: &Segment,
    tracker: &BranchTracker,
    lambda: Complex64,
    y0: Mat2,
    cfg: &OdeConfig,
    steps: &mut usize,
) -> Result<Mat2> {
    let len = seg.length();
    if len == 0.0 {
        return Ok(y0);
    }
    let g = |s: f64| xi.eval(&tracker.point(seg, s), lambda) * seg.velocity(s);
    let mut s = 0.0;
    let mut y = y0;
    let mut h = (0.05f64).min(0.1 / len.max(1e-300)).min(1.0);
    let mut g0 = g(0.0);
    while s < 1.0 {
        if *steps >= cfg.max_steps || h * len < cfg.min_step {
            return Err(Error::StepUnderflow { z: format!("{}", tracker.point(seg, s).z), step: h * len });
        }
        let hh = h.min(1.0 - s);
        let k1 = y * g0;
        let k2 = combo(&y, &[k1], &A2, hh) * g(s + C[0] * hh);
        let k3 = combo(&y, &[k1, k2], &A3, hh) * g(s + C[1] * hh);
        let k4 = combo(&y, &[k1, k2, k3], &A4, hh) * g(s + C[2] * hh);
        let k5 = combo(&y, &[k1, k2, k3, k4], &A5, hh) * g(s + C[3] * hh);
        let g_end = g(s + hh);
        let k6 = combo(&y, &[k1, k2, k3, k4, k5], &A6, hh) * g_end;
        let y_new = combo(&y, &[k1, k2, k3, k4, k5, k6], &B, hh);
        let k7 = y_new * g_end;
        let err_m = combo(&Mat2::zero(), &[k1, k2, k3, k4, k5, k6, k7], &E, hh);
        let scale = cfg.tol * (1.0 + y.max_abs());
        let err = err_m.max_abs() / scale;
        *steps += 1;
        if !err.is_finite() || !y_new.is_finite() {
            h *= 0.1;
            continue;
        }
        if err <= 1.0 {
            s += hh;
            y = y_new;
            g0 = g_end;
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = hh * fac;
    }
    Ok(y)
}

/// Values of the solution of dL = L·ξ, L(base) = L₀, at the end of every segment.
pub fn integrate_segments(
    xi: &Potential,
    path: &ZPath,
    l0: Mat2,
    lambda: Complex64,
    cfg: &OdeConfig,
) -> Result<Vec<Mat2>> {
    if !xi.is_regular_at_origin() {
        path.check_clearance()?;
    }
    let mut tracker = BranchTracker::new(&path.base);
    let mut y = l0;
    let mut steps = 0;
    let mut out = Vec::with_capacity(path.segments.len());
    for seg in &path.segments {
        y = step_segment(xi, seg, &tracker, lambda, y, cfg, &mut steps)?;
        tracker.advance(seg);
        out.push(y);
    }
    Ok(out)
}

/// Integrate dL = L·ξ along `path` at a fixed λ.
pub fn integrate(
    xi: &Potential,
    path: &ZPath,
    l0: Mat2,
    lambda: Complex64,
    cfg: &OdeConfig,
) -> Result<Integration> {
    if !xi.is_regular_at_origin() {
        path.check_clearance()?;
    }
    let mut tracker = BranchTracker::new(&path.base);
    let mut y = l0;
    let mut steps = 0;
    for seg in &path.segments {
        y = step_segment(xi, seg, &tracker, lambda, y, cfg, &mut steps)?;
        tracker.advance(seg);
    }
    Ok(Integration { value: y, end: path.end(), steps, det_drift: (y.det() - l0.det()).norm() })
}
