use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::potentials::ZPoint;

use std::f64::consts::TAU;

/// Default minimum distance between a path and the origin.
pub const DEFAULT_CLEARANCE: f64 = 1e-3;

/// A path piece, parametrized by s ∈ [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Line { from: Complex64, to: Complex64 },
    /// Arc of the circle |z| = radius centred at the origin; angles in radians.
    Arc { radius: f64, theta_from: f64, theta_to: f64 },
}

impl Segment {
    pub fn start(&self) -> Complex64 {
        match *self {
            Segment::Line { from, .. } => from,
            Segment::Arc { radius, theta_from, .. } => Complex64::from_polar(radius, theta_from),
        }
    }

    pub fn end(&self) -> Complex64 {
        match *self {
            Segment::Line { to, .. } => to,
            Segment::Arc { radius, theta_to, .. } => Complex64::from_polar(radius, theta_to),
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => (to - from).norm(),
            Segment::Arc { radius, theta_from, theta_to } => radius * (theta_to - theta_from).abs(),
        }
    }

    /// Point at parameter s, continuing log z from `log_start` (the log at s = 0).
    pub fn point(&self, s: f64, log_start: Complex64) -> ZPoint {
        match *self {
            Segment::Line { from, to } => {
                let z = from + (to - from) * s;
                if from == Complex64::new(0.0, 0.0) {
                    let log_z = Complex64::new((s * to.norm()).ln(), to.arg());
                    ZPoint { z, log_z }
                } else {
                    ZPoint { z, log_z: log_start + (z / from).ln() }
                }
            }
            Segment::Arc { radius, theta_from, theta_to } => {
                let th = theta_from + (theta_to - theta_from) * s;
                ZPoint {
                    z: Complex64::from_polar(radius, th),
                    log_z: log_start + Complex64::new(0.0, th - theta_from),
                }
            }
        }
    }

    /// dz/ds at parameter s.
    pub fn velocity(&self, s: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => to - from,
            Segment::Arc { radius, theta_from, theta_to } => {
                let th = theta_from + (theta_to - theta_from) * s;
                Complex64::new(0.0, theta_to - theta_from) * Complex64::from_polar(radius, th)
            }
        }
    }

    /// Smallest |z| along the segment.
    pub fn min_modulus(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => {
                let d = to - from;
                let l2 = d.norm_sqr();
                if l2 == 0.0 {
                    return from.norm();
                }
                let t = (-(from.conj() * d).re / l2).clamp(0.0, 1.0);
                (from + d * t).norm()
            }
            Segment::Arc { radius, .. } => radius,
        }
    }
}

/// Continuous determination of log z along a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchTracker {
    log: Complex64,
    increment: f64,
}

impl BranchTracker {
    pub fn new(start: &ZPoint) -> Self {
        Self { log: start.log_z, increment: 0.0 }
    }

    pub fn log(&self) -> Complex64 {
        self.log
    }

    /// Total change of arg z so far.
    pub fn increment(&self) -> f64 {
        self.increment
    }

    pub fn point(&self, seg: &Segment, s: f64) -> ZPoint {
        seg.point(s, self.log)
    }

    pub fn advance(&mut self, seg: &Segment) {
        let end = seg.point(1.0, self.log).log_z;
        if self.log.re.is_finite() {
            self.increment += end.im - self.log.im;
        }
        self.log = end;
    }
}

/// A contiguous path in C starting at a point of the universal cover.
#[derive(Debug, Clone, PartialEq)]
pub struct ZPath {
    pub base: ZPoint,
    pub segments: Vec<Segment>,
    pub clearance: f64,
}

impl ZPath {
    pub fn new(base: ZPoint, segments: Vec<Segment>) -> Result<Self> {
        let p = Self { base, segments, clearance: DEFAULT_CLEARANCE };
        p.check_contiguous()?;
        Ok(p)
    }

    /// `turns` counterclockwise circles through `base` (negative turns go clockwise).
    pub fn circle(base: ZPoint, turns: f64) -> Result<Self> {
        let r = base.z.norm();
        if r == 0.0 {
            return Err(Error::InvalidPath("circle through the origin".into()));
        }
        let th = base.log_z.im;
        Self::new(base, vec![Segment::Arc { radius: r, theta_from: th, theta_to: th + TAU * turns }])
    }

    /// A straight segment.
    pub fn line(from: ZPoint, to: Complex64) -> Result<Self> {
        Self::new(from, vec![Segment::Line { from: from.z, to }])
    }

    pub fn then(mut self, seg: Segment) -> Result<Self> {
        self.segments.push(seg);
        self.check_contiguous()?;
        Ok(self)
    }

    fn check_contiguous(&self) -> Result<()> {
        let mut at = self.base.z;
        for (i, s) in self.segments.iter().enumerate() {
            let gap = (s.start() - at).norm();
            if gap > 1e-12 * (1.0 + at.norm()) {
                return Err(Error::InvalidPath(format!("segment {i} starts {gap:.3e} away from the previous end")));
            }
            at = s.end();
        }
        Ok(())
    }

    /// Enforce the clearance from the origin (skipped for potentials regular there).
    pub fn check_clearance(&self) -> Result<()> {
        for (i, s) in self.segments.iter().enumerate() {
            let m = s.min_modulus();
            if m < self.clearance {
                return Err(Error::InvalidPath(format!(
                    "segment {i} passes within {m:.3e} of the origin (clearance {})",
                    self.clearance
                )));
            }
        }
        Ok(())
    }

    pub fn end(&self) -> ZPoint {
        let mut t = BranchTracker::new(&self.base);
        for s in &self.segments {
            t.advance(s);
        }
        let z = self.segments.last().map_or(self.base.z, |s| s.end());
        ZPoint { z, log_z: t.log() }
    }

    /// Net number of turns around the origin.
    pub fn winding_number(&self) -> f64 {
        let mut t = BranchTracker::new(&self.base);
        for s in &self.segments {
            t.advance(s);
        }
        t.increment() / TAU
    }
}
