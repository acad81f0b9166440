//! The DPW pipeline over a parameter domain: integrate dL = L·ξ, split L = F·B per λ-sample,
//! apply Sym–Bobenko at λ₀. Also seam defects, discrete curvature and mesh export.

mod export;
mod geometry;

pub use export::{export_defects_csv, export_mesh, read_points_csv, write_obj, write_points_csv};
pub use geometry::{fit_cylinder, verify_cmc, CmcReport, CylinderFit};

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::factorization::iwasawa_su2_samples;
use crate::frobenius::frobenius_value;
use crate::holonomy::{integrate_segments, OdeConfig, ZPath, Segment};
use crate::loops::{CircleGrid, LoopSamples, Mat2};
use crate::par::Exec;
use crate::potentials::{Potential, ZPoint};
use crate::sym::{frame_at, sym_bobenko_samples_at, translational_period, AmbientPoint, MeanCurvature};

/// Parameter domain, sampled on a tensor grid. Rows are indexed by r (or x), columns by θ (or y).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainGrid {
    Polar { r0: f64, r1: f64, theta0: f64, theta1: f64, n_r: usize, n_theta: usize },
    Rect { x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize },
}

impl DomainGrid {
    /// r ∈ [r₀, r₁], θ ∈ [0, Θ]; Θ may exceed 2π.
    pub fn annulus(r0: f64, r1: f64, theta_max: f64, n_r: usize, n_theta: usize) -> Result<Self> {
        Self::polar_patch(r0, r1, 0.0, theta_max, n_r, n_theta)
    }

    /// Rows at r = R·(i+1)/n_r, so the centre itself is not a grid point.
    pub fn disk(radius: f64, theta_max: f64, n_r: usize, n_theta: usize) -> Result<Self> {
        if n_r < 2 {
            return Err(Error::InvalidInput("grid needs at least 2 samples per direction".into()));
        }
        Self::polar_patch(radius / n_r as f64, radius, 0.0, theta_max, n_r, n_theta)
    }

    pub fn polar_patch(r0: f64, r1: f64, theta0: f64, theta1: f64, n_r: usize, n_theta: usize) -> Result<Self> {
        let g = DomainGrid::Polar { r0, r1, theta0, theta1, n_r, n_theta };
        g.validate()?;
        Ok(g)
    }

    pub fn rect(x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize) -> Result<Self> {
        let g = DomainGrid::Rect { x0, x1, y0, y1, nx, ny };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        let (rows, cols) = self.dims();
        if rows < 2 || cols < 2 {
            return Err(Error::InvalidInput("grid needs at least 2 samples per direction".into()));
        }
        let ok = match *self {
            DomainGrid::Polar { r0, r1, theta0, theta1, .. } => {
                r0 > 0.0 && r1 > r0 && theta1 > theta0 && (r1 + theta1 - theta0).is_finite()
            }
            DomainGrid::Rect { x0, x1, y0, y1, .. } => x1 > x0 && y1 > y0 && (x1 + y1 - x0 - y0).is_finite(),
        };
        if !ok {
            return Err(Error::InvalidInput(format!("degenerate domain {self:?}")));
        }
        Ok(())
    }

    pub fn dims(&self) -> (usize, usize) {
        match *self {
            DomainGrid::Polar { n_r, n_theta, .. } => (n_r, n_theta),
            DomainGrid::Rect { nx, ny, .. } => (nx, ny),
        }
    }

    /// Parameter values (r, θ) or (x, y) of grid point (i, j).
    pub fn param(&self, i: usize, j: usize) -> (f64, f64) {
        let (du, dv) = self.spacing();
        match *self {
            DomainGrid::Polar { r0, theta0, .. } => (r0 + du * i as f64, theta0 + dv * j as f64),
            DomainGrid::Rect { x0, y0, .. } => (x0 + du * i as f64, y0 + dv * j as f64),
        }
    }

    pub fn spacing(&self) -> (f64, f64) {
        let (rows, cols) = self.dims();
        let (a, b) = match *self {
            DomainGrid::Polar { r0, r1, theta0, theta1, .. } => (r1 - r0, theta1 - theta0),
            DomainGrid::Rect { x0, x1, y0, y1, .. } => (x1 - x0, y1 - y0),
        };
        (a / (rows - 1) as f64, b / (cols - 1) as f64)
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        let (u, v) = self.param(i, j);
        match self {
            DomainGrid::Polar { .. } => Complex64::from_polar(u, v),
            DomainGrid::Rect { .. } => Complex64::new(u, v),
        }
    }

    /// Segment from grid point (i, j−1) to (i, j).
    fn row_step(&self, i: usize, j: usize) -> Segment {
        match self {
            DomainGrid::Polar { .. } => {
                let (r, t1) = self.param(i, j);
                let (_, t0) = self.param(i, j - 1);
                Segment::Arc { radius: r, theta_from: t0, theta_to: t1 }
            }
            DomainGrid::Rect { .. } => Segment::Line { from: self.point(i, j - 1), to: self.point(i, j) },
        }
    }

    /// Width of the angular range, for polar grids.
    pub fn angular_range(&self) -> Option<f64> {
        match *self {
            DomainGrid::Polar { theta0, theta1, .. } => Some(theta1 - theta0),
            DomainGrid::Rect { .. } => None,
        }
    }
}

/// Which leg comes first on the way from the base point to a grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathOrder {
    RadialFirst,
    AngularFirst,
}

/// Initial condition L(base, λ) for dL = L·ξ.
#[derive(Clone)]
pub struct InitialData {
    label: String,
    base: ZPoint,
    value: Arc<dyn Fn(Complex64) -> Mat2 + Send + Sync>,
}

impl fmt::Debug for InitialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialData").field("label", &self.label).field("base", &self.base).finish()
    }
}

impl InitialData {
    pub fn new(label: impl Into<String>, base: ZPoint, value: impl Fn(Complex64) -> Mat2 + Send + Sync + 'static) -> Self {
        Self { label: label.into(), base, value: Arc::new(value) }
    }

    /// L(0) = id, for potentials holomorphic at the origin.
    pub fn identity_at_origin() -> Self {
        Self::new("id at 0", ZPoint::principal(Complex64::new(0.0, 0.0)), |_| Mat2::identity())
    }

    pub fn identity_at(base: ZPoint) -> Self {
        Self::new(format!("id at {}", base.z), base, |_| Mat2::identity())
    }

    /// The Frobenius solution of ξ₋₁ evaluated at `base`.
    pub fn frobenius(c: Complex64, base: ZPoint) -> Self {
        Self::new(format!("frobenius(c={c}) at {}", base.z), base, move |l| frobenius_value(c, &base, l))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn base(&self) -> ZPoint {
        self.base
    }

    pub fn value(&self, lambda: Complex64) -> Mat2 {
        (self.value)(lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceConfig {
    /// Number of λ-samples on the unit circle.
    pub n_lambda: usize,
    pub ode: OdeConfig,
    pub exec: Exec,
}

impl Default for SurfaceConfig {
    fn default() -> Self {
        Self { n_lambda: 64, ode: OdeConfig::default(), exec: Exec::default() }
    }
}

fn lead_segment(from: Complex64, to: Complex64) -> Option<Segment> {
    ((to - from).norm() > 1e-15 * (1.0 + to.norm())).then_some(Segment::Line { from, to })
}

/// Path from the base point through the whole row i (radial leg, then along the row).
pub fn row_path(domain: &DomainGrid, base: ZPoint, i: usize) -> Result<ZPath> {
    let (_, cols) = domain.dims();
    let mut segs: Vec<Segment> = lead_segment(base.z, domain.point(i, 0)).into_iter().collect();
    segs.extend((1..cols).map(|j| domain.row_step(i, j)));
    ZPath::new(base, segs)
}

/// Path from the base point to grid point (i, j) in the given leg order. For polar grids the
/// angular leg runs on the circle through the base point (radial-first starts from θ₀).
pub fn point_path(domain: &DomainGrid, base: ZPoint, i: usize, j: usize, order: PathOrder) -> Result<ZPath> {
    let target = domain.point(i, j);
    let segs = match (domain, order) {
        (DomainGrid::Polar { .. }, PathOrder::RadialFirst) | (DomainGrid::Rect { .. }, PathOrder::RadialFirst) => {
            let mut s: Vec<Segment> = lead_segment(base.z, domain.point(i, 0)).into_iter().collect();
            s.extend((1..=j).map(|jj| domain.row_step(i, jj)));
            s
        }
        (DomainGrid::Polar { .. }, PathOrder::AngularFirst) => {
            let rb = base.z.norm();
            if rb == 0.0 {
                return Err(Error::InvalidPath("angular leg around a base point at the origin".into()));
            }
            let (_, th) = domain.param(i, j);
            let t0 = base.log_z.im;
            let mut s = Vec::new();
            if (th - t0).abs() > 0.0 {
                s.push(Segment::Arc { radius: rb, theta_from: t0, theta_to: th });
            }
            s.extend(lead_segment(Complex64::from_polar(rb, th), target));
            s
        }
        (DomainGrid::Rect { .. }, PathOrder::AngularFirst) => {
            let (x, y) = domain.param(i, j);
            let corner = Complex64::new(base.z.re, y);
            let mut s: Vec<Segment> = lead_segment(base.z, corner).into_iter().collect();
            s.extend(lead_segment(corner, Complex64::new(x, y)));
            s
        }
    };
    ZPath::new(base, segs)
}

/// Unitary frames F(z, ·) on the λ-grid for every grid point.
#[derive(Debug, Clone)]
pub struct FrameField {
    pub domain: DomainGrid,
    pub lambda_grid: CircleGrid,
    /// Row-major, one sample set per grid point.
    pub frames: Vec<LoopSamples>,
    /// max over points of ‖F·B − L‖ on the λ-grid.
    pub split_residual: f64,
    pub descriptor: String,
}

impl FrameField {
    pub fn dims(&self) -> (usize, usize) {
        self.domain.dims()
    }

    pub fn frame(&self, i: usize, j: usize) -> &LoopSamples {
        &self.frames[i * self.domain.dims().1 + j]
    }

    /// Sym–Bobenko at λ₀ over the grid.
    pub fn surface(&self, h: MeanCurvature, lambda0: Complex64) -> Result<SurfaceMesh> {
        let points = self
            .frames
            .iter()
            .map(|f| sym_bobenko_samples_at(f, &self.lambda_grid, lambda0, h))
            .collect::<Result<Vec<_>>>()?;
        Ok(SurfaceMesh::new(self.domain, points, lambda0, self.descriptor.clone(), h.value()))
    }
}

/// Integrate along radial-then-angular row paths and split every point.
pub fn generate_frames(xi: &Potential, domain: &DomainGrid, init: &InitialData, cfg: &SurfaceConfig) -> Result<FrameField> {
    let grid = CircleGrid::new(cfg.n_lambda)?;
    let (rows, cols) = domain.dims();
    let m = grid.len();
    let base = init.base();
    let paths = (0..rows).map(|i| row_path(domain, base, i)).collect::<Result<Vec<_>>>()?;
    let row_values = cfg.exec.try_map(rows * m, |k| {
        let (i, s) = (k / m, k % m);
        let l = grid.lambda(s);
        let l0 = init.value(l);
        let mut vals = integrate_segments(xi, &paths[i], l0, l, &cfg.ode)?;
        if vals.len() < cols {
            vals.insert(0, l0);
        }
        Ok::<_, Error>(vals)
    })?;
    let split = cfg.exec.try_map(rows * cols, |p| {
        let (i, j) = (p / cols, p % cols);
        let l = LoopSamples { values: (0..m).map(|s| row_values[i * m + s][j]).collect() };
        let sp = iwasawa_su2_samples(&l, &grid)?;
        Ok::<_, Error>((sp.f, sp.residual))
    })?;
    let split_residual = split.iter().map(|s| s.1).fold(0.0, f64::max);
    Ok(FrameField {
        domain: *domain,
        lambda_grid: grid,
        frames: split.into_iter().map(|s| s.0).collect(),
        split_residual,
        descriptor: xi.descriptor().to_string(),
    })
}

/// Full pipeline: frames, then the surface at λ₀.
pub fn generate(
    xi: &Potential,
    domain: &DomainGrid,
    init: &InitialData,
    h: MeanCurvature,
    lambda0: Complex64,
    cfg: &SurfaceConfig,
) -> Result<SurfaceMesh> {
    generate_frames(xi, domain, init, cfg)?.surface(h, lambda0)
}

/// Surface points on a grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    pub domain: DomainGrid,
    pub points: Vec<AmbientPoint>,
    pub lambda0: Complex64,
    pub descriptor: String,
    pub h: f64,
    /// ‖f(i, last) − f(i, 0)‖ per row for polar grids (the seam when Θ = 2π); empty otherwise.
    pub seam_defects: Vec<f64>,
}

impl SurfaceMesh {
    pub fn new(domain: DomainGrid, points: Vec<AmbientPoint>, lambda0: Complex64, descriptor: String, h: f64) -> Self {
        let (rows, cols) = domain.dims();
        assert_eq!(points.len(), rows * cols, "point count does not match the grid");
        let seam_defects = match domain {
            DomainGrid::Polar { .. } => (0..rows).map(|i| points[i * cols + cols - 1].distance(&points[i * cols])).collect(),
            DomainGrid::Rect { .. } => Vec::new(),
        };
        Self { domain, points, lambda0, descriptor, h, seam_defects }
    }

    /// Mesh of an explicit parametrization z ↦ x(z).
    pub fn from_fn(domain: DomainGrid, h: f64, f: impl Fn(Complex64) -> [f64; 3]) -> Self {
        let (rows, cols) = domain.dims();
        let points = (0..rows * cols).map(|p| AmbientPoint::euclidean(f(domain.point(p / cols, p % cols)))).collect();
        Self::new(domain, points, Complex64::new(1.0, 0.0), "explicit".into(), h)
    }

    pub fn dims(&self) -> (usize, usize) {
        self.domain.dims()
    }

    pub fn point(&self, i: usize, j: usize) -> &AmbientPoint {
        &self.points[i * self.domain.dims().1 + j]
    }

    pub fn is_finite(&self) -> bool {
        self.points.iter().all(AmbientPoint::is_finite)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosureDefect {
    pub lambda0: Complex64,
    /// sup over the seam of ‖f(τz) − f(z)‖.
    pub sup: f64,
    /// (r, ‖f(τz) − f(z)‖) per row.
    pub table: Vec<(f64, f64)>,
    /// ‖τ*f(z) − f(z)‖ per row, from the monodromy.
    pub predicted: Option<Vec<f64>>,
    /// max over rows of ‖τ*f(z) − f(τz)‖.
    pub prediction_error: Option<f64>,
}

/// Seam defect of an annulus with Θ = 2π at λ₀. With monodromy samples M (L(τz) = M·L(z)) the
/// defect is also predicted without the angular integration: F(τz) is the unitary factor of
/// M·F(z), U = F(τz)·F(z)⁻¹, and τ*f follows from [`translational_period`].
pub fn closure_defect(
    frames: &FrameField,
    h: MeanCurvature,
    lambda0: Complex64,
    monodromy: Option<&LoopSamples>,
) -> Result<ClosureDefect> {
    match frames.domain.angular_range() {
        Some(t) if (t - TAU).abs() < 1e-12 => {}
        _ => return Err(Error::InvalidInput("closure defect needs an annulus with angular range 2π".into())),
    }
    let (rows, cols) = frames.dims();
    let grid = &frames.lambda_grid;
    let mut table = Vec::with_capacity(rows);
    let mut predicted = Vec::new();
    let mut prediction_error: f64 = 0.0;
    for i in 0..rows {
        let f0 = frames.frame(i, 0);
        let a = sym_bobenko_samples_at(f0, grid, lambda0, h)?;
        let b = sym_bobenko_samples_at(frames.frame(i, cols - 1), grid, lambda0, h)?;
        table.push((frames.domain.param(i, 0).0, a.distance(&b)));
        if let Some(m) = monodromy {
            let moved = iwasawa_su2_samples(&m.mul(f0), grid)?.f;
            let u = moved.mul(&f0.adjoint());
            let (u0, ldl) = frame_at(&u, grid, lambda0);
            // ∂_t = i·λ∂_λ
            let du = ldl.scale(Complex64::new(0.0, 1.0));
            let p = translational_period(&u0, &du, &a, h)?;
            predicted.push(p.distance(&a));
            prediction_error = prediction_error.max(p.distance(&b));
        }
    }
    let sup = table.iter().map(|t| t.1).fold(0.0, f64::max);
    let has = monodromy.is_some();
    Ok(ClosureDefect {
        lambda0,
        sup,
        table,
        predicted: has.then_some(predicted),
        prediction_error: has.then_some(prediction_error),
    })
}
