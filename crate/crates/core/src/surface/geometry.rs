use nalgebra::{Matrix3, SymmetricEigen, Vector3};

use super::SurfaceMesh;
use crate::error::{Error, Result};

type V3 = Vector3<f64>;

fn v(p: &crate::sym::AmbientPoint) -> V3 {
    V3::new(p.x[0], p.x[1], p.x[2])
}

/// Mean-curvature estimate on the interior of a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct CmcReport {
    /// H at points (i, j) with margin ≤ i < rows − margin, same for j; row-major.
    pub h_est: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
    pub target: f64,
    pub max_deviation: f64,
    pub mean: f64,
}

struct Jet {
    fu: V3,
    fv: V3,
    fuu: V3,
    fuv: V3,
    fvv: V3,
}

fn jet(mesh: &SurfaceMesh, i: usize, j: usize, du: f64, dv: f64) -> Jet {
    let p = |a: usize, b: usize| v(mesh.point(a, b));
    let c = p(i, j);
    Jet {
        fu: (p(i + 1, j) - p(i - 1, j)) / (2.0 * du),
        fv: (p(i, j + 1) - p(i, j - 1)) / (2.0 * dv),
        fuu: (p(i + 1, j) - 2.0 * c + p(i - 1, j)) / (du * du),
        fvv: (p(i, j + 1) - 2.0 * c + p(i, j - 1)) / (dv * dv),
        fuv: (p(i + 1, j + 1) - p(i + 1, j - 1) - p(i - 1, j + 1) + p(i - 1, j - 1)) / (4.0 * du * dv),
    }
}

/// Centered-difference fundamental forms; H = (EN − 2FM + GL) / 2(EG − F²). The normal is
/// oriented so that the mean of the estimates is positive (the cylinder then has H > 0 with
/// the inward normal).
pub fn verify_cmc(mesh: &SurfaceMesh, margin: usize) -> Result<CmcReport> {
    let (rows, cols) = mesh.dims();
    let margin = margin.max(1);
    if rows < 2 * margin + 1 || cols < 2 * margin + 1 {
        return Err(Error::InvalidInput("mesh too small for the requested margin".into()));
    }
    let (du, dv) = mesh.domain.spacing();
    let mut h_est = Vec::new();
    for i in margin..rows - margin {
        for j in margin..cols - margin {
            let d = jet(mesh, i, j, du, dv);
            let (e, f, g) = (d.fu.dot(&d.fu), d.fu.dot(&d.fv), d.fv.dot(&d.fv));
            let det = e * g - f * f;
            if !(det >= 1e-12) {
                return Err(Error::DegenerateMetric { i, j, det });
            }
            let n = d.fu.cross(&d.fv) / det.sqrt();
            let (l, m, nn) = (d.fuu.dot(&n), d.fuv.dot(&n), d.fvv.dot(&n));
            h_est.push((e * nn - 2.0 * f * m + g * l) / (2.0 * det));
        }
    }
    let mut mean = h_est.iter().sum::<f64>() / h_est.len() as f64;
    if mean < 0.0 {
        h_est.iter_mut().for_each(|x| *x = -*x);
        mean = -mean;
    }
    let target = mesh.h.abs();
    let max_deviation = h_est.iter().map(|x| (x - target).abs()).fold(0.0, f64::max);
    Ok(CmcReport { h_est, rows: rows - 2 * margin, cols: cols - 2 * margin, target, max_deviation, mean })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CylinderFit {
    pub axis: [f64; 3],
    /// A point on the axis.
    pub center: [f64; 3],
    pub radius: f64,
    /// max over points of |dist(point, axis) − radius|.
    pub residual: f64,
}

/// Axis from the normals (smallest eigenvector of Σ n·nᵀ), then an algebraic circle fit of the
/// points projected onto the orthogonal plane.
pub fn fit_cylinder(mesh: &SurfaceMesh) -> Result<CylinderFit> {
    let (rows, cols) = mesh.dims();
    if rows < 3 || cols < 3 {
        return Err(Error::InvalidInput("cylinder fit needs at least a 3×3 mesh".into()));
    }
    let (du, dv) = mesh.domain.spacing();
    let mut s = Matrix3::zeros();
    for i in 1..rows - 1 {
        for j in 1..cols - 1 {
            let d = jet(mesh, i, j, du, dv);
            let n = d.fu.cross(&d.fv);
            let nn = n.norm();
            if nn > 0.0 {
                let n = n / nn;
                s += n * n.transpose();
            }
        }
    }
    let eig = SymmetricEigen::new(s);
    let k = eig.eigenvalues.imin();
    let axis: V3 = eig.eigenvectors.column(k).into();
    let seed = if axis.x.abs() < 0.9 { V3::x() } else { V3::y() };
    let e1 = axis.cross(&seed).normalize();
    let e2 = axis.cross(&e1);

    let pts: Vec<V3> = mesh.points.iter().map(v).collect();
    let mean = pts.iter().sum::<V3>() / pts.len() as f64;
    let plane: Vec<(f64, f64)> = pts.iter().map(|p| ((p - mean).dot(&e1), (p - mean).dot(&e2))).collect();
    // x² + y² + D·x + E·y + F = 0 in the least-squares sense
    let mut a = Matrix3::zeros();
    let mut b = V3::zeros();
    for &(x, y) in &plane {
        let row = V3::new(x, y, 1.0);
        a += row * row.transpose();
        b -= row * (x * x + y * y);
    }
    let sol = a.lu().solve(&b).ok_or_else(|| Error::Singular { context: "circle fit".into() })?;
    let (cx, cy) = (-sol.x / 2.0, -sol.y / 2.0);
    let radius = (cx * cx + cy * cy - sol.z).sqrt();
    let residual = plane
        .iter()
        .map(|&(x, y)| (((x - cx).powi(2) + (y - cy).powi(2)).sqrt() - radius).abs())
        .fold(0.0, f64::max);
    let c = mean + e1 * cx + e2 * cy;
    Ok(CylinderFit { axis: [axis.x, axis.y, axis.z], center: [c.x, c.y, c.z], radius, residual })
}
