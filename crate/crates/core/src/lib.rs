//! Numerical laboratory for the DPW loop-group construction of constant mean
//! curvature surfaces from holomorphic potentials λ⁻¹·offdiag(g, h)·dz.
//!
//! The pipeline is `potentials` → `holonomy` (integrate dL = L·ξ) →
//! `factorization` (Iwasawa L = F·B) → `sym` (Sym–Bobenko) → `surface`.
//! The `frobenius` module holds the formal-series solution around the regular
//! singular point z = 0 and the dressing-isotropy certificates.

// `!(x > tol)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod factorization;
pub mod frobenius;
pub mod holonomy;
pub mod loops;
pub mod par;
pub mod potentials;
pub mod surface;
pub mod sym;

pub use error::{Error, ErrorClass, Result};
pub use loops::{CircleGrid, LoopMatrix, LoopSamples, Mat2};
pub use par::Exec;
pub use potentials::{Potential, ZPoint};
