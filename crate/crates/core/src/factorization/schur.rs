//! Block Schur algorithm for the last block row of the Cholesky factor of a Hermitian
//! positive block-Toeplitz section T_{ij} = Q_{j−i}.

use crate::error::{Error, Result};
use crate::loops::Mat2;

fn not_positive(context: &str) -> Error {
    Error::NotPositive { context: context.to_string() }
}

fn inv(m: &Mat2, context: &str) -> Result<Mat2> {
    m.inverse().ok_or_else(|| Error::Singular { context: context.to_string() })
}

/// Coefficients B₀, …, B_{n−1} of the finite-section factor, read off the last block row
/// of T = LL^H as B_m = L_{n−1, n−1−m}^H. B₀ is upper triangular with positive diagonal.
/// `q[k]` is Q_k for k ≥ 0; Q_{−k} = Q_k^H and Q_k = 0 beyond the slice.
pub fn schur_last_row(q: &[Mat2], n: usize) -> Result<Vec<Mat2>> {
    let c0 = q[0].cholesky_lower().ok_or_else(|| not_positive("Q_0"))?;
    let c0_inv_h = inv(&c0, "Q_0 factor")?.adjoint();
    let mut u = vec![Mat2::zero(); n];
    let mut v = vec![Mat2::zero(); n];
    u[0] = c0;
    for i in 1..n.min(q.len()) {
        u[i] = q[i].adjoint() * c0_inv_h;
        v[i] = u[i];
    }
    let id = Mat2::identity();
    let mut last = vec![Mat2::zero(); n];
    for k in 0..n {
        let kk = inv(&u[k], "generator pivot")? * v[k];
        if kk.max_abs() > 0.0 {
            let ca = (id - kk * kk.adjoint()).cholesky_lower().ok_or_else(|| not_positive("hyperbolic rotation"))?;
            let cb = (id - kk.adjoint() * kk).cholesky_lower().ok_or_else(|| not_positive("hyperbolic rotation"))?;
            let ca_ih = inv(&ca, "rotation")?.adjoint();
            let cb_ih = inv(&cb, "rotation")?.adjoint();
            let kh = kk.adjoint();
            for i in k..n {
                let (ui, vi) = (u[i], v[i]);
                u[i] = (ui - vi * kh) * ca_ih;
                v[i] = (vi - ui * kk) * cb_ih;
            }
        }
        let piv = (u[k] * u[k].adjoint()).cholesky_lower().ok_or_else(|| not_positive("pivot block"))?;
        let rot = inv(&u[k], "pivot block")? * piv;
        for x in u.iter_mut().skip(k) {
            *x = *x * rot;
        }
        u[k] = piv;
        last[k] = u[n - 1];
        for i in (k + 1..n).rev() {
            u[i] = u[i - 1];
        }
        u[k] = Mat2::zero();
    }
    Ok((0..n).map(|m| last[n - 1 - m].adjoint()).collect())
}
