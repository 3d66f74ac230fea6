//! Small dense linear-algebra helpers shared by the numeric modules.

use nalgebra::{DMatrix, DVector};

/// Absolute tolerances used across the crate.
pub mod tol {
    /// Exact-arithmetic-equivalent checks on well-conditioned quantities.
    pub const EXACT: f64 = 1e-12;
    /// Results of linear solves and projections.
    pub const SOLVE: f64 = 1e-10;
    /// Quantities that stack finite differences.
    pub const FD: f64 = 1e-5;
    /// Gate for subalgebra closure and reductivity at build time.
    pub const CLOSURE: f64 = 1e-8;
}

/// Modified Gram-Schmidt (two passes) of `vs` against the orthonormal
/// columns already in `basis`; vectors whose residual falls below `eps`
/// are dropped.
pub fn extend_orthonormal(basis: &mut Vec<DVector<f64>>, vs: impl IntoIterator<Item = DVector<f64>>, eps: f64) -> usize {
    let mut added = 0;
    for mut v in vs {
        let n0 = v.norm();
        if n0 == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for b in basis.iter() {
                let c = b.dot(&v);
                v.axpy(-c, b, 1.0);
            }
        }
        let n = v.norm();
        if n > eps * n0.max(1.0) {
            basis.push(v / n);
            added += 1;
        }
    }
    added
}

pub fn orthonormalize(vs: impl IntoIterator<Item = DVector<f64>>, eps: f64) -> Vec<DVector<f64>> {
    let mut b = Vec::new();
    extend_orthonormal(&mut b, vs, eps);
    b
}

pub fn columns(rows: usize, vs: &[DVector<f64>]) -> DMatrix<f64> {
    if vs.is_empty() {
        return DMatrix::zeros(rows, 0);
    }
    DMatrix::from_columns(vs)
}

/// Orthonormal basis of the null space of `a` (singular values below `eps`).
pub fn nullspace(a: &DMatrix<f64>, eps: f64) -> Vec<DVector<f64>> {
    let n = a.ncols();
    if n == 0 {
        return Vec::new();
    }
    // pad to at least n rows so the SVD yields a full right basis
    let mut m = DMatrix::zeros(a.nrows().max(n), n);
    m.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let mut out = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s < eps {
            out.push(vt.row(k).transpose());
        }
    }
    out
}
