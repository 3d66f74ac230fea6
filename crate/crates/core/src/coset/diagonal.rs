use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::liealg::{BasisKind, RealizedAlgebra};
use crate::numeric::{columns, nullspace, orthonormalize};

/// Standard bases `{u1,u2,u3}`, `{v1,v2,v3}` of two rank-one factors:
/// mutually orthogonal, equal length, `[u1,u2] = u3` cyclically, with
/// `u1`, `v1` in the Cartan subalgebra. Vectors are g-coordinates.
#[derive(Clone, Debug)]
pub struct A1Pair {
    pub u: [DVector<f64>; 3],
    pub v: [DVector<f64>; 3],
}

fn standard_basis(alg: &RealizedAlgebra, factor: usize) -> Result<[DVector<f64>; 3]> {
    let f = alg.factors.get(factor).ok_or(Error::SpecMismatch)?;
    if f.rank != 1 {
        return Err(Error::NotDiagonalA1(format!("factor {factor} has rank {}", f.rank)));
    }
    let d = alg.dim();
    let unit = |c: usize| {
        let mut e = DVector::zeros(d);
        e[c] = 1.0;
        e
    };
    let c = alg
        .kinds
        .iter()
        .position(|k| *k == BasisKind::Cartan { factor, index: 0 })
        .ok_or(Error::SpecMismatch)?;
    let p = alg.planes.iter().find(|p| p.factor == factor).ok_or(Error::SpecMismatch)?;
    let x1 = unit(c);
    let x2 = unit(p.coords[0]);
    let mut x3 = unit(p.coords[1]);
    let mut kappa = alg.bracket_coords(&x1, &x2).dot(&x3);
    if kappa < 0.0 {
        x3 = -x3;
        kappa = -kappa;
    }
    let b = [x1 / kappa, x2 / kappa, x3 / kappa];
    let cyc = (alg.bracket_coords(&b[1], &b[2]) - &b[0]).norm() + (alg.bracket_coords(&b[2], &b[0]) - &b[1]).norm();
    if cyc > 1e-10 {
        return Err(Error::NotDiagonalA1(format!("factor {factor} basis is not cyclic")));
    }
    Ok(b)
}

impl A1Pair {
    pub fn standard(alg: &RealizedAlgebra, f1: usize, f2: usize) -> Result<Self> {
        Ok(A1Pair { u: standard_basis(alg, f1)?, v: standard_basis(alg, f2)? })
    }

    /// Reference diagonal `span{u_i + v_i}`.
    pub fn reference(&self) -> Vec<DVector<f64>> {
        (0..3).map(|i| &self.u[i] + &self.v[i]).collect()
    }

    /// `Ad(exp(t v1))` as a matrix on g-coordinates.
    pub fn rotation(&self, alg: &RealizedAlgebra, t: f64) -> DMatrix<f64> {
        (alg.ad_matrix(&self.v[0]) * t).exp()
    }
}

fn coef(x: &DVector<f64>, b: &DVector<f64>) -> f64 {
    x.dot(b) / b.norm_squared()
}

/// Returns `t` with `Ad(exp(t v1)) h' = span{u_i + v_i}`, for `h'` given by
/// spanning g-coordinate vectors.
pub fn normalize_diagonal_a1(alg: &RealizedAlgebra, pair: &A1Pair, h_prime: &[DVector<f64>]) -> Result<f64> {
    let err = |s: String| Error::NotDiagonalA1(s);
    let hb = orthonormalize(h_prime.iter().cloned(), 1e-9);
    if hb.len() != 3 {
        return Err(err(format!("h' has dimension {}, expected 3", hb.len())));
    }
    let d = alg.dim();
    let hm = columns(d, &hb);
    let closure = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| {
            let z = alg.bracket_coords(&hb[i], &hb[j]);
            (&z - &hm * (hm.transpose() * &z)).norm()
        })
        .fold(0.0, f64::max);
    if closure > 1e-8 {
        return Err(err(format!("h' is not a subalgebra (residual {closure:.2e})")));
    }
    let (u, v) = (&pair.u, &pair.v);
    let factor_span = |b: &[DVector<f64>; 3]| columns(d, &orthonormalize(b.iter().cloned(), 1e-12));
    let g1 = factor_span(u);
    let g2 = factor_span(v);
    // (2) h' meets neither factor
    for (g, name) in [(&g1, "first"), (&g2, "second")] {
        let outside = &hm - g * (g.transpose() * &hm);
        if outside.svd(false, false).singular_values.min() < 1e-9 {
            return Err(err(format!("h' meets the {name} factor")));
        }
    }
    // (1) one-dimensional intersection with t = span(u1, v1)
    let t = columns(d, &orthonormalize([u[0].clone(), v[0].clone()], 1e-12));
    let off_t = &hm - &t * (t.transpose() * &hm);
    let ns = nullspace(&off_t, 1e-9);
    if ns.len() != 1 {
        return Err(err(format!("h'∩t has dimension {}", ns.len())));
    }
    let c = &hm * &ns[0];
    let (a, b) = (coef(&c, &u[0]), coef(&c, &v[0]));
    if a.abs() < 1e-9 {
        return Err(err("h'∩t lies in the second factor".into()));
    }
    let b = b / a;
    if (b - 1.0).abs() > 1e-8 {
        return Err(err(format!("Cartan part is u1 + {b:.6} v1, expected b = 1")));
    }
    // (3) the rest of h' is orthogonal to t
    let c = c.normalize();
    let rest: Vec<DVector<f64>> = orthonormalize(hb.iter().map(|x| x - &c * c.dot(x)), 1e-9);
    for x in &rest {
        if (t.transpose() * x).norm() > 1e-9 {
            return Err(err("off-Cartan part of h' is not orthogonal to t".into()));
        }
    }
    // x ∈ h' with u-part exactly u2
    let (x1, x2) = (&rest[0], &rest[1]);
    let mut x = x1 * coef(x2, &u[2]) - x2 * coef(x1, &u[2]);
    let k = coef(&x, &u[1]);
    if k.abs() < 1e-12 {
        return Err(err("h' has no element over u2".into()));
    }
    x /= k;
    let y = &x - &u[1];
    let (cs, sn) = (coef(&y, &v[1]), coef(&y, &v[2]));
    if ((cs * cs + sn * sn) - 1.0).abs() > 1e-8 {
        return Err(err(format!("v-part of h' has length {:.6}, expected 1", (cs * cs + sn * sn).sqrt())));
    }
    let t_par = -sn.atan2(cs);
    let r = pair.rotation(alg, t_par);
    let reference = columns(d, &pair.reference().into_iter().map(|x| x.normalize()).collect::<Vec<_>>());
    let moved = r * &hm;
    let residual = (&moved - &reference * (reference.transpose() * &moved)).amax();
    if residual > 1e-10 {
        return Err(err(format!("basis matching residual {residual:.2e}")));
    }
    Ok(t_par)
}
