//! Flag curvature of invariant Finsler metrics on `G/H`.
//!
//! Vectors are m-coordinates of the space's orthonormal m-basis. The general
//! path evaluates Huang's Riemann-curvature formula; the commutative-pair
//! path evaluates `⟨U(u,v),U(u,v)⟩_u` over the flag area.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coset::CosetSpace;
use crate::error::{Error, Result};
use crate::norms::MinkowskiNorm;
use crate::numeric::{nullspace, tol};

/// Relative central-difference step for `D_{η(u)}N`.
pub const FD_STEP: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq)]
pub struct FlagSpec {
    pub u: DVector<f64>,
    pub v: DVector<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Huang,
    Theorem31,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub k: f64,
    pub method: Method,
    pub eta_norm: f64,
    pub eta_residual: f64,
    /// Step used for `D_{η(u)}N`; zero when the derivative was short-circuited.
    pub fd_step: f64,
    /// Value from the other method, when computed.
    pub cross_check: Option<f64>,
    pub cross_check_rel_err: Option<f64>,
}

/// Per-base-point data: the Hessian Gram matrix, its factorization and `η(u)`.
pub struct BasePoint<'a> {
    space: &'a CosetSpace,
    norm: &'a MinkowskiNorm,
    pub u: DVector<f64>,
    pub gram: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    pub eta: DVector<f64>,
    pub eta_residual: f64,
}

impl<'a> BasePoint<'a> {
    pub fn new(space: &'a CosetSpace, norm: &'a MinkowskiNorm, u: &DVector<f64>) -> Result<Self> {
        let n = space.dim_m();
        if u.len() != n || norm.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: if u.len() != n { u.len() } else { norm.dim() } });
        }
        let gram = norm.hessian(u)?.gram;
        let chol = Cholesky::new(gram.clone()).ok_or(Error::GramNotPositive)?;
        // ⟨η, e_i⟩_u = ⟨u, [e_i, u]_m⟩_u
        let gu = &gram * u;
        let rhs = DVector::from_fn(n, |i, _| (&space.br_m[i] * u).dot(&gu));
        let eta = chol.solve(&rhs);
        let eta_residual = (&gram * &eta - &rhs).amax();
        let mut bp = BasePoint { space, norm, u: u.clone(), gram, chol, eta, eta_residual };
        if bp.eta.norm() < 1e-14 * u.norm().max(1.0) {
            bp.eta.fill(0.0);
        }
        Ok(bp)
    }

    pub fn inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        a.dot(&(&self.gram * b))
    }

    fn cartan_row(&self, a: &DVector<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
        let n = self.u.len();
        if let MinkowskiNorm::Quadratic { .. } = self.norm {
            return Ok(DVector::zeros(n));
        }
        let mut out = DVector::zeros(n);
        let mut e = DVector::zeros(n);
        for j in 0..n {
            e[j] = 1.0;
            out[j] = self.norm.cartan(&self.u, a, &e, b)?;
            e[j] = 0.0;
        }
        Ok(out)
    }

    /// Connection operator `N(u, w)`.
    pub fn n_op(&self, w: &DVector<f64>) -> Result<DVector<f64>> {
        let s = self.space;
        let n = self.u.len();
        let u = &self.u;
        let gu = &self.gram * u;
        let gw = &self.gram * w;
        let wu = s.bracket_m(w, u);
        let gwu = &self.gram * &wu;
        let mut rhs = DVector::from_fn(n, |j, _| (&s.br_m[j] * w).dot(&gu) + (&s.br_m[j] * u).dot(&gw) + gwu[j]);
        if self.eta.iter().any(|x| *x != 0.0) {
            rhs -= self.cartan_row(w, &self.eta)? * 2.0;
        }
        Ok(self.chol.solve(&rhs) * 0.5)
    }

    /// `U(u, v)`.
    pub fn u_op(&self, v: &DVector<f64>) -> DVector<f64> {
        let s = self.space;
        let n = self.u.len();
        let gu = &self.gram * &self.u;
        let gv = &self.gram * v;
        let rhs = DVector::from_fn(n, |j, _| 0.5 * ((&s.br_m[j] * &self.u).dot(&gv) + (&s.br_m[j] * v).dot(&gu)));
        self.chol.solve(&rhs)
    }

    fn area(&self, v: &DVector<f64>) -> f64 {
        let (uu, vv, uv) = (self.inner(&self.u, &self.u), self.inner(v, v), self.inner(&self.u, v));
        uu * vv - uv * uv
    }

    fn check_flag(&self, v: &DVector<f64>) -> Result<f64> {
        let uu = self.inner(&self.u, &self.u);
        let vv = self.inner(v, v);
        let a = self.area(v);
        if !(a > 1e-10 * uu * vv) {
            return Err(Error::DegenerateFlag);
        }
        Ok(a)
    }
}

pub fn eta(space: &CosetSpace, norm: &MinkowskiNorm, u: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let bp = BasePoint::new(space, norm, u)?;
    Ok((bp.eta, bp.eta_residual))
}

pub fn connection_n(space: &CosetSpace, norm: &MinkowskiNorm, u: &DVector<f64>, w: &DVector<f64>) -> Result<DVector<f64>> {
    BasePoint::new(space, norm, u)?.n_op(w)
}

pub fn u_map(space: &CosetSpace, norm: &MinkowskiNorm, u: &DVector<f64>, v: &DVector<f64>) -> Result<DVector<f64>> {
    Ok(BasePoint::new(space, norm, u)?.u_op(v))
}

/// `D_{η(u)} N(·, w)` at `u`, with the step used.
fn d_eta_n(bp: &BasePoint<'_>, w: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let en = bp.eta.norm();
    if en < 1e-10 {
        return Ok((DVector::zeros(w.len()), 0.0));
    }
    let h = FD_STEP * bp.u.norm() / en;
    let at = |t: f64| -> Result<DVector<f64>> {
        let p = &bp.u + &bp.eta * t;
        BasePoint::new(bp.space, bp.norm, &p)?.n_op(w)
    };
    let d = |h: f64| -> Result<DVector<f64>> { Ok((at(h)? - at(-h)?) / (2.0 * h)) };
    let (d1, d2) = (d(h)?, d(h / 2.0)?);
    Ok(((d2 * 4.0 - d1) / 3.0, h * en))
}

fn riemann_at(bp: &BasePoint<'_>, w: &DVector<f64>) -> Result<(f64, f64)> {
    let s = bp.space;
    let u = &bp.u;
    let nw = bp.n_op(w)?;
    let (dn, step) = d_eta_n(bp, w)?;
    let rt = dn - bp.n_op(&nw)? + bp.n_op(&s.bracket_m(u, w))? - s.bracket_m(u, &nw);
    let z = s.bracket_h(w, u);
    let hterm = s.ad_h_on_m(&z) * w;
    Ok((bp.inner(&hterm, u) + bp.inner(&rt, w), step))
}

/// `⟨R_u(w), w⟩_u` by Huang's formula.
pub fn riemann_quadratic(space: &CosetSpace, norm: &MinkowskiNorm, u: &DVector<f64>, w: &DVector<f64>) -> Result<f64> {
    let bp = BasePoint::new(space, norm, u)?;
    Ok(riemann_at(&bp, w)?.0)
}

pub fn flag_curvature(space: &CosetSpace, norm: &MinkowskiNorm, u: &DVector<f64>, v: &DVector<f64>) -> Result<CurvatureReport> {
    let bp = BasePoint::new(space, norm, u)?;
    let area = bp.check_flag(v)?;
    let (q, step) = riemann_at(&bp, v)?;
    Ok(CurvatureReport {
        k: q / area,
        method: Method::Huang,
        eta_norm: bp.eta.norm(),
        eta_residual: bp.eta_residual,
        fd_step: step,
        cross_check: None,
        cross_check_rel_err: None,
    })
}

/// Whether `(u, v)` satisfies the commutative-pair hypotheses.
pub fn is_eligible(space: &CosetSpace, norm: &MinkowskiNorm, u: &DVector<f64>, v: &DVector<f64>) -> Result<bool> {
    let bp = BasePoint::new(space, norm, u)?;
    Ok(eligibility(&bp, v).is_ok())
}

fn eligibility(bp: &BasePoint<'_>, v: &DVector<f64>) -> Result<()> {
    let s = bp.space;
    let scale = bp.u.norm() * v.norm();
    let br = s.bracket_m(&bp.u, v).norm_squared() + s.bracket_h(&bp.u, v).norm_squared();
    if br.sqrt() >= tol::SOLVE * scale.max(1e-300) {
        return Err(Error::CommutativeInapplicable(format!("[u,v] has norm {:.3e}", br.sqrt())));
    }
    let en = bp.eta.norm();
    if en >= tol::CLOSURE * bp.u.norm() {
        return Err(Error::CommutativeInapplicable(format!("η(u) has norm {en:.3e}")));
    }
    Ok(())
}

/// Commutative-pair formula `K = ⟨U,U⟩_u / area`, cross-checked against Huang.
pub fn flag_curvature_commutative(space: &CosetSpace, norm: &MinkowskiNorm, u: &DVector<f64>, v: &DVector<f64>) -> Result<CurvatureReport> {
    let bp = BasePoint::new(space, norm, u)?;
    let area = bp.check_flag(v)?;
    eligibility(&bp, v)?;
    let uv = bp.u_op(v);
    let k = bp.inner(&uv, &uv) / area;
    let (q, step) = riemann_at(&bp, v)?;
    let kh = q / area;
    let rel = (k - kh).abs() / k.abs().max(kh.abs()).max(1e-12);
    Ok(CurvatureReport {
        k,
        method: Method::Theorem31,
        eta_norm: bp.eta.norm(),
        eta_residual: bp.eta_residual,
        fd_step: step,
        cross_check: Some(kh),
        cross_check_rel_err: Some(rel),
    })
}

/// Centralizer of `u` in m (all of `[u, ·]` vanishing), orthogonal to `u`.
pub fn commutant(space: &CosetSpace, u: &DVector<f64>) -> Vec<DVector<f64>> {
    let n = space.dim_m();
    let mut rows = DMatrix::zeros(space.dim_m() + space.dim_h() + 1, n);
    for j in 0..n {
        let bm = &space.br_m[j] * u;
        let bh = &space.br_h[j] * u;
        for i in 0..n {
            rows[(i, j)] = bm[i];
        }
        for i in 0..space.dim_h() {
            rows[(n + i, j)] = bh[i];
        }
        rows[(n + space.dim_h(), j)] = u[j] / u.norm();
    }
    nullspace(&rows, 1e-9)
}

/// Candidate poles with `η(u) = 0` and a nontrivial commutant in m, drawn
/// from `t∩m`, from root planes inside m and from single hat blocks.
pub fn eligible_flag<R: Rng>(space: &CosetSpace, norm: &MinkowskiNorm, rng: &mut R) -> Option<FlagSpec> {
    let n = space.dim_m();
    let mut pools: Vec<Vec<DVector<f64>>> = vec![space.t_m_coords()];
    for p in &space.algebra.planes {
        if let Ok(pair) = plane_in_m(space, &p.global_root) {
            if pair.iter().all(|x| x.norm() > 1.0 - tol::SOLVE) {
                pools.push(pair.to_vec());
            }
        }
    }
    for b in &space.hat.blocks {
        pools.push(b.range.clone().map(|i| {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            e
        }).collect());
    }
    pools.retain(|p| !p.is_empty());
    for _ in 0..3 * pools.len() {
        let pool = &pools[rng.gen_range(0..pools.len())];
        let mut u = DVector::zeros(n);
        for b in pool {
            u += b * rng.gen_range(-1.0..1.0);
        }
        if u.norm() < 1e-6 {
            continue;
        }
        let Ok(bp) = BasePoint::new(space, norm, &u) else { continue };
        if bp.eta.norm() >= tol::CLOSURE * u.norm() {
            continue;
        }
        let c = commutant(space, &u);
        if c.is_empty() {
            continue;
        }
        let mut v = DVector::zeros(n);
        for b in &c {
            v += b * rng.gen_range(-1.0..1.0);
        }
        if eligibility(&bp, &v).is_ok() && bp.check_flag(&v).is_ok() {
            return Some(FlagSpec { u, v });
        }
    }
    None
}

/// m-coordinates of the bi-invariant orthonormal basis of the plane `g_{±root}`
/// projected to m.
pub fn plane_in_m(space: &CosetSpace, root: &crate::rootsys::RootVector) -> Result<[DVector<f64>; 2]> {
    let p = space.algebra.plane_of(root).ok_or_else(|| Error::NotARoot(root.to_string()))?;
    let c = space.algebra.planes[p].coords;
    let d = space.algebra.dim();
    let e = |k: usize| {
        let mut x = DVector::zeros(d);
        x[k] = 1.0;
        space.pr_m(&x)
    };
    Ok([e(c[0]), e(c[1])])
}

/// Flag `u ∈ g_{±root_u}`, `v ∈ g_{±root_v}` with `⟨u', v⟩_u = 0`, where
/// `{u, u'}` is the orthonormal basis of the first plane.
pub fn plane_pair_flag(
    space: &CosetSpace,
    norm: &MinkowskiNorm,
    root_u: &crate::rootsys::RootVector,
    root_v: &crate::rootsys::RootVector,
) -> Result<FlagSpec> {
    let [u, u2] = plane_in_m(space, root_u)?;
    let [v1, v2] = plane_in_m(space, root_v)?;
    if u.norm() < 0.5 || v1.norm() < 0.5 {
        return Err(Error::Hypothesis("root plane not contained in m".into()));
    }
    let g = norm.hessian(&u)?;
    let (a, b) = (g.inner(&u2, &v1), g.inner(&u2, &v2));
    let v = if a.abs() + b.abs() < 1e-14 { v1 } else { &v1 * b - &v2 * a };
    Ok(FlagSpec { u, v: v.normalize() })
}

/// Root-plane flag with `U(u,v) = 0`, the configuration behind the
/// zero-curvature exclusions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZeroWitness {
    pub root_u: crate::rootsys::RootVector,
    pub root_v: crate::rootsys::RootVector,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub u_norm: f64,
    pub k: f64,
}

/// First ordered pair of root planes `g_{±α}`, `g_{±β}` with `α ± β ∉ Δ`
/// whose [`plane_pair_flag`] has `‖U(u,v)‖ < u_tol` and `|K| < k_tol`.
pub fn find_zero_witness(space: &CosetSpace, norm: &MinkowskiNorm, u_tol: f64, k_tol: f64) -> Option<ZeroWitness> {
    let planes = &space.algebra.planes;
    let is_root = |r: &crate::rootsys::RootVector| !r.is_zero() && space.algebra.plane_of(r).is_some();
    for a in planes {
        for b in planes {
            let (ra, rb) = (&a.global_root, &b.global_root);
            if ra == rb || is_root(&(ra + rb)) || is_root(&(ra - rb)) {
                continue;
            }
            let Ok(f) = plane_pair_flag(space, norm, ra, rb) else { continue };
            let Ok(un) = u_map(space, norm, &f.u, &f.v).map(|x| x.norm()) else { continue };
            if un >= u_tol {
                continue;
            }
            let k = flag_curvature_commutative(space, norm, &f.u, &f.v).or_else(|_| flag_curvature(space, norm, &f.u, &f.v));
            let Ok(r) = k else { continue };
            if r.k.abs() < k_tol {
                return Some(ZeroWitness {
                    root_u: ra.clone(),
                    root_v: rb.clone(),
                    u: f.u.iter().copied().collect(),
                    v: f.v.iter().copied().collect(),
                    u_norm: un,
                    k: r.k,
                });
            }
        }
    }
    None
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZeroFlag {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub k: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SamplingReport {
    pub flags: usize,
    #[serde(rename = "K_min")]
    pub k_min: f64,
    #[serde(rename = "K_max")]
    pub k_max: f64,
    pub zero_flags: Vec<ZeroFlag>,
    pub eligible_flags: usize,
    pub method_agreement_max_rel_err: Option<f64>,
    pub failures: usize,
}

/// Threshold under which a sampled flag curvature counts as zero.
pub const ZERO_K: f64 = 1e-7;

fn unit_sphere<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        if v.norm() > 1e-3 {
            return v.normalize();
        }
    }
}

/// Samples `count` random flags (Huang) plus up to `count` eligible
/// commutative flags (both methods). Per-flag RNGs derive from `(seed, index)`.
pub fn sample_flags(space: &CosetSpace, norm: &MinkowskiNorm, count: usize, seed: u64) -> SamplingReport {
    let n = space.dim_m();
    let rng_for = |i: usize, salt: u64| ChaCha8Rng::seed_from_u64(seed ^ ((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)) ^ salt);
    let general: Vec<Option<(f64, FlagSpec)>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(i, 0);
            let u = unit_sphere(&mut rng, n);
            let v = unit_sphere(&mut rng, n);
            flag_curvature(space, norm, &u, &v).ok().map(|r| (r.k, FlagSpec { u, v }))
        })
        .collect();
    let eligible: Vec<Option<(f64, f64, FlagSpec)>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(i, 0x5eed);
            let f = eligible_flag(space, norm, &mut rng)?;
            let r = flag_curvature_commutative(space, norm, &f.u, &f.v).ok()?;
            Some((r.k, r.cross_check_rel_err.unwrap_or(0.0), f))
        })
        .collect();
    let mut k_min = f64::INFINITY;
    let mut k_max = f64::NEG_INFINITY;
    let mut zero_flags = Vec::new();
    let mut failures = 0;
    let mut record = |k: f64, f: &FlagSpec, zero_flags: &mut Vec<ZeroFlag>| {
        k_min = k_min.min(k);
        k_max = k_max.max(k);
        if k.abs() < ZERO_K && zero_flags.len() < 10 {
            zero_flags.push(ZeroFlag { u: f.u.iter().copied().collect(), v: f.v.iter().copied().collect(), k });
        }
    };
    let mut flags = 0;
    for g in &general {
        match g {
            Some((k, f)) => {
                flags += 1;
                record(*k, f, &mut zero_flags);
            }
            None => failures += 1,
        }
    }
    let mut agreement: Option<f64> = None;
    let mut eligible_flags = 0;
    for (k, rel, f) in eligible.iter().flatten() {
        flags += 1;
        eligible_flags += 1;
        record(*k, f, &mut zero_flags);
        agreement = Some(agreement.map_or(*rel, |a: f64| a.max(*rel)));
    }
    SamplingReport { flags, k_min, k_max, zero_flags, eligible_flags, method_agreement_max_rel_err: agreement, failures }
}

/// Normal-homogeneous oracle `(¼‖[u,v]_m‖² + ‖[u,v]_h‖²) / area` for the
/// metric induced by the bi-invariant inner product.
pub fn normal_homogeneous_oracle(space: &CosetSpace, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let area = u.norm_squared() * v.norm_squared() - u.dot(v).powi(2);
    (0.25 * space.bracket_m(u, v).norm_squared() + space.bracket_h(u, v).norm_squared()) / area
}
