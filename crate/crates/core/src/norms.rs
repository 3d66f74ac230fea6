//! Minkowski norms on `m`: values, Hessian inner products, Cartan tensors.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coset::CosetSpace;
use crate::error::{Error, Result};
use crate::rootsys::RootVector;

pub type NormFn = Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;

/// User-supplied norm, differentiated numerically.
#[derive(Clone)]
pub struct CustomNorm {
    pub dim: usize,
    pub reversible: bool,
    pub f: NormFn,
}

impl fmt::Debug for CustomNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CustomNorm {{ dim: {}, reversible: {} }}", self.dim, self.reversible)
    }
}

#[derive(Clone, Debug)]
pub enum MinkowskiNorm {
    Quadratic { q: DMatrix<f64> },
    /// `F = sqrt(yᵀQy) + b·y`.
    Randers { q: DMatrix<f64>, b: DVector<f64> },
    /// `F = (Σ w_k (yᵀQ_k y)²)^{1/4}`.
    Quartic { weights: Vec<f64>, quadratics: Vec<DMatrix<f64>> },
    Custom(CustomNorm),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
enum NormRepr {
    Quadratic { q: Vec<Vec<f64>> },
    Randers { q: Vec<Vec<f64>>, b: Vec<f64> },
    Quartic { weights: Vec<f64>, quadratics: Vec<Vec<Vec<f64>>> },
}

fn mat_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn rows_mat(r: &[Vec<f64>]) -> std::result::Result<DMatrix<f64>, String> {
    let n = r.len();
    if r.iter().any(|row| row.len() != n) {
        return Err("quadratic forms must be square".into());
    }
    Ok(DMatrix::from_fn(n, n, |i, j| r[i][j]))
}

impl Serialize for MinkowskiNorm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            MinkowskiNorm::Quadratic { q } => NormRepr::Quadratic { q: mat_rows(q) },
            MinkowskiNorm::Randers { q, b } => NormRepr::Randers { q: mat_rows(q), b: b.iter().copied().collect() },
            MinkowskiNorm::Quartic { weights, quadratics } => {
                NormRepr::Quartic { weights: weights.clone(), quadratics: quadratics.iter().map(mat_rows).collect() }
            }
            MinkowskiNorm::Custom(_) => return Err(serde::ser::Error::custom("custom norms are not serializable")),
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MinkowskiNorm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = NormRepr::deserialize(d)?;
        let norm = match repr {
            NormRepr::Quadratic { q } => MinkowskiNorm::Quadratic { q: rows_mat(&q).map_err(D::Error::custom)? },
            NormRepr::Randers { q, b } => {
                MinkowskiNorm::Randers { q: rows_mat(&q).map_err(D::Error::custom)?, b: DVector::from_vec(b) }
            }
            NormRepr::Quartic { weights, quadratics } => MinkowskiNorm::Quartic {
                weights,
                quadratics: quadratics.iter().map(|q| rows_mat(q)).collect::<std::result::Result<_, _>>().map_err(D::Error::custom)?,
            },
        };
        norm.validate().map_err(|e| D::Error::custom(e.to_string()))?;
        Ok(norm)
    }
}

/// Gram matrix of `g_y` over the m-basis.
#[derive(Clone, Debug)]
pub struct HessianInner {
    pub y: DVector<f64>,
    pub gram: DMatrix<f64>,
}

impl HessianInner {
    pub fn inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        u.dot(&(&self.gram * v))
    }
}

/// Trilinear values `C_y(e_i, e_j, e_k)`, flattened with `i` slowest.
#[derive(Clone, Debug)]
pub struct CartanTensorValue {
    pub y: DVector<f64>,
    pub dim: usize,
    pub values: Vec<f64>,
}

impl CartanTensorValue {
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[(i * self.dim + j) * self.dim + k]
    }
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

fn quad(q: &DMatrix<f64>, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    u.dot(&(q * v))
}

const FD_FIRST: f64 = 1e-5;
const FD_SECOND: f64 = 1e-3;
const FD_THIRD: f64 = 1e-2;

/// Central difference with one Richardson level.
fn richardson(h: f64, f: impl Fn(f64) -> f64) -> f64 {
    let d = |h: f64| (f(h) - f(-h)) / (2.0 * h);
    let (d1, d2) = (d(h), d(h / 2.0));
    (4.0 * d2 - d1) / 3.0
}

impl MinkowskiNorm {
    pub fn quadratic_identity(dim: usize) -> Self {
        MinkowskiNorm::Quadratic { q: DMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        match self {
            MinkowskiNorm::Quadratic { q } | MinkowskiNorm::Randers { q, .. } => q.nrows(),
            MinkowskiNorm::Quartic { quadratics, .. } => quadratics.first().map_or(0, |q| q.nrows()),
            MinkowskiNorm::Custom(c) => c.dim,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            MinkowskiNorm::Quadratic { .. } => "quadratic",
            MinkowskiNorm::Randers { .. } => "randers",
            MinkowskiNorm::Quartic { .. } => "quartic",
            MinkowskiNorm::Custom(_) => "custom",
        }
    }

    pub fn is_reversible(&self) -> bool {
        match self {
            MinkowskiNorm::Quadratic { .. } | MinkowskiNorm::Quartic { .. } => true,
            MinkowskiNorm::Randers { b, .. } => b.iter().all(|x| *x == 0.0),
            MinkowskiNorm::Custom(c) => c.reversible,
        }
    }

    /// Structural checks: symmetric positive-definite quadratics, `‖b‖ < 1`.
    pub fn validate(&self) -> Result<()> {
        let spd = |q: &DMatrix<f64>| -> Result<()> {
            if !q.is_square() {
                return Err(Error::InvalidParameter("quadratic form must be square".into()));
            }
            if (q - q.transpose()).amax() > 1e-12 * q.amax().max(1.0) {
                return Err(Error::InvalidParameter("quadratic form must be symmetric".into()));
            }
            if min_eigenvalue(q) <= 0.0 {
                return Err(Error::InvalidParameter("quadratic form must be positive definite".into()));
            }
            Ok(())
        };
        match self {
            MinkowskiNorm::Quadratic { q } => spd(q),
            MinkowskiNorm::Randers { q, b } => {
                spd(q)?;
                if b.len() != q.nrows() {
                    return Err(Error::DimensionMismatch { expected: q.nrows(), found: b.len() });
                }
                let qi = q.clone().try_inverse().ok_or(Error::GramNotPositive)?;
                let bn = quad(&qi, b, b).sqrt();
                if bn >= 1.0 {
                    return Err(Error::InvalidParameter(format!("Randers drift must satisfy ‖b‖ < 1, got {bn:.6}")));
                }
                Ok(())
            }
            MinkowskiNorm::Quartic { weights, quadratics } => {
                if weights.len() != quadratics.len() || quadratics.is_empty() {
                    return Err(Error::InvalidParameter("quartic needs one weight per quadratic".into()));
                }
                if weights.iter().any(|w| !(*w >= 0.0)) || weights.iter().all(|w| *w == 0.0) {
                    return Err(Error::InvalidParameter("quartic weights must be nonnegative and not all zero".into()));
                }
                let n = quadratics[0].nrows();
                for q in quadratics {
                    if q.nrows() != n {
                        return Err(Error::DimensionMismatch { expected: n, found: q.nrows() });
                    }
                    spd(q)?;
                }
                Ok(())
            }
            MinkowskiNorm::Custom(_) => Ok(()),
        }
    }

    fn check_dim(&self, y: &DVector<f64>) -> Result<()> {
        if y.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: y.len() });
        }
        Ok(())
    }

    pub fn evaluate(&self, y: &DVector<f64>) -> f64 {
        if y.iter().all(|x| *x == 0.0) {
            return 0.0;
        }
        match self {
            MinkowskiNorm::Quadratic { q } => quad(q, y, y).sqrt(),
            MinkowskiNorm::Randers { q, b } => quad(q, y, y).sqrt() + b.dot(y),
            MinkowskiNorm::Quartic { weights, quadratics } => {
                let s: f64 = weights.iter().zip(quadratics).map(|(w, q)| w * quad(q, y, y).powi(2)).sum();
                s.sqrt().sqrt()
            }
            MinkowskiNorm::Custom(c) => (c.f)(y),
        }
    }

    /// Hessian Gram matrix `g_y = ½ Hess(F²)` over the standard basis.
    pub fn hessian(&self, y: &DVector<f64>) -> Result<HessianInner> {
        self.check_dim(y)?;
        if y.iter().all(|x| *x == 0.0) {
            return Err(Error::HessianAtOrigin);
        }
        let gram = match self {
            MinkowskiNorm::Quadratic { q } => q.clone(),
            MinkowskiNorm::Randers { q, b } => {
                let alpha = quad(q, y, y).sqrt();
                let f = alpha + b.dot(y);
                let l = (q * y) / alpha;
                let p = q - &l * l.transpose();
                let m = &l + b;
                p * (f / alpha) + &m * m.transpose()
            }
            MinkowskiNorm::Quartic { weights, quadratics } => {
                let (s, r, j) = quartic_parts(weights, quadratics, y);
                j / s.sqrt() - (&r * r.transpose()) * (2.0 / s.powf(1.5))
            }
            MinkowskiNorm::Custom(c) => fd_hessian(&c.f, y),
        };
        Ok(HessianInner { y: y.clone(), gram })
    }

    pub fn g_inner(&self, y: &DVector<f64>, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
        Ok(self.hessian(y)?.inner(u, v))
    }

    /// `C_y(u,v,w) = ¼ D³F²(y)[u,v,w]`.
    pub fn cartan(&self, y: &DVector<f64>, u: &DVector<f64>, v: &DVector<f64>, w: &DVector<f64>) -> Result<f64> {
        self.check_dim(y)?;
        if y.iter().all(|x| *x == 0.0) {
            return Err(Error::HessianAtOrigin);
        }
        Ok(match self {
            MinkowskiNorm::Quadratic { .. } => 0.0,
            MinkowskiNorm::Randers { q, b } => {
                let alpha = quad(q, y, y).sqrt();
                let beta = b.dot(y);
                let l = (q * y) / alpha;
                let p = b - &l * (beta / alpha);
                let pm = q - &l * l.transpose();
                (quad(&pm, u, v) * p.dot(w) + quad(&pm, u, w) * p.dot(v) + quad(&pm, v, w) * p.dot(u)) / (2.0 * alpha)
            }
            MinkowskiNorm::Quartic { weights, quadratics } => {
                let (s, r, j) = quartic_parts(weights, quadratics, y);
                let (ru, rv, rw) = (r.dot(u), r.dot(v), r.dot(w));
                let t1 = -2.0 / s.powf(1.5) * (rw * quad(&j, u, v) + rv * quad(&j, u, w) + ru * quad(&j, v, w));
                let t2 = 12.0 / s.powf(2.5) * ru * rv * rw;
                let mut t3 = 0.0;
                for (wm, qm) in weights.iter().zip(quadratics) {
                    let sm = qm * y;
                    t3 += wm * (sm.dot(w) * quad(qm, u, v) + sm.dot(v) * quad(qm, u, w) + sm.dot(u) * quad(qm, v, w));
                }
                0.5 * (t1 + t2 + 2.0 / s.sqrt() * t3)
            }
            MinkowskiNorm::Custom(c) => {
                let h = FD_THIRD * y.norm();
                0.5 * richardson(h, |t| quad(&fd_hessian(&c.f, &(y + w * t)), u, v))
            }
        })
    }

    pub fn cartan_tensor(&self, y: &DVector<f64>) -> Result<CartanTensorValue> {
        let n = self.dim();
        let e = |i: usize| {
            let mut x = DVector::zeros(n);
            x[i] = 1.0;
            x
        };
        let mut values = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    values.push(self.cartan(y, &e(i), &e(j), &e(k))?);
                }
            }
        }
        Ok(CartanTensorValue { y: y.clone(), dim: n, values })
    }

    /// Smallest eigenvalue of `g_y`.
    pub fn min_gram_eigenvalue(&self, y: &DVector<f64>) -> Result<f64> {
        Ok(min_eigenvalue(&self.hessian(y)?.gram))
    }

    pub fn scaled(&self, lambda: f64) -> MinkowskiNorm {
        match self {
            MinkowskiNorm::Quadratic { q } => MinkowskiNorm::Quadratic { q: q * (lambda * lambda) },
            MinkowskiNorm::Randers { q, b } => MinkowskiNorm::Randers { q: q * (lambda * lambda), b: b * lambda },
            MinkowskiNorm::Quartic { weights, quadratics } => MinkowskiNorm::Quartic {
                weights: weights.clone(),
                quadratics: quadratics.iter().map(|q| q * (lambda * lambda)).collect(),
            },
            MinkowskiNorm::Custom(c) => {
                let f = c.f.clone();
                MinkowskiNorm::Custom(CustomNorm { dim: c.dim, reversible: c.reversible, f: Arc::new(move |y| lambda * f(y)) })
            }
        }
    }
}

fn quartic_parts(weights: &[f64], quadratics: &[DMatrix<f64>], y: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
    let n = y.len();
    let mut s = 0.0;
    let mut r = DVector::zeros(n);
    let mut j = DMatrix::zeros(n, n);
    for (w, q) in weights.iter().zip(quadratics) {
        let qy = q * y;
        let qk = y.dot(&qy);
        s += w * qk * qk;
        r += &qy * (w * qk);
        j += q * (w * qk) + (&qy * qy.transpose()) * (2.0 * w);
    }
    (s, r, j)
}

/// `½ Hess(F²)` by nested central differences.
fn fd_hessian(f: &NormFn, y: &DVector<f64>) -> DMatrix<f64> {
    let n = y.len();
    let h = FD_SECOND * y.norm();
    let f2 = |x: &DVector<f64>| {
        let v = f(x);
        v * v
    };
    let e = |i: usize| {
        let mut x = DVector::zeros(n);
        x[i] = 1.0;
        x
    };
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let (ei, ej) = (e(i), e(j));
            let mixed = |h: f64| {
                (f2(&(y + &ei * h + &ej * h)) - f2(&(y + &ei * h - &ej * h)) - f2(&(y - &ei * h + &ej * h))
                    + f2(&(y - &ei * h - &ej * h)))
                    / (4.0 * h * h)
            };
            let (d1, d2) = (mixed(h), mixed(h / 2.0));
            let v = 0.5 * (4.0 * d2 - d1) / 3.0;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// Directional derivative of `F²/2` by central differences (first-order step).
pub fn fd_legendre(norm: &MinkowskiNorm, y: &DVector<f64>, u: &DVector<f64>) -> f64 {
    let h = FD_FIRST * y.norm();
    richardson(h, |t| {
        let v = norm.evaluate(&(y + u * t));
        0.5 * v * v
    })
}

/// FD Hessian of `F²/2` for any norm; used as an oracle for the closed forms.
pub fn fd_gram(norm: &MinkowskiNorm, y: &DVector<f64>) -> DMatrix<f64> {
    let n = norm.clone();
    let f: NormFn = Arc::new(move |x| n.evaluate(x));
    fd_hessian(&f, y)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub samples: usize,
    pub max_residual: f64,
    /// True when the residual exceeds the 1e−6 flag threshold.
    pub flagged: bool,
}

/// Checks `⟨[h,u],v⟩_y + ⟨u,[h,v]⟩_y + 2C_y([h,y],u,v) = 0` over the h-basis
/// and random `y, u, v`.
pub fn check_invariance(norm: &MinkowskiNorm, space: &CosetSpace, seed: u64, samples: usize) -> Result<InvarianceReport> {
    let n = space.dim_m();
    if norm.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: norm.dim() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rand_unit = |rng: &mut ChaCha8Rng| DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0)).normalize();
    let mut worst = 0.0f64;
    let mut count = 0;
    for _ in 0..samples {
        let y = rand_unit(&mut rng);
        let u = rand_unit(&mut rng);
        let v = rand_unit(&mut rng);
        let g = norm.hessian(&y)?;
        for a in &space.ad_h {
            let r = g.inner(&(a * &u), &v) + g.inner(&u, &(a * &v)) + 2.0 * norm.cartan(&y, &(a * &y), &u, &v)?;
            worst = worst.max(r.abs());
            count += 1;
        }
    }
    Ok(InvarianceReport { samples: count, max_residual: worst, flagged: worst > 1e-6 })
}

/// Basis of symmetric forms `Q` on m with `AᵀQ + QA = 0` for every `ad(h)`.
pub fn invariant_quadratics(space: &CosetSpace) -> Vec<DMatrix<f64>> {
    let n = space.dim_m();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
    let nu = pairs.len();
    let sym = |k: usize| {
        let (a, b) = pairs[k];
        let mut e = DMatrix::zeros(n, n);
        e[(a, b)] = 1.0;
        e[(b, a)] = 1.0;
        e
    };
    let mut normal = DMatrix::<f64>::zeros(nu, nu);
    for a in &space.ad_h {
        let cols: Vec<DVector<f64>> = (0..nu)
            .map(|k| {
                let e = sym(k);
                let img = a.transpose() * &e + &e * a;
                DVector::from_iterator(n * n, img.iter().copied())
            })
            .collect();
        let l = DMatrix::from_columns(&cols);
        normal += l.transpose() * l;
    }
    let eig = SymmetricEigen::new(normal);
    let top = eig.eigenvalues.iter().copied().fold(0.0f64, f64::max).max(1.0);
    let mut out = Vec::new();
    for (k, ev) in eig.eigenvalues.iter().enumerate() {
        if *ev < 1e-12 * top {
            let c = eig.eigenvectors.column(k);
            let mut q = DMatrix::zeros(n, n);
            for (idx, &(a, b)) in pairs.iter().enumerate() {
                q[(a, b)] += c[idx];
                if a != b {
                    q[(b, a)] += c[idx];
                }
            }
            out.push(q);
        }
    }
    out
}

/// Largest `|⟨x, y⟩_u|` over unit basis vectors `x`, `y` of distinct hat
/// blocks; `u` should lie in `ĝ₀ ∩ m`.
pub fn hat_orthogonality_residual(space: &CosetSpace, norm: &MinkowskiNorm, u: &DVector<f64>) -> Result<f64> {
    let g = norm.hessian(u)?.gram;
    let mut worst = 0.0f64;
    for a in &space.hat.blocks {
        for b in &space.hat.blocks {
            if a.key != b.key {
                for i in a.range.clone() {
                    for j in b.range.clone() {
                        worst = worst.max(g[(i, j)].abs());
                    }
                }
            }
        }
    }
    Ok(worst)
}

fn is_even_multiple(beta: &RootVector, alpha: &RootVector) -> bool {
    let (ba, aa) = (beta.dot(alpha), alpha.norm2());
    let Some(inv) = aa.inv() else { return false };
    let c = ba.clone() * inv;
    let parallel = beta.norm2() * aa == ba.clone() * ba;
    parallel && c.is_rational() && c.a.is_integer() && c.a.to_integer() % 2 == 0
}

/// Largest `|⟨x, z⟩_u|` for `x` in a hat block `m̂_{±β'}` with `β'` not an
/// even multiple of `α'` and `z ∈ ĝ₀ ∩ m`, where `u` lies in the block
/// `m̂_{±α'}` with index `block`. Vanishes for reversible invariant norms.
pub fn reversible_orthogonality_residual(space: &CosetSpace, norm: &MinkowskiNorm, block: usize, u: &DVector<f64>) -> Result<f64> {
    let alpha = &space.hat.blocks[block].key;
    if alpha.is_zero() {
        return Err(Error::Hypothesis("u must lie in a hat block with α' ≠ 0".into()));
    }
    let g = norm.hessian(u)?.gram;
    let zero = space.hat.zero_block().range.clone();
    let mut worst = 0.0f64;
    for b in space.hat.blocks.iter().filter(|b| !b.is_zero_block() && !is_even_multiple(&b.key, alpha)) {
        for i in b.range.clone() {
            for j in zero.clone() {
                worst = worst.max(g[(i, j)].abs());
            }
        }
    }
    Ok(worst)
}

/// Basis of the vectors of m fixed by every `ad(h)`.
pub fn invariant_vectors(space: &CosetSpace) -> Vec<DVector<f64>> {
    let n = space.dim_m();
    if space.ad_h.is_empty() {
        return (0..n).map(|i| DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 })).collect();
    }
    let stacked = DMatrix::from_fn(n * space.ad_h.len(), n, |r, c| space.ad_h[r / n][(r % n, c)]);
    crate::numeric::nullspace(&stacked, 1e-10)
}

/// Invariant Randers norm `sqrt(yᵀQy) + b·y` with `Q` drawn like
/// [`random_invariant_norm`] and `‖b‖_Q⁻¹ = drift` along a random invariant
/// direction; `b = 0` when m has no invariant vectors.
pub fn random_invariant_randers(space: &CosetSpace, seed: u64, drift: f64) -> Result<MinkowskiNorm> {
    if !(0.0..1.0).contains(&drift) {
        return Err(Error::InvalidParameter(format!("Randers drift must lie in [0, 1), got {drift}")));
    }
    let n = space.dim_m();
    let MinkowskiNorm::Quartic { quadratics, .. } = random_invariant_norm(space, seed) else { unreachable!() };
    let q = quadratics[0].clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb0b);
    let mut b = DVector::zeros(n);
    for v in invariant_vectors(space) {
        b += v * rng.gen_range(-1.0..1.0);
    }
    let qi = q.clone().try_inverse().ok_or_else(|| Error::InvalidParameter("singular quadratic".into()))?;
    let len = b.dot(&(&qi * &b)).sqrt();
    if len > 1e-12 {
        b *= drift / len;
    }
    let norm = MinkowskiNorm::Randers { q, b };
    norm.validate()?;
    Ok(norm)
}

/// Reversible Quartic from random positive combinations of Ad(H)-invariant
/// quadratics; deterministic in `seed`.
pub fn random_invariant_norm(space: &CosetSpace, seed: u64) -> MinkowskiNorm {
    let n = space.dim_m();
    let basis = invariant_quadratics(space);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.gen_range(2..=3);
    let mut weights = Vec::new();
    let mut quadratics = Vec::new();
    for _ in 0..count {
        let mut r = DMatrix::zeros(n, n);
        for b in &basis {
            r += b * rng.gen_range(-1.0..1.0);
        }
        let scale = r.norm();
        if scale > 0.0 {
            r /= scale;
        }
        let mut eps = 0.9;
        let q = loop {
            let q = DMatrix::identity(n, n) + &r * eps;
            if min_eigenvalue(&q) > 0.2 {
                break q;
            }
            eps *= 0.5;
        };
        weights.push(rng.gen_range(0.5..1.5));
        quadratics.push((&q + q.transpose()) * 0.5);
    }
    MinkowskiNorm::Quartic { weights, quadratics }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset::parse_preset;

    fn rand_vec(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
        DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
    }

    fn rand_spd(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
        let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        &a * a.transpose() + DMatrix::identity(n, n) * 0.5
    }

    fn samples() -> Vec<MinkowskiNorm> {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 4;
        let q = rand_spd(&mut rng, n);
        let qi = q.clone().try_inverse().unwrap();
        let mut b = rand_vec(&mut rng, n);
        b *= 0.6 / quad(&qi, &b, &b).sqrt();
        vec![
            MinkowskiNorm::Quadratic { q: q.clone() },
            MinkowskiNorm::Randers { q: q.clone(), b },
            MinkowskiNorm::Quartic { weights: vec![0.7, 1.3], quadratics: vec![q, rand_spd(&mut rng, n)] },
        ]
    }

    #[test]
    fn evaluation_examples() {
        let y = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        assert!((MinkowskiNorm::quadratic_identity(3).evaluate(&y) - 1.0).abs() < 1e-15);
        let r = MinkowskiNorm::Randers { q: DMatrix::identity(3, 3), b: DVector::from_vec(vec![0.2, 0.3, 0.0]) };
        assert!((r.evaluate(&y) - 1.2).abs() < 1e-15);
        let qt = MinkowskiNorm::Quartic { weights: vec![1.0, 1.0], quadratics: vec![DMatrix::identity(3, 3); 2] };
        assert!((qt.evaluate(&y) - 2f64.powf(0.25)).abs() < 1e-15);
        assert_eq!(qt.evaluate(&DVector::zeros(3)), 0.0);
    }

    #[test]
    fn homogeneity_and_euler_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for f in samples() {
            for _ in 0..20 {
                let y = rand_vec(&mut rng, 4);
                let fy = f.evaluate(&y);
                for l in [0.5, 2.0, 10.0] {
                    assert!((f.evaluate(&(&y * l)) - l * fy).abs() < 1e-12 * l * fy);
                }
                let g = f.g_inner(&y, &y, &y).unwrap();
                assert!((g - fy * fy).abs() < 1e-10 * fy * fy, "{}", f.family());
            }
        }
    }

    #[test]
    fn closed_forms_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for f in samples() {
            for _ in 0..10 {
                let y = rand_vec(&mut rng, 4);
                let g = f.hessian(&y).unwrap().gram;
                let fd = fd_gram(&f, &y);
                let rel = (&g - &fd).amax() / g.amax();
                assert!(rel < 1e-7, "{} rel {rel}", f.family());
            }
        }
    }

    #[test]
    fn cartan_tensor_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for f in samples() {
            let y = rand_vec(&mut rng, 4);
            let (u, v, w) = (rand_vec(&mut rng, 4), rand_vec(&mut rng, 4), rand_vec(&mut rng, 4));
            // C_y(y, ., .) = 0
            assert!(f.cartan(&y, &y, &v, &w).unwrap().abs() < 1e-12);
            let base = f.cartan(&y, &u, &v, &w).unwrap();
            for (a, b, c) in [(&u, &w, &v), (&v, &u, &w), (&v, &w, &u), (&w, &u, &v), (&w, &v, &u)] {
                assert!((f.cartan(&y, a, b, c).unwrap() - base).abs() < 1e-8);
            }
            // half the directional derivative of g
            let h = 1e-4;
            let d = (f.g_inner(&(&y + &w * h), &u, &v).unwrap() - f.g_inner(&(&y - &w * h), &u, &v).unwrap()) / (2.0 * h);
            assert!((0.5 * d - base).abs() < 1e-6, "{}", f.family());
            if let MinkowskiNorm::Quadratic { .. } = f {
                assert_eq!(base, 0.0);
            }
        }
    }

    #[test]
    fn custom_norm_uses_finite_differences() {
        let q = samples().remove(2);
        let inner = q.clone();
        let custom = MinkowskiNorm::Custom(CustomNorm { dim: 4, reversible: true, f: Arc::new(move |y| inner.evaluate(y)) });
        let y = DVector::from_vec(vec![0.3, -0.8, 0.5, 0.1]);
        let (u, v) = (DVector::from_vec(vec![1.0, 0.0, 0.5, 0.0]), DVector::from_vec(vec![0.0, 1.0, 0.0, -1.0]));
        let a = q.g_inner(&y, &u, &v).unwrap();
        let b = custom.g_inner(&y, &u, &v).unwrap();
        assert!((a - b).abs() < 1e-7 * a.abs().max(1.0));
        let c1 = q.cartan(&y, &u, &v, &u).unwrap();
        let c2 = custom.cartan(&y, &u, &v, &u).unwrap();
        assert!((c1 - c2).abs() < 1e-5);
        let l = fd_legendre(&q, &y, &u);
        assert!((l - q.g_inner(&y, &y, &u).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn hessian_at_origin_errors() {
        let f = MinkowskiNorm::quadratic_identity(2);
        assert_eq!(f.hessian(&DVector::zeros(2)).unwrap_err(), Error::HessianAtOrigin);
    }

    #[test]
    fn validation_and_reversibility() {
        let r = MinkowskiNorm::Randers { q: DMatrix::identity(2, 2), b: DVector::from_vec(vec![1.0, 0.0]) };
        assert!(r.validate().is_err());
        let s = samples();
        assert!(s[0].is_reversible() && !s[1].is_reversible() && s[2].is_reversible());
        let y = DVector::from_vec(vec![0.1, 0.2, -0.3, 0.4]);
        assert_eq!(s[2].evaluate(&y), s[2].evaluate(&-&y));
        assert_ne!(s[1].evaluate(&y), s[1].evaluate(&-&y));
    }

    #[test]
    fn json_round_trip() {
        let f = samples().remove(2);
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.contains("\"family\":\"quartic\""));
        let back: MinkowskiNorm = serde_json::from_str(&text).unwrap();
        let y = DVector::from_vec(vec![0.1, 0.2, -0.3, 0.4]);
        assert_eq!(back.evaluate(&y), f.evaluate(&y));
        assert!(serde_json::from_str::<MinkowskiNorm>(r#"{"family":"randers","q":[[1,0],[0,1]],"b":[2,0]}"#).is_err());
    }

    #[test]
    fn invariance_on_presets() {
        let s = parse_preset("sphere_un(3)").unwrap();
        let id = MinkowskiNorm::quadratic_identity(s.dim_m());
        assert!(check_invariance(&id, &s, 1, 5).unwrap().max_residual < 1e-9);
        let f = random_invariant_norm(&s, 42);
        assert!(f.is_reversible());
        let rep = check_invariance(&f, &s, 2, 10).unwrap();
        assert!(rep.max_residual < 1e-7, "{rep:?}");
        let again = random_invariant_norm(&s, 42);
        assert_eq!(serde_json::to_string(&f).unwrap(), serde_json::to_string(&again).unwrap());
        // break invariance with a quadratic coupling the first basis vector to the last
        let n = s.dim_m();
        let mut q = DMatrix::identity(n, n);
        q[(0, n - 1)] = 0.4;
        q[(n - 1, 0)] = 0.4;
        q[(0, 0)] = 2.0;
        let bad = MinkowskiNorm::Quartic { weights: vec![1.0], quadratics: vec![q] };
        assert!(check_invariance(&bad, &s, 3, 5).unwrap().flagged);
    }

    fn point_in(s: &CosetSpace, range: std::ops::Range<usize>, rng: &mut ChaCha8Rng) -> DVector<f64> {
        let mut u = DVector::zeros(s.dim_m());
        for i in range {
            u[i] = rng.gen_range(-1.0..1.0);
        }
        u
    }

    #[test]
    fn hat_blocks_are_orthogonal_at_zero_block_points() {
        for name in ["sphere_un(3)", "bn_excluded_subcase1(3)", "berger_sp2"] {
            let s = parse_preset(name).unwrap();
            let f = random_invariant_norm(&s, 7);
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            let u = point_in(&s, s.hat.zero_block().range.clone(), &mut rng);
            assert!(hat_orthogonality_residual(&s, &f, &u).unwrap() < 1e-7, "{name}");
        }
    }

    #[test]
    fn reversible_norms_separate_odd_blocks_from_zero_block() {
        for name in ["sphere_un(3)", "bn_excluded_subcase1(2)", "cn_excluded_subcase1(2)", "berger_sp2", "a1a1_diagonal(2)"] {
            let s = parse_preset(name).unwrap();
            let f = random_invariant_norm(&s, 3);
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            for (k, b) in s.hat.blocks.iter().enumerate().skip(1) {
                let u = point_in(&s, b.range.clone(), &mut rng);
                if u.norm() == 0.0 {
                    continue;
                }
                assert!(reversible_orthogonality_residual(&s, &f, k, &u).unwrap() < 1e-7, "{name} block {k}");
            }
        }
        let s = parse_preset("sphere_un(3)").unwrap();
        let u = DVector::from_element(s.dim_m(), 1.0);
        assert!(reversible_orthogonality_residual(&s, &MinkowskiNorm::quadratic_identity(s.dim_m()), 0, &u).is_err());
    }

    #[test]
    fn invariant_randers() {
        let s = parse_preset("sphere_un(3)").unwrap();
        assert_eq!(invariant_vectors(&s).len(), 1);
        let f = random_invariant_randers(&s, 4, 0.3).unwrap();
        assert!(!f.is_reversible());
        assert!(!check_invariance(&f, &s, 4, 5).unwrap().flagged);
        assert!(random_invariant_randers(&s, 4, 1.0).is_err());

        let so = parse_preset("sphere_so2n(3)").unwrap();
        assert!(invariant_vectors(&so).is_empty());
        assert!(random_invariant_randers(&so, 4, 0.3).unwrap().is_reversible());
    }
}
