//! Matrix realizations of the classical compact Lie algebras.
//!
//! `su(n+1)` uses complex matrices, `so(m)` real ones and `sp(n)` native
//! quaternionic matrices. Every realized algebra also carries an orthonormal
//! basis and its structure constants, so later stages can work in coordinates.

mod quaternion;

use nalgebra::{Complex, DMatrix, DVector};
use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qnum::Rational;
use crate::rootsys::{build_root_system_any_rank, Family, RootSystem, RootVector};

pub use quaternion::{QuatMatrix, Quaternion};

pub type C64 = Complex<f64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BlockRepr", into = "BlockRepr")]
pub enum Block {
    Real(DMatrix<f64>),
    Complex(DMatrix<C64>),
    Quaternion(QuatMatrix),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum BlockRepr {
    Real(Vec<Vec<f64>>),
    Complex(Vec<Vec<[f64; 2]>>),
    Quaternion(Vec<Vec<[f64; 4]>>),
}

fn square_rows<T>(rows: &[Vec<T>]) -> std::result::Result<usize, String> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err("matrix block must be square".into());
    }
    Ok(n)
}

impl TryFrom<BlockRepr> for Block {
    type Error = String;
    fn try_from(r: BlockRepr) -> std::result::Result<Self, String> {
        Ok(match r {
            BlockRepr::Real(rows) => {
                let n = square_rows(&rows)?;
                Block::Real(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
            }
            BlockRepr::Complex(rows) => {
                let n = square_rows(&rows)?;
                Block::Complex(DMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
            }
            BlockRepr::Quaternion(rows) => {
                let n = square_rows(&rows)?;
                let mut m = QuatMatrix::zeros(n);
                for i in 0..n {
                    for j in 0..n {
                        let [w, x, y, z] = rows[i][j];
                        m[(i, j)] = Quaternion::new(w, x, y, z);
                    }
                }
                Block::Quaternion(m)
            }
        })
    }
}

impl From<Block> for BlockRepr {
    fn from(b: Block) -> BlockRepr {
        match b {
            Block::Real(m) => BlockRepr::Real((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()),
            Block::Complex(m) => BlockRepr::Complex(
                (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect(),
            ),
            Block::Quaternion(m) => BlockRepr::Quaternion(
                (0..m.n)
                    .map(|i| {
                        (0..m.n)
                            .map(|j| {
                                let q = m[(i, j)];
                                [q.w, q.x, q.y, q.z]
                            })
                            .collect()
                    })
                    .collect(),
            ),
        }
    }
}

impl Block {
    fn zeros(family: Family, rank: usize) -> Block {
        let n = matrix_size(family, rank);
        match family {
            Family::A => Block::Complex(DMatrix::zeros(n, n)),
            Family::C => Block::Quaternion(QuatMatrix::zeros(n)),
            _ => Block::Real(DMatrix::zeros(n, n)),
        }
    }

    fn same_shape(&self, o: &Block) -> bool {
        match (self, o) {
            (Block::Real(a), Block::Real(b)) => a.shape() == b.shape(),
            (Block::Complex(a), Block::Complex(b)) => a.shape() == b.shape(),
            (Block::Quaternion(a), Block::Quaternion(b)) => a.n == b.n,
            _ => false,
        }
    }

    fn commutator(&self, o: &Block) -> Block {
        match (self, o) {
            (Block::Real(a), Block::Real(b)) => Block::Real(a * b - b * a),
            (Block::Complex(a), Block::Complex(b)) => Block::Complex(a * b - b * a),
            (Block::Quaternion(a), Block::Quaternion(b)) => Block::Quaternion(a.mul(b).sub(&b.mul(a))),
            _ => unreachable!("shape checked by caller"),
        }
    }

    fn combine(&self, o: &Block, ka: f64, kb: f64) -> Block {
        match (self, o) {
            (Block::Real(a), Block::Real(b)) => Block::Real(a * ka + b * kb),
            (Block::Complex(a), Block::Complex(b)) => {
                Block::Complex(a.map(|z| z * ka) + b.map(|z| z * kb))
            }
            (Block::Quaternion(a), Block::Quaternion(b)) => Block::Quaternion(a.scale(ka).add(&b.scale(kb))),
            _ => unreachable!("shape checked by caller"),
        }
    }

    /// `−Re tr(xy)`.
    fn trace_form(&self, o: &Block) -> f64 {
        match (self, o) {
            (Block::Real(a), Block::Real(b)) => -a.component_mul(&b.transpose()).sum(),
            (Block::Complex(a), Block::Complex(b)) => -a.component_mul(&b.transpose()).sum().re,
            (Block::Quaternion(a), Block::Quaternion(b)) => -a.mul(b).re_trace(),
            _ => unreachable!("shape checked by caller"),
        }
    }

    fn frob2(&self) -> f64 {
        match self {
            Block::Real(a) => a.norm_squared(),
            Block::Complex(a) => a.norm_squared(),
            Block::Quaternion(a) => a.norm2(),
        }
    }

    /// Distance from the skew-Hermitian (and, for complex blocks, traceless) subspace.
    fn structure_residual(&self) -> f64 {
        match self {
            Block::Real(a) => (a + a.transpose()).norm(),
            Block::Complex(a) => (a + a.adjoint()).norm() + a.trace().norm(),
            Block::Quaternion(a) => a.add(&a.adjoint()).norm2().sqrt(),
        }
    }
}

pub fn matrix_size(family: Family, rank: usize) -> usize {
    match family {
        Family::A => rank + 1,
        Family::B => 2 * rank + 1,
        Family::C => rank,
        Family::D => 2 * rank,
        _ => 0,
    }
}

/// Ratio between the trace form on Cartan generators and the Euclidean
/// product of root coordinates.
pub fn cartan_kappa(family: Family) -> i128 {
    match family {
        Family::B | Family::D => 2,
        _ => 1,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorSpec {
    pub family: Family,
    pub rank: usize,
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub factors: Vec<FactorSpec>,
    #[serde(default)]
    pub abelian_dim: usize,
}

impl AlgebraSpec {
    pub fn simple(family: Family, rank: usize) -> Self {
        AlgebraSpec { factors: vec![FactorSpec { family, rank, scale: 1.0 }], abelian_dim: 0 }
    }

    pub fn with_abelian(mut self, dim: usize) -> Self {
        self.abelian_dim = dim;
        self
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement {
            blocks: self.factors.iter().map(|f| Block::zeros(f.family, f.rank)).collect(),
            abelian: vec![0.0; self.abelian_dim],
        }
    }

    fn check(&self, x: &AlgebraElement) -> Result<()> {
        if x.blocks.len() != self.factors.len() || x.abelian.len() != self.abelian_dim {
            return Err(Error::SpecMismatch);
        }
        for (b, f) in x.blocks.iter().zip(&self.factors) {
            if !b.same_shape(&Block::zeros(f.family, f.rank)) {
                return Err(Error::SpecMismatch);
            }
        }
        Ok(())
    }

    /// Bi-invariant inner product: scaled `−Re tr` per factor plus the
    /// Euclidean product on the abelian part.
    pub fn inner(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        let mut s = 0.0;
        for ((a, b), f) in x.blocks.iter().zip(&y.blocks).zip(&self.factors) {
            s += f.scale * a.trace_form(b);
        }
        s += x.abelian.iter().zip(&y.abelian).map(|(a, b)| a * b).sum::<f64>();
        Ok(s)
    }

    /// Ambient coordinate count of exact Cartan vectors (factor blocks, then abelian).
    pub fn ambient_dim(&self) -> usize {
        self.factors.iter().map(|f| f.family.ambient_dim(f.rank)).sum::<usize>() + self.abelian_dim
    }

    pub fn rank(&self) -> usize {
        self.factors.iter().map(|f| f.rank).sum::<usize>() + self.abelian_dim
    }

    pub fn factor_offsets(&self) -> Vec<usize> {
        let mut off = 0;
        let mut out = Vec::new();
        for f in &self.factors {
            out.push(off);
            off += f.family.ambient_dim(f.rank);
        }
        out.push(off);
        out
    }

    /// Exact weights of the Cartan metric in ambient coordinates.
    pub fn ambient_weights(&self) -> Vec<Rational> {
        let mut w = Vec::new();
        for f in &self.factors {
            let s = Ratio::<i128>::approximate_float(f.scale).unwrap_or_else(|| Rational::from_integer(1));
            let k = s * Rational::from_integer(cartan_kappa(f.family));
            w.extend(std::iter::repeat(k).take(f.family.ambient_dim(f.rank)));
        }
        w.extend(std::iter::repeat(Rational::from_integer(1)).take(self.abelian_dim));
        w
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraElement {
    pub blocks: Vec<Block>,
    #[serde(default)]
    pub abelian: Vec<f64>,
}

impl AlgebraElement {
    pub fn combine(&self, o: &AlgebraElement, ka: f64, kb: f64) -> AlgebraElement {
        AlgebraElement {
            blocks: self.blocks.iter().zip(&o.blocks).map(|(a, b)| a.combine(b, ka, kb)).collect(),
            abelian: self.abelian.iter().zip(&o.abelian).map(|(a, b)| ka * a + kb * b).collect(),
        }
    }

    pub fn add(&self, o: &AlgebraElement) -> AlgebraElement {
        self.combine(o, 1.0, 1.0)
    }

    pub fn sub(&self, o: &AlgebraElement) -> AlgebraElement {
        self.combine(o, 1.0, -1.0)
    }

    pub fn scale(&self, k: f64) -> AlgebraElement {
        self.combine(self, k, 0.0)
    }

    /// Frobenius-type size, used for residuals.
    pub fn frob_norm(&self) -> f64 {
        (self.blocks.iter().map(Block::frob2).sum::<f64>() + self.abelian.iter().map(|x| x * x).sum::<f64>()).sqrt()
    }

    pub fn structure_residual(&self) -> f64 {
        self.blocks.iter().map(Block::structure_residual).sum()
    }
}

pub fn bracket(x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
    if x.blocks.len() != y.blocks.len()
        || x.abelian.len() != y.abelian.len()
        || x.blocks.iter().zip(&y.blocks).any(|(a, b)| !a.same_shape(b))
    {
        return Err(Error::SpecMismatch);
    }
    Ok(AlgebraElement {
        blocks: x.blocks.iter().zip(&y.blocks).map(|(a, b)| a.commutator(b)).collect(),
        abelian: vec![0.0; x.abelian.len()],
    })
}

#[derive(Clone, Debug)]
pub struct RootPlanePair {
    pub factor: usize,
    /// Root in the factor's own coordinates.
    pub root: RootVector,
    /// Same root padded to the algebra's ambient coordinates.
    pub global_root: RootVector,
    pub basis: [AlgebraElement; 2],
    /// Positions of the two basis vectors in the algebra's orthonormal basis.
    pub coords: [usize; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    Cartan { factor: usize, index: usize },
    Plane { plane: usize, which: usize },
    Abelian { index: usize },
}

#[derive(Clone, Debug)]
pub struct RealizedFactor {
    pub family: Family,
    pub rank: usize,
    pub scale: f64,
    pub roots: RootSystem,
    /// Raw Cartan generators `e_i`, one per ambient coordinate.
    pub cartan_gens: Vec<AlgebraElement>,
    pub ambient_offset: usize,
}

#[derive(Clone, Debug)]
pub struct RealizedAlgebra {
    pub spec: AlgebraSpec,
    pub factors: Vec<RealizedFactor>,
    pub planes: Vec<RootPlanePair>,
    pub basis: Vec<AlgebraElement>,
    pub kinds: Vec<BasisKind>,
    /// `ad[i]` is the matrix of `ad(basis[i])` in the orthonormal basis.
    pub ad: Vec<DMatrix<f64>>,
}

fn real_unit(n: usize, terms: &[(usize, usize, f64)]) -> Block {
    let mut m = DMatrix::zeros(n, n);
    for &(i, j, c) in terms {
        m[(i - 1, j - 1)] += c;
    }
    Block::Real(m)
}

fn complex_unit(n: usize, terms: &[(usize, usize, C64)]) -> Block {
    let mut m = DMatrix::zeros(n, n);
    for &(i, j, c) in terms {
        m[(i - 1, j - 1)] += c;
    }
    Block::Complex(m)
}

fn quat_unit(n: usize, terms: &[(usize, usize, Quaternion)]) -> Block {
    let mut m = QuatMatrix::zeros(n);
    for &(i, j, q) in terms {
        m[(i - 1, j - 1)] = m[(i - 1, j - 1)] + q;
    }
    Block::Quaternion(m)
}

/// Root-plane spanning matrices for a positive root, transcribed from the
/// standard presentations of the classical algebras (indices 1-based).
fn plane_blocks(family: Family, rank: usize, root: &RootVector) -> [Block; 2] {
    let n = matrix_size(family, rank);
    let nz: Vec<(usize, i64)> = root
        .coords
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i + 1, x.a.to_integer() as i64))
        .collect();
    let i_ = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    match family {
        Family::A => {
            let (i, j) = (nz[0].0, nz[1].0);
            [
                complex_unit(n, &[(i, j, one), (j, i, -one)]),
                complex_unit(n, &[(i, j, i_), (j, i, i_)]),
            ]
        }
        Family::C => {
            let (q_i, q_j, q_k) = (Quaternion::I, Quaternion::J, Quaternion::K);
            if nz.len() == 1 {
                let i = nz[0].0;
                [quat_unit(n, &[(i, i, q_j)]), quat_unit(n, &[(i, i, q_k)])]
            } else {
                let (i, j) = (nz[0].0, nz[1].0);
                if nz[1].1 < 0 {
                    [
                        quat_unit(n, &[(i, j, Quaternion::ONE), (j, i, -Quaternion::ONE)]),
                        quat_unit(n, &[(i, j, q_i), (j, i, q_i)]),
                    ]
                } else {
                    [quat_unit(n, &[(i, j, q_j), (j, i, q_j)]), quat_unit(n, &[(i, j, q_k), (j, i, q_k)])]
                }
            }
        }
        Family::B | Family::D => {
            // p(i), q(i): the two matrix indices carrying e_i
            let (p, q): (Box<dyn Fn(usize) -> usize>, Box<dyn Fn(usize) -> usize>) = if family == Family::B {
                (Box::new(|i| 2 * i), Box::new(|i| 2 * i + 1))
            } else {
                (Box::new(|i| 2 * i - 1), Box::new(|i| 2 * i))
            };
            if nz.len() == 1 {
                let i = nz[0].0;
                [
                    real_unit(n, &[(p(i), 1, 1.0), (1, p(i), -1.0)]),
                    real_unit(n, &[(q(i), 1, 1.0), (1, q(i), -1.0)]),
                ]
            } else {
                let (i, j) = (nz[0].0, nz[1].0);
                if nz[1].1 < 0 {
                    [
                        real_unit(n, &[(p(i), p(j), 1.0), (q(i), q(j), 1.0), (p(j), p(i), -1.0), (q(j), q(i), -1.0)]),
                        real_unit(n, &[(p(i), q(j), 1.0), (q(i), p(j), -1.0), (p(j), q(i), 1.0), (q(j), p(i), -1.0)]),
                    ]
                } else {
                    [
                        real_unit(n, &[(p(i), p(j), 1.0), (q(i), q(j), -1.0), (p(j), p(i), -1.0), (q(j), q(i), 1.0)]),
                        real_unit(n, &[(p(i), q(j), 1.0), (q(i), p(j), 1.0), (p(j), q(i), -1.0), (q(j), p(i), -1.0)]),
                    ]
                }
            }
        }
        _ => unreachable!("exceptional families have no matrix model"),
    }
}

fn cartan_block(family: Family, rank: usize, i: usize) -> Block {
    let n = matrix_size(family, rank);
    let i = i + 1;
    match family {
        Family::A => complex_unit(n, &[(i, i, C64::new(0.0, 1.0))]),
        Family::B => real_unit(n, &[(2 * i, 2 * i + 1, 1.0), (2 * i + 1, 2 * i, -1.0)]),
        Family::C => quat_unit(n, &[(i, i, Quaternion::I)]),
        Family::D => real_unit(n, &[(2 * i - 1, 2 * i, 1.0), (2 * i, 2 * i - 1, -1.0)]),
        _ => unreachable!(),
    }
}

impl RealizedAlgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn inner(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<f64> {
        self.spec.inner(x, y)
    }

    /// Matrix of a Cartan vector given in the factor's ambient coordinates.
    pub fn cartan_embed(&self, factor: usize, v: &RootVector) -> Result<AlgebraElement> {
        let f = self.factors.get(factor).ok_or(Error::SpecMismatch)?;
        let dim = f.family.ambient_dim(f.rank);
        if v.ambient_dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.ambient_dim() });
        }
        let v = if f.family == Family::A { v.sum_zero_part() } else { v.clone() };
        let mut x = self.spec.zero();
        for (i, c) in v.to_f64().into_iter().enumerate() {
            if c != 0.0 {
                x = x.add(&f.cartan_gens[i].scale(c));
            }
        }
        Ok(x)
    }

    /// Matrix of a Cartan vector in the algebra's full ambient coordinates.
    pub fn cartan_embed_global(&self, v: &RootVector) -> Result<AlgebraElement> {
        let total = self.spec.ambient_dim();
        if v.ambient_dim() != total {
            return Err(Error::DimensionMismatch { expected: total, found: v.ambient_dim() });
        }
        let offs = self.spec.factor_offsets();
        let mut x = self.spec.zero();
        for f in 0..self.factors.len() {
            let part = RootVector::new(v.coords[offs[f]..offs[f + 1]].to_vec());
            if !part.is_zero() {
                x = x.add(&self.cartan_embed(f, &part)?);
            }
        }
        for k in 0..self.spec.abelian_dim {
            x.abelian[k] = v.coords[offs[self.factors.len()] + k].to_f64();
        }
        Ok(x)
    }

    pub fn coords(&self, x: &AlgebraElement) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.basis.iter().map(|b| self.spec.inner(x, b).expect("same spec")))
    }

    pub fn element(&self, c: &DVector<f64>) -> AlgebraElement {
        let mut x = self.spec.zero();
        for (k, b) in self.basis.iter().enumerate() {
            if c[k] != 0.0 {
                x = x.add(&b.scale(c[k]));
            }
        }
        x
    }

    /// `ad(x)` in the orthonormal basis.
    pub fn ad_matrix(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (i, a) in self.ad.iter().enumerate() {
            if x[i] != 0.0 {
                m += a * x[i];
            }
        }
        m
    }

    pub fn bracket_coords(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let d = self.dim();
        let mut out = DVector::zeros(d);
        for (i, a) in self.ad.iter().enumerate() {
            if x[i] != 0.0 {
                out += (a * y) * x[i];
            }
        }
        out
    }

    /// Cartan vector (ambient coordinates) as algebra coordinates.
    pub fn cartan_coords(&self, v: &RootVector) -> Result<DVector<f64>> {
        Ok(self.coords(&self.cartan_embed_global(v)?))
    }

    pub fn random_coords<R: Rng>(&self, rng: &mut R) -> DVector<f64> {
        DVector::from_fn(self.dim(), |_, _| rng.gen_range(-1.0..1.0))
    }

    pub fn plane_of(&self, global_root: &RootVector) -> Option<usize> {
        let c = global_root.canonical_sign();
        self.planes.iter().position(|p| p.global_root == c)
    }
}

fn gram_schmidt_elements(spec: &AlgebraSpec, v: &mut [AlgebraElement]) {
    for k in 0..v.len() {
        for j in 0..k {
            let c = spec.inner(&v[k], &v[j]).unwrap();
            v[k] = v[k].combine(&v[j], 1.0, -c);
        }
        let n = spec.inner(&v[k], &v[k]).unwrap().sqrt();
        v[k] = v[k].scale(1.0 / n);
    }
}

pub fn realize(spec: &AlgebraSpec) -> Result<RealizedAlgebra> {
    for f in &spec.factors {
        if !f.family.is_classical() {
            return Err(Error::NoMatrixRealization(f.family.label(f.rank)));
        }
        if !(f.scale > 0.0) {
            return Err(Error::InvalidParameter(format!("factor scale must be positive, got {}", f.scale)));
        }
    }
    let offs = spec.factor_offsets();
    let total = spec.ambient_dim();
    let mut factors = Vec::new();
    let mut planes = Vec::new();
    let mut basis = Vec::new();
    let mut kinds = Vec::new();
    for (fi, f) in spec.factors.iter().enumerate() {
        let roots = build_root_system_any_rank(f.family, f.rank)?;
        let adim = f.family.ambient_dim(f.rank);
        let put = |b: Block| {
            let mut x = spec.zero();
            x.blocks[fi] = b;
            x
        };
        let cartan_gens: Vec<AlgebraElement> = (0..adim).map(|i| put(cartan_block(f.family, f.rank, i))).collect();
        // orthonormal Cartan basis
        let mut tb: Vec<AlgebraElement> = if f.family == Family::A {
            (0..f.rank).map(|i| cartan_gens[i].sub(&cartan_gens[i + 1])).collect()
        } else {
            cartan_gens.clone()
        };
        gram_schmidt_elements(spec, &mut tb);
        for (k, b) in tb.into_iter().enumerate() {
            kinds.push(BasisKind::Cartan { factor: fi, index: k });
            basis.push(b);
        }
        for r in roots.positive_roots() {
            let [b0, b1] = plane_blocks(f.family, f.rank, &r);
            let mut pb = [put(b0), put(b1)];
            gram_schmidt_elements(spec, &mut pb);
            let mut g = RootVector::zero(total);
            g.coords[offs[fi]..offs[fi] + adim].clone_from_slice(&r.coords);
            let idx = basis.len();
            let pi = planes.len();
            kinds.push(BasisKind::Plane { plane: pi, which: 0 });
            kinds.push(BasisKind::Plane { plane: pi, which: 1 });
            basis.push(pb[0].clone());
            basis.push(pb[1].clone());
            planes.push(RootPlanePair { factor: fi, root: r, global_root: g, basis: pb, coords: [idx, idx + 1] });
        }
        factors.push(RealizedFactor {
            family: f.family,
            rank: f.rank,
            scale: f.scale,
            roots,
            cartan_gens,
            ambient_offset: offs[fi],
        });
    }
    for k in 0..spec.abelian_dim {
        let mut x = spec.zero();
        x.abelian[k] = 1.0;
        kinds.push(BasisKind::Abelian { index: k });
        basis.push(x);
    }
    let d = basis.len();
    let mut ad = vec![DMatrix::zeros(d, d); d];
    for i in 0..d {
        for j in i + 1..d {
            let c = bracket(&basis[i], &basis[j])?;
            if c.frob_norm() == 0.0 {
                continue;
            }
            for k in 0..d {
                let v = spec.inner(&c, &basis[k])?;
                if v != 0.0 {
                    ad[i][(k, j)] = v;
                    ad[j][(k, i)] = -v;
                }
            }
        }
    }
    let mut alg = RealizedAlgebra { spec: spec.clone(), factors, planes, basis, kinds, ad };
    // drop denormal-level noise in structure constants
    for a in alg.ad.iter_mut() {
        a.apply(|x| {
            if x.abs() < 1e-15 {
                *x = 0.0
            }
        });
    }
    Ok(alg)
}
