//! Homogeneous-space data `g = h + m` on a realized compact Lie algebra.

mod diagonal;
mod presets;

use std::collections::BTreeMap;
use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Metric, OrthoBasis};
use crate::liealg::{realize, AlgebraElement, AlgebraSpec, BasisKind, RealizedAlgebra};
use crate::numeric::{columns, extend_orthonormal, orthonormalize, tol};
use crate::qnum::Rational;
use crate::rootsys::{Family, RootVector};

pub use diagonal::{normalize_diagonal_a1, A1Pair};
pub use presets::{parse_preset, preset, PRESET_NAMES};

/// Description of `h` by exact Cartan data, root planes and explicit extras.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SubalgebraSpec {
    /// Exact vectors spanning `t∩h`, in the algebra's ambient coordinates.
    #[serde(default)]
    pub cartan_h: Vec<RootVector>,
    /// Roots of `g` whose planes lie in `h` (either sign).
    #[serde(default)]
    pub h_roots: Vec<RootVector>,
    #[serde(default)]
    pub extra_generators: Vec<AlgebraElement>,
}

/// Space-definition file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceFile {
    #[serde(default)]
    pub name: Option<String>,
    pub algebra: AlgebraSpec,
    #[serde(flatten)]
    pub subalgebra: SubalgebraSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlaneLocation {
    InH,
    InM,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HatBlock {
    /// Exact `α'` (zero for `ĝ₀`), stored as a functional in ambient coordinates.
    pub key: RootVector,
    /// Positive roots of `g` restricting to `±key`.
    pub roots: Vec<RootVector>,
    /// Columns of the m-basis spanning `ĝ∩m`.
    pub range: Range<usize>,
    pub dim_h: usize,
}

impl HatBlock {
    pub fn dim_m(&self) -> usize {
        self.range.len()
    }

    pub fn is_zero_block(&self) -> bool {
        self.key.is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HatDecomposition {
    /// `blocks[0]` is `ĝ₀`; the rest are sorted by key.
    pub blocks: Vec<HatBlock>,
}

impl HatDecomposition {
    pub fn zero_block(&self) -> &HatBlock {
        &self.blocks[0]
    }

    pub fn block_of(&self, key: &RootVector) -> Option<&HatBlock> {
        let k = key.canonical_sign();
        self.blocks.iter().find(|b| b.key == k)
    }
}

#[derive(Clone, Debug)]
pub struct HatHatBlock {
    pub key: RootVector,
    /// Orthonormal columns in m-coordinates.
    pub basis: DMatrix<f64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankCheck {
    pub rank_g: usize,
    pub rank_h: usize,
    pub passes: bool,
    pub dim_m: usize,
    pub dim_m_odd: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpaceMeta {
    pub name: String,
    /// Conventional name of the space when it is a known representative.
    pub survivor: Option<String>,
    pub case_label: Option<String>,
}

#[derive(Clone, Debug)]
pub struct CosetSpace {
    pub algebra: RealizedAlgebra,
    pub spec: SubalgebraSpec,
    pub meta: SpaceMeta,
    /// Orthonormal basis of `h`, columns in g-coordinates.
    pub h_mat: DMatrix<f64>,
    /// Orthonormal basis of `m`, columns in g-coordinates, grouped by hat block.
    pub m_mat: DMatrix<f64>,
    /// Primal metric weights on ambient Cartan coordinates.
    pub weights: Vec<Rational>,
    /// Exact orthogonal basis of `t∩h` (primal vectors).
    pub t_h: Vec<RootVector>,
    /// Exact orthogonal basis of `t∩m` (primal vectors).
    pub t_m: Vec<RootVector>,
    pub hat: HatDecomposition,
    pub plane_location: Vec<PlaneLocation>,
    /// `[m_i, ·]_m` restricted to m, one dim_m x dim_m matrix per i.
    pub br_m: Vec<DMatrix<f64>>,
    /// `[m_i, ·]_h` restricted to m, one dim_h x dim_m matrix per i.
    pub br_h: Vec<DMatrix<f64>>,
    /// `ad(h_k)` restricted to m.
    pub ad_h: Vec<DMatrix<f64>>,
    pub reductive_residual: f64,
    pub closure_residual: f64,
}

fn ambient_weights_inv(w: &[Rational]) -> Vec<Rational> {
    w.iter().map(|x| x.recip()).collect()
}

/// Projects the A-type parts of an ambient Cartan vector to sum zero.
fn normalize_cartan(spec: &AlgebraSpec, v: &RootVector) -> RootVector {
    let offs = spec.factor_offsets();
    let mut out = v.clone();
    for (fi, f) in spec.factors.iter().enumerate() {
        if f.family == Family::A {
            let part = RootVector::new(v.coords[offs[fi]..offs[fi + 1]].to_vec()).sum_zero_part();
            out.coords[offs[fi]..offs[fi + 1]].clone_from_slice(&part.coords);
        }
    }
    out
}

/// Exact spanning set of `t` in ambient coordinates.
fn torus_spanning_set(spec: &AlgebraSpec) -> Vec<RootVector> {
    let total = spec.ambient_dim();
    let offs = spec.factor_offsets();
    let mut out = Vec::new();
    for (fi, f) in spec.factors.iter().enumerate() {
        let adim = f.family.ambient_dim(f.rank);
        for i in 0..adim {
            if f.family == Family::A {
                if i + 1 < adim {
                    let mut v = RootVector::zero(total);
                    v.coords[offs[fi] + i] = 1.into();
                    v.coords[offs[fi] + i + 1] = (-1).into();
                    out.push(v);
                }
            } else {
                out.push(RootVector::unit(total, offs[fi] + i));
            }
        }
    }
    for k in 0..spec.abelian_dim {
        out.push(RootVector::unit(total, offs[spec.factors.len()] + k));
    }
    out
}

pub fn build_coset(algebra: &AlgebraSpec, spec: &SubalgebraSpec) -> Result<CosetSpace> {
    build_coset_realized(realize(algebra)?, spec)
}

pub fn build_coset_realized(alg: RealizedAlgebra, spec: &SubalgebraSpec) -> Result<CosetSpace> {
    let aspec = alg.spec.clone();
    let amb = aspec.ambient_dim();
    let d = alg.dim();
    let weights = aspec.ambient_weights();
    let primal = Metric { weights: weights.clone() };
    let dual = Metric { weights: ambient_weights_inv(&weights) };

    // exact Cartan data
    let mut cartan_h = Vec::new();
    for v in &spec.cartan_h {
        if v.ambient_dim() != amb {
            return Err(Error::DimensionMismatch { expected: amb, found: v.ambient_dim() });
        }
        let v = normalize_cartan(&aspec, v);
        if v.is_zero() {
            return Err(Error::DegenerateSubalgebra("zero vector in cartan_h".into()));
        }
        cartan_h.push(v);
    }
    let th = OrthoBasis::new(&primal, &cartan_h);
    if th.dim() != cartan_h.len() {
        return Err(Error::DegenerateSubalgebra("cartan_h vectors are linearly dependent".into()));
    }
    let tm = th.complement_in(&primal, &torus_spanning_set(&aspec));
    let flat = |v: &RootVector| RootVector::new(v.coords.iter().zip(&weights).map(|(x, w)| *x * *w).collect());
    let th_flat = OrthoBasis::new(&dual, &th.vecs.iter().map(flat).collect::<Vec<_>>());

    // generators of h
    let mut gens: Vec<DVector<f64>> = Vec::new();
    for v in &cartan_h {
        gens.push(alg.cartan_coords(v)?);
    }
    for r in &spec.h_roots {
        if r.ambient_dim() != amb {
            return Err(Error::DimensionMismatch { expected: amb, found: r.ambient_dim() });
        }
        let p = alg.plane_of(r).ok_or_else(|| Error::NotARoot(r.to_string()))?;
        for &c in &alg.planes[p].coords {
            let mut e = DVector::zeros(d);
            e[c] = 1.0;
            gens.push(e);
        }
    }
    for x in &spec.extra_generators {
        alg.inner(x, x)?;
        let c = alg.coords(x);
        let back = alg.element(&c);
        let scale = x.frob_norm().max(1.0);
        if x.sub(&back).frob_norm() > tol::CLOSURE * scale {
            return Err(Error::InvalidParameter("extra generator does not lie in g".into()));
        }
        gens.push(c);
    }
    let hb = orthonormalize(gens, 1e-9);
    if hb.len() == d {
        return Err(Error::DegenerateSubalgebra("h = g".into()));
    }
    let h_mat = columns(d, &hb);
    let pr_m = |v: &DVector<f64>| -> DVector<f64> { v - &h_mat * (h_mat.transpose() * v) };

    let mut closure = 0.0f64;
    for i in 0..hb.len() {
        for j in i + 1..hb.len() {
            let z = alg.bracket_coords(&hb[i], &hb[j]);
            closure = closure.max(pr_m(&z).norm());
        }
    }
    if closure >= tol::CLOSURE {
        return Err(Error::NotSubalgebra(closure));
    }

    // hat blocks
    let mut groups: BTreeMap<RootVector, Vec<usize>> = BTreeMap::new();
    let mut zero_planes = Vec::new();
    for (pi, p) in alg.planes.iter().enumerate() {
        let key = th_flat.project(&dual, &p.global_root).canonical_sign();
        if key.is_zero() {
            zero_planes.push(pi);
        } else {
            groups.entry(key).or_default().push(pi);
        }
    }
    let unit = |c: usize| {
        let mut e = DVector::zeros(d);
        e[c] = 1.0;
        e
    };
    let mut mb: Vec<DVector<f64>> = Vec::new();
    let mut blocks = Vec::new();
    let mut push_block = |key: RootVector, planes: &[usize], extra: Vec<DVector<f64>>, mb: &mut Vec<DVector<f64>>| {
        let mut raw: Vec<DVector<f64>> = extra;
        for &pi in planes {
            raw.extend(alg.planes[pi].coords.iter().map(|&c| unit(c)));
        }
        let raw_dim = raw.len();
        let start = mb.len();
        let mut local = Vec::new();
        extend_orthonormal(&mut local, raw.iter().map(&pr_m), 1e-8);
        let added = local.len();
        mb.extend(local);
        let mut roots: Vec<RootVector> = planes.iter().map(|&pi| alg.planes[pi].global_root.clone()).collect();
        roots.sort();
        blocks.push(HatBlock { key, roots, range: start..start + added, dim_h: raw_dim.saturating_sub(added) });
    };
    let tm_coords: Vec<DVector<f64>> = tm.vecs.iter().map(|v| alg.cartan_coords(v)).collect::<Result<_>>()?;
    // rank of t inside g, the raw dimension of the zero block's torus part
    let t_dim = alg.kinds.iter().filter(|k| !matches!(k, BasisKind::Plane { .. })).count();
    push_block(RootVector::zero(amb), &zero_planes, tm_coords, &mut mb);
    for (key, planes) in &groups {
        push_block(key.clone(), planes, Vec::new(), &mut mb);
    }
    let dim_m = d - hb.len();
    if mb.len() != dim_m {
        return Err(Error::DegenerateSubalgebra(format!(
            "t∩h (dim {}) is not a maximal torus of h: hat blocks span {} of dim m = {} (dim t = {})",
            th.dim(),
            mb.len(),
            dim_m,
            t_dim
        )));
    }
    let m_mat = columns(d, &mb);
    let gram = m_mat.transpose() * &m_mat - DMatrix::identity(dim_m, dim_m);
    if gram.amax() > 1e-9 {
        return Err(Error::DegenerateSubalgebra("hat blocks are not mutually orthogonal".into()));
    }
    let cross = h_mat.transpose() * &m_mat;
    if cross.len() > 0 && cross.amax() > tol::EXACT {
        return Err(Error::DegenerateSubalgebra("h and m are not orthogonal".into()));
    }

    let plane_location = alg
        .planes
        .iter()
        .map(|p| {
            let mut in_h = 0.0f64;
            let mut in_m = 0.0f64;
            for &c in &p.coords {
                let e = unit(c);
                in_h = in_h.max(pr_m(&e).norm());
                in_m = in_m.max((h_mat.transpose() * &e).norm());
            }
            if in_h < 1e-8 {
                PlaneLocation::InH
            } else if in_m < 1e-8 {
                PlaneLocation::InM
            } else {
                PlaneLocation::Mixed
            }
        })
        .collect();

    let mut reductive = 0.0f64;
    let mut ad_h = Vec::with_capacity(hb.len());
    for h in &hb {
        let a = alg.ad_matrix(h);
        let am = &a * &m_mat;
        if hb.len() > 0 {
            reductive = reductive.max((h_mat.transpose() * &am).amax());
        }
        ad_h.push(m_mat.transpose() * am);
    }
    if reductive >= tol::CLOSURE {
        return Err(Error::NotSubalgebra(reductive));
    }
    let mut br_m = Vec::with_capacity(dim_m);
    let mut br_h = Vec::with_capacity(dim_m);
    for i in 0..dim_m {
        let a = alg.ad_matrix(&m_mat.column(i).into_owned()) * &m_mat;
        br_m.push(m_mat.transpose() * &a);
        br_h.push(h_mat.transpose() * &a);
    }

    Ok(CosetSpace {
        algebra: alg,
        spec: spec.clone(),
        meta: SpaceMeta::default(),
        h_mat,
        m_mat,
        weights,
        t_h: th.vecs,
        t_m: tm.vecs,
        hat: HatDecomposition { blocks },
        plane_location,
        br_m,
        br_h,
        ad_h,
        reductive_residual: reductive,
        closure_residual: closure,
    })
}

impl CosetSpace {
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.meta.name = name.into();
        self
    }

    pub fn with_survivor(mut self, survivor: impl Into<String>) -> Self {
        self.meta.survivor = Some(survivor.into());
        self
    }

    pub fn dim_g(&self) -> usize {
        self.algebra.dim()
    }

    pub fn dim_h(&self) -> usize {
        self.h_mat.ncols()
    }

    pub fn dim_m(&self) -> usize {
        self.m_mat.ncols()
    }

    pub fn h_basis(&self) -> Vec<AlgebraElement> {
        self.h_mat.column_iter().map(|c| self.algebra.element(&c.into_owned())).collect()
    }

    pub fn m_basis(&self) -> Vec<AlgebraElement> {
        self.m_mat.column_iter().map(|c| self.algebra.element(&c.into_owned())).collect()
    }

    /// Orthogonal projection of a g-coordinate vector to h, as h-coordinates.
    pub fn pr_h(&self, x: &DVector<f64>) -> DVector<f64> {
        self.h_mat.transpose() * x
    }

    /// Orthogonal projection of a g-coordinate vector to m, as m-coordinates.
    pub fn pr_m(&self, x: &DVector<f64>) -> DVector<f64> {
        self.m_mat.transpose() * x
    }

    /// m-coordinates to g-coordinates.
    pub fn lift_m(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.m_mat * x
    }

    pub fn lift_h(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.h_mat * x
    }

    /// `[x, y]_m` for x, y in m-coordinates.
    pub fn bracket_m(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim_m());
        for (i, b) in self.br_m.iter().enumerate() {
            if x[i] != 0.0 {
                out += (b * y) * x[i];
            }
        }
        out
    }

    /// `[x, y]_h` in h-coordinates for x, y in m-coordinates.
    pub fn bracket_h(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim_h());
        for (i, b) in self.br_h.iter().enumerate() {
            if x[i] != 0.0 {
                out += (b * y) * x[i];
            }
        }
        out
    }

    /// `ad(z)` on m for z in h-coordinates.
    pub fn ad_h_on_m(&self, z: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim_m();
        let mut out = DMatrix::zeros(n, n);
        for (k, a) in self.ad_h.iter().enumerate() {
            if z[k] != 0.0 {
                out += a * z[k];
            }
        }
        out
    }

    /// Exact `t∩m` basis vectors as m-coordinates.
    pub fn t_m_coords(&self) -> Vec<DVector<f64>> {
        self.t_m
            .iter()
            .map(|v| self.pr_m(&self.algebra.cartan_coords(v).expect("ambient dimension checked")))
            .collect()
    }

    pub fn primal_metric(&self) -> Metric {
        Metric { weights: self.weights.clone() }
    }

    /// Metric on root functionals.
    pub fn dual_metric(&self) -> Metric {
        Metric { weights: ambient_weights_inv(&self.weights) }
    }

    /// Primal Cartan vector to the functional it represents.
    pub fn flat(&self, v: &RootVector) -> RootVector {
        RootVector::new(v.coords.iter().zip(&self.weights).map(|(x, w)| *x * *w).collect())
    }

    /// `t∩h` as functionals, orthogonal under the dual metric.
    pub fn t_h_flat(&self) -> OrthoBasis {
        OrthoBasis::new(&self.dual_metric(), &self.t_h.iter().map(|v| self.flat(v)).collect::<Vec<_>>())
    }

    /// Exact restriction of a root to `t∩h`.
    pub fn restrict_h(&self, root: &RootVector) -> RootVector {
        self.t_h_flat().project(&self.dual_metric(), root)
    }

    /// Nonzero restrictions carrying part of h (positive representatives).
    pub fn delta_h(&self) -> Vec<RootVector> {
        self.hat.blocks.iter().skip(1).filter(|b| b.dim_h > 0).map(|b| b.key.clone()).collect()
    }

    /// Distinct nonzero restrictions with a nonzero m-part.
    pub fn delta_m(&self) -> Vec<RootVector> {
        self.hat.blocks.iter().skip(1).filter(|b| b.dim_m() > 0).map(|b| b.key.clone()).collect()
    }

    pub fn m_block(&self, b: &HatBlock) -> DMatrix<f64> {
        let n = self.dim_m();
        let mut out = DMatrix::zeros(n, b.range.len());
        for (k, i) in b.range.clone().enumerate() {
            out[(i, k)] = 1.0;
        }
        out
    }

    pub fn rank(&self) -> RankCheck {
        rank_check(self)
    }

    pub fn summary(&self) -> SpaceSummary {
        SpaceSummary {
            name: self.meta.name.clone(),
            survivor: self.meta.survivor.clone(),
            case_label: self.meta.case_label.clone(),
            algebra: self.algebra.spec.clone(),
            dim_g: self.dim_g(),
            dim_h: self.dim_h(),
            dim_m: self.dim_m(),
            rank: rank_check(self),
            t_h: self.t_h.clone(),
            t_m: self.t_m.clone(),
            delta_h: self.delta_h(),
            hat_blocks: self
                .hat
                .blocks
                .iter()
                .map(|b| HatBlockSummary { key: b.key.clone(), dim_m: b.dim_m(), dim_h: b.dim_h, roots: b.roots.clone() })
                .collect(),
            closure_residual: self.closure_residual,
            reductive_residual: self.reductive_residual,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HatBlockSummary {
    pub key: RootVector,
    pub dim_m: usize,
    pub dim_h: usize,
    pub roots: Vec<RootVector>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceSummary {
    pub name: String,
    pub survivor: Option<String>,
    pub case_label: Option<String>,
    pub algebra: AlgebraSpec,
    pub dim_g: usize,
    pub dim_h: usize,
    pub dim_m: usize,
    pub rank: RankCheck,
    pub t_h: Vec<RootVector>,
    pub t_m: Vec<RootVector>,
    pub delta_h: Vec<RootVector>,
    pub hat_blocks: Vec<HatBlockSummary>,
    pub closure_residual: f64,
    pub reductive_residual: f64,
}

pub fn rank_check(space: &CosetSpace) -> RankCheck {
    let rank_g = space.algebra.spec.rank();
    let rank_h = space.t_h.len();
    let dim_m = space.dim_m();
    RankCheck { rank_g, rank_h, passes: rank_g == rank_h + 1, dim_m, dim_m_odd: dim_m % 2 == 1 }
}

pub fn hat_decomposition(space: &CosetSpace) -> &HatDecomposition {
    &space.hat
}

/// Refines m by restriction to the orthogonal complement `t'` of `α'` in `t∩h`.
pub fn hathat_decomposition(space: &CosetSpace, alpha_prime: &RootVector) -> Result<Vec<HatHatBlock>> {
    if alpha_prime.is_zero() {
        return Err(Error::ZeroVector);
    }
    let dual = space.dual_metric();
    let th = space.t_h_flat();
    if !th.contains(&dual, alpha_prime) {
        return Err(Error::InvalidParameter(format!("{alpha_prime} does not lie in t∩h")));
    }
    let line = OrthoBasis::new(&dual, std::slice::from_ref(alpha_prime));
    let t_prime = line.complement_in(&dual, &th.vecs);
    let alg = &space.algebra;
    let d = alg.dim();
    let mut groups: BTreeMap<RootVector, Vec<DVector<f64>>> = BTreeMap::new();
    let zero = RootVector::zero(alpha_prime.ambient_dim());
    let t_part: Vec<DVector<f64>> = space.t_m.iter().map(|v| alg.cartan_coords(v)).collect::<Result<_>>()?;
    groups.entry(zero.clone()).or_default().extend(t_part);
    for p in &alg.planes {
        let key = t_prime.project(&dual, &p.global_root).canonical_sign();
        let e = groups.entry(key).or_default();
        for &c in &p.coords {
            let mut u = DVector::zeros(d);
            u[c] = 1.0;
            e.push(u);
        }
    }
    let mut out = Vec::new();
    // zero key first, then lexicographic
    let mut keys: Vec<RootVector> = groups.keys().cloned().collect();
    keys.sort_by_key(|k| !k.is_zero());
    for key in keys {
        let vs = &groups[&key];
        let b = orthonormalize(vs.iter().map(|v| space.pr_m(v)), 1e-8);
        if !b.is_empty() {
            out.push(HatHatBlock { key, basis: columns(space.dim_m(), &b) });
        }
    }
    Ok(out)
}

pub fn space_from_json(text: &str) -> Result<CosetSpace> {
    let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    const KEYS: [&str; 5] = ["name", "algebra", "cartan_h", "h_roots", "extra_generators"];
    if let Some(obj) = raw.as_object() {
        if let Some(k) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(Error::Parse(format!("unknown field {k:?}; expected one of {}", KEYS.join(", "))));
        }
    }
    let f: SpaceFile = serde_json::from_value(raw).map_err(|e| Error::Parse(e.to_string()))?;
    let space = build_coset(&f.algebra, &f.subalgebra)?;
    Ok(space.with_name(f.name.unwrap_or_else(|| "custom".into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::FactorSpec;
    use crate::qnum::QNum;
    use crate::rootsys::RootVector as RV;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rv(xs: &[i64]) -> RV {
        RV::from_ints(xs)
    }

    fn check_invariants(s: &CosetSpace) {
        assert_eq!(s.dim_h() + s.dim_m(), s.dim_g());
        assert!(s.reductive_residual < 1e-10, "reductive residual {}", s.reductive_residual);
        assert!(s.closure_residual < 1e-10, "closure residual {}", s.closure_residual);
        let cross = s.h_mat.transpose() * &s.m_mat;
        assert!(cross.len() == 0 || cross.amax() < 1e-12);
        // hat blocks are stable under ad(t∩h)
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            let mut z = DVector::zeros(s.dim_g());
            for v in &s.t_h {
                z += s.algebra.cartan_coords(v).unwrap() * rng.gen_range(-1.0..1.0);
            }
            let a = s.algebra.ad_matrix(&z);
            for b in &s.hat.blocks {
                let cols = &s.m_mat.columns(b.range.start, b.range.len()).into_owned();
                let img = &a * cols;
                let back = cols * (cols.transpose() * &img);
                assert!((img - back).amax() < 1e-10);
            }
        }
    }

    #[test]
    fn empty_spec_on_su2_gives_all_of_g() {
        let s = build_coset(&AlgebraSpec::simple(Family::A, 1), &SubalgebraSpec::default()).unwrap();
        assert_eq!(s.dim_m(), 3);
        check_invariants(&s);
        let r = rank_check(&s);
        assert_eq!((r.rank_g, r.rank_h, r.passes), (1, 0, true));
    }

    #[test]
    fn su3_torus_and_circle() {
        let full = SubalgebraSpec { cartan_h: vec![rv(&[1, -1, 0]), rv(&[0, 1, -1])], ..Default::default() };
        let s = build_coset(&AlgebraSpec::simple(Family::A, 2), &full).unwrap();
        assert_eq!(s.dim_m(), 6);
        let r = rank_check(&s);
        assert_eq!((r.rank_g, r.rank_h, r.passes), (2, 2, false));
        let circle = SubalgebraSpec { cartan_h: vec![rv(&[1, 1, -2])], ..Default::default() };
        let s = build_coset(&AlgebraSpec::simple(Family::A, 2), &circle).unwrap();
        assert_eq!(s.dim_m(), 7);
        check_invariants(&s);
        let trivial = build_coset(&AlgebraSpec::simple(Family::A, 2), &SubalgebraSpec::default()).unwrap();
        let r = rank_check(&trivial);
        assert_eq!((r.rank_g, r.rank_h, r.passes), (2, 0, false));
    }

    #[test]
    fn full_algebra_is_rejected() {
        let spec = SubalgebraSpec {
            cartan_h: vec![rv(&[1, -1])],
            h_roots: vec![rv(&[1, -1])],
            ..Default::default()
        };
        let e = build_coset(&AlgebraSpec::simple(Family::A, 1), &spec).unwrap_err();
        assert!(matches!(e, Error::DegenerateSubalgebra(ref s) if s == "h = g"));
    }

    #[test]
    fn non_closed_span_is_rejected() {
        // two root planes whose bracket leaves the span
        let spec = SubalgebraSpec {
            cartan_h: vec![],
            h_roots: vec![rv(&[1, -1, 0]), rv(&[0, 1, -1])],
            ..Default::default()
        };
        let e = build_coset(&AlgebraSpec::simple(Family::A, 2), &spec).unwrap_err();
        assert!(matches!(e, Error::NotSubalgebra(r) if r >= 1e-8));
    }

    #[test]
    fn a3_subcase1_hat_block_is_four_dimensional() {
        // t∩h orthogonal to α − β with α = e1−e4, β = e3−e2
        let spec = SubalgebraSpec {
            cartan_h: vec![rv(&[1, -1, 1, -1]), rv(&[1, -1, -1, 1])],
            ..Default::default()
        };
        let s = build_coset(&AlgebraSpec::simple(Family::A, 3), &spec).unwrap();
        check_invariants(&s);
        let key = s.restrict_h(&rv(&[1, 0, 0, -1]));
        assert_eq!(key, RV::from_fracs(&[(1, 2), (-1, 2), (1, 2), (-1, 2)]));
        assert_eq!(s.restrict_h(&rv(&[0, -1, 1, 0])), key);
        assert_eq!(s.hat.block_of(&key).unwrap().dim_m(), 4);
        assert_eq!(s.t_m.len(), 1);
        assert!(s.primal_metric().dot(&s.t_m[0], &rv(&[1, -1, 1, -1])).is_zero());
    }

    #[test]
    fn full_h_planes_leave_only_torus() {
        // U(2)-like h = t∩h + g_{±(e1−e2)} inside su(3)
        let spec = SubalgebraSpec { cartan_h: vec![rv(&[1, -1, 0])], h_roots: vec![rv(&[1, -1, 0])], ..Default::default() };
        let s = build_coset(&AlgebraSpec::simple(Family::A, 2), &spec).unwrap();
        check_invariants(&s);
        assert_eq!(s.dim_m(), 5);
        let spec = SubalgebraSpec {
            cartan_h: vec![rv(&[1, -1, 0])],
            h_roots: vec![rv(&[1, -1, 0]), rv(&[1, 0, -1]), rv(&[0, 1, -1])],
            extra_generators: vec![],
        };
        assert!(build_coset(&AlgebraSpec::simple(Family::A, 2), &spec).is_err());
    }

    #[test]
    fn b3_subcase1_plane_list_and_hathat() {
        let s = preset("bn_excluded_subcase1", &["3"]).unwrap();
        check_invariants(&s);
        assert_eq!(s.dim_m(), 11);
        // m = ℝe1 + g_{±e1} + Σ_{i≥2} g_{±(e_i±e1)}
        let mut in_m: Vec<RV> = s
            .algebra
            .planes
            .iter()
            .zip(&s.plane_location)
            .filter(|(_, l)| **l == PlaneLocation::InM)
            .map(|(p, _)| p.global_root.clone())
            .collect();
        in_m.sort();
        let mut expect = vec![rv(&[1, 0, 0]), rv(&[1, 1, 0]), rv(&[1, -1, 0]), rv(&[1, 0, 1]), rv(&[1, 0, -1])];
        expect.sort();
        assert_eq!(in_m, expect);
        assert!(s.plane_location.iter().all(|l| *l != PlaneLocation::Mixed));
        assert_eq!(s.t_m, vec![rv(&[1, 0, 0])]);
        let hh = hathat_decomposition(&s, &rv(&[0, 2, 0])).unwrap();
        let total: usize = hh.iter().map(|b| b.basis.ncols()).sum();
        assert_eq!(total, s.dim_m());
        for b in &hh {
            assert!(b.key.coords[0].is_zero() && b.key.coords[1].is_zero());
        }
        // zero key: ℝe1 + g_{±e1} + g_{±(e2±e1)}
        assert_eq!(hh[0].key, RV::zero(3));
        assert_eq!(hh[0].basis.ncols(), 7);
        assert_eq!(hh.len(), 2);
        assert_eq!(hh[1].basis.ncols(), 4);
    }

    #[test]
    fn rank_one_h_has_single_hathat_block() {
        let s = preset("bn_excluded_subcase1", &["2"]).unwrap();
        let hh = hathat_decomposition(&s, &rv(&[0, 2])).unwrap();
        assert_eq!(hh.len(), 1);
        assert_eq!(hh[0].basis.ncols(), s.dim_m());
        assert!(matches!(hathat_decomposition(&s, &rv(&[0, 0])), Err(Error::ZeroVector)));
    }

    #[test]
    fn scaled_factors_use_weighted_restrictions() {
        let alg = AlgebraSpec {
            factors: vec![
                FactorSpec { family: Family::A, rank: 1, scale: 1.0 },
                FactorSpec { family: Family::A, rank: 1, scale: 2.0 },
            ],
            abelian_dim: 0,
        };
        let spec = SubalgebraSpec { cartan_h: vec![rv(&[1, -1, 1, -1])], ..Default::default() };
        let s = build_coset(&alg, &spec).unwrap();
        check_invariants(&s);
        assert_eq!(s.dim_m(), 5);
        // both roots take the value 2 on t∩h, so they share a block
        let a = s.restrict_h(&rv(&[1, -1, 0, 0]));
        assert_eq!(a, s.restrict_h(&rv(&[0, 0, 1, -1])));
        assert_eq!(s.hat.block_of(&a).unwrap().dim_m(), 4);
        // t∩m is orthogonal for the weighted metric, not the Euclidean one
        let t = &s.t_m[0];
        assert_eq!(t.coords[0], t.coords[2] * QNum::int(-2));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"algebra":{"factors":[{"family":"B","rank":2}]},
            "cartan_h":[[{"a":"0/1"},{"a":"1"}]],
            "h_roots":[[{"a":"0"},{"a":"1"}]]}"#;
        let s = space_from_json(text).unwrap();
        assert_eq!(s.dim_m(), 7);
        assert_eq!(s.meta.name, "custom");
    }
}
