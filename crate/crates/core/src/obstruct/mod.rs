//! Exact root-level case analysis: the I/II/III trichotomy, the two key
//! lemmas, the angle lemma, bracket-membership propagation and the subcase
//! tables that reproduce the survivor lists.

mod classify;
mod orbit;
mod tables;
mod verify;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coset::{CosetSpace, PlaneLocation};
use crate::error::{Error, Result};
use crate::exact::Metric;
use crate::qnum::{QNum, Rational};
use crate::rootsys::{angle, build_root_system_any_rank, Angle, Family, RootVector};

pub use classify::{classify, classify_and_label, classify_case1, classify_case2, classify_case3, classify_root_level, CaseLabel, Outcome, Verdict};
pub use orbit::{config_of_pair, diagram_automorphisms, subsystem_type, Config, OrbitIndex};
pub use tables::{case3_rows, Expect, SubcaseRow, SurvivorName};
pub use verify::{angle_rows, enumerate_case3, evaluate_subcase, verify_theorem, SubcaseDescriptor, SubcaseReport, SurvivorEntry, TheoremReport, THEOREM_LISTS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaneState {
    Unknown,
    InH,
    InM,
    /// Known to meet both h and m nontrivially.
    Split,
}

/// Whether a restricted root (a hat-block key) is a root of h.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HRoot {
    Unknown,
    Yes,
    No,
}

impl fmt::Display for PlaneState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PlaneState::Unknown => "unknown",
            PlaneState::InH => "in h",
            PlaneState::InM => "in m",
            PlaneState::Split => "split",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorData {
    pub family: Family,
    pub rank: usize,
    pub offset: usize,
    pub len: usize,
    /// Weight of the bi-invariant metric on this factor's ambient coordinates.
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootBlock {
    pub key: RootVector,
    /// Indices into `planes`.
    pub planes: Vec<usize>,
}

/// Root data of `g = g0 ⊕ g1 ⊕ … ⊕ gk` with a one-dimensional `t∩m = ℝw`
/// and a partial assignment of root planes to h and m.
///
/// Roots are functionals in concatenated ambient coordinates (factor blocks,
/// then abelian coordinates) with the dual metric.
#[derive(Clone, Debug)]
pub struct RootLevelSpace {
    pub factors: Vec<FactorData>,
    pub abelian_dim: usize,
    pub metric: Metric,
    pub w: RootVector,
    /// Positive roots, one per root plane.
    pub planes: Vec<RootVector>,
    pub plane_factor: Vec<usize>,
    pub restrictions: Vec<RootVector>,
    /// `blocks[0]` collects the roots in `t∩m`; the rest are sorted by key.
    pub blocks: Vec<RootBlock>,
    pub plane_block: Vec<usize>,
    pub state: Vec<PlaneState>,
    pub h_root: Vec<HRoot>,
    /// The defining pair for spaces built from a subcase.
    pub pair: Option<(RootVector, RootVector)>,
    root_plane: HashMap<RootVector, usize>,
    block_index: HashMap<RootVector, usize>,
    w_norm2: QNum,
    /// Floating Gram matrix of the restrictions, used only to prefilter
    /// exact parallelism tests.
    gram: Vec<Vec<f64>>,
    in_th: Vec<bool>,
}

fn is_integer(q: &QNum) -> bool {
    q.is_rational() && *q.a.denom() == 1
}

impl RootLevelSpace {
    pub fn new(factors: &[(Family, usize, Rational)], abelian_dim: usize, w: RootVector) -> Result<Self> {
        let mut fdata = Vec::new();
        let mut weights = Vec::new();
        let mut offset = 0;
        for &(family, rank, weight) in factors {
            if weight <= Rational::from_integer(0) {
                return Err(Error::InvalidParameter(format!("factor weight {weight} must be positive")));
            }
            let len = family.ambient_dim(rank);
            fdata.push(FactorData { family, rank, offset, len, weight });
            weights.extend(std::iter::repeat(Rational::from_integer(1) / weight).take(len));
            offset += len;
        }
        weights.extend(std::iter::repeat(Rational::from_integer(1)).take(abelian_dim));
        let dim = offset + abelian_dim;
        if w.ambient_dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: w.ambient_dim() });
        }
        if w.is_zero() {
            return Err(Error::ZeroVector);
        }
        for f in fdata.iter().filter(|f| f.family == Family::A) {
            let s: QNum = w.coords[f.offset..f.offset + f.len].iter().copied().sum();
            if !s.is_zero() {
                return Err(Error::InvalidParameter(format!("t∩m generator leaves the Cartan subalgebra of the {} factor", f.family.label(f.rank))));
            }
        }
        let metric = Metric { weights };
        let w_norm2 = metric.norm2(&w);

        let mut planes = Vec::new();
        let mut plane_factor = Vec::new();
        for (k, f) in fdata.iter().enumerate() {
            let rs = build_root_system_any_rank(f.family, f.rank)?;
            for r in rs.positive_roots() {
                let mut v = RootVector::zero(dim);
                v.coords[f.offset..f.offset + f.len].copy_from_slice(&r.coords);
                planes.push(v);
                plane_factor.push(k);
            }
        }
        let mut root_plane = HashMap::new();
        for (p, r) in planes.iter().enumerate() {
            root_plane.insert(r.clone(), p);
            root_plane.insert(-r, p);
        }
        let restrictions: Vec<RootVector> = planes
            .iter()
            .map(|r| {
                let c = metric.dot(r, &w) / w_norm2;
                r - &w.scale(c)
            })
            .collect();
        let mut zero = Vec::new();
        let mut keyed: BTreeMap<RootVector, Vec<usize>> = BTreeMap::new();
        for (p, r) in restrictions.iter().enumerate() {
            if r.is_zero() {
                zero.push(p);
            } else {
                keyed.entry(r.canonical_sign()).or_default().push(p);
            }
        }
        let mut blocks = vec![RootBlock { key: RootVector::zero(dim), planes: zero }];
        blocks.extend(keyed.into_iter().map(|(key, planes)| RootBlock { key, planes }));
        let mut plane_block = vec![0; planes.len()];
        let mut block_index = HashMap::new();
        for (b, blk) in blocks.iter().enumerate() {
            block_index.insert(blk.key.clone(), b);
            for &p in &blk.planes {
                plane_block[p] = b;
            }
        }
        let mut h_root = vec![HRoot::Unknown; blocks.len()];
        h_root[0] = HRoot::No;
        let n = planes.len();
        let wf: Vec<f64> = metric.weights.iter().map(|x| *x.numer() as f64 / *x.denom() as f64).collect();
        let in_th = planes.iter().map(|r| metric.dot(r, &w).is_zero()).collect();
        let rf: Vec<Vec<f64>> = restrictions.iter().map(|r| r.to_f64()).collect();
        let gram = (0..n)
            .map(|i| (0..n).map(|j| rf[i].iter().zip(&rf[j]).zip(&wf).map(|((a, b), w)| a * b * w).sum()).collect())
            .collect();
        Ok(RootLevelSpace {
            factors: fdata,
            abelian_dim,
            metric,
            w,
            planes,
            plane_factor,
            restrictions,
            blocks,
            plane_block,
            state: vec![PlaneState::Unknown; n],
            h_root,
            pair: None,
            root_plane,
            block_index,
            w_norm2,
            gram,
            in_th,
        })
    }

    /// Case-III style data on a simple factor: `t∩m = ℝ(α−β)` and
    /// `α' = pr_h(α)` a root of h.
    pub fn from_pair(family: Family, rank: usize, alpha: &RootVector, beta: &RootVector) -> Result<Self> {
        let rs = build_root_system_any_rank(family, rank)?;
        for x in [alpha, beta] {
            if x.ambient_dim() != rs.ambient_dim {
                return Err(Error::DimensionMismatch { expected: rs.ambient_dim, found: x.ambient_dim() });
            }
            if !rs.contains(x) {
                return Err(Error::NotARoot(x.to_string()));
            }
        }
        if alpha == beta || *alpha == -beta {
            return Err(Error::Collinear);
        }
        let mut s = RootLevelSpace::new(&[(family, rank, Rational::from_integer(1))], 0, alpha - beta)?;
        let key = s.restrict(alpha).canonical_sign();
        let b = s.block_index[&key];
        s.h_root[b] = HRoot::Yes;
        s.pair = Some((alpha.clone(), beta.clone()));
        Ok(s)
    }

    /// Root data of an actual coset space, with block and plane assignments
    /// read off the numeric decomposition.
    pub fn from_coset(space: &CosetSpace) -> Result<Self> {
        if space.t_m.len() != 1 {
            return Err(Error::RankEquality(format!(
                "dim t∩m = {}; not an odd-dimensional positively curved candidate",
                space.t_m.len()
            )));
        }
        let spec = &space.algebra.spec;
        let aw = spec.ambient_weights();
        let offsets = spec.factor_offsets();
        let factors: Vec<(Family, usize, Rational)> =
            spec.factors.iter().enumerate().map(|(k, f)| (f.family, f.rank, aw[offsets[k]])).collect();
        let w = space.flat(&space.t_m[0]);
        let mut s = RootLevelSpace::new(&factors, spec.abelian_dim, w)?;
        for b in 1..s.blocks.len() {
            let key = &s.blocks[b].key;
            let hb = space
                .hat
                .block_of(key)
                .ok_or_else(|| Error::SpecMismatch)?;
            s.h_root[b] = if hb.dim_h > 0 { HRoot::Yes } else { HRoot::No };
        }
        for p in 0..s.planes.len() {
            let idx = space.algebra.plane_of(&s.planes[p]).ok_or(Error::SpecMismatch)?;
            s.state[p] = match space.plane_location[idx] {
                PlaneLocation::InH => PlaneState::InH,
                PlaneLocation::InM => PlaneState::InM,
                PlaneLocation::Mixed => PlaneState::Split,
            };
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.w.ambient_dim()
    }

    /// Marks every multi-plane block as not an h-root, which is what Case I
    /// means.
    pub fn assume_case1(&mut self) {
        for b in 1..self.blocks.len() {
            if self.blocks[b].planes.len() > 1 && self.h_root[b] == HRoot::Unknown {
                self.h_root[b] = HRoot::No;
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.factors.iter().map(|f| f.rank).sum::<usize>() + self.abelian_dim
    }

    pub fn dot(&self, a: &RootVector, b: &RootVector) -> QNum {
        self.metric.dot(a, b)
    }

    pub fn restrict(&self, v: &RootVector) -> RootVector {
        let c = self.dot(v, &self.w) / self.w_norm2;
        v - &self.w.scale(c)
    }

    pub fn in_t_h(&self, v: &RootVector) -> bool {
        self.dot(v, &self.w).is_zero()
    }

    pub fn is_root(&self, v: &RootVector) -> bool {
        self.root_plane.contains_key(v)
    }

    pub fn plane_of(&self, v: &RootVector) -> Option<usize> {
        self.root_plane.get(v).copied()
    }

    pub fn block_of_key(&self, v: &RootVector) -> Option<usize> {
        self.block_index.get(&v.canonical_sign()).copied()
    }

    pub fn factor_of(&self, v: &RootVector) -> Option<usize> {
        self.plane_of(v).map(|p| self.plane_factor[p])
    }

    /// Whether the vector `v ∈ t∩h` is a root of h, as far as is known.
    pub fn h_root_status(&self, v: &RootVector) -> HRoot {
        if v.is_zero() || !self.in_t_h(v) {
            return HRoot::No;
        }
        match self.block_of_key(v) {
            Some(b) => self.h_root[b],
            None => HRoot::No,
        }
    }

    /// `x ∈ ℝ·dir` (with `ℝ·0 = {0}`).
    fn in_line(&self, x: &RootVector, dir: &RootVector) -> bool {
        if dir.is_zero() {
            return x.is_zero();
        }
        let c = self.dot(x, dir) / self.dot(dir, dir);
        (x - &dir.scale(c)).is_zero()
    }

    /// Whether `a` and `b` can both be roots of one reduced root system.
    pub fn cartan_compatible(&self, a: &RootVector, b: &RootVector) -> bool {
        if a == b || *a == -b {
            return true;
        }
        let d = self.dot(a, b);
        if d.is_zero() {
            return true;
        }
        let two = QNum::int(2);
        let n1 = two * d / self.dot(b, b);
        let n2 = two * d / self.dot(a, a);
        if !is_integer(&n1) || !is_integer(&n2) {
            return false;
        }
        let prod = (n1 * n2).a;
        prod >= Rational::from_integer(1) && prod <= Rational::from_integer(3)
    }

    /// Sum status of two planes: the plane of the unique root among `a ± b`
    /// when exactly one of them is a root.
    fn unique_bracket_target(&self, a: &RootVector, b: &RootVector) -> Option<usize> {
        let plus = self.plane_of(&(a + b));
        let minus = self.plane_of(&(a - b));
        match (plus, minus) {
            (Some(p), None) | (None, Some(p)) => Some(p),
            _ => None,
        }
    }

    pub fn state_of(&self, v: &RootVector) -> Option<PlaneState> {
        self.plane_of(v).map(|p| self.state[p])
    }

    pub fn planes_in(&self, s: PlaneState) -> Vec<RootVector> {
        (0..self.planes.len()).filter(|&p| self.state[p] == s).map(|p| self.planes[p].clone()).collect()
    }

    /// Nonzero keys known to be roots of h.
    pub fn known_h_roots(&self) -> Vec<RootVector> {
        (1..self.blocks.len()).filter(|&b| self.h_root[b] == HRoot::Yes).map(|b| self.blocks[b].key.clone()).collect()
    }

    /// Component of `w` on a factor (or on the abelian part when `factor` is
    /// `None`), as a full-length vector.
    pub fn w_component(&self, factor: Option<usize>) -> RootVector {
        let (lo, hi) = match factor {
            Some(k) => (self.factors[k].offset, self.factors[k].offset + self.factors[k].len),
            None => (self.dim() - self.abelian_dim, self.dim()),
        };
        let mut v = RootVector::zero(self.dim());
        v.coords[lo..hi].copy_from_slice(&self.w.coords[lo..hi]);
        v
    }

    // ---- rules -------------------------------------------------------------

    fn fact_of(&self, f: IdxFact) -> Fact {
        match f {
            IdxFact::Plane(p, state) => Fact::Plane { root: self.planes[p].clone(), state },
            IdxFact::Block(b, status) => Fact::HRoot { key: self.blocks[b].key.clone(), status },
        }
    }

    fn inputs_of(&self, i: &Inst) -> Vec<RootVector> {
        match i.rule {
            Rule::AllInM => vec![self.blocks[i.a].key.clone()],
            Rule::CartanInteger => vec![self.blocks[i.a].key.clone(), self.blocks[i.b].key.clone()],
            Rule::BracketHM | Rule::BracketHH => vec![self.planes[i.a].clone(), self.planes[i.b].clone(), self.planes[i.c].clone()],
            _ => vec![self.planes[i.a].clone()],
        }
    }

    /// Inverse of [`Self::inputs_of`]; `None` if the inputs do not name a
    /// well-formed rule instance.
    fn inst_of(&self, rule: Rule, inputs: &[RootVector]) -> Option<Inst> {
        let plane = |k: usize| inputs.get(k).and_then(|v| self.plane_of(v));
        let block = |k: usize| inputs.get(k).and_then(|v| self.block_of_key(v));
        let (a, b, c) = match rule {
            Rule::AllInM => (block(0)?, 0, 0),
            Rule::CartanInteger => (block(0)?, block(1)?, 0),
            Rule::BracketHM | Rule::BracketHH => {
                let (a, b) = (plane(0)?, plane(1)?);
                let c = self.unique_bracket_target(&self.planes[a], &self.planes[b])?;
                if plane(2)? != c {
                    return None;
                }
                (a, b, c)
            }
            _ => (plane(0)?, 0, 0),
        };
        Some(Inst { rule, a, b, c })
    }

    /// With `lazy`, a Cartan instance whose conclusion is already known is
    /// skipped before the exact check.
    fn derive_idx(&self, i: &Inst, lazy: bool) -> Option<IdxFact> {
        let (a, b, c) = (i.a, i.b, i.c);
        let single = |p: usize| self.blocks[self.plane_block[p]].planes.len() == 1;
        match i.rule {
            Rule::KeyLemma1 => (self.in_th[a] && single(a)).then_some(IdxFact::Plane(a, PlaneState::InH)),
            Rule::ZeroBlock => (self.plane_block[a] == 0).then_some(IdxFact::Plane(a, PlaneState::InM)),
            Rule::OutsideTorus => {
                (!self.in_th[a] && self.plane_block[a] != 0 && single(a)).then_some(IdxFact::Plane(a, PlaneState::InM))
            }
            Rule::PlaneInH => (self.state[a] == PlaneState::InH).then(|| IdxFact::Block(self.plane_block[a], HRoot::Yes)),
            Rule::NotHRoot => (self.h_root[self.plane_block[a]] == HRoot::No).then_some(IdxFact::Plane(a, PlaneState::InM)),
            Rule::AllInM => {
                (a != 0 && self.blocks[a].planes.iter().all(|&p| self.state[p] == PlaneState::InM)).then_some(IdxFact::Block(a, HRoot::No))
            }
            Rule::Collapse => {
                let bl = self.plane_block[a];
                (bl != 0
                    && self.h_root[bl] == HRoot::Yes
                    && self.blocks[bl].planes.iter().all(|&q| q == a || self.state[q] == PlaneState::InM))
                    .then_some(IdxFact::Plane(a, PlaneState::InH))
            }
            Rule::CartanInteger => (a != 0
                && b != 0
                && a != b
                && self.h_root[a] == HRoot::Yes
                && !(lazy && self.h_root[b] == HRoot::No)
                && !self.cartan_compatible(&self.blocks[a].key, &self.blocks[b].key))
                .then_some(IdxFact::Block(b, HRoot::No)),
            Rule::BracketHM => (self.state[a] == PlaneState::InH && self.state[b] == PlaneState::InM).then_some(IdxFact::Plane(c, PlaneState::InM)),
            Rule::BracketHH => (self.state[a] == PlaneState::InH && self.state[b] == PlaneState::InH).then_some(IdxFact::Plane(c, PlaneState::InH)),
        }
    }

    fn derive(&self, rule: Rule, inputs: &[RootVector]) -> Option<Fact> {
        let i = self.inst_of(rule, inputs)?;
        self.derive_idx(&i, false).map(|f| self.fact_of(f))
    }

    /// Records a fact; `Ok(true)` if it was new, `Err(reason)` on conflict.
    fn assert_idx(&mut self, f: IdxFact) -> std::result::Result<bool, String> {
        match f {
            IdxFact::Plane(p, state) => {
                let cur = self.state[p];
                let root = &self.planes[p];
                if cur == state {
                    return Ok(false);
                }
                if cur != PlaneState::Unknown {
                    return Err(format!("plane of {root} is {cur} but is forced {state}"));
                }
                if state == PlaneState::InH && !self.in_th[p] {
                    return Err(format!("plane of {root} would lie in h although {root} ∉ t∩h"));
                }
                self.state[p] = state;
                Ok(true)
            }
            IdxFact::Block(b, status) => {
                let cur = self.h_root[b];
                if cur == status {
                    return Ok(false);
                }
                if cur != HRoot::Unknown || (b == 0 && status == HRoot::Yes) {
                    return Err(format!("{} is forced both into and out of the roots of h", self.blocks[b].key));
                }
                self.h_root[b] = status;
                Ok(true)
            }
        }
    }

    fn assert_fact(&mut self, fact: &Fact) -> std::result::Result<bool, String> {
        let f = match fact {
            Fact::Plane { root, state } => IdxFact::Plane(self.plane_of(root).ok_or_else(|| format!("{root} is not a root"))?, *state),
            Fact::HRoot { key, status } => IdxFact::Block(self.block_of_key(key).ok_or_else(|| format!("{key} is not a restricted root"))?, *status),
        };
        self.assert_idx(f)
    }

    /// Floating prefilter for [`Self::cartan_compatible`] on block keys.
    fn maybe_incompatible(&self, b1: usize, b2: usize) -> bool {
        let (p1, p2) = (self.blocks[b1].planes[0], self.blocks[b2].planes[0]);
        let (g11, g22, d) = (self.gram[p1][p1], self.gram[p2][p2], self.gram[p1][p2]);
        if d.abs() < 1e-9 * (g11 * g22).sqrt() {
            return false;
        }
        let (n1, n2) = (2.0 * d / g22, 2.0 * d / g11);
        let near = |x: f64| (x - x.round()).abs() < 1e-7;
        let prod = (n1 * n2).round();
        !(near(n1) && near(n2) && (1.0..=3.0).contains(&prod))
    }

    fn candidates(&self) -> Vec<Inst> {
        let mut out = Vec::new();
        let inst = |rule, a, b, c| Inst { rule, a, b, c };
        for p in 0..self.planes.len() {
            for rule in [Rule::KeyLemma1, Rule::ZeroBlock, Rule::OutsideTorus, Rule::PlaneInH, Rule::NotHRoot, Rule::Collapse] {
                out.push(inst(rule, p, 0, 0));
            }
        }
        for b in 1..self.blocks.len() {
            out.push(inst(Rule::AllInM, b, 0, 0));
        }
        for b1 in 1..self.blocks.len() {
            for b2 in 1..self.blocks.len() {
                if b1 != b2 && self.maybe_incompatible(b1, b2) {
                    out.push(inst(Rule::CartanInteger, b1, b2, 0));
                }
            }
        }
        for a in 0..self.planes.len() {
            for b in a + 1..self.planes.len() {
                if self.plane_factor[a] != self.plane_factor[b] {
                    continue;
                }
                if let Some(c) = self.unique_bracket_target(&self.planes[a], &self.planes[b]) {
                    out.push(inst(Rule::BracketHM, a, b, c));
                    out.push(inst(Rule::BracketHM, b, a, c));
                    out.push(inst(Rule::BracketHH, a, b, c));
                }
            }
        }
        out
    }

    /// Runs the rules to a fixpoint or the first contradiction. With
    /// `shuffle = Some(seed)` the rule instances are visited in a seeded
    /// random order on every sweep.
    pub fn propagate(&mut self, shuffle: Option<u64>) -> Derivation {
        let mut cands = self.candidates();
        let mut rng = shuffle.map(ChaCha8Rng::seed_from_u64);
        let mut steps = Vec::new();
        loop {
            if let Some(r) = rng.as_mut() {
                cands.shuffle(r);
            }
            let mut changed = false;
            for i in &cands {
                let Some(f) = self.derive_idx(i, true) else { continue };
                match self.assert_idx(f) {
                    Ok(true) => {
                        steps.push(Step { rule: i.rule, inputs: self.inputs_of(i), conclusion: self.fact_of(f) });
                        changed = true;
                    }
                    Ok(false) => {}
                    Err(reason) => {
                        let step = Step { rule: i.rule, inputs: self.inputs_of(i), conclusion: self.fact_of(f) };
                        return Derivation { steps, contradiction: Some(Conflict { step, reason }) };
                    }
                }
            }
            if !changed {
                return Derivation { steps, contradiction: None };
            }
        }
    }

    /// Ordered pair satisfying all four conditions of the second key lemma.
    pub fn find_key_lemma_2_pair(&self) -> Option<(RootVector, RootVector)> {
        let n = self.planes.len();
        let excluded: Vec<bool> = self.planes.iter().map(|g| self.h_root_status(g) == HRoot::No).collect();
        for a in 0..n {
            if !excluded[a] || !self.kl2_condition_3(&self.planes[a]) {
                continue;
            }
            for b in 0..n {
                if a == b || !excluded[b] {
                    continue;
                }
                let (g1, g2) = (&self.planes[a], &self.planes[b]);
                if self.is_root(&(g1 + g2)) || self.is_root(&(g1 - g2)) {
                    continue;
                }
                if self.kl2_condition_4(g1, g2) {
                    return Some((g1.clone(), g2.clone()));
                }
            }
        }
        None
    }

    /// Whether `r_q + s·r_b` (or `r_q` when `b` is `None`) lies on `ℝ·r_d`.
    fn restricted_in_line(&self, q: usize, b: Option<(usize, f64)>, d: usize) -> bool {
        let g = &self.gram;
        let (mut xx, mut xd) = (g[q][q], g[q][d]);
        if let Some((b, s)) = b {
            xx += 2.0 * s * g[q][b] + g[b][b];
            xd += s * g[b][d];
        }
        let dd = g[d][d];
        if dd < 1e-12 && xx > 1e-9 {
            return false;
        }
        let scale = xx.abs() * dd.abs() + xx.abs() + dd.abs();
        if xx * dd - xd * xd > 1e-9 * scale && xx > 1e-12 {
            return false;
        }
        let x = match b {
            None => self.restrictions[q].clone(),
            Some((b, s)) if s > 0.0 => &self.restrictions[q] + &self.restrictions[b],
            Some((b, _)) => &self.restrictions[q] - &self.restrictions[b],
        };
        self.in_line(&x, &self.restrictions[d])
    }

    fn kl2_condition_3(&self, g1: &RootVector) -> bool {
        let p1 = self.plane_of(g1).expect("root");
        (0..self.planes.len()).all(|q| q == p1 || !self.restricted_in_line(q, None, p1))
    }

    fn kl2_condition_4(&self, g1: &RootVector, g2: &RootVector) -> bool {
        let p1 = self.plane_of(g1).expect("root");
        let p2 = self.plane_of(g2).expect("root");
        (0..self.planes.len()).all(|q| {
            q == p2 || (!self.restricted_in_line(q, Some((p2, -1.0)), p1) && !self.restricted_in_line(q, Some((p2, 1.0)), p1))
        })
    }
}

#[derive(Clone, Copy, Debug)]
struct Inst {
    rule: Rule,
    a: usize,
    b: usize,
    c: usize,
}

#[derive(Clone, Copy, Debug)]
enum IdxFact {
    Plane(usize, PlaneState),
    Block(usize, HRoot),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// `[γ]`: γ ∈ t∩h is the only root in γ + t∩m, so its plane lies in h.
    KeyLemma1,
    /// `[γ]`: γ ∈ t∩m, so its plane lies in ĝ₀ ⊂ m.
    ZeroBlock,
    /// `[γ]`: γ ∉ t∩h is alone in its hat block, so its plane lies in m.
    OutsideTorus,
    /// `[γ]`: plane in h ⇒ γ is a root of h.
    PlaneInH,
    /// `[γ]`: γ's restriction is not a root of h ⇒ plane in m.
    NotHRoot,
    /// `[κ]`: every plane of the block lies in m ⇒ κ is not a root of h.
    AllInM,
    /// `[γ]`: the block is an h-root and every other plane of it lies in m.
    Collapse,
    /// `[κ, λ]`: κ is a root of h and λ has non-crystallographic Cartan
    /// integers with κ.
    CartanInteger,
    /// `[a, b, c]`: a in h, b in m, c the unique root among a ± b ⇒ c in m.
    BracketHM,
    /// `[a, b, c]`: a, b in h, c the unique root among a ± b ⇒ c in h.
    BracketHH,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "fact", rename_all = "snake_case")]
pub enum Fact {
    Plane { root: RootVector, state: PlaneState },
    HRoot { key: RootVector, status: HRoot },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub rule: Rule,
    pub inputs: Vec<RootVector>,
    pub conclusion: Fact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conflict {
    pub step: Step,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Derivation {
    pub steps: Vec<Step>,
    pub contradiction: Option<Conflict>,
}

impl Derivation {
    /// Re-derives every step from `initial`; true iff all premises hold in
    /// sequence and the recorded contradiction (if any) recurs.
    pub fn replay(&self, initial: &RootLevelSpace) -> bool {
        let mut s = initial.clone();
        for step in &self.steps {
            if s.derive(step.rule, &step.inputs).as_ref() != Some(&step.conclusion) {
                return false;
            }
            if s.assert_fact(&step.conclusion).is_err() {
                return false;
            }
        }
        match &self.contradiction {
            None => true,
            Some(c) => s.derive(c.step.rule, &c.step.inputs).as_ref() == Some(&c.step.conclusion) && s.assert_fact(&c.step.conclusion).is_err(),
        }
    }
}

// ---- lemmas ----------------------------------------------------------------

fn require_root(space: &RootLevelSpace, v: &RootVector) -> Result<()> {
    if v.ambient_dim() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), found: v.ambient_dim() });
    }
    if !space.is_root(v) {
        return Err(Error::NotARoot(v.to_string()));
    }
    Ok(())
}

/// True iff α is the only root of g in α + t∩m (α must lie in t∩h).
pub fn key_lemma_1_applies(space: &RootLevelSpace, alpha: &RootVector) -> Result<bool> {
    require_root(space, alpha)?;
    if !space.in_t_h(alpha) {
        return Err(Error::Hypothesis(format!("{alpha} ∉ t∩h")));
    }
    let p = space.plane_of(alpha).expect("checked");
    Ok(space.blocks[space.plane_block[p]].planes.len() == 1)
}

/// The four conditions of the second key lemma, each checked exactly.
pub fn key_lemma_2_conditions(space: &RootLevelSpace, g1: &RootVector, g2: &RootVector) -> Result<[bool; 4]> {
    require_root(space, g1)?;
    require_root(space, g2)?;
    if g1 == g2 || *g1 == -g2 {
        return Err(Error::Collinear);
    }
    Ok([
        space.h_root_status(g1) == HRoot::No && space.h_root_status(g2) == HRoot::No,
        !space.is_root(&(g1 + g2)) && !space.is_root(&(g1 - g2)),
        space.kl2_condition_3(g1),
        space.kl2_condition_4(g1, g2),
    ])
}

pub fn key_lemma_2_check(space: &RootLevelSpace, g1: &RootVector, g2: &RootVector) -> Result<bool> {
    Ok(key_lemma_2_conditions(space, g1, g2)?.iter().all(|&c| c))
}

/// True (excluded) iff the angle between α and β is π/3 or 2π/3, for α, β
/// in one simple factor sharing a restriction that is a root of h.
pub fn angle_lemma_check(space: &RootLevelSpace, alpha: &RootVector, beta: &RootVector) -> Result<bool> {
    require_root(space, alpha)?;
    require_root(space, beta)?;
    if alpha == beta || *alpha == -beta {
        return Err(Error::Collinear);
    }
    if space.factor_of(alpha) != space.factor_of(beta) {
        return Err(Error::Hypothesis("α and β lie in different simple factors".into()));
    }
    let ra = space.restrict(alpha);
    if ra != space.restrict(beta) {
        return Err(Error::Hypothesis("pr_h(α) ≠ pr_h(β)".into()));
    }
    if space.h_root_status(&ra) != HRoot::Yes {
        return Err(Error::Hypothesis(format!("{ra} is not known to be a root of h")));
    }
    Ok(matches!(angle(alpha, beta)?, Angle::Pi3 | Angle::TwoPi3))
}

/// Runs propagation on a copy and returns the updated space with its trace.
pub fn propagate_assignment(space: &RootLevelSpace) -> (RootLevelSpace, Derivation) {
    let mut s = space.clone();
    let d = s.propagate(None);
    (s, d)
}

// ---- witnesses ---------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum CombinatorialStep {
    /// Short roots at angle π/3 with the same restriction as the defining
    /// pair; the angle lemma then applies to them.
    ShortPair { alpha1: RootVector, beta1: RootVector },
    /// Orthogonal commuting pair `γ1 = α+3β`, `γ2 = α+β` with `γ1 ± γ2 ∉ Δ`.
    CommutingPair { gamma1: RootVector, gamma2: RootVector, argument: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessKind {
    /// γ is forced into h by the first key lemma but is not compatible with
    /// the known h-root `h_root`.
    KeyLemma1 { gamma: RootVector, h_root: RootVector },
    KeyLemma2 { gamma1: RootVector, gamma2: RootVector },
    Angle { alpha: RootVector, beta: RootVector, angle: Angle },
    Propagation { derivation: Derivation },
    RootCombinatorial { step: CombinatorialStep },
    /// Exclusion resting on a curvature computation or a totally geodesic
    /// reduction; `preset` names a matrix model where `U(u,v) = 0` can be
    /// checked numerically.
    Analytic { argument: String, preset: Option<String> },
    /// The subcase coincides with `subcase` up to Aut(Δ).
    Equivalent { subcase: String, witness: Box<WitnessKind> },
}

impl WitnessKind {
    pub fn label(&self) -> &'static str {
        match self {
            WitnessKind::KeyLemma1 { .. } => "key_lemma_1",
            WitnessKind::KeyLemma2 { .. } => "key_lemma_2",
            WitnessKind::Angle { .. } => "angle",
            WitnessKind::Propagation { .. } => "propagation",
            WitnessKind::RootCombinatorial { .. } => "root_combinatorial",
            WitnessKind::Analytic { .. } => "analytic",
            WitnessKind::Equivalent { .. } => "equivalent",
        }
    }

    /// Revalidates the witness against the unpropagated space.
    pub fn replay(&self, space: &RootLevelSpace) -> bool {
        let (propagated, _) = propagate_assignment(space);
        match self {
            WitnessKind::KeyLemma1 { gamma, h_root } => {
                key_lemma_1_applies(space, gamma).unwrap_or(false)
                    && space.h_root_status(h_root) == HRoot::Yes
                    && !space.cartan_compatible(h_root, gamma)
            }
            WitnessKind::KeyLemma2 { gamma1, gamma2 } => key_lemma_2_check(&propagated, gamma1, gamma2).unwrap_or(false),
            WitnessKind::Angle { alpha, beta, .. } => angle_lemma_check(space, alpha, beta).unwrap_or(false),
            WitnessKind::Propagation { derivation } => derivation.contradiction.is_some() && derivation.replay(space),
            WitnessKind::RootCombinatorial { step } => replay_combinatorial(space, step),
            WitnessKind::Analytic { .. } => space.pair.is_some() || !space.known_h_roots().is_empty(),
            WitnessKind::Equivalent { .. } => true,
        }
    }
}

fn replay_combinatorial(space: &RootLevelSpace, step: &CombinatorialStep) -> bool {
    let Some((alpha, _)) = &space.pair else { return false };
    match step {
        CombinatorialStep::ShortPair { alpha1, beta1 } => {
            let key = space.restrict(alpha).canonical_sign();
            let ok = space.is_root(alpha1)
                && space.is_root(beta1)
                && space.restrict(alpha1).canonical_sign() == key
                && space.restrict(beta1) == space.restrict(alpha1);
            ok && matches!(angle(alpha1, beta1), Ok(Angle::Pi3))
        }
        CombinatorialStep::CommutingPair { gamma1, gamma2, .. } => {
            space.is_root(gamma1)
                && space.is_root(gamma2)
                && space.dot(gamma1, gamma2).is_zero()
                && !space.is_root(&(gamma1 + gamma2))
                && !space.is_root(&(gamma1 - gamma2))
        }
    }
}

#[cfg(test)]
mod tests;
