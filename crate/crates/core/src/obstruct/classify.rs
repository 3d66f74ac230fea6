//! Case detection and the per-case classification procedures.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::orbit::{config_of_pair, subsystem_type};
use super::tables::SurvivorName;
use super::verify::{g2_combinatorial, lookup_row, evaluate_subcase};
use super::*;
use crate::exact::OrthoBasis;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseLabel {
    I,
    II,
    III,
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseLabel::I => "Case I",
            CaseLabel::II => "Case II",
            CaseLabel::III => "Case III",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Survivor { name: SurvivorName },
    Excluded,
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub case: CaseLabel,
    pub outcome: Outcome,
    pub witness: Option<WitnessKind>,
    pub subcase: Option<String>,
    pub citation: String,
    pub notes: Vec<String>,
}

impl Verdict {
    pub(super) fn excluded(case: CaseLabel, witness: WitnessKind, citation: impl Into<String>) -> Self {
        Verdict { case, outcome: Outcome::Excluded, witness: Some(witness), subcase: None, citation: citation.into(), notes: Vec::new() }
    }

    pub(super) fn survivor(case: CaseLabel, name: SurvivorName, citation: impl Into<String>) -> Self {
        Verdict { case, outcome: Outcome::Survivor { name }, witness: None, subcase: None, citation: citation.into(), notes: Vec::new() }
    }

    pub(super) fn unresolved(case: CaseLabel, note: impl Into<String>) -> Self {
        Verdict {
            case,
            outcome: Outcome::Unresolved,
            witness: None,
            subcase: None,
            citation: "no obstruction found".into(),
            notes: vec![note.into()],
        }
    }

    pub fn is_excluded(&self) -> bool {
        self.outcome == Outcome::Excluded
    }

    pub fn survivor_name(&self) -> Option<&SurvivorName> {
        match &self.outcome {
            Outcome::Survivor { name } => Some(name),
            _ => None,
        }
    }
}

pub(super) fn witness_citation(w: &WitnessKind) -> String {
    match w {
        WitnessKind::KeyLemma1 { gamma, h_root } => format!("first key lemma forces {gamma} into h, incompatible with the h-root {h_root}"),
        WitnessKind::KeyLemma2 { gamma1, gamma2 } => format!("second key lemma on the pair {gamma1}, {gamma2}"),
        WitnessKind::Angle { angle, .. } => format!("angle lemma (angle {angle})"),
        WitnessKind::Propagation { derivation } => format!(
            "bracket propagation reaches a contradiction after {} steps",
            derivation.steps.len()
        ),
        WitnessKind::RootCombinatorial { .. } => "rank-two root combinatorics".into(),
        WitnessKind::Analytic { argument, .. } => argument.clone(),
        WitnessKind::Equivalent { subcase, .. } => format!("equivalent to subcase {subcase} under Aut(Δ)"),
    }
}

/// Case of the data and, for Cases II and III, a pair `(α, β)` with
/// `pr_h(α) = pr_h(β)` a root of h.
pub(super) fn detect_case(space: &RootLevelSpace) -> (CaseLabel, Option<(RootVector, RootVector)>) {
    let mut case2 = None;
    for b in 1..space.blocks.len() {
        if space.h_root[b] != HRoot::Yes {
            continue;
        }
        let ps = &space.blocks[b].planes;
        for (i, &p) in ps.iter().enumerate() {
            for &q in &ps[i + 1..] {
                let alpha = space.planes[p].clone();
                let beta = if space.restrictions[q] == space.restrictions[p] { space.planes[q].clone() } else { -&space.planes[q] };
                if space.plane_factor[p] == space.plane_factor[q] {
                    return (CaseLabel::III, Some((alpha, beta)));
                }
                case2.get_or_insert((alpha, beta));
            }
        }
    }
    match case2 {
        Some(pair) => (CaseLabel::II, Some(pair)),
        None => (CaseLabel::I, None),
    }
}

pub(super) fn kl1_witness(space: &RootLevelSpace) -> Option<WitnessKind> {
    let yes = space.known_h_roots();
    for (p, g) in space.planes.iter().enumerate() {
        let b = space.plane_block[p];
        if b == 0 || !space.in_t_h(g) || space.blocks[b].planes.len() != 1 {
            continue;
        }
        if let Some(h) = yes.iter().find(|h| !space.cartan_compatible(h, &space.blocks[b].key)) {
            return Some(WitnessKind::KeyLemma1 { gamma: g.clone(), h_root: h.clone() });
        }
    }
    None
}

/// Propagation followed by a second-key-lemma search.
pub(super) fn engine(space: &RootLevelSpace) -> (RootLevelSpace, Option<WitnessKind>) {
    let (s, d) = propagate_assignment(space);
    if d.contradiction.is_some() {
        let w = kl1_witness(space).unwrap_or(WitnessKind::Propagation { derivation: d });
        return (s, Some(w));
    }
    if let Some((gamma1, gamma2)) = s.find_key_lemma_2_pair() {
        return (s, Some(WitnessKind::KeyLemma2 { gamma1, gamma2 }));
    }
    (s, None)
}

pub fn classify_root_level(space: &RootLevelSpace) -> Result<Verdict> {
    match detect_case(space).0 {
        CaseLabel::I => classify_case1(space),
        CaseLabel::II => classify_case2(space),
        CaseLabel::III => classify_case3(space),
    }
}

/// Classifies an actual coset space from its numeric decomposition.
pub fn classify(space: &CosetSpace) -> Result<Verdict> {
    classify_root_level(&RootLevelSpace::from_coset(space)?)
}

/// Like [`classify`], also recording the case on the space.
pub fn classify_and_label(space: &mut CosetSpace) -> Result<Verdict> {
    let v = classify(space)?;
    space.meta.case_label = Some(v.case.to_string());
    Ok(v)
}

fn local(space: &RootLevelSpace, f: usize, v: &RootVector) -> RootVector {
    let fd = &space.factors[f];
    RootVector::new(v.coords[fd.offset..fd.offset + fd.len].to_vec())
}

fn factor_roots(space: &RootLevelSpace, f: usize) -> Vec<RootVector> {
    (0..space.planes.len()).filter(|&p| space.plane_factor[p] == f).map(|p| local(space, f, &space.planes[p])).collect()
}

pub fn classify_case3(space: &RootLevelSpace) -> Result<Verdict> {
    let (case, pair) = detect_case(space);
    if case != CaseLabel::III {
        return Err(Error::WrongCase(format!("expected Case III, found {case}")));
    }
    let (alpha, beta) = pair.expect("Case III pair");
    let f = space.factor_of(&alpha).expect("root");
    if angle_lemma_check(space, &alpha, &beta)? {
        let a = angle(&alpha, &beta)?;
        let w = WitnessKind::Angle { alpha, beta, angle: a };
        let c = witness_citation(&w);
        return Ok(Verdict::excluded(case, w, c));
    }
    if space.factors[f].family == Family::G2 {
        let mut s = space.clone();
        s.pair = Some((alpha.clone(), beta.clone()));
        if let Some(step) = g2_combinatorial(&s) {
            let w = WitnessKind::RootCombinatorial { step };
            let c = witness_citation(&w);
            return Ok(Verdict::excluded(case, w, c));
        }
    }
    let (_, w) = engine(space);
    if let Some(w) = w {
        let c = witness_citation(&w);
        return Ok(Verdict::excluded(case, w, c));
    }
    let fd = &space.factors[f];
    let cfg = config_of_pair(&local(space, f, &alpha), &local(space, f, &beta));
    match lookup_row(fd.family, fd.rank, &cfg)? {
        Some(row) => {
            let rep = evaluate_subcase(&row)?;
            let mut v = rep.verdict;
            v.subcase = Some(row.id.clone());
            v.citation = row.citation.clone();
            v.notes.push(format!("matches subcase {} up to Aut(Δ)", row.id));
            Ok(v)
        }
        None => Ok(Verdict::unresolved(case, format!("no tabulated subcase of {} matches this configuration", fd.family.label(fd.rank)))),
    }
}

pub fn classify_case2(space: &RootLevelSpace) -> Result<Verdict> {
    let (case, pair) = detect_case(space);
    if case != CaseLabel::II {
        return Err(Error::WrongCase(format!("expected Case II, found {case}")));
    }
    let (alpha, beta) = pair.expect("Case II pair");
    let (s, w) = engine(space);
    if let Some(w) = w {
        let c = witness_citation(&w);
        return Ok(Verdict::excluded(case, w, c));
    }
    let fa = space.factor_of(&alpha).expect("root");
    let fb = space.factor_of(&beta).expect("root");
    let (g2, beta2) = if space.factors[fa].rank == 1 {
        (fb, beta)
    } else if space.factors[fb].rank == 1 {
        (fa, alpha)
    } else {
        return Ok(Verdict::unresolved(case, "neither factor of the Case II pair has rank one"));
    };
    let pb = s.plane_of(&beta2).expect("root");
    let mut k_roots = vec![local(&s, g2, &beta2)];
    for p in (0..s.planes.len()).filter(|&p| s.plane_factor[p] == g2 && p != pb) {
        match s.state[p] {
            PlaneState::InH => k_roots.push(local(&s, g2, &s.planes[p])),
            PlaneState::InM => {}
            st => return Ok(Verdict::unresolved(case, format!("plane of {} is {st} after propagation", s.planes[p]))),
        }
    }
    let fd = &s.factors[g2];
    let g2_type = subsystem_type(&factor_roots(&s, g2)).remove(0);
    let metric = Metric::euclidean(fd.len);
    let k_rank = OrthoBasis::new(&metric, &k_roots).dim();
    let abelian = fd.rank - k_rank;
    let k_type = subsystem_type(&k_roots);
    let b_local = &k_roots[0];
    let max = factor_roots(&s, g2).iter().map(|r| r.norm2()).max().expect("roots");
    let beta_long = b_local.norm2() == max;
    let rest: Vec<RootVector> = k_roots[1..].to_vec();
    let rest_orth = rest.iter().all(|r| r.dot(b_local).is_zero());
    let n = fd.rank;
    let symplectic = g2_type == "B2" || g2_type == format!("C{n}");
    let c_rest = match n {
        2 => rest.len() == 1 && rest[0].norm2() == max,
        3 => subsystem_type(&rest) == ["B2"],
        _ => subsystem_type(&rest) == [format!("C{}", n - 1)],
    };
    let cite = format!("Wallach pair (g2, k) = ({g2_type}, {})", if k_type.is_empty() { "0".into() } else { k_type.join("+") });
    let name = if g2_type == "A1" && k_type == ["A1"] && abelian == 0 {
        Some(SurvivorName::so4_so3())
    } else if g2_type == "A2" && k_type == ["A1"] && abelian == 1 {
        Some(SurvivorName::wilking())
    } else if symplectic && n >= 2 && beta_long && rest_orth && c_rest && abelian == 0 {
        Some(SurvivorName::sphere_sp_sp1(n))
    } else {
        None
    };
    Ok(match name {
        Some(name) => Verdict::survivor(case, name, cite),
        None => {
            let argument = format!("{cite} fails Wallach's condition (A)");
            Verdict::excluded(case, WitnessKind::Analytic { argument: argument.clone(), preset: None }, argument)
        }
    })
}

pub fn classify_case1(space: &RootLevelSpace) -> Result<Verdict> {
    let (case, _) = detect_case(space);
    if case != CaseLabel::I {
        return Err(Error::WrongCase(format!("expected Case I, found {case}")));
    }
    let comps: Vec<usize> = (0..space.factors.len()).filter(|&k| !space.w_component(Some(k)).is_zero()).collect();
    let central = !space.w_component(None).is_zero();
    if comps.is_empty() {
        return Err(Error::Hypothesis("t∩m is central; the coset is a circle".into()));
    }
    let (s, w) = engine(space);
    if let Some(w) = w {
        let c = witness_citation(&w);
        return Ok(Verdict::excluded(case, w, c));
    }
    if central {
        if comps.len() > 1 {
            return Ok(Verdict::unresolved(case, "t∩m meets the centre and several simple factors, but no key-lemma pair was found"));
        }
        return Ok(case1_wallach(&s, comps[0]));
    }
    if comps.len() == 1 {
        return Ok(Verdict::unresolved(case, "simple reduction: t∩m lies in one simple factor and the centre is in h"));
    }
    let argument;
    let mut preset = None;
    if comps.len() == 2 {
        let on_root = |k: usize| {
            let wk = space.w_component(Some(k));
            (0..space.planes.len()).any(|p| space.plane_factor[p] == k && space.in_line(&space.planes[p], &wk))
        };
        let sub1 = comps.iter().any(|&k| space.factors[k].rank == 1) && comps.iter().all(|&k| on_root(k));
        argument = if sub1 {
            "two simple factors, t∩m diagonal in a rank-one pair: the flag of the two root planes has zero curvature"
        } else {
            "two simple factors, t∩m not along a root of the larger factor: a zero-curvature flag exists"
        };
        if sub1 && space.factors.len() == 2 && space.abelian_dim == 0 && comps.iter().all(|&k| space.factors[k].rank == 1) {
            let primal = |k: usize| {
                let o = space.factors[k].offset;
                space.w.coords[o] * QNum::rational(space.metric.weights[o])
            };
            let mut c = primal(comps[1]) / primal(comps[0]);
            if c.abs() < QNum::one() {
                c = c.inv().expect("nonzero");
            }
            preset = Some(format!("a1a1_diagonal({c})"));
        }
    } else {
        argument = "three or more simple factors meet t∩m: a zero-curvature flag exists";
    }
    Ok(Verdict::excluded(case, WitnessKind::Analytic { argument: argument.into(), preset }, argument))
}

fn case1_wallach(s: &RootLevelSpace, f: usize) -> Verdict {
    let case = CaseLabel::I;
    let fd = &s.factors[f];
    let mut h_roots = Vec::new();
    for p in (0..s.planes.len()).filter(|&p| s.plane_factor[p] == f) {
        match s.state[p] {
            PlaneState::InH => h_roots.push(local(s, f, &s.planes[p])),
            PlaneState::InM => {}
            st => return Verdict::unresolved(case, format!("plane of {} is {st} after propagation", s.planes[p])),
        }
    }
    let all = factor_roots(s, f);
    let g1 = subsystem_type(&all).remove(0);
    let ht = subsystem_type(&h_roots);
    let max = all.iter().map(|r| r.norm2()).max().expect("roots");
    let n = fd.rank;
    let cite = format!("Wallach pair (g1, h) = ({g1}, {}+R)", if ht.is_empty() { "0".into() } else { ht.join("+") });
    let a_n = g1 == format!("A{n}") && if n == 1 { ht.is_empty() } else { ht == [format!("A{}", n - 1)] };
    let symplectic = (g1 == "B2" || g1 == format!("C{n}")) && n >= 2;
    let c_rest = match n {
        2 => h_roots.len() == 1 && h_roots[0].norm2() == max,
        3 => ht == ["B2"],
        _ => ht == [format!("C{}", n - 1)],
    };
    let name = if g1 == "A2" && ht.is_empty() {
        Some(SurvivorName::aloff_wallach())
    } else if a_n {
        Some(SurvivorName::sphere_un(n + 1))
    } else if symplectic && c_rest {
        Some(SurvivorName::sphere_sp_u1(n))
    } else {
        None
    };
    match name {
        Some(name) => Verdict::survivor(case, name, cite),
        None => {
            let argument = format!("{cite} fails Wallach's condition (A)");
            Verdict::excluded(case, WitnessKind::Analytic { argument: argument.clone(), preset: None }, argument)
        }
    }
}
