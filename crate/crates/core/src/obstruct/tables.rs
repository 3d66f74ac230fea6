//! Case III subcase rows per family, with the expected outcome of each.

use serde::{Deserialize, Serialize};

use crate::qnum::QNum;
use crate::rootsys::{Family, RootVector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurvivorName {
    /// Concrete space, e.g. `S^7 = SO(8)/SO(7)`.
    pub instance: String,
    /// Family label shared by all ranks, e.g. `SO(2n)/SO(2n-1)`.
    pub family: String,
    pub dim_m: usize,
}

impl SurvivorName {
    pub fn new(instance: impl Into<String>, family: &str, dim_m: usize) -> Self {
        SurvivorName { instance: instance.into(), family: family.to_string(), dim_m }
    }

    pub fn sphere_so(n: usize) -> Self {
        Self::new(format!("S^{} = SO({})/SO({})", 2 * n - 1, 2 * n, 2 * n - 1), "SO(2n)/SO(2n-1)", 2 * n - 1)
    }

    pub fn sphere_un(n: usize) -> Self {
        Self::new(format!("S^{} = U({})/U({})", 2 * n - 1, n, n - 1), "U(n)/U(n-1)", 2 * n - 1)
    }

    pub fn sphere_sp_u1(n: usize) -> Self {
        Self::new(format!("S^{} = Sp({})U(1)/Sp({})U(1)", 4 * n - 1, n, n - 1), "Sp(n)U(1)/Sp(n-1)U(1)", 4 * n - 1)
    }

    pub fn sphere_sp_sp1(n: usize) -> Self {
        Self::new(format!("S^{} = Sp({})Sp(1)/Sp({})Sp(1)", 4 * n - 1, n, n - 1), "Sp(n)Sp(1)/Sp(n-1)Sp(1)", 4 * n - 1)
    }

    pub fn so4_so3() -> Self {
        Self::new("S^3 = SO(4)/SO(3)", "SO(4)/SO(3)", 3)
    }

    pub fn wilking() -> Self {
        Self::new("SU(3)xSO(3)/U(2)", "SU(3)xSO(3)/U(2)", 7)
    }

    pub fn aloff_wallach() -> Self {
        Self::new("U(3)/T2 (Aloff-Wallach)", "U(3)/T2", 7)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "expect", rename_all = "snake_case")]
pub enum Expect {
    Survivor { name: SurvivorName },
    KeyLemma2 { gamma1: RootVector, gamma2: RootVector },
    /// Propagation must reach a contradiction.
    Contradiction,
    Analytic { argument: String, preset: Option<String> },
    CoveredBy { id: String },
    /// Rank-two combinatorics in G2.
    Combinatorial,
    Angle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubcaseRow {
    pub id: String,
    pub family: Family,
    pub rank: usize,
    pub alpha: RootVector,
    pub beta: RootVector,
    pub citation: String,
    pub expect: Expect,
}

/// Integer combination of `e_i` (1-based) in the ambient space of `family`.
fn ev(family: Family, rank: usize, entries: &[(usize, i64)]) -> RootVector {
    let mut v = RootVector::zero(family.ambient_dim(rank));
    for &(i, c) in entries {
        v.coords[i - 1] += QNum::int(c);
    }
    v
}

fn halves(signs: &[i64], last: QNum) -> RootVector {
    let mut coords: Vec<QNum> = signs.iter().map(|&s| QNum::frac(s, 2)).collect();
    coords.push(last);
    RootVector::new(coords)
}

fn kl2(g1: RootVector, g2: RootVector) -> Expect {
    Expect::KeyLemma2 { gamma1: g1, gamma2: g2 }
}

fn covered(id: &str) -> Expect {
    Expect::CoveredBy { id: id.to_string() }
}

fn analytic(argument: &str, preset: Option<String>) -> Expect {
    Expect::Analytic { argument: argument.to_string(), preset }
}

/// Subcase rows valid for `family` at `rank`. Angle-lemma classes are not
/// listed here; they are generated from the root system.
pub fn case3_rows(family: Family, rank: usize) -> Vec<SubcaseRow> {
    let n = rank;
    let e = |entries: &[(usize, i64)]| ev(family, rank, entries);
    let mut rows = Vec::new();
    let mut push = |id: &str, alpha: RootVector, beta: RootVector, citation: String, expect: Expect| {
        rows.push(SubcaseRow { id: id.to_string(), family, rank, alpha, beta, citation, expect });
    };
    match family {
        Family::A if n >= 3 => {
            let (a, b) = (e(&[(1, 1), (4, -1)]), e(&[(3, 1), (2, -1)]));
            let cite = format!("type-A orthogonal pair e1-e4, e3-e2 (n={n})");
            match n {
                3 => push("A.S1", a, b, cite, Expect::Survivor { name: SurvivorName::sphere_so(3) }),
                4 => push("A.S2", a, b, cite, Expect::Survivor { name: SurvivorName::new("SU(5)/Sp(2)U(1)", "SU(5)/Sp(2)U(1)", 13) }),
                _ => push("A.S3", a, b, cite, kl2(e(&[(1, 1), (5, -1)]), e(&[(2, 1), (6, -1)]))),
            }
        }
        Family::B if n >= 2 => {
            push(
                "B.S1",
                e(&[(1, 1), (2, 1)]),
                e(&[(2, 1)]),
                format!("type-B long-short pair e1+e2, e2 (n={n})"),
                analytic(
                    "the flag spanned by the root planes of e1+e2 and e2 has vanishing flag curvature for every reversible invariant metric",
                    Some(format!("bn_excluded_subcase1({n})")),
                ),
            );
            push("B.S2", e(&[(1, 1), (2, 1)]), e(&[(2, 1), (1, -1)]), format!("type-B orthogonal long pair e1+e2, e2-e1 (n={n})"), covered("B.S1"));
            if n == 4 {
                push(
                    "B.S3",
                    e(&[(1, 1), (2, 1)]),
                    e(&[(3, -1), (4, -1)]),
                    "type-B disjoint long pair e1+e2, -e3-e4 (n=4)".into(),
                    Expect::Survivor { name: SurvivorName::new("S^15 = Spin(9)/Spin(7)", "Spin(9)/Spin(7)", 15) },
                );
            } else if n > 4 {
                push(
                    "B.S4",
                    e(&[(1, 1), (2, 1)]),
                    e(&[(3, -1), (4, -1)]),
                    format!("type-B disjoint long pair e1+e2, -e3-e4 (n={n})"),
                    kl2(e(&[(1, 1), (5, 1)]), e(&[(1, 1), (5, -1)])),
                );
            }
            if n == 3 {
                push(
                    "B.S5",
                    e(&[(1, 1), (2, 1)]),
                    e(&[(3, -1)]),
                    "type-B orthogonal long-short pair e1+e2, -e3 (n=3)".into(),
                    Expect::Survivor { name: SurvivorName::new("S^7 = Spin(7)/G2", "Spin(7)/G2", 7) },
                );
            } else if n > 3 {
                push(
                    "B.S6",
                    e(&[(1, 1), (2, 1)]),
                    e(&[(3, -1)]),
                    format!("type-B orthogonal long-short pair e1+e2, -e3 (n={n})"),
                    kl2(e(&[(1, 1), (4, 1)]), e(&[(1, 1), (4, -1)])),
                );
            }
            push("B.S7", e(&[(1, 1)]), e(&[(2, 1)]), format!("type-B orthogonal short pair e1, e2 (n={n})"), Expect::Contradiction);
            if n == 2 {
                push(
                    "B.S8",
                    e(&[(1, 1), (2, 1)]),
                    e(&[(1, -1)]),
                    "type-B obtuse pair e1+e2, -e1 (n=2)".into(),
                    Expect::Survivor { name: SurvivorName::new("Sp(2)/SU(2)", "Sp(2)/SU(2)", 7) },
                );
            } else {
                push(
                    "B.S9",
                    e(&[(1, 1), (2, 1)]),
                    e(&[(1, -1)]),
                    format!("type-B obtuse pair e1+e2, -e1 (n={n})"),
                    analytic(
                        "curvature of the flag through the root planes of e1+e3 and e1-e3 vanishes; the second key lemma does not apply to this pair (condition 4 fails)",
                        None,
                    ),
                );
            }
        }
        Family::C if n >= 2 => {
            push(
                "C.S1",
                e(&[(1, 2)]),
                e(&[(1, 1), (2, 1)]),
                format!("type-C long-short pair 2e1, e1+e2 (n={n})"),
                analytic(
                    "a totally geodesic sp(2) carries the type-B pair (e1+e2, e2) data, whose zero-curvature flag persists",
                    Some(format!("cn_excluded_subcase1({n})")),
                ),
            );
            push("C.S2", e(&[(1, 2)]), e(&[(2, 2)]), format!("type-C orthogonal long pair 2e1, 2e2 (n={n})"), covered("C.S1"));
            if n >= 3 {
                push(
                    "C.S3",
                    e(&[(1, 2)]),
                    e(&[(2, -1), (3, -1)]),
                    format!("type-C orthogonal long-short pair 2e1, -e2-e3 (n={n})"),
                    kl2(e(&[(2, 2)]), e(&[(3, 2)])),
                );
            }
            push("C.S4", e(&[(1, 1), (2, 1)]), e(&[(1, 1), (2, -1)]), format!("type-C orthogonal short pair e1+e2, e1-e2 (n={n})"), Expect::Contradiction);
            if n >= 4 {
                push(
                    "C.S5",
                    e(&[(1, 1), (2, 1)]),
                    e(&[(3, -1), (4, -1)]),
                    format!("type-C disjoint short pair e1+e2, -e3-e4 (n={n})"),
                    kl2(e(&[(1, 2)]), e(&[(2, 2)])),
                );
            }
            if n >= 3 {
                push(
                    "C.S6",
                    e(&[(1, 2)]),
                    e(&[(1, -1), (2, -1)]),
                    format!("type-C obtuse pair 2e1, -e1-e2 (n={n})"),
                    kl2(e(&[(1, 1), (3, 1)]), e(&[(2, 2)])),
                );
            }
        }
        Family::D if n >= 3 => {
            push(
                "D.S1",
                e(&[(1, 1), (2, 1)]),
                e(&[(2, 1), (1, -1)]),
                format!("type-D overlapping orthogonal pair e1+e2, e2-e1 (n={n})"),
                Expect::Survivor { name: SurvivorName::sphere_so(n) },
            );
            if n == 4 {
                push("D.S2", e(&[(1, 1), (2, 1)]), e(&[(3, -1), (4, -1)]), "type-D disjoint pair e1+e2, -e3-e4 (n=4, triality)".into(), covered("D.S1"));
            } else if n > 4 {
                push(
                    "D.S2",
                    e(&[(1, 1), (2, 1)]),
                    e(&[(3, -1), (4, -1)]),
                    format!("type-D disjoint pair e1+e2, -e3-e4 (n={n})"),
                    kl2(e(&[(1, 1), (5, 1)]), e(&[(1, 1), (5, -1)])),
                );
            }
        }
        Family::E6 => {
            let s3 = QNum::sqrt3() * QNum::frac(1, 2);
            push(
                "E6.S1",
                e(&[(1, 1), (2, 1)]),
                e(&[(2, 1), (1, -1)]),
                "E6 overlapping orthogonal pair e1+e2, e2-e1".into(),
                kl2(halves(&[-1, 1, 1, 1, 1], s3), halves(&[-1, -1, -1, -1, -1], s3)),
            );
            push("E6.S2", e(&[(1, 1), (2, 1)]), e(&[(3, -1), (4, -1)]), "E6 disjoint orthogonal pair e1+e2, -e3-e4 (outer automorphism)".into(), covered("E6.S1"));
        }
        Family::E7 => {
            let s2 = QNum::sqrt2() * QNum::frac(1, 2);
            push(
                "E7.S1",
                e(&[(1, 1), (2, 1)]),
                e(&[(2, 1), (1, -1)]),
                "E7 orthogonal pair e1+e2, e2-e1".into(),
                kl2(halves(&[-1, 1, 1, 1, 1, 1], s2), halves(&[1, -1, -1, -1, 1, 1], s2)),
            );
        }
        Family::E8 => {
            let h = QNum::frac(1, 2);
            push(
                "E8.S1",
                e(&[(1, 1), (2, 1)]),
                e(&[(2, 1), (1, -1)]),
                "E8 overlapping orthogonal pair e1+e2, e2-e1".into(),
                kl2(halves(&[1, 1, 1, 1, 1, 1, 1], h), halves(&[-1, -1, -1, -1, 1, 1, 1], h)),
            );
            push(
                "E8.S2",
                e(&[(1, 1), (2, 1)]),
                e(&[(3, -1), (4, -1)]),
                "E8 disjoint orthogonal pair e1+e2, -e3-e4".into(),
                kl2(e(&[(1, 1), (5, 1)]), e(&[(2, 1), (6, 1)])),
            );
        }
        Family::F4 => {
            push(
                "F4.S1",
                e(&[(1, 1), (2, 1)]),
                e(&[(2, 1)]),
                "F4 long-short pair e1+e2, e2".into(),
                analytic(
                    "the pair lies in the B4 subsystem; the type-B pair (e1+e2, e2) zero-curvature flag persists",
                    Some("bn_excluded_subcase1(4)".into()),
                ),
            );
            push("F4.S2", e(&[(1, 1), (2, 1)]), e(&[(2, 1), (1, -1)]), "F4 orthogonal long pair e1+e2, e2-e1".into(), covered("F4.S1"));
            push("F4.S3", e(&[(1, 1), (2, 1)]), e(&[(3, -1)]), "F4 orthogonal long-short pair e1+e2, -e3".into(), Expect::Contradiction);
            push("F4.S4", e(&[(1, 1)]), e(&[(2, -1)]), "F4 orthogonal short pair e1, -e2".into(), Expect::Contradiction);
            push("F4.S5", e(&[(1, 1), (2, 1)]), e(&[(2, -1)]), "F4 obtuse pair e1+e2, -e2".into(), Expect::Contradiction);
        }
        Family::G2 => {
            let s = QNum::sqrt3();
            let v = |x: QNum, y: QNum| RootVector::new(vec![x, y]);
            let half = QNum::frac(1, 2);
            push(
                "G2.S1",
                v(s * half, QNum::frac(3, 2)),
                v(QNum::zero(), QNum::one()),
                "G2 long-short pair at angle π/6".into(),
                Expect::Combinatorial,
            );
            push("G2.S2", v(s, QNum::zero()), v(QNum::zero(), QNum::one()), "G2 orthogonal long-short pair".into(), Expect::Combinatorial);
            push("G2.S3", v(s, QNum::zero()), v(-(s * half), half), "G2 long-short pair at angle 5π/6".into(), Expect::Combinatorial);
        }
        _ => {}
    }
    rows
}
