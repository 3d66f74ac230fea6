use proptest::prelude::*;

use super::*;
use crate::coset::preset;

fn rv(xs: &[i64]) -> RootVector {
    RootVector::from_ints(xs)
}

fn one() -> Rational {
    Rational::from_integer(1)
}

fn row(family: Family, rank: usize, id: &str) -> SubcaseRow {
    case3_rows(family, rank).into_iter().find(|r| r.id == id).unwrap_or_else(|| panic!("no row {id} at {family:?}{rank}"))
}

fn a3_subcase1() -> RootLevelSpace {
    RootLevelSpace::from_pair(Family::A, 3, &rv(&[1, 0, 0, -1]), &rv(&[0, -1, 1, 0])).unwrap()
}

#[test]
fn key_lemma_1_examples() {
    let s = a3_subcase1();
    assert_eq!(s.w, rv(&[1, 1, -1, -1]));
    assert!(key_lemma_1_applies(&s, &rv(&[1, -1, 0, 0])).unwrap());
    assert!(key_lemma_1_applies(&s, &rv(&[0, 0, 1, -1])).unwrap());

    let b2 = RootLevelSpace::new(&[(Family::B, 2, one())], 0, rv(&[1, 0])).unwrap();
    assert!(!key_lemma_1_applies(&b2, &rv(&[0, 1])).unwrap());
    assert!(matches!(key_lemma_1_applies(&b2, &rv(&[1, 1])), Err(Error::Hypothesis(_))));
    assert!(matches!(key_lemma_1_applies(&b2, &rv(&[2, 1])), Err(Error::NotARoot(_))));
}

#[test]
fn tabulated_key_lemma_2_pairs_replay() {
    let mut seen = 0;
    for (family, rank) in [
        (Family::A, 5),
        (Family::A, 6),
        (Family::B, 5),
        (Family::B, 6),
        (Family::C, 4),
        (Family::C, 5),
        (Family::D, 5),
        (Family::D, 6),
        (Family::E6, 6),
        (Family::E7, 7),
        (Family::E8, 8),
    ] {
        for r in case3_rows(family, rank) {
            let Expect::KeyLemma2 { gamma1, gamma2 } = &r.expect else { continue };
            let (s, _) = propagate_assignment(&RootLevelSpace::from_pair(family, rank, &r.alpha, &r.beta).unwrap());
            assert!(key_lemma_2_check(&s, gamma1, gamma2).unwrap(), "{family:?}{rank} {}", r.id);
            seen += 1;
        }
    }
    assert!(seen >= 12);
}

#[test]
fn type_a_and_e8_pairs() {
    let r = row(Family::A, 5, "A.S3");
    let (s, _) = propagate_assignment(&RootLevelSpace::from_pair(Family::A, 5, &r.alpha, &r.beta).unwrap());
    assert!(key_lemma_2_check(&s, &rv(&[1, 0, 0, 0, -1, 0]), &rv(&[0, 1, 0, 0, 0, -1])).unwrap());

    let r = row(Family::E8, 8, "E8.S2");
    let (s, _) = propagate_assignment(&RootLevelSpace::from_pair(Family::E8, 8, &r.alpha, &r.beta).unwrap());
    assert!(key_lemma_2_check(&s, &rv(&[1, 0, 0, 0, 1, 0, 0, 0]), &rv(&[0, 1, 0, 0, 0, 1, 0, 0])).unwrap());
}

#[test]
fn type_b_subcase_9_pair_fails_condition_4() {
    for n in 3..=5 {
        let r = row(Family::B, n, "B.S9");
        let (s, _) = propagate_assignment(&RootLevelSpace::from_pair(Family::B, n, &r.alpha, &r.beta).unwrap());
        let mut g1 = vec![0; n];
        g1[0] = 1;
        g1[2] = 1;
        let mut g2 = g1.clone();
        g2[2] = -1;
        let c = key_lemma_2_conditions(&s, &rv(&g1), &rv(&g2)).unwrap();
        assert_eq!(c, [true, true, true, false], "B{n}");
    }
}

#[test]
fn key_lemma_2_rejects_bad_input() {
    let s = a3_subcase1();
    assert!(matches!(key_lemma_2_check(&s, &rv(&[1, 1, 0, 0]), &rv(&[1, -1, 0, 0])), Err(Error::NotARoot(_))));
    assert!(matches!(key_lemma_2_check(&s, &rv(&[1, -1, 0, 0]), &rv(&[-1, 1, 0, 0])), Err(Error::Collinear)));
}

#[test]
fn angle_lemma_examples() {
    let (a, b) = (rv(&[1, -1, 0]), rv(&[1, 0, -1]));
    let s = RootLevelSpace::from_pair(Family::A, 2, &a, &b).unwrap();
    assert!(angle_lemma_check(&s, &a, &b).unwrap());

    let s = a3_subcase1();
    let (a, b) = s.pair.clone().unwrap();
    assert!(!angle_lemma_check(&s, &a, &b).unwrap());

    let g2 = build_root_system_any_rank(Family::G2, 2).unwrap();
    let long = g2.positive_roots().into_iter().filter(|r| r.norm2() == g2.max_norm2()).collect::<Vec<_>>();
    let (a, b) = long
        .iter()
        .flat_map(|a| long.iter().map(move |b| (a.clone(), b.clone())))
        .find(|(a, b)| matches!(angle(a, b), Ok(Angle::Pi3)))
        .unwrap();
    let s = RootLevelSpace::from_pair(Family::G2, 2, &a, &b).unwrap();
    assert!(angle_lemma_check(&s, &a, &b).unwrap());
}

fn has_step(d: &Derivation, root: &RootVector, state: PlaneState) -> bool {
    let target = Fact::Plane { root: root.clone(), state };
    d.steps.iter().any(|s| s.conclusion == target) || d.contradiction.as_ref().is_some_and(|c| c.step.conclusion == target)
}

#[test]
fn type_f4_chains() {
    let r = row(Family::F4, 4, "F4.S3");
    let s = RootLevelSpace::from_pair(Family::F4, 4, &r.alpha, &r.beta).unwrap();
    let (_, d) = propagate_assignment(&s);
    assert!(d.contradiction.is_some());
    assert!(d.replay(&s));

    let r = row(Family::F4, 4, "F4.S5");
    let s = RootLevelSpace::from_pair(Family::F4, 4, &r.alpha, &r.beta).unwrap();
    let (_, d) = propagate_assignment(&s);
    assert!(has_step(&d, &rv(&[0, 1, 0, 0]), PlaneState::InM));
    assert!(d.contradiction.is_some());
}

#[test]
fn case_detection() {
    let v = classify_root_level(&a3_subcase1()).unwrap();
    assert_eq!(v.case, CaseLabel::III);
    let v = classify(&preset("sphere_spn_sp1", &["3"]).unwrap()).unwrap();
    assert_eq!(v.case, CaseLabel::II);
    let v = classify(&preset("sphere_un", &["3"]).unwrap()).unwrap();
    assert_eq!(v.case, CaseLabel::I);
}

#[test]
fn rank_inequality_is_rejected() {
    let s = preset("sphere_un", &["3"]).unwrap();
    let mut bad = s.clone();
    bad.t_m.push(bad.t_m[0].clone());
    assert!(matches!(RootLevelSpace::from_coset(&bad), Err(Error::RankEquality(_))));
}

#[test]
fn presets_classify() {
    let survivors = [
        ("sphere_so2n", vec!["3"], "SO(2n)/SO(2n-1)"),
        ("sphere_so2n", vec!["4"], "SO(2n)/SO(2n-1)"),
        ("berger_sp2", vec![], "Sp(2)/SU(2)"),
        ("sphere_spn_sp1", vec!["2"], "Sp(n)Sp(1)/Sp(n-1)Sp(1)"),
        ("sphere_un", vec!["3"], "U(n)/U(n-1)"),
        ("sphere_spn_u1", vec!["2"], "Sp(n)U(1)/Sp(n-1)U(1)"),
        ("aloff_wallach", vec!["1", "2"], "U(3)/T2"),
    ];
    for (name, params, family) in survivors {
        let v = classify(&preset(name, &params).unwrap()).unwrap();
        assert_eq!(v.survivor_name().map(|n| n.family.as_str()), Some(family), "{name}{params:?}: {v:?}");
    }
    for (name, params) in [("bn_excluded_subcase1", vec!["2"]), ("cn_excluded_subcase1", vec!["2"]), ("a1a1_diagonal", vec!["2"])] {
        let v = classify(&preset(name, &params).unwrap()).unwrap();
        assert!(v.is_excluded(), "{name}: {v:?}");
        assert!(v.witness.is_some());
    }
}

#[test]
fn classify_and_label_records_case() {
    let mut s = preset("sphere_un", &["3"]).unwrap();
    classify_and_label(&mut s).unwrap();
    assert_eq!(s.meta.case_label.as_deref(), Some("Case I"));
}

#[test]
fn simple_case_1_is_unresolved() {
    let s = RootLevelSpace::new(&[(Family::A, 2, one())], 0, rv(&[1, 1, -2])).unwrap();
    let v = classify_case1(&s).unwrap();
    assert_eq!(v.outcome, Outcome::Unresolved);
    assert!(matches!(classify_case1(&a3_subcase1()), Err(Error::WrongCase(_))));
}

#[test]
fn case3_tables_at_low_rank() {
    for (family, rank) in [
        (Family::A, 3),
        (Family::A, 4),
        (Family::B, 2),
        (Family::B, 3),
        (Family::B, 4),
        (Family::C, 3),
        (Family::C, 4),
        (Family::D, 4),
        (Family::F4, 4),
        (Family::G2, 2),
    ] {
        let reports = enumerate_case3(family, rank).unwrap();
        for r in &reports {
            assert!(r.consistent, "{family:?}{rank} {}: {:?}", r.subcase.id, r.verdict);
            if let Some(name) = r.verdict.survivor_name() {
                assert_eq!(name.dim_m % 2, 1);
            }
        }
    }
    let b4 = enumerate_case3(Family::B, 4).unwrap();
    let s3 = b4.iter().find(|r| r.subcase.id == "B.S3").unwrap();
    assert_eq!(s3.verdict.survivor_name().unwrap().family, "Spin(9)/Spin(7)");
    assert!(enumerate_case3(Family::C, 3).unwrap().iter().all(|r| r.verdict.is_excluded()));
}

#[test]
fn type_g2_is_combinatorial() {
    let reports = enumerate_case3(Family::G2, 2).unwrap();
    assert!(reports
        .iter()
        .filter(|r| r.subcase.id.starts_with("G2."))
        .all(|r| matches!(r.verdict.witness, Some(WitnessKind::RootCombinatorial { .. }))));
}

#[test]
fn covered_rows_are_orbit_equivalent() {
    for (family, rank) in [(Family::B, 2), (Family::B, 3), (Family::B, 4), (Family::C, 3), (Family::C, 4), (Family::D, 4), (Family::F4, 4)] {
        let rows = case3_rows(family, rank);
        let idx = OrbitIndex::new(family, rank).unwrap();
        for r in &rows {
            let Expect::CoveredBy { id } = &r.expect else { continue };
            let t = rows.iter().find(|t| t.id == *id).unwrap();
            assert!(
                idx.equivalent(&config_of_pair(&r.alpha, &r.beta), &config_of_pair(&t.alpha, &t.beta)),
                "{family:?}{rank} {} vs {id}",
                r.id
            );
        }
    }
}

fn replay_all(family: Family, rank: usize) {
    for r in enumerate_case3(family, rank).unwrap() {
        let Some(w) = &r.verdict.witness else { continue };
        let s = RootLevelSpace::from_pair(family, rank, &r.subcase.alpha, &r.subcase.beta).unwrap();
        let inner = match w {
            WitnessKind::Equivalent { witness, subcase } => {
                let t = row(family, rank, subcase);
                assert!(witness.replay(&RootLevelSpace::from_pair(family, rank, &t.alpha, &t.beta).unwrap()));
                continue;
            }
            w => w,
        };
        assert!(inner.replay(&s), "{family:?}{rank} {} {}", r.subcase.id, inner.label());
    }
}

#[test]
fn witnesses_replay() {
    for (family, rank) in [(Family::A, 5), (Family::B, 3), (Family::B, 5), (Family::C, 4), (Family::D, 5), (Family::F4, 4), (Family::G2, 2), (Family::E6, 6)] {
        replay_all(family, rank);
    }
}

#[test]
fn tampered_witness_fails_replay() {
    let r = row(Family::A, 5, "A.S3");
    let s = RootLevelSpace::from_pair(Family::A, 5, &r.alpha, &r.beta).unwrap();
    let bad = WitnessKind::KeyLemma2 { gamma1: rv(&[1, -1, 0, 0, 0, 0]), gamma2: rv(&[0, 0, 1, -1, 0, 0]) };
    assert!(!bad.replay(&s));

    let f = row(Family::F4, 4, "F4.S3");
    let s = RootLevelSpace::from_pair(Family::F4, 4, &f.alpha, &f.beta).unwrap();
    let (_, mut d) = propagate_assignment(&s);
    let last = d.steps.len() - 1;
    d.steps.swap(0, last);
    assert!(d.steps.len() < 2 || !d.replay(&s));
}

#[test]
fn verify_small_rank() {
    for part in 1..=3 {
        let r = verify_theorem(part, 4).unwrap();
        assert!(r.unexpected.is_empty() && r.inconsistent.is_empty() && r.even_dimensional.is_empty(), "part {part}: {r:?}");
    }
    assert!(verify_theorem(4, 4).is_err());
}

fn final_state(s: &RootLevelSpace, seed: Option<u64>) -> (Vec<PlaneState>, Vec<HRoot>, bool) {
    let mut s = s.clone();
    let d = s.propagate(seed);
    (s.state, s.h_root, d.contradiction.is_some())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn propagation_is_order_independent(seed in any::<u64>(), which in 0usize..4) {
        let (family, rank, id) = [(Family::A, 4, "A.S2"), (Family::B, 3, "B.S5"), (Family::C, 4, "C.S5"), (Family::F4, 4, "F4.S5")][which];
        let r = row(family, rank, id);
        let s = RootLevelSpace::from_pair(family, rank, &r.alpha, &r.beta).unwrap();
        let base = final_state(&s, None);
        let shuffled = final_state(&s, Some(seed));
        if base.2 {
            prop_assert!(shuffled.2);
        } else {
            prop_assert_eq!(base, shuffled);
        }
    }
}
