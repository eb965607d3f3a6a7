use super::*;
use crate::testkit;

fn names(list: &str) -> Vec<String> {
    list.split_whitespace().map(String::from).collect()
}

/// `0, a, a', b, b', 1` with the two blocks {a, a'} and {b, b'}.
fn mo2() -> OrthoLattice {
    let pairs = [(0, 1), (0, 2), (0, 3), (0, 4), (1, 5), (2, 5), (3, 5), (4, 5)];
    OrthoLattice::from_relation(names("O a a' b b' U"), &pairs, vec![5, 2, 1, 4, 3, 0]).unwrap()
}

/// Power set of {x, y}.
fn boolean4() -> OrthoLattice {
    let pairs = [(0, 1), (0, 2), (1, 3), (2, 3)];
    OrthoLattice::from_relation(names("none x y both"), &pairs, vec![3, 2, 1, 0]).unwrap()
}

#[test]
fn boolean_lattice_passes_everything() {
    let l = boolean4();
    let report = check_ortholattice(&l);
    assert!(report.passed(), "{report}");
    assert!(l.is_boolean());
    assert_eq!(report.get("lattice.distributive").unwrap().detail.as_deref(), Some("distributive (Boolean)"));
    assert_eq!((l.bottom(), l.top()), (Some(0), Some(3)));
    assert!(l.orthogonal(1, 2));
    assert!(!l.orthogonal(1, 3));
}

#[test]
fn mo2_is_an_orthomodular_non_distributive_ortholattice() {
    let l = mo2();
    let report = check_ortholattice(&l);
    assert!(report.passed(), "{report}");
    assert!(!l.is_boolean());
    let (a, b, c) = l.distributivity_witness().unwrap();
    assert_ne!(l.meet(a, l.join(b, c)), l.join(l.meet(a, b), l.meet(a, c)));
    assert!(l.orthomodularity_witness().is_none());
    assert_eq!(l.meet(1, 3), 0);
    assert_eq!(l.join(1, 3), 5);
}

#[test]
fn exhaustive_distributivity_agrees_with_the_witness_search() {
    for l in [mo2(), boolean4()] {
        let n = l.len();
        let mut failures = 0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if l.meet(a, l.join(b, c)) != l.join(l.meet(a, b), l.meet(a, c)) {
                        failures += 1;
                    }
                }
            }
        }
        assert_eq!(failures == 0, l.distributivity_witness().is_none());
    }
}

#[test]
fn broken_involution_is_witnessed() {
    let l = mo2();
    let mut ortho: Vec<usize> = (0..l.len()).map(|a| l.ortho(a)).collect();
    ortho[2] = 3; // a' ↦ b, so a'' = b
    let broken = OrthoLattice::new(
        l.elements().to_vec(),
        (0..6).map(|a| (0..6).map(|b| l.leq(a, b)).collect()).collect(),
        (0..6).map(|a| (0..6).map(|b| l.meet(a, b)).collect()).collect(),
        (0..6).map(|a| (0..6).map(|b| l.join(a, b)).collect()).collect(),
        ortho,
    )
    .unwrap();
    let report = check_ortholattice(&broken);
    let check = report.get("lattice.ortho_involution").unwrap();
    assert!(check.is_failure());
    assert!(check.witnesses[0].starts_with("a: a⊥⊥ = b"), "{:?}", check.witnesses);
}

#[test]
fn wrong_meet_table_is_reported() {
    let l = boolean4();
    let mut meet: Vec<Vec<usize>> = (0..4).map(|a| (0..4).map(|b| l.meet(a, b)).collect()).collect();
    meet[1][2] = 1;
    let bad = OrthoLattice::new(
        l.elements().to_vec(),
        (0..4).map(|a| (0..4).map(|b| l.leq(a, b)).collect()).collect(),
        meet,
        (0..4).map(|a| (0..4).map(|b| l.join(a, b)).collect()).collect(),
        (0..4).map(|a| l.ortho(a)).collect(),
    )
    .unwrap();
    assert!(check_ortholattice(&bad).get("lattice.meet_join").unwrap().is_failure());
}

#[test]
fn non_lattice_order_is_rejected() {
    // two incomparable upper bounds of x and y
    let pairs = [(0, 1), (0, 2), (1, 3), (2, 3), (1, 4), (2, 4), (3, 5), (4, 5)];
    let err = OrthoLattice::from_relation(names("o x y p q u"), &pairs, vec![5, 2, 1, 4, 3, 0]).unwrap_err();
    assert!(matches!(err, LatticeError::NotALattice { .. }));
}

#[test]
fn mo2_gpm_failure_names_the_orthogonal_pair() {
    let l = mo2();
    let report = check_gpm(&[0.0, 0.7, 0.2, 0.5, 0.5, 1.0], &l, 1e-9).unwrap();
    assert!(report.exhaustive);
    match &report.violations[0] {
        GpmViolation::Additivity { family, sum, join, .. } => {
            assert_eq!(family, &vec!["a".to_string(), "a'".to_string()]);
            assert!((sum - 0.9).abs() < 1e-12);
            assert_eq!(join, "U");
        }
        other => panic!("unexpected {other}"),
    }
    assert_eq!(report.violations.len(), 1);
    assert!(check_gpm(&[0.0, 0.7, 0.3, 0.5, 0.5, 1.0], &l, 1e-9).unwrap().passed());
    let top = check_gpm(&[0.0, 0.5, 0.5, 0.5, 0.5, 0.9], &l, 1e-9).unwrap();
    assert!(top.violations.iter().any(|v| matches!(v, GpmViolation::TopMass { .. })));
}

#[test]
fn orthogonal_families_of_the_boolean_cube() {
    // power set of {x, y, z}: 7 non-empty sets
    let n = 8;
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && a & b == a {
                pairs.push((a, b));
            }
        }
    }
    let els: Vec<String> = (0..n).map(|a| format!("s{a}")).collect();
    let l = OrthoLattice::from_relation(els, &pairs, (0..n).map(|a| 7 - a).collect()).unwrap();
    assert!(l.is_boolean());
    let (families, exhaustive) = orthogonal_families(&l);
    assert!(exhaustive);
    // brute force over subsets of non-empty elements
    let mut expected = 0;
    for mask in 0u32..(1 << 7) {
        let members: Vec<usize> = (1..8).filter(|a| mask & (1 << (a - 1)) != 0).collect();
        if members.len() >= 2 && members.iter().all(|&a| members.iter().all(|&b| a == b || a & b == 0)) {
            expected += 1;
        }
    }
    assert_eq!(families.len(), expected);
    // a classical measure on atoms passes
    let atom = [0.2, 0.3, 0.5];
    let measure: Vec<f64> = (0..n).map(|a| (0..3).filter(|i| a & (1 << i) != 0).map(|i| atom[i]).sum()).collect();
    assert!(check_gpm(&measure, &l, 1e-12).unwrap().passed());
}

fn two_state_classical() -> ContextualModel {
    testkit::model(
        ("E F G", "S1 S2 S3", "c1 c2"),
        &[("S1 E@c1 E@c2 G@c1 G@c2", 0.5), ("S2 F@c1 F@c2 G@c1 G@c2", 0.25), ("S3", 0.25)],
        &[("M", "E F G", &[("c1", 1.0)])],
    )
}

#[test]
fn family_and_preorder_from_a_model() {
    let m = two_state_classical();
    let seq = StateProbabilityFamily::from_model(&m, Execution::Sequential).unwrap();
    let par = StateProbabilityFamily::from_model(&m, Execution::Parallel).unwrap();
    assert_eq!(seq, par);
    assert_eq!(seq.row(0), &[1.0, 0.0, 1.0]);
    assert_eq!(seq.column(1), vec![0.0, 1.0, 0.0]);
    let pre = PropertyPreorder::from_family(&seq, tolerance::CMP);
    assert!(pre.leq(0, 2) && pre.leq(1, 2));
    assert!(!pre.leq(0, 1) && !pre.leq(1, 0));
    assert!(!pre.leq(2, 0));
    assert!(pre.verify().passed());
    assert_eq!(pre.classes(), vec![vec![0], vec![1], vec![2]]);
    assert_eq!(build_preorder(&m, Execution::Parallel, tolerance::CMP).unwrap(), pre);
}

#[test]
fn identical_columns_share_a_class() {
    let fam = StateProbabilityFamily::new(
        names("S T"),
        names("A B C"),
        vec![vec![0.5, 0.5, 0.1], vec![0.25, 0.25, 1.0]],
    )
    .unwrap();
    let pre = PropertyPreorder::from_family(&fam, 1e-9);
    assert_eq!(pre.classes(), vec![vec![0, 1], vec![2]]);
    assert_eq!(pre.quotient(), vec![vec![true, false], vec![false, true]]);
    assert!(StateProbabilityFamily::new(names("S"), names("A"), vec![vec![1.5]]).is_err());
}

#[test]
fn first_kind_transforms_are_validated() {
    let m = two_state_classical();
    let fam = StateProbabilityFamily::from_model(&m, Execution::Sequential).unwrap();
    let g = FirstKindTransform::identity(2, [0, 1]);
    assert!(g.validate(&fam, 1e-9).is_ok());
    assert!(matches!(
        FirstKindTransform::identity(2, [0]).validate(&fam, 1e-9),
        Err(LatticeError::InvalidTransform { .. })
    ));
    let bad = FirstKindTransform::new(2, [(0, 2), (1, 1)].into());
    assert!(bad.validate(&fam, 1e-9).is_err());
    // S2 is sent to S1, which possesses G as well
    let moved = FirstKindTransform::new(2, [(0, 0), (1, 0)].into());
    moved.validate(&fam, 1e-9).unwrap();
    assert_eq!(conditional_q_probability(&fam, &moved, 1, 0).unwrap(), 1.0);
    assert!(matches!(conditional_q_probability(&fam, &moved, 2, 0), Err(LatticeError::StateExcluded { .. })));

    let m = m.with_first_kind([g.clone()]).unwrap();
    let e = m.entity();
    let (s1, s3) = (e.state("S1").unwrap(), e.state("S3").unwrap());
    let (pe, pg) = (e.property("E").unwrap(), e.property("G").unwrap());
    assert_eq!(conditional_q_probability_in(&m, s1, pe, pg).unwrap(), 1.0);
    assert!(matches!(conditional_q_probability_in(&m, s3, pe, pg), Err(LatticeError::StateExcluded { .. })));
    assert!(matches!(conditional_q_probability_in(&m, s1, pg, pe), Err(LatticeError::NoFirstKind(_))));
}

#[test]
fn conditioning_sides_agree_on_boolean_lattices() {
    let l = boolean4();
    let fam = StateProbabilityFamily::new(names("S"), names("none x y both"), vec![vec![0.0, 0.3, 0.7, 1.0]]).unwrap();
    let (lhs, rhs) = classical_conditioning_failure(&l, &fam, "S", "x", "y", "x").unwrap();
    assert!((lhs - rhs).abs() < 1e-12);
    assert!(matches!(
        classical_conditioning_failure(&l, &fam, "S", "x", "both", "x"),
        Err(LatticeError::NotOrthogonal(..))
    ));
    assert!(matches!(
        classical_conditioning_failure(&l, &fam, "S", "x", "y", "none"),
        Err(LatticeError::ConditionNull(_))
    ));
}

#[test]
fn conditioning_sides_split_on_mo2() {
    let l = mo2();
    let fam = StateProbabilityFamily::new(names("S"), names("O a a' b b' U"), vec![vec![0.0, 0.5, 0.5, 0.5, 0.5, 1.0]]).unwrap();
    let (lhs, rhs) = classical_conditioning_failure(&l, &fam, "S", "a", "a'", "b").unwrap();
    assert_eq!((lhs, rhs), (1.0, 0.0));
}

proptest::proptest! {
    #[test]
    fn exact_preorder_is_reflexive_and_transitive(
        rows in proptest::collection::vec(proptest::collection::vec(0.0f64..=1.0, 5), 1..5)
    ) {
        let states: Vec<String> = (0..rows.len()).map(|s| format!("S{s}")).collect();
        let fam = StateProbabilityFamily::new(states, names("A B C D E"), rows).unwrap();
        let pre = PropertyPreorder::from_family(&fam, 0.0);
        proptest::prop_assert!(pre.verify().passed());
        let classes = pre.classes();
        let covered: usize = classes.iter().map(Vec::len).sum();
        proptest::prop_assert_eq!(covered, 5);
        let q = pre.quotient();
        for i in 0..q.len() {
            for j in 0..q.len() {
                proptest::prop_assert!(i == j || !(q[i][j] && q[j][i]));
            }
        }
    }
}
