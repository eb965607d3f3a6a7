use super::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn entity() -> Entity {
    Entity::new(["E", "F"], ["S1", "S2"], ["c1", "c2"]).unwrap()
}

fn parse(text: &str, entity: &Entity) -> Proposition {
    parse_proposition(text, entity).unwrap()
}

#[test]
fn entity_rejects_overlap_and_empty_sets() {
    assert_eq!(
        Entity::new(["E"], ["E"], ["c"]).unwrap_err(),
        LanguageError::DuplicateName("E".into())
    );
    assert_eq!(
        Entity::new(Vec::<String>::new(), ["S"], ["c"]).unwrap_err(),
        LanguageError::EmptySet(SymbolKind::Property)
    );
    assert!(matches!(Entity::new(["1x"], ["S"], ["c"]), Err(LanguageError::InvalidName(_))));
}

#[test]
fn parse_grammar_cases() {
    let h = entity();
    let s1 = h.state("S1").unwrap();
    let e = h.property("E").unwrap();
    let f = h.property("F").unwrap();
    let c1 = h.context("c1").unwrap();
    assert_eq!(parse("!state(S1)", &h), Proposition::state(s1).negate());
    assert_eq!(
        parse("prop(E,c1) & prop(F,c1)", &h),
        Proposition::prop(e, c1).and(Proposition::prop(f, c1))
    );
    let excluded_middle = parse("prop(E,c1) | !prop(E,c1)", &h);
    assert_eq!(
        excluded_middle,
        Proposition::prop(e, c1).or(Proposition::prop(e, c1).negate())
    );
    let printed = excluded_middle.display(&h).to_string();
    assert_eq!(parse(&printed, &h), excluded_middle);
}

#[test]
fn parse_precedence_and_associativity() {
    let h = entity();
    let a = parse("state(S1)", &h);
    let b = parse("prop(E,c1)", &h);
    let c = parse("prop(F,c2)", &h);
    assert_eq!(
        parse("state(S1) | prop(E,c1) & prop(F,c2)", &h),
        a.clone().or(b.clone().and(c.clone()))
    );
    assert_eq!(
        parse("state(S1) & prop(E,c1) & prop(F,c2)", &h),
        a.clone().and(b.clone()).and(c.clone())
    );
    assert_eq!(parse("!state(S1) & prop(E,c1)", &h), a.clone().negate().and(b.clone()));
    assert_eq!(
        parse(" ( state ( S1 ) | prop( E , c1 ) ) & prop(F,c2) ", &h),
        a.clone().or(b.clone()).and(c.clone())
    );
    // right-nested disjunction keeps its parentheses when printed
    let nested = a.clone().or(b.or(c));
    let text = nested.display(&h).to_string();
    assert_eq!(text, "state(S1) | (prop(E,c1) | prop(F,c2))");
    assert_eq!(parse(&text, &h), nested);
}

#[test]
fn parse_errors_carry_positions() {
    let h = entity();
    let err = parse_proposition("state(X)", &h).unwrap_err();
    assert_eq!(err.position, 6);
    assert_eq!(err.kind, ParseErrorKind::Undeclared("X".into()));
    let err = parse_proposition("state(E)", &h).unwrap_err();
    assert!(matches!(err.kind, ParseErrorKind::WrongKind { expected: SymbolKind::State, .. }));
    let err = parse_proposition("prop(S1,c1)", &h).unwrap_err();
    assert_eq!(err.position, 5);
    let err = parse_proposition("prop(E,c1) &", &h).unwrap_err();
    assert_eq!(err.position, 12);
    assert!(matches!(err.kind, ParseErrorKind::UnexpectedEnd(_)));
}

#[test]
fn evaluate_connectives() {
    let h = entity();
    let s1 = h.state("S1").unwrap();
    let e_c1 = AtomId::Property(h.property("E").unwrap(), h.context("c1").unwrap());
    let f_c2 = AtomId::Property(h.property("F").unwrap(), h.context("c2").unwrap());
    let w = TruthAssignment::new(&h, [AtomId::State(s1), e_c1]).unwrap();
    assert!(!evaluate(&w, &Proposition::state(s1).negate()).unwrap());
    let conj = Proposition::Atom(e_c1).and(Proposition::Atom(f_c2));
    assert!(!evaluate(&w, &conj).unwrap());
    let lem = Proposition::Atom(e_c1).or(Proposition::Atom(e_c1).negate());
    assert!(evaluate(&w, &lem).unwrap());
}

#[test]
fn state_exclusivity_enforced() {
    let h = entity();
    let err = TruthAssignment::new(
        &h,
        [AtomId::State(h.state("S1").unwrap()), AtomId::State(h.state("S2").unwrap())],
    )
    .unwrap_err();
    assert_eq!(err, LanguageError::StateExclusivity("S1".into(), "S2".into()));
}

#[test]
fn evaluate_rejects_foreign_atoms() {
    let small = Entity::new(["E"], ["S"], ["c"]).unwrap();
    let big = entity();
    let w = TruthAssignment::new(&small, []).unwrap();
    let foreign = Proposition::prop(big.property("F").unwrap(), big.context("c2").unwrap());
    assert!(matches!(evaluate(&w, &foreign), Err(LanguageError::AtomOutOfDomain(_))));
}

/// Four assignments over E at c1 / F at c2, all combinations.
fn four_universe(h: &Entity) -> Vec<TruthAssignment> {
    let e = AtomId::Property(h.property("E").unwrap(), h.context("c1").unwrap());
    let f = AtomId::Property(h.property("F").unwrap(), h.context("c2").unwrap());
    vec![
        TruthAssignment::new(h, []).unwrap(),
        TruthAssignment::new(h, [e]).unwrap(),
        TruthAssignment::new(h, [f]).unwrap(),
        TruthAssignment::new(h, [e, f]).unwrap(),
    ]
}

#[test]
fn extension_algebra() {
    let h = entity();
    let w = four_universe(&h);
    let a = parse("prop(E,c1)", &h);
    assert!(extension(&w, &a.clone().and(a.clone().negate())).unwrap().is_empty());
    assert_eq!(
        extension(&w, &a.clone().negate()).unwrap(),
        extension(&w, &a).unwrap().complement()
    );
    let ext: Vec<usize> = extension(&w, &a).unwrap().indices().collect();
    assert_eq!(ext, vec![1, 3]);
}

#[test]
fn entailment_examples() {
    let h = entity();
    let w = four_universe(&h);
    let a = parse("prop(E,c1)", &h);
    let b = parse("prop(F,c2)", &h);
    assert!(entails(&w, &a.clone().and(b.clone()), &a).unwrap());
    assert!(!entails(&w, &a, &a.clone().and(b)).unwrap());
    assert!(equivalent(&w, &a, &a.clone().negate().negate()).unwrap());
}

#[test]
fn syntactic_collections() {
    let h = entity();
    let a = parse("prop(E,c1) & !prop(F,c1)", &h);
    assert_eq!(
        properties_of(&a).into_iter().collect::<Vec<_>>(),
        vec![h.property("E").unwrap(), h.property("F").unwrap()]
    );
    assert_eq!(contexts_of(&a).into_iter().collect::<Vec<_>>(), vec![h.context("c1").unwrap()]);
    assert!(!has_state_atoms(&a));
    let s = parse("state(S1)", &h);
    assert!(properties_of(&s).is_empty());
    assert!(has_state_atoms(&s));
}

fn walk(prop: &Proposition, props: &mut Vec<usize>, ctxs: &mut Vec<usize>, states: &mut bool) {
    match prop {
        Proposition::Atom(AtomId::State(_)) => *states = true,
        Proposition::Atom(AtomId::Property(e, c)) => {
            props.push(e.index());
            ctxs.push(c.index());
        }
        Proposition::Not(x) => walk(x, props, ctxs, states),
        Proposition::And(l, r) | Proposition::Or(l, r) => {
            walk(l, props, ctxs, states);
            walk(r, props, ctxs, states);
        }
    }
}

#[test]
fn nested_formula_collections_match_walk() {
    let h = entity();
    let a = parse("!(prop(E,c1) & (prop(F,c2) | !state(S2))) | (prop(F,c1) & !!prop(E,c2))", &h);
    let (mut props, mut ctxs, mut states) = (vec![], vec![], false);
    walk(&a, &mut props, &mut ctxs, &mut states);
    props.sort();
    props.dedup();
    ctxs.sort();
    ctxs.dedup();
    assert_eq!(properties_of(&a).iter().map(|p| p.index()).collect::<Vec<_>>(), props);
    assert_eq!(contexts_of(&a).iter().map(|c| c.index()).collect::<Vec<_>>(), ctxs);
    assert_eq!(has_state_atoms(&a), states);
}

/// Entity with three atoms: one state and property E at two contexts.
fn three_atom_entity() -> Entity {
    Entity::new(["E"], ["S"], ["c", "d"]).unwrap()
}

/// Every assignment over the three atoms (state atom free to vary).
fn all_assignments(h: &Entity) -> Vec<TruthAssignment> {
    let atoms = h.atoms();
    (0u32..(1 << atoms.len()))
        .map(|mask| {
            let trues = atoms.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| *a);
            TruthAssignment::new(h, trues).unwrap()
        })
        .collect()
}

fn random_formula(rng: &mut ChaCha8Rng, atoms: &[AtomId], depth: usize) -> Proposition {
    if depth == 0 || rng.gen_bool(0.3) {
        return Proposition::Atom(atoms[rng.gen_range(0..atoms.len())]);
    }
    match rng.gen_range(0..3) {
        0 => random_formula(rng, atoms, depth - 1).negate(),
        1 => random_formula(rng, atoms, depth - 1).and(random_formula(rng, atoms, depth - 1)),
        _ => random_formula(rng, atoms, depth - 1).or(random_formula(rng, atoms, depth - 1)),
    }
}

/// Truth-table oracle: evaluate directly from the atom values.
fn truth_table(prop: &Proposition, values: &dyn Fn(AtomId) -> bool) -> bool {
    match prop {
        Proposition::Atom(a) => values(*a),
        Proposition::Not(x) => !truth_table(x, values),
        Proposition::And(l, r) => truth_table(l, values) && truth_table(r, values),
        Proposition::Or(l, r) => truth_table(l, values) || truth_table(r, values),
    }
}

#[test]
fn entails_agrees_with_truth_table_oracle() {
    let h = three_atom_entity();
    let atoms = h.atoms();
    let w = all_assignments(&h);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..300 {
        // random sub-universe
        let universe: Vec<TruthAssignment> =
            w.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect();
        let a = random_formula(&mut rng, &atoms, 3);
        let b = random_formula(&mut rng, &atoms, 3);
        let oracle = universe.iter().all(|wi| {
            let v = |atom: AtomId| wi.value(atom).unwrap();
            !truth_table(&a, &v) || truth_table(&b, &v)
        });
        assert_eq!(entails(&universe, &a, &b).unwrap(), oracle);
    }
}

#[test]
fn lindenbaum_tarski_quotient_is_boolean() {
    let h = three_atom_entity();
    let atoms = h.atoms();
    let w = all_assignments(&h);
    // close the atoms under the connectives, up to extension, until nothing new appears
    let mut level: Vec<(Proposition, Extension)> = atoms
        .iter()
        .map(|a| {
            let p = Proposition::Atom(*a);
            let e = extension(&w, &p).unwrap();
            (p, e)
        })
        .collect();
    let mut seen: std::collections::HashSet<Extension> = level.iter().map(|(_, e)| e.clone()).collect();
    loop {
        let before = level.len();
        for i in 0..before {
            let candidate = level[i].1.complement();
            if seen.insert(candidate.clone()) {
                level.push((level[i].0.clone().negate(), candidate));
            }
            for j in 0..before {
                let (x, y) = (&level[i], &level[j]);
                let (and, or) = (x.1.intersection(&y.1), x.1.union(&y.1));
                let mut fresh = Vec::new();
                if seen.insert(and.clone()) {
                    fresh.push((x.0.clone().and(y.0.clone()), and));
                }
                if seen.insert(or.clone()) {
                    fresh.push((x.0.clone().or(y.0.clone()), or));
                }
                level.extend(fresh);
            }
        }
        if level.len() == before {
            break;
        }
    }
    for (p, e) in &level {
        assert_eq!(&extension(&w, p).unwrap(), e);
    }
    let level: Vec<Proposition> = level.into_iter().map(|(p, _)| p).collect();
    assert_eq!(level.len(), 1 << w.len());
    let classes: Vec<Extension> = level.iter().map(|p| extension(&w, p).unwrap()).collect();
    let set: std::collections::HashSet<_> = classes.iter().cloned().collect();
    // closure under the induced operations and the bounds
    assert!(set.contains(&Extension::empty(w.len())));
    assert!(set.contains(&Extension::full(w.len())));
    for a in &classes {
        assert!(set.contains(&a.complement()));
        for b in &classes {
            assert!(set.contains(&a.intersection(b)));
            assert!(set.contains(&a.union(b)));
            for c in classes.iter().step_by(17) {
                assert_eq!(a.intersection(&b.union(c)), a.intersection(b).union(&a.intersection(c)));
            }
        }
    }
    // the entailment order on class representatives is antisymmetric
    for (i, a) in level.iter().enumerate().take(40) {
        for (j, b) in level.iter().enumerate().take(40) {
            if i != j {
                assert!(!(entails(&w, a, b).unwrap() && entails(&w, b, a).unwrap()));
            }
        }
    }
}

fn arb_prop(h: &Entity) -> impl Strategy<Value = Proposition> {
    let atoms = h.atoms();
    let leaf = (0..atoms.len()).prop_map(move |i| Proposition::Atom(atoms[i]));
    leaf.prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Proposition::negate),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| l.and(r)),
            (inner.clone(), inner).prop_map(|(l, r)| l.or(r)),
        ]
    })
}

proptest! {
    #[test]
    fn print_parse_round_trip(p in arb_prop(&entity())) {
        let h = entity();
        let text = p.display(&h).to_string();
        prop_assert_eq!(parse_proposition(&text, &h).unwrap(), p.clone());
        // whitespace-insensitive
        let squeezed: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        prop_assert_eq!(parse_proposition(&squeezed, &h).unwrap(), p);
    }

    #[test]
    fn extensions_distribute(a in arb_prop(&three_atom_entity()), b in arb_prop(&three_atom_entity()), c in arb_prop(&three_atom_entity())) {
        let h = three_atom_entity();
        let w = all_assignments(&h);
        let lhs = extension(&w, &a.clone().and(b.clone().or(c.clone()))).unwrap();
        let rhs = extension(&w, &a).unwrap().intersection(&extension(&w, &b).unwrap().union(&extension(&w, &c).unwrap()));
        prop_assert_eq!(lhs, rhs);
        let de_morgan = extension(&w, &a.clone().and(b.clone()).negate()).unwrap();
        prop_assert_eq!(de_morgan, extension(&w, &a.negate().or(b.negate())).unwrap());
    }
}
