//! Classical backend: each state fixes one truth assignment, contexts are
//! inert, and every general notion reduces to its Kolmogorov counterpart.

use crate::exec::Execution;
use crate::language::{AtomId, Entity, Extension, Proposition, PropertyId, StateId, TruthAssignment};
use crate::lattice::{
    self, check_gpm_family, conditional_q_probability_in, FirstKindTransform, OrthoLattice, PropertyPreorder,
    StateProbabilityFamily,
};
use crate::measurement::{mean_conditional, MeasurementProcedure};
use crate::model::{ContextualModel, ModelError};
use crate::muprob::{ProbabilitySpace, Weights};
use crate::report::{Check, Report};
use crate::tolerance;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassicalError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("states `{0}` and `{1}` possess the same properties")]
    DuplicatePossession(String, String),
    #[error("no possession set for state `{0}`")]
    MissingState(String),
    #[error("state #{0} or one of its properties is not declared by the entity")]
    Undeclared(usize),
    #[error("state `{state}` has weight {weight}; every state needs positive weight")]
    ZeroWeight { state: String, weight: f64 },
    #[error("{weights} weights given for {states} states")]
    WeightCount { states: usize, weights: usize },
}

/// The properties possessed in each state; distinct states possess distinct sets.
#[derive(Debug, Clone, PartialEq)]
pub struct PossessionMap {
    sets: Vec<BTreeSet<PropertyId>>,
}

impl PossessionMap {
    pub fn new(entity: &Entity, map: BTreeMap<StateId, BTreeSet<PropertyId>>) -> Result<Self, ClassicalError> {
        if let Some((s, _)) = map
            .iter()
            .find(|(s, set)| s.index() >= entity.state_count() || set.iter().any(|e| e.index() >= entity.property_count()))
        {
            return Err(ClassicalError::Undeclared(s.index()));
        }
        let mut sets = Vec::with_capacity(entity.state_count());
        for s in entity.states() {
            let set = map.get(&s).ok_or_else(|| ClassicalError::MissingState(entity.state_name(s).into()))?;
            if let Some(t) = (0..sets.len()).find(|&t| &sets[t] == set) {
                let t = entity.state_id(t).expect("earlier state");
                return Err(ClassicalError::DuplicatePossession(
                    entity.state_name(t).into(),
                    entity.state_name(s).into(),
                ));
            }
            sets.push(set.clone());
        }
        Ok(PossessionMap { sets })
    }

    pub fn possessed(&self, s: StateId) -> &BTreeSet<PropertyId> {
        &self.sets[s.index()]
    }

    /// `{S | E ∈ possession(S)}`, as state indices.
    pub fn holders(&self, e: PropertyId) -> BTreeSet<usize> {
        (0..self.sets.len()).filter(|&s| self.sets[s].contains(&e)).collect()
    }
}

/// One assignment per state, true on `α_{Ec}` for every possessed `E` and
/// every context; one procedure `M` measuring everything at the first
/// context; identity first-kind transforms.
pub fn build_cm_model(
    entity: Arc<Entity>,
    possession: &PossessionMap,
    state_weights: &[f64],
) -> Result<ContextualModel, ClassicalError> {
    if state_weights.len() != entity.state_count() {
        return Err(ClassicalError::WeightCount { states: entity.state_count(), weights: state_weights.len() });
    }
    if let Some(s) = entity.states().find(|s| state_weights[s.index()].partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)) {
        return Err(ClassicalError::ZeroWeight { state: entity.state_name(s).into(), weight: state_weights[s.index()] });
    }
    let universe: Vec<TruthAssignment> = entity
        .states()
        .map(|s| {
            let props = possession.possessed(s);
            let atoms = std::iter::once(AtomId::State(s)).chain(
                props.iter().flat_map(|&e| entity.contexts().map(move |c| AtomId::Property(e, c))),
            );
            TruthAssignment::new(&entity, atoms).expect("one state atom per assignment")
        })
        .collect();
    let space = ProbabilitySpace::new(entity.clone(), universe, Weights::Float(state_weights.to_vec()))
        .map_err(ModelError::from)?;
    let first = entity.contexts().next().expect("entities declare a context");
    let procedure = MeasurementProcedure::new("M", entity.properties(), [(first, 1.0)]).map_err(ModelError::from)?;
    let model = ContextualModel::new(space, vec![procedure])?;
    let transforms = entity
        .properties()
        .map(|e| FirstKindTransform::identity(e.index(), possession.holders(e)))
        .collect::<Vec<_>>();
    Ok(model.with_first_kind(transforms)?)
}

/// Per-state sets of properties, read back from a model's assignments.
fn extension_sets(model: &ContextualModel, c: crate::language::ContextId) -> Vec<Extension> {
    let entity = model.entity();
    entity
        .properties()
        .map(|e| model.space().extension(&Proposition::prop(e, c)).expect("declared atom"))
        .collect()
}

/// Verifies the classical collapse clauses:
///
/// * (a) `α_{Ec}` and `α_{Ed}` have equal extensions;
/// * (b) each `Ext(α_S)` is a singleton and every assignment carries a state;
/// * (c) `P_S(E) ∈ {0, 1}`;
/// * (d) `≺` is extension inclusion and a partial order;
/// * (e) when the property extensions form a Boolean algebra, each `P_S`
///   is a generalized probability measure and a point measure;
/// * (f) `P_S(E ‖ F) = P_S(E) = P_S(E | F)` whenever `P_S(F) > 0`.
pub fn verify_cm_collapse(model: &ContextualModel, exec: Execution) -> Report {
    let entity = model.entity();
    let space = model.space();
    let mut report = Report::new();

    // (a)
    let contexts: Vec<_> = entity.contexts().collect();
    let base = extension_sets(model, contexts[0]);
    let mut witnesses = Vec::new();
    for &d in &contexts[1..] {
        for (e, ext) in entity.properties().zip(extension_sets(model, d)) {
            if ext != base[e.index()] {
                witnesses.push(format!(
                    "({}, {}, {})",
                    entity.property_name(e),
                    entity.context_name(contexts[0]),
                    entity.context_name(d)
                ));
            }
        }
    }
    report.push(Check::from_witnesses("classical.a_context_invariance", witnesses));

    // (b)
    let mut witnesses = Vec::new();
    for s in entity.states() {
        let ext = space.extension(&Proposition::state(s)).expect("declared atom");
        if ext.len() != 1 {
            witnesses.push(format!("{}: |Ext| = {}", entity.state_name(s), ext.len()));
        }
    }
    let stateless = space.universe().iter().filter(|w| w.state().is_none()).count();
    if stateless > 0 {
        witnesses.push(format!("{stateless} assignment(s) without a state"));
    }
    report.push(Check::from_witnesses("classical.b_state_singletons", witnesses));

    let family = match StateProbabilityFamily::from_model(model, exec) {
        Ok(family) => family,
        Err(err) => {
            for clause in ["classical.c_sharp_values", "classical.d_preorder", "classical.e_gpm", "classical.f_conditioning"] {
                report.push(Check::fail(clause).with_detail(format!("q-probabilities unavailable: {err}")));
            }
            return report;
        }
    };

    // (c)
    let mut witnesses = Vec::new();
    let mut gap: f64 = 0.0;
    for s in 0..family.state_count() {
        for e in 0..family.property_count() {
            let v = family.value(s, e);
            let off = v.min(1.0 - v);
            gap = gap.max(off);
            if off > tolerance::CMP {
                witnesses.push(format!("P_{}({}) = {v}", family.states()[s], family.properties()[e]));
            }
        }
    }
    report.push(Check::from_witnesses("classical.c_sharp_values", witnesses).with_gap(gap).with_tolerance(tolerance::CMP));

    // (d) compare ≺ with inclusion of the state sets carrying each property
    let preorder = PropertyPreorder::from_family(&family, tolerance::CMP);
    let holders: Vec<BTreeSet<usize>> = base
        .iter()
        .map(|ext| ext.indices().filter_map(|w| space.universe()[w].state()).map(StateId::index).collect())
        .collect();
    let mut witnesses = Vec::new();
    let n = family.property_count();
    for e in 0..n {
        for f in 0..n {
            let inclusion = holders[e].is_subset(&holders[f]);
            if preorder.leq(e, f) != inclusion {
                witnesses.push(format!(
                    "{} ≺ {} is {} but extension inclusion is {}",
                    family.properties()[e],
                    family.properties()[f],
                    preorder.leq(e, f),
                    inclusion
                ));
            }
            if e < f && preorder.equivalent(e, f) {
                witnesses.push(format!("{} ≈ {}: not antisymmetric", family.properties()[e], family.properties()[f]));
            }
        }
    }
    witnesses.extend(preorder.verify().failures().flat_map(|c| c.witnesses.clone()));
    report.push(Check::from_witnesses("classical.d_preorder", witnesses));

    // (e)
    report.push(match boolean_lattice(family.properties(), &holders, entity.state_count()) {
        None => Check::skipped(
            "classical.e_gpm",
            "property extensions do not form a Boolean algebra of state sets",
        ),
        Some(l) => {
            let mut check = match check_gpm_family(&l, &family, tolerance::CMP, exec) {
                Ok(gpm) => gpm.to_check(),
                Err(err) => Check::fail("lattice.gpm").with_detail(err.to_string()),
            };
            check.name = "classical.e_gpm".into();
            for s in 0..family.state_count() {
                for e in 0..n {
                    let point = if holders[e].contains(&s) { 1.0 } else { 0.0 };
                    if (family.value(s, e) - point).abs() > tolerance::CMP {
                        check = check.with_witness(format!(
                            "P_{}({}) = {} differs from the point measure",
                            family.states()[s],
                            family.properties()[e],
                            family.value(s, e)
                        ));
                    }
                }
            }
            check
        }
    });

    // (f)
    let mut witnesses = Vec::new();
    let mut compared = 0usize;
    let m = &model.catalog().procedures()[0];
    let c = m.contexts()[0];
    for s in entity.states() {
        for f in entity.properties() {
            if family.value(s.index(), f.index()) <= tolerance::NULL {
                continue;
            }
            for e in entity.properties() {
                let plain = family.value(s.index(), e.index());
                let sequential = conditional_q_probability_in(model, s, e, f);
                let state = Proposition::state(s);
                let joint = Proposition::prop(e, c).and(Proposition::prop(f, c));
                let classical = mean_conditional(model, &joint, &state, m)
                    .map(|j| j.value / family.value(s.index(), f.index()));
                compared += 1;
                match (sequential, classical) {
                    (Ok(q), Ok(k)) if (q - plain).abs() <= tolerance::CMP && (k - plain).abs() <= tolerance::CMP => {}
                    (q, k) => witnesses.push(format!(
                        "S = {}, E = {}, F = {}: P_S(E) = {plain}, P_S(E‖F) = {}, P_S(E|F) = {}",
                        entity.state_name(s),
                        entity.property_name(e),
                        entity.property_name(f),
                        q.map_or_else(|err| err.to_string(), |v| v.to_string()),
                        k.map_or_else(|err| err.to_string(), |v| v.to_string()),
                    )),
                }
            }
        }
    }
    report.push(
        Check::from_witnesses("classical.f_conditioning", witnesses)
            .with_tolerance(tolerance::CMP)
            .with_detail(format!("{compared} (S, E, F) triples")),
    );
    report
}

/// The lattice of property state-sets when it is a Boolean subalgebra of
/// the power set of states with one property per set.
fn boolean_lattice(names: &[String], holders: &[BTreeSet<usize>], states: usize) -> Option<OrthoLattice> {
    let index = |set: &BTreeSet<usize>| holders.iter().position(|h| h == set);
    let all: BTreeSet<usize> = (0..states).collect();
    let n = holders.len();
    index(&BTreeSet::new())?;
    index(&all)?;
    let mut meet = vec![vec![0; n]; n];
    let mut join = vec![vec![0; n]; n];
    let mut ortho = vec![0; n];
    for a in 0..n {
        ortho[a] = index(&all.difference(&holders[a]).copied().collect())?;
        for b in 0..n {
            meet[a][b] = index(&holders[a].intersection(&holders[b]).copied().collect())?;
            join[a][b] = index(&holders[a].union(&holders[b]).copied().collect())?;
        }
    }
    let leq = (0..n).map(|a| (0..n).map(|b| holders[a].is_subset(&holders[b])).collect()).collect();
    let l = OrthoLattice::new(names.to_vec(), leq, meet, join, ortho).ok()?;
    lattice::check_ortholattice(&l).passed().then_some(l)
}
