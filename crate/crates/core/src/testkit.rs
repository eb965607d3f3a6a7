//! Compact model builders shared by unit tests.

use crate::language::{AtomId, Entity, TruthAssignment};
use crate::measurement::MeasurementProcedure;
use crate::model::ContextualModel;
use crate::muprob::{ProbabilitySpace, Weights};
use std::sync::Arc;

pub(crate) fn entity(props: &str, states: &str, contexts: &str) -> Arc<Entity> {
    let split = |s: &str| s.split_whitespace().map(String::from).collect::<Vec<_>>();
    Arc::new(Entity::new(split(props), split(states), split(contexts)).unwrap())
}

/// `"S E@c1 F@c2"` lists the true atoms of one assignment.
pub(crate) fn assignment(entity: &Entity, atoms: &str) -> TruthAssignment {
    let ids: Vec<AtomId> = atoms
        .split_whitespace()
        .map(|a| match a.split_once('@') {
            Some((e, c)) => AtomId::Property(entity.property(e).unwrap(), entity.context(c).unwrap()),
            None => AtomId::State(entity.state(a).unwrap()),
        })
        .collect();
    TruthAssignment::new(entity, ids).unwrap()
}

pub(crate) fn space(entity: &Arc<Entity>, universe: &[(&str, f64)]) -> ProbabilitySpace {
    let w = universe.iter().map(|(a, _)| assignment(entity, a)).collect();
    let weights = Weights::Float(universe.iter().map(|(_, x)| *x).collect());
    ProbabilitySpace::new(entity.clone(), w, weights).unwrap()
}

/// `("M", "E F", &[("c1", 0.5), ("c2", 0.5)])`.
pub(crate) fn procedure(entity: &Entity, id: &str, measures: &str, contexts: &[(&str, f64)]) -> MeasurementProcedure {
    MeasurementProcedure::new(
        id,
        measures.split_whitespace().map(|e| entity.property(e).unwrap()),
        contexts.iter().map(|(c, w)| (entity.context(c).unwrap(), *w)),
    )
    .unwrap()
}

pub(crate) type ProcedureSpec<'a> = (&'a str, &'a str, &'a [(&'a str, f64)]);

pub(crate) fn model(
    (props, states, contexts): (&str, &str, &str),
    universe: &[(&str, f64)],
    procedures: &[ProcedureSpec<'_>],
) -> ContextualModel {
    let h = entity(props, states, contexts);
    let space = space(&h, universe);
    let procs = procedures.iter().map(|(id, m, c)| procedure(&h, id, m, c)).collect();
    ContextualModel::new(space, procs).unwrap()
}
