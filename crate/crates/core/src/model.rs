//! A probability space together with its measurement catalog.

use crate::language::{Entity, Proposition, PropertyId, StateId};
use crate::exec::Execution;
use crate::lattice::{FirstKindTransform, LatticeError, StateProbabilityFamily};
use crate::measurement::{MeasurementCatalog, MeasurementError, MeasurementProcedure};
use crate::muprob::{ProbabilityError, ProbabilitySpace};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Probability(#[from] ProbabilityError),
    #[error(transparent)]
    Measurement(#[from] MeasurementError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("state `{0}` has probability zero; every state-proposition must be conditionable")]
    StateNotPositive(String),
    #[error("first-kind transform refers to property #{0}, which the entity does not declare")]
    UnknownProperty(usize),
}

/// A finite contextual model: the space `(W, ξ)` over an entity and the
/// procedures that define its macroscopic contexts.
#[derive(Debug, Clone)]
pub struct ContextualModel {
    space: ProbabilitySpace,
    catalog: MeasurementCatalog,
    first_kind: BTreeMap<PropertyId, FirstKindTransform>,
}

impl ContextualModel {
    /// Every `α_S` must have positive probability.
    pub fn new(space: ProbabilitySpace, procedures: Vec<MeasurementProcedure>) -> Result<Self, ModelError> {
        let catalog = MeasurementCatalog::new(space.entity(), procedures)?;
        for s in space.entity().states() {
            if !space.is_positive(&Proposition::state(s))? {
                return Err(ModelError::StateNotPositive(space.entity().state_name(s).into()));
            }
        }
        Ok(ContextualModel { space, catalog, first_kind: BTreeMap::new() })
    }

    /// Registers first-kind transforms after checking them against the
    /// model's q-probabilities.
    pub fn with_first_kind(
        mut self,
        transforms: impl IntoIterator<Item = FirstKindTransform>,
    ) -> Result<Self, ModelError> {
        let transforms: Vec<FirstKindTransform> = transforms.into_iter().collect();
        if transforms.is_empty() {
            return Ok(self);
        }
        let family = StateProbabilityFamily::from_model(&self, Execution::Sequential)?;
        for transform in transforms {
            let f = self
                .entity()
                .property_id(transform.property())
                .ok_or(ModelError::UnknownProperty(transform.property()))?;
            transform.validate(&family, crate::tolerance::CMP)?;
            self.first_kind.insert(f, transform);
        }
        Ok(self)
    }

    pub fn entity(&self) -> &Arc<Entity> {
        self.space.entity()
    }

    pub fn space(&self) -> &ProbabilitySpace {
        &self.space
    }

    pub fn catalog(&self) -> &MeasurementCatalog {
        &self.catalog
    }

    pub fn first_kind(&self, f: PropertyId) -> Option<&FirstKindTransform> {
        self.first_kind.get(&f)
    }

    pub fn first_kind_transforms(&self) -> impl Iterator<Item = &FirstKindTransform> {
        self.first_kind.values()
    }

    /// The single assignment index for `α_S`, when there is exactly one.
    pub fn state_assignment(&self, s: StateId) -> Option<usize> {
        let ext = self.space.extension(&Proposition::state(s)).ok()?;
        let mut it = ext.indices();
        match (it.next(), it.next()) {
            (Some(i), None) => Some(i),
            _ => None,
        }
    }
}
