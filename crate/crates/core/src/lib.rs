//! Contextual propositional models with μ-context averaged probabilities.
//!
//! The crate is organised bottom-up:
//!
//! * [`language`]: entities, propositions, truth assignments and their classical semantics.
//! * [`muprob`]: finite probability spaces over truth assignments and the
//!   μ-contextual conditional probability.
//! * [`measurement`]: measurement procedures, compatibility, testability and
//!   mean conditional probabilities.
//! * [`lattice`]: state-indexed q-probabilities, the induced preorder on
//!   properties, orthocomplemented lattices and generalized probability measures.
//! * [`classical`] and [`quantum`]: concrete backends.
//! * [`modelfile`]: the JSON model-file schema used by the CLI.
//!
//! Batch operations take an [`Execution`] and fan out over rayon when the
//! `parallel` feature is enabled (the default).

pub mod classical;
pub mod exec;
pub mod fixtures;
pub mod language;
pub mod lattice;
pub mod measurement;
pub mod model;
pub mod modelfile;
pub mod muprob;
pub mod quantum;
pub mod report;
#[cfg(test)]
pub(crate) mod testkit;

pub use exec::Execution;
pub use language::{
    AtomId, ContextId, Entity, Extension, Proposition, PropertyId, StateId, TruthAssignment,
};
pub use model::ContextualModel;
pub use report::{Check, Report, Status};

/// Numeric tolerances shared by every check.
pub mod tolerance {
    /// Comparison tolerance for probabilities computed in floating point.
    pub const CMP: f64 = 1e-9;
    /// Allowed deviation of a total mass from 1.
    pub const MASS: f64 = 1e-9;
    /// Hermiticity and idempotency tolerance for matrices.
    pub const HERM: f64 = 1e-9;
    /// Smallest eigenvalue accepted for a density matrix.
    pub const PSD: f64 = 1e-9;
    /// Outcome probabilities at or below this are treated as null.
    pub const NULL: f64 = 1e-12;

    /// Preorder tolerance for models discretized into `segments` μ-contexts.
    pub fn statistical(segments: usize) -> f64 {
        2.0 / (segments.max(1) as f64).sqrt()
    }
}
