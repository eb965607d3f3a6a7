//! Measurement procedures over μ-contexts, compatibility, testability and
//! mean conditional probabilities.
//!
//! A procedure `M` measures a set of properties and carries a probability
//! distribution `ν_M` over its μ-contexts `C_M`. The mean conditional
//! probability averages the μ-contextual conditional probability over
//! `C_M` after re-indexing the testable propositions to each context.

use crate::exec::Execution;
use crate::language::{ContextId, Entity, Extension, Proposition, PropertyId};
use crate::model::ContextualModel;
use crate::muprob::ProbabilityError;
use crate::report::Check;
use crate::tolerance;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasurementError {
    #[error(transparent)]
    Probability(#[from] ProbabilityError),
    #[error("procedure `{0}` measures no property")]
    NoProperties(String),
    #[error("procedure `{0}` has no μ-context")]
    NoContexts(String),
    #[error("procedure `{id}` lists context #{context} twice")]
    DuplicateContext { id: String, context: usize },
    #[error("procedure `{id}` gives context #{context} weight {weight}, outside [0, 1]")]
    WeightRange { id: String, context: usize, weight: f64 },
    #[error("context weights of procedure `{id}` sum to {sum}, not 1")]
    Mass { id: String, sum: f64 },
    #[error("procedure id `{0}` is declared twice")]
    DuplicateProcedure(String),
    #[error("property #{0} is not declared by the entity")]
    UnknownProperty(usize),
    #[error("context #{0} is not declared by the entity")]
    UnknownContext(usize),
    #[error("unknown procedure `{0}`")]
    UnknownProcedure(String),
    #[error("property `{0}` has no measurement procedure")]
    Uncovered(String),
    #[error("compatibility needs a non-empty set of properties")]
    EmptyPropertySet,
    #[error("proposition mixes several μ-context indices")]
    NonUniformContext,
    #[error("no mean conditional probability case applies: {0}")]
    CaseMismatch(String),
    #[error("conditioning proposition has probability zero{}", .context.as_ref().map(|c| format!(" at context `{c}`")).unwrap_or_default())]
    ConditionNull { context: Option<String> },
}

/// A procedure `M` with its macroscopic context `(C_M, ν_M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementProcedure {
    id: String,
    measures: BTreeSet<PropertyId>,
    contexts: Vec<ContextId>,
    weights: Vec<f64>,
}

impl MeasurementProcedure {
    /// `context_weights` is `ν_M` on singletons; contexts are kept in entity order.
    pub fn new(
        id: impl Into<String>,
        measures: impl IntoIterator<Item = PropertyId>,
        context_weights: impl IntoIterator<Item = (ContextId, f64)>,
    ) -> Result<Self, MeasurementError> {
        let id = id.into();
        let measures: BTreeSet<PropertyId> = measures.into_iter().collect();
        if measures.is_empty() {
            return Err(MeasurementError::NoProperties(id));
        }
        let mut pairs: Vec<(ContextId, f64)> = context_weights.into_iter().collect();
        if pairs.is_empty() {
            return Err(MeasurementError::NoContexts(id));
        }
        pairs.sort_by_key(|(c, _)| *c);
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(MeasurementError::DuplicateContext { id, context: w[0].0.index() });
            }
        }
        for &(c, weight) in &pairs {
            if !(0.0..=1.0).contains(&weight) {
                return Err(MeasurementError::WeightRange { id, context: c.index(), weight });
            }
        }
        let sum: f64 = pairs.iter().map(|(_, w)| w).sum();
        if (sum - 1.0).abs() > tolerance::MASS {
            return Err(MeasurementError::Mass { id, sum });
        }
        let (contexts, weights) = pairs.into_iter().unzip();
        Ok(MeasurementProcedure { id, measures, contexts, weights })
    }

    /// Uniform `ν_M` over `contexts`.
    pub fn uniform(
        id: impl Into<String>,
        measures: impl IntoIterator<Item = PropertyId>,
        contexts: impl IntoIterator<Item = ContextId>,
    ) -> Result<Self, MeasurementError> {
        let contexts: Vec<ContextId> = contexts.into_iter().collect();
        let w = 1.0 / contexts.len().max(1) as f64;
        Self::new(id, measures, contexts.into_iter().map(|c| (c, w)))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn measures(&self) -> &BTreeSet<PropertyId> {
        &self.measures
    }

    pub fn contexts(&self) -> &[ContextId] {
        &self.contexts
    }

    pub fn context_weights(&self) -> impl Iterator<Item = (ContextId, f64)> + '_ {
        self.contexts.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn weight_of(&self, c: ContextId) -> Option<f64> {
        self.contexts.binary_search(&c).ok().map(|i| self.weights[i])
    }

    pub fn has_context(&self, c: ContextId) -> bool {
        self.contexts.binary_search(&c).is_ok()
    }

    pub fn measures_all(&self, properties: &BTreeSet<PropertyId>) -> bool {
        properties.is_subset(&self.measures)
    }
}

/// All procedures of a model, indexed by the properties they measure.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementCatalog {
    procedures: Vec<MeasurementProcedure>,
    by_property: Vec<Vec<usize>>,
}

impl MeasurementCatalog {
    /// Requires every property of `entity` to be measured by some procedure.
    pub fn new(entity: &Entity, procedures: Vec<MeasurementProcedure>) -> Result<Self, MeasurementError> {
        let mut procedures = procedures;
        procedures.sort_by(|a, b| a.id.cmp(&b.id));
        for w in procedures.windows(2) {
            if w[0].id == w[1].id {
                return Err(MeasurementError::DuplicateProcedure(w[0].id.clone()));
            }
        }
        let mut by_property = vec![Vec::new(); entity.property_count()];
        for (i, m) in procedures.iter().enumerate() {
            for e in &m.measures {
                by_property
                    .get_mut(e.index())
                    .ok_or(MeasurementError::UnknownProperty(e.index()))?
                    .push(i);
            }
            if let Some(c) = m.contexts.iter().find(|c| c.index() >= entity.context_count()) {
                return Err(MeasurementError::UnknownContext(c.index()));
            }
        }
        if let Some(e) = entity.properties().find(|e| by_property[e.index()].is_empty()) {
            return Err(MeasurementError::Uncovered(entity.property_name(e).into()));
        }
        Ok(MeasurementCatalog { procedures, by_property })
    }

    /// Procedures sorted by id.
    pub fn procedures(&self) -> &[MeasurementProcedure] {
        &self.procedures
    }

    pub fn procedure(&self, id: &str) -> Option<&MeasurementProcedure> {
        self.procedures
            .binary_search_by(|m| m.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.procedures[i])
    }

    /// `𝓜_E`, sorted by id.
    pub fn for_property(&self, e: PropertyId) -> impl Iterator<Item = &MeasurementProcedure> {
        self.by_property
            .get(e.index())
            .into_iter()
            .flatten()
            .map(|&i| &self.procedures[i])
    }

    /// `𝓜_E ∩ 𝓜_F ∩ …`, sorted by id. Unknown properties yield no procedures.
    pub fn common(&self, properties: &BTreeSet<PropertyId>) -> Vec<&MeasurementProcedure> {
        let Some(first) = properties.iter().next() else {
            return Vec::new();
        };
        self.for_property(*first).filter(|m| m.measures_all(properties)).collect()
    }

    fn check_properties(&self, properties: &BTreeSet<PropertyId>) -> Result<(), MeasurementError> {
        if properties.is_empty() {
            return Err(MeasurementError::EmptyPropertySet);
        }
        match properties.iter().find(|e| e.index() >= self.by_property.len()) {
            Some(e) => Err(MeasurementError::UnknownProperty(e.index())),
            None => Ok(()),
        }
    }
}

/// True when one procedure measures every property in `properties`.
pub fn compatible(catalog: &MeasurementCatalog, properties: &BTreeSet<PropertyId>) -> Result<bool, MeasurementError> {
    catalog.check_properties(properties)?;
    Ok(!catalog.common(properties).is_empty())
}

/// The binary compatibility relation `k` as a matrix over property indices.
pub fn compatibility_relation(catalog: &MeasurementCatalog) -> Vec<Vec<bool>> {
    let n = catalog.by_property.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    catalog.by_property[i].iter().any(|m| catalog.by_property[j].contains(m))
                })
                .collect()
        })
        .collect()
}

/// A procedure and context realizing a testable proposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestabilityWitness<'a> {
    pub procedure: &'a MeasurementProcedure,
    pub context: ContextId,
}

/// Returns a witness `(M, c)` when `prop` is testable.
///
/// Ties are broken by the lexicographically smallest procedure id.
pub fn testable<'a>(catalog: &'a MeasurementCatalog, prop: &Proposition) -> Option<TestabilityWitness<'a>> {
    if prop.has_state_atoms() {
        return None;
    }
    let properties = prop.properties();
    let contexts = prop.contexts();
    let context = match contexts.len() {
        1 => *contexts.iter().next()?,
        _ => return None,
    };
    catalog
        .common(&properties)
        .into_iter()
        .find(|m| m.has_context(context))
        .map(|procedure| TestabilityWitness { procedure, context })
}

/// `A ∧ B ∧ …` is testable.
pub fn jointly_testable<'a>(catalog: &'a MeasurementCatalog, props: &[Proposition]) -> Option<TestabilityWitness<'a>> {
    let conj = props.iter().cloned().reduce(Proposition::and)?;
    testable(catalog, &conj)
}

/// `A(c)`: every property atom re-indexed to `c`.
pub fn substitute_context(prop: &Proposition, c: ContextId) -> Result<Proposition, MeasurementError> {
    if prop.contexts().len() > 1 {
        return Err(MeasurementError::NonUniformContext);
    }
    Ok(prop.with_context(c))
}

/// Which averaging rule applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanCase {
    /// Both propositions testable, jointly, at a common context.
    JointlyTestable,
    /// Testable target, state-proposition condition.
    TestableGivenState,
    /// State-proposition target, testable condition.
    StateGivenTestable,
    /// Two state-propositions; the plain conditional probability.
    States,
}

impl MeanCase {
    pub fn label(self) -> &'static str {
        match self {
            MeanCase::JointlyTestable => "i",
            MeanCase::TestableGivenState => "ii",
            MeanCase::StateGivenTestable => "iii",
            MeanCase::States => "iv",
        }
    }
}

impl fmt::Display for MeanCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            MeanCase::JointlyTestable => "jointly testable",
            MeanCase::TestableGivenState => "testable given state-proposition",
            MeanCase::StateGivenTestable => "state-proposition given testable",
            MeanCase::States => "state-propositions",
        };
        write!(f, "case {} ({text})", self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanConditional {
    pub value: f64,
    pub case: MeanCase,
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    /// No property symbol occurs.
    State,
    /// No state atom, one context index.
    Testable { properties: BTreeSet<PropertyId>, context: ContextId },
    Mixed,
    NonUniform,
}

fn shape(prop: &Proposition) -> Shape {
    let has_state = prop.has_state_atoms();
    let contexts = prop.contexts();
    match (has_state, contexts.len()) {
        (_, 0) => Shape::State,
        (true, _) => Shape::Mixed,
        (false, 1) => Shape::Testable {
            properties: prop.properties(),
            context: *contexts.iter().next().expect("one context"),
        },
        (false, _) => Shape::NonUniform,
    }
}

/// `Σ_{c ∈ C_M} ν_M({c}) p(A(c) | B(c))`, re-indexing only the propositions flagged as testable.
fn average(
    model: &ContextualModel,
    a: &Proposition,
    a_testable: bool,
    b: &Proposition,
    b_testable: bool,
    m: &MeasurementProcedure,
) -> Result<f64, MeasurementError> {
    let space = model.space();
    let fixed_a = if a_testable { None } else { Some(space.extension(a)?) };
    let fixed_b = if b_testable { None } else { Some(space.extension(b)?) };
    let (mut sum, mut mass) = (0.0, 0.0);
    for (c, nu) in m.context_weights() {
        mass += nu;
        let ext_a = match &fixed_a {
            Some(ext) => ext.clone(),
            None => space.extension_in(a, Some(c))?,
        };
        let ext_b = match &fixed_b {
            Some(ext) => ext.clone(),
            None => space.extension_in(b, Some(c))?,
        };
        match space.conditional_events(&ext_a, &ext_b) {
            Ok(p) => sum += nu * p,
            Err(ProbabilityError::ConditionNull) => {
                return Err(MeasurementError::ConditionNull {
                    context: b_testable.then(|| model.entity().context_name(c).to_string()),
                })
            }
            Err(e) => return Err(e.into()),
        }
    }
    // ν_M has unit mass; dividing by the accumulated mass cancels its rounding
    Ok(sum / mass)
}

/// Mean conditional probability `⟨p(A | B)⟩_{C_M}`, dispatched over the four cases.
pub fn mean_conditional(
    model: &ContextualModel,
    a: &Proposition,
    b: &Proposition,
    m: &MeasurementProcedure,
) -> Result<MeanConditional, MeasurementError> {
    let mismatch = |why: &str| Err(MeasurementError::CaseMismatch(why.to_string()));
    let check_procedure = |props: &BTreeSet<PropertyId>, c: ContextId| -> Result<(), MeasurementError> {
        if !m.measures_all(props) {
            return Err(MeasurementError::CaseMismatch(format!(
                "procedure `{}` does not measure every property involved",
                m.id
            )));
        }
        if !m.has_context(c) {
            return Err(MeasurementError::CaseMismatch(format!(
                "context `{}` is not in the macroscopic context of `{}`",
                model.entity().context_name(c),
                m.id
            )));
        }
        Ok(())
    };
    match (shape(a), shape(b)) {
        (Shape::State, Shape::State) => match model.space().mu_conditional(a, b) {
            Ok(value) => Ok(MeanConditional { value, case: MeanCase::States }),
            Err(ProbabilityError::ConditionNull) => Err(MeasurementError::ConditionNull { context: None }),
            Err(e) => Err(e.into()),
        },
        (Shape::Testable { properties: pa, context: ca }, Shape::Testable { properties: pb, context: cb }) => {
            if ca != cb {
                return mismatch("target and condition carry different μ-context indices");
            }
            let props: BTreeSet<PropertyId> = pa.union(&pb).copied().collect();
            check_procedure(&props, ca)?;
            let value = average(model, a, true, b, true, m)?;
            Ok(MeanConditional { value, case: MeanCase::JointlyTestable })
        }
        (Shape::Testable { properties, context }, Shape::State) => {
            check_procedure(&properties, context)?;
            let value = average(model, a, true, b, false, m)?;
            Ok(MeanConditional { value, case: MeanCase::TestableGivenState })
        }
        (Shape::State, Shape::Testable { properties, context }) => {
            check_procedure(&properties, context)?;
            let value = average(model, a, false, b, true, m)?;
            Ok(MeanConditional { value, case: MeanCase::StateGivenTestable })
        }
        (Shape::Mixed, _) | (_, Shape::Mixed) => {
            mismatch("a proposition mixes state atoms with property atoms")
        }
        _ => mismatch("a proposition mixes several μ-context indices"),
    }
}

/// Like [`mean_conditional`] but picks the canonical procedure: the
/// smallest id among those able to evaluate the pair.
pub fn mean_conditional_any<'m>(
    model: &'m ContextualModel,
    a: &Proposition,
    b: &Proposition,
) -> Result<(MeanConditional, Option<&'m MeasurementProcedure>), MeasurementError> {
    let (sa, sb) = (shape(a), shape(b));
    if sa == Shape::State && sb == Shape::State {
        let first = model.catalog().procedures().first();
        let m = first.expect("catalog covers at least one property");
        return Ok((mean_conditional(model, a, b, m)?, None));
    }
    let mut props = BTreeSet::new();
    let mut context = None;
    for s in [&sa, &sb] {
        if let Shape::Testable { properties, context: c } = s {
            props.extend(properties.iter().copied());
            context = Some(*c);
        }
    }
    let candidate = context.and_then(|c| {
        model.catalog().common(&props).into_iter().find(|m| m.has_context(c))
    });
    match candidate {
        Some(m) => Ok((mean_conditional(model, a, b, m)?, Some(m))),
        None => {
            // reproduce the precise mismatch reason with any procedure
            let m = model.catalog().procedures().first().expect("non-empty catalog");
            mean_conditional(model, a, b, m)?;
            Err(MeasurementError::CaseMismatch("no procedure measures every property involved at that context".into()))
        }
    }
}

/// Outcome of the procedure-independence check at one depth.
#[derive(Debug, Clone, PartialEq)]
pub struct TmumpReport {
    pub depth: usize,
    /// Distinct formula classes enumerated (formulas with equal per-context
    /// extensions and equal property sets are merged).
    pub classes: usize,
    /// Eligible `(A, B)` class pairs with at least two common procedures.
    pub pairs_checked: usize,
    pub comparisons: usize,
    pub violations: Vec<TmumpViolation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TmumpViolation {
    pub target: String,
    pub condition: String,
    pub procedures: (String, String),
    /// Mean under each procedure; `None` when undefined there.
    pub values: (Option<f64>, Option<f64>),
}

impl TmumpViolation {
    pub fn gap(&self) -> f64 {
        match self.values {
            (Some(x), Some(y)) => (x - y).abs(),
            _ => f64::INFINITY,
        }
    }
}

impl fmt::Display for TmumpViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: Option<f64>| v.map_or("undefined".to_string(), |x| format!("{x:.12}"));
        write!(
            f,
            "<p({} | {})>: {} under {} vs {} under {}",
            self.target,
            self.condition,
            show(self.values.0),
            self.procedures.0,
            show(self.values.1),
            self.procedures.1
        )
    }
}

impl TmumpReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_check(&self) -> Check {
        let witnesses = self.violations.iter().map(ToString::to_string).collect();
        let gap = self.violations.iter().map(TmumpViolation::gap).fold(0.0, f64::max);
        Check::from_witnesses("measurement.procedure_independence", witnesses)
            .with_gap(gap)
            .with_tolerance(tolerance::CMP)
            .with_detail(format!(
                "depth {}: {} classes, {} pairs, {} procedure comparisons",
                self.depth, self.classes, self.pairs_checked, self.comparisons
            ))
    }
}

#[derive(Debug, Clone)]
struct FormulaClass {
    repr: Proposition,
    testable: bool,
    properties: BTreeSet<PropertyId>,
    /// One extension for state classes, one per relevant context otherwise.
    exts: Vec<Extension>,
}

type ClassKey = (bool, Vec<PropertyId>, Vec<Extension>);

fn class_key(c: &FormulaClass) -> ClassKey {
    (c.testable, c.properties.iter().copied().collect(), c.exts.clone())
}

/// All formula classes of height at most `depth`, built over state atoms and
/// property atoms at a reference context. Property templates are evaluated
/// at every context in `contexts`.
fn enumerate_classes(
    model: &ContextualModel,
    depth: usize,
    contexts: &[ContextId],
) -> Result<Vec<FormulaClass>, MeasurementError> {
    if depth == 0 {
        return Ok(Vec::new());
    }
    let entity = model.entity();
    let space = model.space();
    let reference = contexts[0];
    let mut classes = Vec::new();
    for s in entity.states() {
        let repr = Proposition::state(s);
        let exts = vec![space.extension(&repr)?];
        classes.push(FormulaClass { repr, testable: false, properties: BTreeSet::new(), exts });
    }
    for e in entity.properties() {
        let repr = Proposition::prop(e, reference);
        let exts = contexts
            .iter()
            .map(|&c| space.extension_in(&repr, Some(c)))
            .collect::<Result<_, _>>()?;
        classes.push(FormulaClass { repr, testable: true, properties: [e].into(), exts });
    }
    let mut seen: HashMap<ClassKey, ()> = HashMap::new();
    classes.retain(|c| seen.insert(class_key(c), ()).is_none());

    for _ in 1..depth {
        let mut next = Vec::new();
        for x in &classes {
            next.push(FormulaClass {
                repr: x.repr.clone().negate(),
                testable: x.testable,
                properties: x.properties.clone(),
                exts: x.exts.iter().map(Extension::complement).collect(),
            });
            for y in classes.iter().filter(|y| y.testable == x.testable) {
                let properties: BTreeSet<PropertyId> = x.properties.union(&y.properties).copied().collect();
                next.push(FormulaClass {
                    repr: x.repr.clone().and(y.repr.clone()),
                    testable: x.testable,
                    properties: properties.clone(),
                    exts: x.exts.iter().zip(&y.exts).map(|(a, b)| a.intersection(b)).collect(),
                });
                next.push(FormulaClass {
                    repr: x.repr.clone().or(y.repr.clone()),
                    testable: x.testable,
                    properties,
                    exts: x.exts.iter().zip(&y.exts).map(|(a, b)| a.union(b)).collect(),
                });
            }
        }
        for c in next {
            if seen.insert(class_key(&c), ()).is_none() {
                classes.push(c);
            }
        }
    }
    Ok(classes)
}

/// Checks that every mean conditional probability defined under one common
/// procedure is defined and equal under every other, for all eligible pairs
/// of formulas of height at most `depth` (atoms have height 1).
///
/// Formulas are enumerated as context templates: the value of a mean never
/// depends on which context of `C_M` the template was written at.
pub fn verify_tmump(model: &ContextualModel, depth: usize, exec: Execution) -> Result<TmumpReport, MeasurementError> {
    let catalog = model.catalog();
    let entity = model.entity();
    let mut report = TmumpReport { depth, classes: 0, pairs_checked: 0, comparisons: 0, violations: Vec::new() };
    // with at most one procedure per property no two procedures are ever both common
    if entity.properties().all(|e| catalog.for_property(e).count() < 2) {
        return Ok(report);
    }
    let mut contexts: Vec<ContextId> =
        catalog.procedures().iter().flat_map(|m| m.contexts().iter().copied()).collect();
    contexts.sort();
    contexts.dedup();
    let slot: HashMap<ContextId, usize> = contexts.iter().enumerate().map(|(i, c)| (*c, i)).collect();

    let classes = enumerate_classes(model, depth, &contexts)?;
    report.classes = classes.len();

    let mut pairs = Vec::new();
    for (i, a) in classes.iter().enumerate() {
        for (j, b) in classes.iter().enumerate() {
            if !a.testable && !b.testable {
                continue;
            }
            let props: BTreeSet<PropertyId> = a.properties.union(&b.properties).copied().collect();
            let common = catalog.common(&props);
            if common.len() >= 2 {
                pairs.push((i, j, common));
            }
        }
    }
    report.pairs_checked = pairs.len();

    let space = model.space();
    let ext_at = |class: &FormulaClass, c: ContextId| -> Extension {
        if class.testable { class.exts[slot[&c]].clone() } else { class.exts[0].clone() }
    };
    let mean = |a: &FormulaClass, b: &FormulaClass, m: &MeasurementProcedure| -> Option<f64> {
        let (mut sum, mut mass) = (0.0, 0.0);
        for (c, nu) in m.context_weights() {
            mass += nu;
            let eb = ext_at(b, c);
            let denominator = space.xi_unchecked(&eb);
            if denominator <= 0.0 {
                return None;
            }
            sum += nu * space.xi_unchecked(&ext_at(a, c).intersection(&eb)) / denominator;
        }
        Some(sum / mass)
    };
    let results = exec.map(&pairs, |(i, j, common)| {
        let (a, b) = (&classes[*i], &classes[*j]);
        let values: Vec<Option<f64>> = common.iter().map(|m| mean(a, b, m)).collect();
        let mut violation = None;
        let defined: Vec<usize> = (0..values.len()).filter(|&k| values[k].is_some()).collect();
        if let Some(&first) = defined.first() {
            if let Some(k) = (0..values.len()).find(|&k| values[k].is_none()) {
                violation = Some((first, k));
            } else {
                let (lo, hi) = defined.iter().fold((first, first), |(lo, hi), &k| {
                    (
                        if values[k] < values[lo] { k } else { lo },
                        if values[k] > values[hi] { k } else { hi },
                    )
                });
                if values[hi].unwrap() - values[lo].unwrap() > tolerance::CMP {
                    violation = Some((lo, hi));
                }
            }
        }
        let violation = violation.map(|(x, y)| TmumpViolation {
            target: a.repr.display(entity).to_string(),
            condition: b.repr.display(entity).to_string(),
            procedures: (common[x].id().to_string(), common[y].id().to_string()),
            values: (values[x], values[y]),
        });
        (common.len() * (common.len() - 1) / 2, violation)
    });
    for (comparisons, violation) in results {
        report.comparisons += comparisons;
        report.violations.extend(violation);
    }
    Ok(report)
}
