//! The JSON model-file format (`"format": 1`) and the check suite run on a
//! loaded model.
//!
//! ```json
//! {
//!   "format": 1,
//!   "entity": { "properties": ["E"], "states": ["S"], "contexts": ["c1", "c2"] },
//!   "universe": [ { "true": ["state(S)", "prop(E,c1)"], "weight": [1, 1] } ],
//!   "procedures": [ { "id": "M", "measures": ["E"], "contexts": { "c1": 0.5, "c2": 0.5 } } ]
//! }
//! ```
//!
//! Optional sections: `lattice` (elements, order pairs, complements and,
//! optionally, meet/join tables), `first_kind` (per property, a map from
//! states to states) and `backend`, one of
//! `{"kind": "classical", "possession": …, "weights": …}`,
//! `{"kind": "quantum", "states": […], "properties": […]}` or
//! `{"kind": "band", "segments": n, "states": [{"name": …, "theta": …}]}`.
//! The classical and band backends generate the universe and procedures.

use crate::classical::{build_cm_model, verify_cm_collapse, PossessionMap};
use crate::exec::Execution;
use crate::language::{Entity, TruthAssignment};
use crate::lattice::{self, FirstKindTransform, OrthoLattice, PropertyPreorder, StateProbabilityFamily};
use crate::measurement::{verify_tmump, MeasurementProcedure};
use crate::model::ContextualModel;
use crate::muprob::{verify_kolmogorov, ProbabilitySpace, Weights};
use crate::quantum::{
    self, band_reconstruction, build_band_model_named, ComplexMatrix, DensityState, HilbertModel, ProjectorProperty,
};
use crate::report::{Check, Report};
use crate::tolerance;
use nalgebra::Complex;
use num::{BigInt, BigRational};
use serde::Deserialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub enum ModelFileError {
    Io { path: String, message: String },
    Syntax { line: usize, column: usize, message: String },
    Schema { location: String, message: String },
}

impl fmt::Display for ModelFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelFileError::Io { path, message } => write!(f, "{path}: {message}"),
            ModelFileError::Syntax { line, column, message } => write!(f, "line {line}, column {column}: {message}"),
            ModelFileError::Schema { location, message } => write!(f, "at {location}: {message}"),
        }
    }
}

impl std::error::Error for ModelFileError {}

fn schema(location: impl Into<String>, message: impl fmt::Display) -> ModelFileError {
    ModelFileError::Schema { location: location.into(), message: message.to_string() }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    format: u32,
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    entity: Option<RawEntity>,
    #[serde(default)]
    universe: Option<Vec<RawAssignment>>,
    #[serde(default)]
    procedures: Option<Vec<RawProcedure>>,
    #[serde(default)]
    lattice: Option<RawLattice>,
    #[serde(default)]
    first_kind: Option<BTreeMap<String, BTreeMap<String, String>>>,
    #[serde(default)]
    backend: Option<RawBackend>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntity {
    properties: Vec<String>,
    states: Vec<String>,
    contexts: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawWeight {
    Ratio([i64; 2]),
    Float(f64),
}

impl RawWeight {
    fn as_f64(&self) -> f64 {
        match *self {
            RawWeight::Float(x) => x,
            RawWeight::Ratio([n, d]) => n as f64 / d as f64,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAssignment {
    #[serde(rename = "true")]
    true_atoms: Vec<String>,
    weight: RawWeight,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawContexts {
    Uniform(Vec<String>),
    Weighted(BTreeMap<String, RawWeight>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProcedure {
    id: String,
    measures: Vec<String>,
    contexts: RawContexts,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLattice {
    elements: Vec<String>,
    order: Vec<[String; 2]>,
    complement: BTreeMap<String, String>,
    #[serde(default)]
    meet: Option<Vec<Vec<String>>>,
    #[serde(default)]
    join: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawBackend {
    Classical { possession: BTreeMap<String, Vec<String>>, weights: BTreeMap<String, RawWeight> },
    Quantum { states: Vec<RawOperator>, properties: Vec<RawOperator> },
    Band { segments: usize, states: Vec<RawAngle> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperator {
    name: String,
    #[serde(default)]
    matrix: Option<RawMatrix>,
    #[serde(default)]
    ket: Option<Vec<[f64; 2]>>,
    /// `"identity"`, `"zero"` or `"mixed"`.
    #[serde(default)]
    special: Option<String>,
    #[serde(default)]
    dimension: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawMatrix {
    Rows(Vec<Vec<[f64; 2]>>),
    Flat(Vec<[f64; 2]>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAngle {
    name: String,
    theta: f64,
}

/// Which generator, if any, produced the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Explicit,
    Classical,
    Quantum,
    Band { segments: usize },
}

/// A parsed and validated model file.
#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub name: Option<String>,
    pub backend: Backend,
    /// Present whenever the file defines or generates a universe.
    pub contextual: Option<ContextualModel>,
    pub hilbert: Option<HilbertModel>,
    pub lattice: Option<OrthoLattice>,
    band_states: Vec<(String, f64)>,
}

impl LoadedModel {
    pub fn entity(&self) -> Option<&Arc<Entity>> {
        self.contextual.as_ref().map(ContextualModel::entity)
    }

    /// Born values for quantum files, q-probabilities otherwise.
    pub fn family(&self, exec: Execution) -> Result<StateProbabilityFamily, String> {
        match (&self.hilbert, &self.contextual) {
            (Some(h), _) => h.family(exec).map_err(|e| e.to_string()),
            (None, Some(m)) => StateProbabilityFamily::from_model(m, exec).map_err(|e| e.to_string()),
            (None, None) => Err("the file defines no states".into()),
        }
    }

    /// Preorder tolerance: statistical for band models, `tolerance::CMP` otherwise.
    pub fn preorder_tolerance(&self) -> f64 {
        match self.backend {
            Backend::Band { segments } => tolerance::statistical(segments),
            _ => tolerance::CMP,
        }
    }
}

pub fn load_path(path: impl AsRef<Path>) -> Result<LoadedModel, ModelFileError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| ModelFileError::Io { path: path.display().to_string(), message: e.to_string() })?;
    load_str(&text)
}

pub fn load_str(text: &str) -> Result<LoadedModel, ModelFileError> {
    let raw: RawFile = serde_json::from_str(text).map_err(|e| ModelFileError::Syntax {
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })?;
    if raw.format != 1 {
        return Err(schema("format", format!("unsupported format {}, expected 1", raw.format)));
    }
    let mut loaded = match raw.backend {
        Some(RawBackend::Band { segments, ref states }) => load_band(&raw, segments, states)?,
        Some(RawBackend::Classical { ref possession, ref weights }) => load_classical(&raw, possession, weights)?,
        Some(RawBackend::Quantum { ref states, ref properties }) => load_quantum(&raw, states, properties)?,
        None => {
            let model = load_explicit(&raw)?
                .ok_or_else(|| schema("universe", "a universe is required without a backend"))?;
            LoadedModel {
                name: None,
                backend: Backend::Explicit,
                contextual: Some(model),
                hilbert: None,
                lattice: None,
                band_states: Vec::new(),
            }
        }
    };
    loaded.name = raw.name.clone();
    if let Some(raw_lattice) = &raw.lattice {
        loaded.lattice = Some(load_lattice(raw_lattice)?);
    }
    if let Some(first_kind) = &raw.first_kind {
        let model = loaded
            .contextual
            .take()
            .ok_or_else(|| schema("first_kind", "first-kind transforms need a universe"))?;
        loaded.contextual = Some(load_first_kind(model, first_kind)?);
    }
    Ok(loaded)
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}

fn build_entity(raw: &RawEntity) -> Result<Arc<Entity>, ModelFileError> {
    Entity::new(raw.properties.clone(), raw.states.clone(), raw.contexts.clone())
        .map(Arc::new)
        .map_err(|e| schema("entity", e))
}

fn load_weights(raw: &[RawWeight], location: &str) -> Result<Weights, ModelFileError> {
    if raw.iter().all(|w| matches!(w, RawWeight::Ratio(_))) {
        let mut exact = Vec::with_capacity(raw.len());
        for (i, w) in raw.iter().enumerate() {
            if let RawWeight::Ratio([n, d]) = *w {
                if d == 0 {
                    return Err(schema(format!("{location}[{i}].weight"), "zero denominator"));
                }
                exact.push(BigRational::new(BigInt::from(n), BigInt::from(d)));
            }
        }
        Ok(Weights::Exact(exact))
    } else {
        Ok(Weights::Float(raw.iter().map(RawWeight::as_f64).collect()))
    }
}

fn load_explicit(raw: &RawFile) -> Result<Option<ContextualModel>, ModelFileError> {
    let Some(universe) = &raw.universe else {
        if raw.procedures.is_some() {
            return Err(schema("procedures", "procedures need a universe"));
        }
        return Ok(None);
    };
    let entity = build_entity(raw.entity.as_ref().ok_or_else(|| schema("entity", "missing entity declaration"))?)?;
    let mut assignments = Vec::with_capacity(universe.len());
    for (i, a) in universe.iter().enumerate() {
        let mut atoms = Vec::new();
        for (j, text) in a.true_atoms.iter().enumerate() {
            let atom = entity
                .parse_atom(text)
                .map_err(|e| schema(format!("universe[{i}].true[{j}]"), format!("`{text}`: {}", e.kind)))?;
            atoms.push(atom);
        }
        let w = TruthAssignment::new(&entity, atoms).map_err(|e| schema(format!("universe[{i}].true"), e))?;
        assignments.push(w);
    }
    let weights: Vec<RawWeight> = universe.iter().map(|a| a.weight.clone()).collect();
    let weights = load_weights(&weights, "universe")?;
    let space = ProbabilitySpace::unnormalized(entity.clone(), assignments, weights).map_err(|e| schema("universe", e))?;
    let raw_procs = raw.procedures.as_ref().ok_or_else(|| schema("procedures", "missing procedures"))?;
    let mut procedures = Vec::with_capacity(raw_procs.len());
    for (i, p) in raw_procs.iter().enumerate() {
        let at = |field: &str| format!("procedures[{i}].{field}");
        let measures = p
            .measures
            .iter()
            .map(|e| entity.property(e).map_err(|err| schema(at("measures"), err)))
            .collect::<Result<Vec<_>, _>>()?;
        let contexts = match &p.contexts {
            RawContexts::Uniform(list) => {
                let w = 1.0 / list.len().max(1) as f64;
                list.iter()
                    .map(|c| Ok((entity.context(c).map_err(|err| schema(at("contexts"), err))?, w)))
                    .collect::<Result<Vec<_>, ModelFileError>>()?
            }
            RawContexts::Weighted(map) => map
                .iter()
                .map(|(c, w)| Ok((entity.context(c).map_err(|err| schema(at("contexts"), err))?, w.as_f64())))
                .collect::<Result<Vec<_>, ModelFileError>>()?,
        };
        let procedure =
            MeasurementProcedure::new(p.id.clone(), measures, contexts).map_err(|e| schema(format!("procedures[{i}]"), e))?;
        procedures.push(procedure);
    }
    ContextualModel::new(space, procedures).map(Some).map_err(|e| schema("procedures", e))
}

fn load_classical(
    raw: &RawFile,
    possession: &BTreeMap<String, Vec<String>>,
    weights: &BTreeMap<String, RawWeight>,
) -> Result<LoadedModel, ModelFileError> {
    if raw.universe.is_some() || raw.procedures.is_some() {
        return Err(schema("backend", "the classical backend generates the universe and procedures"));
    }
    let entity = build_entity(raw.entity.as_ref().ok_or_else(|| schema("entity", "missing entity declaration"))?)?;
    let mut map = BTreeMap::new();
    for (s, props) in possession {
        let at = format!("backend.possession.{s}");
        let sid = entity.state(s).map_err(|e| schema(&at, e))?;
        let set: BTreeSet<_> = props
            .iter()
            .map(|e| entity.property(e).map_err(|err| schema(&at, err)))
            .collect::<Result<_, _>>()?;
        map.insert(sid, set);
    }
    let possession = PossessionMap::new(&entity, map).map_err(|e| schema("backend.possession", e))?;
    let mut state_weights = vec![0.0; entity.state_count()];
    for (s, w) in weights {
        let sid = entity.state(s).map_err(|e| schema(format!("backend.weights.{s}"), e))?;
        state_weights[sid.index()] = w.as_f64();
    }
    let model = build_cm_model(entity, &possession, &state_weights).map_err(|e| schema("backend", e))?;
    Ok(LoadedModel {
        name: None,
        backend: Backend::Classical,
        contextual: Some(model),
        hilbert: None,
        lattice: None,
        band_states: Vec::new(),
    })
}

fn load_band(raw: &RawFile, segments: usize, states: &[RawAngle]) -> Result<LoadedModel, ModelFileError> {
    if raw.entity.is_some() || raw.universe.is_some() || raw.procedures.is_some() {
        return Err(schema("backend", "the band backend generates the entity, universe and procedures"));
    }
    let named: Vec<(String, f64)> = states.iter().map(|s| (s.name.clone(), s.theta)).collect();
    let model = build_band_model_named(&named, segments).map_err(|e| schema("backend", e))?;
    Ok(LoadedModel {
        name: None,
        backend: Backend::Band { segments },
        contextual: Some(model),
        hilbert: None,
        lattice: None,
        band_states: named,
    })
}

fn operator(raw: &RawOperator, location: &str) -> Result<ComplexMatrix, ModelFileError> {
    let c = |[re, im]: [f64; 2]| Complex::new(re, im);
    let given = [raw.matrix.is_some(), raw.ket.is_some(), raw.special.is_some()].iter().filter(|x| **x).count();
    if given != 1 {
        return Err(schema(location, "give exactly one of `matrix`, `ket` or `special`"));
    }
    let result = if let Some(m) = &raw.matrix {
        let entries: Vec<Complex<f64>> = match m {
            RawMatrix::Rows(rows) => rows.iter().flatten().copied().map(c).collect(),
            RawMatrix::Flat(flat) => flat.iter().copied().map(c).collect(),
        };
        let d = (entries.len() as f64).sqrt().round() as usize;
        ComplexMatrix::from_row_major(d, &entries)
    } else if let Some(ket) = &raw.ket {
        let v: Vec<Complex<f64>> = ket.iter().copied().map(c).collect();
        ComplexMatrix::ket_projector(&v)
    } else {
        let d = raw.dimension.ok_or_else(|| schema(location, "`special` needs a `dimension`"))?;
        match raw.special.as_deref() {
            Some("identity") => ComplexMatrix::identity(d),
            Some("zero") => ComplexMatrix::zeros(d),
            Some("mixed") => ComplexMatrix::identity(d).map(|m| m.scale(1.0 / d as f64)),
            Some(other) => return Err(schema(location, format!("unknown special operator `{other}`"))),
            None => unreachable!("counted above"),
        }
    };
    result.map_err(|e| schema(location, e))
}

fn load_quantum(raw: &RawFile, states: &[RawOperator], properties: &[RawOperator]) -> Result<LoadedModel, ModelFileError> {
    let mut dstates = Vec::new();
    for (i, s) in states.iter().enumerate() {
        let at = format!("backend.states[{i}]");
        dstates.push(DensityState::new(s.name.clone(), operator(s, &at)?).map_err(|e| schema(&at, e))?);
    }
    let mut projectors = Vec::new();
    for (i, p) in properties.iter().enumerate() {
        let at = format!("backend.properties[{i}]");
        projectors.push(ProjectorProperty::new(p.name.clone(), operator(p, &at)?).map_err(|e| schema(&at, e))?);
    }
    let hilbert = HilbertModel::new(dstates, projectors).map_err(|e| schema("backend", e))?;
    let contextual = load_explicit(raw)?;
    Ok(LoadedModel { name: None, backend: Backend::Quantum, contextual, hilbert: Some(hilbert), lattice: None, band_states: Vec::new() })
}

fn load_lattice(raw: &RawLattice) -> Result<OrthoLattice, ModelFileError> {
    let index = |name: &str, at: &str| {
        raw.elements
            .iter()
            .position(|e| e == name)
            .ok_or_else(|| schema(at, format!("unknown lattice element `{name}`")))
    };
    let mut pairs = Vec::new();
    for (i, [a, b]) in raw.order.iter().enumerate() {
        let at = format!("lattice.order[{i}]");
        pairs.push((index(a, &at)?, index(b, &at)?));
    }
    let mut ortho = Vec::new();
    for e in &raw.elements {
        let at = format!("lattice.complement.{e}");
        let target = raw.complement.get(e).ok_or_else(|| schema(&at, "missing complement"))?;
        ortho.push(index(target, &at)?);
    }
    if let Some(extra) = raw.complement.keys().find(|k| !raw.elements.contains(k)) {
        return Err(schema(format!("lattice.complement.{extra}"), "unknown lattice element"));
    }
    match (&raw.meet, &raw.join) {
        (None, None) => OrthoLattice::from_relation(raw.elements.clone(), &pairs, ortho).map_err(|e| schema("lattice", e)),
        (Some(meet), Some(join)) => {
            let table = |rows: &Vec<Vec<String>>, field: &str| -> Result<Vec<Vec<usize>>, ModelFileError> {
                rows.iter()
                    .enumerate()
                    .map(|(i, row)| {
                        row.iter()
                            .enumerate()
                            .map(|(j, name)| index(name, &format!("lattice.{field}[{i}][{j}]")))
                            .collect()
                    })
                    .collect()
            };
            let leq = closure_order(raw.elements.len(), &pairs);
            OrthoLattice::new(raw.elements.clone(), leq, table(meet, "meet")?, table(join, "join")?, ortho)
                .map_err(|e| schema("lattice", e))
        }
        _ => Err(schema("lattice", "give both `meet` and `join`, or neither")),
    }
}

fn closure_order(n: usize, pairs: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in pairs {
        leq[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if leq[i][k] {
                for j in 0..n {
                    if leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
    }
    leq
}

fn load_first_kind(
    model: ContextualModel,
    raw: &BTreeMap<String, BTreeMap<String, String>>,
) -> Result<ContextualModel, ModelFileError> {
    let entity = model.entity().clone();
    let mut transforms = Vec::new();
    for (f, map) in raw {
        let at = format!("first_kind.{f}");
        let fid = entity.property(f).map_err(|e| schema(&at, e))?;
        let mut pairs = BTreeMap::new();
        for (s, t) in map {
            let s = entity.state(s).map_err(|e| schema(&at, e))?;
            let t = entity.state(t).map_err(|e| schema(&at, e))?;
            pairs.insert(s.index(), t.index());
        }
        transforms.push(FirstKindTransform::new(fid.index(), pairs));
    }
    model.with_first_kind(transforms).map_err(|e| schema("first_kind", e))
}

/// Runs every applicable check; inapplicable ones are listed as skipped.
pub fn check_model(loaded: &LoadedModel, depth: usize, exec: Execution) -> Report {
    let mut report = Report::new();
    match &loaded.contextual {
        Some(model) => {
            report.extend(verify_kolmogorov(model.space()));
            match verify_tmump(model, depth, exec) {
                Ok(tmump) => report.push(tmump.to_check()),
                Err(e) => report.push(Check::fail("measurement.procedure_independence").with_detail(e.to_string())),
            }
        }
        None => {
            report.push(Check::skipped("kolmogorov", "no universe in the file"));
            report.push(Check::skipped("measurement.procedure_independence", "no universe in the file"));
        }
    }

    let family = loaded.family(exec);
    match &family {
        Ok(family) => {
            let preorder = PropertyPreorder::from_family(family, loaded.preorder_tolerance());
            report.extend(preorder.verify());
        }
        Err(e) => report.push(Check::skipped("preorder", e.clone())),
    }

    let lattice = match (&loaded.lattice, &loaded.hilbert) {
        (Some(l), _) => Ok(l.clone()),
        (None, Some(h)) => h.projector_lattice().map_err(|e| format!("no lattice tables and {e}")),
        (None, None) => Err("no lattice tables".to_string()),
    };
    match (&lattice, &family) {
        (Ok(l), Ok(family)) => {
            report.extend(lattice::check_ortholattice(l));
            match lattice::check_gpm_family(l, family, tolerance::CMP, exec) {
                Ok(gpm) => report.push(gpm.to_check()),
                Err(e) => report.push(Check::skipped("lattice.gpm", e.to_string())),
            }
        }
        (Ok(l), Err(e)) => {
            report.extend(lattice::check_ortholattice(l));
            report.push(Check::skipped("lattice.gpm", e.clone()));
        }
        (Err(e), _) => {
            report.push(Check::skipped("lattice.ortholattice", e.clone()));
            report.push(Check::skipped("lattice.gpm", e.clone()));
        }
    }

    match (&loaded.backend, &loaded.contextual) {
        (Backend::Classical, Some(model)) => report.extend(verify_cm_collapse(model, exec)),
        _ => report.push(Check::skipped("classical.collapse", "not a classical-backend model")),
    }

    match loaded.backend {
        Backend::Band { segments } => match band_reconstruction(&loaded.band_states, segments, exec) {
            Ok(r) => report.push(r.to_check()),
            Err(e) => report.push(Check::fail("quantum.born_reconstruction").with_detail(e.to_string())),
        },
        _ => report.push(Check::skipped("quantum.born_reconstruction", "not a band-backend model")),
    }

    match &loaded.hilbert {
        Some(h) => report.push(two_route_check(h)),
        None => report.push(Check::skipped("quantum.two_route", "no Hilbert-space backend")),
    }
    report
}

/// `Tr[P_F P_E ρ P_E P_F] / Tr[P_E ρ P_E] = Tr[τ_E(ρ) P_F]` for every
/// state and every pair of properties with non-null `E`.
fn two_route_check(h: &HilbertModel) -> Check {
    let mut witnesses = Vec::new();
    let mut gap: f64 = 0.0;
    let mut compared = 0;
    for s in h.states() {
        for e in h.properties() {
            if quantum::born(s, e).map_or(true, |p| p <= tolerance::NULL) {
                continue;
            }
            for f in h.properties() {
                let direct = quantum::q_conditional(s, e, f);
                let sequential = quantum::luders(s, e).and_then(|post| quantum::born(&post, f));
                compared += 1;
                match (direct, sequential) {
                    (Ok(a), Ok(b)) => {
                        gap = gap.max((a - b).abs());
                        if (a - b).abs() > tolerance::CMP {
                            witnesses.push(format!("{}: {} then {}: {a} vs {b}", s.name(), e.name(), f.name()));
                        }
                    }
                    (a, b) => witnesses.push(format!("{}: {} then {}: {a:?} vs {b:?}", s.name(), e.name(), f.name())),
                }
            }
        }
    }
    Check::from_witnesses("quantum.two_route", witnesses)
        .with_gap(gap)
        .with_tolerance(tolerance::CMP)
        .with_detail(format!("{compared} (S, E, F) triples"))
}
