//! State-indexed q-probabilities, the induced preorder on properties,
//! orthocomplemented lattices and generalized probability measures.
//!
//! Lattice tables are supplied by a backend or a model file and verified
//! here; nothing in this module synthesizes meets or joins from the
//! preorder.

use crate::exec::Execution;
use crate::language::{Proposition, PropertyId, StateId};
use crate::measurement::{self, MeasurementError};
use crate::model::ContextualModel;
use crate::report::{Check, Report};
use crate::tolerance;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error(transparent)]
    Measurement(#[from] MeasurementError),
    #[error("P_{state}({property}) = {value} is outside [0, 1]")]
    ValueRange { state: String, property: String, value: f64 },
    #[error("malformed table: {0}")]
    Shape(String),
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("unknown lattice element `{0}`")]
    UnknownElement(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown property `{0}`")]
    UnknownProperty(String),
    #[error("`{a}` and `{b}` have no {bound}")]
    NotALattice { a: String, b: String, bound: &'static str },
    #[error("`{0}` and `{1}` are not orthogonal")]
    NotOrthogonal(String, String),
    #[error("no first-kind transform is registered for `{0}`")]
    NoFirstKind(String),
    #[error("state `{state}` is excluded: P({property}) = 0 there")]
    StateExcluded { state: String, property: String },
    #[error("invalid first-kind transform for `{property}`: {reason}")]
    InvalidTransform { property: String, reason: String },
    #[error("conditioning property `{0}` has q-probability zero")]
    ConditionNull(String),
}

/// The table `P_S(E)` over a finite set of states and properties.
#[derive(Debug, Clone, PartialEq)]
pub struct StateProbabilityFamily {
    states: Vec<String>,
    properties: Vec<String>,
    /// Row-major, one row per state.
    table: Vec<f64>,
}

impl StateProbabilityFamily {
    /// `rows[s][e]`; values within `tolerance::CMP` of `[0, 1]` are clamped.
    pub fn new(states: Vec<String>, properties: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self, LatticeError> {
        if rows.len() != states.len() {
            return Err(LatticeError::Shape(format!("{} rows for {} states", rows.len(), states.len())));
        }
        let mut table = Vec::with_capacity(states.len() * properties.len());
        for (s, row) in rows.into_iter().enumerate() {
            if row.len() != properties.len() {
                return Err(LatticeError::Shape(format!(
                    "row `{}` has {} values for {} properties",
                    states[s],
                    row.len(),
                    properties.len()
                )));
            }
            for (e, value) in row.into_iter().enumerate() {
                if !(-tolerance::CMP..=1.0 + tolerance::CMP).contains(&value) {
                    return Err(LatticeError::ValueRange {
                        state: states[s].clone(),
                        property: properties[e].clone(),
                        value,
                    });
                }
                table.push(value.clamp(0.0, 1.0));
            }
        }
        Ok(StateProbabilityFamily { states, properties, table })
    }

    /// `P_S(E)` for every state and property of the model, through the canonical witnesses.
    pub fn from_model(model: &ContextualModel, exec: Execution) -> Result<Self, LatticeError> {
        let entity = model.entity();
        let np = entity.property_count();
        let cells = exec.map_range(entity.state_count() * np, |i| {
            let s = entity.state_id(i / np).expect("state index");
            let e = entity.property_id(i % np).expect("property index");
            q_probability(model, s, e)
        });
        let values = cells.into_iter().collect::<Result<Vec<f64>, _>>()?;
        let rows = values.chunks(np.max(1)).map(<[f64]>::to_vec).collect();
        Self::new(
            entity.states().map(|s| entity.state_name(s).to_string()).collect(),
            entity.properties().map(|e| entity.property_name(e).to_string()).collect(),
            rows,
        )
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn properties(&self) -> &[String] {
        &self.properties
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn property_count(&self) -> usize {
        self.properties.len()
    }

    pub fn value(&self, s: usize, e: usize) -> f64 {
        self.table[s * self.properties.len() + e]
    }

    pub fn row(&self, s: usize) -> &[f64] {
        let n = self.properties.len();
        &self.table[s * n..(s + 1) * n]
    }

    pub fn column(&self, e: usize) -> Vec<f64> {
        (0..self.states.len()).map(|s| self.value(s, e)).collect()
    }

    pub fn state_index(&self, name: &str) -> Result<usize, LatticeError> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| LatticeError::UnknownState(name.into()))
    }

    pub fn property_index(&self, name: &str) -> Result<usize, LatticeError> {
        self.properties
            .iter()
            .position(|e| e == name)
            .ok_or_else(|| LatticeError::UnknownProperty(name.into()))
    }
}

/// `P_S(E) = ⟨p(α_{Ec} | α_S)⟩` under the canonical witness of `α_{Ec}`:
/// the smallest procedure id measuring `E`, at its first context.
pub fn q_probability(model: &ContextualModel, s: StateId, e: PropertyId) -> Result<f64, LatticeError> {
    let m = model
        .catalog()
        .for_property(e)
        .next()
        .ok_or_else(|| LatticeError::UnknownProperty(model.entity().property_name(e).into()))?;
    let c = m.contexts()[0];
    let value = measurement::mean_conditional(model, &Proposition::prop(e, c), &Proposition::state(s), m)?;
    Ok(value.value)
}

/// The preorder `E ≺ F ⇔ ∀S: P_S(E) ≤ P_S(F) + tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyPreorder {
    names: Vec<String>,
    relation: Vec<Vec<bool>>,
    tolerance: f64,
}

impl PropertyPreorder {
    pub fn from_family(family: &StateProbabilityFamily, tolerance: f64) -> Self {
        let n = family.property_count();
        let relation = (0..n)
            .map(|e| {
                (0..n)
                    .map(|f| (0..family.state_count()).all(|s| family.value(s, e) <= family.value(s, f) + tolerance))
                    .collect()
            })
            .collect();
        PropertyPreorder { names: family.properties().to_vec(), relation, tolerance }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn leq(&self, e: usize, f: usize) -> bool {
        self.relation[e][f]
    }

    pub fn equivalent(&self, e: usize, f: usize) -> bool {
        self.relation[e][f] && self.relation[f][e]
    }

    /// `≈`-classes, each listed in property order, ordered by first member.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for e in 0..self.len() {
            match classes.iter_mut().find(|c| self.equivalent(c[0], e)) {
                Some(class) => class.push(e),
                None => classes.push(vec![e]),
            }
        }
        classes
    }

    /// The order induced on [`classes`](Self::classes) by representatives.
    pub fn quotient(&self) -> Vec<Vec<bool>> {
        let classes = self.classes();
        classes
            .iter()
            .map(|a| classes.iter().map(|b| self.leq(a[0], b[0])).collect())
            .collect()
    }

    /// Reflexivity and transitivity; with a positive tolerance the latter can fail.
    pub fn verify(&self) -> Report {
        let mut report = Report::new();
        let n = self.len();
        let reflexive: Vec<String> = (0..n).filter(|&e| !self.leq(e, e)).map(|e| self.names[e].clone()).collect();
        report.push(Check::from_witnesses("preorder.reflexive", reflexive));
        let mut transitive = Vec::new();
        for a in 0..n {
            for b in (0..n).filter(|&b| self.leq(a, b)) {
                for c in (0..n).filter(|&c| self.leq(b, c) && !self.leq(a, c)) {
                    transitive.push(format!("{} ≺ {} ≺ {} but not {} ≺ {}", self.names[a], self.names[b], self.names[c], self.names[a], self.names[c]));
                }
            }
        }
        report.push(Check::from_witnesses("preorder.transitive", transitive).with_tolerance(self.tolerance));
        report
    }
}

impl fmt::Display for PropertyPreorder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let classes = self.classes();
        let label = |c: &Vec<usize>| {
            let names: Vec<&str> = c.iter().map(|&i| self.names[i].as_str()).collect();
            format!("{{{}}}", names.join(", "))
        };
        for (i, a) in classes.iter().enumerate() {
            let above: Vec<String> = classes
                .iter()
                .enumerate()
                .filter(|&(j, b)| j != i && self.leq(a[0], b[0]))
                .map(|(_, b)| label(b))
                .collect();
            writeln!(f, "{} ≺ [{}]", label(a), above.join(", "))?;
        }
        Ok(())
    }
}

pub fn build_preorder(model: &ContextualModel, exec: Execution, tolerance: f64) -> Result<PropertyPreorder, LatticeError> {
    let family = StateProbabilityFamily::from_model(model, exec)?;
    Ok(PropertyPreorder::from_family(&family, tolerance))
}

/// A finite lattice with an orthocomplementation, given by explicit tables.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoLattice {
    elements: Vec<String>,
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
    ortho: Vec<usize>,
}

fn check_names(elements: &[String]) -> Result<(), LatticeError> {
    let mut seen = BTreeSet::new();
    match elements.iter().find(|e| !seen.insert(e.as_str())) {
        Some(dup) => Err(LatticeError::DuplicateElement(dup.clone())),
        None => Ok(()),
    }
}

fn check_square<T>(name: &str, table: &[Vec<T>], n: usize) -> Result<(), LatticeError> {
    if table.len() != n || table.iter().any(|row| row.len() != n) {
        return Err(LatticeError::Shape(format!("{name} table is not {n}×{n}")));
    }
    Ok(())
}

impl OrthoLattice {
    /// Tables are checked for shape only; see [`check_ortholattice`] for the axioms.
    pub fn new(
        elements: Vec<String>,
        leq: Vec<Vec<bool>>,
        meet: Vec<Vec<usize>>,
        join: Vec<Vec<usize>>,
        ortho: Vec<usize>,
    ) -> Result<Self, LatticeError> {
        let n = elements.len();
        check_names(&elements)?;
        check_square("order", &leq, n)?;
        check_square("meet", &meet, n)?;
        check_square("join", &join, n)?;
        if ortho.len() != n {
            return Err(LatticeError::Shape(format!("orthocomplement table has {} entries for {n} elements", ortho.len())));
        }
        if meet.iter().chain(&join).flatten().chain(&ortho).any(|&x| x >= n) {
            return Err(LatticeError::Shape("table entry out of range".into()));
        }
        Ok(OrthoLattice { elements, leq, meet, join, ortho })
    }

    /// Derives meet and join as greatest lower and least upper bounds of `leq`.
    pub fn from_order(elements: Vec<String>, leq: Vec<Vec<bool>>, ortho: Vec<usize>) -> Result<Self, LatticeError> {
        let n = elements.len();
        check_square("order", &leq, n)?;
        let bound = |a: usize, b: usize, lower: bool| -> Option<usize> {
            let below = |x: usize, y: usize| if lower { leq[x][y] } else { leq[y][x] };
            let candidates: Vec<usize> = (0..n).filter(|&x| below(x, a) && below(x, b)).collect();
            candidates.iter().copied().find(|&g| candidates.iter().all(|&x| below(x, g)))
        };
        let mut meet = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                let name = |bound| LatticeError::NotALattice {
                    a: elements[a].clone(),
                    b: elements[b].clone(),
                    bound,
                };
                meet[a][b] = bound(a, b, true).ok_or_else(|| name("greatest lower bound"))?;
                join[a][b] = bound(a, b, false).ok_or_else(|| name("least upper bound"))?;
            }
        }
        Self::new(elements, leq, meet, join, ortho)
    }

    /// Closes `pairs` (meaning `a ≤ b`) reflexively and transitively, then derives meet and join.
    pub fn from_relation(elements: Vec<String>, pairs: &[(usize, usize)], ortho: Vec<usize>) -> Result<Self, LatticeError> {
        let n = elements.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(LatticeError::Shape("order pair out of range".into()));
            }
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
        Self::from_order(elements, leq, ortho)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn name(&self, a: usize) -> &str {
        &self.elements[a]
    }

    pub fn index(&self, name: &str) -> Result<usize, LatticeError> {
        self.elements
            .iter()
            .position(|e| e == name)
            .ok_or_else(|| LatticeError::UnknownElement(name.into()))
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a][b]
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a][b]
    }

    pub fn ortho(&self, a: usize) -> usize {
        self.ortho[a]
    }

    /// `𝖮`, the element below every other.
    pub fn bottom(&self) -> Option<usize> {
        (0..self.len()).find(|&a| (0..self.len()).all(|b| self.leq(a, b)))
    }

    /// `𝖴`, the element above every other.
    pub fn top(&self) -> Option<usize> {
        (0..self.len()).find(|&a| (0..self.len()).all(|b| self.leq(b, a)))
    }

    /// `a ⊥ b ⇔ a ≤ b⊥`.
    pub fn orthogonal(&self, a: usize, b: usize) -> bool {
        self.leq(a, self.ortho(b))
    }

    /// A triple violating `a ∧ (b ∨ c) = (a ∧ b) ∨ (a ∧ c)`, if any.
    pub fn distributivity_witness(&self) -> Option<(usize, usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c))))
            .find(|&(a, b, c)| self.meet(a, self.join(b, c)) != self.join(self.meet(a, b), self.meet(a, c)))
    }

    /// A pair `a ≤ b` with `b ≠ a ∨ (b ∧ a⊥)`, if any.
    pub fn orthomodularity_witness(&self) -> Option<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .find(|&(a, b)| self.leq(a, b) && self.join(a, self.meet(b, self.ortho(a))) != b)
    }

    /// Passes every ortholattice axiom and is distributive.
    pub fn is_boolean(&self) -> bool {
        check_ortholattice(self).passed() && self.distributivity_witness().is_none()
    }
}

/// Verifies partial order, bounds, meet/join tables and orthocomplement laws;
/// distributivity and orthomodularity are reported as information.
pub fn check_ortholattice(lattice: &OrthoLattice) -> Report {
    let l = lattice;
    let n = l.len();
    let name = |a: usize| l.name(a).to_string();
    let pairs = || (0..n).flat_map(move |a| (0..n).map(move |b| (a, b)));
    let mut report = Report::new();

    let mut order = Vec::new();
    order.extend((0..n).filter(|&a| !l.leq(a, a)).map(|a| format!("{} ≰ {}", name(a), name(a))));
    order.extend(
        pairs()
            .filter(|&(a, b)| a < b && l.leq(a, b) && l.leq(b, a))
            .map(|(a, b)| format!("{} ≤ {} ≤ {}", name(a), name(b), name(a))),
    );
    for (a, b) in pairs().filter(|&(a, b)| l.leq(a, b)) {
        if let Some(c) = (0..n).find(|&c| l.leq(b, c) && !l.leq(a, c)) {
            order.push(format!("{} ≤ {} ≤ {} but {} ≰ {}", name(a), name(b), name(c), name(a), name(c)));
        }
    }
    report.push(Check::from_witnesses("lattice.partial_order", order));

    let (bottom, top) = (l.bottom(), l.top());
    let mut bounds = Vec::new();
    if bottom.is_none() {
        bounds.push("no bottom element".to_string());
    }
    if top.is_none() {
        bounds.push("no top element".to_string());
    }
    report.push(Check::from_witnesses("lattice.bounds", bounds));

    let mut tables = Vec::new();
    for (a, b) in pairs() {
        let m = l.meet(a, b);
        let glb = l.leq(m, a) && l.leq(m, b) && (0..n).all(|x| !(l.leq(x, a) && l.leq(x, b)) || l.leq(x, m));
        if !glb {
            tables.push(format!("{} ∧ {} = {} is not the greatest lower bound", name(a), name(b), name(m)));
        }
        let j = l.join(a, b);
        let lub = l.leq(a, j) && l.leq(b, j) && (0..n).all(|x| !(l.leq(a, x) && l.leq(b, x)) || l.leq(j, x));
        if !lub {
            tables.push(format!("{} ∨ {} = {} is not the least upper bound", name(a), name(b), name(j)));
        }
    }
    report.push(Check::from_witnesses("lattice.meet_join", tables));

    let involution = (0..n)
        .filter(|&a| l.ortho(l.ortho(a)) != a)
        .map(|a| format!("{}: {}⊥⊥ = {}", name(a), name(a), name(l.ortho(l.ortho(a)))))
        .collect();
    report.push(Check::from_witnesses("lattice.ortho_involution", involution));

    let antitone = pairs()
        .filter(|&(a, b)| l.leq(a, b) && !l.leq(l.ortho(b), l.ortho(a)))
        .map(|(a, b)| format!("{} ≤ {} but {}⊥ ≰ {}⊥", name(a), name(b), name(b), name(a)))
        .collect();
    report.push(Check::from_witnesses("lattice.ortho_antitone", antitone));

    let mut complement = Vec::new();
    for a in 0..n {
        let (m, j) = (l.meet(a, l.ortho(a)), l.join(a, l.ortho(a)));
        if Some(m) != bottom {
            complement.push(format!("{} ∧ {}⊥ = {}", name(a), name(a), name(m)));
        }
        if Some(j) != top {
            complement.push(format!("{} ∨ {}⊥ = {}", name(a), name(a), name(j)));
        }
    }
    report.push(Check::from_witnesses("lattice.ortho_complement", complement));

    let distributive = match l.distributivity_witness() {
        None => "distributive (Boolean)".to_string(),
        Some((a, b, c)) => format!(
            "not distributive: {a} ∧ ({b} ∨ {c}) = {} but ({a} ∧ {b}) ∨ ({a} ∧ {c}) = {}",
            name(l.meet(a, l.join(b, c))),
            name(l.join(l.meet(a, b), l.meet(a, c))),
            a = name(a),
            b = name(b),
            c = name(c)
        ),
    };
    report.push(Check::info("lattice.distributive", distributive));
    let orthomodular = match l.orthomodularity_witness() {
        None => "orthomodular".to_string(),
        Some((a, b)) => format!("not orthomodular: {} ≤ {} but {} ≠ {} ∨ ({} ∧ {}⊥)", name(a), name(b), name(b), name(a), name(b), name(a)),
    };
    report.push(Check::info("lattice.orthomodular", orthomodular));
    report
}

/// Pairwise-orthogonal families of non-bottom elements (size ≥ 2), ordered
/// by size then lexicographically. The flag is true when the list is every
/// such family; otherwise it holds all pairs and all maximal families.
pub fn orthogonal_families(lattice: &OrthoLattice) -> (Vec<Vec<usize>>, bool) {
    const EXHAUSTIVE_LIMIT: usize = 200_000;
    let bottom = lattice.bottom();
    let nodes: Vec<usize> = (0..lattice.len()).filter(|&a| Some(a) != bottom).collect();
    let adjacent = |a: usize, b: usize| a != b && lattice.orthogonal(a, b);

    if lattice.len() <= 32 {
        let mut families = Vec::new();
        let mut stack: Vec<Vec<usize>> = nodes.iter().map(|&a| vec![a]).collect();
        let mut complete = true;
        while let Some(clique) = stack.pop() {
            let last = *clique.last().expect("non-empty");
            for &b in nodes.iter().filter(|&&b| b > last) {
                if clique.iter().all(|&a| adjacent(a, b)) {
                    let mut bigger = clique.clone();
                    bigger.push(b);
                    families.push(bigger.clone());
                    stack.push(bigger);
                }
            }
            if families.len() > EXHAUSTIVE_LIMIT {
                complete = false;
                break;
            }
        }
        if complete {
            families.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            return (families, true);
        }
    }

    let mut families: Vec<Vec<usize>> = Vec::new();
    for (i, &a) in nodes.iter().enumerate() {
        for &b in &nodes[i + 1..] {
            if adjacent(a, b) {
                families.push(vec![a, b]);
            }
        }
    }
    let mut maximal = Vec::new();
    bron_kerbosch(&mut Vec::new(), nodes.clone(), Vec::new(), &adjacent, &mut maximal);
    for mut clique in maximal.into_iter().filter(|c| c.len() > 2) {
        clique.sort_unstable();
        families.push(clique);
    }
    families.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    families.dedup();
    (families, false)
}

fn bron_kerbosch(
    r: &mut Vec<usize>,
    mut p: Vec<usize>,
    mut x: Vec<usize>,
    adjacent: &impl Fn(usize, usize) -> bool,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        out.push(r.clone());
        return;
    }
    let pivot = *p.iter().chain(&x).max_by_key(|&&u| p.iter().filter(|&&v| adjacent(u, v)).count()).expect("non-empty");
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adjacent(pivot, v)).collect();
    for v in candidates {
        r.push(v);
        let np = p.iter().copied().filter(|&u| adjacent(u, v)).collect();
        let nx = x.iter().copied().filter(|&u| adjacent(u, v)).collect();
        bron_kerbosch(r, np, nx, adjacent, out);
        r.pop();
        p.retain(|&u| u != v);
        x.push(v);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GpmViolation {
    /// `P(𝖴) ≠ 1`.
    TopMass { state: String, value: f64 },
    /// `P(⋁ family) ≠ Σ P(member)`.
    Additivity { state: String, family: Vec<String>, join: String, join_value: f64, sum: f64 },
    /// A value outside `[0, 1]`.
    Range { state: String, element: String, value: f64 },
}

impl GpmViolation {
    pub fn gap(&self) -> f64 {
        match self {
            GpmViolation::TopMass { value, .. } => (value - 1.0).abs(),
            GpmViolation::Additivity { join_value, sum, .. } => (join_value - sum).abs(),
            GpmViolation::Range { value, .. } => {
                if *value < 0.0 { -value } else { value - 1.0 }
            }
        }
    }
}

impl fmt::Display for GpmViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GpmViolation::TopMass { state, value } => write!(f, "{state}: P(top) = {value}"),
            GpmViolation::Additivity { state, family, join, join_value, sum } => write!(
                f,
                "{state}: ({}) joins to {join} with P = {join_value} but the values sum to {sum}",
                family.join(", ")
            ),
            GpmViolation::Range { state, element, value } => write!(f, "{state}: P({element}) = {value}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpmReport {
    pub measures: usize,
    pub families: usize,
    pub exhaustive: bool,
    pub tolerance: f64,
    pub violations: Vec<GpmViolation>,
}

impl GpmReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_check(&self) -> Check {
        let gap = self.violations.iter().map(GpmViolation::gap).fold(0.0, f64::max);
        Check::from_witnesses("lattice.gpm", self.violations.iter().map(ToString::to_string).collect())
            .with_gap(gap)
            .with_tolerance(self.tolerance)
            .with_detail(format!(
                "{} measure(s), {} orthogonal families ({})",
                self.measures,
                self.families,
                if self.exhaustive { "exhaustive" } else { "pairs and maximal families" }
            ))
    }
}

fn gpm_violations(
    state: &str,
    measure: &[f64],
    lattice: &OrthoLattice,
    families: &[Vec<usize>],
    tolerance: f64,
) -> Vec<GpmViolation> {
    let mut out = Vec::new();
    for (a, &value) in measure.iter().enumerate() {
        if !(-tolerance..=1.0 + tolerance).contains(&value) {
            out.push(GpmViolation::Range { state: state.into(), element: lattice.name(a).into(), value });
        }
    }
    match lattice.top() {
        Some(top) if (measure[top] - 1.0).abs() > tolerance => {
            out.push(GpmViolation::TopMass { state: state.into(), value: measure[top] })
        }
        _ => {}
    }
    for family in families {
        let join = family[1..].iter().fold(family[0], |acc, &b| lattice.join(acc, b));
        let sum: f64 = family.iter().map(|&a| measure[a]).sum();
        if (measure[join] - sum).abs() > tolerance {
            out.push(GpmViolation::Additivity {
                state: state.into(),
                family: family.iter().map(|&a| lattice.name(a).to_string()).collect(),
                join: lattice.name(join).into(),
                join_value: measure[join],
                sum,
            });
        }
    }
    out
}

/// Checks `P(𝖴) = 1` and additivity over orthogonal families for one
/// measure indexed by lattice element.
pub fn check_gpm(measure: &[f64], lattice: &OrthoLattice, tolerance: f64) -> Result<GpmReport, LatticeError> {
    if measure.len() != lattice.len() {
        return Err(LatticeError::Shape(format!("{} values for {} elements", measure.len(), lattice.len())));
    }
    let (families, exhaustive) = orthogonal_families(lattice);
    let violations = gpm_violations("P", measure, lattice, &families, tolerance);
    Ok(GpmReport { measures: 1, families: families.len(), exhaustive, tolerance, violations })
}

/// `P_S` restricted to the lattice, whose elements must be property names of the family.
pub fn lattice_measure(lattice: &OrthoLattice, family: &StateProbabilityFamily, s: usize) -> Result<Vec<f64>, LatticeError> {
    lattice
        .elements()
        .iter()
        .map(|name| {
            let e = family
                .property_index(name)
                .map_err(|_| LatticeError::UnknownElement(name.clone()))?;
            Ok(family.value(s, e))
        })
        .collect()
}

/// [`check_gpm`] for every `P_S` of the family.
pub fn check_gpm_family(
    lattice: &OrthoLattice,
    family: &StateProbabilityFamily,
    tolerance: f64,
    exec: Execution,
) -> Result<GpmReport, LatticeError> {
    let (families, exhaustive) = orthogonal_families(lattice);
    let measures = (0..family.state_count())
        .map(|s| lattice_measure(lattice, family, s))
        .collect::<Result<Vec<_>, _>>()?;
    let per_state = exec.map_range(measures.len(), |s| {
        gpm_violations(&family.states()[s], &measures[s], lattice, &families, tolerance)
    });
    Ok(GpmReport {
        measures: measures.len(),
        families: families.len(),
        exhaustive,
        tolerance,
        violations: per_state.into_iter().flatten().collect(),
    })
}

/// `(P_S((E1 ∨ E2) ∧ F) / P_S(F),  P_S(E1 ∧ F) / P_S(F) + P_S(E2 ∧ F) / P_S(F))`
/// for orthogonal `E1`, `E2`. The two sides agree on distributive lattices.
pub fn classical_conditioning_failure(
    lattice: &OrthoLattice,
    family: &StateProbabilityFamily,
    state: &str,
    e1: &str,
    e2: &str,
    f: &str,
) -> Result<(f64, f64), LatticeError> {
    let s = family.state_index(state)?;
    let (a, b, c) = (lattice.index(e1)?, lattice.index(e2)?, lattice.index(f)?);
    if !lattice.orthogonal(a, b) {
        return Err(LatticeError::NotOrthogonal(e1.into(), e2.into()));
    }
    let measure = lattice_measure(lattice, family, s)?;
    let pf = measure[c];
    if pf <= tolerance::NULL {
        return Err(LatticeError::ConditionNull(f.into()));
    }
    let lhs = measure[lattice.meet(lattice.join(a, b), c)] / pf;
    let rhs = measure[lattice.meet(a, c)] / pf + measure[lattice.meet(b, c)] / pf;
    Ok((lhs, rhs))
}

/// A first-kind state transform `t_F`, as data: state indices of a
/// family mapped to state indices, defined on `{S | P_S(F) ≠ 0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirstKindTransform {
    property: usize,
    map: BTreeMap<usize, usize>,
}

impl FirstKindTransform {
    pub fn new(property: usize, map: BTreeMap<usize, usize>) -> Self {
        FirstKindTransform { property, map }
    }

    /// `t_F(S) = S` on `domain`.
    pub fn identity(property: usize, domain: impl IntoIterator<Item = usize>) -> Self {
        FirstKindTransform { property, map: domain.into_iter().map(|s| (s, s)).collect() }
    }

    pub fn property(&self) -> usize {
        self.property
    }

    pub fn map(&self) -> &BTreeMap<usize, usize> {
        &self.map
    }

    pub fn apply(&self, s: usize) -> Option<usize> {
        self.map.get(&s).copied()
    }

    /// The domain must be exactly the states with `P_S(F) > 0` and every
    /// image must satisfy `P_{t_F(S)}(F) = 1`.
    pub fn validate(&self, family: &StateProbabilityFamily, tolerance: f64) -> Result<(), LatticeError> {
        let f = self.property;
        let property = family
            .properties()
            .get(f)
            .ok_or_else(|| LatticeError::UnknownProperty(format!("#{f}")))?
            .clone();
        let invalid = |reason: String| LatticeError::InvalidTransform { property: property.clone(), reason };
        for s in 0..family.state_count() {
            let in_domain = family.value(s, f) > tolerance::NULL;
            if in_domain != self.map.contains_key(&s) {
                return Err(invalid(format!(
                    "state `{}` has P = {} but is {} the domain",
                    family.states()[s],
                    family.value(s, f),
                    if in_domain { "missing from" } else { "in" }
                )));
            }
        }
        for (&s, &t) in &self.map {
            if t >= family.state_count() {
                return Err(invalid(format!("image #{t} is not a state")));
            }
            if (family.value(t, f) - 1.0).abs() > tolerance {
                return Err(invalid(format!(
                    "`{}` maps to `{}` where P = {}, not 1",
                    family.states()[s],
                    family.states()[t],
                    family.value(t, f)
                )));
            }
        }
        Ok(())
    }
}

/// `P_S(E ‖ F) = P_{t_F(S)}(E)`. Reads only `t_F` and the table.
pub fn conditional_q_probability(
    family: &StateProbabilityFamily,
    transform: &FirstKindTransform,
    s: usize,
    e: usize,
) -> Result<f64, LatticeError> {
    match transform.apply(s) {
        Some(t) => Ok(family.value(t, e)),
        None => Err(LatticeError::StateExcluded {
            state: family.states()[s].clone(),
            property: family.properties()[transform.property()].clone(),
        }),
    }
}

/// [`conditional_q_probability`] on a model, using its registered `t_F`.
pub fn conditional_q_probability_in(
    model: &ContextualModel,
    s: StateId,
    e: PropertyId,
    f: PropertyId,
) -> Result<f64, LatticeError> {
    let entity = model.entity();
    let transform = model
        .first_kind(f)
        .ok_or_else(|| LatticeError::NoFirstKind(entity.property_name(f).into()))?;
    let t = transform.apply(s.index()).ok_or_else(|| LatticeError::StateExcluded {
        state: entity.state_name(s).into(),
        property: entity.property_name(f).into(),
    })?;
    q_probability(model, entity.state_id(t).expect("validated image"), e)
}

#[cfg(test)]
mod tests;
