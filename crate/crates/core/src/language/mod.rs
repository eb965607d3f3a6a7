//! Syntax and classical semantics of the contextual propositional language.
//!
//! An [`Entity`] declares three disjoint finite sets: properties, states and
//! μ-contexts. Atoms are either state atoms `state(S)` or context-indexed
//! property atoms `prop(E, c)`. Propositions close atoms under `!`, `&`, `|`
//! and are evaluated by [`TruthAssignment`]s, which map every atom of the
//! entity to a truth value and make at most one state atom true.

mod parser;

pub use parser::{parse_proposition, ParseError, ParseErrorKind};

use fixedbitset::FixedBitSet;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{BitAnd, BitOr, Not};
use thiserror::Error;

macro_rules! index_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(u32);

        impl $name {
            /// Position of this id in the owning entity's declaration order.
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

index_id!(
    /// A property, by declaration index in its entity.
    PropertyId
);
index_id!(
    /// A state, by declaration index in its entity.
    StateId
);
index_id!(
    /// A μ-context, by declaration index in its entity.
    ContextId
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomId {
    State(StateId),
    Property(PropertyId, ContextId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Property,
    State,
    Context,
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymbolKind::Property => "property",
            SymbolKind::State => "state",
            SymbolKind::Context => "context",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LanguageError {
    #[error("entity declares no {0}")]
    EmptySet(SymbolKind),
    #[error("identifier `{0}` is declared more than once")]
    DuplicateName(String),
    #[error("`{0}` is not a valid identifier")]
    InvalidName(String),
    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: SymbolKind, name: String },
    #[error("states `{0}` and `{1}` are both true in one assignment")]
    StateExclusivity(String, String),
    #[error("atom {0:?} is outside the assignment's domain")]
    AtomOutOfDomain(AtomId),
    #[error("assignment belongs to a different entity layout")]
    LayoutMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symbol {
    Property(PropertyId),
    State(StateId),
    Context(ContextId),
}

/// Shape of an entity's atom set, enough to index atoms without the names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AtomLayout {
    properties: u32,
    states: u32,
    contexts: u32,
}

impl AtomLayout {
    pub fn atom_count(self) -> usize {
        self.states as usize + self.properties as usize * self.contexts as usize
    }

    /// State atoms come first, then `(property, context)` in row-major order.
    pub fn atom_index(self, atom: AtomId) -> Option<usize> {
        match atom {
            AtomId::State(s) if s.0 < self.states => Some(s.index()),
            AtomId::Property(e, c) if e.0 < self.properties && c.0 < self.contexts => Some(
                self.states as usize + e.index() * self.contexts as usize + c.index(),
            ),
            _ => None,
        }
    }
}

/// The triple of properties, states and μ-contexts.
#[derive(Debug, Clone, PartialEq)]
pub struct Entity {
    properties: Vec<String>,
    states: Vec<String>,
    contexts: Vec<String>,
    lookup: HashMap<String, Symbol>,
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Entity {
    pub fn new<P, S, C>(
        properties: impl IntoIterator<Item = P>,
        states: impl IntoIterator<Item = S>,
        contexts: impl IntoIterator<Item = C>,
    ) -> Result<Self, LanguageError>
    where
        P: Into<String>,
        S: Into<String>,
        C: Into<String>,
    {
        let properties: Vec<String> = properties.into_iter().map(Into::into).collect();
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        let contexts: Vec<String> = contexts.into_iter().map(Into::into).collect();
        for (set, kind) in [
            (&properties, SymbolKind::Property),
            (&states, SymbolKind::State),
            (&contexts, SymbolKind::Context),
        ] {
            if set.is_empty() {
                return Err(LanguageError::EmptySet(kind));
            }
        }
        let mut lookup = HashMap::new();
        let symbols = properties
            .iter()
            .enumerate()
            .map(|(i, n)| (n, Symbol::Property(PropertyId(i as u32))))
            .chain(states.iter().enumerate().map(|(i, n)| (n, Symbol::State(StateId(i as u32)))))
            .chain(
                contexts
                    .iter()
                    .enumerate()
                    .map(|(i, n)| (n, Symbol::Context(ContextId(i as u32)))),
            );
        for (name, symbol) in symbols {
            if !is_identifier(name) {
                return Err(LanguageError::InvalidName(name.clone()));
            }
            if lookup.insert(name.clone(), symbol).is_some() {
                return Err(LanguageError::DuplicateName(name.clone()));
            }
        }
        Ok(Entity { properties, states, contexts, lookup })
    }

    pub fn layout(&self) -> AtomLayout {
        AtomLayout {
            properties: self.properties.len() as u32,
            states: self.states.len() as u32,
            contexts: self.contexts.len() as u32,
        }
    }

    pub fn property_count(&self) -> usize {
        self.properties.len()
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn context_count(&self) -> usize {
        self.contexts.len()
    }

    pub fn properties(&self) -> impl ExactSizeIterator<Item = PropertyId> + Clone {
        (0..self.properties.len() as u32).map(PropertyId)
    }

    pub fn states(&self) -> impl ExactSizeIterator<Item = StateId> + Clone {
        (0..self.states.len() as u32).map(StateId)
    }

    pub fn contexts(&self) -> impl ExactSizeIterator<Item = ContextId> + Clone {
        (0..self.contexts.len() as u32).map(ContextId)
    }

    /// Every atom of the entity, in layout order.
    pub fn atoms(&self) -> Vec<AtomId> {
        let mut atoms: Vec<AtomId> = self.states().map(AtomId::State).collect();
        for e in self.properties() {
            atoms.extend(self.contexts().map(|c| AtomId::Property(e, c)));
        }
        atoms
    }

    fn symbol(&self, name: &str) -> Option<Symbol> {
        self.lookup.get(name).copied()
    }

    pub fn property(&self, name: &str) -> Result<PropertyId, LanguageError> {
        match self.symbol(name) {
            Some(Symbol::Property(id)) => Ok(id),
            _ => Err(LanguageError::UnknownName { kind: SymbolKind::Property, name: name.into() }),
        }
    }

    pub fn state(&self, name: &str) -> Result<StateId, LanguageError> {
        match self.symbol(name) {
            Some(Symbol::State(id)) => Ok(id),
            _ => Err(LanguageError::UnknownName { kind: SymbolKind::State, name: name.into() }),
        }
    }

    pub fn context(&self, name: &str) -> Result<ContextId, LanguageError> {
        match self.symbol(name) {
            Some(Symbol::Context(id)) => Ok(id),
            _ => Err(LanguageError::UnknownName { kind: SymbolKind::Context, name: name.into() }),
        }
    }

    /// Which set, if any, declares `name`.
    pub fn kind_of(&self, name: &str) -> Option<SymbolKind> {
        self.symbol(name).map(|s| match s {
            Symbol::Property(_) => SymbolKind::Property,
            Symbol::State(_) => SymbolKind::State,
            Symbol::Context(_) => SymbolKind::Context,
        })
    }

    pub fn property_name(&self, id: PropertyId) -> &str {
        &self.properties[id.index()]
    }

    pub fn state_name(&self, id: StateId) -> &str {
        &self.states[id.index()]
    }

    pub fn context_name(&self, id: ContextId) -> &str {
        &self.contexts[id.index()]
    }

    pub fn property_id(&self, index: usize) -> Option<PropertyId> {
        (index < self.properties.len()).then_some(PropertyId(index as u32))
    }

    pub fn state_id(&self, index: usize) -> Option<StateId> {
        (index < self.states.len()).then_some(StateId(index as u32))
    }

    pub fn context_id(&self, index: usize) -> Option<ContextId> {
        (index < self.contexts.len()).then_some(ContextId(index as u32))
    }

    /// Parses an atom written as `state(S)` or `prop(E,c)`.
    pub fn parse_atom(&self, text: &str) -> Result<AtomId, ParseError> {
        match parse_proposition(text, self)? {
            Proposition::Atom(atom) => Ok(atom),
            _ => Err(ParseError { position: 0, kind: ParseErrorKind::ExpectedAtom }),
        }
    }

    pub fn atom_display(&self, atom: AtomId) -> String {
        match atom {
            AtomId::State(s) => format!("state({})", self.state_name(s)),
            AtomId::Property(e, c) => {
                format!("prop({},{})", self.property_name(e), self.context_name(c))
            }
        }
    }
}

/// Propositions of the language: atoms closed under negation, conjunction, disjunction.
///
/// Equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Proposition {
    Atom(AtomId),
    Not(Box<Proposition>),
    And(Box<Proposition>, Box<Proposition>),
    Or(Box<Proposition>, Box<Proposition>),
}

impl Proposition {
    pub fn state(s: StateId) -> Self {
        Proposition::Atom(AtomId::State(s))
    }

    pub fn prop(e: PropertyId, c: ContextId) -> Self {
        Proposition::Atom(AtomId::Property(e, c))
    }

    pub fn negate(self) -> Self {
        Proposition::Not(Box::new(self))
    }

    pub fn and(self, other: Proposition) -> Self {
        Proposition::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Proposition) -> Self {
        Proposition::Or(Box::new(self), Box::new(other))
    }

    /// Visits every atom occurrence, left to right.
    pub fn for_each_atom(&self, f: &mut impl FnMut(AtomId)) {
        match self {
            Proposition::Atom(a) => f(*a),
            Proposition::Not(x) => x.for_each_atom(f),
            Proposition::And(l, r) | Proposition::Or(l, r) => {
                l.for_each_atom(f);
                r.for_each_atom(f);
            }
        }
    }

    /// The set of properties occurring in the proposition.
    pub fn properties(&self) -> BTreeSet<PropertyId> {
        let mut out = BTreeSet::new();
        self.for_each_atom(&mut |a| {
            if let AtomId::Property(e, _) = a {
                out.insert(e);
            }
        });
        out
    }

    /// The set of μ-contexts occurring in the proposition.
    pub fn contexts(&self) -> BTreeSet<ContextId> {
        let mut out = BTreeSet::new();
        self.for_each_atom(&mut |a| {
            if let AtomId::Property(_, c) = a {
                out.insert(c);
            }
        });
        out
    }

    pub fn has_state_atoms(&self) -> bool {
        let mut found = false;
        self.for_each_atom(&mut |a| found |= matches!(a, AtomId::State(_)));
        found
    }

    pub fn has_property_atoms(&self) -> bool {
        let mut found = false;
        self.for_each_atom(&mut |a| found |= matches!(a, AtomId::Property(..)));
        found
    }

    /// Replaces the context of every property atom by `c`.
    pub fn with_context(&self, c: ContextId) -> Proposition {
        match self {
            Proposition::Atom(AtomId::Property(e, _)) => Proposition::prop(*e, c),
            Proposition::Atom(a) => Proposition::Atom(*a),
            Proposition::Not(x) => x.with_context(c).negate(),
            Proposition::And(l, r) => l.with_context(c).and(r.with_context(c)),
            Proposition::Or(l, r) => l.with_context(c).or(r.with_context(c)),
        }
    }

    /// Number of connectives on the longest root-to-leaf path, counting atoms as level 1.
    pub fn depth(&self) -> usize {
        match self {
            Proposition::Atom(_) => 1,
            Proposition::Not(x) => 1 + x.depth(),
            Proposition::And(l, r) | Proposition::Or(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    pub fn display<'a>(&'a self, entity: &'a Entity) -> PropositionDisplay<'a> {
        PropositionDisplay { prop: self, entity }
    }

    pub(crate) fn eval_in(&self, w: &TruthAssignment, context: Option<ContextId>) -> Result<bool, LanguageError> {
        Ok(match self {
            Proposition::Atom(AtomId::Property(e, c)) => {
                w.value(AtomId::Property(*e, context.unwrap_or(*c)))?
            }
            Proposition::Atom(a) => w.value(*a)?,
            Proposition::Not(x) => !x.eval_in(w, context)?,
            Proposition::And(l, r) => l.eval_in(w, context)? && r.eval_in(w, context)?,
            Proposition::Or(l, r) => l.eval_in(w, context)? || r.eval_in(w, context)?,
        })
    }
}

impl Not for Proposition {
    type Output = Proposition;
    fn not(self) -> Proposition {
        self.negate()
    }
}

impl BitAnd for Proposition {
    type Output = Proposition;
    fn bitand(self, rhs: Proposition) -> Proposition {
        self.and(rhs)
    }
}

impl BitOr for Proposition {
    type Output = Proposition;
    fn bitor(self, rhs: Proposition) -> Proposition {
        self.or(rhs)
    }
}

/// Prints a proposition in the surface grammar with minimal parentheses.
pub struct PropositionDisplay<'a> {
    prop: &'a Proposition,
    entity: &'a Entity,
}

impl PropositionDisplay<'_> {
    // 0: disjunction, 1: conjunction, 2: negation / atom
    fn write(&self, f: &mut fmt::Formatter<'_>, node: &Proposition, level: u8) -> fmt::Result {
        match node {
            Proposition::Atom(a) => f.write_str(&self.entity.atom_display(*a)),
            Proposition::Not(x) => {
                f.write_str("!")?;
                self.write(f, x, 2)
            }
            Proposition::And(l, r) => {
                if level > 1 {
                    f.write_str("(")?;
                }
                self.write(f, l, 1)?;
                f.write_str(" & ")?;
                self.write(f, r, 2)?;
                if level > 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Proposition::Or(l, r) => {
                if level > 0 {
                    f.write_str("(")?;
                }
                self.write(f, l, 0)?;
                f.write_str(" | ")?;
                self.write(f, r, 1)?;
                if level > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for PropositionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.prop, 0)
    }
}

/// A total map from the entity's atoms to truth values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthAssignment {
    layout: AtomLayout,
    values: FixedBitSet,
}

impl TruthAssignment {
    /// Builds the assignment making exactly `true_atoms` true.
    ///
    /// Fails when two distinct state atoms are true.
    pub fn new(entity: &Entity, true_atoms: impl IntoIterator<Item = AtomId>) -> Result<Self, LanguageError> {
        let layout = entity.layout();
        let mut values = FixedBitSet::with_capacity(layout.atom_count());
        let mut true_state: Option<StateId> = None;
        for atom in true_atoms {
            let index = layout.atom_index(atom).ok_or(LanguageError::AtomOutOfDomain(atom))?;
            if let AtomId::State(s) = atom {
                match true_state {
                    Some(prev) if prev != s => {
                        return Err(LanguageError::StateExclusivity(
                            entity.state_name(prev).into(),
                            entity.state_name(s).into(),
                        ))
                    }
                    _ => true_state = Some(s),
                }
            }
            values.insert(index);
        }
        Ok(TruthAssignment { layout, values })
    }

    pub fn layout(&self) -> AtomLayout {
        self.layout
    }

    pub fn value(&self, atom: AtomId) -> Result<bool, LanguageError> {
        let index = self.layout.atom_index(atom).ok_or(LanguageError::AtomOutOfDomain(atom))?;
        Ok(self.values.contains(index))
    }

    /// The state whose atom is true, if any.
    pub fn state(&self) -> Option<StateId> {
        (0..self.layout.states).map(StateId).find(|s| self.values.contains(s.index()))
    }

    /// All atoms mapped to true, in layout order.
    pub fn true_atoms(&self, entity: &Entity) -> Vec<AtomId> {
        entity.atoms().into_iter().filter(|a| self.value(*a).unwrap_or(false)).collect()
    }
}

/// Classical recursive evaluation of `prop` under `w`.
pub fn evaluate(w: &TruthAssignment, prop: &Proposition) -> Result<bool, LanguageError> {
    prop.eval_in(w, None)
}

/// A subset of a finite universe of truth assignments, stored by position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Extension {
    bits: FixedBitSet,
}

impl Extension {
    pub fn empty(universe_len: usize) -> Self {
        Extension { bits: FixedBitSet::with_capacity(universe_len) }
    }

    pub fn full(universe_len: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe_len);
        bits.insert_range(..);
        Extension { bits }
    }

    pub fn from_indices(universe_len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut ext = Self::empty(universe_len);
        for i in indices {
            ext.bits.grow(i + 1);
            ext.bits.insert(i);
        }
        ext
    }

    /// Size of the universe this set lives in.
    pub fn universe_len(&self) -> usize {
        self.bits.len()
    }

    pub fn insert(&mut self, index: usize) {
        self.bits.insert(index);
    }

    pub fn contains(&self, index: usize) -> bool {
        self.bits.contains(index)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn is_subset(&self, other: &Extension) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &Extension) -> bool {
        self.bits.is_disjoint(&other.bits)
    }

    pub fn intersection(&self, other: &Extension) -> Extension {
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        Extension { bits }
    }

    pub fn union(&self, other: &Extension) -> Extension {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        Extension { bits }
    }

    pub fn complement(&self) -> Extension {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        Extension { bits }
    }
}

/// `{w ∈ universe | w(prop) = t}`.
pub fn extension(universe: &[TruthAssignment], prop: &Proposition) -> Result<Extension, LanguageError> {
    extension_in(universe, prop, None)
}

/// Extension of `prop` with every property atom re-indexed to `context` when given.
pub(crate) fn extension_in(
    universe: &[TruthAssignment],
    prop: &Proposition,
    context: Option<ContextId>,
) -> Result<Extension, LanguageError> {
    let mut ext = Extension::empty(universe.len());
    for (i, w) in universe.iter().enumerate() {
        if prop.eval_in(w, context)? {
            ext.insert(i);
        }
    }
    Ok(ext)
}

/// Logical preorder: every assignment making `a` true makes `b` true.
pub fn entails(universe: &[TruthAssignment], a: &Proposition, b: &Proposition) -> Result<bool, LanguageError> {
    Ok(extension(universe, a)?.is_subset(&extension(universe, b)?))
}

/// Logical equivalence: equal extensions.
pub fn equivalent(universe: &[TruthAssignment], a: &Proposition, b: &Proposition) -> Result<bool, LanguageError> {
    Ok(extension(universe, a)? == extension(universe, b)?)
}

pub fn properties_of(prop: &Proposition) -> BTreeSet<PropertyId> {
    prop.properties()
}

pub fn contexts_of(prop: &Proposition) -> BTreeSet<ContextId> {
    prop.contexts()
}

pub fn has_state_atoms(prop: &Proposition) -> bool {
    prop.has_state_atoms()
}

#[cfg(test)]
mod tests;
