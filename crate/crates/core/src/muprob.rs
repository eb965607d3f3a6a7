//! Finite probability spaces over truth assignments and the μ-contextual
//! conditional probability `p(A | B) = ξ(Ext(A) ∩ Ext(B)) / ξ(Ext(B))`.
//!
//! The event algebra is the full power set of the universe; `ξ` of an event
//! is the sum of its members' weights. Weights are either binary floating
//! point or exact rationals; in exact mode every identity can be checked
//! without tolerance.

use crate::language::{self, Entity, Extension, LanguageError, Proposition, TruthAssignment};
use crate::report::{Check, Report};
use crate::tolerance;
use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use std::collections::HashSet;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbabilityError {
    #[error(transparent)]
    Language(#[from] LanguageError),
    #[error("universe has {universe} assignments but {weights} weights were given")]
    WeightCount { universe: usize, weights: usize },
    #[error("weight {index} is {value}, outside [0, 1]")]
    WeightRange { index: usize, value: f64 },
    #[error("weights sum to {0}, not 1")]
    Mass(f64),
    #[error("assignment {0} appears twice in the universe")]
    DuplicateAssignment(usize),
    #[error("event is not a subset of the universe")]
    EventOutsideUniverse,
    #[error("conditioning proposition has probability zero")]
    ConditionNull,
    #[error("space has floating-point weights; exact evaluation unavailable")]
    NotExact,
}

/// Weights of the universe's assignments.
#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    Float(Vec<f64>),
    Exact(Vec<BigRational>),
}

impl Weights {
    pub fn len(&self) -> usize {
        match self {
            Weights::Float(w) => w.len(),
            Weights::Exact(w) => w.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Exact weights from `(numerator, denominator)` pairs.
    pub fn ratios(pairs: impl IntoIterator<Item = (i64, i64)>) -> Self {
        Weights::Exact(
            pairs
                .into_iter()
                .map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
                .collect(),
        )
    }

    fn to_f64(&self) -> Vec<f64> {
        match self {
            Weights::Float(w) => w.clone(),
            Weights::Exact(w) => w.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect(),
        }
    }
}

/// `(W, P(W), ξ)`: a finite universe with per-assignment weights.
#[derive(Debug, Clone)]
pub struct ProbabilitySpace {
    entity: Arc<Entity>,
    universe: Vec<TruthAssignment>,
    weights: Weights,
    float_weights: Vec<f64>,
}

impl ProbabilitySpace {
    /// Builds a space whose weights lie in `[0, 1]` and sum to 1.
    pub fn new(
        entity: Arc<Entity>,
        universe: Vec<TruthAssignment>,
        weights: Weights,
    ) -> Result<Self, ProbabilityError> {
        let space = Self::unnormalized(entity, universe, weights)?;
        for (index, &value) in space.float_weights.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(ProbabilityError::WeightRange { index, value });
            }
        }
        let mass_ok = match &space.weights {
            Weights::Exact(w) => w.iter().fold(BigRational::zero(), |acc, x| acc + x).is_one(),
            Weights::Float(w) => (w.iter().sum::<f64>() - 1.0).abs() <= tolerance::MASS,
        };
        if !mass_ok {
            return Err(ProbabilityError::Mass(space.float_weights.iter().sum()));
        }
        Ok(space)
    }

    /// Builds a space without range or mass checks, for inputs that are
    /// going to be audited with [`verify_kolmogorov`].
    pub fn unnormalized(
        entity: Arc<Entity>,
        universe: Vec<TruthAssignment>,
        weights: Weights,
    ) -> Result<Self, ProbabilityError> {
        if universe.len() != weights.len() {
            return Err(ProbabilityError::WeightCount {
                universe: universe.len(),
                weights: weights.len(),
            });
        }
        let layout = entity.layout();
        let mut seen = HashSet::new();
        for (i, w) in universe.iter().enumerate() {
            if w.layout() != layout {
                return Err(LanguageError::LayoutMismatch.into());
            }
            if !seen.insert(w) {
                return Err(ProbabilityError::DuplicateAssignment(i));
            }
        }
        let float_weights = weights.to_f64();
        if let Some(index) = float_weights.iter().position(|w| !w.is_finite()) {
            return Err(ProbabilityError::WeightRange { index, value: float_weights[index] });
        }
        Ok(ProbabilitySpace { entity, universe, weights, float_weights })
    }

    /// Uniform weights `1/|W|`, exact.
    pub fn uniform(entity: Arc<Entity>, universe: Vec<TruthAssignment>) -> Result<Self, ProbabilityError> {
        let n = universe.len() as i64;
        Self::new(entity, universe, Weights::ratios((0..n).map(|_| (1, n))))
    }

    pub fn entity(&self) -> &Arc<Entity> {
        &self.entity
    }

    pub fn universe(&self) -> &[TruthAssignment] {
        &self.universe
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn weight(&self, index: usize) -> f64 {
        self.float_weights[index]
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.weights, Weights::Exact(_))
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn extension(&self, prop: &Proposition) -> Result<Extension, ProbabilityError> {
        Ok(language::extension(&self.universe, prop)?)
    }

    pub(crate) fn extension_in(
        &self,
        prop: &Proposition,
        context: Option<crate::ContextId>,
    ) -> Result<Extension, ProbabilityError> {
        Ok(language::extension_in(&self.universe, prop, context)?)
    }

    fn check_event(&self, event: &Extension) -> Result<(), ProbabilityError> {
        if event.universe_len() != self.universe.len() {
            return Err(ProbabilityError::EventOutsideUniverse);
        }
        Ok(())
    }

    /// `ξ(event)`, summed in floating point.
    pub fn xi(&self, event: &Extension) -> Result<f64, ProbabilityError> {
        self.check_event(event)?;
        Ok(self.xi_unchecked(event))
    }

    pub(crate) fn xi_unchecked(&self, event: &Extension) -> f64 {
        event.indices().map(|i| self.float_weights[i]).sum()
    }

    /// `ξ(event)` as an exact rational, when the weights are exact.
    pub fn xi_exact(&self, event: &Extension) -> Result<BigRational, ProbabilityError> {
        self.check_event(event)?;
        match &self.weights {
            Weights::Exact(w) => Ok(event.indices().fold(BigRational::zero(), |acc, i| acc + &w[i])),
            Weights::Float(_) => Err(ProbabilityError::NotExact),
        }
    }

    /// Conditional probability of two events, erroring when `ξ(given) = 0`.
    pub fn conditional_events(&self, target: &Extension, given: &Extension) -> Result<f64, ProbabilityError> {
        let denominator = self.xi(given)?;
        if denominator <= 0.0 {
            return Err(ProbabilityError::ConditionNull);
        }
        Ok(self.xi(&target.intersection(given))? / denominator)
    }

    /// μ-contextual conditional probability `p(a | b)`.
    pub fn mu_conditional(&self, a: &Proposition, b: &Proposition) -> Result<f64, ProbabilityError> {
        self.conditional_events(&self.extension(a)?, &self.extension(b)?)
    }

    /// Absolute probability `p(a) = p(a | ⊤)`.
    pub fn probability(&self, a: &Proposition) -> Result<f64, ProbabilityError> {
        self.conditional_events(&self.extension(a)?, &Extension::full(self.len()))
    }

    pub fn mu_conditional_exact(&self, a: &Proposition, b: &Proposition) -> Result<BigRational, ProbabilityError> {
        let ea = self.extension(a)?;
        let eb = self.extension(b)?;
        let denominator = self.xi_exact(&eb)?;
        if denominator.is_zero() {
            return Err(ProbabilityError::ConditionNull);
        }
        Ok(self.xi_exact(&ea.intersection(&eb))? / denominator)
    }

    pub fn probability_exact(&self, a: &Proposition) -> Result<BigRational, ProbabilityError> {
        let ea = self.extension(a)?;
        Ok(self.xi_exact(&ea)? / self.xi_exact(&Extension::full(self.len()))?)
    }

    /// True when `ξ(Ext(b)) > 0`.
    pub fn is_positive(&self, b: &Proposition) -> Result<bool, ProbabilityError> {
        Ok(self.xi(&self.extension(b)?)? > 0.0)
    }
}

pub fn xi(space: &ProbabilitySpace, event: &Extension) -> Result<f64, ProbabilityError> {
    space.xi(event)
}

pub fn mu_conditional(space: &ProbabilitySpace, a: &Proposition, b: &Proposition) -> Result<f64, ProbabilityError> {
    space.mu_conditional(a, b)
}

/// Both sides of `p(B) p(A|B) = p(A) p(B|A)`.
pub fn bayes_identity(
    space: &ProbabilitySpace,
    a: &Proposition,
    b: &Proposition,
) -> Result<(f64, f64), ProbabilityError> {
    let lhs = space.probability(b)? * space.mu_conditional(a, b)?;
    let rhs = space.probability(a)? * space.mu_conditional(b, a)?;
    Ok((lhs, rhs))
}

pub fn bayes_identity_exact(
    space: &ProbabilitySpace,
    a: &Proposition,
    b: &Proposition,
) -> Result<(BigRational, BigRational), ProbabilityError> {
    let lhs = space.probability_exact(b)? * space.mu_conditional_exact(a, b)?;
    let rhs = space.probability_exact(a)? * space.mu_conditional_exact(b, a)?;
    Ok((lhs, rhs))
}

/// Universes up to this size get every pair of disjoint events checked.
const EXHAUSTIVE_ADDITIVITY: usize = 10;

/// Disjoint event pairs used by the additivity check.
fn additivity_family(n: usize) -> Vec<(Extension, Extension)> {
    let mut pairs = Vec::new();
    if n <= EXHAUSTIVE_ADDITIVITY {
        // each element goes to the left event, the right event, or neither
        let total = 3usize.pow(n as u32);
        for code in 0..total {
            let (mut left, mut right) = (Extension::empty(n), Extension::empty(n));
            let mut c = code;
            for i in 0..n {
                match c % 3 {
                    1 => left.insert(i),
                    2 => right.insert(i),
                    _ => {}
                }
                c /= 3;
            }
            pairs.push((left, right));
        }
        return pairs;
    }
    // singletons against their complements, prefixes against suffixes, and
    // a fixed pseudo-random sample of splits
    for i in 0..n {
        let single = Extension::from_indices(n, [i]);
        pairs.push((single.complement(), single));
        pairs.push((Extension::from_indices(n, 0..i), Extension::from_indices(n, i..n)));
    }
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    for _ in 0..512 {
        let (mut left, mut right) = (Extension::empty(n), Extension::empty(n));
        for i in 0..n {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            match state >> 62 {
                0 => left.insert(i),
                1 => right.insert(i),
                _ => {}
            }
        }
        pairs.push((left, right));
    }
    pairs
}

fn subset_label(event: &Extension) -> String {
    format!("{{{}}}", event.indices().map(|i| format!("w{i}")).collect::<Vec<_>>().join(","))
}

/// Audits total mass, finite additivity and non-negativity of `ξ`.
pub fn verify_kolmogorov(space: &ProbabilitySpace) -> Report {
    let mut report = Report::new();
    let n = space.len();
    let full = Extension::full(n);

    let (mass_ok, deficit) = match &space.weights {
        Weights::Exact(_) => {
            let mass = space.xi_exact(&full).expect("exact weights");
            let deficit = BigRational::one() - &mass;
            (deficit.is_zero(), deficit.to_f64().unwrap_or(f64::NAN))
        }
        Weights::Float(_) => {
            let deficit = 1.0 - space.xi_unchecked(&full);
            (deficit.abs() <= tolerance::MASS, deficit)
        }
    };
    let mut mass = if mass_ok {
        Check::pass("kolmogorov.total_mass")
    } else {
        Check::fail("kolmogorov.total_mass").with_witness(subset_label(&full))
    };
    mass = mass.with_gap(deficit).with_tolerance(if space.is_exact() { 0.0 } else { tolerance::MASS });
    report.push(mass);

    let mut violations = Vec::new();
    let mut worst = 0.0f64;
    for (left, right) in additivity_family(n) {
        let union = left.union(&right);
        match &space.weights {
            Weights::Exact(_) => {
                let lhs = space.xi_exact(&union).expect("exact");
                let rhs = space.xi_exact(&left).expect("exact") + space.xi_exact(&right).expect("exact");
                if lhs != rhs {
                    violations.push(format!("{} + {}", subset_label(&left), subset_label(&right)));
                }
            }
            Weights::Float(_) => {
                let gap = (space.xi_unchecked(&union)
                    - space.xi_unchecked(&left)
                    - space.xi_unchecked(&right))
                .abs();
                worst = worst.max(gap);
                if gap > tolerance::CMP {
                    violations.push(format!("{} + {}", subset_label(&left), subset_label(&right)));
                }
            }
        }
    }
    report.push(
        Check::from_witnesses("kolmogorov.additivity", violations)
            .with_gap(worst)
            .with_tolerance(if space.is_exact() { 0.0 } else { tolerance::CMP }),
    );

    let negative: Vec<String> = (0..n)
        .filter(|&i| space.weight(i) < 0.0)
        .map(|i| format!("w{i} = {}", space.weight(i)))
        .collect();
    report.push(Check::from_witnesses("kolmogorov.non_negativity", negative));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::{parse_proposition, AtomId};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn four_space() -> (Arc<Entity>, ProbabilitySpace) {
        let h = Arc::new(Entity::new(["E", "F"], ["S"], ["c", "d"]).unwrap());
        let e = AtomId::Property(h.property("E").unwrap(), h.context("c").unwrap());
        let f = AtomId::Property(h.property("F").unwrap(), h.context("d").unwrap());
        let s = AtomId::State(h.state("S").unwrap());
        // E true in w0, w1, w2; F true in w1, w2, w3
        let universe = vec![
            TruthAssignment::new(&h, [s, e]).unwrap(),
            TruthAssignment::new(&h, [s, e, f]).unwrap(),
            TruthAssignment::new(&h, [e, f]).unwrap(),
            TruthAssignment::new(&h, [f]).unwrap(),
        ];
        let space = ProbabilitySpace::uniform(h.clone(), universe).unwrap();
        (h, space)
    }

    fn p(text: &str, h: &Entity) -> Proposition {
        parse_proposition(text, h).unwrap()
    }

    #[test]
    fn xi_examples() {
        let (_, space) = four_space();
        assert_eq!(space.xi(&Extension::empty(4)).unwrap(), 0.0);
        assert_eq!(space.xi(&Extension::full(4)).unwrap(), 1.0);
        assert_eq!(space.xi(&Extension::from_indices(4, [0, 2, 3])).unwrap(), 0.75);
        assert_eq!(
            space.xi(&Extension::empty(5)).unwrap_err(),
            ProbabilityError::EventOutsideUniverse
        );
    }

    #[test]
    fn conditional_examples() {
        let (h, space) = four_space();
        let e = p("prop(E,c)", &h);
        let f = p("prop(F,d)", &h);
        assert_eq!(space.mu_conditional(&e, &e).unwrap(), 1.0);
        // enumerated: Ext(F) = {w1,w2,w3}, Ext(E) ∩ Ext(F) = {w1,w2}
        assert!((space.mu_conditional(&e, &f).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(
            space.mu_conditional_exact(&e, &f).unwrap(),
            BigRational::new(2.into(), 3.into())
        );
        let contradiction = e.clone().and(e.clone().negate());
        assert_eq!(space.mu_conditional(&e, &contradiction).unwrap_err(), ProbabilityError::ConditionNull);
    }

    #[test]
    fn distinct_states_are_exclusive() {
        let h = Arc::new(Entity::new(["E"], ["R", "S"], ["c"]).unwrap());
        let r = AtomId::State(h.state("R").unwrap());
        let s = AtomId::State(h.state("S").unwrap());
        let e = AtomId::Property(h.property("E").unwrap(), h.context("c").unwrap());
        let universe = vec![
            TruthAssignment::new(&h, [r]).unwrap(),
            TruthAssignment::new(&h, [s, e]).unwrap(),
            TruthAssignment::new(&h, [s]).unwrap(),
        ];
        let space = ProbabilitySpace::uniform(h.clone(), universe).unwrap();
        assert_eq!(space.mu_conditional(&p("state(R)", &h), &p("state(S)", &h)).unwrap(), 0.0);
    }

    #[test]
    fn construction_checks() {
        let h = Arc::new(Entity::new(["E"], ["S"], ["c"]).unwrap());
        let w = vec![TruthAssignment::new(&h, []).unwrap()];
        assert!(matches!(
            ProbabilitySpace::new(h.clone(), w.clone(), Weights::Float(vec![0.9])),
            Err(ProbabilityError::Mass(_))
        ));
        assert!(matches!(
            ProbabilitySpace::new(h.clone(), vec![w[0].clone(), w[0].clone()], Weights::Float(vec![0.5, 0.5])),
            Err(ProbabilityError::DuplicateAssignment(1))
        ));
        assert!(matches!(
            ProbabilitySpace::new(h, w, Weights::Float(vec![0.5, 0.5])),
            Err(ProbabilityError::WeightCount { .. })
        ));
    }

    #[test]
    fn kolmogorov_deficit_reported() {
        let h = Arc::new(Entity::new(["E"], ["S"], ["c"]).unwrap());
        let w = vec![TruthAssignment::new(&h, []).unwrap()];
        let space = ProbabilitySpace::unnormalized(h, w, Weights::Float(vec![0.9])).unwrap();
        let report = verify_kolmogorov(&space);
        let mass = report.get("kolmogorov.total_mass").unwrap();
        assert!(mass.is_failure());
        assert!((mass.gap.unwrap() - 0.1).abs() < 1e-12);
        assert!(!report.get("kolmogorov.additivity").unwrap().is_failure());
    }

    #[test]
    fn kolmogorov_negative_weight_reported() {
        let h = Arc::new(Entity::new(["E"], ["S"], ["c"]).unwrap());
        let e = AtomId::Property(h.property("E").unwrap(), h.context("c").unwrap());
        let w = vec![TruthAssignment::new(&h, []).unwrap(), TruthAssignment::new(&h, [e]).unwrap()];
        let space = ProbabilitySpace::unnormalized(h, w, Weights::Float(vec![1.2, -0.2])).unwrap();
        let report = verify_kolmogorov(&space);
        assert!(report.get("kolmogorov.total_mass").unwrap().status == crate::Status::Pass);
        assert!(report.get("kolmogorov.non_negativity").unwrap().is_failure());
    }

    /// Six random assignments; additivity compared with direct enumeration of all subsets.
    #[test]
    fn kolmogorov_random_six_against_subset_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = Arc::new(Entity::new(["E", "F", "G"], ["S"], ["c"]).unwrap());
        let atoms = h.atoms();
        let universe: Vec<TruthAssignment> = (0..6u32)
            .map(|mask| {
                TruthAssignment::new(&h, atoms.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| *a))
                    .unwrap()
            })
            .collect();
        let raw: Vec<f64> = (0..6).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let space = ProbabilitySpace::new(h, universe, Weights::Float(weights.clone())).unwrap();
        assert!(verify_kolmogorov(&space).passed());
        for mask in 0u32..64 {
            let direct: f64 = (0..6).filter(|i| mask >> i & 1 == 1).map(|i| weights[i]).sum();
            let event = Extension::from_indices(6, (0..6).filter(|i| mask >> i & 1 == 1));
            assert!((space.xi(&event).unwrap() - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn bayes_examples() {
        let (h, space) = four_space();
        let e = p("prop(E,c)", &h);
        let f = p("prop(F,d)", &h);
        let (l, r) = bayes_identity(&space, &e, &e).unwrap();
        assert_eq!(l, r);
        assert!((l - space.probability(&e).unwrap()).abs() < 1e-15);
        let not_e = e.clone().negate();
        let g = e.clone().and(f.clone());
        // Ext(!E) = {w3} and Ext(E & F) = {w1, w2} are disjoint
        assert_eq!(bayes_identity(&space, &not_e, &g).unwrap(), (0.0, 0.0));
        let (l, r) = bayes_identity_exact(&space, &e, &f).unwrap();
        assert_eq!(l, r);
    }

    #[test]
    fn large_universe_additivity_uses_sampled_family() {
        let n = 14;
        let family = additivity_family(n);
        assert!(family.len() > 2 * n);
        assert!(family.iter().all(|(l, r)| l.is_disjoint(r)));
    }
}
