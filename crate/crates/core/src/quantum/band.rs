//! Elastic-band construction: a qubit measurement along a Bloch-sphere
//! diameter whose break point is discretized into `n` equal segments,
//! one μ-context per segment.

use super::{bloch_vector, born, DensityState, HilbertModel, ProjectorProperty, QuantumError};
use crate::exec::Execution;
use crate::language::{AtomId, Entity, TruthAssignment};
use crate::lattice::q_probability;
use crate::measurement::MeasurementProcedure;
use crate::model::ContextualModel;
use crate::muprob::ProbabilitySpace;
use crate::report::Check;
use nalgebra::Complex;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Number of segment midpoints `(i − ½)/n` strictly below `x`.
fn segments_below(x: f64, n: usize) -> usize {
    (1..=n).take_while(|&i| (i as f64 - 0.5) / (n as f64) < x).count()
}

/// [`build_band_model_named`] with states `S0, S1, …`.
pub fn build_band_model(thetas: &[f64], n: usize) -> Result<ContextualModel, QuantumError> {
    let named: Vec<(String, f64)> = thetas.iter().enumerate().map(|(i, &t)| (format!("S{i}"), t)).collect();
    build_band_model_named(&named, n)
}

/// One property `up`, one state per angle, contexts `c1..cn` and a single
/// procedure `M` with uniform weights. In state `S_θ`, `up` holds at
/// context `c_i` exactly when the midpoint of segment `i` lies below the
/// projection `(1 + cos θ)/2` of the particle onto the diameter.
pub fn build_band_model_named(states: &[(String, f64)], n: usize) -> Result<ContextualModel, QuantumError> {
    if n == 0 {
        return Err(QuantumError::Segments);
    }
    if let Some(&(_, theta)) = states.iter().find(|(_, t)| !(0.0..=PI).contains(t)) {
        return Err(QuantumError::Angle(theta));
    }
    let contexts: Vec<String> = (1..=n).map(|i| format!("c{i}")).collect();
    let entity = Arc::new(Entity::new(["up"], states.iter().map(|(s, _)| s.clone()), contexts)?);
    let up = entity.property("up").expect("declared");
    let universe = entity
        .states()
        .zip(states)
        .map(|(s, &(_, theta))| {
            let below = segments_below((1.0 + theta.cos()) / 2.0, n);
            let atoms = std::iter::once(AtomId::State(s))
                .chain(entity.contexts().take(below).map(|c| AtomId::Property(up, c)));
            TruthAssignment::new(&entity, atoms).expect("one state atom")
        })
        .collect();
    let space = ProbabilitySpace::uniform(entity.clone(), universe).expect("distinct assignments");
    let procedure = MeasurementProcedure::uniform("M", [up], entity.contexts()).expect("n ≥ 1");
    Ok(ContextualModel::new(space, vec![procedure]).expect("every state has positive weight"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BornRow {
    pub state: String,
    pub theta: f64,
    pub born: f64,
    pub mean: f64,
}

impl BornRow {
    pub fn gap(&self) -> f64 {
        (self.mean - self.born).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BornReconstruction {
    pub segments: usize,
    pub rows: Vec<BornRow>,
}

impl BornReconstruction {
    pub fn bound(&self) -> f64 {
        1.0 / self.segments as f64
    }

    pub fn max_gap(&self) -> f64 {
        self.rows.iter().map(BornRow::gap).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_gap() <= self.bound() + 1e-12
    }

    pub fn to_check(&self) -> Check {
        let witnesses = self
            .rows
            .iter()
            .filter(|r| r.gap() > self.bound() + 1e-12)
            .map(|r| format!("{}: θ = {:.6}, Born {:.6}, mean {:.6}", r.state, r.theta, r.born, r.mean))
            .collect();
        Check::from_witnesses("quantum.born_reconstruction", witnesses)
            .with_gap(self.max_gap())
            .with_tolerance(self.bound())
            .with_detail(format!("{} state(s), {} segments", self.rows.len(), self.segments))
    }
}

impl fmt::Display for BornReconstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<12} {:>10} {:>12} {:>12} {:>12} {:>12}", "state", "theta", "born", "band mean", "gap", "bound")?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<12} {:>10.6} {:>12.9} {:>12.9} {:>12.3e} {:>12.3e}",
                r.state,
                r.theta,
                r.born,
                r.mean,
                r.gap(),
                self.bound()
            )?;
        }
        Ok(())
    }
}

/// Builds the band model for the angle between each (pure) state and the
/// rank-one `property` and compares the band means with the Born values.
pub fn verify_born_reconstruction(
    hilbert: &HilbertModel,
    property: &str,
    n: usize,
    exec: Execution,
) -> Result<BornReconstruction, QuantumError> {
    if hilbert.dim() != 2 {
        return Err(QuantumError::DimensionMismatch { left: 2, right: hilbert.dim() });
    }
    let p = hilbert.property(property)?;
    if p.rank() != 1 {
        return Err(QuantumError::NotRankOne(property.into()));
    }
    let axis = bloch_vector(p.proj())?;
    let mut named = Vec::new();
    let mut borns = Vec::new();
    for s in hilbert.states() {
        let purity = s.rho().mul(s.rho()).trace().re;
        if (purity - 1.0).abs() > 1e-9 {
            return Err(QuantumError::NotPure(s.name().into()));
        }
        let r = bloch_vector(s.rho())?;
        let cos = (r[0] * axis[0] + r[1] * axis[1] + r[2] * axis[2]).clamp(-1.0, 1.0);
        named.push((s.name().to_string(), cos.acos()));
        borns.push(born(s, p)?);
    }
    reconstruct(named, borns, n, exec)
}

fn reconstruct(
    named: Vec<(String, f64)>,
    borns: Vec<f64>,
    n: usize,
    exec: Execution,
) -> Result<BornReconstruction, QuantumError> {
    let model = build_band_model_named(&named, n)?;
    let up = model.entity().property("up").expect("band property");
    let means = exec.map_range(named.len(), |i| {
        let s = model.entity().state_id(i).expect("state");
        q_probability(&model, s, up)
    });
    let rows = named
        .into_iter()
        .zip(borns)
        .zip(means)
        .map(|(((state, theta), born), mean)| {
            Ok(BornRow { state, theta, born, mean: mean.map_err(QuantumError::Lattice)? })
        })
        .collect::<Result<_, QuantumError>>()?;
    Ok(BornReconstruction { segments: n, rows })
}

/// Band reconstruction for `cos(θ/2)|0⟩ + sin(θ/2)|1⟩` against `|0⟩⟨0|`,
/// using the given angles directly. States are named `S0, S1, …`.
pub fn demo_born(thetas: &[f64], n: usize, exec: Execution) -> Result<BornReconstruction, QuantumError> {
    let named: Vec<(String, f64)> = thetas.iter().enumerate().map(|(i, &t)| (format!("S{i}"), t)).collect();
    band_reconstruction(&named, n, exec)
}

/// [`demo_born`] with explicit state names.
pub fn band_reconstruction(named: &[(String, f64)], n: usize, exec: Execution) -> Result<BornReconstruction, QuantumError> {
    if let Some(&(_, t)) = named.iter().find(|(_, t)| !(0.0..=PI).contains(t)) {
        return Err(QuantumError::Angle(t));
    }
    let up = ProjectorProperty::from_ket("up", &[Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)])?;
    let mut borns = Vec::new();
    for (name, t) in named {
        let ket = [Complex::new((t / 2.0).cos(), 0.0), Complex::new((t / 2.0).sin(), 0.0)];
        borns.push(born(&DensityState::pure(name.clone(), &ket)?, &up)?);
    }
    reconstruct(named.to_vec(), borns, n, exec)
}
