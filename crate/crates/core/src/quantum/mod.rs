//! Hilbert-space backend: density states, projector properties, the Born
//! rule, commutation, the Lüders map and the elastic-band construction of
//! Born probabilities as averages over μ-contexts.

mod band;

pub use band::{band_reconstruction, build_band_model, build_band_model_named, demo_born, verify_born_reconstruction, BornReconstruction, BornRow};

use crate::exec::Execution;
use crate::lattice::{FirstKindTransform, LatticeError, OrthoLattice, StateProbabilityFamily};
use crate::tolerance;
use nalgebra::{Complex, DMatrix, DVector};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

pub type Complex64 = Complex<f64>;

pub const MIN_DIMENSION: usize = 2;
pub const MAX_DIMENSION: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("dimension {0} is outside 2..=8")]
    Dimension(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix must have {expected} entries, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("`{name}` is not Hermitian (deviation {deviation:e})")]
    NotHermitian { name: String, deviation: f64 },
    #[error("`{name}` is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositive { name: String, eigenvalue: f64 },
    #[error("`{name}` has trace {trace}, not 1")]
    Trace { name: String, trace: f64 },
    #[error("`{name}` is not idempotent (deviation {deviation:e})")]
    NotIdempotent { name: String, deviation: f64 },
    #[error("Born value {value} is not a probability")]
    Born { value: f64 },
    #[error("outcome `{property}` has probability {probability:e} in `{state}`")]
    NullOutcome { state: String, property: String, probability: f64 },
    #[error("zero vector")]
    ZeroVector,
    #[error("duplicate name `{0}`")]
    Duplicate(String),
    #[error("unknown name `{0}`")]
    Unknown(String),
    #[error("the family is not closed: {0} has no matching projector")]
    NotClosed(String),
    #[error("`{0}` is not a qubit pure state")]
    NotPure(String),
    #[error("`{0}` is not a qubit rank-one projector")]
    NotRankOne(String),
    #[error("angle {0} is outside [0, π]")]
    Angle(f64),
    #[error("segment count must be at least 1")]
    Segments,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Language(#[from] crate::language::LanguageError),
}

/// A `d × d` complex matrix with `2 ≤ d ≤ 8`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

fn check_dimension(d: usize) -> Result<(), QuantumError> {
    if (MIN_DIMENSION..=MAX_DIMENSION).contains(&d) {
        Ok(())
    } else {
        Err(QuantumError::Dimension(d))
    }
}

impl ComplexMatrix {
    /// Row-major entries.
    pub fn from_row_major(d: usize, entries: &[Complex64]) -> Result<Self, QuantumError> {
        check_dimension(d)?;
        if entries.len() != d * d {
            return Err(QuantumError::Shape { expected: d * d, found: entries.len() });
        }
        Ok(ComplexMatrix(DMatrix::from_row_slice(d, d, entries)))
    }

    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self, QuantumError> {
        if m.nrows() != m.ncols() {
            return Err(QuantumError::Shape { expected: m.nrows() * m.nrows(), found: m.len() });
        }
        check_dimension(m.nrows())?;
        Ok(ComplexMatrix(m))
    }

    pub fn identity(d: usize) -> Result<Self, QuantumError> {
        check_dimension(d)?;
        Ok(ComplexMatrix(DMatrix::identity(d, d)))
    }

    pub fn zeros(d: usize) -> Result<Self, QuantumError> {
        check_dimension(d)?;
        Ok(ComplexMatrix(DMatrix::zeros(d, d)))
    }

    /// `|v⟩⟨v| / ⟨v|v⟩`.
    pub fn ket_projector(v: &[Complex64]) -> Result<Self, QuantumError> {
        check_dimension(v.len())?;
        let v = DVector::from_column_slice(v);
        let norm = v.norm();
        if norm <= tolerance::NULL {
            return Err(QuantumError::ZeroVector);
        }
        let v = v / Complex::from(norm);
        Ok(ComplexMatrix(&v * v.adjoint()))
    }

    /// Projector onto the span of `vectors`.
    pub fn span_projector(d: usize, vectors: &[Vec<Complex64>]) -> Result<Self, QuantumError> {
        let mut sum = DMatrix::<Complex64>::zeros(d, d);
        for v in vectors {
            if v.len() != d {
                return Err(QuantumError::DimensionMismatch { left: d, right: v.len() });
            }
            let v = DVector::from_column_slice(v);
            sum += &v * v.adjoint();
        }
        range_projector(&ComplexMatrix::from_matrix(sum)?, tolerance::HERM)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn mul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &other.0)
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &other.0)
    }

    pub fn scale(&self, k: f64) -> ComplexMatrix {
        ComplexMatrix(&self.0 * Complex::from(k))
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &ComplexMatrix) -> ComplexMatrix {
        self.mul(other).sub(&other.mul(self))
    }

    /// Eigenvalues and orthonormal eigenvectors of the Hermitian part, ascending.
    pub fn hermitian_eigen(&self) -> Vec<(f64, DVector<Complex64>)> {
        let h = (&self.0 + self.0.adjoint()) * Complex::from(0.5);
        let eigen = h.symmetric_eigen();
        let mut pairs: Vec<(f64, DVector<Complex64>)> = eigen
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, eigen.eigenvectors.column(i).into_owned()))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    }

    pub fn approx_eq(&self, other: &ComplexMatrix, tol: f64) -> bool {
        self.dim() == other.dim() && self.sub(other).max_abs() <= tol
    }
}

/// Projector onto the eigenspaces of `m` with eigenvalue above `tol`.
fn range_projector(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix, QuantumError> {
    let d = m.dim();
    let mut p = DMatrix::<Complex64>::zeros(d, d);
    for (l, v) in m.hermitian_eigen() {
        if l > tol {
            p += &v * v.adjoint();
        }
    }
    ComplexMatrix::from_matrix(p)
}

/// A state given by a density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    name: String,
    rho: ComplexMatrix,
}

impl DensityState {
    /// Requires a Hermitian, positive semidefinite, unit-trace operator.
    pub fn new(name: impl Into<String>, rho: ComplexMatrix) -> Result<Self, QuantumError> {
        let name = name.into();
        let deviation = rho.hermitian_deviation();
        if deviation > tolerance::HERM {
            return Err(QuantumError::NotHermitian { name, deviation });
        }
        let trace = rho.trace();
        if (trace.re - 1.0).abs() > tolerance::CMP || trace.im.abs() > tolerance::CMP {
            return Err(QuantumError::Trace { name, trace: trace.re });
        }
        let smallest = rho.hermitian_eigen()[0].0;
        if smallest < -tolerance::PSD {
            return Err(QuantumError::NotPositive { name, eigenvalue: smallest });
        }
        Ok(DensityState { name, rho })
    }

    /// `|ψ⟩⟨ψ|` for the normalized `ψ`.
    pub fn pure(name: impl Into<String>, ket: &[Complex64]) -> Result<Self, QuantumError> {
        Self::new(name, ComplexMatrix::ket_projector(ket)?)
    }

    /// `I / d`.
    pub fn maximally_mixed(name: impl Into<String>, d: usize) -> Result<Self, QuantumError> {
        Self::new(name, ComplexMatrix::identity(d)?.scale(1.0 / d as f64))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }
}

/// A property given by an orthogonal projector.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorProperty {
    name: String,
    proj: ComplexMatrix,
}

impl ProjectorProperty {
    /// Requires `P = P†` and `P² = P`.
    pub fn new(name: impl Into<String>, proj: ComplexMatrix) -> Result<Self, QuantumError> {
        let name = name.into();
        let deviation = proj.hermitian_deviation();
        if deviation > tolerance::HERM {
            return Err(QuantumError::NotHermitian { name, deviation });
        }
        let deviation = proj.mul(&proj).sub(&proj).max_abs();
        if deviation > tolerance::HERM {
            return Err(QuantumError::NotIdempotent { name, deviation });
        }
        Ok(ProjectorProperty { name, proj })
    }

    pub fn from_ket(name: impl Into<String>, ket: &[Complex64]) -> Result<Self, QuantumError> {
        Self::new(name, ComplexMatrix::ket_projector(ket)?)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn proj(&self) -> &ComplexMatrix {
        &self.proj
    }

    pub fn dim(&self) -> usize {
        self.proj.dim()
    }

    pub fn rank(&self) -> usize {
        self.proj.trace().re.round() as usize
    }

    /// `I − P`.
    pub fn complement(&self, name: impl Into<String>) -> ProjectorProperty {
        let d = self.dim();
        let id = ComplexMatrix::identity(d).expect("checked dimension");
        ProjectorProperty { name: name.into(), proj: id.sub(&self.proj) }
    }

    /// Subspace inclusion `P_E ≤ P_F`, i.e. `P_E P_F = P_E`.
    pub fn below(&self, other: &ProjectorProperty) -> bool {
        self.proj.mul(&other.proj).approx_eq(&self.proj, 1e-7)
    }
}

fn same_dimension(a: usize, b: usize) -> Result<(), QuantumError> {
    if a == b {
        Ok(())
    } else {
        Err(QuantumError::DimensionMismatch { left: a, right: b })
    }
}

/// `Tr[ρ P]`, checked to be a real probability and clamped to `[0, 1]`.
pub fn born(rho: &DensityState, p: &ProjectorProperty) -> Result<f64, QuantumError> {
    same_dimension(rho.dim(), p.dim())?;
    let value = rho.rho.mul(&p.proj).trace();
    if value.im.abs() > tolerance::CMP || value.re < -tolerance::CMP || value.re > 1.0 + tolerance::CMP {
        return Err(QuantumError::Born { value: value.re });
    }
    Ok(value.re.clamp(0.0, 1.0))
}

/// `[P_E, P_F] = 0`, entrywise within `tolerance::CMP`.
pub fn kappa(e: &ProjectorProperty, f: &ProjectorProperty) -> Result<bool, QuantumError> {
    same_dimension(e.dim(), f.dim())?;
    Ok(e.proj.commutator(&f.proj).max_abs() <= tolerance::CMP)
}

/// `P ρ P / Tr[ρ P]`.
pub fn luders(rho: &DensityState, p: &ProjectorProperty) -> Result<DensityState, QuantumError> {
    let probability = born(rho, p)?;
    if probability <= tolerance::NULL {
        return Err(QuantumError::NullOutcome {
            state: rho.name.clone(),
            property: p.name.clone(),
            probability,
        });
    }
    let post = p.proj.mul(&rho.rho).mul(&p.proj).scale(1.0 / probability);
    // remove rounding asymmetry before validation
    let post = ComplexMatrix((&post.0 + post.0.adjoint()) * Complex::from(0.5));
    DensityState::new(format!("{}|{}", rho.name, p.name), post)
}

/// `Tr[P_F P_E ρ P_E P_F] / Tr[P_E ρ P_E]`.
pub fn q_conditional(rho: &DensityState, e: &ProjectorProperty, f: &ProjectorProperty) -> Result<f64, QuantumError> {
    same_dimension(rho.dim(), e.dim())?;
    same_dimension(e.dim(), f.dim())?;
    let (pe, pf, r) = (&e.proj, &f.proj, &rho.rho);
    let denominator = pe.mul(r).mul(pe).trace().re;
    if denominator <= tolerance::NULL {
        return Err(QuantumError::NullOutcome {
            state: rho.name.clone(),
            property: e.name.clone(),
            probability: denominator,
        });
    }
    let numerator = pf.mul(pe).mul(r).mul(pe).mul(pf).trace().re;
    Ok(numerator / denominator)
}

/// Finite sets of density states and projectors on one Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct HilbertModel {
    dim: usize,
    states: Vec<DensityState>,
    properties: Vec<ProjectorProperty>,
}

impl HilbertModel {
    pub fn new(states: Vec<DensityState>, properties: Vec<ProjectorProperty>) -> Result<Self, QuantumError> {
        let dim = states
            .first()
            .map(DensityState::dim)
            .or_else(|| properties.first().map(ProjectorProperty::dim))
            .ok_or(QuantumError::Dimension(0))?;
        let mut names = BTreeSet::new();
        for (name, d) in states
            .iter()
            .map(|s| (s.name.as_str(), s.dim()))
            .chain(properties.iter().map(|p| (p.name.as_str(), p.dim())))
        {
            same_dimension(dim, d)?;
            if !names.insert(name) {
                return Err(QuantumError::Duplicate(name.into()));
            }
        }
        Ok(HilbertModel { dim, states, properties })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn states(&self) -> &[DensityState] {
        &self.states
    }

    pub fn properties(&self) -> &[ProjectorProperty] {
        &self.properties
    }

    pub fn state(&self, name: &str) -> Result<&DensityState, QuantumError> {
        self.states.iter().find(|s| s.name == name).ok_or_else(|| QuantumError::Unknown(name.into()))
    }

    pub fn property(&self, name: &str) -> Result<&ProjectorProperty, QuantumError> {
        self.properties.iter().find(|p| p.name == name).ok_or_else(|| QuantumError::Unknown(name.into()))
    }

    fn property_index(&self, name: &str) -> Result<usize, QuantumError> {
        self.properties.iter().position(|p| p.name == name).ok_or_else(|| QuantumError::Unknown(name.into()))
    }

    fn family_of(&self, states: &[DensityState], exec: Execution) -> Result<StateProbabilityFamily, QuantumError> {
        let rows = exec
            .map(states, |s| self.properties.iter().map(|p| born(s, p)).collect::<Result<Vec<f64>, _>>())
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
        Ok(StateProbabilityFamily::new(
            states.iter().map(|s| s.name.clone()).collect(),
            self.properties.iter().map(|p| p.name.clone()).collect(),
            rows,
        )?)
    }

    /// Born values `Q_S(E) = Tr[ρ_S P_E]`.
    pub fn family(&self, exec: Execution) -> Result<StateProbabilityFamily, QuantumError> {
        self.family_of(&self.states, exec)
    }

    /// The Born family extended by the Lüders images `τ_F(S)` of every
    /// state with non-null `F`, together with the first-kind transform
    /// mapping each such state to its image.
    pub fn first_kind_family(
        &self,
        f: &str,
        exec: Execution,
    ) -> Result<(StateProbabilityFamily, FirstKindTransform), QuantumError> {
        let fi = self.property_index(f)?;
        let pf = &self.properties[fi];
        let mut states = self.states.clone();
        let mut map = std::collections::BTreeMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if born(s, pf)? > tolerance::NULL {
                map.insert(i, states.len());
                states.push(luders(s, pf)?);
            }
        }
        // an image already has F with certainty and is its own Lüders image
        for j in self.states.len()..states.len() {
            map.insert(j, j);
        }
        let family = self.family_of(&states, exec)?;
        let transform = FirstKindTransform::new(fi, map);
        transform.validate(&family, tolerance::CMP)?;
        Ok((family, transform))
    }

    /// `P_S(E ‖ F) = Tr[ρ' P_E]` with `ρ'` the Lüders image of `ρ_S` under `F`.
    pub fn conditional(&self, s: &str, e: &str, f: &str) -> Result<f64, QuantumError> {
        born(&luders(self.state(s)?, self.property(f)?)?, self.property(e)?)
    }

    /// The projector lattice on the family: order by subspace inclusion,
    /// meet and join by intersection and span, complement `I − P`. Every
    /// result must itself be a member of the family.
    pub fn projector_lattice(&self) -> Result<OrthoLattice, QuantumError> {
        let ps = &self.properties;
        let n = ps.len();
        let find = |m: &ComplexMatrix, what: String| -> Result<usize, QuantumError> {
            ps.iter().position(|p| p.proj.approx_eq(m, 1e-7)).ok_or(QuantumError::NotClosed(what))
        };
        let id = ComplexMatrix::identity(self.dim)?;
        let mut leq = vec![vec![false; n]; n];
        let mut meet = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                leq[a][b] = ps[a].below(&ps[b]);
                // intersection = kernel of (I − P_a) + (I − P_b)
                let outside = id.sub(&ps[a].proj).0 + id.sub(&ps[b].proj).0;
                let kernel = id.sub(&range_projector(&ComplexMatrix(outside), 1e-9)?);
                meet[a][b] = find(&kernel, format!("{} ∧ {}", ps[a].name, ps[b].name))?;
                let span = range_projector(&ComplexMatrix(&ps[a].proj.0 + &ps[b].proj.0), 1e-9)?;
                join[a][b] = find(&span, format!("{} ∨ {}", ps[a].name, ps[b].name))?;
            }
        }
        let ortho = ps
            .iter()
            .map(|p| find(&id.sub(&p.proj), format!("{}⊥", p.name)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(OrthoLattice::new(ps.iter().map(|p| p.name.clone()).collect(), leq, meet, join, ortho)?)
    }
}

/// Bloch vector `r` of a qubit operator `(I + r·σ)/2`.
pub fn bloch_vector(m: &ComplexMatrix) -> Result<[f64; 3], QuantumError> {
    same_dimension(2, m.dim())?;
    let off = m.get(0, 1);
    Ok([2.0 * off.re, -2.0 * off.im, (m.get(0, 0) - m.get(1, 1)).re])
}

/// `(I + r·σ)/2`; a rank-one projector for unit `r`, a density matrix for `|r| ≤ 1`.
pub fn bloch_matrix(r: [f64; 3]) -> ComplexMatrix {
    let [x, y, z] = r;
    let entries = [
        Complex::new((1.0 + z) / 2.0, 0.0),
        Complex::new(x / 2.0, -y / 2.0),
        Complex::new(x / 2.0, y / 2.0),
        Complex::new((1.0 - z) / 2.0, 0.0),
    ];
    ComplexMatrix::from_row_major(2, &entries).expect("2×2")
}

/// The qubit family `O`, `I` and nine antipodal pairs of rank-one projectors.
pub fn qubit_projector_family() -> Vec<ProjectorProperty> {
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let s3 = 1.0 / 3f64.sqrt();
    let directions: [(&str, [f64; 3]); 9] = [
        ("z", [0.0, 0.0, 1.0]),
        ("x", [1.0, 0.0, 0.0]),
        ("y", [0.0, 1.0, 0.0]),
        ("xy", [s2, s2, 0.0]),
        ("xz", [s2, 0.0, s2]),
        ("yz", [0.0, s2, s2]),
        ("d1", [s3, s3, s3]),
        ("d2", [s3, -s3, s3]),
        ("d3", [-s3, s3, s3]),
    ];
    let mut family = vec![
        ProjectorProperty::new("O", ComplexMatrix::zeros(2).expect("qubit")).expect("zero projector"),
        ProjectorProperty::new("I", ComplexMatrix::identity(2).expect("qubit")).expect("identity"),
    ];
    for (name, n) in directions {
        let minus = [-n[0], -n[1], -n[2]];
        family.push(ProjectorProperty::new(format!("{name}+"), bloch_matrix(n)).expect("unit vector"));
        family.push(ProjectorProperty::new(format!("{name}-"), bloch_matrix(minus)).expect("unit vector"));
    }
    family
}

/// `|0⟩`, `|1⟩`, `|+⟩`, `|−⟩`, `O`, `I`, with `I/2` and the pure states `|0⟩`, `|+⟩`.
pub fn qubit_conditioning_model() -> HilbertModel {
    let c = |re: f64| Complex::new(re, 0.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let props = vec![
        ProjectorProperty::new("O", ComplexMatrix::zeros(2).unwrap()).unwrap(),
        ProjectorProperty::from_ket("P0", &[c(1.0), c(0.0)]).unwrap(),
        ProjectorProperty::from_ket("P1", &[c(0.0), c(1.0)]).unwrap(),
        ProjectorProperty::from_ket("Pplus", &[c(h), c(h)]).unwrap(),
        ProjectorProperty::from_ket("Pminus", &[c(h), c(-h)]).unwrap(),
        ProjectorProperty::new("I", ComplexMatrix::identity(2).unwrap()).unwrap(),
    ];
    let states = vec![
        DensityState::maximally_mixed("mixed", 2).unwrap(),
        DensityState::pure("zero", &[c(1.0), c(0.0)]).unwrap(),
        DensityState::pure("plus", &[c(h), c(h)]).unwrap(),
    ];
    HilbertModel::new(states, props).expect("consistent qubit model")
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
