//! Kraus operations on subsystem B.
//!
//! A [`KrausOperation`] is a completely positive map `ρ -> Σ_n F_n ρ F_n†`
//! whose summary operator `N = Σ_n F_n†F_n` satisfies `0 ≤ N ≤ I`. It may be
//! trace decreasing (a post-selected branch) or trace preserving. A
//! [`ChannelEnsemble`] groups operations that together are trace preserving;
//! each member is one classically communicated outcome.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::coherence::max_off_diagonal;
use crate::error::{Error, Result};
use crate::linalg::{
    commutator, complete_basis, hermitian_eig, ComplexMatrix, C64, VALIDITY_TOL, ZERO,
};
use crate::state::{reduced_a, schmidt_decompose, BipartitePureState};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KrausOperation {
    dim_b: usize,
    label: String,
    kraus: Vec<ComplexMatrix>,
    #[serde(skip)]
    n: ComplexMatrix,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KrausFile {
    dim_b: usize,
    #[serde(default)]
    label: String,
    kraus: Vec<ComplexMatrix>,
}

impl<'de> Deserialize<'de> for KrausOperation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = KrausFile::deserialize(d)?;
        let op = KrausOperation::new(f.kraus, f.label).map_err(D::Error::custom)?;
        if op.dim_b != f.dim_b {
            return Err(D::Error::custom(format!(
                "dim_b = {} but Kraus operators are {}x{}",
                f.dim_b, op.dim_b, op.dim_b
            )));
        }
        Ok(op)
    }
}

impl KrausOperation {
    /// Validates shapes and `N ≤ I` within `1e-9`.
    pub fn new(kraus: Vec<ComplexMatrix>, label: impl Into<String>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::EmptyOperation)?;
        let dim_b = first.rows();
        if let Some(bad) = kraus
            .iter()
            .find(|f| !f.is_square() || f.rows() != dim_b)
        {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operators must all be {dim_b}x{dim_b}, found {}x{}",
                bad.rows(),
                bad.cols()
            )));
        }
        let n = summary_operator(&kraus);
        let max_eigenvalue = hermitian_eig(&n)?.values[0];
        if max_eigenvalue > 1.0 + VALIDITY_TOL {
            return Err(Error::NotSubNormalized { max_eigenvalue });
        }
        Ok(Self {
            dim_b,
            label: label.into(),
            kraus,
            n,
        })
    }

    /// One-operator operation `{F}`.
    pub fn single(f: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        Self::new(vec![f], label)
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `N = Σ_n F_n†F_n`.
    pub fn n_operator(&self) -> &ComplexMatrix {
        &self.n
    }

    /// `max |N - I| < tol`.
    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.tp_violation() < tol
    }

    pub fn tp_violation(&self) -> f64 {
        self.n.max_abs_diff(&ComplexMatrix::identity(self.dim_b))
    }

    /// Splits a trace-preserving operation into one single-Kraus branch per operator.
    pub fn branches(&self) -> Vec<KrausOperation> {
        self.kraus
            .iter()
            .enumerate()
            .map(|(k, f)| KrausOperation {
                dim_b: self.dim_b,
                label: format!("{}[{k}]", self.label),
                kraus: vec![f.clone()],
                n: &f.adjoint() * f,
            })
            .collect()
    }
}

fn summary_operator(kraus: &[ComplexMatrix]) -> ComplexMatrix {
    let d = kraus[0].rows();
    let sum = kraus
        .iter()
        .fold(ComplexMatrix::zeros(d, d), |acc, f| &acc + &(&f.adjoint() * f));
    sum.hermitian_part()
}

/// `N = Σ_n F_n†F_n` of an operation.
pub fn n_operator(op: &KrausOperation) -> &ComplexMatrix {
    op.n_operator()
}

pub fn is_trace_preserving(op: &KrausOperation, tol: f64) -> bool {
    op.is_trace_preserving(tol)
}

/// Operations `$_k` whose summary operators add up to the identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelEnsemble {
    operations: Vec<KrausOperation>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleFile {
    operations: Vec<KrausOperation>,
}

impl<'de> Deserialize<'de> for ChannelEnsemble {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = EnsembleFile::deserialize(d)?;
        ChannelEnsemble::new(f.operations).map_err(D::Error::custom)
    }
}

impl ChannelEnsemble {
    /// Enforces `Σ_k N_k = I` within `1e-9`.
    pub fn new(operations: Vec<KrausOperation>) -> Result<Self> {
        let first = operations.first().ok_or(Error::EmptyOperation)?;
        let d = first.dim_b;
        if operations.iter().any(|op| op.dim_b != d) {
            return Err(Error::DimensionMismatch(
                "ensemble members act on different dimensions".into(),
            ));
        }
        let total = operations
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, op| &acc + &op.n);
        let violation = total.max_abs_diff(&ComplexMatrix::identity(d));
        if violation > VALIDITY_TOL {
            return Err(Error::NotTracePreserving { violation });
        }
        Ok(Self { operations })
    }

    pub fn operations(&self) -> &[KrausOperation] {
        &self.operations
    }

    pub fn dim_b(&self) -> usize {
        self.operations[0].dim_b
    }
}

/// What B does: a trace-preserving operation whose individual Kraus
/// operators are the communicated outcomes, or an ensemble whose members are.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Channel {
    Ensemble(ChannelEnsemble),
    Operation(KrausOperation),
}

impl Channel {
    pub fn dim_b(&self) -> usize {
        match self {
            Channel::Operation(op) => op.dim_b,
            Channel::Ensemble(e) => e.dim_b(),
        }
    }

    /// The post-selected branches, one per communicated outcome.
    pub fn branches(&self) -> Result<Vec<KrausOperation>> {
        match self {
            Channel::Operation(op) => {
                let violation = op.tp_violation();
                if violation > VALIDITY_TOL {
                    return Err(Error::NotTracePreserving { violation });
                }
                Ok(op.branches())
            }
            Channel::Ensemble(e) => Ok(e.operations.clone()),
        }
    }
}

impl From<KrausOperation> for Channel {
    fn from(op: KrausOperation) -> Self {
        Channel::Operation(op)
    }
}

impl From<ChannelEnsemble> for Channel {
    fn from(e: ChannelEnsemble) -> Self {
        Channel::Ensemble(e)
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::ParameterOutOfRange { name, value });
    }
    Ok(())
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[&[ZERO, C64::new(0.0, -1.0)], &[C64::new(0.0, 1.0), ZERO]])
}

fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::real_diagonal(&[1.0, -1.0])
}

/// `{F₁ = |0⟩⟨0| + √(1-r)|1⟩⟨1|, F₂ = √r|1⟩⟨1|}`.
pub fn phase_damping(r: f64) -> Result<KrausOperation> {
    check_unit("r", r)?;
    KrausOperation::new(
        vec![
            ComplexMatrix::real_diagonal(&[1.0, (1.0 - r).sqrt()]),
            ComplexMatrix::real_diagonal(&[0.0, r.sqrt()]),
        ],
        format!("phase_damping({r})"),
    )
}

/// `ρ -> (1-p)ρ + p I/2`: `{√(1-3p/4) I, √p/2 X, √p/2 Y, √p/2 Z}`.
pub fn depolarizing(p: f64) -> Result<KrausOperation> {
    check_unit("p", p)?;
    let s = p.sqrt() / 2.0;
    KrausOperation::new(
        vec![
            ComplexMatrix::identity(2).scale_real((1.0 - 0.75 * p).sqrt()),
            pauli_x().scale_real(s),
            pauli_y().scale_real(s),
            pauli_z().scale_real(s),
        ],
        format!("depolarizing({p})"),
    )
}

fn pauli_flip(p: f64, pauli: ComplexMatrix, name: &str) -> Result<KrausOperation> {
    check_unit("p", p)?;
    KrausOperation::new(
        vec![
            ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt()),
            pauli.scale_real(p.sqrt()),
        ],
        format!("{name}({p})"),
    )
}

/// `{√(1-p) I, √p X}`.
pub fn bit_flip(p: f64) -> Result<KrausOperation> {
    pauli_flip(p, pauli_x(), "bit_flip")
}

/// `{√(1-p) I, √p Z}`.
pub fn phase_flip(p: f64) -> Result<KrausOperation> {
    pauli_flip(p, pauli_z(), "phase_flip")
}

/// `{√(1-p) I, √p Y}`.
pub fn bit_phase_flip(p: f64) -> Result<KrausOperation> {
    pauli_flip(p, pauli_y(), "bit_phase_flip")
}

/// Rank-one projectors onto the columns of an orthonormal basis, one
/// ensemble member per column.
pub fn projective_measurement(basis: &ComplexMatrix) -> Result<ChannelEnsemble> {
    if !basis.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "measurement basis must be square, got {}x{}",
            basis.rows(),
            basis.cols()
        )));
    }
    let d = basis.rows();
    let violation = (&basis.adjoint() * basis).max_abs_diff(&ComplexMatrix::identity(d));
    if violation > VALIDITY_TOL {
        return Err(Error::NotOrthonormal { violation });
    }
    let ops = (0..d)
        .map(|k| {
            let b = basis.column(k);
            KrausOperation::single(ComplexMatrix::outer(&b, &b), format!("proj[{k}]"))
        })
        .collect::<Result<Vec<_>>>()?;
    ChannelEnsemble::new(ops)
}

/// Hadamard basis `{|+⟩, |−⟩}` as columns.
pub fn hadamard_basis() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real_rows(&[&[h, h], &[h, -h]])
}

/// Outcome of the commutator criterion for coherence creation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CreationVerdict {
    pub creates: bool,
    /// Smallest computational index `i` with `[N, P_i] ≠ 0`.
    pub witness: Option<usize>,
}

/// Decides whether `op` on B creates coherence on A for a pure state whose
/// A-marginal is incoherent: it does iff some
/// `P_i = (⟨i|⊗I)|ψ⟩⟨ψ|(|i⟩⊗I)` fails to commute with `N`, i.e.
/// `‖[N, P_i]‖_F > tol`.
pub fn commutator_criterion(
    psi: &BipartitePureState,
    op: &KrausOperation,
    tol: f64,
) -> Result<CreationVerdict> {
    check_dims(psi, op)?;
    let rho_a = reduced_a(psi);
    let max_off = max_off_diagonal(rho_a.matrix());
    if max_off > tol {
        return Err(Error::PremiseViolated {
            coherence: crate::coherence::l1_coherence(&rho_a),
            max_off_diagonal: max_off,
        });
    }
    for i in 0..psi.dim_a() {
        let slice = psi.a_slice(i);
        let p_i = ComplexMatrix::outer(slice, slice);
        if commutator(op.n_operator(), &p_i)?.frobenius_norm() > tol {
            return Ok(CreationVerdict {
                creates: true,
                witness: Some(i),
            });
        }
    }
    Ok(CreationVerdict {
        creates: false,
        witness: None,
    })
}

pub(crate) fn check_dims(psi: &BipartitePureState, op: &KrausOperation) -> Result<()> {
    if psi.dim_b() != op.dim_b() {
        return Err(Error::DimensionMismatch(format!(
            "state has dim_b = {} but the operation acts on dimension {}",
            psi.dim_b(),
            op.dim_b()
        )));
    }
    Ok(())
}

/// Single-Kraus operation `F = N^{1/2}` with `N = Σ_k n_k |β_k⟩⟨β_k|`
/// diagonal in `psi`'s Schmidt B-basis, which cannot create coherence.
///
/// The Schmidt vectors are completed to a full basis of B by Gram–Schmidt
/// against the computational vectors. `n_values[k]` is assigned to the
/// `k`-th basis vector; basis vectors past the end of `n_values` reuse its
/// last entry, so a constant list yields a scalar operator.
pub fn inert_operation(psi: &BipartitePureState, n_values: &[f64]) -> Result<KrausOperation> {
    for &v in n_values {
        check_unit("n", v)?;
    }
    let schmidt = schmidt_decompose(psi);
    if n_values.len() < schmidt.rank {
        return Err(Error::DimensionMismatch(format!(
            "need at least {} values (Schmidt rank), got {}",
            schmidt.rank,
            n_values.len()
        )));
    }
    let seed: Vec<Vec<C64>> = (0..schmidt.rank).map(|k| schmidt.beta(k)).collect();
    let basis = complete_basis(&seed, psi.dim_b());
    let last = *n_values.last().expect("rank >= 1");
    let d = psi.dim_b();
    let mut f = ComplexMatrix::zeros(d, d);
    for (k, b) in basis.iter().enumerate() {
        let root = n_values.get(k).copied().unwrap_or(last).sqrt();
        f = &f + &ComplexMatrix::outer(b, b).scale(c(root));
    }
    KrausOperation::single(f.hermitian_part(), "inert")
}
