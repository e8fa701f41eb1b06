//! Remote creation of coherence: conditional states of A after an operation
//! on B, outcome-averaged coherence, its entanglement bounds and the
//! two-qubit factorization law.

use serde::Serialize;

use crate::channel::{check_dims, Channel, KrausOperation};
use crate::coherence::{is_incoherent_quantum, l1_coherence, l1_off_diagonal, max_off_diagonal, CLASSIFY_TOL};
use crate::error::{Error, Result};
use crate::linalg::{complete_basis, kron_vec, random_pure_state, ComplexMatrix, SeededRng, C64, ZERO};
use crate::numfmt::{serialize_f64, serialize_opt_f64, serialize_opt_f64_slice};
use crate::state::{
    concurrence_from_weights, reduced_a, schmidt_decompose, BipartiteDensity, BipartitePureState,
    DensityMatrix, SchmidtForm, StateRef,
};

/// Outcomes less likely than this have no conditional state.
pub const ZERO_PROBABILITY: f64 = 1e-14;

/// Premise tolerance on A's initial off-diagonal entries.
pub const PREMISE_TOL: f64 = 1e-9;

/// Random projectors tried per state by [`find_creating_operation`].
pub const SEARCH_BUDGET: usize = 512;

/// Coherence a found operation must exceed.
pub const CREATION_THRESHOLD: f64 = 1e-6;

/// One post-selected branch.
#[derive(Debug, Clone, Serialize)]
pub struct OutcomeRecord {
    pub label: String,
    #[serde(serialize_with = "serialize_f64")]
    pub probability: f64,
    /// Conditional state of A; absent for a zero-probability branch.
    pub state_a: Option<DensityMatrix>,
    #[serde(serialize_with = "serialize_f64")]
    pub coherence: f64,
    pub zero_probability: bool,
}

/// Everything computed for one (state, channel) pair.
#[derive(Debug, Clone, Serialize)]
pub struct RccReport {
    pub dim_a: usize,
    pub dim_b: usize,
    pub outcomes: Vec<OutcomeRecord>,
    /// `Σ_n p_n C(ρ^A_n)`.
    #[serde(serialize_with = "serialize_f64")]
    pub average_rcc: f64,
    /// Concurrence of the input state.
    #[serde(serialize_with = "serialize_f64")]
    pub entanglement: f64,
    /// Per-outcome bound `(E/p_n)·√(Σ_{j<i}|N_ji|²)`; absent for zero-probability branches.
    #[serde(rename = "lemma1_bounds", serialize_with = "serialize_opt_f64_slice")]
    pub outcome_bounds: Vec<Option<f64>>,
    /// `(d/2)·E·C̄(φ)`; absent when `dim_b < dim_a`.
    #[serde(rename = "theorem3_bound", serialize_with = "serialize_opt_f64")]
    pub maxent_bound: Option<f64>,
    /// `E·Σ_k √(Σ_{j<i}|N^k_ji|²)`.
    #[serde(serialize_with = "serialize_f64")]
    pub tighter_bound: f64,
    /// Average coherence of the maximally entangled partner `φ`.
    #[serde(serialize_with = "serialize_opt_f64")]
    pub maxent_average_rcc: Option<f64>,
    /// `C̄(ψ)/C̄(φ)` for two-qubit inputs with `C̄(φ) > 1e-12`.
    #[serde(serialize_with = "serialize_opt_f64")]
    pub factorization_ratio: Option<f64>,
    /// Two-qubit inputs only: whether `C̄(ψ) = E·C̄(φ)` within `1e-9`.
    pub factorization_holds: Option<bool>,
}

/// Conditional A-state `ρ^A' = tr_B[(I⊗$)ρ]/p'` and its probability `p'`.
///
/// Pure inputs go through the Schmidt form, mixed inputs through the block
/// formula `ρ'_ik = Σ_jl ρ_{ij,kl} N_lj`. Both depend on the operation only
/// through `N`.
pub fn post_operation_state_a<'a>(
    state: impl Into<StateRef<'a>>,
    op: &KrausOperation,
) -> Result<(DensityMatrix, f64)> {
    match state.into() {
        StateRef::Pure(psi) => post_operation_pure(psi, op),
        StateRef::Mixed(rho) => post_operation_mixed(rho, op),
    }
}

/// Pure-state path: `ρ^A' = Σ_ij √(ω_iω_j) ⟨β_j|N|β_i⟩ |a_i⟩⟨a_j| / p'`.
pub fn post_operation_pure(
    psi: &BipartitePureState,
    op: &KrausOperation,
) -> Result<(DensityMatrix, f64)> {
    check_dims(psi, op)?;
    let schmidt = schmidt_decompose(psi);
    let (unnorm, p) = schmidt_branch(&schmidt, op.n_operator());
    normalize(unnorm, p)
}

/// Mixed-state path: `ρ'_ik = Σ_jl ρ_{ij,kl} N_lj / p'`.
pub fn post_operation_mixed(
    rho: &BipartiteDensity,
    op: &KrausOperation,
) -> Result<(DensityMatrix, f64)> {
    check_dims_mixed(rho, op)?;
    let unnorm = block_contract(rho.matrix(), rho.dim_a(), rho.dim_b(), op.n_operator());
    let p = unnorm.trace().re;
    normalize(unnorm, p)
}

/// `tr_B[(I⊗$)ρ]` without post-selection or normalization.
pub fn unselected_state_a<'a>(
    state: impl Into<StateRef<'a>>,
    op: &KrausOperation,
) -> Result<ComplexMatrix> {
    match state.into() {
        StateRef::Pure(psi) => {
            check_dims(psi, op)?;
            Ok(schmidt_branch(&schmidt_decompose(psi), op.n_operator()).0)
        }
        StateRef::Mixed(rho) => {
            check_dims_mixed(rho, op)?;
            Ok(block_contract(rho.matrix(), rho.dim_a(), rho.dim_b(), op.n_operator()))
        }
    }
}

fn check_dims_mixed(rho: &BipartiteDensity, op: &KrausOperation) -> Result<()> {
    if rho.dim_b() != op.dim_b() {
        return Err(Error::DimensionMismatch(format!(
            "state has dim_b = {} but the operation acts on dimension {}",
            rho.dim_b(),
            op.dim_b()
        )));
    }
    Ok(())
}

fn normalize(unnorm: ComplexMatrix, p: f64) -> Result<(DensityMatrix, f64)> {
    if p < ZERO_PROBABILITY {
        return Err(Error::ZeroProbability { probability: p });
    }
    let m = unnorm.scale_real(1.0 / p).hermitian_part();
    Ok((DensityMatrix::from_trusted(m), p))
}

pub(crate) fn block_contract(
    rho: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    n: &ComplexMatrix,
) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim_a, dim_a, |i, k| {
        let mut acc = ZERO;
        for j in 0..dim_b {
            for l in 0..dim_b {
                acc += rho[(i * dim_b + j, k * dim_b + l)] * n[(l, j)];
            }
        }
        acc
    })
}

/// Unnormalized conditional state and probability from a Schmidt form.
fn schmidt_branch(schmidt: &SchmidtForm, n: &ComplexMatrix) -> (ComplexMatrix, f64) {
    let m = schmidt.operator_in_beta_basis(n);
    let r = schmidt.rank;
    let sqrt_w: Vec<f64> = schmidt.weights.iter().map(|w| w.sqrt()).collect();
    let p: f64 = (0..r).map(|i| schmidt.weights[i] * m[(i, i)].re).sum();
    let dim_a = schmidt.basis_a.rows();
    let out = if schmidt.is_computational_a() {
        let mut out = ComplexMatrix::zeros(dim_a, dim_a);
        for i in 0..r {
            for j in 0..r {
                out[(schmidt.a_index[i], schmidt.a_index[j])] = m[(j, i)] * (sqrt_w[i] * sqrt_w[j]);
            }
        }
        out
    } else {
        let core = ComplexMatrix::from_fn(r, r, |i, j| m[(j, i)] * (sqrt_w[i] * sqrt_w[j]));
        &(&schmidt.basis_a * &core) * &schmidt.basis_a.adjoint()
    };
    (out, p)
}

/// `√(Σ_{j<i} |M_ji|²)` over the off-diagonal of `M`.
fn off_diagonal_root(m: &ComplexMatrix) -> f64 {
    let mut s = 0.0;
    for i in 0..m.rows() {
        for j in 0..i {
            s += m[(j, i)].norm_sqr();
        }
    }
    s.sqrt()
}

fn check_premise(psi: &BipartitePureState) -> Result<()> {
    let rho_a = reduced_a(psi);
    let max_off = max_off_diagonal(rho_a.matrix());
    if max_off > PREMISE_TOL {
        return Err(Error::PremiseViolated {
            coherence: l1_coherence(&rho_a),
            max_off_diagonal: max_off,
        });
    }
    Ok(())
}

fn evaluate_branches(schmidt: &SchmidtForm, branches: &[KrausOperation]) -> Vec<OutcomeRecord> {
    branches
        .iter()
        .map(|op| {
            let (unnorm, p) = schmidt_branch(schmidt, op.n_operator());
            match normalize(unnorm, p) {
                Ok((rho, p)) => OutcomeRecord {
                    label: op.label().to_string(),
                    probability: p,
                    coherence: l1_coherence(&rho),
                    state_a: Some(rho),
                    zero_probability: false,
                },
                Err(_) => OutcomeRecord {
                    label: op.label().to_string(),
                    probability: p.max(0.0),
                    state_a: None,
                    coherence: 0.0,
                    zero_probability: true,
                },
            }
        })
        .collect()
}

/// Average over outcomes; zero-probability branches contribute nothing.
fn average_of(outcomes: &[OutcomeRecord]) -> f64 {
    outcomes
        .iter()
        .filter(|o| !o.zero_probability)
        .map(|o| o.probability * o.coherence)
        .sum()
}

/// Validated inputs for the averaged quantities.
fn prepare(psi: &BipartitePureState, channel: &Channel) -> Result<(SchmidtForm, Vec<KrausOperation>)> {
    if psi.dim_b() != channel.dim_b() {
        return Err(Error::DimensionMismatch(format!(
            "state has dim_b = {} but the channel acts on dimension {}",
            psi.dim_b(),
            channel.dim_b()
        )));
    }
    check_premise(psi)?;
    let branches = channel.branches()?;
    Ok((schmidt_decompose(psi), branches))
}

/// Outcome-averaged coherence `C̄^{A|B}(ψ) = Σ_n p_n C(ρ^A_n)`.
pub fn average_coherence(psi: &BipartitePureState, channel: &Channel) -> Result<f64> {
    let (schmidt, branches) = prepare(psi, channel)?;
    Ok(average_of(&evaluate_branches(&schmidt, &branches)))
}

/// Per-outcome bound `C(ρ^A') ≤ (E/p')·√(Σ_{j<i}|N_ji|²)`, `N` in the
/// Schmidt B-basis of `psi`.
pub fn outcome_coherence_bound(psi: &BipartitePureState, op: &KrausOperation) -> Result<f64> {
    check_dims(psi, op)?;
    let schmidt = schmidt_decompose(psi);
    let m = schmidt.operator_in_beta_basis(op.n_operator());
    let p: f64 = (0..schmidt.rank).map(|i| schmidt.weights[i] * m[(i, i)].re).sum();
    if p < ZERO_PROBABILITY {
        return Err(Error::ZeroProbability { probability: p });
    }
    Ok(concurrence_from_weights(&schmidt.weights) / p * off_diagonal_root(&m))
}

/// Equal-weight state `Σ_i |a_i⟩|β_i⟩/√d` in `psi`'s Schmidt bases, with
/// missing directions filled in by Gram–Schmidt against computational
/// vectors.
pub fn maximally_entangled_partner(psi: &BipartitePureState) -> Result<BipartitePureState> {
    let (da, db) = (psi.dim_a(), psi.dim_b());
    if db < da {
        return Err(Error::DimensionMismatch(format!(
            "maximally entangled partner needs dim_b >= dim_a, got {da}x{db}"
        )));
    }
    let schmidt = schmidt_decompose(psi);
    partner_from_schmidt(&schmidt, da, db)
}

fn partner_from_schmidt(schmidt: &SchmidtForm, da: usize, db: usize) -> Result<BipartitePureState> {
    let a: Vec<Vec<C64>> = (0..schmidt.rank).map(|k| schmidt.basis_a.column(k)).collect();
    let b: Vec<Vec<C64>> = (0..schmidt.rank).map(|k| schmidt.beta(k)).collect();
    let a = complete_basis(&a, da);
    let b = complete_basis(&b, db);
    let s = 1.0 / (da as f64).sqrt();
    let mut amps = vec![ZERO; da * db];
    for k in 0..da {
        for (x, v) in amps.iter_mut().zip(kron_vec(&a[k], &b[k])) {
            *x += v * s;
        }
    }
    BipartitePureState::normalized(da, db, amps)
}

/// `(d/2)·E(ψ)·C̄(φ)` with `φ` the maximally entangled partner and `d = dim_a`.
pub fn maxent_average_bound(psi: &BipartitePureState, channel: &Channel) -> Result<f64> {
    let (schmidt, branches) = prepare(psi, channel)?;
    let e = concurrence_from_weights(&schmidt.weights);
    let partner = maximally_entangled_partner(psi)?;
    let maxent = average_of(&evaluate_branches(&schmidt_decompose(&partner), &branches));
    Ok(psi.dim_a() as f64 / 2.0 * e * maxent)
}

/// `E(ψ)·Σ_k √(Σ_{j<i}|N^k_ji|²)`, summed over outcomes.
pub fn summed_outcome_bound(psi: &BipartitePureState, channel: &Channel) -> Result<f64> {
    let (schmidt, branches) = prepare(psi, channel)?;
    Ok(summed_bound(&schmidt, &branches))
}

fn summed_bound(schmidt: &SchmidtForm, branches: &[KrausOperation]) -> f64 {
    let e = concurrence_from_weights(&schmidt.weights);
    e * branches
        .iter()
        .map(|op| off_diagonal_root(&schmidt.operator_in_beta_basis(op.n_operator())))
        .sum::<f64>()
}

/// Result of comparing `C̄(ψ)` with `E(ψ)·C̄(φ)` on a two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Factorization {
    #[serde(serialize_with = "serialize_f64")]
    pub average: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub maxent_average: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub entanglement: f64,
    /// `C̄(ψ)/C̄(φ)`, absent when `C̄(φ) ≤ 1e-12`.
    #[serde(serialize_with = "serialize_opt_f64")]
    pub ratio: Option<f64>,
    pub holds: bool,
}

impl Factorization {
    /// `|C̄(ψ) − E·C̄(φ)|`.
    pub fn deviation(&self) -> f64 {
        (self.average - self.entanglement * self.maxent_average).abs()
    }
}

const RATIO_FLOOR: f64 = 1e-12;
const FACTORIZATION_TOL: f64 = 1e-9;

fn factorization_from(average: f64, maxent_average: f64, entanglement: f64) -> Factorization {
    let (ratio, holds) = if maxent_average > RATIO_FLOOR {
        (
            Some(average / maxent_average),
            (average - entanglement * maxent_average).abs() < FACTORIZATION_TOL,
        )
    } else {
        (None, average < FACTORIZATION_TOL)
    };
    Factorization {
        average,
        maxent_average,
        entanglement,
        ratio,
        holds,
    }
}

/// Two-qubit factorization `C̄(ψ) = E(ψ)·C̄(φ)`.
pub fn factorization_check(psi: &BipartitePureState, channel: &Channel) -> Result<Factorization> {
    if psi.dim_a() != 2 || psi.dim_b() != 2 {
        return Err(Error::WrongDimension {
            dim_a: psi.dim_a(),
            dim_b: psi.dim_b(),
        });
    }
    let (schmidt, branches) = prepare(psi, channel)?;
    let average = average_of(&evaluate_branches(&schmidt, &branches));
    let partner = partner_from_schmidt(&schmidt, 2, 2)?;
    let maxent = average_of(&evaluate_branches(&schmidt_decompose(&partner), &branches));
    Ok(factorization_from(
        average,
        maxent,
        concurrence_from_weights(&schmidt.weights),
    ))
}

/// Full report: outcomes, average, entanglement, all bounds and, for two
/// qubits, the factorization ratio.
pub fn average_rcc(psi: &BipartitePureState, channel: &Channel) -> Result<RccReport> {
    let (schmidt, branches) = prepare(psi, channel)?;
    let (da, db) = (psi.dim_a(), psi.dim_b());
    let outcomes = evaluate_branches(&schmidt, &branches);
    let average = average_of(&outcomes);
    let e = concurrence_from_weights(&schmidt.weights);

    let outcome_bounds = outcomes
        .iter()
        .zip(&branches)
        .map(|(o, op)| {
            (!o.zero_probability).then(|| {
                let m = schmidt.operator_in_beta_basis(op.n_operator());
                e / o.probability * off_diagonal_root(&m)
            })
        })
        .collect();

    let maxent_average = if db >= da {
        let partner = partner_from_schmidt(&schmidt, da, db)?;
        Some(average_of(&evaluate_branches(
            &schmidt_decompose(&partner),
            &branches,
        )))
    } else {
        None
    };
    let factorization =
        (da == 2 && db == 2).then(|| factorization_from(average, maxent_average.unwrap_or(0.0), e));

    Ok(RccReport {
        dim_a: da,
        dim_b: db,
        average_rcc: average,
        entanglement: e,
        outcome_bounds,
        maxent_bound: maxent_average.map(|c| da as f64 / 2.0 * e * c),
        tighter_bound: summed_bound(&schmidt, &branches),
        maxent_average_rcc: maxent_average,
        factorization_ratio: factorization.and_then(|f| f.ratio),
        factorization_holds: factorization.map(|f| f.holds),
        outcomes,
    })
}

/// A rank-one projector on B that creates coherence on A.
#[derive(Debug, Clone)]
pub struct CreatingOperation {
    pub operation: KrausOperation,
    pub coherence: f64,
    pub probability: f64,
}

fn state_hash(rho: &BipartiteDensity) -> u64 {
    // FNV-1a over dimensions and entry bit patterns
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |x: u64| {
        for byte in x.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    eat(rho.dim_a() as u64);
    eat(rho.dim_b() as u64);
    for z in rho.matrix().entries() {
        eat(z.re.to_bits());
        eat(z.im.to_bits());
    }
    h
}

/// Searches rank-one projectors `|β⟩⟨β|` on B for one that leaves A with
/// coherence above `1e-6`.
///
/// Returns `None` when the state is incoherent-quantum, where no operation
/// can create coherence. Candidates are the computational and Fourier bases
/// of B followed by [`SEARCH_BUDGET`] Haar-random vectors drawn from a stream
/// keyed by the state's contents; the best candidate is returned.
pub fn find_creating_operation(rho_ab: &BipartiteDensity) -> Result<Option<CreatingOperation>> {
    let (da, db) = (rho_ab.dim_a(), rho_ab.dim_b());
    if is_incoherent_quantum(rho_ab.rho(), da, db, CLASSIFY_TOL)? {
        return Ok(None);
    }
    let mut candidates: Vec<Vec<C64>> = Vec::with_capacity(2 * db + SEARCH_BUDGET);
    for j in 0..db {
        let mut e = vec![ZERO; db];
        e[j] = C64::new(1.0, 0.0);
        candidates.push(e);
    }
    let s = 1.0 / (db as f64).sqrt();
    for k in 0..db {
        candidates.push(
            (0..db)
                .map(|j| C64::from_polar(s, 2.0 * std::f64::consts::PI * (j * k) as f64 / db as f64))
                .collect(),
        );
    }
    let mut rng = SeededRng::new(state_hash(rho_ab), 0);
    for _ in 0..SEARCH_BUDGET {
        candidates.push(random_pure_state(db, &mut rng));
    }

    let mut best: Option<(usize, f64, f64)> = None;
    for (idx, beta) in candidates.iter().enumerate() {
        let n = ComplexMatrix::outer(beta, beta);
        let unnorm = block_contract(rho_ab.matrix(), da, db, &n);
        let p = unnorm.trace().re;
        if p < ZERO_PROBABILITY {
            continue;
        }
        let c = l1_off_diagonal(&unnorm) / p;
        if best.is_none_or(|(_, bc, _)| c > bc) {
            best = Some((idx, c, p));
        }
    }
    match best {
        Some((idx, coherence, probability)) if coherence > CREATION_THRESHOLD => {
            let beta = &candidates[idx];
            let operation =
                KrausOperation::single(ComplexMatrix::outer(beta, beta), format!("projector[{idx}]"))?;
            Ok(Some(CreatingOperation {
                operation,
                coherence,
                probability,
            }))
        }
        other => Err(Error::SearchExhausted {
            attempts: candidates.len(),
            best: other.map_or(0.0, |(_, c, _)| c),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{hadamard_basis, phase_damping, projective_measurement};
    use crate::linalg::{tensor_product, ONE};
    use crate::state::{concurrence, validate_density};

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn bell() -> BipartitePureState {
        BipartitePureState::new(2, 2, vec![c(H), ZERO, ZERO, c(H)]).unwrap()
    }

    fn plus() -> Vec<C64> {
        vec![c(H), c(H)]
    }

    fn minus() -> Vec<C64> {
        vec![c(H), c(-H)]
    }

    fn hadamard_state(w0: f64) -> BipartitePureState {
        BipartitePureState::from_schmidt_terms(&[w0, 1.0 - w0], &[plus(), minus()]).unwrap()
    }

    fn plus_projector() -> KrausOperation {
        KrausOperation::single(ComplexMatrix::outer(&plus(), &plus()), "plus").unwrap()
    }

    #[test]
    fn bell_with_plus_projector() {
        let (rho, p) = post_operation_state_a(&bell(), &plus_projector()).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        let expected = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!(rho.matrix().max_abs_diff(&expected) < 1e-15);
        assert!((l1_coherence(&rho) - 1.0).abs() < 1e-15);

        let (rho_m, p_m) = post_operation_state_a(&bell().to_density(), &plus_projector()).unwrap();
        assert!((p_m - 0.5).abs() < 1e-15);
        assert!(rho_m.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn identity_operation_leaves_marginal() {
        let psi = hadamard_state(0.7);
        let id = KrausOperation::single(ComplexMatrix::identity(2), "id").unwrap();
        let (rho, p) = post_operation_state_a(&psi, &id).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        assert!(rho.matrix().max_abs_diff(reduced_a(&psi).matrix()) < 1e-15);
    }

    #[test]
    fn zero_probability_is_an_error() {
        let psi = BipartitePureState::product(&[ONE, ZERO], &[ONE, ZERO]).unwrap();
        let kill = KrausOperation::single(ComplexMatrix::real_diagonal(&[0.0, 1.0]), "k").unwrap();
        assert!(matches!(
            post_operation_state_a(&psi, &kill),
            Err(Error::ZeroProbability { .. })
        ));
        assert!(matches!(
            outcome_coherence_bound(&psi, &kill),
            Err(Error::ZeroProbability { .. })
        ));
    }

    #[test]
    fn average_closed_forms() {
        for r in [0.25, 0.5, 0.75] {
            let ch: Channel = phase_damping(r).unwrap().into();
            let avg = average_coherence(&hadamard_state(0.5), &ch).unwrap();
            assert!((avg - r).abs() < 1e-12);
            assert!(average_coherence(&bell(), &ch).unwrap().abs() < 1e-15);
        }
        let ch: Channel = phase_damping(0.5).unwrap().into();
        let psi = hadamard_state(0.9);
        assert!((average_coherence(&psi, &ch).unwrap() - 0.3).abs() < 1e-12);
        assert!((concurrence(&psi) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn report_for_skewed_state() {
        let ch: Channel = phase_damping(0.5).unwrap().into();
        let rep = average_rcc(&hadamard_state(0.9), &ch).unwrap();
        assert_eq!(rep.outcomes.len(), 2);
        assert!((rep.average_rcc - 0.3).abs() < 1e-12);
        assert!((rep.entanglement - 0.6).abs() < 1e-12);
        assert!((rep.maxent_average_rcc.unwrap() - 0.5).abs() < 1e-12);
        assert!((rep.factorization_ratio.unwrap() - 0.6).abs() < 1e-12);
        assert_eq!(rep.factorization_holds, Some(true));
        // d = 2: the maxent bound is E·C̄(φ), attained exactly
        assert!((rep.maxent_bound.unwrap() - 0.3).abs() < 1e-12);
        assert!((rep.tighter_bound - 0.3).abs() < 1e-12);
        let sum_p: f64 = rep.outcomes.iter().map(|o| o.probability).sum();
        assert!((sum_p - 1.0).abs() < 1e-12);
        for (o, b) in rep.outcomes.iter().zip(&rep.outcome_bounds) {
            assert!(o.coherence <= b.unwrap() + 1e-12);
        }
    }

    #[test]
    fn zero_probability_branch_is_flagged() {
        let ch: Channel = phase_damping(0.0).unwrap().into();
        let rep = average_rcc(&hadamard_state(0.5), &ch).unwrap();
        assert!(!rep.outcomes[0].zero_probability);
        assert!(rep.outcomes[1].zero_probability && rep.outcomes[1].state_a.is_none());
        assert_eq!(rep.outcome_bounds[1], None);
        assert_eq!(rep.average_rcc, 0.0);
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.contains("\"lemma1_bounds\""));
        assert!(json.contains("\"theorem3_bound\""));
    }

    #[test]
    fn premise_and_channel_errors() {
        let coherent = BipartitePureState::product(&plus(), &[ONE, ZERO]).unwrap();
        let ch: Channel = phase_damping(0.5).unwrap().into();
        assert!(matches!(average_rcc(&coherent, &ch), Err(Error::PremiseViolated { .. })));
        let half: Channel = plus_projector().into();
        assert!(matches!(
            average_rcc(&bell(), &half),
            Err(Error::NotTracePreserving { .. })
        ));
        let three = BipartitePureState::product(&[ONE, ZERO], &[ONE, ZERO, ZERO]).unwrap();
        assert!(matches!(average_rcc(&three, &ch), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn outcome_bound_equality_for_bell() {
        let b = outcome_coherence_bound(&bell(), &plus_projector()).unwrap();
        assert!((b - 1.0).abs() < 1e-15);
    }

    #[test]
    fn partner_states() {
        let p = maximally_entangled_partner(&bell()).unwrap();
        let ov: C64 = p.amplitudes().iter().zip(bell().amplitudes()).map(|(a, b)| a.conj() * b).sum();
        assert!((ov.norm() - 1.0).abs() < 1e-14);

        let p = maximally_entangled_partner(&hadamard_state(0.9)).unwrap();
        assert!(p
            .amplitudes()
            .iter()
            .zip(hadamard_state(0.5).amplitudes())
            .all(|(a, b)| (a - b).norm() < 1e-14));

        let w = [0.5, 0.3, 0.2];
        let betas: Vec<Vec<C64>> = (0..3)
            .map(|i| (0..3).map(|j| if i == j { ONE } else { ZERO }).collect())
            .collect();
        let psi = BipartitePureState::from_schmidt_terms(&w, &betas).unwrap();
        let p = maximally_entangled_partner(&psi).unwrap();
        let s = schmidt_decompose(&p);
        assert!(s.weights.iter().all(|w| (w - 1.0 / 3.0).abs() < 1e-14));
        assert!((concurrence(&p) - (4.0f64 / 3.0).sqrt()).abs() < 1e-14);

        let wide = BipartitePureState::product(&[ONE, ZERO, ZERO], &[ONE, ZERO]).unwrap();
        assert!(maximally_entangled_partner(&wide).is_err());
    }

    #[test]
    fn partner_of_product_state_is_completed() {
        let prod = BipartitePureState::product(&[ONE, ZERO], &plus()).unwrap();
        let p = maximally_entangled_partner(&prod).unwrap();
        // |β_0⟩ = |+⟩ completed by |−⟩ up to phase
        let s = schmidt_decompose(&p);
        assert_eq!(s.rank, 2);
        let ov: C64 = s.beta(1).iter().zip(minus()).map(|(a, b)| a.conj() * b).sum();
        assert!((ov.norm() - 1.0).abs() < 1e-14);
        let ch: Channel = phase_damping(0.4).unwrap().into();
        assert_eq!(maxent_average_bound(&prod, &ch).unwrap(), 0.0);
        assert!(average_coherence(&prod, &ch).unwrap().abs() < 1e-15);
    }

    #[test]
    fn factorization_examples() {
        let ch: Channel = phase_damping(0.5).unwrap().into();
        let f = factorization_check(&hadamard_state(0.9), &ch).unwrap();
        assert!((f.ratio.unwrap() - 0.6).abs() < 1e-12 && f.holds);

        let prod = BipartitePureState::product(&[ONE, ZERO], &plus()).unwrap();
        let f = factorization_check(&prod, &ch).unwrap();
        assert!(f.holds && f.average.abs() < 1e-15);

        let big = BipartitePureState::product(&[ONE, ZERO, ZERO], &[ONE, ZERO, ZERO]).unwrap();
        let id3: Channel = KrausOperation::single(ComplexMatrix::identity(3), "id").unwrap().into();
        assert!(matches!(factorization_check(&big, &id3), Err(Error::WrongDimension { .. })));
    }

    #[test]
    fn tighter_bound_examples() {
        // computational measurement on a Hadamard-β state: each N^k = |k⟩⟨k| has
        // off-diagonal ½ in the β-basis
        let ch: Channel = projective_measurement(&ComplexMatrix::identity(2)).unwrap().into();
        let psi = hadamard_state(0.8);
        // one off-diagonal entry: the Cauchy step is tight
        let avg = average_coherence(&psi, &ch).unwrap();
        assert!((avg - 0.8).abs() < 1e-12);
        assert!((summed_outcome_bound(&psi, &ch).unwrap() - avg).abs() < 1e-12);
        assert!((maxent_average_bound(&psi, &ch).unwrap() - avg).abs() < 1e-12);

        let inert = crate::channel::inert_operation(&psi, &[1.0, 1.0]).unwrap();
        let inert: Channel = inert.into();
        assert!(summed_outcome_bound(&psi, &inert).unwrap() < 1e-15);
    }

    #[test]
    fn bell_with_hadamard_measurement() {
        let ch: Channel = projective_measurement(&hadamard_basis()).unwrap().into();
        let rep = average_rcc(&bell(), &ch).unwrap();
        assert!((rep.average_rcc - 1.0).abs() < 1e-14);
        for o in &rep.outcomes {
            assert!((o.probability - 0.5).abs() < 1e-14 && (o.coherence - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn search_finds_projector_for_bell() {
        let found = find_creating_operation(&bell().to_density()).unwrap().unwrap();
        assert!((found.coherence - 1.0).abs() < 1e-12);
    }

    #[test]
    fn search_on_incoherent_quantum_state() {
        let p0 = ComplexMatrix::real_diagonal(&[1.0, 0.0]);
        let p1 = ComplexMatrix::real_diagonal(&[0.0, 1.0]);
        let plus_p = ComplexMatrix::outer(&plus(), &plus());
        let iq = &tensor_product(&p0, &plus_p).unwrap().scale_real(0.5)
            + &tensor_product(&p1, &p0).unwrap().scale_real(0.5);
        let rho = BipartiteDensity::new(validate_density(&iq).unwrap(), 2, 2).unwrap();
        assert!(find_creating_operation(&rho).unwrap().is_none());
    }

    #[test]
    fn search_on_separable_correlated_state() {
        let p0 = ComplexMatrix::real_diagonal(&[1.0, 0.0]);
        let p1 = ComplexMatrix::real_diagonal(&[0.0, 1.0]);
        let sep = &tensor_product(&ComplexMatrix::outer(&plus(), &plus()), &p0)
            .unwrap()
            .scale_real(0.5)
            + &tensor_product(&ComplexMatrix::outer(&minus(), &minus()), &p1)
                .unwrap()
                .scale_real(0.5);
        let rho = BipartiteDensity::new(validate_density(&sep).unwrap(), 2, 2).unwrap();
        let found = find_creating_operation(&rho).unwrap().unwrap();
        assert!(found.coherence > CREATION_THRESHOLD);
        let (post, _) = post_operation_state_a(&rho, &found.operation).unwrap();
        assert!((l1_coherence(&post) - found.coherence).abs() < 1e-12);
    }
}
