//! Bipartite pure and mixed states, Schmidt decomposition and concurrence.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    complex_vec_serde, hermitian_eig, partial_trace, svd, ComplexMatrix, Subsystem, C64,
    VALIDITY_TOL, ZERO,
};

/// Schmidt weights at or below this are dropped.
pub const SCHMIDT_WEIGHT_CUTOFF: f64 = 1e-12;

/// Pure state `Σ w_ij |i⟩|j⟩` on `H_A ⊗ H_B`, amplitudes indexed `i·dim_b + j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BipartitePureState {
    dim_a: usize,
    dim_b: usize,
    #[serde(with = "complex_vec_serde")]
    amplitudes: Vec<C64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PureStateFile {
    dim_a: usize,
    dim_b: usize,
    #[serde(with = "complex_vec_serde")]
    amplitudes: Vec<C64>,
}

impl<'de> Deserialize<'de> for BipartitePureState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = PureStateFile::deserialize(d)?;
        BipartitePureState::new(f.dim_a, f.dim_b, f.amplitudes).map_err(D::Error::custom)
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl BipartitePureState {
    /// Accepts amplitudes whose norm is 1 within `1e-9`.
    pub fn new(dim_a: usize, dim_b: usize, amplitudes: Vec<C64>) -> Result<Self> {
        Self::check_shape(dim_a, dim_b, &amplitudes)?;
        let n = norm(&amplitudes);
        if (n - 1.0).abs() > VALIDITY_TOL {
            return Err(Error::NotNormalized { norm: n });
        }
        Ok(Self {
            dim_a,
            dim_b,
            amplitudes,
        })
    }

    /// Rescales any nonzero vector to unit norm.
    pub fn normalized(dim_a: usize, dim_b: usize, amplitudes: Vec<C64>) -> Result<Self> {
        Self::check_shape(dim_a, dim_b, &amplitudes)?;
        let n = norm(&amplitudes);
        if n == 0.0 {
            return Err(Error::NotNormalized { norm: 0.0 });
        }
        Ok(Self {
            dim_a,
            dim_b,
            amplitudes: amplitudes.into_iter().map(|z| z / n).collect(),
        })
    }

    fn check_shape(dim_a: usize, dim_b: usize, amplitudes: &[C64]) -> Result<()> {
        if dim_a == 0 || dim_b == 0 || dim_a.checked_mul(dim_b) != Some(amplitudes.len()) {
            return Err(Error::DimensionMismatch(format!(
                "{dim_a}x{dim_b} state needs {} amplitudes, got {}",
                dim_a.saturating_mul(dim_b),
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NotNormalized { norm: f64::NAN });
        }
        Ok(())
    }

    /// `Σ_i √ω_i |i⟩|β_i⟩` with the A side in the computational basis.
    /// `weights` and `betas` must have length `dim_a`; each `β_i` is normalized here.
    pub fn from_schmidt_terms(weights: &[f64], betas: &[Vec<C64>]) -> Result<Self> {
        let dim_a = weights.len();
        let dim_b = betas.first().map_or(0, |b| b.len());
        if betas.len() != dim_a || betas.iter().any(|b| b.len() != dim_b) {
            return Err(Error::DimensionMismatch(
                "one B-vector of common length per Schmidt weight".into(),
            ));
        }
        let mut amps = Vec::with_capacity(dim_a * dim_b);
        for (w, beta) in weights.iter().zip(betas) {
            let n = norm(beta);
            let s = if n > 0.0 { w.max(0.0).sqrt() / n } else { 0.0 };
            amps.extend(beta.iter().map(|z| z * s));
        }
        Self::new(dim_a, dim_b, amps)
    }

    /// Product state `|a⟩ ⊗ |b⟩`.
    pub fn product(a: &[C64], b: &[C64]) -> Result<Self> {
        Self::normalized(a.len(), b.len(), crate::linalg::kron_vec(a, b))
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `(⟨i| ⊗ I)|ψ⟩`, unnormalized.
    pub fn a_slice(&self, i: usize) -> &[C64] {
        &self.amplitudes[i * self.dim_b..(i + 1) * self.dim_b]
    }

    /// Coefficient matrix `W = (w_ij)`, `dim_a x dim_b`.
    pub fn coefficient_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::new(self.dim_a, self.dim_b, self.amplitudes.clone())
            .expect("shape checked at construction")
    }

    pub fn to_density(&self) -> BipartiteDensity {
        BipartiteDensity {
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            rho: DensityMatrix::from_trusted(ComplexMatrix::outer(
                &self.amplitudes,
                &self.amplitudes,
            )),
        }
    }

    /// Applies `U_A ⊗ U_B` to the amplitudes: `W -> U_A W U_Bᵀ`.
    pub fn apply_local(&self, u_a: &ComplexMatrix, u_b: &ComplexMatrix) -> Result<Self> {
        let w = self.coefficient_matrix();
        let out = u_a.try_mul(&w)?.try_mul(&u_b.transpose())?;
        Self::normalized(self.dim_a, self.dim_b, out.entries().to_vec())
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// For operators that are density matrices by construction.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_trusted(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    /// `|v⟩⟨v|` for a vector normalized here.
    pub fn pure(v: &[C64]) -> Result<Self> {
        let n = norm(v);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized { norm: n });
        }
        let v: Vec<C64> = v.iter().map(|z| z / n).collect();
        Ok(Self::from_trusted(ComplexMatrix::outer(&v, &v)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        validate_density(&m).map_err(D::Error::custom)
    }
}

/// Checks Hermiticity, unit trace and positivity, in that order.
///
/// A trace within `1e-9` of one is renormalized to exactly one.
pub fn validate_density(m: &ComplexMatrix) -> Result<DensityMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "density matrix must be square, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let violation = m.hermiticity_violation();
    if violation > VALIDITY_TOL {
        return Err(Error::NotHermitian { violation });
    }
    let trace = m.trace().re;
    if (trace - 1.0).abs() >= VALIDITY_TOL {
        return Err(Error::BadTrace { trace });
    }
    let h = m.hermitian_part().scale_real(1.0 / trace);
    let min_eigenvalue = hermitian_eig(&h)?
        .values
        .last()
        .copied()
        .unwrap_or(0.0);
    if min_eigenvalue < -VALIDITY_TOL {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    Ok(DensityMatrix::from_trusted(h))
}

/// Density operator on `H_A ⊗ H_B`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BipartiteDensity {
    dim_a: usize,
    dim_b: usize,
    rho: DensityMatrix,
}

impl BipartiteDensity {
    pub fn new(rho: DensityMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a.checked_mul(dim_b) != Some(rho.dim()) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} density matrix does not live on a {dim_a}x{dim_b} system",
                rho.dim(),
                rho.dim()
            )));
        }
        Ok(Self { dim_a, dim_b, rho })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.rho.matrix()
    }
}

/// Either kind of bipartite state, borrowed.
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Pure(&'a BipartitePureState),
    Mixed(&'a BipartiteDensity),
}

impl<'a> StateRef<'a> {
    pub fn dims(&self) -> (usize, usize) {
        match self {
            StateRef::Pure(p) => (p.dim_a, p.dim_b),
            StateRef::Mixed(m) => (m.dim_a, m.dim_b),
        }
    }
}

impl<'a> From<&'a BipartitePureState> for StateRef<'a> {
    fn from(p: &'a BipartitePureState) -> Self {
        StateRef::Pure(p)
    }
}

impl<'a> From<&'a BipartiteDensity> for StateRef<'a> {
    fn from(m: &'a BipartiteDensity) -> Self {
        StateRef::Mixed(m)
    }
}

/// `ρ^A = tr_B ρ^{AB}`.
pub fn reduced_a<'a>(state: impl Into<StateRef<'a>>) -> DensityMatrix {
    match state.into() {
        StateRef::Pure(p) => {
            let w = p.coefficient_matrix();
            DensityMatrix::from_trusted(&w * &w.adjoint())
        }
        StateRef::Mixed(m) => DensityMatrix::from_trusted(
            partial_trace(m.matrix(), m.dim_a, m.dim_b, Subsystem::A)
                .expect("dimensions checked at construction"),
        ),
    }
}

/// `|ψ⟩ = Σ_k √ω_k |a_k⟩|β_k⟩` with zero weights dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtForm {
    /// Nonzero Schmidt weights `ω_k`.
    pub weights: Vec<f64>,
    /// `dim_a x rank`; columns `|a_k⟩`.
    pub basis_a: ComplexMatrix,
    /// `dim_b x rank`; columns `|β_k⟩`.
    pub basis_b: ComplexMatrix,
    pub rank: usize,
    /// `a_index[k] = i` when `|a_k⟩ = |i⟩`; empty when the A-basis is not
    /// computational.
    pub a_index: Vec<usize>,
}

impl SchmidtForm {
    /// True when every `|a_k⟩` is a computational basis vector.
    pub fn is_computational_a(&self) -> bool {
        !self.a_index.is_empty()
    }

    pub fn beta(&self, k: usize) -> Vec<C64> {
        self.basis_b.column(k)
    }

    /// `Σ_k √ω_k |a_k⟩ ⊗ |β_k⟩` as an amplitude vector.
    pub fn reconstruct(&self) -> Vec<C64> {
        let (da, db) = (self.basis_a.rows(), self.basis_b.rows());
        let mut out = vec![ZERO; da * db];
        for k in 0..self.rank {
            let s = self.weights[k].sqrt();
            for i in 0..da {
                let a = self.basis_a[(i, k)] * s;
                if a == ZERO {
                    continue;
                }
                for j in 0..db {
                    out[i * db + j] += a * self.basis_b[(j, k)];
                }
            }
        }
        out
    }

    /// `B† N B`, entry `(j, i) = ⟨β_j|N|β_i⟩`.
    pub fn operator_in_beta_basis(&self, n: &ComplexMatrix) -> ComplexMatrix {
        &(&self.basis_b.adjoint() * n) * &self.basis_b
    }
}

/// Largest normalized overlap `|⟨a_i|a_k⟩| / (‖a_i‖‖a_k‖)` between the
/// nonvanishing A-slices of `psi`.
fn max_slice_overlap(psi: &BipartitePureState, keep: &[usize]) -> f64 {
    let mut worst = 0.0f64;
    for (x, &i) in keep.iter().enumerate() {
        for &k in &keep[x + 1..] {
            let a = psi.a_slice(i);
            let b = psi.a_slice(k);
            let ov: C64 = a.iter().zip(b).map(|(p, q)| p * q.conj()).sum();
            worst = worst.max(ov.norm() / (norm(a) * norm(b)));
        }
    }
    worst
}

/// Schmidt decomposition of a pure bipartite state.
///
/// When the A-slices `(⟨i|⊗I)|ψ⟩` are mutually orthogonal (A's marginal is
/// diagonal) the decomposition is read off directly: `ω_i = ‖(⟨i|⊗I)|ψ⟩‖²`,
/// `|β_i⟩ = (⟨i|⊗I)|ψ⟩/√ω_i`, and `|a_k⟩` are computational vectors in index
/// order. Otherwise it comes from the SVD `W = U D V†`, sorted by weight.
pub fn schmidt_decompose(psi: &BipartitePureState) -> SchmidtForm {
    let (da, db) = (psi.dim_a, psi.dim_b);
    let slice_weights: Vec<f64> = (0..da).map(|i| norm(psi.a_slice(i)).powi(2)).collect();
    let keep: Vec<usize> = (0..da)
        .filter(|&i| slice_weights[i] > SCHMIDT_WEIGHT_CUTOFF)
        .collect();

    if max_slice_overlap(psi, &keep) <= VALIDITY_TOL {
        let rank = keep.len();
        let basis_a = ComplexMatrix::from_fn(da, rank, |r, k| {
            if r == keep[k] {
                C64::new(1.0, 0.0)
            } else {
                ZERO
            }
        });
        let basis_b = ComplexMatrix::from_fn(db, rank, |j, k| {
            psi.a_slice(keep[k])[j] / slice_weights[keep[k]].sqrt()
        });
        return SchmidtForm {
            weights: keep.iter().map(|&i| slice_weights[i]).collect(),
            basis_a,
            basis_b,
            rank,
            a_index: keep,
        };
    }

    let dec = svd(&psi.coefficient_matrix()).expect("SVD of a small finite matrix");
    let kept: Vec<usize> = (0..dec.s.len())
        .filter(|&k| dec.s[k] * dec.s[k] > SCHMIDT_WEIGHT_CUTOFF)
        .collect();
    let rank = kept.len();
    SchmidtForm {
        weights: kept.iter().map(|&k| dec.s[k] * dec.s[k]).collect(),
        basis_a: ComplexMatrix::from_fn(da, rank, |i, k| dec.u[(i, kept[k])]),
        basis_b: ComplexMatrix::from_fn(db, rank, |j, k| dec.v[(j, kept[k])].conj()),
        rank,
        a_index: Vec::new(),
    }
}

/// Pure-state concurrence `√(2 Σ_{i≠j} ω_i ω_j)` from the Schmidt weights.
pub fn concurrence(psi: &BipartitePureState) -> f64 {
    concurrence_from_weights(&schmidt_decompose(psi).weights)
}

pub fn concurrence_from_weights(weights: &[f64]) -> f64 {
    let mut cross = 0.0;
    for (i, wi) in weights.iter().enumerate() {
        for wj in &weights[i + 1..] {
            cross += wi * wj;
        }
    }
    (4.0 * cross).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
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

    fn skewed() -> BipartitePureState {
        BipartitePureState::from_schmidt_terms(&[0.9, 0.1], &[plus(), minus()]).unwrap()
    }

    #[test]
    fn rejects_bad_states() {
        assert!(matches!(
            BipartitePureState::new(2, 2, vec![ONE; 3]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            BipartitePureState::new(2, 2, vec![ONE; 4]),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn schmidt_of_bell() {
        let s = schmidt_decompose(&bell());
        assert_eq!(s.rank, 2);
        assert!((s.weights[0] - 0.5).abs() < 1e-15 && (s.weights[1] - 0.5).abs() < 1e-15);
        assert!(s.basis_b.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        assert_eq!(s.a_index, vec![0, 1]);
    }

    #[test]
    fn schmidt_of_product() {
        let psi = BipartitePureState::product(&[ONE, ZERO], &plus()).unwrap();
        let s = schmidt_decompose(&psi);
        assert_eq!(s.rank, 1);
        assert!((s.weights[0] - 1.0).abs() < 1e-15);
        assert_eq!(concurrence(&psi), 0.0);
    }

    #[test]
    fn schmidt_of_skewed_state() {
        let s = schmidt_decompose(&skewed());
        assert!((s.weights[0] - 0.9).abs() < 1e-15 && (s.weights[1] - 0.1).abs() < 1e-15);
        let b0 = s.beta(0);
        let b1 = s.beta(1);
        for j in 0..2 {
            assert!((b0[j] - plus()[j]).norm() < 1e-15);
            assert!((b1[j] - minus()[j]).norm() < 1e-15);
        }
    }

    #[test]
    fn schmidt_of_coherent_marginal_uses_svd() {
        // |+⟩|0⟩: A-slices are parallel, so the SVD path is taken
        let psi = BipartitePureState::product(&plus(), &[ONE, ZERO]).unwrap();
        let s = schmidt_decompose(&psi);
        assert!(!s.is_computational_a());
        assert_eq!(s.rank, 1);
        let rec = s.reconstruct();
        let ov: C64 = rec.iter().zip(psi.amplitudes()).map(|(a, b)| a.conj() * b).sum();
        assert!((ov.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn concurrence_values() {
        assert!((concurrence(&bell()) - 1.0).abs() < 1e-15);
        assert!((concurrence(&skewed()) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn marginals() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(reduced_a(&bell()).matrix().max_abs_diff(&half) < 1e-15);
        let prod = BipartitePureState::product(&[ONE, ZERO], &plus()).unwrap();
        assert!(
            reduced_a(&prod)
                .matrix()
                .max_abs_diff(&ComplexMatrix::real_diagonal(&[1.0, 0.0]))
                < 1e-15
        );
        assert!(
            reduced_a(&skewed())
                .matrix()
                .max_abs_diff(&ComplexMatrix::real_diagonal(&[0.9, 0.1]))
                < 1e-15
        );
        let mixed = bell().to_density();
        assert!(reduced_a(&mixed).matrix().max_abs_diff(&half) < 1e-15);
    }

    #[test]
    fn density_validation() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(validate_density(&half).is_ok());

        let e = validate_density(&ComplexMatrix::real_diagonal(&[1.5, -0.5])).unwrap_err();
        assert!(matches!(e, Error::NotPositive { min_eigenvalue } if (min_eigenvalue + 0.5).abs() < 1e-12));

        let m = ComplexMatrix::from_real_rows(&[&[0.5, 0.6], &[0.6, 0.5]]);
        let e = validate_density(&m).unwrap_err();
        assert!(matches!(e, Error::NotPositive { min_eigenvalue } if (min_eigenvalue + 0.1).abs() < 1e-12));

        let e = validate_density(&ComplexMatrix::real_diagonal(&[0.5, 0.4])).unwrap_err();
        assert!(matches!(e, Error::BadTrace { .. }));

        let m = ComplexMatrix::from_real_rows(&[&[0.5, 0.1], &[0.0, 0.5]]);
        assert!(matches!(validate_density(&m), Err(Error::NotHermitian { .. })));

        // tiny trace drift is renormalized away
        let m = ComplexMatrix::real_diagonal(&[0.5 + 2e-10, 0.5]);
        let d = validate_density(&m).unwrap();
        assert!((d.matrix().trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn state_file_round_trip() {
        let s = serde_json::to_string(&skewed()).unwrap();
        let back: BipartitePureState = serde_json::from_str(&s).unwrap();
        assert_eq!(back, skewed());
        let bad = r#"{"dim_a":2,"dim_b":2,"amplitudes":[[1,0],[1,0],[0,0],[0,0]]}"#;
        assert!(serde_json::from_str::<BipartitePureState>(bad).is_err());
    }
}
