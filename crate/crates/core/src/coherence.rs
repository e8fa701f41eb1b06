//! l1-norm coherence in the computational basis and the block test for
//! incoherent-quantum states.

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::state::DensityMatrix;

/// Default classification tolerance on entry moduli.
pub const CLASSIFY_TOL: f64 = 1e-9;

/// `C_{l1}(ρ) = Σ_{i≠j} |ρ_ij|`.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    l1_off_diagonal(rho.matrix())
}

/// Off-diagonal l1 mass of any square matrix.
pub fn l1_off_diagonal(m: &ComplexMatrix) -> f64 {
    let mut sum = 0.0;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if i != j {
                sum += m[(i, j)].norm();
            }
        }
    }
    sum
}

pub fn max_off_diagonal(m: &ComplexMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if i != j {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

/// True iff every off-diagonal modulus is below `tol`.
pub fn is_incoherent(rho: &DensityMatrix, tol: f64) -> bool {
    max_off_diagonal(rho.matrix()) < tol
}

/// Largest entry modulus over the off-diagonal A-blocks
/// `(⟨i|⊗I) ρ (|k⟩⊗I)`, `i ≠ k`.
pub fn max_off_block(rho_ab: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<f64> {
    if !rho_ab.is_square() || dim_a.checked_mul(dim_b) != Some(rho_ab.rows()) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator does not live on a {dim_a}x{dim_b} system",
            rho_ab.rows(),
            rho_ab.cols()
        )));
    }
    let mut worst = 0.0f64;
    for i in 0..dim_a {
        for k in 0..dim_a {
            if i == k {
                continue;
            }
            for j in 0..dim_b {
                for l in 0..dim_b {
                    worst = worst.max(rho_ab[(i * dim_b + j, k * dim_b + l)].norm());
                }
            }
        }
    }
    Ok(worst)
}

/// True iff `ρ^{AB}` is block diagonal in A's computational basis, i.e. of
/// the form `Σ_i p_i |i⟩⟨i| ⊗ ρ_i`.
pub fn is_incoherent_quantum(
    rho_ab: &DensityMatrix,
    dim_a: usize,
    dim_b: usize,
    tol: f64,
) -> Result<bool> {
    Ok(max_off_block(rho_ab.matrix(), dim_a, dim_b)? < tol)
}
