use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Tolerance for validity checks (Hermiticity, unitarity, trace).
pub const VALIDITY_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 10_000;

/// Which factor of a bipartite space to keep when tracing out the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Kronecker product `a ⊗ b`; block `(i, k)` of the result is `a[i,k]·b`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows().checked_mul(b.rows());
    let cols = a.cols().checked_mul(b.cols());
    let (rows, cols) = match (rows, cols) {
        (Some(r), Some(c)) if r.checked_mul(c).is_some() => (r, c),
        _ => {
            return Err(Error::DimensionOverflow {
                rows: a.rows().saturating_mul(b.rows()),
                cols: a.cols().saturating_mul(b.cols()),
            })
        }
    };
    let (br, bc) = (b.rows(), b.cols());
    Ok(ComplexMatrix::from_fn(rows, cols, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    }))
}

/// Vector Kronecker product `|a⟩ ⊗ |b⟩`.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| x * y))
        .collect()
}

/// Reduced operator on `keep` of an operator on `H_A ⊗ H_B`.
pub fn partial_trace(
    m: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    let side = dim_a
        .checked_mul(dim_b)
        .ok_or(Error::DimensionOverflow {
            rows: dim_a,
            cols: dim_b,
        })?;
    if !m.is_square() || m.rows() != side || side == 0 {
        return Err(Error::DimensionMismatch(format!(
            "partial trace over {dim_a}x{dim_b} needs a {side}x{side} operator, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(dim_a, dim_a, |i, k| {
            (0..dim_b).map(|j| m[(i * dim_b + j, k * dim_b + j)]).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(dim_b, dim_b, |j, l| {
            (0..dim_a).map(|i| m[(i * dim_b + j, i * dim_b + l)]).sum()
        }),
    })
}

/// `[a, b] = ab - ba`
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "commutator needs equal square operands, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(&(a * b) - &(b * a))
}

/// Index of the largest-modulus entry; near-ties go to the lowest index.
fn pivot_index(v: &[C64]) -> usize {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let slack = 1e-12 * max.max(1.0);
    v.iter().position(|z| z.norm() >= max - slack).unwrap_or(0)
}

/// Unit phase `e^{iθ}` of the pivot entry, so that `v·e^{-iθ}` has a real positive pivot.
pub(crate) fn pivot_phase(v: &[C64]) -> C64 {
    let z = v[pivot_index(v)];
    if z.norm() == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        z / z.norm()
    }
}

/// Thin singular value decomposition `m = u·diag(s)·v†`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `rows x k` with orthonormal columns.
    pub u: ComplexMatrix,
    /// Descending, length `k = min(rows, cols)`.
    pub s: Vec<f64>,
    /// `cols x k` with orthonormal columns.
    pub v: ComplexMatrix,
}

/// Singular values are sorted descending; each left singular vector is
/// rephased so its largest-modulus entry is real positive, and the matching
/// right vector carries the same phase.
pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    let dec = m
        .to_nalgebra()
        .try_svd(true, true, f64::EPSILON, MAX_SWEEPS)
        .ok_or(Error::NonConvergence("singular value decomposition"))?;
    let (u, v_t) = match (dec.u, dec.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::NonConvergence("singular value decomposition")),
    };
    let k = dec.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        dec.singular_values[b]
            .partial_cmp(&dec.singular_values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut u_cols = Vec::with_capacity(k);
    let mut v_cols = Vec::with_capacity(k);
    let mut s = Vec::with_capacity(k);
    for &idx in &order {
        let u_col: Vec<C64> = u.column(idx).iter().copied().collect();
        let v_col: Vec<C64> = v_t.row(idx).iter().map(|z| z.conj()).collect();
        let phase = pivot_phase(&u_col).conj();
        u_cols.push(u_col.into_iter().map(|z| z * phase).collect());
        v_cols.push(v_col.into_iter().map(|z| z * phase).collect());
        s.push(dec.singular_values[idx]);
    }
    Ok(Svd {
        u: ComplexMatrix::from_columns(&u_cols),
        s,
        v: ComplexMatrix::from_columns(&v_cols),
    })
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Descending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`, pivot entry real positive.
    pub vectors: ComplexMatrix,
}

pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    let violation = m.hermiticity_violation();
    if violation > VALIDITY_TOL {
        return Err(Error::NotHermitian { violation });
    }
    let dec = nalgebra::SymmetricEigen::try_new(
        m.hermitian_part().to_nalgebra(),
        f64::EPSILON,
        MAX_SWEEPS,
    )
    .ok_or(Error::NonConvergence("Hermitian eigendecomposition"))?;
    let n = dec.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        dec.eigenvalues[b]
            .partial_cmp(&dec.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut cols = Vec::with_capacity(n);
    for &idx in &order {
        let col: Vec<C64> = dec.eigenvectors.column(idx).iter().copied().collect();
        let phase = pivot_phase(&col).conj();
        cols.push(col.into_iter().map(|z| z * phase).collect());
    }
    Ok(HermitianEig {
        values: order.iter().map(|&i| dec.eigenvalues[i]).collect(),
        vectors: ComplexMatrix::from_columns(&cols),
    })
}

/// `f(m)` for Hermitian `m`, applied through the spectrum.
pub fn hermitian_function(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    let n = m.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lambda) in eig.values.iter().enumerate() {
        let v = eig.vectors.column(k);
        let fl = f(lambda);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += v[i] * v[j].conj() * fl;
            }
        }
    }
    Ok(out)
}

/// Orthonormalizes `seed` columns (assumed orthonormal already) and extends
/// them to a full basis of dimension `dim` by Gram–Schmidt against the
/// computational basis vectors, in index order.
pub fn complete_basis(seed: &[Vec<C64>], dim: usize) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = seed.to_vec();
    for e in 0..dim {
        if basis.len() >= dim {
            break;
        }
        let mut v = vec![ZERO; dim];
        v[e] = C64::new(1.0, 0.0);
        // two passes of classical Gram–Schmidt
        for _ in 0..2 {
            for b in &basis {
                let overlap: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= overlap * bi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            basis.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    basis
}
