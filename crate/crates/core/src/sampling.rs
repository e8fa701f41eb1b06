//! Random states and operations for property sweeps.

use crate::channel::{ChannelEnsemble, KrausOperation};
use crate::linalg::{
    ginibre, haar_random_unitary, hermitian_eig, hermitian_function, random_pure_state,
    tensor_product, ComplexMatrix, SeededRng,
};
use crate::state::{validate_density, BipartiteDensity, BipartitePureState, DensityMatrix};

/// Uniform point on the probability simplex of dimension `k`.
pub fn random_weights(k: usize, rng: &mut SeededRng) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| -(1.0 - rng.uniform()).ln()).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|x| x / total).collect()
}

/// Haar-random pure state on `dim_a x dim_b`.
pub fn random_bipartite_state(dim_a: usize, dim_b: usize, rng: &mut SeededRng) -> BipartitePureState {
    BipartitePureState::normalized(dim_a, dim_b, random_pure_state(dim_a * dim_b, rng))
        .expect("nonzero Gaussian vector")
}

/// `Σ_i √ω_i |i⟩|β_i⟩` with simplex-uniform weights and `β` the first `dim_a`
/// columns of a Haar unitary, so A's marginal is diagonal. Needs `dim_a ≤ dim_b`.
pub fn random_zero_coherence_state(
    dim_a: usize,
    dim_b: usize,
    rng: &mut SeededRng,
) -> BipartitePureState {
    assert!(dim_a <= dim_b, "need dim_a <= dim_b for orthogonal Schmidt vectors");
    let w = random_weights(dim_a, rng);
    let u = haar_random_unitary(dim_b, rng);
    let betas: Vec<_> = (0..dim_a).map(|k| u.column(k)).collect();
    BipartitePureState::from_schmidt_terms(&w, &betas).expect("valid Schmidt terms")
}

/// Hilbert–Schmidt random density matrix `GG†/tr(GG†)`.
pub fn random_density(d: usize, rng: &mut SeededRng) -> DensityMatrix {
    let g = ginibre(d, d, rng);
    let m = &g * &g.adjoint();
    let t = m.trace().re;
    validate_density(&m.scale_real(1.0 / t)).expect("GG† is a valid state")
}

/// Random mixed state on `dim_a x dim_b` (almost surely not incoherent-quantum).
pub fn random_bipartite_density(dim_a: usize, dim_b: usize, rng: &mut SeededRng) -> BipartiteDensity {
    BipartiteDensity::new(random_density(dim_a * dim_b, rng), dim_a, dim_b).expect("matching dims")
}

/// `Σ_i p_i |i⟩⟨i| ⊗ ρ_i` with random `p` and random `ρ_i`.
pub fn random_incoherent_quantum(dim_a: usize, dim_b: usize, rng: &mut SeededRng) -> BipartiteDensity {
    let p = random_weights(dim_a, rng);
    let d = dim_a * dim_b;
    let mut total = ComplexMatrix::zeros(d, d);
    for (i, &pi) in p.iter().enumerate() {
        let mut proj = ComplexMatrix::zeros(dim_a, dim_a);
        proj[(i, i)] = crate::linalg::ONE;
        let rho_i = random_density(dim_b, rng);
        let term = tensor_product(&proj, rho_i.matrix()).expect("small dims");
        total = &total + &term.scale_real(pi);
    }
    BipartiteDensity::new(validate_density(&total).expect("convex mixture"), dim_a, dim_b)
        .expect("matching dims")
}

fn kraus_count(rng: &mut SeededRng) -> usize {
    rng.range(1, 4)
}

/// One to three Ginibre Kraus operators rescaled so the top eigenvalue of
/// `N` is exactly one.
pub fn random_kraus_operation(dim_b: usize, rng: &mut SeededRng) -> KrausOperation {
    let m = kraus_count(rng);
    let kraus: Vec<ComplexMatrix> = (0..m).map(|_| ginibre(dim_b, dim_b, rng)).collect();
    let n = kraus
        .iter()
        .fold(ComplexMatrix::zeros(dim_b, dim_b), |acc, f| &acc + &(&f.adjoint() * f));
    let top = hermitian_eig(&n.hermitian_part()).expect("Hermitian").values[0];
    let s = 1.0 / top.sqrt();
    KrausOperation::new(kraus.iter().map(|f| f.scale_real(s)).collect(), "random")
        .expect("N ≤ I by construction")
}

fn tp_kraus(dim_b: usize, m: usize, rng: &mut SeededRng) -> Vec<ComplexMatrix> {
    let kraus: Vec<ComplexMatrix> = (0..m).map(|_| ginibre(dim_b, dim_b, rng)).collect();
    let n = kraus
        .iter()
        .fold(ComplexMatrix::zeros(dim_b, dim_b), |acc, f| &acc + &(&f.adjoint() * f));
    let inv_root = hermitian_function(&n.hermitian_part(), |x| 1.0 / x.sqrt()).expect("Hermitian");
    kraus.iter().map(|f| f * &inv_root).collect()
}

/// One to three Ginibre Kraus operators normalized by `N^{-1/2}` so that
/// `Σ F†F = I`.
pub fn random_tp_channel(dim_b: usize, rng: &mut SeededRng) -> KrausOperation {
    let m = kraus_count(rng);
    KrausOperation::new(tp_kraus(dim_b, m, rng), "random_tp").expect("trace preserving")
}

/// Trace-preserving set of two to four Kraus operators split into one to
/// three non-empty contiguous groups, each group one ensemble member.
pub fn random_ensemble(dim_b: usize, rng: &mut SeededRng) -> ChannelEnsemble {
    let m = rng.range(2, 5);
    let kraus = tp_kraus(dim_b, m, rng);
    let groups = rng.range(1, m.min(3) + 1);
    // choose groups-1 distinct cut points in 1..m
    let mut cuts: Vec<usize> = (1..m).collect();
    for i in 0..cuts.len() {
        let j = rng.range(i, cuts.len());
        cuts.swap(i, j);
    }
    let mut cuts: Vec<usize> = cuts.into_iter().take(groups - 1).collect();
    cuts.sort_unstable();
    let mut bounds = vec![0];
    bounds.extend(cuts);
    bounds.push(m);
    let ops = bounds
        .windows(2)
        .enumerate()
        .map(|(k, w)| {
            KrausOperation::new(kraus[w[0]..w[1]].to_vec(), format!("member[{k}]"))
                .expect("sub-normalized")
        })
        .collect();
    ChannelEnsemble::new(ops).expect("members sum to identity")
}
