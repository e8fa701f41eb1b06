//! Dense complex linear algebra: matrices, Kronecker products, partial
//! traces, decompositions and Haar sampling.

mod matrix;
mod ops;
mod random;

pub use matrix::{complex_vec_serde, ComplexMatrix, C64, ONE, ZERO};
pub use ops::{
    commutator, complete_basis, hermitian_eig, hermitian_function, kron_vec, partial_trace, svd,
    tensor_product, HermitianEig, Subsystem, Svd, VALIDITY_TOL,
};
pub use random::{ginibre, haar_random_unitary, random_pure_state, SeededRng};
