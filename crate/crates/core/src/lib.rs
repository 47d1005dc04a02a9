//! Discrete-stage simulator of a closed quantum universe of qubits.
//!
//! A stage holds the register's pure state, an append-only information
//! record and the identifier of the rule that picks the next test. Each jump
//! samples a joint eigenspace of the selected test by the Born rule and
//! collapses onto it. Around that loop the crate provides tensor
//! factorization and classicity analysis, factor lattices exported as causal
//! DAGs, scripted cosmological scenarios, and Jordan-Wigner ladder operators.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`, which is what the tolerances in the
//! tests and the command-line tool assume.

pub mod cosmo;
pub mod error;
pub mod factorize;
pub mod jw;
pub mod linalg;
pub mod qstate;
pub mod random;
pub mod scalar;
pub mod stages;

pub use error::{Error, Result};
pub use qstate::{
    entanglement_entropy, inner_product, mutual_information, partial_trace, purity, tensor_product,
    DensityMatrix, HermitianOperator, QubitSet, StateVector,
};
pub use scalar::Real;
pub use stages::{Rule, Stage, TestSpec};

/// Largest supported register.
pub const MAX_QUBITS: usize = 20;

pub type C64 = num_complex::Complex<f64>;
pub type StateVector64 = StateVector<f64>;
pub type StateVector32 = StateVector<f32>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type HermitianOperator64 = HermitianOperator<f64>;
pub type Stage64 = Stage<f64>;
pub type TestSpec64 = TestSpec<f64>;
pub type FactorPartition64 = factorize::FactorPartition<f64>;
