//! Exact spin-boson dynamics on truncated Fock spaces.
//!
//! The Hamiltonian `(βσ_z + ασ_x)⊗I + I⊗Σ_k ω_k a_k†a_k + σ_z⊗Σ_k(g_k* a_k + g_k a_k†)`
//! is written as a 2×2 block operator matrix `[[H₊, α], [α, H₋]]`. For `β = 0`
//! the bosonic parity `P = (−1)^{Σ n_k}` solves the associated Riccati equation
//! `αX² + XH₊ − H₋X − α = 0` exactly, which block-diagonalizes the Hamiltonian
//! and gives a closed-form propagator. A brute-force eigendecomposition of the
//! full Hamiltonian serves as an independent oracle for every result.
//!
//! Modules:
//! - [`fock`]: ladder, number, displacement, parity and phase operators
//! - [`model`]: Hamiltonian assembly, Riccati residuals, similarity transform
//! - [`propagator`]: closed-form and oracle propagators, dressed spectra
//! - [`dynamics`]: bath states, reduced qubit dynamics, truncation convergence

pub mod dynamics;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod model;
pub mod propagator;
pub mod sampling;

pub use dynamics::{
    BathKind, BathState, ConvergenceReport, EvolutionResult, Observables, QubitState,
};
pub use error::{Error, Result};
pub use fock::{BosonOperator, FockSpace};
pub use linalg::{CMatrix, CVector, Norm, C64};
pub use model::{BlockHamiltonian, Mode, ModelParams, TotalOperator};
pub use propagator::{DressedSpectrum, Method, Propagator, Solver, TotalState};
