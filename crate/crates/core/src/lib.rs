//! Free-fermion stability lab.
//!
//! Quadratic Majorana Hamiltonians on periodic lattices, Gaussian states held
//! as correlation matrices, and the sweeps that measure how far observables
//! move when every Hamiltonian coefficient is off by at most `δ`.
//!
//! Conventions used throughout:
//!
//! * Majoranas satisfy `{c_i, c_j} = 2δ_ij` and `a = (c¹ + i c²)/2`.
//! * A coupling matrix `H̃ = iA` (`A` real antisymmetric) stands for the
//!   many-body operator `Ĥ = ¼ Σ_jk H̃_jk c_j c_k`, so the eigenvalues of `H̃`
//!   are the single-particle excitation energies.
//! * The correlation matrix is `Γ_jk = ½⟨[c_j, c_k]⟩ = iG` with `G` real
//!   antisymmetric. Ground state: `Γ = sign(H̃)`. Gibbs state at inverse
//!   temperature `β`: `Γ = tanh(βH̃/2)`. Dynamics: `Γ(t) = R Γ R^T` with
//!   `R = e^{At}`.
//! * A quadratic observable `Ô = ¼ Σ Õ_jk c_j c_k + offset` has
//!   `⟨Ô⟩ = -¼ Tr(Õ Γ) + offset`.
//!
//! Every numerical routine is generic over [`Scalar`] (`f32` or `f64`); the
//! `*F64` aliases below are what the experiment drivers use.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod correlations;
pub mod error;
pub mod experiments;
pub mod fourier;
pub mod hamiltonian;
pub mod lattice;
pub mod linalg;
pub mod observables;
pub mod oracle;
pub mod quadrature;
pub mod scalar;

pub use correlations::CorrelationMatrix;
pub use error::{Error, Result};
pub use fourier::FourierApprox;
pub use hamiltonian::{CouplingMatrix, PerturbationMode, PerturbationSpec};
pub use lattice::LatticeSpec;
pub use observables::QuadraticObservable;
pub use scalar::Scalar;

pub type CouplingMatrixF64 = CouplingMatrix<f64>;
pub type CouplingMatrixF32 = CouplingMatrix<f32>;
pub type CorrelationMatrixF64 = CorrelationMatrix<f64>;
pub type CorrelationMatrixF32 = CorrelationMatrix<f32>;
pub type QuadraticObservableF64 = QuadraticObservable<f64>;
pub type QuadraticObservableF32 = QuadraticObservable<f32>;
pub type FourierApproxF64 = FourierApprox<f64>;
