//! Numerical model of a Cooper pair box built on the reduced BCS Hamiltonian.
//!
//! The island is a register of `K` spin-1/2 pseudo-spins (one per electron
//! level near the Fermi energy). On top of the exact `2^K` operators the crate
//! provides the effective multi-level qubit picture, the collective versus
//! individual tunneling split, the dissipative Bloch equations with
//! probability leakage, and a brute-force oracle that checks each closed form
//! against exact diagonalisation.
//!
//! Module map:
//!
//! * [`linalg`] dense complex matrices, Hermitian eigensolver, `expm`.
//! * [`spin`] spin-j matrices, site and collective spin operators, SU(2)
//!   multiplicities and `(j, m)` labelling of eigenvectors.
//! * [`model`] physical parameters, BCS/island/tunneling/collective
//!   Hamiltonians, effective level energies, Josephson energies.
//! * [`qubit`] the effective arrowhead Hamiltonian, `|±⟩` frame, qubit
//!   observables, charge and current operators.
//! * [`bloch`] Bloch equations with leakage: RHS, RK4, closed form.
//! * [`oracle`] exact-diagonalisation verification reports.

pub mod bloch;
pub mod error;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod qubit;
pub mod spin;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
