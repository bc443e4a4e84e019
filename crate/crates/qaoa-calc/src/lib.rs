//! Analytical and numerical toolkit for quantum alternating operator ansatz (QAOA) circuits.
//!
//! The crate covers Pauli-sum algebra, classical cost-difference calculus,
//! diagonal cost Hamiltonians, gradient superoperator words, small-angle
//! series, exact lightcone evaluation, closed-form level-one formulas,
//! classical samplers, and a dense statevector oracle used for validation.
//!
//! Conventions: qubit and variable indices are 0-based in the API and 1-based
//! in rendered text. Bit `j` of a `u64` basis index is variable `j + 1`.
//! Phase and mixing unitaries are `e^{-i gamma C}` and `e^{-i beta B}`.

pub mod cost;
pub mod dense;
pub mod emulate;
pub mod error;
pub mod exact;
pub mod grad;
pub mod hamop;
pub mod oracle;
pub mod pauli;
pub mod series;

pub use error::{Error, Result};
pub use pauli::{PauliSum, PauliTerm, C64};
