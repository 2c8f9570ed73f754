//! Pauli strings, weighted sums of them, and their text form.

mod string;
mod sum;
pub mod text;

pub use string::{Letter, PauliString, Phase, MAX_QUBITS};
pub use sum::{PauliSum, DEFAULT_DENSE_CAP, PRUNE_TOL};
pub use text::{Monomial, Params, SymbolicSum, SymbolicTerm};
