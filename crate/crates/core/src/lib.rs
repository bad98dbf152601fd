//! Entropic distinguishability measures and the quantum speed limits built
//! on them, for qubits driven by a Hamiltonian or by depolarizing,
//! phase-damping and generalized amplitude-damping noise.
//!
//! The crate is layered bottom-up: [`linalg`] (small dense complex
//! matrices), [`states`], [`divergences`], [`channels`], [`qsl`], and the
//! config-driven [`scenario`] runner that emits CSV grids.

pub mod channels;
pub mod divergences;
pub mod error;
pub mod linalg;
pub mod qsl;
pub mod quadrature;
pub mod sampling;
pub mod scenario;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, EigenDecomposition, SchattenP, C64};
pub use states::{BlochQubit, DensityMatrix};
