//! Separability toolkit for permutationally symmetric quantum states.
//!
//! * [`linalg`]: dense complex matrices, spectra, partial transpose/trace,
//!   realignment, Hilbert-Schmidt sampling.
//! * [`symspace`]: flip operator, symmetric projectors, Dicke-basis states of
//!   `N` qubits and their compressed bipartite maps.
//! * [`criteria`]: expectation-value and correlation matrices, PPT, CCNR and
//!   covariance-matrix criteria, and a report checking that they agree.
//! * [`states`]: Breuer's family, the ancilla embeddings, the tabulated
//!   four- and five-qubit bound entangled states, PPT threshold search.
//! * [`search`]: random hill-climb for states that are PPT on the balanced
//!   cut but NPT elsewhere.
//! * [`extension`]: PPT symmetric extensions via alternating projections.
//! * [`io`] and [`cli`]: the JSON state-file format and command handlers.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod criteria;
pub mod error;
pub mod extension;
pub mod io;
pub mod linalg;
pub mod search;
pub mod states;
pub mod symspace;
pub mod tol;

pub use error::{Error, Result};
pub use linalg::{Basis, ComplexMatrix, DensityMatrix, Spectrum, C64};
pub use symspace::SymmetricState;
