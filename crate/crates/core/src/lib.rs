//! Optimal-precision costs for multiparameter unitary estimation.
//!
//! The crate compares two ways of spending a budget of gates
//! `U_θ = exp(i θ·Λ)`:
//!
//! * the many-repetition (Cramér–Rao, `CR`) paradigm, where `k` trials of
//!   `n` gates each are performed and costs scale as `1/(k n²)`;
//! * the single-shot minimax (`MM`) paradigm, where all `N` gates are spent in
//!   one experiment and costs scale as `1/N²`.
//!
//! For each paradigm it evaluates three strategies: estimating every
//! parameter separately (`SEP`), separately after an optimal linear
//! reparametrization (`SEP+`), and jointly (`JNT`).
//!
//! Module map:
//!
//! * [`operators`]: generator algebra, spectral spreads, parameter-space searches
//! * [`states`]: probe-state families and exact unitary evolution
//! * [`qfi`]: quantum Fisher information for pure states
//! * [`bounds`]: cost bounds, resource allocation, reparametrization search
//! * [`variational`]: the joint minimax problem on the cross-polytope
//! * [`catalog`]: the reference model registry and figure data

pub mod bounds;
pub mod catalog;
mod error;
pub mod operators;
pub mod qfi;
pub(crate) mod search;
pub mod states;
pub mod variational;

pub use error::{Error, Result};

/// Complex scalar used for amplitudes and operator entries.
pub type Complex = num_complex::Complex64;
