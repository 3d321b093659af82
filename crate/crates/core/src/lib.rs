//! Desk-scale verification and resource accounting for gate-based quantum
//! algorithms.
//!
//! The crate is split along the stages of an end-to-end implementation:
//!
//! * [`sim`] is an exact dense statevector simulator with an always-on gate
//!   count ledger.
//! * [`prep`] synthesizes amplitude-encoding circuits and carries the cost
//!   models of the memory-based preparation schemes.
//! * [`lde`] runs the Taylor-series linear ODE solver (unitary case) and the
//!   diffusion success-probability study.
//! * [`hhl`] runs the three-stage linear-system solver.
//! * [`tomography`] plans readout sample budgets and checks them by Monte
//!   Carlo.
//! * [`complexity`] composes the per-stage costs into overall
//!   gate-complexity reports.
//!
//! Qubit 0 is the least significant bit of a basis index, and logarithms in
//! cost formulas are base 2. States are compared by fidelity `|<a|b>|^2`,
//! never componentwise.

pub mod complexity;
mod error;
pub mod hhl;
pub mod io;
pub mod lde;
pub mod linalg;
pub mod prep;
pub mod sim;
pub mod tomography;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Toolkit version embedded in every emitted report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

// The guide under `book/` is compiled here so its snippets run as doc tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/simulator.md")]
    mod simulator {}
    #[doc = include_str!("../../../book/src/state-prep.md")]
    mod state_prep {}
    #[doc = include_str!("../../../book/src/lde.md")]
    mod lde {}
    #[doc = include_str!("../../../book/src/hhl.md")]
    mod hhl {}
    #[doc = include_str!("../../../book/src/tomography.md")]
    mod tomography {}
    #[doc = include_str!("../../../book/src/complexity.md")]
    mod complexity {}
}
