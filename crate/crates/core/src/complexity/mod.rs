//! Symbolic gate-complexity terms and the preparation × processing ×
//! readout composer.
//!
//! All terms use unit constants and base-2 logarithms; they describe orders
//! of growth, not calibrated gate counts.

mod crosscheck;
mod report;
mod term;

pub use crosscheck::{crosscheck_measured, RatioRow, RatioTable};
pub use report::{
    compose, hhl_algo_term, lde_algo_term, render_table, table_prep_term, ComplexityReport,
    Estimate, ORDER_ONLY_CAVEAT,
};
pub use term::{ComplexityTerm, Factor, Monomial, Params};
