//! Exact dense statevector simulation.
//!
//! Basis indices are little-endian: qubit 0 is the least significant bit.
//! Registers occupy contiguous qubit ranges in declaration order, so the
//! first declared register holds the lowest qubits.

mod circuit;
mod gate;
mod layout;
mod ledger;
mod state;

pub use circuit::{Circuit, StageMark};
pub use gate::{
    elementary_cost, gate2_adjoint, gate2_to_matrix, hadamard, pauli_x, phase, qft_cost, ry,
    BlockCost, Gate2, GateKind, GateOp,
};
pub use layout::{Register, RegisterLayout};
pub use ledger::GateCountLedger;
pub use state::{full_unitary, qft_decomposition, Histogram, QftStep, Sampler, StateVector};
