//! Exact state-vector simulation of sliced circuits.

mod dense;
mod gate;
mod grover;
mod oracle;
mod program;
mod register;
mod state;

pub use dense::{slice_unitary, DenseMatrix, DEFAULT_DENSE_CAP};
pub use gate::Gate;
pub use grover::{grover_iterate, grover_iteration_gates, marked_amplitude};
pub use oracle::{FunctionKind, OracleFunction};
pub use program::{apply_slice, Checkpoint, ProgramBuilder, QueryLedger, SlicedProgram};
pub use register::Register;
pub use state::{born_distribution, norm_tolerance, BasisIndex, PureState, MAX_STATE_QUBITS};

/// Applies one gate, returning the new state.
pub fn apply_gate<T: crate::Scalar>(
    state: &PureState<T>,
    gate: &Gate,
) -> crate::Result<PureState<T>> {
    state.apply_gate(gate)
}
