use std::sync::Arc;

use super::{apply_slice, FunctionKind, Gate, OracleFunction, PureState, QueryLedger, Register};
use crate::error::Result;
use crate::scalar::Scalar;

/// Gates of one Grover iteration on `register`: the phase oracle for `f`
/// followed by the diffusion `H^n (2|0><0| - I) H^n`. The reflection is
/// realised as a phase flip on every nonzero value so that the marked
/// amplitude grows with a positive sign.
pub fn grover_iteration_gates(register: &Register, f: &Arc<OracleFunction>) -> Vec<Gate> {
    let not_zero = OracleFunction {
        name: "nonzero".into(),
        input_bits: register.width(),
        output_bits: 1,
        counts_as_query: false,
        function: FunctionKind::NotEquals { value: 0 },
    };
    let mut gates = vec![Gate::phase_flip(register.clone(), f.clone())];
    gates.extend(Gate::hadamards(register));
    gates.push(Gate::phase_flip(register.clone(), not_zero));
    gates.extend(Gate::hadamards(register));
    gates
}

/// One Grover iteration applied as a single slice.
pub fn grover_iterate<T: Scalar>(
    state: &PureState<T>,
    register: &Register,
    f: &Arc<OracleFunction>,
    ledger: &mut QueryLedger,
) -> Result<PureState<T>> {
    apply_slice(state, &grover_iteration_gates(register, f), ledger)
}

/// Marked amplitude `sin((2q+1) asin(2^{-n/2}))` after `q` iterations from
/// the uniform state on `n` qubits with one marked item.
pub fn marked_amplitude(n: usize, iterations: usize) -> f64 {
    let theta = (2f64.powf(-(n as f64) / 2.0)).asin();
    ((2 * iterations + 1) as f64 * theta).sin()
}
