#![allow(dead_code)]

use std::sync::Arc;

use hidden_history::qsim::{Gate, OracleFunction, ProgramBuilder, Register, SlicedProgram};
use hidden_history::rng::substream;
use rand::seq::SliceRandom;
use rand::Rng;

/// A random `gates`-gate program on `qubits` qubits, one gate per slice,
/// mixing Hadamards, phase flips, XOR oracles and permutations.
pub fn random_program(qubits: usize, gates: usize, seed: u64) -> SlicedProgram {
    let mut rng = substream(seed, 0);
    let mut b = ProgramBuilder::new(qubits);
    for _ in 0..gates {
        let gate = match rng.random_range(0..6) {
            0..=2 => Gate::h(rng.random_range(0..qubits)),
            3 => {
                let table = (0..4).map(|_| rng.random_range(0..2)).collect();
                let q = rng.random_range(0..qubits - 1);
                Gate::phase_flip(
                    Register::range(q, 2),
                    OracleFunction::from_table("phase", 2, 1, table).unwrap(),
                )
            }
            4 => {
                let mut qs: Vec<usize> = (0..qubits).collect();
                qs.shuffle(&mut rng);
                let table = (0..2).map(|_| rng.random_range(0..2)).collect();
                let f = Arc::new(OracleFunction::from_table("xor", 1, 1, table).unwrap());
                Gate::oracle_xor(Register::new(vec![qs[0]]), Register::new(vec![qs[1]]), f)
            }
            _ => {
                let mut map: Vec<u64> = (0..1 << qubits).collect();
                map.shuffle(&mut rng);
                Gate::permutation(Register::range(0, qubits), map)
            }
        };
        b.slice(vec![gate]);
    }
    b.build().unwrap()
}
