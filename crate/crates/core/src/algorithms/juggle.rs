//! The juggle subroutine: given `(|a> + |b>)/sqrt 2` on an `l`-qubit
//! register, Hadamards on `l - 1` qubits, then on the remaining qubit `i`,
//! then on all `l` qubits compose to the identity, yet an indifferent hidden
//! variable forgets which of `a`, `b` it sat on whenever `a_i != b_i`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::history::History;
use crate::qsim::{FunctionKind, Gate, OracleFunction, ProgramBuilder, Register, SlicedProgram};
use crate::rng::substream;

/// `2 l^2`, the attempt count that drives the miss probability below `e^-l`.
pub fn default_attempts(l: usize) -> usize {
    2 * l * l
}

/// Attempts on one register with the excluded qubit of each attempt fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JugglePlan {
    register: Register,
    /// Position within `register` of the qubit left out of `U1`, per attempt.
    choices: Vec<usize>,
}

impl JugglePlan {
    /// Draws `attempts` uniform choices from `rng`.
    pub fn random<R: Rng + ?Sized>(
        register: Register,
        attempts: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let l = register.width();
        if l < 2 {
            return Err(Error::JuggleTooSmall(l));
        }
        let choices = (0..attempts).map(|_| rng.random_range(0..l)).collect();
        Ok(JugglePlan { register, choices })
    }

    pub fn with_choices(register: Register, choices: Vec<usize>) -> Result<Self> {
        let l = register.width();
        if l < 2 {
            return Err(Error::JuggleTooSmall(l));
        }
        if let Some(&c) = choices.iter().find(|&&c| c >= l) {
            return Err(Error::QubitOutOfRange {
                qubit: c,
                qubits: l,
            });
        }
        Ok(JugglePlan { register, choices })
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn attempts(&self) -> usize {
        self.choices.len()
    }

    pub fn choices(&self) -> &[usize] {
        &self.choices
    }

    /// `[U1, U2, U3]` for attempt `k`.
    pub fn attempt_slices(&self, k: usize) -> [Vec<Gate>; 3] {
        let qubits = self.register.qubits();
        let i = qubits[self.choices[k]];
        [
            qubits
                .iter()
                .filter(|&&q| q != i)
                .map(|&q| Gate::h(q))
                .collect(),
            vec![Gate::h(i)],
            Gate::hadamards(&self.register),
        ]
    }

    /// Appends every attempt to `builder`, with a checkpoint after each `U3`.
    pub fn append_to(&self, builder: &mut ProgramBuilder) {
        for k in 0..self.attempts() {
            builder.slices(self.attempt_slices(k));
            builder.checkpoint();
        }
    }
}

/// `prep`, a checkpoint, then `attempts` juggle attempts on `register` with
/// choices drawn from `seed`.
pub fn build_juggle_program(
    qubits: usize,
    prep: Vec<Vec<Gate>>,
    register: Register,
    attempts: usize,
    seed: u64,
) -> Result<SlicedProgram> {
    let plan = JugglePlan::random(register, attempts, &mut substream(seed, 0))?;
    build_with_plan(qubits, prep, &plan)
}

pub fn build_with_plan(
    qubits: usize,
    prep: Vec<Vec<Gate>>,
    plan: &JugglePlan,
) -> Result<SlicedProgram> {
    let mut b = ProgramBuilder::new(qubits);
    b.slices(prep);
    b.checkpoint();
    plan.append_to(&mut b);
    b.build()
}

/// Slices preparing `(|a> + |b>)/sqrt 2` (or with a minus sign) on qubits
/// `0..l`: a Hadamard on the lowest differing qubit `j`, then an XOR oracle
/// from qubit `j` writing the remaining bits.
pub fn prepare_pair(l: usize, a: u64, b: u64, minus: bool) -> Result<Vec<Vec<Gate>>> {
    if a == b || (a | b) >> l != 0 {
        return Err(Error::InvalidInstance(format!(
            "need distinct {l}-bit values, got {a} and {b}"
        )));
    }
    let j = (a ^ b).trailing_zeros() as usize;
    // the Hadamard branch with bit j clear must carry a
    let (a, b) = if a >> j & 1 == 0 { (a, b) } else { (b, a) };
    let rest: Vec<usize> = (0..l).filter(|&q| q != j).collect();
    let rest_reg = Register::new(rest.clone());
    let squeeze = |v: u64| -> u64 {
        rest.iter()
            .enumerate()
            .fold(0, |acc, (k, &q)| acc | ((v >> q) & 1) << k)
    };
    let write = OracleFunction::from_table("pair", 1, l - 1, vec![squeeze(a), squeeze(b)])?;
    let mut slices = vec![vec![Gate::h(j)]];
    if minus {
        let flip = OracleFunction::new("minus", 1, 1, FunctionKind::Equals { value: 1 })?;
        slices.push(vec![Gate::phase_flip(Register::new(vec![j]), flip)]);
    }
    if l > 1 {
        slices.push(vec![Gate::oracle_xor(
            Register::new(vec![j]),
            rest_reg,
            Arc::new(write),
        )]);
    }
    Ok(slices)
}

/// Distinct values of `juggled` at the checkpoints of `history`, grouped by
/// batch and by the values of the `tags` registers at the same checkpoint.
pub fn extract_checkpoint_values(
    history: &History,
    juggled: &Register,
    tags: &[Register],
) -> Result<BTreeMap<(usize, Vec<u64>), BTreeSet<u64>>> {
    if history.checkpoints().is_empty() {
        return Err(Error::MissingCheckpoints);
    }
    let mut groups: BTreeMap<(usize, Vec<u64>), BTreeSet<u64>> = BTreeMap::new();
    for (c, v) in history.checkpoint_values() {
        let tag = tags.iter().map(|r| r.extract(v.0)).collect();
        groups
            .entry((c.batch, tag))
            .or_default()
            .insert(juggled.extract(v.0));
    }
    Ok(groups)
}

/// Distinct values of `register` at the checkpoints of each batch.
pub fn values_per_batch(
    history: &History,
    register: &Register,
) -> Result<BTreeMap<usize, BTreeSet<u64>>> {
    if history.checkpoints().is_empty() {
        return Err(Error::MissingCheckpoints);
    }
    let mut out: BTreeMap<usize, BTreeSet<u64>> = BTreeMap::new();
    for (c, v) in history.checkpoint_values() {
        out.entry(c.batch)
            .or_default()
            .insert(register.extract(v.0));
    }
    Ok(out)
}
