use serde::{Deserialize, Serialize};

use super::{Gate, PureState};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A slice index whose post-slice hidden-variable value is inspected.
/// `batch` groups checkpoints belonging to one prepare/juggle/uncompute run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Checkpoint {
    pub slice: usize,
    #[serde(default)]
    pub batch: usize,
}

/// Ordered slices `U_1..U_T` of gates on `qubits` qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlicedProgram {
    qubits: usize,
    slices: Vec<Vec<Gate>>,
    #[serde(default)]
    checkpoints: Vec<Checkpoint>,
}

impl SlicedProgram {
    pub fn new(
        qubits: usize,
        slices: Vec<Vec<Gate>>,
        mut checkpoints: Vec<Checkpoint>,
    ) -> Result<Self> {
        checkpoints.sort();
        checkpoints.dedup();
        let program = SlicedProgram {
            qubits,
            slices,
            checkpoints,
        };
        program.validate()?;
        Ok(program)
    }

    pub fn validate(&self) -> Result<()> {
        for gate in self.slices.iter().flatten() {
            gate.validate(self.qubits)?;
        }
        if let Some(c) = self
            .checkpoints
            .iter()
            .find(|c| c.slice >= self.slices.len())
        {
            return Err(Error::InvalidCheckpoint {
                slice: c.slice,
                slices: self.slices.len(),
            });
        }
        Ok(())
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn slices(&self) -> &[Vec<Gate>] {
        &self.slices
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn checkpoints(&self) -> &[Checkpoint] {
        &self.checkpoints
    }

    /// Static number of query-charged gate applications.
    pub fn query_count(&self) -> u64 {
        self.slices.iter().flatten().map(Gate::queries).sum()
    }

    pub fn gate_count(&self) -> usize {
        self.slices.iter().map(Vec::len).sum()
    }

    /// Final state when run from `|0...0>`.
    pub fn final_state<T: Scalar>(&self) -> Result<PureState<T>> {
        let mut state = PureState::zero(self.qubits)?;
        let mut ledger = QueryLedger::default();
        for slice in &self.slices {
            state = apply_slice(&state, slice, &mut ledger)?;
        }
        Ok(state)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let program: SlicedProgram = serde_json::from_str(text)?;
        SlicedProgram::new(program.qubits, program.slices, program.checkpoints)
    }
}

/// Incremental construction of a [`SlicedProgram`].
#[derive(Clone, Debug)]
pub struct ProgramBuilder {
    qubits: usize,
    slices: Vec<Vec<Gate>>,
    checkpoints: Vec<Checkpoint>,
    batch: usize,
}

impl ProgramBuilder {
    pub fn new(qubits: usize) -> Self {
        ProgramBuilder {
            qubits,
            slices: Vec::new(),
            checkpoints: Vec::new(),
            batch: 0,
        }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn batch(&self) -> usize {
        self.batch
    }

    /// Checkpoints pushed from now on belong to batch `batch`.
    pub fn set_batch(&mut self, batch: usize) -> &mut Self {
        self.batch = batch;
        self
    }

    pub fn slice(&mut self, gates: Vec<Gate>) -> &mut Self {
        self.slices.push(gates);
        self
    }

    pub fn slices(&mut self, slices: impl IntoIterator<Item = Vec<Gate>>) -> &mut Self {
        self.slices.extend(slices);
        self
    }

    /// One slice per gate.
    pub fn gates(&mut self, gates: impl IntoIterator<Item = Gate>) -> &mut Self {
        self.slices.extend(gates.into_iter().map(|g| vec![g]));
        self
    }

    /// Marks the most recent slice as a checkpoint; an empty slice is
    /// inserted first when nothing has been pushed yet.
    pub fn checkpoint(&mut self) -> &mut Self {
        if self.slices.is_empty() {
            self.slices.push(Vec::new());
        }
        self.checkpoints.push(Checkpoint {
            slice: self.slices.len() - 1,
            batch: self.batch,
        });
        self
    }

    pub fn build(self) -> Result<SlicedProgram> {
        SlicedProgram::new(self.qubits, self.slices, self.checkpoints)
    }
}

/// Per-slice counts of query-charged gate applications.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QueryLedger {
    per_slice: Vec<u64>,
}

#[derive(Serialize)]
struct LedgerJson<'a> {
    q: &'a [u64],
    #[serde(rename = "Q")]
    total: u64,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends the count of the next slice.
    pub fn record(&mut self, queries: u64) {
        self.per_slice.push(queries);
    }

    pub fn per_slice(&self) -> &[u64] {
        &self.per_slice
    }

    /// Running totals `Q_t = q_1 + ... + q_t`.
    pub fn cumulative(&self) -> Vec<u64> {
        self.per_slice
            .iter()
            .scan(0u64, |acc, &q| {
                *acc += q;
                Some(*acc)
            })
            .collect()
    }

    pub fn total(&self) -> u64 {
        self.per_slice.iter().sum()
    }

    /// `{"q": [...], "Q": total}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&LedgerJson {
            q: &self.per_slice,
            total: self.total(),
        })
        .expect("ledger serializes")
    }
}

/// Applies the gates of one slice in order and records its queries.
pub fn apply_slice<T: Scalar>(
    state: &PureState<T>,
    slice: &[Gate],
    ledger: &mut QueryLedger,
) -> Result<PureState<T>> {
    for gate in slice {
        gate.validate(state.qubits())?;
    }
    let mut next = state.clone();
    for gate in slice {
        next.apply_validated(gate);
    }
    ledger.record(slice.iter().map(Gate::queries).sum());
    Ok(next)
}
