//! The history oracle: sample the trajectory `(v_0, ..., v_T)` of the hidden
//! variable through a sliced program under a fixed theory.
//!
//! The state vector is advanced once per slice and shared by every trial
//! being sampled; each trial then draws exactly one uniform per slice from
//! its own stream. A history therefore depends only on its seed, and the
//! prefix `(v_0, ..., v_t)` depends only on the first `t` slices.

use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::qsim::{slice_unitary, BasisIndex, Checkpoint, PureState, QueryLedger, SlicedProgram};
use crate::rng::{substream_seed, StreamRng};
use crate::scalar::Scalar;
use crate::theories::{
    dense_kernel, gate_row_from_before, Granularity, KernelOptions, KernelRow, TheoryKind,
};

/// Input to the oracle: a program on `qubits` qubits, a theory and a seed.
#[derive(Clone, Debug)]
pub struct HistoryQuery {
    pub qubits: usize,
    pub program: Arc<SlicedProgram>,
    pub theory: TheoryKind,
    pub seed: u64,
}

impl HistoryQuery {
    pub fn new(program: impl Into<Arc<SlicedProgram>>, theory: TheoryKind, seed: u64) -> Self {
        let program = program.into();
        HistoryQuery {
            qubits: program.qubits(),
            program,
            theory,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.qubits != self.program.qubits() {
            return Err(Error::QubitCountMismatch {
                qubits: self.qubits,
                expected: self.program.qubits(),
            });
        }
        self.program.validate()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SamplerOptions {
    pub kernel: KernelOptions,
}

impl SamplerOptions {
    pub fn with_granularity(granularity: Granularity) -> Self {
        let mut o = Self::default();
        o.kernel.granularity = granularity;
        o
    }
}

/// One sampled trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct History {
    qubits: usize,
    values: Vec<BasisIndex>,
    checkpoints: Vec<Checkpoint>,
    ledger: QueryLedger,
}

impl History {
    /// `v_0, ..., v_T`; `v_t` is the value right after slice `t`.
    pub fn values(&self) -> &[BasisIndex] {
        &self.values
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }

    pub fn checkpoints(&self) -> &[Checkpoint] {
        &self.checkpoints
    }

    /// Value right after each checkpoint slice, in checkpoint order.
    pub fn checkpoint_values(&self) -> Vec<(Checkpoint, BasisIndex)> {
        self.checkpoints
            .iter()
            .map(|&c| (c, self.values[c.slice + 1]))
            .collect()
    }

    /// CSV with columns `t,v,is_checkpoint`; `v` is written as a bit string
    /// with the highest qubit first.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "v", "is_checkpoint"])?;
        let marked: std::collections::BTreeSet<usize> =
            self.checkpoints.iter().map(|c| c.slice + 1).collect();
        for (t, v) in self.values.iter().enumerate() {
            w.write_record([
                t.to_string(),
                v.bitstring(self.qubits),
                marked.contains(&t).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("ascii")
    }
}

/// Samples one history for `query`.
pub fn sample_history(query: &HistoryQuery, opts: &SamplerOptions) -> Result<History> {
    query.validate()?;
    let mut out =
        sample_with_seeds::<f64>(&query.program, query.theory, &[query.seed], opts, |_, _| {})?;
    Ok(out.pop().expect("one seed"))
}

/// Samples `trials` histories in one pass; trial `i` is exactly the history
/// [`sample_history`] returns for seed `substream_seed(query.seed, i)`.
pub fn sample_histories(
    query: &HistoryQuery,
    trials: usize,
    opts: &SamplerOptions,
) -> Result<Vec<History>> {
    query.validate()?;
    let seeds = trial_seeds(query.seed, trials);
    sample_with_seeds::<f64>(&query.program, query.theory, &seeds, opts, |_, _| {})
}

pub fn trial_seeds(seed: u64, trials: usize) -> Vec<u64> {
    (0..trials as u64)
        .map(|i| substream_seed(seed, i))
        .collect()
}

/// Core sampler, generic over precision. `observe(t, state)` sees the exact
/// state after every slice `t >= 1` (and `t = 0` for the initial state).
pub fn sample_with_seeds<T: Scalar>(
    program: &SlicedProgram,
    theory: TheoryKind,
    seeds: &[u64],
    opts: &SamplerOptions,
    mut observe: impl FnMut(usize, &PureState<T>),
) -> Result<Vec<History>> {
    program.validate()?;
    let qubits = program.qubits();
    let mut state = PureState::<T>::zero(qubits)?;
    observe(0, &state);
    let mut rngs: Vec<StreamRng> = seeds.iter().map(|&s| StreamRng::seed_from_u64(s)).collect();
    let mut values: Vec<Vec<BasisIndex>> = seeds
        .iter()
        .map(|_| {
            let mut v = Vec::with_capacity(program.len() + 1);
            v.push(BasisIndex(0));
            v
        })
        .collect();
    let mut ledger = QueryLedger::new();

    for (t, slice) in program.slices().iter().enumerate() {
        let current: Vec<usize> = values.iter().map(|v| v.last().expect("v_0").0).collect();
        let mut distinct = current.clone();
        distinct.sort_unstable();
        distinct.dedup();

        // one row per distinct current value
        let rows: Vec<KernelRow<T>> = if theory == TheoryKind::Product {
            for gate in slice {
                state.apply_validated(gate);
            }
            vec![KernelRow::from_dense(&state.born_distribution())]
        } else {
            match opts.kernel.granularity {
                Granularity::Gate => {
                    let mut dists: Vec<KernelRow<T>> =
                        distinct.iter().map(|&v| KernelRow::point(v)).collect();
                    for gate in slice {
                        dists = dists
                            .iter()
                            .map(|d| {
                                let mut out = Vec::with_capacity(d.entries().len() * 2);
                                for &(v, m) in d.entries() {
                                    for &(w, p) in
                                        gate_row_from_before(theory, &state, gate, v).entries()
                                    {
                                        out.push((w, m * p));
                                    }
                                }
                                KernelRow::from_entries(out)
                            })
                            .collect();
                        state.apply_validated(gate);
                    }
                    dists
                }
                Granularity::Slice => {
                    let u = slice_unitary(slice, qubits, opts.kernel.dense_cap)?;
                    let k = dense_kernel(theory, &state, &u, &opts.kernel)?;
                    state = u.apply(&state)?;
                    distinct
                        .iter()
                        .map(|&v| KernelRow::from_dense(k.row(v)))
                        .collect()
                }
            }
        };
        if !state.is_finite() {
            return Err(Error::NonFinite(t));
        }
        ledger.record(slice.iter().map(|g| g.queries()).sum());
        observe(t + 1, &state);

        let cdfs: Vec<Vec<(usize, f64)>> = rows.iter().map(cumulative).collect();
        for ((rng, vals), cur) in rngs.iter_mut().zip(values.iter_mut()).zip(&current) {
            let u: f64 = rng.random();
            let k = if theory == TheoryKind::Product {
                0
            } else {
                distinct.binary_search(cur).expect("present")
            };
            let next = sample_cdf(&cdfs[k], u).ok_or(Error::NonFinite(t))?;
            vals.push(BasisIndex(next));
        }
    }

    Ok(values
        .into_iter()
        .map(|values| History {
            qubits,
            values,
            checkpoints: program.checkpoints().to_vec(),
            ledger: ledger.clone(),
        })
        .collect())
}

fn cumulative<T: Scalar>(row: &KernelRow<T>) -> Vec<(usize, f64)> {
    let mut acc = 0.0;
    row.entries()
        .iter()
        .map(|&(i, p)| {
            acc += p.as_f64();
            (i, acc)
        })
        .collect()
}

/// Inverse-CDF lookup scaled by the row total, matching [`KernelRow::sample`].
fn sample_cdf(cdf: &[(usize, f64)], u: f64) -> Option<usize> {
    let total = cdf.last()?.1;
    let target = u * total;
    let k = cdf.partition_point(|e| e.1 <= target);
    Some(cdf[k.min(cdf.len() - 1)].0)
}

/// Per-step total-variation distance between empirical and Born marginals.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalReport {
    pub trials: usize,
    /// `tv[t]` compares the law of `v_t` with the Born distribution after slice `t`.
    pub tv: Vec<f64>,
}

impl MarginalReport {
    pub fn max_tv(&self) -> f64 {
        self.tv.iter().copied().fold(0.0, f64::max)
    }

    /// Builds the report from sampled trajectories and the exact Born
    /// distributions `born[t]`.
    pub fn from_values(histories: &[Vec<usize>], born: &[Vec<f64>]) -> Self {
        let trials = histories.len();
        let tv = born
            .iter()
            .enumerate()
            .map(|(t, p)| {
                let mut counts = vec![0usize; p.len()];
                for h in histories {
                    counts[h[t]] += 1;
                }
                0.5 * counts
                    .iter()
                    .zip(p)
                    .map(|(&c, &q)| (c as f64 / trials as f64 - q).abs())
                    .sum::<f64>()
            })
            .collect();
        MarginalReport { trials, tv }
    }
}

/// Samples `trials` histories and compares each step's empirical marginal
/// with the Born distribution of the simulated state.
pub fn empirical_marginals(
    query: &HistoryQuery,
    trials: usize,
    opts: &SamplerOptions,
) -> Result<MarginalReport> {
    query.validate()?;
    let seeds = trial_seeds(query.seed, trials);
    let mut born = Vec::with_capacity(query.program.len() + 1);
    let histories =
        sample_with_seeds::<f64>(&query.program, query.theory, &seeds, opts, |_, s| {
            born.push(s.born_distribution())
        })?;
    let values: Vec<Vec<usize>> = histories
        .iter()
        .map(|h| h.values.iter().map(|v| v.0).collect())
        .collect();
    Ok(MarginalReport::from_values(&values, &born))
}
