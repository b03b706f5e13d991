//! Search for a unique marked item among `N = 2^n` with `O(N^{1/3})`
//! queries. A short Grover run boosts the marked amplitude just enough that,
//! after Hadamards on the first `n/3` qubits, the `2^{n/3}` basis states
//! `|y>|x_B>` carrying the marked suffix have the same amplitude as the
//! `2^{2n/3}` states `|0>|z>`. Repeated tag-and-juggle rounds then move the
//! hidden variable from the latter set to the former without any queries,
//! and the suffix `x_B` read off the history is completed classically.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::juggle::JugglePlan;
use crate::error::{Error, Result};
use crate::history::{sample_history, HistoryQuery, SamplerOptions};
use crate::qsim::{
    grover_iteration_gates, marked_amplitude, FunctionKind, Gate, OracleFunction, ProgramBuilder,
    Register,
};
use crate::rng::{substream, substream_seed};
use crate::theories::TheoryKind;

/// A database of `2^n` items with one marked item, `3 | n`.
#[derive(Clone, Debug)]
pub struct SearchInstance {
    pub n: usize,
    pub marked: u64,
    pub f: Arc<OracleFunction>,
}

impl SearchInstance {
    pub fn new(n: usize, marked: u64) -> Result<Self> {
        if n == 0 || n % 3 != 0 || n > 24 {
            return Err(Error::InvalidInstance(format!(
                "search width {n} must be a positive multiple of 3 up to 24"
            )));
        }
        if marked >> n != 0 {
            return Err(Error::InvalidInstance(format!(
                "marked item {marked} needs more than {n} bits"
            )));
        }
        let f = OracleFunction::new("f", n, 1, FunctionKind::Equals { value: marked })?.as_query();
        Ok(SearchInstance {
            n,
            marked,
            f: Arc::new(f),
        })
    }

    /// Marked item drawn from `seed`.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        let marked = substream(seed, 0).random_range(0..1u64 << n);
        Self::new(n, marked)
    }

    /// `n / 3`.
    pub fn m(&self) -> usize {
        self.n / 3
    }

    /// First `n/3` bits of the marked item (qubits `0..m`).
    pub fn x_a(&self) -> u64 {
        self.marked & ((1 << self.m()) - 1)
    }

    /// Remaining `2n/3` bits (qubits `m..n`).
    pub fn x_b(&self) -> u64 {
        self.marked >> self.m()
    }

    /// Target amplitudes `(alpha, beta)` of `alpha|x> + beta sum_y |y>`.
    pub fn target_amplitudes(&self) -> (f64, f64) {
        target_amplitudes(self.n)
    }
}

pub fn target_amplitudes(n: usize) -> (f64, f64) {
    let m = (n / 3) as i32;
    let alpha = (1.0 / (2f64.powi(m) + 2f64.powi(1 - m) + 1.0)).sqrt();
    (alpha, 2f64.powi(-m) * alpha)
}

/// Grover iteration count whose marked amplitude is closest to
/// `alpha + beta`, searched over `0..=2^{n/3}`.
pub fn grover_iterations(n: usize) -> usize {
    let (alpha, beta) = target_amplitudes(n);
    (0..=1usize << (n / 3))
        .min_by(|&a, &b| {
            let da = (marked_amplitude(n, a) - (alpha + beta)).abs();
            let db = (marked_amplitude(n, b) - (alpha + beta)).abs();
            da.total_cmp(&db)
        })
        .expect("nonempty range")
}

/// Grover preparation and its achieved marked amplitude.
#[derive(Clone, Debug)]
pub struct SearchPrep {
    pub slices: Vec<Vec<Gate>>,
    pub iterations: usize,
    pub achieved: f64,
    pub target: f64,
}

/// Checks that `iterations` Grover steps land within one step's resolution
/// (`asin 2^{-n/2}`) of `alpha + beta`, and returns the achieved amplitude.
pub fn check_on_target(n: usize, iterations: usize) -> Result<f64> {
    let (alpha, beta) = target_amplitudes(n);
    let achieved = marked_amplitude(n, iterations);
    let theta = 2f64.powf(-(n as f64) / 2.0).asin();
    if (achieved - (alpha + beta)).abs() > theta {
        return Err(Error::InvalidInstance(format!(
            "{iterations} Grover iterations give amplitude {achieved:.4}, target {:.4}",
            alpha + beta
        )));
    }
    Ok(achieved)
}

/// Hadamards on all `n` qubits followed by the chosen number of Grover
/// iterations, one slice each.
pub fn prepare_search_state(inst: &SearchInstance) -> Result<SearchPrep> {
    let q = grover_iterations(inst.n);
    let achieved = check_on_target(inst.n, q)?;
    let (alpha, beta) = inst.target_amplitudes();
    let reg = Register::range(0, inst.n);
    let mut slices = vec![Gate::hadamards(&reg)];
    slices.extend((0..q).map(|_| grover_iteration_gates(&reg, &inst.f)));
    Ok(SearchPrep {
        slices,
        iterations: q,
        achieved,
        target: alpha + beta,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchParams {
    /// Batches are `c * 2^{n/3} * n`.
    pub c: usize,
    pub attempts_per_batch: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            c: 4,
            attempts_per_batch: 1,
        }
    }
}

impl SearchParams {
    pub fn batches(&self, n: usize) -> usize {
        self.c * (1 << (n / 3)) * n
    }
}

/// Tag `g(0, z) = z` and `g(y, w) = (s, y)` for `y != 0`, on `(A, B)`.
fn tag_oracle(n: usize, s: u64) -> Result<OracleFunction> {
    let m = n / 3;
    let a_mask = (1u64 << m) - 1;
    OracleFunction::tabulate("tag", n, 2 * m, |v| {
        let y = v & a_mask;
        if y == 0 {
            v >> m
        } else {
            s | y << m
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub n: usize,
    pub seed: u64,
    pub found: Option<u64>,
    pub success: bool,
    pub grover_queries: u64,
    /// Queries charged after the Grover preparation; always 0.
    pub juggle_queries: u64,
    pub verification_queries: u64,
    pub queries: u64,
    pub batches: usize,
    /// Checkpoints at which the variable sat on `|0>|x_B>`.
    pub overlap_visits: usize,
    pub checkpoints: usize,
}

/// Runs the search once. Failure (no verified candidate) is reported in the
/// outcome, not as an error.
pub fn dqp_search(
    inst: &SearchInstance,
    theory: TheoryKind,
    seed: u64,
    params: &SearchParams,
    opts: &SamplerOptions,
) -> Result<SearchOutcome> {
    let (n, m) = (inst.n, inst.m());
    let prep = prepare_search_state(inst)?;
    let x = Register::range(0, n);
    let a = Register::range(0, m);
    let b_reg = Register::range(m, 2 * m);
    let tag = Register::range(n, 2 * m);
    let mut builder = ProgramBuilder::new(n + 2 * m);
    builder.slices(prep.slices.clone());
    builder.slice(Gate::hadamards(&a));
    let prep_len = builder.len();
    let batches = params.batches(n);
    for batch in 0..batches {
        let mut rng = substream(seed, batch as u64 + 1);
        let s = rng.random_range(0..1u64 << m);
        let g = Arc::new(tag_oracle(n, s)?);
        builder.set_batch(batch);
        builder.slice(vec![Gate::oracle_xor(x.clone(), tag.clone(), g.clone())]);
        builder.checkpoint();
        JugglePlan::random(x.clone(), params.attempts_per_batch, &mut rng)?.append_to(&mut builder);
        builder.slice(vec![Gate::oracle_xor(x.clone(), tag.clone(), g)]);
    }
    let program = builder.build()?;
    let history = sample_history(
        &HistoryQuery::new(program, theory, substream_seed(seed, u64::MAX)),
        opts,
    )?;

    let grover_queries: u64 = history.ledger().per_slice()[..prep_len].iter().sum();
    let juggle_queries: u64 = history.ledger().per_slice()[prep_len..].iter().sum();

    // candidates: suffixes of checkpoint values outside A = 0, first-seen order
    let mut candidates: Vec<u64> = Vec::new();
    let mut overlap_visits = 0;
    let cps = history.checkpoint_values();
    for (_, v) in &cps {
        let value = x.extract(v.0);
        if value == inst.x_b() << m {
            overlap_visits += 1;
        }
        if a.extract(v.0) != 0 {
            let cand = b_reg.extract(v.0);
            if !candidates.contains(&cand) {
                candidates.push(cand);
            }
        }
    }
    let mut verification_queries = 0u64;
    let mut found = None;
    'outer: for cand in candidates {
        for prefix in 0..1u64 << m {
            verification_queries += 1;
            let guess = prefix | cand << m;
            if inst.f.eval(guess) == 1 {
                found = Some(guess);
                break 'outer;
            }
        }
    }
    Ok(SearchOutcome {
        n,
        seed,
        found,
        success: found == Some(inst.marked),
        grover_queries,
        juggle_queries,
        verification_queries,
        queries: grover_queries + juggle_queries + verification_queries,
        batches,
        overlap_visits,
        checkpoints: cps.len(),
    })
}
