//! One-to-one versus two-to-one: prepare `sum_x |x>|g(x)>` and juggle `x`.
//! Within a `g`-value block there is one `x` for a permutation and two for
//! a two-to-one function, so only the latter can show two distinct `x` at
//! the checkpoints of a batch.

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::juggle::{default_attempts, values_per_batch, JugglePlan};
use crate::error::{Error, Result};
use crate::history::{sample_history, HistoryQuery, SamplerOptions};
use crate::qsim::{Gate, OracleFunction, ProgramBuilder, Register, SlicedProgram};
use crate::rng::{substream, substream_seed};
use crate::theories::TheoryKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollisionVerdict {
    OneToOne,
    TwoToOne,
}

impl fmt::Display for CollisionVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CollisionVerdict::OneToOne => "one_to_one",
            CollisionVerdict::TwoToOne => "two_to_one",
        })
    }
}

#[derive(Clone, Debug)]
pub struct CollisionInstance {
    pub id: String,
    pub n: usize,
    pub g: Arc<OracleFunction>,
    pub truth: CollisionVerdict,
}

/// Seeded instance: a random permutation, or a random perfect matching of
/// the inputs with each pair sent to its own random output.
pub fn generate_collision(
    truth: CollisionVerdict,
    n: usize,
    seed: u64,
) -> Result<CollisionInstance> {
    if !(2..=12).contains(&n) {
        return Err(Error::InvalidInstance(format!(
            "input width {n} outside 2..=12"
        )));
    }
    let mut rng = substream(seed, 0);
    let size = 1usize << n;
    let mut outputs: Vec<u64> = (0..size as u64).collect();
    outputs.shuffle(&mut rng);
    let table = match truth {
        CollisionVerdict::OneToOne => outputs,
        CollisionVerdict::TwoToOne => {
            let mut order: Vec<usize> = (0..size).collect();
            order.shuffle(&mut rng);
            let mut t = vec![0; size];
            for (k, &x) in order.iter().enumerate() {
                t[x] = outputs[k / 2];
            }
            t
        }
    };
    Ok(CollisionInstance {
        id: format!("collision-{truth}-n{n}-s{seed}"),
        n,
        g: Arc::new(OracleFunction::from_table("g", n, n, table)?.as_query()),
        truth,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionParams {
    pub batches: usize,
    /// `None` means `2 n^2`.
    pub attempts: Option<usize>,
}

impl Default for CollisionParams {
    fn default() -> Self {
        CollisionParams {
            batches: 1,
            attempts: None,
        }
    }
}

pub fn build_collision_program(
    inst: &CollisionInstance,
    seed: u64,
    params: &CollisionParams,
) -> Result<SlicedProgram> {
    let x = Register::range(0, inst.n);
    let gx = Register::range(inst.n, inst.n);
    let attempts = params.attempts.unwrap_or_else(|| default_attempts(inst.n));
    let mut b = ProgramBuilder::new(2 * inst.n);
    for batch in 0..params.batches {
        let mut rng = substream(seed, batch as u64);
        b.set_batch(batch);
        let prep = vec![
            Gate::hadamards(&x),
            vec![Gate::oracle_xor(x.clone(), gx.clone(), inst.g.clone())],
        ];
        b.slices(prep.clone());
        b.checkpoint();
        JugglePlan::random(x.clone(), attempts, &mut rng)?.append_to(&mut b);
        b.slices(prep.into_iter().rev());
    }
    b.build()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionOutcome {
    pub instance_id: String,
    pub verdict: CollisionVerdict,
    pub batches_used: usize,
    pub queries: u64,
    pub seed: u64,
}

/// "two-to-one" iff some batch shows two distinct `x` at its checkpoints.
pub fn distinguish_collision(
    inst: &CollisionInstance,
    theory: TheoryKind,
    seed: u64,
    params: &CollisionParams,
    opts: &SamplerOptions,
) -> Result<CollisionOutcome> {
    let program = build_collision_program(inst, seed, params)?;
    let queries = program.query_count();
    let history = sample_history(
        &HistoryQuery::new(program, theory, substream_seed(seed, u64::MAX)),
        opts,
    )?;
    let x = Register::range(0, inst.n);
    let two = values_per_batch(&history, &x)?
        .values()
        .any(|s| s.len() > 1);
    Ok(CollisionOutcome {
        instance_id: inst.id.clone(),
        verdict: if two {
            CollisionVerdict::TwoToOne
        } else {
            CollisionVerdict::OneToOne
        },
        batches_used: params.batches,
        queries,
        seed,
    })
}
