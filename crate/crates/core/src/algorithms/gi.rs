//! Graph Isomorphism as Statistical Difference: `P_b(x)` is `G_b` relabelled
//! by the permutation of rank `x mod m!`, so the two output distributions
//! coincide up to indexing bias for isomorphic graphs and have disjoint
//! supports otherwise.

use rand::Rng;

use super::sd::{SdInstance, Verdict};
use crate::combinatorics::{
    edge_slots, factorial, isomorphic, permutation_from_rank, relabel, MAX_VERTICES,
};
use crate::error::{Error, Result};
use crate::qsim::{FunctionKind, OracleFunction};
use crate::rng::substream;

/// Extra index bits beyond `ceil(log2 m!)`; the indexing bias is at most
/// `2^-lambda`.
pub const DEFAULT_LAMBDA: usize = 20;

/// Largest vertex count accepted by [`gi_to_sd`].
pub const MAX_GI_VERTICES: usize = 6;

/// Two graphs on `m` vertices as edge bitmasks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphPair {
    pub m: usize,
    pub g0: u64,
    pub g1: u64,
}

impl GraphPair {
    pub fn isomorphic(&self) -> bool {
        isomorphic(self.m, self.g0, self.g1)
    }
}

/// `ceil(log2 m!)`.
pub fn index_bits(m: usize) -> usize {
    let f = factorial(m);
    (u64::BITS - (f - 1).leading_zeros()) as usize
}

pub fn gi_to_sd(pair: &GraphPair, lambda: usize) -> Result<SdInstance> {
    let m = pair.m;
    if !(2..=MAX_GI_VERTICES.min(MAX_VERTICES)).contains(&m) {
        return Err(Error::InvalidInstance(format!(
            "{m} vertices outside 2..={MAX_GI_VERTICES}"
        )));
    }
    let n = index_bits(m) + lambda;
    let slots = edge_slots(m);
    let sampler = |name: &str, edges: u64| -> Result<OracleFunction> {
        Ok(OracleFunction::new(
            name,
            n,
            slots,
            FunctionKind::GraphRelabel { vertices: m, edges },
        )?
        .as_query())
    };
    let truth = if pair.isomorphic() {
        Verdict::Near
    } else {
        Verdict::Far
    };
    SdInstance::new(
        format!("gi-m{m}-{:x}-{:x}", pair.g0, pair.g1),
        sampler("P0", pair.g0)?,
        sampler("P1", pair.g1)?,
        truth,
    )
}

/// Seeded pair: `G_1` is a random relabelling of `G_0`, or a random graph
/// with the same edge count that is not isomorphic to it.
pub fn random_graph_pair(m: usize, isomorphic_pair: bool, seed: u64) -> Result<GraphPair> {
    let slots = edge_slots(m);
    let mut rng = substream(seed, 0);
    for _ in 0..10_000 {
        let g0 = rng.random_range(0..1u64 << slots);
        let g1 = if isomorphic_pair {
            relabel(
                m,
                g0,
                &permutation_from_rank(m, rng.random_range(0..factorial(m))),
            )
        } else {
            let edges = g0.count_ones();
            // rejection-sample a graph with the same edge count
            let mut g = rng.random_range(0..1u64 << slots);
            let mut tries = 0;
            while g.count_ones() != edges && tries < 1000 {
                g = rng.random_range(0..1u64 << slots);
                tries += 1;
            }
            if g.count_ones() != edges || isomorphic(m, g0, g) {
                continue;
            }
            g
        };
        return Ok(GraphPair { m, g0, g1 });
    }
    Err(Error::InvalidInstance(format!(
        "no non-isomorphic pair found on {m} vertices"
    )))
}
