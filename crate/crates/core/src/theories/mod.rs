//! Hidden-variable theories: stochastic transition kernels `S(psi, U)`
//! mapping the Born distribution before a slice onto the one after it,
//! plus checkers for the marginalization, indifference and robustness
//! axioms.
//!
//! Kernels are stored row-major with `K[from][to]` the probability that the
//! hidden variable moves from basis state `from` to `to`.

mod axioms;
mod blocks;
mod dense;
mod flow;
mod kernel;
mod maxflow;
mod row;
mod sinkhorn;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use axioms::{
    check_marginalization, probe_robustness, product_witness, random_block_unitary, random_state,
    random_unitary, row_stochasticity_defect, RobustnessProbe,
};
pub use blocks::{check_indifference, BlockStructure};
pub use dense::{dense_kernel, product_kernel};
pub use flow::flow_kernel_dense;
pub use kernel::{KernelRow, TransitionKernel};
pub use maxflow::LexMaxFlow;
pub(crate) use row::gate_row_from_before;
pub use row::{gate_row, kernel_row, push_through_gate};
pub use sinkhorn::sinkhorn_kernel;

use crate::error::Error;
use crate::qsim::DEFAULT_DENSE_CAP;

/// Unitary entries at or below this modulus count as structural zeros.
pub const SPARSITY_ETA: f64 = 1e-12;

/// Kernel entries above this count as transitions in the indifference check.
pub const INDIFFERENCE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoryKind {
    /// `S_xy = |beta_y|^2`: memoryless, violates indifference.
    Product,
    /// Lexicographic maximum flow on the sparsity pattern of `U`.
    Flow,
    /// Alternating row/column scaling of `|alpha_x| |U_yx| |beta_y|`.
    Sinkhorn,
}

impl TheoryKind {
    pub const ALL: [TheoryKind; 3] = [TheoryKind::Product, TheoryKind::Flow, TheoryKind::Sinkhorn];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoryKind::Product => "product",
            TheoryKind::Flow => "flow",
            TheoryKind::Sinkhorn => "sinkhorn",
        }
    }

    /// Whether kernels respect the block structure of every unitary.
    pub fn is_indifferent(self) -> bool {
        !matches!(self, TheoryKind::Product)
    }
}

impl fmt::Display for TheoryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "product" | "pt" => Ok(TheoryKind::Product),
            "flow" | "ft" => Ok(TheoryKind::Flow),
            "sinkhorn" | "schrodinger" | "st" => Ok(TheoryKind::Sinkhorn),
            other => Err(Error::Config(format!("unknown theory `{other}`"))),
        }
    }
}

/// Unit of unitary a kernel is computed for.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    /// One kernel per gate; a slice's row chains the per-gate rows.
    #[default]
    Gate,
    /// One kernel per slice from its dense unitary.
    Slice,
}

impl FromStr for Granularity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gate" => Ok(Granularity::Gate),
            "slice" => Ok(Granularity::Slice),
            other => Err(Error::Config(format!("unknown granularity `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelOptions {
    pub granularity: Granularity,
    /// Qubit cap for dense unitaries and kernels.
    pub dense_cap: usize,
    pub sinkhorn_tol: f64,
    pub sinkhorn_max_iter: usize,
}

impl Default for KernelOptions {
    fn default() -> Self {
        KernelOptions {
            granularity: Granularity::Gate,
            dense_cap: DEFAULT_DENSE_CAP,
            sinkhorn_tol: 1e-9,
            sinkhorn_max_iter: 20_000,
        }
    }
}
