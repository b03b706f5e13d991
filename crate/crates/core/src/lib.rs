//! Hidden-variable history sampling for sliced quantum circuits.
//!
//! The crate is organised bottom-up:
//!
//! * [`qsim`] exact state-vector simulation over a restricted gate set
//!   (Hadamard, phase flips, XOR oracles, basis permutations) with query
//!   accounting.
//! * [`theories`] transition kernels of hidden-variable theories (product,
//!   max-flow, matrix scaling) together with the axiom checkers.
//! * [`history`] the history oracle: sample a whole trajectory of the hidden
//!   variable through a sliced program.
//! * [`algorithms`] juggling, Statistical Difference, collision, graph
//!   isomorphism and the cube-root database search, each built as a sliced
//!   program plus a decision rule over the sampled history.
//! * [`harness`] seeded, reproducible experiments with CSV/JSON output.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the type
//! aliases below fix `f64`, which is what the experiments use.

pub mod algorithms;
pub mod combinatorics;
pub mod error;
pub mod harness;
pub mod history;
pub mod qsim;
pub mod rng;
pub mod scalar;
pub mod theories;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use history::{History, HistoryQuery, SamplerOptions};
pub use qsim::{BasisIndex, Gate, OracleFunction, QueryLedger, Register, SlicedProgram};
pub use theories::{Granularity, TheoryKind};

/// Double-precision pure state.
pub type State = qsim::PureState<f64>;
/// Single-precision pure state.
pub type StateF32 = qsim::PureState<f32>;
/// Double-precision dense unitary.
pub type Unitary = qsim::DenseMatrix<f64>;
/// Double-precision transition kernel.
pub type Kernel = theories::TransitionKernel<f64>;
/// Single-precision transition kernel.
pub type KernelF32 = theories::TransitionKernel<f32>;
/// Double-precision kernel row.
pub type Row = theories::KernelRow<f64>;
