use serde::{Deserialize, Serialize};

use crate::combinatorics;
use crate::error::{Error, Result};

/// How an oracle function is evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionKind {
    /// Explicit value table indexed by the input.
    Table { values: Vec<u64> },
    /// `x -> A x xor c` over GF(2); `rows[r]` is row `r` of `A` as a bit mask.
    Affine { rows: Vec<u64>, offset: u64 },
    /// 1 on `value`, 0 elsewhere.
    Equals { value: u64 },
    /// 0 on `value`, 1 elsewhere.
    NotEquals { value: u64 },
    /// Adjacency bits of `edges` relabelled by the permutation of rank
    /// `x mod vertices!`.
    GraphRelabel { vertices: usize, edges: u64 },
}

/// A classical function `{0,1}^input_bits -> {0,1}^output_bits`.
///
/// When `counts_as_query` is set, each gate application using this function
/// is charged one query in the [`QueryLedger`](super::QueryLedger).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleFunction {
    pub name: String,
    pub input_bits: usize,
    pub output_bits: usize,
    #[serde(default)]
    pub counts_as_query: bool,
    pub function: FunctionKind,
}

impl OracleFunction {
    pub fn new(
        name: impl Into<String>,
        input_bits: usize,
        output_bits: usize,
        function: FunctionKind,
    ) -> Result<Self> {
        let f = OracleFunction {
            name: name.into(),
            input_bits,
            output_bits,
            counts_as_query: false,
            function,
        };
        f.validate()?;
        Ok(f)
    }

    /// Tabulates `f` over all inputs.
    pub fn tabulate(
        name: impl Into<String>,
        input_bits: usize,
        output_bits: usize,
        f: impl Fn(u64) -> u64,
    ) -> Result<Self> {
        let values = (0..1u64 << input_bits).map(f).collect();
        Self::new(
            name,
            input_bits,
            output_bits,
            FunctionKind::Table { values },
        )
    }

    pub fn from_table(
        name: impl Into<String>,
        input_bits: usize,
        output_bits: usize,
        values: Vec<u64>,
    ) -> Result<Self> {
        Self::new(
            name,
            input_bits,
            output_bits,
            FunctionKind::Table { values },
        )
    }

    /// Marks the function as a query oracle.
    pub fn as_query(mut self) -> Self {
        self.counts_as_query = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::MalformedOracle(self.name.clone(), msg));
        if self.input_bits > 40 || self.output_bits > 63 {
            return bad("width too large".into());
        }
        let out_limit = 1u64 << self.output_bits;
        match &self.function {
            FunctionKind::Table { values } => {
                if values.len() as u64 != 1u64 << self.input_bits {
                    return bad(format!("table has {} entries", values.len()));
                }
                if let Some(v) = values.iter().find(|&&v| v >= out_limit) {
                    return bad(format!("table value {v} exceeds output width"));
                }
            }
            FunctionKind::Affine { rows, offset } => {
                if rows.len() != self.output_bits {
                    return bad(format!(
                        "{} rows for {} output bits",
                        rows.len(),
                        self.output_bits
                    ));
                }
                if rows.iter().any(|&r| r >> self.input_bits != 0) || *offset >= out_limit {
                    return bad("affine map exceeds declared widths".into());
                }
            }
            FunctionKind::Equals { .. } | FunctionKind::NotEquals { .. } => {
                if self.output_bits != 1 {
                    return bad("indicator must have one output bit".into());
                }
            }
            FunctionKind::GraphRelabel { vertices, edges } => {
                if *vertices > combinatorics::MAX_VERTICES
                    || self.output_bits != combinatorics::edge_slots(*vertices)
                    || *edges >= out_limit
                {
                    return bad("graph does not fit the declared output width".into());
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn eval(&self, x: u64) -> u64 {
        match &self.function {
            FunctionKind::Table { values } => values[x as usize],
            FunctionKind::Affine { rows, offset } => {
                rows.iter().enumerate().fold(0u64, |acc, (r, &row)| {
                    acc | (((row & x).count_ones() & 1) as u64) << r
                }) ^ offset
            }
            FunctionKind::Equals { value } => (x == *value) as u64,
            FunctionKind::NotEquals { value } => (x != *value) as u64,
            FunctionKind::GraphRelabel { vertices, edges } => {
                combinatorics::relabel_by_index(*vertices, *edges, x)
            }
        }
    }
}
