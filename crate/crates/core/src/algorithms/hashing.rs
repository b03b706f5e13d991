//! Uniformly random affine hashes `h(x) = A x xor c` over GF(2).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::qsim::{FunctionKind, OracleFunction};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineHash {
    /// Input width `n`.
    pub n: usize,
    /// `rows[r]` is row `r` of `A` as an `n`-bit mask; there are `k` rows.
    pub rows: Vec<u64>,
    pub offset: u64,
}

impl AffineHash {
    /// Uniform draw from all affine maps `{0,1}^n -> {0,1}^k`.
    pub fn random<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Self {
        let in_mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let rows = (0..k).map(|_| rng.random::<u64>() & in_mask).collect();
        let offset = rng.random::<u64>() & ((1u64 << k) - 1);
        AffineHash { n, rows, offset }
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.rows.iter().enumerate().fold(0u64, |acc, (r, &row)| {
            acc | (((row & x).count_ones() & 1) as u64) << r
        }) ^ self.offset
    }

    pub fn to_oracle(&self, name: impl Into<String>) -> Result<OracleFunction> {
        OracleFunction::new(
            name,
            self.n,
            self.k(),
            FunctionKind::Affine {
                rows: self.rows.clone(),
                offset: self.offset,
            },
        )
    }
}

/// Draws `k` uniformly from `{2, ..., n + 1}` and two independent hashes
/// with `k` output bits.
pub fn draw_vv_hash<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, AffineHash, AffineHash) {
    let k = rng.random_range(2..=n + 1);
    let h0 = AffineHash::random(n, k, rng);
    let h1 = AffineHash::random(n, k, rng);
    (k, h0, h1)
}
