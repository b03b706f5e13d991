use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered list of qubits read as an integer: bit `k` of the register
/// value is qubit `qubits[k]` of the basis index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct Register {
    qubits: Vec<usize>,
    // low qubit of a contiguous ascending run, for the shift/mask fast path
    shift: Option<usize>,
}

impl From<Vec<usize>> for Register {
    fn from(qubits: Vec<usize>) -> Self {
        Register::new(qubits)
    }
}

impl From<Register> for Vec<usize> {
    fn from(r: Register) -> Self {
        r.qubits
    }
}

impl Register {
    pub fn new(qubits: Vec<usize>) -> Self {
        let shift = qubits
            .first()
            .copied()
            .filter(|&first| qubits.iter().enumerate().all(|(k, &q)| q == first + k));
        Register { qubits, shift }
    }

    /// Qubits `start..start + width`.
    pub fn range(start: usize, width: usize) -> Self {
        Register::new((start..start + width).collect())
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn width(&self) -> usize {
        self.qubits.len()
    }

    pub fn mask(&self) -> usize {
        self.qubits.iter().fold(0, |m, &q| m | 1 << q)
    }

    /// Register value held by basis index `index`.
    #[inline]
    pub fn extract(&self, index: usize) -> u64 {
        if let Some(shift) = self.shift {
            return ((index >> shift) & ((1usize << self.qubits.len()) - 1)) as u64;
        }
        self.qubits
            .iter()
            .enumerate()
            .fold(0u64, |v, (k, &q)| v | (((index >> q) & 1) as u64) << k)
    }

    /// `index` with the register overwritten by `value`.
    #[inline]
    pub fn deposit(&self, index: usize, value: u64) -> usize {
        if let Some(shift) = self.shift {
            let mask = ((1usize << self.qubits.len()) - 1) << shift;
            return (index & !mask) | ((value as usize) << shift & mask);
        }
        self.qubits.iter().enumerate().fold(index, |i, (k, &q)| {
            (i & !(1 << q)) | ((((value >> k) & 1) as usize) << q)
        })
    }

    /// Checks qubits are distinct and below `qubits`.
    pub fn validate(&self, qubits: usize) -> Result<()> {
        let mut seen = 0u128;
        for &q in &self.qubits {
            if q >= qubits {
                return Err(Error::QubitOutOfRange { qubit: q, qubits });
            }
            if seen >> q & 1 == 1 {
                return Err(Error::DuplicateQubit(q));
            }
            seen |= 1 << q;
        }
        Ok(())
    }

    /// Concatenation `self ++ other` (self occupies the low bits).
    pub fn concat(&self, other: &Register) -> Register {
        Register::new(
            self.qubits
                .iter()
                .chain(other.qubits.iter())
                .copied()
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extract_and_deposit_agree_for_scattered_registers() {
        let r = Register::new(vec![3, 0, 5]);
        let idx = 0b101001;
        assert_eq!(r.extract(idx), 0b111);
        let j = r.deposit(idx, 0b010);
        assert_eq!(j, 0b000001);
        assert_eq!(r.extract(j), 0b010);
    }

    #[test]
    fn contiguous_fast_path_matches_generic() {
        let r = Register::range(2, 3);
        let generic = Register::new(vec![2, 3, 4]);
        for idx in 0..128 {
            assert_eq!(r.extract(idx), generic.extract(idx));
            for v in 0..8 {
                let a = r.deposit(idx, v);
                let mut b = idx;
                for (k, &q) in generic.qubits().iter().enumerate() {
                    b = (b & !(1 << q)) | (((v >> k) & 1) as usize) << q;
                }
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn validation_rejects_bad_qubits() {
        assert!(Register::new(vec![0, 4]).validate(4).is_err());
        assert!(Register::new(vec![1, 1]).validate(4).is_err());
        assert!(Register::new(vec![1, 3]).validate(4).is_ok());
    }
}
