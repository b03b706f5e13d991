use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{OracleFunction, Register};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Oracles on registers up to this width are tabulated once per application.
const TABULATE_LIMIT: usize = 16;

/// The restricted gate set. Every gate other than `Hadamard` maps basis
/// states to basis states up to sign, so its unitary is generalized
/// block-diagonal with 1x1 blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum Gate {
    Hadamard {
        target: usize,
    },
    /// Multiplies `|x>` by -1 when `oracle(register(x))` has its low bit set.
    PhaseFlip {
        register: Register,
        oracle: Arc<OracleFunction>,
    },
    /// `|x>|w> -> |x>|w xor f(x)>` with `x` read from `input`, `w` from `output`.
    OracleXor {
        input: Register,
        output: Register,
        oracle: Arc<OracleFunction>,
    },
    /// Basis permutation on `register`; `map[v]` is the image of value `v`.
    Permutation {
        register: Register,
        map: Arc<Vec<u64>>,
    },
}

impl Gate {
    pub fn h(target: usize) -> Gate {
        Gate::Hadamard { target }
    }

    pub fn phase_flip(register: Register, oracle: impl Into<Arc<OracleFunction>>) -> Gate {
        Gate::PhaseFlip {
            register,
            oracle: oracle.into(),
        }
    }

    pub fn oracle_xor(
        input: Register,
        output: Register,
        oracle: impl Into<Arc<OracleFunction>>,
    ) -> Gate {
        Gate::OracleXor {
            input,
            output,
            oracle: oracle.into(),
        }
    }

    pub fn permutation(register: Register, map: Vec<u64>) -> Gate {
        Gate::Permutation {
            register,
            map: Arc::new(map),
        }
    }

    /// Hadamards on every qubit of `register`, in order.
    pub fn hadamards(register: &Register) -> Vec<Gate> {
        register.qubits().iter().map(|&q| Gate::h(q)).collect()
    }

    /// Number of oracle queries charged for one application.
    pub fn queries(&self) -> u64 {
        match self {
            Gate::PhaseFlip { oracle, .. } | Gate::OracleXor { oracle, .. } => {
                oracle.counts_as_query as u64
            }
            _ => 0,
        }
    }

    pub fn validate(&self, qubits: usize) -> Result<()> {
        match self {
            Gate::Hadamard { target } => {
                if *target >= qubits {
                    return Err(Error::QubitOutOfRange {
                        qubit: *target,
                        qubits,
                    });
                }
            }
            Gate::PhaseFlip { register, oracle } => {
                register.validate(qubits)?;
                oracle.validate()?;
                check_width(oracle, "input", oracle.input_bits, register.width())?;
                if oracle.output_bits < 1 {
                    return Err(Error::MalformedOracle(
                        oracle.name.clone(),
                        "phase oracle needs an output bit".into(),
                    ));
                }
            }
            Gate::OracleXor {
                input,
                output,
                oracle,
            } => {
                input.concat(output).validate(qubits)?;
                oracle.validate()?;
                check_width(oracle, "input", oracle.input_bits, input.width())?;
                check_width(oracle, "output", oracle.output_bits, output.width())?;
            }
            Gate::Permutation { register, map } => {
                register.validate(qubits)?;
                let n = 1usize << register.width();
                if map.len() != n {
                    return Err(Error::InvalidPermutation(n));
                }
                let mut seen = vec![false; n];
                for &v in map.iter() {
                    let v = v as usize;
                    if v >= n || seen[v] {
                        return Err(Error::InvalidPermutation(n));
                    }
                    seen[v] = true;
                }
            }
        }
        Ok(())
    }

    /// Image of a basis index under a gate that permutes basis states
    /// (`None` for Hadamard). Phase flips fix every index.
    #[inline]
    pub fn image(&self, index: usize) -> Option<usize> {
        match self {
            Gate::Hadamard { .. } => None,
            Gate::PhaseFlip { .. } => Some(index),
            Gate::OracleXor {
                input,
                output,
                oracle,
            } => {
                let fx = oracle.eval(input.extract(index));
                Some(output.deposit(index, output.extract(index) ^ fx))
            }
            Gate::Permutation { register, map } => {
                Some(register.deposit(index, map[register.extract(index) as usize]))
            }
        }
    }

    /// Applies the gate in place. The caller is responsible for validation.
    pub fn apply_in_place<T: Scalar>(&self, amps: &mut Vec<Complex<T>>) {
        match self {
            Gate::Hadamard { target } => {
                let s = T::FRAC_1_SQRT_2();
                let stride = 1usize << target;
                for chunk in amps.chunks_exact_mut(stride << 1) {
                    let (lo, hi) = chunk.split_at_mut(stride);
                    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                        let (x, y) = (*a, *b);
                        *a = (x + y) * s;
                        *b = (x - y) * s;
                    }
                }
            }
            Gate::PhaseFlip { register, oracle } => {
                if register.width() <= TABULATE_LIMIT {
                    let flip: Vec<bool> = (0..1u64 << register.width())
                        .map(|v| oracle.eval(v) & 1 == 1)
                        .collect();
                    for (i, a) in amps.iter_mut().enumerate() {
                        if flip[register.extract(i) as usize] {
                            *a = -*a;
                        }
                    }
                } else {
                    for (i, a) in amps.iter_mut().enumerate() {
                        if oracle.eval(register.extract(i)) & 1 == 1 {
                            *a = -*a;
                        }
                    }
                }
            }
            Gate::OracleXor {
                input,
                output,
                oracle,
            } => {
                // XOR oracles are involutions: swap each 2-cycle once
                if input.width() <= TABULATE_LIMIT {
                    let masks: Vec<usize> = (0..1u64 << input.width())
                        .map(|v| output.deposit(0, oracle.eval(v)))
                        .collect();
                    for i in 0..amps.len() {
                        let j = i ^ masks[input.extract(i) as usize];
                        if j > i {
                            amps.swap(i, j);
                        }
                    }
                } else {
                    for i in 0..amps.len() {
                        let j = self.image(i).expect("oracle gates permute basis states");
                        if j > i {
                            amps.swap(i, j);
                        }
                    }
                }
            }
            Gate::Permutation { .. } => {
                let mut out = vec![Complex::new(T::zero(), T::zero()); amps.len()];
                for (i, a) in amps.iter().enumerate() {
                    out[self.image(i).expect("permutation gate")] = *a;
                }
                *amps = out;
            }
        }
    }
}

/// Amplitudes are tracked in pages of `2^PAGE_BITS`; a page flagged
/// inactive holds only zeros, so gates can skip it.
pub(crate) const PAGE_BITS: usize = 6;

impl Gate {
    /// Like [`apply_in_place`](Self::apply_in_place), touching only pages
    /// flagged in `pages` (or reachable from them) and keeping the flags
    /// sound: every nonzero amplitude lies in a flagged page afterwards.
    pub(crate) fn apply_paged<T: Scalar>(&self, amps: &mut Vec<Complex<T>>, pages: &mut [bool]) {
        let page = 1usize << PAGE_BITS;
        if pages.len() <= 1 {
            self.apply_in_place(amps);
            return;
        }
        let zero = Complex::new(T::zero(), T::zero());
        match self {
            Gate::Hadamard { target } if *target < PAGE_BITS => {
                let s = T::FRAC_1_SQRT_2();
                let stride = 1usize << target;
                for (p, chunk) in amps.chunks_exact_mut(page).enumerate() {
                    if !pages[p] {
                        continue;
                    }
                    for pair in chunk.chunks_exact_mut(stride << 1) {
                        let (lo, hi) = pair.split_at_mut(stride);
                        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                            let (x, y) = (*a, *b);
                            *a = (x + y) * s;
                            *b = (x - y) * s;
                        }
                    }
                }
            }
            Gate::Hadamard { target } => {
                let s = T::FRAC_1_SQRT_2();
                let pstride = 1usize << (target - PAGE_BITS);
                for p in 0..pages.len() {
                    let q = p | pstride;
                    if p & pstride != 0 || !(pages[p] || pages[q]) {
                        continue;
                    }
                    let (head, tail) = amps.split_at_mut(q * page);
                    let lo = &mut head[p * page..(p + 1) * page];
                    let hi = &mut tail[..page];
                    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                        let (x, y) = (*a, *b);
                        *a = (x + y) * s;
                        *b = (x - y) * s;
                    }
                    pages[p] = true;
                    pages[q] = true;
                }
            }
            Gate::PhaseFlip { register, oracle } => {
                let flip: Option<Vec<bool>> = (register.width() <= TABULATE_LIMIT).then(|| {
                    (0..1u64 << register.width())
                        .map(|v| oracle.eval(v) & 1 == 1)
                        .collect()
                });
                for (p, chunk) in amps.chunks_exact_mut(page).enumerate() {
                    if !pages[p] {
                        continue;
                    }
                    for (k, a) in chunk.iter_mut().enumerate() {
                        let v = register.extract(p * page + k);
                        let hit = match &flip {
                            Some(t) => t[v as usize],
                            None => oracle.eval(v) & 1 == 1,
                        };
                        if hit {
                            *a = -*a;
                        }
                    }
                }
            }
            Gate::OracleXor {
                input,
                output,
                oracle,
            } => {
                let masks: Option<Vec<usize>> = (input.width() <= TABULATE_LIMIT).then(|| {
                    (0..1u64 << input.width())
                        .map(|v| output.deposit(0, oracle.eval(v)))
                        .collect()
                });
                let mut woken = Vec::new();
                for p in 0..pages.len() {
                    if !pages[p] {
                        continue;
                    }
                    for i in p * page..(p + 1) * page {
                        let j = match &masks {
                            Some(m) => i ^ m[input.extract(i) as usize],
                            None => self.image(i).expect("oracle gates permute basis states"),
                        };
                        if j == i {
                            continue;
                        }
                        if pages[j >> PAGE_BITS] {
                            // both ends active: the smaller index does the swap
                            if j > i {
                                amps.swap(i, j);
                            }
                        } else if amps[i] != zero {
                            amps.swap(i, j);
                            woken.push(j >> PAGE_BITS);
                        }
                    }
                }
                for q in woken {
                    pages[q] = true;
                }
                retire_zero_pages(amps, pages);
            }
            Gate::Permutation { .. } => {
                let mut out = vec![zero; amps.len()];
                let mut next = vec![false; pages.len()];
                for p in 0..pages.len() {
                    if !pages[p] {
                        continue;
                    }
                    for i in p * page..(p + 1) * page {
                        if amps[i] != zero {
                            let j = self.image(i).expect("permutation gate");
                            out[j] = amps[i];
                            next[j >> PAGE_BITS] = true;
                        }
                    }
                }
                *amps = out;
                pages.copy_from_slice(&next);
            }
        }
    }
}

/// Clears the flag of every flagged page that holds only zeros.
pub(crate) fn retire_zero_pages<T: Scalar>(amps: &[Complex<T>], pages: &mut [bool]) {
    let zero = Complex::new(T::zero(), T::zero());
    for (flag, chunk) in pages.iter_mut().zip(amps.chunks(1 << PAGE_BITS)) {
        if *flag && chunk.iter().all(|a| *a == zero) {
            *flag = false;
        }
    }
}

fn check_width(
    oracle: &OracleFunction,
    side: &'static str,
    expected: usize,
    actual: usize,
) -> Result<()> {
    if expected != actual {
        return Err(Error::OracleWidth {
            name: oracle.name.clone(),
            side,
            expected,
            actual,
        });
    }
    Ok(())
}
