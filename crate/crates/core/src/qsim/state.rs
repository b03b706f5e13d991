use num_complex::Complex;

use super::gate::{retire_zero_pages, PAGE_BITS};
use super::Gate;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest register a state vector may span.
pub const MAX_STATE_QUBITS: usize = 26;

/// A basis state `|x>`; qubit `j` is bit `j` of the value (qubit 0 is the
/// least significant bit).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex(pub usize);

impl BasisIndex {
    pub fn bit(self, qubit: usize) -> bool {
        self.0 >> qubit & 1 == 1
    }

    /// Binary numeral of width `qubits`, most significant qubit first.
    pub fn bitstring(self, qubits: usize) -> String {
        (0..qubits)
            .rev()
            .map(|q| if self.bit(q) { '1' } else { '0' })
            .collect()
    }
}

/// Tolerance on the squared norm of a state at precision `T`.
pub fn norm_tolerance<T: Scalar>() -> T {
    T::of(1e-10).max(T::epsilon() * T::of(1e3))
}

/// Pure state of `qubits` qubits as a dense amplitude vector. Pages of
/// amplitudes known to be zero are flagged so gates can skip them.
#[derive(Clone, Debug)]
pub struct PureState<T> {
    qubits: usize,
    amps: Vec<Complex<T>>,
    pages: Vec<bool>,
}

impl<T: PartialEq> PartialEq for PureState<T> {
    fn eq(&self, other: &Self) -> bool {
        self.qubits == other.qubits && self.amps == other.amps
    }
}

fn page_flags<T: Scalar>(amps: &[Complex<T>]) -> Vec<bool> {
    let mut pages = vec![true; amps.len().div_ceil(1 << PAGE_BITS)];
    retire_zero_pages(amps, &mut pages);
    pages
}

impl<T: Scalar> PureState<T> {
    /// `|0...0>`.
    pub fn zero(qubits: usize) -> Result<Self> {
        Self::basis(qubits, 0)
    }

    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        if qubits > MAX_STATE_QUBITS {
            return Err(Error::DimensionCap {
                what: "state vector",
                qubits,
                cap: MAX_STATE_QUBITS,
            });
        }
        let dim = 1usize << qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch(index, dim));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
        amps[index] = Complex::new(T::one(), T::zero());
        let pages = page_flags(&amps);
        Ok(PureState {
            qubits,
            amps,
            pages,
        })
    }

    /// Wraps an amplitude vector, which must be normalized.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(Error::BadLength(len));
        }
        let state = PureState {
            qubits: len.trailing_zeros() as usize,
            pages: page_flags(&amps),
            amps,
        };
        let n = state.norm_sqr();
        if !n.is_finite() || (n - T::one()).abs() > norm_tolerance::<T>() {
            return Err(Error::NotNormalized(n.as_f64()));
        }
        Ok(state)
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalized(amps: Vec<Complex<T>>) -> Result<Self> {
        let n: T = amps
            .iter()
            .map(|a| a.norm_sqr())
            .fold(T::zero(), |s, x| s + x);
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::NotNormalized(n.as_f64()));
        }
        let inv = T::one() / n.sqrt();
        Self::from_amplitudes(amps.into_iter().map(|a| a * inv).collect())
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amps[index]
    }

    /// Born probability of basis state `index`.
    #[inline]
    pub fn mass(&self, index: usize) -> T {
        self.amps[index].norm_sqr()
    }

    pub fn norm_sqr(&self) -> T {
        self.amps
            .iter()
            .map(|a| a.norm_sqr())
            .fold(T::zero(), |s, x| s + x)
    }

    /// Outcome distribution of a computational-basis measurement.
    pub fn born_distribution(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::new(T::zero(), T::zero()), |s, (a, b)| {
                s + a.conj() * b
            })
    }

    /// Largest entrywise amplitude difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn is_finite(&self) -> bool {
        self.pages
            .iter()
            .zip(self.amps.chunks(1 << PAGE_BITS))
            .filter(|(flag, _)| **flag)
            .all(|(_, chunk)| chunk.iter().all(|a| a.re.is_finite() && a.im.is_finite()))
    }

    /// `U |psi>` for the gate's unitary.
    pub fn apply_gate(&self, gate: &Gate) -> Result<Self> {
        let mut next = self.clone();
        next.apply_gate_mut(gate)?;
        Ok(next)
    }

    pub fn apply_gate_mut(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.qubits)?;
        gate.apply_paged(&mut self.amps, &mut self.pages);
        Ok(())
    }

    /// Applies a gate already validated against this state's width.
    pub(crate) fn apply_validated(&mut self, gate: &Gate) {
        gate.apply_paged(&mut self.amps, &mut self.pages);
    }
}

/// Squared-modulus Born distribution.
pub fn born_distribution<T: Scalar>(state: &PureState<T>) -> Vec<T> {
    state.born_distribution()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{OracleFunction, Register};

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn hadamard_on_zero_gives_plus() {
        let s = PureState::<f64>::zero(1)
            .unwrap()
            .apply_gate(&Gate::h(0))
            .unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitude(0) - c(r)).norm() < 1e-15);
        assert!((s.amplitude(1) - c(r)).norm() < 1e-15);
        assert_eq!(
            s.born_distribution()
                .iter()
                .map(|p| (p * 2.0).round())
                .collect::<Vec<_>>(),
            vec![1.0, 1.0]
        );
    }

    #[test]
    fn oracle_xor_copies_input_into_zero_output() {
        // |x>|0> with f(x) = x
        let f = OracleFunction::tabulate("id", 2, 2, |x| x).unwrap();
        let gate = Gate::oracle_xor(Register::range(0, 2), Register::range(2, 2), f);
        for x in 0..4 {
            let s = PureState::<f64>::basis(4, x)
                .unwrap()
                .apply_gate(&gate)
                .unwrap();
            assert_eq!(s.mass(x | x << 2), 1.0);
        }
    }

    #[test]
    fn out_of_range_and_width_errors() {
        let s = PureState::<f64>::zero(2).unwrap();
        assert!(matches!(
            s.apply_gate(&Gate::h(2)),
            Err(Error::QubitOutOfRange { .. })
        ));
        let f = OracleFunction::tabulate("f", 2, 1, |x| x & 1).unwrap();
        let gate = Gate::oracle_xor(Register::range(0, 1), Register::range(1, 1), f);
        assert!(matches!(
            s.apply_gate(&gate),
            Err(Error::OracleWidth { .. })
        ));
    }

    #[test]
    fn born_examples() {
        let s = PureState::<f64>::zero(2).unwrap();
        let s = s
            .apply_gate(&Gate::h(0))
            .unwrap()
            .apply_gate(&Gate::h(1))
            .unwrap();
        for p in born_distribution(&s) {
            assert!((p - 0.25).abs() < 1e-15);
        }
        let b = PureState::<f64>::basis(3, 5).unwrap().born_distribution();
        assert_eq!(b, vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn rejects_unnormalized_and_bad_length() {
        assert!(PureState::from_amplitudes(vec![c(1.0), c(1.0)]).is_err());
        assert!(PureState::from_amplitudes(vec![c(1.0), c(0.0), c(0.0)]).is_err());
        assert!(PureState::<f64>::zero(MAX_STATE_QUBITS + 1).is_err());
    }

    #[test]
    fn bitstring_is_msb_first() {
        assert_eq!(BasisIndex(0b011).bitstring(4), "0011");
    }
}
