use num_complex::Complex;

use super::{Gate, PureState};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default cap on qubit count for dense `2^l x 2^l` matrices.
pub const DEFAULT_DENSE_CAP: usize = 12;

/// Dense complex square matrix; `get(to, from)` is `<to|U|from>`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        DenseMatrix {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex::new(T::one(), T::zero()));
        }
        m
    }

    /// Builds the matrix column by column: `column(from)` is `U|from>`.
    pub fn from_columns(
        dim: usize,
        mut column: impl FnMut(usize) -> Vec<Complex<T>>,
    ) -> Result<Self> {
        let mut m = Self::zeros(dim);
        for from in 0..dim {
            let col = column(from);
            if col.len() != dim {
                return Err(Error::DimensionMismatch(col.len(), dim));
            }
            for (to, v) in col.into_iter().enumerate() {
                m.set(to, from, v);
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, to: usize, from: usize) -> Complex<T> {
        self.data[to * self.dim + from]
    }

    #[inline]
    pub fn set(&mut self, to: usize, from: usize, v: Complex<T>) {
        self.data[to * self.dim + from] = v;
    }

    /// Matrix product `self * rhs` (apply `rhs` first).
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch(self.dim, rhs.dim));
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// `max |(U^dagger U - I)_{ij}|`.
    pub fn unitarity_residual(&self) -> T {
        let p = self.adjoint().mul(self).expect("square");
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((p.get(i, j) - Complex::new(target, T::zero())).norm());
            }
        }
        worst
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn apply(&self, state: &PureState<T>) -> Result<PureState<T>> {
        if state.dim() != self.dim {
            return Err(Error::DimensionMismatch(state.dim(), self.dim));
        }
        let amps = (0..self.dim)
            .map(|to| {
                (0..self.dim).fold(Complex::new(T::zero(), T::zero()), |s, from| {
                    s + self.get(to, from) * state.amplitude(from)
                })
            })
            .collect();
        PureState::normalized(amps)
    }

    /// Number of entries per row with modulus above `threshold`.
    pub fn row_support(&self, to: usize, threshold: T) -> usize {
        (0..self.dim)
            .filter(|&from| self.get(to, from).norm() > threshold)
            .count()
    }
}

/// Dense unitary of a gate list on `qubits` qubits, capped at `cap` qubits.
pub fn slice_unitary<T: Scalar>(
    slice: &[Gate],
    qubits: usize,
    cap: usize,
) -> Result<DenseMatrix<T>> {
    if qubits > cap {
        return Err(Error::DimensionCap {
            what: "dense matrix",
            qubits,
            cap,
        });
    }
    for gate in slice {
        gate.validate(qubits)?;
    }
    let dim = 1usize << qubits;
    DenseMatrix::from_columns(dim, |from| {
        let mut s = PureState::basis(qubits, from).expect("within cap");
        for gate in slice {
            s.apply_validated(gate);
        }
        s.amplitudes().to_vec()
    })
}
