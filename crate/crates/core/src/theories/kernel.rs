use std::io::Write;

use super::TheoryKind;
use crate::error::Result;
use crate::scalar::Scalar;

/// Row-stochastic matrix with `get(from, to)` the transition probability.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionKernel<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> TransitionKernel<T> {
    pub fn zeros(dim: usize) -> Self {
        TransitionKernel {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "kernel must be square");
        TransitionKernel {
            dim,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> T {
        self.data[from * self.dim + to]
    }

    #[inline]
    pub fn set(&mut self, from: usize, to: usize, p: T) {
        self.data[from * self.dim + to] = p;
    }

    pub fn row(&self, from: usize) -> &[T] {
        &self.data[from * self.dim..(from + 1) * self.dim]
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.dim)
            .map(|x| self.row(x).iter().fold(T::zero(), |s, &p| s + p))
            .collect()
    }

    /// `sum_x mass[x] K[x][.]`.
    pub fn push_forward(&self, mass: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim];
        for (x, &m) in mass.iter().enumerate() {
            if m == T::zero() {
                continue;
            }
            for (y, o) in out.iter_mut().enumerate() {
                *o = *o + m * self.get(x, y);
            }
        }
        out
    }

    /// Matrix product: first `self`, then `next`.
    pub fn then(&self, next: &Self) -> Self {
        let mut out = Self::zeros(self.dim);
        for x in 0..self.dim {
            let row = next.push_forward(self.row(x));
            for (y, p) in row.into_iter().enumerate() {
                out.set(x, y, p);
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max)
    }

    /// CSV export: a `dimension,theory` header line, then one line per row.
    pub fn write_csv<W: Write>(&self, theory: TheoryKind, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
        w.write_record(["dimension", "theory"])?;
        w.write_record([self.dim.to_string(), theory.to_string()])?;
        for x in 0..self.dim {
            w.write_record(self.row(x).iter().map(|p| p.as_f64().to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self, theory: TheoryKind) -> String {
        let mut buf = Vec::new();
        self.write_csv(theory, &mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("ascii")
    }
}

/// Sparse probability vector over basis indices, sorted by index.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelRow<T> {
    entries: Vec<(usize, T)>,
}

impl<T: Scalar> KernelRow<T> {
    /// Builds a row from `(index, probability)` pairs, merging duplicates and
    /// dropping zeros.
    pub fn from_entries(mut entries: Vec<(usize, T)>) -> Self {
        entries.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, T)> = Vec::with_capacity(entries.len());
        for (i, p) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 = last.1 + p,
                _ => merged.push((i, p)),
            }
        }
        merged.retain(|e| e.1 > T::zero());
        KernelRow { entries: merged }
    }

    pub fn point(index: usize) -> Self {
        KernelRow {
            entries: vec![(index, T::one())],
        }
    }

    pub fn from_dense(probs: &[T]) -> Self {
        KernelRow {
            entries: probs
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > T::zero())
                .map(|(i, &p)| (i, p))
                .collect(),
        }
    }

    pub fn entries(&self) -> &[(usize, T)] {
        &self.entries
    }

    pub fn get(&self, index: usize) -> T {
        self.entries
            .binary_search_by_key(&index, |e| e.0)
            .map(|k| self.entries[k].1)
            .unwrap_or_else(|_| T::zero())
    }

    pub fn sum(&self) -> T {
        self.entries.iter().fold(T::zero(), |s, e| s + e.1)
    }

    pub fn to_dense(&self, dim: usize) -> Vec<T> {
        let mut out = vec![T::zero(); dim];
        for &(i, p) in &self.entries {
            out[i] = p;
        }
        out
    }

    /// Inverse-CDF sample for a uniform `u` in `[0, 1)`, scaled by the row
    /// total so rounding in the row sum never biases the last entry.
    pub fn sample(&self, u: f64) -> Option<usize> {
        let total = self.sum().as_f64();
        let target = u * total;
        let mut acc = 0.0;
        for &(i, p) in &self.entries {
            acc += p.as_f64();
            if target < acc {
                return Some(i);
            }
        }
        self.entries.last().map(|e| e.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_merges_and_samples() {
        let r = KernelRow::from_entries(vec![(3, 0.25f64), (1, 0.5), (3, 0.25), (7, 0.0)]);
        assert_eq!(r.entries(), &[(1, 0.5), (3, 0.5)]);
        assert_eq!(r.sample(0.0), Some(1));
        assert_eq!(r.sample(0.49), Some(1));
        assert_eq!(r.sample(0.51), Some(3));
        assert_eq!(r.sample(0.999_999), Some(3));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let k = TransitionKernel::from_rows(vec![vec![1.0f64, 0.0], vec![0.5, 0.5]]);
        assert_eq!(
            k.to_csv(TheoryKind::Flow),
            "dimension,theory\n2,flow\n1,0\n0.5,0.5\n"
        );
    }
}
