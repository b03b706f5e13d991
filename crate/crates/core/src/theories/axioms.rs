use num_complex::Complex;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{
    dense_kernel, BlockStructure, KernelOptions, TheoryKind, TransitionKernel, SPARSITY_ETA,
};
use crate::error::{Error, Result};
use crate::qsim::{DenseMatrix, PureState};
use crate::rng::substream;
use crate::scalar::Scalar;

/// `max_y |sum_x K[x][y] |alpha_x|^2 - |beta_y|^2|`.
pub fn check_marginalization<T: Scalar>(
    kernel: &TransitionKernel<T>,
    before: &PureState<T>,
    after: &PureState<T>,
) -> Result<T> {
    if kernel.dim() != before.dim() || kernel.dim() != after.dim() {
        return Err(Error::DimensionMismatch(kernel.dim(), before.dim()));
    }
    let pushed = kernel.push_forward(&before.born_distribution());
    Ok(pushed
        .iter()
        .zip(after.born_distribution())
        .map(|(a, b)| (*a - b).abs())
        .fold(T::zero(), T::max))
}

/// Largest `|row sum - 1|` over all rows.
pub fn row_stochasticity_defect<T: Scalar>(kernel: &TransitionKernel<T>) -> T {
    kernel
        .row_sums()
        .into_iter()
        .map(|s| (s - T::one()).abs())
        .fold(T::zero(), T::max)
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex<f64> {
    Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn cast<T: Scalar>(z: Complex<f64>) -> Complex<T> {
    Complex::new(T::of(z.re), T::of(z.im))
}

/// Haar-random pure state (normalized complex Gaussian vector).
pub fn random_state<T: Scalar, R: Rng + ?Sized>(
    qubits: usize,
    rng: &mut R,
) -> Result<PureState<T>> {
    let amps = (0..1usize << qubits)
        .map(|_| cast(gaussian_complex(rng)))
        .collect();
    PureState::normalized(amps)
}

/// Haar-random `dim x dim` unitary as column vectors, via modified
/// Gram–Schmidt on a complex Gaussian matrix.
fn haar_columns<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Vec<Complex<f64>>> {
    let mut cols: Vec<Vec<Complex<f64>>> = Vec::with_capacity(dim);
    for _ in 0..dim {
        let mut v: Vec<Complex<f64>> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        for c in &cols {
            let proj: Complex<f64> = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(c).for_each(|(b, a)| *b -= proj * a);
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
        cols.push(v);
    }
    cols
}

/// Haar-random unitary on `qubits` qubits.
pub fn random_unitary<T: Scalar, R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> DenseMatrix<T> {
    let cols = haar_columns(1usize << qubits, rng);
    DenseMatrix::from_columns(1usize << qubits, |from| {
        cols[from].iter().map(|&z| cast(z)).collect()
    })
    .expect("square by construction")
}

/// Random generalized block-diagonal unitary: a direct sum of Haar blocks
/// of random sizes (at most `max_block`), conjugated by independent random
/// permutations on the input and output sides.
pub fn random_block_unitary<T: Scalar, R: Rng + ?Sized>(
    qubits: usize,
    max_block: usize,
    rng: &mut R,
) -> DenseMatrix<T> {
    let dim = 1usize << qubits;
    let mut inputs: Vec<usize> = (0..dim).collect();
    let mut outputs: Vec<usize> = (0..dim).collect();
    inputs.shuffle(rng);
    outputs.shuffle(rng);
    let mut m = DenseMatrix::zeros(dim);
    let mut start = 0;
    while start < dim {
        let size = rng.random_range(1..=max_block.max(1)).min(dim - start);
        let block = haar_columns(size, rng);
        for (j, col) in block.iter().enumerate() {
            for (i, &z) in col.iter().enumerate() {
                m.set(outputs[start + i], inputs[start + j], cast(z));
            }
        }
        start += size;
    }
    m
}

/// A `(state, unitary)` pair on which the product kernel must cross
/// components: Hadamard on qubit 0 of two qubits applied to
/// `(|00> + |10>)/sqrt 2`, whose post-state charges both components.
pub fn product_witness<T: Scalar>() -> (PureState<T>, DenseMatrix<T>) {
    let r = T::FRAC_1_SQRT_2();
    let z = Complex::new(T::zero(), T::zero());
    let a = Complex::new(r, T::zero());
    let state = PureState::from_amplitudes(vec![a, z, a, z]).expect("normalized");
    let u = crate::qsim::slice_unitary(&[crate::qsim::Gate::h(0)], 2, 2).expect("2 qubits");
    (state, u)
}

/// Outcome of a robustness probe for one `(theory, state, unitary)` triple.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RobustnessProbe {
    pub epsilon: f64,
    pub trials: usize,
    /// `max |K[x][y] |alpha_x|^2 - K~[x][y] |alpha~_x|^2|` over all trials.
    pub deviation: f64,
}

impl RobustnessProbe {
    /// Deviation per unit perturbation (`None` when `epsilon == 0`).
    pub fn ratio(&self) -> Option<f64> {
        (self.epsilon > 0.0).then(|| self.deviation / self.epsilon)
    }
}

fn joint<T: Scalar>(k: &TransitionKernel<T>, p: &[T]) -> Vec<f64> {
    let n = k.dim();
    (0..n * n)
        .map(|i| (k.get(i / n, i % n) * p[i / n]).as_f64())
        .collect()
}

/// Perturbs `state` by at most `epsilon` in 2-norm (so its overlap with the
/// original is at least `1 - epsilon`) and `u` by right-multiplying with
/// rotations and phases of total angle at most `epsilon` (so every entry
/// moves by at most `epsilon`). Rotations only mix inputs whose columns in
/// `u` share a support, which leaves the sparsity pattern intact.
pub fn probe_robustness<T: Scalar>(
    theory: TheoryKind,
    state: &PureState<T>,
    u: &DenseMatrix<T>,
    epsilon: f64,
    trials: usize,
    seed: u64,
    opts: &KernelOptions,
) -> Result<RobustnessProbe> {
    let n = u.dim();
    let base = joint(
        &dense_kernel(theory, state, u, opts)?,
        &state.born_distribution(),
    );

    let eta = T::of(SPARSITY_ETA);
    let support =
        |x: usize| -> Vec<usize> { (0..n).filter(|&y| u.get(y, x).norm() > eta).collect() };
    let blocks = BlockStructure::of(u);
    let mut pairs = Vec::new();
    for block in blocks.input_blocks() {
        for (a, &i) in block.iter().enumerate() {
            for &j in &block[a + 1..] {
                if support(i) == support(j) {
                    pairs.push((i, j));
                }
            }
        }
    }

    let mut deviation = 0.0f64;
    for t in 0..trials {
        let mut rng = substream(seed, t as u64);
        // state: add a random vector of norm epsilon/2, renormalize
        let delta: Vec<Complex<f64>> = (0..n).map(|_| gaussian_complex(&mut rng)).collect();
        let dn = delta.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let amps: Vec<Complex<T>> = state
            .amplitudes()
            .iter()
            .zip(&delta)
            .map(|(a, d)| *a + cast(d * (epsilon / 2.0 / dn)))
            .collect();
        let state_p = PureState::normalized(amps)?;

        // unitary: U W with W = rotations (budget epsilon/2) times phases (each <= epsilon/2)
        let mut w: Vec<Vec<Complex<f64>>> = (0..n)
            .map(|x| {
                let phi: f64 = rng.random_range(-0.5..=0.5) * epsilon;
                let mut col = vec![Complex::new(0.0, 0.0); n];
                col[x] = Complex::from_polar(1.0, phi);
                col
            })
            .collect();
        if !pairs.is_empty() {
            let mut angles: Vec<f64> = pairs.iter().map(|_| rng.random_range(-1.0..=1.0)).collect();
            let total: f64 = angles.iter().map(|a: &f64| a.abs()).sum();
            if total > 0.0 {
                angles.iter_mut().for_each(|a| *a *= epsilon / 2.0 / total);
            }
            for (&(i, j), &theta) in pairs.iter().zip(&angles) {
                let (c, s) = (theta.cos(), theta.sin());
                let (ci, cj) = (w[i].clone(), w[j].clone());
                for r in 0..n {
                    w[i][r] = ci[r] * c + cj[r] * s;
                    w[j][r] = cj[r] * c - ci[r] * s;
                }
            }
        }
        let u_p = DenseMatrix::from_columns(n, |from| {
            (0..n)
                .map(|to| {
                    (0..n).fold(Complex::new(T::zero(), T::zero()), |acc, k| {
                        acc + u.get(to, k) * cast(w[from][k])
                    })
                })
                .collect()
        })?;

        let k_p = dense_kernel(theory, &state_p, &u_p, opts)?;
        let pert = joint(&k_p, &state_p.born_distribution());
        deviation = base
            .iter()
            .zip(&pert)
            .map(|(a, b)| (a - b).abs())
            .fold(deviation, f64::max);
    }
    Ok(RobustnessProbe {
        epsilon,
        trials,
        deviation,
    })
}
