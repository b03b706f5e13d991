use super::dense::{check_dims, fill_zero_mass_row};
use super::{TransitionKernel, SPARSITY_ETA};
use crate::error::{Error, Result};
use crate::qsim::{DenseMatrix, PureState};
use crate::scalar::Scalar;

/// Schrödinger-style kernel: the seed `|alpha_x| |U_yx| |beta_y|` rescaled
/// by alternating row and column normalization until its marginals match
/// the Born distributions before and after `U`.
pub fn sinkhorn_kernel<T: Scalar>(
    state: &PureState<T>,
    u: &DenseMatrix<T>,
    tol: f64,
    max_iter: usize,
) -> Result<TransitionKernel<T>> {
    check_dims(state, u)?;
    let n = u.dim();
    let p = state.born_distribution();
    let after = u.apply(state)?;
    let q = after.born_distribution();
    let eta = T::of(SPARSITY_ETA);
    let tol = T::of(tol).max(T::epsilon() * T::of(1e3));

    let mut m = vec![T::zero(); n * n];
    for x in 0..n {
        let a = state.amplitude(x).norm();
        for y in 0..n {
            let uyx = u.get(y, x).norm();
            if uyx > eta {
                m[x * n + y] = a * uyx * after.amplitude(y).norm();
            }
        }
    }

    let mut iterations = 0;
    let mut error;
    loop {
        // rows
        for x in 0..n {
            let s = m[x * n..(x + 1) * n].iter().fold(T::zero(), |s, &v| s + v);
            if s > T::zero() {
                let f = p[x] / s;
                m[x * n..(x + 1) * n].iter_mut().for_each(|v| *v = *v * f);
            }
        }
        // columns, tracking how far they were off before rescaling
        error = T::zero();
        for y in 0..n {
            let s = (0..n).fold(T::zero(), |s, x| s + m[x * n + y]);
            error = error.max((s - q[y]).abs());
            if s > T::zero() {
                let f = q[y] / s;
                (0..n).for_each(|x| m[x * n + y] = m[x * n + y] * f);
            }
        }
        iterations += 1;
        if error <= tol {
            break;
        }
        if iterations >= max_iter || !error.is_finite() {
            return Err(Error::ScalingDiverged {
                iterations,
                error: error.as_f64(),
            });
        }
    }

    let mut k = TransitionKernel::zeros(n);
    for x in 0..n {
        let row = &m[x * n..(x + 1) * n];
        let s = row.iter().fold(T::zero(), |s, &v| s + v);
        if p[x] > T::mass_floor() && s > T::zero() {
            for (y, &v) in row.iter().enumerate() {
                k.set(x, y, v / s);
            }
        } else {
            fill_zero_mass_row(&mut k, u, x);
        }
    }
    Ok(k)
}
