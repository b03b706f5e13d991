use super::{
    flow_kernel_dense, sinkhorn_kernel, KernelOptions, TheoryKind, TransitionKernel, SPARSITY_ETA,
};
use crate::error::{Error, Result};
use crate::qsim::{DenseMatrix, PureState};
use crate::scalar::Scalar;

/// `K[x][y] = |beta_y|^2` for every source `x`.
pub fn product_kernel<T: Scalar>(
    state: &PureState<T>,
    u: &DenseMatrix<T>,
) -> Result<TransitionKernel<T>> {
    check_dims(state, u)?;
    let after = u.apply(state)?.born_distribution();
    let mut k = TransitionKernel::zeros(u.dim());
    for x in 0..u.dim() {
        for (y, &q) in after.iter().enumerate() {
            k.set(x, y, q);
        }
    }
    Ok(k)
}

/// Dense kernel of `theory` for the pair `(state, u)`.
pub fn dense_kernel<T: Scalar>(
    theory: TheoryKind,
    state: &PureState<T>,
    u: &DenseMatrix<T>,
    opts: &KernelOptions,
) -> Result<TransitionKernel<T>> {
    if state.qubits() > opts.dense_cap {
        return Err(Error::DimensionCap {
            what: "dense kernel",
            qubits: state.qubits(),
            cap: opts.dense_cap,
        });
    }
    match theory {
        TheoryKind::Product => product_kernel(state, u),
        TheoryKind::Flow => flow_kernel_dense(state, u),
        TheoryKind::Sinkhorn => {
            sinkhorn_kernel(state, u, opts.sinkhorn_tol, opts.sinkhorn_max_iter)
        }
    }
}

pub(super) fn check_dims<T: Scalar>(state: &PureState<T>, u: &DenseMatrix<T>) -> Result<()> {
    if state.dim() != u.dim() {
        return Err(Error::DimensionMismatch(state.dim(), u.dim()));
    }
    Ok(())
}

/// Row for a source with no mass: stay put if `U` allows it, otherwise jump
/// to the smallest output `U` connects it to. Either way the row respects the
/// sparsity pattern of `U`.
pub(super) fn fill_zero_mass_row<T: Scalar>(
    k: &mut TransitionKernel<T>,
    u: &DenseMatrix<T>,
    x: usize,
) {
    let eta = T::of(SPARSITY_ETA);
    let y = if u.get(x, x).norm() > eta {
        x
    } else {
        (0..u.dim())
            .find(|&y| u.get(y, x).norm() > eta)
            .unwrap_or(x)
    };
    for z in 0..u.dim() {
        k.set(x, z, T::zero());
    }
    k.set(x, y, T::one());
}
