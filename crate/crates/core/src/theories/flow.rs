use super::dense::{check_dims, fill_zero_mass_row};
use super::{LexMaxFlow, TransitionKernel, SPARSITY_ETA};
use crate::error::{Error, Result};
use crate::qsim::{DenseMatrix, PureState};
use crate::scalar::Scalar;

/// Flow-theory kernel from a lexicographic max flow on the network
/// `source -> x -> y -> sink` with capacities `|alpha_x|^2`, unbounded on the
/// nonzero pattern of `U`, and `|beta_y|^2`.
pub fn flow_kernel_dense<T: Scalar>(
    state: &PureState<T>,
    u: &DenseMatrix<T>,
) -> Result<TransitionKernel<T>> {
    check_dims(state, u)?;
    let n = u.dim();
    let p = state.born_distribution();
    let q = u.apply(state)?.born_distribution();
    let eta = T::of(SPARSITY_ETA);
    // node ids: source 0, inputs 1..=n, outputs n+1..=2n, sink 2n+1
    let (source, sink) = (0, 2 * n + 1);
    let mut g = LexMaxFlow::new(2 * n + 2);
    let total = p.iter().fold(T::zero(), |s, &m| s + m);
    let big = total + T::one();
    for (x, &m) in p.iter().enumerate() {
        g.add_edge(source, 1 + x, m);
    }
    let mut mid = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if u.get(y, x).norm() > eta {
                mid.push((x, y, g.add_edge(1 + x, 1 + n + y, big)));
            }
        }
    }
    for (y, &m) in q.iter().enumerate() {
        g.add_edge(1 + n + y, sink, m);
    }
    let value = g.run(source, sink);
    let slack = T::of(1e-7).max(T::epsilon() * T::of(1e4));
    if value < total - slack {
        return Err(Error::FlowDeficit {
            value: value.as_f64(),
            expected: total.as_f64(),
        });
    }

    let mut outflow = vec![T::zero(); n];
    for &(x, _, e) in &mid {
        outflow[x] = outflow[x] + g.flow(e);
    }
    let mut k = TransitionKernel::zeros(n);
    for &(x, y, e) in &mid {
        if outflow[x] > T::mass_floor() {
            k.set(x, y, g.flow(e) / outflow[x]);
        }
    }
    for x in 0..n {
        if outflow[x] <= T::mass_floor() {
            fill_zero_mass_row(&mut k, u, x);
        }
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{slice_unitary, Gate};
    use num_complex::Complex;

    #[test]
    fn identity_gives_identity_kernel() {
        let s = PureState::<f64>::normalized(vec![Complex::new(1.0, 0.0), Complex::new(0.0, 2.0)])
            .unwrap();
        let k = flow_kernel_dense(&s, &DenseMatrix::identity(2)).unwrap();
        assert_eq!(
            k,
            TransitionKernel::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]])
        );
    }

    #[test]
    fn point_mass_splits_evenly() {
        let s = PureState::<f64>::zero(1).unwrap();
        let u = slice_unitary(&[Gate::h(0)], 1, 4).unwrap();
        let k = flow_kernel_dense(&s, &u).unwrap();
        assert!((k.get(0, 0) - 0.5).abs() < 1e-12 && (k.get(0, 1) - 0.5).abs() < 1e-12);
    }
}
