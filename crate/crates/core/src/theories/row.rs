use super::{dense_kernel, Granularity, KernelOptions, KernelRow, TheoryKind};
use crate::error::{Error, Result};
use crate::qsim::{slice_unitary, Gate, PureState};
use crate::scalar::Scalar;

/// Kernel row of `theory` for one gate taking `before` to `after`.
///
/// Basis-permuting gates move `from` to its image. A Hadamard couples `from`
/// with its partner on the target qubit; the 2x2 block is solved in closed
/// form (north-west-corner coupling for the flow theory, which is what
/// shortest-path-first lexicographic augmentation produces on a 2x2 block,
/// and the rank-one scaling solution for the Sinkhorn theory).
pub fn gate_row<T: Scalar>(
    theory: TheoryKind,
    before: &PureState<T>,
    after: &PureState<T>,
    gate: &Gate,
    from: usize,
) -> KernelRow<T> {
    if theory == TheoryKind::Product {
        return KernelRow::from_dense(&after.born_distribution());
    }
    let target = match (gate, gate.image(from)) {
        (_, Some(to)) => return KernelRow::point(to),
        (Gate::Hadamard { target }, None) => *target,
        _ => unreachable!("only Hadamard gates mix basis states"),
    };
    let bit = 1usize << target;
    let (lo, hi) = (from & !bit, from | bit);
    block_row(
        theory,
        [before.mass(lo), before.mass(hi)],
        [after.mass(lo), after.mass(hi)],
        from,
        lo,
        hi,
    )
}

/// Same as [`gate_row`], reading the post-gate block masses off the
/// pre-gate amplitudes so the caller can skip materializing `after`.
pub(crate) fn gate_row_from_before<T: Scalar>(
    theory: TheoryKind,
    before: &PureState<T>,
    gate: &Gate,
    from: usize,
) -> KernelRow<T> {
    let target = match (gate, gate.image(from)) {
        (_, Some(to)) => return KernelRow::point(to),
        (Gate::Hadamard { target }, None) => *target,
        _ => unreachable!("only Hadamard gates mix basis states"),
    };
    let bit = 1usize << target;
    let (lo, hi) = (from & !bit, from | bit);
    let (a, b) = (before.amplitude(lo), before.amplitude(hi));
    let half = T::of(0.5);
    block_row(
        theory,
        [a.norm_sqr(), b.norm_sqr()],
        [(a + b).norm_sqr() * half, (a - b).norm_sqr() * half],
        from,
        lo,
        hi,
    )
}

fn block_row<T: Scalar>(
    theory: TheoryKind,
    p: [T; 2],
    q: [T; 2],
    from: usize,
    lo: usize,
    hi: usize,
) -> KernelRow<T> {
    let floor = T::mass_floor();
    let ([p_lo, p_hi], [q_lo, q_hi]) = (p, q);
    let p_from = if from == lo { p_lo } else { p_hi };
    if p_from <= floor || q_lo + q_hi <= floor {
        return KernelRow::point(from);
    }
    let (to_lo, to_hi) = match theory {
        TheoryKind::Flow => {
            let f00 = p_lo.min(q_lo);
            if from == lo {
                let f01 = (p_lo - f00).min(q_hi).max(T::zero());
                (f00, f01)
            } else {
                let f10 = p_hi.min(q_lo - f00).max(T::zero());
                (f10, (p_hi - f10).max(T::zero()))
            }
        }
        TheoryKind::Sinkhorn => (q_lo, q_hi),
        TheoryKind::Product => unreachable!("product rows are global"),
    };
    let s = to_lo + to_hi;
    if s <= T::zero() {
        return KernelRow::point(from);
    }
    KernelRow::from_entries(vec![(lo, to_lo / s), (hi, to_hi / s)])
}

/// Pushes a distribution over basis indices through one gate.
pub fn push_through_gate<T: Scalar>(
    theory: TheoryKind,
    before: &PureState<T>,
    after: &PureState<T>,
    gate: &Gate,
    dist: &KernelRow<T>,
) -> KernelRow<T> {
    if theory == TheoryKind::Product {
        return KernelRow::from_dense(&after.born_distribution());
    }
    let mut out = Vec::with_capacity(dist.entries().len() * 2);
    for &(v, m) in dist.entries() {
        for &(w, p) in gate_row(theory, before, after, gate, v).entries() {
            out.push((w, m * p));
        }
    }
    KernelRow::from_entries(out)
}

/// Row `from` of the kernel for a whole slice applied to `before`.
///
/// Gate granularity chains per-gate rows; slice granularity builds the dense
/// slice unitary and kernel (subject to `opts.dense_cap`).
pub fn kernel_row<T: Scalar>(
    theory: TheoryKind,
    before: &PureState<T>,
    slice: &[Gate],
    from: usize,
    opts: &KernelOptions,
) -> Result<KernelRow<T>> {
    if from >= before.dim() {
        return Err(Error::DimensionMismatch(from, before.dim()));
    }
    match opts.granularity {
        Granularity::Gate => {
            let mut state = before.clone();
            let mut dist = KernelRow::point(from);
            for gate in slice {
                let next = state.apply_gate(gate)?;
                dist = push_through_gate(theory, &state, &next, gate, &dist);
                state = next;
            }
            Ok(dist)
        }
        Granularity::Slice => {
            let u = slice_unitary(slice, before.qubits(), opts.dense_cap)?;
            let k = dense_kernel(theory, before, &u, opts)?;
            Ok(KernelRow::from_dense(k.row(from)))
        }
    }
}
