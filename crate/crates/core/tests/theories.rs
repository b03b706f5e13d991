use hidden_history::qsim::{slice_unitary, DenseMatrix, Gate, PureState, Register};
use hidden_history::rng::substream;
use hidden_history::theories::{
    check_indifference, check_marginalization, dense_kernel, flow_kernel_dense, kernel_row,
    probe_robustness, product_kernel, product_witness, random_block_unitary, random_state,
    random_unitary, row_stochasticity_defect, sinkhorn_kernel, BlockStructure, KernelOptions,
    TheoryKind, TransitionKernel,
};
use num_complex::Complex;
use proptest::prelude::*;

fn real_state(amps: &[f64]) -> PureState<f64> {
    PureState::normalized(amps.iter().map(|&a| Complex::new(a, 0.0)).collect()).unwrap()
}

fn hadamard_layer(l: usize) -> DenseMatrix<f64> {
    slice_unitary(&(0..l).map(Gate::h).collect::<Vec<_>>(), l, 12).unwrap()
}

/// North-west-corner coupling of `p` and `q`, the lexicographically largest
/// joint matrix when every transition is allowed. Returned as a kernel.
fn nw_corner(p: &[f64], q: &[f64]) -> Vec<Vec<f64>> {
    let n = p.len();
    let mut joint = vec![vec![0.0; n]; n];
    let (mut rest_p, mut rest_q) = (p.to_vec(), q.to_vec());
    for x in 0..n {
        for y in 0..n {
            let m = rest_p[x].min(rest_q[y]);
            joint[x][y] = m;
            rest_p[x] -= m;
            rest_q[y] -= m;
        }
    }
    (0..n)
        .map(|x| {
            joint[x]
                .iter()
                .map(|j| if p[x] > 0.0 { j / p[x] } else { 0.0 })
                .collect()
        })
        .collect()
}

#[test]
fn flow_example_one_third_two_thirds() {
    let s = real_state(&[(1.0f64 / 3.0).sqrt(), (2.0f64 / 3.0).sqrt()]);
    let k = flow_kernel_dense(&s, &hadamard_layer(1)).unwrap();
    let q0 = (1.0 + 2.0 * 2f64.sqrt() / 3.0) / 2.0;
    let oracle = nw_corner(&[1.0 / 3.0, 2.0 / 3.0], &[q0, 1.0 - q0]);
    for x in 0..2 {
        for y in 0..2 {
            assert!((k.get(x, y) - oracle[x][y]).abs() < 1e-12);
        }
    }
    assert!((k.get(0, 0) - 1.0).abs() < 1e-12);
    assert!((k.get(1, 0) - 0.9571).abs() < 1e-4 && (k.get(1, 1) - 0.0429).abs() < 1e-4);
}

#[test]
fn forced_splits_and_identities() {
    let zero = PureState::<f64>::zero(1).unwrap();
    let h = hadamard_layer(1);
    for theory in TheoryKind::ALL {
        let k = dense_kernel(theory, &zero, &h, &KernelOptions::default()).unwrap();
        assert!((k.get(0, 0) - 0.5).abs() < 1e-12 && (k.get(0, 1) - 0.5).abs() < 1e-12);
    }
    let mut rng = substream(1, 0);
    let s = random_state::<f64, _>(2, &mut rng).unwrap();
    let id = DenseMatrix::<f64>::identity(4);
    for theory in [TheoryKind::Flow, TheoryKind::Sinkhorn] {
        let k = dense_kernel(theory, &s, &id, &KernelOptions::default()).unwrap();
        assert!(
            k.max_abs_diff(&TransitionKernel::from_rows(
                (0..4)
                    .map(|x| (0..4).map(|y| (x == y) as u8 as f64).collect())
                    .collect()
            )) < 1e-9
        );
    }
    let k = product_kernel(&s, &id).unwrap();
    for x in 0..4 {
        for y in 0..4 {
            assert!((k.get(x, y) - s.mass(y)).abs() < 1e-15);
        }
    }
    let plus = real_state(&[1.0, 1.0]);
    let k = product_kernel(&plus, &h).unwrap();
    assert!((k.get(0, 0) - 1.0).abs() < 1e-12 && (k.get(1, 0) - 1.0).abs() < 1e-12);
}

#[test]
fn permutations_give_deterministic_flow() {
    let u = slice_unitary::<f64>(
        &[Gate::permutation(Register::range(0, 2), vec![1, 3, 0, 2])],
        2,
        12,
    )
    .unwrap();
    let s = random_state::<f64, _>(2, &mut substream(4, 0)).unwrap();
    let k = flow_kernel_dense(&s, &u).unwrap();
    for (x, y) in [(0, 1), (1, 3), (2, 0), (3, 2)] {
        assert_eq!(k.get(x, y), 1.0);
    }
    let blocks = BlockStructure::of(&u);
    assert_eq!(blocks.component_count(), 4);
    assert!(blocks.connected(2, 0) && !blocks.connected(2, 1));
}

#[test]
fn hadamard_on_high_qubit_blocks() {
    // H on qubit 1 of two: {|00>, |10>} and {|01>, |11>} in MSB-first bitstrings
    let u = slice_unitary::<f64>(&[Gate::h(1)], 2, 12).unwrap();
    let blocks = BlockStructure::of(&u);
    assert_eq!(blocks.input_blocks(), vec![vec![0, 2], vec![1, 3]]);
    let s = random_state::<f64, _>(2, &mut substream(2, 0)).unwrap();
    assert!(check_indifference(&flow_kernel_dense(&s, &u).unwrap(), &u).is_empty());
    assert!(!check_indifference(&product_kernel(&s, &u).unwrap(), &u).is_empty());
}

#[test]
fn product_witness_is_caught() {
    let (s, u) = product_witness::<f64>();
    let k = product_kernel(&s, &u).unwrap();
    assert!(!check_indifference(&k, &u).is_empty());
    assert!(check_marginalization(&k, &s, &u.apply(&s).unwrap()).unwrap() < 1e-12);
    assert!(check_indifference(&flow_kernel_dense(&s, &u).unwrap(), &u).is_empty());
}

#[test]
fn corrupted_kernel_is_detected() {
    let s = random_state::<f64, _>(3, &mut substream(5, 0)).unwrap();
    let u = random_unitary::<f64, _>(3, &mut substream(5, 1));
    let after = u.apply(&s).unwrap();
    let mut k = flow_kernel_dense(&s, &u).unwrap();
    assert!(check_marginalization(&k, &s, &after).unwrap() <= 1e-7);
    // one entry +0.1 on the heaviest source
    let x = (0..8)
        .max_by(|&a, &b| s.mass(a).total_cmp(&s.mass(b)))
        .unwrap();
    k.set(x, 0, k.get(x, 0) + 0.1);
    assert!(check_marginalization(&k, &s, &after).unwrap() >= 0.01);
    assert!(row_stochasticity_defect(&k) >= 0.1 - 1e-12);
}

/// Sinkhorn fixed point for a 2x2 positive seed: the cross ratio
/// `J00 J11 / (J01 J10)` is invariant under scaling, so `J00 = t` solves
/// `t (1 - p0 - q0 + t) = rho (p0 - t)(q0 - t)`.
fn sinkhorn_2x2(seed: [[f64; 2]; 2], p0: f64, q0: f64) -> [[f64; 2]; 2] {
    let rho = seed[0][0] * seed[1][1] / (seed[0][1] * seed[1][0]);
    // (1 - rho) t^2 + (1 - p0 - q0 + rho (p0 + q0)) t - rho p0 q0 = 0
    let a = 1.0 - rho;
    let b = 1.0 - p0 - q0 + rho * (p0 + q0);
    let c = -rho * p0 * q0;
    let lo = (p0 + q0 - 1.0).max(0.0);
    let hi = p0.min(q0);
    let t = if a.abs() < 1e-14 {
        -c / b
    } else {
        let d = (b * b - 4.0 * a * c).sqrt();
        [(-b + d) / (2.0 * a), (-b - d) / (2.0 * a)]
            .into_iter()
            .find(|t| *t >= lo - 1e-12 && *t <= hi + 1e-12)
            .unwrap()
    };
    [
        [t / p0, (p0 - t) / p0],
        [(q0 - t) / (1.0 - p0), (1.0 - p0 - q0 + t) / (1.0 - p0)],
    ]
}

#[test]
fn sinkhorn_matches_cross_ratio_solution() {
    for (a, b) in [(0.3f64, 0.8f64), (1.0, 2.0), (0.9, -0.2)] {
        let s = real_state(&[a, b]);
        let u = random_unitary::<f64, _>(1, &mut substream((a * 100.0) as u64, 0));
        let after = u.apply(&s).unwrap();
        let seed = [
            [
                s.amplitude(0).norm() * u.get(0, 0).norm() * after.amplitude(0).norm(),
                s.amplitude(0).norm() * u.get(1, 0).norm() * after.amplitude(1).norm(),
            ],
            [
                s.amplitude(1).norm() * u.get(0, 1).norm() * after.amplitude(0).norm(),
                s.amplitude(1).norm() * u.get(1, 1).norm() * after.amplitude(1).norm(),
            ],
        ];
        let oracle = sinkhorn_2x2(seed, s.mass(0), after.mass(0));
        let k = sinkhorn_kernel(&s, &u, 1e-12, 100_000).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert!(
                    (k.get(x, y) - oracle[x][y]).abs() < 1e-8,
                    "{x}{y}: {} vs {}",
                    k.get(x, y),
                    oracle[x][y]
                );
            }
        }
        assert!(check_marginalization(&k, &s, &after).unwrap() < 1e-9);
    }
}

#[test]
fn robustness_probes() {
    let opts = KernelOptions::default();
    let mut rng = substream(8, 0);
    let s = random_state::<f64, _>(2, &mut rng).unwrap();
    let u = random_block_unitary::<f64, _>(2, 2, &mut rng);
    for theory in TheoryKind::ALL {
        let zero = probe_robustness(theory, &s, &u, 0.0, 3, 1, &opts).unwrap();
        assert!(zero.deviation < 1e-12);
    }
    let flow = probe_robustness(TheoryKind::Flow, &s, &u, 1e-6, 20, 2, &opts).unwrap();
    assert!(flow.deviation <= 1e-4, "flow deviation {}", flow.deviation);
    let product = probe_robustness(TheoryKind::Product, &s, &u, 1e-6, 20, 3, &opts).unwrap();
    assert!(
        product.ratio().unwrap() < 10.0,
        "product ratio {:?}",
        product.ratio()
    );
}

#[test]
fn kernels_are_deterministic() {
    let mut rng = substream(9, 0);
    let s = random_state::<f64, _>(3, &mut rng).unwrap();
    let u = random_block_unitary::<f64, _>(3, 4, &mut rng);
    for theory in TheoryKind::ALL {
        let a = dense_kernel(theory, &s, &u, &KernelOptions::default()).unwrap();
        let b = dense_kernel(theory, &s, &u, &KernelOptions::default()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn gate_rows_agree_with_dense_flow_per_gate() {
    let opts = KernelOptions::default();
    for l in [2, 4, 6] {
        let mut rng = substream(l as u64, 7);
        let mut s = random_state::<f64, _>(l, &mut rng).unwrap();
        for q in 0..l {
            let gate = Gate::h(q);
            let u = slice_unitary::<f64>(std::slice::from_ref(&gate), l, 12).unwrap();
            for theory in [TheoryKind::Flow, TheoryKind::Sinkhorn] {
                let dense = dense_kernel(theory, &s, &u, &opts).unwrap();
                for from in 0..1 << l {
                    let row =
                        kernel_row(theory, &s, std::slice::from_ref(&gate), from, &opts).unwrap();
                    let row = row.to_dense(1 << l);
                    for to in 0..1 << l {
                        assert!(
                            (row[to] - dense.get(from, to)).abs() < 1e-7,
                            "{theory} l={l} q={q} {from}->{to}"
                        );
                    }
                }
            }
            s = s.apply_gate(&gate).unwrap();
        }
    }
}

#[test]
fn single_precision_kernels() {
    let mut rng = substream(10, 0);
    let s = random_state::<f32, _>(3, &mut rng).unwrap();
    let u = random_block_unitary::<f32, _>(3, 4, &mut rng);
    let after = u.apply(&s).unwrap();
    for theory in TheoryKind::ALL {
        let k = dense_kernel(theory, &s, &u, &KernelOptions::default()).unwrap();
        assert!(check_marginalization(&k, &s, &after).unwrap() < 1e-5);
        if theory.is_indifferent() {
            assert!(check_indifference(&k, &u).is_empty());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flow_on_hadamard_layers_is_the_nw_corner(seed in any::<u64>(), l in 1usize..=3) {
        let s = random_state::<f64, _>(l, &mut substream(seed, 0)).unwrap();
        let u = hadamard_layer(l);
        let k = flow_kernel_dense(&s, &u).unwrap();
        let oracle = nw_corner(&s.born_distribution(), &u.apply(&s).unwrap().born_distribution());
        for x in 0..1 << l {
            for y in 0..1 << l {
                prop_assert!((k.get(x, y) - oracle[x][y]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn axioms_hold_on_random_block_unitaries(seed in any::<u64>(), l in 1usize..=4, block in 1usize..=8) {
        let mut rng = substream(seed, 0);
        let s = random_state::<f64, _>(l, &mut rng).unwrap();
        let u = random_block_unitary::<f64, _>(l, block, &mut rng);
        let after = u.apply(&s).unwrap();
        for theory in TheoryKind::ALL {
            let k = dense_kernel(theory, &s, &u, &KernelOptions::default()).unwrap();
            prop_assert!(check_marginalization(&k, &s, &after).unwrap() <= 1e-7);
            prop_assert!(row_stochasticity_defect(&k) <= 1e-9);
            if theory.is_indifferent() {
                prop_assert!(check_indifference(&k, &u).is_empty());
            }
        }
    }
}
