use std::sync::Arc;

use hidden_history::qsim::{
    apply_slice, grover_iterate, marked_amplitude, slice_unitary, FunctionKind, Gate,
    OracleFunction, PureState, QueryLedger, Register, SlicedProgram,
};
use num_complex::Complex;
use proptest::prelude::*;

type C = Complex<f64>;

fn state(amps: &[(f64, f64)]) -> PureState<f64> {
    PureState::normalized(amps.iter().map(|&(re, im)| C::new(re, im)).collect()).unwrap()
}

/// Reference H^{(x) l} entry: `(-1)^{popcount(x & y)} / 2^{l/2}`.
fn hadamard_entry(l: usize, y: usize, x: usize) -> f64 {
    let sign = if (x & y).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    sign / 2f64.powf(l as f64 / 2.0)
}

#[test]
fn hadamard_on_zero() {
    let s = PureState::<f64>::zero(1)
        .unwrap()
        .apply_gate(&Gate::h(0))
        .unwrap();
    let r = 0.5f64.sqrt();
    assert!((s.amplitude(0) - C::new(r, 0.0)).norm() < 1e-15);
    assert!((s.amplitude(1) - C::new(r, 0.0)).norm() < 1e-15);
    assert!(s
        .born_distribution()
        .iter()
        .all(|p| (p - 0.5).abs() < 1e-15));
}

#[test]
fn xor_with_identity_copies_into_zero_register() {
    let copy = Arc::new(OracleFunction::tabulate("id", 3, 3, |x| x).unwrap());
    let gate = Gate::oracle_xor(Register::range(0, 3), Register::range(3, 3), copy);
    for x in 0..8usize {
        let s = PureState::<f64>::basis(6, x)
            .unwrap()
            .apply_gate(&gate)
            .unwrap();
        assert_eq!(s.mass(x | x << 3), 1.0);
    }
}

#[test]
fn slice_ledger_counts_query_gates_only() {
    let f = Arc::new(
        OracleFunction::tabulate("f", 1, 1, |x| x ^ 1)
            .unwrap()
            .as_query(),
    );
    let mut ledger = QueryLedger::new();
    let one = PureState::<f64>::basis(2, 1).unwrap();
    let s = apply_slice(&one, &[Gate::h(0), Gate::h(0)], &mut ledger).unwrap();
    assert!(s.max_abs_diff(&one) < 1e-15);
    apply_slice(
        &s,
        &[Gate::oracle_xor(
            Register::range(0, 1),
            Register::range(1, 1),
            f,
        )],
        &mut ledger,
    )
    .unwrap();
    apply_slice(&s, &[], &mut ledger).unwrap();
    assert_eq!(ledger.per_slice(), &[0, 1, 0]);
    assert_eq!(ledger.cumulative(), vec![0, 1, 1]);
    assert_eq!(ledger.total(), 1);
}

#[test]
fn born_distribution_examples() {
    assert_eq!(
        PureState::<f64>::basis(3, 5).unwrap().born_distribution(),
        vec![0., 0., 0., 0., 0., 1., 0., 0.]
    );
    let s = PureState::<f64>::zero(2)
        .unwrap()
        .apply_gate(&Gate::h(0))
        .unwrap()
        .apply_gate(&Gate::h(1))
        .unwrap();
    for p in s.born_distribution() {
        assert!((p - 0.25).abs() < 1e-15);
    }
}

#[test]
fn hadamard_layer_matches_kronecker_product() {
    for l in 1..=4 {
        let slice: Vec<Gate> = (0..l).map(Gate::h).collect();
        let u = slice_unitary::<f64>(&slice, l, 12).unwrap();
        for y in 0..1 << l {
            for x in 0..1 << l {
                assert!((u.get(y, x) - C::new(hadamard_entry(l, y, x), 0.0)).norm() < 1e-14);
            }
        }
        assert!(u.unitarity_residual() < 1e-10);
    }
}

#[test]
fn permutation_and_oracle_unitaries_have_one_nonzero_per_row() {
    let sigma = Gate::permutation(Register::range(0, 2), vec![2, 0, 3, 1]);
    let u = slice_unitary::<f64>(&[sigma], 2, 12).unwrap();
    for (x, y) in [(0, 2), (1, 0), (2, 3), (3, 1)] {
        assert_eq!(u.get(y, x), C::new(1.0, 0.0));
    }
    let g = Arc::new(OracleFunction::tabulate("g", 2, 2, |x| (3 * x + 1) & 3).unwrap());
    let u = slice_unitary::<f64>(
        &[Gate::oracle_xor(
            Register::range(0, 2),
            Register::range(2, 2),
            g,
        )],
        4,
        12,
    )
    .unwrap();
    for y in 0..16 {
        assert_eq!(u.row_support(y, 1e-12), 1);
    }
    assert!(slice_unitary::<f64>(&[Gate::h(0)], 13, 12).is_err());
}

#[test]
fn gate_validation_errors() {
    let s = PureState::<f64>::zero(2).unwrap();
    assert!(s.apply_gate(&Gate::h(2)).is_err());
    let f = Arc::new(OracleFunction::tabulate("f", 2, 1, |x| x & 1).unwrap());
    assert!(s
        .apply_gate(&Gate::oracle_xor(
            Register::range(0, 1),
            Register::range(1, 1),
            f
        ))
        .is_err());
}

/// Grover on a plain real vector: flip the marked sign, reflect about the mean.
fn reference_grover(n: usize, marked: usize, q: usize) -> f64 {
    let size = 1usize << n;
    let mut v = vec![1.0 / (size as f64).sqrt(); size];
    for _ in 0..q {
        v[marked] = -v[marked];
        let mean = v.iter().sum::<f64>() / size as f64;
        v.iter_mut().for_each(|a| *a = 2.0 * mean - *a);
    }
    v[marked]
}

#[test]
fn grover_amplitudes_follow_the_sine_law() {
    for (n, q) in [(2, 0), (2, 1), (6, 2), (6, 3), (8, 5)] {
        let marked = (n * 7 + q) % (1 << n);
        let f = Arc::new(
            OracleFunction::new(
                "f",
                n,
                1,
                FunctionKind::Equals {
                    value: marked as u64,
                },
            )
            .unwrap()
            .as_query(),
        );
        let reg = Register::range(0, n);
        let mut s = PureState::<f64>::zero(n).unwrap();
        for g in Gate::hadamards(&reg) {
            s = s.apply_gate(&g).unwrap();
        }
        let mut ledger = QueryLedger::new();
        for _ in 0..q {
            s = grover_iterate(&s, &reg, &f, &mut ledger).unwrap();
        }
        let amp = s.amplitude(marked).re;
        assert!((amp - marked_amplitude(n, q)).abs() < 1e-9);
        assert!((amp - reference_grover(n, marked, q)).abs() < 1e-9);
        assert_eq!(ledger.total(), q as u64);
    }
    // N = 4: one iteration finds the item
    assert!((marked_amplitude(2, 1) - 1.0).abs() < 1e-12);
    assert!((marked_amplitude(6, 2) - (5.0 * (1.0f64 / 8.0).asin()).sin()).abs() < 1e-15);
}

#[test]
fn program_json_round_trip() {
    let f = OracleFunction::tabulate("f", 2, 1, |x| x >> 1)
        .unwrap()
        .as_query();
    let program = SlicedProgram::new(
        3,
        vec![
            vec![Gate::h(0), Gate::h(1)],
            vec![Gate::oracle_xor(
                Register::range(0, 2),
                Register::range(2, 1),
                Arc::new(f),
            )],
        ],
        vec![],
    )
    .unwrap();
    let back = SlicedProgram::from_json(&program.to_json().unwrap()).unwrap();
    assert_eq!(back, program);
    assert_eq!(back.query_count(), 1);
}

fn arb_gate(l: usize) -> impl Strategy<Value = Gate> {
    prop_oneof![
        (0..l).prop_map(Gate::h),
        (0..l, proptest::collection::vec(0..2u64, 2)).prop_map(|(q, t)| {
            Gate::phase_flip(
                Register::new(vec![q]),
                OracleFunction::from_table("p", 1, 1, t).unwrap(),
            )
        }),
        (0..l - 1, proptest::collection::vec(0..2u64, 2)).prop_map(|(q, t)| {
            Gate::oracle_xor(
                Register::new(vec![q]),
                Register::new(vec![q + 1]),
                Arc::new(OracleFunction::from_table("x", 1, 1, t).unwrap()),
            )
        }),
        Just(Gate::permutation(Register::range(0, 2), vec![3, 0, 1, 2])),
    ]
}

proptest! {
    #[test]
    fn gates_preserve_norm(
        amps in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
        gates in proptest::collection::vec(arb_gate(4), 1..60),
    ) {
        prop_assume!(amps.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3);
        let mut s = state(&amps);
        for g in &gates {
            s = s.apply_gate(g).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn hadamard_is_an_involution(
        amps in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8),
        q in 0usize..3,
    ) {
        prop_assume!(amps.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3);
        let s = state(&amps);
        let back = s.apply_gate(&Gate::h(q)).unwrap().apply_gate(&Gate::h(q)).unwrap();
        prop_assert!(back.max_abs_diff(&s) < 1e-12);
    }

    #[test]
    fn gate_action_matches_dense_unitary(
        amps in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
        gates in proptest::collection::vec(arb_gate(4), 1..6),
    ) {
        prop_assume!(amps.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3);
        let s = state(&amps);
        let u = slice_unitary::<f64>(&gates, 4, 12).unwrap();
        let mut t = s.clone();
        for g in &gates {
            t = t.apply_gate(g).unwrap();
        }
        prop_assert!(u.apply(&s).unwrap().max_abs_diff(&t) < 1e-12);
    }
}
