use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;

use qogsim_core::circuit::text::{emit, parse};
use qogsim_core::cognition::{
    and_then, conditional_component, event_component, qq_discrepancy, ConditionalLink, KernelVariant, QubitDirection,
};
use qogsim_core::fit::{fit_phase, fit_total_probability_phase, PhaseModel, TotalProbabilityModel};
use qogsim_core::models::{
    boole_joint_bounds, classical_total_probability, stp_violation, DisjunctionModel, KernelModel, OrderEffectModel,
};
use qogsim_core::{Circuit, Gate, GateMatrix, Instruction, Pattern, StateVector};

const TOL: f64 = 1e-10;

fn state_strategy(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1 << n).prop_filter_map("nonzero", |parts| {
        let norm = parts.iter().map(|(re, im)| re * re + im * im).sum::<f64>().sqrt();
        (norm > 1e-3).then(|| {
            StateVector::from_amplitudes(parts.iter().map(|(re, im)| Complex64::new(re / norm, im / norm)).collect())
                .unwrap()
        })
    })
}

fn gate_strategy() -> impl Strategy<Value = Gate> {
    let angle = -TAU..TAU;
    prop_oneof![
        Just(Gate::H),
        Just(Gate::X),
        angle.clone().prop_map(Gate::Rot),
        angle.clone().prop_map(Gate::Rx),
        angle.clone().prop_map(Gate::Ry),
        angle.clone().prop_map(Gate::Rz),
        angle.prop_map(Gate::Phase),
    ]
}

fn direction() -> impl Strategy<Value = QubitDirection> {
    (0.0..=PI, 0.0..TAU).prop_map(|(t, p)| QubitDirection::new(t, p).unwrap())
}

fn probability() -> impl Strategy<Value = f64> {
    0.0..=1.0f64
}

fn close(a: &StateVector, b: &StateVector, tol: f64) -> bool {
    a.amplitudes().iter().zip(b.amplitudes()).all(|(x, y)| (x - y).norm() < tol)
}

/// Instructions over qubits `q0..q{n-1}`.
fn instruction_strategy(n: usize) -> impl Strategy<Value = Instruction> {
    let name = move |i: usize| format!("q{}", i % n);
    (gate_strategy(), 0..n, 1..n.max(2), 0..2u8, 0..3usize).prop_map(move |(gate, a, offset, value, kind)| {
        let b = (a + offset) % n;
        match kind {
            _ if n == 1 || a == b => Instruction::single(gate, &name(a)),
            0 => Instruction::single(gate, &name(a)),
            1 => Instruction::controlled(gate, &name(a), value, &name(b)),
            _ => Instruction::swap(&name(a), &name(b)),
        }
    })
}

fn circuit_strategy(n: usize, len: usize) -> impl Strategy<Value = Circuit> {
    prop::collection::vec(instruction_strategy(n), 0..len).prop_map(move |instructions| {
        let qubits: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
        Circuit::build(qubits, instructions, vec![]).unwrap()
    })
}

proptest! {
    #[test]
    fn gates_preserve_norm(state in state_strategy(3), gates in prop::collection::vec((gate_strategy(), 0..3usize), 1..12)) {
        let mut s = state;
        for (g, target) in gates {
            s.apply_single_qubit_gate(&g.matrix(), target).unwrap();
        }
        prop_assert!((s.norm_sqr() - 1.0).abs() < TOL);
    }

    #[test]
    fn gate_then_dagger_is_identity(state in state_strategy(3), gate in gate_strategy(), target in 0..3usize, control in 0..3usize) {
        let mut s = state.clone();
        let m = gate.matrix();
        s.apply_single_qubit_gate(&m, target).unwrap();
        s.apply_single_qubit_gate(&m.dagger(), target).unwrap();
        prop_assert!(close(&s, &state, TOL));
        if control != target {
            s.apply_controlled_gate(&m, control, 1, target).unwrap();
            s.apply_controlled_gate(&m.dagger(), control, 1, target).unwrap();
            prop_assert!(close(&s, &state, TOL));
        }
    }

    #[test]
    fn gates_act_linearly(state in state_strategy(2), gate in gate_strategy(), target in 0..2usize) {
        let m = gate.matrix();
        let mut direct = state.clone();
        direct.apply_single_qubit_gate(&m, target).unwrap();
        let mut summed = vec![Complex64::new(0.0, 0.0); 4];
        for (i, amp) in state.amplitudes().iter().enumerate() {
            let mut basis = StateVector::basis(2, i).unwrap();
            basis.apply_single_qubit_gate(&m, target).unwrap();
            for (acc, b) in summed.iter_mut().zip(basis.amplitudes()) {
                *acc += amp * b;
            }
        }
        prop_assert!(direct.amplitudes().iter().zip(&summed).all(|(x, y)| (x - y).norm() < TOL));
    }

    #[test]
    fn global_phase_leaves_probabilities(state in state_strategy(3), theta in -TAU..TAU) {
        let mut shifted = state.clone();
        shifted.apply_global_phase(theta);
        let (a, b) = (state.outcome_probabilities(&[0, 1, 2]).unwrap(), shifted.outcome_probabilities(&[0, 1, 2]).unwrap());
        for (key, p) in a.iter() {
            prop_assert!((p - b.get(key)).abs() < TOL);
        }
    }

    #[test]
    fn swap_is_three_cnots(state in state_strategy(3), a in 0..3usize, offset in 1..3usize) {
        let b = (a + offset) % 3;
        let mut swapped = state.clone();
        swapped.apply_swap(a, b).unwrap();
        let mut cnots = state;
        let x = GateMatrix::pauli_x();
        cnots.apply_controlled_gate(&x, a, 1, b).unwrap();
        cnots.apply_controlled_gate(&x, b, 1, a).unwrap();
        cnots.apply_controlled_gate(&x, a, 1, b).unwrap();
        prop_assert!(close(&swapped, &cnots, TOL));
    }

    #[test]
    fn composition_matches_sequential_application(first in circuit_strategy(3, 8), second in circuit_strategy(3, 8)) {
        let joined = first.then(&second).unwrap().final_state().unwrap();
        let mut s = first.final_state().unwrap();
        second.apply_to(&mut s).unwrap();
        prop_assert!(close(&joined, &s, TOL));
    }

    #[test]
    fn text_format_round_trips(circuit in circuit_strategy(3, 10)) {
        prop_assert_eq!(parse(&emit(&circuit)).unwrap(), circuit);
    }

    /// Swapping in an ancilla prepared as `m` reproduces "measure, keep outcome m, continue".
    #[test]
    fn ancilla_swap_defers_measurement(
        prefix in prop::collection::vec(gate_strategy(), 0..4),
        suffix in prop::collection::vec(gate_strategy(), 0..4),
        value in 0..2u8,
    ) {
        let mut builder = Circuit::builder().qubit("q0");
        for g in prefix.iter().chain(&suffix) {
            builder = builder.gate(g.clone(), "q0");
        }
        let circuit = builder.measure("q0", "c0").build().unwrap();
        let rewritten = circuit.ancilla_swap_for_measurement("q0", value, prefix.len()).unwrap();
        let dist = rewritten.run_exact().unwrap();

        let mut s = StateVector::new(1).unwrap();
        for g in &prefix {
            s.apply_single_qubit_gate(&g.matrix(), 0).unwrap();
        }
        let p_value = s.outcome_probabilities(&[0]).unwrap().get(&value.to_string());
        let mut collapsed = StateVector::basis(1, value as usize).unwrap();
        for g in &suffix {
            collapsed.apply_single_qubit_gate(&g.matrix(), 0).unwrap();
        }
        let after = collapsed.outcome_probabilities(&[0]).unwrap();
        for x in ["0", "1"] {
            // ancilla on the left, main qubit on the right
            let joint = dist.get(&format!("{value}{x}"));
            prop_assert!((joint - p_value * after.get(x)).abs() < TOL);
        }
    }

    #[test]
    fn qq_equality_holds(s in direction(), a in direction(), b in direction()) {
        prop_assert!(qq_discrepancy(&s, &a, &b).abs() < TOL);
    }

    #[test]
    fn sequential_projection_never_exceeds_first(s in direction(), a in direction(), b in direction()) {
        prop_assert!(and_then(&s, &a, &b) <= a.overlap(&s) + 1e-12);
    }

    #[test]
    fn question_overlap_stays_in_band(tc in 0.0..=FRAC_PI_2, tg in 0.0..=FRAC_PI_2, phi in 0.0..TAU) {
        let m = OrderEffectModel::from_angles(tc, tg, phi);
        let overlap = m.target_direction().unwrap().overlap(&m.context_direction().unwrap());
        let (lo, hi) = ((tc + tg).cos().powi(2), (tc - tg).cos().powi(2));
        prop_assert!(overlap >= lo.min(hi) - 1e-12 && overlap <= hi.max(lo) + 1e-12);
    }

    #[test]
    fn classical_circuit_obeys_total_probability(a in probability(), b in probability(), c in probability()) {
        let circuit = Circuit::builder()
            .fragment(event_component("q0", a).unwrap())
            .fragment(conditional_component(&ConditionalLink::new("a", "b", b, c), "q0", "q1").unwrap())
            .measure("q0", "c0")
            .measure("q1", "c1")
            .build()
            .unwrap();
        let p = circuit.run_exact().unwrap().probability(&Pattern::new("0*", 2).unwrap());
        prop_assert!((p - classical_total_probability(a, b, c).unwrap()).abs() < TOL);
    }

    #[test]
    fn known_outcomes_ignore_phase(prior in probability(), b in probability(), c in probability(), phi in 0.0..TAU) {
        let base = DisjunctionModel::new(prior, b, c, KernelVariant::HadamardHadamard, 0.0).unwrap();
        let m = base.with_phase(phi);
        prop_assert!((m.known_rate(0).unwrap() - b).abs() < TOL);
        prop_assert!((m.known_rate(1).unwrap() - c).abs() < TOL);
    }

    #[test]
    fn stp_band_is_symmetric(a in probability(), b in probability(), u in probability()) {
        let (x, y) = (stp_violation(a, b, u).unwrap(), stp_violation(b, a, u).unwrap());
        prop_assert_eq!(x, y);
        prop_assert!(x.bound_low <= x.bound_high);
    }

    #[test]
    fn boole_bounds_are_ordered(a in probability(), b in probability()) {
        let (low, high) = boole_joint_bounds(a, b).unwrap();
        prop_assert!(low <= high);
        let tight = a.min(b) == (a - (1.0 - b)).max(0.0);
        prop_assert_eq!(low == high, tight);
    }

    #[test]
    fn closed_form_and_search_agree(a in 0.2..0.8f64, b in 0.2..0.9f64, c in 0.2..0.9f64, theta in 0.2..(PI - 0.2)) {
        let model = TotalProbabilityModel::new(a, b, c).unwrap();
        let target = model.evaluate(theta).unwrap();
        prop_assume!((0.0..=1.0).contains(&target));
        let closed = fit_total_probability_phase(&model, target).unwrap();
        let searched = fit_phase(&model, target).unwrap();
        prop_assert!((closed.value - searched.value).abs() < 1e-9);
        prop_assert!((closed.value - theta).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn kernel_fit_round_trips(source in 0.05..0.95f64, phi in 0.0..PI) {
        let model = KernelModel::new(source, KernelVariant::HadamardHadamard).unwrap();
        let target = model.response(phi);
        let fit = fit_phase(&model, target).unwrap();
        prop_assert!((model.response(fit.value) - target).abs() < 1e-9);
        prop_assert!(fit.residual < 1e-9 && (0.0..=PI).contains(&fit.value));
        prop_assert_eq!(fit_phase(&model, target).unwrap(), fit);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn disjunction_fit_round_trips(prior in 0.2..0.8f64, b in 0.1..0.9f64, c in 0.1..0.9f64, phi in 0.0..PI) {
        let model = DisjunctionModel::new(prior, b, c, KernelVariant::HadamardHadamard, 0.0).unwrap();
        let target = model.with_phase(phi).unknown_rate().unwrap();
        let fit = fit_phase(&model, target).unwrap();
        prop_assert!((model.with_phase(fit.value).unknown_rate().unwrap() - target).abs() < 1e-9);
        // smallest solution: nothing earlier on the grid lies past the target
        prop_assert!(fit.value <= phi + 1e-9);
    }
}
