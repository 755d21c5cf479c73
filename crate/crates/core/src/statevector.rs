//! Dense pure-state simulation over a handful of qubits.
//!
//! Amplitude index bit `k` holds qubit `k` (little-endian). Every mutating
//! operation takes `&mut self`, so a state is never shared while it changes.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::outcomes::{basis_string, Distribution, Histogram};

pub type Amplitude = Complex64;

/// Tolerance for unitarity and normalization checks.
pub const TOLERANCE: f64 = 1e-10;

const ZERO: Amplitude = Complex64::new(0.0, 0.0);
const ONE: Amplitude = Complex64::new(1.0, 0.0);

/// A validated 2x2 or 4x4 unitary, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    dim: usize,
    entries: Vec<Amplitude>,
}

impl GateMatrix {
    /// Builds a gate, rejecting anything that is not unitary within [`TOLERANCE`].
    pub fn new(entries: Vec<Amplitude>) -> Result<Self> {
        let dim = match entries.len() {
            4 => 2,
            16 => 4,
            n => return Err(Error::GateDimension(n)),
        };
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("gate entry".into()));
        }
        let gate = GateMatrix { dim, entries };
        let deviation = gate.unitarity_deviation();
        if deviation > TOLERANCE {
            return Err(Error::NonUnitary(deviation));
        }
        Ok(gate)
    }

    fn unchecked2(entries: [Amplitude; 4]) -> Self {
        GateMatrix { dim: 2, entries: entries.to_vec() }
    }

    pub fn identity() -> Self {
        Self::unchecked2([ONE, ZERO, ZERO, ONE])
    }

    pub fn hadamard() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self::unchecked2([h, h, h, -h])
    }

    pub fn pauli_x() -> Self {
        Self::unchecked2([ZERO, ONE, ONE, ZERO])
    }

    /// Real rotation with `R(θ)|0⟩ = cos θ|0⟩ + sin θ|1⟩`, so `P(|0⟩) = cos²θ`.
    pub fn probability_rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::unchecked2([c.into(), (-s).into(), s.into(), c.into()])
    }

    /// `exp(-iθX/2)`.
    pub fn rx(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        let mis = Complex64::new(0.0, -s);
        Self::unchecked2([c.into(), mis, mis, c.into()])
    }

    /// `exp(-iθY/2)`.
    pub fn ry(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self::unchecked2([c.into(), (-s).into(), s.into(), c.into()])
    }

    /// `diag(e^{-iθ/2}, e^{iθ/2})`.
    pub fn rz(theta: f64) -> Self {
        Self::unchecked2([
            Complex64::from_polar(1.0, -theta / 2.0),
            ZERO,
            ZERO,
            Complex64::from_polar(1.0, theta / 2.0),
        ])
    }

    /// `diag(1, e^{iθ})`.
    pub fn phase(theta: f64) -> Self {
        Self::unchecked2([ONE, ZERO, ZERO, Complex64::from_polar(1.0, theta)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Amplitude] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Amplitude {
        self.entries[row * self.dim + col]
    }

    pub fn dagger(&self) -> Self {
        let d = self.dim;
        let entries = (0..d * d).map(|i| self.entries[(i % d) * d + i / d].conj()).collect();
        GateMatrix { dim: d, entries }
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &GateMatrix) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::GateDimension(other.entries.len()));
        }
        let d = self.dim;
        let entries = (0..d * d).map(|i| (0..d).map(|k| self.get(i / d, k) * other.get(k, i % d)).sum()).collect();
        Ok(GateMatrix { dim: d, entries })
    }

    fn unitarity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0_f64;
        for r in 0..d {
            for c in 0..d {
                let dot: Amplitude = (0..d).map(|k| self.get(r, k) * self.get(c, k).conj()).sum();
                let expect = if r == c { ONE } else { ZERO };
                worst = worst.max((dot - expect).norm());
            }
        }
        worst
    }
}

/// Pure state of `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Amplitude>,
}

impl StateVector {
    /// The all-zero basis state.
    pub fn new(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::EmptyRegister);
        }
        let len = 1usize << num_qubits;
        if index >= len {
            return Err(Error::QubitOutOfRange { index, num_qubits });
        }
        let mut amplitudes = vec![ZERO; len];
        amplitudes[index] = ONE;
        Ok(StateVector { num_qubits, amplitudes })
    }

    /// Wraps caller-supplied amplitudes; they must already be normalized.
    pub fn from_amplitudes(amplitudes: Vec<Amplitude>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::AmplitudeCount { len, num_qubits: len.max(1).ilog2() as usize });
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("amplitude".into()));
        }
        let state = StateVector { num_qubits: len.ilog2() as usize, amplitudes };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Multiplies every amplitude by `e^{iθ}`.
    pub fn apply_global_phase(&mut self, theta: f64) {
        let phase = Complex64::from_polar(1.0, theta);
        self.amplitudes.iter_mut().for_each(|z| *z *= phase);
    }

    fn check_qubit(&self, index: usize) -> Result<()> {
        if index < self.num_qubits {
            Ok(())
        } else {
            Err(Error::QubitOutOfRange { index, num_qubits: self.num_qubits })
        }
    }

    fn check_distinct(&self, qubits: &[usize]) -> Result<()> {
        for (i, &q) in qubits.iter().enumerate() {
            self.check_qubit(q)?;
            if qubits[..i].contains(&q) {
                return Err(Error::DuplicateOperand(qubits.to_vec()));
            }
        }
        Ok(())
    }

    fn check_control_value(value: u8) -> Result<()> {
        if value <= 1 {
            Ok(())
        } else {
            Err(Error::ControlValue(value))
        }
    }

    fn expect_single(gate: &GateMatrix) -> Result<()> {
        if gate.dim == 2 {
            Ok(())
        } else {
            Err(Error::GateDimension(gate.entries.len()))
        }
    }

    pub fn apply_single_qubit_gate(&mut self, gate: &GateMatrix, target: usize) -> Result<()> {
        Self::expect_single(gate)?;
        self.check_qubit(target)?;
        self.apply_masked(gate, target, 0, 0);
        Ok(())
    }

    /// Applies `gate` to `target` on the subspace where `control` equals `control_value`.
    pub fn apply_controlled_gate(
        &mut self,
        gate: &GateMatrix,
        control: usize,
        control_value: u8,
        target: usize,
    ) -> Result<()> {
        Self::expect_single(gate)?;
        Self::check_control_value(control_value)?;
        self.check_distinct(&[control, target])?;
        let mask = 1 << control;
        self.apply_masked(gate, target, mask, if control_value == 1 { mask } else { 0 });
        Ok(())
    }

    // Acts on basis pairs differing in `target` whose bits under `mask` equal `want`.
    fn apply_masked(&mut self, gate: &GateMatrix, target: usize, mask: usize, want: usize) {
        let bit = 1 << target;
        let [g00, g01, g10, g11] = [gate.get(0, 0), gate.get(0, 1), gate.get(1, 0), gate.get(1, 1)];
        for i in 0..self.amplitudes.len() {
            if i & bit != 0 || i & mask != want {
                continue;
            }
            let j = i | bit;
            let (a0, a1) = (self.amplitudes[i], self.amplitudes[j]);
            self.amplitudes[i] = g00 * a0 + g01 * a1;
            self.amplitudes[j] = g10 * a0 + g11 * a1;
        }
    }

    /// Applies a 4x4 gate whose row index is `2·bit(high) + bit(low)`.
    pub fn apply_two_qubit_gate(&mut self, gate: &GateMatrix, high: usize, low: usize) -> Result<()> {
        if gate.dim != 4 {
            return Err(Error::GateDimension(gate.entries.len()));
        }
        self.check_distinct(&[high, low])?;
        let (hb, lb) = (1 << high, 1 << low);
        for base in 0..self.amplitudes.len() {
            if base & (hb | lb) != 0 {
                continue;
            }
            let idx = [base, base | lb, base | hb, base | hb | lb];
            let old = idx.map(|i| self.amplitudes[i]);
            for (r, &i) in idx.iter().enumerate() {
                self.amplitudes[i] = (0..4).map(|c| gate.get(r, c) * old[c]).sum();
            }
        }
        Ok(())
    }

    pub fn apply_swap(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_distinct(&[a, b])?;
        self.swap_masked(a, b, 0, 0);
        Ok(())
    }

    pub fn apply_controlled_swap(&mut self, control: usize, control_value: u8, a: usize, b: usize) -> Result<()> {
        Self::check_control_value(control_value)?;
        self.check_distinct(&[control, a, b])?;
        let mask = 1 << control;
        self.swap_masked(a, b, mask, if control_value == 1 { mask } else { 0 });
        Ok(())
    }

    fn swap_masked(&mut self, a: usize, b: usize, mask: usize, want: usize) {
        let (ab, bb) = (1 << a, 1 << b);
        for i in 0..self.amplitudes.len() {
            // visit each (a=1, b=0) index once and exchange with its (a=0, b=1) partner
            if i & ab != 0 && i & bb == 0 && i & mask == want {
                self.amplitudes.swap(i, (i & !ab) | bb);
            }
        }
    }

    /// Probabilities of the register formed by `qubits` (first listed = rightmost character).
    fn register_probabilities(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        self.check_distinct(qubits)?;
        let mut probs = vec![0.0; 1 << qubits.len()];
        for (i, z) in self.amplitudes.iter().enumerate() {
            let reg = qubits.iter().enumerate().fold(0, |acc, (pos, &q)| acc | ((i >> q) & 1) << pos);
            probs[reg] += z.norm_sqr();
        }
        Ok(probs)
    }

    /// Marginal distribution over `qubits`; outcomes of probability exactly zero are omitted.
    pub fn outcome_probabilities(&self, qubits: &[usize]) -> Result<Distribution> {
        let width = qubits.len();
        let map: BTreeMap<String, f64> = self
            .register_probabilities(qubits)?
            .into_iter()
            .enumerate()
            .filter(|&(_, p)| p > 0.0)
            .map(|(reg, p)| (basis_string(reg, width), p))
            .collect();
        Ok(Distribution::from_map(map))
    }

    /// Draws `shots` measurements of `qubits` by inverse CDF with a ChaCha8 stream seeded from `seed`.
    pub fn sample_measurements(&self, qubits: &[usize], shots: u64, seed: u64) -> Result<Histogram> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let probs = self.register_probabilities(qubits)?;
        let cdf: Vec<f64> = probs
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        // rounding can leave the cdf just under 1; never land on a zero-probability tail
        let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        let mut counts = vec![0u64; probs.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..shots {
            let u: f64 = rng.gen();
            let idx = cdf.partition_point(|&c| c <= u).min(last);
            counts[idx] += 1;
        }
        let width = qubits.len();
        let map = counts
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .map(|(reg, c)| (basis_string(reg, width), c))
            .collect();
        Ok(Histogram::from_map(map))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Amplitude {
        Complex64::new(re, 0.0)
    }

    fn assert_amps(state: &StateVector, expect: &[Amplitude]) {
        for (a, b) in state.amplitudes().iter().zip(expect) {
            assert!((a - b).norm() < 1e-12, "{a} != {b}");
        }
    }

    #[test]
    fn hadamard_makes_superposition() {
        let mut s = StateVector::new(1).unwrap();
        s.apply_single_qubit_gate(&GateMatrix::hadamard(), 0).unwrap();
        assert_amps(&s, &[c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]);
    }

    #[test]
    fn x_flips() {
        let mut s = StateVector::basis(1, 1).unwrap();
        s.apply_single_qubit_gate(&GateMatrix::pauli_x(), 0).unwrap();
        assert_amps(&s, &[c(1.0), c(0.0)]);
    }

    #[test]
    fn probability_rotation_quarter_turn() {
        let theta = std::f64::consts::FRAC_PI_4;
        let mut s = StateVector::new(1).unwrap();
        s.apply_single_qubit_gate(&GateMatrix::probability_rotation(theta), 0).unwrap();
        assert_amps(&s, &[c(theta.cos()), c(theta.sin())]);
        assert!((s.outcome_probabilities(&[0]).unwrap().get("0") - 0.5).abs() < 1e-12);
    }

    #[test]
    fn target_out_of_range() {
        let mut s = StateVector::new(2).unwrap();
        let err = s.apply_single_qubit_gate(&GateMatrix::hadamard(), 2).unwrap_err();
        assert_eq!(err, Error::QubitOutOfRange { index: 2, num_qubits: 2 });
    }

    #[test]
    fn non_unitary_rejected() {
        let err = GateMatrix::new(vec![c(1.0), c(1.0), c(0.0), c(1.0)]).unwrap_err();
        assert!(matches!(err, Error::NonUnitary(_)));
        assert!(matches!(GateMatrix::new(vec![c(1.0); 3]), Err(Error::GateDimension(3))));
    }

    #[test]
    fn cnot_truth_table() {
        // |10⟩: qubit1 = 1, qubit0 = 0
        let mut s = StateVector::basis(2, 0b10).unwrap();
        s.apply_controlled_gate(&GateMatrix::pauli_x(), 1, 1, 0).unwrap();
        assert_eq!(s, StateVector::basis(2, 0b11).unwrap());

        let mut s = StateVector::basis(2, 0b10).unwrap();
        s.apply_controlled_gate(&GateMatrix::pauli_x(), 1, 0, 0).unwrap();
        assert_eq!(s, StateVector::basis(2, 0b10).unwrap());
    }

    #[test]
    fn control_equals_target_rejected() {
        let mut s = StateVector::new(2).unwrap();
        assert!(matches!(s.apply_controlled_gate(&GateMatrix::pauli_x(), 1, 1, 1), Err(Error::DuplicateOperand(_))));
        assert!(matches!(s.apply_controlled_gate(&GateMatrix::pauli_x(), 1, 2, 0), Err(Error::ControlValue(2))));
    }

    #[test]
    fn controlled_rotation_sets_conditional() {
        // control = qubit 1 in |+⟩, target = qubit 0
        let theta = 0.82_f64.sqrt().acos();
        let mut s = StateVector::new(2).unwrap();
        s.apply_single_qubit_gate(&GateMatrix::hadamard(), 1).unwrap();
        s.apply_controlled_gate(&GateMatrix::probability_rotation(theta), 1, 1, 0).unwrap();
        let d = s.outcome_probabilities(&[0, 1]).unwrap();
        // oracle: condition on control by hand from the full table
        let conditional = d.get("10") / (d.get("10") + d.get("11"));
        assert!((conditional - 0.82).abs() < 1e-12);
        assert!((d.get("00") - 0.5).abs() < 1e-12);
    }

    #[test]
    fn swap_basis_and_involution() {
        let mut s = StateVector::basis(2, 0b01).unwrap();
        s.apply_swap(0, 1).unwrap();
        assert_eq!(s, StateVector::basis(2, 0b10).unwrap());
        s.apply_swap(0, 1).unwrap();
        assert_eq!(s, StateVector::basis(2, 0b01).unwrap());
        assert!(matches!(s.apply_swap(1, 1), Err(Error::DuplicateOperand(_))));
    }

    #[test]
    fn swap_permutes_indices() {
        let (alpha, beta) = (Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
        let mut s = StateVector::from_amplitudes(vec![alpha, beta, ZERO, ZERO]).unwrap();
        s.apply_swap(0, 1).unwrap();
        // oracle: index permutation exchanging bits 0 and 1
        let mut expect = vec![ZERO; 4];
        for (i, z) in [alpha, beta, ZERO, ZERO].into_iter().enumerate() {
            let j = (i & !0b11) | ((i & 1) << 1) | ((i >> 1) & 1);
            expect[j] = z;
        }
        assert_amps(&s, &expect);
    }

    #[test]
    fn controlled_swap_branches() {
        // qubits: 0 = a, 1 = b, 2 = control
        let mut off = StateVector::basis(3, 0b010).unwrap();
        off.apply_controlled_swap(2, 1, 0, 1).unwrap();
        assert_eq!(off, StateVector::basis(3, 0b010).unwrap());

        let mut on = StateVector::basis(3, 0b110).unwrap();
        on.apply_controlled_swap(2, 1, 0, 1).unwrap();
        assert_eq!(on, StateVector::basis(3, 0b101).unwrap());

        assert!(on.apply_controlled_swap(0, 1, 0, 1).is_err());
    }

    #[test]
    fn controlled_swap_is_linear_in_control() {
        let prep = |control_one: bool| {
            let mut s = StateVector::new(3).unwrap();
            s.apply_single_qubit_gate(&GateMatrix::probability_rotation(0.4), 0).unwrap();
            s.apply_single_qubit_gate(&GateMatrix::probability_rotation(1.1), 1).unwrap();
            if control_one {
                s.apply_single_qubit_gate(&GateMatrix::pauli_x(), 2).unwrap();
            }
            s
        };
        let mut zero = prep(false);
        zero.apply_controlled_swap(2, 1, 0, 1).unwrap();
        let mut one = prep(true);
        one.apply_controlled_swap(2, 1, 0, 1).unwrap();

        let mut sup = prep(false);
        sup.apply_single_qubit_gate(&GateMatrix::hadamard(), 2).unwrap();
        sup.apply_controlled_swap(2, 1, 0, 1).unwrap();
        let expect: Vec<_> =
            zero.amplitudes().iter().zip(one.amplitudes()).map(|(a, b)| (a + b) * FRAC_1_SQRT_2).collect();
        assert_amps(&sup, &expect);
    }

    #[test]
    fn bell_marginal() {
        let mut s = StateVector::new(2).unwrap();
        s.apply_single_qubit_gate(&GateMatrix::hadamard(), 0).unwrap();
        s.apply_controlled_gate(&GateMatrix::pauli_x(), 0, 1, 1).unwrap();
        let d = s.outcome_probabilities(&[0]).unwrap();
        assert!((d.get("0") - 0.5).abs() < 1e-12);
        assert!((d.get("1") - 0.5).abs() < 1e-12);
    }

    #[test]
    fn gore_rate_rotation() {
        let mut s = StateVector::new(1).unwrap();
        s.apply_single_qubit_gate(&GateMatrix::probability_rotation(0.68_f64.sqrt().acos()), 0).unwrap();
        let d = s.outcome_probabilities(&[0]).unwrap();
        assert!((d.get("0") - 0.68).abs() < 1e-12);
        assert!((d.get("1") - 0.32).abs() < 1e-12);
    }

    #[test]
    fn full_register_query() {
        let s = StateVector::basis(2, 0b10).unwrap();
        let d = s.outcome_probabilities(&[0, 1]).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.get("10"), 1.0);
        assert!(s.outcome_probabilities(&[0, 0]).is_err());
    }

    #[test]
    fn sampling_deterministic_state() {
        let s = StateVector::basis(1, 1).unwrap();
        let h = s.sample_measurements(&[0], 100, 3).unwrap();
        assert_eq!(h.get("1"), 100);
        assert_eq!(h.iter().count(), 1);
        assert_eq!(s.sample_measurements(&[0], 0, 3), Err(Error::ZeroShots));
    }

    #[test]
    fn sampling_within_binomial_band_and_reproducible() {
        let mut s = StateVector::new(1).unwrap();
        s.apply_single_qubit_gate(&GateMatrix::probability_rotation(0.64_f64.sqrt().acos()), 0).unwrap();
        let band = 3.0 * (0.64_f64 * 0.36 / 1e4).sqrt();
        let h = s.sample_measurements(&[0], 10_000, 11).unwrap();
        assert_eq!(h.shots(), 10_000);
        let p = h.get("0") as f64 / 1e4;
        assert!((p - 0.64).abs() < band, "p = {p}");
        assert_eq!(h, s.sample_measurements(&[0], 10_000, 11).unwrap());
    }

    #[test]
    fn two_qubit_gate_matches_cnot() {
        let o = ZERO;
        let l = ONE;
        // control = high qubit
        let cnot = GateMatrix::new(vec![l, o, o, o, o, l, o, o, o, o, o, l, o, o, l, o]).unwrap();
        for idx in 0..4 {
            let mut a = StateVector::basis(2, idx).unwrap();
            a.apply_two_qubit_gate(&cnot, 1, 0).unwrap();
            let mut b = StateVector::basis(2, idx).unwrap();
            b.apply_controlled_gate(&GateMatrix::pauli_x(), 1, 1, 0).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn named_gates_are_unitary() {
        for g in [
            GateMatrix::hadamard(),
            GateMatrix::pauli_x(),
            GateMatrix::probability_rotation(0.3),
            GateMatrix::rx(1.2),
            GateMatrix::ry(-0.7),
            GateMatrix::rz(2.5),
            GateMatrix::phase(0.9),
        ] {
            assert!(GateMatrix::new(g.entries().to_vec()).is_ok());
        }
    }
}
