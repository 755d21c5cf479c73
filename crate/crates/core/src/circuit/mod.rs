//! Circuit intermediate representation over named qubits.
//!
//! Every qubit starts in |0⟩; a qubit that should start in |1⟩ gets a leading
//! `x`. Measured qubits form the output register in the order they are
//! listed, the first listed being the rightmost character of a basis string.

pub mod text;

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::outcomes::{Distribution, Histogram};
use crate::statevector::{GateMatrix, StateVector};

/// Single-qubit gate carried by an instruction.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H,
    X,
    /// Probability rotation: `cos θ|0⟩ + sin θ|1⟩` from |0⟩.
    Rot(f64),
    Rx(f64),
    Ry(f64),
    Rz(f64),
    Phase(f64),
    Unitary(GateMatrix),
}

impl Gate {
    pub fn matrix(&self) -> GateMatrix {
        match self {
            Gate::H => GateMatrix::hadamard(),
            Gate::X => GateMatrix::pauli_x(),
            Gate::Rot(t) => GateMatrix::probability_rotation(*t),
            Gate::Rx(t) => GateMatrix::rx(*t),
            Gate::Ry(t) => GateMatrix::ry(*t),
            Gate::Rz(t) => GateMatrix::rz(*t),
            Gate::Phase(t) => GateMatrix::phase(*t),
            Gate::Unitary(m) => m.clone(),
        }
    }

    pub fn mnemonic(&self) -> &'static str {
        match self {
            Gate::H => "h",
            Gate::X => "x",
            Gate::Rot(_) => "rot",
            Gate::Rx(_) => "rx",
            Gate::Ry(_) => "ry",
            Gate::Rz(_) => "rz",
            Gate::Phase(_) => "p",
            Gate::Unitary(_) => "u",
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match self {
            Gate::Rot(t) | Gate::Rx(t) | Gate::Ry(t) | Gate::Rz(t) | Gate::Phase(t) => Some(*t),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(t) = self.angle() {
            if !t.is_finite() {
                return Err(Error::NonFinite(format!("{} angle", self.mnemonic())));
            }
        }
        if let Gate::Unitary(m) = self {
            if m.dim() != 2 {
                return Err(Error::GateDimension(m.entries().len()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    Single { gate: Gate, target: String },
    Controlled { gate: Gate, control: String, control_value: u8, target: String },
    Swap { a: String, b: String },
    ControlledSwap { control: String, control_value: u8, a: String, b: String },
}

impl Instruction {
    pub fn single(gate: Gate, target: &str) -> Self {
        Instruction::Single { gate, target: target.to_string() }
    }

    pub fn controlled(gate: Gate, control: &str, control_value: u8, target: &str) -> Self {
        Instruction::Controlled { gate, control: control.to_string(), control_value, target: target.to_string() }
    }

    pub fn swap(a: &str, b: &str) -> Self {
        Instruction::Swap { a: a.to_string(), b: b.to_string() }
    }

    pub fn controlled_swap(control: &str, control_value: u8, a: &str, b: &str) -> Self {
        Instruction::ControlledSwap { control: control.to_string(), control_value, a: a.to_string(), b: b.to_string() }
    }

    pub fn operands(&self) -> Vec<&str> {
        match self {
            Instruction::Single { target, .. } => vec![target],
            Instruction::Controlled { control, target, .. } => vec![control, target],
            Instruction::Swap { a, b } => vec![a, b],
            Instruction::ControlledSwap { control, a, b, .. } => vec![control, a, b],
        }
    }

    fn control_value(&self) -> Option<u8> {
        match self {
            Instruction::Controlled { control_value, .. } | Instruction::ControlledSwap { control_value, .. } => {
                Some(*control_value)
            }
            _ => None,
        }
    }

    fn rename(&mut self, from: &str, to: &str) {
        let fix = |s: &mut String| {
            if s == from {
                *s = to.to_string();
            }
        };
        match self {
            Instruction::Single { target, .. } => fix(target),
            Instruction::Controlled { control, target, .. } => {
                fix(control);
                fix(target);
            }
            Instruction::Swap { a, b } => {
                fix(a);
                fix(b);
            }
            Instruction::ControlledSwap { control, a, b, .. } => {
                fix(control);
                fix(a);
                fix(b);
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(v) = self.control_value() {
            if v > 1 {
                return Err(Error::ControlValue(v));
            }
        }
        match self {
            Instruction::Single { gate, .. } | Instruction::Controlled { gate, .. } => gate.validate()?,
            _ => {}
        }
        let ops = self.operands();
        for (i, op) in ops.iter().enumerate() {
            if ops[..i].contains(op) {
                return Err(Error::DuplicateOperand((0..ops.len()).collect()));
            }
        }
        Ok(())
    }
}

/// A measured qubit and the classical label its bit is reported under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measurement {
    pub qubit: String,
    pub label: String,
}

impl Measurement {
    pub fn new(qubit: &str, label: &str) -> Self {
        Measurement { qubit: qubit.to_string(), label: label.to_string() }
    }
}

/// Qubits and instructions contributed by a reusable component.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Fragment {
    pub qubits: Vec<String>,
    pub instructions: Vec<Instruction>,
}

/// A validated circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    qubits: Vec<String>,
    instructions: Vec<Instruction>,
    measurements: Vec<Measurement>,
}

impl Circuit {
    /// Validates declarations, operands and gate matrices.
    pub fn build(qubits: Vec<String>, instructions: Vec<Instruction>, measurements: Vec<Measurement>) -> Result<Self> {
        if qubits.is_empty() {
            return Err(Error::EmptyRegister);
        }
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(Error::DuplicateQubit(q.clone()));
            }
        }
        let declared = |name: &str| qubits.iter().any(|q| q == name);
        for inst in &instructions {
            inst.validate()?;
            if let Some(unknown) = inst.operands().into_iter().find(|op| !declared(op)) {
                return Err(Error::UnknownQubit(unknown.to_string()));
            }
        }
        for (i, m) in measurements.iter().enumerate() {
            if !declared(&m.qubit) {
                return Err(Error::UnknownQubit(m.qubit.clone()));
            }
            if measurements[..i].iter().any(|o| o.qubit == m.qubit) {
                return Err(Error::DuplicateQubit(m.qubit.clone()));
            }
        }
        Ok(Circuit { qubits, instructions, measurements })
    }

    pub fn builder() -> CircuitBuilder {
        CircuitBuilder::default()
    }

    pub fn qubits(&self) -> &[String] {
        &self.qubits
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn measurements(&self) -> &[Measurement] {
        &self.measurements
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.qubits.iter().position(|q| q == name).ok_or_else(|| Error::UnknownQubit(name.to_string()))
    }

    /// Register position (0 = rightmost character) of a measured qubit.
    pub fn register_position(&self, name: &str) -> Result<usize> {
        self.measured_names().iter().position(|q| q == name).ok_or_else(|| Error::UnknownQubit(name.to_string()))
    }

    /// Measured qubits; a circuit without explicit measurements measures everything.
    pub fn measured_names(&self) -> Vec<String> {
        if self.measurements.is_empty() {
            self.qubits.clone()
        } else {
            self.measurements.iter().map(|m| m.qubit.clone()).collect()
        }
    }

    fn measured_indices(&self) -> Vec<usize> {
        let index: HashMap<&str, usize> = self.qubits.iter().enumerate().map(|(i, q)| (q.as_str(), i)).collect();
        self.measured_names().iter().map(|q| index[q.as_str()]).collect()
    }

    /// Applies the instructions, in order, to `state`.
    pub fn apply_to(&self, state: &mut StateVector) -> Result<()> {
        let index: HashMap<&str, usize> = self.qubits.iter().enumerate().map(|(i, q)| (q.as_str(), i)).collect();
        for inst in &self.instructions {
            match inst {
                Instruction::Single { gate, target } => {
                    state.apply_single_qubit_gate(&gate.matrix(), index[target.as_str()])?
                }
                Instruction::Controlled { gate, control, control_value, target } => state.apply_controlled_gate(
                    &gate.matrix(),
                    index[control.as_str()],
                    *control_value,
                    index[target.as_str()],
                )?,
                Instruction::Swap { a, b } => state.apply_swap(index[a.as_str()], index[b.as_str()])?,
                Instruction::ControlledSwap { control, control_value, a, b } => state.apply_controlled_swap(
                    index[control.as_str()],
                    *control_value,
                    index[a.as_str()],
                    index[b.as_str()],
                )?,
            }
        }
        Ok(())
    }

    pub fn final_state(&self) -> Result<StateVector> {
        let mut state = StateVector::new(self.qubits.len())?;
        self.apply_to(&mut state)?;
        Ok(state)
    }

    pub fn run_exact(&self) -> Result<Distribution> {
        self.final_state()?.outcome_probabilities(&self.measured_indices())
    }

    pub fn run_sampled(&self, shots: u64, seed: u64) -> Result<Histogram> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        self.final_state()?.sample_measurements(&self.measured_indices(), shots, seed)
    }

    /// `self` followed by `other`. Qubits new to `other` are appended, and the
    /// measurement list is `other`'s when it has one.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        let mut qubits = self.qubits.clone();
        for q in &other.qubits {
            if !qubits.contains(q) {
                qubits.push(q.clone());
            }
        }
        let mut instructions = self.instructions.clone();
        instructions.extend(other.instructions.iter().cloned());
        let measurements =
            if other.measurements.is_empty() { self.measurements.clone() } else { other.measurements.clone() };
        Circuit::build(qubits, instructions, measurements)
    }

    /// Replaces a mid-circuit measurement of `qubit` by swapping in a fresh
    /// ancilla before instruction `at`.
    ///
    /// The ancilla is named `q<n>` (n = current qubit count) when free,
    /// starts in |`measured_value`⟩ via a leading `x` when 1, and is appended
    /// to the measured register. Statistics of the rewritten circuit equal
    /// those of the measured one on the shots where the ancilla reads
    /// `measured_value`. The leading `x` shifts later instruction indices by one.
    pub fn ancilla_swap_for_measurement(&self, qubit: &str, measured_value: u8, at: usize) -> Result<Circuit> {
        self.index_of(qubit)?;
        if measured_value > 1 {
            return Err(Error::ControlValue(measured_value));
        }
        if at > self.instructions.len() {
            return Err(Error::InsertionPoint { at, len: self.instructions.len() });
        }
        let ancilla = fresh_name(&self.qubits, "q", self.qubits.len());
        let mut qubits = self.qubits.clone();
        qubits.push(ancilla.clone());

        let mut instructions = Vec::with_capacity(self.instructions.len() + 2);
        if measured_value == 1 {
            instructions.push(Instruction::single(Gate::X, &ancilla));
        }
        instructions.extend(self.instructions[..at].iter().cloned());
        instructions.push(Instruction::swap(qubit, &ancilla));
        instructions.extend(self.instructions[at..].iter().cloned());

        let mut measurements = if self.measurements.is_empty() {
            self.qubits.iter().enumerate().map(|(i, q)| Measurement::new(q, &format!("c{i}"))).collect()
        } else {
            self.measurements.clone()
        };
        let labels: Vec<String> = measurements.iter().map(|m| m.label.clone()).collect();
        let label = fresh_name(&labels, "c", measurements.len());
        measurements.push(Measurement::new(&ancilla, &label));
        Circuit::build(qubits, instructions, measurements)
    }

    /// Renames a qubit throughout the circuit.
    pub fn rename_qubit(&self, from: &str, to: &str) -> Result<Circuit> {
        self.index_of(from)?;
        if from != to && self.qubits.iter().any(|q| q == to) {
            return Err(Error::DuplicateQubit(to.to_string()));
        }
        let mut out = self.clone();
        for q in &mut out.qubits {
            if q == from {
                *q = to.to_string();
            }
        }
        for inst in &mut out.instructions {
            inst.rename(from, to);
        }
        for m in &mut out.measurements {
            if m.qubit == from {
                m.qubit = to.to_string();
            }
        }
        Ok(out)
    }
}

fn fresh_name(taken: &[String], prefix: &str, start: usize) -> String {
    (start..).map(|n| format!("{prefix}{n}")).find(|name| !taken.contains(name)).expect("unbounded search")
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::emit(self))
    }
}

/// Incremental construction; validation happens in [`CircuitBuilder::build`].
#[derive(Debug, Clone, Default)]
pub struct CircuitBuilder {
    qubits: Vec<String>,
    instructions: Vec<Instruction>,
    measurements: Vec<Measurement>,
}

impl CircuitBuilder {
    pub fn qubit(mut self, name: &str) -> Self {
        self.qubits.push(name.to_string());
        self
    }

    pub fn gate(mut self, gate: Gate, target: &str) -> Self {
        self.instructions.push(Instruction::single(gate, target));
        self
    }

    pub fn instruction(mut self, inst: Instruction) -> Self {
        self.instructions.push(inst);
        self
    }

    /// Declares the fragment's qubits that are not yet declared, then appends its instructions.
    pub fn fragment(mut self, fragment: Fragment) -> Self {
        for q in fragment.qubits {
            if !self.qubits.contains(&q) {
                self.qubits.push(q);
            }
        }
        self.instructions.extend(fragment.instructions);
        self
    }

    pub fn measure(mut self, qubit: &str, label: &str) -> Self {
        self.measurements.push(Measurement::new(qubit, label));
        self
    }

    pub fn build(self) -> Result<Circuit> {
        Circuit::build(self.qubits, self.instructions, self.measurements)
    }
}
