//! Question-order model: one belief qubit answered along two axes.
//!
//! The target question (e.g. "is Clinton honest?") points along
//! `(θ_T, φ)` and the context question along `(θ_C, 0)`; only the phase
//! difference matters. Asking a question is simulated by rotating the state
//! into the question's frame and reading |0⟩ as "yes".

use crate::circuit::{Circuit, Gate};
use crate::cognition::{and_then, bias_activation_component, event_angle, event_component, QubitDirection};
use crate::error::{check_probability, Result};
use crate::outcomes::{exact_conditional_ratio, ConditionalRatioQuery, Pattern};

/// Index in the no-measurement circuit after which the context answer is read.
pub const CONTEXT_MEASUREMENT_POINT: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderEffectModel {
    theta_target: f64,
    theta_context: f64,
    phase: f64,
}

/// The three order-effect circuits.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderCircuits {
    /// Context rotation and its inverse, then the target question.
    pub no_measurement: Circuit,
    /// Context answered "yes" (ancilla swapped in as |0⟩).
    pub context_yes: Circuit,
    /// Context answered "no" (ancilla swapped in as |1⟩).
    pub context_no: Circuit,
}

impl OrderEffectModel {
    /// Angles from the non-comparative "yes" rates of the two questions.
    pub fn from_rates(p_target: f64, p_context: f64, phase: f64) -> Result<Self> {
        Ok(Self::from_angles(
            event_angle(check_probability("p_target", p_target)?)?,
            event_angle(check_probability("p_context", p_context)?)?,
            phase,
        ))
    }

    pub fn from_angles(theta_target: f64, theta_context: f64, phase: f64) -> Self {
        OrderEffectModel { theta_target, theta_context, phase }
    }

    pub fn with_phase(&self, phase: f64) -> Self {
        OrderEffectModel { phase, ..*self }
    }

    pub fn theta_target(&self) -> f64 {
        self.theta_target
    }

    pub fn theta_context(&self) -> f64 {
        self.theta_context
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn target_direction(&self) -> Result<QubitDirection> {
        QubitDirection::wrapped(self.theta_target, self.phase)
    }

    pub fn context_direction(&self) -> Result<QubitDirection> {
        QubitDirection::new(self.theta_context, 0.0)
    }

    /// Top circuit: `rot −θ_C; rot θ_C; rz −φ; rot −θ_T` on `q0`. The first two
    /// cancel; they mark where the context question would be read.
    pub fn no_measurement_circuit(&self) -> Result<Circuit> {
        Circuit::builder()
            .qubit("q0")
            .gate(Gate::Rot(-self.theta_context), "q0")
            .gate(Gate::Rot(self.theta_context), "q0")
            .gate(Gate::Rz(-self.phase), "q0")
            .gate(Gate::Rot(-self.theta_target), "q0")
            .measure("q0", "c0")
            .build()
    }

    /// Context answer `answer` (0 = yes) read by swapping in ancilla `q1`.
    pub fn measured_circuit(&self, answer: u8) -> Result<Circuit> {
        self.no_measurement_circuit()?.ancilla_swap_for_measurement("q0", answer, CONTEXT_MEASUREMENT_POINT)
    }

    pub fn circuits(&self) -> Result<OrderCircuits> {
        Ok(OrderCircuits {
            no_measurement: self.no_measurement_circuit()?,
            context_yes: self.measured_circuit(0)?,
            context_no: self.measured_circuit(1)?,
        })
    }

    /// Bottom circuit with its swap controlled by `q2`, which is |1⟩ with
    /// probability `activation`.
    pub fn activation_circuit(&self, activation: f64) -> Result<Circuit> {
        let ancilla_x = crate::circuit::Instruction::single(Gate::X, "q1");
        Circuit::builder()
            .qubit("q0")
            .qubit("q1")
            .fragment(event_component("q2", 1.0 - check_probability("activation", activation)?)?)
            .instruction(ancilla_x)
            .gate(Gate::Rot(-self.theta_context), "q0")
            .fragment(bias_activation_component("q2", "q0", "q1")?)
            .gate(Gate::Rot(self.theta_context), "q0")
            .gate(Gate::Rz(-self.phase), "q0")
            .gate(Gate::Rot(-self.theta_target), "q0")
            .measure("q0", "c0")
            .measure("q1", "c1")
            .build()
    }

    /// Pattern for "target yes" jointly with context answer `answer` in a measured circuit.
    pub fn joint_pattern(answer: u8) -> Pattern {
        Pattern::new(&format!("{answer}0"), 2).expect("static pattern")
    }

    /// `#(target yes, context = answer) / #(context = answer)`.
    pub fn conditional_query(answer: u8) -> ConditionalRatioQuery {
        ConditionalRatioQuery::new(&format!("{answer}0"), &format!("{answer}*")).expect("static pattern")
    }

    /// Target "yes" rate without the context question.
    pub fn non_comparative(&self) -> Result<f64> {
        Ok(self.no_measurement_circuit()?.run_exact()?.get("0"))
    }

    /// Context "yes" rate.
    pub fn context_rate(&self) -> Result<f64> {
        Ok(self.measured_circuit(0)?.run_exact()?.probability(&Pattern::new("0*", 2)?))
    }

    /// Target "yes" rate after the context question, summed over both context answers.
    pub fn comparative(&self) -> Result<f64> {
        let mut total = 0.0;
        for answer in [0, 1] {
            total += self.measured_circuit(answer)?.run_exact()?.probability(&Self::joint_pattern(answer));
        }
        Ok(total)
    }

    /// Target "yes" rate given context answer `answer`, read off the circuit.
    pub fn conditional(&self, answer: u8) -> Result<f64> {
        exact_conditional_ratio(&self.measured_circuit(answer)?.run_exact()?, &Self::conditional_query(answer))
    }

    /// Analytic counterpart of [`OrderEffectModel::comparative`].
    pub fn comparative_analytic(&self) -> Result<f64> {
        let (pole, target, context) = (QubitDirection::pole(), self.target_direction()?, self.context_direction()?);
        Ok(and_then(&pole, &context, &target) + and_then(&pole, &context.orthogonal(), &target))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Instruction;

    fn cg(phase: f64) -> OrderEffectModel {
        OrderEffectModel::from_rates(0.5, 0.68, phase).unwrap()
    }

    #[test]
    fn rewrites_reproduce_the_figure_layout() {
        let m = cg(0.3);
        let c = m.circuits().unwrap();
        let (tc, tt) = (m.theta_context(), m.theta_target());
        assert_eq!(
            c.context_yes.instructions(),
            [
                Instruction::single(Gate::Rot(-tc), "q0"),
                Instruction::swap("q0", "q1"),
                Instruction::single(Gate::Rot(tc), "q0"),
                Instruction::single(Gate::Rz(-0.3), "q0"),
                Instruction::single(Gate::Rot(-tt), "q0"),
            ]
        );
        assert_eq!(c.context_no.instructions()[0], Instruction::single(Gate::X, "q1"));
        assert_eq!(&c.context_no.instructions()[1..], c.context_yes.instructions());
    }

    #[test]
    fn top_circuit_gives_non_comparative_rate() {
        for phase in [0.0, 1.0, 2.5] {
            assert!((cg(phase).non_comparative().unwrap() - 0.5).abs() < 1e-10);
        }
        assert!((cg(0.0).context_rate().unwrap() - 0.68).abs() < 1e-10);
    }

    #[test]
    fn planar_comparative_rate() {
        let m = cg(0.0);
        let comparative = m.comparative().unwrap();
        assert!((comparative - 0.668).abs() < 1e-3, "{comparative}");
        assert!((comparative - m.comparative_analytic().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn coincident_questions_show_no_order_effect() {
        let m = OrderEffectModel::from_angles(0.7, 0.7, 0.0);
        assert!((m.comparative().unwrap() - m.non_comparative().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn circuit_conditionals_match_projection() {
        let m = cg(1.3);
        let (pole, t, c) = (QubitDirection::pole(), m.target_direction().unwrap(), m.context_direction().unwrap());
        let yes = and_then(&pole, &c, &t) / c.overlap(&pole);
        assert!((m.conditional(0).unwrap() - yes).abs() < 1e-10);
        let no = and_then(&pole, &c.orthogonal(), &t) / c.orthogonal().overlap(&pole);
        assert!((m.conditional(1).unwrap() - no).abs() < 1e-10);
    }

    #[test]
    fn activation_interpolates() {
        let m = cg(0.9);
        let off = m.activation_circuit(0.0).unwrap().run_exact().unwrap();
        let on = m.activation_circuit(1.0).unwrap().run_exact().unwrap();
        let top = m.no_measurement_circuit().unwrap().run_exact().unwrap();
        let bottom = m.measured_circuit(1).unwrap().run_exact().unwrap();
        let q0 = |d: &crate::Distribution| d.probability(&Pattern::new("*0", 2).unwrap());
        assert!((q0(&off) - top.get("0")).abs() < 1e-10);
        for key in ["00", "01", "10", "11"] {
            assert!((on.get(key) - bottom.get(key)).abs() < 1e-10);
        }
        let half = m.activation_circuit(0.5).unwrap().run_exact().unwrap();
        let expect = 0.5 * q0(&off) + 0.5 * q0(&on);
        assert!((q0(&half) - expect).abs() < 1e-10);
    }
}
