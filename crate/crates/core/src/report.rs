//! Run a scenario's circuits and tabulate model rates against observed ones.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::fit::FitResult;
use crate::models::{DisjunctionModel, OrderEffectModel};
use crate::outcomes::{
    conditional_ratio, exact_conditional_ratio, ConditionalRatioQuery, Distribution, Histogram, Pattern,
};
use crate::scenario::{NamedCircuits, ScenarioKind, ScenarioSpec};

pub const DEFAULT_SHOTS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    #[default]
    Exact,
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub mode: RunMode,
    pub shots: u64,
    pub seed: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { mode: RunMode::Exact, shots: DEFAULT_SHOTS, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterSource {
    Scenario,
    Fitted,
    Default,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterValue {
    pub name: String,
    pub value: f64,
    pub source: ParameterSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub label: String,
    pub expected: Option<f64>,
    pub exact: f64,
    pub sampled: Option<f64>,
    /// `√(p(1 − p)/shots)` at the exact rate.
    pub shot_noise_sigma: f64,
    /// `|sampled − exact|` in sample mode, `|exact − expected|` in exact mode
    /// (zero when nothing is expected).
    pub discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityReport {
    pub scenario: String,
    pub kind: ScenarioKind,
    pub mode: RunMode,
    pub shots: u64,
    pub seed: Option<u64>,
    pub parameter: ParameterValue,
    pub rows: Vec<ReportRow>,
}

/// How a row is read from the run circuits.
#[derive(Debug, Clone, PartialEq)]
pub enum Quantity {
    Marginal {
        circuit: usize,
        pattern: Pattern,
    },
    /// Sum of marginals taken from different circuits.
    Sum(Vec<(usize, Pattern)>),
    Ratio {
        circuit: usize,
        query: ConditionalRatioQuery,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannedRow {
    pub label: String,
    pub expected: Option<f64>,
    pub quantity: Quantity,
}

/// Circuits to run and the rows read from them. Only the first `emitted`
/// circuits belong to the scenario proper; the rest serve reference rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub circuits: NamedCircuits,
    pub emitted: usize,
    pub rows: Vec<PlannedRow>,
}

fn pattern(text: &str) -> Pattern {
    Pattern::new(text, text.len()).expect("static pattern")
}

fn query(numerator: &str, condition: &str) -> ConditionalRatioQuery {
    ConditionalRatioQuery::new(numerator, condition).expect("static pattern")
}

fn row(label: String, expected: Option<f64>, quantity: Quantity) -> PlannedRow {
    PlannedRow { label, expected, quantity }
}

/// Resolve the scenario's parameter: stored value, else fitted, else zero.
pub fn resolve(spec: &ScenarioSpec) -> Result<ParameterValue> {
    let name = spec.kind.parameter().0.to_string();
    let (value, fit) = spec.resolve_parameter()?;
    let source = match (&fit, spec.parameter_value()) {
        (Some(_), _) => ParameterSource::Fitted,
        (None, Some(_)) => ParameterSource::Scenario,
        (None, None) => ParameterSource::Default,
    };
    Ok(ParameterValue { name, value, source, fit })
}

pub fn plan(spec: &ScenarioSpec, value: f64) -> Result<Plan> {
    let mut circuits = spec.circuits(value)?;
    let emitted = circuits.len();
    let names = spec.event_names();
    let observed = |key: &str| spec.observed.get(key).copied();
    let rows = match spec.kind {
        ScenarioKind::OrderEffect => {
            let (t, c) = (names[0], names[1]);
            let planar = spec.order_model(0.0)?.circuits()?;
            circuits.push(("planar_context_yes".into(), planar.context_yes));
            circuits.push(("planar_context_no".into(), planar.context_no));
            let joint = |yes: usize, no: usize| {
                Quantity::Sum(vec![(yes, OrderEffectModel::joint_pattern(0)), (no, OrderEffectModel::joint_pattern(1))])
            };
            vec![
                row(t.to_string(), observed("target"), Quantity::Marginal { circuit: 0, pattern: pattern("0") }),
                row(c.to_string(), observed("context"), Quantity::Marginal { circuit: 1, pattern: pattern("0*") }),
                row(
                    format!("{t}|{c}"),
                    None,
                    Quantity::Ratio { circuit: 1, query: OrderEffectModel::conditional_query(0) },
                ),
                row(
                    format!("{t}|not {c}"),
                    None,
                    Quantity::Ratio { circuit: 2, query: OrderEffectModel::conditional_query(1) },
                ),
                row(format!("{t} after {c}"), observed("comparative"), joint(1, 2)),
                row(format!("{t} after {c}, planar"), None, joint(3, 4)),
            ]
        }
        ScenarioKind::Disjunction => {
            let (e1, e2) = (names[0], names[1]);
            let marginal = |i: usize| -> Result<Quantity> {
                Ok(Quantity::Marginal { circuit: i, pattern: DisjunctionModel::event_2_pattern(&circuits[i].1)? })
            };
            vec![
                row(format!("{e2}|{e1}"), observed("known_yes"), marginal(1)?),
                row(format!("{e2}|not {e1}"), observed("known_no"), marginal(2)?),
                row(format!("{e2}|unknown"), observed("unknown"), marginal(0)?),
            ]
        }
        ScenarioKind::Interference => {
            vec![row("excited".into(), observed("excited"), Quantity::Marginal { circuit: 0, pattern: pattern("1") })]
        }
        ScenarioKind::ClassicalBayes => {
            let (cause, effect) = (names[0], names[1]);
            vec![
                row(cause.to_string(), observed("cause"), Quantity::Marginal { circuit: 0, pattern: pattern("*0") }),
                row(effect.to_string(), observed("effect"), Quantity::Marginal { circuit: 0, pattern: pattern("0*") }),
                row(format!("{effect}|{cause}"), None, Quantity::Ratio { circuit: 0, query: query("00", "*0") }),
                row(format!("{effect}|not {cause}"), None, Quantity::Ratio { circuit: 0, query: query("01", "*1") }),
            ]
        }
    };
    Ok(Plan { circuits, emitted, rows })
}

fn exact_value(quantity: &Quantity, runs: &[Distribution]) -> Result<f64> {
    Ok(match quantity {
        Quantity::Marginal { circuit, pattern } => runs[*circuit].probability(pattern),
        Quantity::Sum(parts) => parts.iter().map(|(c, p)| runs[*c].probability(p)).sum(),
        Quantity::Ratio { circuit, query } => exact_conditional_ratio(&runs[*circuit], query)?,
    })
}

fn sampled_value(quantity: &Quantity, runs: &[Histogram]) -> Result<f64> {
    Ok(match quantity {
        Quantity::Marginal { circuit, pattern } => runs[*circuit].frequency(pattern),
        Quantity::Sum(parts) => parts.iter().map(|(c, p)| runs[*c].frequency(p)).sum(),
        Quantity::Ratio { circuit, query } => conditional_ratio(&runs[*circuit], query)?,
    })
}

/// Seed for the `index`-th circuit of a run.
pub fn circuit_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add(index as u64)
}

pub fn run(spec: &ScenarioSpec, options: RunOptions) -> Result<ProbabilityReport> {
    if options.shots == 0 {
        return Err(Error::ZeroShots);
    }
    let parameter = resolve(spec)?;
    let plan = plan(spec, parameter.value)?;
    let exact: Vec<Distribution> = plan.circuits.iter().map(|(_, c)| c.run_exact()).collect::<Result<_>>()?;
    let sampled: Option<Vec<Histogram>> = match options.mode {
        RunMode::Exact => None,
        RunMode::Sample => Some(
            plan.circuits
                .iter()
                .enumerate()
                .map(|(i, (_, c))| c.run_sampled(options.shots, circuit_seed(options.seed, i)))
                .collect::<Result<_>>()?,
        ),
    };
    let mut rows = Vec::with_capacity(plan.rows.len());
    for planned in &plan.rows {
        let p = exact_value(&planned.quantity, &exact)?;
        let s = sampled.as_deref().map(|h| sampled_value(&planned.quantity, h)).transpose()?;
        let discrepancy = match (s, planned.expected) {
            (Some(s), _) => (s - p).abs(),
            (None, Some(e)) => (p - e).abs(),
            (None, None) => 0.0,
        };
        rows.push(ReportRow {
            label: planned.label.clone(),
            expected: planned.expected,
            exact: p,
            sampled: s,
            shot_noise_sigma: ((p * (1.0 - p)).max(0.0) / options.shots as f64).sqrt(),
            discrepancy,
        });
    }
    Ok(ProbabilityReport {
        scenario: spec.name.clone(),
        kind: spec.kind,
        mode: options.mode,
        shots: options.shots,
        seed: (options.mode == RunMode::Sample).then_some(options.seed),
        parameter,
        rows,
    })
}

/// The scenario's own circuits in the text format.
pub fn emit_circuits(spec: &ScenarioSpec) -> Result<String> {
    let value = resolve(spec)?.value;
    let circuits = spec.circuits(value)?;
    Ok(crate::circuit::text::emit_many(circuits.iter().map(|(n, c): &(String, Circuit)| (n.as_str(), c))))
}

impl ProbabilityReport {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::scenario("<report>", e.to_string()))
    }

    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            writer.serialize(row).expect("in-memory csv");
        }
        String::from_utf8(writer.into_inner().expect("in-memory csv")).expect("csv is utf-8")
    }

    pub fn to_table(&self) -> String {
        let fixed = |v: Option<f64>| v.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into());
        let width = self.rows.iter().map(|r| r.label.len()).max().unwrap_or(0).max(5);
        let mut out = String::new();
        let _ = writeln!(out, "scenario {} ({})", self.scenario, self.kind);
        let source = match self.parameter.source {
            ParameterSource::Scenario => "scenario",
            ParameterSource::Fitted => "fitted",
            ParameterSource::Default => "default",
        };
        let _ = writeln!(out, "{} = {:.4} ({source})", self.parameter.name, self.parameter.value);
        match self.seed {
            Some(seed) => {
                let _ = writeln!(out, "mode sample, {} shots, seed {seed}", self.shots);
            }
            None => {
                let _ = writeln!(out, "mode exact");
            }
        }
        let _ = writeln!(
            out,
            "{:<width$}  {:>8}  {:>8}  {:>8}  {:>8}  {:>11}",
            "label", "expected", "exact", "sampled", "sigma", "discrepancy"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<width$}  {:>8}  {:>8.4}  {:>8}  {:>8.4}  {:>11.4}",
                r.label,
                fixed(r.expected),
                r.exact,
                fixed(r.sampled),
                r.shot_noise_sigma,
                r.discrepancy
            );
        }
        out
    }

    pub fn row(&self, label: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.label == label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CG: &str = r#"{
        "schema": 1, "name": "cg", "kind": "order_effect",
        "events": [{"name": "clinton", "probability": 0.5}, {"name": "gore", "probability": 0.68}],
        "observed": {"target": 0.5, "context": 0.68, "comparative": 0.57}
    }"#;

    #[test]
    fn order_report_rows() {
        let spec = ScenarioSpec::from_json(CG).unwrap();
        let report = run(&spec, RunOptions::default()).unwrap();
        assert_eq!(report.parameter.source, ParameterSource::Fitted);
        assert!((report.row("clinton").unwrap().exact - 0.5).abs() < 1e-10);
        assert!((report.row("gore").unwrap().exact - 0.68).abs() < 1e-10);
        assert!((report.row("clinton after gore").unwrap().exact - 0.57).abs() < 1e-9);
        assert!((report.row("clinton after gore, planar").unwrap().exact - 0.668).abs() < 1e-3);
        assert!(report.rows.iter().all(|r| r.sampled.is_none()));
    }

    #[test]
    fn sampled_reports_are_reproducible() {
        let spec = ScenarioSpec::from_json(CG).unwrap();
        let options = RunOptions { mode: RunMode::Sample, shots: 2000, seed: 7 };
        let a = run(&spec, options).unwrap();
        assert_eq!(a.to_json(), run(&spec, options).unwrap().to_json());
        for r in &a.rows {
            assert_eq!(r.discrepancy, (r.sampled.unwrap() - r.exact).abs());
            assert_eq!(r.shot_noise_sigma, (r.exact * (1.0 - r.exact) / 2000.0).sqrt());
        }
        assert_eq!(ProbabilityReport::from_json(&a.to_json()).unwrap().to_json(), a.to_json());
    }

    #[test]
    fn formats() {
        let spec = ScenarioSpec::from_json(CG).unwrap();
        let report = run(&spec, RunOptions::default()).unwrap();
        let csv = report.to_csv();
        assert!(csv.starts_with("label,expected,exact,sampled,shot_noise_sigma,discrepancy\n"));
        assert!(csv.contains("\"clinton after gore, planar\","));
        let table = report.to_table();
        assert!(table.contains("  0.5700  "), "{table}");
        assert_eq!(emit_circuits(&spec).unwrap().matches("circuit ").count(), 3);
        assert!(run(&spec, RunOptions { shots: 0, ..RunOptions::default() }).is_err());
    }
}
