//! Scenario files: a versioned JSON description of one experiment, its
//! observed rates and (once fitted) its free parameter.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::cognition::{
    conditional_component, event_component, kernel_circuit, ConditionalLink, EventSpec, InterferenceKernel,
};
use crate::error::{Error, Result};
use crate::fit::{fit_phase, fit_total_probability_phase, FitResult, TotalProbabilityModel};
use crate::models::{DisjunctionModel, KernelModel, OrderEffectModel};

pub const SCHEMA_VERSION: u32 = 1;
/// Prior used for a disjunction's first event when the file leaves it out.
pub const DEFAULT_PRIOR: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Two questions; events are `[target, context]` with their non-comparative rates.
    OrderEffect,
    /// Event 1 feeds a kernel and a link into event 2.
    Disjunction,
    /// One cause, one effect, no interference.
    ClassicalBayes,
    /// A bare kernel driven by one uncertain source.
    Interference,
}

impl ScenarioKind {
    pub fn observed_keys(self) -> &'static [&'static str] {
        match self {
            ScenarioKind::OrderEffect => &["target", "context", "comparative"],
            ScenarioKind::Disjunction => &["known_yes", "known_no", "unknown"],
            ScenarioKind::ClassicalBayes => &["cause", "effect"],
            ScenarioKind::Interference => &["excited"],
        }
    }

    /// Name of the free parameter and the observed key it is fitted to.
    pub fn parameter(self) -> (&'static str, &'static str) {
        match self {
            ScenarioKind::OrderEffect => ("phi_gc", "comparative"),
            ScenarioKind::Disjunction => ("phi", "unknown"),
            ScenarioKind::ClassicalBayes => ("theta", "effect"),
            ScenarioKind::Interference => ("phi", "excited"),
        }
    }

    fn event_count(self) -> usize {
        match self {
            ScenarioKind::Interference => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioKind::OrderEffect => "order_effect",
            ScenarioKind::Disjunction => "disjunction",
            ScenarioKind::ClassicalBayes => "classical_bayes",
            ScenarioKind::Interference => "interference",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub schema: u32,
    pub name: String,
    pub kind: ScenarioKind,
    #[serde(default)]
    pub events: Vec<EventSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub links: Vec<ConditionalLink>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<InterferenceKernel>,
    /// Fitted or user-fixed angles outside the kernel, e.g. `phi_gc`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default)]
    pub observed: BTreeMap<String, f64>,
    /// Free-text provenance.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

/// Circuits a scenario builds, in emission order.
pub type NamedCircuits = Vec<(String, Circuit)>;

fn probability_at(path: String, value: f64) -> Result<()> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::scenario(path, format!("{value} is outside [0, 1]")))
    }
}

impl ScenarioSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let spec: ScenarioSpec = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::scenario(if path == "." { "<root>".to_string() } else { path }, e.into_inner().to_string())
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            fs::read_to_string(path).map_err(|e| Error::Io { path: path.to_path_buf(), message: e.to_string() })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("scenario serializes");
        text.push('\n');
        text
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|e| Error::Io { path: path.to_path_buf(), message: e.to_string() })
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::scenario(
                "schema",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema),
            ));
        }
        if self.events.len() != self.kind.event_count() {
            return Err(Error::scenario(
                "events",
                format!("{} scenarios take {} events, found {}", self.kind, self.kind.event_count(), self.events.len()),
            ));
        }
        for (i, event) in self.events.iter().enumerate() {
            if self.events[..i].iter().any(|e| e.name == event.name) {
                return Err(Error::scenario(format!("events[{i}].name"), format!("duplicate event `{}`", event.name)));
            }
            if let Some(p) = event.probability {
                probability_at(format!("events[{i}].probability"), p)?;
            }
        }
        for (i, link) in self.links.iter().enumerate() {
            for (field, name) in [("cause", &link.cause), ("effect", &link.effect)] {
                if !self.events.iter().any(|e| &e.name == name) {
                    return Err(Error::scenario(format!("links[{i}].{field}"), format!("unknown event `{name}`")));
                }
            }
            probability_at(format!("links[{i}].p_effect_given_cause"), link.p_effect_given_cause)?;
            probability_at(format!("links[{i}].p_effect_given_not_cause"), link.p_effect_given_not_cause)?;
        }
        for (key, &value) in &self.observed {
            if !self.kind.observed_keys().contains(&key.as_str()) {
                return Err(Error::scenario(
                    format!("observed.{key}"),
                    format!(
                        "not an outcome of {} scenarios (expected one of {:?})",
                        self.kind,
                        self.kind.observed_keys()
                    ),
                ));
            }
            probability_at(format!("observed.{key}"), value)?;
        }
        let (parameter, _) = self.kind.parameter();
        for (key, value) in &self.parameters {
            let in_kernel = matches!(self.kind, ScenarioKind::Disjunction | ScenarioKind::Interference);
            if key != parameter || in_kernel {
                return Err(Error::scenario(format!("parameters.{key}"), "unknown parameter"));
            }
            if !value.is_finite() {
                return Err(Error::scenario(format!("parameters.{key}"), "must be finite"));
            }
        }
        if let Some(phase) = self.kernel.and_then(|k| k.phase) {
            if !phase.is_finite() {
                return Err(Error::scenario("kernel.phase", "must be finite"));
            }
        }
        self.validate_kind()
    }

    fn validate_kind(&self) -> Result<()> {
        let needs_probability = |i: usize| -> Result<()> {
            match self.events[i].probability {
                Some(_) => Ok(()),
                None => Err(Error::scenario(format!("events[{i}].probability"), "required")),
            }
        };
        let needs_link = || -> Result<()> {
            match self.links.as_slice() {
                [link] if link.cause == self.events[0].name && link.effect == self.events[1].name => Ok(()),
                [_] => Err(Error::scenario("links[0]", "must run from the first event to the second")),
                _ => Err(Error::scenario("links", format!("{} scenarios take exactly one link", self.kind))),
            }
        };
        let needs_kernel =
            || -> Result<()> { self.kernel.map(|_| ()).ok_or_else(|| Error::scenario("kernel", "required")) };
        let no_kernel = || -> Result<()> {
            match self.kernel {
                Some(_) => Err(Error::scenario("kernel", format!("not used by {} scenarios", self.kind))),
                None => Ok(()),
            }
        };
        match self.kind {
            ScenarioKind::OrderEffect => {
                needs_probability(0)?;
                needs_probability(1)?;
                no_kernel()?;
                if !self.links.is_empty() {
                    return Err(Error::scenario("links", "not used by order_effect scenarios"));
                }
            }
            ScenarioKind::Disjunction => {
                needs_link()?;
                needs_kernel()?;
            }
            ScenarioKind::ClassicalBayes => {
                needs_probability(0)?;
                needs_link()?;
                no_kernel()?;
            }
            ScenarioKind::Interference => {
                needs_probability(0)?;
                needs_kernel()?;
                if !self.links.is_empty() {
                    return Err(Error::scenario("links", "not used by interference scenarios"));
                }
            }
        }
        Ok(())
    }

    fn event(&self, i: usize) -> &str {
        &self.events[i].name
    }

    fn probability(&self, i: usize) -> f64 {
        self.events[i].probability.unwrap_or(DEFAULT_PRIOR)
    }

    fn link(&self) -> &ConditionalLink {
        &self.links[0]
    }

    /// Current value of the free parameter, if set.
    pub fn parameter_value(&self) -> Option<f64> {
        match self.kind {
            ScenarioKind::Disjunction | ScenarioKind::Interference => self.kernel.and_then(|k| k.phase),
            _ => self.parameters.get(self.kind.parameter().0).copied(),
        }
    }

    pub fn set_parameter(&mut self, value: f64) {
        match self.kind {
            ScenarioKind::Disjunction | ScenarioKind::Interference => {
                if let Some(kernel) = self.kernel.as_mut() {
                    kernel.phase = Some(value);
                }
            }
            _ => {
                self.parameters.insert(self.kind.parameter().0.to_string(), value);
            }
        }
    }

    /// Observed rate the free parameter is fitted against.
    pub fn fit_target(&self) -> Option<f64> {
        self.observed.get(self.kind.parameter().1).copied()
    }

    fn kind_error(&self, wanted: ScenarioKind) -> Error {
        Error::scenario("kind", format!("expected {wanted}, found {}", self.kind))
    }

    pub fn order_model(&self, phase: f64) -> Result<OrderEffectModel> {
        if self.kind != ScenarioKind::OrderEffect {
            return Err(self.kind_error(ScenarioKind::OrderEffect));
        }
        OrderEffectModel::from_rates(self.probability(0), self.probability(1), phase)
    }

    pub fn disjunction_model(&self, phase: f64) -> Result<DisjunctionModel> {
        if self.kind != ScenarioKind::Disjunction {
            return Err(self.kind_error(ScenarioKind::Disjunction));
        }
        let link = self.link();
        let kernel = self.kernel.ok_or_else(|| Error::scenario("kernel", "required"))?;
        DisjunctionModel::new(
            self.probability(0),
            link.p_effect_given_cause,
            link.p_effect_given_not_cause,
            kernel.variant,
            phase,
        )
    }

    pub fn kernel_model(&self) -> Result<KernelModel> {
        if self.kind != ScenarioKind::Interference {
            return Err(self.kind_error(ScenarioKind::Interference));
        }
        let kernel = self.kernel.ok_or_else(|| Error::scenario("kernel", "required"))?;
        KernelModel::new(self.probability(0), kernel.variant)
    }

    pub fn total_probability_model(&self) -> Result<TotalProbabilityModel> {
        if self.kind != ScenarioKind::ClassicalBayes {
            return Err(self.kind_error(ScenarioKind::ClassicalBayes));
        }
        let link = self.link();
        TotalProbabilityModel::new(self.probability(0), link.p_effect_given_cause, link.p_effect_given_not_cause)
    }

    /// Fit the free parameter to its observed target. `parameter`, when
    /// given, must name the scenario's parameter.
    pub fn fit(&self, parameter: Option<&str>) -> Result<FitResult> {
        let (name, key) = self.kind.parameter();
        if let Some(p) = parameter {
            if p != name {
                return Err(Error::UnknownParameter(p.to_string()));
            }
        }
        let target = self.fit_target().ok_or_else(|| Error::scenario(format!("observed.{key}"), "required to fit"))?;
        match self.kind {
            ScenarioKind::OrderEffect => fit_phase(&self.order_model(0.0)?, target),
            ScenarioKind::Disjunction => fit_phase(&self.disjunction_model(0.0)?, target),
            ScenarioKind::Interference => fit_phase(&self.kernel_model()?, target),
            ScenarioKind::ClassicalBayes => fit_total_probability_phase(&self.total_probability_model()?, target),
        }
    }

    /// Attainable range of the fitted quantity as the parameter sweeps.
    pub fn attainable_range(&self, parameter: &str) -> Result<(f64, f64)> {
        use crate::fit::attainable_range;
        match self.kind {
            ScenarioKind::OrderEffect => attainable_range(&self.order_model(0.0)?, parameter),
            ScenarioKind::Disjunction => attainable_range(&self.disjunction_model(0.0)?, parameter),
            ScenarioKind::Interference => attainable_range(&self.kernel_model()?, parameter),
            ScenarioKind::ClassicalBayes => attainable_range(&self.total_probability_model()?, parameter),
        }
    }

    /// Parameter to run with: the stored value, else a fit to the observed
    /// target, else zero. The fit is returned when one was run.
    pub fn resolve_parameter(&self) -> Result<(f64, Option<FitResult>)> {
        if let Some(value) = self.parameter_value() {
            return Ok((value, None));
        }
        if self.fit_target().is_some() {
            let fit = self.fit(None)?;
            return Ok((fit.value, Some(fit)));
        }
        Ok((0.0, None))
    }

    /// The scenario's circuits with the parameter set to `value`.
    pub fn circuits(&self, value: f64) -> Result<NamedCircuits> {
        Ok(match self.kind {
            ScenarioKind::OrderEffect => {
                let c = self.order_model(value)?.circuits()?;
                vec![
                    ("no_measurement".into(), c.no_measurement),
                    ("context_yes".into(), c.context_yes),
                    ("context_no".into(), c.context_no),
                ]
            }
            ScenarioKind::Disjunction => {
                let c = self.disjunction_model(value)?.circuits()?;
                vec![("unknown".into(), c.unknown), ("known_yes".into(), c.known_yes), ("known_no".into(), c.known_no)]
            }
            ScenarioKind::Interference => {
                let k = self.kernel_model()?;
                vec![("kernel".into(), kernel_circuit(k.variant, value, k.source_probability)?)]
            }
            ScenarioKind::ClassicalBayes => vec![("total_probability".into(), self.classical_circuit()?)],
        })
    }

    /// Cause on `q0`, effect on `q1`, conditional rotations between them.
    pub fn classical_circuit(&self) -> Result<Circuit> {
        Circuit::builder()
            .fragment(event_component("q0", self.probability(0))?)
            .fragment(conditional_component(self.link(), "q0", "q1")?)
            .measure("q0", "c0")
            .measure("q1", "c1")
            .build()
    }

    pub fn event_names(&self) -> Vec<&str> {
        (0..self.events.len()).map(|i| self.event(i)).collect()
    }
}
