//! One-parameter fits: sweep the response on a fixed grid, bracket the first
//! crossing of the target and bisect it down.

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cognition::CURVE_STEP;
use crate::error::{check_probability, Error, Result};
use crate::models::classical::{classical_total_probability, quantum_total_probability, solve_interference_phase};
use crate::models::{DisjunctionModel, KernelModel, OrderEffectModel};

pub const MAX_BISECTIONS: usize = 200;
pub const PHASE_TOLERANCE: f64 = 1e-12;
/// Largest residual accepted when the target only touches the curve.
pub const TANGENT_RESIDUAL: f64 = 1e-9;
const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// A model with a single free angle.
pub trait PhaseModel {
    fn parameter(&self) -> &'static str;
    fn evaluate(&self, value: f64) -> Result<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    ClosedForm,
    BracketedSearch,
}

impl fmt::Display for FitMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitMethod::ClosedForm => "closed_form",
            FitMethod::BracketedSearch => "bracketed_search",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub parameter_name: String,
    pub value: f64,
    pub residual: f64,
    pub method: FitMethod,
    pub evaluations: usize,
}

impl PhaseModel for DisjunctionModel {
    fn parameter(&self) -> &'static str {
        "phi"
    }

    fn evaluate(&self, value: f64) -> Result<f64> {
        self.with_phase(value).unknown_rate()
    }
}

impl PhaseModel for KernelModel {
    fn parameter(&self) -> &'static str {
        "phi"
    }

    fn evaluate(&self, value: f64) -> Result<f64> {
        if !value.is_finite() {
            return Err(Error::NonFinite("phi".into()));
        }
        Ok(self.response(value))
    }
}

impl PhaseModel for OrderEffectModel {
    fn parameter(&self) -> &'static str {
        "phi_gc"
    }

    fn evaluate(&self, value: f64) -> Result<f64> {
        self.with_phase(value).comparative()
    }
}

/// Total probability with an interference term, as a function of its phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotalProbabilityModel {
    pub p_a: f64,
    pub p_b_given_a: f64,
    pub p_b_given_not_a: f64,
}

impl TotalProbabilityModel {
    pub fn new(p_a: f64, p_b_given_a: f64, p_b_given_not_a: f64) -> Result<Self> {
        classical_total_probability(p_a, p_b_given_a, p_b_given_not_a)?;
        Ok(TotalProbabilityModel { p_a, p_b_given_a, p_b_given_not_a })
    }
}

impl PhaseModel for TotalProbabilityModel {
    fn parameter(&self) -> &'static str {
        "theta"
    }

    fn evaluate(&self, value: f64) -> Result<f64> {
        // out-of-range totals are still part of the curve; the fit only ever
        // lands on probabilities
        match quantum_total_probability(self.p_a, self.p_b_given_a, self.p_b_given_not_a, value) {
            Ok(d) => Ok(d.total),
            Err(Error::InfeasiblePhase(total)) => Ok(total),
            Err(e) => Err(e),
        }
    }
}

/// Counts calls so the fit can report its cost.
struct Counted<'a, M: ?Sized> {
    model: &'a M,
    calls: usize,
}

impl<M: PhaseModel + ?Sized> Counted<'_, M> {
    fn eval(&mut self, x: f64) -> Result<f64> {
        self.calls += 1;
        self.model.evaluate(x)
    }
}

/// Response sampled on the fit grid over the model's search domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub points: Vec<f64>,
    pub values: Vec<f64>,
    /// True when the response is symmetric about π, so only [0, π] is searched.
    pub even: bool,
}

impl Sweep {
    fn domain_end(&self) -> f64 {
        if self.even {
            PI
        } else {
            TAU
        }
    }
}

fn sweep_counted<M: PhaseModel + ?Sized>(model: &mut Counted<'_, M>) -> Result<Sweep> {
    let half = (PI / CURVE_STEP).ceil() as usize;
    let step = PI / half as f64;
    let n = 2 * half;
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        values.push(model.eval(i as f64 * step)?);
    }
    let even = (1..half).all(|i| (values[i] - values[n - i]).abs() < SYMMETRY_TOLERANCE);
    let len = if even { half + 1 } else { n };
    values.truncate(len);
    let points = (0..len).map(|i| i as f64 * step).collect();
    Ok(Sweep { points, values, even })
}

/// Grid sweep over the model's domain: [0, π] when the response is even, [0, 2π) otherwise.
pub fn sweep<M: PhaseModel + ?Sized>(model: &M) -> Result<Sweep> {
    sweep_counted(&mut Counted { model, calls: 0 })
}

fn golden_section<M: PhaseModel + ?Sized>(
    model: &mut Counted<'_, M>,
    mut lo: f64,
    mut hi: f64,
    score: impl Fn(f64) -> f64,
) -> Result<(f64, f64)> {
    let ratio = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = score(model.eval(x1)?);
    let mut f2 = score(model.eval(x2)?);
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= PHASE_TOLERANCE {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = score(model.eval(x1)?);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = score(model.eval(x2)?);
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

fn neighbours(sweep: &Sweep, i: usize) -> (f64, f64) {
    let lo = if i == 0 { 0.0 } else { sweep.points[i - 1] };
    let hi = sweep.points.get(i + 1).copied().unwrap_or_else(|| sweep.domain_end());
    (lo, hi)
}

fn range_counted<M: PhaseModel + ?Sized>(model: &mut Counted<'_, M>, sweep: &Sweep) -> Result<(f64, f64)> {
    let argmin = (0..sweep.values.len()).min_by(|&a, &b| sweep.values[a].total_cmp(&sweep.values[b])).unwrap_or(0);
    let argmax = (0..sweep.values.len()).max_by(|&a, &b| sweep.values[a].total_cmp(&sweep.values[b])).unwrap_or(0);
    let (lo, hi) = neighbours(sweep, argmin);
    let (_, min) = golden_section(model, lo, hi, |v| v)?;
    let (lo, hi) = neighbours(sweep, argmax);
    let (_, neg_max) = golden_section(model, lo, hi, |v| -v)?;
    Ok((min.min(sweep.values[argmin]), (-neg_max).max(sweep.values[argmax])))
}

/// Extremes of the response over its domain, refined around the grid extrema.
pub fn attainable_range<M: PhaseModel + ?Sized>(model: &M, parameter: &str) -> Result<(f64, f64)> {
    if parameter != model.parameter() {
        return Err(Error::UnknownParameter(parameter.to_string()));
    }
    let mut counted = Counted { model, calls: 0 };
    let sweep = sweep_counted(&mut counted)?;
    range_counted(&mut counted, &sweep)
}

/// Smallest parameter in the domain whose response equals `target`.
pub fn fit_phase<M: PhaseModel + ?Sized>(model: &M, target: f64) -> Result<FitResult> {
    check_probability("target", target)?;
    let mut counted = Counted { model, calls: 0 };
    let sweep = sweep_counted(&mut counted)?;
    let (min, max) = range_counted(&mut counted, &sweep)?;
    if target < min - TANGENT_RESIDUAL || target > max + TANGENT_RESIDUAL {
        return Err(Error::Unattainable { target, min, max });
    }

    let gaps: Vec<f64> = sweep.values.iter().map(|v| v - target).collect();
    let mut found = None;
    for i in 0..gaps.len() {
        if gaps[i] == 0.0 {
            found = Some((sweep.points[i], 0.0));
            break;
        }
        if let Some(&next) = gaps.get(i + 1) {
            if gaps[i].signum() != next.signum() {
                found = Some(bisect(&mut counted, sweep.points[i], sweep.points[i + 1], target, gaps[i])?);
                break;
            }
        }
    }
    let (value, residual) = match found {
        Some(hit) => hit,
        None => {
            // target only grazes an extremum between grid points
            let closest = (0..gaps.len()).min_by(|&a, &b| gaps[a].abs().total_cmp(&gaps[b].abs())).unwrap_or(0);
            let (lo, hi) = neighbours(&sweep, closest);
            let (x, r) = golden_section(&mut counted, lo, hi, |v| (v - target).abs())?;
            if r > TANGENT_RESIDUAL {
                return Err(Error::Unattainable { target, min, max });
            }
            (x, r)
        }
    };
    Ok(FitResult {
        parameter_name: model.parameter().to_string(),
        value,
        residual,
        method: FitMethod::BracketedSearch,
        evaluations: counted.calls,
    })
}

fn bisect<M: PhaseModel + ?Sized>(
    model: &mut Counted<'_, M>,
    mut lo: f64,
    mut hi: f64,
    target: f64,
    mut gap_lo: f64,
) -> Result<(f64, f64)> {
    let mut best = (lo, gap_lo.abs());
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let gap = model.eval(mid)? - target;
        if gap.abs() < best.1 {
            best = (mid, gap.abs());
        }
        if gap == 0.0 || hi - lo <= PHASE_TOLERANCE {
            break;
        }
        if gap.signum() == gap_lo.signum() {
            lo = mid;
            gap_lo = gap;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}

/// Kernel phase reproducing the event-2 rate when event 1 is unknown.
pub fn fit_kernel_phase(model: &DisjunctionModel, target: f64) -> Result<FitResult> {
    fit_phase(model, target)
}

/// Bloch phase between the two questions reproducing the comparative rate of
/// the target question (angle `theta_c`) asked after the context (`theta_g`).
pub fn fit_order_phase(theta_c: f64, theta_g: f64, target_comparative: f64) -> Result<FitResult> {
    fit_phase(&OrderEffectModel::from_angles(theta_c, theta_g, 0.0), target_comparative)
}

/// Closed-form phase of the interference-corrected total probability.
pub fn fit_total_probability_phase(model: &TotalProbabilityModel, target: f64) -> Result<FitResult> {
    let value = solve_interference_phase(model.p_a, model.p_b_given_a, model.p_b_given_not_a, target)?;
    Ok(FitResult {
        parameter_name: model.parameter().to_string(),
        value,
        residual: (model.evaluate(value)? - target).abs(),
        method: FitMethod::ClosedForm,
        evaluations: 1,
    })
}
