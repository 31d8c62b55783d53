//! Cascaded antenna elements: per-element traces, flatness of the
//! concurrence minima, and the classical array factor.
//!
//! Element `j ≥ 1` of the array is the three-plate gadget
//! `Q(ϑ) · H(jϑ) · Q(ϑ)` — two aligned quarter-wave plates around a
//! half-wave plate whose offset grows linearly along the array.  Light
//! traverses the rightmost plate first.

use num::complex::Complex64;

use crate::entangle::{
    bell_decompose, concurrence_sum_alpha2, BellPair, ElementTag, SumAlphaStrategy,
};
use crate::error::{Error, Result};
use crate::geophase::PhaseResult;
use crate::jones::{compose, Convention, GadgetSpec, MIN_THETA_MARGIN};
use crate::states::{apply, inner, PolState};
use crate::symphase::{AngleSymbol, AngleValues, LinearAngle};

// ---------------------------------------------------------------------------
// Array construction
// ---------------------------------------------------------------------------

/// One element of the cascade: its 1-based index and its plate gadget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayElement {
    /// 1-based position along the array.
    pub index: usize,
    /// The `Q(ϑ) · H(jϑ) · Q(ϑ)` gadget for this element.
    pub gadget: GadgetSpec,
}

/// Builds the `n`-element array over the twist angle `ϑ`.
pub fn build_array(n: usize, vartheta: &LinearAngle) -> Result<Vec<ArrayElement>> {
    if n == 0 {
        return Err(Error::EmptyArray);
    }
    Ok((1..=n)
        .map(|j| ArrayElement {
            index: j,
            gadget: GadgetSpec::qhq(vartheta, &vartheta.scaled(j as i64)),
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Propagation
// ---------------------------------------------------------------------------

/// The record kept for one element during propagation.
#[derive(Debug, Clone)]
pub struct CascadeStep {
    /// 1-based element index.
    pub index: usize,
    /// State after this element.
    pub output: PolState,
    /// Projection `⟨in_j | out_j⟩` of the element's output onto its input
    /// (the Pancharatnam amplitude; intermediate inputs are not unit-norm,
    /// so it is the raw projection rather than a normalized overlap).
    pub phase: PhaseResult,
    /// Bell pairs of the output state.
    pub pairs: Vec<BellPair>,
    /// Exact pre-modulus `Σα²` of the output under the printed strategy.
    pub sum_alpha2: crate::symphase::SymbolicScalar,
}

impl CascadeStep {
    /// Published closed-form curve for this element, when one exists.
    pub fn closed_tag(&self) -> Option<ElementTag> {
        match self.index {
            1 => Some(ElementTag::First),
            2 => Some(ElementTag::Second),
            _ => None,
        }
    }
}

/// The full propagation record through the array.
#[derive(Debug, Clone)]
pub struct CascadeTrace {
    /// Per-element records, in traversal order.
    pub steps: Vec<CascadeStep>,
}

impl CascadeTrace {
    /// Final state after the last element.
    pub fn final_state(&self) -> &PolState {
        &self.steps.last().expect("trace is never empty").output
    }
}

/// Propagates `input` through the array, recording each element's output,
/// projection phase, Bell pairs, and exact `Σα²`.
pub fn propagate(
    input: &PolState,
    array: &[ArrayElement],
    twist_symbol: &AngleSymbol,
    conv: Convention,
) -> Result<CascadeTrace> {
    if array.is_empty() {
        return Err(Error::EmptyArray);
    }
    let ctx = twist_symbol.context();
    let mut state = input.clone();
    let mut steps = Vec::with_capacity(array.len());
    for element in array {
        let op = compose(&element.gadget, conv)?;
        let output = apply(&op, &state)?;
        let phase = PhaseResult::from_amplitude(inner(&state, &output)?);
        let pairs = bell_decompose(&output, twist_symbol, conv)?;
        let sum_alpha2 = concurrence_sum_alpha2(ctx, &pairs, SumAlphaStrategy::AsPrinted)?;
        steps.push(CascadeStep {
            index: element.index,
            output: output.clone(),
            phase,
            pairs,
            sum_alpha2,
        });
        state = output;
    }
    Ok(CascadeTrace { steps })
}

/// Numeric phase arguments of each element's projection at an assignment —
/// the feed phases handed to [`array_factor`].  Elements whose projection
/// vanishes identically contribute `0`.
pub fn phase_args(trace: &CascadeTrace, assign: &AngleValues, eta: f64) -> Result<Vec<f64>> {
    trace
        .steps
        .iter()
        .map(|step| step.phase.arg_numeric(assign, eta))
        .collect()
}

// ---------------------------------------------------------------------------
// Flatness of the concurrence minima
// ---------------------------------------------------------------------------

/// One row of the flatness report: the published closed-form minima at a
/// polar angle `θ` (with `η = 1/sin θ`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatnessRow {
    /// Polar angle sampled.
    pub theta: f64,
    /// Ellipticity ratio `1/sin θ` there.
    pub eta: f64,
    /// Grid minimum over `ϑ` of the published first-element curve.
    pub c1_min: f64,
    /// Published second-element value at its reality points (`3η¹²/8`,
    /// constant in `ϑ` there).
    pub c2_reality: f64,
    /// Whether the second element's reality value sits below the first
    /// element's minimum — the advertised flattening, which holds only
    /// while `η⁶ < 4/3`.
    pub decreasing: bool,
}

/// Evaluates the published closed-form minima across a `θ` grid, taking the
/// first-element minimum over the supplied `ϑ` grid.
pub fn flatness_report(theta_grid: &[f64], vartheta_grid: &[f64]) -> Result<Vec<FlatnessRow>> {
    if theta_grid.is_empty() || vartheta_grid.is_empty() {
        return Err(Error::InvalidRange(
            "flatness report needs nonempty theta and vartheta grids".into(),
        ));
    }
    theta_grid
        .iter()
        .map(|&theta| {
            if !(MIN_THETA_MARGIN..=std::f64::consts::PI - MIN_THETA_MARGIN).contains(&theta) {
                return Err(Error::ThetaSingular(theta));
            }
            let eta = 1.0 / theta.sin();
            let c1_min = vartheta_grid
                .iter()
                .map(|&vt| crate::reference::closed_form_c1(vt, eta))
                .fold(f64::INFINITY, f64::min);
            let c2_reality = crate::reference::closed_form_c2_reality_value(eta);
            Ok(FlatnessRow {
                theta,
                eta,
                c1_min,
                c2_reality,
                decreasing: c2_reality < c1_min,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Classical array factor
// ---------------------------------------------------------------------------

/// Magnitude of the array factor `|Σ_j e^{i(2π(d/λ)·j·sin ψ + φ_j)}|` over a
/// steering grid.  `phases` are the per-element feed phases `φ_j` and
/// `spacing_over_lambda` is `d/λ`.
pub fn array_factor(
    phases: &[f64],
    spacing_over_lambda: f64,
    steer_grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if phases.is_empty() {
        return Err(Error::EmptyPhases);
    }
    if !(spacing_over_lambda.is_finite() && spacing_over_lambda > 0.0) {
        return Err(Error::BadSpacing(spacing_over_lambda));
    }
    let wavenumber = 2.0 * std::f64::consts::PI * spacing_over_lambda;
    Ok(steer_grid
        .iter()
        .map(|&psi| {
            let sum: Complex64 = phases
                .iter()
                .enumerate()
                .map(|(j, &phi)| {
                    Complex64::from_polar(1.0, wavenumber * (j as f64 + 1.0) * psi.sin() + phi)
                })
                .sum();
            (psi, sum.norm())
        })
        .collect())
}

// ---------------------------------------------------------------------------
