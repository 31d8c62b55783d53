//! Pancharatnam phase of retarder gadgets.
//!
//! The "geometric phase" carried by a closed polarization excursion is
//! reported as the full complex projection amplitude `⟨s|U|s⟩` — the same
//! object the published closed forms are written as — with argument and
//! magnitude available as numeric conveniences.  Inner products read OAM
//! phase factors as plane-wave multipliers.

use num::complex::Complex64;

use crate::error::{Error, Result};
use crate::jones::Matrix2;
use crate::states::{apply, inner, PolState};
use crate::symphase::{AngleValues, SymbolicScalar};

/// The projection amplitude `⟨s|U|s⟩` of a gadget round trip, kept exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseResult {
    amplitude: SymbolicScalar,
}

impl PhaseResult {
    /// Wraps an already-computed projection amplitude.
    pub fn from_amplitude(amplitude: SymbolicScalar) -> Self {
        PhaseResult { amplitude }
    }

    /// The exact projection amplitude.
    pub fn amplitude(&self) -> &SymbolicScalar {
        &self.amplitude
    }

    /// Numeric value at a dense assignment.
    pub fn eval_at(&self, values: &[f64], eta: f64) -> Complex64 {
        self.amplitude.eval_at(values, eta)
    }

    /// Numeric value at named angle assignments.
    pub fn eval_numeric(&self, assign: &AngleValues, eta: f64) -> Result<Complex64> {
        self.amplitude.eval_numeric(assign, eta)
    }

    /// Phase argument (radians) at an assignment; `0` for a vanishing
    /// amplitude, where the argument is undefined.
    pub fn arg_numeric(&self, assign: &AngleValues, eta: f64) -> Result<f64> {
        let v = self.eval_numeric(assign, eta)?;
        Ok(if v.norm() == 0.0 { 0.0 } else { v.arg() })
    }

    /// Amplitude magnitude at an assignment.
    pub fn magnitude_numeric(&self, assign: &AngleValues, eta: f64) -> Result<f64> {
        Ok(self.eval_numeric(assign, eta)?.norm())
    }
}

/// Pancharatnam projection `⟨s|op|s⟩` for an exactly normalized input.
///
/// The input must satisfy `⟨s|s⟩ = 1` in canonical form; states carrying a
/// uniform OAM factor `e^{ikϑ}` qualify, since conjugation cancels the
/// factor.
pub fn pancharatnam(s: &PolState, op: &Matrix2) -> Result<PhaseResult> {
    if !s.norm_sq().is_one() {
        return Err(Error::NotNormalized);
    }
    let out = apply(op, s)?;
    Ok(PhaseResult {
        amplitude: inner(s, &out)?,
    })
}

/// Audits the published phase formulas (`gamma-alpha`, `gamma-twist`,
/// `gamma-twist-neg`) against the engine's projections: the gamma slice of
/// [`crate::oracle::convention_audit`].
pub fn gamma_audit(samples: usize, seed: u64) -> Result<Vec<crate::oracle::AuditRecord>> {
    Ok(crate::oracle::convention_audit(samples, seed)?
        .into_iter()
        .filter(|r| r.target.starts_with("gamma-"))
        .collect())
}

// ---------------------------------------------------------------------------
