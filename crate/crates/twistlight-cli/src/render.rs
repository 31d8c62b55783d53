//! Exact textual and JSON renderings of engine values.

use serde_json::{json, Value};
use twistlight::jones::Matrix2;
use twistlight::states::PolState;
use twistlight::symphase::SymbolicScalar;
use twistlight::Complex64;

/// Formats a complex number for text output.
pub fn complex(z: Complex64) -> String {
    format!("{} {:+}i", z.re, z.im)
}

/// One exact line per canonical term: rational parts, √2 power, η grade,
/// and the integer phase exponents.
pub fn exact_terms(s: &SymbolicScalar, names: &[String]) -> Vec<String> {
    s.terms()
        .iter()
        .map(|t| {
            format!(
                "re={} im={} sqrt2^{} eta^{} phase[{}]",
                t.coeff().re(),
                t.coeff().im(),
                t.coeff().sqrt2_pow(),
                t.eta_pow(),
                phase_label(t.phase().coeffs(), names),
            )
        })
        .collect()
}

fn phase_label(coeffs: &[i64], names: &[String]) -> String {
    let parts: Vec<String> = coeffs
        .iter()
        .zip(names)
        .filter(|(c, _)| **c != 0)
        .map(|(c, n)| format!("{c:+}·{n}"))
        .collect();
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" ")
    }
}

/// Exact JSON form of a scalar: display string plus per-term data with
/// rationals rendered as `num/den` strings.
pub fn scalar_json(s: &SymbolicScalar, names: &[String]) -> Value {
    let terms: Vec<Value> = s
        .terms()
        .iter()
        .map(|t| {
            let phase: serde_json::Map<String, Value> = t
                .phase()
                .coeffs()
                .iter()
                .zip(names)
                .filter(|(c, _)| **c != 0)
                .map(|(c, n)| (n.clone(), json!(c)))
                .collect();
            json!({
                "re": t.coeff().re().to_string(),
                "im": t.coeff().im().to_string(),
                "sqrt2_pow": t.coeff().sqrt2_pow(),
                "eta_pow": t.eta_pow(),
                "phase": phase,
            })
        })
        .collect();
    json!({ "display": s.to_string(), "terms": terms })
}

/// Exact JSON form of a matrix, row-major.
pub fn matrix_json(m: &Matrix2, names: &[String]) -> Value {
    let rows: Vec<Vec<Value>> = (0..2)
        .map(|r| (0..2).map(|c| scalar_json(m.entry(r, c), names)).collect())
        .collect();
    json!({ "entries": rows })
}

/// Exact JSON form of a state in the computational basis.
pub fn state_json(s: &PolState, names: &[String]) -> Value {
    json!({
        "h": scalar_json(s.amp0(), names),
        "v": scalar_json(s.amp1(), names),
    })
}
