//! Command-line grammars: exact angle expressions and named symbolic objects.

use std::sync::Arc;

use twistlight::cascade::{build_array, propagate};
use twistlight::jones::{
    build_n, compose, plate_h, plate_q, polarization_m, polarization_m_tilde, reflection_k,
    rotation_s, twist, Convention, GadgetSpec, Matrix2,
};
use twistlight::states::{named_ket, KetName, PolState};
use twistlight::symphase::{LinearAngle, SymbolContext};

/// Symbol names every command-line context carries, in a fixed order.
pub const SYMBOL_NAMES: [&str; 6] = ["vartheta", "alpha", "omega", "beta", "theta", "phi"];

/// Builds the shared symbolic context for command-line objects.
pub fn cli_context() -> Arc<SymbolContext> {
    SymbolContext::new(SYMBOL_NAMES).expect("fixed distinct names")
}

/// Splits a compact expression into signed additive terms.
///
/// A `+`/`-` ends the current term unless it sits in the exponent of a
/// decimal literal (`1e-3`); no symbol name ends with `e`, so the guard is
/// unambiguous for both grammars built on top of this.
fn signed_terms(input: &str) -> Result<Vec<(i64, String)>, String> {
    let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty angle expression".to_string());
    }
    let mut terms = Vec::new();
    let mut sign = 1i64;
    let mut body = String::new();
    for ch in compact.chars() {
        match ch {
            '+' | '-' if !body.is_empty() && !body.ends_with(['e', 'E']) => {
                terms.push((sign, std::mem::take(&mut body)));
                sign = if ch == '-' { -1 } else { 1 };
            }
            '+' => {}
            '-' => sign = -sign,
            _ => body.push(ch),
        }
    }
    if body.is_empty() {
        return Err(format!("malformed angle expression `{input}`"));
    }
    terms.push((sign, body));
    Ok(terms)
}

fn bad(whole: &str) -> String {
    format!("malformed angle expression `{whole}`")
}

/// Parses one angle expression into an exact symbolic angle.
///
/// Grammar: a sum of signed terms, each `pi`, `Npi`, `Npi/D` (`*`/`·`
/// optional), a bare symbol name, or an integer-scaled symbol such as
/// `2vartheta`.  `0` is the zero angle.  Constants must be rational
/// multiples of π so the result stays exact.
pub fn angle_expr(ctx: &Arc<SymbolContext>, input: &str) -> Result<LinearAngle, String> {
    let mut total = LinearAngle::zero(ctx);
    for (sign, term) in signed_terms(input)? {
        total = &total + &angle_term(ctx, sign, &term, input)?;
    }
    Ok(total)
}

fn angle_term(
    ctx: &Arc<SymbolContext>,
    sign: i64,
    term: &str,
    whole: &str,
) -> Result<LinearAngle, String> {
    let t = term.replace(['*', '·'], "");
    if t == "0" {
        return Ok(LinearAngle::zero(ctx));
    }
    if let Some(pos) = t.find("pi") {
        let (lead, rest) = (&t[..pos], &t[pos + 2..]);
        let num: i64 = if lead.is_empty() {
            1
        } else {
            lead.parse().map_err(|_| bad(whole))?
        };
        let den: i64 = if rest.is_empty() {
            1
        } else {
            rest.strip_prefix('/')
                .ok_or_else(|| bad(whole))?
                .parse()
                .map_err(|_| bad(whole))?
        };
        if den <= 0 {
            return Err(format!(
                "π-fraction denominator must be positive in `{whole}`"
            ));
        }
        return Ok(LinearAngle::pi_fraction(ctx, sign * num, den));
    }
    let split = t
        .find(|c: char| !c.is_ascii_digit())
        .unwrap_or(t.len());
    let (digits, name) = t.split_at(split);
    if name.is_empty() {
        return Err(format!(
            "constant `{term}` is not a rational multiple of π; write it as `Npi/D`"
        ));
    }
    let scale: i64 = if digits.is_empty() {
        1
    } else {
        digits.parse().map_err(|_| bad(whole))?
    };
    let angle = ctx.angle(name).map_err(|_| {
        format!(
            "unknown symbol `{name}` in `{whole}` (known: {})",
            SYMBOL_NAMES.join(", ")
        )
    })?;
    Ok(angle.scaled(sign * scale))
}

/// Parses an angle into a float: π-fractions, decimal literals, and signed
/// sums of both (`pi-0.05`, `3pi/4`, `0.35`).
pub fn numeric_expr(input: &str) -> Result<f64, String> {
    let mut total = 0.0;
    for (sign, term) in signed_terms(input)? {
        let t = term.replace(['*', '·'], "");
        let v = if let Some(pos) = t.find("pi") {
            let (lead, rest) = (&t[..pos], &t[pos + 2..]);
            let num: f64 = if lead.is_empty() {
                1.0
            } else {
                lead.parse().map_err(|_| bad(input))?
            };
            let den: f64 = if rest.is_empty() {
                1.0
            } else {
                rest.strip_prefix('/')
                    .ok_or_else(|| bad(input))?
                    .parse()
                    .map_err(|_| bad(input))?
            };
            num * std::f64::consts::PI / den
        } else {
            t.parse::<f64>().map_err(|_| {
                format!("cannot parse `{term}` in `{input}` as a number or π-fraction")
            })?
        };
        total += sign as f64 * v;
    }
    Ok(total)
}

/// A resolved command-line object.
pub enum Object {
    /// A 2×2 symbolic operator.
    Matrix(Matrix2),
    /// A polarization state.
    State(PolState),
}

/// Resolves a named object under a convention.
///
/// Angle arguments inside parentheses follow the [`angle_expr`] grammar;
/// omitted arguments default to the documented free symbols.
pub fn object(ctx: &Arc<SymbolContext>, input: &str, conv: Convention) -> Result<Object, String> {
    let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    let (head_raw, args) = split_call(&compact)?;
    let head = head_raw.to_ascii_lowercase();
    let arg = |i: usize| -> Result<LinearAngle, String> { angle_expr(ctx, &args[i]) };
    let named = |n: &str| ctx.angle(n).map_err(|e| e.to_string());
    let m = |r: twistlight::Result<Matrix2>| -> Result<Object, String> {
        r.map(Object::Matrix).map_err(|e| e.to_string())
    };
    match (head.as_str(), args.len()) {
        ("m", 0) => m(polarization_m(&named("theta")?, &named("phi")?)),
        ("m", 2) => {
            let (a, b) = (arg(0)?, arg(1)?);
            m(polarization_m(&a, &b))
        }
        ("mtilde", 0) => m(polarization_m_tilde(&named("theta")?, &named("phi")?)),
        ("mtilde", 2) => {
            let (a, b) = (arg(0)?, arg(1)?);
            m(polarization_m_tilde(&a, &b))
        }
        ("n", 0) => m(build_n(&named("phi")?, conv)),
        ("n", 1) => {
            let tw = arg(0)?;
            let g = build_n(&named("phi")?, conv).map_err(|e| e.to_string())?;
            m(twist(&g, &tw, conv))
        }
        ("n", 2) => {
            let (retardance, tw) = (arg(0)?, arg(1)?);
            let g = build_n(&retardance, conv).map_err(|e| e.to_string())?;
            m(twist(&g, &tw, conv))
        }
        ("h", 0) => m(plate_h(&named("vartheta")?, conv)),
        ("h", 1) => {
            let a = arg(0)?;
            m(plate_h(&a, conv))
        }
        ("q", 0) => m(plate_q(&named("vartheta")?, conv)),
        ("q", 1) => {
            let a = arg(0)?;
            m(plate_q(&a, conv))
        }
        ("j", 0) => Ok(Object::Matrix(Matrix2::j_matrix(ctx))),
        ("s", 1) => {
            let a = arg(0)?;
            m(rotation_s(&a))
        }
        ("k", 1) => {
            let a = arg(0)?;
            m(reflection_k(&a))
        }
        ("qhq", 0) => m(compose(
            &GadgetSpec::qhq(&named("vartheta")?, &named("alpha")?),
            conv,
        )),
        ("qhq", 2) => {
            let (a, b) = (arg(0)?, arg(1)?);
            m(compose(&GadgetSpec::qhq(&a, &b), conv))
        }
        ("vcr", 0) => m(compose(&GadgetSpec::vcr(&named("vartheta")?), conv)),
        ("vcr", 1) => {
            let a = arg(0)?;
            m(compose(&GadgetSpec::vcr(&a), conv))
        }
        ("hprime" | "h'", 0) => element_output(ctx, 1, conv),
        ("hdoubleprime" | "h''", 0) => element_output(ctx, 2, conv),
        _ => Err(format!(
            "unknown object `{input}`; known: m[(θ,φ)], mtilde[(θ,φ)], n, n(twist), \
             n(retardance,twist), h[(orient)], q[(orient)], s(a), k(a), j, qhq[(q,h)], \
             vcr[(a)], hprime, hdoubleprime"
        )),
    }
}

/// Output state of the first `n` cascade elements fed with `|h⟩`.
fn element_output(ctx: &Arc<SymbolContext>, n: usize, conv: Convention) -> Result<Object, String> {
    let vartheta = ctx.angle("vartheta").map_err(|e| e.to_string())?;
    let sym = ctx.symbol("vartheta").map_err(|e| e.to_string())?;
    let elements = build_array(n, &vartheta).map_err(|e| e.to_string())?;
    let input = named_ket(ctx, KetName::H, conv);
    let trace = propagate(&input, &elements, &sym, conv).map_err(|e| e.to_string())?;
    Ok(Object::State(trace.final_state().clone()))
}

/// Parses a ket name, accepting lowercase circular labels as well.
pub fn ket(input: &str) -> Result<KetName, String> {
    match input {
        "l" => Ok(KetName::L),
        "r" => Ok(KetName::R),
        other => other.parse::<KetName>().map_err(|e| e.to_string()),
    }
}

/// Parses a convention label (`+1L`, `-iR`, …) or `default`.
pub fn convention(label: &str) -> Result<Convention, String> {
    if label == "default" {
        return Ok(Convention::DEFAULT);
    }
    Convention::all()
        .into_iter()
        .find(|c| c.label() == label)
        .ok_or_else(|| {
            let known: Vec<String> = Convention::all().iter().map(|c| c.label()).collect();
            format!(
                "unknown convention `{label}` (known: default, {})",
                known.join(", ")
            )
        })
}

fn split_call(compact: &str) -> Result<(&str, Vec<String>), String> {
    match compact.find('(') {
        None => Ok((compact, Vec::new())),
        Some(open) => {
            let Some(inner) = compact[open + 1..].strip_suffix(')') else {
                return Err(format!("unbalanced parentheses in `{compact}`"));
            };
            let head = &compact[..open];
            let args = if inner.is_empty() {
                Vec::new()
            } else {
                inner.split(',').map(str::to_string).collect()
            };
            Ok((head, args))
        }
    }
}
