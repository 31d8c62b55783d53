//! Bell-pair decomposition of SAM⊗OAM states and concurrence strategies.
//!
//! A state with integer OAM spectrum regroups into pairs
//! `{(L, a), (R, −a)}`; writing `x` for the `(L, a)` amplitude and `y` for
//! the `(R, −a)` amplitude, the pair amplitudes are `α₊ = (x+y)/2` and
//! `α₋ = (x−y)/2`, so reconstruction `x = α₊+α₋`, `y = α₊−α₋` is exact.
//!
//! Concurrence is computed under three *explicitly separate* strategies:
//!
//! * **(a)** the published recipe `|Σᵢ αᵢ²|` with coefficients exactly as
//!   printed (global gadget prefactor included);
//! * **(b)** the same sum with each Bell ket normalized to unit norm, which
//!   scales every `α²` by 2;
//! * **(c)** the standard pure-state bipartite measure
//!   `√(2·(1 − Tr ρ_spin²))` on the normalized state (the "i-concurrence").
//!
//! The published closed-form curves do not follow from the published states
//! under any grouping this crate can justify, so reports carry all three
//! values side by side and never reconcile them silently.

use std::sync::Arc;

use num::complex::Complex64;

use crate::error::{Error, Result};
use crate::jones::Convention;
use crate::states::{oam_spectrum, OamTerm, PolState, Spin};
use crate::symphase::{AngleSymbol, AngleValues, SymbolContext, SymbolicScalar};

/// Tolerance used by the reality check on the published second-element
/// closed form.
pub const IMAG_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Bell pairs
// ---------------------------------------------------------------------------

/// One `{(L, a), (R, −a)}` pair with exact even/odd amplitudes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BellPair {
    /// Pair label: groups the `(L, a)` and `(R, −a)` spectrum lines.
    pub a: i64,
    /// Even combination `(x + y)/2`.
    pub alpha_plus: SymbolicScalar,
    /// Odd combination `(x − y)/2`.
    pub alpha_minus: SymbolicScalar,
}

impl BellPair {
    /// The `(L, a)` amplitude `x = α₊ + α₋`.
    pub fn left_amplitude(&self) -> SymbolicScalar {
        self.alpha_plus
            .try_add(&self.alpha_minus)
            .expect("pair amplitudes share a context")
    }

    /// The `(R, −a)` amplitude `y = α₊ − α₋`.
    pub fn right_amplitude(&self) -> SymbolicScalar {
        self.alpha_plus
            .try_add(&self.alpha_minus.neg_owned())
            .expect("pair amplitudes share a context")
    }
}

/// Decomposes a state into Bell pairs over the designated twist symbol.
///
/// Complete and exact: every OAM spectrum line lands in exactly one pair,
/// and [`bell_reconstruct`] inverts the decomposition bit-exactly.  Pairs
/// are sorted by ascending label `a`.
pub fn bell_decompose(
    s: &PolState,
    twist_symbol: &AngleSymbol,
    conv: Convention,
) -> Result<Vec<BellPair>> {
    use std::collections::{BTreeMap, BTreeSet};
    let ctx = twist_symbol.context();
    let spectrum = oam_spectrum(s, twist_symbol, conv)?;
    let mut x_amps: BTreeMap<i64, SymbolicScalar> = BTreeMap::new();
    let mut y_amps: BTreeMap<i64, SymbolicScalar> = BTreeMap::new();
    for term in &spectrum {
        let (map, label) = match term.spin {
            Spin::Left => (&mut x_amps, term.k),
            Spin::Right => (&mut y_amps, -term.k),
        };
        map.insert(label, term.residual.clone());
    }
    let labels: BTreeSet<i64> = x_amps.keys().chain(y_amps.keys()).copied().collect();
    let zero = SymbolicScalar::zero(ctx);
    let half = |s: &SymbolicScalar| s.times_rational(1, 2);
    labels
        .into_iter()
        .map(|a| {
            let x = x_amps.get(&a).unwrap_or(&zero);
            let y = y_amps.get(&a).unwrap_or(&zero);
            Ok(BellPair {
                a,
                alpha_plus: half(&x.try_add(y)?),
                alpha_minus: half(&x.try_add(&y.neg_owned())?),
            })
        })
        .collect()
}

/// Rebuilds the state from its Bell pairs.
pub fn bell_reconstruct(
    pairs: &[BellPair],
    twist_symbol: &AngleSymbol,
    conv: Convention,
) -> Result<PolState> {
    let mut terms: Vec<OamTerm> = Vec::new();
    for pair in pairs {
        let x = pair.left_amplitude();
        let y = pair.right_amplitude();
        if !x.is_zero() {
            terms.push(OamTerm {
                spin: Spin::Left,
                k: pair.a,
                residual: x,
            });
        }
        if !y.is_zero() {
            terms.push(OamTerm {
                spin: Spin::Right,
                k: -pair.a,
                residual: y,
            });
        }
    }
    crate::states::reconstruct_oam(&terms, twist_symbol, conv)
}

// ---------------------------------------------------------------------------
// Strategy (a)/(b): Σ α²
// ---------------------------------------------------------------------------

/// Normalization strategy for the `Σ αᵢ²` concurrence recipe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumAlphaStrategy {
    /// Coefficients exactly as printed (global gadget prefactor included).
    AsPrinted,
    /// Bell kets normalized to unit norm, which doubles every `α²`.
    NormalizedKets,
}

/// Exact pre-modulus sum `Σ (α₊² + α₋²)` over the pairs under a strategy.
///
/// The published recipe takes the modulus afterwards; the exact pre-modulus
/// scalar is returned so callers can evaluate either.
pub fn concurrence_sum_alpha2(
    ctx: &Arc<SymbolContext>,
    pairs: &[BellPair],
    strategy: SumAlphaStrategy,
) -> Result<SymbolicScalar> {
    let mut sum = SymbolicScalar::zero(ctx);
    for pair in pairs {
        sum = sum.try_add(&pair.alpha_plus.try_mul(&pair.alpha_plus)?)?;
        sum = sum.try_add(&pair.alpha_minus.try_mul(&pair.alpha_minus)?)?;
    }
    Ok(match strategy {
        SumAlphaStrategy::AsPrinted => sum,
        SumAlphaStrategy::NormalizedKets => sum.times_rational(2, 1),
    })
}

// ---------------------------------------------------------------------------
// Strategy (c): i-concurrence
// ---------------------------------------------------------------------------

/// Standard pure-state bipartite entanglement of a SAM(2)⊗OAM(many) state:
/// `√(2·(1 − Tr ρ_spin²))` on the normalized state at a numeric assignment.
///
/// Returns a value in `[0, 1]`: `0` for product states, `1` for maximally
/// entangled two-line states.  The OAM lines are read off the designated
/// twist symbol; the symbol's own numeric value is irrelevant (the helical
/// phases cancel inside `ρ_spin`).
pub fn i_concurrence(
    s: &PolState,
    twist_symbol: &AngleSymbol,
    assign: &AngleValues,
    eta: f64,
    conv: Convention,
) -> Result<f64> {
    let spectrum = oam_spectrum(s, twist_symbol, conv)?;
    i_concurrence_from_spectrum(&spectrum, assign, eta)
}

/// [`i_concurrence`] starting from a precomputed OAM spectrum.
///
/// Reading the spectrum off a state is the symbolic (expensive) half of the
/// computation and is independent of the numeric assignment; grid sweeps
/// hoist it and call this per point.
pub fn i_concurrence_from_spectrum(
    spectrum: &[OamTerm],
    assign: &AngleValues,
    eta: f64,
) -> Result<f64> {
    let rho = spin_density(spectrum, assign, eta)?;
    iconc_from_density(rho)
}

/// Accumulates the unnormalized 2×2 spin density matrix from an OAM
/// spectrum at a numeric assignment.
pub(crate) fn spin_density(
    spectrum: &[OamTerm],
    assign: &AngleValues,
    eta: f64,
) -> Result<[[Complex64; 2]; 2]> {
    use std::collections::BTreeMap;
    let mut vectors: BTreeMap<i64, [Complex64; 2]> = BTreeMap::new();
    for term in spectrum {
        let v = term.residual.eval_numeric(assign, eta)?;
        let entry = vectors
            .entry(term.k)
            .or_insert([Complex64::new(0.0, 0.0); 2]);
        match term.spin {
            Spin::Left => entry[0] += v,
            Spin::Right => entry[1] += v,
        }
    }
    let mut rho = [[Complex64::new(0.0, 0.0); 2]; 2];
    for v in vectors.values() {
        for i in 0..2 {
            for j in 0..2 {
                rho[i][j] += v[i] * v[j].conj();
            }
        }
    }
    Ok(rho)
}

/// `√(2·(1 − Tr ρ²))` for an unnormalized density accumulator.
pub(crate) fn iconc_from_density(rho: [[Complex64; 2]; 2]) -> Result<f64> {
    let trace = (rho[0][0] + rho[1][1]).re;
    if trace <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let mut purity = 0.0;
    for row in &rho {
        for e in row {
            purity += (e / trace).norm_sqr();
        }
    }
    Ok((2.0 * (1.0 - purity)).max(0.0).sqrt())
}

// ---------------------------------------------------------------------------
// Published closed forms and reality check
// ---------------------------------------------------------------------------

/// Which cascade element a published closed-form curve belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementTag {
    /// First element (output `h′`); the published curve is real.
    First,
    /// Second element (output `h″`); the published curve is complex.
    Second,
}

/// Published closed-form concurrence for an element, evaluated numerically.
/// The first element's curve is real; it is returned with zero imaginary
/// part.
pub fn closed_form_c(tag: ElementTag, vartheta: f64, eta: f64) -> Complex64 {
    match tag {
        ElementTag::First => Complex64::new(crate::reference::closed_form_c1(vartheta, eta), 0.0),
        ElementTag::Second => crate::reference::closed_form_c2(vartheta, eta),
    }
}

/// One row of the reality check on the published second-element curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImagVanishRow {
    /// Twist angle sampled.
    pub vartheta: f64,
    /// Imaginary part of the published closed form there.
    pub imag: f64,
    /// Whether the imaginary part vanishes to [`IMAG_TOL`].
    pub vanishes: bool,
}

/// Evaluates the imaginary part of the published second-element closed form
/// over a grid.  The published claim is that it vanishes exactly at
/// `2ϑ = nπ` and the curve is only meaningful there.
pub fn imag_vanish_check(grid: &[f64], eta: f64) -> Vec<ImagVanishRow> {
    grid.iter()
        .map(|&vartheta| {
            let imag = crate::reference::closed_form_c2(vartheta, eta).im;
            ImagVanishRow {
                vartheta,
                imag,
                vanishes: imag.abs() <= IMAG_TOL,
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Side-by-side report
// ---------------------------------------------------------------------------

/// All concurrence strategies evaluated at one `(ϑ, η)` point, reported side
/// by side.  Strategy values are never reconciled: the published closed form
/// is a reference curve, not a target the engine values are fitted to.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcurrenceReport {
    /// Strategy (a): pre-modulus `Σα²` with printed coefficients.
    pub sum_alpha2_printed: Complex64,
    /// Modulus of strategy (a).
    pub sum_alpha2_printed_modulus: f64,
    /// Strategy (b): pre-modulus `Σα²` with normalized Bell kets.
    pub sum_alpha2_normalized: Complex64,
    /// Modulus of strategy (b).
    pub sum_alpha2_normalized_modulus: f64,
    /// Strategy (c): i-concurrence of the normalized state.
    pub iconc: f64,
    /// Published closed-form value, when this element has one.
    pub closed_form: Option<Complex64>,
    /// Imaginary part of the closed form (its advertised reality residual).
    pub closed_form_imag_residual: Option<f64>,
}

/// Builds the side-by-side report for a state at a numeric assignment.
///
/// `closed_tag` selects the published curve for elements that have one
/// (`None` for engine-only elements).
pub fn concurrence_report(
    s: &PolState,
    twist_symbol: &AngleSymbol,
    assign: &AngleValues,
    vartheta: f64,
    eta: f64,
    conv: Convention,
    closed_tag: Option<ElementTag>,
) -> Result<ConcurrenceReport> {
    let ctx = twist_symbol.context();
    let pairs = bell_decompose(s, twist_symbol, conv)?;
    let printed = concurrence_sum_alpha2(ctx, &pairs, SumAlphaStrategy::AsPrinted)?
        .eval_numeric(assign, eta)?;
    let normalized = concurrence_sum_alpha2(ctx, &pairs, SumAlphaStrategy::NormalizedKets)?
        .eval_numeric(assign, eta)?;
    let iconc = i_concurrence(s, twist_symbol, assign, eta, conv)?;
    let closed = closed_tag.map(|tag| closed_form_c(tag, vartheta, eta));
    Ok(ConcurrenceReport {
        sum_alpha2_printed: printed,
        sum_alpha2_printed_modulus: printed.norm(),
        sum_alpha2_normalized: normalized,
        sum_alpha2_normalized_modulus: normalized.norm(),
        iconc,
        closed_form: closed,
        closed_form_imag_residual: closed.map(|c| c.im),
    })
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jones::{compose, GadgetSpec};
    use crate::states::{apply, named_ket, KetName};
    use std::f64::consts::PI;

    fn ctx_vt() -> Arc<SymbolContext> {
        SymbolContext::new(["vartheta"]).unwrap()
    }

    fn engine_h_prime(ctx: &Arc<SymbolContext>) -> PolState {
        let vt = ctx.angle("vartheta").unwrap();
        let op = compose(&GadgetSpec::qhq(&vt, &vt), Convention::DEFAULT).unwrap();
        apply(&op, &named_ket(ctx, KetName::H, Convention::DEFAULT)).unwrap()
    }

    fn engine_h_double_prime(ctx: &Arc<SymbolContext>) -> PolState {
        let vt = ctx.angle("vartheta").unwrap();
        let op2 = compose(
            &GadgetSpec::qhq(&vt, &vt.scaled(2)),
            Convention::DEFAULT,
        )
        .unwrap();
        apply(&op2, &engine_h_prime(ctx)).unwrap()
    }

    #[test]
    fn engine_first_element_collapses_to_one_pair() {
        // The engine's aligned gadget is −η³·J, so the first-element output
        // is −η³·|v⟩: a single a = 0 pair with α₊ = 0.
        let ctx = ctx_vt();
        let vt_sym = ctx.symbol("vartheta").unwrap();
        let hp = engine_h_prime(&ctx);
        let expected = named_ket(&ctx, KetName::V, Convention::DEFAULT)
            .scale(&SymbolicScalar::eta(&ctx, 3).neg_owned());
        assert_eq!(hp, expected);
        let pairs = bell_decompose(&hp, &vt_sym, Convention::DEFAULT).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].a, 0);
        assert!(pairs[0].alpha_plus.is_zero());
        // Strategy (a): Σα² = −η⁶/2 exactly — constant in ϑ.
        let sum =
            concurrence_sum_alpha2(&ctx, &pairs, SumAlphaStrategy::AsPrinted).unwrap();
        let expected = SymbolicScalar::eta(&ctx, 6).times_rational(-1, 2);
        assert_eq!(sum, expected);
        // Strategy (b) doubles it.
        let sum2 =
            concurrence_sum_alpha2(&ctx, &pairs, SumAlphaStrategy::NormalizedKets).unwrap();
        assert_eq!(sum2, expected.times_rational(2, 1));
        // Strategy (c): single OAM line ⇒ product state ⇒ 0.
        let c = i_concurrence(
            &hp,
            &vt_sym,
            &AngleValues::new().set("vartheta", 0.37),
            1.4,
            Convention::DEFAULT,
        )
        .unwrap();
        assert!(c.abs() < 1e-12);
    }

    #[test]
    fn engine_second_element_has_cancelling_pair_sum() {
        let ctx = ctx_vt();
        let vt_sym = ctx.symbol("vartheta").unwrap();
        let hpp = engine_h_double_prime(&ctx);
        let pairs = bell_decompose(&hpp, &vt_sym, Convention::DEFAULT).unwrap();
        // Four pairs at a ∈ {−4, −2, 0, 2}, each with α₋ = 0.
        let labels: Vec<i64> = pairs.iter().map(|p| p.a).collect();
        assert_eq!(labels, vec![-4, -2, 0, 2]);
        for p in &pairs {
            assert!(p.alpha_minus.is_zero());
        }
        // Σα² cancels exactly under both normalizations.
        for strategy in [SumAlphaStrategy::AsPrinted, SumAlphaStrategy::NormalizedKets] {
            let sum = concurrence_sum_alpha2(&ctx, &pairs, strategy).unwrap();
            assert!(sum.is_zero());
        }
        // Strategy (c) is the constant √7/4 ≈ 0.6614 (ρ = [[½,⅜],[⅜,½]]).
        for tv in [0.0, 0.3, PI / 4.0, 2.0] {
            let c = i_concurrence(
                &hpp,
                &vt_sym,
                &AngleValues::new().set("vartheta", tv),
                1.9,
                Convention::DEFAULT,
            )
            .unwrap();
            assert!((c - 7.0f64.sqrt() / 4.0).abs() < 1e-12, "got {c} at {tv}");
        }
    }

    #[test]
    fn spectrum_route_reuses_one_symbolic_readoff() {
        // A spectrum read off once feeds many numeric evaluations and agrees
        // bit-for-bit with the one-shot entry point.
        let ctx = ctx_vt();
        let vt_sym = ctx.symbol("vartheta").unwrap();
        let hpp = engine_h_double_prime(&ctx);
        let spectrum = oam_spectrum(&hpp, &vt_sym, Convention::DEFAULT).unwrap();
        for (tv, eta) in [(0.0, 1.0), (0.7, 1.3), (PI / 4.0, 2.0), (2.2, 0.6)] {
            let assign = AngleValues::new().set("vartheta", tv);
            let from_spectrum =
                i_concurrence_from_spectrum(&spectrum, &assign, eta).unwrap();
            let direct =
                i_concurrence(&hpp, &vt_sym, &assign, eta, Convention::DEFAULT).unwrap();
            assert_eq!(from_spectrum.to_bits(), direct.to_bits());
        }
    }

    #[test]
    fn published_states_decompose_to_printed_pair_amplitudes() {
        let ctx = ctx_vt();
        let vt = ctx.angle("vartheta").unwrap();
        let vt_sym = ctx.symbol("vartheta").unwrap();
        let conv = Convention::DEFAULT;
        // Published first-element output: three pairs.
        let hp = crate::reference::h_prime(&vt, conv).unwrap();
        let pairs = bell_decompose(&hp, &vt_sym, conv).unwrap();
        let labels: Vec<i64> = pairs.iter().map(|p| p.a).collect();
        assert_eq!(labels, vec![-6, -4, -2]);
        let eta3 = SymbolicScalar::eta(&ctx, 3);
        for p in &pairs {
            match p.a {
                -6 => {
                    assert!(p.alpha_plus.is_zero());
                    assert_eq!(p.alpha_minus, eta3.times_rational(1, 2));
                }
                -4 => {
                    assert_eq!(p.alpha_plus, eta3.times_i());
                    assert!(p.alpha_minus.is_zero());
                }
                -2 => {
                    assert!(p.alpha_plus.is_zero());
                    assert_eq!(p.alpha_minus, eta3.times_rational(-1, 2));
                }
                _ => unreachable!(),
            }
        }
        // Its Σα² is also −η⁶/2 — the published minimum, constant in ϑ.
        let sum = concurrence_sum_alpha2(&ctx, &pairs, SumAlphaStrategy::AsPrinted).unwrap();
        assert_eq!(sum, SymbolicScalar::eta(&ctx, 6).times_rational(-1, 2));
        // Published second-element output: eight pairs, Σα² = 5η¹²/8.
        let hpp = crate::reference::h_double_prime(&vt, conv).unwrap();
        let pairs = bell_decompose(&hpp, &vt_sym, conv).unwrap();
        let labels: Vec<i64> = pairs.iter().map(|p| p.a).collect();
        assert_eq!(labels, vec![-12, -10, -8, -6, -4, -2, 0, 2]);
        let sum = concurrence_sum_alpha2(&ctx, &pairs, SumAlphaStrategy::AsPrinted).unwrap();
        assert_eq!(sum, SymbolicScalar::eta(&ctx, 12).times_rational(5, 8));
    }

    #[test]
    fn reconstruction_inverts_decomposition() {
        let ctx = ctx_vt();
        let vt = ctx.angle("vartheta").unwrap();
        let vt_sym = ctx.symbol("vartheta").unwrap();
        let conv = Convention::DEFAULT;
        for state in [
            engine_h_double_prime(&ctx),
            crate::reference::h_prime(&vt, conv).unwrap(),
            crate::reference::h_double_prime(&vt, conv).unwrap(),
            named_ket(&ctx, KetName::H, conv),
        ] {
            let pairs = bell_decompose(&state, &vt_sym, conv).unwrap();
            let back = bell_reconstruct(&pairs, &vt_sym, conv).unwrap();
            assert_eq!(back, state);
        }
    }

    #[test]
    fn reference_bell_state_values() {
        let ctx = ctx_vt();
        let vt = ctx.angle("vartheta").unwrap();
        let vt_sym = ctx.symbol("vartheta").unwrap();
        let conv = Convention::DEFAULT;
        // (|L, 2⟩ + |R, −2⟩)/√2: maximally entangled.
        let l = named_ket(&ctx, KetName::L, conv)
            .scale(&SymbolicScalar::exp_i_scaled(&vt, 2).unwrap());
        let r = named_ket(&ctx, KetName::R, conv)
            .scale(&SymbolicScalar::exp_i_scaled(&vt, -2).unwrap());
        let bell = l
            .try_add(&r)
            .unwrap()
            .scale(&SymbolicScalar::sqrt2_pow(&ctx, -1));
        let pairs = bell_decompose(&bell, &vt_sym, conv).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].a, 2);
        let sum = concurrence_sum_alpha2(&ctx, &pairs, SumAlphaStrategy::AsPrinted).unwrap();
        let v = sum.eval_numeric(&AngleValues::new(), 1.0).unwrap();
        assert!((v.norm() - 0.5).abs() < 1e-15);
        let c = i_concurrence(&bell, &vt_sym, &AngleValues::new(), 1.0, conv).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
        // |h⟩: product state, single a = 0 pair, Σα² = 1/2.
        let h = named_ket(&ctx, KetName::H, conv);
        let pairs = bell_decompose(&h, &vt_sym, conv).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].a, 0);
        let sum = concurrence_sum_alpha2(&ctx, &pairs, SumAlphaStrategy::AsPrinted).unwrap();
        assert_eq!(sum, SymbolicScalar::rational(&ctx, 1, 2));
        let c = i_concurrence(&h, &vt_sym, &AngleValues::new(), 1.0, conv).unwrap();
        assert!(c.abs() < 1e-12);
        // Lone |L, a⟩: Σα² = x²/2.
        let pairs = bell_decompose(&l, &vt_sym, conv).unwrap();
        let sum = concurrence_sum_alpha2(&ctx, &pairs, SumAlphaStrategy::AsPrinted).unwrap();
        assert_eq!(sum, SymbolicScalar::rational(&ctx, 1, 2));
        // Zero state: i-concurrence is a zero-norm error.
        let zero = PolState::zero(&ctx);
        assert_eq!(
            i_concurrence(&zero, &vt_sym, &AngleValues::new(), 1.0, conv).unwrap_err(),
            Error::ZeroNorm
        );
    }

    #[test]
    fn invariance_properties_numeric() {
        let ctx = ctx_vt();
        let vt_sym = ctx.symbol("vartheta").unwrap();
        let conv = Convention::DEFAULT;
        let hpp = engine_h_double_prime(&ctx);
        let assign = AngleValues::new().set("vartheta", 0.83);
        let eta = 1.25;
        let base_pairs = bell_decompose(&hpp, &vt_sym, conv).unwrap();
        let base_sum = concurrence_sum_alpha2(&ctx, &base_pairs, SumAlphaStrategy::AsPrinted)
            .unwrap()
            .eval_numeric(&assign, eta)
            .unwrap();
        let base_iconc = i_concurrence(&hpp, &vt_sym, &assign, eta, conv).unwrap();
        // Global phase: multiply by e^{iπ/4}-grade unit (ω = e^{iπ/4}).
        let phased = hpp.scale(&SymbolicScalar::omega_pow(&ctx, 1));
        let pairs = bell_decompose(&phased, &vt_sym, conv).unwrap();
        let sum = concurrence_sum_alpha2(&ctx, &pairs, SumAlphaStrategy::AsPrinted)
            .unwrap()
            .eval_numeric(&assign, eta)
            .unwrap();
        assert!((sum.norm() - base_sum.norm()).abs() < 1e-12);
        let c = i_concurrence(&phased, &vt_sym, &assign, eta, conv).unwrap();
        assert!((c - base_iconc).abs() < 1e-12);
        // Real scaling: |Σα²| scales by c²; i-concurrence is unchanged.
        let scaled = hpp.scale(&SymbolicScalar::rational(&ctx, 3, 1));
        let pairs = bell_decompose(&scaled, &vt_sym, conv).unwrap();
        let sum = concurrence_sum_alpha2(&ctx, &pairs, SumAlphaStrategy::AsPrinted)
            .unwrap()
            .eval_numeric(&assign, eta)
            .unwrap();
        assert!((sum.norm() - 9.0 * base_sum.norm()).abs() < 1e-10);
        let c = i_concurrence(&scaled, &vt_sym, &assign, eta, conv).unwrap();
        assert!((c - base_iconc).abs() < 1e-12);
    }

    #[test]
    fn closed_forms_and_reality_grid() {
        // Reality points 2ϑ = nπ vanish; generic points do not.
        let grid: Vec<f64> = (0..=8).map(|n| n as f64 * PI / 2.0).collect();
        for row in imag_vanish_check(&grid, 1.0) {
            assert!(row.vanishes, "imag {} at {}", row.imag, row.vartheta);
        }
        let rows = imag_vanish_check(&[PI / 8.0, 0.4], 1.0);
        assert!(rows.iter().all(|r| !r.vanishes));
        // The advertised flattening: closed-form minimum drops from 0.5 to
        // 0.375 at η = 1, but the direction reverses once η⁶ > 4/3.
        let c1_min = closed_form_c(ElementTag::First, 0.0, 1.0).re;
        let c2_real = closed_form_c(ElementTag::Second, PI / 2.0, 1.0).re;
        assert!((c1_min - 0.5).abs() < 1e-15);
        assert!((c2_real - 0.375).abs() < 1e-15);
        assert!(c2_real < c1_min);
        let eta = 1.2f64;
        assert!(eta.powi(6) > 4.0 / 3.0);
        let c1_min = crate::reference::closed_form_c1(0.0, eta);
        let c2_real = crate::reference::closed_form_c2_reality_value(eta);
        assert!(c2_real > c1_min);
    }

    #[test]
    fn report_presents_strategies_side_by_side() {
        let ctx = ctx_vt();
        let vt_sym = ctx.symbol("vartheta").unwrap();
        let hp = engine_h_prime(&ctx);
        let vartheta = PI / 4.0;
        let assign = AngleValues::new().set("vartheta", vartheta);
        let report = concurrence_report(
            &hp,
            &vt_sym,
            &assign,
            vartheta,
            1.0,
            Convention::DEFAULT,
            Some(ElementTag::First),
        )
        .unwrap();
        // Strategy (a) gives the constant 0.5; the published curve gives 1.0
        // at this point; the report holds both without reconciling.
        assert!((report.sum_alpha2_printed_modulus - 0.5).abs() < 1e-12);
        assert!((report.sum_alpha2_normalized_modulus - 1.0).abs() < 1e-12);
        assert!(report.iconc.abs() < 1e-12);
        let closed = report.closed_form.unwrap();
        assert!((closed.re - 1.0).abs() < 1e-12);
        assert_eq!(report.closed_form_imag_residual.unwrap(), closed.im);
    }
}
