//! Published reference forms, transcribed verbatim.
//!
//! Everything in this module is a direct transcription of a published
//! equation, kept firewalled from the engine's own derivations: these
//! functions are *inputs to audits*, never substitutes for engine output.
//! Each constructor is named by the semantic audit-target id used across the
//! crate (see [`crate::oracle`] for the verdict machinery).
//!
//! Several published forms are known not to follow from the engine algebra
//! under any sign convention; they are still transcribed exactly as printed,
//! typos included (notably the duplicated negative-twist phase formula).

use num::complex::Complex64;

use crate::error::Result;
use crate::jones::{rotation_s, Convention, Matrix2};
use crate::states::{named_ket, KetName, PolState};
use crate::symphase::{LinearAngle, SymbolicScalar};

// ---------------------------------------------------------------------------
// Operator-level forms
// ---------------------------------------------------------------------------

/// Published twisted generator: `η·cosφ·J − i·η·sinφ·K(ϑ)` (audit target
/// `twisted-n-matrix`).
pub fn twisted_n_matrix(phi: &LinearAngle, vartheta: &LinearAngle) -> Result<Matrix2> {
    let ctx = phi.context();
    let j_part = Matrix2::j_matrix(ctx)
        .times_scalar(&SymbolicScalar::cos(phi)?.with_eta(1));
    let k_part = crate::jones::reflection_k(vartheta)?
        .times_scalar(&SymbolicScalar::sin(phi)?.with_eta(1).times_i());
    j_part.try_add(&k_part.neg_owned())
}

/// Published Q·H·Q expansion (audit target `qhq-operator`):
///
/// ```text
///     (−iη³/2)·[(S(2α) − S(4ϑ+2α))·σx − 2·S(2ϑ+2α)·σy]
/// ```
pub fn qhq_operator(vartheta: &LinearAngle, alpha: &LinearAngle) -> Result<Matrix2> {
    let ctx = vartheta.context();
    let s_2a = rotation_s(&alpha.scaled(2))?;
    let s_4t2a = rotation_s(&(&vartheta.scaled(4) + &alpha.scaled(2)))?;
    let s_2t2a = rotation_s(&(&vartheta.scaled(2) + &alpha.scaled(2)))?;
    let sx = Matrix2::sigma_x(ctx);
    let sy = Matrix2::sigma_y(ctx);
    let x_part = s_2a.try_add(&s_4t2a.neg_owned())?.try_mul(&sx)?;
    let y_part = s_2t2a
        .try_mul(&sy)?
        .times_scalar(&SymbolicScalar::rational(ctx, 2, 1));
    let bracket = x_part.try_add(&y_part.neg_owned())?;
    let prefactor = SymbolicScalar::eta(ctx, 3)
        .times_rational(-1, 2)
        .times_i();
    Ok(bracket.times_scalar(&prefactor))
}

// ---------------------------------------------------------------------------
// State-level forms
// ---------------------------------------------------------------------------

fn ket_with_phase(
    name: KetName,
    phase: &LinearAngle,
    scale: i64,
    conv: Convention,
) -> Result<PolState> {
    let ctx = phase.context();
    let factor = SymbolicScalar::exp_i_scaled(phase, scale)?;
    Ok(named_ket(ctx, name, conv).scale(&factor))
}

/// Published generator action on `|h⟩` (audit target `n-on-h`):
///
/// ```text
///     −i·η·cosφ·|v⟩ + (η·sinφ/√2)·(|R⟩e^{2iϑ} − |L⟩e^{−2iϑ})
/// ```
pub fn n_on_h(
    phi: &LinearAngle,
    vartheta: &LinearAngle,
    conv: Convention,
) -> Result<PolState> {
    let ctx = phi.context();
    let j_coeff = SymbolicScalar::cos(phi)?
        .with_eta(1)
        .times_i()
        .neg_owned();
    let j_part = named_ket(ctx, KetName::V, conv).scale(&j_coeff);
    let k_coeff = SymbolicScalar::sin(phi)?
        .with_eta(1)
        .try_mul(&SymbolicScalar::sqrt2_pow(ctx, -1))?;
    let r_piece = ket_with_phase(KetName::R, vartheta, 2, conv)?;
    let l_piece = ket_with_phase(KetName::L, vartheta, -2, conv)?;
    let k_part = r_piece.try_add(&l_piece.neg_owned())?.scale(&k_coeff);
    j_part.try_add(&k_part)
}

/// Published twisted half-wave action on the left ket (audit target
/// `hwp-on-left`): `η·e^{2iϑ}·|R⟩`.
pub fn hwp_on_left(vartheta: &LinearAngle, conv: Convention) -> Result<PolState> {
    let eta = SymbolicScalar::eta(vartheta.context(), 1);
    Ok(ket_with_phase(KetName::R, vartheta, 2, conv)?.scale(&eta))
}

/// Published twisted half-wave action on the right ket (audit target
/// `hwp-on-right`): `+η·e^{−2iϑ}·|L⟩` — printed with a plus sign, which the
/// engine derivation contradicts jointly with the two-plate forms.
pub fn hwp_on_right(vartheta: &LinearAngle, conv: Convention) -> Result<PolState> {
    let eta = SymbolicScalar::eta(vartheta.context(), 1);
    Ok(ket_with_phase(KetName::L, vartheta, -2, conv)?.scale(&eta))
}

/// Published two-plate (variable circular retarder) action on the left ket
/// (audit target `vcr-on-left`): `−η²·e^{2iϑ}·|L⟩`.
pub fn vcr_on_left(vartheta: &LinearAngle, conv: Convention) -> Result<PolState> {
    let c = SymbolicScalar::eta(vartheta.context(), 2).neg_owned();
    Ok(ket_with_phase(KetName::L, vartheta, 2, conv)?.scale(&c))
}

/// Published two-plate action on the right ket (audit target
/// `vcr-on-right`): `−η²·e^{−2iϑ}·|R⟩`.
pub fn vcr_on_right(vartheta: &LinearAngle, conv: Convention) -> Result<PolState> {
    let c = SymbolicScalar::eta(vartheta.context(), 2).neg_owned();
    Ok(ket_with_phase(KetName::R, vartheta, -2, conv)?.scale(&c))
}

/// Published round-trip phase for the left ket (audit target
/// `vcr-phase-left`): `−η²·e^{2iϑ}`.
pub fn vcr_phase_left(vartheta: &LinearAngle) -> Result<SymbolicScalar> {
    Ok(SymbolicScalar::exp_i_scaled(vartheta, 2)?
        .with_eta(2)
        .neg_owned())
}

/// Published round-trip phase for the right ket (audit target
/// `vcr-phase-right`): `−η²·e^{−2iϑ}`.
pub fn vcr_phase_right(vartheta: &LinearAngle) -> Result<SymbolicScalar> {
    Ok(SymbolicScalar::exp_i_scaled(vartheta, -2)?
        .with_eta(2)
        .neg_owned())
}

/// Published offset half-wave pair action (audit target `hwp-pair-offset`):
/// `−i·η²·e^{2i(ω+α)}·|L⟩`.
pub fn hwp_pair_offset(
    omega: &LinearAngle,
    alpha: &LinearAngle,
    conv: Convention,
) -> Result<PolState> {
    let ctx = omega.context();
    let c = SymbolicScalar::eta(ctx, 2).times_i().neg_owned();
    Ok(ket_with_phase(KetName::L, &(omega + alpha), 2, conv)?.scale(&c))
}

/// Published offset half-wave triple action (audit target `hwp-triple`):
/// `−i·η²·e^{2i(ω+β)}·|R⟩` — printed at η-grade 2 for a three-plate gadget.
pub fn hwp_triple(
    omega: &LinearAngle,
    beta: &LinearAngle,
    conv: Convention,
) -> Result<PolState> {
    let ctx = omega.context();
    let c = SymbolicScalar::eta(ctx, 2).times_i().neg_owned();
    Ok(ket_with_phase(KetName::R, &(omega + beta), 2, conv)?.scale(&c))
}

/// Published Q·H·Q action on `|h⟩` (audit target `qhq-on-h`):
///
/// ```text
///     (−iη³/2)·[ i(|R⟩e^{2iα} − |L⟩e^{−2iα})
///              − i(|R⟩e^{i(4ϑ+2α)} − |L⟩e^{−i(4ϑ+2α)})
///              − 2(|L⟩e^{−i(2ϑ+2α)} + |R⟩e^{i(2ϑ+2α)}) ]
/// ```
pub fn qhq_on_h(
    vartheta: &LinearAngle,
    alpha: &LinearAngle,
    conv: Convention,
) -> Result<PolState> {
    let ctx = vartheta.context();
    let i = SymbolicScalar::i(ctx);
    let two = SymbolicScalar::rational(ctx, 2, 1);
    let a2 = alpha.scaled(2);
    let t4a2 = &vartheta.scaled(4) + &alpha.scaled(2);
    let t2a2 = &vartheta.scaled(2) + &alpha.scaled(2);
    let b1 = ket_with_phase(KetName::R, &a2, 1, conv)?
        .try_add(&ket_with_phase(KetName::L, &a2, -1, conv)?.neg_owned())?
        .scale(&i);
    let b2 = ket_with_phase(KetName::R, &t4a2, 1, conv)?
        .try_add(&ket_with_phase(KetName::L, &t4a2, -1, conv)?.neg_owned())?
        .scale(&i)
        .neg_owned();
    let b3 = ket_with_phase(KetName::L, &t2a2, -1, conv)?
        .try_add(&ket_with_phase(KetName::R, &t2a2, 1, conv)?)?
        .scale(&two)
        .neg_owned();
    let prefactor = SymbolicScalar::eta(ctx, 3)
        .times_rational(-1, 2)
        .times_i();
    Ok(b1.try_add(&b2)?.try_add(&b3)?.scale(&prefactor))
}

/// Published first-element output (audit target `h-prime`): the Q·H·Q action
/// on `|h⟩` printed at `α = ϑ`, with phase arguments `2ϑ`, `6ϑ`, `4ϑ`.
pub fn h_prime(vartheta: &LinearAngle, conv: Convention) -> Result<PolState> {
    qhq_on_h(vartheta, vartheta, conv)
}

/// Published second-element output (audit target `h-double-prime`):
///
/// ```text
///     (−η⁶/4)·[ 2(|L⟩e^{−2iϑ} + |R⟩e^{2iϑ}) − (|L⟩e^{2iϑ} + |R⟩e^{−2iϑ})
///             − (|L⟩e^{−6iϑ} + |R⟩e^{6iϑ}) + 2(|L⟩ − |R⟩)
///             − 2(|R⟩e^{4iϑ} − |L⟩e^{−4iϑ}) − 2i(|L⟩e^{−8iϑ} + |R⟩e^{8iϑ})
///             − 2i(|L⟩e^{−12iϑ} + |R⟩e^{12iϑ}) − 2(|L⟩e^{−10iϑ} + |R⟩e^{10iϑ}) ]
/// ```
pub fn h_double_prime(vartheta: &LinearAngle, conv: Convention) -> Result<PolState> {
    let ctx = vartheta.context();
    let pair = |k: i64, c: SymbolicScalar| -> Result<PolState> {
        // c·(|L⟩e^{−ikϑ} + |R⟩e^{ikϑ})
        Ok(ket_with_phase(KetName::L, vartheta, -k, conv)?
            .try_add(&ket_with_phase(KetName::R, vartheta, k, conv)?)?
            .scale(&c))
    };
    let one = SymbolicScalar::one(ctx);
    let two = SymbolicScalar::rational(ctx, 2, 1);
    let two_i = two.times_i();
    let mut sum = pair(2, two.clone())?;
    // `−(|L⟩e^{2iϑ} + |R⟩e^{−2iϑ})` is the k = −2 orientation of the pair.
    sum = sum.try_add(&pair(-2, one.clone())?.neg_owned())?;
    sum = sum.try_add(&pair(6, one)?.neg_owned())?;
    // +2(|L⟩ − |R⟩)
    let b4 = named_ket(ctx, KetName::L, conv)
        .try_add(&named_ket(ctx, KetName::R, conv).neg_owned())?
        .scale(&two);
    sum = sum.try_add(&b4)?;
    // −2(|R⟩e^{4iϑ} − |L⟩e^{−4iϑ})
    let b5 = ket_with_phase(KetName::R, vartheta, 4, conv)?
        .try_add(&ket_with_phase(KetName::L, vartheta, -4, conv)?.neg_owned())?
        .scale(&two)
        .neg_owned();
    sum = sum.try_add(&b5)?;
    sum = sum.try_add(&pair(8, two_i.clone())?.neg_owned())?;
    sum = sum.try_add(&pair(12, two_i)?.neg_owned())?;
    sum = sum.try_add(&pair(10, two)?.neg_owned())?;
    let prefactor = SymbolicScalar::eta(ctx, 6).times_rational(-1, 4);
    Ok(sum.scale(&prefactor))
}

// ---------------------------------------------------------------------------
// Phase closed forms
// ---------------------------------------------------------------------------

/// Published round-trip phase of the Q·H·Q gadget at independent twist and
/// half-wave angles (audit target `gamma-alpha`):
///
/// ```text
///     γ_α = 2η³·[sin2α − sin(4ϑ+2α) − 2i·sin(2ϑ+2α)]
/// ```
pub fn gamma_alpha(vartheta: &LinearAngle, alpha: &LinearAngle) -> Result<SymbolicScalar> {
    let ctx = vartheta.context();
    let s1 = SymbolicScalar::sin(&alpha.scaled(2))?;
    let s2 = SymbolicScalar::sin(&(&vartheta.scaled(4) + &alpha.scaled(2)))?;
    let s3 = SymbolicScalar::sin(&(&vartheta.scaled(2) + &alpha.scaled(2)))?;
    let bracket = s1
        .try_add(&s2.neg_owned())?
        .try_add(&s3.times_rational(2, 1).times_i().neg_owned())?;
    Ok(bracket
        .try_mul(&SymbolicScalar::rational(ctx, 2, 1))?
        .with_eta(3))
}

/// Published aligned-gadget phase (audit target `gamma-twist`):
/// `γ_ϑ = 2η³·[sin2ϑ − sin6ϑ − 2i·sin4ϑ]`.
pub fn gamma_twist(vartheta: &LinearAngle) -> Result<SymbolicScalar> {
    let ctx = vartheta.context();
    let s1 = SymbolicScalar::sin(&vartheta.scaled(2))?;
    let s2 = SymbolicScalar::sin(&vartheta.scaled(6))?;
    let s3 = SymbolicScalar::sin(&vartheta.scaled(4))?;
    let bracket = s1
        .try_add(&s2.neg_owned())?
        .try_add(&s3.times_rational(2, 1).times_i().neg_owned())?;
    Ok(bracket
        .try_mul(&SymbolicScalar::rational(ctx, 2, 1))?
        .with_eta(3))
}

/// Published negative-twist phase (audit target `gamma-twist-neg`).
///
/// Transcribed verbatim: the published formula is character-identical to
/// [`gamma_twist`] even though the text calls the two gadgets inverses of
/// each other — the duplication is preserved here and flagged by the audit.
pub fn gamma_twist_neg(vartheta: &LinearAngle) -> Result<SymbolicScalar> {
    gamma_twist(vartheta)
}

// ---------------------------------------------------------------------------
// Concurrence closed forms
// ---------------------------------------------------------------------------

/// Published concurrence of the first-element output:
/// `C(h′) = (η⁶/4)·(3 − cos4ϑ)`.
pub fn closed_form_c1(vartheta: f64, eta: f64) -> f64 {
    eta.powi(6) / 4.0 * (3.0 - (4.0 * vartheta).cos())
}

/// Published concurrence of the second-element output:
///
/// ```text
///     C(h″) = (η¹²/16)·[(5 − 3cos8ϑ + 2cos12ϑ + 2cos4ϑ)
///                      + i(4sin10ϑ + 8sin2ϑ + 4sin6ϑ)]
/// ```
pub fn closed_form_c2(vartheta: f64, eta: f64) -> Complex64 {
    let re = 5.0 - 3.0 * (8.0 * vartheta).cos()
        + 2.0 * (12.0 * vartheta).cos()
        + 2.0 * (4.0 * vartheta).cos();
    let im = 4.0 * (10.0 * vartheta).sin()
        + 8.0 * (2.0 * vartheta).sin()
        + 4.0 * (6.0 * vartheta).sin();
    eta.powi(12) / 16.0 * Complex64::new(re, im)
}

/// The real value the published `C(h″)` takes at its reality points
/// `2ϑ = nπ`: `3η¹²/8`.
pub fn closed_form_c2_reality_value(eta: f64) -> f64 {
    3.0 * eta.powi(12) / 8.0
}

// ---------------------------------------------------------------------------
