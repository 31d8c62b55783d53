//! Polarization kets with exact amplitudes and OAM bookkeeping.
//!
//! States live in the computational basis `|0⟩ = (1, 0) = |h⟩`,
//! `|1⟩ = (0, 1) = |v⟩`.  The circular kets are convention-dependent; under
//! the default handedness `|L⟩ = (1, i)/√2` and `|R⟩ = (1, −i)/√2`.
//!
//! Orbital angular momentum is tracked purely as the integer exponent a term
//! carries on a designated twist symbol: a term `η·e^{2iϑ}` in the `|R⟩`
//! amplitude reads as "right spin, OAM index +2".  [`oam_spectrum`] performs
//! that regrouping exactly, and [`reconstruct_oam`] inverts it bit-exactly.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num::complex::Complex64;

use crate::error::{Error, Result};
use crate::jones::{Convention, Handedness, Matrix2};
use crate::symphase::{
    ctx_mismatch, same_ctx, AngleSymbol, SymbolContext, SymbolicScalar,
};

// ---------------------------------------------------------------------------
// PolState
// ---------------------------------------------------------------------------

/// A polarization ket with exact amplitudes in the computational basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolState {
    amps: [SymbolicScalar; 2],
}

impl PolState {
    /// Builds a state from its `|h⟩` and `|v⟩` amplitudes (shared context).
    pub fn new(amp0: SymbolicScalar, amp1: SymbolicScalar) -> Result<Self> {
        if !same_ctx(amp0.context(), amp1.context()) {
            return Err(ctx_mismatch(amp0.context(), amp1.context()));
        }
        Ok(PolState { amps: [amp0, amp1] })
    }

    /// The explicit zero state.
    pub fn zero(ctx: &Arc<SymbolContext>) -> Self {
        PolState {
            amps: [SymbolicScalar::zero(ctx), SymbolicScalar::zero(ctx)],
        }
    }

    /// Amplitude on `|h⟩ = (1, 0)`.
    pub fn amp0(&self) -> &SymbolicScalar {
        &self.amps[0]
    }

    /// Amplitude on `|v⟩ = (0, 1)`.
    pub fn amp1(&self) -> &SymbolicScalar {
        &self.amps[1]
    }

    /// The owning context.
    pub fn context(&self) -> &Arc<SymbolContext> {
        self.amps[0].context()
    }

    /// True when both amplitudes are canonical zero.
    pub fn is_zero(&self) -> bool {
        self.amps[0].is_zero() && self.amps[1].is_zero()
    }

    /// Scales both amplitudes by an exact scalar.
    pub fn scale(&self, s: &SymbolicScalar) -> Self {
        assert!(
            same_ctx(self.context(), s.context()),
            "state-scalar product across different symbol contexts"
        );
        PolState {
            amps: [
                self.amps[0].try_mul(s).expect("context checked above"),
                self.amps[1].try_mul(s).expect("context checked above"),
            ],
        }
    }

    /// Componentwise sum.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if !same_ctx(self.context(), other.context()) {
            return Err(ctx_mismatch(self.context(), other.context()));
        }
        Ok(PolState {
            amps: [
                self.amps[0].try_add(&other.amps[0])?,
                self.amps[1].try_add(&other.amps[1])?,
            ],
        })
    }

    /// Additive inverse.
    pub fn neg_owned(&self) -> Self {
        PolState {
            amps: [self.amps[0].neg_owned(), self.amps[1].neg_owned()],
        }
    }

    /// Exact squared norm `⟨s|s⟩`.
    pub fn norm_sq(&self) -> SymbolicScalar {
        inner(self, self).expect("norm over a single state shares its context")
    }

    /// Numeric amplitudes at a dense assignment.
    pub fn eval_at(&self, values: &[f64], eta: f64) -> [Complex64; 2] {
        [
            self.amps[0].eval_at(values, eta),
            self.amps[1].eval_at(values, eta),
        ]
    }
}

impl fmt::Display for PolState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        if !self.amps[0].is_zero() {
            write!(f, "({})·|h⟩", self.amps[0])?;
            first = false;
        }
        if !self.amps[1].is_zero() {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "({})·|v⟩", self.amps[1])?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Named kets
// ---------------------------------------------------------------------------

/// The four reference kets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KetName {
    /// Horizontal, `(1, 0)`.
    H,
    /// Vertical, `(0, 1)`.
    V,
    /// Left circular (handedness per convention).
    L,
    /// Right circular (handedness per convention).
    R,
}

impl FromStr for KetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "h" | "H" => Ok(KetName::H),
            "v" | "V" => Ok(KetName::V),
            "L" => Ok(KetName::L),
            "R" => Ok(KetName::R),
            other => Err(Error::UnknownKet(other.to_string())),
        }
    }
}

impl fmt::Display for KetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            KetName::H => "h",
            KetName::V => "v",
            KetName::L => "L",
            KetName::R => "R",
        };
        write!(f, "{s}")
    }
}

/// Builds one of the reference kets.
///
/// Under the default handedness, `|L⟩ = (1, i)/√2` and `|R⟩ = (1, −i)/√2`;
/// the opposite handedness swaps the two.  The linear kets are
/// convention-free.  The exact identities `|h⟩ = (|L⟩+|R⟩)/√2` and
/// `|v⟩ = −i·(|L⟩−|R⟩)/√2` hold canonically.
pub fn named_ket(ctx: &Arc<SymbolContext>, name: KetName, conv: Convention) -> PolState {
    let inv_sqrt2 = SymbolicScalar::sqrt2_pow(ctx, -1);
    let plus_i = PolState {
        amps: [inv_sqrt2.clone(), inv_sqrt2.times_i()],
    };
    let minus_i = PolState {
        amps: [inv_sqrt2.clone(), inv_sqrt2.times_i().neg_owned()],
    };
    match (name, conv.handedness) {
        (KetName::H, _) => PolState {
            amps: [SymbolicScalar::one(ctx), SymbolicScalar::zero(ctx)],
        },
        (KetName::V, _) => PolState {
            amps: [SymbolicScalar::zero(ctx), SymbolicScalar::one(ctx)],
        },
        (KetName::L, Handedness::LeftIsPlusI) | (KetName::R, Handedness::LeftIsMinusI) => plus_i,
        (KetName::L, Handedness::LeftIsMinusI) | (KetName::R, Handedness::LeftIsPlusI) => minus_i,
    }
}

// ---------------------------------------------------------------------------
// Operator application and inner products
// ---------------------------------------------------------------------------

/// Applies a 2×2 operator to a state: the matrix-vector product with
/// canonical amplitudes.
pub fn apply(op: &Matrix2, s: &PolState) -> Result<PolState> {
    if !same_ctx(op.context(), s.context()) {
        return Err(ctx_mismatch(op.context(), s.context()));
    }
    let row = |r: usize| -> Result<SymbolicScalar> {
        op.entry(r, 0)
            .try_mul(&s.amps[0])?
            .try_add(&op.entry(r, 1).try_mul(&s.amps[1])?)
    };
    Ok(PolState {
        amps: [row(0)?, row(1)?],
    })
}

/// Inner product `⟨bra|ket⟩ = Σ conj(braᵢ)·ketᵢ`.
///
/// Conjugation negates every symbolic phase, so OAM factors are treated as
/// plane-wave multipliers: `⟨e^{ikϑ}s|e^{ikϑ}s⟩ = ⟨s|s⟩`.
pub fn inner(bra: &PolState, ket: &PolState) -> Result<SymbolicScalar> {
    if !same_ctx(bra.context(), ket.context()) {
        return Err(ctx_mismatch(bra.context(), ket.context()));
    }
    bra.amps[0]
        .conj()
        .try_mul(&ket.amps[0])?
        .try_add(&bra.amps[1].conj().try_mul(&ket.amps[1])?)
}

// ---------------------------------------------------------------------------
// Circular decomposition
// ---------------------------------------------------------------------------

/// Exact circular components `(c_L, c_R)` with `s = c_L·|L⟩ + c_R·|R⟩`.
pub fn circular_components(s: &PolState, conv: Convention) -> (SymbolicScalar, SymbolicScalar) {
    let inv_sqrt2 = SymbolicScalar::sqrt2_pow(s.context(), -1);
    // For |L⟩ = (1, i)/√2: c_L = (a0 − i·a1)/√2, c_R = (a0 + i·a1)/√2.
    let i_a1 = s.amps[1].times_i();
    let minus = s.amps[0]
        .try_add(&i_a1.neg_owned())
        .expect("shared context")
        .try_mul(&inv_sqrt2)
        .expect("shared context");
    let plus = s.amps[0]
        .try_add(&i_a1)
        .expect("shared context")
        .try_mul(&inv_sqrt2)
        .expect("shared context");
    match conv.handedness {
        Handedness::LeftIsPlusI => (minus, plus),
        Handedness::LeftIsMinusI => (plus, minus),
    }
}

/// Rebuilds a state from exact circular components.
pub fn from_circular(
    c_l: &SymbolicScalar,
    c_r: &SymbolicScalar,
    conv: Convention,
) -> Result<PolState> {
    if !same_ctx(c_l.context(), c_r.context()) {
        return Err(ctx_mismatch(c_l.context(), c_r.context()));
    }
    let (plus_i, minus_i) = match conv.handedness {
        Handedness::LeftIsPlusI => (c_l, c_r),
        Handedness::LeftIsMinusI => (c_r, c_l),
    };
    let inv_sqrt2 = SymbolicScalar::sqrt2_pow(c_l.context(), -1);
    // a0 = (p + m)/√2, a1 = i·(p − m)/√2 for s = p·(1,i)/√2 + m·(1,−i)/√2.
    let a0 = plus_i.try_add(minus_i)?.try_mul(&inv_sqrt2)?;
    let a1 = plus_i
        .try_add(&minus_i.neg_owned())?
        .times_i()
        .try_mul(&inv_sqrt2)?;
    Ok(PolState { amps: [a0, a1] })
}

// ---------------------------------------------------------------------------
// OAM spectra
// ---------------------------------------------------------------------------

/// Spin label of an OAM term in the circular basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Spin {
    /// Left circular component.
    Left,
    /// Right circular component.
    Right,
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}",
            match self {
                Spin::Left => "L",
                Spin::Right => "R",
            }
        )
    }
}

/// One entry of an OAM spectrum: a spin, an integer OAM index `k` (the
/// exponent on the designated twist symbol), and the residual amplitude that
/// is free of that symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OamTerm {
    /// Circular-basis spin label.
    pub spin: Spin,
    /// Integer OAM index.
    pub k: i64,
    /// Amplitude with the `e^{i·k·symbol}` factor stripped.
    pub residual: SymbolicScalar,
}

/// Reads the OAM spectrum of a state off a designated twist symbol.
///
/// The circular amplitudes are split exactly by their integer exponent on the
/// symbol; regrouping with [`reconstruct_oam`] restores the state bit-exactly.
/// Spin labels follow the convention's handedness.  Entries are ordered left
/// spin first, ascending `k` within a spin.
pub fn oam_spectrum(
    s: &PolState,
    twist_symbol: &AngleSymbol,
    conv: Convention,
) -> Result<Vec<OamTerm>> {
    if !same_ctx(s.context(), twist_symbol.context()) {
        return Err(ctx_mismatch(s.context(), twist_symbol.context()));
    }
    let (c_l, c_r) = circular_components(s, conv);
    let mut out = Vec::new();
    for (spin, amp) in [(Spin::Left, c_l), (Spin::Right, c_r)] {
        for (k, residual) in amp.split_by_symbol(twist_symbol)? {
            if !residual.is_zero() {
                out.push(OamTerm { spin, k, residual });
            }
        }
    }
    Ok(out)
}

/// Rebuilds the state `Σ residual·e^{i·k·symbol}·|spin⟩` from a spectrum.
pub fn reconstruct_oam(
    terms: &[OamTerm],
    twist_symbol: &AngleSymbol,
    conv: Convention,
) -> Result<PolState> {
    let ctx = twist_symbol.context();
    let angle = twist_symbol.as_angle();
    let mut c_l = SymbolicScalar::zero(ctx);
    let mut c_r = SymbolicScalar::zero(ctx);
    for term in terms {
        let phase = SymbolicScalar::exp_i_scaled(&angle, term.k)?;
        let contrib = term.residual.try_mul(&phase)?;
        match term.spin {
            Spin::Left => c_l = c_l.try_add(&contrib)?,
            Spin::Right => c_r = c_r.try_add(&contrib)?,
        }
    }
    from_circular(&c_l, &c_r, conv)
}

// ---------------------------------------------------------------------------
// q-plate label comparison
// ---------------------------------------------------------------------------

/// Applies the reference q-plate action on (spin, OAM-index) labels:
/// `|L, m⟩ → |R, m + 2q⟩` and `|R, m⟩ → |L, m − 2q⟩`, with the topological
/// charge passed doubled (`two_q = 2q`) so half-integer charges stay exact.
///
/// Accepted inputs are left-circular-like, right-circular-like, or
/// `|h⟩`-like states (equal circular components), each optionally carrying
/// existing OAM factors on the twist symbol; anything else is rejected.  The
/// constant-offset phase of a physical q-plate's axis pattern is not modeled:
/// the comparison against twisted-plate outputs happens at the (spin, index)
/// label level where it is irrelevant.
pub fn qplate_crosscheck(
    s: &PolState,
    two_q: i64,
    twist_symbol: &AngleSymbol,
    conv: Convention,
) -> Result<PolState> {
    let (c_l, c_r) = circular_components(s, conv);
    let supported = (!c_l.is_zero() && c_r.is_zero())
        || (c_l.is_zero() && !c_r.is_zero())
        || (!c_l.is_zero() && c_l == c_r);
    if !supported {
        return Err(Error::UnsupportedQPlateInput(s.to_string()));
    }
    let spectrum = oam_spectrum(s, twist_symbol, conv)?;
    let mapped: Vec<OamTerm> = spectrum
        .into_iter()
        .map(|t| match t.spin {
            Spin::Left => OamTerm {
                spin: Spin::Right,
                k: t.k + two_q,
                residual: t.residual,
            },
            Spin::Right => OamTerm {
                spin: Spin::Left,
                k: t.k - two_q,
                residual: t.residual,
            },
        })
        .collect();
    reconstruct_oam(&mapped, twist_symbol, conv)
}

// ---------------------------------------------------------------------------
// Structured dump
// ---------------------------------------------------------------------------

/// Renders a state as structured text: computational components, circular
/// components, and the OAM-spectrum table read off the given twist symbol.
pub fn state_report(
    s: &PolState,
    twist_symbol: &AngleSymbol,
    conv: Convention,
) -> Result<String> {
    use std::fmt::Write as _;
    let mut out = String::new();
    let _ = writeln!(out, "component |h>: {}", s.amp0());
    let _ = writeln!(out, "component |v>: {}", s.amp1());
    let (c_l, c_r) = circular_components(s, conv);
    let _ = writeln!(out, "circular |L>: {c_l}");
    let _ = writeln!(out, "circular |R>: {c_r}");
    let _ = writeln!(out, "oam spectrum over `{}`:", twist_symbol.name());
    let spectrum = oam_spectrum(s, twist_symbol, conv)?;
    if spectrum.is_empty() {
        let _ = writeln!(out, "  (zero state)");
    }
    for term in &spectrum {
        let _ = writeln!(
            out,
            "  spin {}  k={:+}  residual {}",
            term.spin, term.k, term.residual
        );
    }
    Ok(out)
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jones::{compose, plate_h, reflection_k, GadgetSpec, PlateSpec};
    use crate::symphase::LinearAngle;

    fn ctx_vt() -> Arc<SymbolContext> {
        SymbolContext::new(["vartheta"]).unwrap()
    }

    fn ket(ctx: &Arc<SymbolContext>, name: KetName) -> PolState {
        named_ket(ctx, name, Convention::DEFAULT)
    }

    #[test]
    fn named_kets_and_exact_identities() {
        let ctx = ctx_vt();
        let h = ket(&ctx, KetName::H);
        let v = ket(&ctx, KetName::V);
        let l = ket(&ctx, KetName::L);
        let r = ket(&ctx, KetName::R);
        assert!(h.amp1().is_zero() && h.amp0().is_one());
        // (|L⟩ + |R⟩)/√2 = |h⟩ exactly.
        let sum = l
            .try_add(&r)
            .unwrap()
            .scale(&SymbolicScalar::sqrt2_pow(&ctx, -1));
        assert_eq!(sum, h);
        // −i·(|L⟩ − |R⟩)/√2 = |v⟩ exactly.
        let diff = l
            .try_add(&r.neg_owned())
            .unwrap()
            .scale(&SymbolicScalar::sqrt2_pow(&ctx, -1).times_i().neg_owned());
        assert_eq!(diff, v);
        // Orthonormality.
        assert!(inner(&l, &r).unwrap().is_zero());
        assert!(inner(&l, &l).unwrap().is_one());
        assert!(inner(&h, &v).unwrap().is_zero());
        assert!(inner(&h, &h).unwrap().is_one());
        assert!(r.norm_sq().is_one());
        // The opposite handedness swaps the circular kets.
        let flipped = Convention {
            handedness: crate::jones::Handedness::LeftIsMinusI,
            ..Convention::DEFAULT
        };
        assert_eq!(named_ket(&ctx, KetName::L, flipped), r);
        assert_eq!(named_ket(&ctx, KetName::R, flipped), l);
        assert_eq!("L".parse::<KetName>().unwrap(), KetName::L);
        assert!("x".parse::<KetName>().is_err());
    }

    #[test]
    fn circular_round_trip_is_exact() {
        let ctx = SymbolContext::new(["alpha", "beta"]).unwrap();
        let alpha = ctx.angle("alpha").unwrap();
        let beta = ctx.angle("beta").unwrap();
        let amp0 = SymbolicScalar::cos(&alpha).unwrap();
        let amp1 = SymbolicScalar::exp_i(&beta).unwrap().with_eta(1);
        let s = PolState::new(amp0, amp1).unwrap();
        for conv in Convention::all() {
            let (c_l, c_r) = circular_components(&s, conv);
            let back = from_circular(&c_l, &c_r, conv).unwrap();
            assert_eq!(back, s);
        }
        // |L⟩ has components (1, 0).
        let l = ket(&ctx, KetName::L);
        let (c_l, c_r) = circular_components(&l, Convention::DEFAULT);
        assert!(c_l.is_one() && c_r.is_zero());
    }

    #[test]
    fn twisted_half_wave_plate_flips_spin_with_oam_phase() {
        let ctx = ctx_vt();
        let vt = ctx.angle("vartheta").unwrap();
        let h_op = plate_h(&vt, Convention::DEFAULT).unwrap();
        let l = ket(&ctx, KetName::L);
        let r = ket(&ctx, KetName::R);
        // H(ϑ)|L⟩ = η·e^{2iϑ}·|R⟩ exactly.
        let out = apply(&h_op, &l).unwrap();
        let phase = SymbolicScalar::exp_i_scaled(&vt, 2).unwrap().with_eta(1);
        assert_eq!(out, r.scale(&phase));
        // H(ϑ)|R⟩ = −η·e^{−2iϑ}·|L⟩ (the engine derivation fixes the sign).
        let out = apply(&h_op, &r).unwrap();
        let phase = SymbolicScalar::exp_i_scaled(&vt, -2)
            .unwrap()
            .with_eta(1)
            .neg_owned();
        assert_eq!(out, l.scale(&phase));
        // Untwisted: spin flip with no OAM phase.
        let h0 = plate_h(&LinearAngle::zero(&ctx), Convention::DEFAULT).unwrap();
        let out = apply(&h0, &l).unwrap();
        assert_eq!(out, r.scale(&SymbolicScalar::eta(&ctx, 1)));
    }

    #[test]
    fn two_plate_retarder_keeps_spin_and_adds_phase() {
        let ctx = ctx_vt();
        let vt = ctx.angle("vartheta").unwrap();
        // Listed [H(0), H(ϑ)]: light passes the twisted plate first.
        let spec = GadgetSpec::new(vec![
            PlateSpec::half(LinearAngle::zero(&ctx)),
            PlateSpec::half(vt.clone()),
        ])
        .unwrap();
        let op = compose(&spec, Convention::DEFAULT).unwrap();
        let l = ket(&ctx, KetName::L);
        let r = ket(&ctx, KetName::R);
        let eta2 = SymbolicScalar::eta(&ctx, 2);
        let out_l = apply(&op, &l).unwrap();
        let expect_l = l.scale(
            &SymbolicScalar::exp_i_scaled(&vt, 2)
                .unwrap()
                .try_mul(&eta2)
                .unwrap()
                .neg_owned(),
        );
        assert_eq!(out_l, expect_l);
        let out_r = apply(&op, &r).unwrap();
        let expect_r = r.scale(
            &SymbolicScalar::exp_i_scaled(&vt, -2)
                .unwrap()
                .try_mul(&eta2)
                .unwrap()
                .neg_owned(),
        );
        assert_eq!(out_r, expect_r);
    }

    #[test]
    fn twisted_generator_on_h_splits_into_circular_parts() {
        let ctx = SymbolContext::new(["vartheta", "phi"]).unwrap();
        let vt = ctx.angle("vartheta").unwrap();
        let phi = ctx.angle("phi").unwrap();
        let n_twisted = crate::jones::twist(
            &crate::jones::build_n(&phi, Convention::DEFAULT).unwrap(),
            &vt,
            Convention::DEFAULT,
        )
        .unwrap();
        let h = ket(&ctx, KetName::H);
        let full = apply(&n_twisted, &h).unwrap();
        // K-part: (η·sinφ/√2)·(e^{2iϑ}|R⟩ − e^{−2iϑ}|L⟩).
        let k_op = reflection_k(&vt).unwrap().times_scalar(
            &SymbolicScalar::sin(&phi)
                .unwrap()
                .with_eta(1)
                .times_i()
                .neg_owned(),
        );
        let k_part = apply(&k_op, &h).unwrap();
        let coeff = SymbolicScalar::sin(&phi)
            .unwrap()
            .with_eta(1)
            .try_mul(&SymbolicScalar::sqrt2_pow(&ctx, -1))
            .unwrap();
        let r_piece = ket(&ctx, KetName::R).scale(
            &SymbolicScalar::exp_i_scaled(&vt, 2)
                .unwrap()
                .try_mul(&coeff)
                .unwrap(),
        );
        let l_piece = ket(&ctx, KetName::L).scale(
            &SymbolicScalar::exp_i_scaled(&vt, -2)
                .unwrap()
                .try_mul(&coeff)
                .unwrap()
                .neg_owned(),
        );
        assert_eq!(k_part, r_piece.try_add(&l_piece).unwrap());
        // J-part: the remainder is η·cosφ·|v⟩ under this engine's generator.
        let j_part = full.try_add(&k_part.neg_owned()).unwrap();
        let expect = ket(&ctx, KetName::V)
            .scale(&SymbolicScalar::cos(&phi).unwrap().with_eta(1));
        assert_eq!(j_part, expect);
    }

    #[test]
    fn oam_spectrum_reads_integer_indices() {
        let ctx = SymbolContext::new(["vartheta", "alpha"]).unwrap();
        let vt_sym = ctx.symbol("vartheta").unwrap();
        let vt = ctx.angle("vartheta").unwrap();
        let alpha = ctx.angle("alpha").unwrap();
        // |h⟩: single k = 0 entry per spin, residual 1/√2.
        let h = ket(&ctx, KetName::H);
        let spec = oam_spectrum(&h, &vt_sym, Convention::DEFAULT).unwrap();
        assert_eq!(spec.len(), 2);
        let inv_sqrt2 = SymbolicScalar::sqrt2_pow(&ctx, -1);
        assert_eq!(spec[0].spin, Spin::Left);
        assert_eq!(spec[0].k, 0);
        assert_eq!(spec[0].residual, inv_sqrt2);
        assert_eq!(spec[1].spin, Spin::Right);
        assert_eq!(spec[1].k, 0);
        // H(ϑ)|L⟩: a single right-spin line at k = +2 with residual η.
        let out = apply(
            &plate_h(&vt, Convention::DEFAULT).unwrap(),
            &ket(&ctx, KetName::L),
        )
        .unwrap();
        let spec = oam_spectrum(&out, &vt_sym, Convention::DEFAULT).unwrap();
        assert_eq!(spec.len(), 1);
        assert_eq!(spec[0].spin, Spin::Right);
        assert_eq!(spec[0].k, 2);
        assert_eq!(spec[0].residual, SymbolicScalar::eta(&ctx, 1));
        // Reconstruction is bit-exact on a richer state.
        let gadget = compose(&GadgetSpec::qhq(&vt, &alpha), Convention::DEFAULT).unwrap();
        let rich = apply(&gadget, &h).unwrap();
        let spec = oam_spectrum(&rich, &vt_sym, Convention::DEFAULT).unwrap();
        let back = reconstruct_oam(&spec, &vt_sym, Convention::DEFAULT).unwrap();
        assert_eq!(back, rich);
        // Residuals are free of the twist symbol.
        for term in &spec {
            assert!(!term.residual.used_symbols().contains(&vt_sym.index()));
        }
    }

    #[test]
    fn plate_parity_alternates_spin_for_circular_input() {
        let ctx = ctx_vt();
        let vt = ctx.angle("vartheta").unwrap();
        let vt_sym = ctx.symbol("vartheta").unwrap();
        let l = ket(&ctx, KetName::L);
        for count in 1..=4usize {
            let plates: Vec<PlateSpec> = (0..count)
                .map(|j| PlateSpec::half(vt.scaled(j as i64 + 1)))
                .collect();
            let op = compose(&GadgetSpec::new(plates).unwrap(), Convention::DEFAULT).unwrap();
            let out = apply(&op, &l).unwrap();
            let spec = oam_spectrum(&out, &vt_sym, Convention::DEFAULT).unwrap();
            assert!(!spec.is_empty());
            let expected_spin = if count % 2 == 1 { Spin::Right } else { Spin::Left };
            for term in &spec {
                assert_eq!(
                    term.spin, expected_spin,
                    "count {count}: expected all {expected_spin} lines"
                );
            }
        }
    }

    #[test]
    fn qplate_action_matches_reference_labels() {
        let ctx = ctx_vt();
        let vt = ctx.angle("vartheta").unwrap();
        let vt_sym = ctx.symbol("vartheta").unwrap();
        let conv = Convention::DEFAULT;
        // |L⟩, m=0, q=2 → |R⟩ with OAM index +4.
        let l = ket(&ctx, KetName::L);
        let out = qplate_crosscheck(&l, 4, &vt_sym, conv).unwrap();
        let spec = oam_spectrum(&out, &vt_sym, conv).unwrap();
        assert_eq!(spec.len(), 1);
        assert_eq!((spec[0].spin, spec[0].k), (Spin::Right, 4));
        assert!(spec[0].residual.is_one());
        // |h⟩ splits into both branches.
        let h = ket(&ctx, KetName::H);
        let out = qplate_crosscheck(&h, 4, &vt_sym, conv).unwrap();
        let spec = oam_spectrum(&out, &vt_sym, conv).unwrap();
        assert_eq!(spec.len(), 2);
        assert_eq!((spec[0].spin, spec[0].k), (Spin::Left, -4));
        assert_eq!((spec[1].spin, spec[1].k), (Spin::Right, 4));
        // q = 0 flips spin labels but leaves OAM untouched.
        let out = qplate_crosscheck(&l, 0, &vt_sym, conv).unwrap();
        let spec = oam_spectrum(&out, &vt_sym, conv).unwrap();
        assert_eq!((spec[0].spin, spec[0].k), (Spin::Right, 0));
        // Same (spin-flip, +2-index) signature as the twisted half-wave plate.
        let hwp_out = apply(&plate_h(&vt, conv).unwrap(), &l).unwrap();
        let hwp_spec = oam_spectrum(&hwp_out, &vt_sym, conv).unwrap();
        let qp_out = qplate_crosscheck(&l, 2, &vt_sym, conv).unwrap();
        let qp_spec = oam_spectrum(&qp_out, &vt_sym, conv).unwrap();
        let labels = |s: &[OamTerm]| s.iter().map(|t| (t.spin, t.k)).collect::<Vec<_>>();
        assert_eq!(labels(&hwp_spec), labels(&qp_spec));
        // Input states outside {L-like, R-like, h-like} are rejected.
        let v = ket(&ctx, KetName::V);
        assert!(matches!(
            qplate_crosscheck(&v, 2, &vt_sym, conv),
            Err(Error::UnsupportedQPlateInput(_))
        ));
        // An existing OAM index shifts additively: |L⟩e^{iϑ} → k = 1 + 2q.
        let l_m1 = l.scale(&SymbolicScalar::exp_i_scaled(&vt, 1).unwrap());
        let out = qplate_crosscheck(&l_m1, 4, &vt_sym, conv).unwrap();
        let spec = oam_spectrum(&out, &vt_sym, conv).unwrap();
        assert_eq!((spec[0].spin, spec[0].k), (Spin::Right, 5));
    }

    #[test]
    fn norm_scales_with_plate_count() {
        let ctx = SymbolContext::new(["vartheta", "alpha"]).unwrap();
        let vt = ctx.angle("vartheta").unwrap();
        let alpha = ctx.angle("alpha").unwrap();
        let gadget = compose(&GadgetSpec::qhq(&vt, &alpha), Convention::DEFAULT).unwrap();
        let l = ket(&ctx, KetName::L);
        let out = apply(&gadget, &l).unwrap();
        // ⟨out|out⟩ = η⁶ exactly for the three-plate gadget on a unit ket.
        assert_eq!(out.norm_sq(), SymbolicScalar::eta(&ctx, 6));
    }

    #[test]
    fn report_lists_components_and_spectrum() {
        let ctx = ctx_vt();
        let vt = ctx.angle("vartheta").unwrap();
        let vt_sym = ctx.symbol("vartheta").unwrap();
        let out = apply(
            &plate_h(&vt, Convention::DEFAULT).unwrap(),
            &ket(&ctx, KetName::L),
        )
        .unwrap();
        let report = state_report(&out, &vt_sym, Convention::DEFAULT).unwrap();
        assert!(report.contains("component |h>:"));
        assert!(report.contains("circular |R>:"));
        assert!(report.contains("spin R  k=+2  residual η"));
        let zero = PolState::zero(&ctx);
        let report = state_report(&zero, &vt_sym, Convention::DEFAULT).unwrap();
        assert!(report.contains("(zero state)"));
    }
}
