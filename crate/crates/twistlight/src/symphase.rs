//! Exact scalar ring for the wave-plate algebra.
//!
//! Every scalar is a canonical finite sum of terms
//!
//! ```text
//!     (re + i·im) · (√2)^s · η^p · e^{i·(n₁·a₁ + … + n_m·a_m)}
//! ```
//!
//! where `re`, `im` are rationals, `s` and `p` are integers, and the phase is
//! an integer-linear combination of angle symbols declared up front in a
//! [`SymbolContext`].  Constant phases are restricted to multiples of π/4 and
//! are folded into the coefficient at construction time (`e^{iπ/4}` becomes
//! the coefficient `(1+i)/√2`), so no canonical term carries a constant phase.
//!
//! Canonical form:
//!
//! * zero is the empty sum; a zero coefficient is stored as `(0, 0, 0)`;
//! * for nonzero coefficients `s ∈ {0, 1}` — even powers of √2 fold into the
//!   rationals, so `2` is `(2, 0, 0)` and `1/√2` is `(1/2, 0, 1)`;
//! * terms are sorted by `(η-power, phase vector, √2-parity)` and at most one
//!   term exists per such key.  Sums such as `1 + 1/√2` therefore keep two
//!   terms (the two √2-parities), which is what keeps the ring closed under
//!   addition.
//!
//! Equality of canonical forms is decidable and used directly to verify
//! operator identities elsewhere in the crate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num::complex::Complex64;
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Symbol context and angle expressions
// ---------------------------------------------------------------------------

/// Ordered set of angle-symbol names over which scalars are expressed.
///
/// Scalars, angles, matrices, and states all carry a shared context; mixing
/// objects from contexts with different symbol lists is reported as
/// [`Error::ContextMismatch`].  Contexts are compared by their symbol lists,
/// so two independently built contexts with the same names interoperate.
#[derive(Debug, PartialEq, Eq)]
pub struct SymbolContext {
    names: Vec<String>,
}

impl SymbolContext {
    /// Declares a new context from an ordered list of distinct symbol names.
    pub fn new<I, S>(names: I) -> Result<Arc<Self>>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateSymbol(name.clone()));
            }
        }
        Ok(Arc::new(SymbolContext { names }))
    }

    /// Number of declared symbols.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    /// True when no symbols are declared (constants-only context).
    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Declared symbol names, in declaration order.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Looks up a declared symbol by name.
    pub fn symbol(self: &Arc<Self>, name: &str) -> Result<AngleSymbol> {
        match self.names.iter().position(|n| n == name) {
            Some(index) => Ok(AngleSymbol {
                ctx: Arc::clone(self),
                index,
            }),
            None => Err(Error::UnknownSymbol(name.to_string())),
        }
    }

    /// Convenience: a [`LinearAngle`] consisting of exactly one symbol.
    pub fn angle(self: &Arc<Self>, name: &str) -> Result<LinearAngle> {
        Ok(self.symbol(name)?.as_angle())
    }

    fn describe(&self) -> String {
        self.names.join(", ")
    }
}

/// Returns true when the two contexts agree (pointer-equal or same names).
pub(crate) fn same_ctx(a: &Arc<SymbolContext>, b: &Arc<SymbolContext>) -> bool {
    Arc::ptr_eq(a, b) || a.names == b.names
}

pub(crate) fn ctx_mismatch(a: &Arc<SymbolContext>, b: &Arc<SymbolContext>) -> Error {
    Error::ContextMismatch {
        left: a.describe(),
        right: b.describe(),
    }
}

/// Handle to one declared angle symbol.
#[derive(Debug, Clone)]
pub struct AngleSymbol {
    ctx: Arc<SymbolContext>,
    index: usize,
}

impl AngleSymbol {
    /// The symbol's name as declared.
    pub fn name(&self) -> &str {
        &self.ctx.names[self.index]
    }

    /// Position of the symbol within its context.
    pub fn index(&self) -> usize {
        self.index
    }

    /// The owning context.
    pub fn context(&self) -> &Arc<SymbolContext> {
        &self.ctx
    }

    /// The symbol viewed as a linear angle expression with coefficient one.
    pub fn as_angle(&self) -> LinearAngle {
        let mut coeffs = vec![0i64; self.ctx.len()];
        coeffs[self.index] = 1;
        LinearAngle {
            ctx: Arc::clone(&self.ctx),
            coeffs,
            const_pi: BigRational::zero(),
        }
    }
}

impl PartialEq for AngleSymbol {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index && same_ctx(&self.ctx, &other.ctx)
    }
}

impl Eq for AngleSymbol {}

/// Integer-linear combination of declared symbols plus a rational multiple
/// of π.
///
/// Angles parameterize plate orientations and retardance arguments.  The
/// constant part may be any rational multiple of π at this level; the scalar
/// constructors that exponentiate an angle reject constants that are not
/// multiples of π/4, because only those fold into the coefficient ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearAngle {
    ctx: Arc<SymbolContext>,
    coeffs: Vec<i64>,
    const_pi: BigRational,
}

impl LinearAngle {
    /// The zero angle.
    pub fn zero(ctx: &Arc<SymbolContext>) -> Self {
        LinearAngle {
            ctx: Arc::clone(ctx),
            coeffs: vec![0; ctx.len()],
            const_pi: BigRational::zero(),
        }
    }

    /// The constant angle `num/den · π`.  Panics if `den == 0`.
    pub fn pi_fraction(ctx: &Arc<SymbolContext>, num: i64, den: i64) -> Self {
        assert!(den != 0, "pi_fraction denominator must be nonzero");
        LinearAngle {
            ctx: Arc::clone(ctx),
            coeffs: vec![0; ctx.len()],
            const_pi: BigRational::new(BigInt::from(num), BigInt::from(den)),
        }
    }

    /// The angle scaled by an integer.
    pub fn scaled(&self, k: i64) -> Self {
        LinearAngle {
            ctx: Arc::clone(&self.ctx),
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
            const_pi: &self.const_pi * BigRational::from_integer(BigInt::from(k)),
        }
    }

    /// Integer coefficient of one symbol.
    pub fn coeff_of(&self, sym: &AngleSymbol) -> i64 {
        self.coeffs[sym.index]
    }

    /// Constant part, as a rational multiple of π.
    pub fn const_pi(&self) -> &BigRational {
        &self.const_pi
    }

    /// The owning context.
    pub fn context(&self) -> &Arc<SymbolContext> {
        &self.ctx
    }

    /// True when the angle is identically zero.
    pub fn is_zero(&self) -> bool {
        self.const_pi.is_zero() && self.coeffs.iter().all(|&c| c == 0)
    }

    /// Numeric value given one radian value per declared symbol.
    pub fn eval(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.ctx.len(), "assignment length mismatch");
        let linear: f64 = self
            .coeffs
            .iter()
            .zip(values)
            .map(|(&c, &v)| c as f64 * v)
            .sum();
        linear + rational_to_f64(&self.const_pi) * std::f64::consts::PI
    }

    fn checked_combine(&self, other: &Self, sign: i64) -> Result<Self> {
        if !same_ctx(&self.ctx, &other.ctx) {
            return Err(ctx_mismatch(&self.ctx, &other.ctx));
        }
        Ok(LinearAngle {
            ctx: Arc::clone(&self.ctx),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + sign * b)
                .collect(),
            const_pi: &self.const_pi
                + &other.const_pi * BigRational::from_integer(BigInt::from(sign)),
        })
    }
}

impl std::ops::Add for &LinearAngle {
    type Output = LinearAngle;
    fn add(self, rhs: &LinearAngle) -> LinearAngle {
        self.checked_combine(rhs, 1)
            .expect("angle addition across different symbol contexts")
    }
}

impl std::ops::Sub for &LinearAngle {
    type Output = LinearAngle;
    fn sub(self, rhs: &LinearAngle) -> LinearAngle {
        self.checked_combine(rhs, -1)
            .expect("angle subtraction across different symbol contexts")
    }
}

impl std::ops::Neg for &LinearAngle {
    type Output = LinearAngle;
    fn neg(self) -> LinearAngle {
        self.scaled(-1)
    }
}

impl fmt::Display for LinearAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let name = &self.ctx.names[i];
            let chunk = match c {
                1 => name.clone(),
                -1 => format!("-{name}"),
                _ => format!("{c}·{name}"),
            };
            parts.push(chunk);
        }
        if !self.const_pi.is_zero() {
            let num = self.const_pi.numer();
            let den = self.const_pi.denom();
            let chunk = if den.is_one() {
                if num.is_one() {
                    "π".to_string()
                } else if *num == BigInt::from(-1) {
                    "-π".to_string()
                } else {
                    format!("{num}·π")
                }
            } else if num.is_one() {
                format!("π/{den}")
            } else if *num == BigInt::from(-1) {
                format!("-π/{den}")
            } else {
                format!("{num}·π/{den}")
            };
            parts.push(chunk);
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (i, p) in parts.iter().enumerate() {
            if i == 0 {
                out.push_str(p);
            } else if let Some(rest) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        write!(f, "{out}")
    }
}

// ---------------------------------------------------------------------------
// Coefficients
// ---------------------------------------------------------------------------

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn pow2(q: i64) -> BigRational {
    if q >= 0 {
        BigRational::from_integer(BigInt::one() << q as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-q) as usize)
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Gaussian-rational coefficient times an integer power of √2.
///
/// Value: `(re + i·im) · (√2)^sqrt2_pow`.  Canonical form keeps the zero
/// value as `(0, 0, 0)` and otherwise normalizes `sqrt2_pow` into `{0, 1}` by
/// folding even powers of √2 into the rational parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coefficient {
    re: BigRational,
    im: BigRational,
    sqrt2_pow: i64,
}

impl Coefficient {
    /// Builds and canonicalizes a coefficient.
    pub fn new(re: BigRational, im: BigRational, sqrt2_pow: i64) -> Self {
        let mut c = Coefficient { re, im, sqrt2_pow };
        c.canonicalize();
        c
    }

    /// Convenience constructor from small integer data.
    pub fn from_parts(re_num: i64, re_den: i64, im_num: i64, im_den: i64, sqrt2_pow: i64) -> Self {
        Coefficient::new(rat(re_num, re_den), rat(im_num, im_den), sqrt2_pow)
    }

    /// The zero coefficient `(0, 0, 0)`.
    pub fn zero() -> Self {
        Coefficient {
            re: BigRational::zero(),
            im: BigRational::zero(),
            sqrt2_pow: 0,
        }
    }

    /// The unit coefficient.
    pub fn one() -> Self {
        Coefficient {
            re: BigRational::one(),
            im: BigRational::zero(),
            sqrt2_pow: 0,
        }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Coefficient {
            re: BigRational::zero(),
            im: BigRational::one(),
            sqrt2_pow: 0,
        }
    }

    /// `e^{i·k·π/4}` as a ring element (the eight eighth-roots of unity,
    /// scaled into the canonical √2 form).
    pub fn omega_pow(k: i64) -> Self {
        match k.rem_euclid(8) {
            0 => Coefficient::from_parts(1, 1, 0, 1, 0),
            1 => Coefficient::from_parts(1, 1, 1, 1, -1),
            2 => Coefficient::from_parts(0, 1, 1, 1, 0),
            3 => Coefficient::from_parts(-1, 1, 1, 1, -1),
            4 => Coefficient::from_parts(-1, 1, 0, 1, 0),
            5 => Coefficient::from_parts(-1, 1, -1, 1, -1),
            6 => Coefficient::from_parts(0, 1, -1, 1, 0),
            _ => Coefficient::from_parts(1, 1, -1, 1, -1),
        }
    }

    fn canonicalize(&mut self) {
        if self.re.is_zero() && self.im.is_zero() {
            self.sqrt2_pow = 0;
            return;
        }
        let r = self.sqrt2_pow.rem_euclid(2);
        let q = (self.sqrt2_pow - r) / 2;
        if q != 0 {
            let factor = pow2(q);
            self.re = &self.re * &factor;
            self.im = &self.im * &factor;
        }
        self.sqrt2_pow = r;
    }

    /// Rational real part (before the √2 factor).
    pub fn re(&self) -> &BigRational {
        &self.re
    }

    /// Rational imaginary part (before the √2 factor).
    pub fn im(&self) -> &BigRational {
        &self.im
    }

    /// Canonical power of √2 (0 or 1 for nonzero values).
    pub fn sqrt2_pow(&self) -> i64 {
        self.sqrt2_pow
    }

    /// True for the zero coefficient.
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Product of two coefficients.
    pub fn mul(&self, other: &Self) -> Self {
        Coefficient::new(
            &self.re * &other.re - &self.im * &other.im,
            &self.re * &other.im + &self.im * &other.re,
            self.sqrt2_pow + other.sqrt2_pow,
        )
    }

    /// Sum of two coefficients of equal √2-parity.  Callers guarantee the
    /// parity (it is part of the term key); mixing parities is a logic error.
    pub(crate) fn add_same_parity(&self, other: &Self) -> Self {
        debug_assert!(
            self.is_zero() || other.is_zero() || self.sqrt2_pow == other.sqrt2_pow,
            "coefficient addition across different sqrt2 parities"
        );
        let pow = if self.is_zero() {
            other.sqrt2_pow
        } else {
            self.sqrt2_pow
        };
        Coefficient::new(&self.re + &other.re, &self.im + &other.im, pow)
    }

    /// Additive inverse.
    pub fn neg(&self) -> Self {
        Coefficient {
            re: -self.re.clone(),
            im: -self.im.clone(),
            sqrt2_pow: self.sqrt2_pow,
        }
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        Coefficient {
            re: self.re.clone(),
            im: -self.im.clone(),
            sqrt2_pow: self.sqrt2_pow,
        }
    }

    /// Floating-point value.
    pub fn eval(&self) -> Complex64 {
        let factor = std::f64::consts::SQRT_2.powi(self.sqrt2_pow as i32);
        Complex64::new(
            rational_to_f64(&self.re) * factor,
            rational_to_f64(&self.im) * factor,
        )
    }
}

// ---------------------------------------------------------------------------
// Phase exponents and terms
// ---------------------------------------------------------------------------

/// Integer-linear phase exponent: the vector of per-symbol integers `n_j` in
/// `e^{i·Σ n_j·a_j}`.
///
/// Canonical terms never carry a constant phase — constants that are
/// multiples of π/4 are folded into the coefficient at construction, and any
/// other constant is rejected with [`Error::UnsupportedPhase`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PhaseExponent {
    coeffs: Vec<i64>,
}

impl PhaseExponent {
    /// The zero phase over a context of `n` symbols.
    pub fn zero(n: usize) -> Self {
        PhaseExponent { coeffs: vec![0; n] }
    }

    /// Integer exponent vector, one entry per declared symbol.
    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Exponent of the symbol at a given context index.
    pub fn coeff_at(&self, index: usize) -> i64 {
        self.coeffs[index]
    }

    /// True when all exponents vanish.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn add(&self, other: &Self) -> Self {
        PhaseExponent {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    fn neg(&self) -> Self {
        PhaseExponent {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// One canonical summand of a [`SymbolicScalar`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    coeff: Coefficient,
    eta_pow: i64,
    phase: PhaseExponent,
}

impl Term {
    /// The coefficient (nonzero in canonical scalars).
    pub fn coeff(&self) -> &Coefficient {
        &self.coeff
    }

    /// Integer grade in the gain parameter η.
    pub fn eta_pow(&self) -> i64 {
        self.eta_pow
    }

    /// Integer-linear phase exponent.
    pub fn phase(&self) -> &PhaseExponent {
        &self.phase
    }

    fn key(&self) -> (i64, Vec<i64>, i64) {
        (
            self.eta_pow,
            self.phase.coeffs.clone(),
            self.coeff.sqrt2_pow.rem_euclid(2),
        )
    }
}

// ---------------------------------------------------------------------------
// The scalar ring
// ---------------------------------------------------------------------------

/// Canonical exact scalar: a finite sum of [`Term`]s over one
/// [`SymbolContext`].
///
/// All constructors and operations return canonical forms, so `==` decides
/// mathematical equality within the ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicScalar {
    ctx: Arc<SymbolContext>,
    terms: Vec<Term>,
}

impl SymbolicScalar {
    // -- constructors -------------------------------------------------------

    /// The zero scalar (empty sum).
    pub fn zero(ctx: &Arc<SymbolContext>) -> Self {
        SymbolicScalar {
            ctx: Arc::clone(ctx),
            terms: Vec::new(),
        }
    }

    /// The unit scalar.
    pub fn one(ctx: &Arc<SymbolContext>) -> Self {
        Self::from_coefficient(ctx, Coefficient::one())
    }

    /// The imaginary unit.
    pub fn i(ctx: &Arc<SymbolContext>) -> Self {
        Self::from_coefficient(ctx, Coefficient::i())
    }

    /// The rational `num/den`.  Panics if `den == 0`.
    pub fn rational(ctx: &Arc<SymbolContext>, num: i64, den: i64) -> Self {
        assert!(den != 0, "rational denominator must be nonzero");
        Self::from_coefficient(ctx, Coefficient::new(rat(num, den), BigRational::zero(), 0))
    }

    /// An integer power of √2 (e.g. `-1` for `1/√2`).
    pub fn sqrt2_pow(ctx: &Arc<SymbolContext>, s: i64) -> Self {
        Self::from_coefficient(
            ctx,
            Coefficient::new(BigRational::one(), BigRational::zero(), s),
        )
    }

    /// The gain symbol raised to an integer power, `η^p`.
    pub fn eta(ctx: &Arc<SymbolContext>, pow: i64) -> Self {
        SymbolicScalar {
            ctx: Arc::clone(ctx),
            terms: vec![Term {
                coeff: Coefficient::one(),
                eta_pow: pow,
                phase: PhaseExponent::zero(ctx.len()),
            }],
        }
    }

    /// A bare coefficient as a scalar.
    pub fn from_coefficient(ctx: &Arc<SymbolContext>, coeff: Coefficient) -> Self {
        if coeff.is_zero() {
            return Self::zero(ctx);
        }
        SymbolicScalar {
            ctx: Arc::clone(ctx),
            terms: vec![Term {
                coeff,
                eta_pow: 0,
                phase: PhaseExponent::zero(ctx.len()),
            }],
        }
    }

    /// `e^{i·k·π/4}` for integer `k`.
    pub fn omega_pow(ctx: &Arc<SymbolContext>, k: i64) -> Self {
        Self::from_coefficient(ctx, Coefficient::omega_pow(k))
    }

    /// The constant phase `e^{i·π·num/den}`.  The denominator must divide 4
    /// after reduction; anything else is not representable in the ring.
    pub fn phase_pi(ctx: &Arc<SymbolContext>, num: i64, den: i64) -> Result<Self> {
        assert!(den != 0, "phase denominator must be nonzero");
        let angle = LinearAngle::pi_fraction(ctx, num, den);
        Self::exp_i(&angle)
    }

    /// `e^{i·angle}` for an integer-linear angle whose constant part is a
    /// multiple of π/4.
    pub fn exp_i(angle: &LinearAngle) -> Result<Self> {
        Self::exp_i_scaled(angle, 1)
    }

    /// `e^{i·m·angle}`.
    pub fn exp_i_scaled(angle: &LinearAngle, m: i64) -> Result<Self> {
        let ctx = &angle.ctx;
        let const_pi = &angle.const_pi * BigRational::from_integer(BigInt::from(m));
        // Constant phase π·c folds into the coefficient iff 4·c is an integer
        // (then it is a power of e^{iπ/4}).
        let eighths = &const_pi * BigRational::from_integer(BigInt::from(4));
        if !eighths.is_integer() {
            return Err(Error::UnsupportedPhase {
                num: const_pi.numer().to_i64().unwrap_or(i64::MAX),
                den: const_pi.denom().to_i64().unwrap_or(i64::MAX),
            });
        }
        let k = eighths
            .to_integer()
            .mod_floor(&BigInt::from(8))
            .to_i64()
            .expect("eighth-turn index fits in i64");
        let coeff = Coefficient::omega_pow(k);
        let phase = PhaseExponent {
            coeffs: angle.coeffs.iter().map(|c| c * m).collect(),
        };
        Ok(SymbolicScalar {
            ctx: Arc::clone(ctx),
            terms: vec![Term {
                coeff,
                eta_pow: 0,
                phase,
            }],
        })
    }

    /// `cos(angle) = (e^{i·angle} + e^{−i·angle}) / 2`.
    pub fn cos(angle: &LinearAngle) -> Result<Self> {
        let plus = Self::exp_i_scaled(angle, 1)?;
        let minus = Self::exp_i_scaled(angle, -1)?;
        let sum = plus.try_add(&minus)?;
        Ok(sum.times_rational(1, 2))
    }

    /// `sin(angle) = −(i/2)·(e^{i·angle} − e^{−i·angle})`.
    pub fn sin(angle: &LinearAngle) -> Result<Self> {
        let plus = Self::exp_i_scaled(angle, 1)?;
        let minus = Self::exp_i_scaled(angle, -1)?;
        let diff = plus.try_add(&minus.neg_owned())?;
        Ok(diff.times_coefficient(&Coefficient::from_parts(0, 1, -1, 2, 0)))
    }

    // -- accessors -----------------------------------------------------------

    /// The owning context.
    pub fn context(&self) -> &Arc<SymbolContext> {
        &self.ctx
    }

    /// Canonical term list, sorted by `(η-power, phase, √2-parity)`.
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// True for the canonical zero (empty sum).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for the canonical unit.
    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && {
            let t = &self.terms[0];
            t.eta_pow == 0 && t.phase.is_zero() && t.coeff == Coefficient::one()
        }
    }

    /// Distinct η-grades appearing in the sum, ascending.
    pub fn eta_grades(&self) -> Vec<i64> {
        let set: BTreeSet<i64> = self.terms.iter().map(|t| t.eta_pow).collect();
        set.into_iter().collect()
    }

    /// Indices of symbols that occur with a nonzero exponent somewhere.
    pub fn used_symbols(&self) -> BTreeSet<usize> {
        let mut used = BTreeSet::new();
        for t in &self.terms {
            for (i, &c) in t.phase.coeffs.iter().enumerate() {
                if c != 0 {
                    used.insert(i);
                }
            }
        }
        used
    }

    // -- ring operations -----------------------------------------------------

    /// Sum, merging terms with equal `(η-power, phase, √2-parity)` keys.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if !same_ctx(&self.ctx, &other.ctx) {
            return Err(ctx_mismatch(&self.ctx, &other.ctx));
        }
        let mut merged: BTreeMap<(i64, Vec<i64>, i64), Term> = BTreeMap::new();
        for term in self.terms.iter().chain(other.terms.iter()) {
            match merged.entry(term.key()) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(term.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let existing = e.get_mut();
                    existing.coeff = existing.coeff.add_same_parity(&term.coeff);
                }
            }
        }
        Ok(SymbolicScalar {
            ctx: Arc::clone(&self.ctx),
            terms: merged.into_values().filter(|t| !t.coeff.is_zero()).collect(),
        })
    }

    /// Product, distributing term-by-term.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if !same_ctx(&self.ctx, &other.ctx) {
            return Err(ctx_mismatch(&self.ctx, &other.ctx));
        }
        let mut merged: BTreeMap<(i64, Vec<i64>, i64), Term> = BTreeMap::new();
        for a in &self.terms {
            for b in &other.terms {
                let term = Term {
                    coeff: a.coeff.mul(&b.coeff),
                    eta_pow: a.eta_pow + b.eta_pow,
                    phase: a.phase.add(&b.phase),
                };
                match merged.entry(term.key()) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(term);
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        let existing = e.get_mut();
                        existing.coeff = existing.coeff.add_same_parity(&term.coeff);
                    }
                }
            }
        }
        Ok(SymbolicScalar {
            ctx: Arc::clone(&self.ctx),
            terms: merged.into_values().filter(|t| !t.coeff.is_zero()).collect(),
        })
    }

    /// Additive inverse.
    pub fn neg_owned(&self) -> Self {
        SymbolicScalar {
            ctx: Arc::clone(&self.ctx),
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff.neg(),
                    eta_pow: t.eta_pow,
                    phase: t.phase.clone(),
                })
                .collect(),
        }
    }

    /// Complex conjugate: conjugates coefficients and negates phases.  The
    /// gain η is treated as real and positive, so η-grades are untouched.
    pub fn conj(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coeff: t.coeff.conj(),
                eta_pow: t.eta_pow,
                phase: t.phase.neg(),
            })
            .collect();
        Self::from_raw_terms(&self.ctx, terms)
    }

    /// Multiplies every term by a bare coefficient.
    pub fn times_coefficient(&self, c: &Coefficient) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coeff: t.coeff.mul(c),
                eta_pow: t.eta_pow,
                phase: t.phase.clone(),
            })
            .collect();
        Self::from_raw_terms(&self.ctx, terms)
    }

    /// Multiplies by the rational `num/den`.
    pub fn times_rational(&self, num: i64, den: i64) -> Self {
        self.times_coefficient(&Coefficient::new(rat(num, den), BigRational::zero(), 0))
    }

    /// Multiplies by the imaginary unit.
    pub fn times_i(&self) -> Self {
        self.times_coefficient(&Coefficient::i())
    }

    /// Multiplies by `η^p` (shifts every η-grade by `p`).
    pub fn with_eta(&self, p: i64) -> Self {
        SymbolicScalar {
            ctx: Arc::clone(&self.ctx),
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff.clone(),
                    eta_pow: t.eta_pow + p,
                    phase: t.phase.clone(),
                })
                .collect(),
        }
    }

    /// Keeps only terms selected by a predicate on `(η-power, phase)`.
    pub fn filter_terms<F>(&self, mut keep: F) -> Self
    where
        F: FnMut(&Term) -> bool,
    {
        SymbolicScalar {
            ctx: Arc::clone(&self.ctx),
            terms: self.terms.iter().filter(|t| keep(t)).cloned().collect(),
        }
    }

    /// Splits the scalar by the integer exponent of one symbol: returns
    /// `(k, residual)` pairs, sorted by ascending `k`, such that
    ///
    /// ```text
    ///     self = Σ_k residual_k · e^{i·k·symbol}
    /// ```
    ///
    /// holds exactly, with each residual free of the designated symbol.
    pub fn split_by_symbol(&self, symbol: &AngleSymbol) -> Result<Vec<(i64, SymbolicScalar)>> {
        if !same_ctx(&self.ctx, symbol.context()) {
            return Err(ctx_mismatch(&self.ctx, symbol.context()));
        }
        let idx = symbol.index();
        let mut groups: BTreeMap<i64, Vec<Term>> = BTreeMap::new();
        for term in &self.terms {
            let k = term.phase.coeff_at(idx);
            let mut stripped = term.clone();
            stripped.phase.coeffs[idx] = 0;
            groups.entry(k).or_default().push(stripped);
        }
        Ok(groups
            .into_iter()
            .map(|(k, terms)| (k, SymbolicScalar::from_raw_terms(&self.ctx, terms)))
            .collect())
    }

    /// Rebuilds canonical form from arbitrary terms (sorts, merges, drops
    /// zeros).  Internal constructor used by operations that may disturb
    /// ordering.
    fn from_raw_terms(ctx: &Arc<SymbolContext>, terms: Vec<Term>) -> Self {
        let mut merged: BTreeMap<(i64, Vec<i64>, i64), Term> = BTreeMap::new();
        for term in terms {
            if term.coeff.is_zero() {
                continue;
            }
            match merged.entry(term.key()) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(term);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let existing = e.get_mut();
                    existing.coeff = existing.coeff.add_same_parity(&term.coeff);
                }
            }
        }
        SymbolicScalar {
            ctx: Arc::clone(ctx),
            terms: merged.into_values().filter(|t| !t.coeff.is_zero()).collect(),
        }
    }

    // -- numeric evaluation --------------------------------------------------

    /// Evaluates at named angle values (radians) and a gain value.
    ///
    /// Every symbol that actually occurs in the scalar must be assigned;
    /// missing symbols are reported by name.  `eta` must be positive.
    pub fn eval_numeric(&self, assign: &AngleValues, eta: f64) -> Result<Complex64> {
        if eta <= 0.0 {
            return Err(Error::NonPositiveEta(eta));
        }
        let mut values = vec![0.0f64; self.ctx.len()];
        for index in self.used_symbols() {
            let name = &self.ctx.names[index];
            match assign.get(name) {
                Some(v) => values[index] = v,
                None => return Err(Error::MissingAssignment(name.clone())),
            }
        }
        Ok(self.eval_at(&values, eta))
    }

    /// Evaluates with a dense per-symbol value vector (fast path; the vector
    /// length must match the context).
    pub fn eval_at(&self, values: &[f64], eta: f64) -> Complex64 {
        assert_eq!(values.len(), self.ctx.len(), "assignment length mismatch");
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let phi: f64 = t
                .phase
                .coeffs
                .iter()
                .zip(values)
                .map(|(&c, &v)| c as f64 * v)
                .sum();
            acc += t.coeff.eval() * eta.powi(t.eta_pow as i32) * Complex64::cis(phi);
        }
        acc
    }

    /// Precompiles to floating-point term data for evaluation-heavy loops.
    pub fn compile(&self) -> CompiledScalar {
        CompiledScalar {
            n_symbols: self.ctx.len(),
            terms: self
                .terms
                .iter()
                .map(|t| CompiledTerm {
                    coeff: t.coeff.eval(),
                    eta_pow: t.eta_pow as i32,
                    phase: t
                        .phase
                        .coeffs
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c != 0)
                        .map(|(i, &c)| (i, c as f64))
                        .collect(),
                })
                .collect(),
        }
    }

    // -- serialization -------------------------------------------------------

    /// Serializes to the structured text form (JSON): a list of
    /// `{re, im, sqrt2_pow, eta_pow, exponents}` records plus the symbol
    /// declaration.  Round-trips exactly through [`SymbolicScalar::from_json`].
    pub fn to_json(&self) -> String {
        let dto = ScalarDto {
            symbols: self.ctx.names.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| TermDto {
                    re: t.coeff.re.to_string(),
                    im: t.coeff.im.to_string(),
                    sqrt2_pow: t.coeff.sqrt2_pow,
                    eta_pow: t.eta_pow,
                    exponents: t
                        .phase
                        .coeffs
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c != 0)
                        .map(|(i, &c)| (self.ctx.names[i].clone(), c))
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&dto).expect("scalar serialization cannot fail")
    }

    /// Parses the structured text form produced by [`SymbolicScalar::to_json`].
    pub fn from_json(text: &str) -> Result<Self> {
        let dto: ScalarDto = serde_json::from_str(text)
            .map_err(|e| Error::MalformedSerialization(e.to_string()))?;
        let ctx = SymbolContext::new(dto.symbols.iter().cloned())?;
        let mut terms = Vec::new();
        for t in dto.terms {
            let re = BigRational::from_str(&t.re)
                .map_err(|e| Error::MalformedSerialization(format!("re `{}`: {e}", t.re)))?;
            let im = BigRational::from_str(&t.im)
                .map_err(|e| Error::MalformedSerialization(format!("im `{}`: {e}", t.im)))?;
            let mut coeffs = vec![0i64; ctx.len()];
            for (name, c) in &t.exponents {
                let sym = ctx.symbol(name)?;
                coeffs[sym.index()] = *c;
            }
            terms.push(Term {
                coeff: Coefficient::new(re, im, t.sqrt2_pow),
                eta_pow: t.eta_pow,
                phase: PhaseExponent { coeffs },
            });
        }
        Ok(Self::from_raw_terms(&ctx, terms))
    }

    /// Canonical exponential-basis rendering, one chunk per term.
    pub fn canonical_string(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let chunks: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let mut s = fmt_coefficient(&t.coeff);
                if t.eta_pow != 0 {
                    s.push_str(&fmt_eta(t.eta_pow));
                }
                if !t.phase.is_zero() {
                    s.push_str(&format!("·e^{{i({})}}", fmt_phase(&self.ctx, &t.phase)));
                }
                s
            })
            .collect();
        join_signed(&chunks)
    }
}

impl std::ops::Add for &SymbolicScalar {
    type Output = SymbolicScalar;
    fn add(self, rhs: &SymbolicScalar) -> SymbolicScalar {
        self.try_add(rhs)
            .expect("scalar addition across different symbol contexts")
    }
}

impl std::ops::Sub for &SymbolicScalar {
    type Output = SymbolicScalar;
    fn sub(self, rhs: &SymbolicScalar) -> SymbolicScalar {
        self.try_add(&rhs.neg_owned())
            .expect("scalar subtraction across different symbol contexts")
    }
}

impl std::ops::Mul for &SymbolicScalar {
    type Output = SymbolicScalar;
    fn mul(self, rhs: &SymbolicScalar) -> SymbolicScalar {
        self.try_mul(rhs)
            .expect("scalar multiplication across different symbol contexts")
    }
}

impl std::ops::Neg for &SymbolicScalar {
    type Output = SymbolicScalar;
    fn neg(self) -> SymbolicScalar {
        self.neg_owned()
    }
}

// ---------------------------------------------------------------------------
// Numeric assignment
// ---------------------------------------------------------------------------

/// Named radian values for angle symbols, used by numeric evaluation.
#[derive(Debug, Clone, Default)]
pub struct AngleValues {
    map: BTreeMap<String, f64>,
}

impl AngleValues {
    /// Empty assignment.
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder-style insertion.
    pub fn set(mut self, name: &str, value: f64) -> Self {
        self.map.insert(name.to_string(), value);
        self
    }

    /// Looks up a value by symbol name.
    pub fn get(&self, name: &str) -> Option<f64> {
        self.map.get(name).copied()
    }

    /// Builds the dense value vector for a context; unassigned symbols map to
    /// zero (callers that must detect missing symbols use
    /// [`SymbolicScalar::eval_numeric`]).
    pub fn dense(&self, ctx: &Arc<SymbolContext>) -> Vec<f64> {
        ctx.names()
            .iter()
            .map(|n| self.get(n).unwrap_or(0.0))
            .collect()
    }
}

impl<'a, I: IntoIterator<Item = (&'a str, f64)>> From<I> for AngleValues {
    fn from(pairs: I) -> Self {
        AngleValues {
            map: pairs
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Compiled (floating point) form
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct CompiledTerm {
    coeff: Complex64,
    eta_pow: i32,
    phase: Vec<(usize, f64)>,
}

/// Floating-point compilation of a scalar: evaluation without any
/// big-rational traffic, for grids and randomized sweeps.
#[derive(Debug, Clone)]
pub struct CompiledScalar {
    n_symbols: usize,
    terms: Vec<CompiledTerm>,
}

impl CompiledScalar {
    /// Evaluates at a dense value vector (length must match the context the
    /// scalar was compiled from).
    pub fn eval(&self, values: &[f64], eta: f64) -> Complex64 {
        debug_assert_eq!(values.len(), self.n_symbols, "assignment length mismatch");
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let phi: f64 = t.phase.iter().map(|&(i, c)| c * values[i]).sum();
            acc += t.coeff * eta.powi(t.eta_pow) * Complex64::cis(phi);
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Serialization DTOs
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TermDto {
    re: String,
    im: String,
    sqrt2_pow: i64,
    eta_pow: i64,
    exponents: BTreeMap<String, i64>,
}

#[derive(Serialize, Deserialize)]
struct ScalarDto {
    symbols: Vec<String>,
    terms: Vec<TermDto>,
}

// ---------------------------------------------------------------------------
// Pretty printing
// ---------------------------------------------------------------------------

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_coefficient(c: &Coefficient) -> String {
    let base = if c.im.is_zero() {
        fmt_rational(&c.re)
    } else if c.re.is_zero() {
        if c.im.is_one() {
            "i".to_string()
        } else if c.im == rat(-1, 1) {
            "-i".to_string()
        } else if c.im.denom().is_one() {
            format!("{}i", c.im.numer())
        } else {
            format!("({})i", fmt_rational(&c.im))
        }
    } else {
        let im_mag = c.im.abs();
        let sign = if c.im.is_negative() { '-' } else { '+' };
        let im_part = if im_mag.is_one() {
            "i".to_string()
        } else {
            format!("{}i", fmt_rational(&im_mag))
        };
        format!("({} {} {})", fmt_rational(&c.re), sign, im_part)
    };
    match c.sqrt2_pow {
        0 => base,
        1 => match base.as_str() {
            "1" => "√2".to_string(),
            "-1" => "-√2".to_string(),
            _ => format!("{base}·√2"),
        },
        s => format!("{base}·(√2)^{s}"),
    }
}

fn fmt_eta(p: i64) -> String {
    match p {
        0 => String::new(),
        1 => "·η".to_string(),
        _ => format!("·η^{p}"),
    }
}

fn fmt_phase(ctx: &Arc<SymbolContext>, phase: &PhaseExponent) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (i, &c) in phase.coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let name = &ctx.names[i];
        parts.push(match c {
            1 => name.clone(),
            -1 => format!("-{name}"),
            _ => format!("{c}·{name}"),
        });
    }
    join_signed(&parts)
}

fn join_signed(parts: &[String]) -> String {
    let mut out = String::new();
    for (i, p) in parts.iter().enumerate() {
        if i == 0 {
            out.push_str(p);
        } else if let Some(rest) = p.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(p);
        }
    }
    out
}

/// Multiplies a coefficient rendering onto a trig function rendering,
/// absorbing unit coefficients.
fn fmt_product(coeff: &Coefficient, suffix: &str) -> String {
    let c = fmt_coefficient(coeff);
    match c.as_str() {
        "1" => suffix.to_string(),
        "-1" => format!("-{suffix}"),
        _ => format!("{c}·{suffix}"),
    }
}

impl fmt::Display for SymbolicScalar {
    /// Human-oriented trig rendering: pairs `e^{±i·v}` terms of equal
    /// √2-parity into `cos`/`sin` chunks; everything else stays exponential.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Group by (eta, parity): within each group map phase -> coefficient.
        let mut groups: BTreeMap<(i64, i64), BTreeMap<Vec<i64>, Coefficient>> = BTreeMap::new();
        for t in &self.terms {
            groups
                .entry((t.eta_pow, t.coeff.sqrt2_pow.rem_euclid(2)))
                .or_default()
                .insert(t.phase.coeffs.clone(), t.coeff.clone());
        }
        let mut chunks: Vec<String> = Vec::new();
        for ((eta_pow, _), phases) in &groups {
            let eta_str = fmt_eta(*eta_pow);
            let mut done: BTreeSet<Vec<i64>> = BTreeSet::new();
            for (v, p) in phases {
                if done.contains(v) {
                    continue;
                }
                let neg: Vec<i64> = v.iter().map(|c| -c).collect();
                let phase_fmt = fmt_phase(
                    &self.ctx,
                    &PhaseExponent {
                        coeffs: if v > &neg { v.clone() } else { neg.clone() },
                    },
                );
                if v.iter().all(|&c| c == 0) {
                    done.insert(v.clone());
                    let c = fmt_coefficient(p);
                    let chunk = if eta_str.is_empty() {
                        c
                    } else {
                        // Absorb unit coefficients: `η³`, not `1·η³`.
                        match c.as_str() {
                            "1" => eta_str.trim_start_matches('·').to_string(),
                            "-1" => format!("-{}", eta_str.trim_start_matches('·')),
                            _ => format!("{c}{eta_str}"),
                        }
                    };
                    chunks.push(chunk);
                    continue;
                }
                if let Some(q) = phases.get(&neg) {
                    // p·e^{iv} + q·e^{-iv} = (p+q)·cos(v) + i·(p-q)·sin(v),
                    // oriented so that v is the lexicographically positive
                    // representative.
                    done.insert(v.clone());
                    done.insert(neg.clone());
                    let (hi, lo) = if v > &neg { (p, q) } else { (q, p) };
                    let cos_c = hi.add_same_parity(lo);
                    let sin_c = hi.add_same_parity(&lo.neg()).mul(&Coefficient::i());
                    if !cos_c.is_zero() {
                        chunks.push(format!(
                            "{}{eta_str}",
                            fmt_product(&cos_c, &format!("cos({phase_fmt})"))
                        ));
                    }
                    if !sin_c.is_zero() {
                        chunks.push(format!(
                            "{}{eta_str}",
                            fmt_product(&sin_c, &format!("sin({phase_fmt})"))
                        ));
                    }
                } else {
                    done.insert(v.clone());
                    let exp_fmt = format!("e^{{i({})}}", fmt_phase(&self.ctx, &PhaseExponent {
                        coeffs: v.clone(),
                    }));
                    chunks.push(format!("{}{eta_str}", fmt_product(p, &exp_fmt)));
                }
            }
        }
        write!(f, "{}", join_signed(&chunks))
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx1() -> Arc<SymbolContext> {
        SymbolContext::new(["vartheta"]).unwrap()
    }

    fn ctx2() -> Arc<SymbolContext> {
        SymbolContext::new(["vartheta", "alpha"]).unwrap()
    }

    #[test]
    fn zero_is_empty_sum() {
        let ctx = ctx1();
        let z = SymbolicScalar::zero(&ctx);
        assert!(z.is_zero());
        assert_eq!(z.terms().len(), 0);
        assert_eq!(&z + &SymbolicScalar::one(&ctx), SymbolicScalar::one(&ctx));
    }

    #[test]
    fn duplicate_symbols_rejected() {
        let err = SymbolContext::new(["a", "b", "a"]).unwrap_err();
        assert_eq!(err, Error::DuplicateSymbol("a".to_string()));
    }

    #[test]
    fn omega_folds_into_coefficient_ring() {
        let ctx = ctx1();
        // e^{iπ/4} = (1+i)/√2 canonically: (1/2 + i/2)·√2.
        let w = SymbolicScalar::phase_pi(&ctx, 1, 4).unwrap();
        assert_eq!(w.terms().len(), 1);
        let c = w.terms()[0].coeff();
        assert_eq!(c.re(), &rat(1, 2));
        assert_eq!(c.im(), &rat(1, 2));
        assert_eq!(c.sqrt2_pow(), 1);
        // ω² = i, ω⁴ = −1, ω⁸ = 1.
        assert_eq!(&w * &w, SymbolicScalar::i(&ctx));
        let w4 = (&(&w * &w) * &(&w * &w)).clone();
        assert_eq!(w4, SymbolicScalar::rational(&ctx, -1, 1));
        assert_eq!(&w4 * &w4, SymbolicScalar::one(&ctx));
    }

    #[test]
    fn unsupported_phase_is_rejected() {
        let ctx = ctx1();
        let err = SymbolicScalar::phase_pi(&ctx, 1, 3).unwrap_err();
        assert_eq!(err, Error::UnsupportedPhase { num: 1, den: 3 });
        // π/2 and 3π/4 are fine.
        assert!(SymbolicScalar::phase_pi(&ctx, 1, 2).is_ok());
        assert!(SymbolicScalar::phase_pi(&ctx, 3, 4).is_ok());
    }

    #[test]
    fn addition_merges_and_cancels() {
        let ctx = ctx1();
        let vt = ctx.angle("vartheta").unwrap();
        let e = SymbolicScalar::exp_i_scaled(&vt, 2).unwrap();
        let sum = &e - &e;
        assert!(sum.is_zero());
        let twice = &e + &e;
        assert_eq!(twice.terms().len(), 1);
        assert_eq!(twice.terms()[0].coeff().re(), &rat(2, 1));
    }

    #[test]
    fn mixed_sqrt2_parities_coexist() {
        let ctx = ctx1();
        let one = SymbolicScalar::one(&ctx);
        let inv_sqrt2 = SymbolicScalar::sqrt2_pow(&ctx, -1);
        let mixed = &one + &inv_sqrt2;
        assert_eq!(mixed.terms().len(), 2);
        // (1 + 1/√2)·√2 = √2 + 1: same value class, two terms again.
        let scaled = &mixed * &SymbolicScalar::sqrt2_pow(&ctx, 1);
        assert_eq!(scaled.terms().len(), 2);
        let direct = &SymbolicScalar::one(&ctx) + &SymbolicScalar::sqrt2_pow(&ctx, 1);
        assert_eq!(scaled, direct);
    }

    #[test]
    fn sqrt2_normalizes_even_powers() {
        let ctx = ctx1();
        let four = &SymbolicScalar::sqrt2_pow(&ctx, 2) * &SymbolicScalar::sqrt2_pow(&ctx, 2);
        assert_eq!(four, SymbolicScalar::rational(&ctx, 4, 1));
        let half = SymbolicScalar::sqrt2_pow(&ctx, -2);
        assert_eq!(half, SymbolicScalar::rational(&ctx, 1, 2));
    }

    #[test]
    fn pythagorean_identity_is_canonical() {
        let ctx = ctx2();
        let a = ctx.angle("alpha").unwrap();
        let c = SymbolicScalar::cos(&a).unwrap();
        let s = SymbolicScalar::sin(&a).unwrap();
        let sum = &(&c * &c) + &(&s * &s);
        assert!(sum.is_one());
    }

    #[test]
    fn conjugation_is_involutive_and_multiplicative() {
        let ctx = ctx2();
        let vt = ctx.angle("vartheta").unwrap();
        let a = ctx.angle("alpha").unwrap();
        let x = &SymbolicScalar::exp_i_scaled(&vt, 2).unwrap().times_i()
            + &SymbolicScalar::sin(&a).unwrap().with_eta(3);
        let y = &SymbolicScalar::cos(&(&vt - &a)).unwrap() - &SymbolicScalar::i(&ctx);
        assert_eq!(x.conj().conj(), x);
        assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
    }

    #[test]
    fn eval_matches_trig() {
        let ctx = ctx1();
        let vt = ctx.angle("vartheta").unwrap();
        let e2 = SymbolicScalar::exp_i_scaled(&vt, 2).unwrap();
        let assign = AngleValues::new().set("vartheta", std::f64::consts::PI / 6.0);
        let v = e2.eval_numeric(&assign, 1.0).unwrap();
        assert!((v.re - 0.5).abs() < 1e-15);
        assert!((v.im - (3.0f64).sqrt() / 2.0).abs() < 1e-15);

        let eta3 = SymbolicScalar::eta(&ctx, 3);
        let v = eta3.eval_numeric(&AngleValues::new(), 2.0).unwrap();
        assert!((v.re - 8.0).abs() < 1e-15 && v.im == 0.0);
    }

    #[test]
    fn eval_reports_missing_symbol_and_bad_eta() {
        let ctx = ctx2();
        let a = ctx.angle("alpha").unwrap();
        let s = SymbolicScalar::sin(&a).unwrap();
        let err = s.eval_numeric(&AngleValues::new(), 1.0).unwrap_err();
        assert_eq!(err, Error::MissingAssignment("alpha".to_string()));
        let err = s
            .eval_numeric(&AngleValues::new().set("alpha", 0.3), 0.0)
            .unwrap_err();
        assert_eq!(err, Error::NonPositiveEta(0.0));
        // Symbols that cancel out need no assignment.
        let c = SymbolicScalar::one(&ctx);
        assert!(c.eval_numeric(&AngleValues::new(), 1.0).is_ok());
    }

    #[test]
    fn context_mismatch_is_reported() {
        let a = SymbolicScalar::one(&ctx1());
        let b = SymbolicScalar::one(&SymbolContext::new(["theta"]).unwrap());
        let err = a.try_add(&b).unwrap_err();
        assert!(matches!(err, Error::ContextMismatch { .. }));
        // Same names built independently are compatible.
        let c = SymbolicScalar::one(&SymbolContext::new(["vartheta"]).unwrap());
        assert!(a.try_add(&c).is_ok());
    }

    #[test]
    fn compile_agrees_with_eval() {
        let ctx = ctx2();
        let vt = ctx.angle("vartheta").unwrap();
        let a = ctx.angle("alpha").unwrap();
        let x = &SymbolicScalar::sin(&(&vt.scaled(4) - &a.scaled(2)))
            .unwrap()
            .with_eta(3)
            .times_i()
            + &SymbolicScalar::omega_pow(&ctx, 3);
        let compiled = x.compile();
        let values = [0.37, 1.21];
        let direct = x.eval_at(&values, 1.7);
        let fast = compiled.eval(&values, 1.7);
        assert!((direct - fast).norm() < 1e-14);
    }

    #[test]
    fn serialization_round_trips_exactly() {
        let ctx = ctx2();
        let vt = ctx.angle("vartheta").unwrap();
        let x = &SymbolicScalar::exp_i_scaled(&vt, -2)
            .unwrap()
            .times_rational(-3, 4)
            .with_eta(6)
            + &SymbolicScalar::phase_pi(&ctx, 1, 4).unwrap();
        let json = x.to_json();
        let back = SymbolicScalar::from_json(&json).unwrap();
        assert_eq!(x, back);
        // Serialized rationals are exact strings, not floats.
        assert!(json.contains("\"-3/4\""));
    }

    #[test]
    fn deserialization_canonicalizes_foreign_forms() {
        // sqrt2_pow 2 plus identical term must land in canonical merged form.
        let json = r#"{
            "symbols": ["vartheta"],
            "terms": [
                {"re": "1", "im": "0", "sqrt2_pow": 2, "eta_pow": 0, "exponents": {"vartheta": 1}},
                {"re": "3", "im": "0", "sqrt2_pow": 0, "eta_pow": 0, "exponents": {"vartheta": 1}}
            ]
        }"#;
        let x = SymbolicScalar::from_json(json).unwrap();
        assert_eq!(x.terms().len(), 1);
        assert_eq!(x.terms()[0].coeff().re(), &rat(5, 1));
    }

    #[test]
    fn term_order_is_deterministic() {
        let ctx = ctx2();
        let vt = ctx.angle("vartheta").unwrap();
        let a = ctx.angle("alpha").unwrap();
        let t1 = SymbolicScalar::exp_i(&vt).unwrap().with_eta(2);
        let t2 = SymbolicScalar::exp_i(&a).unwrap();
        let t3 = SymbolicScalar::one(&ctx);
        let x = &(&t1 + &t2) + &t3;
        let y = &(&t3 + &t1) + &t2;
        assert_eq!(x, y);
        let keys: Vec<i64> = x.terms().iter().map(|t| t.eta_pow()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn display_groups_into_trig() {
        let ctx = ctx1();
        let vt = ctx.angle("vartheta").unwrap();
        let c = SymbolicScalar::cos(&vt.scaled(2)).unwrap().with_eta(3);
        let rendered = format!("{c}");
        assert!(rendered.contains("cos(2·vartheta)"), "got {rendered}");
        let s = SymbolicScalar::sin(&vt.scaled(2)).unwrap();
        let rendered = format!("{s}");
        assert!(rendered.contains("sin(2·vartheta)"), "got {rendered}");
        // A lone exponential stays exponential.
        let e = SymbolicScalar::exp_i_scaled(&vt, 2).unwrap();
        assert!(format!("{e}").contains("e^{i(2·vartheta)}"));
    }

    #[test]
    fn eta_grades_and_filtering() {
        let ctx = ctx1();
        let vt = ctx.angle("vartheta").unwrap();
        let x = &SymbolicScalar::eta(&ctx, 3) + &SymbolicScalar::exp_i(&vt).unwrap().with_eta(1);
        assert_eq!(x.eta_grades(), vec![1, 3]);
        let only3 = x.filter_terms(|t| t.eta_pow() == 3);
        assert_eq!(only3.eta_grades(), vec![3]);
    }
}
