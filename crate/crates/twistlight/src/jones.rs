//! 2×2 Jones-operator algebra over the exact scalar ring.
//!
//! The building blocks are the rotation `S(a)`, the reflection-type block
//! `K(x)`, the Pauli matrices, the polarization matrix `M`, and the
//! birefringence generator `N` whose twisted form
//!
//! ```text
//!     N(ϑ) = S(ϑ)·N·S(−ϑ) = η·cosφ·J − i·η·sinφ·K(ϑ)
//! ```
//!
//! yields the half-wave plate `H(ϑ)` at φ = π/2 and the quarter-type plate
//! `Q(ϑ)` at φ = π/4.  Gadgets (plate sequences) compose into single
//! operators; every identity in this module holds in canonical form, not
//! merely numerically.
//!
//! Sign ambiguities that cannot be fixed from first principles are carried
//! explicitly by [`Convention`]: the twist direction, an optional `−i`
//! prefactor on the isotropic `J` part, and which circular ket is `(1, i)/√2`.
//! The default convention is `(+1, 1, L=(1,i)/√2)`; the audit machinery in
//! [`crate::oracle`] sweeps all eight.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num::complex::Complex64;

use crate::error::{Error, Result};
use crate::symphase::{
    ctx_mismatch, same_ctx, LinearAngle, SymbolContext, SymbolicScalar,
};

/// Smallest distance from the 1/sinθ poles at 0 and π accepted by the
/// numeric derivation of `N`.
pub const MIN_THETA_MARGIN: f64 = 0.05;

// ---------------------------------------------------------------------------
// Conventions
// ---------------------------------------------------------------------------

/// Direction of the twist conjugation: `S(+ϑ)·op·S(−ϑ)` or the reverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TwistSign {
    /// Conjugate by `S(+ϑ) … S(−ϑ)`.
    Plus,
    /// Conjugate by `S(−ϑ) … S(+ϑ)`.
    Minus,
}

impl TwistSign {
    fn factor(self) -> i64 {
        match self {
            TwistSign::Plus => 1,
            TwistSign::Minus => -1,
        }
    }
}

/// Prefactor on the isotropic `J` part of the generator `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum JPrefactor {
    /// Leave the `J` part as derived.
    One,
    /// Multiply the `J` part by `−i`.
    NegI,
}

/// Which circular ket is materialized as `(1, i)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Handedness {
    /// `|L⟩ = (1, i)/√2`, `|R⟩ = (1, −i)/√2`.
    LeftIsPlusI,
    /// `|L⟩ = (1, −i)/√2`, `|R⟩ = (1, i)/√2`.
    LeftIsMinusI,
}

/// One of the eight sign/handedness conventions the engine can run under.
///
/// The algebra itself is convention-free; the convention only fixes the
/// choices that published equations leave implicit.  Audits sweep all eight
/// to classify each published equation as exact, convention-dependent, or
/// structurally mismatched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Convention {
    /// Twist conjugation direction.
    pub twist_sign: TwistSign,
    /// Prefactor on the isotropic `J` part.
    pub j_prefactor: JPrefactor,
    /// Materialization of the circular kets.
    pub handedness: Handedness,
}

impl Convention {
    /// The default convention `(+1, 1, L=(1,i)/√2)`.
    pub const DEFAULT: Convention = Convention {
        twist_sign: TwistSign::Plus,
        j_prefactor: JPrefactor::One,
        handedness: Handedness::LeftIsPlusI,
    };

    /// All eight conventions, default first, in a fixed deterministic order.
    pub fn all() -> [Convention; 8] {
        let mut out = [Convention::DEFAULT; 8];
        let mut i = 0;
        for twist_sign in [TwistSign::Plus, TwistSign::Minus] {
            for j_prefactor in [JPrefactor::One, JPrefactor::NegI] {
                for handedness in [Handedness::LeftIsPlusI, Handedness::LeftIsMinusI] {
                    out[i] = Convention {
                        twist_sign,
                        j_prefactor,
                        handedness,
                    };
                    i += 1;
                }
            }
        }
        out
    }

    /// Compact label, e.g. `+1L` for the default: twist sign, `J` prefactor
    /// (`1` or `i` for `−i`), and which ket is `(1, i)/√2`.
    pub fn label(&self) -> String {
        let t = match self.twist_sign {
            TwistSign::Plus => '+',
            TwistSign::Minus => '-',
        };
        let j = match self.j_prefactor {
            JPrefactor::One => '1',
            JPrefactor::NegI => 'i',
        };
        let h = match self.handedness {
            Handedness::LeftIsPlusI => 'L',
            Handedness::LeftIsMinusI => 'R',
        };
        format!("{t}{j}{h}")
    }
}

impl Default for Convention {
    fn default() -> Self {
        Convention::DEFAULT
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "default" {
            return Ok(Convention::DEFAULT);
        }
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != 3 {
            return Err(Error::UnknownConvention(s.to_string()));
        }
        let twist_sign = match chars[0] {
            '+' => TwistSign::Plus,
            '-' => TwistSign::Minus,
            _ => return Err(Error::UnknownConvention(s.to_string())),
        };
        let j_prefactor = match chars[1] {
            '1' => JPrefactor::One,
            'i' => JPrefactor::NegI,
            _ => return Err(Error::UnknownConvention(s.to_string())),
        };
        let handedness = match chars[2] {
            'L' => Handedness::LeftIsPlusI,
            'R' => Handedness::LeftIsMinusI,
            _ => return Err(Error::UnknownConvention(s.to_string())),
        };
        Ok(Convention {
            twist_sign,
            j_prefactor,
            handedness,
        })
    }
}

// ---------------------------------------------------------------------------
// Matrix2
// ---------------------------------------------------------------------------

/// 2×2 matrix of exact scalars over one symbol context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix2 {
    ctx: Arc<SymbolContext>,
    e: [[SymbolicScalar; 2]; 2],
}

impl Matrix2 {
    /// Builds a matrix from explicit entries, which must share one context.
    pub fn from_entries(e: [[SymbolicScalar; 2]; 2]) -> Result<Self> {
        let ctx = Arc::clone(e[0][0].context());
        for row in &e {
            for entry in row {
                if !same_ctx(&ctx, entry.context()) {
                    return Err(ctx_mismatch(&ctx, entry.context()));
                }
            }
        }
        Ok(Matrix2 { ctx, e })
    }

    fn new_unchecked(ctx: &Arc<SymbolContext>, e: [[SymbolicScalar; 2]; 2]) -> Self {
        Matrix2 {
            ctx: Arc::clone(ctx),
            e,
        }
    }

    /// The zero matrix.
    pub fn zero(ctx: &Arc<SymbolContext>) -> Self {
        let z = || SymbolicScalar::zero(ctx);
        Matrix2::new_unchecked(ctx, [[z(), z()], [z(), z()]])
    }

    /// The identity matrix.
    pub fn identity(ctx: &Arc<SymbolContext>) -> Self {
        let z = || SymbolicScalar::zero(ctx);
        let o = || SymbolicScalar::one(ctx);
        Matrix2::new_unchecked(ctx, [[o(), z()], [z(), o()]])
    }

    /// `J = [[0, −1], [1, 0]]`, the isotropic quarter-turn.
    pub fn j_matrix(ctx: &Arc<SymbolContext>) -> Self {
        let z = || SymbolicScalar::zero(ctx);
        Matrix2::new_unchecked(
            ctx,
            [
                [z(), SymbolicScalar::rational(ctx, -1, 1)],
                [SymbolicScalar::one(ctx), z()],
            ],
        )
    }

    /// Pauli `σ_x`.
    pub fn sigma_x(ctx: &Arc<SymbolContext>) -> Self {
        let z = || SymbolicScalar::zero(ctx);
        let o = || SymbolicScalar::one(ctx);
        Matrix2::new_unchecked(ctx, [[z(), o()], [o(), z()]])
    }

    /// Pauli `σ_y`.
    pub fn sigma_y(ctx: &Arc<SymbolContext>) -> Self {
        let z = || SymbolicScalar::zero(ctx);
        Matrix2::new_unchecked(
            ctx,
            [
                [z(), SymbolicScalar::i(ctx).neg_owned()],
                [SymbolicScalar::i(ctx), z()],
            ],
        )
    }

    /// Pauli `σ_z`.
    pub fn sigma_z(ctx: &Arc<SymbolContext>) -> Self {
        let z = || SymbolicScalar::zero(ctx);
        Matrix2::new_unchecked(
            ctx,
            [
                [SymbolicScalar::one(ctx), z()],
                [z(), SymbolicScalar::rational(ctx, -1, 1)],
            ],
        )
    }

    /// The owning context.
    pub fn context(&self) -> &Arc<SymbolContext> {
        &self.ctx
    }

    /// Entry at (row, col), 0-indexed.
    pub fn entry(&self, row: usize, col: usize) -> &SymbolicScalar {
        &self.e[row][col]
    }

    /// All four entries in row-major order.
    pub fn components(&self) -> [&SymbolicScalar; 4] {
        [&self.e[0][0], &self.e[0][1], &self.e[1][0], &self.e[1][1]]
    }

    /// Matrix sum.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if !same_ctx(&self.ctx, &other.ctx) {
            return Err(ctx_mismatch(&self.ctx, &other.ctx));
        }
        Ok(Matrix2::new_unchecked(
            &self.ctx,
            [
                [
                    self.e[0][0].try_add(&other.e[0][0])?,
                    self.e[0][1].try_add(&other.e[0][1])?,
                ],
                [
                    self.e[1][0].try_add(&other.e[1][0])?,
                    self.e[1][1].try_add(&other.e[1][1])?,
                ],
            ],
        ))
    }

    /// Matrix product `self · other`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if !same_ctx(&self.ctx, &other.ctx) {
            return Err(ctx_mismatch(&self.ctx, &other.ctx));
        }
        let mut rows: Vec<[SymbolicScalar; 2]> = Vec::with_capacity(2);
        for r in 0..2 {
            let mut row: Vec<SymbolicScalar> = Vec::with_capacity(2);
            for c in 0..2 {
                let a = self.e[r][0].try_mul(&other.e[0][c])?;
                let b = self.e[r][1].try_mul(&other.e[1][c])?;
                row.push(a.try_add(&b)?);
            }
            let [x, y]: [SymbolicScalar; 2] = row.try_into().expect("two columns");
            rows.push([x, y]);
        }
        let [r0, r1]: [[SymbolicScalar; 2]; 2] = rows.try_into().expect("two rows");
        Ok(Matrix2::new_unchecked(&self.ctx, [r0, r1]))
    }

    /// Additive inverse.
    pub fn neg_owned(&self) -> Self {
        self.map(|s| s.neg_owned())
    }

    /// Multiplies every entry by a scalar (same context).
    pub fn times_scalar(&self, s: &SymbolicScalar) -> Self {
        assert!(
            same_ctx(&self.ctx, s.context()),
            "matrix-scalar product across different symbol contexts"
        );
        self.map(|entry| entry.try_mul(s).expect("context checked above"))
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Matrix2::new_unchecked(
            &self.ctx,
            [
                [self.e[0][0].conj(), self.e[1][0].conj()],
                [self.e[0][1].conj(), self.e[1][1].conj()],
            ],
        )
    }

    /// Determinant.
    pub fn det(&self) -> SymbolicScalar {
        let ad = self.e[0][0].try_mul(&self.e[1][1]).expect("same context");
        let bc = self.e[0][1].try_mul(&self.e[1][0]).expect("same context");
        ad.try_add(&bc.neg_owned()).expect("same context")
    }

    /// Trace.
    pub fn trace(&self) -> SymbolicScalar {
        self.e[0][0].try_add(&self.e[1][1]).expect("same context")
    }

    /// True when all entries are canonical zero.
    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|s| s.is_zero())
    }

    /// Numeric value at a dense assignment vector.
    pub fn eval_at(&self, values: &[f64], eta: f64) -> [[Complex64; 2]; 2] {
        [
            [
                self.e[0][0].eval_at(values, eta),
                self.e[0][1].eval_at(values, eta),
            ],
            [
                self.e[1][0].eval_at(values, eta),
                self.e[1][1].eval_at(values, eta),
            ],
        ]
    }

    fn map<F: Fn(&SymbolicScalar) -> SymbolicScalar>(&self, f: F) -> Self {
        Matrix2::new_unchecked(
            &self.ctx,
            [
                [f(&self.e[0][0]), f(&self.e[0][1])],
                [f(&self.e[1][0]), f(&self.e[1][1])],
            ],
        )
    }
}

impl std::ops::Add for &Matrix2 {
    type Output = Matrix2;
    fn add(self, rhs: &Matrix2) -> Matrix2 {
        self.try_add(rhs)
            .expect("matrix addition across different symbol contexts")
    }
}

impl std::ops::Sub for &Matrix2 {
    type Output = Matrix2;
    fn sub(self, rhs: &Matrix2) -> Matrix2 {
        self.try_add(&rhs.neg_owned())
            .expect("matrix subtraction across different symbol contexts")
    }
}

impl std::ops::Mul for &Matrix2 {
    type Output = Matrix2;
    fn mul(self, rhs: &Matrix2) -> Matrix2 {
        self.try_mul(rhs)
            .expect("matrix multiplication across different symbol contexts")
    }
}

impl fmt::Display for Matrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "⎡ {} , {} ⎤", self.e[0][0], self.e[0][1])?;
        write!(f, "⎣ {} , {} ⎦", self.e[1][0], self.e[1][1])
    }
}

// ---------------------------------------------------------------------------
// Constructors from the optics
// ---------------------------------------------------------------------------

/// Rotation `S(a) = [[cos a, −sin a], [sin a, cos a]]`.
pub fn rotation_s(angle: &LinearAngle) -> Result<Matrix2> {
    let ctx = angle.context();
    let c = SymbolicScalar::cos(angle)?;
    let s = SymbolicScalar::sin(angle)?;
    Ok(Matrix2::new_unchecked(
        ctx,
        [[c.clone(), s.neg_owned()], [s, c]],
    ))
}

/// Reflection-type block `K(x) = [[−sin 2x, cos 2x], [cos 2x, sin 2x]]`.
pub fn reflection_k(x: &LinearAngle) -> Result<Matrix2> {
    reflection_k_doubled(&x.scaled(2))
}

/// `K` parameterized by its doubled argument: all entries of `K(x)` involve
/// only `2x`, so this variant admits arguments like `2x + b` that correspond
/// to half-integer `x` offsets (needed for identities such as
/// `S(b)·K(x) = K(x + b/2)`).
pub fn reflection_k_doubled(two_x: &LinearAngle) -> Result<Matrix2> {
    let ctx = two_x.context();
    let c = SymbolicScalar::cos(two_x)?;
    let s = SymbolicScalar::sin(two_x)?;
    Ok(Matrix2::new_unchecked(
        ctx,
        [[s.neg_owned(), c.clone()], [c, s]],
    ))
}

/// Polarization matrix `M = ½·[[cosθ, sinθ·e^{iφ}], [sinθ·e^{−iφ}, −cosθ]]`.
pub fn polarization_m(theta: &LinearAngle, phi: &LinearAngle) -> Result<Matrix2> {
    let ctx = theta.context();
    if !same_ctx(ctx, phi.context()) {
        return Err(ctx_mismatch(ctx, phi.context()));
    }
    let half = |s: SymbolicScalar| s.times_rational(1, 2);
    let cos_t = SymbolicScalar::cos(theta)?;
    let sin_t = SymbolicScalar::sin(theta)?;
    let e_plus = SymbolicScalar::exp_i(phi)?;
    let e_minus = SymbolicScalar::exp_i_scaled(phi, -1)?;
    Ok(Matrix2::new_unchecked(
        ctx,
        [
            [half(cos_t.clone()), half(sin_t.try_mul(&e_plus)?)],
            [half(sin_t.try_mul(&e_minus)?), half(cos_t.neg_owned())],
        ],
    ))
}

/// Conjugate-partner polarization matrix
/// `M̃ = ½·[[−cosθ, sinθ·e^{iφ}], [sinθ·e^{−iφ}, cosθ]]`.
pub fn polarization_m_tilde(theta: &LinearAngle, phi: &LinearAngle) -> Result<Matrix2> {
    let m = polarization_m(theta, phi)?;
    let ctx = theta.context();
    // Flip the diagonal only.
    Ok(Matrix2::new_unchecked(
        ctx,
        [
            [m.e[0][0].neg_owned(), m.e[0][1].clone()],
            [m.e[1][0].clone(), m.e[1][1].neg_owned()],
        ],
    ))
}

/// Untwisted birefringence generator
/// `N = η·cosφ·(jp·J) − i·η·sinφ·σ_x`, which for the default `jp = 1`
/// equals `η·[[0, −e^{iφ}], [e^{−iφ}, 0]]`.
pub fn build_n(phi: &LinearAngle, conv: Convention) -> Result<Matrix2> {
    let ctx = phi.context();
    let eta = SymbolicScalar::eta(ctx, 1);
    let cos_phi = SymbolicScalar::cos(phi)?;
    let sin_phi = SymbolicScalar::sin(phi)?;
    let mut j_scale = eta.try_mul(&cos_phi)?;
    if conv.j_prefactor == JPrefactor::NegI {
        j_scale = j_scale.times_i().neg_owned();
    }
    let k_scale = eta.try_mul(&sin_phi)?.times_i().neg_owned();
    let j_part = Matrix2::j_matrix(ctx).times_scalar(&j_scale);
    let k_part = Matrix2::sigma_x(ctx).times_scalar(&k_scale);
    j_part.try_add(&k_part)
}

/// Conjugation by rotations: `S(σ·a)·op·S(−σ·a)` with σ from the convention.
pub fn twist(op: &Matrix2, angle: &LinearAngle, conv: Convention) -> Result<Matrix2> {
    let signed = angle.scaled(conv.twist_sign.factor());
    let left = rotation_s(&signed)?;
    let right = rotation_s(&signed.scaled(-1))?;
    left.try_mul(op)?.try_mul(&right)
}

/// Twisted half-wave plate `H(ϑ) = −i·η·K(ϑ)` (φ = π/2 generator).
pub fn plate_h(orientation: &LinearAngle, conv: Convention) -> Result<Matrix2> {
    let phi = LinearAngle::pi_fraction(orientation.context(), 1, 2);
    twist(&build_n(&phi, conv)?, orientation, conv)
}

/// Twisted quarter-type plate `Q(ϑ) = (η/√2)·(jp·J − i·K(ϑ))` (φ = π/4
/// generator).
pub fn plate_q(orientation: &LinearAngle, conv: Convention) -> Result<Matrix2> {
    let phi = LinearAngle::pi_fraction(orientation.context(), 1, 4);
    twist(&build_n(&phi, conv)?, orientation, conv)
}

// ---------------------------------------------------------------------------
// Gadgets
// ---------------------------------------------------------------------------

/// Kind of one plate in a gadget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlateKind {
    /// Half-wave plate (φ = π/2 generator).
    Half,
    /// Quarter-type plate (φ = π/4 generator).
    Quarter,
    /// Generator with an explicit retardance argument φ.
    Retarder(LinearAngle),
}

/// One plate: a kind plus an orientation angle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlateSpec {
    /// Which plate.
    pub kind: PlateKind,
    /// Orientation (twist) angle.
    pub orientation: LinearAngle,
}

impl PlateSpec {
    /// Half-wave plate at an orientation.
    pub fn half(orientation: LinearAngle) -> Self {
        PlateSpec {
            kind: PlateKind::Half,
            orientation,
        }
    }

    /// Quarter-type plate at an orientation.
    pub fn quarter(orientation: LinearAngle) -> Self {
        PlateSpec {
            kind: PlateKind::Quarter,
            orientation,
        }
    }

    /// Generic retarder with retardance argument `phi` at an orientation.
    pub fn retarder(phi: LinearAngle, orientation: LinearAngle) -> Self {
        PlateSpec {
            kind: PlateKind::Retarder(phi),
            orientation,
        }
    }

    /// Materializes the plate operator under a convention.
    pub fn materialize(&self, conv: Convention) -> Result<Matrix2> {
        match &self.kind {
            PlateKind::Half => plate_h(&self.orientation, conv),
            PlateKind::Quarter => plate_q(&self.orientation, conv),
            PlateKind::Retarder(phi) => twist(&build_n(phi, conv)?, &self.orientation, conv),
        }
    }
}

impl fmt::Display for PlateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            PlateKind::Half => write!(f, "H({})", self.orientation),
            PlateKind::Quarter => write!(f, "Q({})", self.orientation),
            PlateKind::Retarder(phi) => write!(f, "N[φ={}]({})", phi, self.orientation),
        }
    }
}

/// A nonempty sequence of plates, written in operator order: the product is
/// taken left-to-right as listed, and since states are applied on the right,
/// light traverses the *last* listed plate first.  This mirrors how cascades
/// are written as formulas (`H·H(ϑ)` is `[H(0), H(ϑ)]`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetSpec {
    plates: Vec<PlateSpec>,
}

impl GadgetSpec {
    /// Builds a gadget; rejects the empty sequence.
    pub fn new(plates: Vec<PlateSpec>) -> Result<Self> {
        if plates.is_empty() {
            return Err(Error::EmptyGadget);
        }
        Ok(GadgetSpec { plates })
    }

    /// The plate list in operator order.
    pub fn plates(&self) -> &[PlateSpec] {
        &self.plates
    }

    /// The sandwich `Q(q_orient)·H(h_orient)·Q(q_orient)`.
    pub fn qhq(q_orient: &LinearAngle, h_orient: &LinearAngle) -> Self {
        GadgetSpec {
            plates: vec![
                PlateSpec::quarter(q_orient.clone()),
                PlateSpec::half(h_orient.clone()),
                PlateSpec::quarter(q_orient.clone()),
            ],
        }
    }

    /// The variable circular retarder `H(0)·H(angle)` (two half-wave
    /// plates, the twisted one traversed first).
    pub fn vcr(angle: &LinearAngle) -> Self {
        GadgetSpec {
            plates: vec![
                PlateSpec::half(LinearAngle::zero(angle.context())),
                PlateSpec::half(angle.clone()),
            ],
        }
    }

    /// Number of plates.
    pub fn len(&self) -> usize {
        self.plates.len()
    }

    /// Always false: gadgets are nonempty by construction.
    pub fn is_empty(&self) -> bool {
        self.plates.is_empty()
    }
}

impl fmt::Display for GadgetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.plates.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join("·"))
    }
}

/// Composes a gadget into a single operator: the left-to-right matrix product
/// of the listed plates (so the last listed plate acts on the input state
/// first).  Every term of the result carries η-grade equal to the plate
/// count.
pub fn compose(spec: &GadgetSpec, conv: Convention) -> Result<Matrix2> {
    let mut iter = spec.plates.iter();
    let first = iter.next().ok_or(Error::EmptyGadget)?;
    let mut acc = first.materialize(conv)?;
    for plate in iter {
        acc = acc.try_mul(&plate.materialize(conv)?)?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Numeric derivation of N
// ---------------------------------------------------------------------------

/// Result of the finite-difference derivation of the generator `N`.
#[derive(Debug, Clone)]
pub struct DerivedN {
    /// The numeric 2×2 generator `dM/dz · M⁻¹` at the sample point.
    pub entries: [[Complex64; 2]; 2],
    /// Estimated |η| from the off-diagonal magnitudes.
    pub eta_magnitude: f64,
    /// Signed η estimate from `N₂₁·e^{iφ₀}` (the derivation produces
    /// −1/sinθ under this module's ordering convention; the sign is reported,
    /// not hidden).
    pub eta_signed: f64,
}

/// Derives `N = dM/dz · M⁻¹` numerically at `(θ₀, φ₀)` with `z = cosθ`,
/// using central differences of step `h` (default 1e−6 is a good choice).
///
/// The magnitude of η follows `1/sinθ`; points within
/// [`MIN_THETA_MARGIN`] of the poles at 0 and π are rejected.
pub fn derive_n_numeric(theta0: f64, phi0: f64, h: f64) -> Result<DerivedN> {
    if !(theta0 > MIN_THETA_MARGIN && theta0 < std::f64::consts::PI - MIN_THETA_MARGIN) {
        return Err(Error::ThetaSingular(theta0));
    }
    assert!(h > 0.0 && h < 1e-2, "finite-difference step out of range");
    let z0 = theta0.cos();
    let m_at = |z: f64| -> [[Complex64; 2]; 2] {
        let theta = z.clamp(-1.0, 1.0).acos();
        let (st, ct) = theta.sin_cos();
        let e_plus = Complex64::cis(phi0);
        let e_minus = Complex64::cis(-phi0);
        [
            [
                Complex64::new(0.5 * ct, 0.0),
                0.5 * st * e_plus,
            ],
            [
                0.5 * st * e_minus,
                Complex64::new(-0.5 * ct, 0.0),
            ],
        ]
    };
    let m_plus = m_at(z0 + h);
    let m_minus = m_at(z0 - h);
    let dm = [
        [
            (m_plus[0][0] - m_minus[0][0]) / (2.0 * h),
            (m_plus[0][1] - m_minus[0][1]) / (2.0 * h),
        ],
        [
            (m_plus[1][0] - m_minus[1][0]) / (2.0 * h),
            (m_plus[1][1] - m_minus[1][1]) / (2.0 * h),
        ],
    ];
    let m0 = m_at(z0);
    let det = m0[0][0] * m0[1][1] - m0[0][1] * m0[1][0];
    let inv = [
        [m0[1][1] / det, -m0[0][1] / det],
        [-m0[1][0] / det, m0[0][0] / det],
    ];
    let n = mat_mul_numeric(&dm, &inv);
    let eta_magnitude = 0.5 * (n[0][1].norm() + n[1][0].norm());
    let eta_signed = (n[1][0] * Complex64::cis(phi0)).re;
    Ok(DerivedN {
        entries: n,
        eta_magnitude,
        eta_signed,
    })
}

pub(crate) fn mat_mul_numeric(
    a: &[[Complex64; 2]; 2],
    b: &[[Complex64; 2]; 2],
) -> [[Complex64; 2]; 2] {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

// ---------------------------------------------------------------------------
