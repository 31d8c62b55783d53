//! Error type shared by all modules.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building or evaluating expressions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Two expressions were combined that were declared over different
    /// symbol contexts.
    #[error("symbol context mismatch: [{left}] vs [{right}]")]
    ContextMismatch {
        /// Comma-joined symbol names of the left operand's context.
        left: String,
        /// Comma-joined symbol names of the right operand's context.
        right: String,
    },

    /// A constant phase was requested that is not a multiple of π/4.
    #[error("unsupported constant phase {num}·π/{den}: denominator must divide 4")]
    UnsupportedPhase {
        /// Reduced numerator of the π-fraction.
        num: i64,
        /// Reduced denominator of the π-fraction.
        den: i64,
    },

    /// A symbol name was declared twice in one context.
    #[error("duplicate angle symbol `{0}`")]
    DuplicateSymbol(String),

    /// A symbol name is not part of the context it was looked up in.
    #[error("unknown angle symbol `{0}`")]
    UnknownSymbol(String),

    /// Numeric evaluation was asked for without a value for a symbol that
    /// actually occurs in the expression.
    #[error("no numeric assignment for angle symbol `{0}`")]
    MissingAssignment(String),

    /// The gain parameter must be strictly positive for numeric evaluation.
    #[error("eta must be strictly positive, got {0}")]
    NonPositiveEta(f64),

    /// A gadget description contained no plates.
    #[error("gadget must contain at least one plate")]
    EmptyGadget,

    /// An array was requested with zero elements.
    #[error("array must contain at least one element")]
    EmptyArray,

    /// The finite-difference derivation of `N` was requested too close to a
    /// pole of 1/sin(theta).
    #[error("theta = {0} is too close to the propagation singularity at 0 or pi")]
    ThetaSingular(f64),

    /// The Pancharatnam projection is defined for unit-norm inputs only.
    #[error("state is not normalized: <s|s> != 1 in canonical form")]
    NotNormalized,

    /// A reduced density matrix cannot be formed from the zero state.
    #[error("state has zero norm")]
    ZeroNorm,

    /// The q-plate label comparison accepts only the three reference inputs.
    #[error("q-plate comparison accepts |L>, |R>, or |h> inputs, got `{0}`")]
    UnsupportedQPlateInput(String),

    /// An array factor needs at least one element phase.
    #[error("phase list must be nonempty")]
    EmptyPhases,

    /// Element spacing must be a positive fraction of the wavelength.
    #[error("element spacing must be positive, got {0}")]
    BadSpacing(f64),

    /// A serialized scalar could not be parsed back.
    #[error("malformed serialized scalar: {0}")]
    MalformedSerialization(String),

    /// A convention label could not be parsed.
    #[error("unknown convention `{0}`: expected `default` or a label like `+1L`, `-iR`")]
    UnknownConvention(String),

    /// A ket name could not be parsed.
    #[error("unknown ket `{0}`: expected one of h, v, L, R")]
    UnknownKet(String),

    /// A numeric range (grid) was inconsistent.
    #[error("invalid range: {0}")]
    InvalidRange(String),
}
