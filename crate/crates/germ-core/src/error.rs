//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the exact-arithmetic kernel.
///
/// Variants split into three groups: structural misuse (incompatible
/// contexts, malformed input), genuine mathematical obstructions
/// (non-unit where a unit is required, obstructed descent, repeated
/// residue roots), and precision exhaustion (a computation that would
/// need more known coefficients than the inputs carry).
#[derive(Debug, Error)]
pub enum Error {
    /// Two operands live in different field contexts and no embedding
    /// between the contexts is known.
    #[error("incompatible field contexts: {0}")]
    IncompatibleFields(String),

    /// Division by the zero element of a field.
    #[error("division by zero in field arithmetic")]
    DivisionByZero,

    /// A series or matrix that must be invertible has vanishing leading
    /// data at the working precision.
    #[error("non-unit operand: {0}")]
    NonUnit(String),

    /// Exact division by a power of the second variable failed because a
    /// term with a smaller exponent is present.
    #[error("operand is not divisible by y^{0}")]
    YDivisibility(i64),

    /// The requested coefficient or operation lies beyond the precision
    /// carried by the operands.
    #[error("insufficient precision: {0}")]
    Precision(String),

    /// The germ does not belong to the parabolic class required by the
    /// requested operation.
    #[error("germ is outside the admissible parabolic class: {0}")]
    NotInClass(String),

    /// A factorization step produced a cofactor whose evaluation at the
    /// origin vanishes, so the peeled factor cannot be normalized.
    #[error("factorization cofactor {index} is not a unit at the origin")]
    NonUnitCofactor { index: usize },

    /// The residue polynomial of a factorization step has a repeated
    /// root, so simple-root lifting does not apply.
    #[error("residue polynomial has a repeated root; lifting requires simple roots")]
    RepeatedResidueRoot,

    /// Blow-up normalization failed to separate branches within the
    /// guaranteed number of steps.
    #[error("branch separation exceeded the step budget of {budget}")]
    SeparationExceeded { budget: i64 },

    /// An operation that requires vanishing residue was given a
    /// connection with nonzero residue.
    #[error("connection residue is nonzero: {0}")]
    ResidueNotZero(String),

    /// Cartier descent is obstructed: a degree divisible by p carries a
    /// nonzero forcing term so no flat gauge exists.
    #[error("descent obstruction at degree {degree}")]
    CartierObstruction { degree: i64 },

    /// Coefficients expected to be p-th powers of descended data are not.
    #[error("series does not descend through Frobenius: {0}")]
    NotDescended(String),

    /// Division by the pole of the connection left a fractional part.
    #[error("polar division is inexact: {0}")]
    InexactPolarDivision(String),

    /// A line-bundle degree fell in the special range where the
    /// dimension formula does not apply.
    #[error("summand {index} has degree in the special range; dimension formula does not apply")]
    SpecialRange { index: usize },

    /// Malformed or out-of-range input (CLI payloads, bad parameters).
    #[error("bad input: {0}")]
    BadInput(String),
}
