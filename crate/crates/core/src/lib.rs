//! Exact derivation of genus-indexed map-count generating functions for
//! regular maps of even valence, driven by the discrete string (Freud)
//! equation satisfied by orthogonal-polynomial recurrence coefficients.
//!
//! The pipeline, bottom to top:
//!
//! - [`exactnum`] — arbitrary-precision rationals, the radical field
//!   ℚ(θ)/(θ^m − k), and Laurent polynomials in the formal scaling symbols
//!   `A = N^{1/ν}` and `B = r^{1/ν}`.
//! - [`series`] — truncated Laurent series on the exponent grid (1/ν)·ℤ in
//!   the asymptotic variable, and dense power series in a coupling variable.
//! - [`freud`] — symbolic construction of the valence-2ν Freud equation and
//!   the order-by-order solve of its slow-orbit asymptotic expansion.
//! - [`stringeq`] — the planar string equation: Newton–Puiseux solution in
//!   the asymptotic gauge, power-series solution in the coupling, and the
//!   quartic closed form.
//! - [`matching`] — equate the two expansions of the recurrence coefficients,
//!   solve the triangular system for the numerator polynomial of each genus,
//!   and run the structural cross-checks (partial fractions, recursion for
//!   top coefficients, real/interlaced roots of the reduced numerators).
//! - [`genfun`] — generating-function expressions (rational in `z₀` plus
//!   logarithms) and the exact map-count tables obtained by composing them
//!   with the coupling-series solution of the string equation.
//! - [`orbitnum`] — high-precision numeric validation: true recurrence
//!   coefficients via moments and Hankel determinants, rescaling identities,
//!   Freud residuals, and convergence-rate fits for the truncated expansions.
//! - [`golden`] — embedded exact reference data (closed forms and count
//!   tables) used by the verification suite.
//! - [`verify`] — named check registry shared by the CLI `verify` command
//!   and the integration tests.

pub mod exactnum;
pub mod freud;
pub mod genfun;
pub mod golden;
pub mod matching;
pub mod orbitnum;
pub(crate) mod polyq;
pub mod series;
pub mod stringeq;
pub mod verify;

use thiserror::Error as ThisError;

/// Crate-wide error type.
///
/// Variants are grouped by the layer that raises them; the CLI maps
/// [`Error::OrderTooSmall`] and [`Error::PrecisionShortfall`] to its
/// "insufficient precision/order" exit code and everything else to a generic
/// failure.
#[derive(Debug, ThisError)]
pub enum Error {
    // --- exact arithmetic ---------------------------------------------------
    /// Two operands belong to different radical fields.
    #[error("radical field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    /// Division by an exact zero.
    #[error("division by zero")]
    DivisionByZero,
    /// The element has no inverse modulo θ^m − k (zero divisor).
    #[error("element is not invertible in its radical field")]
    NotInvertible,
    /// A parameter polynomial was required to be a single invertible monomial.
    #[error("parameter polynomial is not an invertible monomial ({0})")]
    NotMonomial(String),
    /// Failure parsing an exact value from text.
    #[error("parse error: {0}")]
    Parse(String),

    // --- series arithmetic --------------------------------------------------
    /// Two series live on different exponent grids.
    #[error("gauge grid mismatch: 1/{0} vs 1/{1}")]
    GridMismatch(u32, u32),
    /// A series operation would produce no guaranteed coefficients.
    #[error("truncation too short: {0}")]
    TruncationTooShort(String),
    /// A shift re-expansion was requested outside its validity range.
    #[error("shift by {j} is outside the valid range |j| < {nu}")]
    ShiftOutOfRange { j: i64, nu: u32 },
    /// A log argument or denominator is singular at the expansion point.
    #[error("singular expansion point: {0}")]
    SingularPoint(String),

    // --- derivation pipeline ------------------------------------------------
    /// The requested operation needs a longer expansion than supplied.
    #[error("expansion order too small: need {need}, have {have} ({context})")]
    OrderTooSmall {
        need: i64,
        have: i64,
        context: String,
    },
    /// The affine slope of an expansion order vanished (cannot solve).
    #[error("vanishing affine slope while solving expansion order {0}")]
    VanishingSlope(i64),
    /// A coefficient monomial sits in no valid (order, genus) slot.
    #[error("expansion coefficient slot violation: {0}")]
    SlotViolation(String),
    /// The matching linear system is singular or non-triangular.
    #[error("matching system defect: {0}")]
    SystemDefect(String),
    /// A solved numerator coefficient failed to be rational.
    #[error("numerator coefficient β_{index} is not rational: {value}")]
    NonRationalBeta { index: usize, value: String },
    /// An exact polynomial division left a nonzero remainder.
    #[error("exact division failed: {0}")]
    NonzeroRemainder(String),
    /// Root isolation found a non-real root where realness was required.
    #[error("non-real root detected: {0}")]
    NonRealRoot(String),

    // --- closed forms / numeric ----------------------------------------------
    /// The quartic closed form was evaluated on its branch cut.
    #[error("branch cut violation: α·r = {0} lies in (−∞, −1/12]")]
    BranchCut(String),
    /// Numeric computation cannot reach the requested accuracy.
    #[error("precision shortfall: {0}")]
    PrecisionShortfall(String),
    /// A numeric precondition (positivity, range) failed.
    #[error("numeric domain error: {0}")]
    NumericDomain(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
