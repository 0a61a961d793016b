//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point expected to lie in the closed unit interval did not.
    #[error("point {0} lies outside [0, 1]")]
    UnitRange(f64),
    /// The inequality family is only defined for finite exponents k > 1.
    #[error("exponent must be a finite real > 1, got {0}")]
    ExponentRange(f64),
    /// Argument must lie strictly inside (0, 1).
    #[error("argument {0} lies outside the open interval (0, 1)")]
    OpenUnitRange(f64),
    /// Argument must be finite and strictly positive.
    #[error("argument {0} must be a finite positive real")]
    NonPositive(f64),
    /// Interval construction demands finite, ordered endpoints.
    #[error("interval endpoints must be finite with lo <= hi, got [{lo}, {hi}]")]
    BadInterval { lo: f64, hi: f64 },
    /// An interval argument escapes the domain of the operation.
    #[error("interval [{lo}, {hi}] escapes the required domain {domain}")]
    IntervalDomain { lo: f64, hi: f64, domain: &'static str },
    /// An interval operation produced a bound outside the finite f64 range.
    #[error("interval operation left the finite f64 range")]
    Overflow,
    /// Requested tolerance is tighter than bisection on f64 can certify.
    #[error("tolerance {got} is below the certifiable floor {floor}")]
    TolTooTight { got: f64, floor: f64 },
    /// The runtime sign check on an initial bisection bracket failed.
    #[error("initial bracket for k = {k} failed its certified sign check")]
    BracketUncertified { k: f64 },
    /// Two enclosures of the same quantity came out disjoint.
    #[error("enclosure cross-check failed for k = {k}: disjoint enclosures")]
    EnclosureMismatch { k: f64 },
    /// A scalar parameter is outside its documented range.
    #[error("parameter {name} = {value} outside {range}")]
    ParamRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    /// A family file could not be parsed; `line` is 1-based.
    #[error("family line {line}: {msg}")]
    FamilyParse { line: usize, msg: String },
    /// A family value is structurally invalid.
    #[error("invalid family: {0}")]
    FamilyInvalid(String),
    /// Exact tuple enumeration would be too large; refuse instead of hanging.
    #[error("scale guard: {size}^{k} ordered tuples exceed the {limit} limit for exact counting; estimate by sampling instead")]
    ScaleGuard { size: u64, k: u32, limit: u64 },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
