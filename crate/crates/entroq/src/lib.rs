//! Certified numerics for a family of sharp binary-entropy inequalities.
//!
//! For every real exponent `k > 1` there is a best constant `alpha_k`, the
//! unique positive root of `x (1+x)^(k-1) = 1`, such that
//!
//! ```text
//! alpha_k * h(x^k) >= x^(k-1) * h(x)      for all x in [0, 1],
//! ```
//!
//! where `h` is the natural-log binary entropy. Equality holds exactly at
//! `x = 0`, `x = 1`, and the interior point `x = 1/(1 + alpha_k)` (the root
//! of `x^k + x - 1`). The crate provides:
//!
//! - plain `f64` evaluations of every function in the story ([`scalar`]),
//! - outward-rounded interval arithmetic ([`interval`]),
//! - certified enclosures of `alpha_k`, the equality point, and the
//!   frequency threshold `alpha_k / (1 + alpha_k)` ([`alpha`]),
//! - a branch-and-bound verifier for the inequality itself ([`verify`]),
//! - a small combinatorial lab for the associated approximate union-closed
//!   frequency bound on finite set families ([`setfamily`]).
//!
//! The division of labor is strict: anything called "certified" is backed by
//! outward rounding end to end, while heuristic numerics (endpoint and
//! equality-zone spot checks, scan tables) are labeled as such in both the
//! API and the reports.

pub mod alpha;
pub mod error;
pub mod interval;
pub mod scalar;
pub mod setfamily;
pub mod verify;

pub use alpha::{
    equality_point, frequency_threshold, frequency_threshold_from, solve_alpha, AlphaCertificate,
    SolveStatus, DEFAULT_TOL, MIN_TOL,
};
pub use error::{Error, Result};
pub use interval::{
    iv_add, iv_defect, iv_entropy, iv_log, iv_mul, iv_neg, iv_pow, iv_sub, Interval,
};
pub use scalar::{
    alpha_defining_fn, defect, entropy, entropy_deriv, log_mean, q, q_deriv, u_fn, u_recip_deriv,
    u_residual, Exponent, UnitPoint,
};
pub use setfamily::{
    closure_fraction, closure_stats, corollary_bound, exhaustive_check, random_probe,
    ClosureCounts, ClosureStats, CorollaryBound, ExhaustiveViolation, ProbeReport, ProbeViolation,
    SetFamily, UcsReport,
};
pub use verify::{
    certify, scan, zone_check_endpoint, zone_check_equality, CertifyOptions, Overall,
    RegionStatus, RegionStatusKind, ScanRow, Side, VerificationReport,
};
