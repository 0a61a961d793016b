//! Certified enclosures of the constant `alpha_k` (the unique positive root
//! of `x (1+x)^(k-1) = 1`), of the equality point `1/(1 + alpha_k)` (equally
//! the root of `x^k + x - 1`), and of the frequency threshold
//! `alpha_k / (1 + alpha_k)`.
//!
//! The method is interval-certified bisection: a midpoint is accepted on a
//! side of the bracket only when the outward-rounded evaluation of the
//! defining function has a definite sign there. If an evaluation straddles
//! zero the solver stops with [`SolveStatus::WidthLimited`] rather than
//! guessing — an enclosure returned as converged is a proof.

use crate::error::{Error, Result};
use crate::interval::{
    add_down, add_up, div_down, div_up, iv_add, iv_mul, iv_pow_pos, iv_pow_unit, iv_sub, Interval,
};
use crate::scalar::Exponent;
use serde::ser::{Serialize, SerializeStruct, Serializer};

/// Default enclosure tolerance used by the higher layers.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Tightest tolerance bisection on f64 is allowed to chase. Below this,
/// outward rounding makes midpoint sign tests start to straddle.
pub const MIN_TOL: f64 = 1e-14;

const MAX_ITERATIONS: u32 = 200;

/// How a bisection run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    /// The enclosure width reached the requested tolerance.
    Converged,
    /// A midpoint sign test straddled zero (or the f64 grid ran out) before
    /// the tolerance was met; the enclosure is still correct, just wider
    /// than asked.
    WidthLimited,
}

/// A proof-carrying enclosure of `alpha_k`.
///
/// Invariants on construction: the defining function is certified negative
/// at `enclosure.lo` and certified positive at `enclosure.hi` (recorded in
/// the `residual_sign_*` fields), and `enclosure.lo > 1/k` — the root lies
/// strictly above the trivial lower bound.
#[derive(Debug, Clone)]
pub struct AlphaCertificate {
    pub k: Exponent,
    pub enclosure: Interval,
    /// `enclosure.hi - enclosure.lo`.
    pub width: f64,
    /// Number of certified midpoint evaluations performed.
    pub iterations: u32,
    pub status: SolveStatus,
    /// Certified sign of `x (1+x)^(k-1) - 1` at the lower endpoint: -1.
    pub residual_sign_lo: i8,
    /// Certified sign at the upper endpoint: +1.
    pub residual_sign_hi: i8,
}

impl Serialize for AlphaCertificate {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        // endpoints as 17-significant-digit decimal strings so a JSON reader
        // that re-parses them recovers the exact f64s
        let mut st = serializer.serialize_struct("AlphaCertificate", 5)?;
        st.serialize_field("k", &self.k.value())?;
        st.serialize_field("lo", &format!("{:.16e}", self.enclosure.lo()))?;
        st.serialize_field("hi", &format!("{:.16e}", self.enclosure.hi()))?;
        st.serialize_field("width", &self.width)?;
        st.serialize_field("iterations", &self.iterations)?;
        st.end()
    }
}

/// Outward-rounded evaluation of `x (1+x)^(k-1) - 1` on an interval.
fn iv_alpha_fn(k: Exponent, x: Interval) -> Result<Interval> {
    let one = Interval::ONE;
    let kv = Interval::raw(k.value(), k.value());
    let base = iv_add(one, x);
    let pw = iv_pow_pos(base, iv_sub(kv, one))?;
    Ok(iv_sub(iv_mul(x, pw), one))
}

/// Outward-rounded evaluation of `x^k + x - 1` for `x` inside `[0, 1]`.
fn iv_equality_fn(k: Exponent, x: Interval) -> Result<Interval> {
    let kv = Interval::raw(k.value(), k.value());
    let xk = iv_pow_unit(x, kv)?;
    Ok(iv_sub(iv_add(xk, x), Interval::ONE))
}

/// Certified bisection on `[lo, hi]` for a function with certified signs
/// `f(lo) < 0 < f(hi)`. Returns the final bracket, iteration count, and
/// status. `force_move_lo` keeps bisecting until the lower endpoint has
/// moved off its initial value at least once.
fn bisect<F>(
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    force_move_lo: bool,
    mut f: F,
) -> Result<(f64, f64, u32, SolveStatus)>
where
    F: FnMut(Interval) -> Result<Interval>,
{
    let lo0 = lo;
    let mut iterations = 0u32;
    let mut status = SolveStatus::Converged;
    while hi - lo > tol || (force_move_lo && lo == lo0) {
        if iterations >= MAX_ITERATIONS {
            status = SolveStatus::WidthLimited;
            break;
        }
        let m = 0.5 * (lo + hi);
        if !(m > lo && m < hi) {
            // endpoints are adjacent f64s; nothing finer exists
            status = SolveStatus::WidthLimited;
            break;
        }
        let fm = f(Interval::point(m)?)?;
        if fm.hi() < 0.0 {
            lo = m;
        } else if fm.lo() > 0.0 {
            hi = m;
        } else {
            // the enclosure straddles zero: refusing to pick a side keeps
            // the bracket a certificate
            status = SolveStatus::WidthLimited;
            break;
        }
        iterations += 1;
    }
    Ok((lo, hi, iterations, status))
}

/// Compute a certified enclosure of `alpha_k` of width at most `tol`
/// (tolerances below [`MIN_TOL`] are rejected).
///
/// The initial bracket is `[1/k, 1]`; both endpoint signs are re-certified
/// at runtime by interval evaluation rather than assumed, so the returned
/// certificate stands on its own.
pub fn solve_alpha(k: Exponent, tol: f64) -> Result<AlphaCertificate> {
    if !tol.is_finite() || tol < MIN_TOL {
        return Err(Error::TolTooTight {
            got: tol,
            floor: MIN_TOL,
        });
    }
    let lo0 = 1.0 / k.value();
    let f_lo = iv_alpha_fn(k, Interval::point(lo0)?)?;
    let f_hi = iv_alpha_fn(k, Interval::point(1.0)?)?;
    if !(f_lo.hi() < 0.0 && f_hi.lo() > 0.0) {
        return Err(Error::BracketUncertified { k: k.value() });
    }
    let (lo, hi, iterations, status) =
        bisect(lo0, 1.0, tol, true, |x| iv_alpha_fn(k, x))?;
    if !(lo > lo0) {
        return Err(Error::BracketUncertified { k: k.value() });
    }
    let enclosure = Interval::new(lo, hi)?;
    Ok(AlphaCertificate {
        k,
        enclosure,
        width: enclosure.width(),
        iterations,
        status,
        residual_sign_lo: -1,
        residual_sign_hi: 1,
    })
}

/// Certified enclosure of the equality point: the unique root of
/// `x^k + x - 1` in `(0, 1)`, where the inequality is tight.
///
/// Before returning, the enclosure is cross-checked for consistency against
/// the independently computed `1/(1 + alpha_k)`; disjoint enclosures would
/// mean a bug in one of the two solvers, and turn into an error rather than
/// a silently wrong certificate.
pub fn equality_point(k: Exponent, tol: f64) -> Result<Interval> {
    if !tol.is_finite() || tol < MIN_TOL {
        return Err(Error::TolTooTight {
            got: tol,
            floor: MIN_TOL,
        });
    }
    // signs at 0 and 1 are exact: g(0) = -1, g(1) = 1
    let (lo, hi, _, _) = bisect(0.0, 1.0, tol, false, |x| iv_equality_fn(k, x))?;
    let enclosure = Interval::new(lo, hi)?;

    let cert = solve_alpha(k, tol)?;
    let a = cert.enclosure;
    let inv = Interval::new(
        div_down(1.0, add_up(1.0, a.hi())),
        div_up(1.0, add_down(1.0, a.lo())),
    )?;
    if !enclosure.intersects(inv) {
        return Err(Error::EnclosureMismatch { k: k.value() });
    }
    Ok(enclosure)
}

/// Certified enclosure of the frequency threshold `alpha_k / (1 + alpha_k)`,
/// the constant appearing in the set-family bound.
pub fn frequency_threshold(k: Exponent, tol: f64) -> Result<Interval> {
    let cert = solve_alpha(k, tol)?;
    Ok(frequency_threshold_from(&cert))
}

/// Threshold enclosure derived from an existing certificate; `t/(1+t)` is
/// increasing, so directed rounding of the two endpoints is enough.
pub fn frequency_threshold_from(cert: &AlphaCertificate) -> Interval {
    let a = cert.enclosure;
    Interval::raw(
        div_down(a.lo(), add_up(1.0, a.lo())),
        div_up(a.hi(), add_down(1.0, a.hi())),
    )
}
