//! Outward-rounded interval arithmetic sized for this crate's needs: the
//! field operations plus certified enclosures of `ln`, `exp`, powers with a
//! positive exponent, the binary entropy, and the inequality defect
//! `D(x) = alpha * h(x^k) - x^(k-1) * h(x)`.
//!
//! Directed rounding is emulated rather than obtained from the FPU: every
//! primitive is computed in ordinary round-to-nearest and then nudged
//! outward when (and only when) the rounding direction demands it. For
//! `+`, `-`, `*`, `/` the rounding error of the nearest result is recovered
//! *exactly* (two-sum and FMA residuals), so those bounds cost at most one
//! representable step and are tight whenever the true result is
//! representable. For the libm transcendentals (`ln`, `ln_1p`, `exp`) we
//! assume faithful rounding and nudge by [`LIBM_ULP_MARGIN`] steps per side.
//!
//! The invariant everything else in the crate leans on: for any operation
//! `op` and intervals `X`, `Y`, the result of `iv_op(X, Y)` contains
//! `{op(x, y) : x in X, y in Y}`. Enclosures may be slightly wider than the
//! exact image, never narrower.

use crate::error::{Error, Result};

/// Outward nudge, in representable steps per side, applied to libm results.
///
/// The platform `ln`/`ln_1p`/`exp` are correct to well under 1 ulp; two
/// steps buy a comfortable safety factor at negligible width cost.
pub(crate) const LIBM_ULP_MARGIN: u32 = 2;

fn step_down(mut v: f64, steps: u32) -> f64 {
    for _ in 0..steps {
        v = v.next_down();
    }
    v
}

fn step_up(mut v: f64, steps: u32) -> f64 {
    for _ in 0..steps {
        v = v.next_up();
    }
    v
}

/// Largest f64 `<= a + b` (in exact arithmetic).
pub(crate) fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        // a + b overflowed: the true sum still has a finite bound on one side
        return if s == f64::INFINITY { f64::MAX } else { f64::NEG_INFINITY };
    }
    // Knuth two-sum: err is exactly (a + b) - s
    let bp = s - a;
    let ap = s - bp;
    let err = (a - ap) + (b - bp);
    if err < 0.0 {
        s.next_down()
    } else {
        s
    }
}

/// Smallest f64 `>= a + b` (in exact arithmetic).
pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return if s == f64::NEG_INFINITY { f64::MIN } else { f64::INFINITY };
    }
    let bp = s - a;
    let ap = s - bp;
    let err = (a - ap) + (b - bp);
    if err > 0.0 {
        s.next_up()
    } else {
        s
    }
}

pub(crate) fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

pub(crate) fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

/// Largest f64 `<= a * b`.
pub(crate) fn mul_down(a: f64, b: f64) -> f64 {
    let r = a * b;
    if !r.is_finite() {
        return if r == f64::INFINITY { f64::MAX } else { f64::NEG_INFINITY };
    }
    // FMA residual: exactly a*b - r while r is normal
    let err = a.mul_add(b, -r);
    if err < 0.0 {
        r.next_down()
    } else if err > 0.0 {
        r
    } else if r == 0.0 && a != 0.0 && b != 0.0 {
        // |a*b| underflowed past the subnormals; only the sign is known
        if (a > 0.0) == (b > 0.0) {
            0.0
        } else {
            -f64::from_bits(1)
        }
    } else if r.is_subnormal() {
        // the residual itself may have underflowed; be conservative
        r.next_down()
    } else {
        r
    }
}

/// Smallest f64 `>= a * b`.
pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    let r = a * b;
    if !r.is_finite() {
        return if r == f64::NEG_INFINITY { f64::MIN } else { f64::INFINITY };
    }
    let err = a.mul_add(b, -r);
    if err > 0.0 {
        r.next_up()
    } else if err < 0.0 {
        r
    } else if r == 0.0 && a != 0.0 && b != 0.0 {
        if (a > 0.0) == (b > 0.0) {
            f64::from_bits(1)
        } else {
            0.0
        }
    } else if r.is_subnormal() {
        r.next_up()
    } else {
        r
    }
}

/// Largest f64 `<= a / b`. `b` must be nonzero.
pub(crate) fn div_down(a: f64, b: f64) -> f64 {
    debug_assert!(b != 0.0);
    let r = a / b;
    if !r.is_finite() {
        return if r == f64::INFINITY { f64::MAX } else { f64::NEG_INFINITY };
    }
    // residual r*b - a has the sign of (r - a/b) * b
    let err = r.mul_add(b, -a);
    if err == 0.0 {
        if r.is_subnormal() && r != 0.0 {
            r.next_down()
        } else {
            r
        }
    } else if (err > 0.0) == (b > 0.0) {
        r.next_down()
    } else {
        r
    }
}

/// Smallest f64 `>= a / b`. `b` must be nonzero.
pub(crate) fn div_up(a: f64, b: f64) -> f64 {
    debug_assert!(b != 0.0);
    let r = a / b;
    if !r.is_finite() {
        return if r == f64::NEG_INFINITY { f64::MIN } else { f64::INFINITY };
    }
    let err = r.mul_add(b, -a);
    if err == 0.0 {
        if r.is_subnormal() && r != 0.0 {
            r.next_up()
        } else {
            r
        }
    } else if (err < 0.0) == (b > 0.0) {
        r.next_up()
    } else {
        r
    }
}

pub(crate) fn ln_down(x: f64) -> f64 {
    if x == 1.0 {
        return 0.0; // ln(1) is exact
    }
    step_down(x.ln(), LIBM_ULP_MARGIN)
}

pub(crate) fn ln_up(x: f64) -> f64 {
    if x == 1.0 {
        return 0.0;
    }
    step_up(x.ln(), LIBM_ULP_MARGIN)
}

pub(crate) fn ln1p_down(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0; // ln(1 + 0) is exact
    }
    step_down(x.ln_1p(), LIBM_ULP_MARGIN)
}

pub(crate) fn ln1p_up(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    step_up(x.ln_1p(), LIBM_ULP_MARGIN)
}

pub(crate) fn exp_down(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0; // exp(0) is exact
    }
    // exp > 0 always, so a negative nudge result can be clamped
    step_down(x.exp(), LIBM_ULP_MARGIN).max(0.0)
}

pub(crate) fn exp_up(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let e = x.exp();
    if e == f64::INFINITY {
        return f64::INFINITY; // caller turns this into Error::Overflow
    }
    step_up(e, LIBM_ULP_MARGIN)
}

/// A closed interval `[lo, hi]` with finite, ordered endpoints.
///
/// Fields are private so every `Interval` in circulation satisfies the
/// invariant; construct via [`Interval::new`] or [`Interval::point`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    /// The degenerate interval `[0, 0]`.
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    /// The degenerate interval `[1, 1]`.
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };
    /// The closed unit interval `[0, 1]`.
    pub const UNIT: Interval = Interval { lo: 0.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo <= hi {
            Ok(Self { lo, hi })
        } else {
            Err(Error::BadInterval { lo, hi })
        }
    }

    /// The degenerate interval `[v, v]`.
    pub fn point(v: f64) -> Result<Self> {
        Self::new(v, v)
    }

    /// Internal constructor for bounds already known to be ordered.
    pub(crate) fn raw(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "raw interval out of order: [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn width(self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn contains_interval(self, other: Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(self, other: Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{:.16e}, {:.16e}]", self.lo, self.hi)
    }
}

pub fn iv_add(a: Interval, b: Interval) -> Interval {
    Interval::raw(add_down(a.lo, b.lo), add_up(a.hi, b.hi))
}

pub fn iv_neg(a: Interval) -> Interval {
    Interval::raw(-a.hi, -a.lo)
}

pub fn iv_sub(a: Interval, b: Interval) -> Interval {
    iv_add(a, iv_neg(b))
}

pub fn iv_mul(a: Interval, b: Interval) -> Interval {
    let lo = mul_down(a.lo, b.lo)
        .min(mul_down(a.lo, b.hi))
        .min(mul_down(a.hi, b.lo))
        .min(mul_down(a.hi, b.hi));
    let hi = mul_up(a.lo, b.lo)
        .max(mul_up(a.lo, b.hi))
        .max(mul_up(a.hi, b.lo))
        .max(mul_up(a.hi, b.hi));
    Interval::raw(lo, hi)
}

/// Interval division restricted to strictly positive divisors, which is the
/// only case this crate needs.
pub(crate) fn iv_div(a: Interval, b: Interval) -> Result<Interval> {
    if b.lo <= 0.0 {
        return Err(Error::IntervalDomain {
            lo: b.lo,
            hi: b.hi,
            domain: "(0, inf) as a divisor",
        });
    }
    let lo = div_down(a.lo, b.lo)
        .min(div_down(a.lo, b.hi))
        .min(div_down(a.hi, b.lo))
        .min(div_down(a.hi, b.hi));
    let hi = div_up(a.lo, b.lo)
        .max(div_up(a.lo, b.hi))
        .max(div_up(a.hi, b.lo))
        .max(div_up(a.hi, b.hi));
    Ok(Interval::raw(lo, hi))
}

/// Natural logarithm; requires `a.lo > 0`.
pub fn iv_log(a: Interval) -> Result<Interval> {
    if a.lo <= 0.0 {
        return Err(Error::IntervalDomain {
            lo: a.lo,
            hi: a.hi,
            domain: "(0, inf)",
        });
    }
    Ok(Interval::raw(ln_down(a.lo), ln_up(a.hi)))
}

/// Exponential. Errors if the upper bound overflows f64.
pub(crate) fn iv_exp(a: Interval) -> Result<Interval> {
    let hi = exp_up(a.hi);
    if !hi.is_finite() {
        return Err(Error::Overflow);
    }
    Ok(Interval::raw(exp_down(a.lo), hi))
}

/// `base^p` for `base.lo > 0` and an arbitrary exponent interval, via
/// `exp(p * ln(base))`.
pub(crate) fn iv_pow_pos(base: Interval, p: Interval) -> Result<Interval> {
    iv_exp(iv_mul(p, iv_log(base)?))
}

/// `x^p` for `x` inside the unit interval and a positive exponent interval.
///
/// The endpoints 0 and 1 are pinned exactly (`0^p = 0`, `1^p = 1`); interior
/// bounds come from the monotonicity of `t^e` in both `t` (increasing) and
/// `e` (decreasing, since `ln t <= 0`).
pub(crate) fn iv_pow_unit(x: Interval, p: Interval) -> Result<Interval> {
    debug_assert!(x.lo >= 0.0 && x.hi <= 1.0);
    if p.lo <= 0.0 {
        return Err(Error::IntervalDomain {
            lo: p.lo,
            hi: p.hi,
            domain: "(0, inf) as an exponent",
        });
    }
    let lo = if x.lo == 0.0 {
        0.0
    } else if x.lo == 1.0 {
        1.0
    } else {
        exp_down(mul_down(p.hi, ln_down(x.lo))).max(0.0)
    };
    let hi = if x.hi == 1.0 {
        1.0
    } else if x.hi == 0.0 {
        0.0
    } else {
        exp_up(mul_up(p.lo, ln_up(x.hi))).min(1.0)
    };
    Ok(Interval::raw(lo, hi))
}

/// `x^p` for `x` a subinterval of `[0, 1]` and a finite exponent `p > 0`.
pub fn iv_pow(x: Interval, p: f64) -> Result<Interval> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::NonPositive(p));
    }
    if x.lo < 0.0 || x.hi > 1.0 {
        return Err(Error::IntervalDomain {
            lo: x.lo,
            hi: x.hi,
            domain: "[0, 1]",
        });
    }
    iv_pow_unit(x, Interval::raw(p, p))
}

// Directed point evaluations of the binary entropy
// h(x) = -x ln x - (1-x) ln(1-x), on the canonical half a = min(x, 1-x).
// For x >= 1/2 the complement 1-x is exact (Sterbenz), so complement pairs
// evaluate bit-identically. Both terms are nonnegative: no cancellation.

fn he_down(x: f64) -> f64 {
    if x == 0.0 || x == 1.0 {
        return 0.0;
    }
    let a = if x <= 0.5 { x } else { 1.0 - x };
    let t1 = mul_down(a, -ln_up(a));
    let t2 = mul_down(sub_down(1.0, a), -ln1p_up(-a));
    add_down(t1, t2).max(0.0)
}

fn he_up(x: f64) -> f64 {
    if x == 0.0 || x == 1.0 {
        return 0.0;
    }
    let a = if x <= 0.5 { x } else { 1.0 - x };
    let t1 = mul_up(a, -ln_down(a));
    let t2 = mul_up(sub_up(1.0, a), -ln1p_down(-a));
    // the true maximum of h is ln 2, so any certified upper bound may be
    // clipped to the first f64 strictly above it
    add_up(t1, t2).min(std::f64::consts::LN_2.next_up())
}

/// Binary entropy of an interval `x` inside `[0, 1]`.
///
/// Piecewise monotone: increasing left of 1/2, decreasing right of it; an
/// interval straddling 1/2 attains the maximum `ln 2` inside.
pub fn iv_entropy(x: Interval) -> Result<Interval> {
    if x.lo < 0.0 || x.hi > 1.0 {
        return Err(Error::IntervalDomain {
            lo: x.lo,
            hi: x.hi,
            domain: "[0, 1]",
        });
    }
    let iv = if x.hi <= 0.5 {
        Interval::raw(he_down(x.lo), he_up(x.hi))
    } else if x.lo >= 0.5 {
        Interval::raw(he_down(x.hi), he_up(x.lo))
    } else {
        Interval::raw(
            he_down(x.lo).min(he_down(x.hi)),
            std::f64::consts::LN_2.next_up(),
        )
    };
    Ok(iv)
}

/// Certified enclosure of the defect
/// `D(x) = alpha * h(x^k) - x^(k-1) * h(x)` over the interval `x`.
///
/// `k - 1` is itself computed as an interval so no rounding of the exponent
/// can leak into the bound. The enclosure treats the two occurrences of `x`
/// independently (no centered forms), so it is wider than the true image;
/// branch-and-bound splitting is the intended remedy.
pub fn iv_defect(k: crate::scalar::Exponent, alpha: Interval, x: Interval) -> Result<Interval> {
    if x.lo < 0.0 || x.hi > 1.0 {
        return Err(Error::IntervalDomain {
            lo: x.lo,
            hi: x.hi,
            domain: "[0, 1]",
        });
    }
    let kv = k.value();
    let p_k = Interval::raw(kv, kv);
    let p_k1 = iv_sub(p_k, Interval::ONE);
    let xk = iv_pow_unit(x, p_k)?;
    let t1 = iv_mul(alpha, iv_entropy(xk)?);
    let t2 = iv_mul(iv_pow_unit(x, p_k1)?, iv_entropy(x)?);
    Ok(iv_sub(t1, t2))
}
