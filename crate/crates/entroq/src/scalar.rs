//! Plain `f64` evaluations of the functions behind the inequality
//! `alpha_k * h(x^k) >= x^(k-1) * h(x)`: the binary entropy `h`, the ratio
//! `q`, the symmetric ratio `U`, the logarithmic mean, and their
//! derivatives.
//!
//! These are fast point evaluations with documented endpoint conventions;
//! everything certified lives in [`crate::interval`]. Conventions at the
//! removable singularities:
//!
//! - `h(0) = h(1) = 0`,
//! - `q(k, 0) = q(k, 1) = 1/k` (the two-sided limit), also used when `x^k`
//!   itself rounds to 0 or 1 while `0 < x < 1`,
//! - `u_residual` falls back to `U(x) - 1` when `x^k` rounds to an endpoint
//!   (the inner ratio tends to 1 there).

use crate::error::{Error, Result};

/// A point of the closed unit interval `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct UnitPoint(f64);

impl UnitPoint {
    pub fn new(x: f64) -> Result<Self> {
        if x.is_finite() && (0.0..=1.0).contains(&x) {
            Ok(Self(x))
        } else {
            Err(Error::UnitRange(x))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// The exponent `k > 1` selecting a member of the inequality family.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub fn new(k: f64) -> Result<Self> {
        if k.is_finite() && k > 1.0 {
            Ok(Self(k))
        } else {
            Err(Error::ExponentRange(k))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Binary entropy `h(x) = -x ln x - (1-x) ln(1-x)` in nats, `h(0) = h(1) = 0`.
///
/// Evaluated on the canonical half `a = min(x, 1-x)`: for `x >= 1/2` the
/// complement `1 - x` is exact, so complement pairs produce bit-identical
/// results, and the second term uses `ln_1p` to stay accurate for small `a`.
/// Both terms are nonnegative — there is no cancellation — and the result is
/// clamped to the true maximum `ln 2`.
pub fn entropy(x: UnitPoint) -> f64 {
    entropy_raw(x.value())
}

pub(crate) fn entropy_raw(x: f64) -> f64 {
    if x == 0.0 || x == 1.0 {
        return 0.0;
    }
    let a = if x <= 0.5 { x } else { 1.0 - x };
    let h = a * -a.ln() + (1.0 - a) * -(-a).ln_1p();
    h.min(std::f64::consts::LN_2)
}

/// `h'(x) = ln(1-x) - ln(x)`, defined on the open interval `(0, 1)`.
pub fn entropy_deriv(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::OpenUnitRange(x));
    }
    Ok((-x).ln_1p() - x.ln())
}

/// `x^p` for `x` in `[0, 1]`, `p > 0`, via `exp(p ln x)` with pinned
/// endpoints. Inputs are assumed validated by the caller.
pub(crate) fn pow_unit(x: f64, p: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&x) && p > 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    (p * x.ln()).exp()
}

/// The ratio `q(x) = x^(k-1) h(x) / h(x^k)`, extended by its limit `1/k` at
/// the endpoints (and wherever `x^k` rounds to an endpoint in f64).
///
/// The inequality states exactly that `q(x) <= alpha_k` on `[0, 1]`.
pub fn q(k: Exponent, x: UnitPoint) -> f64 {
    let (k, x) = (k.value(), x.value());
    if x == 0.0 || x == 1.0 {
        return 1.0 / k;
    }
    let xk = pow_unit(x, k);
    if xk == 0.0 || xk == 1.0 {
        return 1.0 / k;
    }
    pow_unit(x, k - 1.0) * entropy_raw(x) / entropy_raw(xk)
}

/// Closed-form derivative of `q` by the quotient rule (no finite
/// differences):
///
/// `q'(x) = [(k-1) x^(k-2) h(x) + x^(k-1) h'(x)] / h(x^k)
///          - k x^(2k-2) h(x) h'(x^k) / h(x^k)^2`.
pub fn q_deriv(k: Exponent, x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::OpenUnitRange(x));
    }
    let k = k.value();
    let xk = pow_unit(x, k);
    if xk == 0.0 || xk == 1.0 {
        // beyond f64's reach of the inner power; q is flat at its limit there
        return Ok(0.0);
    }
    let hx = entropy_raw(x);
    let hpx = entropy_deriv(x)?;
    let hxk = entropy_raw(xk);
    let hpxk = entropy_deriv(xk)?;
    // written with x^(k-1) only: x^(k-2) would need a negative power for
    // k < 2, so (k-1) x^(k-2) h(x) is taken as x^(k-1) (k-1) h(x) / x
    let xk1 = pow_unit(x, k - 1.0);
    let num = xk1 * ((k - 1.0) * hx / x + hpx);
    Ok(num / hxk - k * xk1 * xk1 * hx * hpxk / (hxk * hxk))
}

/// The symmetric ratio `U(x) = ln(x) ln(1-x) / h(x)` on `(0, 1)`.
///
/// `U(x) = U(1-x)` bit-for-bit (canonical-half evaluation), `U` tends to 1
/// at both endpoints, and `1/U(x) = L(1, x) + L(1, 1-x)` where `L` is the
/// logarithmic mean.
pub fn u_fn(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::OpenUnitRange(x));
    }
    let a = if x <= 0.5 { x } else { 1.0 - x };
    Ok(a.ln() * (-a).ln_1p() / entropy_raw(a))
}

/// `U(x) - U(x^k)`: negative left of the equality point, positive right of
/// it, with its single sign change exactly at the root of `x^k = 1 - x`.
///
/// When `x^k` rounds to 0 or 1 the inner ratio is replaced by its limit 1.
pub fn u_residual(k: Exponent, x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::OpenUnitRange(x));
    }
    let ux = u_fn(x)?;
    let xk = pow_unit(x, k.value());
    if xk == 0.0 || xk == 1.0 {
        return Ok(ux - 1.0);
    }
    Ok(ux - u_fn(xk)?)
}

/// Logarithmic mean `L(a, b) = (a - b) / (ln a - ln b)` for positive `a`,
/// `b`, with `L(a, a) = a`.
///
/// The result is clamped into `[min(a,b), max(a,b)]`, which the true mean
/// always satisfies, so the bound holds exactly even after rounding. When
/// the logs of distinct arguments collide in f64 the arguments are within
/// one ulp of each other and the arithmetic mean is returned.
pub fn log_mean(a: f64, b: f64) -> Result<f64> {
    if !a.is_finite() || !(a > 0.0) {
        return Err(Error::NonPositive(a));
    }
    if !b.is_finite() || !(b > 0.0) {
        return Err(Error::NonPositive(b));
    }
    if a == b {
        return Ok(a);
    }
    let (la, lb) = (a.ln(), b.ln());
    if la == lb {
        return Ok(0.5 * a + 0.5 * b);
    }
    Ok(((a - b) / (la - lb)).clamp(a.min(b), a.max(b)))
}

/// Derivative of `f(t) = (t - 1)/ln t = L(1, t)`:
/// `f'(t) = (t ln t - t + 1) / (t ln^2 t)`, which decreases from `+inf` at
/// `0+` to `1/2` at `1-`.
fn f_prime(t: f64) -> f64 {
    debug_assert!(t > 0.0 && t < 1.0);
    let lt = t.ln();
    // t*ln t - t + 1 cancels near t = 1; the fused multiply-add keeps the
    // leading digits
    t.mul_add(lt, 1.0 - t) / (t * lt * lt)
}

/// Derivative of `1/U` at `x` in `(0, 1)`, using
/// `1/U(x) = L(1, x) + L(1, 1-x)`:
/// `(1/U)'(x) = f'(x) - f'(1-x)`.
///
/// Strictly positive on `(0, 1/2)` since `f'` is strictly decreasing — this
/// is the analytic form of "`U` decreases toward 1/2".
pub fn u_recip_deriv(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::OpenUnitRange(x));
    }
    if x == 0.5 {
        return Ok(0.0);
    }
    Ok(f_prime(x) - f_prime(1.0 - x))
}

/// The defect `D(x) = alpha * h(x^k) - x^(k-1) * h(x)` evaluated directly
/// in f64; `D(0) = D(1) = 0` by the entropy convention.
///
/// This is an estimate, not a certificate — in particular, in the deep
/// underflow regime where `x^k` rounds to 0 the first term vanishes and the
/// sign degenerates. Certified enclosures come from
/// [`crate::interval::iv_defect`].
pub fn defect(k: Exponent, alpha: f64, x: UnitPoint) -> f64 {
    let (k, x) = (k.value(), x.value());
    if x == 0.0 || x == 1.0 {
        return 0.0;
    }
    alpha * entropy_raw(pow_unit(x, k)) - pow_unit(x, k - 1.0) * entropy_raw(x)
}

/// `f(x) = x (1+x)^(k-1) - 1` for `x > 0`: strictly increasing, with the
/// constant `alpha_k` as its unique positive root.
pub fn alpha_defining_fn(k: Exponent, x: f64) -> Result<f64> {
    if !x.is_finite() || !(x > 0.0) {
        return Err(Error::NonPositive(x));
    }
    let p = ((k.value() - 1.0) * x.ln_1p()).exp();
    // fused x*p - 1 preserves the cancellation near the root
    Ok(x.mul_add(p, -1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Expected values in this module were computed with a 220-digit
    // high-precision oracle before the implementation was written, then
    // rounded to f64.

    #[test]
    fn unit_point_and_exponent_validation() {
        assert!(UnitPoint::new(0.0).is_ok());
        assert!(UnitPoint::new(1.0).is_ok());
        assert!(UnitPoint::new(-1e-300).is_err());
        assert!(UnitPoint::new(1.0 + 1e-15).is_err());
        assert!(UnitPoint::new(f64::NAN).is_err());
        assert!(Exponent::new(1.0).is_err());
        assert!(Exponent::new(0.5).is_err());
        assert!(Exponent::new(f64::INFINITY).is_err());
        assert!(Exponent::new(1.0 + 1e-12).is_ok());
    }

    #[test]
    fn entropy_spot_values() {
        let h = |x: f64| entropy(UnitPoint::new(x).unwrap());
        assert_eq!(h(0.0), 0.0);
        assert_eq!(h(1.0), 0.0);
        assert_eq!(h(0.5), std::f64::consts::LN_2);
        assert_relative_eq!(h(0.25), 0.5623351446188083, max_relative = 1e-15);
        assert_relative_eq!(h(0.3), 0.6108643020548935, max_relative = 1e-15);
    }

    #[test]
    fn entropy_complement_symmetry_is_bitwise() {
        // Exact complement pairs are those (x, 1-x) with x >= 1/2, where the
        // subtraction is exact; the pair is shared with the lower half, so
        // this covers both sides.
        for i in 500..=999 {
            let x = i as f64 / 1000.0;
            let a = entropy(UnitPoint::new(x).unwrap());
            let b = entropy(UnitPoint::new(1.0 - x).unwrap());
            assert_eq!(a.to_bits(), b.to_bits(), "x = {x}");
        }
    }

    #[test]
    fn entropy_range_and_max() {
        for i in 0..=10_000 {
            let x = i as f64 / 10_000.0;
            let h = entropy(UnitPoint::new(x).unwrap());
            assert!((0.0..=std::f64::consts::LN_2).contains(&h), "x = {x}");
        }
    }

    #[test]
    fn entropy_deriv_spot_values() {
        // h'(0.2) = ln 4, h'(0.3) = 0.84729786038720361371...
        assert_relative_eq!(
            entropy_deriv(0.2).unwrap(),
            1.3862943611198906,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            entropy_deriv(0.3).unwrap(),
            0.8472978603872036,
            max_relative = 1e-15
        );
        assert_eq!(entropy_deriv(0.5).unwrap(), 0.0);
        assert!(entropy_deriv(0.0).is_err());
        assert!(entropy_deriv(1.0).is_err());
    }

    #[test]
    fn entropy_deriv_matches_finite_differences() {
        let d = 1e-6;
        for &x in &[0.1, 0.3, 0.5, 0.77, 0.9] {
            let fd = (entropy_raw(x + d) - entropy_raw(x - d)) / (2.0 * d);
            assert!(
                (entropy_deriv(x).unwrap() - fd).abs() < 1e-6,
                "x = {x}, fd = {fd}"
            );
        }
    }

    #[test]
    fn q_spot_values_and_conventions() {
        let k2 = Exponent::new(2.0).unwrap();
        let k3 = Exponent::new(3.0).unwrap();
        let qf = |k, x: f64| q(k, UnitPoint::new(x).unwrap());

        assert_eq!(qf(k2, 0.0), 0.5);
        assert_eq!(qf(k2, 1.0), 0.5);
        // q(2, 0.3) = 0.60574009801547867507...
        assert_relative_eq!(qf(k2, 0.3), 0.6057400980154787, max_relative = 1e-14);
        // at the golden-ratio point q touches its maximum alpha_2
        assert_relative_eq!(
            qf(k2, 0.6180339887498949),
            0.6180339887498948,
            max_relative = 1e-13
        );
        // q(3, 1e-4) = 0.35661635430212547494..., already close to 1/3
        assert_relative_eq!(qf(k3, 1e-4), 0.35661635430212547, max_relative = 1e-13);
        assert!((qf(k3, 1e-4) - 1.0 / 3.0).abs() < 5e-2);
        // x^k rounding to 0 falls back to the limit
        assert_eq!(qf(k2, 1e-300), 0.5);
    }

    #[test]
    fn q_deriv_spot_values() {
        // q'(3, 0.05)  = 0.33409886526261704265...
        // q'(2.5, 0.4) = 0.071312180767566998212...
        let k3 = Exponent::new(3.0).unwrap();
        let k25 = Exponent::new(2.5).unwrap();
        assert_relative_eq!(
            q_deriv(k3, 0.05).unwrap(),
            0.334098865262617,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            q_deriv(k25, 0.4).unwrap(),
            0.0713121807675670,
            max_relative = 1e-11
        );
        assert!(q_deriv(k3, 0.0).is_err());
    }

    #[test]
    fn q_deriv_matches_finite_differences() {
        let d = 1e-6;
        for &kv in &[1.5, 2.0, 3.0, 5.5] {
            let k = Exponent::new(kv).unwrap();
            for i in 1..100 {
                // stay clear of the endpoint layers where q is extended by
                // convention and the third derivative blows up
                let x = 0.005 + 0.99 * i as f64 / 100.0;
                let fd = (q(k, UnitPoint::new(x + d).unwrap())
                    - q(k, UnitPoint::new(x - d).unwrap()))
                    / (2.0 * d);
                let qd = q_deriv(k, x).unwrap();
                assert!((qd - fd).abs() < 1e-5, "k={kv} x={x} qd={qd} fd={fd}");
            }
        }
    }

    #[test]
    fn u_fn_spot_values_and_symmetry() {
        assert_eq!(u_fn(0.5).unwrap(), std::f64::consts::LN_2);
        // U(0.3) = 0.70298252990419872797...
        assert_relative_eq!(u_fn(0.3).unwrap(), 0.7029825299041987, max_relative = 1e-14);
        // U(1e-8) = 0.9485085040870436594...: the approach to the limit 1 is
        // logarithmic, so even 1e-8 is still five hundredths away
        assert_relative_eq!(
            u_fn(1e-8).unwrap(),
            0.9485085040870437,
            max_relative = 1e-13
        );
        // ... but the trend toward 1 is monotone in the reachable range
        let u8 = u_fn(1e-8).unwrap();
        let u100 = u_fn(1e-100).unwrap();
        let u300 = u_fn(1e-300).unwrap();
        assert!(u8 < u100 && u100 < u300 && u300 < 1.0);

        // bitwise symmetry over exact complement pairs (x >= 1/2, where the
        // subtraction 1 - x is exact)
        for i in 500..1000 {
            let x = i as f64 / 1000.0;
            assert_eq!(
                u_fn(x).unwrap().to_bits(),
                u_fn(1.0 - x).unwrap().to_bits(),
                "x = {x}"
            );
        }
        assert!(u_fn(0.0).is_err());
        assert!(u_fn(1.0).is_err());
    }

    #[test]
    fn u_residual_spot_values() {
        let k2 = Exponent::new(2.0).unwrap();
        // u_residual(2, 0.2) = -0.06471476623... (negative left of the
        // equality point)
        let r = u_residual(k2, 0.2).unwrap();
        assert_relative_eq!(r, -0.06471476623, max_relative = 1e-9);
        // positive right of it
        assert!(u_residual(k2, 0.8).unwrap() > 0.0);
        // deep underflow of x^k falls back to U(x) - 1
        let k20 = Exponent::new(20.0).unwrap();
        let x = 1e-18;
        let r = u_residual(k20, x).unwrap();
        assert_eq!(r, u_fn(x).unwrap() - 1.0);
        assert!(r < 0.0);
    }

    #[test]
    fn log_mean_spot_values_and_bounds() {
        // L(4, 2) = 2/ln 2 = 2.8853900817779268147...
        assert_relative_eq!(
            log_mean(4.0, 2.0).unwrap(),
            2.8853900817779268,
            max_relative = 1e-15
        );
        assert_eq!(log_mean(3.0, 3.0).unwrap(), 3.0);
        // symmetry
        assert_eq!(
            log_mean(0.2, 0.7).unwrap().to_bits(),
            log_mean(0.7, 0.2).unwrap().to_bits()
        );
        // min <= L <= max, exactly, thanks to the clamp
        for i in 1..200 {
            for j in 1..200 {
                let (a, b) = (i as f64 / 100.0, j as f64 / 100.0);
                let l = log_mean(a, b).unwrap();
                assert!(a.min(b) <= l && l <= a.max(b), "a={a} b={b} l={l}");
            }
        }
        // arguments one ulp apart take the mean fallback and stay bounded
        let a = 0.3f64;
        let b = a.next_up();
        let l = log_mean(a, b).unwrap();
        assert!(a <= l && l <= b);
        assert!(log_mean(0.0, 1.0).is_err());
        assert!(log_mean(1.0, -2.0).is_err());
    }

    #[test]
    fn u_recip_identity_links_u_fn_and_log_mean() {
        // 1/U(x) = L(1, x) + L(1, 1-x); at x = 0.3 both sides equal
        // 1.4225104571749148749... (oracle)
        let lhs = 1.0 / u_fn(0.3).unwrap();
        let rhs = log_mean(1.0, 0.3).unwrap() + log_mean(1.0, 0.7).unwrap();
        assert_relative_eq!(lhs, 1.4225104571749149, max_relative = 1e-14);
        assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn u_recip_deriv_spot_values_and_sign() {
        // (1/U)'(0.25) = 0.28807550370200787713...
        // (1/U)'(0.4)  = 0.0980094339501631574...
        assert_relative_eq!(
            u_recip_deriv(0.25).unwrap(),
            0.2880755037020079,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            u_recip_deriv(0.4).unwrap(),
            0.09800943395016316,
            max_relative = 1e-11
        );
        assert_eq!(u_recip_deriv(0.5).unwrap(), 0.0);
        // antisymmetric about 1/2
        assert!(u_recip_deriv(0.75).unwrap() < 0.0);
        assert!(u_recip_deriv(1e-6).unwrap() > 0.0);
    }

    #[test]
    fn defect_spot_values() {
        let k2 = Exponent::new(2.0).unwrap();
        let a2 = 0.6180339887498949;
        let d = |x: f64| defect(k2, a2, UnitPoint::new(x).unwrap());
        // D(2, alpha_2, 0.3)  = 0.0037193669401887710136...
        // D(2, alpha_2, 0.25) = 0.0039074052121050358768...
        // D(2, alpha_2, 0.35) = 0.0032260853501563465914...
        assert_relative_eq!(d(0.3), 0.0037193669401887710, max_relative = 1e-12);
        assert_relative_eq!(d(0.25), 0.0039074052121050359, max_relative = 1e-12);
        assert_relative_eq!(d(0.35), 0.0032260853501563466, max_relative = 1e-12);
        assert_eq!(d(0.0), 0.0);
        assert_eq!(d(1.0), 0.0);
        // near-zero at the equality point
        assert!(d(0.6180339887498949).abs() < 1e-15);
    }

    #[test]
    fn alpha_defining_fn_near_its_root() {
        let k2 = Exponent::new(2.0).unwrap();
        // at the golden-ratio conjugate the residual is zero to f64 noise
        let r = alpha_defining_fn(k2, 0.6180339887498949).unwrap();
        assert!(r.abs() < 1e-15, "residual {r}");
        assert!(alpha_defining_fn(k2, 0.5).unwrap() < 0.0);
        assert!(alpha_defining_fn(k2, 0.7).unwrap() > 0.0);
        // strictly increasing
        let k5 = Exponent::new(5.0).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in 1..100 {
            let v = alpha_defining_fn(k5, i as f64 / 100.0).unwrap();
            assert!(v > prev);
            prev = v;
        }
        assert!(alpha_defining_fn(k2, 0.0).is_err());
        assert!(alpha_defining_fn(k2, -1.0).is_err());
    }

    #[test]
    fn q_approaches_its_limit_monotonically() {
        // |q(10^-j) - 1/k| decreasing in j = 2..12; the approach is
        // logarithmically slow, ~ (k-1)/(k (k ln(10^j) + 1))
        for &kv in &[2.0, 3.0, 7.0] {
            let k = Exponent::new(kv).unwrap();
            let mut prev = f64::INFINITY;
            for j in 2..=12 {
                let x = 10f64.powi(-j);
                let gap = (q(k, UnitPoint::new(x).unwrap()) - 1.0 / kv).abs();
                assert!(gap < prev, "k={kv} j={j} gap={gap} prev={prev}");
                prev = gap;
            }
        }
    }
}
