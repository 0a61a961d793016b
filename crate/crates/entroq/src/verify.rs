//! Branch-and-bound verification of `alpha_k * h(x^k) >= x^(k-1) * h(x)` on
//! the unit interval, plus the heuristic zone checks that handle the places
//! where a quadratic tangency or an endpoint limit makes interval
//! certification impossible at finite depth.
//!
//! The unit interval is split into five parts:
//!
//! ```text
//! [0, eps] | [eps, z_lo] | [z_lo, z_hi] | [z_hi, 1-eps] | [1-eps, 1]
//!  endpoint     core         equality        core          endpoint
//! ```
//!
//! where `eps` is the exclusion radius and `[z_lo, z_hi]` is the certified
//! equality-point enclosure padded by `eps` on each side. The two core
//! pieces are certified by recursive interval evaluation of the defect; the
//! three zones get well-defined *heuristic* checks whose outcomes are
//! reported as such and never upgraded to certificates.

use crate::alpha::{equality_point, solve_alpha, AlphaCertificate, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::interval::{iv_defect, iv_sub, Interval};
use crate::scalar::{defect, q, u_residual, Exponent, UnitPoint};
use serde::Serialize;

/// Depth above which parallel runs stop forking and recurse sequentially.
const PAR_SPLIT_DEPTH: u32 = 10;

/// Decades spanned by the log-spaced endpoint-zone sample grid.
const ENDPOINT_SPAN_DECADES: f64 = 9.0;

/// Which endpoint of the unit interval a zone check targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Classification of one region of the partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionStatusKind {
    /// Interval arithmetic proved the defect strictly positive here.
    CertifiedPositive,
    /// Endpoint zone whose heuristic check passed.
    EndpointZone,
    /// Equality zone whose heuristic check passed.
    EqualityZone,
    /// Generic value for a passing heuristic check reported standalone.
    HeuristicPass,
    /// The check failed: for a core region this means the defect is
    /// *certified negative* somewhere inside; for a zone it means the
    /// heuristic criterion did not hold.
    Failed,
    /// Recursion bottomed out before the sign could be decided.
    Inconclusive,
}

impl RegionStatusKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionStatusKind::CertifiedPositive => "certified_positive",
            RegionStatusKind::EndpointZone => "endpoint_zone",
            RegionStatusKind::EqualityZone => "equality_zone",
            RegionStatusKind::HeuristicPass => "heuristic_pass",
            RegionStatusKind::Failed => "failed",
            RegionStatusKind::Inconclusive => "inconclusive",
        }
    }
}

/// One region of the verification partition.
///
/// For certified regions `margin` is the interval lower bound of the defect
/// (positive); for a certified-negative core failure it is the interval
/// upper bound (negative); for zones it is the heuristic margin — gap to the
/// midpoint criterion for endpoint zones, minimum sampled defect for the
/// equality zone.
#[derive(Debug, Clone, Serialize)]
pub struct RegionStatus {
    pub lo: f64,
    pub hi: f64,
    pub status: RegionStatusKind,
    pub margin: f64,
    /// True only for core regions where interval arithmetic certified the
    /// defect negative (the falsification witness). Not serialized: the
    /// JSON report encodes it via `status == "failed"` on a core region.
    #[serde(skip_serializing)]
    pub certified_negative: bool,
}

/// Overall verdict of a verification run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Overall {
    /// Reserved for a future mode with certified zones; `certify` as it
    /// stands never returns this.
    Certified,
    /// Every core region certified positive and every zone heuristic passed.
    CertifiedExceptZones,
    /// Some core region is certified negative: a genuine counterexample.
    Falsified,
    /// No certified negative, but some region failed its heuristic or
    /// bottomed out.
    Inconclusive,
}

impl Overall {
    pub fn as_str(self) -> &'static str {
        match self {
            Overall::Certified => "certified",
            Overall::CertifiedExceptZones => "certified_except_zones",
            Overall::Falsified => "falsified",
            Overall::Inconclusive => "inconclusive",
        }
    }
}

/// Alpha enclosure endpoints as they appear in the JSON report.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AlphaBounds {
    pub lo: f64,
    pub hi: f64,
}

/// Full result of a verification run. Serializes to the report JSON; field
/// order here is the field order on the wire.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub k: f64,
    pub alpha: AlphaBounds,
    pub exclusion_radius: f64,
    pub overall: Overall,
    /// Minimum certified margin over all certified-positive regions; absent
    /// when nothing was certified.
    pub min_certified_margin: Option<f64>,
    pub max_depth: u32,
    pub tangency_tol: f64,
    pub regions: Vec<RegionStatus>,
    /// The alpha certificate backing the run (not part of the wire format).
    #[serde(skip_serializing)]
    pub certificate: AlphaCertificate,
}

/// Tuning knobs for [`certify`]. `Default` matches the CLI defaults.
#[derive(Debug, Clone)]
pub struct CertifyOptions {
    /// Half-width `eps` of the endpoint zones, and padding added around the
    /// equality-point enclosure. Must lie in `[1e-6, 1e-2]`.
    pub exclusion_radius: f64,
    /// Maximum bisection depth per core region, in `1..=60`.
    pub max_depth: u32,
    /// Tolerance passed to the alpha and equality-point solvers.
    pub tol: f64,
    /// Worker threads for the core recursion. Results are byte-identical
    /// for any value: splitting is deterministic and merges in order.
    pub workers: usize,
    /// Test hook: this constant is subtracted from every defect evaluation
    /// (interval and sampled), so a positive value plants a synthetic
    /// violation. Keep at 0.0 for real verification.
    pub defect_shift: f64,
    /// Log-spaced samples per endpoint zone.
    pub endpoint_samples: u32,
    /// Uniform samples across the equality zone.
    pub equality_samples: u32,
    /// Tolerance below zero allowed for sampled defects in the equality
    /// zone (the true defect has a quadratic tangency at the equality
    /// point, so tiny negative evaluations are f64 noise, not violations).
    pub tangency_tol: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            exclusion_radius: 1e-3,
            max_depth: 40,
            tol: DEFAULT_TOL,
            workers: 1,
            defect_shift: 0.0,
            endpoint_samples: 64,
            equality_samples: 128,
            tangency_tol: 1e-12,
        }
    }
}

fn shifted_defect_iv(
    k: Exponent,
    alpha: Interval,
    x: Interval,
    shift: f64,
) -> Result<Interval> {
    let d = iv_defect(k, alpha, x)?;
    if shift == 0.0 {
        Ok(d)
    } else {
        Ok(iv_sub(d, Interval::raw(shift, shift)))
    }
}

/// Core recursion. Leaves are emitted left to right regardless of worker
/// count, so reports are reproducible byte for byte.
fn branch(
    k: Exponent,
    alpha: Interval,
    lo: f64,
    hi: f64,
    depth: u32,
    opts: &CertifyOptions,
    parallel: bool,
) -> Result<Vec<RegionStatus>> {
    let d = shifted_defect_iv(k, alpha, Interval::raw(lo, hi), opts.defect_shift)?;
    if d.lo() > 0.0 {
        return Ok(vec![RegionStatus {
            lo,
            hi,
            status: RegionStatusKind::CertifiedPositive,
            margin: d.lo(),
            certified_negative: false,
        }]);
    }
    if d.hi() < 0.0 {
        return Ok(vec![RegionStatus {
            lo,
            hi,
            status: RegionStatusKind::Failed,
            margin: d.hi(),
            certified_negative: true,
        }]);
    }
    let mid = 0.5 * (lo + hi);
    if depth >= opts.max_depth || !(mid > lo && mid < hi) {
        return Ok(vec![RegionStatus {
            lo,
            hi,
            status: RegionStatusKind::Inconclusive,
            margin: d.lo(),
            certified_negative: false,
        }]);
    }
    let (left, right) = if parallel && depth < PAR_SPLIT_DEPTH {
        rayon::join(
            || branch(k, alpha, lo, mid, depth + 1, opts, parallel),
            || branch(k, alpha, mid, hi, depth + 1, opts, parallel),
        )
    } else {
        (
            branch(k, alpha, lo, mid, depth + 1, opts, parallel),
            branch(k, alpha, mid, hi, depth + 1, opts, parallel),
        )
    };
    let mut out = left?;
    out.extend(right?);
    Ok(out)
}

/// Log-spaced endpoint-zone abscissas: `radius * 10^(-9j/(S-1))` for the
/// left zone, reflected through `1 - s` for the right.
fn endpoint_zone_samples(side: Side, radius: f64, samples: u32) -> Vec<f64> {
    let s = samples.max(2);
    (0..s)
        .map(|j| {
            let t = radius
                * 10f64.powf(-ENDPOINT_SPAN_DECADES * j as f64 / (s - 1) as f64);
            match side {
                Side::Left => t,
                Side::Right => 1.0 - t,
            }
        })
        .collect()
}

fn endpoint_zone_region(
    k: Exponent,
    cert: &AlphaCertificate,
    side: Side,
    radius: f64,
    samples: u32,
    standalone: bool,
) -> Result<RegionStatus> {
    // q tends to 1/k at both endpoints and its certified ceiling is
    // alpha_k; the heuristic demands every sample stay below the midpoint
    // of that gap, i.e. comfortably on the limit's side.
    let kv = k.value();
    let midgap = 0.5 * (1.0 / kv + cert.enclosure.lo());
    let mut max_q = f64::NEG_INFINITY;
    for x in endpoint_zone_samples(side, radius, samples) {
        max_q = max_q.max(q(k, UnitPoint::new(x)?));
    }
    let margin = midgap - max_q;
    let pass = max_q <= midgap;
    let status = match (pass, standalone) {
        (true, true) => RegionStatusKind::HeuristicPass,
        (true, false) => RegionStatusKind::EndpointZone,
        (false, _) => RegionStatusKind::Failed,
    };
    let (lo, hi) = match side {
        Side::Left => (0.0, radius),
        Side::Right => (1.0 - radius, 1.0),
    };
    Ok(RegionStatus {
        lo,
        hi,
        status,
        margin,
        certified_negative: false,
    })
}

fn equality_zone_region(
    k: Exponent,
    cert: &AlphaCertificate,
    z_lo: f64,
    z_hi: f64,
    samples: u32,
    shift: f64,
    tangency_tol: f64,
    standalone: bool,
) -> Result<RegionStatus> {
    let s = samples.max(2);
    let alpha_mid = cert.enclosure.midpoint();
    let mut min_d = f64::INFINITY;
    let mut sign_changes = 0u32;
    let mut last_sign = 0i8;
    for i in 0..s {
        let x = z_lo + (z_hi - z_lo) * i as f64 / (s - 1) as f64;
        let d = defect(k, alpha_mid, UnitPoint::new(x)?) - shift;
        min_d = min_d.min(d);
        let r = u_residual(k, x)?;
        let sign = if r > 0.0 {
            1i8
        } else if r < 0.0 {
            -1i8
        } else {
            0i8
        };
        if sign != 0 {
            if last_sign != 0 && sign != last_sign {
                sign_changes += 1;
            }
            last_sign = sign;
        }
    }
    // two sampled criteria: no sampled defect meaningfully below zero, and
    // the U-residual crossing zero exactly once (the equality point is a
    // simple tangency, not an excursion below the axis)
    let pass = min_d >= -tangency_tol && sign_changes == 1;
    let status = match (pass, standalone) {
        (true, true) => RegionStatusKind::HeuristicPass,
        (true, false) => RegionStatusKind::EqualityZone,
        (false, _) => RegionStatusKind::Failed,
    };
    Ok(RegionStatus {
        lo: z_lo,
        hi: z_hi,
        status,
        margin: min_d,
        certified_negative: false,
    })
}

fn validate_radius(radius: f64) -> Result<()> {
    if !radius.is_finite() || !(1e-6..=1e-2).contains(&radius) {
        return Err(Error::ParamRange {
            name: "exclusion_radius",
            value: radius,
            range: "[1e-6, 1e-2]",
        });
    }
    Ok(())
}

fn validate_samples(name: &'static str, samples: u32) -> Result<()> {
    if samples < 2 {
        return Err(Error::ParamRange {
            name,
            value: samples as f64,
            range: "[2, ...)",
        });
    }
    Ok(())
}

/// Standalone endpoint-zone check (the same heuristic `certify` embeds),
/// reported with the generic `heuristic_pass`/`failed` vocabulary.
pub fn zone_check_endpoint(
    k: Exponent,
    side: Side,
    radius: f64,
    samples: u32,
) -> Result<RegionStatus> {
    validate_radius(radius)?;
    validate_samples("samples", samples)?;
    let cert = solve_alpha(k, DEFAULT_TOL)?;
    endpoint_zone_region(k, &cert, side, radius, samples, true)
}

/// Standalone equality-zone check around the certified equality-point
/// enclosure padded by `radius`.
pub fn zone_check_equality(k: Exponent, radius: f64, samples: u32) -> Result<RegionStatus> {
    validate_radius(radius)?;
    validate_samples("samples", samples)?;
    let cert = solve_alpha(k, DEFAULT_TOL)?;
    let eq = equality_point(k, DEFAULT_TOL)?;
    equality_zone_region(
        k,
        &cert,
        eq.lo() - radius,
        eq.hi() + radius,
        samples,
        0.0,
        1e-12,
        true,
    )
}

/// Run the full verification pipeline for one exponent: certified alpha
/// enclosure, partition, branch-and-bound on the cores, heuristic checks on
/// the zones, and verdict assembly.
///
/// The report's regions tile `[0, 1]` exactly (adjacent regions share their
/// boundary f64), and the run is deterministic for any worker count.
pub fn certify(k: Exponent, opts: &CertifyOptions) -> Result<VerificationReport> {
    validate_radius(opts.exclusion_radius)?;
    if opts.max_depth == 0 || opts.max_depth > 60 {
        return Err(Error::ParamRange {
            name: "max_depth",
            value: opts.max_depth as f64,
            range: "[1, 60]",
        });
    }
    if opts.workers == 0 || opts.workers > 512 {
        return Err(Error::ParamRange {
            name: "workers",
            value: opts.workers as f64,
            range: "[1, 512]",
        });
    }
    validate_samples("endpoint_samples", opts.endpoint_samples)?;
    validate_samples("equality_samples", opts.equality_samples)?;
    if !opts.tangency_tol.is_finite() || opts.tangency_tol < 0.0 {
        return Err(Error::ParamRange {
            name: "tangency_tol",
            value: opts.tangency_tol,
            range: "[0, ...)",
        });
    }
    if !opts.defect_shift.is_finite() {
        return Err(Error::ParamRange {
            name: "defect_shift",
            value: opts.defect_shift,
            range: "finite reals",
        });
    }

    let cert = solve_alpha(k, opts.tol)?;
    let eq = equality_point(k, opts.tol)?;
    let eps = opts.exclusion_radius;
    let z_lo = eq.lo() - eps;
    let z_hi = eq.hi() + eps;
    let right_edge = 1.0 - eps;
    if !(eps < z_lo && z_hi < right_edge) {
        // for extreme exponents the equality point crowds an endpoint and
        // the requested radius would make the partition degenerate
        return Err(Error::ParamRange {
            name: "exclusion_radius",
            value: eps,
            range: "radii keeping the equality zone clear of the endpoint zones",
        });
    }

    let alpha = cert.enclosure;
    let run_cores = |parallel: bool| -> Result<(Vec<RegionStatus>, Vec<RegionStatus>)> {
        Ok((
            branch(k, alpha, eps, z_lo, 0, opts, parallel)?,
            branch(k, alpha, z_hi, right_edge, 0, opts, parallel)?,
        ))
    };
    let (core_left, core_right) = if opts.workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|_| Error::ParamRange {
                name: "workers",
                value: opts.workers as f64,
                range: "[1, 512]",
            })?;
        pool.install(|| run_cores(true))?
    } else {
        run_cores(false)?
    };

    let mut regions = Vec::with_capacity(core_left.len() + core_right.len() + 3);
    regions.push(endpoint_zone_region(
        k,
        &cert,
        Side::Left,
        eps,
        opts.endpoint_samples,
        false,
    )?);
    regions.extend(core_left);
    regions.push(equality_zone_region(
        k,
        &cert,
        z_lo,
        z_hi,
        opts.equality_samples,
        opts.defect_shift,
        opts.tangency_tol,
        false,
    )?);
    regions.extend(core_right);
    regions.push(endpoint_zone_region(
        k,
        &cert,
        Side::Right,
        eps,
        opts.endpoint_samples,
        false,
    )?);

    let any_certified_negative = regions.iter().any(|r| r.certified_negative);
    let any_unresolved = regions.iter().any(|r| {
        matches!(
            r.status,
            RegionStatusKind::Failed | RegionStatusKind::Inconclusive
        )
    });
    let overall = if any_certified_negative {
        Overall::Falsified
    } else if any_unresolved {
        Overall::Inconclusive
    } else {
        Overall::CertifiedExceptZones
    };
    let min_certified_margin = regions
        .iter()
        .filter(|r| r.status == RegionStatusKind::CertifiedPositive)
        .map(|r| r.margin)
        .fold(None, |acc: Option<f64>, m| {
            Some(acc.map_or(m, |a| a.min(m)))
        });

    Ok(VerificationReport {
        k: k.value(),
        alpha: AlphaBounds {
            lo: alpha.lo(),
            hi: alpha.hi(),
        },
        exclusion_radius: eps,
        overall,
        min_certified_margin,
        max_depth: opts.max_depth,
        tangency_tol: opts.tangency_tol,
        regions,
        certificate: cert,
    })
}

/// One row of a scan table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScanRow {
    pub x: f64,
    pub q: f64,
    pub d: f64,
    pub u_residual: f64,
}

/// Uniform-grid table of `q`, the defect (at the alpha enclosure midpoint),
/// and the U-residual. Endpoint rows take the limit conventions
/// `q = 1/k`, `D = 0`, `u_residual = 0`.
pub fn scan(k: Exponent, grid: u32) -> Result<Vec<ScanRow>> {
    if grid < 2 || grid > 50_000_000 {
        return Err(Error::ParamRange {
            name: "grid",
            value: grid as f64,
            range: "[2, 5e7]",
        });
    }
    let cert = solve_alpha(k, DEFAULT_TOL)?;
    let alpha_mid = cert.enclosure.midpoint();
    let kv = k.value();
    let mut rows = Vec::with_capacity(grid as usize);
    for i in 0..grid {
        let x = i as f64 / (grid - 1) as f64;
        if x == 0.0 || x == 1.0 {
            rows.push(ScanRow {
                x,
                q: 1.0 / kv,
                d: 0.0,
                u_residual: 0.0,
            });
        } else {
            let p = UnitPoint::new(x)?;
            rows.push(ScanRow {
                x,
                q: q(k, p),
                d: defect(k, alpha_mid, p),
                u_residual: u_residual(k, x)?,
            });
        }
    }
    Ok(rows)
}
