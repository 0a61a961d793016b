//! A small combinatorial lab for the approximate union-closed frequency
//! bound associated with the entropy inequality.
//!
//! For a finite family `F` of subsets of `[n]` and an integer `k >= 2`, let
//! `c` be the fraction of ordered `k`-tuples of members (repetition
//! allowed, `|F|^k` in total) whose union lies in `F`, and `epsilon = 1-c`.
//! If `epsilon < 1/2`, some element of the ground set must appear in at
//! least
//!
//! ```text
//! alpha_k/(1 + alpha_k) - (k epsilon + 2 epsilon ln(1/epsilon)/ln|F|)^(1/(k-1))
//! ```
//!
//! fraction of the members. This module counts `c` exactly (dynamic program
//! over distinct unions), evaluates the bound with directed rounding so a
//! reported violation can never be a rounding artifact, and offers
//! exhaustive (tiny `n`) and seeded random searches for counterexamples.

use crate::alpha::{frequency_threshold_from, solve_alpha, AlphaCertificate, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::interval::{div_down, div_up, iv_add, iv_div, iv_log, iv_mul, iv_neg, iv_pow_pos, sub_down, Interval};
use crate::scalar::Exponent;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Exact tuple enumeration refuses to count past this many ordered tuples.
pub const SCALE_GUARD: u64 = 1_000_000_000;

const TUPLE_CONVENTION: &str = "ordered_with_repetition";

/// A family of distinct subsets of `[n]`, `1 <= n <= 16`, stored as bit
/// masks (bit `i` = element `i+1`) in ascending mask order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFamily {
    n: u8,
    members: Vec<u16>,
}

impl SetFamily {
    pub fn new(n: u8, mut members: Vec<u16>) -> Result<Self> {
        if n == 0 || n > 16 {
            return Err(Error::FamilyInvalid(format!(
                "ground-set size must be 1..=16, got {n}"
            )));
        }
        if members.is_empty() {
            return Err(Error::FamilyInvalid(
                "family needs at least one subset".into(),
            ));
        }
        let limit = if n == 16 { u16::MAX } else { (1u16 << n) - 1 };
        if let Some(&bad) = members.iter().find(|&&m| m > limit) {
            return Err(Error::FamilyInvalid(format!(
                "mask {bad:#x} has bits outside the {n}-element ground set"
            )));
        }
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::FamilyInvalid("duplicate subset".into()));
        }
        Ok(Self { n, members })
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn members(&self) -> &[u16] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the constructor rejects empty families
    }

    /// Parse the text format: first nonblank line is `n`, then one subset
    /// per line as comma-separated 1-based elements, with `∅` for the empty
    /// set. Blank lines are skipped; errors carry 1-based line numbers.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut n: u8 = 0;
        let mut header_seen = false;
        let mut members: Vec<u16> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let s = raw.trim();
            if s.is_empty() {
                continue;
            }
            if !header_seen {
                n = s.parse().map_err(|_| Error::FamilyParse {
                    line,
                    msg: format!("expected the ground-set size, got {s:?}"),
                })?;
                if n == 0 || n > 16 {
                    return Err(Error::FamilyParse {
                        line,
                        msg: format!("ground-set size must be 1..=16, got {n}"),
                    });
                }
                header_seen = true;
                continue;
            }
            let mask = if s == "∅" {
                0u16
            } else {
                let mut m = 0u16;
                for part in s.split(',') {
                    let p = part.trim();
                    let e: u32 = p.parse().map_err(|_| Error::FamilyParse {
                        line,
                        msg: format!("expected an element in 1..={n}, got {p:?}"),
                    })?;
                    if e == 0 || e > n as u32 {
                        return Err(Error::FamilyParse {
                            line,
                            msg: format!("element {e} outside 1..={n}"),
                        });
                    }
                    let bit = 1u16 << (e - 1);
                    if m & bit != 0 {
                        return Err(Error::FamilyParse {
                            line,
                            msg: format!("duplicate element {e}"),
                        });
                    }
                    m |= bit;
                }
                m
            };
            if members.contains(&mask) {
                return Err(Error::FamilyParse {
                    line,
                    msg: "duplicate subset".into(),
                });
            }
            members.push(mask);
        }
        if !header_seen {
            return Err(Error::FamilyParse {
                line: 1,
                msg: "empty input".into(),
            });
        }
        Self::new(n, members)
    }

    /// Inverse of [`SetFamily::from_text`], in canonical ascending order.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for &mask in &self.members {
            if mask == 0 {
                out.push_str("∅\n");
            } else {
                let elems: Vec<String> = (0..self.n)
                    .filter(|&i| mask >> i & 1 == 1)
                    .map(|i| (i + 1).to_string())
                    .collect();
                out.push_str(&elems.join(","));
                out.push('\n');
            }
        }
        out
    }

    /// Exact union-closedness: every pairwise union is again a member.
    pub fn is_union_closed(&self) -> bool {
        let mut present = vec![false; 1usize << self.n];
        for &a in &self.members {
            present[a as usize] = true;
        }
        for (i, &a) in self.members.iter().enumerate() {
            for &b in &self.members[i..] {
                if !present[(a | b) as usize] {
                    return false;
                }
            }
        }
        true
    }

    /// The most frequent element as `(element, count, |F|)` with 1-based
    /// element index; ties break to the smallest element.
    pub fn max_frequency(&self) -> (u16, u64, u64) {
        let m = self.members.len() as u64;
        let mut best_elem = 1u16;
        let mut best = 0u64;
        for i in 0..self.n {
            let c = self
                .members
                .iter()
                .filter(|&&a| a >> i & 1 == 1)
                .count() as u64;
            if c > best {
                best = c;
                best_elem = i as u16 + 1;
            }
        }
        (best_elem, best, m)
    }
}

/// Exact count of union-in-family tuples: `in_family / total` is the
/// closure fraction `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosureCounts {
    pub in_family: u64,
    pub total: u64,
}

/// Count, over all `|F|^k` ordered `k`-tuples of members, how many have
/// their union inside the family.
///
/// Dynamic program over distinct union values: `N_{j+1}[u | a] += N_j[u]`
/// for each member `a`. Cost is `O(k * |F| * 2^n)` in the worst case, far
/// below the `|F|^k` of naive enumeration, but the result is the exact
/// naive count. Refuses (rather than runs forever) when `|F|^k` exceeds
/// [`SCALE_GUARD`].
pub fn closure_fraction(f: &SetFamily, k: u32) -> Result<ClosureCounts> {
    if k < 2 {
        return Err(Error::ParamRange {
            name: "k",
            value: k as f64,
            range: "integers >= 2",
        });
    }
    let m = f.members.len() as u64;
    let mut total: u64 = 1;
    for _ in 0..k {
        total = total
            .checked_mul(m)
            .filter(|&t| t <= SCALE_GUARD)
            .ok_or(Error::ScaleGuard {
                size: m,
                k,
                limit: SCALE_GUARD,
            })?;
    }
    let size = 1usize << f.n;
    let mut counts = vec![0u64; size];
    let mut active: Vec<u16> = f.members.clone();
    for &a in &f.members {
        counts[a as usize] = 1;
    }
    for _ in 1..k {
        let mut next = vec![0u64; size];
        for &u in &active {
            let c = counts[u as usize];
            for &a in &f.members {
                next[(u | a) as usize] += c;
            }
        }
        active = (0..size)
            .filter(|&u| next[u] > 0)
            .map(|u| u as u16)
            .collect();
        counts = next;
    }
    let in_family = f.members.iter().map(|&a| counts[a as usize]).sum();
    Ok(ClosureCounts { in_family, total })
}

/// The frequency bound, reported two ways: `bound` is the plain midpoint
/// evaluation used for display, `conservative_lo` is a directed-rounding
/// lower bound — a frequency below `conservative_lo` is a genuine
/// violation, not noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorollaryBound {
    pub bound: f64,
    pub conservative_lo: f64,
}

fn corollary_bound_iv(
    k: u32,
    eps: Interval,
    family_size: u64,
    cert: &AlphaCertificate,
) -> Result<CorollaryBound> {
    if family_size < 1 {
        return Err(Error::ParamRange {
            name: "family_size",
            value: family_size as f64,
            range: "[1, ...)",
        });
    }
    if k < 2 {
        return Err(Error::ParamRange {
            name: "k",
            value: k as f64,
            range: "integers >= 2",
        });
    }
    if eps.lo() < 0.0 || eps.hi() >= 0.5 {
        return Err(Error::ParamRange {
            name: "epsilon",
            value: eps.hi(),
            range: "[0, 0.5)",
        });
    }
    let thr = frequency_threshold_from(cert);
    if eps.hi() == 0.0 {
        // a perfectly union-closed family: delta vanishes exactly, and the
        // size (hence ln|F|) never enters
        return Ok(CorollaryBound {
            bound: thr.midpoint(),
            conservative_lo: thr.lo(),
        });
    }
    if family_size < 2 {
        // only here does ln|F| appear, and ln 1 = 0 would divide by zero;
        // unreachable from closure counting, where one member forces eps = 0
        return Err(Error::ParamRange {
            name: "family_size",
            value: family_size as f64,
            range: "[2, ...) when epsilon > 0",
        });
    }
    debug_assert!(eps.lo() > 0.0, "positive epsilon cannot round down to 0");
    let kf = Interval::raw(k as f64, k as f64); // small integers are exact
    let size = Interval::raw(family_size as f64, family_size as f64);
    let two = Interval::raw(2.0, 2.0);
    // t = k*eps + 2*eps*ln(1/eps)/ln|F|, all terms positive
    let t = iv_add(
        iv_mul(kf, eps),
        iv_div(
            iv_mul(iv_mul(two, eps), iv_neg(iv_log(eps)?)),
            iv_log(size)?,
        )?,
    );
    // delta = t^(1/(k-1)) with the exponent itself an interval
    let inv_k1 = iv_div(Interval::ONE, iv_add(kf, iv_neg(Interval::ONE)))?;
    let delta = iv_pow_pos(t, inv_k1)?;
    Ok(CorollaryBound {
        bound: thr.midpoint() - delta.midpoint(),
        conservative_lo: sub_down(thr.lo(), delta.hi()),
    })
}

/// Evaluate the frequency bound for a point value of `epsilon` in
/// `[0, 1/2)` and a family of `family_size >= 2` members.
pub fn corollary_bound(
    k: u32,
    epsilon: f64,
    family_size: u64,
    cert: &AlphaCertificate,
) -> Result<CorollaryBound> {
    if !epsilon.is_finite() || !(0.0..0.5).contains(&epsilon) {
        return Err(Error::ParamRange {
            name: "epsilon",
            value: epsilon,
            range: "[0, 0.5)",
        });
    }
    corollary_bound_iv(k, Interval::raw(epsilon, epsilon), family_size, cert)
}

/// Everything the `check` command reports about one family at one `k`.
/// Field order is the JSON wire order.
#[derive(Debug, Clone, Serialize)]
pub struct ClosureStats {
    pub k: u32,
    /// Closure fraction `in_family / |F|^k` (midpoint value for display).
    pub c: f64,
    /// `1 - c`, ditto.
    pub epsilon: f64,
    pub max_freq: MaxFreq,
    /// 1-based most frequent element (smallest on ties).
    pub max_freq_element: u16,
    /// The frequency bound, or `None` when `epsilon >= 1/2` (no claim).
    pub bound: Option<f64>,
    /// Whether the most frequent element meets the bound. Compared against
    /// the conservative (rounded-down) bound, so `false` is trustworthy.
    /// Vacuously `true` when no bound applies.
    pub satisfied: bool,
}

/// Exact rational frequency of the most frequent element.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MaxFreq {
    pub count: u64,
    pub of: u64,
}

/// Compute [`ClosureStats`] for one family, reusing an alpha certificate.
pub fn closure_stats(f: &SetFamily, k: u32, cert: &AlphaCertificate) -> Result<ClosureStats> {
    let counts = closure_fraction(f, k)?;
    let bad = counts.total - counts.in_family;
    let c = counts.in_family as f64 / counts.total as f64;
    let (elem, num, den) = f.max_frequency();
    // strictness is decided on the exact rational, not the rounded float
    let eps_defined = 2 * bad < counts.total;
    let (bound, satisfied) = if eps_defined {
        let eps_iv = Interval::raw(
            div_down(bad as f64, counts.total as f64).max(0.0),
            div_up(bad as f64, counts.total as f64),
        );
        let b = corollary_bound_iv(k, eps_iv, den, cert)?;
        let freq_up = div_up(num as f64, den as f64);
        (Some(b.bound), freq_up >= b.conservative_lo)
    } else {
        (None, true)
    };
    Ok(ClosureStats {
        k,
        c,
        epsilon: bad as f64 / counts.total as f64,
        max_freq: MaxFreq {
            count: num,
            of: den,
        },
        max_freq_element: elem,
        bound,
        satisfied,
    })
}

/// A family that beat the bound in an exhaustive sweep. `encoding` is the
/// bitmap over subset masks that reconstructs the family.
#[derive(Debug, Clone, Serialize)]
pub struct ExhaustiveViolation {
    pub encoding: u64,
    pub max_freq: f64,
    pub bound: f64,
    pub slack: f64,
}

/// Report of an exhaustive sweep over every family on `[n]`.
#[derive(Debug, Clone, Serialize)]
pub struct UcsReport {
    pub n: u8,
    pub k: u32,
    pub families_checked: u64,
    /// Families whose exact tuple count tripped the scale guard at this `k`
    /// and were therefore not evaluated.
    pub families_skipped: u64,
    pub violations: Vec<ExhaustiveViolation>,
    /// Minimum of `max_freq - bound` over families where the bound applied.
    pub min_slack: Option<f64>,
    pub tuple_convention: &'static str,
}

/// A violating family found by the random probe, with enough data to replay.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeViolation {
    pub trial: u64,
    pub members: Vec<u16>,
    pub max_freq: f64,
    pub bound: f64,
    pub slack: f64,
}

/// Report of a seeded random probe.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub n: u8,
    pub k: u32,
    pub trials: u64,
    pub seed: u64,
    /// Trials whose drawn family tripped the scale guard at this `k` and was
    /// therefore not evaluated (at `n = 16` with `k >= 2` that is nearly
    /// every draw; the guard keeps exact counting at desk scale).
    pub families_skipped: u64,
    pub violations: Vec<ProbeViolation>,
    pub min_slack: Option<f64>,
    pub tuple_convention: &'static str,
}

fn family_slack(stats: &ClosureStats) -> Option<f64> {
    stats
        .bound
        .map(|b| stats.max_freq.count as f64 / stats.max_freq.of as f64 - b)
}

fn build_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|_| Error::ParamRange {
            name: "workers",
            value: workers as f64,
            range: "[1, 512]",
        })
}

fn validate_workers(workers: usize) -> Result<()> {
    if workers == 0 || workers > 512 {
        return Err(Error::ParamRange {
            name: "workers",
            value: workers as f64,
            range: "[1, 512]",
        });
    }
    Ok(())
}

/// Check every family of subsets of `[n]` (`n <= 4`), excluding the empty
/// family and the family `{∅}`, against the frequency bound.
///
/// Families are encoded as bitmaps `r` over the `2^n` subset masks, so the
/// sweep covers `2^(2^n) - 2` families; results are independent of worker
/// count. A family whose exact tuple count `|F|^k` trips the scale guard
/// (possible for `k >= 8` at `n = 4`) is counted in `families_skipped`
/// instead of aborting the sweep.
pub fn exhaustive_check(n: u8, k: u32, workers: usize) -> Result<UcsReport> {
    if n == 0 || n > 4 {
        return Err(Error::ParamRange {
            name: "n",
            value: n as f64,
            range: "1..=4 for exhaustive sweeps",
        });
    }
    validate_workers(workers)?;
    let cert = solve_alpha(Exponent::new(k as f64)?, DEFAULT_TOL)?;
    let subsets = 1u32 << n;
    let encodings: u64 = 1u64 << subsets;

    let eval = |r: u64| -> Result<SweepOutcome<ExhaustiveViolation>> {
        let members: Vec<u16> = (0..subsets)
            .filter(|&i| r >> i & 1 == 1)
            .map(|i| i as u16)
            .collect();
        let fam = SetFamily::new(n, members)?;
        let stats = match closure_stats(&fam, k, &cert) {
            Err(Error::ScaleGuard { .. }) => return Ok(SweepOutcome::Skipped),
            other => other?,
        };
        let slack = family_slack(&stats);
        let violation = if stats.bound.is_some() && !stats.satisfied {
            Some(ExhaustiveViolation {
                encoding: r,
                max_freq: stats.max_freq.count as f64 / stats.max_freq.of as f64,
                bound: stats.bound.unwrap(),
                slack: slack.unwrap(),
            })
        } else {
            None
        };
        Ok(SweepOutcome::Checked(violation, slack))
    };

    // r = 0 is the empty family, r = 1 is {∅}; both are excluded
    let results: Vec<SweepOutcome<ExhaustiveViolation>> = if workers > 1 {
        use rayon::prelude::*;
        build_pool(workers)?
            .install(|| (2..encodings).into_par_iter().map(eval).collect::<Result<Vec<_>>>())?
    } else {
        (2..encodings).map(eval).collect::<Result<Vec<_>>>()?
    };

    let folded = fold_outcomes(results);
    Ok(UcsReport {
        n,
        k,
        families_checked: encodings - 2 - folded.skipped,
        families_skipped: folded.skipped,
        violations: folded.violations,
        min_slack: folded.min_slack,
        tuple_convention: TUPLE_CONVENTION,
    })
}

/// Per-family result inside a sweep: evaluated (with an optional violation
/// and slack) or skipped by the scale guard.
enum SweepOutcome<V> {
    Checked(Option<V>, Option<f64>),
    Skipped,
}

struct FoldedSweep<V> {
    violations: Vec<V>,
    min_slack: Option<f64>,
    skipped: u64,
}

fn fold_outcomes<V>(results: Vec<SweepOutcome<V>>) -> FoldedSweep<V> {
    let mut folded = FoldedSweep {
        violations: Vec::new(),
        min_slack: None,
        skipped: 0,
    };
    for outcome in results {
        match outcome {
            SweepOutcome::Checked(v, s) => {
                if let Some(v) = v {
                    folded.violations.push(v);
                }
                if let Some(s) = s {
                    folded.min_slack = Some(folded.min_slack.map_or(s, |m| m.min(s)));
                }
            }
            SweepOutcome::Skipped => folded.skipped += 1,
        }
    }
    folded
}

/// Draw one family on `[n]`: each of the `2^n` subsets is included
/// independently with probability 1/2.
fn draw_family(n: u8, rng: &mut ChaCha8Rng) -> Vec<u16> {
    let masks = 1u32 << n;
    let mut members = Vec::new();
    let mut i = 0u32;
    while i < masks {
        let mut w = rng.next_u64();
        let take = (masks - i).min(64);
        for j in 0..take {
            if w & 1 == 1 {
                members.push((i + j) as u16);
            }
            w >>= 1;
        }
        i += take;
    }
    members
}

/// Seeded random search over families on `[n]` (`n <= 16`).
///
/// Trial `t` uses ChaCha8 stream `t` of the given seed, so results are
/// reproducible and independent of worker count; empty and `{∅}`-only draws
/// are rejected and redrawn within the trial's own stream. Each family gets
/// the same exact checks as [`exhaustive_check`]; a draw too large for
/// exact counting at this `k` is counted in `families_skipped` rather than
/// failing the whole probe (with membership probability 1/2 per subset,
/// that is nearly every draw once `2^(n-1)` exceeds the guard's `k`-th
/// root, e.g. all of `n = 16` for `k >= 2`).
pub fn random_probe(
    n: u8,
    k: u32,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<ProbeReport> {
    if n == 0 || n > 16 {
        return Err(Error::ParamRange {
            name: "n",
            value: n as f64,
            range: "1..=16",
        });
    }
    validate_workers(workers)?;
    let cert = solve_alpha(Exponent::new(k as f64)?, DEFAULT_TOL)?;

    let eval = |trial: u64| -> Result<SweepOutcome<ProbeViolation>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let fam = loop {
            let members = draw_family(n, &mut rng);
            let degenerate = members.is_empty() || members == [0u16];
            if !degenerate {
                break SetFamily::new(n, members)?;
            }
        };
        let stats = match closure_stats(&fam, k, &cert) {
            Err(Error::ScaleGuard { .. }) => return Ok(SweepOutcome::Skipped),
            other => other?,
        };
        let slack = family_slack(&stats);
        let violation = if stats.bound.is_some() && !stats.satisfied {
            Some(ProbeViolation {
                trial,
                members: fam.members().to_vec(),
                max_freq: stats.max_freq.count as f64 / stats.max_freq.of as f64,
                bound: stats.bound.unwrap(),
                slack: slack.unwrap(),
            })
        } else {
            None
        };
        Ok(SweepOutcome::Checked(violation, slack))
    };

    let results: Vec<SweepOutcome<ProbeViolation>> = if workers > 1 && trials > 1 {
        use rayon::prelude::*;
        build_pool(workers)?
            .install(|| (0..trials).into_par_iter().map(eval).collect::<Result<Vec<_>>>())?
    } else {
        (0..trials).map(eval).collect::<Result<Vec<_>>>()?
    };

    let folded = fold_outcomes(results);
    Ok(ProbeReport {
        n,
        k,
        trials,
        seed,
        families_skipped: folded.skipped,
        violations: folded.violations,
        min_slack: folded.min_slack,
        tuple_convention: TUPLE_CONVENTION,
    })
}
