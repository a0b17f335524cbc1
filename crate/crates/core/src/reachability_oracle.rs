//! Exact reachable and controllable `y`-sets on a fiber by interval recursion.
//!
//! On the fiber `x` one step maps a point `y` onto `d y + [m(x), M(x)]`, and
//! the image of an interval is again an interval, so
//!
//! ```text
//! R_0 = [y, y],   R_{k+1} = d R_k + [m(x), M(x)]
//! C_0 = [z, z],   C_{k+1} = (C_k - [m(x), M(x)]) / d
//! ```
//!
//! are the exact step-`k` reachable and controllable sets. Nothing here uses
//! the closed-form control-set formulas.

use serde::{Deserialize, Serialize};

use crate::control_sets::{control_set_at, FiberShape};
use crate::error::{Error, Result};
use crate::extremal::{check_fiber, drive_range_unchecked};
use crate::interval::Interval;
use crate::system_model::System;

/// Hard cap on iterations of the limit search.
const MAX_LIMIT_ITERATIONS: usize = 50_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReachTrace {
    pub fiber_x: f64,
    pub start_y: f64,
    pub intervals: Vec<Interval>,
    pub horizon: usize,
}

/// One CSV row of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub lo: f64,
    pub hi: f64,
}

impl ReachTrace {
    pub fn rows(&self) -> impl Iterator<Item = TraceRow> + '_ {
        self.intervals.iter().enumerate().map(|(k, i)| TraceRow {
            k,
            lo: i.lo,
            hi: i.hi,
        })
    }

    pub fn last(&self) -> Interval {
        *self
            .intervals
            .last()
            .expect("trace always holds the start interval")
    }
}

#[inline]
fn forward(current: &Interval, d: f64, drive: &Interval) -> Interval {
    current.scale(d).add(drive)
}

pub fn reach_trace(sys: &System, x: f64, y: f64, horizon: usize) -> Result<ReachTrace> {
    check_fiber(x)?;
    let drive = drive_range_unchecked(sys, x);
    let mut intervals = Vec::with_capacity(horizon + 1);
    let mut cur = Interval::point(y);
    intervals.push(cur);
    for _ in 0..horizon {
        cur = forward(&cur, sys.d(), &drive);
        intervals.push(cur);
    }
    Ok(ReachTrace {
        fiber_x: x,
        start_y: y,
        intervals,
        horizon,
    })
}

/// Backward recursion: `intervals[k]` holds every `y` steerable onto `y_target` in `k` steps.
pub fn control_trace(sys: &System, x: f64, y_target: f64, horizon: usize) -> Result<ReachTrace> {
    check_fiber(x)?;
    if sys.d() == 0.0 {
        return Err(Error::SingularInverse);
    }
    let drive = drive_range_unchecked(sys, x);
    let inv = 1.0 / sys.d();
    let mut intervals = Vec::with_capacity(horizon + 1);
    let mut cur = Interval::point(y_target);
    intervals.push(cur);
    for _ in 0..horizon {
        cur = cur.sub(&drive).scale(inv);
        intervals.push(cur);
    }
    Ok(ReachTrace {
        fiber_x: x,
        start_y: y_target,
        intervals,
        horizon,
    })
}

/// Attracting fixed interval of `I -> d I + [m, M]` for `|d| < 1`, reached by
/// iterating from `[y, y]`.
///
/// The map is a `|d|`-contraction in the Hausdorff metric, so once a step
/// moves the interval by `delta` the remaining error is at most
/// `delta |d| / (1 - |d|)`; iteration stops when that bound drops below
/// `tol` or movement reaches the rounding floor.
pub fn limit_interval(sys: &System, x: f64, y: f64, tol: f64) -> Result<Interval> {
    check_fiber(x)?;
    if !sys.regime().is_contractive() {
        return Err(Error::RegimeMismatch {
            op: "limit_interval",
            d: sys.d(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let d = sys.d();
    let factor = d.abs() / (1.0 - d.abs());
    let drive = drive_range_unchecked(sys, x);
    let mut cur = Interval::point(y);
    for _ in 0..MAX_LIMIT_ITERATIONS {
        let next = forward(&cur, d, &drive);
        let moved = next.hausdorff(&cur);
        let floor = 4.0 * f64::EPSILON * next.lo.abs().max(next.hi.abs());
        cur = next;
        if moved * factor < tol || moved <= floor {
            break;
        }
    }
    Ok(cur)
}

/// Which reachable-set convention a union starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnionStart {
    /// `k >= 0`: the start point itself counts.
    Zero,
    /// `k >= 1`: only points reached in positive time.
    One,
}

/// How a point was shown to lie in the closure of the reachable set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReachWitness {
    /// Inside the step-`k` set (up to the tolerance).
    Step(usize),
    /// Inside the limit interval only.
    Limit,
}

/// Is `z` within `tol` of the closure of `union_k R_k(y)`?
///
/// For `|d| < 1` the union's closure is the finitely many sets before
/// convergence together with the limit interval. For `|d| = 1` the sets are
/// scanned up to `max_steps`.
pub fn reach_union_witness(
    sys: &System,
    x: f64,
    y: f64,
    z: f64,
    tol: f64,
    start: UnionStart,
    max_steps: usize,
) -> Result<Option<ReachWitness>> {
    check_fiber(x)?;
    let d = sys.d();
    let drive = drive_range_unchecked(sys, x);
    let mut cur = Interval::point(y);
    if start == UnionStart::Zero && cur.contains(z, tol) {
        return Ok(Some(ReachWitness::Step(0)));
    }
    if sys.regime().is_contractive() {
        let limit = limit_interval(sys, x, y, tol.max(1e-15) * 1e-3)?;
        let settled = tol.max(1e-12 * (1.0 + limit.lo.abs().max(limit.hi.abs())));
        let mut k = 0;
        while k < max_steps {
            cur = forward(&cur, d, &drive);
            k += 1;
            if cur.contains(z, tol) {
                return Ok(Some(ReachWitness::Step(k)));
            }
            if cur.hausdorff(&limit) <= settled {
                break;
            }
        }
        return Ok(limit.contains(z, tol).then_some(ReachWitness::Limit));
    }
    for k in 1..=max_steps {
        cur = forward(&cur, d, &drive);
        if cur.contains(z, tol) {
            return Ok(Some(ReachWitness::Step(k)));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxControllabilityReport {
    pub fiber_x: f64,
    pub shape: FiberShape,
    pub pairs_checked: usize,
    /// Pairs `(y, z)` for which `z` was not found in the closure of the
    /// reachable set of `y`.
    pub failures: Vec<(f64, f64)>,
    /// For full-fiber sets: whether both endpoints of the reachable sets
    /// diverge linearly.
    pub diverges: Option<bool>,
    pub pass: bool,
}

/// Half-width of the window sampled on full fibers.
const FULL_LINE_WINDOW: f64 = 10.0;

/// Checks that every sampled `z` in the control set lies in the closure of the
/// reachable set of every sampled `y` in it, using the `k >= 1` union.
pub fn approx_controllability_check(
    sys: &System,
    x: f64,
    samples: usize,
    tol: f64,
) -> Result<ApproxControllabilityReport> {
    let desc = control_set_at(sys, x)?;
    let (lo, hi) = match desc.shape {
        FiberShape::Absent => return Err(Error::NoControlSet { x }),
        FiberShape::FullLine => (-FULL_LINE_WINDOW, FULL_LINE_WINDOW),
        other => {
            let i = other.interval().expect("bounded shape");
            (i.lo, i.hi)
        }
    };
    let pairs = sample_pairs(lo, hi, samples);
    let diverges = match desc.shape {
        FiberShape::FullLine => Some(diverges_linearly(sys, x)?),
        _ => None,
    };
    let max_steps = match desc.shape {
        FiberShape::FullLine => full_line_budget(sys, x, hi - lo),
        _ => usize::MAX,
    };
    let mut failures = Vec::new();
    for &(y, z) in &pairs {
        let w = reach_union_witness(sys, x, y, z, tol, UnionStart::One, max_steps)?;
        if w.is_none() {
            failures.push((y, z));
        }
    }
    let pass = failures.is_empty() && diverges != Some(false);
    Ok(ApproxControllabilityReport {
        fiber_x: x,
        shape: desc.shape,
        pairs_checked: pairs.len(),
        failures,
        diverges,
        pass,
    })
}

/// Endpoint pairs first, then a golden-ratio sequence over the square.
fn sample_pairs(lo: f64, hi: f64, samples: usize) -> Vec<(f64, f64)> {
    const PHI: f64 = 0.618_033_988_749_894_8;
    const PSI: f64 = 0.754_877_666_246_692_7;
    let mut pairs = vec![(lo, hi), (hi, lo), (lo, lo), (hi, hi)];
    let w = hi - lo;
    for i in 1..=samples.saturating_sub(4) {
        let fy = (i as f64 * PHI).fract();
        let fz = (i as f64 * PSI).fract();
        pairs.push((lo + fy * w, lo + fz * w));
    }
    pairs.truncate(samples.max(1));
    pairs
}

/// Steps needed to cross a window of the given width at the slowest
/// endpoint speed, with slack.
fn full_line_budget(sys: &System, x: f64, width: f64) -> usize {
    let r = drive_range_unchecked(sys, x);
    let speed = if sys.d() > 0.0 {
        (-r.lo).min(r.hi)
    } else {
        0.5 * r.width()
    };
    if speed <= 0.0 {
        return 1_000;
    }
    ((2.0 * width / speed).ceil() as usize)
        .saturating_add(4)
        .min(10_000_000)
}

/// Both endpoints drift apart at a positive linear rate over two steps.
fn diverges_linearly(sys: &System, x: f64) -> Result<bool> {
    let trace = reach_trace(sys, x, 0.0, 64)?;
    let iv = &trace.intervals;
    let rate = (iv[64].hi - iv[62].hi).min(iv[62].lo - iv[64].lo);
    if !(rate > 0.0) {
        return Ok(false);
    }
    let tol = 1e-9 * (1.0 + iv[64].hi.abs() + iv[64].lo.abs());
    Ok((2..=62)
        .step_by(2)
        .all(|k| iv[k + 2].hi - iv[k].hi >= rate - tol && iv[k].lo - iv[k + 2].lo >= rate - tol))
}
