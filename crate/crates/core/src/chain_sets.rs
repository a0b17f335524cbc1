//! The chain control set `E`, `(eps, k)`-controlled chains, and escape
//! certificates for points outside `E`.
//!
//! * `|d| < 1`: `E` is the union of the fiber control sets, the region between
//!   two lines through `(0, -a/(1-d))`.
//! * `d = 1`: `E` is `G0 = {m(x) <= 0 <= M(x)}`, a union of full fibers.
//! * `d = -1`: `E` is the whole group.
//!
//! Chains are built constructively: hops run the dynamics for at least
//! `min_time` steps with explicit control words, and jumps (of length below
//! `epsilon`) carry the chain across fibers, which the dynamics never do.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::affine_group::{GroupElement, State};
use crate::control_sets::{contractive_fiber, g0_region, FiberShape, G0Region};
use crate::dynamics::{solution, step_unchecked};
use crate::error::{Error, Result};
use crate::extremal::{
    check_fiber, control_for_drive, drive_range_unchecked, envelope_lines, AffineLine,
};
use crate::system_model::{ControlWord, DRegime, System};

/// Membership slack used when checking that chain endpoints lie in `E`.
pub const CHAIN_SET_TOL: f64 = 1e-9;

/// Longest single hop used while steering on a full fiber.
const MAX_HOP_STEPS: usize = 20_000;

/// Upper bound on hops in one chain; guards against non-terminating plans.
const MAX_HOPS: usize = 2_000_000;

/// An `(epsilon, min_time)`-controlled chain.
///
/// Hop `i` runs `words[i]` for `times[i]` steps from `points[i]`; the chain is
/// valid when every hop lands strictly within `epsilon` of `points[i + 1]`
/// and `times[i] >= min_time`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainDescriptor {
    pub epsilon: f64,
    pub min_time: usize,
    pub points: Vec<State>,
    pub times: Vec<usize>,
    pub words: Vec<ControlWord>,
}

impl ChainDescriptor {
    pub fn hops(&self) -> usize {
        self.words.len()
    }

    fn check_shape(&self) -> Result<()> {
        let malformed = |msg: String| Err(Error::MalformedChain(msg));
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return malformed(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.min_time == 0 {
            return malformed("min_time must be at least 1".into());
        }
        if self.words.is_empty() {
            return malformed("a chain needs at least one hop".into());
        }
        if self.points.len() != self.words.len() + 1 {
            return malformed(format!(
                "{} points for {} words",
                self.points.len(),
                self.words.len()
            ));
        }
        if self.times.len() != self.words.len() {
            return malformed(format!(
                "{} times for {} words",
                self.times.len(),
                self.words.len()
            ));
        }
        if let Some(i) = (0..self.words.len()).find(|&i| self.words[i].len() < self.times[i]) {
            return malformed(format!(
                "word {i} has {} entries but time {}",
                self.words[i].len(),
                self.times[i]
            ));
        }
        Ok(())
    }
}

/// Outcome of [`validate_chain`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub pass: bool,
    /// `|phi(times[i], points[i], words[i]) - points[i + 1]|` per hop.
    pub distances: Vec<f64>,
    /// Hops whose distance is not below `epsilon`.
    pub distance_violations: Vec<usize>,
    /// Hops shorter than `min_time`.
    pub time_violations: Vec<usize>,
}

pub fn validate_chain(sys: &System, chain: &ChainDescriptor) -> Result<ChainReport> {
    chain.check_shape()?;
    let mut distances = Vec::with_capacity(chain.hops());
    let mut distance_violations = Vec::new();
    let mut time_violations = Vec::new();
    for i in 0..chain.hops() {
        let end = solution(
            sys,
            &chain.points[i],
            &chain.words[i],
            chain.times[i] as i64,
        )?;
        let dist = end.distance(&chain.points[i + 1]);
        if !(dist < chain.epsilon) {
            distance_violations.push(i);
        }
        if chain.times[i] < chain.min_time {
            time_violations.push(i);
        }
        distances.push(dist);
    }
    Ok(ChainReport {
        pass: distance_violations.is_empty() && time_violations.is_empty(),
        distances,
        distance_violations,
        time_violations,
    })
}

/// The chain control set of a system, queried fiber by fiber.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSetDescriptor {
    sys: System,
    g0: Option<G0Region>,
}

impl ChainSetDescriptor {
    pub fn regime(&self) -> DRegime {
        self.sys.regime()
    }

    /// `x`-extent of `E` when `d = 1`.
    pub fn g0(&self) -> Option<&G0Region> {
        self.g0.as_ref()
    }

    pub fn fiber_map(&self, x: f64) -> Result<FiberShape> {
        check_fiber(x)?;
        Ok(match self.sys.regime() {
            DRegime::ContractivePositive | DRegime::ContractiveNegative => {
                let i = contractive_fiber(&self.sys, x);
                if i.is_singleton() {
                    FiberShape::Singleton { value: i.lo }
                } else {
                    FiberShape::Bounded { lo: i.lo, hi: i.hi }
                }
            }
            DRegime::UnitPositive => {
                let g0 = self.g0.expect("g0 is set for d = 1");
                if g0.contains_x(x) {
                    FiberShape::FullLine
                } else {
                    FiberShape::Absent
                }
            }
            DRegime::UnitNegative => FiberShape::FullLine,
            DRegime::Unsupported => return Err(Error::UnsupportedRegime { d: self.sys.d() }),
        })
    }

    /// `tol` is absolute in `y` and in `x` at the edges of `G0`.
    pub fn contains(&self, p: &State, tol: f64) -> bool {
        if let Some(g0) = &self.g0 {
            let inside_x = p.x() >= g0.lower - tol && g0.upper.is_none_or(|u| p.x() <= u + tol);
            return inside_x;
        }
        self.fiber_map(p.x())
            .map(|shape| shape.contains(p.y(), tol))
            .unwrap_or(false)
    }
}

pub fn chain_set(sys: &System) -> Result<ChainSetDescriptor> {
    let g0 = match sys.regime() {
        DRegime::Unsupported => return Err(Error::UnsupportedRegime { d: sys.d() }),
        DRegime::UnitPositive => Some(g0_region(sys)?),
        _ => None,
    };
    Ok(ChainSetDescriptor {
        sys: sys.clone(),
        g0,
    })
}

/// Accumulates hops and jumps, checking each jump as it is made.
struct ChainBuilder<'a> {
    sys: &'a System,
    epsilon: f64,
    min_time: usize,
    points: Vec<State>,
    times: Vec<usize>,
    words: Vec<ControlWord>,
    landing: Option<State>,
}

impl<'a> ChainBuilder<'a> {
    fn new(sys: &'a System, from: State, epsilon: f64, min_time: usize) -> Self {
        Self {
            sys,
            epsilon,
            min_time,
            points: vec![from],
            times: Vec::new(),
            words: Vec::new(),
            landing: None,
        }
    }

    fn current(&self) -> State {
        *self.points.last().expect("builder starts with a point")
    }

    fn hop(&mut self, word: ControlWord) -> Result<State> {
        debug_assert!(self.landing.is_none(), "hop without a jump in between");
        if self.words.len() >= MAX_HOPS {
            return Err(Error::InvalidArgument(format!(
                "chain exceeds {MAX_HOPS} hops; epsilon {} is too small for this pair",
                self.epsilon
            )));
        }
        let end = solution(self.sys, &self.current(), &word, word.len() as i64)?;
        self.times.push(word.len());
        self.words.push(word);
        self.landing = Some(end);
        Ok(end)
    }

    fn jump(&mut self, next: State) -> Result<()> {
        let landing = self.landing.take().expect("jump follows a hop");
        let dist = landing.distance(&next);
        if !(dist < self.epsilon) {
            return Err(Error::InvalidArgument(format!(
                "jump of length {dist} from {landing} to {next} exceeds epsilon {}; \
                 epsilon is too small for the floating-point resolution here",
                self.epsilon
            )));
        }
        self.points.push(next);
        Ok(())
    }

    fn finish(self) -> ChainDescriptor {
        ChainDescriptor {
            epsilon: self.epsilon,
            min_time: self.min_time,
            points: self.points,
            times: self.times,
            words: self.words,
        }
    }
}

/// Evenly spaced fibers from `from` to `to` with spacing at most `stride`.
fn fiber_path(from: f64, to: f64, stride: f64) -> Vec<f64> {
    let n = ((to - from).abs() / stride).ceil().max(1.0) as usize;
    let mut xs: Vec<f64> = (0..=n)
        .map(|i| from + (to - from) * i as f64 / n as f64)
        .collect();
    xs[n] = to;
    xs
}

/// Smallest `T >= min_time` (even when `even`) with `|d|^T * gap < tol`.
fn settle_time(d: f64, gap: f64, tol: f64, min_time: usize, even: bool) -> usize {
    let mut t = 0usize;
    let mut decay = 1.0f64;
    while t < min_time || decay * gap >= tol || (even && t % 2 == 1) {
        t += 1;
        decay *= d.abs();
    }
    t
}

/// A word steering `y` toward `target` on fiber `x` for `|d| < 1`, with
/// `target` inside `D_x`.
///
/// `0 <= d < 1`: the constant word whose fixed point is `target`.
/// `-1 < d < 0`: the 2-periodic word `(u, v)` with
/// `target = (d p(u) + p(v)) / (1 - d^2)`, run for an even number of steps.
/// Either way the error after `T` steps is `|d|^T |y - target|`.
fn contractive_word(
    sys: &System,
    x: f64,
    y: f64,
    target: f64,
    min_time: usize,
    tol: f64,
) -> ControlWord {
    let d = sys.d();
    let r = drive_range_unchecked(sys, x);
    let gap = (y - target).abs();
    if d >= 0.0 {
        let u = control_for_drive(sys, x, target * (1.0 - d));
        ControlWord::constant(u, settle_time(d, gap, tol, min_time, false))
    } else {
        let spread = r.width();
        let lambda = if spread > 0.0 {
            ((target * (1.0 - d * d) - (d * r.hi + r.lo)) / (spread * (1.0 - d))).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let first = control_for_drive(sys, x, r.hi - lambda * spread);
        let second = control_for_drive(sys, x, r.lo + lambda * spread);
        ControlWord::alternating(first, second, settle_time(d, gap, tol, min_time, true))
    }
}

/// Steers `y` to `target` and doubles the horizon until the simulated landing
/// is within `tol` (rounding can leave the first estimate slightly short).
fn contractive_hop(
    sys: &System,
    at: &State,
    target: f64,
    min_time: usize,
    tol: f64,
) -> Result<ControlWord> {
    let mut word = contractive_word(sys, at.x(), at.y(), target, min_time, tol);
    for _ in 0..8 {
        let end = solution(sys, at, &word, word.len() as i64)?;
        if (end.y() - target).abs() < tol {
            break;
        }
        let longer = word.len() * 2;
        word = ControlWord::new(
            word.as_slice()
                .iter()
                .copied()
                .cycle()
                .take(longer)
                .collect(),
        );
    }
    Ok(word)
}

/// Per-step speeds `(up, down)` at which a full fiber moves `y` when `|d| = 1`.
fn unit_speeds(sys: &System, x: f64) -> (f64, f64) {
    let r = drive_range_unchecked(sys, x);
    if sys.d() > 0.0 {
        (r.hi.max(0.0), (-r.lo).max(0.0))
    } else {
        let half = 0.5 * r.width();
        (half, half)
    }
}

/// A word leaving `y` unchanged for `|d| = 1` (the fiber must be in `E`).
fn unit_stay_word(sys: &System, x: f64, min_time: usize) -> ControlWord {
    if sys.d() > 0.0 {
        ControlWord::constant(control_for_drive(sys, x, 0.0), min_time)
    } else {
        ControlWord::constant(0.0, min_time + min_time % 2)
    }
}

/// A word moving `y` toward `target` by as much as one hop of at most
/// `MAX_HOP_STEPS` steps allows, for `|d| = 1`.
fn unit_word(sys: &System, x: f64, y: f64, target: f64, min_time: usize) -> ControlWord {
    let r = drive_range_unchecked(sys, x);
    let delta = target - y;
    let (up, down) = unit_speeds(sys, x);
    let speed = if delta >= 0.0 { up } else { down };
    let cap = MAX_HOP_STEPS.max(min_time);
    if sys.d() > 0.0 {
        let needed = if speed > 0.0 {
            (delta.abs() / speed).ceil()
        } else {
            0.0
        };
        let steps = (needed.min(cap as f64) as usize).max(min_time);
        let per_step = (delta / steps as f64).clamp(r.lo.min(0.0), r.hi.max(0.0));
        ControlWord::constant(control_for_drive(sys, x, per_step), steps)
    } else {
        // pairs (u, v) move y by p(v) - p(u)
        let per_pair_max = 2.0 * speed;
        let needed = if per_pair_max > 0.0 {
            (delta.abs() / per_pair_max).ceil()
        } else {
            0.0
        };
        let pairs = (needed.min((cap / 2) as f64) as usize).max(min_time.div_ceil(2));
        let shift = (delta / pairs as f64).clamp(-r.width(), r.width());
        let mid = 0.5 * (r.lo + r.hi);
        let first = control_for_drive(sys, x, (mid - 0.5 * shift).clamp(r.lo, r.hi));
        let second = control_for_drive(sys, x, (mid + 0.5 * shift).clamp(r.lo, r.hi));
        ControlWord::alternating(first, second, 2 * pairs)
    }
}

/// Builds an `(epsilon, min_time)`-controlled chain from `from` to `to`.
///
/// For `|d| < 1` the chain settles on the upper edge of `D_x` and follows
/// that edge across fibers in strides short enough that each jump stays below
/// `epsilon`, then steers to the target inside its fiber. For `|d| = 1` it
/// crosses fibers at constant `y` and adjusts `y` on the fiber along the way
/// where the dynamics move it fastest; where they cannot move it at all, jumps
/// walk `y` in steps below `epsilon`.
pub fn build_chain(
    sys: &System,
    from: &State,
    to: &State,
    epsilon: f64,
    min_time: usize,
) -> Result<ChainDescriptor> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if min_time == 0 {
        return Err(Error::InvalidArgument("min_time must be at least 1".into()));
    }
    let set = chain_set(sys)?;
    for p in [from, to] {
        if !set.contains(p, CHAIN_SET_TOL) {
            return Err(if sys.regime() == DRegime::UnitPositive {
                Error::Unreachable { x: p.x(), y: p.y() }
            } else {
                Error::NotInChainSet { x: p.x(), y: p.y() }
            });
        }
    }
    let chain = if sys.regime().is_contractive() {
        build_contractive(sys, from, to, epsilon, min_time)?
    } else {
        build_unit(sys, &set, from, to, epsilon, min_time)?
    };
    debug_assert!(validate_chain(sys, &chain).map(|r| r.pass).unwrap_or(false));
    Ok(chain)
}

fn build_contractive(
    sys: &System,
    from: &State,
    to: &State,
    epsilon: f64,
    min_time: usize,
) -> Result<ChainDescriptor> {
    let tol = epsilon / 20.0;
    let mut b = ChainBuilder::new(sys, *from, epsilon, min_time);
    let clamp_into = |x: f64, y: f64| {
        let i = contractive_fiber(sys, x);
        y.clamp(i.lo, i.hi)
    };
    if from.x() != to.x() {
        let (upper, _) = envelope_lines(sys)?;
        let stride = 0.9 * epsilon / upper.slope.hypot(1.0);
        let xs = fiber_path(from.x(), to.x(), stride);
        for pair in xs.windows(2) {
            let here = b.current();
            let rest = contractive_fiber(sys, pair[0]).hi;
            let word = contractive_hop(sys, &here, rest, min_time, tol)?;
            b.hop(word)?;
            b.jump(GroupElement::new(
                pair[1],
                contractive_fiber(sys, pair[1]).hi,
            )?)?;
        }
    }
    let here = b.current();
    let target = clamp_into(to.x(), to.y());
    let word = contractive_hop(sys, &here, target, min_time, tol)?;
    b.hop(word)?;
    b.jump(*to)?;
    Ok(b.finish())
}

fn build_unit(
    sys: &System,
    set: &ChainSetDescriptor,
    from: &State,
    to: &State,
    epsilon: f64,
    min_time: usize,
) -> Result<ChainDescriptor> {
    let tol = epsilon / 20.0;
    let stride = 0.9 * epsilon;
    let target = to.y();
    let pivot = pivot_fiber(sys, set, from.x(), to.x(), target - from.y());
    let mut b = ChainBuilder::new(sys, *from, epsilon, min_time);

    march_level(&mut b, pivot, stride, min_time)?;

    // steer on the pivot fiber
    let x = pivot;
    while (b.current().y() - target).abs() >= tol {
        let here = b.current();
        let remaining = (target - here.y()).abs();
        let landing = b.hop(unit_word(sys, x, here.y(), target, min_time))?;
        let left = (target - landing.y()).abs();
        let next_y = if left < tol {
            target
        } else if left < remaining - tol {
            landing.y()
        } else {
            // the dynamics make no headway here: walk by jumps
            let walk = (0.9 * epsilon).min(left);
            landing.y() + walk.copysign(target - landing.y())
        };
        b.jump(GroupElement::new(x, next_y)?)?;
    }

    march_level(&mut b, to.x(), stride, min_time)?;
    // the chain ends on `to` after at least one hop
    let last = b.current();
    if b.words.is_empty() || last != *to {
        b.hop(unit_stay_word(sys, last.x(), min_time))?;
        b.jump(*to)?;
    }
    Ok(b.finish())
}

/// Crosses fibers toward `x_end` at the current `y` using stay words.
fn march_level(b: &mut ChainBuilder<'_>, x_end: f64, stride: f64, min_time: usize) -> Result<()> {
    let start = b.current();
    if start.x() == x_end {
        return Ok(());
    }
    let xs = fiber_path(start.x(), x_end, stride);
    for pair in xs.windows(2) {
        b.hop(unit_stay_word(b.sys, pair[0], min_time))?;
        b.jump(GroupElement::new(pair[1], start.y())?)?;
    }
    Ok(())
}

/// Fiber on which to adjust `y` for `|d| = 1`: the candidate with the fastest
/// motion in the needed direction, preferring fibers between the endpoints.
fn pivot_fiber(sys: &System, set: &ChainSetDescriptor, x_from: f64, x_to: f64, delta: f64) -> f64 {
    let speed_at = |x: f64| {
        let (up, down) = unit_speeds(sys, x);
        if delta >= 0.0 {
            up
        } else {
            down
        }
    };
    let (lo, hi) = (x_from.min(x_to), x_from.max(x_to));
    let mut candidates = vec![x_from, x_to];
    // one unit beyond the endpoints, clipped to E
    let (mut outer_lo, mut outer_hi) = ((lo - 1.0).max(0.5 * lo), hi + 1.0);
    if let Some(g0) = set.g0() {
        outer_lo = outer_lo.max(g0.lower);
        if let Some(u) = g0.upper {
            outer_hi = outer_hi.min(u);
        }
    }
    candidates.push(outer_lo);
    candidates.push(outer_hi);
    let inner_best = if speed_at(x_from) >= speed_at(x_to) {
        x_from
    } else {
        x_to
    };
    let outer_best = candidates
        .into_iter()
        .filter(|&x| x > 0.0)
        .max_by(|&p, &q| speed_at(p).total_cmp(&speed_at(q)))
        .unwrap_or(inner_best);
    // leave the path only for a real gain in speed
    if speed_at(outer_best) > 2.0 * speed_at(inner_best) {
        outer_best
    } else {
        inner_best
    }
}

/// Which edge of `E` a certificate guards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EscapeSide {
    Above,
    Below,
}

/// The strip `A1` just outside the guarded edge of `E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub boundary: AffineLine,
    pub side: EscapeSide,
    /// Vertical width `(delta + eps0) / cos(alpha)`.
    pub width: f64,
}

impl Band {
    pub fn contains(&self, p: &State) -> bool {
        let offset = match self.side {
            EscapeSide::Above => p.y() - self.boundary.eval(p.x()),
            EscapeSide::Below => self.boundary.eval(p.x()) - p.y(),
        };
        offset > 0.0 && offset <= self.width
    }
}

/// Witness that no `(delta, min_time)`-controlled chain starting in `E`
/// reaches `target`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeCertificate {
    pub target: State,
    /// Distance from `target` to the nearer edge of `E`.
    pub r: f64,
    pub delta: f64,
    pub eps0: f64,
    pub min_time: usize,
    /// Angle between the normal to the edge and the vertical.
    pub alpha: f64,
    pub band: Band,
}

/// `|d|^k` by repeated multiplication.
fn abs_pow(d: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, _| acc * d.abs())
}

/// Builds the certificate for `target` outside `E` (`|d| < 1`); `eps0`
/// defaults to `delta / 2`.
pub fn escape_certificate(
    sys: &System,
    target: &State,
    eps0: Option<f64>,
) -> Result<EscapeCertificate> {
    if !sys.regime().is_contractive() {
        return Err(Error::RegimeMismatch {
            op: "escape_certificate",
            d: sys.d(),
        });
    }
    let (upper, lower) = envelope_lines(sys)?;
    let (x, y) = (target.x(), target.y());
    let (boundary, side) = if y > upper.eval(x) {
        (upper, EscapeSide::Above)
    } else if y < lower.eval(x) {
        (lower, EscapeSide::Below)
    } else {
        return Err(Error::InsideChainSet { x, y });
    };
    let r = boundary.distance(x, y);
    let delta = r / 4.0;
    let eps0 = eps0.unwrap_or(delta / 2.0);
    if !(eps0 > 0.0 && eps0 < delta) {
        return Err(Error::InvalidArgument(format!(
            "eps0 must lie in (0, delta) = (0, {delta}), got {eps0}"
        )));
    }
    let mut min_time = 1;
    while !(abs_pow(sys.d(), min_time) * (delta + eps0) < eps0) {
        min_time += 1;
    }
    let alpha = boundary.slope.abs().atan();
    Ok(EscapeCertificate {
        target: *target,
        r,
        delta,
        eps0,
        min_time,
        alpha,
        band: Band {
            boundary,
            side,
            width: (delta + eps0) / alpha.cos(),
        },
    })
}

/// Checks the arithmetic identities a certificate must satisfy.
pub fn certificate_is_consistent(sys: &System, cert: &EscapeCertificate) -> bool {
    cert.delta == cert.r / 4.0
        && cert.eps0 > 0.0
        && cert.eps0 < cert.delta
        && abs_pow(sys.d(), cert.min_time) * (cert.delta + cert.eps0) < cert.eps0
        && cert.band.width.is_finite()
        && cert.band.width > 0.0
        && (0.0..std::f64::consts::FRAC_PI_2).contains(&cert.alpha)
}

/// Result of throwing perturbed chains at a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressSummary {
    pub attempts: usize,
    pub max_hops: usize,
    pub hops_run: usize,
    /// Smallest distance from any hop's landing point to the target.
    pub closest_approach: f64,
    /// Hops that landed within `delta` of the target.
    pub breaches: usize,
    pub pass: bool,
}

/// Runs `attempts` adversarial chains of up to `max_hops` hops, each starting
/// in `E`, with hop times `>= min_time` and every jump a perturbation of norm
/// below `delta` aimed at the target. Attempt `i` draws from its own seeded
/// generator, so the summary depends only on `seed`.
pub fn stress_certificate(
    sys: &System,
    cert: &EscapeCertificate,
    attempts: usize,
    max_hops: usize,
    seed: u64,
) -> Result<StressSummary> {
    let results: Vec<(usize, f64, usize)> = (0..attempts)
        .into_par_iter()
        .map(|i| run_attempt(sys, cert, max_hops, attempt_seed(seed, i)))
        .collect::<Result<_>>()?;
    let hops_run = results.iter().map(|r| r.0).sum();
    let closest_approach = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let breaches = results.iter().map(|r| r.2).sum();
    Ok(StressSummary {
        attempts,
        max_hops,
        hops_run,
        closest_approach,
        breaches,
        pass: breaches == 0,
    })
}

fn attempt_seed(seed: u64, i: usize) -> u64 {
    seed ^ (i as u64)
        .wrapping_add(1)
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Word that pushes hardest toward the guarded side: the extremal word whose
/// last entry realizes `M` (above) or `m` (below).
fn adversarial_word(sys: &System, side: EscapeSide, len: usize) -> ControlWord {
    let e = sys.extremal();
    let (push, other) = match side {
        EscapeSide::Above => (e.u_big_m, e.u_m),
        EscapeSide::Below => (e.u_m, e.u_big_m),
    };
    if sys.d() >= 0.0 {
        ControlWord::constant(push, len)
    } else {
        ControlWord::new(
            (0..len)
                .map(|j| {
                    if (len - 1 - j).is_multiple_of(2) {
                        push
                    } else {
                        other
                    }
                })
                .collect(),
        )
    }
}

fn run_attempt(
    sys: &System,
    cert: &EscapeCertificate,
    max_hops: usize,
    seed: u64,
) -> Result<(usize, f64, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = cert.target;
    let x0 = rng.gen_range((0.25 * target.x())..(2.0 * target.x() + 1.0));
    let fiber = contractive_fiber(sys, x0);
    let y0 = if fiber.is_singleton() {
        fiber.lo
    } else {
        rng.gen_range(fiber.lo..=fiber.hi)
    };
    let mut p = GroupElement::new(x0, y0)?;
    let mut closest = f64::INFINITY;
    let mut breaches = 0;
    let mut hops = 0;
    for _ in 0..max_hops {
        let len = cert.min_time + rng.gen_range(0..4);
        let word = if rng.gen_bool(0.5) {
            adversarial_word(sys, cert.band.side, len)
        } else {
            ControlWord::new(
                (0..len)
                    .map(|_| rng.gen_range(sys.u_min()..=sys.u_max()))
                    .collect(),
            )
        };
        let mut end = p;
        for &u in word.as_slice() {
            end = step_unchecked(sys, &end, u);
        }
        hops += 1;
        let dist = end.distance(&target);
        closest = closest.min(dist);
        if dist < cert.delta {
            breaches += 1;
        }
        // jump toward the target by just under delta
        let norm = cert.delta * (1.0 - 1e-3 * rng.gen::<f64>()) * (1.0 - 1e-12);
        let (dx, dy) = (target.x() - end.x(), target.y() - end.y());
        let len = dx.hypot(dy);
        let (jx, jy) = if len > 0.0 {
            (dx / len * norm, dy / len * norm)
        } else {
            (0.0, 0.0)
        };
        let nx = end.x() + jx;
        p = if nx > 0.0 {
            GroupElement::new(nx, end.y() + jy)?
        } else {
            end
        };
    }
    Ok((hops, closest, breaches))
}
