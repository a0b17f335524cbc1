//! Closed-form control sets `D_x` for every supported regime of `d`, the
//! region `G0` for `d = 1`, and fiber membership.
//!
//! | regime        | `D_x`                                              |
//! |---------------|----------------------------------------------------|
//! | `0 <= d < 1`  | `[m/(1-d), M/(1-d)]`                               |
//! | `-1 < d < 0`  | `[(d M + m)/(1-d^2), (M + d m)/(1-d^2)]`           |
//! | `d = 1`       | the full fiber if `m(x) < 0 < M(x)`, otherwise none |
//! | `d = -1`      | the full fiber                                     |
//!
//! Control sets are always contained in a single fiber, so membership of a
//! point reduces to the test on its own fiber.

use serde::{Deserialize, Serialize};

use crate::affine_group::State;
use crate::error::{Error, Result};
use crate::extremal::{check_fiber, drive_range_unchecked};
use crate::interval::Interval;
use crate::system_model::{DRegime, System};

/// Shape of a set restricted to one fiber `{x} x R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FiberShape {
    Bounded { lo: f64, hi: f64 },
    FullLine,
    Singleton { value: f64 },
    Absent,
}

impl FiberShape {
    fn bounded(interval: Interval) -> Self {
        if interval.is_singleton() {
            FiberShape::Singleton { value: interval.lo }
        } else {
            FiberShape::Bounded {
                lo: interval.lo,
                hi: interval.hi,
            }
        }
    }

    /// The `y`-interval for bounded shapes (singletons included).
    pub fn interval(&self) -> Option<Interval> {
        match *self {
            FiberShape::Bounded { lo, hi } => Some(Interval::new(lo, hi)),
            FiberShape::Singleton { value } => Some(Interval::point(value)),
            _ => None,
        }
    }

    /// Absolute tolerance in `y`.
    pub fn contains(&self, y: f64, tol: f64) -> bool {
        match self {
            FiberShape::FullLine => true,
            FiberShape::Absent => false,
            _ => self.interval().is_some_and(|i| i.contains(y, tol)),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            FiberShape::Bounded { .. } => "bounded",
            FiberShape::FullLine => "full_line",
            FiberShape::Singleton { .. } => "singleton",
            FiberShape::Absent => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlSetDescriptor {
    pub fiber_x: f64,
    pub shape: FiberShape,
    pub regime: DRegime,
}

/// The `x`-extent of `G0 = {m(x) <= 0 <= M(x)}` for `d = 1`.
///
/// `lower` is inclusive when positive; `lower = 0` stands for the open end of
/// `R+`. `upper = None` means the region is a ray.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct G0Region {
    pub lower: f64,
    pub upper: Option<f64>,
    pub bounded: bool,
}

impl G0Region {
    pub fn contains_x(&self, x: f64) -> bool {
        x > 0.0 && x >= self.lower && self.upper.is_none_or(|u| x <= u)
    }

    /// The finite interval, when bounded.
    pub fn interval(&self) -> Option<Interval> {
        self.upper.map(|u| Interval::new(self.lower, u))
    }
}

/// One row of a fiber sweep: `x, shape_tag, lo, hi`, with empty bounds for
/// unbounded or absent shapes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberRow {
    pub x: f64,
    pub shape_tag: &'static str,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl From<&ControlSetDescriptor> for FiberRow {
    fn from(desc: &ControlSetDescriptor) -> Self {
        let bounds = desc.shape.interval();
        FiberRow {
            x: desc.fiber_x,
            shape_tag: desc.shape.tag(),
            lo: bounds.map(|i| i.lo),
            hi: bounds.map(|i| i.hi),
        }
    }
}

/// The fixed interval of `I -> d I + [m, M]` for `|d| < 1`.
pub(crate) fn contractive_fiber(sys: &System, x: f64) -> Interval {
    let r = drive_range_unchecked(sys, x);
    let d = sys.d();
    if d >= 0.0 {
        let den = 1.0 - d;
        Interval::new(r.lo / den, r.hi / den)
    } else {
        let den = 1.0 - d * d;
        Interval::new((d * r.hi + r.lo) / den, (r.hi + d * r.lo) / den)
    }
}

pub fn control_set_at(sys: &System, x: f64) -> Result<ControlSetDescriptor> {
    check_fiber(x)?;
    let shape = match sys.regime() {
        DRegime::ContractivePositive | DRegime::ContractiveNegative => {
            FiberShape::bounded(contractive_fiber(sys, x))
        }
        DRegime::UnitPositive => {
            let r = drive_range_unchecked(sys, x);
            if r.lo < 0.0 && 0.0 < r.hi {
                FiberShape::FullLine
            } else {
                FiberShape::Absent
            }
        }
        DRegime::UnitNegative => FiberShape::FullLine,
        DRegime::Unsupported => return Err(Error::UnsupportedRegime { d: sys.d() }),
    };
    Ok(ControlSetDescriptor {
        fiber_x: x,
        shape,
        regime: sys.regime(),
    })
}

/// `G0` for `d = 1`, solved inequality by inequality.
///
/// With `A = a + g_min <= B = a + g_max`:
/// `A x <= a` gives `x <= a/A` (A > 0), nothing (A = 0) or `x >= a/A` (A < 0);
/// `B x >= a` gives `x >= a/B` (B > 0), nothing (B = 0) or `x <= a/B` (B < 0).
/// Since `g_min <= 0 <= g_max`, `x = 1` always qualifies and the region is
/// never empty.
pub fn g0_region(sys: &System) -> Result<G0Region> {
    if sys.regime() != DRegime::UnitPositive {
        return Err(Error::RegimeMismatch {
            op: "g0_region",
            d: sys.d(),
        });
    }
    let e = sys.extremal();
    let a = sys.a();
    let (low_slope, high_slope) = (a + e.g_min, a + e.g_max);

    let mut lower: f64 = 0.0;
    let mut upper: Option<f64> = None;
    let mut cap = |bound: f64| upper = Some(upper.map_or(bound, |u: f64| u.min(bound)));

    if low_slope > 0.0 {
        cap(a / low_slope);
    } else if low_slope < 0.0 {
        lower = lower.max(a / low_slope);
    }
    if high_slope > 0.0 {
        lower = lower.max(a / high_slope);
    } else if high_slope < 0.0 {
        cap(a / high_slope);
    }
    Ok(G0Region {
        lower,
        upper,
        bounded: upper.is_some(),
    })
}

/// The control set containing `point`, if any (`tol` is absolute in `y`).
pub fn membership(sys: &System, point: &State, tol: f64) -> Result<Option<ControlSetDescriptor>> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be non-negative, got {tol}"
        )));
    }
    let desc = control_set_at(sys, point.x())?;
    Ok(desc.shape.contains(point.y(), tol).then_some(desc))
}

/// Descriptors for `x = x_min, x_min + step, ...` up to `x_max`.
pub fn sweep(sys: &System, x_min: f64, x_max: f64, step: f64) -> Result<Vec<ControlSetDescriptor>> {
    check_fiber(x_min)?;
    if !(step > 0.0) || !(x_max >= x_min) || !x_max.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "sweep needs 0 < x_min <= x_max and step > 0, got [{x_min}, {x_max}] step {step}"
        )));
    }
    let count = ((x_max - x_min) / step + 1e-9).floor() as usize;
    (0..=count)
        .map(|i| control_set_at(sys, x_min + step * i as f64))
        .collect()
}
