use std::fmt;

use serde::{Deserialize, Serialize};

/// Closed real interval `[lo, hi]` with `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    /// Panics if `lo > hi` or either endpoint is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        v >= self.lo - tol && v <= self.hi + tol
    }

    /// `c * self`; endpoints swap when `c < 0`.
    pub fn scale(&self, c: f64) -> Self {
        if c >= 0.0 {
            Self {
                lo: c * self.lo,
                hi: c * self.hi,
            }
        } else {
            Self {
                lo: c * self.hi,
                hi: c * self.lo,
            }
        }
    }

    /// Minkowski sum.
    pub fn add(&self, other: &Interval) -> Self {
        Self {
            lo: self.lo + other.lo,
            hi: self.hi + other.hi,
        }
    }

    /// Minkowski difference `{a - b}`.
    pub fn sub(&self, other: &Interval) -> Self {
        Self {
            lo: self.lo - other.hi,
            hi: self.hi - other.lo,
        }
    }

    pub fn hull(&self, other: &Interval) -> Self {
        Self {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn hausdorff(&self, other: &Interval) -> f64 {
        (self.lo - other.lo).abs().max((self.hi - other.hi).abs())
    }

    /// Distance from `v` to the interval (0 inside).
    pub fn distance_to(&self, v: f64) -> f64 {
        if v < self.lo {
            self.lo - v
        } else if v > self.hi {
            v - self.hi
        } else {
            0.0
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_swaps_on_negative() {
        let i = Interval::new(-1.0, 3.0);
        assert_eq!(i.scale(2.0), Interval::new(-2.0, 6.0));
        assert_eq!(i.scale(-0.5), Interval::new(-1.5, 0.5));
        assert_eq!(i.scale(0.0), Interval::point(0.0));
    }

    #[test]
    fn minkowski_ops() {
        let a = Interval::new(0.0, 1.0);
        let b = Interval::new(-1.0, 2.0);
        assert_eq!(a.add(&b), Interval::new(-1.0, 3.0));
        assert_eq!(a.sub(&b), Interval::new(-2.0, 2.0));
        assert_eq!(a.hausdorff(&b), 1.0);
        assert_eq!(b.distance_to(3.5), 1.5);
        assert_eq!(b.distance_to(0.5), 0.0);
    }

    #[test]
    #[should_panic]
    fn rejects_reversed() {
        Interval::new(1.0, 0.0);
    }
}
