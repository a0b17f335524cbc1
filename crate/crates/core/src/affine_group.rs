//! The bidimensional affine group `Aff(2,R)` in coordinates `(x, y)`, `x > 0`.
//!
//! Product law: `(x1, y1) . (x2, y2) = (x1 x2, y2 + x2 y1)`, identity `(1, 0)`,
//! inverse `(1/x, -y/x)`. Under this law every solution of the linear system
//! factors as `phi(k, g, u) = phi(k, e, u) . f0^k(g)`; the opposite convention
//! `(x1 x2, y1 + x1 y2)` does not have that property.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of `Aff(2,R)`. Serialized as the pair `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct GroupElement {
    x: f64,
    y: f64,
}

/// States of the control system are group elements.
pub type State = GroupElement;

impl GroupElement {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::NonFinite { field: "x" });
        }
        if !y.is_finite() {
            return Err(Error::NonFinite { field: "y" });
        }
        if x <= 0.0 {
            return Err(Error::NonPositiveX { x });
        }
        Ok(Self { x, y })
    }

    pub fn identity() -> Self {
        Self { x: 1.0, y: 0.0 }
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.y
    }

    /// Same fiber, new translational coordinate.
    #[inline]
    pub fn with_y(&self, y: f64) -> Self {
        Self { x: self.x, y }
    }

    pub fn multiply(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            x: self.x * other.x,
            y: other.y + other.x * self.y,
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            x: 1.0 / self.x,
            y: -self.y / self.x,
        }
    }

    /// Euclidean distance in the `(x, y)` chart. This is the metric used for
    /// every ball and chain-jump test in the crate.
    pub fn distance(&self, other: &GroupElement) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl std::ops::Mul for GroupElement {
    type Output = GroupElement;

    fn mul(self, rhs: GroupElement) -> GroupElement {
        self.multiply(&rhs)
    }
}

impl TryFrom<[f64; 2]> for GroupElement {
    type Error = Error;

    fn try_from(pair: [f64; 2]) -> Result<Self> {
        GroupElement::new(pair[0], pair[1])
    }
}

impl From<GroupElement> for [f64; 2] {
    fn from(g: GroupElement) -> Self {
        [g.x, g.y]
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

pub fn identity() -> GroupElement {
    GroupElement::identity()
}

pub fn multiply(g1: &GroupElement, g2: &GroupElement) -> GroupElement {
    g1.multiply(g2)
}

pub fn inverse(g: &GroupElement) -> GroupElement {
    g.inverse()
}
