//! Univariate real polynomials with certified real-root isolation on a
//! closed interval.
//!
//! Root isolation is recursive on the degree: the real roots of `p'` cut the
//! interval into pieces on which `p` is monotone, and each piece holds at most
//! one root, found by bisection down to adjacent floats.

use crate::error::{Error, Result};

/// Relative residual bound used to certify a root.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    /// `coeffs[i]` multiplies `u^i`. Trailing zeros are trimmed.
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    /// Builds `c[0] u + c[1] u^2 + ...`, i.e. a polynomial with no constant term.
    pub fn from_nonconstant(coeffs: &[f64]) -> Self {
        let mut full = Vec::with_capacity(coeffs.len() + 1);
        full.push(0.0);
        full.extend_from_slice(coeffs);
        Self::new(full)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn constant_term(&self) -> f64 {
        self.coeffs.first().copied().unwrap_or(0.0)
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c)
    }

    /// Sum of `|c_i| |u|^i`: the natural scale for the rounding error of `eval`.
    pub fn magnitude(&self, u: f64) -> f64 {
        let au = u.abs();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * au + c.abs())
    }

    pub fn derivative(&self) -> Polynomial {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        Polynomial::new(coeffs)
    }

    /// All real roots in `[lo, hi]`, ascending, each certified by a residual
    /// check. Roots of even multiplicity are found through the critical
    /// points of the recursion. The zero polynomial has no isolated roots and
    /// yields an empty list.
    pub fn real_roots_in(&self, lo: f64, hi: f64) -> Result<Vec<f64>> {
        if lo > hi {
            return Ok(Vec::new());
        }
        match self.degree() {
            None | Some(0) => return Ok(Vec::new()),
            Some(1) => {
                let r = -self.coeffs[0] / self.coeffs[1];
                return Ok(if r >= lo && r <= hi {
                    vec![r]
                } else {
                    Vec::new()
                });
            }
            _ => {}
        }
        let mut cuts = vec![lo];
        cuts.extend(self.derivative().real_roots_in(lo, hi)?);
        cuts.push(hi);

        let mut roots: Vec<f64> = Vec::new();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (self.eval(a), self.eval(b));
            let candidate = if self.is_negligible(a, fa) {
                Some(a)
            } else if self.is_negligible(b, fb) {
                Some(b)
            } else if fa.signum() != fb.signum() {
                Some(self.bisect(a, b, fa))
            } else {
                None
            };
            if let Some(r) = candidate {
                if roots.last().is_none_or(|&last| r > last) {
                    roots.push(r);
                }
            }
        }
        for &r in &roots {
            self.certify(r)?;
        }
        Ok(roots)
    }

    /// Some `u` in `[lo, hi]` with `p(u) = level`, assuming `p(lo)` and
    /// `p(hi)` bracket the level. Endpoints may come in either order.
    pub fn solve_level(&self, level: f64, lo: f64, hi: f64) -> f64 {
        let (flo, fhi) = (self.eval(lo) - level, self.eval(hi) - level);
        if flo == 0.0 {
            return lo;
        }
        if fhi == 0.0 {
            return hi;
        }
        let (mut a, mut b, mut fa) = (lo, hi, flo);
        loop {
            let mid = 0.5 * (a + b);
            if mid == a || mid == b {
                break;
            }
            let fm = self.eval(mid) - level;
            if fm == 0.0 {
                return mid;
            }
            if fm.signum() == fa.signum() {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        // pick whichever endpoint lands closer to the level
        if (self.eval(a) - level).abs() <= (self.eval(b) - level).abs() {
            a
        } else {
            b
        }
    }

    fn is_negligible(&self, u: f64, value: f64) -> bool {
        value.abs() <= ROOT_RESIDUAL_TOL * self.magnitude(u).max(f64::MIN_POSITIVE)
    }

    fn certify(&self, u: f64) -> Result<()> {
        let residual = self.eval(u).abs();
        let scale = self.magnitude(u).max(1.0);
        if residual <= ROOT_RESIDUAL_TOL * scale {
            Ok(())
        } else {
            Err(Error::RootFindingFailure { u, residual })
        }
    }

    fn bisect(&self, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
        loop {
            let mid = 0.5 * (a + b);
            if mid == a || mid == b {
                break;
            }
            let fm = self.eval(mid);
            if fm == 0.0 {
                return mid;
            }
            if fm.signum() == fa.signum() {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        if self.eval(a).abs() <= self.eval(b).abs() {
            a
        } else {
            b
        }
    }
}
