//! Extrema of the control-dependent drive `p(u, x) = (a + g(u)) x - a`.
//!
//! For `x > 0` the map `u -> p(u, x)` is an increasing affine image of `g`, so
//! its optimizers over `U` do not depend on `x`: the drive range on the fiber
//! `x` is `[m(x), M(x)] = [(a + g_min) x - a, (a + g_max) x - a]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::poly::Polynomial;
use crate::system_model::{DRegime, System};

/// Certified global extrema of `g` on `U`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalData {
    pub g_min: f64,
    pub g_max: f64,
    /// Smallest minimizer.
    pub u_m: f64,
    /// Smallest maximizer.
    #[serde(rename = "u_M")]
    pub u_big_m: f64,
}

/// The affine map `x -> slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineLine {
    pub slope: f64,
    pub intercept: f64,
}

impl AffineLine {
    pub fn eval(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }

    /// Euclidean distance from `(x, y)` to the graph of the line.
    pub fn distance(&self, x: f64, y: f64) -> f64 {
        (y - self.eval(x)).abs() / self.slope.hypot(1.0)
    }
}

/// Extrema of `g` over `[u_min, u_max]` from the endpoints and the certified
/// real critical points of `g` inside the interval.
pub(crate) fn extremal_data_of(g: &Polynomial, u_min: f64, u_max: f64) -> Result<ExtremalData> {
    let mut candidates = vec![u_min, u_max];
    candidates.extend(g.derivative().real_roots_in(u_min, u_max)?);
    candidates.sort_by(f64::total_cmp);

    let mut best_min = (g.eval(candidates[0]), candidates[0]);
    let mut best_max = best_min;
    for &u in &candidates[1..] {
        let v = g.eval(u);
        // strict comparisons keep the smallest optimizer on ties
        if v < best_min.0 {
            best_min = (v, u);
        }
        if v > best_max.0 {
            best_max = (v, u);
        }
    }
    Ok(ExtremalData {
        g_min: best_min.0,
        g_max: best_max.0,
        u_m: best_min.1,
        u_big_m: best_max.1,
    })
}

pub fn extremal_data(sys: &System) -> ExtremalData {
    *sys.extremal()
}

pub(crate) fn check_fiber(x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::NonFinite { field: "x" });
    }
    if x <= 0.0 {
        return Err(Error::NonPositiveX { x });
    }
    Ok(())
}

/// `p(u, x) = (a + g(u)) x - a`.
pub fn drive(sys: &System, u: f64, x: f64) -> Result<f64> {
    sys.check_control(u)?;
    check_fiber(x)?;
    Ok(drive_unchecked(sys, u, x))
}

#[inline]
pub(crate) fn drive_unchecked(sys: &System, u: f64, x: f64) -> f64 {
    sys.g().eval(u) * x + sys.a() * (x - 1.0)
}

/// `[m(x), M(x)]`.
pub fn drive_range(sys: &System, x: f64) -> Result<Interval> {
    check_fiber(x)?;
    Ok(drive_range_unchecked(sys, x))
}

#[inline]
pub(crate) fn drive_range_unchecked(sys: &System, x: f64) -> Interval {
    // written as g x + a (x - 1) so that x = 1 gives [g_min, g_max] exactly
    let e = sys.extremal();
    let shift = sys.a() * (x - 1.0);
    Interval::new(e.g_min * x + shift, e.g_max * x + shift)
}

/// Some control `u` with `p(u, x) = level`, for `level` in `[m(x), M(x)]`.
/// Values outside the range are clamped to the nearest optimizer.
pub(crate) fn control_for_drive(sys: &System, x: f64, level: f64) -> f64 {
    let e = sys.extremal();
    // p(u, x) = level  <=>  g(u) = (level - a (x - 1)) / x
    let target = (level - sys.a() * (x - 1.0)) / x;
    if target <= e.g_min {
        return e.u_m;
    }
    if target >= e.g_max {
        return e.u_big_m;
    }
    sys.g().solve_level(target, e.u_m, e.u_big_m)
}

/// The lines `eta(x) = M(x)/(1-d)` and `mu(x) = m(x)/(1-d)`, returned as
/// `(eta, mu)`. Only meaningful for `|d| < 1`.
pub fn boundary_curves(sys: &System) -> Result<(AffineLine, AffineLine)> {
    if !sys.regime().is_contractive() {
        return Err(Error::RegimeMismatch {
            op: "boundary_curves",
            d: sys.d(),
        });
    }
    let e = sys.extremal();
    let a = sys.a();
    let one_minus_d = 1.0 - sys.d();
    // adding 0.0 turns -0.0 into 0.0
    let intercept = -a / one_minus_d + 0.0;
    Ok((
        AffineLine {
            slope: (a + e.g_max) / one_minus_d,
            intercept,
        },
        AffineLine {
            slope: (a + e.g_min) / one_minus_d,
            intercept,
        },
    ))
}

/// Upper and lower edges of the union of control sets, as lines in `x`:
/// `eta`, `mu` for `0 <= d < 1`, and the endpoints
/// `(M + d m)/(1 - d^2)`, `(d M + m)/(1 - d^2)` for `-1 < d < 0`.
pub fn envelope_lines(sys: &System) -> Result<(AffineLine, AffineLine)> {
    match sys.regime() {
        DRegime::ContractivePositive => boundary_curves(sys),
        DRegime::ContractiveNegative => {
            let e = sys.extremal();
            let (a, d) = (sys.a(), sys.d());
            let den = 1.0 - d * d;
            let (big, small) = (a + e.g_max, a + e.g_min);
            // both edges share the intercept -a(1 + d)/(1 - d^2) = -a/(1 - d)
            let intercept = -a * (1.0 + d) / den + 0.0;
            Ok((
                AffineLine {
                    slope: (big + d * small) / den,
                    intercept,
                },
                AffineLine {
                    slope: (d * big + small) / den,
                    intercept,
                },
            ))
        }
        _ => Err(Error::RegimeMismatch {
            op: "envelope_lines",
            d: sys.d(),
        }),
    }
}
