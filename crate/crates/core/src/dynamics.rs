//! The controlled map `f_u(x, y) = (x, a(x - 1) + d y + g(u) x)`, its inverse,
//! and solutions over finite control words.
//!
//! Every map here preserves the fiber coordinate `x`.

use crate::affine_group::State;
use crate::error::{Error, Result};
use crate::extremal::drive_unchecked;
use crate::system_model::{ControlWord, System};

/// One forward step `f_u`.
pub fn step(sys: &System, s: &State, u: f64) -> Result<State> {
    sys.check_control(u)?;
    Ok(step_unchecked(sys, s, u))
}

#[inline]
pub(crate) fn step_unchecked(sys: &System, s: &State, u: f64) -> State {
    s.with_y(sys.d() * s.y() + drive_unchecked(sys, u, s.x()))
}

/// One backward step `f_u^{-1}(x, y) = (x, (y - p(u, x)) / d)`.
pub fn step_back(sys: &System, s: &State, u: f64) -> Result<State> {
    sys.check_control(u)?;
    if sys.d() == 0.0 {
        return Err(Error::SingularInverse);
    }
    Ok(s.with_y((s.y() - drive_unchecked(sys, u, s.x())) / sys.d()))
}

/// `phi(k, s, word)`.
///
/// For `k > 0` the first `k` entries are applied in order. For `k < 0` the
/// first `|k|` entries are undone last-to-first, so that
/// `solution(solution(s, w, k), w, -k) == s`.
pub fn solution(sys: &System, s: &State, word: &ControlWord, k: i64) -> Result<State> {
    let steps = k.unsigned_abs() as usize;
    if steps > word.len() {
        return Err(Error::IndexOutOfRange {
            index: steps,
            len: word.len(),
        });
    }
    let used = &word.as_slice()[..steps];
    if k >= 0 {
        used.iter().try_fold(*s, |acc, &u| step(sys, &acc, u))
    } else {
        used.iter()
            .rev()
            .try_fold(*s, |acc, &u| step_back(sys, &acc, u))
    }
}

/// Forward trajectory `phi(0..=k, s, word)`.
pub fn trajectory(sys: &System, s: &State, word: &ControlWord, k: usize) -> Result<Vec<State>> {
    if k > word.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: word.len(),
        });
    }
    let mut out = Vec::with_capacity(k + 1);
    out.push(*s);
    let mut cur = *s;
    for &u in &word.as_slice()[..k] {
        cur = step(sys, &cur, u)?;
        out.push(cur);
    }
    Ok(out)
}

/// `f_0^k(s)` for `k >= 0`.
pub fn f0_pow(sys: &System, s: &State, k: usize) -> State {
    (0..k).fold(*s, |acc, _| step_unchecked(sys, &acc, 0.0))
}

/// The closed-form kernel
/// `S_k^u(x, y) = sum_{j<k} d^(k-1-j) p(u_j, x) + d^k y`.
///
/// Powers of `d` are built by repeated multiplication.
pub fn weighted_sum(sys: &System, x: f64, y: f64, word: &ControlWord, k: usize) -> Result<f64> {
    if k > word.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: word.len(),
        });
    }
    crate::extremal::check_fiber(x)?;
    let d = sys.d();
    let mut powers = Vec::with_capacity(k + 1);
    let mut p = 1.0;
    for _ in 0..=k {
        powers.push(p);
        p *= d;
    }
    let mut total = powers[k] * y;
    for (j, &u) in word.as_slice()[..k].iter().enumerate() {
        sys.check_control(u)?;
        total += powers[k - 1 - j] * drive_unchecked(sys, u, x);
    }
    Ok(total)
}
