//! System instances `(a, d, g, U)` with `h = 1`, their regime in `d`, and
//! finite control words with the shift.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::extremal::{self, ExtremalData};
use crate::poly::Polynomial;

/// The JSON system description read by the CLI.
///
/// `g_coeffs[i]` is the coefficient of `u^(i+1)`; the constant term of `g` is
/// structurally zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub a: f64,
    pub d: f64,
    pub g_coeffs: Vec<f64>,
    pub u_min: f64,
    pub u_max: f64,
}

/// Classification of the fiber factor `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DRegime {
    /// `0 <= d < 1`
    ContractivePositive,
    /// `-1 < d < 0`
    ContractiveNegative,
    /// `d = 1`
    UnitPositive,
    /// `d = -1`
    UnitNegative,
    /// `|d| > 1`
    Unsupported,
}

impl DRegime {
    /// Exact comparisons: `d = 1` means the stored value is exactly one.
    pub fn classify(d: f64) -> DRegime {
        if d == 1.0 {
            DRegime::UnitPositive
        } else if d == -1.0 {
            DRegime::UnitNegative
        } else if (0.0..1.0).contains(&d) {
            DRegime::ContractivePositive
        } else if d > -1.0 && d < 0.0 {
            DRegime::ContractiveNegative
        } else {
            DRegime::Unsupported
        }
    }

    pub fn is_contractive(self) -> bool {
        matches!(
            self,
            DRegime::ContractivePositive | DRegime::ContractiveNegative
        )
    }

    pub fn tag(self) -> &'static str {
        match self {
            DRegime::ContractivePositive => "contractive_positive",
            DRegime::ContractiveNegative => "contractive_negative",
            DRegime::UnitPositive => "unit_positive",
            DRegime::UnitNegative => "unit_negative",
            DRegime::Unsupported => "unsupported",
        }
    }
}

impl fmt::Display for DRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A validated system. Immutable; the extremal data of `g` over `U` is
/// computed once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct System {
    a: f64,
    d: f64,
    g: Polynomial,
    g_coeffs: Vec<f64>,
    u_min: f64,
    u_max: f64,
    regime: DRegime,
    extremal: ExtremalData,
}

impl System {
    /// Validates a full polynomial `g` (including its constant term).
    pub fn new(a: f64, d: f64, g: Polynomial, u_min: f64, u_max: f64) -> Result<System> {
        Self::build(a, d, g, u_min, u_max, false)
    }

    /// Like [`System::new`] but also accepts the degenerate control set `U = {0}`.
    pub fn new_allow_degenerate(
        a: f64,
        d: f64,
        g: Polynomial,
        u_min: f64,
        u_max: f64,
    ) -> Result<System> {
        Self::build(a, d, g, u_min, u_max, true)
    }

    pub fn from_spec(spec: &SystemSpec) -> Result<System> {
        for &c in &spec.g_coeffs {
            ensure_finite(c, "g_coeffs")?;
        }
        let mut sys = Self::new(
            spec.a,
            spec.d,
            Polynomial::from_nonconstant(&spec.g_coeffs),
            spec.u_min,
            spec.u_max,
        )?;
        sys.g_coeffs = spec.g_coeffs.clone();
        Ok(sys)
    }

    fn build(
        a: f64,
        d: f64,
        g: Polynomial,
        u_min: f64,
        u_max: f64,
        allow_degenerate: bool,
    ) -> Result<System> {
        ensure_finite(a, "a")?;
        ensure_finite(d, "d")?;
        ensure_finite(u_min, "u_min")?;
        ensure_finite(u_max, "u_max")?;
        for &c in g.coeffs() {
            ensure_finite(c, "g")?;
        }
        let regime = DRegime::classify(d);
        if regime == DRegime::Unsupported {
            return Err(Error::UnsupportedRegime { d });
        }
        let zero_inside = u_min <= 0.0 && 0.0 <= u_max;
        let proper = u_min < u_max || (allow_degenerate && u_min == u_max);
        if !zero_inside || !proper {
            return Err(Error::BadControlSet { u_min, u_max });
        }
        let constant = g.constant_term();
        if constant != 0.0 {
            return Err(Error::BadG { constant });
        }
        let g_coeffs = g.coeffs().iter().skip(1).copied().collect();
        let extremal = extremal::extremal_data_of(&g, u_min, u_max)?;
        Ok(System {
            a,
            d,
            g,
            g_coeffs,
            u_min,
            u_max,
            regime,
            extremal,
        })
    }

    /// Echoes the description this system was built from; numbers are
    /// preserved bit for bit.
    pub fn spec(&self) -> SystemSpec {
        SystemSpec {
            a: self.a,
            d: self.d,
            g_coeffs: self.g_coeffs.clone(),
            u_min: self.u_min,
            u_max: self.u_max,
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn g(&self) -> &Polynomial {
        &self.g
    }

    pub fn u_min(&self) -> f64 {
        self.u_min
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    pub fn regime(&self) -> DRegime {
        self.regime
    }

    pub fn extremal(&self) -> &ExtremalData {
        &self.extremal
    }

    pub fn check_control(&self, u: f64) -> Result<()> {
        if u >= self.u_min && u <= self.u_max {
            Ok(())
        } else {
            Err(Error::ControlOutOfRange {
                u,
                u_min: self.u_min,
                u_max: self.u_max,
            })
        }
    }

    pub fn check_word(&self, word: &ControlWord) -> Result<()> {
        word.iter().try_for_each(|u| self.check_control(u))
    }
}

/// Re-validates a system: the regime and every field come out unchanged.
pub fn validate(spec: &SystemSpec) -> Result<System> {
    System::from_spec(spec)
}

/// A finite control word `(u_0, ..., u_{n-1})`.
///
/// Stands in for the bi-infinite control sequences of the theory: any finite
/// stretch of a trajectory only reads finitely many entries.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ControlWord(Vec<f64>);

impl ControlWord {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn constant(u: f64, len: usize) -> Self {
        Self(vec![u; len])
    }

    /// `(first, second, first, second, ...)` of length `len`.
    pub fn alternating(first: f64, second: f64, len: usize) -> Self {
        Self(
            (0..len)
                .map(|i| if i % 2 == 0 { first } else { second })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = f64> + '_ {
        self.0.iter().copied()
    }

    pub fn get(&self, i: usize) -> Option<f64> {
        self.0.get(i).copied()
    }

    /// Finite form of the shift `Theta_k`: drops the first `k` entries.
    pub fn shift(&self, k: usize) -> Result<ControlWord> {
        if k > self.0.len() {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: self.0.len(),
            });
        }
        Ok(Self(self.0[k..].to_vec()))
    }

    pub fn prefix(&self, k: usize) -> Result<ControlWord> {
        if k > self.0.len() {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: self.0.len(),
            });
        }
        Ok(Self(self.0[..k].to_vec()))
    }

    pub fn concat(&self, other: &ControlWord) -> ControlWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self(v)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for ControlWord {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

pub fn shift(word: &ControlWord, k: usize) -> Result<ControlWord> {
    word.shift(k)
}
