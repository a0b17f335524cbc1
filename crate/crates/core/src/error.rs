use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter d = {d} is outside the supported range |d| <= 1")]
    UnsupportedRegime { d: f64 },

    #[error("operation `{op}` is not available for d = {d}")]
    RegimeMismatch { op: &'static str, d: f64 },

    #[error(
        "control interval [{u_min}, {u_max}] must satisfy u_min <= 0 <= u_max and u_min < u_max"
    )]
    BadControlSet { u_min: f64, u_max: f64 },

    #[error("g must vanish at zero, found constant term {constant}")]
    BadG { constant: f64 },

    #[error("non-finite value for `{field}`")]
    NonFinite { field: &'static str },

    #[error("group elements need x > 0, got x = {x}")]
    NonPositiveX { x: f64 },

    #[error("control value {u} is outside U = [{u_min}, {u_max}]")]
    ControlOutOfRange { u: f64, u_min: f64, u_max: f64 },

    #[error("backward step requires d != 0")]
    SingularInverse,

    #[error("index {index} out of range for word of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("could not certify critical points of g: residual {residual:e} at u = {u}")]
    RootFindingFailure { u: f64, residual: f64 },

    #[error("fiber x = {x} carries no control set")]
    NoControlSet { x: f64 },

    #[error("point ({x}, {y}) is not in the chain control set")]
    NotInChainSet { x: f64, y: f64 },

    #[error("point ({x}, {y}) lies outside G0; no chain can be built")]
    Unreachable { x: f64, y: f64 },

    #[error("point ({x}, {y}) lies in the chain control set; no escape certificate exists")]
    InsideChainSet { x: f64, y: f64 },

    #[error("malformed chain: {0}")]
    MalformedChain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for errors caused by the parameter regime rather than by bad input.
    pub fn is_regime(&self) -> bool {
        matches!(
            self,
            Error::UnsupportedRegime { .. } | Error::RegimeMismatch { .. }
        )
    }
}

pub(crate) fn ensure_finite(value: f64, field: &'static str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { field })
    }
}
