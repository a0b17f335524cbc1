//! Control sets and chain control sets of the discrete-time linear system
//!
//! ```text
//! (x, y) -> (x, a (x - 1) + d y + g(u) x),   u in U = [u_min, u_max],
//! ```
//!
//! on the affine group `Aff(2,R)`, for `|d| <= 1` and polynomial `g` with
//! `g(0) = 0`. The dynamics never change `x`, so every set of interest splits
//! into fibers `{x} x R`; closed-form fiber sets are checked against an exact
//! interval-recursion oracle.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod affine_group;
pub mod chain_sets;
pub mod control_sets;
pub mod dynamics;
pub mod error;
pub mod extremal;
pub mod interval;
pub mod poly;
pub mod reachability_oracle;
pub mod system_model;

pub use affine_group::{GroupElement, State};
pub use chain_sets::{ChainDescriptor, ChainReport, ChainSetDescriptor, EscapeCertificate};
pub use control_sets::{ControlSetDescriptor, FiberShape, G0Region};
pub use error::{Error, Result};
pub use extremal::{AffineLine, ExtremalData};
pub use interval::Interval;
pub use poly::Polynomial;
pub use reachability_oracle::ReachTrace;
pub use system_model::{ControlWord, DRegime, System, SystemSpec};
