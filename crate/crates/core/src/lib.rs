//! Numerics for unambiguous detection of a given interferometric phase shift
//! with non-Gaussian probe states.
//!
//! The crate is `no_std` (it needs `alloc`) and has two halves that check
//! each other:
//!
//! * [`fock`] and [`loss`]: a truncated Fock-space engine. It builds states,
//!   displacement and squeeze operators (by matrix exponential), and the
//!   photon-loss channel in Kraus and purified form.
//! * [`analytic`]: closed forms for overlaps, parities, thresholds and error
//!   probabilities.
//!
//! [`protocol`] ties both together into end-to-end detection scenarios.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analytic;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod loss;
pub mod protocol;
pub mod solve;
pub mod special;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub mod prelude {
    pub use crate::analytic::{ErrorRates, ProtocolParams, StateFamily};
    pub use crate::error::{Error, Result};
    pub use crate::fock::{DensityOperator, FockSpace, LinearOperator, PureState};
    pub use crate::loss::LossChannel;
    pub use crate::protocol::{
        evaluate, evaluate_at_delta, optimize_delta, sweep, Evaluation, NumericConfig,
        OperatingPoint, OperatingPointSource, SweepAxis, SweepResult,
    };
    pub use num_complex::Complex64;
}
