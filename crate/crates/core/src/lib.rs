//! Power allocation between a base station and an active reflecting surface.
//!
//! The surface amplifies the signal it reflects and draws from the same power
//! budget as the base station, so the fraction `beta` of the budget given to
//! the base station trades direct transmit power against reflection gain. This
//! crate evaluates the resulting user SNR as a scalar function of `beta` and
//! maximizes it with several strategies:
//!
//! - multi-start Newton iteration ([`solvers::emrin`]),
//! - a closed-form cubic obtained from a first-order Taylor expansion of the
//!   objective ([`solvers::tpa`]),
//! - single-start Newton, exhaustive grid search and fixed splits as baselines.
//!
//! The [`experiment`] module drives Monte Carlo sweeps over channel draws and
//! writes CSV tables; the `irs-pa` binary exposes them on the command line.

pub mod channel;
pub mod error;
pub mod experiment;
pub mod numerics;
pub mod snr;
pub mod solvers;

pub use error::{Error, Result};
