//! Estimation of the distribution of the sample maximum over a future
//! horizon `m`.
//!
//! Two estimators are provided:
//!
//! * the parametric estimator (PE), a generalized extreme value law fitted by
//!   maximum likelihood to block maxima ([`gev_fit`]);
//! * the nonparametric estimator (NE), the `m`-th power of a kernel
//!   distribution function estimate ([`kernel_est`]).
//!
//! [`evt_theory`] holds the closed-form asymptotics (norming constants,
//! bias and rate terms, optimal bandwidths, the convergence-rate table) and
//! [`sim_harness`] runs replicated Monte Carlo MISE experiments comparing the
//! two estimators.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod error;
pub mod evt_theory;
pub mod gev_fit;
pub mod kernel_est;
pub mod par;
pub mod sim_harness;
pub mod special;

pub use distributions::{SmdSpec, TailClassParams, TailFamily};
pub use error::{Error, Result};
pub use evt_theory::{EtaVector, NormingConstants, RateExponents};
pub use gev_fit::{FitResult, GevParams};
pub use kernel_est::{Bandwidth, KernelSpec};
pub use sim_harness::{ExperimentConfig, MiseReport};
