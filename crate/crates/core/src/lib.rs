//! Epoch-averaged log-periodogram regression for the memory parameter of
//! long-memory time series.
//!
//! The pipeline is split the same way the computation is:
//!
//! - [`model`]: fractional noise and ARFIMA(1,d,0) spectral densities and
//!   autocovariances.
//! - [`simulate`]: exact Gaussian sample paths via the Durbin-Levinson
//!   (Hosking) recursion, with counter-based seeded streams.
//! - [`spectral`]: per-epoch DFTs and the averaged periodogram.
//! - [`estimator`]: OLS log-periodogram regression on the averaged
//!   periodogram, bandwidth rules and standard errors.
//! - [`theory`]: digamma/trigamma at integer arguments, the asymptotic
//!   bias/variance/MSE expansion and quadrature oracles for the DFT
//!   covariance kernels.
//! - [`montecarlo`]: replicated simulate/estimate runs with bias, MSE and
//!   coverage summaries.
//! - [`cli`]: the `epoch-gph` command-line front end.

// NaN-rejecting guards are written as negated comparisons on purpose;
// quadrature nodes keep their full tabulated digits
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod cli;
pub mod error;
pub mod estimator;
pub mod model;
pub mod montecarlo;
pub mod quad;
pub mod simulate;
pub mod spectral;
pub mod theory;

pub use error::{Error, Result};
pub use estimator::{estimate, BandwidthRule, EstimateReport};
pub use model::ArfimaModel;
pub use montecarlo::{run_mc, McConfig, McSummary};
pub use simulate::{simulate_fractional, SimConfig};
pub use spectral::{averaged_periodogram, AveragedPeriodogram, EpochLayout};
