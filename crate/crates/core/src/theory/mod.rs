//! Special functions and asymptotic theory for the epoch-averaged estimator.
//!
//! - [`special`]: digamma and trigamma at positive integers. With `g`
//!   epochs, `log(U/2)` for `U ~ chi2(2g)` has mean `psi(g)` and variance
//!   `psi'(g)`, which sets the per-ordinate noise of the log periodogram.
//! - [`mse`]: leading-order bias, variance and MSE of the estimator, the
//!   MSE-optimal bandwidth and the predicted gain from splitting into epochs.
//! - [`kernel`]: quadrature for the limiting cross-epoch DFT covariance
//!   kernels and their finite-`n` counterparts.

pub mod kernel;
pub mod mse;
pub mod special;

pub use kernel::{finite_n_dft_covariance, limit_kernel, KernelQuery, KernelValue, KernelWhich};
pub use mse::{mse_prediction, MsePrediction};
pub use special::{digamma_int, trigamma_int};
