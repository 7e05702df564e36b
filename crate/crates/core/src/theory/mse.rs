//! Leading-order MSE of the epoch-averaged estimator.
//!
//! With `c = f*''(0) / f*(0)`, epoch length `n`, `g` epochs and bandwidth `m`:
//!
//! ```text
//! bias(m)  = -2 pi^2 c m^2 / (9 n^2)
//! var(m)   = psi'(g) / (4 m)
//! B*       = (4/81) pi^4 c^2
//! m_opt    = (psi'(g) / (16 B*))^(1/5) n^(4/5)
//! MSE_opt  = C* psi'(g)^(4/5) n^(-4/5),  C* = 16^(-4/5) B*^(1/5) + (16 B*)^(1/5) / 4
//! ```
//!
//! At a fixed total length `N = g n` the optimal MSE scales as
//! `{g psi'(g)}^(4/5)`, so `{g psi'(g) / psi'(1)}^(4/5)` is the predicted
//! ratio against a single epoch.

use std::f64::consts::PI;

use serde::Serialize;

use super::special::trigamma_int;
use crate::error::{Error, Result};
use crate::model::{ArfimaModel, CurvatureConvention};

/// `B* = (4/81) pi^4 c^2`
pub fn b_star(curvature: f64) -> f64 {
    4.0 / 81.0 * PI.powi(4) * curvature * curvature
}

/// `C* = 16^(-4/5) B*^(1/5) + (16 B*)^(1/5) / 4`, the value of
/// `B* m^4 / n^4 + psi'(g) / (4m)` at the optimum in units of
/// `psi'(g)^(4/5) n^(-4/5)`.
pub fn c_star(b_star: f64) -> f64 {
    16f64.powf(-0.8) * b_star.powf(0.2) + (16.0 * b_star).powf(0.2) / 4.0
}

/// Leading bias term `-2 pi^2 c m^2 / (9 n^2)`.
pub fn leading_bias(curvature: f64, m: f64, n: f64) -> f64 {
    -2.0 * PI * PI * curvature * m * m / (9.0 * n * n)
}

fn zero_curvature(model: &ArfimaModel) -> Error {
    Error::InvalidBandwidth(format!(
        "the optimal bandwidth needs f*''(0) != 0, but phi = {} gives zero curvature; \
         use a fixed bandwidth rule for this model",
        model.phi
    ))
}

/// Real-valued MSE-optimal bandwidth for epoch length `n` and `g` epochs.
pub fn optimal_bandwidth_real(
    model: &ArfimaModel,
    epoch_length: usize,
    epochs: usize,
    convention: CurvatureConvention,
) -> Result<f64> {
    model.validate()?;
    let b = b_star(model.f_star_curvature(convention));
    if !(b > 0.0) {
        return Err(zero_curvature(model));
    }
    let tri = trigamma_int(epochs as u64)?;
    Ok((tri / (16.0 * b)).powf(0.2) * (epoch_length as f64).powf(0.8))
}

/// `{g psi'(g) / psi'(1)}^(4/5)`: optimal MSE with `g` epochs relative to one
/// epoch at the same total length.
pub fn epoch_mse_ratio(epochs: usize) -> Result<f64> {
    let g = epochs as u64;
    Ok((epochs as f64 * trigamma_int(g)? / trigamma_int(1)?).powf(0.8))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MsePrediction {
    /// Bandwidth the bias, variance and MSE were evaluated at.
    pub m: usize,
    pub bias_leading: f64,
    pub variance_leading: f64,
    pub mse: f64,
    /// Integer optimal bandwidth; `None` when `f*''(0) = 0`.
    pub optimal_m: Option<usize>,
    /// `C* psi'(g)^(4/5) n^(-4/5)`; `None` when `f*''(0) = 0`.
    pub optimal_mse: Option<f64>,
    pub b_star: f64,
    pub c_star: Option<f64>,
    /// `{g psi'(g) / psi'(1)}^(4/5)`
    pub epoch_ratio: f64,
}

/// Predicted bias, variance and MSE at bandwidth `m`, or at the optimal
/// bandwidth when `m` is `None`. Uses the AR-factor curvature convention.
pub fn mse_prediction(
    model: &ArfimaModel,
    epoch_length: usize,
    epochs: usize,
    m: Option<usize>,
) -> Result<MsePrediction> {
    model.validate()?;
    if epoch_length < 4 || epochs == 0 {
        return Err(Error::InvalidArgument(format!(
            "need epoch length >= 4 and at least one epoch (got n = {epoch_length}, g = {epochs})"
        )));
    }
    let curvature = model.f_star_curvature(CurvatureConvention::ArFactor);
    let b = b_star(curvature);
    let tri = trigamma_int(epochs as u64)?;
    let n = epoch_length as f64;

    let optimal_m = if b > 0.0 {
        Some(crate::estimator::optimal_bandwidth(
            model,
            epoch_length,
            epochs,
        )?)
    } else {
        None
    };
    let m = m.or(optimal_m).ok_or_else(|| zero_curvature(model))?;
    if m == 0 {
        return Err(Error::InvalidBandwidth("bandwidth must be positive".into()));
    }
    let mf = m as f64;
    let bias_leading = leading_bias(curvature, mf, n);
    let variance_leading = tri / (4.0 * mf);
    let (c, optimal_mse) = if b > 0.0 {
        let c = c_star(b);
        (Some(c), Some(c * tri.powf(0.8) * n.powf(-0.8)))
    } else {
        (None, None)
    };
    Ok(MsePrediction {
        m,
        bias_leading,
        variance_leading,
        mse: bias_leading * bias_leading + variance_leading,
        optimal_m,
        optimal_mse,
        b_star: b,
        c_star: c,
        epoch_ratio: epoch_mse_ratio(epochs)?,
    })
}
