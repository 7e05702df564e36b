//! Exact Gaussian simulation of fractional noise and ARFIMA(1,d,0).
//!
//! Fractional noise is drawn with the Durbin-Levinson recursion (Hosking's
//! method): `X_t = sum_j phi_{t,j} X_{t-j} + sqrt(v_t) e_t`, where the
//! prediction coefficients `phi_{t,j}` and innovation variances `v_t` come
//! from the exact autocovariance. An AR(1) component is added afterwards by
//! running `X_t = phi X_{t-1} + u_t` over the fractional draw `u`, discarding
//! the first `burn_in` values.
//!
//! # Random streams
//!
//! Normals come from ChaCha20 (`rand_chacha` 0.9) keyed by
//! `ChaCha20Rng::seed_from_u64(seed)`, with the 64-bit stream id set to the
//! replication index, and mapped through `rand_distr::StandardNormal`
//! (ziggurat, `rand_distr` 0.5). A single simulation uses stream 0;
//! Monte Carlo replication `r` uses stream `r`. A replication therefore
//! depends only on `(seed, r)` and never on other replications.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::ArfimaModel;

pub const DEFAULT_BURN_IN: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub model: ArfimaModel,
    pub length: usize,
    pub seed: u64,
    /// Discarded AR(1) start-up steps; ignored when `phi == 0`.
    pub burn_in: usize,
}

impl SimConfig {
    pub fn new(model: ArfimaModel, length: usize, seed: u64) -> Self {
        SimConfig {
            model,
            length,
            seed,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.length < 2 {
            return Err(Error::InvalidArgument(format!(
                "series length {} must be at least 2",
                self.length
            )));
        }
        Ok(())
    }

    /// Number of fractional-noise values the path consumes.
    fn fractional_length(&self) -> usize {
        if self.model.phi == 0.0 {
            self.length
        } else {
            self.length + self.burn_in
        }
    }
}

/// `count` i.i.d. standard normals from stream 0 of `seed`.
pub fn gaussian_white(seed: u64, count: usize) -> Vec<f64> {
    gaussian_stream(seed, 0, count)
}

/// `count` i.i.d. standard normals from stream `stream` of `seed`.
pub fn gaussian_stream(seed: u64, stream: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..count)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Partial autocorrelations `phi_{t,t}` (t = 1..len-1) and innovation
/// variances `v_t` (t = 0..len-1) of the Durbin-Levinson recursion.
#[derive(Debug, Clone)]
pub struct LevinsonTrace {
    pub partial_correlations: Vec<f64>,
    pub innovation_variances: Vec<f64>,
}

/// Fixed-order dot product with four interleaved accumulators.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for i in 0..4 {
            acc[i] += x[i] * y[i];
        }
    }
    let mut tail = 0.0;
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Runs the Durbin-Levinson recursion over `acv[0..len]`, calling `step`
/// with `(t, phi_{t,t..=1}, v_t)` for every `t`. The coefficient slice is
/// stored lag-descending, so `dot(coef, &x[..t])` is the one-step predictor
/// of `x[t]`; it is empty at `t = 0`.
fn levinson<F>(acv: &[f64], len: usize, mut step: F) -> Result<()>
where
    F: FnMut(usize, &[f64], f64),
{
    if acv.len() < len {
        return Err(Error::InvalidArgument(format!(
            "need {len} autocovariances, got {}",
            acv.len()
        )));
    }
    let mut v = acv[0];
    if !(v > 0.0) {
        return Err(Error::NotPositiveDefinite { step: 0, value: v });
    }
    step(0, &[], v);
    // coef[j] = phi_{t,j+1}; rev is the same row lag-descending
    let mut coef: Vec<f64> = Vec::with_capacity(len);
    let mut rev: Vec<f64> = Vec::with_capacity(len);
    for t in 1..len {
        // gamma(t) - sum_j phi_{t-1,j} gamma(t-j), with rev aligned to acv[1..t]
        let pacf = (acv[t] - dot(&rev, &acv[1..t])) / v;
        // phi_{t,j} = phi_{t-1,j} - pacf * phi_{t-1,t-j}, updated in symmetric pairs
        let prev = t - 1;
        for j in 0..prev / 2 {
            let a = coef[j];
            let b = coef[prev - 1 - j];
            coef[j] = a - pacf * b;
            coef[prev - 1 - j] = b - pacf * a;
        }
        if prev % 2 == 1 {
            let mid = prev / 2;
            coef[mid] -= pacf * coef[mid];
        }
        coef.push(pacf);
        rev.clear();
        rev.extend(coef.iter().rev());
        v *= 1.0 - pacf * pacf;
        if !(v > 0.0) {
            return Err(Error::NotPositiveDefinite { step: t, value: v });
        }
        step(t, &rev, v);
    }
    Ok(())
}

pub fn levinson_trace(acv: &[f64], len: usize) -> Result<LevinsonTrace> {
    let mut partial = Vec::with_capacity(len.saturating_sub(1));
    let mut vars = Vec::with_capacity(len);
    levinson(acv, len, |t, coef, v| {
        if t > 0 {
            partial.push(coef[0]);
        }
        vars.push(v);
    })?;
    Ok(LevinsonTrace {
        partial_correlations: partial,
        innovation_variances: vars,
    })
}

/// Turns each noise vector into an exact draw with autocovariance `acv`,
/// in place. All vectors must share one length. One recursion pass serves
/// the whole batch; each path's arithmetic is the same as in a batch of one.
pub fn hosking_transform(acv: &[f64], paths: &mut [Vec<f64>]) -> Result<()> {
    let Some(len) = paths.first().map(Vec::len) else {
        return Ok(());
    };
    if paths.iter().any(|p| p.len() != len) {
        return Err(Error::InvalidArgument(
            "all noise vectors in a batch must have equal length".into(),
        ));
    }
    levinson(acv, len, |t, coef, v| {
        let sd = v.sqrt();
        for path in paths.iter_mut() {
            let mean = dot(coef, &path[..t]);
            path[t] = mean + sd * path[t];
        }
    })
}

fn ar_filter(phi: f64, u: &[f64], burn_in: usize) -> Vec<f64> {
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(u.len().saturating_sub(burn_in));
    for (t, &ut) in u.iter().enumerate() {
        prev = phi * prev + ut;
        if t >= burn_in {
            out.push(prev);
        }
    }
    out
}

/// Sample path for stream 0 of `config.seed`.
pub fn simulate_fractional(config: &SimConfig) -> Result<Vec<f64>> {
    Ok(simulate_streams(config, 0..1)?.pop().unwrap_or_default())
}

/// Sample paths for a contiguous range of streams. Path `i` of the result
/// is the one for stream `streams.start + i`, identical to what a batch
/// holding only that stream would produce.
pub fn simulate_streams(
    config: &SimConfig,
    streams: std::ops::Range<u64>,
) -> Result<Vec<Vec<f64>>> {
    config.validate()?;
    let len = config.fractional_length();
    let acv = config.model.fractional_part().autocovariance(len - 1)?;
    let mut paths: Vec<Vec<f64>> = streams
        .map(|s| gaussian_stream(config.seed, s, len))
        .collect();
    hosking_transform(&acv, &mut paths)?;
    if config.model.phi != 0.0 {
        for p in paths.iter_mut() {
            *p = ar_filter(config.model.phi, p, config.burn_in);
        }
    }
    Ok(paths)
}
