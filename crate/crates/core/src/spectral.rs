//! Epoch DFTs and the averaged periodogram.
//!
//! A series of length `N = g n` is cut into `g` disjoint consecutive epochs
//! of length `n`. For epoch `l` (0-based) and Fourier frequency
//! `w_k = 2 pi k / n`,
//!
//! ```text
//! d_l(w_k) = (2 pi n)^(-1/2) sum_{t=1}^{n} X_{t + l n} e^{i t w_k}
//! I_l(w_k) = |d_l(w_k)|^2
//! Ibar(w_k) = g^(-1) sum_l I_l(w_k),   k = 1..floor(n/2)
//! ```
//!
//! with `X` indexed from 1. No taper, no overlap.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EpochLayout {
    total_length: usize,
    epochs: usize,
    epoch_length: usize,
}

impl EpochLayout {
    pub fn new(total_length: usize, epochs: usize) -> Result<Self> {
        if epochs == 0 {
            return Err(Error::InvalidLayout(
                "number of epochs must be at least 1".into(),
            ));
        }
        if !total_length.is_multiple_of(epochs) {
            return Err(Error::InvalidLayout(format!(
                "series length {total_length} is not divisible by {epochs} epochs"
            )));
        }
        let epoch_length = total_length / epochs;
        if epoch_length < 4 {
            return Err(Error::InvalidLayout(format!(
                "epoch length {epoch_length} is below the minimum of 4"
            )));
        }
        Ok(EpochLayout {
            total_length,
            epochs,
            epoch_length,
        })
    }

    /// `N`
    pub fn total_length(&self) -> usize {
        self.total_length
    }

    /// `g`
    pub fn epochs(&self) -> usize {
        self.epochs
    }

    /// `n = N / g`
    pub fn epoch_length(&self) -> usize {
        self.epoch_length
    }

    /// `floor(n / 2)`, the number of ordinates produced.
    pub fn num_frequencies(&self) -> usize {
        self.epoch_length / 2
    }

    /// `w_k = 2 pi k / n`
    pub fn frequency(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.epoch_length as f64
    }

    fn epoch<'a>(&self, x: &'a [f64], epoch: usize) -> Result<&'a [f64]> {
        let n = self.epoch_length;
        let needed = (epoch + 1) * n;
        if epoch >= self.epochs || needed > x.len() {
            return Err(Error::EpochOutOfRange {
                epoch,
                needed,
                len: x.len(),
            });
        }
        Ok(&x[epoch * n..needed])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AveragedPeriodogram {
    pub layout: EpochLayout,
    /// `Ibar(w_k)` for `k = 1..=floor(n/2)`; index 0 holds `k = 1`.
    pub ordinates: Vec<f64>,
    pub frequencies: Vec<f64>,
}

impl AveragedPeriodogram {
    /// Builds a periodogram from precomputed ordinates (index 0 is `k = 1`).
    pub fn from_ordinates(layout: EpochLayout, ordinates: Vec<f64>) -> Result<Self> {
        if ordinates.len() != layout.num_frequencies() {
            return Err(Error::InvalidLayout(format!(
                "expected {} ordinates, got {}",
                layout.num_frequencies(),
                ordinates.len()
            )));
        }
        if let Some((i, &v)) = ordinates.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::NonPositiveOrdinate { k: i + 1, value: v });
        }
        let frequencies = (1..=ordinates.len()).map(|k| layout.frequency(k)).collect();
        Ok(AveragedPeriodogram {
            layout,
            ordinates,
            frequencies,
        })
    }
}

/// Reference DFT by direct summation, for `k = 1..=k_max` (`k_max` may run
/// past `n/2` up to `n - 1`).
pub fn epoch_dft_naive(
    x: &[f64],
    layout: &EpochLayout,
    epoch: usize,
    k_max: usize,
) -> Result<Vec<Complex64>> {
    let block = layout.epoch(x, epoch)?;
    let n = layout.epoch_length;
    let norm = (2.0 * PI * n as f64).powf(-0.5);
    let out = (1..=k_max)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &v) in block.iter().enumerate() {
                let t = i + 1;
                // reduce t k mod n before scaling to keep the phase exact
                let phase = 2.0 * PI * ((t * k) % n) as f64 / n as f64;
                acc += Complex64::from_polar(v, phase);
            }
            acc * norm
        })
        .collect();
    Ok(out)
}

/// Reusable FFT plan for one epoch length.
pub struct EpochTransform {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
    twiddle: Vec<Complex64>,
    buffer: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl EpochTransform {
    pub fn new(epoch_length: usize) -> Self {
        let mut planner = FftPlanner::new();
        // rustfft's inverse transform is sum_j x_j e^{+2 pi i j k / n}, unnormalized
        let fft = planner.plan_fft_inverse(epoch_length);
        let norm = (2.0 * PI * epoch_length as f64).powf(-0.5);
        // t runs from 1, so each bin picks up e^{i w_k}
        let twiddle = (0..=epoch_length / 2)
            .map(|k| Complex64::from_polar(norm, 2.0 * PI * k as f64 / epoch_length as f64))
            .collect();
        let scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        EpochTransform {
            n: epoch_length,
            fft,
            twiddle,
            buffer: vec![Complex64::new(0.0, 0.0); epoch_length],
            scratch,
        }
    }

    /// DFT ordinates `k = 1..=floor(n/2)` of one block of length `n`.
    pub fn dft(&mut self, block: &[f64]) -> Vec<Complex64> {
        self.transform(block);
        (1..=self.n / 2)
            .map(|k| self.buffer[k] * self.twiddle[k])
            .collect()
    }

    /// Adds `|d(w_k)|^2`, `k = 1..=floor(n/2)`, into `acc`.
    fn accumulate_power(&mut self, block: &[f64], acc: &mut [f64]) {
        self.transform(block);
        let scale = self.twiddle[0].re * self.twiddle[0].re;
        for (k, a) in acc.iter_mut().enumerate() {
            *a += self.buffer[k + 1].norm_sqr() * scale;
        }
    }

    fn transform(&mut self, block: &[f64]) {
        debug_assert_eq!(block.len(), self.n);
        for (b, &v) in self.buffer.iter_mut().zip(block) {
            *b = Complex64::new(v, 0.0);
        }
        self.fft
            .process_with_scratch(&mut self.buffer, &mut self.scratch);
    }
}

/// `d_l(w_k)` for `k = 1..=floor(n/2)`.
pub fn epoch_dft(x: &[f64], layout: &EpochLayout, epoch: usize) -> Result<Vec<Complex64>> {
    let block = layout.epoch(x, epoch)?;
    Ok(EpochTransform::new(layout.epoch_length).dft(block))
}

pub fn averaged_periodogram(x: &[f64], layout: &EpochLayout) -> Result<AveragedPeriodogram> {
    let mut transform = EpochTransform::new(layout.epoch_length);
    averaged_periodogram_with(&mut transform, x, layout)
}

/// Same as [`averaged_periodogram`] with a caller-held FFT plan.
pub fn averaged_periodogram_with(
    transform: &mut EpochTransform,
    x: &[f64],
    layout: &EpochLayout,
) -> Result<AveragedPeriodogram> {
    if x.len() != layout.total_length {
        return Err(Error::InvalidLayout(format!(
            "series has {} samples but the layout expects {}",
            x.len(),
            layout.total_length
        )));
    }
    if transform.n != layout.epoch_length {
        return Err(Error::InvalidLayout(format!(
            "transform planned for length {} used with epochs of length {}",
            transform.n, layout.epoch_length
        )));
    }
    let mut acc = vec![0.0; layout.num_frequencies()];
    for l in 0..layout.epochs {
        transform.accumulate_power(layout.epoch(x, l)?, &mut acc);
    }
    let g = layout.epochs as f64;
    for a in acc.iter_mut() {
        *a /= g;
    }
    let frequencies = (1..=acc.len()).map(|k| layout.frequency(k)).collect();
    Ok(AveragedPeriodogram {
        layout: *layout,
        ordinates: acc,
        frequencies,
    })
}
