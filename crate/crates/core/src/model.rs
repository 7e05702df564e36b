//! Fractional noise and ARFIMA(1,d,0) processes.
//!
//! The spectral density is
//! `f(w) = sigma2 / (2 pi) * |2 sin(w/2)|^(-2d) * |1 - phi e^{iw}|^(-2)`,
//! which factors as `|w|^(-2d) f*(w)` with a short-memory part `f*` that is
//! continuous and positive at zero.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Truncation of the AR(1) two-sided filter: terms with `|phi|^h` below this
/// are dropped.
const AR_FILTER_CUTOFF: f64 = 1e-17;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArfimaModel {
    pub d: f64,
    #[serde(default)]
    pub phi: f64,
    #[serde(default = "unit_variance")]
    pub sigma2: f64,
}

fn unit_variance() -> f64 {
    1.0
}

/// Which second derivative of the short-memory factor at zero feeds the
/// bandwidth and MSE formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CurvatureConvention {
    /// Curvature of the AR(1) factor `|1 - phi e^{iw}|^(-2)` alone:
    /// `-2 phi / (1 - phi)^2`. This is the convention that reproduces the
    /// reference optimal bandwidths for ARFIMA(1,d,0).
    #[default]
    ArFactor,
    /// Curvature of the exact `f*`, which also carries
    /// `(2 sin(w/2) / w)^(-2d)` and therefore adds `d / 6`.
    Exact,
}

impl ArfimaModel {
    pub fn new(d: f64, phi: f64, sigma2: f64) -> Result<Self> {
        let m = ArfimaModel { d, phi, sigma2 };
        m.validate()?;
        Ok(m)
    }

    /// ARFIMA(0,d,0) with unit innovation variance.
    pub fn fractional_noise(d: f64) -> Result<Self> {
        Self::new(d, 0.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d > -0.5 && self.d < 0.5) {
            return Err(Error::InvalidModel(format!(
                "d = {} must lie in (-1/2, 1/2)",
                self.d
            )));
        }
        if !(self.phi.abs() < 1.0) {
            return Err(Error::InvalidModel(format!(
                "phi = {} must satisfy |phi| < 1",
                self.phi
            )));
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "sigma2 = {} must be positive",
                self.sigma2
            )));
        }
        Ok(())
    }

    /// The same memory parameter with the AR part removed.
    pub fn fractional_part(&self) -> ArfimaModel {
        ArfimaModel { phi: 0.0, ..*self }
    }

    /// `f(omega)` for `omega` in `(0, pi]`.
    pub fn spectral_density(&self, omega: f64) -> Result<f64> {
        if !(omega > 0.0 && omega <= PI) {
            return Err(Error::FrequencyDomain(omega));
        }
        Ok(self.density(omega))
    }

    /// Unchecked density for `omega > 0`. Callers integrating over negative
    /// frequencies pass `|omega|`.
    pub(crate) fn density(&self, omega: f64) -> f64 {
        let s = 2.0 * (0.5 * omega).sin();
        self.sigma2 / (2.0 * PI) * s.abs().powf(-2.0 * self.d) * self.ar_gain(omega)
    }

    /// `|1 - phi e^{iw}|^(-2)`.
    fn ar_gain(&self, omega: f64) -> f64 {
        1.0 / (1.0 - 2.0 * self.phi * omega.cos() + self.phi * self.phi)
    }

    /// Short-memory factor `f*(omega) = |omega|^(2d) f(omega)`.
    pub fn f_star(&self, omega: f64) -> f64 {
        if omega == 0.0 {
            return self.f_star_zero();
        }
        let w = omega.abs();
        let sinc = 2.0 * (0.5 * w).sin() / w;
        self.sigma2 / (2.0 * PI) * sinc.powf(-2.0 * self.d) * self.ar_gain(w)
    }

    pub fn f_star_zero(&self) -> f64 {
        self.sigma2 / (2.0 * PI * (1.0 - self.phi).powi(2))
    }

    /// `f*''(0) / f*(0)` under the given convention.
    pub fn f_star_curvature(&self, convention: CurvatureConvention) -> f64 {
        let ar = -2.0 * self.phi / (1.0 - self.phi).powi(2);
        match convention {
            CurvatureConvention::ArFactor => ar,
            CurvatureConvention::Exact => ar + self.d / 6.0,
        }
    }

    /// Autocovariances `gamma(0..=max_lag)` with
    /// `gamma(k) = int_{-pi}^{pi} f(w) cos(k w) dw`.
    ///
    /// Fractional noise uses the closed form
    /// `gamma(0) = sigma2 Gamma(1-2d) / Gamma(1-d)^2`,
    /// `gamma(k) = gamma(k-1) (k-1+d) / (k-d)`. For `phi != 0` the AR(1)
    /// filter is applied as
    /// `gamma_X(k) = (1 - phi^2)^(-1) sum_h phi^|h| gamma_u(k + h)`.
    pub fn autocovariance(&self, max_lag: usize) -> Result<Vec<f64>> {
        self.validate()?;
        if self.phi == 0.0 {
            return Ok(self.fractional_autocovariance(max_lag));
        }
        let reach = (AR_FILTER_CUTOFF.ln() / self.phi.abs().ln()).ceil() as usize;
        let gu = self.fractional_autocovariance(max_lag + reach);
        let scale = 1.0 / (1.0 - self.phi * self.phi);
        let acv = (0..=max_lag)
            .map(|k| {
                let mut acc = gu[k];
                let mut w = 1.0;
                for h in 1..=reach {
                    w *= self.phi;
                    acc += w * (gu[k + h] + gu[k.abs_diff(h)]);
                }
                acc * scale
            })
            .collect();
        Ok(acv)
    }

    fn fractional_autocovariance(&self, max_lag: usize) -> Vec<f64> {
        let d = self.d;
        let mut acv = Vec::with_capacity(max_lag + 1);
        let g0 = if d == 0.0 {
            self.sigma2
        } else {
            self.sigma2 * (ln_gamma(1.0 - 2.0 * d) - 2.0 * ln_gamma(1.0 - d)).exp()
        };
        acv.push(g0);
        for k in 1..=max_lag {
            let kf = k as f64;
            let prev = acv[k - 1];
            acv.push(prev * (kf - 1.0 + d) / (kf - d));
        }
        acv
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_real, uniform_points, QuadOptions};

    /// `2 int_0^pi f(w) cos(k w) dw` by adaptive quadrature.
    fn quadrature_acv(m: &ArfimaModel, k: usize) -> f64 {
        let panels = 8 * k.max(1);
        let opts = QuadOptions {
            abs_tol: 1e-14,
            rel_tol: 1e-12,
            max_panels: 100_000,
        };
        let r = integrate_real(
            |w| m.density(w) * (k as f64 * w).cos(),
            &uniform_points(0.0, PI, panels),
            opts,
        )
        .unwrap();
        2.0 * r.value
    }

    #[test]
    fn white_noise_density_is_flat() {
        let m = ArfimaModel::new(0.0, 0.0, 2.0 * PI).unwrap();
        assert!((m.spectral_density(1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn density_at_pi() {
        let m = ArfimaModel::new(0.3, 0.0, 2.0 * PI).unwrap();
        let want = 2f64.powf(-0.6);
        assert!((m.spectral_density(PI).unwrap() - want).abs() < 1e-14);
        assert!((want - 0.659754).abs() < 1e-6);
    }

    #[test]
    fn density_arfima_pinned() {
        // 30-digit evaluation of the closed form
        let m = ArfimaModel::new(0.3, -0.3, 1.0).unwrap();
        let want = 0.150_165_141_412_933_800_758;
        assert!((m.spectral_density(0.5).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn density_domain_errors() {
        let m = ArfimaModel::fractional_noise(0.2).unwrap();
        assert!(matches!(
            m.spectral_density(0.0),
            Err(Error::FrequencyDomain(_))
        ));
        assert!(matches!(
            m.spectral_density(-0.1),
            Err(Error::FrequencyDomain(_))
        ));
        assert!(matches!(
            m.spectral_density(3.2),
            Err(Error::FrequencyDomain(_))
        ));
    }

    #[test]
    fn density_limits_at_zero() {
        let pos = ArfimaModel::fractional_noise(0.3).unwrap();
        let neg = ArfimaModel::fractional_noise(-0.3).unwrap();
        assert!(pos.spectral_density(1e-8).unwrap() > 1e3);
        assert!(neg.spectral_density(1e-8).unwrap() < 1e-3);
    }

    #[test]
    fn invalid_models_rejected() {
        assert!(ArfimaModel::new(0.5, 0.0, 1.0).is_err());
        assert!(ArfimaModel::new(-0.5, 0.0, 1.0).is_err());
        assert!(ArfimaModel::new(0.1, 1.0, 1.0).is_err());
        assert!(ArfimaModel::new(0.1, 0.0, 0.0).is_err());
        assert!(ArfimaModel::new(f64::NAN, 0.0, 1.0).is_err());
        assert!(ArfimaModel::new(0.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn curvature_conventions() {
        let flat = ArfimaModel::fractional_noise(0.0).unwrap();
        assert_eq!(flat.f_star_curvature(CurvatureConvention::ArFactor), 0.0);
        assert_eq!(flat.f_star_curvature(CurvatureConvention::Exact), 0.0);

        let neg = ArfimaModel::new(0.3, -0.3, 1.0).unwrap();
        assert!((neg.f_star_curvature(CurvatureConvention::ArFactor) - 0.355_029_585).abs() < 1e-8);
        let pos = ArfimaModel::new(0.3, 0.3, 1.0).unwrap();
        assert!((pos.f_star_curvature(CurvatureConvention::ArFactor) + 1.224_489_796).abs() < 1e-8);
    }

    #[test]
    fn curvature_matches_finite_differences() {
        for &(d, phi) in &[(0.3, -0.3), (0.3, 0.3), (-0.2, 0.5), (0.0, 0.0)] {
            let m = ArfimaModel::new(d, phi, 1.0).unwrap();
            let h = 1e-3;
            let exact = (2.0 * m.f_star(h) - 2.0 * m.f_star(0.0)) / (h * h) / m.f_star(0.0);
            assert!((exact - m.f_star_curvature(CurvatureConvention::Exact)).abs() < 1e-5);
            let ar_only = ArfimaModel { d: 0.0, ..m };
            let ar = (2.0 * ar_only.f_star(h) - 2.0 * ar_only.f_star(0.0))
                / (h * h)
                / ar_only.f_star(0.0);
            assert!((ar - m.f_star_curvature(CurvatureConvention::ArFactor)).abs() < 1e-5);
        }
    }

    #[test]
    fn white_noise_autocovariance() {
        let acv = ArfimaModel::fractional_noise(0.0)
            .unwrap()
            .autocovariance(10)
            .unwrap();
        assert!((acv[0] - 1.0).abs() < 1e-15);
        assert!(acv[1..].iter().all(|&g| g == 0.0));
    }

    #[test]
    fn fractional_variance_and_lag_one() {
        let acv = ArfimaModel::fractional_noise(0.3)
            .unwrap()
            .autocovariance(1)
            .unwrap();
        assert!((acv[0] - 1.316_456_062_130_004_7).abs() < 1e-13);
        assert!((acv[1] / acv[0] - 0.3 / 0.7).abs() < 1e-15);
        let quad0 = quadrature_acv(&ArfimaModel::fractional_noise(0.3).unwrap(), 0);
        assert!((quad0 - acv[0]).abs() < 1e-9 * acv[0]);
    }

    #[test]
    fn autocovariance_agrees_with_quadrature() {
        for &d in &[-0.3, 0.0, 0.3] {
            for &phi in &[-0.5, 0.0, 0.5] {
                let m = ArfimaModel::new(d, phi, 1.0).unwrap();
                let acv = m.autocovariance(50).unwrap();
                for (k, &g) in acv.iter().enumerate() {
                    let q = quadrature_acv(&m, k);
                    assert!(
                        (g - q).abs() <= 1e-6 * q.abs() + 1e-12 * acv[0],
                        "d={d} phi={phi} k={k}: {g} vs {q}"
                    );
                }
            }
        }
    }

    #[test]
    fn autocovariance_bounded_and_decaying() {
        for &d in &[-0.3, 0.1, 0.3, 0.45] {
            let acv = ArfimaModel::fractional_noise(d)
                .unwrap()
                .autocovariance(400)
                .unwrap();
            assert!(acv[0] > 0.0);
            assert!(acv.iter().all(|g| g.abs() <= acv[0]));
            for k in 21..acv.len() {
                assert!(acv[k].abs() < acv[k - 1].abs(), "d={d} k={k}");
            }
        }
    }
}
