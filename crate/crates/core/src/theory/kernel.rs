//! DFT covariance kernels under long memory.
//!
//! For fixed Fourier indices `j <= k` and epoch offset `l`, the rescaled
//! cross-epoch DFT covariances converge to
//!
//! ```text
//! D1(d; j, k, l) = int_R |w|^(-2d) Delta(w - 2 pi j) Delta(2 pi k - w) e^{-i l w} dw
//! D2(d; j, k, l) = int_R |w|^(-2d) Delta(w - 2 pi j) Delta(-2 pi k - w) e^{-i l w} dw
//! Delta(w) = (e^{iw} - 1) / (i w)
//! ```
//!
//! Because `2 pi j` and `2 pi k` are multiples of `2 pi`, the Delta product
//! collapses to the real function `4 sin^2(w/2) / ((w - a)(w - b))` with
//! `a = 2 pi j` and `b = 2 pi k` (D1) or `b = -2 pi k` (D2). The integral is
//! split into a finite window `[-L, L]`, done by adaptive quadrature, and two
//! tails, done analytically: `1 / ((w - a)(w - b))` is expanded in powers of
//! `1/w` and each `w^(-p) e^{i nu w}` tail is either a closed form (`nu = 0`)
//! or its integration-by-parts series.
//!
//! The finite-`n` counterpart is the exact integral
//! `int_{-pi}^{pi} f(w) E_{n,j,k}(w) e^{-i l n w} dw` with
//! `E_{n,j,k}(w) = (2 pi n)^(-1) D_n(w - w_j) conj(D_n(w - w_k))` and the
//! Dirichlet kernel `D_n(w) = sum_{t=1}^{n} e^{i t w}`. Expanding the kernels
//! shows it equals `E[conj(d_0(w_j)) d_l(w_k)]` for the positive-exponent
//! DFT of [`crate::spectral`] (equivalently `E[d_0(w_j) conj(d_l(w_k))]`
//! under the `e^{-itw}` sign). The unconjugated variant replaces
//! `conj(D_n(w - w_k))` by `D_n(-w - w_k)`, which gives
//! `E[conj(d_0(w_j)) conj(d_l(w_k))]`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ArfimaModel;
use crate::quad::{integrate, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelQuery {
    pub d: f64,
    pub j: usize,
    pub k: usize,
    pub ell: usize,
}

impl KernelQuery {
    pub fn new(d: f64, j: usize, k: usize, ell: usize) -> Result<Self> {
        let q = KernelQuery { d, j, k, ell };
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<()> {
        if !(self.d > -0.5 && self.d < 0.5) {
            return Err(Error::InvalidArgument(format!(
                "d = {} must lie in (-1/2, 1/2)",
                self.d
            )));
        }
        if self.j == 0 || self.j > self.k {
            return Err(Error::InvalidArgument(format!(
                "frequency indices must satisfy 1 <= j <= k (got j = {}, k = {})",
                self.j, self.k
            )));
        }
        Ok(())
    }

    /// `(2 pi j)^d (2 pi k)^d / (2 pi)`, the factor multiplying `D1`/`D2` in
    /// the limit of `w_j^d w_k^d E[...]`.
    pub fn limit_scale(&self) -> f64 {
        (2.0 * PI * self.j as f64).powf(self.d) * (2.0 * PI * self.k as f64).powf(self.d)
            / (2.0 * PI)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelWhich {
    D1,
    D2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: Complex64,
    /// Quadrature error estimate plus the truncation bound of the tails.
    pub error: f64,
}

/// Absolute accuracy targeted by [`limit_kernel`].
pub const LIMIT_KERNEL_TOL: f64 = 1e-9;

/// Absolute accuracy targeted by [`finite_n_dft_covariance`].
pub const FINITE_N_TOL: f64 = 1e-9;

/// `D1` or `D2` by quadrature on a window plus analytic tails.
pub fn limit_kernel(query: KernelQuery, which: KernelWhich) -> Result<KernelValue> {
    query.validate()?;
    let d = query.d;
    let a = 2.0 * PI * query.j as f64;
    let b = match which {
        KernelWhich::D1 => 2.0 * PI * query.k as f64,
        KernelWhich::D2 => -2.0 * PI * query.k as f64,
    };
    let ell = query.ell as f64;

    // window half-width: a multiple of 2 pi at least 8 times the farthest pole
    let periods = 64usize.max(8 * query.k);
    let cutoff = 2.0 * PI * periods as f64;

    let integrand = |w: f64| -> Complex64 {
        let s = (0.5 * w).sin();
        let amp = 4.0 * s * s / ((w - a) * (w - b));
        let weight = if w == 0.0 {
            0.0
        } else {
            w.abs().powf(-2.0 * d)
        };
        Complex64::from_polar(amp * weight, -ell * w)
    };

    // panels of width pi / (2 (l + 1)) keep each panel to a fraction of an oscillation
    let per_pi = 2 * (query.ell + 1);
    let half_panels = periods * 2 * per_pi;
    let step = PI / per_pi as f64;
    let points: Vec<f64> = (0..=2 * half_panels)
        .map(|i| (i as f64 - half_panels as f64) * step)
        .collect();
    let opts = QuadOptions {
        abs_tol: 0.1 * LIMIT_KERNEL_TOL,
        rel_tol: 0.0,
        max_panels: 400_000,
    };
    let window = integrate(integrand, &points, opts)?;

    // For w > L: w^(-2d) (2 - e^{iw} - e^{-iw}) e^{-ilw} / ((w - a)(w - b)).
    // For w < -L, substitute w = -u: poles at -a, -b and frequencies negated.
    let terms = [(2.0, -ell), (-1.0, 1.0 - ell), (-1.0, -1.0 - ell)];
    let mut tails = Complex64::new(0.0, 0.0);
    let mut tail_err = 0.0;
    for &(coef, nu) in &terms {
        let (right, e1) = power_tail(d, a, b, nu, cutoff);
        let (left, e2) = power_tail(d, -a, -b, -nu, cutoff);
        tails += (right + left) * coef;
        tail_err += coef.abs() * (e1 + e2);
    }

    let error = window.error + tail_err;
    if !(error <= LIMIT_KERNEL_TOL) {
        return Err(Error::QuadratureNonConvergence {
            estimate: error,
            tolerance: LIMIT_KERNEL_TOL,
        });
    }
    Ok(KernelValue {
        value: window.value + tails,
        error,
    })
}

/// `int_L^inf u^(-2d) e^{i nu u} / ((u - alpha)(u - beta)) du` for
/// `|alpha|, |beta| <= L / 8`, with a bound on the series truncation.
fn power_tail(d: f64, alpha: f64, beta: f64, nu: f64, cutoff: f64) -> (Complex64, f64) {
    // 1 / ((u - alpha)(u - beta)) = sum_n c_n u^(-n-2), c_n = sum_{i<=n} alpha^i beta^(n-i)
    let mut total = Complex64::new(0.0, 0.0);
    let mut c = 1.0f64;
    let mut beta_pow = 1.0f64;
    let mut err = 0.0;
    for n in 0..200 {
        if n > 0 {
            beta_pow *= beta;
            c = alpha * c + beta_pow;
        }
        let p = 2.0 * d + 2.0 + n as f64;
        let (term, term_err) = monomial_tail(p, nu, cutoff);
        let contrib = term * c;
        total += contrib;
        err += c.abs() * term_err;
        if contrib.norm() < 1e-22 && n > 2 {
            break;
        }
    }
    (total, err + 1e-20)
}

/// `int_L^inf u^(-p) e^{i nu u} du` for `p > 1`, with an error bound.
fn monomial_tail(p: f64, nu: f64, cutoff: f64) -> (Complex64, f64) {
    if nu == 0.0 {
        return (Complex64::new(cutoff.powf(1.0 - p) / (p - 1.0), 0.0), 0.0);
    }
    // I(p) = -e^{i nu L} / (i nu) * sum_r L^(-p-r) p (p+1)...(p+r-1) / (i nu)^r
    let inu = Complex64::new(0.0, nu);
    let lead = -Complex64::from_polar(1.0, nu * cutoff) / inu;
    let mut term = Complex64::new(cutoff.powf(-p), 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut last = term.norm();
    for r in 0..40 {
        sum += term;
        let next = term * ((p + r as f64) / cutoff) / inu;
        last = next.norm();
        if last < 1e-24 || last > term.norm() {
            break;
        }
        term = next;
    }
    (lead * sum, last / nu.abs())
}

/// `D_n(x) = sum_{t=1}^{n} e^{i t x}`
pub fn dirichlet(n: usize, x: f64) -> Complex64 {
    let nf = n as f64;
    // shifting x by 2 pi leaves D_n unchanged, so work on (-pi, pi]
    let r = x - 2.0 * PI * (x / (2.0 * PI)).round();
    let ratio = if r.abs() < 1e-5 {
        nf * (1.0 - (nf * nf - 1.0) * r * r / 24.0)
    } else {
        (0.5 * nf * r).sin() / (0.5 * r).sin()
    };
    Complex64::from_polar(ratio, 0.5 * (nf + 1.0) * r)
}

/// Exact finite-`n` DFT covariance by quadrature over `[-pi, pi]`, cut at
/// the Fourier grid `2 pi m / n` (further split `ell + 1` ways so each panel
/// carries O(1) oscillations of `e^{-i ell n w}`).
pub fn finite_n_dft_covariance(
    model: &ArfimaModel,
    n: usize,
    j: usize,
    k: usize,
    ell: usize,
    conjugated: bool,
) -> Result<KernelValue> {
    model.validate()?;
    if j == 0 || j > k || k > n / 2 {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= j <= k <= n/2 (got j = {j}, k = {k}, n = {n})"
        )));
    }
    let nf = n as f64;
    let wj = 2.0 * PI * j as f64 / nf;
    let wk = 2.0 * PI * k as f64 / nf;
    let shift = (ell * n) as f64;
    let norm = 1.0 / (2.0 * PI * nf);

    let integrand = |w: f64| -> Complex64 {
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let f = model.density(w.abs());
        let second = if conjugated {
            dirichlet(n, w - wk).conj()
        } else {
            dirichlet(n, -w - wk)
        };
        dirichlet(n, w - wj) * second * Complex64::from_polar(f * norm, -shift * w)
    };

    let sub = ell + 1;
    let panels = n * sub;
    let step = 2.0 * PI / panels as f64;
    let mut points: Vec<f64> = (0..=panels).map(|i| -PI + i as f64 * step).collect();
    // exact zero as a panel edge for the |w|^(-2d) singularity
    if panels.is_multiple_of(2) {
        points[panels / 2] = 0.0;
    } else {
        let pos = points.partition_point(|&p| p < 0.0);
        points.insert(pos, 0.0);
    }
    *points.last_mut().unwrap() = PI;
    let opts = QuadOptions {
        abs_tol: FINITE_N_TOL,
        rel_tol: 0.0,
        max_panels: 50 * panels + 10_000,
    };
    let r = integrate(integrand, &points, opts)?;
    Ok(KernelValue {
        value: r.value,
        error: r.error,
    })
}
