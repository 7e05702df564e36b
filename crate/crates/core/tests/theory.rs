use std::f64::consts::PI;

use epoch_gph::model::ArfimaModel;
use epoch_gph::theory::kernel::{finite_n_dft_covariance, limit_kernel, KernelQuery, KernelWhich};
use epoch_gph::theory::mse::{epoch_mse_ratio, mse_prediction};
use epoch_gph::theory::special::trigamma_int;
use num_complex::Complex64;

fn freq(k: usize, n: usize) -> f64 {
    2.0 * PI * k as f64 / n as f64
}

/// Direct double sum over the autocovariance:
/// `(2 pi n)^(-1) sum_s sum_t gamma(t + l n - s) e^{-i s w_j} e^{i t w_k}`,
/// i.e. `E[conj(d_0(w_j)) d_l(w_k)]`. With `conjugated = false` the first
/// phase flips sign and the result is conjugated, giving
/// `E[conj(d_0(w_j)) conj(d_l(w_k))]`.
fn double_sum(
    model: &ArfimaModel,
    n: usize,
    j: usize,
    k: usize,
    ell: usize,
    conjugated: bool,
) -> Complex64 {
    let acv = model.autocovariance((ell + 1) * n).unwrap();
    let sj = if conjugated { -1.0 } else { 1.0 };
    let mut acc = Complex64::new(0.0, 0.0);
    for s in 1..=n {
        for t in 1..=n {
            let h = (t + ell * n) as i64 - s as i64;
            let gamma = acv[h.unsigned_abs() as usize];
            acc += Complex64::from_polar(gamma, sj * s as f64 * freq(j, n) + t as f64 * freq(k, n));
        }
    }
    let v = acc / (2.0 * PI * n as f64);
    if conjugated {
        v
    } else {
        v.conj()
    }
}

#[test]
fn finite_n_matches_double_sum() {
    let n = 16;
    for &(d, phi) in &[(0.3, 0.0), (-0.3, 0.0), (0.3, 0.5), (0.2, -0.4)] {
        let model = ArfimaModel::new(d, phi, 1.0).unwrap();
        for &(j, k) in &[(1usize, 1usize), (1, 2), (2, 5), (3, 8)] {
            for ell in 0..3 {
                for conjugated in [true, false] {
                    let got = finite_n_dft_covariance(&model, n, j, k, ell, conjugated).unwrap();
                    let want = double_sum(&model, n, j, k, ell, conjugated);
                    let diff = (got.value - want).norm();
                    assert!(
                        diff < 1e-7 * (1.0 + want.norm()),
                        "d={d} phi={phi} j={j} k={k} l={ell} conj={conjugated}: {} vs {want}",
                        got.value
                    );
                }
            }
        }
    }
}

#[test]
fn periodogram_mean_matches_fejer_sum() {
    // E[I(w_k)] = (2 pi n)^(-1) sum_{|h| < n} (n - |h|) gamma(h) cos(h w_k)
    let n = 64;
    let model = ArfimaModel::new(0.35, -0.3, 1.3).unwrap();
    let acv = model.autocovariance(n).unwrap();
    for k in [1usize, 2, 7, 32] {
        let w = freq(k, n);
        let mut want = n as f64 * acv[0];
        for (h, a) in acv.iter().enumerate().take(n).skip(1) {
            want += 2.0 * (n - h) as f64 * a * (h as f64 * w).cos();
        }
        want /= 2.0 * PI * n as f64;
        let got = finite_n_dft_covariance(&model, n, k, k, 0, true).unwrap();
        assert!((got.value.re - want).abs() < 1e-8 * want, "k={k}");
        assert!(got.value.im.abs() < 1e-9);
    }
}

#[test]
fn periodogram_bias_envelope() {
    let n = 1024;
    for &d in &[-0.3, 0.3] {
        let model = ArfimaModel::fractional_noise(d).unwrap();
        for k in 4..=n / 4 {
            let e = finite_n_dft_covariance(&model, n, k, k, 0, true)
                .unwrap()
                .value
                .re;
            let bias = e / model.spectral_density(freq(k, n)).unwrap() - 1.0;
            let cap = 5.0 * (1.0 + k as f64).ln() / k as f64;
            assert!(bias.abs() <= cap, "d={d} k={k}: {bias}");
        }
    }
}

#[test]
fn cross_epoch_covariance_decays_in_ell() {
    let n = 1024;
    let d = 0.3;
    let model = ArfimaModel::fractional_noise(d).unwrap();
    let scale = freq(1, n).powf(d) * freq(2, n).powf(d);
    let mut prev = f64::INFINITY;
    for ell in 1..=8 {
        let v = finite_n_dft_covariance(&model, n, 1, 2, ell, true)
            .unwrap()
            .value
            .norm()
            * scale;
        assert!(v < prev, "l={ell}: {v} >= {prev}");
        prev = v;
    }
}

fn normalized_limit(d: f64, j: usize, k: usize, ell: usize, which: KernelWhich) -> Complex64 {
    let q = KernelQuery::new(d, j, k, ell).unwrap();
    let f0 = ArfimaModel::fractional_noise(d).unwrap().f_star_zero();
    limit_kernel(q, which).unwrap().value * q.limit_scale() * f0
}

fn normalized_finite(
    d: f64,
    n: usize,
    j: usize,
    k: usize,
    ell: usize,
    conjugated: bool,
) -> Complex64 {
    let model = ArfimaModel::fractional_noise(d).unwrap();
    let v = finite_n_dft_covariance(&model, n, j, k, ell, conjugated)
        .unwrap()
        .value;
    v * freq(j, n).powf(d) * freq(k, n).powf(d)
}

#[test]
fn finite_n_converges_to_d1() {
    for &(d, j, k, ell) in &[
        (0.3, 1usize, 1usize, 0usize),
        (0.3, 1, 2, 1),
        (-0.2, 2, 3, 0),
        (0.4, 1, 3, 2),
    ] {
        let limit = normalized_limit(d, j, k, ell, KernelWhich::D1);
        let gap = |n: usize| (normalized_finite(d, n, j, k, ell, true) - limit).norm();
        let (coarse, fine) = (gap(256), gap(2048));
        assert!(
            fine < coarse,
            "d={d} j={j} k={k} l={ell}: {fine} >= {coarse}"
        );
        assert!(
            fine < 0.05
                * limit
                    .norm()
                    .max(0.05 * normalized_limit(d, j, j, 0, KernelWhich::D1).norm())
        );
    }
}

#[test]
fn unconjugated_finite_n_converges_to_d2() {
    for &(d, j, k, ell) in &[
        (0.3, 1usize, 1usize, 0usize),
        (0.3, 1, 2, 1),
        (-0.2, 2, 3, 0),
    ] {
        let limit = normalized_limit(d, j, k, ell, KernelWhich::D2);
        let diag = normalized_limit(d, j, j, 0, KernelWhich::D1).norm();
        let gap = |n: usize| (normalized_finite(d, n, j, k, ell, false) - limit).norm();
        let (coarse, fine) = (gap(256), gap(2048));
        assert!(
            fine < coarse.max(1e-3 * diag),
            "d={d} j={j} k={k} l={ell}: {fine} vs {coarse}"
        );
        assert!(fine < 0.05 * diag, "d={d} j={j} k={k} l={ell}: {fine}");
    }
}

#[test]
fn white_noise_limit_kernels() {
    // at d = 0 the Delta functions are orthogonal on R
    for &(j, k) in &[(1usize, 1usize), (2, 2), (1, 3)] {
        for ell in 0..3 {
            let q = KernelQuery::new(0.0, j, k, ell).unwrap();
            let d1 = limit_kernel(q, KernelWhich::D1).unwrap().value;
            let want = if j == k && ell == 0 { 2.0 * PI } else { 0.0 };
            assert!(
                (d1 - Complex64::new(want, 0.0)).norm() < 1e-8,
                "j={j} k={k} l={ell}: {d1}"
            );
            assert!(d1.im.abs() < 1e-8);
        }
    }
}

#[test]
fn mse_ratio_trend() {
    let asymptote = (1.0 / trigamma_int(1).unwrap()).powf(0.8);
    let model = ArfimaModel::new(0.3, -0.3, 1.0).unwrap();
    let base = mse_prediction(&model, 4096, 1, None)
        .unwrap()
        .optimal_mse
        .unwrap();
    let mut prev = 1.0;
    for g in 1..=16usize {
        let r = epoch_mse_ratio(g).unwrap();
        if g > 1 {
            assert!(r < prev && r > asymptote);
        }
        // the ratio is the optimal MSE at N = 4096 with g epochs against g = 1
        let p = mse_prediction(&model, 4096 / g, g, None).unwrap();
        if 4096 % g == 0 {
            assert!((p.optimal_mse.unwrap() / base - r).abs() < 1e-12, "g={g}");
        }
        prev = r;
    }
    assert!(epoch_mse_ratio(1000).unwrap() - asymptote < 1e-3);
}
