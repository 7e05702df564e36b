//! Globally adaptive Gauss-Kronrod (G7/K15) quadrature over a list of
//! breakpoints.
//!
//! Integrands are complex valued; [`integrate_real`] wraps a real function.
//! The integration range is first cut at the caller's breakpoints (places
//! where the integrand has a singularity, a kink or a known oscillation
//! period), then the panel with the largest error estimate is bisected until
//! the summed estimate meets the tolerance. Panels are summed in position
//! order, so the result does not depend on the refinement history.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances for [`integrate`]. Convergence means
/// `error <= max(abs_tol, rel_tol * |value|)`.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_panels: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = f(center - dx) + f(center + dx);
        kron += pair * WGK[i];
        if i % 2 == 1 {
            gauss += pair * WG[i / 2];
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).norm();
    (value, error)
}

/// Integrates `f` over `[points[0], points[last]]`, with every interior entry
/// of `points` used as an initial panel edge. `points` must be strictly
/// increasing and have at least two entries.
pub fn integrate<F>(f: F, points: &[f64], opts: QuadOptions) -> Result<QuadResult<Complex64>>
where
    F: Fn(f64) -> Complex64,
{
    if points.len() < 2 || points.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument(
            "quadrature breakpoints must be strictly increasing".into(),
        ));
    }

    let mut heap = BinaryHeap::with_capacity(points.len() * 2);
    // Panels too narrow to split any further.
    let mut frozen: Vec<Panel> = Vec::new();
    for w in points.windows(2) {
        let (value, error) = kronrod(&f, w[0], w[1]);
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }

    let total_error = |heap: &BinaryHeap<Panel>, frozen: &[Panel]| -> (Complex64, f64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut e = 0.0;
        for p in heap.iter().chain(frozen.iter()) {
            v += p.value;
            e += p.error;
        }
        (v, e)
    };

    let (mut value, mut error) = total_error(&heap, &frozen);
    let mut since_resum = 0usize;
    while error > opts.abs_tol.max(opts.rel_tol * value.norm()) {
        if heap.len() + frozen.len() >= opts.max_panels {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            frozen.push(worst);
            continue;
        }
        let (lv, le) = kronrod(&f, worst.a, mid);
        let (rv, re) = kronrod(&f, mid, worst.b);
        value += lv + rv - worst.value;
        error += le + re - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });
        // Incremental updates drift; resum now and then.
        since_resum += 1;
        if since_resum == 256 {
            (value, error) = total_error(&heap, &frozen);
            since_resum = 0;
        }
    }

    let mut panels: Vec<Panel> = heap.into_vec();
    panels.extend(frozen);
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for p in &panels {
        value += p.value;
        error += p.error;
    }
    let tolerance = opts.abs_tol.max(opts.rel_tol * value.norm());
    if !(error <= tolerance) {
        return Err(Error::QuadratureNonConvergence {
            estimate: error,
            tolerance,
        });
    }
    Ok(QuadResult {
        value,
        error,
        panels: panels.len(),
    })
}

pub fn integrate_real<F>(f: F, points: &[f64], opts: QuadOptions) -> Result<QuadResult<f64>>
where
    F: Fn(f64) -> f64,
{
    let r = integrate(|x| Complex64::new(f(x), 0.0), points, opts)?;
    Ok(QuadResult {
        value: r.value.re,
        error: r.error,
        panels: r.panels,
    })
}

/// `n + 1` equally spaced points from `a` to `b`, endpoints exact.
pub fn uniform_points(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    let h = (b - a) / n as f64;
    let mut pts: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
    pts.push(b);
    pts
}
