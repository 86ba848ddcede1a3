//! One-dimensional quadrature and search helpers: composite Simpson,
//! tanh-sinh with level-halving error estimates, globally adaptive
//! Gauss-Kronrod (7, 15), golden-section maximization and bisection.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::par;
use crate::{Error, Result};

/// A quadrature value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    /// Integrand evaluations used.
    pub evaluations: usize,
}

impl Estimate {
    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            self.error
        } else {
            (self.error / self.value).abs()
        }
    }
}

/// Composite Simpson rule over equally spaced samples (odd count >= 3).
pub fn simpson(values: &[f64], h: f64) -> Result<f64> {
    let n = values.len();
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "Simpson's rule needs an odd number of samples >= 3, got {n}"
        )));
    }
    let mut s = values[0] + values[n - 1];
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    Ok(s * h / 3.0)
}

const TANH_SINH_TMAX: f64 = 6.0;

/// Tanh-sinh quadrature of `f` over `[a, b]`.
///
/// Refines by halving the step until two consecutive levels agree to
/// `rel_tol` (relative) or `abs_tol`, whichever is looser. Nodes are never
/// placed exactly on an endpoint, so integrable endpoint singularities are
/// fine; non-finite samples are dropped.
pub fn tanh_sinh<F>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64, max_level: usize) -> Estimate
where
    F: Fn(f64) -> f64,
{
    if b <= a {
        return Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        };
    }
    let half = 0.5 * (b - a);
    let mut evaluations = 0;
    let mut sample = |t: f64| -> f64 {
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u.abs()).exp();
        // distance from the nearer endpoint, computed without cancellation
        let offset = half * 2.0 * e / (1.0 + e);
        let x = if t >= 0.0 { b - offset } else { a + offset };
        if x <= a || x >= b {
            return 0.0;
        }
        let w = half * std::f64::consts::FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
        evaluations += 1;
        let v = f(x);
        if v.is_finite() {
            w * v
        } else {
            0.0
        }
    };

    let mut h = 1.0;
    let mut sum = sample(0.0);
    let mut k = 1;
    while (k as f64) * h <= TANH_SINH_TMAX {
        let t = k as f64 * h;
        sum += sample(t) + sample(-t);
        k += 1;
    }
    let mut value = sum * h;
    let mut error = f64::INFINITY;
    for level in 1..=max_level {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= TANH_SINH_TMAX {
            let t = k as f64 * h;
            sum += sample(t) + sample(-t);
            k += 2;
        }
        let next = sum * h;
        error = (next - value).abs();
        value = next;
        if level >= 3 && (error <= rel_tol * value.abs() || error <= abs_tol) {
            break;
        }
    }
    Estimate {
        value,
        error,
        evaluations,
    }
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
/// Gauss weights for nodes 1, 3, 5 and 7 of `GK_NODES`.
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Panel {
    id: u64,
    a: f64,
    b: f64,
    value: f64,
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
    // largest error first, ties to the lower id
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.id.cmp(&self.id))
    }
}

fn gk_panel<F>(f: &F, a: f64, b: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let xs: Vec<f64> = (0..15)
        .map(|i| match i.cmp(&7) {
            Ordering::Less => c - h * GK_NODES[i],
            Ordering::Equal => c,
            Ordering::Greater => c + h * GK_NODES[14 - i],
        })
        .collect();
    let fx = par::map_slice(&xs, |&x| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    });
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    for (i, &v) in fx.iter().enumerate() {
        let k = if i <= 7 { i } else { 14 - i };
        kronrod += KRONROD_WEIGHTS[k] * v;
        if k % 2 == 1 {
            gauss += GAUSS_WEIGHTS[k / 2] * v;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Globally adaptive Gauss-Kronrod (7, 15) integration.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate is below `max(rel_tol |I|, abs_tol)`. The 15 nodes of a panel
/// are evaluated in parallel. Fails with `NoConvergence` after
/// `max_panels` panels.
pub fn adaptive_gk<F>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64, max_panels: usize) -> Result<Estimate>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    if b <= a {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut heap = BinaryHeap::new();
    let mut next_id = 0u64;
    let (value, error) = gk_panel(&f, a, b);
    heap.push(Panel {
        id: next_id,
        a,
        b,
        value,
        error,
    });
    next_id += 1;
    let mut evaluations = 15;
    loop {
        // sums in id order for reproducibility
        let mut panels: Vec<&Panel> = heap.iter().collect();
        panels.sort_by_key(|p| p.id);
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.error).sum();
        if err <= (rel_tol * total.abs()).max(abs_tol) {
            return Ok(Estimate {
                value: total,
                error: err,
                evaluations,
            });
        }
        if heap.len() >= max_panels {
            return Err(Error::NoConvergence(format!(
                "adaptive quadrature: error {err:e} on {total:e} after {} panels",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk_panel(&f, lo, hi);
            heap.push(Panel {
                id: next_id,
                a: lo,
                b: hi,
                value,
                error,
            });
            next_id += 1;
            evaluations += 15;
        }
    }
}

/// Maximizes a unimodal function on `[a, b]` by golden-section search.
/// Returns `(argmax, max)`.
pub fn golden_max<F>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    let candidates = [(x1, f1), (x2, f2), (a, f(a)), (b, f(b))];
    candidates
        .into_iter()
        .fold((x1, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
}

/// Root of `f` in `[a, b]` by bisection, assuming `f(a)` and `f(b)` differ
/// in sign. Runs until the bracket stops shrinking.
pub fn bisect<F>(f: F, a: f64, b: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = (a, b);
    let positive_at_lo = f(lo) >= 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        if (f(mid) >= 0.0) == positive_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Interval where a concave `f` is non-negative inside `[a, b]`, or `None`
/// when its maximum is negative.
pub fn superlevel_interval<F>(f: F, a: f64, b: f64, tol: f64) -> Option<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let (xm, fm) = golden_max(&f, a, b, tol);
    if fm < 0.0 {
        return None;
    }
    let lo = if f(a) >= 0.0 { a } else { bisect(&f, a, xm) };
    let hi = if f(b) >= 0.0 { b } else { bisect(&f, xm, b) };
    Some((lo, hi))
}
