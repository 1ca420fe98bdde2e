//! Adaptive Gauss–Kronrod quadrature, including a variant for periodic
//! integrands with narrow spikes.
//!
//! Reciprocals of polynomials with zeros very close to the unit circle have
//! Lorentzian peaks far narrower than any affordable uniform grid. The spike
//! rule locates every local maximum on a coarse grid, pins it down with a
//! golden-section search on `1/g`, and uses the peaks as panel breakpoints so
//! that bisection resolves each peak from its endpoint.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

// Nodes and weights of the 7-point Gauss / 15-point Kronrod pair on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// `∫|f|` estimate, for the round-off floor.
    abs: f64,
}

impl Panel {
    /// Error already at the level of rounding in the panel sum; splitting
    /// further cannot help.
    fn at_roundoff(&self) -> bool {
        self.error <= 50.0 * f64::EPSILON * self.abs
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
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
        self.error.total_cmp(&other.error)
    }
}

fn kronrod_nodes(a: f64, b: f64) -> [(f64, f64); 15] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [(0.0, 0.0); 15];
    for i in 0..7 {
        out[i] = (c - h * XGK[i], h * WGK[i]);
        out[14 - i] = (c + h * XGK[i], h * WGK[i]);
    }
    out[7] = (c, h * WGK[7]);
    out
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    let mut abs = WGK[7] * fc.abs();
    for i in 0..7 {
        let f1 = f(c - h * XGK[i]);
        let f2 = f(c + h * XGK[i]);
        k += WGK[i] * (f1 + f2);
        abs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            g += WG[i / 2] * (f1 + f2);
        }
    }
    let value = k * h;
    let error = ((k - g) * h).abs();
    Panel {
        a,
        b,
        value,
        error,
        abs: abs * h.abs(),
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

/// Quadrature nodes and weights produced by adaptive refinement; reusable for
/// integrands that share the refined function's singular structure.
#[derive(Debug, Clone, Default)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Settings for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-11,
            abs_tol: 0.0,
            max_panels: 2_000_000,
        }
    }
}

fn refine<F: Fn(f64) -> f64>(
    f: &F,
    breakpoints: &[f64],
    opts: AdaptiveOptions,
) -> (Vec<Panel>, Integral) {
    let mut heap = BinaryHeap::new();
    // panels whose error is at the rounding floor; never split again
    let mut done = Vec::new();
    let mut total = 0.0;
    let mut err = 0.0;
    let push = |p: Panel, heap: &mut BinaryHeap<Panel>, done: &mut Vec<Panel>, err: &mut f64| {
        if p.at_roundoff() {
            done.push(p);
        } else {
            *err += p.error;
            heap.push(p);
        }
    };
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            let p = gk15(f, w[0], w[1]);
            total += p.value;
            push(p, &mut heap, &mut done, &mut err);
        }
    }
    while err > opts.abs_tol.max(opts.rel_tol * total.abs()) && heap.len() + done.len() < opts.max_panels {
        let Some(p) = heap.pop() else { break };
        err -= p.error;
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // Panel can no longer be split in floating point.
            push(Panel { error: 0.0, ..p }, &mut heap, &mut done, &mut err);
            continue;
        }
        let l = gk15(f, p.a, mid);
        let r = gk15(f, mid, p.b);
        total += l.value + r.value - p.value;
        let sum = l.value + r.value;
        if l.error + r.error >= 0.99 * p.error && (sum - p.value).abs() <= 1e-5 * sum.abs() {
            // Bisection no longer reduces the estimate although the values
            // agree: the error is evaluation noise.
            done.push(l);
            done.push(r);
            continue;
        }
        push(l, &mut heap, &mut done, &mut err);
        push(r, &mut heap, &mut done, &mut err);
    }
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.extend(done);
    // Re-sum to shed accumulated rounding from the running totals.
    let value = panels.iter().map(|p| p.value).sum();
    let error = panels.iter().map(|p| p.error).sum();
    let n = panels.len();
    (
        panels,
        Integral {
            value,
            error,
            panels: n,
        },
    )
}

/// Globally adaptive G7/K15 integration over the union of the intervals between
/// consecutive `breakpoints` (which must be increasing).
pub fn adaptive<F: Fn(f64) -> f64>(f: F, breakpoints: &[f64], opts: AdaptiveOptions) -> Integral {
    refine(&f, breakpoints, opts).1
}

/// Like [`adaptive`], but also returns the final panel set as a reusable rule.
pub fn adaptive_rule<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    opts: AdaptiveOptions,
) -> (QuadratureRule, Integral) {
    let (mut panels, integral) = refine(&f, breakpoints, opts);
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut rule = QuadratureRule::default();
    for p in &panels {
        for (x, w) in kronrod_nodes(p.a, p.b) {
            rule.nodes.push(x);
            rule.weights.push(w);
        }
    }
    (rule, integral)
}

/// Minimizes a unimodal function on `[lo, hi]` by golden-section search.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, iters: usize) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        if b - a <= f64::EPSILON * (a.abs() + b.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

/// Locations of the local maxima of a nonnegative `g` on `[a, b]`, found on a
/// uniform grid of `grid` cells and refined by golden-section search on `1/g`.
pub fn locate_peaks<F: Fn(f64) -> f64>(g: &F, a: f64, b: f64, grid: usize) -> Vec<f64> {
    let h = (b - a) / grid as f64;
    let xs: Vec<f64> = (0..=grid).map(|j| a + h * j as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let mut peaks = Vec::new();
    for j in 1..grid {
        if vals[j] >= vals[j - 1] && vals[j] >= vals[j + 1] && vals[j] > 0.0 {
            let x = golden_min(|t| 1.0 / g(t), xs[j - 1], xs[j + 1], 200);
            peaks.push(x);
        }
    }
    peaks.dedup_by(|x, y| (*x - *y).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0));
    peaks
}

/// Builds a reusable rule for `g` on `[a, b]` whose panels resolve every peak
/// visible on the `grid`-cell scan. Initial panels are no wider than
/// `(b - a) / min_panels`.
pub fn spike_rule<F: Fn(f64) -> f64>(
    g: F,
    a: f64,
    b: f64,
    grid: usize,
    min_panels: usize,
    opts: AdaptiveOptions,
) -> (QuadratureRule, Integral) {
    let mut bps: Vec<f64> = (0..=min_panels)
        .map(|j| a + (b - a) * j as f64 / min_panels as f64)
        .collect();
    bps.extend(locate_peaks(&g, a, b, grid));
    bps.sort_by(|x, y| x.total_cmp(y));
    bps.dedup_by(|x, y| (*x - *y).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0));
    adaptive_rule(g, &bps, opts)
}
