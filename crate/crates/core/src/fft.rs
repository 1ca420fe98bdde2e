//! Thin wrappers over `rustfft` with the sign conventions used across the crate.
//!
//! `synthesize` evaluates `sum_k c_k e^{+ik theta_j}` on the uniform grid
//! `theta_j = 2 pi j / N`; `analyze` returns the Fourier coefficients
//! `(1/N) sum_j f_j e^{-ik theta_j}`.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Values of the Fourier series with coefficients `coeffs` (index = frequency,
/// folded modulo `n`) on the grid of size `n`.
pub fn synthesize(coeffs: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (k, c) in coeffs.iter().enumerate() {
        buf[k % n] += c;
    }
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n).process(&mut buf));
    buf
}

/// Fourier coefficients of grid samples; entry `k` is frequency `k` (or `k - n`
/// for the upper half).
pub fn analyze(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf = values.to_vec();
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n).process(&mut buf));
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Same as [`analyze`] for real samples.
pub fn analyze_real(values: &[f64]) -> Vec<Complex64> {
    let buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    analyze(&buf)
}

/// Uniform angles `2 pi j / n`.
pub fn grid_angles(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| 2.0 * std::f64::consts::PI * j as f64 / n as f64)
        .collect()
}
