//! Fejér–Riesz factorization of positive trigonometric polynomials and phase
//! functions of outer polynomials.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::poly::ComplexPolynomial;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Real-valued `w(θ) = Σ_{|k|≤m} ŵ_k e^{ikθ}` with `ŵ_{−k} = conj(ŵ_k)`;
/// stores `ŵ_0..ŵ_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    coeffs: Vec<Complex64>,
}

/// Relative size of Fourier content above the declared degree that
/// [`TrigPolynomial::from_samples`] tolerates.
pub const DEGREE_TOL: f64 = 1e-10;

impl TrigPolynomial {
    /// `coeffs[0]` must be real.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        coeffs[0].im = 0.0;
        Self { coeffs }
    }

    /// The even polynomial `a_0 + 2 Σ a_k cos kθ`.
    pub fn from_even(a: &[f64]) -> Self {
        Self::new(a.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Recovers the coefficients from samples on the uniform grid `2πj/N`,
    /// rejecting content above degree `m`.
    pub fn from_samples(samples: &[f64], m: usize) -> Result<Self> {
        let n = samples.len();
        if n < 2 * m + 1 {
            return Err(Error::InsufficientResolution {
                residual: f64::INFINITY,
                grid: n,
            });
        }
        let c = fft::analyze_real(samples);
        let scale = c.iter().map(|x| x.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let beyond = (m + 1..=n / 2).map(|k| c[k].norm()).fold(0.0, f64::max);
        if beyond > DEGREE_TOL * scale {
            return Err(Error::DegreeExceeded {
                degree: m,
                relative: beyond / scale,
            });
        }
        // negative frequencies sit at the top of the FFT output
        Ok(Self::new((0..=m).map(|k| c[(n - k) % n].conj()).collect()))
    }

    /// `|P(e^{iθ})|²`.
    pub fn abs_sq(p: &ComplexPolynomial) -> Self {
        let c = p.coeffs();
        let d = c.len();
        Self::new(
            (0..d)
                .map(|k| (0..d - k).map(|j| c[j + k] * c[j].conj()).sum())
                .collect(),
        )
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_even(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let z = Complex64::from_polar(1.0, theta);
        let mut acc = ZERO;
        for c in self.coeffs.iter().skip(1).rev() {
            acc = (acc + c) * z;
        }
        self.coeffs[0].re + 2.0 * acc.re
    }

    /// Values on the grid `2πj/n`.
    pub fn samples(&self, n: usize) -> Vec<f64> {
        let mut two_sided = vec![ZERO; n];
        for (k, c) in self.coeffs.iter().enumerate() {
            two_sided[k % n] += c;
            if k > 0 {
                two_sided[(n - k % n) % n] += c.conj();
            }
        }
        fft::synthesize(&two_sided, n).iter().map(|v| v.re).collect()
    }
}

impl std::ops::Add for &TrigPolynomial {
    type Output = TrigPolynomial;
    fn add(self, rhs: Self) -> TrigPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let get = |v: &[Complex64], k: usize| v.get(k).copied().unwrap_or(ZERO);
        TrigPolynomial::new(
            (0..len)
                .map(|k| get(&self.coeffs, k) + get(&rhs.coeffs, k))
                .collect(),
        )
    }
}

/// Tolerance for the factorization residual `max | |Q|² − w | / w`.
pub const FACTOR_TOL: f64 = 1e-10;
const MAX_GRID: usize = 1 << 22;

/// Outer factor `Q` of degree `m` with `|Q(e^{iθ})|² = w(θ)`, `Q(0) > 0`, and no
/// zeros in the closed disk. Computed from the analytic completion of
/// `½ log w` on an FFT grid, doubling the grid until the residual is below
/// [`FACTOR_TOL`]. Real coefficients when `w` is even.
pub fn fejer_riesz(w: &TrigPolynomial) -> Result<ComplexPolynomial> {
    let m = w.degree();
    let mut grid = (16 * (m + 1)).next_power_of_two().max(256);
    loop {
        let samples = w.samples(grid);
        let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min > 0.0) {
            return Err(Error::NotPositive { min });
        }
        let logs: Vec<f64> = samples.iter().map(|v| 0.5 * v.ln()).collect();
        let a = fft::analyze_real(&logs);
        let mut h = vec![ZERO; grid];
        h[0] = a[0];
        for k in 1..grid / 2 {
            h[k] = 2.0 * a[k];
        }
        h[grid / 2] = a[grid / 2];
        let vals: Vec<Complex64> = fft::synthesize(&h, grid).iter().map(|v| v.exp()).collect();
        let taylor = fft::analyze(&vals);
        let mut q: Vec<Complex64> = taylor[..=m].to_vec();
        if w.is_even() {
            q.iter_mut().for_each(|c| c.im = 0.0);
        }
        let q = ComplexPolynomial::new(q);
        let residual = factor_residual(&q, w, 2 * grid);
        if residual < FACTOR_TOL {
            return Ok(q);
        }
        if grid >= MAX_GRID {
            return Err(Error::InsufficientResolution { residual, grid });
        }
        log::debug!("fejer_riesz: residual {residual:e} at grid {grid}, refining");
        grid *= 2;
    }
}

/// `max_j | |Q(θ_j)|² − w(θ_j) | / w(θ_j)` on a grid of `n` points.
pub fn factor_residual(q: &ComplexPolynomial, w: &TrigPolynomial, n: usize) -> f64 {
    let qv = q.eval_on_grid(n);
    let wv = w.samples(n);
    qv.iter()
        .zip(&wv)
        .map(|(a, b)| (a.norm_sqr() - b).abs() / b.abs())
        .fold(0.0, f64::max)
}

/// Largest principal-value increment accepted before a step is subdivided.
const MAX_ARG_STEP: f64 = PI / 4.0;

/// Continuous change of `arg f(θ)` from `a` to `b`, following the curve with
/// principal-value increments and bisecting any step whose increment exceeds
/// π/4. Fails if `f` vanishes.
pub fn arg_increment<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, steps: usize) -> Result<f64> {
    fn seg<F: Fn(f64) -> Complex64>(
        f: &F,
        a: f64,
        fa: Complex64,
        b: f64,
        fb: Complex64,
        depth: u32,
    ) -> Result<f64> {
        if fa == ZERO || fb == ZERO {
            return Err(Error::ZeroOnCircle {
                theta: if fa == ZERO { a } else { b },
            });
        }
        let d = (fb / fa).arg();
        if d.abs() <= MAX_ARG_STEP {
            return Ok(d);
        }
        if depth > 60 {
            return Err(Error::ZeroOnCircle { theta: 0.5 * (a + b) });
        }
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        Ok(seg(f, a, fa, mid, fm, depth + 1)? + seg(f, mid, fm, b, fb, depth + 1)?)
    }
    let steps = steps.max(1);
    let h = (b - a) / steps as f64;
    let mut total = 0.0;
    let mut x0 = a;
    let mut f0 = f(a);
    for k in 1..=steps {
        let x1 = if k == steps { b } else { a + h * k as f64 };
        let f1 = f(x1);
        total += seg(f, x0, f0, x1, f1, 0)?;
        x0 = x1;
        f0 = f1;
    }
    Ok(total)
}

/// Winding number of `θ ↦ p(e^{iθ})` around 0, robust to zeros very close
/// to the circle.
pub fn winding_number(p: &ComplexPolynomial) -> Result<i64> {
    let f = |t: f64| p.eval_at_angle(t);
    let steps = 8 * (p.degree() + 1);
    let total = arg_increment(&f, 0.0, 2.0 * PI, steps)?;
    Ok((total / (2.0 * PI)).round() as i64)
}

/// Continuous branch of `arg Q(e^{iθ})` normalized by `φ(0) = 0`.
#[derive(Debug, Clone)]
pub struct Phase {
    q: ComplexPolynomial,
}

impl Phase {
    /// Validates that `Q` has no zeros in the closed disk.
    pub fn new(q: &ComplexPolynomial) -> Result<Self> {
        let grid = (16 * (q.degree() + 1)).next_power_of_two().max(256);
        let (min, theta) = q.min_modulus_on_circle(grid);
        if !(min > 1e-14 * q.max_abs_coeff()) {
            return Err(Error::ZeroOnCircle { theta });
        }
        if winding_number(q)? != 0 {
            return Err(Error::ZeroInDisk {
                detail: "phase requires an outer polynomial".into(),
            });
        }
        Ok(Self { q: q.clone() })
    }

    pub fn at(&self, theta: f64) -> Result<f64> {
        let steps = ((theta.abs() * (self.q.degree() + 1) as f64).ceil() as usize).max(1);
        arg_increment(&|t| self.q.eval_at_angle(t), 0.0, theta, steps)
    }

    /// `φ'(θ) = Re(z Q'(z)/Q(z))` at `z = e^{iθ}`.
    pub fn derivative(&self, theta: f64) -> f64 {
        let z = Complex64::from_polar(1.0, theta);
        let (v, d) = self.q.eval_with_derivative(z);
        (z * d / v).re
    }
}

/// Continuous argument of `Q(e^{iθ})` with `φ(0) = 0`.
pub fn phase(q: &ComplexPolynomial, theta: f64) -> Result<f64> {
    Phase::new(q)?.at(theta)
}

/// `max_{|θ|<υ} |φ'(θ)| / m` using central differences
/// `arg(Q(θ+h)/Q(θ−h)) / 2h` on a grid of step `10^{−3}/m`.
pub fn verify_phase_bound(q: &ComplexPolynomial, m: usize, upsilon: f64) -> f64 {
    let m = m.max(1) as f64;
    let step = 1e-3 / m;
    let h = 0.5 * step;
    let count = (upsilon / step).floor() as i64;
    let mut worst: f64 = 0.0;
    for k in -count..=count {
        let t = k as f64 * step;
        if t.abs() >= upsilon {
            continue;
        }
        let d = (q.eval_at_angle(t + h) / q.eval_at_angle(t - h)).arg() / (2.0 * h);
        worst = worst.max(d.abs());
    }
    worst / m
}
