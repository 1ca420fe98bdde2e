//! Dense complex polynomials in the monomial basis.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;

/// `c_0 + c_1 z + ... + c_d z^d`. The declared degree is `coeffs.len() - 1`;
/// a zero leading coefficient is allowed (the *-transform needs it).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
}

impl ComplexPolynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            return Self::zero();
        }
        debug_assert!(coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()));
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0)],
        }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// `z^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = Complex64::new(1.0, 0.0);
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Degree after dropping exactly-zero leading coefficients.
    pub fn effective_degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| *c != Complex64::new(0.0, 0.0))
            .unwrap_or(0)
    }

    pub fn trimmed(&self, tol: f64) -> Self {
        let keep = self
            .coeffs
            .iter()
            .rposition(|c| c.norm() > tol)
            .unwrap_or(0);
        Self::new(self.coeffs[..=keep].to_vec())
    }

    /// Pads with zeros so that the declared degree is at least `degree`.
    pub fn padded(&self, degree: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        if coeffs.len() < degree + 1 {
            coeffs.resize(degree + 1, Complex64::new(0.0, 0.0));
        }
        Self { coeffs }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `(p(z), p'(z))` by a single Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn eval_at_angle(&self, theta: f64) -> Complex64 {
        self.eval(Complex64::from_polar(1.0, theta))
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k];
        coeffs.extend_from_slice(&self.coeffs);
        Self { coeffs }
    }

    /// The `n`-th reciprocal `z^n conj(p(1/conj z))`: coefficient `k` of the result
    /// is `conj(c_{n-k})`.
    pub fn star(&self, n: usize) -> Result<Self> {
        let eff = self.effective_degree();
        if eff > n {
            return Err(Error::InvalidOrder {
                degree: eff,
                order: n,
            });
        }
        Ok(Self::new(
            (0..=n).map(|k| self.coeff(n - k).conj()).collect(),
        ))
    }

    pub fn conj_coeffs(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    pub fn has_real_coeffs(&self, tol: f64) -> bool {
        let scale = self.max_abs_coeff().max(1.0);
        self.coeffs.iter().all(|c| c.im.abs() <= tol * scale)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Values on the uniform grid `theta_j = 2 pi j / n`.
    pub fn eval_on_grid(&self, n: usize) -> Vec<Complex64> {
        fft::synthesize(&self.coeffs, n)
    }

    /// Winding number of `theta -> p(e^{i theta})` computed from principal-value
    /// argument increments on a grid of size `n`.
    pub fn winding_number(&self, n: usize) -> i64 {
        winding_from_samples(&self.eval_on_grid(n))
    }

    pub fn min_modulus_on_circle(&self, n: usize) -> (f64, f64) {
        let vals = self.eval_on_grid(n);
        let (j, m) = vals
            .iter()
            .map(|v| v.norm())
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (j, m)| if m < acc.1 { (j, m) } else { acc });
        (m, 2.0 * PI * j as f64 / n as f64)
    }

    /// Checks that the polynomial has no zeros in the closed unit disk: strictly
    /// positive modulus on a boundary grid and winding number zero.
    pub fn check_zero_free_in_closed_disk(&self, n: usize) -> Result<()> {
        let vals = self.eval_on_grid(n);
        let scale = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let (j, min) = vals
            .iter()
            .map(|v| v.norm())
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (j, m)| if m < acc.1 { (j, m) } else { acc });
        if !(min > 1e-14 * scale.max(1e-300)) {
            return Err(Error::ZeroOnCircle {
                theta: 2.0 * PI * j as f64 / n as f64,
            });
        }
        let w = winding_from_samples(&vals);
        if w != 0 {
            return Err(Error::ZeroInDisk {
                detail: format!("winding number {w}"),
            });
        }
        Ok(())
    }
}

/// Net winding of a closed sampled curve around the origin.
pub fn winding_from_samples(vals: &[Complex64]) -> i64 {
    let n = vals.len();
    let mut total = 0.0;
    for j in 0..n {
        let a = vals[j];
        let b = vals[(j + 1) % n];
        total += (b / a).arg();
    }
    (total / (2.0 * PI)).round() as i64
}

impl Add for &ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn add(self, rhs: Self) -> ComplexPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPolynomial::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn sub(self, rhs: Self) -> ComplexPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPolynomial::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn mul(self, rhs: Self) -> ComplexPolynomial {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexPolynomial::new(out)
    }
}

impl Neg for &ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn neg(self) -> ComplexPolynomial {
        self.scale_real(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for ComplexPolynomial {
            type Output = ComplexPolynomial;
            fn $f(self, rhs: Self) -> ComplexPolynomial {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Free-function form of [`ComplexPolynomial::star`].
pub fn star_transform(p: &ComplexPolynomial, n: usize) -> Result<ComplexPolynomial> {
    p.star(n)
}
