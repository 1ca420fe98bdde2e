//! Truncated binomial series approximating `(1−z)^{±β}`, Fejér kernels, and
//! numerical checks of the bounds these polynomials satisfy near `z = 1`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::ComplexPolynomial;
use crate::quadrature::{adaptive, AdaptiveOptions};

/// Radius of the small arc `|θ| < υ` on which the local bounds are checked.
pub const UPSILON: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ApproximantKind {
    /// `Mn^{−β} + Σ c_j (1 − z^j)`, approximating `(1−z)^β`.
    A,
    /// `1 + Σ d_j z^j`, approximating `(1−z)^{−β}`.
    B,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionalPowerTaylor {
    pub kind: ApproximantKind,
    pub beta: f64,
    pub degree: usize,
    /// Correction constant `M` (zero for `B`).
    pub correction_m: f64,
    /// `c_j` for `A` (with `c_0 = 0`), `d_j` for `B` (with `d_0 = 1`).
    pub coeffs: Vec<f64>,
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name: "beta",
            value: beta,
            range: "(0, 1)",
        })
    }
}

fn check_degree(n: usize) -> Result<()> {
    if n >= 1 {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name: "n",
            value: n as f64,
            range: "[1, inf)",
        })
    }
}

/// Taylor section of `(1−z)^{−β}`: `d_j = d_{j−1}(β + j − 1)/j`.
pub fn build_b(n: usize, beta: f64) -> Result<FractionalPowerTaylor> {
    check_beta(beta)?;
    check_degree(n)?;
    let mut d = vec![1.0; n + 1];
    for j in 1..=n {
        d[j] = d[j - 1] * (beta + j as f64 - 1.0) / j as f64;
    }
    Ok(FractionalPowerTaylor {
        kind: ApproximantKind::B,
        beta,
        degree: n,
        correction_m: 0.0,
        coeffs: d,
    })
}

/// `A_n = Mn^{−β} + Σ_{j=1}^n c_j (1 − z^j)` with `c_1 = β`,
/// `c_j = c_{j−1}(j − 1 − β)/j`.
pub fn build_a(n: usize, beta: f64, m: f64) -> Result<FractionalPowerTaylor> {
    check_beta(beta)?;
    check_degree(n)?;
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::ParameterOutOfRange {
            name: "M",
            value: m,
            range: "(0, inf)",
        });
    }
    let mut c = vec![0.0; n + 1];
    c[1] = beta;
    for j in 2..=n {
        c[j] = c[j - 1] * (j as f64 - 1.0 - beta) / j as f64;
    }
    Ok(FractionalPowerTaylor {
        kind: ApproximantKind::A,
        beta,
        degree: n,
        correction_m: m,
        coeffs: c,
    })
}

impl FractionalPowerTaylor {
    pub fn correction(&self) -> f64 {
        self.correction_m * (self.degree as f64).powf(-self.beta)
    }

    pub fn polynomial(&self) -> ComplexPolynomial {
        match self.kind {
            ApproximantKind::B => ComplexPolynomial::from_real(&self.coeffs),
            ApproximantKind::A => {
                let mut p: Vec<f64> = self.coeffs.iter().map(|c| -c).collect();
                p[0] = self.correction() + self.coeffs.iter().sum::<f64>();
                ComplexPolynomial::from_real(&p)
            }
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.polynomial().eval(z)
    }

    /// Value on the circle by direct trigonometric sums, accurate for tiny
    /// `|θ|` where `1 − cos jθ` would otherwise cancel.
    pub fn eval_at_angle(&self, theta: f64) -> Complex64 {
        let mut re = 0.0;
        let mut im = 0.0;
        match self.kind {
            ApproximantKind::B => {
                for (j, d) in self.coeffs.iter().enumerate() {
                    let x = j as f64 * theta;
                    re += d * x.cos();
                    im += d * x.sin();
                }
            }
            ApproximantKind::A => {
                re = self.correction();
                for (j, c) in self.coeffs.iter().enumerate().skip(1) {
                    let x = j as f64 * theta;
                    re += 2.0 * c * (0.5 * x).sin().powi(2);
                    im -= c * x.sin();
                }
            }
        }
        Complex64::new(re, im)
    }

    /// `k`-th derivative in `θ` of `θ ↦ P(e^{iθ})`.
    pub fn angular_derivative(&self, theta: f64, k: u32) -> Complex64 {
        let sign = match self.kind {
            ApproximantKind::A => -1.0,
            ApproximantKind::B => 1.0,
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, c) in self.coeffs.iter().enumerate().skip(1) {
            let ij = Complex64::new(0.0, j as f64);
            acc += sign * c * ij.powu(k) * Complex64::from_polar(1.0, j as f64 * theta);
        }
        acc
    }

    /// The function being approximated, `(1−z)^{β}` or `(1−z)^{−β}`, on the
    /// principal branch.
    pub fn target(&self, z: Complex64) -> Complex64 {
        let e = match self.kind {
            ApproximantKind::A => self.beta,
            ApproximantKind::B => -self.beta,
        };
        (Complex64::new(1.0, 0.0) - z).powf(e)
    }

    /// Max of `|P − target|` over the boundary of
    /// `{|z| ≤ 1} ∩ {|1 − z| ≥ 1 − υ}` (which bounds it on the whole region).
    pub fn uniform_deviation(&self, samples: usize) -> f64 {
        let r = 1.0 - UPSILON;
        // arc of the unit circle outside the disk around 1: |θ| ≥ θ0
        let theta0 = 2.0 * (r / 2.0).asin();
        // arc of |1 − z| = r inside the unit disk
        let psi0 = (r / 2.0).acos();
        let mut worst: f64 = 0.0;
        for k in 0..=samples {
            let s = k as f64 / samples as f64;
            let t = theta0 + s * (2.0 * PI - 2.0 * theta0);
            let z = Complex64::from_polar(1.0, t);
            worst = worst.max((self.eval(z) - self.target(z)).norm());
            let p = PI - psi0 + s * 2.0 * psi0;
            let z = Complex64::new(1.0, 0.0) + Complex64::from_polar(r, p);
            worst = worst.max((self.eval(z) - self.target(z)).norm());
        }
        worst
    }
}

/// `F_m(θ) = sin²(mθ/2) / (m sin²(θ/2))`, with `F_m(0) = m`.
pub fn fejer(m: usize, theta: f64) -> f64 {
    let m = m.max(1) as f64;
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    let s = (0.5 * t).sin();
    if s.abs() < 1e-8 {
        // series near the removable singularity
        return m * (1.0 - (m * m - 1.0) * t * t / 12.0);
    }
    (0.5 * m * t).sin().powi(2) / (m * s * s)
}

/// `G_m(θ) = F_m(θ) + ½F_m(θ − π/m) + ½F_m(θ + π/m)`.
pub fn shifted_fejer_g(m: usize, theta: f64) -> f64 {
    let h = PI / m.max(1) as f64;
    fejer(m, theta) + 0.5 * fejer(m, theta - h) + 0.5 * fejer(m, theta + h)
}

/// Fourier coefficients `ĝ_k`, `k = 0..m`, of `G_m` (even, real).
pub fn shifted_fejer_coeffs(m: usize) -> Vec<f64> {
    let mf = m.max(1) as f64;
    (0..=m)
        .map(|k| {
            let k = k as f64;
            (1.0 - k / mf).max(0.0) * (1.0 + (k * PI / mf).cos())
        })
        .collect()
}

/// One line of a bound report: extreme values of `quantity / bound` over the
/// test grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub lemma: String,
    pub n: usize,
    pub beta: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundReport {
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    pub fn row(&self, lemma: &str) -> Option<&BoundRow> {
        self.rows.iter().find(|r| r.lemma == lemma)
    }

    pub fn extend(&mut self, other: BoundReport) {
        self.rows.extend(other.rows);
    }

    /// CSV with header `lemma,n,beta,ratio_min,ratio_max`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["lemma", "n", "beta", "ratio_min", "ratio_max"])?;
        for r in &self.rows {
            wr.write_record([
                r.lemma.clone(),
                r.n.to_string(),
                format!("{}", r.beta),
                format!("{:.12e}", r.ratio_min),
                format!("{:.12e}", r.ratio_max),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Which family of bounds [`verify_appendix_a`] checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AppendixLemma {
    /// Positivity of `∫_0^a cos x / x^γ` (γ ∈ [1/2, 1)) and `∫_0^a sin x / x^γ`.
    Trifle,
    /// Size and sign of `Re B_n`, `Im B_n`; β ∈ (0, 1/2).
    Poly2,
    /// `|B_n'|`, `|B_n''|`; β ∈ (0, 1).
    Derider,
    /// Size and sign of `Re A_n`, `Im A_n`; β ∈ (0, 1).
    Poly1,
    /// `|A_n'|`; β ∈ (0, 1).
    DerDer,
}

impl AppendixLemma {
    pub const ALL: [AppendixLemma; 5] = [
        AppendixLemma::Trifle,
        AppendixLemma::Poly2,
        AppendixLemma::Derider,
        AppendixLemma::Poly1,
        AppendixLemma::DerDer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AppendixLemma::Trifle => "trifle",
            AppendixLemma::Poly2 => "poly2",
            AppendixLemma::Derider => "derider",
            AppendixLemma::Poly1 => "poly1",
            AppendixLemma::DerDer => "der-der",
        }
    }

    /// Whether `beta` lies in the range where the lemma is stated.
    pub fn admits(self, beta: f64) -> bool {
        match self {
            AppendixLemma::Poly2 => beta > 0.0 && beta < 0.5,
            _ => beta > 0.0 && beta < 1.0,
        }
    }
}

/// Log-spaced positive angles from `lo` to `hi`.
fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let points = points.max(2);
    let r = (hi / lo).ln();
    (0..points)
        .map(|k| lo * (r * k as f64 / (points - 1) as f64).exp())
        .collect()
}

#[derive(Debug, Clone, Copy)]
struct Extremes {
    min: f64,
    max: f64,
}

impl Extremes {
    fn new() -> Self {
        Self {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }
    fn add(&mut self, x: f64) {
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }
}

fn row(lemma: &str, n: usize, beta: f64, e: Extremes) -> BoundRow {
    BoundRow {
        lemma: lemma.to_string(),
        n,
        beta,
        ratio_min: e.min,
        ratio_max: e.max,
    }
}

/// `∫_0^a cos x / x^γ dx` (or `sin`), via `x = u^p`, `p = 1/(1−γ)`, which
/// removes the endpoint singularity: the integrand becomes `p·cos(u^p)`.
pub fn trifle_integral(a: f64, gamma: f64, use_sin: bool) -> f64 {
    let p = 1.0 / (1.0 - gamma);
    let top = a.powf(1.0 - gamma);
    let f = |u: f64| {
        let x = u.powf(p);
        p * if use_sin { x.sin() } else { x.cos() }
    };
    // one breakpoint per half-period of the oscillation
    let mut bps = vec![0.0];
    let mut k = 1.0;
    while k * PI / 2.0 < a {
        bps.push((k * PI / 2.0).powf(1.0 - gamma));
        k += 1.0;
    }
    bps.push(top);
    adaptive(
        f,
        &bps,
        AdaptiveOptions {
            rel_tol: 1e-13,
            abs_tol: 1e-15,
            ..AdaptiveOptions::default()
        },
    )
    .value
}

/// Evaluates the bounds of one appendix lemma for degree `n`, exponent `beta`,
/// on `grid` log-spaced angles in `(10^{−4}/n, υ)` (symmetry covers negative
/// angles: real parts are even, imaginary parts odd). For `Trifle`, `beta`
/// plays the role of the exponent `γ` and `grid` upper limits `a ∈ (0, 100]`
/// are tested; the rows then hold the extreme integral values.
pub fn verify_appendix_a(
    lemma: AppendixLemma,
    n: usize,
    beta: f64,
    grid: usize,
) -> Result<BoundReport> {
    if !lemma.admits(beta) {
        return Err(Error::ParameterOutOfRange {
            name: "beta",
            value: beta,
            range: if lemma == AppendixLemma::Poly2 {
                "(0, 1/2)"
            } else {
                "(0, 1)"
            },
        });
    }
    check_degree(n)?;
    let nf = n as f64;
    let mut report = BoundReport::default();
    let thetas = log_grid(1e-4 / nf, UPSILON, grid);
    let inner = 0.01 / nf;
    match lemma {
        AppendixLemma::Trifle => {
            let mut cos_e = Extremes::new();
            let mut sin_e = Extremes::new();
            let mut a_values = log_grid(1e-3, 100.0, grid);
            a_values.extend([0.1, PI, 10.0, 100.0]);
            for &a in &a_values {
                if beta >= 0.5 {
                    cos_e.add(trifle_integral(a, beta, false));
                }
                sin_e.add(trifle_integral(a, beta, true));
            }
            if beta >= 0.5 {
                report.rows.push(row("trifle_cos", n, beta, cos_e));
            }
            report.rows.push(row("trifle_sin", n, beta, sin_e));
        }
        AppendixLemma::Poly2 => {
            let b = build_b(n, beta)?;
            let (mut re, mut im_in, mut im_out) = (Extremes::new(), Extremes::new(), Extremes::new());
            for &t in &thetas {
                let v = b.eval_at_angle(t);
                re.add(v.re / (1.0 / nf + t).powf(-beta));
                if t < inner {
                    im_in.add(v.im / t / nf.powf(1.0 + beta));
                } else {
                    im_out.add(v.im / t.powf(-beta));
                }
            }
            report.rows.push(row("poly2_re", n, beta, re));
            report.rows.push(row("poly2_im_inner", n, beta, im_in));
            report.rows.push(row("poly2_im_outer", n, beta, im_out));
        }
        AppendixLemma::Derider => {
            let b = build_b(n, beta)?;
            let (mut d1, mut d2) = (Extremes::new(), Extremes::new());
            for &t in &thetas {
                let (b1, b2) = if t > 1.0 / nf {
                    (nf.powf(beta) / t, nf.powf(beta + 1.0) / t)
                } else {
                    (nf.powf(1.0 + beta), nf.powf(2.0 + beta))
                };
                d1.add(b.angular_derivative(t, 1).norm() / b1);
                d2.add(b.angular_derivative(t, 2).norm() / b2);
            }
            report.rows.push(row("derider_b1", n, beta, d1));
            report.rows.push(row("derider_b2", n, beta, d2));
        }
        AppendixLemma::Poly1 => {
            let a = build_a(n, beta, 1.0)?;
            let (mut re, mut im_in, mut im_out) = (Extremes::new(), Extremes::new(), Extremes::new());
            for &t in &thetas {
                let v = a.eval_at_angle(t);
                re.add(v.re / (1.0 / nf + t).powf(beta));
                if t < inner {
                    im_in.add(-v.im / (t * nf.powf(1.0 - beta)));
                } else {
                    im_out.add(-v.im / t.powf(beta));
                }
            }
            report.rows.push(row("poly1_re", n, beta, re));
            report.rows.push(row("poly1_im_inner", n, beta, im_in));
            report.rows.push(row("poly1_im_outer", n, beta, im_out));
        }
        AppendixLemma::DerDer => {
            let a = build_a(n, beta, 1.0)?;
            let mut d = Extremes::new();
            for &t in &thetas {
                let bound = if t > inner {
                    t.powf(beta - 1.0)
                } else {
                    nf.powf(1.0 - beta)
                };
                d.add(a.angular_derivative(t, 1).norm() / bound);
            }
            report.rows.push(row("der-der", n, beta, d));
        }
    }
    Ok(report)
}

/// Largest value of `Im A_n(e^{iθ})` over `grid` points of `(0, π)`; the
/// coefficients `j c_j` are nonincreasing, so this is negative.
pub fn max_imag_a_on_upper_arc(a: &FractionalPowerTaylor, grid: usize) -> f64 {
    (1..grid)
        .map(|k| a.eval_at_angle(PI * k as f64 / grid as f64).im)
        .fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn b_coefficients() {
        let b = build_b(10, 0.5).unwrap();
        assert_eq!(b.coeffs[0], 1.0);
        assert_relative_eq!(b.coeffs[1], 0.5);
        assert_relative_eq!(b.coeffs[2], 3.0 / 8.0);
        assert!(build_b(10, 1.0).is_err());
        assert!(build_b(10, 0.0).is_err());
    }

    #[test]
    fn a_coefficients_and_value_at_one() {
        let a = build_a(64, 0.25, 1.0).unwrap();
        assert_relative_eq!(a.coeffs[1], 0.25);
        let one = Complex64::new(1.0, 0.0);
        assert_relative_eq!(a.eval(one).re, 64f64.powf(-0.25), epsilon = 1e-14);
        assert!(a.eval(one).im.abs() < 1e-15);
        assert!(build_a(10, 0.3, 0.0).is_err());
    }

    #[test]
    fn trig_and_horner_evaluations_agree() {
        for kind in [ApproximantKind::A, ApproximantKind::B] {
            let p = match kind {
                ApproximantKind::A => build_a(40, 0.3, 1.0).unwrap(),
                ApproximantKind::B => build_b(40, 0.3).unwrap(),
            };
            for t in [0.001, 0.3, 2.0] {
                let z = Complex64::from_polar(1.0, t);
                assert!((p.eval(z) - p.eval_at_angle(t)).norm() < 1e-12);
            }
            // derivative by central difference
            let h = 1e-5;
            let fd = (p.eval_at_angle(0.4 + h) - p.eval_at_angle(0.4 - h)) / (2.0 * h);
            assert!((fd - p.angular_derivative(0.4, 1)).norm() < 1e-6);
        }
    }

    #[test]
    fn fejer_values() {
        assert_eq!(fejer(7, 0.0), 7.0);
        assert!(fejer(7, 2.0 * PI / 7.0).abs() < 1e-14);
        assert_eq!(fejer(7, 2.0 * PI), 7.0);
        let m = 9;
        assert_relative_eq!(
            shifted_fejer_g(m, 0.0),
            m as f64 + fejer(m, PI / m as f64),
            epsilon = 1e-12
        );
    }

    #[test]
    fn fejer_means() {
        let n = 512;
        let h = 2.0 * PI / n as f64;
        let mean_f: f64 = (0..n).map(|j| fejer(12, j as f64 * h)).sum::<f64>() / n as f64;
        let mean_g: f64 = (0..n).map(|j| shifted_fejer_g(12, j as f64 * h)).sum::<f64>() / n as f64;
        assert_relative_eq!(mean_f, 1.0, epsilon = 1e-12);
        assert_relative_eq!(mean_g, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn shifted_fejer_coefficients_reproduce_values() {
        let m = 11;
        let g = shifted_fejer_coeffs(m);
        for t in [0.0, 0.2, 1.3, 3.0] {
            let v: f64 = g[0] + 2.0 * (1..=m).map(|k| g[k] * (k as f64 * t).cos()).sum::<f64>();
            assert_relative_eq!(v, shifted_fejer_g(m, t), epsilon = 1e-12);
        }
    }

    #[test]
    fn trifle_closed_form_limits() {
        // ∫_0^∞ sin x / √x = √(π/2); ∫_0^{small} cos x / √x ≈ 2√a
        assert_relative_eq!(trifle_integral(1e-6, 0.5, false), 2e-3, max_relative = 1e-6);
        // at a = (k + 1/2)π the tail is O(a^{-3/2})
        let tail = trifle_integral(400.5 * PI, 0.5, true);
        assert!((tail - (PI / 2.0).sqrt()).abs() < 1e-4, "{tail}");
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(verify_appendix_a(AppendixLemma::Poly2, 64, 0.75, 100).is_err());
        assert!(verify_appendix_a(AppendixLemma::Poly1, 64, 0.75, 100).is_ok());
    }

    #[test]
    fn csv_layout() {
        let r = verify_appendix_a(AppendixLemma::DerDer, 64, 0.3, 50).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("lemma,n,beta,ratio_min,ratio_max\nder-der,64,0.3,"));
    }
}
