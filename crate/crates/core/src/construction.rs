//! Explicit polynomial `φ_n*` with `|φ_n*(1)| ∼ √n` whose orthogonality
//! measure lies in the Steklov class.
//!
//! The ingredients are an outer factor `Q_m` of `G_m + |B_m|²`, the polynomial
//! `P_m = Q_m (1 − z)(1 − 0.1 A_m)`, `f_n = P_m + Q_m + Q_m*` (reciprocal at
//! order `n`), `φ_n* = C_n f_n`, and the Carathéodory function
//! `F̃(z) = C̃(ρ(1+ε−z)^{−1} + (1+ε−z)^{−α})` with `ε = 1/n`. The measure `σ` is
//! recovered from
//! `σ' = 2 Re F̃ / (π |φ_n + φ_n* + F̃(φ_n* − φ_n)|²)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::approximants::{build_a, build_b, shifted_fejer_coeffs, UPSILON};
use crate::error::{Error, Result};
use crate::fft;
use crate::measures::{CircleMeasure, Discretization};
use crate::opuc::{
    szego_top, verblunsky_from_moments, verblunsky_from_polynomial, VerblunskySequence,
};
use crate::poly::ComplexPolynomial;
use crate::quadrature::{golden_min, AdaptiveOptions};
use crate::spectral::{arg_increment, fejer_riesz, Phase, TrigPolynomial};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConstructionParams {
    pub n: usize,
    pub alpha: f64,
    pub rho: f64,
    pub delta1: f64,
    /// Correction constant of `A_m`.
    pub m_correction: f64,
    /// Target Steklov constant; `None` means "certify whatever condition 4 gives".
    pub delta: Option<f64>,
    /// Boundary grid size; `None` selects `max(8192, 64n)`.
    pub grid: Option<usize>,
}

impl Default for ConstructionParams {
    fn default() -> Self {
        Self {
            n: 128,
            alpha: 0.75,
            rho: 0.01,
            delta1: 1.0 / 64.0,
            m_correction: 1.0,
            delta: None,
            grid: None,
        }
    }
}

impl ConstructionParams {
    pub fn with_n(n: usize) -> Self {
        Self {
            n,
            ..Self::default()
        }
    }

    pub fn m(&self) -> usize {
        (self.delta1 * self.n as f64).floor() as usize
    }

    pub fn epsilon(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn grid_size(&self) -> usize {
        self.grid.unwrap_or_else(|| (64 * self.n).max(8192))
    }

    pub fn validate(&self) -> Result<()> {
        let range = |name, value: f64, ok: bool, range| {
            if ok {
                Ok(())
            } else {
                Err(Error::ParameterOutOfRange { name, value, range })
            }
        };
        range("alpha", self.alpha, self.alpha > 0.5 && self.alpha < 1.0, "(1/2, 1)")?;
        range("rho", self.rho, self.rho > 0.0 && self.rho < 1.0, "(0, 1)")?;
        range("delta1", self.delta1, self.delta1 > 0.0 && self.delta1 < 1.0, "(0, 1)")?;
        range("M", self.m_correction, self.m_correction > 0.0 && self.m_correction.is_finite(), "(0, inf)")?;
        if let Some(d) = self.delta {
            range("delta", d, d > 0.0 && d < 1.0, "(0, 1)")?;
        }
        let m = self.m();
        if m < 1 || 2 * m + 1 >= self.n {
            return Err(Error::ParameterOutOfRange {
                name: "m = floor(delta1 n)",
                value: m as f64,
                range: "[1, (n - 1)/2)",
            });
        }
        let grid = self.grid_size();
        if grid < 4 * self.n {
            return Err(Error::ParameterOutOfRange {
                name: "grid",
                value: grid as f64,
                range: "[4n, inf)",
            });
        }
        Ok(())
    }
}

/// `F̃` together with its normalization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HerglotzField {
    pub alpha: f64,
    pub rho: f64,
    pub epsilon: f64,
    /// `C̃` from the grid mean of `Re F̃`.
    pub c_tilde: f64,
    /// `(ρ/(1+ε) + (1+ε)^{−α})^{−1}`, the mean-value-property value.
    pub c_tilde_closed: f64,
    pub grid: usize,
}

impl HerglotzField {
    fn unnormalized(&self, z: Complex64) -> Complex64 {
        let w = Complex64::new(1.0 + self.epsilon, 0.0) - z;
        self.rho / w + w.powf(-self.alpha)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.c_tilde * self.unnormalized(z)
    }

    pub fn eval_at_angle(&self, theta: f64) -> Complex64 {
        self.eval(Complex64::from_polar(1.0, theta))
    }

    /// Values on the grid `2πj/N`.
    pub fn samples(&self, n: usize) -> Vec<Complex64> {
        fft::grid_angles(n).into_iter().map(|t| self.eval_at_angle(t)).collect()
    }

    /// Mean of `Re F̃` on a grid of `n` points (1 by construction).
    pub fn mean_real_part(&self, n: usize) -> f64 {
        self.samples(n).iter().map(|v| v.re).sum::<f64>() / n as f64
    }
}

pub fn build_f_tilde(p: &ConstructionParams) -> Result<HerglotzField> {
    p.validate()?;
    let grid = p.grid_size();
    let mut field = HerglotzField {
        alpha: p.alpha,
        rho: p.rho,
        epsilon: p.epsilon(),
        c_tilde: 1.0,
        c_tilde_closed: 1.0 / (p.rho / (1.0 + p.epsilon()) + (1.0 + p.epsilon()).powf(-p.alpha)),
        grid,
    };
    let mean = field.mean_real_part(grid);
    let min_re = field.samples(grid).iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
    if !(min_re > 0.0) {
        return Err(Error::Construction(format!("Re F̃ not positive on the grid (min {min_re:e})")));
    }
    field.c_tilde = 1.0 / mean;
    Ok(field)
}

/// Outer factor of `G_m + |B_{m,α/2}|²`.
pub fn build_q(m: usize, alpha: f64) -> Result<ComplexPolynomial> {
    let g = TrigPolynomial::from_even(&shifted_fejer_coeffs(m));
    let b = build_b(m, alpha / 2.0)?.polynomial();
    fejer_riesz(&(&g + &TrigPolynomial::abs_sq(&b)))
}

#[derive(Debug, Clone)]
pub struct ConstructionOutput {
    /// Parameters actually used (δ₁ may have been halved).
    pub params: ConstructionParams,
    pub m: usize,
    pub q: ComplexPolynomial,
    pub p: ComplexPolynomial,
    pub f: ComplexPolynomial,
    pub c_n: f64,
    pub phi_star: ComplexPolynomial,
    pub herglotz: HerglotzField,
    /// Spike-resolved discretization of `|f_n|^{−2} dθ` on the circle.
    inverse_weight: Discretization,
}

impl ConstructionOutput {
    pub fn n(&self) -> usize {
        self.params.n
    }

    /// `f_n(e^{iθ})` in O(m) using `Q_m*(e^{iθ}) = e^{inθ} conj(Q_m(e^{iθ}))`.
    pub fn f_at(&self, theta: f64) -> Complex64 {
        let z = Complex64::from_polar(1.0, theta);
        let q = self.q.eval(z);
        self.p.eval(z) + q + Complex64::from_polar(1.0, self.n() as f64 * theta) * q.conj()
    }

    pub fn phi_star_at(&self, theta: f64) -> Complex64 {
        self.c_n * self.f_at(theta)
    }

    /// `φ_n = z^n conj(φ_n*)` on the circle.
    pub fn phi_at(&self, theta: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.n() as f64 * theta) * self.phi_star_at(theta).conj()
    }

    /// `φ_n(z)` as a polynomial.
    pub fn phi(&self) -> ComplexPolynomial {
        self.phi_star.star(self.n()).expect("degree n by construction")
    }

    /// `φ_n + φ_n* + F̃(φ_n* − φ_n)`.
    pub fn d_at(&self, theta: f64) -> Complex64 {
        let ps = self.phi_star_at(theta);
        let p = Complex64::from_polar(1.0, self.n() as f64 * theta) * ps.conj();
        let f = self.herglotz.eval_at_angle(theta);
        p + ps + f * (ps - p)
    }

    /// `σ'(θ)`.
    pub fn sigma_density_at(&self, theta: f64) -> f64 {
        2.0 * self.herglotz.eval_at_angle(theta).re / (PI * self.d_at(theta).norm_sqr())
    }

    /// `(|φ_n*| + |F̃(φ_n − φ_n*)|) / √Re F̃`.
    pub fn condition4_ratio_at(&self, theta: f64) -> f64 {
        let ps = self.phi_star_at(theta);
        let p = Complex64::from_polar(1.0, self.n() as f64 * theta) * ps.conj();
        let f = self.herglotz.eval_at_angle(theta);
        (ps.norm() + (f * (p - ps)).norm()) / f.re.sqrt()
    }

    /// `Q_m*(z) / Q_m(z) · z^{−n}` on the circle, which should equal
    /// `e^{−2iφ(θ)}`.
    pub fn reflection_ratio_at(&self, theta: f64) -> Complex64 {
        let q = self.q.eval_at_angle(theta);
        q.conj() / q
    }

    /// `(1/2π)∫|φ_n*|^{−2} dθ` from the stored rule.
    pub fn normalization(&self) -> f64 {
        self.inverse_weight.total_mass() / (2.0 * PI * self.c_n * self.c_n)
    }
}

fn quad_options() -> AdaptiveOptions {
    AdaptiveOptions {
        rel_tol: 1e-11,
        ..AdaptiveOptions::default()
    }
}

/// Spike-resolved rule for an even density on the circle, tuned to the
/// oscillation scale `1/n`.
fn even_spike_rule<F: Fn(f64) -> f64>(g: F, n: usize, scan_factor: usize) -> Discretization {
    Discretization::spike_resolved(g, true, scan_factor * n, 8 * n, quad_options())
}

/// Checks `n/2 < (nθ − 2φ(θ))' < 2n` on the circle, i.e. `−n/2 < φ' < n/4`.
fn phase_monotone(q: &ComplexPolynomial, n: usize) -> Result<bool> {
    let ph = Phase::new(q)?;
    let nf = n as f64;
    let grid = (64 * (q.degree() + 1)).max(1024);
    Ok((0..grid).all(|j| {
        let d = ph.derivative(2.0 * PI * j as f64 / grid as f64);
        d > -0.5 * nf && d < 0.25 * nf
    }))
}

/// Largest `|A_m|` on the circle, which bounds it on the disk.
fn max_abs_a(a: &ComplexPolynomial, grid: usize) -> f64 {
    a.eval_on_grid(grid).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn build_construction(params: &ConstructionParams) -> Result<ConstructionOutput> {
    params.validate()?;
    let mut p = *params;
    let herglotz = build_f_tilde(&p)?;
    let q = loop {
        let m = p.m();
        let q = build_q(m, p.alpha)?;
        if phase_monotone(&q, p.n)? {
            break q;
        }
        log::warn!("phase monotonicity fails at delta1 = {}; halving", p.delta1);
        p.delta1 /= 2.0;
        if p.m() < 1 {
            return Err(Error::Construction(
                "phase monotonicity fails for every m >= 1".into(),
            ));
        }
    };
    let m = p.m();
    let n = p.n;

    let a = build_a(m, 1.0 - p.alpha, p.m_correction)?.polynomial();
    let amax = max_abs_a(&a, (64 * m).max(1024));
    if !(amax < 3.0) {
        return Err(Error::Construction(format!(
            "|A_m| reaches {amax} >= 3 on the circle; decrease M"
        )));
    }
    let one_minus_z = ComplexPolynomial::from_real(&[1.0, -1.0]);
    let factor = &ComplexPolynomial::one() - &a.scale_real(0.1);
    let pm = &(&q * &one_minus_z) * &factor;
    let f = &(&pm + &q) + &q.star(n)?;

    let mut out = ConstructionOutput {
        params: p,
        m,
        q,
        p: pm,
        f,
        c_n: 1.0,
        phi_star: ComplexPolynomial::zero(),
        herglotz,
        inverse_weight: Discretization::default(),
    };
    let weight = even_spike_rule(|t| 1.0 / out.f_at(t).norm_sqr(), n, 16);
    let integral = weight.total_mass();
    if !(integral.is_finite() && integral > 0.0) {
        return Err(Error::Construction(format!("∫|f_n|^-2 = {integral}")));
    }
    out.c_n = (integral / (2.0 * PI)).sqrt();
    out.phi_star = out.f.scale_real(out.c_n);
    out.inverse_weight = weight;
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Condition1 {
    /// `min Re[(1−z)(1−0.1A) + 1 + z^n e^{−2iφ}]` over the grid.
    pub min_real_bracket: f64,
    /// `min −0.1 Y sin θ` with `Y = Im A`.
    pub min_key_term: f64,
    /// `max |X|`, `X = Re A`.
    pub max_abs_x: f64,
    /// Minimum of `|φ_n*|` on the circle after refining grid minima.
    pub min_abs_phi_star: f64,
    pub winding_number: i64,
    /// Largest Schur–Cohn coefficient of `φ_n`; below 1 certifies that `φ_n*`
    /// has no zeros in the closed disk.
    pub max_gamma: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Condition2 {
    /// `|(1/2π)∫|φ_n*|^{−2} − 1|` from an independently refined rule.
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Condition3 {
    pub phi_star_at_one: f64,
    /// `|φ_n*(1)| / √n`.
    pub ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Condition4 {
    /// `C₁ = max (|φ_n*| + |F̃(φ_n − φ_n*)|)/√Re F̃`.
    pub c1: f64,
    pub argmax_theta: f64,
    /// `C₁^{−2}`.
    pub certified_delta: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition1: Condition1,
    pub condition2: Condition2,
    pub condition3: Condition3,
    pub condition4: Condition4,
}

impl ConditionReport {
    pub fn all_pass(&self) -> bool {
        self.condition1.pass && self.condition2.pass && self.condition3.pass && self.condition4.pass
    }
}

/// Tolerance on the normalization residual.
pub const NORMALIZATION_TOL: f64 = 1e-8;

/// Refines the local extrema of `h` found on a uniform grid over `[0, π]`
/// (golden-section, minimizing `h`) and returns the best value and location.
fn refined_min<F: Fn(f64) -> f64>(h: F, grid: usize, keep: usize) -> (f64, f64) {
    let step = PI / grid as f64;
    let vals: Vec<f64> = (0..=grid).map(|j| h(j as f64 * step)).collect();
    let mut cands: Vec<(f64, usize)> = (0..=grid)
        .filter(|&j| {
            (j == 0 || vals[j] <= vals[j - 1]) && (j == grid || vals[j] <= vals[j + 1])
        })
        .map(|j| (vals[j], j))
        .collect();
    cands.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = (f64::INFINITY, 0.0);
    for &(v, j) in cands.iter().take(keep) {
        let lo = (j as f64 - 1.0).max(0.0) * step;
        let hi = (j as f64 + 1.0).min(grid as f64) * step;
        let t = golden_min(&h, lo, hi, 200);
        let ht = h(t);
        let (v, t) = if ht < v { (ht, t) } else { (v, j as f64 * step) };
        if v < best.0 {
            best = (v, t);
        }
    }
    best
}

pub fn verify_lemma_conditions(out: &ConstructionOutput, delta: Option<f64>) -> Result<ConditionReport> {
    let n = out.n();
    let grid = out.params.grid_size();
    let half = grid / 2;
    let a = build_a(out.m, 1.0 - out.params.alpha, out.params.m_correction)?;

    // Condition 1: f/Q is Carathéodory and φ* has no zeros in the closed disk.
    let mut min_bracket = f64::INFINITY;
    let mut min_key = f64::INFINITY;
    let mut max_x: f64 = 0.0;
    for j in 0..=half {
        let t = 2.0 * PI * j as f64 / grid as f64;
        let z = Complex64::from_polar(1.0, t);
        let av = a.eval_at_angle(t);
        let bracket = (ONE - z) * (ONE - 0.1 * av)
            + ONE
            + Complex64::from_polar(1.0, n as f64 * t) * out.reflection_ratio_at(t);
        min_bracket = min_bracket.min(bracket.re);
        min_key = min_key.min(-0.1 * av.im * t.sin());
        max_x = max_x.max(av.re.abs());
    }
    let (min_abs_sq, _) = refined_min(|t| out.f_at(t).norm_sqr(), 16 * n, 64);
    let min_abs_phi_star = out.c_n * min_abs_sq.sqrt();
    let winding = {
        let f = |t: f64| out.f_at(t);
        let total = arg_increment(&f, -PI, PI, 16 * n)?;
        (total / (2.0 * PI)).round() as i64
    };
    let max_gamma = match verblunsky_from_polynomial(&out.phi()) {
        Ok(g) => g.gammas().iter().map(|x| x.norm()).fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    };
    let scale = 1e-12 * out.q.eval(ONE).norm();
    let condition1 = Condition1 {
        min_real_bracket: min_bracket,
        min_key_term: min_key,
        max_abs_x: max_x,
        min_abs_phi_star,
        winding_number: winding,
        max_gamma,
        pass: min_bracket >= -scale
            && min_key >= -1e-14
            && min_abs_phi_star > 0.0
            && winding == 0
            && max_gamma < 1.0,
    };

    // Condition 2: an independent refinement of ∫|φ*|^{-2}.
    let check = even_spike_rule(|t| 1.0 / out.phi_star_at(t).norm_sqr(), n, 24);
    let residual = (check.total_mass() / (2.0 * PI) - 1.0).abs();
    let condition2 = Condition2 {
        residual,
        pass: residual < NORMALIZATION_TOL,
    };

    // Condition 3.
    let at_one = out.phi_star_at(0.0).norm();
    let ratio = at_one / (n as f64).sqrt();
    let condition3 = Condition3 {
        phi_star_at_one: at_one,
        ratio,
        pass: ratio.is_finite() && ratio > 0.0,
    };

    // Condition 4.
    let (neg_c1, argmax) = refined_min(|t| -out.condition4_ratio_at(t), half, 16);
    let c1 = -neg_c1;
    let certified = c1.powi(-2);
    let condition4 = Condition4 {
        c1,
        argmax_theta: argmax,
        certified_delta: certified,
        pass: c1.is_finite() && delta.is_none_or(|d| d <= certified),
    };

    Ok(ConditionReport {
        condition1,
        condition2,
        condition3,
        condition4,
    })
}

/// The orthogonality measure `σ` of `φ_n*`, reconstructed from `F̃`.
#[derive(Debug, Clone)]
pub struct SigmaReconstruction {
    /// `σ'` sampled on the construction grid.
    pub measure: CircleMeasure,
    /// Spike-resolved discretization of `σ`.
    pub nodes: Discretization,
    pub total_mass: f64,
    /// `min 2πσ'` (grid minimum, refined).
    pub min_scaled_density: f64,
    pub worst_theta: f64,
    pub median_density: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SigmaSummary {
    pub total_mass: f64,
    pub min_scaled_density: f64,
    pub worst_theta: f64,
    pub median_density: f64,
}

impl SigmaReconstruction {
    pub fn summary(&self) -> SigmaSummary {
        SigmaSummary {
            total_mass: self.total_mass,
            min_scaled_density: self.min_scaled_density,
            worst_theta: self.worst_theta,
            median_density: self.median_density,
        }
    }
}

/// Reconstructs `σ` and, if `delta` is given, checks `2πσ' ≥ δ(1 − 10^{−6})`.
pub fn reconstruct_sigma(out: &ConstructionOutput, delta: Option<f64>) -> Result<SigmaReconstruction> {
    let n = out.n();
    let grid = out.params.grid_size();
    let density: Vec<f64> = fft::grid_angles(grid)
        .into_iter()
        .map(|t| out.sigma_density_at(t))
        .collect();
    let (min_sigma, worst) = refined_min(|t| out.sigma_density_at(t), grid / 2, 16);
    let grid_min = density.iter().copied().fold(f64::INFINITY, f64::min);
    let min_scaled = 2.0 * PI * min_sigma.min(grid_min);
    let mut sorted = density.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let median = sorted[sorted.len() / 2];
    let nodes = even_spike_rule(|t| out.sigma_density_at(t), n, 16);
    let total_mass = nodes.total_mass();
    if let Some(d) = delta {
        if min_scaled < d * (1.0 - 1e-6) {
            return Err(Error::SteklovViolation {
                theta: worst,
                value: min_scaled,
                delta: d,
            });
        }
    }
    Ok(SigmaReconstruction {
        measure: CircleMeasure::new(density, vec![])?,
        nodes,
        total_mass,
        min_scaled_density: min_scaled,
        worst_theta: worst,
        median_density: median,
    })
}

/// Verblunsky coefficients of `φ_n*`, extracted from the moments of its
/// Bernstein–Szegő measure.
pub fn verblunsky_of_construction(out: &ConstructionOutput) -> Result<VerblunskySequence> {
    let mu = even_spike_rule(|t| 1.0 / (2.0 * PI * out.phi_star_at(t).norm_sqr()), out.n(), 16);
    verblunsky_from_moments(&mu.moments(out.n()))
}

/// Verblunsky coefficients `γ̃_0..γ̃_{k−1}` of `Re F̃ dθ/2π`.
pub fn verblunsky_of_herglotz(out: &ConstructionOutput, k: usize) -> Result<VerblunskySequence> {
    let grid = out.params.grid_size();
    let re: Vec<f64> = out.herglotz.samples(grid).iter().map(|v| v.re).collect();
    let coef = fft::analyze_real(&re);
    let s: Vec<Complex64> = (0..=k).map(|j| coef[(grid - j) % grid]).collect();
    verblunsky_from_moments(&s)
}

/// Concatenates the coefficients of `φ_n*` with `tail_len` coefficients of
/// `Re F̃ dθ/2π`, and returns the largest relative deviation between the
/// resulting Bernstein–Szegő density and `σ'` on the construction grid.
pub fn concatenated_measure_check(out: &ConstructionOutput, tail_len: usize) -> Result<f64> {
    let head = verblunsky_of_construction(out).map_err(|e| match e {
        Error::NotPositiveDefinite { index } => Error::Extraction {
            index,
            source: Box::new(e),
        },
        other => other,
    })?;
    let tail = verblunsky_of_herglotz(out, tail_len).map_err(|e| match e {
        Error::NotPositiveDefinite { index } => Error::Extraction {
            index: out.n() + index,
            source: Box::new(e),
        },
        other => other,
    })?;
    let (top, _) = szego_top(&head.concat(&tail));
    let grid = out.params.grid_size();
    let vals = top.eval_on_grid(grid);
    let worst = fft::grid_angles(grid)
        .into_iter()
        .zip(vals)
        .map(|(t, v)| {
            let bs = 1.0 / (2.0 * PI * v.norm_sqr());
            let s = out.sigma_density_at(t);
            (bs - s).abs() / s
        })
        .fold(0.0, f64::max);
    Ok(worst)
}

/// A measure in `S_δ` together with `|φ_n(1, σ)|`.
#[derive(Debug, Clone)]
pub struct Witness {
    pub output: ConstructionOutput,
    pub report: ConditionReport,
    pub sigma: SigmaReconstruction,
    pub value: f64,
    pub delta: f64,
}

/// Builds the construction, verifies it, and returns `σ` with
/// `|φ_n(1, σ)| = |φ_n*(1)|`. The certified `δ = C₁^{−2}` is used when
/// `delta` is `None`.
pub fn lower_bound_witness(params: &ConstructionParams, delta: Option<f64>) -> Result<Witness> {
    let output = build_construction(params)?;
    let report = verify_lemma_conditions(&output, delta.or(params.delta))?;
    if !report.all_pass() {
        return Err(Error::Construction(format!(
            "lemma conditions fail: {}",
            serde_json::to_string(&report)?
        )));
    }
    let delta = delta.or(params.delta).unwrap_or(report.condition4.certified_delta);
    let sigma = reconstruct_sigma(&output, Some(delta))?;
    let value = output.phi_at(0.0).norm();
    Ok(Witness {
        output,
        report,
        sigma,
        value,
        delta,
    })
}

/// Machine-readable summary of a construction run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstructionSummary {
    pub params: ConstructionParams,
    pub m: usize,
    pub grid: usize,
    pub c_n: f64,
    pub c_tilde: f64,
    pub c_tilde_closed: f64,
    pub phi_star_at_one: f64,
    pub conditions: ConditionReport,
    pub sigma: SigmaSummary,
    pub delta: f64,
    pub upsilon: f64,
}

impl Witness {
    pub fn summary(&self) -> ConstructionSummary {
        ConstructionSummary {
            params: self.output.params,
            m: self.output.m,
            grid: self.output.params.grid_size(),
            c_n: self.output.c_n,
            c_tilde: self.output.herglotz.c_tilde,
            c_tilde_closed: self.output.herglotz.c_tilde_closed,
            phi_star_at_one: self.report.condition3.phi_star_at_one,
            conditions: self.report.clone(),
            sigma: self.sigma.summary(),
            delta: self.delta,
            upsilon: UPSILON,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn params_validation() {
        assert!(ConstructionParams::default().validate().is_ok());
        let bad = ConstructionParams {
            alpha: 0.4,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        // m = 0
        assert!(ConstructionParams::with_n(32).validate().is_err());
        assert_eq!(ConstructionParams::with_n(2048).grid_size(), 131072);
    }

    #[test]
    fn herglotz_normalization() {
        let p = ConstructionParams::default();
        let f = build_f_tilde(&p).unwrap();
        assert_relative_eq!(f.mean_real_part(p.grid_size()), 1.0, epsilon = 1e-13);
        assert_relative_eq!(f.c_tilde, f.c_tilde_closed, max_relative = 1e-12);
        // principal branch: positive at real points left of 1 + ε
        let v = f.eval(Complex64::new(0.5, 0.0));
        assert!(v.re > 0.0 && v.im.abs() < 1e-15);
    }

    #[test]
    fn small_construction_identities() {
        let out = build_construction(&ConstructionParams::default()).unwrap();
        assert_eq!(out.m, 2);
        assert_eq!(out.phi_star.degree(), 128);
        // f_n(1) = 2 Q_m(1)
        assert_relative_eq!(out.f_at(0.0).re, 2.0 * out.q.eval(ONE).re, max_relative = 1e-14);
        // structured and dense evaluations agree
        for t in [0.01, 0.5, 2.0] {
            assert!((out.f_at(t) - out.f.eval_at_angle(t)).norm() < 1e-11);
        }
        // Q*/Q = z^n e^{-2iφ}
        let ph = Phase::new(&out.q).unwrap();
        for t in [0.1, 0.7, -1.3] {
            let z = Complex64::from_polar(1.0, t);
            let lhs = out.q.star(128).unwrap().eval(z) / out.q.eval(z);
            let rhs = Complex64::from_polar(1.0, 128.0 * t - 2.0 * ph.at(t).unwrap());
            assert!((lhs - rhs).norm() < 1e-12);
        }
        assert_relative_eq!(out.normalization(), 1.0, epsilon = 1e-12);
    }
}
