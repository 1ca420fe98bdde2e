//! Polynomial entropy `Ω = ∫|φ_n|² log⁺|φ_n| dσ` and its growth along the
//! explicit construction.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::{build_construction, reconstruct_sigma, verify_lemma_conditions, ConstructionParams};
use crate::error::{Error, Result};
use crate::measures::{CircleIntegral, Discretization};
use crate::extremal::small_delta_measure;
use crate::poly::ComplexPolynomial;
use crate::quadrature::{adaptive_rule, AdaptiveOptions};

/// Allowed deviation of `‖φ_n‖²_{2,μ}` from 1.
pub const NORMALIZATION_TOL: f64 = 1e-6;

/// `x² log⁺ x`, continuous at 0.
fn weight(x: f64) -> f64 {
    if x > 1.0 {
        x * x * x.ln()
    } else {
        0.0
    }
}

/// Entropy with `|φ_n(e^{iθ})|` supplied directly (useful when `φ_n` has a
/// cheaper structured evaluator than Horner's rule).
pub fn entropy_with<F: Fn(f64) -> f64>(abs_phi: F, mu: &Discretization) -> Result<f64> {
    let (norm_sq, value) = mu
        .theta
        .iter()
        .zip(&mu.weight)
        .fold((0.0, 0.0), |(n, v), (&t, &w)| {
            let a = abs_phi(t);
            (n + w * a * a, v + w * weight(a))
        });
    if !((norm_sq - 1.0).abs() <= NORMALIZATION_TOL) {
        return Err(Error::NotNormalized { norm_sq });
    }
    Ok(value)
}

pub fn polynomial_entropy<M: CircleIntegral>(phi: &ComplexPolynomial, mu: &M) -> Result<f64> {
    entropy_with(|t| phi.eval_at_angle(t).norm(), &mu.discretize())
}

/// Class parameter used when none is given. Small enough that the
/// equidistant witness is in its growing regime `δn ≪ 1` for `n ≤ 2048`.
pub const DEFAULT_ENTROPY_DELTA: f64 = 1e-6;

/// Entropy and `log ‖φ_n‖_∞` of one measure.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WitnessEntropy {
    pub entropy: f64,
    pub envelope: f64,
}

/// One row of the scaling report. `entropy` is the lower estimate of
/// `Ω_n(S_δ)`: the larger of the two witnesses, both of which lie in `S_δ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntropyRow {
    pub n: usize,
    pub entropy: f64,
    pub log_n: f64,
    /// `log ‖φ_n‖_∞` of the maximizing witness.
    pub envelope: f64,
    pub construction_entropy: f64,
    pub construction_envelope: f64,
    pub equidistant_entropy: f64,
    pub equidistant_envelope: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

/// Least-squares line through `(x_i, y_i)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> LineFit {
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let residual = (x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    LineFit {
        slope,
        intercept,
        residual,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntropyReport {
    pub delta: f64,
    pub rows: Vec<EntropyRow>,
    /// Entropy against `log n`.
    pub fit: LineFit,
    /// `log ‖φ_n‖_∞` against `log n`.
    pub envelope_fit: LineFit,
    /// The constructed measure alone, against `log n`.
    pub construction_fit: LineFit,
}

impl EntropyReport {
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for r in &self.rows {
            wr.serialize(r)?;
        }
        wr.flush()?;
        Ok(())
    }
}

fn sup_on_circle<F: Fn(f64) -> f64>(f: F, grid: usize) -> f64 {
    (0..=grid)
        .map(|j| f(PI * j as f64 / grid as f64))
        .fold(0.0, f64::max)
}

/// Entropy of `φ_n` for the constructed measure `σ`, which lies in `S_δ` for
/// every `δ` up to its certified value.
pub fn construction_entropy(params: &ConstructionParams, delta: Option<f64>) -> Result<WitnessEntropy> {
    let out = build_construction(params)?;
    let report = verify_lemma_conditions(&out, delta)?;
    let delta = delta.unwrap_or(report.condition4.certified_delta);
    let sigma = reconstruct_sigma(&out, Some(delta))?;
    let entropy = entropy_with(|t| out.phi_star_at(t).norm(), &sigma.nodes)?;
    let sup = sup_on_circle(|t| out.phi_star_at(t).norm(), 16 * out.n());
    Ok(WitnessEntropy {
        entropy,
        envelope: sup.ln(),
    })
}

/// Entropy of `φ_n` for the probability measure
/// `δ/2π dθ + Σ_{k=1}^n ((1−δ)/n) δ_{2πk/(n+1)}` in `S_δ`, whose orthonormal
/// polynomial is explicit. The floor carries a fraction `≈ 1/(1 + δn)` of
/// `‖φ_n‖²`, where `|φ_n|² ≈ F_n/(δ(1 + δn))` with `F_n` the Fejér kernel, so
/// the entropy grows like `½ log(n/δ)` while `δn ≪ 1` and decays once `δn ≫ 1`.
pub fn equidistant_entropy(n: usize, delta: f64) -> Result<WitnessEntropy> {
    if n == 0 {
        return Ok(WitnessEntropy {
            entropy: 0.0,
            envelope: 0.0,
        });
    }
    let w = small_delta_measure(n, delta, (1.0 - delta) / n as f64)?;
    let scale = 1.0 / w.norm_sq.sqrt();
    let abs_phi = |t: f64| scale * w.monic.eval_at_angle(t).norm();
    let floor = delta / (2.0 * PI);
    // refine on the integrand of both the norm and the entropy
    let h = |t: f64| {
        let a = abs_phi(t);
        a * a + weight(a)
    };
    let bps: Vec<f64> = (0..=n + 1).map(|k| PI * k as f64 / (n + 1) as f64).collect();
    let (rule, _) = adaptive_rule(h, &bps, AdaptiveOptions::default());
    let mut mu = Discretization::default();
    for (&t, &wt) in rule.nodes.iter().zip(&rule.weights) {
        mu.push(t, floor * wt);
        mu.push(-t, floor * wt);
    }
    for &(t, m) in w.measure.atoms() {
        mu.push(t, m);
    }
    Ok(WitnessEntropy {
        entropy: entropy_with(abs_phi, &mu)?,
        envelope: sup_on_circle(abs_phi, 16 * (n + 1)).ln(),
    })
}

/// Lower estimate of `Ω_n(S_δ)` for each `n` in `ns` (maximum over the two
/// witnesses above), with line fits against `log n`.
pub fn entropy_scaling_report(ns: &[usize], delta: Option<f64>, params: &ConstructionParams) -> Result<EntropyReport> {
    let delta = delta.unwrap_or(DEFAULT_ENTROPY_DELTA);
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::ParameterOutOfRange {
            name: "delta",
            value: delta,
            range: "(0, 1)",
        });
    }
    let rows: Vec<EntropyRow> = ns
        .par_iter()
        .map(|&n| {
            let c = construction_entropy(&ConstructionParams { n, ..*params }, Some(delta))?;
            let e = equidistant_entropy(n, delta)?;
            let best = if c.entropy >= e.entropy { c } else { e };
            Ok(EntropyRow {
                n,
                entropy: best.entropy,
                log_n: (n as f64).ln(),
                envelope: best.envelope,
                construction_entropy: c.entropy,
                construction_envelope: c.envelope,
                equidistant_entropy: e.entropy,
                equidistant_envelope: e.envelope,
            })
        })
        .collect::<Result<_>>()?;
    let x: Vec<f64> = rows.iter().map(|r| r.log_n).collect();
    let col = |f: fn(&EntropyRow) -> f64| -> Vec<f64> { rows.iter().map(f).collect() };
    Ok(EntropyReport {
        delta,
        fit: fit_line(&x, &col(|r| r.entropy)),
        envelope_fit: fit_line(&x, &col(|r| r.envelope)),
        construction_fit: fit_line(&x, &col(|r| r.construction_entropy)),
        rows,
    })
}
