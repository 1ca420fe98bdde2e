//! Extremal problem `M_{n,δ} = sup_{σ ∈ S_δ} ‖φ_n(·, σ)‖_∞`: the trivial upper
//! bound, the equidistant-atom measures that make it sharp as `δ → 0`, the
//! first variation of `|φ_n(1)|²` in the moments, and a local search over
//! measures of the extremal form `δ/2π dθ + Σ m_j δ_{θ_j}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{moments, CircleMeasure};
use crate::opuc::{eval_orthonormal, szego_recursion, verblunsky_from_moments};
use crate::poly::ComplexPolynomial;
use crate::spectral::TrigPolynomial;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `√((n+1)/δ)`.
pub fn upper_bound(n: usize, delta: f64) -> f64 {
    ((n + 1) as f64 / delta).sqrt()
}

/// `|φ_n(1)|²` for the measure with moments `s_0..s_n` (any total mass).
pub fn phi_at_one_sq(s: &[Complex64]) -> Result<f64> {
    let g = verblunsky_from_moments(s)?;
    Ok(eval_orthonormal(g.gammas(), ONE).0.norm_sqr() / s[0].re)
}

/// `|φ_n(1, μ)|`.
pub fn phi_at_one(mu: &CircleMeasure, n: usize) -> Result<f64> {
    Ok(phi_at_one_sq(&moments(mu, n))?.sqrt())
}

/// Monic `Φ_n(·, μ)` through moments, Levinson and the Szegő recursion.
pub fn monic_from_measure(mu: &CircleMeasure, n: usize) -> Result<ComplexPolynomial> {
    let g = verblunsky_from_moments(&moments(mu, n))?;
    Ok(szego_recursion(&g, n)?.monic(n))
}

fn density_grid(n: usize) -> usize {
    (4 * (n + 1)).next_power_of_two().max(256)
}

#[derive(Debug, Clone)]
pub struct SmallDeltaMeasure {
    /// `δ/2π dθ + Σ_{k=1}^n m δ_{2πk/(n+1)}`.
    pub measure: CircleMeasure,
    /// `(m/(δ+m)) Π_n + (δ/(δ+m)) z^n`, `Π_n = 1 + z + … + z^n`.
    pub monic: ComplexPolynomial,
    /// `Φ_n(1) = 1 + mn/(δ+m)`.
    pub monic_at_one: f64,
    /// `‖Φ_n‖² = δ(1 + mn/(δ+m))`.
    pub norm_sq: f64,
    /// `φ_n(1) = Φ_n(1)/‖Φ_n‖`.
    pub phi_at_one: f64,
}

pub fn small_delta_measure(n: usize, delta: f64, mass: f64) -> Result<SmallDeltaMeasure> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::ParameterOutOfRange {
            name: "mass",
            value: mass,
            range: "(0, inf)",
        });
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::ParameterOutOfRange {
            name: "delta",
            value: delta,
            range: "(0, inf)",
        });
    }
    let atoms = (1..=n)
        .map(|k| (2.0 * PI * k as f64 / (n + 1) as f64, mass))
        .collect();
    let measure = CircleMeasure::new(vec![delta / (2.0 * PI); density_grid(n)], atoms)?;
    let a = mass / (delta + mass);
    let mut c = vec![a; n + 1];
    c[n] += delta / (delta + mass);
    let ratio = mass * n as f64 / (delta + mass);
    let monic_at_one = 1.0 + ratio;
    let norm_sq = delta * (1.0 + ratio);
    Ok(SmallDeltaMeasure {
        measure,
        monic: ComplexPolynomial::from_real(&c),
        monic_at_one,
        norm_sq,
        phi_at_one: monic_at_one / norm_sq.sqrt(),
    })
}

/// Random member of `S_δ`: the floor `δ/2π`, a smooth bump `|p|²` of random
/// degree ≤ 4, and up to four atoms, normalized to total mass 1.
pub fn random_steklov_measure<R: Rng>(rng: &mut R, delta: f64, grid: usize) -> Result<CircleMeasure> {
    let deg = rng.gen_range(0..=4);
    let coeffs: Vec<Complex64> = (0..=deg)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let p = ComplexPolynomial::new(coeffs);
    let bump: Vec<f64> = p.eval_on_grid(grid).iter().map(|v| v.norm_sqr()).collect();
    let bump_mass = bump.iter().sum::<f64>() / grid as f64;
    let n_atoms = rng.gen_range(0..=4);
    // split 1 − δ between bump and atoms
    let mut parts: Vec<f64> = (0..=n_atoms).map(|_| rng.gen_range(0.05..1.0)).collect();
    if bump_mass <= 1e-12 {
        parts[0] = 0.0;
    }
    let total: f64 = parts.iter().sum();
    let free = 1.0 - delta;
    let scale = if bump_mass > 1e-12 { parts[0] * free / total / bump_mass } else { 0.0 };
    let density = bump
        .iter()
        .map(|b| (delta + scale * b) / (2.0 * PI))
        .collect();
    let atoms = parts[1..]
        .iter()
        .map(|w| (rng.gen_range(0.0..2.0 * PI), w * free / total))
        .collect();
    let mut mu = CircleMeasure::new(density, atoms)?;
    if n_atoms == 0 && bump_mass <= 1e-12 {
        // nothing to carry the remaining mass: spread it evenly
        mu = CircleMeasure::lebesgue(grid);
    }
    Ok(mu)
}

/// Finite-difference step on each real moment coordinate.
pub const GRADIENT_STEP: f64 = 1e-6;

/// First variation of `F = |φ_n(1, μ)|²` in the moments:
/// `T_n(θ) = ∂F/∂s_0 + Σ_j (∂F/∂Re s_j cos jθ + ∂F/∂Im s_j sin jθ)`, so that
/// `dF(μ + tν)/dt = ∫T_n dν` at `t = 0`.
pub fn variational_gradient(mu: &CircleMeasure, n: usize) -> Result<TrigPolynomial> {
    let s = moments(mu, n);
    phi_at_one_sq(&s)?;
    let diff = |j: usize, dir: Complex64| -> Result<f64> {
        let mut h = GRADIENT_STEP;
        for _ in 0..8 {
            let mut plus = s.clone();
            let mut minus = s.clone();
            plus[j] += dir * h;
            minus[j] -= dir * h;
            if let (Ok(a), Ok(b)) = (phi_at_one_sq(&plus), phi_at_one_sq(&minus)) {
                return Ok((a - b) / (2.0 * h));
            }
            h /= 4.0;
        }
        Err(Error::FiniteDifference { coordinate: j })
    };
    let mut c = Vec::with_capacity(n + 1);
    c.push(Complex64::new(diff(0, ONE)?, 0.0));
    for j in 1..=n {
        let a = diff(j, ONE)?;
        let b = diff(j, Complex64::new(0.0, 1.0))?;
        c.push(Complex64::new(a, -b) / 2.0);
    }
    Ok(TrigPolynomial::new(c))
}

/// `∫ T dμ` from the moments of `μ`.
pub fn integrate_trig(t: &TrigPolynomial, s: &[Complex64]) -> f64 {
    let c = t.coeffs();
    c[0].re * s[0].re
        + 2.0
            * c.iter()
                .zip(s)
                .skip(1)
                .map(|(ck, sk)| (ck * sk).re)
                .sum::<f64>()
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SearchOptions {
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            restarts: 8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchResult {
    pub n: usize,
    pub delta: f64,
    /// Atoms `(θ_j, m_j)` on top of the floor `δ/2π`.
    pub atoms: Vec<(f64, f64)>,
    pub value: f64,
    pub upper_bound: f64,
    /// Accepted objective values of the winning restart, in order.
    pub history: Vec<f64>,
    /// Final value of every restart.
    pub restart_values: Vec<f64>,
}

impl SearchResult {
    /// The best measure, on a density grid adequate for degree `n`.
    pub fn measure(&self) -> Result<CircleMeasure> {
        if self.atoms.is_empty() {
            return Ok(CircleMeasure::lebesgue(density_grid(self.n)));
        }
        CircleMeasure::new(
            vec![self.delta / (2.0 * PI); density_grid(self.n)],
            self.atoms.clone(),
        )
    }
}

/// `|φ_n(1)|` for `δ/2π dθ + Σ m_j δ_{θ_j}` with `δ + Σ m_j = 1`.
fn atom_objective(n: usize, delta: f64, atoms: &[(f64, f64)]) -> Result<f64> {
    let mut s = vec![Complex64::new(0.0, 0.0); n + 1];
    s[0] = Complex64::new(delta + atoms.iter().map(|a| a.1).sum::<f64>(), 0.0);
    for &(t, m) in atoms {
        let step = Complex64::from_polar(1.0, t);
        let mut w = step;
        for sk in s.iter_mut().skip(1) {
            *sk += m * w;
            w *= step;
        }
    }
    Ok(phi_at_one_sq(&s)?.sqrt())
}

struct Ascent {
    atoms: Vec<(f64, f64)>,
    value: f64,
    history: Vec<f64>,
}

fn ascend(n: usize, delta: f64, mut atoms: Vec<(f64, f64)>, iters: usize, rng: &mut ChaCha8Rng) -> Result<Ascent> {
    let mut value = atom_objective(n, delta, &atoms)?;
    let mut history = vec![value];
    let mut h_theta = PI / (4.0 * (n + 1) as f64);
    let mut h_mass = 0.25;
    let k = atoms.len();
    for _ in 0..iters {
        let mut improved = false;
        for j in 0..k {
            for sign in [1.0, -1.0] {
                let mut trial = atoms.clone();
                trial[j].0 = (trial[j].0 + sign * h_theta).rem_euclid(2.0 * PI);
                if let Ok(v) = atom_objective(n, delta, &trial) {
                    if v > value {
                        atoms = trial;
                        value = v;
                        history.push(v);
                        improved = true;
                    }
                }
            }
            if k > 1 {
                let mut other = rng.gen_range(0..k - 1);
                if other >= j {
                    other += 1;
                }
                for (from, to) in [(other, j), (j, other)] {
                    let moved = h_mass * atoms[from].1;
                    let mut trial = atoms.clone();
                    trial[from].1 -= moved;
                    trial[to].1 += moved;
                    if let Ok(v) = atom_objective(n, delta, &trial) {
                        if v > value {
                            atoms = trial;
                            value = v;
                            history.push(v);
                            improved = true;
                        }
                    }
                }
            }
        }
        if !improved {
            h_theta /= 2.0;
            h_mass /= 2.0;
            if h_theta < 1e-12 {
                break;
            }
        }
    }
    Ok(Ascent {
        atoms,
        value,
        history,
    })
}

/// Coordinate ascent over atom positions and masses with the density pinned
/// at `δ/2π`. Restart 0 starts from equidistant atoms `2πk/(N+1)`; the rest
/// from seeded random configurations. `atom_budget = 0` leaves only the
/// probability constraint, i.e. normalized arc length, with `|φ_n(1)| = 1`.
pub fn search_extremal(
    n: usize,
    delta: f64,
    atom_budget: usize,
    iters: usize,
    opts: SearchOptions,
) -> Result<SearchResult> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::ParameterOutOfRange {
            name: "delta",
            value: delta,
            range: "(0, 1]",
        });
    }
    if atom_budget > n {
        return Err(Error::ParameterOutOfRange {
            name: "atomBudget",
            value: atom_budget as f64,
            range: "[0, n]",
        });
    }
    let bound = upper_bound(n, delta);
    if atom_budget == 0 || delta == 1.0 {
        return Ok(SearchResult {
            n,
            delta,
            atoms: vec![],
            value: 1.0,
            upper_bound: bound,
            history: vec![1.0],
            restart_values: vec![1.0],
        });
    }
    let free = 1.0 - delta;
    let runs: Vec<Result<Ascent>> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(r as u64));
            let atoms: Vec<(f64, f64)> = if r == 0 {
                (1..=atom_budget)
                    .map(|k| (2.0 * PI * k as f64 / (atom_budget + 1) as f64, free / atom_budget as f64))
                    .collect()
            } else {
                let w: Vec<f64> = (0..atom_budget).map(|_| rng.gen_range(0.1..1.0)).collect();
                let total: f64 = w.iter().sum();
                w.iter()
                    .map(|wi| (rng.gen_range(0.0..2.0 * PI), wi * free / total))
                    .collect()
            };
            ascend(n, delta, atoms, iters, &mut rng)
        })
        .collect();
    let runs: Vec<Ascent> = runs.into_iter().collect::<Result<_>>()?;
    let restart_values = runs.iter().map(|a| a.value).collect();
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("at least one restart");
    Ok(SearchResult {
        n,
        delta,
        atoms: best.atoms,
        value: best.value,
        upper_bound: bound,
        history: best.history,
        restart_values,
    })
}
