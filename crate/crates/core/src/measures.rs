//! Measures on the unit circle, Steklov membership, and point-mass
//! perturbations of orthogonal polynomials.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::opuc::{monic_norm, OrthogonalSystem};
use crate::poly::ComplexPolynomial;
use crate::quadrature::{spike_rule, AdaptiveOptions};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Absolutely continuous density sampled at `θ_i = 2πi/N` (mass per radian)
/// plus exact atoms `(θ_j, m_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure", into = "RawMeasure")]
pub struct CircleMeasure {
    density: Vec<f64>,
    atoms: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct RawMeasure {
    delta_grid: Vec<f64>,
    atoms: Vec<(f64, f64)>,
}

impl TryFrom<RawMeasure> for CircleMeasure {
    type Error = Error;
    fn try_from(r: RawMeasure) -> Result<Self> {
        CircleMeasure::new(r.delta_grid, r.atoms)
    }
}

impl From<CircleMeasure> for RawMeasure {
    fn from(m: CircleMeasure) -> Self {
        RawMeasure {
            delta_grid: m.density,
            atoms: m.atoms,
        }
    }
}

fn wrap_angle(theta: f64) -> f64 {
    theta.rem_euclid(2.0 * PI)
}

impl CircleMeasure {
    pub fn new(density: Vec<f64>, atoms: Vec<(f64, f64)>) -> Result<Self> {
        if density.is_empty() {
            return Err(Error::Construction("density grid must be non-empty".into()));
        }
        if let Some(&d) = density.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
            return Err(Error::ParameterOutOfRange {
                name: "density",
                value: d,
                range: "[0, inf)",
            });
        }
        let mut measure = Self {
            density,
            atoms: Vec::with_capacity(atoms.len()),
        };
        for (theta, mass) in atoms {
            measure.add_atom(theta, mass)?;
        }
        Ok(measure)
    }

    /// Normalized arc length `dθ/2π` on `grid` points.
    pub fn lebesgue(grid: usize) -> Self {
        Self {
            density: vec![1.0 / (2.0 * PI); grid],
            atoms: vec![],
        }
    }

    /// Samples `density(θ)` on the grid.
    pub fn from_density<F: Fn(f64) -> f64>(grid: usize, density: F) -> Result<Self> {
        Self::new(fft::grid_angles(grid).into_iter().map(density).collect(), vec![])
    }

    /// Adds mass `mass` at angle `theta`, merging with an existing atom there.
    pub fn add_atom(&mut self, theta: f64, mass: f64) -> Result<()> {
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(Error::ParameterOutOfRange {
                name: "atom mass",
                value: mass,
                range: "[0, inf)",
            });
        }
        if !theta.is_finite() {
            return Err(Error::ParameterOutOfRange {
                name: "atom angle",
                value: theta,
                range: "finite",
            });
        }
        let theta = wrap_angle(theta);
        match self.atoms.iter_mut().find(|(t, _)| *t == theta) {
            Some(a) => a.1 += mass,
            None => self.atoms.push((theta, mass)),
        }
        Ok(())
    }

    pub fn with_atom(mut self, theta: f64, mass: f64) -> Result<Self> {
        self.add_atom(theta, mass)?;
        Ok(self)
    }

    pub fn grid_size(&self) -> usize {
        self.density.len()
    }

    pub fn angles(&self) -> Vec<f64> {
        fft::grid_angles(self.grid_size())
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn ac_mass(&self) -> f64 {
        2.0 * PI / self.grid_size() as f64 * self.density.iter().sum::<f64>()
    }

    pub fn total_mass(&self) -> f64 {
        self.ac_mass() + self.atoms.iter().map(|a| a.1).sum::<f64>()
    }

    /// `a·self + b·other` on a common grid.
    pub fn combine(&self, a: f64, other: &CircleMeasure, b: f64) -> Result<Self> {
        if self.grid_size() != other.grid_size() {
            return Err(Error::Construction("measures live on different grids".into()));
        }
        let density = self
            .density
            .iter()
            .zip(&other.density)
            .map(|(x, y)| a * x + b * y)
            .collect();
        let mut out = Self::new(density, vec![])?;
        for &(t, m) in &self.atoms {
            out.add_atom(t, a * m)?;
        }
        for &(t, m) in &other.atoms {
            out.add_atom(t, b * m)?;
        }
        Ok(out)
    }

    pub fn scaled(&self, a: f64) -> Result<Self> {
        Self::new(
            self.density.iter().map(|d| a * d).collect(),
            self.atoms.iter().map(|&(t, m)| (t, a * m)).collect(),
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// CSV with header `theta,density`.
    pub fn write_density_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["theta", "density"])?;
        for (t, d) in self.angles().iter().zip(&self.density) {
            wr.write_record([format!("{t:.17e}"), format!("{d:.17e}")])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Finite node/weight representation `∫ h dμ ≈ Σ w_i h(θ_i)`; the common
/// currency for integrating against grid measures, atoms, and spike-resolved
/// densities.
#[derive(Debug, Clone, Default)]
pub struct Discretization {
    pub theta: Vec<f64>,
    pub weight: Vec<f64>,
}

impl Discretization {
    pub fn push(&mut self, theta: f64, weight: f64) {
        self.theta.push(theta);
        self.weight.push(weight);
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.theta
            .iter()
            .zip(&self.weight)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }

    pub fn integrate_complex<F: Fn(f64) -> Complex64>(&self, f: F) -> Complex64 {
        self.theta
            .iter()
            .zip(&self.weight)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.weight.iter().sum()
    }

    /// `s_j = Σ w_i e^{ijθ_i}`, `j = 0..=n`.
    pub fn moments(&self, n: usize) -> Vec<Complex64> {
        let mut s = vec![Complex64::new(0.0, 0.0); n + 1];
        for (&t, &w) in self.theta.iter().zip(&self.weight) {
            let step = Complex64::from_polar(1.0, t);
            let mut z = Complex64::new(w, 0.0);
            for (j, sj) in s.iter_mut().enumerate() {
                if j % 64 == 0 && j > 0 {
                    // re-anchor to limit drift of the running power
                    z = Complex64::from_polar(w, j as f64 * t);
                }
                *sj += z;
                z *= step;
            }
        }
        s
    }

    /// `⟨P, Q⟩ = ∫ P conj(Q) dμ`.
    pub fn inner(&self, p: &ComplexPolynomial, q: &ComplexPolynomial) -> Complex64 {
        self.integrate_complex(|t| p.eval_at_angle(t) * q.eval_at_angle(t).conj())
    }

    /// Adaptive discretization of the density `g` on the circle. If `even`,
    /// `g(−θ) = g(θ)` is assumed and only `[0, π]` is refined, then mirrored.
    pub fn spike_resolved<F: Fn(f64) -> f64>(
        g: F,
        even: bool,
        scan: usize,
        min_panels: usize,
        opts: AdaptiveOptions,
    ) -> Self {
        let (a, b) = if even { (0.0, PI) } else { (-PI, PI) };
        let (rule, _) = spike_rule(&g, a, b, scan.max(64), min_panels.max(4), opts);
        let mut out = Discretization::default();
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let gw = w * g(x);
            if even {
                out.push(x, gw);
                out.push(-x, gw);
            } else {
                out.push(x, gw);
            }
        }
        out
    }
}

/// Anything that can be integrated against on the circle.
pub trait CircleIntegral {
    fn discretize(&self) -> Discretization;
}

impl CircleIntegral for CircleMeasure {
    fn discretize(&self) -> Discretization {
        let h = 2.0 * PI / self.grid_size() as f64;
        let mut d = Discretization::default();
        for (t, &rho) in self.angles().into_iter().zip(&self.density) {
            d.push(t, rho * h);
        }
        for &(t, m) in &self.atoms {
            d.push(t, m);
        }
        d
    }
}

impl CircleIntegral for Discretization {
    fn discretize(&self) -> Discretization {
        self.clone()
    }
}

/// `s_j = ∫ e^{ijθ} dμ` for `j = 0..=n`: the density by the trapezoid rule
/// (exact for trigonometric polynomials of degree below `N/2`, computed by FFT),
/// the atoms exactly.
pub fn moments(mu: &CircleMeasure, n: usize) -> Vec<Complex64> {
    let grid = mu.grid_size();
    let coef = fft::analyze_real(&mu.density);
    let mut s: Vec<Complex64> = (0..=n)
        .map(|j| 2.0 * PI * coef[(grid - j % grid) % grid])
        .collect();
    for &(t, m) in mu.atoms() {
        for (j, sj) in s.iter_mut().enumerate() {
            *sj += m * Complex64::from_polar(1.0, j as f64 * t);
        }
    }
    s
}

/// Steklov parameter `δ ∈ (0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteklovParams {
    delta: f64,
}

impl SteklovParams {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::ParameterOutOfRange {
                name: "delta",
                value: delta,
                range: "(0, 1]",
            });
        }
        Ok(Self { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Density floor `δ/2π`.
    pub fn floor(&self) -> f64 {
        self.delta / (2.0 * PI)
    }
}

/// Relative slack applied when asserting membership from grid samples.
pub const STEKLOV_SLACK: f64 = 1e-6;

/// `min_i density(θ_i) − δ/2π`; atoms never lower it.
pub fn steklov_margin(mu: &CircleMeasure, p: SteklovParams) -> f64 {
    mu.density().iter().copied().fold(f64::INFINITY, f64::min) - p.floor()
}

/// Membership in `S_δ` at grid resolution, with slack `1e−6·δ/2π`.
pub fn in_steklov_class(mu: &CircleMeasure, p: SteklovParams) -> bool {
    steklov_margin(mu, p) >= -STEKLOV_SLACK * p.floor()
}

fn kernel_at_one(system: &OrthogonalSystem, n: usize) -> Result<f64> {
    Ok(system.cd_kernel(n, ONE, ONE)?.re)
}

/// Monic `Φ_n(·, μ(t))` for `μ(t) = (1−t)μ + tδ_{θ=0}`:
/// `Φ_n − t Φ_n(1) K_{n−1}(1, ·) / (1 − t + t K_{n−1}(1, 1))`.
pub fn geronimus_insert(
    phi_n: &ComplexPolynomial,
    system: &OrthogonalSystem,
    t: f64,
) -> Result<ComplexPolynomial> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::InvalidMixingWeight(t));
    }
    let n = phi_n.degree();
    if n == 0 || t == 0.0 {
        return Ok(phi_n.clone());
    }
    let kernel = system.cd_kernel_poly(n - 1, ONE)?;
    let k11 = kernel.eval(ONE).re;
    let factor = t * phi_n.eval(ONE) / (1.0 - t + t * k11);
    Ok(phi_n - &kernel.scale(factor).padded(n))
}

/// `‖Φ_n(·, μ(t))‖²_{μ(t)} = ‖Φ_n‖²_μ (1−t)(1−t+tK_n(1,1)) / (1−t+tK_{n−1}(1,1))`.
pub fn inserted_norm(norm_sq: f64, system: &OrthogonalSystem, n: usize, t: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::InvalidMixingWeight(t));
    }
    if n == 0 {
        // Φ_0 = 1 and μ(t) is still a probability measure
        return Ok(norm_sq);
    }
    let kn = kernel_at_one(system, n)?;
    let kn1 = kernel_at_one(system, n - 1)?;
    Ok(norm_sq * (1.0 - t) * (1.0 - t + t * kn) / (1.0 - t + t * kn1))
}

/// Derivatives at `t = 0` of `|Φ_n(1, μ(t))|²` and `|φ_n(1, μ(t))|²`.
pub fn insertion_derivatives(system: &OrthogonalSystem, n: usize) -> Result<(f64, f64)> {
    if n == 0 || n > system.top() {
        return Err(Error::IndexOutOfRange {
            index: n,
            size: system.top() + 1,
        });
    }
    let kn = kernel_at_one(system, n)?;
    let kn1 = kernel_at_one(system, n - 1)?;
    let phi1 = system.phi(n).eval(ONE).norm_sqr();
    let monic1 = phi1 * monic_norm(system.gammas(), n).powi(2);
    Ok((-2.0 * kn1 * monic1, phi1 * (1.0 - kn - kn1)))
}

/// Relative tolerance for the kernel-orthogonality precondition.
pub const KERNEL_ORTHOGONALITY_TOL: f64 = 1e-8;

/// Monic `Φ_n(·, η)` for `η = μ + Σ m_k δ_{ξ_k}`, valid when
/// `K_{n−1}(ξ_j, ξ_l) = 0` for `j ≠ l`. With a single mass at `1` this is
/// [`geronimus_insert`] with `m = t/(1−t)` (monic polynomials do not see the
/// overall scale of the measure).
pub fn rakhmanov_multi_insert(
    system: &OrthogonalSystem,
    n: usize,
    points: &[Complex64],
    masses: &[f64],
) -> Result<ComplexPolynomial> {
    if points.len() != masses.len() {
        return Err(Error::Construction(format!(
            "{} points but {} masses",
            points.len(),
            masses.len()
        )));
    }
    if n == 0 || n > system.top() {
        return Err(Error::IndexOutOfRange {
            index: n,
            size: system.top() + 1,
        });
    }
    for &m in masses {
        if !(m.is_finite() && m >= 0.0) {
            return Err(Error::ParameterOutOfRange {
                name: "mass",
                value: m,
                range: "[0, inf)",
            });
        }
    }
    for p in points {
        if (p.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::ParameterOutOfRange {
                name: "|xi|",
                value: p.norm(),
                range: "{1}",
            });
        }
    }
    let kernels: Vec<ComplexPolynomial> = points
        .iter()
        .map(|&xi| system.cd_kernel_poly(n - 1, xi))
        .collect::<Result<_>>()?;
    let diag: Vec<f64> = kernels
        .iter()
        .zip(points)
        .map(|(k, &xi)| k.eval(xi).re)
        .collect();
    for i in 0..points.len() {
        for j in 0..points.len() {
            if i != j {
                let residual = kernels[i].eval(points[j]).norm() / (diag[i] * diag[j]).sqrt();
                if residual > KERNEL_ORTHOGONALITY_TOL {
                    return Err(Error::InadmissibleInsertion { i, j, residual });
                }
            }
        }
    }
    let phi_n = system.monic(n);
    let mut out = phi_n.clone();
    for ((k, &xi), (&m, &kd)) in kernels.iter().zip(points).zip(masses.iter().zip(&diag)) {
        let factor = m * phi_n.eval(xi) / (1.0 + m * kd);
        out = &out - &k.scale(factor).padded(n);
    }
    Ok(out)
}
