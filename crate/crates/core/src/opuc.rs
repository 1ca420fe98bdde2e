//! Orthogonal polynomials on the unit circle.
//!
//! Conventions: moments are `s_j = ∫ e^{ijθ} dμ`, the inner product is
//! `<f, g> = ∫ f conj(g) dμ`, and the monic polynomials satisfy
//! `Φ_{k+1} = z Φ_k − conj(γ_k) Φ_k*`, so `Φ_k(0) = −conj(γ_{k−1})`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{CircleMeasure, Discretization};
use crate::poly::ComplexPolynomial;
use crate::quadrature::AdaptiveOptions;

/// Largest moment order accepted by [`verblunsky_from_moments`]; Toeplitz
/// conditioning makes higher orders meaningless in double precision.
pub const MOMENT_ORDER_CAP: usize = 1024;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct VerblunskySequence {
    gammas: Vec<Complex64>,
}

impl TryFrom<Vec<Complex64>> for VerblunskySequence {
    type Error = Error;
    fn try_from(v: Vec<Complex64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<VerblunskySequence> for Vec<Complex64> {
    fn from(v: VerblunskySequence) -> Self {
        v.gammas
    }
}

impl VerblunskySequence {
    pub fn new(gammas: Vec<Complex64>) -> Result<Self> {
        for (index, g) in gammas.iter().enumerate() {
            let modulus = g.norm();
            if !(modulus < 1.0) {
                return Err(Error::InvalidVerblunsky { index, modulus });
            }
        }
        Ok(Self { gammas })
    }

    pub fn from_real(gammas: &[f64]) -> Result<Self> {
        Self::new(gammas.iter().map(|&g| Complex64::new(g, 0.0)).collect())
    }

    /// `n` vanishing coefficients (Lebesgue measure).
    pub fn free(n: usize) -> Self {
        Self {
            gammas: vec![ZERO; n],
        }
    }

    pub fn gammas(&self) -> &[Complex64] {
        &self.gammas
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    pub fn rho(&self, j: usize) -> f64 {
        (1.0 - self.gammas[j].norm_sqr()).sqrt()
    }

    pub fn rhos(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.rho(j)).collect()
    }

    /// Concatenation `γ_0..γ_{n−1}, γ̃_0..`.
    pub fn concat(&self, tail: &VerblunskySequence) -> Self {
        let mut gammas = self.gammas.clone();
        gammas.extend_from_slice(&tail.gammas);
        Self { gammas }
    }

    pub fn truncated(&self, n: usize) -> Self {
        Self {
            gammas: self.gammas[..n.min(self.len())].to_vec(),
        }
    }

    /// The sign-flipped sequence `−γ_j`, which generates the second-kind
    /// polynomials.
    pub fn negated(&self) -> Self {
        Self {
            gammas: self.gammas.iter().map(|g| -g).collect(),
        }
    }
}

/// `ρ_0 ⋯ ρ_{n−1} = ‖Φ_n‖_μ` for a probability measure.
pub fn monic_norm(gammas: &VerblunskySequence, n: usize) -> f64 {
    (0..n.min(gammas.len())).map(|j| gammas.rho(j)).product()
}

/// First- and second-kind orthonormal polynomials up to degree `N`.
#[derive(Debug, Clone)]
pub struct OrthogonalSystem {
    gammas: VerblunskySequence,
    phi: Vec<ComplexPolynomial>,
    phi_star: Vec<ComplexPolynomial>,
    psi: Vec<ComplexPolynomial>,
    psi_star: Vec<ComplexPolynomial>,
}

fn recurse(gammas: &[Complex64], up_to: usize) -> (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>) {
    let mut phi = Vec::with_capacity(up_to + 1);
    let mut star = Vec::with_capacity(up_to + 1);
    phi.push(vec![ONE]);
    star.push(vec![ONE]);
    for (k, &g) in gammas.iter().enumerate().take(up_to) {
        let (p, s) = step(&phi[k], &star[k], g);
        phi.push(p);
        star.push(s);
    }
    (phi, star)
}

// One Szegő step on coefficient vectors of length k+1.
fn step(p: &[Complex64], s: &[Complex64], g: Complex64) -> (Vec<Complex64>, Vec<Complex64>) {
    let k = p.len() - 1;
    let inv_rho = 1.0 / (1.0 - g.norm_sqr()).sqrt();
    let gc = g.conj();
    let mut np = vec![ZERO; k + 2];
    let mut ns = vec![ZERO; k + 2];
    for j in 0..=k {
        // z φ_k contributes at j+1; φ_k* at j
        np[j + 1] += p[j];
        np[j] -= gc * s[j];
        ns[j] += s[j];
        ns[j + 1] -= g * p[j];
    }
    np.iter_mut().for_each(|c| *c *= inv_rho);
    ns.iter_mut().for_each(|c| *c *= inv_rho);
    (np, ns)
}

/// Runs the Szegő recursion for `φ_j, φ_j*` and the second-kind `ψ_j, ψ_j*`,
/// `j = 0..=up_to`.
pub fn szego_recursion(gammas: &VerblunskySequence, up_to: usize) -> Result<OrthogonalSystem> {
    if up_to > gammas.len() {
        return Err(Error::IndexOutOfRange {
            index: up_to,
            size: gammas.len(),
        });
    }
    // `VerblunskySequence` already enforces |γ| < 1.
    let (phi, phi_star) = recurse(gammas.gammas(), up_to);
    let (psi, psi_star) = recurse(gammas.negated().gammas(), up_to);
    let wrap = |v: Vec<Vec<Complex64>>| v.into_iter().map(ComplexPolynomial::new).collect();
    Ok(OrthogonalSystem {
        gammas: gammas.truncated(up_to),
        phi: wrap(phi),
        phi_star: wrap(phi_star),
        psi: wrap(psi),
        psi_star: wrap(psi_star),
    })
}

/// `(φ_N, φ_N*)` without storing the intermediate polynomials.
pub fn szego_top(gammas: &VerblunskySequence) -> (ComplexPolynomial, ComplexPolynomial) {
    let mut p = vec![ONE];
    let mut s = vec![ONE];
    for &g in gammas.gammas() {
        let (np, ns) = step(&p, &s, g);
        p = np;
        s = ns;
    }
    (ComplexPolynomial::new(p), ComplexPolynomial::new(s))
}

/// `(φ_N(z), φ_N*(z))` by the scalar recursion, O(N).
pub fn eval_orthonormal(gammas: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = ONE;
    let mut s = ONE;
    for &g in gammas {
        let inv_rho = 1.0 / (1.0 - g.norm_sqr()).sqrt();
        let zp = z * p;
        p = (zp - g.conj() * s) * inv_rho;
        s = (s - g * zp) * inv_rho;
    }
    (p, s)
}

impl OrthogonalSystem {
    pub fn gammas(&self) -> &VerblunskySequence {
        &self.gammas
    }

    /// Largest available degree `N`.
    pub fn top(&self) -> usize {
        self.phi.len() - 1
    }

    fn check(&self, j: usize) -> Result<()> {
        if j > self.top() {
            Err(Error::IndexOutOfRange {
                index: j,
                size: self.phi.len(),
            })
        } else {
            Ok(())
        }
    }

    pub fn phi(&self, j: usize) -> &ComplexPolynomial {
        &self.phi[j]
    }

    pub fn phi_star(&self, j: usize) -> &ComplexPolynomial {
        &self.phi_star[j]
    }

    pub fn psi(&self, j: usize) -> &ComplexPolynomial {
        &self.psi[j]
    }

    pub fn psi_star(&self, j: usize) -> &ComplexPolynomial {
        &self.psi_star[j]
    }

    /// Monic `Φ_j = φ_j ρ_0⋯ρ_{j−1}`.
    pub fn monic(&self, j: usize) -> ComplexPolynomial {
        self.phi[j].scale_real(monic_norm(&self.gammas, j))
    }

    /// `K_n(ξ, z) = Σ_{j≤n} conj(φ_j(ξ)) φ_j(z)`.
    pub fn cd_kernel(&self, n: usize, xi: Complex64, z: Complex64) -> Result<Complex64> {
        self.check(n)?;
        Ok((0..=n)
            .map(|j| self.phi[j].eval(xi).conj() * self.phi[j].eval(z))
            .sum())
    }

    /// `z ↦ K_n(ξ, z)` as a polynomial of degree `n`.
    pub fn cd_kernel_poly(&self, n: usize, xi: Complex64) -> Result<ComplexPolynomial> {
        self.check(n)?;
        let mut acc = vec![ZERO; n + 1];
        for j in 0..=n {
            let w = self.phi[j].eval(xi).conj();
            for (a, c) in acc.iter_mut().zip(self.phi[j].coeffs()) {
                *a += w * c;
            }
        }
        Ok(ComplexPolynomial::new(acc))
    }

    /// Confirms that every `φ_j*` is zero-free in the closed disk, using a
    /// boundary grid of `grid` points.
    pub fn verify_zero_free(&self, grid: usize) -> Result<()> {
        for (j, s) in self.phi_star.iter().enumerate() {
            s.check_zero_free_in_closed_disk(grid.max(8 * (j + 1)))
                .map_err(|e| Error::Extraction {
                    index: j,
                    source: Box::new(e),
                })?;
        }
        Ok(())
    }
}

/// Levinson recursion on the Toeplitz matrix `T_{ab} = s_{a−b}`: returns
/// `γ_0..γ_{n−1}` for moments `s_0..s_n`.
pub fn verblunsky_from_moments(s: &[Complex64]) -> Result<VerblunskySequence> {
    if s.is_empty() {
        return Ok(VerblunskySequence::free(0));
    }
    let n = s.len() - 1;
    if n > MOMENT_ORDER_CAP {
        return Err(Error::MomentOrderTooLarge {
            requested: n,
            cap: MOMENT_ORDER_CAP,
        });
    }
    let mut err = s[0].re;
    if !(err > 0.0) || s[0].im.abs() > 1e-12 * s[0].re.abs() {
        return Err(Error::NotPositiveDefinite { index: 0 });
    }
    let mut a = vec![ONE];
    let mut gammas = Vec::with_capacity(n);
    for k in 0..n {
        let num: Complex64 = a.iter().enumerate().map(|(l, al)| al * s[l + 1]).sum();
        let gc = num / err;
        let g = gc.conj();
        if !(g.norm() < 1.0) {
            return Err(Error::NotPositiveDefinite { index: k + 1 });
        }
        let mut next = vec![ZERO; k + 2];
        for l in 0..=k {
            next[l + 1] += a[l];
            next[l] -= gc * a[k - l].conj();
        }
        a = next;
        err *= 1.0 - g.norm_sqr();
        if !(err > 0.0) {
            return Err(Error::NotPositiveDefinite { index: k + 1 });
        }
        gammas.push(g);
    }
    Ok(VerblunskySequence { gammas })
}

/// Inverse of [`verblunsky_from_moments`]: the moments `s_0..s_N` of any
/// measure with total mass `s0` whose first `N` coefficients are `gammas`.
pub fn moments_from_verblunsky(gammas: &VerblunskySequence, s0: f64) -> Vec<Complex64> {
    let mut s = vec![Complex64::new(s0, 0.0)];
    let mut a = vec![ONE];
    let mut err = s0;
    for (k, &g) in gammas.gammas().iter().enumerate() {
        let gc = g.conj();
        let partial: Complex64 = (0..k).map(|l| a[l] * s[l + 1]).sum();
        s.push(gc * err - partial);
        let mut next = vec![ZERO; k + 2];
        for l in 0..=k {
            next[l + 1] += a[l];
            next[l] -= gc * a[k - l].conj();
        }
        a = next;
        err *= 1.0 - g.norm_sqr();
    }
    s
}

/// Schur–Cohn descent: recovers `γ_0..γ_{N−1}` from a polynomial of exact
/// degree `N` all of whose zeros lie in the open disk (a multiple of some `Φ_N`).
pub fn verblunsky_from_polynomial(p: &ComplexPolynomial) -> Result<VerblunskySequence> {
    let n = p.effective_degree();
    let lead = p.coeff(n);
    let mut a: Vec<Complex64> = p.coeffs()[..=n].iter().map(|c| c / lead).collect();
    let mut gammas = vec![ZERO; n];
    for k in (1..=n).rev() {
        let g = -a[0].conj();
        if !(g.norm() < 1.0) {
            return Err(Error::ZeroInDisk {
                detail: format!("Schur–Cohn step {k} gives |γ| = {}", g.norm()),
            });
        }
        gammas[k - 1] = g;
        let gc = g.conj();
        let scale = 1.0 / (1.0 - g.norm_sqr());
        // Φ_k + conj(γ) Φ_k* = z Φ_{k−1} (1 − |γ|²)
        let mut prev = vec![ZERO; k];
        for j in 1..=k {
            prev[j - 1] = (a[j] + gc * a[k - j].conj()) * scale;
        }
        a = prev;
    }
    Ok(VerblunskySequence { gammas })
}

fn phi_scale(phi: &ComplexPolynomial) -> f64 {
    phi.max_abs_coeff().max(f64::MIN_POSITIVE)
}

/// Checks that a first-kind polynomial has all its zeros in the open disk.
/// The Schur–Cohn descent certifies this even when zeros crowd the circle,
/// where a sampled winding number is unreliable.
fn check_first_kind(phi: &ComplexPolynomial, grid: usize) -> Result<()> {
    let (min, theta) = phi.min_modulus_on_circle(grid);
    if min <= 1e-14 * phi_scale(phi) {
        return Err(Error::ZeroOnCircle { theta });
    }
    verblunsky_from_polynomial(phi).map(|_| ()).map_err(|e| match e {
        Error::ZeroInDisk { detail } => Error::ZeroInDisk {
            detail: format!("zeros outside the disk ({detail})"),
        },
        other => other,
    })
}

fn boundary_grid(deg: usize) -> usize {
    (16 * (deg + 1)).next_power_of_two().max(1024)
}

/// `dθ / (2π |φ_N(e^{iθ})|²)` sampled on `grid` points.
pub fn bernstein_szego_density(phi_n: &ComplexPolynomial, grid: usize) -> Result<CircleMeasure> {
    check_first_kind(phi_n, boundary_grid(phi_n.degree()).max(grid))?;
    let vals = phi_n.eval_on_grid(grid);
    let density = vals
        .iter()
        .map(|v| 1.0 / (2.0 * std::f64::consts::PI * v.norm_sqr()))
        .collect();
    CircleMeasure::new(density, vec![])
}

/// Spike-resolving discretization of the Bernstein–Szegő measure of `φ_N`.
/// Zeros of `φ_N` close to the circle produce narrow peaks that a uniform grid
/// misses; see [`crate::quadrature::spike_rule`].
pub fn bernstein_szego_measure(phi_n: &ComplexPolynomial) -> Result<Discretization> {
    check_first_kind(phi_n, boundary_grid(phi_n.degree()))?;
    let deg = phi_n.degree().max(1);
    let even = phi_n.has_real_coeffs(0.0);
    let g = |t: f64| 1.0 / (2.0 * std::f64::consts::PI * phi_n.eval_at_angle(t).norm_sqr());
    Ok(Discretization::spike_resolved(
        g,
        even,
        16 * deg,
        8 * deg,
        AdaptiveOptions {
            rel_tol: 1e-12,
            ..AdaptiveOptions::default()
        },
    ))
}

/// Moments `s_0..s_n` of the Bernstein–Szegő measure of `φ_N`.
pub fn bernstein_szego_moments(phi_n: &ComplexPolynomial, n: usize) -> Result<Vec<Complex64>> {
    Ok(bernstein_szego_measure(phi_n)?.moments(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn free_case() {
        let sys = szego_recursion(&VerblunskySequence::free(4), 4).unwrap();
        for j in 0..=4 {
            assert_eq!(sys.phi(j), &ComplexPolynomial::monomial(j));
            assert_eq!(sys.psi(j), &ComplexPolynomial::monomial(j));
            assert_eq!(sys.phi_star(j).coeff(0), ONE);
            assert_eq!(sys.phi_star(j).effective_degree(), 0);
        }
    }

    #[test]
    fn one_step() {
        let g = VerblunskySequence::from_real(&[0.5]).unwrap();
        let sys = szego_recursion(&g, 1).unwrap();
        let r = 3f64.sqrt() / 2.0;
        assert_relative_eq!(sys.phi(1).coeff(0).re, -0.5 / r, epsilon = 1e-15);
        assert_relative_eq!(sys.phi(1).coeff(1).re, 1.0 / r, epsilon = 1e-15);
        assert_relative_eq!(sys.psi(1).coeff(0).re, 0.5 / r, epsilon = 1e-15);
        assert_relative_eq!(monic_norm(&g, 1), r, epsilon = 1e-15);
        assert_relative_eq!(
            sys.cd_kernel(1, ONE, ONE).unwrap().re,
            4.0 / 3.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn rejects_bad_gamma() {
        assert!(matches!(
            VerblunskySequence::new(vec![c(0.6, 0.8)]),
            Err(Error::InvalidVerblunsky { index: 0, .. })
        ));
        let g = VerblunskySequence::free(2);
        assert!(szego_recursion(&g, 3).is_err());
    }

    #[test]
    fn levinson_single_atom_mixture() {
        let t = 0.3;
        let s: Vec<Complex64> = (0..5).map(|j| c(if j == 0 { 1.0 } else { t }, 0.0)).collect();
        let g = verblunsky_from_moments(&s).unwrap();
        assert_relative_eq!(g.gammas()[0].re, t, epsilon = 1e-15);
    }

    #[test]
    fn lebesgue_moments_give_zero_gammas() {
        let mut s = vec![ZERO; 9];
        s[0] = ONE;
        let g = verblunsky_from_moments(&s).unwrap();
        assert!(g.gammas().iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn moment_cap_and_non_pd() {
        let s = vec![ONE; MOMENT_ORDER_CAP + 2];
        assert!(matches!(
            verblunsky_from_moments(&s),
            Err(Error::MomentOrderTooLarge { .. })
        ));
        // single atom: singular Toeplitz matrix from order 1 on
        let s = vec![ONE; 4];
        assert!(matches!(
            verblunsky_from_moments(&s),
            Err(Error::NotPositiveDefinite { index: 1 })
        ));
    }

    #[test]
    fn inverse_levinson_round_trip() {
        let g = VerblunskySequence::new(vec![c(0.3, -0.2), c(-0.5, 0.1), c(0.0, 0.7), c(0.2, 0.2)])
            .unwrap();
        let s = moments_from_verblunsky(&g, 1.0);
        let back = verblunsky_from_moments(&s).unwrap();
        for (a, b) in g.gammas().iter().zip(back.gammas()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn schur_cohn_inverts_recursion() {
        let g = VerblunskySequence::new(vec![c(0.3, -0.2), c(-0.5, 0.1), c(0.0, 0.7)]).unwrap();
        let (phi, _) = szego_top(&g);
        let back = verblunsky_from_polynomial(&phi).unwrap();
        for (a, b) in g.gammas().iter().zip(back.gammas()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn scalar_recursion_matches_polynomials() {
        let g = VerblunskySequence::new(vec![c(0.3, -0.2), c(-0.5, 0.1), c(0.0, 0.7)]).unwrap();
        let sys = szego_recursion(&g, 3).unwrap();
        let z = c(0.3, 0.9);
        let (p, s) = eval_orthonormal(g.gammas(), z);
        assert!((p - sys.phi(3).eval(z)).norm() < 1e-13);
        assert!((s - sys.phi_star(3).eval(z)).norm() < 1e-13);
        let (top, top_star) = szego_top(&g);
        assert_eq!(&top, sys.phi(3));
        assert_eq!(&top_star, sys.phi_star(3));
    }

    #[test]
    fn star_relation_holds() {
        let g = VerblunskySequence::new(vec![c(0.3, -0.2), c(-0.5, 0.1), c(0.1, 0.7)]).unwrap();
        let sys = szego_recursion(&g, 3).unwrap();
        for j in 0..=3 {
            let s = sys.phi(j).star(j).unwrap();
            for (a, b) in s.coeffs().iter().zip(sys.phi_star(j).coeffs()) {
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn bernstein_szego_basics() {
        let one = ComplexPolynomial::one();
        let mu = bernstein_szego_density(&one, 64).unwrap();
        assert_relative_eq!(mu.total_mass(), 1.0, epsilon = 1e-14);

        let r = 3f64.sqrt() / 2.0;
        let phi1 = ComplexPolynomial::from_real(&[-0.5 / r, 1.0 / r]);
        let s = bernstein_szego_moments(&phi1, 2).unwrap();
        assert_relative_eq!(s[0].re, 1.0, epsilon = 1e-11);
        assert_relative_eq!(s[1].re, 0.5, epsilon = 1e-11);
        let g = verblunsky_from_moments(&s[..2]).unwrap();
        assert_relative_eq!(g.gammas()[0].re, 0.5, epsilon = 1e-11);

        // zeros outside the disk are rejected
        let bad = ComplexPolynomial::from_real(&[1.0, 0.5]);
        assert!(bernstein_szego_density(&bad, 64).is_err());
        let on = ComplexPolynomial::from_real(&[-1.0, 1.0]);
        assert!(matches!(
            bernstein_szego_density(&on, 64),
            Err(Error::ZeroOnCircle { .. })
        ));
    }
}
