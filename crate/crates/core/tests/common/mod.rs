#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use steklov_core::spectral::TrigPolynomial;
use steklov_core::{ComplexPolynomial, VerblunskySequence};

pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Roots from the eigenvalues of the companion matrix.
pub fn roots(p: &ComplexPolynomial) -> Vec<Complex64> {
    let c = p.coeffs();
    let n = p.degree();
    let lead = c[n];
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = ONE;
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    m.schur().eigenvalues().expect("complex Schur form is triangular").iter().copied().collect()
}

pub fn from_roots(rs: &[Complex64], lead: Complex64) -> ComplexPolynomial {
    let mut p = ComplexPolynomial::constant(lead);
    for r in rs {
        p = &p * &ComplexPolynomial::new(vec![-r, ONE]);
    }
    p
}

pub fn random_in_disk<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..2.0 * std::f64::consts::PI))
}

pub fn random_sequence<R: Rng>(rng: &mut R, n: usize, radius: f64) -> VerblunskySequence {
    VerblunskySequence::new((0..n).map(|_| random_in_disk(rng, radius)).collect()).unwrap()
}

/// Hermitian Toeplitz Gram matrix `G_{ab} = ⟨z^a, z^b⟩ = s_{a−b}` of size `k`.
pub fn gram(s: &[Complex64], k: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(k, k, |a, b| if a >= b { s[a - b] } else { s[b - a].conj() })
}

/// Monic `Φ_n` by solving the normal equations `⟨Φ_n, z^b⟩ = 0`, `b < n`.
pub fn monic_by_gram_schmidt(s: &[Complex64], n: usize) -> ComplexPolynomial {
    if n == 0 {
        return ComplexPolynomial::one();
    }
    // Σ_k c_k ⟨z^k, z^b⟩ = −⟨z^n, z^b⟩
    let g = gram(s, n).transpose();
    let rhs = DVector::from_fn(n, |b, _| -s[n - b]);
    let c = g.lu().solve(&rhs).expect("positive definite Gram matrix");
    let mut coeffs: Vec<Complex64> = c.iter().copied().collect();
    coeffs.push(ONE);
    ComplexPolynomial::new(coeffs)
}

pub fn random_positive_even<R: Rng>(rng: &mut R, m: usize) -> TrigPolynomial {
    let mut a: Vec<f64> = (0..=m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    a[0] = 2.0 * a[1..].iter().map(|x| x.abs()).sum::<f64>() + rng.gen_range(0.1..1.0);
    TrigPolynomial::from_even(&a)
}

/// `Σ c_k T_k(x)` and its derivative by the three-term recurrences.
fn chebyshev_eval(c: &[f64], x: Complex64) -> (Complex64, Complex64) {
    let (mut t0, mut t1) = (ONE, x);
    let (mut d0, mut d1) = (Complex64::new(0.0, 0.0), ONE);
    let mut p = c[0] * t0;
    let mut dp = Complex64::new(0.0, 0.0);
    for &ck in &c[1..] {
        p += ck * t1;
        dp += ck * d1;
        let t2 = 2.0 * x * t1 - t0;
        let d2 = 2.0 * t1 + 2.0 * x * d1 - d0;
        (t0, t1, d0, d1) = (t1, t2, d1, d2);
    }
    (p, dp)
}

/// All zeros of `Σ c_k T_k` by Aberth–Ehrlich iteration from an ellipse
/// around `[−1, 1]`.
pub fn chebyshev_roots(c: &[f64]) -> Vec<Complex64> {
    let m = c.len() - 1;
    let mut x: Vec<Complex64> = (0..m)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / m as f64;
            Complex64::new(1.2 * t.cos(), 0.6 * t.sin())
        })
        .collect();
    for _ in 0..1000 {
        let mut moved: f64 = 0.0;
        for k in 0..m {
            let (p, dp) = chebyshev_eval(c, x[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..m).filter(|&j| j != k).map(|j| (x[k] - x[j]).inv()).sum();
            let step = ratio / (ONE - ratio * repulsion);
            x[k] -= step;
            moved = moved.max(step.norm() / x[k].norm().max(1.0));
        }
        if moved < 1e-15 {
            break;
        }
    }
    x
}

/// `λ Π(1 − z/r_k)`, kept in product form: expanding it into coefficients is
/// badly conditioned once many roots crowd the circle.
pub struct RootFactor {
    pub inv_roots: Vec<Complex64>,
    pub scale: f64,
}

impl RootFactor {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.inv_roots.iter().fold(Complex64::new(self.scale, 0.0), |acc, s| acc * (ONE - z * s))
    }
}

/// Outer factor of an even `w(θ) = a_0 + 2Σ a_k cos kθ` by root finding in
/// `x = cos θ`: Aberth iteration gives the zeros `x_k` of
/// `a_0 + 2Σ a_k T_k(x)`; each lifts to the pair `z + 1/z = 2x_k`,
/// whose member outside the disk enters `Π(1 − z/r_k)`. Then `Q(0) > 0` and
/// `|Q(1)|² = w(0)` fix the constant.
pub fn root_oracle(w: &TrigPolynomial) -> RootFactor {
    assert!(w.is_even());
    let c: Vec<f64> = w
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, ck)| if k == 0 { ck.re } else { 2.0 * ck.re })
        .collect();
    let xs = chebyshev_roots(&c);
    let inv_roots: Vec<Complex64> = xs
        .into_iter()
        .map(|x| {
            let s = (x * x - 1.0).sqrt();
            let z = if (x + s).norm() > (x - s).norm() { x + s } else { x - s };
            z.inv()
        })
        .collect();
    let mut f = RootFactor { inv_roots, scale: 1.0 };
    f.scale = w.eval(0.0).sqrt() / f.eval(ONE).norm();
    f
}

/// Newton polish of an approximate root.
pub fn polish(p: &ComplexPolynomial, mut z: Complex64) -> Complex64 {
    for _ in 0..4 {
        let (v, d) = p.eval_with_derivative(z);
        if d.norm() == 0.0 {
            break;
        }
        z -= v / d;
    }
    z
}

/// Largest `|Q − Q_oracle|/|Q|` over points on the circle and on `|z| = 1/2`.
pub fn root_oracle_deviation(q: &ComplexPolynomial, w: &TrigPolynomial) -> f64 {
    let oracle = root_oracle(w);
    let mut worst: f64 = 0.0;
    for r in [1.0, 0.5] {
        for j in 0..512 {
            let z = Complex64::from_polar(r, 2.0 * std::f64::consts::PI * j as f64 / 512.0);
            let v = q.eval(z);
            worst = worst.max((v - oracle.eval(z)).norm() / v.norm());
        }
    }
    worst
}
