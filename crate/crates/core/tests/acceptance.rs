//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! fails. Bands marked "frozen" were recorded on the first run and are
//! regression locks, not theoretical constants.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use steklov_core::approximants::{verify_appendix_a, AppendixLemma, UPSILON};
use steklov_core::construction::{
    build_q, concatenated_measure_check, lower_bound_witness, ConstructionParams, Witness,
};
use steklov_core::entropy::entropy_scaling_report;
use steklov_core::extremal::{phi_at_one, phi_at_one_sq, random_steklov_measure, small_delta_measure, upper_bound};
use steklov_core::measures::{geronimus_insert, insertion_derivatives};
use steklov_core::opuc::{moments_from_verblunsky, szego_recursion, verblunsky_from_moments};
use steklov_core::spectral::{factor_residual, fejer_riesz, verify_phase_bound};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(t: Duration, limit: Duration) -> bool {
    t <= limit
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for delta in [0.1, 0.5] {
        for _ in 0..100 {
            let mu = random_steklov_measure(&mut rng, delta, 512).unwrap();
            let n = rng.gen_range(1..=64);
            let ratio = phi_at_one(&mu, n).unwrap() / upper_bound(n, delta);
            worst = worst.max(ratio);
            if ratio > 1.0 {
                violations += 1;
            }
        }
    }
    let t = start.elapsed();
    outcome(
        violations == 0 && within(t, Duration::from_secs(60)),
        format!("200 measures, {violations} violations, max |φ_n(1)|/bound = {worst:.4}"),
    )
}

fn criterion_2() -> Outcome {
    let (n, delta, mass) = (8, 1e-3, 1e6);
    let s = small_delta_measure(n, delta, mass).unwrap();
    let ratio = s.phi_at_one / upper_bound(n, delta);
    // the moment route at m = 10⁶ is limited by conditioning ~ nm/δ
    let pipeline = phi_at_one(&s.measure, n).unwrap();
    let cond_dev = (pipeline / s.phi_at_one - 1.0).abs();
    let cond_ok = cond_dev < 1e3 * f64::EPSILON * n as f64 * mass / delta;
    let mut worst: f64 = 0.0;
    for n in 1..=32 {
        for (delta, mass) in [(0.5, 0.1), (0.1, 0.5), (1e-2, 1.0), (1e-3, 0.1)] {
            let s = small_delta_measure(n, delta, mass).unwrap();
            let v = phi_at_one(&s.measure, n).unwrap();
            worst = worst.max((v / s.phi_at_one - 1.0).abs());
        }
    }
    outcome(
        (0.999..=1.0).contains(&ratio) && worst < 1e-8 && cond_ok,
        format!(
            "ratio = {ratio:.12}; closed form vs pipeline (n ≤ 32) max rel dev {worst:.1e}; at m = 1e6 dev {cond_dev:.1e}"
        ),
    )
}

const CONSTRUCTION_NS: [usize; 5] = [128, 256, 512, 1024, 2048];
/// Frozen band for `|φ_n*(1)|/√n`.
const RATIO_BAND: (f64, f64) = (0.65, 0.76);

fn criterion_3(cache: &mut Vec<Witness>) -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut lines = Vec::new();
    for n in CONSTRUCTION_NS {
        let w = match lower_bound_witness(&ConstructionParams::with_n(n), None) {
            Ok(w) => w,
            Err(e) => return outcome(false, format!("n={n}: {e}")),
        };
        let r = &w.report;
        let ratio = r.condition3.ratio;
        let pass = r.all_pass()
            && (RATIO_BAND.0..=RATIO_BAND.1).contains(&ratio)
            && (w.sigma.total_mass - 1.0).abs() < 1e-3
            && w.sigma.min_scaled_density >= w.delta
            && w.delta >= 1e-4;
        ok &= pass;
        lines.push(format!(
            "n={n}: ratio {ratio:.4}, δ {:.2e}, min 2πσ' {:.2e}, mass-1 {:.0e}",
            w.delta,
            w.sigma.min_scaled_density,
            w.sigma.total_mass - 1.0
        ));
        cache.push(w);
    }
    let t = start.elapsed();
    ok &= within(t, Duration::from_secs(300));
    outcome(ok, lines.join("; "))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_orth: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.gen_range(1..=64);
        let seq = random_sequence(&mut rng, n, 0.6);
        let t = rng.gen_range(0.01..0.99);
        let sys = szego_recursion(&seq, n).unwrap();
        let s: Vec<Complex64> = moments_from_verblunsky(&seq, 1.0)
            .into_iter()
            .map(|sj| (1.0 - t) * sj + t)
            .collect();
        let c = geronimus_insert(&sys.monic(n), &sys, t).unwrap().coeffs().to_vec();
        let inner = |j: usize| -> Complex64 {
            c.iter()
                .enumerate()
                .map(|(k, ck)| ck * if k >= j { s[k - j] } else { s[j - k].conj() })
                .sum()
        };
        let norm = (0..=n).map(|j| (c[j].conj() * inner(j)).re).sum::<f64>().sqrt();
        for j in 0..n {
            worst_orth = worst_orth.max(inner(j).norm() / norm.max(1.0));
        }
    }
    let mut worst_fd: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.gen_range(1..=32);
        let seq = random_sequence(&mut rng, n, 0.7);
        let sys = szego_recursion(&seq, n).unwrap();
        let (d_monic, d_phi) = insertion_derivatives(&sys, n).unwrap();
        let s = moments_from_verblunsky(&seq, 1.0);
        let at = |t: f64| -> (f64, f64) {
            let st: Vec<Complex64> = s.iter().map(|sj| (1.0 - t) * sj + t).collect();
            let g = verblunsky_from_moments(&st).unwrap();
            let monic = szego_recursion(&g, n).unwrap().monic(n).eval(ONE).norm_sqr();
            (monic, phi_at_one_sq(&st).unwrap())
        };
        let (m0, p0) = at(0.0);
        let forward = |h: f64| {
            let ((m1, p1), (m2, p2)) = (at(h), at(2.0 * h));
            ((4.0 * m1 - m2 - 3.0 * m0) / (2.0 * h), (4.0 * p1 - p2 - 3.0 * p0) / (2.0 * h))
        };
        let h = 1e-3 / (1.0 + sys.cd_kernel(n, ONE, ONE).unwrap().re);
        let (a1, b1) = forward(h);
        let (a2, b2) = forward(h / 2.0);
        let rel = |fd: f64, exact: f64, scale: f64| (fd - exact).abs() / exact.abs().max(1e-8 * scale);
        worst_fd = worst_fd
            .max(rel((4.0 * a2 - a1) / 3.0, d_monic, m0))
            .max(rel((4.0 * b2 - b1) / 3.0, d_phi, p0));
    }
    outcome(
        worst_orth < 1e-8 && worst_fd < 1e-4,
        format!("orthogonality residual {worst_orth:.1e}; derivative vs finite differences {worst_fd:.1e}"),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut worst_res, mut worst_oracle): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let m = rng.gen_range(1..=128);
        let w = random_positive_even(&mut rng, m);
        let q = fejer_riesz(&w).unwrap();
        worst_res = worst_res.max(factor_residual(&q, &w, 16 * (m + 1).next_power_of_two()));
        worst_oracle = worst_oracle.max(root_oracle_deviation(&q, &w));
    }
    let mut worst_root: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=14);
        let rs: Vec<Complex64> = (0..n).map(|_| random_in_disk(&mut rng, 0.95)).collect();
        let lead = Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..6.0));
        let p = from_roots(&rs, lead);
        let sum = &p + &p.star(n).unwrap();
        for r in roots(&sum) {
            worst_root = worst_root.max((polish(&sum, r).norm() - 1.0).abs());
        }
    }
    outcome(
        worst_res < 1e-8 && worst_oracle < 1e-8 && worst_root < 1e-8,
        format!("residual {worst_res:.1e}; root oracle {worst_oracle:.1e}; ||z|-1| of P+P* zeros {worst_root:.1e}"),
    )
}

/// Frozen `[min, max]` of each ratio over `n ∈ {64..512}` and admissible β.
fn appendix_a_bands() -> BTreeMap<&'static str, (f64, f64)> {
    let observed = [
        ("der-der", 1.3144e-2, 8.5682e-1),
        ("derider_b1", 1.6665e-1, 1.1097),
        ("derider_b2", 1.4214e-1, 9.0514e-1),
        ("poly1_im_inner", 3.2962e-1, 8.2730e-1),
        ("poly1_im_outer", 1.3144e-2, 9.4442e-1),
        ("poly1_re", 4.4637e-1, 1.0090),
        ("poly2_im_inner", 2.5723e-1, 3.0804e-1),
        ("poly2_im_outer", 5.4606e-4, 7.4747e-1),
        ("poly2_re", 7.2866e-1, 1.3556),
        ("trifle_cos", 6.3246e-2, 3.9274),
        ("trifle_sin", 4.6725e-6, 1.8469),
    ];
    observed.into_iter().map(|(k, lo, hi)| (k, (0.9 * lo, 1.1 * hi))).collect()
}

fn criterion_6() -> Outcome {
    let bands = appendix_a_bands();
    let mut failures = Vec::new();
    let mut rows = 0;
    for lemma in AppendixLemma::ALL {
        for n in [64, 128, 256, 512] {
            for beta in [0.3, 0.375, 0.5, 0.75] {
                if !lemma.admits(beta) {
                    continue;
                }
                for r in verify_appendix_a(lemma, n, beta, 400).unwrap().rows {
                    rows += 1;
                    // every ratio is of a positive quantity, so signs are exact checks
                    let sign_ok = r.ratio_min > 0.0;
                    let (lo, hi) = bands[r.lemma.as_str()];
                    if !sign_ok || r.ratio_min < lo || r.ratio_max > hi {
                        failures.push(format!("{} n={} β={}: [{:.3e}, {:.3e}]", r.lemma, n, beta, r.ratio_min, r.ratio_max));
                    }
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{rows} rows: signs hold, ratios inside frozen bands")
        } else {
            failures.join("; ")
        },
    )
}

/// Frozen bound on `max_{|θ|<υ} |φ'(θ)|/m`.
const PHASE_BOUND: f64 = 0.3;

fn criterion_7() -> Outcome {
    let vals: Vec<(usize, f64)> = [32, 64, 128, 256]
        .iter()
        .map(|&m| (m, verify_phase_bound(&build_q(m, 0.75).unwrap(), m, UPSILON)))
        .collect();
    let bounded = vals.iter().all(|v| v.1 <= PHASE_BOUND);
    let nonincreasing = vals.windows(2).all(|w| w[1].1 <= w[0].1);
    let list: Vec<String> = vals.iter().map(|(m, v)| format!("m={m}: {v:.4}")).collect();
    outcome(
        bounded && nonincreasing,
        format!(
            "{}; bounded by {PHASE_BOUND}: {bounded}; nonincreasing: {nonincreasing}",
            list.join(", ")
        ),
    )
}

/// Frozen band for the slope of the `Ω_n(S_δ)` estimate against `log n`.
const ENTROPY_SLOPE_BAND: (f64, f64) = (0.45, 0.53);

fn criterion_8() -> Outcome {
    let report = entropy_scaling_report(&CONSTRUCTION_NS, None, &ConstructionParams::default()).unwrap();
    let slope = report.fit.slope;
    // ‖φ_n‖_∞ ≤ √((n+1)/δ) on all of S_δ
    let c = 0.5 * (2.0 / report.delta).ln();
    let envelope_ok = report.rows.iter().all(|r| {
        r.entropy <= r.envelope
            && r.envelope - 0.5 * r.log_n <= c
            && r.construction_envelope - 0.5 * r.log_n <= c
    });
    outcome(
        slope > 0.0 && (ENTROPY_SLOPE_BAND.0..=ENTROPY_SLOPE_BAND.1).contains(&slope) && envelope_ok,
        format!(
            "δ = {:.0e}: slope {slope:.4} (rms {:.1e}); envelope slope {:.4}; log‖φ_n‖_∞ ≤ ½log n + {c:.2}: {envelope_ok}; constructed σ alone: slope {:.4}",
            report.delta, report.fit.residual, report.envelope_fit.slope, report.construction_fit.slope
        ),
    )
}

fn criterion_9(cache: &[Witness]) -> Outcome {
    let Some(w) = cache.iter().find(|w| w.output.n() == 128) else {
        return outcome(false, "no n = 128 construction".into());
    };
    let devs: Vec<f64> = [1, 2, 4]
        .iter()
        .map(|k| concatenated_measure_check(&w.output, k * 128).unwrap())
        .collect();
    let decreasing = devs.windows(2).all(|d| d[1] < d[0]);
    outcome(
        devs[2] < 0.05 && decreasing,
        format!("tail n, 2n, 4n: {:.2e}, {:.2e}, {:.2e}", devs[0], devs[1], devs[2]),
    )
}

fn run<F: FnOnce() -> Outcome>(id: usize, f: F) -> bool {
    let start = Instant::now();
    let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        outcome(false, format!("panicked: {msg}"))
    });
    println!(
        "criterion {id}: {} ({:.2?}) {}",
        if out.pass { "PASS" } else { "FAIL" },
        start.elapsed(),
        out.detail
    );
    out.pass
}

fn main() {
    let mut cache = Vec::new();
    let results = [
        run(1, criterion_1),
        run(2, criterion_2),
        run(3, || criterion_3(&mut cache)),
        run(4, criterion_4),
        run(5, criterion_5),
        run(6, criterion_6),
        run(7, criterion_7),
        run(8, criterion_8),
        run(9, || criterion_9(&cache)),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
