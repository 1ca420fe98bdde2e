use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use steklov_core::approximants::{verify_appendix_a, AppendixLemma, BoundReport, UPSILON};
use steklov_core::construction::{build_q, lower_bound_witness, ConstructionParams, Witness};
use steklov_core::entropy::entropy_scaling_report;
use steklov_core::extremal::{phi_at_one, search_extremal, small_delta_measure, upper_bound, SearchOptions};
use steklov_core::spectral::verify_phase_bound;

use crate::config::RunConfig;
use crate::{CliError, Output};

/// JSON document wrapping a result with the configuration that produced it.
#[derive(Serialize)]
struct Report<'a, A: Serialize, T: Serialize> {
    command: &'a str,
    config: &'a RunConfig,
    args: &'a A,
    result: T,
}

fn report<A: Serialize, T: Serialize>(command: &str, cfg: &RunConfig, args: &A, result: T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(&Report {
        command,
        config: cfg,
        args,
        result,
    })
    .map_err(|e| CliError::Other(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_string<F: FnOnce(&mut Vec<u8>) -> steklov_core::Result<()>>(f: F) -> Result<String, CliError> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    String::from_utf8(buf).map_err(|e| CliError::Other(e.to_string()))
}

fn params_for(cfg: &RunConfig, n: usize) -> Result<ConstructionParams, CliError> {
    let p = ConstructionParams { n, ..cfg.params };
    p.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(p)
}

#[derive(Debug, Serialize)]
pub struct ConstructArgs {
    pub n: usize,
    pub delta: Option<f64>,
}

pub fn construct(cfg: &RunConfig, args: &ConstructArgs, out: &mut Output) -> Result<(), CliError> {
    let p = params_for(cfg, args.n)?;
    let w = lower_bound_witness(&p, args.delta)?;
    out.primary(&format!("construct_n{}.json", args.n), &report("construct", cfg, args, w.summary())?)?;
    let sigma = csv_string(|b| w.sigma.measure.write_density_csv(b))?;
    out.artifact(&format!("sigma_n{}.csv", args.n), &sigma)?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct SweepArgs {
    pub ns: Vec<usize>,
    pub delta: Option<f64>,
}

#[derive(Serialize)]
struct SweepRow {
    n: usize,
    m: usize,
    value: f64,
    value_over_sqrt_n: f64,
    delta: f64,
    c1: f64,
    min_scaled_density: f64,
    total_mass: f64,
    all_pass: bool,
}

pub fn sweep(cfg: &RunConfig, args: &SweepArgs, out: &mut Output) -> Result<(), CliError> {
    let params: Vec<ConstructionParams> = args.ns.iter().map(|&n| params_for(cfg, n)).collect::<Result<_, _>>()?;
    let witnesses: Vec<Witness> = params
        .par_iter()
        .map(|p| lower_bound_witness(p, args.delta))
        .collect::<Result<_, _>>()?;
    let rows: Vec<SweepRow> = witnesses
        .iter()
        .map(|w| SweepRow {
            n: w.output.n(),
            m: w.output.m,
            value: w.value,
            value_over_sqrt_n: w.value / (w.output.n() as f64).sqrt(),
            delta: w.delta,
            c1: w.report.condition4.c1,
            min_scaled_density: w.sigma.min_scaled_density,
            total_mass: w.sigma.total_mass,
            all_pass: w.report.all_pass(),
        })
        .collect();
    let csv = csv_string(|b| {
        let mut wr = csv::Writer::from_writer(b);
        for r in &rows {
            wr.serialize(r)?;
        }
        wr.flush()?;
        Ok(())
    })?;
    out.primary("sweep.csv", &csv)?;
    out.artifact("sweep.json", &report("sweep", cfg, args, &rows)?)?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct BoundsArgs {
    pub ns: Vec<usize>,
    pub delta: f64,
    pub mass: f64,
}

#[derive(Serialize)]
struct BoundsRow {
    n: usize,
    delta: f64,
    mass: f64,
    upper_bound: f64,
    closed_form: f64,
    pipeline: f64,
    ratio: f64,
}

pub fn bounds(cfg: &RunConfig, args: &BoundsArgs, out: &mut Output) -> Result<(), CliError> {
    let rows: Vec<BoundsRow> = args
        .ns
        .iter()
        .map(|&n| {
            let s = small_delta_measure(n, args.delta, args.mass)?;
            let ub = upper_bound(n, args.delta);
            Ok(BoundsRow {
                n,
                delta: args.delta,
                mass: args.mass,
                upper_bound: ub,
                closed_form: s.phi_at_one,
                pipeline: phi_at_one(&s.measure, n)?,
                ratio: s.phi_at_one / ub,
            })
        })
        .collect::<Result<_, CliError>>()?;
    let csv = csv_string(|b| {
        let mut wr = csv::Writer::from_writer(b);
        for r in &rows {
            wr.serialize(r)?;
        }
        wr.flush()?;
        Ok(())
    })?;
    out.primary("bounds.csv", &csv)?;
    out.artifact("bounds.json", &report("bounds", cfg, args, &rows)?)?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct SearchArgs {
    pub n: usize,
    pub delta: f64,
    pub atoms: usize,
    pub iters: usize,
    pub restarts: usize,
}

pub fn search(cfg: &RunConfig, args: &SearchArgs, out: &mut Output) -> Result<(), CliError> {
    let r = search_extremal(
        args.n,
        args.delta,
        args.atoms,
        args.iters,
        SearchOptions {
            restarts: args.restarts,
            seed: cfg.seed,
        },
    )?;
    out.primary(&format!("search_n{}.json", args.n), &report("search", cfg, args, r)?)
}

#[derive(Debug, Serialize)]
pub struct EntropyArgs {
    pub ns: Vec<usize>,
    pub delta: Option<f64>,
}

pub fn entropy(cfg: &RunConfig, args: &EntropyArgs, out: &mut Output) -> Result<(), CliError> {
    for &n in &args.ns {
        params_for(cfg, n)?;
    }
    let r = entropy_scaling_report(&args.ns, args.delta, &cfg.params)?;
    let csv = csv_string(|b| r.write_csv(b))?;
    out.primary("entropy.csv", &csv)?;
    out.artifact("entropy.json", &report("entropy", cfg, args, &r)?)?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct AppendixArgs {
    pub ns: Vec<usize>,
    pub betas: Vec<f64>,
    pub ms: Vec<usize>,
}

#[derive(Serialize)]
struct PhaseRow {
    m: usize,
    upsilon: f64,
    max_phase_derivative_over_m: f64,
}

pub fn appendix(cfg: &RunConfig, args: &AppendixArgs, out: &mut Output) -> Result<(), CliError> {
    let mut a = BoundReport::default();
    for lemma in AppendixLemma::ALL {
        for &n in &args.ns {
            for &beta in &args.betas {
                if lemma.admits(beta) {
                    a.extend(verify_appendix_a(lemma, n, beta, 400)?);
                }
            }
        }
    }
    let b: Vec<PhaseRow> = args
        .ms
        .par_iter()
        .map(|&m| {
            Ok(PhaseRow {
                m,
                upsilon: UPSILON,
                max_phase_derivative_over_m: verify_phase_bound(&build_q(m, cfg.params.alpha)?, m, UPSILON),
            })
        })
        .collect::<Result<_, CliError>>()?;
    out.primary("appendix_a.csv", &csv_string(|w| a.write_csv(w))?)?;
    let csv_b = csv_string(|w| {
        let mut wr = csv::Writer::from_writer(w);
        for r in &b {
            wr.serialize(r)?;
        }
        wr.flush()?;
        Ok(())
    })?;
    out.primary("appendix_b.csv", &csv_b)?;
    #[derive(Serialize)]
    struct Both<'a> {
        a: &'a BoundReport,
        b: &'a [PhaseRow],
    }
    out.artifact("appendix.json", &report("appendix", cfg, args, Both { a: &a, b: &b })?)?;
    Ok(())
}

/// Writes `text` to stdout (used when no output directory is given).
pub fn to_stdout(text: &str) -> Result<(), CliError> {
    std::io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| CliError::Other(e.to_string()))
}
