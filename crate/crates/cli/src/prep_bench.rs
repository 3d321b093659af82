use std::path::PathBuf;

use clap::Args;
use qcost::complexity::{crosscheck_measured, ComplexityTerm, Factor, Params, RatioTable};
use qcost::io::{load_target, Report};
use qcost::linalg::{self, rng_from_seed};
use qcost::prep::{dense_prep_count, prep_cost, random_target, synthesize_prep, PrepCost, PrepScheme, TargetState};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{json, Failure, Outcome, OutputArgs};

const FIDELITY_TOL: f64 = 1e-10;

#[derive(Debug, Args, Serialize)]
pub struct PrepBenchArgs {
    #[arg(long, default_value_t = 3)]
    min_qubits: usize,
    #[arg(long, default_value_t = 6)]
    max_qubits: usize,
    /// Benchmark this target instead of random dense ones.
    #[arg(long)]
    target: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

#[derive(Serialize)]
struct Point {
    n: usize,
    dim: usize,
    raw_ops: u64,
    elementary_count: u64,
    closed_form: Option<u64>,
    fidelity: f64,
    schemes: Vec<PrepCost>,
}

#[derive(Serialize)]
struct BenchReport {
    points: Vec<Point>,
    crosscheck: Option<RatioTable>,
}

#[derive(Serialize)]
struct CsvRow {
    n: usize,
    dim: usize,
    raw_ops: u64,
    elementary_count: u64,
    closed_form: Option<u64>,
    fidelity: f64,
    normalized_ratio: Option<f64>,
}

fn bench(target: &TargetState, dense: bool) -> Result<Point, Failure> {
    let circuit = synthesize_prep(target)?;
    let (state, ledger) = circuit.run_from_zero()?;
    let n = target.num_qubits();
    let dim = 1usize << n;
    let schemes = if dim >= 2 {
        PrepScheme::ALL
            .iter()
            .map(|&s| prep_cost(s, dim))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        Vec::new()
    };
    Ok(Point {
        n,
        dim,
        raw_ops: ledger.raw_ops,
        elementary_count: ledger.elementary_count,
        closed_form: dense.then(|| dense_prep_count(n)),
        fidelity: linalg::fidelity(state.amplitudes(), target.amplitudes()),
        schemes,
    })
}

pub fn run(a: &PrepBenchArgs) -> Result<Outcome, Failure> {
    let points: Vec<Point> = if let Some(path) = &a.target {
        vec![bench(&load_target(path)?, false)?]
    } else {
        if a.min_qubits == 0 || a.min_qubits > a.max_qubits || a.max_qubits > 16 {
            return Err(Failure::Invalid("need 1 <= min-qubits <= max-qubits <= 16".into()));
        }
        (a.min_qubits..=a.max_qubits)
            .into_par_iter()
            .map(|n| {
                let mut rng = rng_from_seed(a.seed.wrapping_add(n as u64));
                bench(&random_target(n, &mut rng), true)
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    let crosscheck = if points.len() >= 3 {
        let term = ComplexityTerm::monomial(1.0, &[(Factor::N, 1), (Factor::LogN, 2)]);
        let samples: Vec<(Params, u64)> = points
            .iter()
            .map(|p| (Params::default().with_n(p.dim as f64), p.elementary_count))
            .collect();
        Some(crosscheck_measured(&term, &samples)?)
    } else {
        None
    };
    let rows: Vec<CsvRow> = points
        .iter()
        .enumerate()
        .map(|(i, p)| CsvRow {
            n: p.n,
            dim: p.dim,
            raw_ops: p.raw_ops,
            elementary_count: p.elementary_count,
            closed_form: p.closed_form,
            fidelity: p.fidelity,
            normalized_ratio: crosscheck.as_ref().map(|c| c.rows[i].normalized),
        })
        .collect();
    let csv = qcost::io::csv_string(
        &["n", "dim", "raw_ops", "elementary_count", "closed_form", "fidelity", "normalized_ratio"],
        &rows,
    )?;
    let report = BenchReport { points, crosscheck };
    let mut outcome = Outcome::report(
        &a.output,
        "prep_bench",
        json(&Report::new("prep-bench", Some(a.seed), serde_json::to_value(a).unwrap_or_default(), &report))?,
        csv,
    );
    for p in &report.points {
        outcome.check(p.fidelity >= 1.0 - FIDELITY_TOL, || {
            format!("n = {}: fidelity {} < 1 - {FIDELITY_TOL:e}", p.n, p.fidelity)
        });
        if let Some(cf) = p.closed_form {
            outcome.check(p.elementary_count == cf, || {
                format!("n = {}: count {} differs from closed form {cf}", p.n, p.elementary_count)
            });
        }
    }
    if let Some(c) = &report.crosscheck {
        outcome.check(!c.alarm, || format!("count / N·log²(N) drifts by {:.3}x", c.drift));
    }
    Ok(outcome)
}
