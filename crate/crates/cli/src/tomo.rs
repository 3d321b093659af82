use std::path::PathBuf;

use clap::{ArgGroup, Args};
use qcost::io::{load_target, Report};
use qcost::linalg::{random_state, rng_from_seed};
use qcost::tomography::{
    sample_bound, uniform_copies_bound, verify_coverage_probs, Coverage, SampleBudget, TomographyPlan,
};
use serde::Serialize;

use crate::output::{json, Failure, Outcome, OutputArgs};

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("input").required(true).args(["uniform_n", "state", "random_qubits"])))]
pub struct TomoArgs {
    /// N equal branches, each with probability p/N.
    #[arg(long)]
    uniform_n: Option<usize>,
    /// Success probability p of the uniform case.
    #[arg(long, default_value_t = 1.0, requires = "uniform_n")]
    p: f64,
    /// Target state file (CSV with `re,im` header or JSON pairs).
    #[arg(long)]
    state: Option<PathBuf>,
    /// Random dense state on this many qubits, drawn from the seed.
    #[arg(long)]
    random_qubits: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    /// Monte Carlo trials for the coverage check (0 skips it).
    #[arg(long, default_value_t = 200)]
    trials: usize,
    /// Divide every budget by this factor before the coverage check.
    #[arg(long, default_value_t = 1)]
    underfund: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also emit the uniform-case copies bound over the sweep grid.
    #[arg(long)]
    sweep: bool,
    #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.1, 0.2])]
    sweep_deltas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.05, 0.1])]
    sweep_epsilons: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [2, 4, 8, 16, 32, 64])]
    sweep_ns: Vec<usize>,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

#[derive(Serialize)]
struct TomoReport {
    plan: TomographyPlan,
    outcomes: Vec<usize>,
    budget: SampleBudget,
    coverage: Option<Coverage>,
    sweep: Vec<SweepRow>,
}

#[derive(Serialize)]
struct CsvRow {
    outcome: usize,
    p: f64,
    budget: u64,
    budget_used: Option<u64>,
    coverage: Option<f64>,
    threshold: Option<f64>,
    pass: Option<bool>,
}

#[derive(Debug, Serialize)]
struct SweepRow {
    delta: f64,
    epsilon: f64,
    n: usize,
    m: u64,
}

/// Full outcome distribution and the tracked (nonzero) outcomes.
fn distribution(a: &TomoArgs) -> Result<(Vec<f64>, Vec<usize>), Failure> {
    let probs = if let Some(n) = a.uniform_n {
        if n == 0 || !(a.p > 0.0 && a.p <= 1.0) {
            return Err(Failure::Invalid("need N >= 1 and p in (0, 1]".into()));
        }
        let mut probs = vec![a.p / n as f64; n];
        if a.p < 1.0 {
            // the failed-herald outcome is sampled but not estimated
            probs.push(1.0 - a.p);
        }
        let tracked = (0..n).collect();
        return Ok((probs, tracked));
    } else if let Some(path) = &a.state {
        load_target(path)?.amplitudes().iter().map(|z| z.norm_sqr()).collect()
    } else {
        let n = a.random_qubits.expect("clap enforces one input");
        if !(1..=16).contains(&n) {
            return Err(Failure::Invalid(format!("random state width {n} outside 1..=16")));
        }
        let mut rng = rng_from_seed(a.seed);
        random_state(1 << n, &mut rng).iter().map(|z| z.norm_sqr()).collect::<Vec<f64>>()
    };
    let tracked = (0..probs.len()).filter(|&i| probs[i] > 0.0).collect();
    Ok((probs, tracked))
}

pub fn run(a: &TomoArgs) -> Result<Outcome, Failure> {
    if a.underfund == 0 {
        return Err(Failure::Invalid("--underfund must be at least 1".into()));
    }
    let (probs, outcomes) = distribution(a)?;
    let plan = TomographyPlan::new(a.delta, a.epsilon, outcomes.iter().map(|&i| probs[i]).collect())?;
    let budget = sample_bound(&plan);
    let coverage = if a.trials > 0 {
        let budgets: Vec<u64> = budget.per_outcome.iter().map(|m| (m / a.underfund).max(1)).collect();
        Some(verify_coverage_probs(&probs, &outcomes, &budgets, a.delta, a.epsilon, a.trials, a.seed)?)
    } else {
        None
    };
    let mut sweep = Vec::new();
    if a.sweep {
        for &delta in &a.sweep_deltas {
            for &epsilon in &a.sweep_epsilons {
                for &n in &a.sweep_ns {
                    // validates the grid point
                    TomographyPlan::uniform(n.max(1), 1.0, delta, epsilon)?;
                    sweep.push(SweepRow {
                        delta,
                        epsilon,
                        n,
                        m: uniform_copies_bound(n, 1.0, delta, epsilon),
                    });
                }
            }
        }
    }
    let rows: Vec<CsvRow> = outcomes
        .iter()
        .enumerate()
        .map(|(i, &o)| CsvRow {
            outcome: o,
            p: plan.probs[i],
            budget: budget.per_outcome[i],
            budget_used: coverage.as_ref().map(|c| c.budgets[i]),
            coverage: coverage.as_ref().map(|c| c.per_outcome[i]),
            threshold: coverage.as_ref().map(|c| c.threshold),
            pass: coverage.as_ref().map(|c| c.per_outcome[i] >= c.threshold),
        })
        .collect();
    let csv = qcost::io::csv_string(&["outcome", "p", "budget", "budget_used", "coverage", "threshold", "pass"], &rows)?;
    let sweep_csv = a
        .sweep
        .then(|| qcost::io::csv_string(&["delta", "epsilon", "n", "m"], &sweep))
        .transpose()?;
    let report = TomoReport {
        plan,
        outcomes,
        budget,
        coverage,
        sweep,
    };
    let mut outcome = Outcome::report(
        &a.output,
        "tomo",
        json(&Report::new("tomo", Some(a.seed), serde_json::to_value(a).unwrap_or_default(), &report))?,
        csv,
    );
    if let Some(s) = sweep_csv {
        outcome.files.push(("tomo_sweep.csv".into(), s));
    }
    if let Some(c) = &report.coverage {
        if !c.pass {
            let worst = c.per_outcome.iter().copied().fold(f64::INFINITY, f64::min);
            outcome.statistical.push(format!(
                "coverage {worst} below threshold {} over {} trials",
                c.threshold, c.trials
            ));
        }
    }
    Ok(outcome)
}
