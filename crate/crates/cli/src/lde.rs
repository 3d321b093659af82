use std::path::PathBuf;

use clap::{ArgGroup, Args, ValueEnum};
use qcost::complexity::{lde_algo_term, Estimate};
use qcost::io::{load_lde_problem, Report};
use qcost::lde::{self, LdeProblem, LdeResult, ScalingReport, TaylorCoefficients};
use qcost::linalg::{self, c};
use serde::Serialize;

use crate::output::{json, Failure, Outcome, OutputArgs};

const ORACLE_FIDELITY: f64 = 1e-10;
const PROB_TOL: f64 = 1e-10;
const PAULI_X_EXACT_FIDELITY: f64 = 1e-8;
const SLOPE_TOL: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LdeDemo {
    /// `M = 0.5 X`, `t = 1`, `x0 = |0⟩`.
    PauliX,
    /// Herald probability of the discretized heat equation versus N.
    DiffusionScaling,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("input").required(true).args(["demo", "problem"])))]
pub struct LdeArgs {
    #[arg(long, value_enum)]
    demo: Option<LdeDemo>,
    /// Problem JSON: {"M", "b", "x0", "t", "k"}.
    #[arg(long)]
    problem: Option<PathBuf>,
    /// Taylor order; overrides the problem file. Demo defaults: 8 for
    /// pauli-x, 2 for diffusion-scaling.
    #[arg(long)]
    k: Option<usize>,
    /// Evolution time; overrides the problem file (diffusion default 0.05).
    #[arg(long)]
    t: Option<f64>,
    /// Seed for the Gram-Schmidt completion columns.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Diffusion sizes N.
    #[arg(long, value_delimiter = ',', default_values_t = lde::DIFFUSION_DEFAULT_NS)]
    sizes: Vec<usize>,
    /// Relative precision for the copies bound of the diffusion study.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

#[derive(Serialize)]
struct ProblemSummary {
    dim: usize,
    k: usize,
    t: f64,
    norm_m: f64,
    index_qubits: usize,
    total_qubits: usize,
}

#[derive(Serialize)]
struct RunReport {
    problem: ProblemSummary,
    taylor: TaylorCoefficients,
    run: LdeResult,
    fidelity_vs_exact: f64,
    truncation_error: f64,
    truncation_bound: f64,
    evolution_count: u64,
    algo_estimate: Estimate,
}

#[derive(Serialize)]
struct CsvRow {
    k: usize,
    success_prob: f64,
    expected_success_prob: f64,
    fidelity_vs_oracle: f64,
    fidelity_vs_exact: f64,
}

#[derive(Serialize)]
struct ScalingRow {
    n: usize,
    p: f64,
    copies: f64,
    p_slope: f64,
    copies_slope: f64,
}

pub fn run(a: &LdeArgs) -> Result<Outcome, Failure> {
    match a.demo {
        Some(LdeDemo::DiffusionScaling) => diffusion(a),
        Some(LdeDemo::PauliX) => {
            let mut p = lde::pauli_x_problem(a.k.unwrap_or(8));
            if let Some(t) = a.t {
                p.t = t;
            }
            p.validate()?;
            single(a, p, true)
        }
        None => {
            let path = a.problem.as_ref().expect("clap enforces demo or problem");
            let mut p = load_lde_problem(path)?;
            if let Some(k) = a.k {
                p.k = k;
            }
            if let Some(t) = a.t {
                p.t = t;
            }
            p.validate()?;
            single(a, p, false)
        }
    }
}

fn single(a: &LdeArgs, p: LdeProblem, pauli_x: bool) -> Result<Outcome, Failure> {
    let taylor = lde::taylor_coeffs(&p)?;
    let result = lde::run(&p, a.seed)?;
    let exact = lde::classical_exact(&p);
    let diff: Vec<_> = lde::classical_taylor(&p)
        .iter()
        .zip(&exact)
        .map(|(x, y)| x - y)
        .collect();
    let report = RunReport {
        problem: ProblemSummary {
            dim: p.dim(),
            k: p.k,
            t: p.t,
            norm_m: p.norm_m(),
            index_qubits: p.index_qubits(),
            total_qubits: p.total_qubits(),
        },
        fidelity_vs_exact: linalg::fidelity(&result.state, &exact),
        truncation_error: linalg::norm(&diff),
        truncation_bound: lde::truncation_bound(&p),
        evolution_count: result.ledger.stage(lde::STAGE_EVOLUTION),
        algo_estimate: lde_algo_term(p.k, p.dim()),
        taylor,
        run: result,
    };
    let row = CsvRow {
        k: p.k,
        success_prob: report.run.success_prob,
        expected_success_prob: report.run.expected_success_prob,
        fidelity_vs_oracle: report.run.fidelity_vs_oracle,
        fidelity_vs_exact: report.fidelity_vs_exact,
    };
    let csv = qcost::io::csv_string(
        &["k", "success_prob", "expected_success_prob", "fidelity_vs_oracle", "fidelity_vs_exact"],
        &[row],
    )?;
    let mut outcome = Outcome::report(
        &a.output,
        "lde",
        json(&Report::new("lde-run", Some(a.seed), serde_json::to_value(a).unwrap_or_default(), &report))?,
        csv,
    );
    let r = &report.run;
    outcome.check(r.fidelity_vs_oracle >= 1.0 - ORACLE_FIDELITY, || {
        format!("fidelity vs Taylor oracle {} < 1 - {ORACLE_FIDELITY:e}", r.fidelity_vs_oracle)
    });
    outcome.check((r.success_prob - r.expected_success_prob).abs() <= PROB_TOL, || {
        format!("success probability {} differs from {}", r.success_prob, r.expected_success_prob)
    });
    outcome.check(report.truncation_error <= report.truncation_bound, || {
        format!("truncation error {} exceeds bound {}", report.truncation_error, report.truncation_bound)
    });
    if pauli_x && a.t.is_none() {
        let h = 0.5f64;
        let expected = [c(h.cosh(), 0.0), c(h.sinh(), 0.0)];
        let f = linalg::fidelity(&r.state, &expected);
        outcome.check(f >= 1.0 - PAULI_X_EXACT_FIDELITY, || {
            format!("fidelity vs (cosh 0.5, sinh 0.5) {f} < 1 - {PAULI_X_EXACT_FIDELITY:e}")
        });
    }
    Ok(outcome)
}

fn diffusion(a: &LdeArgs) -> Result<Outcome, Failure> {
    let k = a.k.unwrap_or(2);
    let t = a.t.unwrap_or(lde::DIFFUSION_DEFAULT_T);
    let report: ScalingReport = lde::success_scaling(k, t, &a.sizes, a.delta, a.epsilon)?;
    let rows: Vec<ScalingRow> = report
        .points
        .iter()
        .map(|q| ScalingRow {
            n: q.n,
            p: q.p,
            copies: q.copies,
            p_slope: report.p_slope,
            copies_slope: report.copies_slope,
        })
        .collect();
    let csv = qcost::io::csv_string(&["n", "p", "copies", "p_slope", "copies_slope"], &rows)?;
    let mut outcome = Outcome::report(
        &a.output,
        "lde_diffusion",
        json(&Report::new("lde-diffusion", Some(a.seed), serde_json::to_value(a).unwrap_or_default(), &report))?,
        csv,
    );
    let target = -4.0 * k as f64;
    outcome.check((report.p_slope - target).abs() <= SLOPE_TOL * target.abs(), || {
        format!("log p slope {} outside {target} ± 15%", report.p_slope)
    });
    let copies = 4.0 * k as f64 + 1.0;
    outcome.check((report.copies_slope - copies).abs() <= SLOPE_TOL * copies, || {
        format!("copies exponent {} outside {copies} ± 15%", report.copies_slope)
    });
    Ok(outcome)
}
