use std::path::PathBuf;

use clap::{ArgGroup, Args, ValueEnum};
use qcost::complexity::Estimate;
use qcost::hhl::{self, HhlProblem, HhlResult};
use qcost::io::{load_hhl_problem, Report};
use qcost::linalg::{self, c};
use serde::Serialize;

use crate::output::{json, Failure, Outcome, OutputArgs};

const FIDELITY_TOL: f64 = 1e-9;
const HERALD_TOL: f64 = 1e-9;
const RESIDUAL_TOL: f64 = 1e-18;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HhlDemo {
    /// `A = [[3/8, 1/8], [1/8, 3/8]]`, `b = |0⟩`, `t0 = 8π`, `m = 2`, `C = 1`.
    TwoByTwo,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("input").required(true).args(["demo", "problem"])))]
pub struct HhlArgs {
    #[arg(long, value_enum)]
    demo: Option<HhlDemo>,
    /// Problem JSON: {"A", "b", "m", "t0"?, "C"?}.
    #[arg(long)]
    problem: Option<PathBuf>,
    /// Round every scaled eigenvalue to the nearest integer clock value.
    #[arg(long)]
    snap_spectrum: bool,
    /// Herald shots to sample from the final state (0 skips sampling).
    #[arg(long, default_value_t = 0)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

#[derive(Serialize)]
struct ProblemSummary {
    dim: usize,
    m: usize,
    t0: f64,
    c_const: f64,
    scaled_spectrum: Vec<f64>,
    sparsity: usize,
}

#[derive(Serialize)]
struct HeraldSample {
    shots: u64,
    heralded: u64,
    estimate: f64,
    sigma: f64,
}

#[derive(Serialize)]
struct HhlReport {
    problem: ProblemSummary,
    result: HhlResult,
    herald_sample: Option<HeraldSample>,
    complexity: Estimate,
}

#[derive(Serialize)]
struct CsvRow {
    herald_prob: f64,
    expected_herald_prob: f64,
    fidelity_vs_oracle: f64,
    clock_residual: f64,
    exact_spectrum: bool,
}

/// Largest number of nonzero entries in a row.
fn sparsity(p: &HhlProblem) -> usize {
    p.a.row_iter()
        .map(|r| r.iter().filter(|z| z.norm() > 0.0).count())
        .max()
        .unwrap_or(0)
}

pub fn run(a: &HhlArgs) -> Result<Outcome, Failure> {
    let mut p = match a.demo {
        Some(HhlDemo::TwoByTwo) => hhl::two_by_two_problem(),
        None => load_hhl_problem(a.problem.as_ref().expect("clap enforces demo or problem"))?,
    };
    if a.snap_spectrum {
        p = p.snap_spectrum()?;
    }
    let (result, state) = hhl::run_hhl_with_state(&p)?;
    let herald_sample = (a.shots > 0).then(|| {
        let hist = state.sample(a.shots, a.seed);
        // the herald is qubit 0
        let heralded: u64 = hist.iter().filter(|(i, _)| **i & 1 == 1).map(|(_, n)| *n).sum();
        let q = result.herald_prob;
        HeraldSample {
            shots: a.shots,
            heralded,
            estimate: heralded as f64 / a.shots as f64,
            sigma: (q * (1.0 - q) / a.shots as f64).sqrt(),
        }
    });
    let s = sparsity(&p);
    let report = HhlReport {
        problem: ProblemSummary {
            dim: p.dim(),
            m: p.m,
            t0: p.t0,
            c_const: p.c_const,
            scaled_spectrum: p.scaled_spectrum().0,
            sparsity: s,
        },
        complexity: hhl::hhl_gate_complexity(&p, s, p.t0),
        result,
        herald_sample,
    };
    let r = &report.result;
    let csv = qcost::io::csv_string(
        &["herald_prob", "expected_herald_prob", "fidelity_vs_oracle", "clock_residual", "exact_spectrum"],
        &[CsvRow {
            herald_prob: r.herald_prob,
            expected_herald_prob: r.expected_herald_prob,
            fidelity_vs_oracle: r.fidelity_vs_oracle,
            clock_residual: r.clock_residual,
            exact_spectrum: r.exact_spectrum,
        }],
    )?;
    let mut outcome = Outcome::report(
        &a.output,
        "hhl",
        json(&Report::new("hhl-run", Some(a.seed), serde_json::to_value(a).unwrap_or_default(), &report))?,
        csv,
    );
    if r.exact_spectrum {
        outcome.check(r.fidelity_vs_oracle >= 1.0 - FIDELITY_TOL, || {
            format!("fidelity vs A⁻¹b {} < 1 - {FIDELITY_TOL:e}", r.fidelity_vs_oracle)
        });
        outcome.check((r.herald_prob - r.expected_herald_prob).abs() <= HERALD_TOL, || {
            format!("herald probability {} differs from {}", r.herald_prob, r.expected_herald_prob)
        });
        outcome.check(r.clock_residual <= RESIDUAL_TOL, || {
            format!("clock residual {:e} above {RESIDUAL_TOL:e}", r.clock_residual)
        });
    }
    if a.demo == Some(HhlDemo::TwoByTwo) && !a.snap_spectrum {
        let f = linalg::fidelity(&r.state, &[c(3.0, 0.0), c(-1.0, 0.0)]);
        outcome.check(f >= 1.0 - FIDELITY_TOL, || format!("fidelity vs (3, -1)/√10 {f}"));
        outcome.check((r.herald_prob - 0.625).abs() <= HERALD_TOL, || {
            format!("herald probability {} differs from 0.625", r.herald_prob)
        });
    }
    if let Some(hs) = &report.herald_sample {
        if (hs.estimate - r.herald_prob).abs() > 5.0 * hs.sigma {
            outcome.statistical.push(format!(
                "sampled herald rate {} more than 5σ from {}",
                hs.estimate, r.herald_prob
            ));
        }
    }
    Ok(outcome)
}
