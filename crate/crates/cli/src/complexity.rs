use clap::{Args, ValueEnum};
use qcost::complexity::{
    compose, hhl_algo_term, lde_algo_term, render_table, ComplexityTerm, Params, ORDER_ONLY_CAVEAT,
};
use qcost::io::Report;
use qcost::prep::PrepScheme;
use qcost::tomography::QstScheme;
use serde::Serialize;

use crate::output::{json, Failure, Outcome, OutputArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    /// Keep the processing cost as the symbol C(ε), evaluated as `--c-eps`.
    Symbolic,
    /// Taylor-series ODE solver at order `--k`.
    Lde,
    /// Linear-system solver with `--m`, `--s`, `--t`.
    Hhl,
}

#[derive(Debug, Args, Serialize)]
pub struct ComplexityArgs {
    /// Print the overall-complexity table.
    #[arg(long)]
    table: bool,
    /// Dimensions N at which every cell is evaluated.
    #[arg(long, value_delimiter = ',', default_values_t = [4, 16, 64, 256])]
    sizes: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Algo::Symbolic)]
    algo: Algo,
    /// Value of C(ε) for the symbolic algorithm.
    #[arg(long, default_value_t = 1.0)]
    c_eps: f64,
    #[arg(long, default_value_t = 4)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    s: usize,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[command(flatten)]
    #[serde(skip)]
    output: OutputArgs,
}

const CELLS: [(PrepScheme, QstScheme); 8] = [
    (PrepScheme::DirectManipulation, QstScheme::Sqst),
    (PrepScheme::FlipFlopQRAM, QstScheme::Sqst),
    (PrepScheme::DirectManipulation, QstScheme::AaptMubNonlocal),
    (PrepScheme::FlipFlopQRAM, QstScheme::AaptMubNonlocal),
    (PrepScheme::DirectManipulation, QstScheme::AaptMubLocal),
    (PrepScheme::FlipFlopQRAM, QstScheme::AaptMubLocal),
    (PrepScheme::DirectManipulation, QstScheme::AaptPovm),
    (PrepScheme::FlipFlopQRAM, QstScheme::AaptPovm),
];

#[derive(Serialize)]
struct Evaluation {
    n: usize,
    value: f64,
}

#[derive(Serialize)]
struct Cell {
    prep: &'static str,
    readout: &'static str,
    cell: String,
    overall: ComplexityTerm,
    evaluations: Vec<Evaluation>,
}

#[derive(Serialize)]
struct ComplexityReport {
    caveat: &'static str,
    algo_term: ComplexityTerm,
    cells: Vec<Cell>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    prep: &'a str,
    readout: &'a str,
    n: usize,
    overall: f64,
}

pub fn run(a: &ComplexityArgs) -> Result<Outcome, Failure> {
    if a.sizes.iter().any(|&n| n < 2 || !n.is_power_of_two()) {
        return Err(Failure::Invalid("sizes must be powers of two, at least 2".into()));
    }
    let mut cells = Vec::new();
    let mut algo_term = ComplexityTerm::algorithm();
    for (prep, readout) in CELLS {
        let mut evaluations = Vec::new();
        for &n in &a.sizes {
            let (term, params) = match a.algo {
                Algo::Symbolic => (
                    ComplexityTerm::algorithm(),
                    Params::default().with_n(n as f64).with_algo(a.c_eps),
                ),
                Algo::Lde => {
                    let e = lde_algo_term(a.k, n);
                    (e.term, e.params)
                }
                Algo::Hhl => {
                    let e = hhl_algo_term(a.m, a.s, a.t, n);
                    (e.term, e.params)
                }
            };
            let report = compose(prep, readout, &term);
            evaluations.push(Evaluation {
                n,
                value: report.evaluate(&params),
            });
            algo_term = term;
        }
        let report = compose(prep, readout, &algo_term);
        cells.push(Cell {
            prep: prep.short_name(),
            readout: readout.name(),
            cell: report.table_cell(),
            overall: report.overall,
            evaluations,
        });
    }
    let rows: Vec<CsvRow> = cells
        .iter()
        .flat_map(|c| {
            c.evaluations.iter().map(|e| CsvRow {
                prep: c.prep,
                readout: c.readout,
                n: e.n,
                overall: e.value,
            })
        })
        .collect();
    let csv = qcost::io::csv_string(&["prep", "readout", "n", "overall"], &rows)?;
    let report = ComplexityReport {
        caveat: ORDER_ONLY_CAVEAT,
        algo_term,
        cells,
    };
    let mut outcome = Outcome::report(
        &a.output,
        "complexity",
        json(&Report::new("complexity", None, serde_json::to_value(a).unwrap_or_default(), &report))?,
        csv,
    );
    let table = render_table();
    outcome.files.push(("complexity_table.txt".into(), table.clone()));
    if a.table && a.output.out.is_none() {
        outcome.stdout = table;
    }
    Ok(outcome)
}
