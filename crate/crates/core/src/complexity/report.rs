use serde::Serialize;

use super::term::{ComplexityTerm, Factor, Params};
use crate::prep::PrepScheme;
use crate::sim::GateCountLedger;
use crate::tomography::QstScheme;

pub const ORDER_ONLY_CAVEAT: &str =
    "order-only: unit constants on every asymptotic term, logarithms base 2";

/// Preparation term as grouped in the overall-complexity table: direct
/// manipulation shares the bucket-brigade column at `log²(N)`, flip-flop
/// qRAM sits at `log(N)`. Conventional qRAM has no column and keeps its own
/// per-call figure.
pub fn table_prep_term(scheme: PrepScheme) -> ComplexityTerm {
    match scheme {
        PrepScheme::DirectManipulation | PrepScheme::BucketBrigadeQRAM => {
            ComplexityTerm::monomial(1.0, &[(Factor::LogN, 2)])
        }
        PrepScheme::FlipFlopQRAM => ComplexityTerm::monomial(1.0, &[(Factor::LogN, 1)]),
        PrepScheme::ConventionalQRAM => PrepScheme::ConventionalQRAM.query_term(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MeasuredTotals {
    pub raw_ops: u64,
    pub elementary_count: u64,
}

/// Overall cost of one (preparation, processing, readout) combination:
/// `copies × (prep + algorithm + readout gates per measurement)`.
#[derive(Debug, Clone, Serialize)]
pub struct ComplexityReport {
    pub prep: PrepScheme,
    pub readout: QstScheme,
    pub prep_term: ComplexityTerm,
    pub algo_term: ComplexityTerm,
    pub readout_term: ComplexityTerm,
    pub copies_factor: ComplexityTerm,
    pub overall: ComplexityTerm,
    pub measured: Option<MeasuredTotals>,
    pub caveat: &'static str,
}

pub fn compose(prep: PrepScheme, readout: QstScheme, algo: &ComplexityTerm) -> ComplexityReport {
    let prep_term = table_prep_term(prep);
    let readout_term = readout.gates_term();
    let copies_factor = readout.copies_term();
    let inner = &(&prep_term + algo) + &readout_term;
    ComplexityReport {
        prep,
        readout,
        overall: &copies_factor * &inner,
        prep_term,
        algo_term: algo.clone(),
        readout_term,
        copies_factor,
        measured: None,
        caveat: ORDER_ONLY_CAVEAT,
    }
}

impl ComplexityReport {
    pub fn inner(&self) -> ComplexityTerm {
        &(&self.prep_term + &self.algo_term) + &self.readout_term
    }

    pub fn evaluate(&self, p: &Params) -> f64 {
        self.overall.evaluate(p)
    }

    /// Table-style order string with the processing stage kept symbolic as
    /// `C(ε)`, whatever algorithm term the report was composed with.
    pub fn table_cell(&self) -> String {
        let inner = &(&self.prep_term + &ComplexityTerm::algorithm()) + &self.readout_term;
        let inner = inner.order_string();
        if self.copies_factor.is_one() {
            inner
        } else {
            format!("{}·({inner})", self.copies_factor.order_string())
        }
    }

    pub fn with_measured(mut self, ledger: &GateCountLedger) -> Self {
        self.measured = Some(MeasuredTotals {
            raw_ops: ledger.raw_ops,
            elementary_count: ledger.elementary_count,
        });
        self
    }
}

/// A term together with the point it was evaluated at.
#[derive(Debug, Clone, Serialize)]
pub struct Estimate {
    pub term: ComplexityTerm,
    pub params: Params,
    pub value: f64,
}

impl Estimate {
    pub fn new(term: ComplexityTerm, params: Params) -> Self {
        let value = term.evaluate(&params);
        Self {
            term,
            params,
            value,
        }
    }
}

/// Processing cost of the Taylor-series ODE solver:
/// `k² + log(N) + k·log(k)·log(N)`.
pub fn lde_algo_term(k: usize, n_dim: usize) -> Estimate {
    let term = ComplexityTerm::monomial(1.0, &[(Factor::K, 2)])
        + ComplexityTerm::monomial(1.0, &[(Factor::LogN, 1)])
        + ComplexityTerm::monomial(1.0, &[(Factor::K, 1), (Factor::LogK, 1), (Factor::LogN, 1)]);
    Estimate::new(term, Params::default().with_k(k as f64).with_n(n_dim as f64))
}

/// Processing cost of the linear-system solver:
/// `m² + s²·t·log(N) + log(N)`.
pub fn hhl_algo_term(m: usize, s: usize, t: f64, n_dim: usize) -> Estimate {
    let term = ComplexityTerm::monomial(1.0, &[(Factor::M, 2)])
        + ComplexityTerm::monomial(1.0, &[(Factor::S, 2), (Factor::T, 1), (Factor::LogN, 1)])
        + ComplexityTerm::monomial(1.0, &[(Factor::LogN, 1)]);
    Estimate::new(
        term,
        Params::default()
            .with_m(m as f64)
            .with_s(s as f64)
            .with_t(t)
            .with_n(n_dim as f64),
    )
}

/// Column-aligned text rendering of the overall-complexity table.
pub fn render_table() -> String {
    let columns = [
        ("DM/BB-qRAM", PrepScheme::DirectManipulation),
        ("FF-qRAM", PrepScheme::FlipFlopQRAM),
    ];
    let rows: [(&str, QstScheme, Option<QstScheme>); 3] = [
        ("SQTP/JSM", QstScheme::Sqst, None),
        ("MUB", QstScheme::AaptMubNonlocal, Some(QstScheme::AaptMubLocal)),
        ("POVM", QstScheme::AaptPovm, None),
    ];
    let algo = ComplexityTerm::algorithm();
    let mut grid: Vec<Vec<String>> = vec![vec![
        "Measuring/Prep.".to_string(),
        columns[0].0.to_string(),
        columns[1].0.to_string(),
    ]];
    for (name, scheme, local) in rows {
        let mut line = vec![name.to_string()];
        for (_, prep) in columns {
            line.push(compose(prep, scheme, &algo).table_cell());
        }
        grid.push(line);
        if let Some(local) = local {
            let mut line = vec!["  [local]".to_string()];
            for (_, prep) in columns {
                line.push(compose(prep, local, &algo).table_cell());
            }
            grid.push(line);
        }
    }
    let widths: Vec<usize> = (0..3)
        .map(|c| grid.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, row) in grid.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell}{}", " ".repeat(w - cell.chars().count())))
            .collect();
        out.push_str(cells.join(" | ").trim_end());
        out.push('\n');
        if i == 0 {
            let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
            out.push_str(&rule.join("-+-"));
            out.push('\n');
        }
    }
    out.push_str(&format!("({ORDER_ONLY_CAVEAT})\n"));
    out
}
