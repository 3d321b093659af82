use qcost::complexity::{compose, crosscheck_measured, ComplexityTerm, Factor, Params};
use qcost::linalg::rng_from_seed;
use qcost::prep::{random_target, synthesize_prep, PrepScheme};
use qcost::sim::{qft_cost, qft_decomposition};
use qcost::tomography::QstScheme;
use rand::Rng;

use PrepScheme::{DirectManipulation as Dm, FlipFlopQRAM as Ff};
use QstScheme::{AaptMubLocal, AaptMubNonlocal, AaptPovm, Sqst};

const CELLS: [(PrepScheme, QstScheme, &str); 6] = [
    (Dm, Sqst, "N⁴·(C(ε) + log(N) + log²(N))"),
    (Ff, Sqst, "N⁴·(C(ε) + log(N))"),
    (Dm, AaptMubNonlocal, "N²·(C(ε) + log²(N))"),
    (Ff, AaptMubNonlocal, "N²·(C(ε) + log(N) + log²(N))"),
    (Dm, AaptPovm, "C(ε) + log²(N) + N⁴"),
    (Ff, AaptPovm, "C(ε) + log(N) + N⁴"),
];

#[test]
fn table_cells_in_canonical_form() {
    let algo = ComplexityTerm::algorithm();
    for (prep, readout, expected) in CELLS {
        assert_eq!(compose(prep, readout, &algo).table_cell(), expected);
    }
    assert_eq!(
        compose(Ff, AaptMubLocal, &algo).table_cell(),
        "N²·(C(ε) + log(N) + log³(N))"
    );
}

#[test]
fn composition_distributes_numerically() {
    let mut rng = rng_from_seed(31);
    let algo = qcost::complexity::lde_algo_term(3, 8).term;
    for _ in 0..100 {
        let params = Params::default()
            .with_n(2f64.powi(rng.random_range(1..12)))
            .with_k(rng.random_range(1.0..20.0))
            .with_algo(rng.random_range(0.1..100.0));
        for (prep, readout, _) in CELLS {
            let r = compose(prep, readout, &algo);
            let lhs = r.evaluate(&params);
            let rhs = r.copies_factor.evaluate(&params) * r.inner().evaluate(&params);
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
        }
    }
}

#[test]
fn reports_grow_with_n() {
    let algo = ComplexityTerm::algorithm();
    for (prep, readout, _) in CELLS {
        let r = compose(prep, readout, &algo);
        let values: Vec<f64> = (1..10)
            .map(|e| r.evaluate(&Params::default().with_n(2f64.powi(e))))
            .collect();
        assert!(values.windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn direct_preparation_stays_within_twice_n_log2_n() {
    let term = ComplexityTerm::monomial(1.0, &[(Factor::N, 1), (Factor::LogN, 2)]);
    let mut rng = rng_from_seed(8);
    let samples: Vec<(Params, u64)> = (3..=6)
        .map(|n| {
            let count = synthesize_prep(&random_target(n, &mut rng)).unwrap().ledger().unwrap().elementary_count;
            (Params::default().with_n((1u64 << n) as f64), count)
        })
        .collect();
    let table = crosscheck_measured(&term, &samples).unwrap();
    assert!(table.rows.iter().all(|r| r.normalized <= 2.0 && r.normalized >= 0.5));
    assert!(!table.alarm);
}

#[test]
fn qft_decomposition_length_matches_closed_form() {
    for w in 0..=10usize {
        let qubits: Vec<usize> = (0..w).collect();
        assert_eq!(qft_decomposition(&qubits, false).len() as u64, qft_cost(w));
        assert_eq!(qft_decomposition(&qubits, true).len() as u64, (w * (w + 1) / 2 + w / 2) as u64);
    }
}

#[test]
fn flat_ratio_for_constant_circuit() {
    let samples: Vec<(Params, u64)> = [4.0, 8.0, 16.0].iter().map(|&n| (Params::default().with_n(n), 7)).collect();
    let t = crosscheck_measured(&ComplexityTerm::constant(1.0), &samples).unwrap();
    assert_eq!(t.drift, 1.0);
}
