//! Amplitude-encoding state preparation.
//!
//! [`synthesize_prep`] builds an ancilla-free circuit by recursive amplitude
//! bisection: the most significant qubit is rotated first, then each lower
//! qubit receives one `Ry` per prefix pattern of the qubits above it,
//! controlled on that pattern. The leaf level carries the basis-state phases,
//! so complex targets need no extra stage and real nonnegative targets get
//! plain rotations. A level with `k` controls holds up to `2^k` gates, which
//! under the `k^2` cost rule sums to `N(log²N - 4 log N + 6) - 5` for a dense
//! target.
//!
//! The memory-based schemes are cost models only.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complexity::{ComplexityTerm, Factor, Params};
use crate::linalg::{self, c, log2_exact};
use crate::sim::{ry, Circuit, Gate2, GateOp, RegisterLayout};
use crate::{Error, Result};

/// Register name used by synthesized preparation circuits.
pub const PREP_REGISTER: &str = "q";

/// Angles and phases below this are treated as exact zeros.
const SKIP_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct TargetState {
    amplitudes: Vec<Complex64>,
}

impl TargetState {
    /// Accepts a length-`2^n` vector with unit norm (within `1e-10`).
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        log2_exact(amplitudes.len())?;
        let n = linalg::norm(&amplitudes);
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes `v` first; fails only on the zero vector or a bad length.
    pub fn normalized(v: &[Complex64]) -> Result<Self> {
        Self::new(linalg::normalized(v)?)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn num_qubits(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PrepScheme {
    DirectManipulation,
    ConventionalQRAM,
    BucketBrigadeQRAM,
    FlipFlopQRAM,
}

impl PrepScheme {
    pub const ALL: [PrepScheme; 4] = [
        PrepScheme::DirectManipulation,
        PrepScheme::ConventionalQRAM,
        PrepScheme::BucketBrigadeQRAM,
        PrepScheme::FlipFlopQRAM,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            PrepScheme::DirectManipulation => "DM",
            PrepScheme::ConventionalQRAM => "qRAM",
            PrepScheme::BucketBrigadeQRAM => "BB-qRAM",
            PrepScheme::FlipFlopQRAM => "FF-qRAM",
        }
    }

    /// Per-preparation gate count used when the scheme is queried.
    pub fn query_term(self) -> ComplexityTerm {
        match self {
            PrepScheme::DirectManipulation => {
                ComplexityTerm::monomial(1.0, &[(Factor::N, 1), (Factor::LogN, 2)])
            }
            PrepScheme::ConventionalQRAM => ComplexityTerm::monomial(1.0, &[(Factor::N, 1)]),
            PrepScheme::BucketBrigadeQRAM => ComplexityTerm::monomial(1.0, &[(Factor::LogN, 2)]),
            PrepScheme::FlipFlopQRAM => ComplexityTerm::monomial(1.0, &[(Factor::LogN, 1)]),
        }
    }

    /// Cost of loading the data into the memory, where the scheme has one.
    pub fn encode_term(self) -> Option<ComplexityTerm> {
        match self {
            PrepScheme::DirectManipulation => None,
            PrepScheme::ConventionalQRAM | PrepScheme::BucketBrigadeQRAM => {
                Some(ComplexityTerm::monomial(1.0, &[(Factor::SqrtN, 1)]))
            }
            PrepScheme::FlipFlopQRAM => Some(ComplexityTerm::monomial(
                1.0,
                &[(Factor::N, 1), (Factor::LogN, 1)],
            )),
        }
    }
}

/// Builds a circuit mapping `|0...0>` to `target`.
pub fn synthesize_prep(target: &TargetState) -> Result<Circuit> {
    let n = target.num_qubits();
    let amps = target.amplitudes();
    let layout = RegisterLayout::single(PREP_REGISTER, n.max(1))?;
    let mut circuit = Circuit::new(layout);
    if n == 0 {
        return Ok(circuit);
    }
    // weights[i] = |c_i|^2, folded upward one level at a time
    let weights: Vec<f64> = amps.iter().map(|a| a.norm_sqr()).collect();
    for level in (0..n).rev() {
        let controls: Vec<usize> = (level + 1..n).collect();
        for prefix in 0..(1usize << controls.len()) {
            // indices with the given prefix above `level`, split on bit `level`
            let block = 1usize << level;
            let start0 = prefix << (level + 1);
            let start1 = start0 | block;
            let p0: f64 = weights[start0..start0 + block].iter().sum();
            let p1: f64 = weights[start1..start1 + block].iter().sum();
            if p0 + p1 == 0.0 {
                continue;
            }
            let theta = 2.0 * p1.sqrt().atan2(p0.sqrt());
            let gate = if level == 0 {
                let phi0 = if amps[start0].norm() > 0.0 { amps[start0].arg() } else { 0.0 };
                let phi1 = if amps[start1].norm() > 0.0 { amps[start1].arg() } else { 0.0 };
                if theta.abs() < SKIP_TOL && phi0.abs() < SKIP_TOL && phi1.abs() < SKIP_TOL {
                    continue;
                }
                phased_ry(theta, phi0, phi1)
            } else {
                if theta.abs() < SKIP_TOL {
                    continue;
                }
                ry(theta)
            };
            let op = if controls.is_empty() {
                GateOp::single(level, gate, format!("prep-l{level}"))
            } else {
                GateOp::controlled(
                    controls.clone(),
                    prefix as u64,
                    level,
                    gate,
                    format!("prep-l{level}"),
                )
            };
            circuit.push(op)?;
        }
    }
    Ok(circuit)
}

/// `diag(e^{i phi0}, e^{i phi1}) * Ry(theta)`.
fn phased_ry(theta: f64, phi0: f64, phi1: f64) -> Gate2 {
    let r = ry(theta);
    let e0 = Complex64::from_polar(1.0, phi0);
    let e1 = Complex64::from_polar(1.0, phi1);
    [[e0 * r[0][0], e0 * r[0][1]], [e1 * r[1][0], e1 * r[1][1]]]
}

#[derive(Debug, Clone, Serialize)]
pub struct PrepCost {
    pub scheme: PrepScheme,
    pub n: usize,
    pub term: String,
    pub value: f64,
    /// Memory-loading term, reported separately from the per-call figure.
    pub encode_term: Option<String>,
    pub encode_value: Option<f64>,
    /// Elementary count of an actually synthesized circuit (DM only).
    pub measured: Option<u64>,
}

/// Analytic cost of preparing an `n_dim`-dimensional state with `scheme`.
pub fn prep_cost(scheme: PrepScheme, n_dim: usize) -> Result<PrepCost> {
    if n_dim < 2 {
        return Err(Error::InvalidProblem("preparation cost needs N >= 2".into()));
    }
    log2_exact(n_dim)?;
    let params = Params::default().with_n(n_dim as f64);
    let term = scheme.query_term();
    let encode = scheme.encode_term();
    Ok(PrepCost {
        scheme,
        n: n_dim,
        value: term.evaluate(&params),
        term: term.to_string(),
        encode_value: encode.as_ref().map(|t| t.evaluate(&params)),
        encode_term: encode.map(|t| t.to_string()),
        measured: None,
    })
}

/// Direct-manipulation cost with the measured count of the synthesized
/// circuit for `target`.
pub fn prep_cost_measured(target: &TargetState) -> Result<PrepCost> {
    let mut cost = prep_cost(PrepScheme::DirectManipulation, target.amplitudes().len())?;
    cost.measured = Some(synthesize_prep(target)?.ledger()?.elementary_count);
    Ok(cost)
}

/// Closed form of the synthesized count for a dense `2^n` target.
pub fn dense_prep_count(n: usize) -> u64 {
    if n == 0 {
        return 0;
    }
    let big_n = 1u64 << n;
    let n = n as u64;
    // 1 + sum_{k=1}^{n-1} 2^k k^2
    big_n * (n * n + 6) - 4 * n * big_n - 5
}

/// Dense random target with magnitudes bounded away from zero.
pub fn random_target(n: usize, rng: &mut impl rand::Rng) -> TargetState {
    let dim = 1usize << n;
    let v: Vec<Complex64> = (0..dim)
        .map(|_| {
            let mag = 0.2 + rng.random::<f64>();
            Complex64::from_polar(mag, rng.random::<f64>() * std::f64::consts::TAU)
        })
        .collect();
    TargetState::normalized(&v).expect("nonzero by construction")
}

#[doc(hidden)]
pub fn uniform_target(n: usize) -> TargetState {
    let dim = 1usize << n;
    TargetState::new(vec![c(1.0 / (dim as f64).sqrt(), 0.0); dim]).expect("normalized")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rng_from_seed;

    fn prepared(t: &TargetState) -> Vec<Complex64> {
        let (s, _) = synthesize_prep(t).unwrap().run_from_zero().unwrap();
        s.into_amplitudes()
    }

    #[test]
    fn basis_zero_needs_no_gates() {
        let mut v = vec![c(0.0, 0.0); 8];
        v[0] = c(1.0, 0.0);
        let t = TargetState::new(v).unwrap();
        assert!(synthesize_prep(&t).unwrap().is_empty());
    }

    #[test]
    fn uniform_four() {
        let amps = prepared(&uniform_target(2));
        for a in amps {
            assert!((a - c(0.5, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn random_targets_reach_fidelity() {
        let mut rng = rng_from_seed(17);
        for i in 0..50 {
            let n = 1 + i % 6;
            let t = TargetState::new(linalg::random_state(1 << n, &mut rng)).unwrap();
            let f = linalg::fidelity(t.amplitudes(), &prepared(&t));
            assert!(f >= 1.0 - 1e-10, "n = {n}: {f}");
        }
    }

    #[test]
    fn sparse_and_real_targets() {
        let mut v = vec![c(0.0, 0.0); 16];
        v[3] = c(0.6, 0.0);
        v[12] = c(0.0, -0.8);
        let t = TargetState::new(v).unwrap();
        let amps = prepared(&t);
        for (a, b) in amps.iter().zip(t.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_targets() {
        assert!(matches!(
            TargetState::new(vec![c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(TargetState::new(vec![c(0.0, 0.0); 4]), Err(Error::ZeroVector)));
        assert!(matches!(
            TargetState::new(vec![c(1.0, 0.0); 3]),
            Err(Error::NotPowerOfTwo(3))
        ));
    }

    #[test]
    fn only_rotations_and_controlled_singles() {
        let mut rng = rng_from_seed(2);
        let circuit = synthesize_prep(&random_target(4, &mut rng)).unwrap();
        assert_eq!(circuit.layout().total_qubits(), 4);
        for op in circuit.ops() {
            assert!(matches!(
                op.kind,
                crate::sim::GateKind::Single { .. } | crate::sim::GateKind::Controlled { .. }
            ));
        }
    }

    #[test]
    fn dense_count_closed_form() {
        let mut rng = rng_from_seed(8);
        for n in 1..=7 {
            let measured = synthesize_prep(&random_target(n, &mut rng))
                .unwrap()
                .ledger()
                .unwrap()
                .elementary_count;
            assert_eq!(measured, dense_prep_count(n), "n = {n}");
        }
    }

    #[test]
    fn scheme_costs() {
        let ff = prep_cost(PrepScheme::FlipFlopQRAM, 1024).unwrap();
        assert_eq!(ff.term, "log(N)");
        assert_eq!(ff.value, 10.0);
        assert_eq!(ff.encode_term.as_deref(), Some("N·log(N)"));
        let bb = prep_cost(PrepScheme::BucketBrigadeQRAM, 1024).unwrap();
        assert_eq!(bb.term, "log²(N)");
        assert_eq!(bb.value, 100.0);
        assert_eq!(bb.encode_value, Some(32.0));
        let dm = prep_cost(PrepScheme::DirectManipulation, 64).unwrap();
        assert_eq!(dm.value, 64.0 * 36.0);
        assert!(prep_cost(PrepScheme::DirectManipulation, 12).is_err());
    }

    #[test]
    fn measured_counts_grow_monotonically() {
        let mut rng = rng_from_seed(4);
        let counts: Vec<u64> = (3..=6)
            .map(|n| prep_cost_measured(&random_target(n, &mut rng)).unwrap().measured.unwrap())
            .collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]));
        // growth ratio over N in {16, 32, 64}
        for n in 5..=6usize {
            let ratio = counts[n - 3] as f64 / counts[n - 4] as f64;
            let ln = ((n - 1) as f64, n as f64);
            let bound = 2.0 * (ln.1 / ln.0).powi(2) * 1.25;
            assert!(ratio <= bound, "N = 2^{n}: {ratio} > {bound}");
        }
    }
}
