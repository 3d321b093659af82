//! Readout budgets for pure-state tomography and analytic costs of the
//! standard state-tomography schemes.
//!
//! Each outcome probability `p_m` is estimated by the frequency `n_m / M_m`.
//! Reaching relative precision `Δ` with confidence `1 - ε` takes
//! `M_m >= p_m⁻¹ · C(Δ, ε)` copies with `C(Δ, ε) = 3/Δ² · ln(1/ε)`, which
//! does not depend on the system size.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexity::{ComplexityTerm, Estimate, Factor, Params};
use crate::linalg::log2_exact;
use crate::sim::{Sampler, StateVector};
use crate::{Error, Result};

/// Relative slack when rounding a bound that sits on an integer up to the
/// next one would only reflect floating-point noise.
const CEIL_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographyPlan {
    pub delta: f64,
    pub epsilon: f64,
    pub probs: Vec<f64>,
}

impl TomographyPlan {
    pub fn new(delta: f64, epsilon: f64, probs: Vec<f64>) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidProblem(format!("Δ = {delta} outside (0, 1]")));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidProblem(format!("ε = {epsilon} outside (0, 1)")));
        }
        if probs.is_empty() {
            return Err(Error::InvalidProblem("no outcome probabilities".into()));
        }
        if let Some(p) = probs.iter().find(|&&p| !(p > 0.0)) {
            return Err(Error::InvalidProblem(format!(
                "outcome probability {p} is not positive"
            )));
        }
        let total: f64 = probs.iter().sum();
        if total > 1.0 + 1e-12 {
            return Err(Error::InvalidProblem(format!("probabilities sum to {total} > 1")));
        }
        Ok(Self {
            delta,
            epsilon,
            probs,
        })
    }

    /// `N` equal branches of a state heralded with probability `p`.
    pub fn uniform(n_outcomes: usize, p: f64, delta: f64, epsilon: f64) -> Result<Self> {
        Self::new(delta, epsilon, vec![p / n_outcomes as f64; n_outcomes])
    }

    /// Normalized branch weights `β_m² = p_m / Σ p`.
    pub fn branch_weights(&self) -> Vec<f64> {
        let total: f64 = self.probs.iter().sum();
        self.probs.iter().map(|p| p / total).collect()
    }
}

/// `C(Δ, ε) = 3/Δ² · ln(1/ε)`.
pub fn sample_constant(delta: f64, epsilon: f64) -> f64 {
    3.0 / (delta * delta) * (1.0 / epsilon).ln()
}

/// Smallest integer `M` with `M >= x`.
pub fn min_integer_at_least(x: f64) -> u64 {
    (x * (1.0 - CEIL_SLACK)).ceil() as u64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleBudget {
    pub constant: f64,
    /// Unrounded `p_m⁻¹ · C(Δ, ε)`.
    pub raw: Vec<f64>,
    pub per_outcome: Vec<u64>,
    /// Copies needed to resolve every outcome.
    pub max: u64,
}

pub fn sample_bound(plan: &TomographyPlan) -> SampleBudget {
    let constant = sample_constant(plan.delta, plan.epsilon);
    let raw: Vec<f64> = plan.probs.iter().map(|p| constant / p).collect();
    let per_outcome: Vec<u64> = raw.iter().map(|&x| min_integer_at_least(x)).collect();
    let max = per_outcome.iter().copied().max().unwrap_or(0);
    SampleBudget {
        constant,
        raw,
        per_outcome,
        max,
    }
}

/// Copies bound `M = N · p⁻¹ · C(Δ, ε)` for a uniform branch distribution.
pub fn uniform_copies_bound(n_outcomes: usize, p: f64, delta: f64, epsilon: f64) -> u64 {
    min_integer_at_least(n_outcomes as f64 / p * sample_constant(delta, epsilon))
}

/// Plan over the nonzero outcomes of `state`; returns the plan and the basis
/// indices it refers to.
pub fn plan_for_state(state: &StateVector, delta: f64, epsilon: f64) -> Result<(TomographyPlan, Vec<usize>)> {
    let probs = state.probabilities();
    let outcomes: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] > 0.0).collect();
    let plan = TomographyPlan::new(delta, epsilon, outcomes.iter().map(|&i| probs[i]).collect())?;
    Ok((plan, outcomes))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coverage {
    pub outcomes: Vec<usize>,
    pub budgets: Vec<u64>,
    /// Fraction of trials with relative error at most `Δ`, per outcome.
    pub per_outcome: Vec<f64>,
    pub threshold: f64,
    pub trials: usize,
    pub pass: bool,
}

/// Monte Carlo check of the budgets: each trial draws copies of `state` and
/// estimates every tracked outcome from its first `M_m` shots.
///
/// Trial `i` uses the ChaCha stream `i` of `seed`, so the result does not
/// depend on how trials are scheduled across threads.
pub fn verify_coverage(
    state: &StateVector,
    outcomes: &[usize],
    budgets: &[u64],
    delta: f64,
    epsilon: f64,
    trials: usize,
    seed: u64,
) -> Result<Coverage> {
    verify_coverage_probs(&state.probabilities(), outcomes, budgets, delta, epsilon, trials, seed)
}

/// [`verify_coverage`] over an explicit outcome distribution.
pub fn verify_coverage_probs(
    probs: &[f64],
    outcomes: &[usize],
    budgets: &[u64],
    delta: f64,
    epsilon: f64,
    trials: usize,
    seed: u64,
) -> Result<Coverage> {
    if trials < 100 {
        return Err(Error::InvalidProblem(format!("need at least 100 trials, got {trials}")));
    }
    if outcomes.len() != budgets.len() {
        return Err(Error::DimensionMismatch {
            expected: outcomes.len(),
            actual: budgets.len(),
        });
    }
    if let Some(&o) = outcomes.iter().find(|&&o| o >= probs.len()) {
        return Err(Error::QubitOutOfRange {
            index: o,
            total: probs.len(),
        });
    }
    let sampler = Sampler::new(probs);
    // checkpoints in shot order
    let mut order: Vec<usize> = (0..outcomes.len()).collect();
    order.sort_by_key(|&i| budgets[i]);
    let max_budget = budgets.iter().copied().max().unwrap_or(0);

    let hits: Vec<Vec<bool>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let mut counts = vec![0u64; probs.len()];
            let mut ok = vec![false; outcomes.len()];
            let mut next = 0;
            for shot in 1..=max_budget {
                counts[sampler.draw(&mut rng)] += 1;
                while next < order.len() && budgets[order[next]] == shot {
                    let i = order[next];
                    let p = probs[outcomes[i]];
                    let estimate = counts[outcomes[i]] as f64 / shot as f64;
                    ok[i] = ((estimate - p) / p).abs() <= delta;
                    next += 1;
                }
            }
            ok
        })
        .collect();

    let per_outcome: Vec<f64> = (0..outcomes.len())
        .map(|i| hits.iter().filter(|h| h[i]).count() as f64 / trials as f64)
        .collect();
    let threshold = 1.0 - epsilon - 3.0 * (epsilon * (1.0 - epsilon) / trials as f64).sqrt();
    let pass = per_outcome.iter().all(|&c| c >= threshold);
    Ok(Coverage {
        outcomes: outcomes.to_vec(),
        budgets: budgets.to_vec(),
        per_outcome,
        threshold,
        trials,
        pass,
    })
}

/// State-tomography schemes with their copy and per-measurement gate costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "scheme")]
pub enum QstScheme {
    Sqst,
    AaptJsm,
    AaptMubNonlocal,
    AaptMubLocal,
    AaptPovm,
    CompressedSensing { rank: u32 },
    Qpca { rank: u32 },
    LinearRegression,
}

impl QstScheme {
    pub fn name(self) -> &'static str {
        match self {
            QstScheme::Sqst => "SQST",
            QstScheme::AaptJsm => "AAPT-JSM",
            QstScheme::AaptMubNonlocal => "AAPT-MUB (nonlocal)",
            QstScheme::AaptMubLocal => "AAPT-MUB (local)",
            QstScheme::AaptPovm => "AAPT-POVM",
            QstScheme::CompressedSensing { .. } => "compressed sensing",
            QstScheme::Qpca { .. } => "QPCA",
            QstScheme::LinearRegression => "linear regression",
        }
    }

    pub fn rank(self) -> u32 {
        match self {
            QstScheme::CompressedSensing { rank } | QstScheme::Qpca { rank } => rank.max(1),
            _ => 1,
        }
    }

    /// Copies of the state consumed by the reconstruction.
    pub fn copies_term(self) -> ComplexityTerm {
        use Factor::*;
        match self {
            QstScheme::Sqst | QstScheme::AaptJsm | QstScheme::LinearRegression => {
                ComplexityTerm::monomial(1.0, &[(N, 4)])
            }
            QstScheme::AaptMubNonlocal | QstScheme::AaptMubLocal => {
                ComplexityTerm::monomial(1.0, &[(N, 2)])
            }
            QstScheme::AaptPovm | QstScheme::CompressedSensing { .. } => ComplexityTerm::constant(1.0),
            QstScheme::Qpca { .. } => ComplexityTerm::monomial(1.0, &[(N, 1)]),
        }
    }

    /// Gates per measurement.
    pub fn gates_term(self) -> ComplexityTerm {
        use Factor::*;
        match self {
            QstScheme::Sqst | QstScheme::AaptJsm | QstScheme::LinearRegression => {
                ComplexityTerm::monomial(1.0, &[(LogN, 1)])
            }
            QstScheme::AaptMubNonlocal => ComplexityTerm::monomial(1.0, &[(LogN, 2)]),
            QstScheme::AaptMubLocal => ComplexityTerm::monomial(1.0, &[(LogN, 3)]),
            QstScheme::AaptPovm => ComplexityTerm::monomial(1.0, &[(N, 4)]),
            QstScheme::CompressedSensing { .. } => {
                ComplexityTerm::monomial(1.0, &[(R, 1), (N, 1), (LogN, 2)])
            }
            QstScheme::Qpca { .. } => ComplexityTerm::monomial(1.0, &[(R, 1), (LogN, 1)]),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QstCost {
    pub scheme: QstScheme,
    pub copies: Estimate,
    pub gates_per_measurement: Estimate,
    pub overall: Estimate,
}

/// Copies and gates per measurement for `scheme` at dimension `n_dim`,
/// with their product as the overall figure.
pub fn qst_cost(scheme: QstScheme, n_dim: usize) -> Result<QstCost> {
    log2_exact(n_dim)?;
    let params = Params::default()
        .with_n(n_dim as f64)
        .with_r(scheme.rank() as f64);
    let copies = scheme.copies_term();
    let gates = scheme.gates_term();
    Ok(QstCost {
        scheme,
        overall: Estimate::new(&copies * &gates, params),
        copies: Estimate::new(copies, params),
        gates_per_measurement: Estimate::new(gates, params),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::sim::RegisterLayout;

    #[test]
    fn unit_case() {
        let plan = TomographyPlan::new(1.0, (-1.0f64).exp(), vec![1.0]).unwrap();
        let b = sample_bound(&plan);
        assert!((b.constant - 3.0).abs() < 1e-12);
        assert_eq!(b.per_outcome, vec![3]);
        assert_eq!(b.max, 3);
    }

    #[test]
    fn uniform_eight_branches() {
        let plan = TomographyPlan::uniform(8, 1.0, 0.1, 0.05).unwrap();
        let b = sample_bound(&plan);
        // 8 * 300 * ln 20 = 7189.77...
        assert!((b.raw[0] - 2400.0 * 20f64.ln()).abs() < 1e-9);
        assert!(b.per_outcome.iter().all(|&m| m == 7190));
        assert_eq!(uniform_copies_bound(8, 1.0, 0.1, 0.05), 7190);
    }

    #[test]
    fn halving_delta_quadruples() {
        let a = sample_bound(&TomographyPlan::new(0.2, 0.1, vec![0.3]).unwrap());
        let b = sample_bound(&TomographyPlan::new(0.1, 0.1, vec![0.3]).unwrap());
        assert!((b.raw[0] / a.raw[0] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_in_every_argument() {
        let m = |d, e, p| sample_bound(&TomographyPlan::new(d, e, vec![p]).unwrap()).raw[0];
        assert!(m(0.1, 0.05, 0.2) > m(0.1, 0.05, 0.4));
        assert!(m(0.1, 0.05, 0.2) > m(0.2, 0.05, 0.2));
        assert!(m(0.1, 0.05, 0.2) > m(0.1, 0.1, 0.2));
    }

    #[test]
    fn rejects_null_probability() {
        assert!(TomographyPlan::new(0.1, 0.05, vec![0.5, 0.0]).is_err());
        assert!(TomographyPlan::new(0.1, 0.05, vec![0.7, 0.7]).is_err());
        assert!(TomographyPlan::new(0.0, 0.05, vec![0.5]).is_err());
    }

    #[test]
    fn basis_state_always_covered() {
        let s = StateVector::basis(RegisterLayout::single("q", 2).unwrap(), 2);
        let (plan, outcomes) = plan_for_state(&s, 0.01, 0.05).unwrap();
        let b = sample_bound(&plan);
        let cov = verify_coverage(&s, &outcomes, &b.per_outcome, 0.01, 0.05, 100, 3).unwrap();
        assert_eq!(cov.per_outcome, vec![1.0]);
        assert!(cov.pass);
    }

    #[test]
    fn coverage_is_schedule_independent() {
        let amps = vec![c(0.5, 0.0); 4];
        let s = StateVector::from_amplitudes(RegisterLayout::single("q", 2).unwrap(), amps).unwrap();
        let (plan, outcomes) = plan_for_state(&s, 0.2, 0.1).unwrap();
        let b = sample_bound(&plan);
        let run = || verify_coverage(&s, &outcomes, &b.per_outcome, 0.2, 0.1, 120, 99).unwrap();
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(run);
        assert_eq!(serial, run());
    }

    #[test]
    fn scheme_costs() {
        let n = 8;
        let sq = qst_cost(QstScheme::Sqst, n).unwrap();
        assert_eq!(sq.copies.term.to_string(), "N⁴");
        assert_eq!(sq.gates_per_measurement.term.to_string(), "log(N)");
        assert_eq!(sq.overall.term.to_string(), "N⁴·log(N)");
        assert_eq!(sq.overall.value, 4096.0 * 3.0);
        let povm = qst_cost(QstScheme::AaptPovm, n).unwrap();
        assert_eq!(povm.copies.term.to_string(), "1");
        assert_eq!(povm.gates_per_measurement.term.to_string(), "N⁴");
        let qpca = qst_cost(QstScheme::Qpca { rank: 1 }, 16).unwrap();
        assert_eq!(qpca.overall.term.to_string(), "R·N·log(N)");
        assert_eq!(qpca.overall.value, 64.0);
        let mub = qst_cost(QstScheme::AaptMubNonlocal, 16).unwrap();
        assert_eq!(mub.overall.term.to_string(), "N²·log²(N)");
        let cs = qst_cost(QstScheme::CompressedSensing { rank: 2 }, 16).unwrap();
        assert_eq!(cs.overall.value, 2.0 * 16.0 * 16.0);
    }
}
