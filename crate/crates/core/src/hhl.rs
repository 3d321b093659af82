//! Three-stage linear-system solver for `A x = b` with Hermitian `A` of
//! positive spectrum.
//!
//! Phase estimation writes the scaled eigenvalue `λ̃_j = λ_j t0 / 2π` into an
//! `m`-qubit clock register, a clock-controlled rotation moves amplitude
//! `C / λ̃_j` onto a herald qubit, and the phase estimation is undone. When
//! the herald reads 1 the work register holds `Σ_j β_j / λ̃_j |u_j⟩`, which
//! is `A⁻¹|b⟩` up to normalization, and the clock is back at `|0⟩`.
//!
//! Hamiltonian evolution is applied exactly through the eigendecomposition of
//! `A`; the sparse-simulation cost only appears in [`hhl_gate_complexity`].

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::complexity::{hhl_algo_term, Estimate};
use crate::linalg::{
    self, hermitian_deviation, hermitian_eigen, hermitian_function, log2_exact, CMatrix,
};
use crate::prep::{synthesize_prep, TargetState};
use crate::sim::{hadamard, ry, Circuit, GateCountLedger, GateOp, RegisterLayout, StateVector};
use crate::{Error, Result};

pub const HERALD: &str = "herald";
pub const CLOCK: &str = "clock";
pub const WORK: &str = "work";

pub const STAGE_ESTIMATION: &str = "phase-estimation";
pub const STAGE_ROTATION: &str = "rotation";
pub const STAGE_UNCOMPUTE: &str = "uncompute";

/// Eigenvalues closer than this to an integer count as exactly encoded.
const EXACT_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct HhlProblem {
    pub a: CMatrix,
    pub b: Vec<Complex64>,
    pub m: usize,
    pub t0: f64,
    pub c_const: f64,
}

impl HhlProblem {
    /// Validates the problem. Without `t0` the largest eigenvalue is mapped
    /// to `2^m - 1`; without `c_const` the smallest scaled eigenvalue is used.
    pub fn new(
        a: CMatrix,
        b: Vec<Complex64>,
        m: usize,
        t0: Option<f64>,
        c_const: Option<f64>,
    ) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: a.ncols(),
            });
        }
        if n < 2 {
            return Err(Error::InvalidProblem("dimension must be at least 2".into()));
        }
        log2_exact(n)?;
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: b.len(),
            });
        }
        if !(1..=16).contains(&m) {
            return Err(Error::InvalidProblem(format!("clock width m = {m} outside 1..=16")));
        }
        let dev = hermitian_deviation(&a);
        if dev > 1e-10 {
            return Err(Error::InvalidProblem(format!("A is not Hermitian (deviation {dev:.3e})")));
        }
        let (evals, _) = hermitian_eigen(&a);
        let lmin = evals[0];
        let lmax = evals[n - 1];
        if lmin <= 0.0 {
            return Err(Error::InvalidProblem(format!(
                "spectrum must be positive, smallest eigenvalue is {lmin:.6e}"
            )));
        }
        let t0 = t0.unwrap_or(TAU * ((1u64 << m) - 1) as f64 / lmax);
        if !(t0 > 0.0 && t0.is_finite()) {
            return Err(Error::InvalidProblem(format!("t0 = {t0} must be positive")));
        }
        let top = (1u64 << m) as f64;
        let scaled_max = lmax * t0 / TAU;
        if scaled_max >= top {
            return Err(Error::InvalidProblem(format!(
                "scaled eigenvalue {scaled_max:.6} does not fit in {m} clock bits"
            )));
        }
        let scaled_min = lmin * t0 / TAU;
        let c_const = c_const.unwrap_or(scaled_min);
        if !(c_const > 0.0) || c_const > scaled_min * (1.0 + 1e-12) {
            return Err(Error::InvalidProblem(format!(
                "rotation constant {c_const} must lie in (0, {scaled_min}]"
            )));
        }
        Ok(Self {
            a,
            b: linalg::normalized(&b)?,
            m,
            t0,
            c_const,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn total_qubits(&self) -> usize {
        1 + self.m + self.dim().trailing_zeros() as usize
    }

    /// Scaled eigenvalues `λ̃_j`, ascending, with the eigenvectors as columns.
    pub fn scaled_spectrum(&self) -> (Vec<f64>, CMatrix) {
        let (evals, vecs) = hermitian_eigen(&self.a);
        (evals.iter().map(|l| l * self.t0 / TAU).collect(), vecs)
    }

    /// True when every `λ̃_j` is an integer.
    pub fn is_exact(&self) -> bool {
        self.scaled_spectrum()
            .0
            .iter()
            .all(|l| (l - l.round()).abs() < EXACT_TOL)
    }

    /// Same problem with each `λ̃_j` rounded to the nearest integer in
    /// `[1, 2^m - 1]`, eigenvectors and `t0` unchanged. The rotation
    /// constant is reset to the new smallest scaled eigenvalue when the old
    /// one no longer fits.
    pub fn snap_spectrum(&self) -> Result<Self> {
        let (scaled, vecs) = self.scaled_spectrum();
        let top = ((1u64 << self.m) - 1) as f64;
        let snapped: Vec<f64> = scaled.iter().map(|l| l.round().clamp(1.0, top)).collect();
        let lambdas: Vec<Complex64> = snapped.iter().map(|l| linalg::c(l * TAU / self.t0, 0.0)).collect();
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(lambdas));
        let a = &vecs * d * vecs.adjoint();
        let a = (&a + a.adjoint()).scale(0.5);
        let min = snapped[0];
        let c_const = if self.c_const <= min { self.c_const } else { min };
        Self::new(a, self.b.clone(), self.m, Some(self.t0), Some(c_const))
    }
}

/// `e^{i A · power · t0 / 2^m}`.
pub fn hamiltonian_power(p: &HhlProblem, power: u64) -> CMatrix {
    let scale = power as f64 * p.t0 / (1u64 << p.m) as f64;
    hermitian_function(&p.a, |l| Complex64::from_polar(1.0, l * scale))
}

fn layout(p: &HhlProblem) -> Result<RegisterLayout> {
    RegisterLayout::new(&[(HERALD, 1), (CLOCK, p.m), (WORK, log2_exact(p.dim())?)])
}

/// Controlled powers `U_A^(2^j)` on clock bit `j` followed by the inverse
/// Fourier transform; the clock is assumed to be in uniform superposition.
fn push_estimation(p: &HhlProblem, circuit: &mut Circuit, clock: &[usize]) -> Result<()> {
    for &q in clock {
        circuit.push(GateOp::single(q, hadamard(), "H"))?;
    }
    for (j, &q) in clock.iter().enumerate() {
        let u = hamiltonian_power(p, 1 << j);
        circuit.push(GateOp::controlled_block(vec![q], 1, WORK, u, format!("U_A^{}", 1u64 << j)))?;
    }
    circuit.push(GateOp::qft(CLOCK, true))
}

/// Phase-estimation stage only, with `input` prepared on the work register.
pub fn phase_estimation_circuit(p: &HhlProblem, input: &[Complex64]) -> Result<Circuit> {
    let layout = layout(p)?;
    let clock: Vec<usize> = layout.qubits(CLOCK)?.collect();
    let mut circuit = Circuit::new(layout);
    circuit.begin_stage(STAGE_ESTIMATION);
    circuit.append_embedded(&synthesize_prep(&TargetState::normalized(input)?)?, WORK, &[], 0)?;
    push_estimation(p, &mut circuit, &clock)?;
    Ok(circuit)
}

pub fn build_hhl_circuit(p: &HhlProblem) -> Result<Circuit> {
    let mut circuit = phase_estimation_circuit(p, &p.b)?;
    let herald = circuit.layout().register(HERALD)?.offset;
    let clock: Vec<usize> = circuit.layout().qubits(CLOCK)?.collect();

    circuit.begin_stage(STAGE_ROTATION);
    for v in 1..(1u64 << p.m) {
        // clock values below C only carry leakage from inexact estimates;
        // they get the full rotation
        let ratio = (p.c_const / v as f64).min(1.0);
        // |0⟩ -> sqrt(1 - ratio²)|0⟩ + ratio|1⟩
        let gate = ry(2.0 * ratio.asin());
        circuit.push(GateOp::controlled(clock.clone(), v, herald, gate, "R_y"))?;
    }

    circuit.begin_stage(STAGE_UNCOMPUTE);
    circuit.push(GateOp::qft(CLOCK, false))?;
    for (j, &q) in clock.iter().enumerate().rev() {
        let u = hamiltonian_power(p, 1 << j).adjoint();
        circuit.push(GateOp::controlled_block(vec![q], 1, WORK, u, format!("U_A^{}†", 1u64 << j)))?;
    }
    for &q in &clock {
        circuit.push(GateOp::single(q, hadamard(), "H"))?;
    }
    Ok(circuit)
}

#[derive(Debug, Clone, Serialize)]
pub struct HhlResult {
    #[serde(serialize_with = "crate::io::serialize_cvec")]
    pub state: Vec<Complex64>,
    pub herald_prob: f64,
    /// Analytic `Σ_j |C β_j / λ̃_j|²`; meaningful for exact spectra.
    pub expected_herald_prob: f64,
    pub fidelity_vs_oracle: f64,
    /// Clock population outside `|0…0⟩` in the heralded branch.
    pub clock_residual: f64,
    pub exact_spectrum: bool,
    pub ledger: GateCountLedger,
}

pub fn run_hhl(p: &HhlProblem) -> Result<HhlResult> {
    Ok(run_hhl_with_state(p)?.0)
}

/// [`run_hhl`] that also returns the full pre-measurement state.
pub fn run_hhl_with_state(p: &HhlProblem) -> Result<(HhlResult, StateVector)> {
    let circuit = build_hhl_circuit(p)?;
    let (state, ledger) = circuit.run_from_zero()?;
    let result = run_heralding(p, &state, ledger)?;
    Ok((result, state))
}

fn run_heralding(p: &HhlProblem, state: &StateVector, ledger: GateCountLedger) -> Result<HhlResult> {
    let (heralded, herald_prob) = state.post_select(HERALD, 1)?;
    let clock = heralded.register_probabilities(CLOCK)?;
    let clock_residual: f64 = clock[1..].iter().sum();
    let (work, _) = heralded.post_select(CLOCK, 0)?;
    let oracle = classical_solution(p)?;
    Ok(HhlResult {
        fidelity_vs_oracle: linalg::fidelity(work.amplitudes(), &oracle),
        state: work.into_amplitudes(),
        herald_prob,
        expected_herald_prob: herald_probability(p),
        clock_residual,
        exact_spectrum: p.is_exact(),
        ledger,
    })
}

/// `A⁻¹ b` by direct inversion.
pub fn classical_solution(p: &HhlProblem) -> Result<Vec<Complex64>> {
    let inv = p
        .a
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidProblem("A is singular".into()))?;
    Ok(linalg::mat_vec(&inv, &p.b))
}

/// `Σ_j |C β_j / λ̃_j|²` with `β_j = ⟨u_j|b⟩`.
pub fn herald_probability(p: &HhlProblem) -> f64 {
    let (scaled, vecs) = p.scaled_spectrum();
    scaled
        .iter()
        .enumerate()
        .map(|(j, l)| {
            let beta = linalg::inner(vecs.column(j).as_slice(), &p.b);
            (p.c_const * beta.norm() / l).powi(2)
        })
        .sum()
}

/// Order-only processing cost `m² + s²·t·log(N) + log(N)` for this problem.
pub fn hhl_gate_complexity(p: &HhlProblem, s: usize, t: f64) -> Estimate {
    hhl_algo_term(p.m, s, t, p.dim())
}

/// The 2x2 instance `A = [[3/8, 1/8], [1/8, 3/8]]`, `b = |0⟩`, `t0 = 8π`,
/// `m = 2`, `C = 1`: eigenvalues encode as 2 and 1, the heralded state is
/// `(3, -1)/√10` and the herald fires with probability 5/8.
pub fn two_by_two_problem() -> HhlProblem {
    HhlProblem::new(
        linalg::real_matrix(2, 2, &[0.375, 0.125, 0.125, 0.375]),
        vec![linalg::ONE, linalg::ZERO],
        2,
        Some(4.0 * TAU),
        Some(1.0),
    )
    .expect("valid")
}

/// Random Hermitian matrix whose scaled spectrum consists of distinct-or-not
/// integers in `[1, 2^m - 1]` for `t0 = 2π`.
pub fn random_exact_problem(n: usize, m: usize, rng: &mut impl rand::Rng) -> HhlProblem {
    let dim = 1usize << n;
    let top = (1u64 << m) - 1;
    let spectrum: Vec<f64> = (0..dim).map(|_| rng.random_range(1..=top) as f64).collect();
    let a = linalg::hermitian_with_spectrum(&spectrum, rng);
    let b = linalg::random_state(dim, rng);
    HhlProblem::new(a, b, m, Some(TAU), None).expect("valid by construction")
}
