//! Taylor-series solver for `dx/dt = M x + b` with `M / ‖M‖` unitary.
//!
//! The circuit works on three registers: a one-qubit branch selector, a
//! Taylor-index register of `T = ⌈log₂(k+1)⌉` qubits and the work register
//! holding the problem vector. The branch selector splits amplitude between
//! the homogeneous series (`x0` terms) and the driving series (`b` terms),
//! the index register spreads each branch over the Taylor orders, and the
//! evolution applies `A^m` to the work register when the index reads `m`.
//! Undoing the two spreading steps and keeping the all-zero ancilla outcome
//! leaves the work register proportional to the truncated series
//!
//! ```text
//! x_k(t) = Σ_{m=0..k} (Mt)^m / m! · x0  +  Σ_{n=1..k} M^{n-1} t^n / n! · b
//! ```
//!
//! with herald probability `‖x_k(t)‖² / 𝒩⁴`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::linalg::{
    self, c, complete_unitary, log2_exact, mat_vec, rng_from_seed, spectral_norm, unitarity_deviation,
    CMatrix, ONE, UNITARY_TOL, ZERO,
};
use crate::prep::{synthesize_prep, TargetState};
use crate::sim::{BlockCost, Circuit, GateCountLedger, GateOp, RegisterLayout};
use crate::tomography::sample_constant;
use crate::{Error, Result};

pub const BRANCH: &str = "branch";
pub const INDEX: &str = "index";
pub const WORK: &str = "work";

pub const STAGE_ENCODING: &str = "encoding";
pub const STAGE_EVOLUTION: &str = "evolution";
pub const STAGE_DECODING: &str = "decoding";

#[derive(Debug, Clone)]
pub struct LdeProblem {
    pub m: CMatrix,
    pub b: Vec<Complex64>,
    pub x0: Vec<Complex64>,
    pub t: f64,
    pub k: usize,
}

impl LdeProblem {
    pub fn new(m: CMatrix, b: Vec<Complex64>, x0: Vec<Complex64>, t: f64, k: usize) -> Result<Self> {
        let p = Self { m, b, x0, t, k };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.m.nrows();
        if self.m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: self.m.ncols(),
            });
        }
        if n < 2 {
            return Err(Error::InvalidProblem("dimension must be at least 2".into()));
        }
        log2_exact(n)?;
        for v in [&self.b, &self.x0] {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: v.len(),
                });
            }
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::InvalidProblem(format!("t = {} must be positive", self.t)));
        }
        if self.norm_m() == 0.0 {
            return Err(Error::InvalidProblem("M must be nonzero".into()));
        }
        if linalg::norm(&self.x0) == 0.0 && linalg::norm(&self.b) == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn norm_m(&self) -> f64 {
        spectral_norm(&self.m)
    }

    /// `A = M / ‖M‖`.
    pub fn normalized_operator(&self) -> CMatrix {
        self.m.unscale(self.norm_m())
    }

    /// Fails unless `A` is unitary within `1e-10`.
    pub fn require_unitary(&self) -> Result<CMatrix> {
        let a = self.normalized_operator();
        let deviation = unitarity_deviation(&a);
        if deviation > UNITARY_TOL {
            return Err(Error::NonUnitary {
                label: "A = M/‖M‖".into(),
                deviation,
            });
        }
        Ok(a)
    }

    /// Width `T` of the Taylor-index register.
    pub fn index_qubits(&self) -> usize {
        index_qubits(self.k)
    }

    pub fn total_qubits(&self) -> usize {
        1 + self.index_qubits() + self.dim().trailing_zeros() as usize
    }
}

fn index_qubits(k: usize) -> usize {
    ((k + 1).next_power_of_two().trailing_zeros() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaylorCoefficients {
    /// `C_0 ..= C_k`.
    pub c: Vec<f64>,
    /// `D_1 ..= D_k`.
    pub d: Vec<f64>,
    pub c_bar: f64,
    pub d_bar: f64,
    /// `𝒩` with `𝒩² = C̄² + D̄²`.
    pub nnorm: f64,
}

impl TaylorCoefficients {
    pub fn k(&self) -> usize {
        self.c.len() - 1
    }
}

/// `C_m = ‖x0‖ (‖M‖t)^m / m!` and `D_n = ‖b‖ (‖M‖t)^(n-1) t / n!`.
pub fn taylor_coeffs(p: &LdeProblem) -> Result<TaylorCoefficients> {
    coefficients(linalg::norm(&p.x0), linalg::norm(&p.b), p.norm_m(), p.t, p.k)
}

fn coefficients(x0_norm: f64, b_norm: f64, m_norm: f64, t: f64, k: usize) -> Result<TaylorCoefficients> {
    let s = m_norm * t;
    let mut c = Vec::with_capacity(k + 1);
    let mut d = Vec::with_capacity(k);
    // (s^m / m!) built incrementally so no factorial is ever formed
    let mut term = 1.0;
    c.push(x0_norm);
    for m in 1..=k {
        // D_m = ‖b‖ t s^(m-1)/m! = ‖b‖ t · term / m with term = s^(m-1)/(m-1)!
        d.push(b_norm * t * term / m as f64);
        term *= s / m as f64;
        c.push(x0_norm * term);
    }
    let c_sum: f64 = c.iter().sum();
    let d_sum: f64 = d.iter().sum();
    let nnorm = (c_sum + d_sum).sqrt();
    if !nnorm.is_finite() || c.iter().chain(&d).any(|x| !x.is_finite()) {
        return Err(Error::Overflow(format!("Taylor coefficients overflow at ‖M‖t = {s}, k = {k}")));
    }
    if nnorm == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(TaylorCoefficients {
        c,
        d,
        c_bar: c_sum.sqrt(),
        d_bar: d_sum.sqrt(),
        nnorm,
    })
}

#[derive(Debug, Clone)]
pub struct EncodingGates {
    pub v: CMatrix,
    pub vs1: CMatrix,
    pub vs2: CMatrix,
    pub index_qubits: usize,
}

/// Branch rotation `V` and the two index-spreading unitaries, completed from
/// their fixed first columns with seeded random columns.
pub fn build_encoding(tc: &TaylorCoefficients, seed: u64) -> Result<EncodingGates> {
    let t = index_qubits(tc.k());
    let dim = 1usize << t;
    let mut rng = rng_from_seed(seed);

    let v = linalg::real_matrix(
        2,
        2,
        &[tc.c_bar, tc.d_bar, tc.d_bar, -tc.c_bar].map(|x| x / tc.nnorm),
    );
    let vs1 = spreading(&tc.c, tc.c_bar, dim, &mut rng)?;
    let vs2 = spreading(&tc.d, tc.d_bar, dim, &mut rng)?;
    Ok(EncodingGates {
        v,
        vs1,
        vs2,
        index_qubits: t,
    })
}

fn spreading(weights: &[f64], total: f64, dim: usize, rng: &mut impl Rng) -> Result<CMatrix> {
    if total == 0.0 {
        return Ok(CMatrix::identity(dim, dim));
    }
    if weights.len() > dim {
        return Err(Error::Overflow(format!("{} weights exceed index dimension {dim}", weights.len())));
    }
    let mut first = vec![ZERO; dim];
    for (slot, w) in first.iter_mut().zip(weights) {
        *slot = c(w.sqrt() / total, 0.0);
    }
    complete_unitary(&first, rng)
}

/// `A^0 ..= A^k` by repeated multiplication.
pub fn evolution_blocks(a: &CMatrix, k: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(k + 1);
    let mut acc = CMatrix::identity(a.nrows(), a.ncols());
    out.push(acc.clone());
    for _ in 0..k {
        acc = &acc * a;
        out.push(acc.clone());
    }
    out
}

fn prep_for(v: &[Complex64]) -> Result<Option<Circuit>> {
    if linalg::norm(v) == 0.0 {
        return Ok(None);
    }
    Ok(Some(synthesize_prep(&TargetState::normalized(v)?)?))
}

pub fn build_circuit(p: &LdeProblem, g: &EncodingGates) -> Result<Circuit> {
    let a = p.require_unitary()?;
    let n = log2_exact(p.dim())?;
    let layout = RegisterLayout::new(&[(BRANCH, 1), (INDEX, g.index_qubits), (WORK, n)])?;
    let branch = layout.register(BRANCH)?.offset;
    let index: Vec<usize> = layout.qubits(INDEX)?.collect();
    let mut circuit = Circuit::new(layout);

    circuit.begin_stage(STAGE_ENCODING);
    circuit.push(GateOp::block(BRANCH, g.v.clone(), "V"))?;
    circuit.push(GateOp::controlled_block(vec![branch], 0, INDEX, g.vs1.clone(), "V_S1"))?;
    circuit.push(GateOp::controlled_block(vec![branch], 1, INDEX, g.vs2.clone(), "V_S2"))?;
    if let Some(ux) = prep_for(&p.x0)? {
        circuit.append_embedded(&ux, WORK, &[branch], 0)?;
    }
    if let Some(ub) = prep_for(&p.b)? {
        circuit.append_embedded(&ub, WORK, &[branch], 1)?;
    }

    circuit.begin_stage(STAGE_EVOLUTION);
    for (m, block) in evolution_blocks(&a, p.k).into_iter().enumerate().skip(1) {
        let op = GateOp::controlled_block(index.clone(), m as u64, WORK, block, format!("U_{m}"))
            .with_block_cost(BlockCost::Structured);
        circuit.push(op)?;
    }

    circuit.begin_stage(STAGE_DECODING);
    circuit.push(GateOp::controlled_block(vec![branch], 0, INDEX, g.vs1.adjoint(), "V_S1†"))?;
    circuit.push(GateOp::controlled_block(vec![branch], 1, INDEX, g.vs2.adjoint(), "V_S2†"))?;
    circuit.push(GateOp::block(BRANCH, g.v.adjoint(), "V†"))?;
    Ok(circuit)
}

#[derive(Debug, Clone, Serialize)]
pub struct LdeResult {
    #[serde(serialize_with = "crate::io::serialize_cvec")]
    pub state: Vec<Complex64>,
    pub success_prob: f64,
    /// `‖x_k(t)‖² / 𝒩⁴` from the classical partial sum.
    pub expected_success_prob: f64,
    pub fidelity_vs_oracle: f64,
    pub ledger: GateCountLedger,
}

/// Builds and simulates the circuit, heralding on the all-zero ancillas.
pub fn run(p: &LdeProblem, seed: u64) -> Result<LdeResult> {
    let tc = taylor_coeffs(p)?;
    let gates = build_encoding(&tc, seed)?;
    let circuit = build_circuit(p, &gates)?;
    let (state, ledger) = circuit.run_from_zero()?;
    let (state, p_branch) = state.post_select(BRANCH, 0)?;
    let (state, p_index) = state.post_select(INDEX, 0)?;
    let taylor = classical_taylor(p);
    let expected = linalg::norm(&taylor).powi(2) / tc.nnorm.powi(4);
    let fidelity = linalg::fidelity(state.amplitudes(), &taylor);
    Ok(LdeResult {
        state: state.into_amplitudes(),
        success_prob: p_branch * p_index,
        expected_success_prob: expected,
        fidelity_vs_oracle: fidelity,
        ledger,
    })
}

/// Truncated series `x_k(t)`, unnormalized.
pub fn classical_taylor(p: &LdeProblem) -> Vec<Complex64> {
    let mt = p.m.scale(p.t);
    let mut x = p.x0.clone();
    let mut term = p.x0.clone();
    // b-series term: M^(n-1) t^n / n! b
    let mut bterm: Vec<Complex64> = p.b.iter().map(|v| v * p.t).collect();
    for n in 1..=p.k {
        term = mat_vec(&mt, &term).into_iter().map(|v| v / n as f64).collect();
        for i in 0..x.len() {
            x[i] += term[i] + bterm[i];
        }
        if n < p.k {
            bterm = mat_vec(&mt, &bterm)
                .into_iter()
                .map(|v| v / (n + 1) as f64)
                .collect();
        }
    }
    x
}

/// `e^{Mt} x0 + ∫_0^t e^{Ms} b ds`, via the exponential of the augmented
/// matrix `[[M, b], [0, 0]] · t`, which needs no inverse of `M`.
pub fn classical_exact(p: &LdeProblem) -> Vec<Complex64> {
    let n = p.dim();
    let mut aug = CMatrix::zeros(n + 1, n + 1);
    aug.view_mut((0, 0), (n, n)).copy_from(&p.m.scale(p.t));
    for i in 0..n {
        aug[(i, n)] = p.b[i] * p.t;
    }
    let e = aug.exp();
    let mut input = p.x0.clone();
    input.push(ONE);
    let out = mat_vec(&e, &input);
    out[..n].to_vec()
}

/// Upper bound on `‖x_k(t) − x(t)‖`:
/// `(‖x0‖ s^(k+1) + ‖b‖ t s^k) / (k+1)! · e^s` with `s = ‖M‖t`.
pub fn truncation_bound(p: &LdeProblem) -> f64 {
    let s = p.norm_m() * p.t;
    let mut ratio = 1.0; // s^k / (k+1)!
    for j in 1..=p.k {
        ratio *= s / j as f64;
    }
    ratio /= (p.k + 1) as f64;
    (linalg::norm(&p.x0) * s + linalg::norm(&p.b) * p.t) * ratio * s.exp()
}

/// Random problem with `M = ω U` for a Haar-like unitary `U` and `‖M‖t` in
/// `[0.5, 2]`. `x0` is nonzero; `b` is zero with probability one third.
pub fn random_unitary_problem(n: usize, k: usize, rng: &mut impl Rng) -> LdeProblem {
    let dim = 1usize << n;
    let u = linalg::random_unitary(dim, rng);
    let t = rng.random_range(0.2..1.5);
    let omega = rng.random_range(0.5..2.0) / t;
    let x0: Vec<Complex64> = (0..dim).map(|_| linalg::random_complex(rng)).collect();
    let b: Vec<Complex64> = if rng.random_range(0..3) == 0 {
        vec![ZERO; dim]
    } else {
        let scale = rng.random_range(0.1..1.0);
        (0..dim).map(|_| linalg::random_complex(rng) * scale).collect()
    };
    LdeProblem::new(u.scale(omega), b, x0, t, k).expect("valid by construction")
}

/// `M = 0.5 X`, `t = 1`, `b = 0`, `x0 = |0⟩`; the solution is
/// `(cosh 0.5, sinh 0.5)`.
pub fn pauli_x_problem(k: usize) -> LdeProblem {
    LdeProblem::new(
        linalg::real_matrix(2, 2, &[0.0, 0.5, 0.5, 0.0]),
        vec![ZERO; 2],
        vec![ONE, ZERO],
        1.0,
        k,
    )
    .expect("valid")
}

/// `N² · tridiag(1, -2, 1)`.
pub fn diffusion_matrix(n: usize) -> DMatrix<f64> {
    let scale = (n * n) as f64;
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            -2.0 * scale
        } else if i.abs_diff(j) == 1 {
            scale
        } else {
            0.0
        }
    })
}

/// Exact spectral norm of [`diffusion_matrix`]: `N² · 2(1 − cos(Nπ/(N+1)))`.
pub fn diffusion_norm(n: usize) -> f64 {
    let nf = n as f64;
    nf * nf * 2.0 * (1.0 - (nf * std::f64::consts::PI / (nf + 1.0)).cos())
}

/// Lowest sine mode `sin(π i / (N+1))`, `i = 1..=N`, scaled to `‖x0‖² = N`.
pub fn diffusion_initial_state(n: usize) -> Vec<f64> {
    let nf = n as f64;
    let raw: Vec<f64> = (1..=n)
        .map(|i| (std::f64::consts::PI * i as f64 / (nf + 1.0)).sin())
        .collect();
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    raw.into_iter().map(|x| x * nf.sqrt() / norm).collect()
}

pub const DIFFUSION_DEFAULT_T: f64 = 0.05;
pub const DIFFUSION_DEFAULT_NS: [usize; 4] = [8, 16, 32, 64];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub n: usize,
    pub p: f64,
    /// `p⁻¹ · N · C(Δ, ε)`.
    pub copies: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub k: usize,
    pub t: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub points: Vec<ScalingPoint>,
    pub p_slope: f64,
    pub copies_slope: f64,
}

/// Herald probability `‖x_k(t)‖² / 𝒩⁴` of the diffusion problem at each
/// size, computed classically, with the least-squares slopes of `log p` and
/// `log M` against `log N`.
pub fn success_scaling(k: usize, t: f64, ns: &[usize], delta: f64, epsilon: f64) -> Result<ScalingReport> {
    if ns.len() < 2 {
        return Err(Error::InsufficientData("need at least two sizes for a slope".into()));
    }
    let c_de = sample_constant(delta, epsilon);
    let mut points = Vec::with_capacity(ns.len());
    for &n in ns {
        log2_exact(n)?;
        if n < 2 {
            return Err(Error::InvalidProblem("diffusion needs N >= 2".into()));
        }
        let m = diffusion_matrix(n).map(|x| c(x, 0.0));
        let x0: Vec<Complex64> = diffusion_initial_state(n).into_iter().map(|x| c(x, 0.0)).collect();
        let problem = LdeProblem::new(m, vec![ZERO; n], x0, t, k)?;
        let tc = coefficients(linalg::norm(&problem.x0), 0.0, diffusion_norm(n), t, k)?;
        let p = linalg::norm(&classical_taylor(&problem)).powi(2) / tc.nnorm.powi(4);
        points.push(ScalingPoint {
            n,
            p,
            copies: n as f64 / p * c_de,
        });
    }
    let xs: Vec<f64> = points.iter().map(|q| (q.n as f64).ln()).collect();
    let p_slope = fit_slope(&xs, &points.iter().map(|q| q.p.ln()).collect::<Vec<_>>());
    let copies_slope = fit_slope(&xs, &points.iter().map(|q| q.copies.ln()).collect::<Vec<_>>());
    Ok(ScalingReport {
        k,
        t,
        delta,
        epsilon,
        points,
        p_slope,
        copies_slope,
    })
}

/// Ordinary least-squares slope.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
