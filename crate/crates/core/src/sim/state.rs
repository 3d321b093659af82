use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use super::gate::{hadamard, phase, Gate2, GateKind, GateOp};
use super::layout::RegisterLayout;
use crate::linalg::{self, rng_from_seed, CMatrix, NORM_TOL, ZERO};
use crate::{Error, Result};

/// Outcome histogram keyed by basis index.
pub type Histogram = BTreeMap<usize, u64>;

/// Below this a post-selected branch is treated as empty.
const EMPTY_BRANCH: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: RegisterLayout,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(layout: RegisterLayout) -> Self {
        Self::basis(layout, 0)
    }

    pub fn basis(layout: RegisterLayout, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; layout.dim()];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { layout, amplitudes }
    }

    /// Wraps amplitudes after checking length and unit norm (within `1e-12`).
    pub fn from_amplitudes(layout: RegisterLayout, amplitudes: Vec<Complex64>) -> Result<Self> {
        let state = Self::from_raw(layout, amplitudes)?;
        let n = state.norm();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(state)
    }

    /// Wraps amplitudes without a norm check. Gates act linearly, so this is
    /// useful for superposing unnormalized vectors.
    pub fn from_raw(layout: RegisterLayout, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                actual: amplitudes.len(),
            });
        }
        Ok(Self { layout, amplitudes })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amplitudes)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn fidelity(&self, other: &StateVector) -> f64 {
        linalg::fidelity(&self.amplitudes, &other.amplitudes)
    }

    /// Marginal outcome probabilities of one register.
    pub fn register_probabilities(&self, register: &str) -> Result<Vec<f64>> {
        let reg = self.layout.register(register)?;
        let mut out = vec![0.0; 1 << reg.width];
        for (i, a) in self.amplitudes.iter().enumerate() {
            out[reg.value_of(i)] += a.norm_sqr();
        }
        Ok(out)
    }

    /// Applies `op`, validating it against this state's layout first.
    pub fn apply(&mut self, op: &GateOp) -> Result<()> {
        op.validate(&self.layout, linalg::UNITARY_TOL)?;
        self.apply_unchecked(op)
    }

    fn apply_unchecked(&mut self, op: &GateOp) -> Result<()> {
        match &op.kind {
            GateKind::Single { target, matrix } => self.apply_2x2(*target, matrix, 0, 0),
            GateKind::Controlled {
                controls,
                ctrl_state,
                target,
                matrix,
            } => {
                let (mask, value) = control_pattern(controls, *ctrl_state);
                self.apply_2x2(*target, matrix, mask, value);
            }
            GateKind::Block {
                register, matrix, ..
            } => self.apply_block(register, matrix, 0, 0)?,
            GateKind::ControlledBlock {
                controls,
                ctrl_state,
                register,
                matrix,
                ..
            } => {
                let (mask, value) = control_pattern(controls, *ctrl_state);
                self.apply_block(register, matrix, mask, value)?;
            }
            GateKind::Qft { register, inverse } => {
                let qubits: Vec<usize> = self.layout.qubits(register)?.collect();
                let steps = qft_decomposition(&qubits, *inverse);
                for s in &steps {
                    match *s {
                        QftStep::H(q) => self.apply_2x2(q, &hadamard(), 0, 0),
                        QftStep::Phase {
                            control,
                            target,
                            angle,
                        } => self.apply_2x2(target, &phase(angle), 1 << control, 1 << control),
                        QftStep::Swap(a, b) => self.swap(a, b),
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies the Fourier transform on `register`; returns the elementary
    /// cost charged for it.
    pub fn qft(&mut self, register: &str) -> Result<u64> {
        self.fourier(register, false)
    }

    pub fn iqft(&mut self, register: &str) -> Result<u64> {
        self.fourier(register, true)
    }

    fn fourier(&mut self, register: &str, inverse: bool) -> Result<u64> {
        let op = GateOp::qft(register, inverse);
        self.apply(&op)?;
        super::gate::elementary_cost(&op, &self.layout)
    }

    fn apply_2x2(&mut self, target: usize, m: &Gate2, cmask: usize, cval: usize) {
        let bit = 1usize << target;
        for i in 0..self.amplitudes.len() {
            if i & bit != 0 || i & cmask != cval {
                continue;
            }
            let j = i | bit;
            let a0 = self.amplitudes[i];
            let a1 = self.amplitudes[j];
            self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
            self.amplitudes[j] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (ba, bb) = (1usize << a, 1usize << b);
        for i in 0..self.amplitudes.len() {
            if i & ba != 0 && i & bb == 0 {
                self.amplitudes.swap(i, (i & !ba) | bb);
            }
        }
    }

    fn apply_block(&mut self, register: &str, m: &CMatrix, cmask: usize, cval: usize) -> Result<()> {
        let reg = self.layout.register(register)?.clone();
        let rmask = reg.mask();
        let dim = 1usize << reg.width;
        let mut buf = vec![ZERO; dim];
        for base in 0..self.amplitudes.len() {
            if base & rmask != 0 || base & cmask != cval {
                continue;
            }
            for (v, slot) in buf.iter_mut().enumerate() {
                *slot = self.amplitudes[base | (v << reg.offset)];
            }
            for r in 0..dim {
                let mut acc = ZERO;
                for (col, x) in buf.iter().enumerate() {
                    acc += m[(r, col)] * x;
                }
                self.amplitudes[base | (r << reg.offset)] = acc;
            }
        }
        Ok(())
    }

    /// Projects `register` onto `outcome` and returns the renormalized state
    /// of the remaining registers together with the outcome probability.
    pub fn post_select(&self, register: &str, outcome: usize) -> Result<(StateVector, f64)> {
        let reg = self.layout.register(register)?.clone();
        if outcome >> reg.width != 0 {
            return Err(Error::DimensionMismatch {
                expected: reg.width,
                actual: usize::BITS as usize - outcome.leading_zeros() as usize,
            });
        }
        let rest = self.layout.without(register)?;
        let low_mask = (1usize << reg.offset) - 1;
        let mut out = vec![ZERO; rest.dim()];
        let mut prob = 0.0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            if reg.value_of(i) != outcome {
                continue;
            }
            let squeezed = (i & low_mask) | ((i >> (reg.offset + reg.width)) << reg.offset);
            out[squeezed] = *a;
            prob += a.norm_sqr();
        }
        if prob < EMPTY_BRANCH {
            return Err(Error::HeraldingFailed(prob));
        }
        let scale = prob.sqrt();
        for a in &mut out {
            *a /= scale;
        }
        Ok((StateVector::from_raw(rest, out)?, prob))
    }

    /// Draws `shots` i.i.d. basis outcomes; deterministic in `seed`.
    pub fn sample(&self, shots: u64, seed: u64) -> Histogram {
        let sampler = Sampler::new(&self.probabilities());
        let mut rng = rng_from_seed(seed);
        let mut hist = Histogram::new();
        for _ in 0..shots {
            *hist.entry(sampler.draw(&mut rng)).or_default() += 1;
        }
        hist
    }
}

fn control_pattern(controls: &[usize], ctrl_state: u64) -> (usize, usize) {
    let mut mask = 0;
    let mut value = 0;
    for (i, &q) in controls.iter().enumerate() {
        mask |= 1 << q;
        if (ctrl_state >> i) & 1 == 1 {
            value |= 1 << q;
        }
    }
    (mask, value)
}

/// Primitive of the Fourier-transform decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QftStep {
    H(usize),
    Phase {
        control: usize,
        target: usize,
        angle: f64,
    },
    Swap(usize, usize),
}

impl QftStep {
    fn invert(&mut self) {
        if let QftStep::Phase { angle, .. } = self {
            *angle = -*angle;
        }
    }
}

/// Steps actually executed for a forward or inverse transform on `qubits`
/// (least significant first).
pub fn qft_decomposition(qubits: &[usize], inverse: bool) -> Vec<QftStep> {
    let mut steps = qft_steps(qubits);
    if inverse {
        steps.reverse();
        for s in &mut steps {
            s.invert();
        }
    }
    steps
}

/// Textbook decomposition: Hadamard on each qubit from the most significant
/// down, controlled phases `pi / 2^(i-j)` from every lower qubit, then the
/// bit-reversal swaps.
fn qft_steps(qubits: &[usize]) -> Vec<QftStep> {
    let w = qubits.len();
    let mut steps = Vec::new();
    for i in (0..w).rev() {
        steps.push(QftStep::H(qubits[i]));
        for j in (0..i).rev() {
            steps.push(QftStep::Phase {
                control: qubits[j],
                target: qubits[i],
                angle: std::f64::consts::PI / (1u64 << (i - j)) as f64,
            });
        }
    }
    for i in 0..w / 2 {
        steps.push(QftStep::Swap(qubits[i], qubits[w - 1 - i]));
    }
    steps
}

/// Inverse-CDF sampler over a discrete distribution.
#[derive(Debug, Clone)]
pub struct Sampler {
    cumulative: Vec<f64>,
}

impl Sampler {
    pub fn new(probabilities: &[f64]) -> Self {
        let mut acc = 0.0;
        let cumulative = probabilities
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Self { cumulative }
    }

    pub fn draw(&self, rng: &mut impl Rng) -> usize {
        let total = *self.cumulative.last().unwrap_or(&0.0);
        let r = rng.random::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= r);
        // skip zero-probability tail entries reached through rounding
        idx.min(self.last_nonzero())
    }

    fn last_nonzero(&self) -> usize {
        let mut i = self.cumulative.len() - 1;
        while i > 0 && self.cumulative[i] == self.cumulative[i - 1] {
            i -= 1;
        }
        i
    }
}

/// Dense matrix of an op acting on a full layout, built column by column.
pub fn full_unitary(op: &GateOp, layout: &RegisterLayout) -> Result<CMatrix> {
    let dim = layout.dim();
    let mut out = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut s = StateVector::basis(layout.clone(), col);
        s.apply(op)?;
        for (r, a) in s.amplitudes.iter().enumerate() {
            out[(r, col)] = *a;
        }
    }
    Ok(out)
}


#[cfg(test)]
mod tests {
    use super::super::gate::{gate2_to_matrix, pauli_x, ry};
    use super::*;
    use crate::linalg::{c, max_abs_diff, random_state};
    use proptest::prelude::*;

    fn two_qubits() -> RegisterLayout {
        RegisterLayout::single("q", 2).unwrap()
    }

    #[test]
    fn x_on_qubit_zero_flips_lowest_bit() {
        let mut s = StateVector::zero(two_qubits());
        s.apply(&GateOp::single(0, pauli_x(), "x")).unwrap();
        assert_eq!(s.amplitudes()[1], c(1.0, 0.0));
    }

    #[test]
    fn hadamard_makes_plus_state() {
        let mut s = StateVector::zero(RegisterLayout::single("q", 1).unwrap());
        s.apply(&GateOp::single(0, hadamard(), "h")).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0] - c(r, 0.0)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(r, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn cnot_entangles() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // (|10> + |00>)/sqrt2 -> (|11> + |00>)/sqrt2 with control q1, target q0
        let amps = vec![c(r, 0.0), ZERO, c(r, 0.0), ZERO];
        let mut s = StateVector::from_amplitudes(two_qubits(), amps).unwrap();
        s.apply(&GateOp::controlled_on_ones(vec![1], 0, pauli_x(), "cx")).unwrap();
        assert!((s.amplitudes()[0] - c(r, 0.0)).norm() < 1e-15);
        assert!((s.amplitudes()[3] - c(r, 0.0)).norm() < 1e-15);
        assert!(s.amplitudes()[2].norm() < 1e-15);
    }

    #[test]
    fn zero_controls_follow_ctrl_state() {
        let mut s = StateVector::zero(two_qubits());
        s.apply(&GateOp::controlled(vec![1], 0, 0, pauli_x(), "x-on-0")).unwrap();
        assert_eq!(s.amplitudes()[1], c(1.0, 0.0));
    }

    #[test]
    fn qft_one_qubit_is_hadamard() {
        let l = RegisterLayout::single("r", 1).unwrap();
        let q = full_unitary(&GateOp::qft("r", false), &l).unwrap();
        assert!(max_abs_diff(&q, &gate2_to_matrix(&hadamard())) < 1e-15);
    }

    #[test]
    fn qft_matches_dft_matrix() {
        for w in 1..=5usize {
            let l = RegisterLayout::single("r", w).unwrap();
            let q = full_unitary(&GateOp::qft("r", false), &l).unwrap();
            let n = 1usize << w;
            // QFT|j> = n^{-1/2} sum_k e^{2 pi i jk/n} |k>: entry (k, j)
            let dft = CMatrix::from_fn(n, n, |k, j| {
                Complex64::from_polar(
                    1.0 / (n as f64).sqrt(),
                    2.0 * std::f64::consts::PI * ((j * k) % n) as f64 / n as f64,
                )
            });
            assert!(max_abs_diff(&q, &dft) < 1e-12, "w = {w}");
            assert!(linalg::unitarity_deviation(&q) < 1e-12);
        }
    }

    #[test]
    fn qft_two_qubits_powers_of_i() {
        let l = RegisterLayout::single("r", 2).unwrap();
        let q = full_unitary(&GateOp::qft("r", false), &l).unwrap();
        let i = c(0.0, 1.0);
        for j in 0..4 {
            for k in 0..4 {
                let expected = i.powu((j * k) as u32) * 0.5;
                assert!((q[(k, j)] - expected).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn qft_inverse_round_trip() {
        let mut rng = rng_from_seed(42);
        for trial in 0..100 {
            let w = 1 + trial % 4;
            let l = RegisterLayout::new(&[("a", 1), ("r", w)]).unwrap();
            let amps = random_state(l.dim(), &mut rng);
            let mut s = StateVector::from_amplitudes(l.clone(), amps.clone()).unwrap();
            assert_eq!(s.qft("r").unwrap(), super::super::qft_cost(w));
            s.iqft("r").unwrap();
            let err = s
                .amplitudes()
                .iter()
                .zip(&amps)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err <= 1e-12);
        }
    }

    #[test]
    fn post_select_equal_branches() {
        let l = RegisterLayout::new(&[("flag", 1), ("work", 1)]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // flag=0 with work |0>, flag=1 with work |1>
        let amps = vec![c(r, 0.0), ZERO, ZERO, c(r, 0.0)];
        let s = StateVector::from_amplitudes(l, amps).unwrap();
        let (rest, p) = s.post_select("flag", 0).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert_eq!(rest.layout().total_qubits(), 1);
        assert!((rest.amplitudes()[0] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn post_select_identity_case_and_empty_branch() {
        let l = RegisterLayout::new(&[("a", 2), ("b", 1)]).unwrap();
        let mut s = StateVector::zero(l);
        s.apply(&GateOp::single(2, hadamard(), "h")).unwrap();
        let (rest, p) = s.post_select("a", 0).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        assert!((rest.amplitudes()[1].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(matches!(s.post_select("a", 3), Err(Error::HeraldingFailed(_))));
    }

    #[test]
    fn sampling_basis_and_determinism() {
        let l = RegisterLayout::single("q", 3).unwrap();
        let s = StateVector::basis(l, 5);
        let h = s.sample(1000, 1);
        assert_eq!(h.len(), 1);
        assert_eq!(h[&5], 1000);

        let mut rng = rng_from_seed(9);
        let u = StateVector::from_amplitudes(two_qubits(), random_state(4, &mut rng)).unwrap();
        assert_eq!(u.sample(500, 77), u.sample(500, 77));
    }

    #[test]
    fn uniform_sampling_within_five_sigma() {
        let half = c(0.5, 0.0);
        let s = StateVector::from_amplitudes(two_qubits(), vec![half; 4]).unwrap();
        let shots = 100_000u64;
        let h = s.sample(shots, 2024);
        assert_eq!(h.values().sum::<u64>(), shots);
        let sigma = (0.25f64 * 0.75 / shots as f64).sqrt();
        for k in 0..4 {
            let f = h[&k] as f64 / shots as f64;
            assert!((f - 0.25).abs() <= 5.0 * sigma, "outcome {k}: {f}");
        }
    }

    fn random_op(kind: u8, angle: f64, rng_seed: u64) -> GateOp {
        let mut rng = rng_from_seed(rng_seed);
        match kind % 5 {
            0 => GateOp::single(0, ry(angle), "ry"),
            1 => GateOp::controlled(vec![2, 0], 0b10, 1, ry(angle), "ccry"),
            2 => GateOp::block("hi", linalg::random_unitary(4, &mut rng), "blk"),
            3 => GateOp::controlled_block(vec![0], 1, "hi", linalg::random_unitary(4, &mut rng), "cblk"),
            _ => GateOp::qft("hi", angle > 0.0),
        }
    }

    fn layout3() -> RegisterLayout {
        RegisterLayout::new(&[("lo", 1), ("hi", 2)]).unwrap()
    }

    proptest! {
        #[test]
        fn norm_is_preserved(seed in 0u64..1000, kinds in proptest::collection::vec(0u8..5, 1..12), angle in -3.0f64..3.0) {
            let mut rng = rng_from_seed(seed);
            let mut s = StateVector::from_amplitudes(layout3(), random_state(8, &mut rng)).unwrap();
            for (i, k) in kinds.iter().enumerate() {
                s.apply(&random_op(*k, angle, seed + i as u64)).unwrap();
                prop_assert!((s.norm() - 1.0).abs() <= 1e-12);
            }
        }

        #[test]
        fn application_is_linear(seed in 0u64..1000, kind in 0u8..5, angle in -3.0f64..3.0,
                                 ar in -2.0f64..2.0, ai in -2.0f64..2.0, br in -2.0f64..2.0) {
            let mut rng = rng_from_seed(seed);
            let s1 = random_state(8, &mut rng);
            let s2 = random_state(8, &mut rng);
            let (alpha, beta) = (c(ar, ai), c(br, 0.3));
            let op = random_op(kind, angle, seed);
            let mix: Vec<_> = s1.iter().zip(&s2).map(|(x, y)| alpha * x + beta * y).collect();
            let mut lhs = StateVector::from_raw(layout3(), mix).unwrap();
            lhs.apply(&op).unwrap();
            let mut t1 = StateVector::from_raw(layout3(), s1).unwrap();
            let mut t2 = StateVector::from_raw(layout3(), s2).unwrap();
            t1.apply(&op).unwrap();
            t2.apply(&op).unwrap();
            for i in 0..8 {
                let rhs = alpha * t1.amplitudes()[i] + beta * t2.amplitudes()[i];
                prop_assert!((lhs.amplitudes()[i] - rhs).norm() <= 1e-12);
            }
        }

        #[test]
        fn post_select_probabilities_sum_to_one(seed in 0u64..1000) {
            let mut rng = rng_from_seed(seed);
            let s = StateVector::from_amplitudes(layout3(), random_state(8, &mut rng)).unwrap();
            let total: f64 = (0..4).map(|o| s.post_select("hi", o).map(|(_, p)| p).unwrap_or(0.0)).sum();
            prop_assert!((total - 1.0).abs() <= 1e-12);
        }
    }
}
