use num_complex::Complex64;
use serde_json::{json, Value};

use super::layout::RegisterLayout;
use crate::linalg::{c, check_unitary, CMatrix, ONE, ZERO};
use crate::{Error, Result};

/// A 2x2 complex matrix, row major.
pub type Gate2 = [[Complex64; 2]; 2];

/// How a dense block unitary is charged in the ledger.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockCost {
    /// Generic two-level decomposition: `2^(w+1)` for a `w`-qubit block.
    Generic,
    /// The block stands for an operator assumed to act as `w` one-qubit-wide
    /// steps, each inheriting the controls linearly: `max(k, 1) * w`.
    Structured,
}

#[derive(Debug, Clone)]
pub enum GateKind {
    Single {
        target: usize,
        matrix: Gate2,
    },
    /// Applies `matrix` to `target` when control `i` reads bit `i` of
    /// `ctrl_state`.
    Controlled {
        controls: Vec<usize>,
        ctrl_state: u64,
        target: usize,
        matrix: Gate2,
    },
    Block {
        register: String,
        matrix: CMatrix,
        cost: BlockCost,
    },
    ControlledBlock {
        controls: Vec<usize>,
        ctrl_state: u64,
        register: String,
        matrix: CMatrix,
        cost: BlockCost,
    },
    /// Quantum Fourier transform (or its inverse) on a whole register,
    /// executed through its H / controlled-phase / swap decomposition.
    Qft { register: String, inverse: bool },
}

#[derive(Debug, Clone)]
pub struct GateOp {
    pub kind: GateKind,
    pub label: String,
}

pub fn hadamard() -> Gate2 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]]
}

pub fn pauli_x() -> Gate2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

/// `exp(-i theta Y / 2)`.
pub fn ry(theta: f64) -> Gate2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
}

/// `diag(1, e^{i phi})`.
pub fn phase(phi: f64) -> Gate2 {
    [[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, phi)]]
}

pub fn gate2_to_matrix(g: &Gate2) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[g[0][0], g[0][1], g[1][0], g[1][1]])
}

pub fn gate2_adjoint(g: &Gate2) -> Gate2 {
    [
        [g[0][0].conj(), g[1][0].conj()],
        [g[0][1].conj(), g[1][1].conj()],
    ]
}

/// Cost of the Fourier transform on `w` qubits: `w` Hadamards,
/// `w(w-1)/2` controlled phases and `floor(w/2)` swaps.
pub fn qft_cost(w: usize) -> u64 {
    let w = w as u64;
    w * (w + 1) / 2 + w / 2
}

fn controlled_single_cost(k: usize) -> u64 {
    let k = k as u64;
    (k * k).max(1)
}

fn block_cost(cost: BlockCost, controls: usize, width: usize) -> u64 {
    match cost {
        BlockCost::Generic => {
            let k = controls as u64;
            let w = width as u64;
            let base = 1u64 << (w + 1);
            if k == 0 {
                base
            } else {
                (k + w) * (k + w) * base
            }
        }
        BlockCost::Structured => (controls.max(1) * width) as u64,
    }
}

/// Elementary gate count charged for one application of `op` on `layout`.
///
/// Single-qubit gates cost 1, a `k`-controlled single-qubit gate `k^2`,
/// blocks follow their [`BlockCost`] class and a `w`-qubit Fourier
/// transform costs [`qft_cost`].
pub fn elementary_cost(op: &GateOp, layout: &RegisterLayout) -> Result<u64> {
    Ok(match &op.kind {
        GateKind::Single { .. } => 1,
        GateKind::Controlled { controls, .. } => controlled_single_cost(controls.len()),
        GateKind::Block { register, cost, .. } => {
            block_cost(*cost, 0, layout.register(register)?.width)
        }
        GateKind::ControlledBlock {
            controls,
            register,
            cost,
            ..
        } => block_cost(*cost, controls.len(), layout.register(register)?.width),
        GateKind::Qft { register, .. } => qft_cost(layout.register(register)?.width),
    })
}

impl GateOp {
    pub fn single(target: usize, matrix: Gate2, label: impl Into<String>) -> Self {
        Self {
            kind: GateKind::Single { target, matrix },
            label: label.into(),
        }
    }

    pub fn controlled(
        controls: Vec<usize>,
        ctrl_state: u64,
        target: usize,
        matrix: Gate2,
        label: impl Into<String>,
    ) -> Self {
        Self {
            kind: GateKind::Controlled {
                controls,
                ctrl_state,
                target,
                matrix,
            },
            label: label.into(),
        }
    }

    /// Controlled-`matrix` with every control required to read 1.
    pub fn controlled_on_ones(
        controls: Vec<usize>,
        target: usize,
        matrix: Gate2,
        label: impl Into<String>,
    ) -> Self {
        let ctrl_state = (1u64 << controls.len()) - 1;
        Self::controlled(controls, ctrl_state, target, matrix, label)
    }

    pub fn block(register: impl Into<String>, matrix: CMatrix, label: impl Into<String>) -> Self {
        Self {
            kind: GateKind::Block {
                register: register.into(),
                matrix,
                cost: BlockCost::Generic,
            },
            label: label.into(),
        }
    }

    pub fn controlled_block(
        controls: Vec<usize>,
        ctrl_state: u64,
        register: impl Into<String>,
        matrix: CMatrix,
        label: impl Into<String>,
    ) -> Self {
        Self {
            kind: GateKind::ControlledBlock {
                controls,
                ctrl_state,
                register: register.into(),
                matrix,
                cost: BlockCost::Generic,
            },
            label: label.into(),
        }
    }

    pub fn qft(register: impl Into<String>, inverse: bool) -> Self {
        Self {
            label: if inverse { "iqft" } else { "qft" }.into(),
            kind: GateKind::Qft {
                register: register.into(),
                inverse,
            },
        }
    }

    /// Switches a block op to another cost class; other kinds are unchanged.
    pub fn with_block_cost(mut self, class: BlockCost) -> Self {
        match &mut self.kind {
            GateKind::Block { cost, .. } | GateKind::ControlledBlock { cost, .. } => *cost = class,
            _ => {}
        }
        self
    }

    pub fn controls(&self) -> &[usize] {
        match &self.kind {
            GateKind::Controlled { controls, .. } | GateKind::ControlledBlock { controls, .. } => {
                controls
            }
            _ => &[],
        }
    }

    /// Qubits acted on (excluding controls).
    pub fn targets(&self, layout: &RegisterLayout) -> Result<Vec<usize>> {
        Ok(match &self.kind {
            GateKind::Single { target, .. } | GateKind::Controlled { target, .. } => vec![*target],
            GateKind::Block { register, .. }
            | GateKind::ControlledBlock { register, .. }
            | GateKind::Qft { register, .. } => layout.qubits(register)?.collect(),
        })
    }

    pub fn validate(&self, layout: &RegisterLayout, tol: f64) -> Result<()> {
        let total = layout.total_qubits();
        let targets = self.targets(layout)?;
        let controls = self.controls();
        for &q in targets.iter().chain(controls) {
            if q >= total {
                return Err(Error::QubitOutOfRange { index: q, total });
            }
        }
        for (i, q) in controls.iter().enumerate() {
            if targets.contains(q) || controls[..i].contains(q) {
                return Err(Error::ControlTargetOverlap);
            }
        }
        if controls.len() > 63 {
            return Err(Error::InvalidLayout("too many controls".into()));
        }
        match &self.kind {
            GateKind::Single { matrix, .. } | GateKind::Controlled { matrix, .. } => {
                check_unitary(&gate2_to_matrix(matrix), &self.label, tol)
            }
            GateKind::Block {
                register, matrix, ..
            }
            | GateKind::ControlledBlock {
                register, matrix, ..
            } => {
                let dim = 1usize << layout.register(register)?.width;
                if matrix.nrows() != dim || matrix.ncols() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        actual: matrix.nrows(),
                    });
                }
                check_unitary(matrix, &self.label, tol)
            }
            GateKind::Qft { .. } => Ok(()),
        }
    }

    /// The inverse operation.
    pub fn adjoint(&self) -> Self {
        let kind = match &self.kind {
            GateKind::Single { target, matrix } => GateKind::Single {
                target: *target,
                matrix: gate2_adjoint(matrix),
            },
            GateKind::Controlled {
                controls,
                ctrl_state,
                target,
                matrix,
            } => GateKind::Controlled {
                controls: controls.clone(),
                ctrl_state: *ctrl_state,
                target: *target,
                matrix: gate2_adjoint(matrix),
            },
            GateKind::Block {
                register,
                matrix,
                cost,
            } => GateKind::Block {
                register: register.clone(),
                matrix: matrix.adjoint(),
                cost: *cost,
            },
            GateKind::ControlledBlock {
                controls,
                ctrl_state,
                register,
                matrix,
                cost,
            } => GateKind::ControlledBlock {
                controls: controls.clone(),
                ctrl_state: *ctrl_state,
                register: register.clone(),
                matrix: matrix.adjoint(),
                cost: *cost,
            },
            GateKind::Qft { register, inverse } => GateKind::Qft {
                register: register.clone(),
                inverse: !inverse,
            },
        };
        Self {
            kind,
            label: format!("{}^dag", self.label),
        }
    }

    /// Adds controls in front of the existing ones. `ctrl_state` gives the
    /// required values of the new controls.
    pub fn with_extra_controls(&self, extra: &[usize], extra_state: u64) -> Result<Self> {
        let k = extra.len();
        let kind = match &self.kind {
            GateKind::Single { target, matrix } => GateKind::Controlled {
                controls: extra.to_vec(),
                ctrl_state: extra_state,
                target: *target,
                matrix: *matrix,
            },
            GateKind::Controlled {
                controls,
                ctrl_state,
                target,
                matrix,
            } => GateKind::Controlled {
                controls: extra.iter().chain(controls).copied().collect(),
                ctrl_state: extra_state | (ctrl_state << k),
                target: *target,
                matrix: *matrix,
            },
            GateKind::Block {
                register,
                matrix,
                cost,
            } => GateKind::ControlledBlock {
                controls: extra.to_vec(),
                ctrl_state: extra_state,
                register: register.clone(),
                matrix: matrix.clone(),
                cost: *cost,
            },
            GateKind::ControlledBlock {
                controls,
                ctrl_state,
                register,
                matrix,
                cost,
            } => GateKind::ControlledBlock {
                controls: extra.iter().chain(controls).copied().collect(),
                ctrl_state: extra_state | (ctrl_state << k),
                register: register.clone(),
                matrix: matrix.clone(),
                cost: *cost,
            },
            GateKind::Qft { .. } => {
                return Err(Error::InvalidProblem(
                    "controlled Fourier transforms are not supported".into(),
                ))
            }
        };
        Ok(Self {
            kind,
            label: self.label.clone(),
        })
    }

    /// Relabels qubits through `qubit_map` and registers through `register_map`.
    pub fn remapped(
        &self,
        qubit_map: impl Fn(usize) -> usize,
        register_map: impl Fn(&str) -> String,
    ) -> Self {
        let kind = match &self.kind {
            GateKind::Single { target, matrix } => GateKind::Single {
                target: qubit_map(*target),
                matrix: *matrix,
            },
            GateKind::Controlled {
                controls,
                ctrl_state,
                target,
                matrix,
            } => GateKind::Controlled {
                controls: controls.iter().map(|&q| qubit_map(q)).collect(),
                ctrl_state: *ctrl_state,
                target: qubit_map(*target),
                matrix: *matrix,
            },
            GateKind::Block {
                register,
                matrix,
                cost,
            } => GateKind::Block {
                register: register_map(register),
                matrix: matrix.clone(),
                cost: *cost,
            },
            GateKind::ControlledBlock {
                controls,
                ctrl_state,
                register,
                matrix,
                cost,
            } => GateKind::ControlledBlock {
                controls: controls.iter().map(|&q| qubit_map(q)).collect(),
                ctrl_state: *ctrl_state,
                register: register_map(register),
                matrix: matrix.clone(),
                cost: *cost,
            },
            GateKind::Qft { register, inverse } => GateKind::Qft {
                register: register_map(register),
                inverse: *inverse,
            },
        };
        Self {
            kind,
            label: self.label.clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        fn mat(m: &CMatrix) -> Value {
            Value::Array(
                (0..m.nrows())
                    .map(|r| {
                        Value::Array(
                            (0..m.ncols())
                                .map(|col| json!([m[(r, col)].re, m[(r, col)].im]))
                                .collect(),
                        )
                    })
                    .collect(),
            )
        }
        match &self.kind {
            GateKind::Single { target, matrix } => json!({
                "label": self.label, "kind": "single", "target": target,
                "matrix": mat(&gate2_to_matrix(matrix)),
            }),
            GateKind::Controlled {
                controls,
                ctrl_state,
                target,
                matrix,
            } => json!({
                "label": self.label, "kind": "controlled", "controls": controls,
                "ctrl_state": ctrl_state, "target": target,
                "matrix": mat(&gate2_to_matrix(matrix)),
            }),
            GateKind::Block {
                register, matrix, ..
            } => json!({
                "label": self.label, "kind": "block", "register": register,
                "matrix": mat(matrix),
            }),
            GateKind::ControlledBlock {
                controls,
                ctrl_state,
                register,
                matrix,
                ..
            } => json!({
                "label": self.label, "kind": "controlled_block", "controls": controls,
                "ctrl_state": ctrl_state, "register": register, "matrix": mat(matrix),
            }),
            GateKind::Qft { register, inverse } => json!({
                "label": self.label, "kind": if *inverse { "iqft" } else { "qft" },
                "register": register,
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout() -> RegisterLayout {
        RegisterLayout::new(&[("a", 1), ("b", 1), ("c", 1)]).unwrap()
    }

    #[test]
    fn cost_rule_examples() {
        let l = layout();
        assert_eq!(elementary_cost(&GateOp::single(0, hadamard(), "h"), &l).unwrap(), 1);
        let toffoli = GateOp::controlled_on_ones(vec![0, 1], 2, pauli_x(), "ccx");
        assert_eq!(elementary_cost(&toffoli, &l).unwrap(), 4);
        let cx = GateOp::controlled_on_ones(vec![0], 2, pauli_x(), "cx");
        assert_eq!(elementary_cost(&cx, &l).unwrap(), 1);
        assert_eq!(elementary_cost(&GateOp::qft("a", false), &l).unwrap(), 1);
    }

    #[test]
    fn controlled_block_cost_formula() {
        // (k + w)^2 * 2^(w+1) at k = w = 1
        let l = layout();
        let op = GateOp::controlled_block(vec![0], 1, "b", gate2_to_matrix(&hadamard()), "cb");
        assert_eq!(elementary_cost(&op, &l).unwrap(), 16);
        let block = GateOp::block("b", gate2_to_matrix(&hadamard()), "b");
        assert_eq!(elementary_cost(&block, &l).unwrap(), 4);
        let structured = GateOp::controlled_block(vec![0, 1], 3, "c", gate2_to_matrix(&hadamard()), "s")
            .with_block_cost(BlockCost::Structured);
        assert_eq!(elementary_cost(&structured, &l).unwrap(), 2);
    }

    #[test]
    fn qft_cost_formula() {
        let expected = [0, 1, 4, 7, 12, 17];
        for (w, e) in expected.iter().enumerate() {
            assert_eq!(qft_cost(w), *e);
        }
    }

    #[test]
    fn validation_errors() {
        let l = layout();
        let bad = [[ONE, ONE], [ZERO, ONE]];
        assert!(matches!(
            GateOp::single(0, bad, "bad").validate(&l, 1e-10),
            Err(Error::NonUnitary { .. })
        ));
        assert!(matches!(
            GateOp::single(5, hadamard(), "h").validate(&l, 1e-10),
            Err(Error::QubitOutOfRange { .. })
        ));
        assert!(matches!(
            GateOp::controlled_on_ones(vec![1], 1, pauli_x(), "cx").validate(&l, 1e-10),
            Err(Error::ControlTargetOverlap)
        ));
        assert!(matches!(
            GateOp::block("zz", gate2_to_matrix(&hadamard()), "b").validate(&l, 1e-10),
            Err(Error::UnknownRegister(_))
        ));
    }

    #[test]
    fn extra_controls_shift_ctrl_state() {
        let op = GateOp::controlled(vec![2], 0, 1, pauli_x(), "x");
        let wrapped = op.with_extra_controls(&[0], 1).unwrap();
        match wrapped.kind {
            GateKind::Controlled {
                controls,
                ctrl_state,
                ..
            } => {
                assert_eq!(controls, vec![0, 2]);
                assert_eq!(ctrl_state, 0b01);
            }
            _ => panic!("expected controlled"),
        }
    }
}
