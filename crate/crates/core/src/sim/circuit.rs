use serde_json::{json, Value};

use super::gate::{elementary_cost, BlockCost, GateOp};
use super::layout::RegisterLayout;
use super::ledger::GateCountLedger;
use super::state::StateVector;
use crate::linalg::UNITARY_TOL;
use crate::{Error, Result};

/// Named stage boundary: ops from `start` up to the next mark belong to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageMark {
    pub name: String,
    pub start: usize,
}

#[derive(Debug, Clone)]
pub struct Circuit {
    layout: RegisterLayout,
    ops: Vec<GateOp>,
    stages: Vec<StageMark>,
    tolerance: f64,
}

impl Circuit {
    pub fn new(layout: RegisterLayout) -> Self {
        Self {
            layout,
            ops: Vec::new(),
            stages: Vec::new(),
            tolerance: UNITARY_TOL,
        }
    }

    /// Overrides the unitarity tolerance used to validate pushed ops.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn stages(&self) -> &[StageMark] {
        &self.stages
    }

    /// Starts a new stage; subsequent ops are attributed to it.
    pub fn begin_stage(&mut self, name: impl Into<String>) {
        self.stages.push(StageMark {
            name: name.into(),
            start: self.ops.len(),
        });
    }

    pub fn stage_of(&self, index: usize) -> Option<&str> {
        self.stages
            .iter()
            .rev()
            .find(|m| m.start <= index)
            .map(|m| m.name.as_str())
    }

    /// Validates and appends an op.
    pub fn push(&mut self, op: GateOp) -> Result<()> {
        op.validate(&self.layout, self.tolerance)?;
        self.ops.push(op);
        Ok(())
    }

    /// Appends every op of `other` (same layout), keeping its stage marks.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.layout != self.layout {
            return Err(Error::InvalidLayout("appending a circuit with a different layout".into()));
        }
        let offset = self.ops.len();
        for mark in &other.stages {
            self.stages.push(StageMark {
                name: mark.name.clone(),
                start: mark.start + offset,
            });
        }
        for op in &other.ops {
            self.push(op.clone())?;
        }
        Ok(())
    }

    /// Appends a circuit written on a single-register layout onto the
    /// register `target` of this circuit, optionally adding controls.
    pub fn append_embedded(
        &mut self,
        sub: &Circuit,
        target: &str,
        controls: &[usize],
        ctrl_state: u64,
    ) -> Result<()> {
        let [reg] = sub.layout.registers() else {
            return Err(Error::InvalidLayout("embedded circuit must have one register".into()));
        };
        let dest = self.layout.register(target)?.clone();
        if dest.width != reg.width {
            return Err(Error::DimensionMismatch {
                expected: dest.width,
                actual: reg.width,
            });
        }
        for op in &sub.ops {
            let moved = op.remapped(|q| q + dest.offset, |_| dest.name.clone());
            let op = if controls.is_empty() {
                moved
            } else {
                moved.with_extra_controls(controls, ctrl_state)?
            };
            self.push(op)?;
        }
        Ok(())
    }

    /// The inverse circuit (reversed adjoint ops); stage marks are dropped.
    pub fn adjoint(&self) -> Circuit {
        Circuit {
            layout: self.layout.clone(),
            ops: self.ops.iter().rev().map(GateOp::adjoint).collect(),
            stages: Vec::new(),
            tolerance: self.tolerance,
        }
    }

    /// Re-labels every block op with the given cost class.
    pub fn with_block_cost(mut self, class: BlockCost) -> Self {
        self.ops = self.ops.into_iter().map(|op| op.with_block_cost(class)).collect();
        self
    }

    /// Static ledger: what a run of this circuit records.
    pub fn ledger(&self) -> Result<GateCountLedger> {
        let mut ledger = GateCountLedger::default();
        for (i, op) in self.ops.iter().enumerate() {
            ledger.record(&op.label, self.stage_of(i), elementary_cost(op, &self.layout)?);
        }
        Ok(ledger)
    }

    /// Executes the circuit on `state` in place and returns the ledger.
    pub fn run(&self, state: &mut StateVector) -> Result<GateCountLedger> {
        if state.layout() != &self.layout {
            return Err(Error::InvalidLayout("state and circuit layouts differ".into()));
        }
        let mut ledger = GateCountLedger::default();
        for (i, op) in self.ops.iter().enumerate() {
            state.apply(op)?;
            ledger.record(&op.label, self.stage_of(i), elementary_cost(op, &self.layout)?);
        }
        Ok(ledger)
    }

    /// Runs the circuit on the all-zero state.
    pub fn run_from_zero(&self) -> Result<(StateVector, GateCountLedger)> {
        let mut state = StateVector::zero(self.layout.clone());
        let ledger = self.run(&mut state)?;
        Ok((state, ledger))
    }

    /// JSON description: layout plus ordered op list, matrices as
    /// `[re, im]` pairs.
    pub fn to_json(&self) -> Value {
        json!({
            "layout": self.layout.registers().iter()
                .map(|r| json!({"name": r.name, "width": r.width}))
                .collect::<Vec<_>>(),
            "stages": self.stages.iter()
                .map(|m| json!({"name": m.name, "start": m.start}))
                .collect::<Vec<_>>(),
            "ops": self.ops.iter().map(GateOp::to_json).collect::<Vec<_>>(),
        })
    }
}
