use std::collections::BTreeMap;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

/// Running tally of applied operations.
///
/// `per_label` counts raw operations by label, `per_stage` counts elementary
/// gates by circuit stage.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCountLedger {
    pub raw_ops: u64,
    pub elementary_count: u64,
    pub per_label: BTreeMap<String, u64>,
    pub per_stage: BTreeMap<String, u64>,
}

impl GateCountLedger {
    pub fn record(&mut self, label: &str, stage: Option<&str>, cost: u64) {
        self.raw_ops += 1;
        self.elementary_count += cost;
        *self.per_label.entry(label.to_string()).or_default() += 1;
        if let Some(stage) = stage {
            *self.per_stage.entry(stage.to_string()).or_default() += cost;
        }
    }

    pub fn stage(&self, name: &str) -> u64 {
        self.per_stage.get(name).copied().unwrap_or(0)
    }
}

fn merge(into: &mut BTreeMap<String, u64>, from: &BTreeMap<String, u64>) {
    for (k, v) in from {
        *into.entry(k.clone()).or_default() += v;
    }
}

impl AddAssign<&GateCountLedger> for GateCountLedger {
    fn add_assign(&mut self, rhs: &GateCountLedger) {
        self.raw_ops += rhs.raw_ops;
        self.elementary_count += rhs.elementary_count;
        merge(&mut self.per_label, &rhs.per_label);
        merge(&mut self.per_stage, &rhs.per_stage);
    }
}

impl Add for GateCountLedger {
    type Output = GateCountLedger;

    fn add(mut self, rhs: GateCountLedger) -> GateCountLedger {
        self += &rhs;
        self
    }
}
