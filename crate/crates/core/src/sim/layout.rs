use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub width: usize,
    pub offset: usize,
}

impl Register {
    pub fn qubits(&self) -> Range<usize> {
        self.offset..self.offset + self.width
    }

    /// Bit mask of this register inside a full basis index.
    pub fn mask(&self) -> usize {
        ((1usize << self.width) - 1) << self.offset
    }

    pub fn value_of(&self, index: usize) -> usize {
        (index >> self.offset) & ((1usize << self.width) - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    registers: Vec<Register>,
    total_qubits: usize,
}

impl RegisterLayout {
    pub fn new<S: AsRef<str>>(registers: &[(S, usize)]) -> Result<Self> {
        let mut out = Vec::with_capacity(registers.len());
        let mut offset = 0;
        for (name, width) in registers {
            let name = name.as_ref();
            if *width == 0 {
                return Err(Error::InvalidLayout(format!("register `{name}` has width 0")));
            }
            if out.iter().any(|r: &Register| r.name == name) {
                return Err(Error::InvalidLayout(format!("duplicate register `{name}`")));
            }
            out.push(Register {
                name: name.to_string(),
                width: *width,
                offset,
            });
            offset += width;
        }
        if offset == 0 {
            return Err(Error::InvalidLayout("layout has no qubits".into()));
        }
        Ok(Self {
            registers: out,
            total_qubits: offset,
        })
    }

    pub fn single(name: &str, width: usize) -> Result<Self> {
        Self::new(&[(name, width)])
    }

    pub fn total_qubits(&self) -> usize {
        self.total_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.total_qubits
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Result<&Register> {
        self.registers
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    pub fn qubits(&self, name: &str) -> Result<Range<usize>> {
        Ok(self.register(name)?.qubits())
    }

    /// Layout with `name` removed; remaining registers keep their order.
    pub fn without(&self, name: &str) -> Result<Self> {
        self.register(name)?;
        let rest: Vec<(String, usize)> = self
            .registers
            .iter()
            .filter(|r| r.name != name)
            .map(|r| (r.name.clone(), r.width))
            .collect();
        Self::new(&rest)
    }
}
