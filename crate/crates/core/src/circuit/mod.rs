//! Circuit IR, moment scheduling, inversion, dynamical decoupling and
//! trajectory simulation.

mod dd;
mod schedule;
mod sim;
mod text;

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Result};
use crate::statevec::GateMatrix;

pub use dd::{insert_dd, DdSequence};
pub use schedule::{schedule_moments, MomentSchedule};
pub use sim::{simulate, NoiseModel};
pub use text::{from_text, to_text};

/// A gate together with the qubits it acts on. Angles are in radians.
///
/// Controlled gates list the control first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Rx(usize, f64),
    Rz(usize, f64),
    Cnot(usize, usize),
    Cz(usize, usize),
    Cphase(usize, usize, f64),
}

impl Gate {
    /// Mnemonic used by the text format.
    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::X(_) => "X",
            Gate::Y(_) => "Y",
            Gate::Z(_) => "Z",
            Gate::Rx(..) => "RX",
            Gate::Rz(..) => "RZ",
            Gate::Cnot(..) => "CNOT",
            Gate::Cz(..) => "CZ",
            Gate::Cphase(..) => "CPHASE",
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rx(_, t) | Gate::Rz(_, t) | Gate::Cphase(_, _, t) => Some(t),
            _ => None,
        }
    }

    /// First qubit, and the second one for two-qubit gates.
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) | Gate::Rx(q, _) | Gate::Rz(q, _) => {
                (q, None)
            }
            Gate::Cnot(a, b) | Gate::Cz(a, b) | Gate::Cphase(a, b, _) => (a, Some(b)),
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.qubits().1.is_some()
    }

    pub fn touches(&self, q: usize) -> bool {
        let (a, b) = self.qubits();
        a == q || b == Some(q)
    }

    pub fn matrix(&self) -> GateMatrix {
        match *self {
            Gate::H(_) => GateMatrix::h(),
            Gate::X(_) => GateMatrix::x(),
            Gate::Y(_) => GateMatrix::y(),
            Gate::Z(_) => GateMatrix::z(),
            Gate::Rx(_, t) => GateMatrix::rx(t),
            Gate::Rz(_, t) => GateMatrix::rz(t),
            Gate::Cnot(..) => GateMatrix::cnot(),
            Gate::Cz(..) => GateMatrix::cz(),
            Gate::Cphase(_, _, t) => GateMatrix::cphase(t),
        }
    }

    /// The inverse gate. Rotations negate their angle; the rest are
    /// self-inverse.
    pub fn dagger(&self) -> Gate {
        match *self {
            Gate::Rx(q, t) => Gate::Rx(q, -t),
            Gate::Rz(q, t) => Gate::Rz(q, -t),
            Gate::Cphase(a, b, t) => Gate::Cphase(a, b, -t),
            g => g,
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        let (a, b) = self.qubits();
        if a >= n_qubits || b.is_some_and(|b| b >= n_qubits) {
            return Err(arg_err!("{self} addresses a qubit outside 0..{n_qubits}"));
        }
        if b == Some(a) {
            return Err(arg_err!("{self} repeats qubit {a}"));
        }
        if self.angle().is_some_and(|t| !t.is_finite()) {
            return Err(arg_err!("{} has a non-finite angle", self.name()));
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())?;
        if let Some(t) = self.angle() {
            write!(f, " {t:?}")?;
        }
        let (a, b) = self.qubits();
        write!(f, " {a}")?;
        if let Some(b) = b {
            write!(f, " {b}")?;
        }
        Ok(())
    }
}

/// A gate plus whether it was inserted as a decoupling pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Instruction {
    pub gate: Gate,
    pub dd_pulse: bool,
}

impl Instruction {
    pub fn data(gate: Gate) -> Self {
        Self {
            gate,
            dd_pulse: false,
        }
    }

    pub fn pulse(gate: Gate) -> Self {
        Self {
            gate,
            dd_pulse: true,
        }
    }
}

/// An ordered gate list on a fixed register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<Instruction>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(arg_err!("a circuit needs at least one qubit"));
        }
        Ok(Self {
            n_qubits,
            ops: Vec::new(),
        })
    }

    /// Builds a circuit of data gates.
    pub fn from_gates(n_qubits: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut c = Self::new(n_qubits)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        self.push_instruction(Instruction::data(gate))
    }

    pub fn push_instruction(&mut self, ins: Instruction) -> Result<()> {
        ins.gate.validate(self.n_qubits)?;
        self.ops.push(ins);
        Ok(())
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.ops
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> + '_ {
        self.ops.iter().map(|i| &i.gate)
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates().filter(|g| g.is_two_qubit()).count()
    }

    pub fn pulse_count(&self) -> usize {
        self.ops.iter().filter(|i| i.dd_pulse).count()
    }

    /// Appends `other`'s instructions.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(arg_err!(
                "cannot append a {}-qubit circuit to a {}-qubit one",
                other.n_qubits,
                self.n_qubits
            ));
        }
        self.ops.extend_from_slice(&other.ops);
        Ok(())
    }

    /// Reversed gate order with every gate replaced by its inverse.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            ops: self
                .ops
                .iter()
                .rev()
                .map(|i| Instruction {
                    gate: i.gate.dagger(),
                    dd_pulse: i.dd_pulse,
                })
                .collect(),
        }
    }
}
