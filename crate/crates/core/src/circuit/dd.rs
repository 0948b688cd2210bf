//! Dynamical-decoupling insertion into idle windows.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{schedule_moments, Circuit, Gate, Instruction};
use crate::error::{arg_err, Error};

/// Pauli pulse trains whose product is the identity up to global phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DdSequence {
    Xx,
    Xyxy,
    Yy,
}

#[derive(Clone, Copy)]
enum Pulse {
    X,
    Y,
}

impl DdSequence {
    pub const ALL: [DdSequence; 3] = [DdSequence::Xx, DdSequence::Xyxy, DdSequence::Yy];

    fn pulses(self) -> &'static [Pulse] {
        match self {
            DdSequence::Xx => &[Pulse::X, Pulse::X],
            DdSequence::Xyxy => &[Pulse::X, Pulse::Y, Pulse::X, Pulse::Y],
            DdSequence::Yy => &[Pulse::Y, Pulse::Y],
        }
    }

    /// Pulse gates of one repetition on qubit `q`.
    pub fn gates(self, q: usize) -> Vec<Gate> {
        self.pulses()
            .iter()
            .map(|p| match p {
                Pulse::X => Gate::X(q),
                Pulse::Y => Gate::Y(q),
            })
            .collect()
    }

    /// Number of pulses (and moments) in one repetition.
    pub fn period(self) -> usize {
        self.pulses().len()
    }

    pub fn name(self) -> &'static str {
        match self {
            DdSequence::Xx => "XX",
            DdSequence::Xyxy => "XYXY",
            DdSequence::Yy => "YY",
        }
    }
}

impl fmt::Display for DdSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DdSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_uppercase().as_str() {
            "XX" => Ok(DdSequence::Xx),
            "XYXY" => Ok(DdSequence::Xyxy),
            "YY" => Ok(DdSequence::Yy),
            _ => Err(arg_err!(
                "unknown DD sequence '{s}' (expected xx, xyxy or yy)"
            )),
        }
    }
}

/// Fills idle windows with decoupling pulses.
///
/// For every qubit, each maximal idle window of `w >= L` moments (`L` the
/// sequence length) receives `floor(w / L)` back-to-back repetitions starting
/// at the window's first moment. The remaining `w mod L` moments stay idle.
/// The result is the moment-major flattening of the padded schedule; a
/// circuit with no qualifying window is returned unchanged.
pub fn insert_dd(circuit: &Circuit, seq: DdSequence) -> Circuit {
    let mut schedule = schedule_moments(circuit);
    let len = seq.period();
    let mut inserted = false;
    for q in 0..circuit.n_qubits() {
        for window in schedule.idle_windows(q) {
            let reps = window.len() / len;
            for r in 0..reps {
                for (k, gate) in seq.gates(q).into_iter().enumerate() {
                    schedule.insert(window.start + r * len + k, Instruction::pulse(gate));
                    inserted = true;
                }
            }
        }
    }
    if inserted {
        schedule.flatten()
    } else {
        circuit.clone()
    }
}
