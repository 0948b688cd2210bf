use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use super::{Circuit, Instruction};

/// Layered time model: each moment holds instructions on disjoint qubits and
/// costs one time unit.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSchedule {
    n_qubits: usize,
    moments: Vec<Vec<Instruction>>,
}

/// As-soon-as-possible layering: every gate lands in the first moment after
/// the last gate touching any of its qubits.
pub fn schedule_moments(circuit: &Circuit) -> MomentSchedule {
    let n = circuit.n_qubits();
    let mut next_free = vec![0usize; n];
    let mut moments: Vec<Vec<Instruction>> = Vec::new();
    for ins in circuit.instructions() {
        let (a, b) = ins.gate.qubits();
        let m = b.map_or(next_free[a], |b| next_free[a].max(next_free[b]));
        if m == moments.len() {
            moments.push(Vec::new());
        }
        moments[m].push(*ins);
        next_free[a] = m + 1;
        if let Some(b) = b {
            next_free[b] = m + 1;
        }
    }
    MomentSchedule {
        n_qubits: n,
        moments,
    }
}

impl MomentSchedule {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn depth(&self) -> usize {
        self.moments.len()
    }

    pub fn moments(&self) -> &[Vec<Instruction>] {
        &self.moments
    }

    /// `busy[m][q]` is true when qubit `q` is acted on in moment `m`.
    pub fn occupancy(&self) -> Vec<Vec<bool>> {
        self.moments
            .iter()
            .map(|moment| {
                let mut row = vec![false; self.n_qubits];
                for ins in moment {
                    let (a, b) = ins.gate.qubits();
                    row[a] = true;
                    if let Some(b) = b {
                        row[b] = true;
                    }
                }
                row
            })
            .collect()
    }

    /// Maximal runs of consecutive moments in which `q` has no gate,
    /// including runs at the start and end of the schedule.
    pub fn idle_windows(&self, q: usize) -> Vec<Range<usize>> {
        let occ = self.occupancy();
        let mut out = Vec::new();
        let mut start = None;
        for (m, row) in occ.iter().enumerate() {
            match (row[q], start) {
                (false, None) => start = Some(m),
                (true, Some(s)) => {
                    out.push(s..m);
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push(s..occ.len());
        }
        out
    }

    pub(crate) fn insert(&mut self, moment: usize, ins: Instruction) {
        self.moments[moment].push(ins);
    }

    /// Moment-major flattening back into a circuit.
    pub fn flatten(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            ops: self.moments.iter().flatten().copied().collect(),
        }
    }
}
