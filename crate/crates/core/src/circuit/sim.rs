//! Circuit execution on the state-vector engine, optionally with trajectory
//! noise.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{schedule_moments, Circuit, Gate};
use crate::error::{arg_err, Result};
use crate::rng;
use crate::statevec::{GateMatrix, StateVector};

/// Trajectory noise applied during [`simulate`].
///
/// * `coherent_idle_z`: an `RZ(coherent_idle_z)` drift hits every qubit that
///   is idle in a moment, after the moment's gates.
/// * `depol_1q`: after each one-qubit gate, with this probability a uniformly
///   drawn X, Y or Z is applied to the gate's qubit.
/// * `depol_2q`: after each two-qubit gate, with this probability one of the
///   15 non-identity two-qubit Paulis is applied.
/// * `noisy_pulses`: whether decoupling pulses are subject to `depol_1q`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseModel {
    pub coherent_idle_z: f64,
    pub depol_1q: f64,
    pub depol_2q: f64,
    #[serde(default)]
    pub noisy_pulses: bool,
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        if !self.coherent_idle_z.is_finite() {
            return Err(arg_err!("coherent_idle_z must be finite"));
        }
        for (name, p) in [("depol_1q", self.depol_1q), ("depol_2q", self.depol_2q)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(arg_err!("{name} = {p} is not a probability"));
            }
        }
        Ok(())
    }

    /// True when trajectories can differ from one another.
    pub fn is_stochastic(&self) -> bool {
        self.depol_1q > 0.0 || self.depol_2q > 0.0
    }

    pub fn is_noiseless(&self) -> bool {
        !self.is_stochastic() && self.coherent_idle_z == 0.0
    }
}

/// Runs `circuit` from `|0...0>`.
///
/// Without noise the result is deterministic and independent of `seed`;
/// consecutive one-qubit gates on the same qubit are fused before being
/// applied. With noise, gates run moment by moment (see [`NoiseModel`]) and
/// all Pauli draws come from the stream seeded by `seed`.
pub fn simulate(circuit: &Circuit, noise: Option<&NoiseModel>, seed: u64) -> Result<StateVector> {
    let mut state = StateVector::zero(circuit.n_qubits())?;
    match noise {
        Some(model) if !model.is_noiseless() => {
            model.validate()?;
            run_noisy(&mut state, circuit, model, seed)?;
        }
        _ => run_fused(&mut state, circuit)?,
    }
    Ok(state)
}

fn run_fused(state: &mut StateVector, circuit: &Circuit) -> Result<()> {
    let mut pending: Vec<Option<GateMatrix>> = vec![None; circuit.n_qubits()];
    let flush =
        |state: &mut StateVector, pending: &mut [Option<GateMatrix>], q: usize| match pending[q]
            .take()
        {
            Some(m) => state.apply_1q(&m, q),
            None => Ok(()),
        };
    for gate in circuit.gates() {
        match gate.qubits() {
            (q, None) => {
                let m = gate.matrix();
                pending[q] = Some(match pending[q] {
                    Some(prev) => m.compose_1q(&prev)?,
                    None => m,
                });
            }
            (a, Some(b)) => {
                flush(state, &mut pending, a)?;
                flush(state, &mut pending, b)?;
                state.apply_2q(&gate.matrix(), a, b)?;
            }
        }
    }
    for q in 0..circuit.n_qubits() {
        flush(state, &mut pending, q)?;
    }
    Ok(())
}

fn apply_gate(state: &mut StateVector, gate: &Gate) -> Result<()> {
    match gate.qubits() {
        (q, None) => state.apply_1q(&gate.matrix(), q),
        (a, Some(b)) => state.apply_2q(&gate.matrix(), a, b),
    }
}

fn pauli(code: u8) -> Option<GateMatrix> {
    match code {
        1 => Some(GateMatrix::x()),
        2 => Some(GateMatrix::y()),
        3 => Some(GateMatrix::z()),
        _ => None,
    }
}

fn run_noisy(
    state: &mut StateVector,
    circuit: &Circuit,
    noise: &NoiseModel,
    seed: u64,
) -> Result<()> {
    let schedule = schedule_moments(circuit);
    let occupancy = schedule.occupancy();
    let drift = GateMatrix::rz(noise.coherent_idle_z);
    let mut rng = rng::noise_stream(seed);
    for (moment, busy) in schedule.moments().iter().zip(&occupancy) {
        for ins in moment {
            apply_gate(state, &ins.gate)?;
            match ins.gate.qubits() {
                (q, None) => {
                    let eligible = !ins.dd_pulse || noise.noisy_pulses;
                    if eligible && noise.depol_1q > 0.0 && rng.random::<f64>() < noise.depol_1q {
                        let p = rng.random_range(1..4u8);
                        state.apply_1q(&pauli(p).expect("nonzero code"), q)?;
                    }
                }
                (a, Some(b)) => {
                    if noise.depol_2q > 0.0 && rng.random::<f64>() < noise.depol_2q {
                        let code = rng.random_range(1..16u8);
                        if let Some(p) = pauli(code / 4) {
                            state.apply_1q(&p, a)?;
                        }
                        if let Some(p) = pauli(code % 4) {
                            state.apply_1q(&p, b)?;
                        }
                    }
                }
            }
        }
        if noise.coherent_idle_z != 0.0 {
            for (q, _) in busy.iter().enumerate().filter(|(_, &b)| !b) {
                state.apply_1q(&drift, q)?;
            }
        }
    }
    Ok(())
}
