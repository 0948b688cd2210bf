//! Line-oriented circuit text format.
//!
//! One gate per line, `KIND [angle] q0 [q1]`, angles in radians printed with
//! round-trip precision. `#` starts a comment. Decoupling pulses carry a
//! trailing `# dd` marker so they survive a round trip.

use alloc::format;
use alloc::string::String;
use core::fmt::Write;

use super::{Circuit, Gate, Instruction};
use crate::error::{Error, Result};

const PULSE_MARK: &str = "dd";

pub fn to_text(circuit: &Circuit) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# n_qubits {}", circuit.n_qubits());
    for ins in circuit.instructions() {
        let _ = if ins.dd_pulse {
            writeln!(out, "{} # {PULSE_MARK}", ins.gate)
        } else {
            writeln!(out, "{}", ins.gate)
        };
    }
    out
}

pub fn from_text(text: &str, n_qubits: usize) -> Result<Circuit> {
    let mut circuit = Circuit::new(n_qubits)?;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let err = |msg: String| Error::Parse { line, msg };
        let (body, comment) = match raw.split_once('#') {
            Some((b, c)) => (b, Some(c.trim())),
            None => (raw, None),
        };
        let mut tokens = body.split_whitespace();
        let Some(kind) = tokens.next() else { continue };
        let mut num = |what: &str| -> Result<&str> {
            tokens
                .next()
                .ok_or_else(|| err(format!("{kind}: missing {what}")))
        };
        let angle = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| err(format!("bad angle '{s}'")))
        };
        let qubit = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| err(format!("bad qubit index '{s}'")))
        };
        let gate = match kind.to_ascii_uppercase().as_str() {
            "H" => Gate::H(qubit(num("qubit")?)?),
            "X" => Gate::X(qubit(num("qubit")?)?),
            "Y" => Gate::Y(qubit(num("qubit")?)?),
            "Z" => Gate::Z(qubit(num("qubit")?)?),
            "RX" => {
                let t = angle(num("angle")?)?;
                Gate::Rx(qubit(num("qubit")?)?, t)
            }
            "RZ" => {
                let t = angle(num("angle")?)?;
                Gate::Rz(qubit(num("qubit")?)?, t)
            }
            "CNOT" => Gate::Cnot(qubit(num("qubit")?)?, qubit(num("qubit")?)?),
            "CZ" => Gate::Cz(qubit(num("qubit")?)?, qubit(num("qubit")?)?),
            "CPHASE" => {
                let t = angle(num("angle")?)?;
                Gate::Cphase(qubit(num("qubit")?)?, qubit(num("qubit")?)?, t)
            }
            other => return Err(err(format!("unknown gate kind '{other}'"))),
        };
        if let Some(extra) = tokens.next() {
            return Err(err(format!("unexpected token '{extra}'")));
        }
        let ins = Instruction {
            gate,
            dd_pulse: comment == Some(PULSE_MARK),
        };
        circuit.push_instruction(ins).map_err(|e| match e {
            Error::Argument(msg) => err(msg),
            e => e,
        })?;
    }
    Ok(circuit)
}
