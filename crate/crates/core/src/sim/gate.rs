use std::fmt;

use crate::error::{Error, Result};

/// Primitive gates understood by the simulator.
///
/// Rotations follow `R_P(θ) = exp(-i θ P / 2)`; the two-qubit rotations
/// `Rxx`, `Ryy`, `Rzz` use `P ⊗ P` and exist for Trotter circuits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    S,
    Sdg,
    X,
    Cx,
    Rx,
    Ry,
    Rz,
    Rxx,
    Ryy,
    Rzz,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::Sdg => "SDG",
            GateKind::X => "X",
            GateKind::Cx => "CX",
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::Rxx => "RXX",
            GateKind::Ryy => "RYY",
            GateKind::Rzz => "RZZ",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cx | GateKind::Rxx | GateKind::Ryy | GateKind::Rzz => 2,
            _ => 1,
        }
    }

    pub fn is_parametric(self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Rxx | GateKind::Ryy | GateKind::Rzz)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A gate bound to operands and (for rotations) an angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gate {
    kind: GateKind,
    qubits: [usize; 2],
    theta: Option<f64>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: &[usize], theta: Option<f64>) -> Result<Self> {
        if qubits.len() != kind.arity() {
            return Err(Error::OperandCount { gate: kind.name(), expected: kind.arity(), got: qubits.len() });
        }
        if kind.arity() == 2 && qubits[0] == qubits[1] {
            return Err(Error::DuplicateOperand(qubits[0]));
        }
        match (kind.is_parametric(), theta) {
            (true, None) => return Err(Error::MissingAngle(kind.name())),
            (false, Some(_)) => return Err(Error::SuperfluousAngle(kind.name())),
            _ => {}
        }
        if let Some(t) = theta {
            if !t.is_finite() {
                return Err(Error::NonFinite(format!("{} angle", kind.name())));
            }
        }
        let second = if kind.arity() == 2 { qubits[1] } else { qubits[0] };
        Ok(Gate { kind, qubits: [qubits[0], second], theta })
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn theta(&self) -> Option<f64> {
        self.theta
    }

    /// The inverse gate.
    pub fn inverse(&self) -> Gate {
        let kind = match self.kind {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            k => k,
        };
        Gate { kind, qubits: self.qubits, theta: self.theta.map(|t| -t) }
    }
}
