//! Circuit genomes: the GA individual and the ansatz structure it encodes.
//!
//! A genome is a flat ordered list of genes drawn from the pool
//! `{H, S, CX, RX, RY, RZ}`. Every rotation gene owns one parameter slot;
//! slots are numbered `0..m` in order of appearance and renumbered after any
//! structural edit, so a parameter vector of length `m` binds positionally.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sim::{Gate, GateKind, Statevector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GeneKind {
    H,
    S,
    Cx,
    Rx,
    Ry,
    Rz,
}

/// The gate pool in a fixed order.
pub const POOL: [GeneKind; 6] = [GeneKind::H, GeneKind::S, GeneKind::Cx, GeneKind::Rx, GeneKind::Ry, GeneKind::Rz];

impl GeneKind {
    pub fn name(self) -> &'static str {
        match self {
            GeneKind::H => "H",
            GeneKind::S => "S",
            GeneKind::Cx => "CX",
            GeneKind::Rx => "RX",
            GeneKind::Ry => "RY",
            GeneKind::Rz => "RZ",
        }
    }

    pub fn arity(self) -> usize {
        if self == GeneKind::Cx {
            2
        } else {
            1
        }
    }

    pub fn is_parametric(self) -> bool {
        matches!(self, GeneKind::Rx | GeneKind::Ry | GeneKind::Rz)
    }

    fn gate_kind(self) -> GateKind {
        match self {
            GeneKind::H => GateKind::H,
            GeneKind::S => GateKind::S,
            GeneKind::Cx => GateKind::Cx,
            GeneKind::Rx => GateKind::Rx,
            GeneKind::Ry => GateKind::Ry,
            GeneKind::Rz => GateKind::Rz,
        }
    }

    /// Kinds usable on a register of `num_qubits` (no CX on one qubit).
    pub fn pool_for(num_qubits: usize) -> &'static [GeneKind] {
        if num_qubits >= 2 {
            &POOL
        } else {
            &[GeneKind::H, GeneKind::S, GeneKind::Rx, GeneKind::Ry, GeneKind::Rz]
        }
    }
}

impl FromStr for GeneKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        POOL.iter().copied().find(|k| k.name() == s).ok_or_else(|| invalid(format!("unknown gene kind `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gene {
    kind: GeneKind,
    qubits: [usize; 2],
    param_slot: Option<usize>,
}

impl Gene {
    /// A gene on the given operands (`[control, target]` for CX). The slot is
    /// assigned when the gene is placed in a genome.
    pub fn new(kind: GeneKind, qubits: &[usize]) -> Result<Self> {
        if qubits.len() != kind.arity() {
            return Err(Error::OperandCount { gate: kind.name(), expected: kind.arity(), got: qubits.len() });
        }
        if kind.arity() == 2 && qubits[0] == qubits[1] {
            return Err(Error::DuplicateOperand(qubits[0]));
        }
        let second = qubits.get(1).copied().unwrap_or(qubits[0]);
        Ok(Gene { kind, qubits: [qubits[0], second], param_slot: None })
    }

    pub fn kind(&self) -> GeneKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn param_slot(&self) -> Option<usize> {
        self.param_slot
    }

    fn random<R: Rng + ?Sized>(kind: GeneKind, num_qubits: usize, rng: &mut R) -> Gene {
        let q0 = rng.random_range(0..num_qubits);
        let q1 = if kind.arity() == 2 {
            let t = rng.random_range(0..num_qubits - 1);
            if t >= q0 {
                t + 1
            } else {
                t
            }
        } else {
            q0
        };
        Gene { kind, qubits: [q0, q1], param_slot: None }
    }
}

/// Depth and gate counts of a genome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitMetrics {
    pub depth: usize,
    pub one_qubit_gates: usize,
    pub two_qubit_gates: usize,
    pub param_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CircuitGenome {
    num_qubits: usize,
    genes: Vec<Gene>,
    param_count: usize,
}

impl CircuitGenome {
    /// Validates operands and assigns canonical parameter slots.
    pub fn new(num_qubits: usize, genes: Vec<Gene>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(invalid("genome needs at least one qubit"));
        }
        for g in &genes {
            for &q in g.qubits() {
                if q >= num_qubits {
                    return Err(Error::QubitOutOfRange { qubit: q, num_qubits });
                }
            }
        }
        let mut genome = CircuitGenome { num_qubits, genes, param_count: 0 };
        genome.renumber();
        Ok(genome)
    }

    pub fn empty(num_qubits: usize) -> Self {
        CircuitGenome { num_qubits, genes: Vec::new(), param_count: 0 }
    }

    fn renumber(&mut self) {
        let mut next = 0;
        for g in &mut self.genes {
            g.param_slot = if g.kind.is_parametric() {
                next += 1;
                Some(next - 1)
            } else {
                None
            };
        }
        self.param_count = next;
    }

    /// Random genome whose scheduled depth is exactly `target_depth`.
    ///
    /// Genes are drawn uniformly over kind, then over operand tuples; a gene
    /// that would push any of its wires past `target_depth` is rejected.
    /// Generation ends once every wire is filled to `target_depth`.
    pub fn random<R: Rng + ?Sized>(num_qubits: usize, target_depth: usize, rng: &mut R) -> Result<Self> {
        if num_qubits == 0 || target_depth == 0 {
            return Err(invalid(format!("cannot build a depth-{target_depth} circuit on {num_qubits} qubits")));
        }
        let pool = GeneKind::pool_for(num_qubits);
        let mut layers = vec![0usize; num_qubits];
        let mut genes = Vec::new();
        while layers.iter().any(|&l| l < target_depth) {
            let kind = pool[rng.random_range(0..pool.len())];
            let gene = Gene::random(kind, num_qubits, rng);
            let layer = gene.qubits().iter().map(|&q| layers[q]).max().unwrap_or(0) + 1;
            if layer > target_depth {
                continue;
            }
            for &q in gene.qubits() {
                layers[q] = layer;
            }
            genes.push(gene);
        }
        Self::new(num_qubits, genes)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn genes(&self) -> &[Gene] {
        &self.genes
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    pub fn param_count(&self) -> usize {
        self.param_count
    }

    /// As-soon-as-possible layering depth.
    pub fn depth(&self) -> usize {
        let mut layers = vec![0usize; self.num_qubits];
        for g in &self.genes {
            let layer = g.qubits().iter().map(|&q| layers[q]).max().unwrap_or(0) + 1;
            for &q in g.qubits() {
                layers[q] = layer;
            }
        }
        layers.into_iter().max().unwrap_or(0)
    }

    pub fn metrics(&self) -> CircuitMetrics {
        let two = self.genes.iter().filter(|g| g.kind.arity() == 2).count();
        CircuitMetrics {
            depth: self.depth(),
            one_qubit_gates: self.genes.len() - two,
            two_qubit_gates: two,
            param_count: self.param_count,
        }
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.param_count {
            return Err(Error::ParameterCount { expected: self.param_count, got: theta.len() });
        }
        Ok(())
    }

    /// Applies `V(θ)` (or `V†(θ)` when `adjoint`) to `state` in place.
    pub fn run_in_place(&self, theta: &[f64], state: &mut Statevector, adjoint: bool) -> Result<()> {
        self.check_theta(theta)?;
        if state.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, got: state.num_qubits() });
        }
        let apply = |state: &mut Statevector, g: &Gene| {
            let angle = g.param_slot.map_or(0.0, |s| theta[s]);
            let kind = match (adjoint, g.kind) {
                (true, GeneKind::S) => GateKind::Sdg,
                (_, k) => k.gate_kind(),
            };
            let angle = if adjoint { -angle } else { angle };
            state.apply_raw(kind, g.qubits[0], g.qubits[1], angle);
        };
        if adjoint {
            self.genes.iter().rev().for_each(|g| apply(state, g));
        } else {
            self.genes.iter().for_each(|g| apply(state, g));
        }
        Ok(())
    }

    /// `V(θ)|input⟩`, or `V†(θ)|input⟩` when `adjoint` is set.
    pub fn bind_and_run(&self, theta: &[f64], input: &Statevector, adjoint: bool) -> Result<Statevector> {
        let mut out = input.clone();
        self.run_in_place(theta, &mut out, adjoint)?;
        Ok(out)
    }

    /// The bound circuit as simulator gates, in application order.
    pub fn to_gates(&self, theta: &[f64]) -> Result<Vec<Gate>> {
        self.check_theta(theta)?;
        self.genes.iter().map(|g| Gate::new(g.kind.gate_kind(), g.qubits(), g.param_slot.map(|s| theta[s]))).collect()
    }

    /// Line-oriented text form; see [`CircuitGenome::from_str`].
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for CircuitGenome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits={} params={}", self.num_qubits, self.param_count)?;
        for g in &self.genes {
            let mut line = g.kind.name().to_string();
            for q in g.qubits() {
                write!(line, " q{q}")?;
            }
            if let Some(s) = g.param_slot {
                write!(line, " slot{s}")?;
            }
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

impl FromStr for CircuitGenome {
    type Err = Error;

    /// Parses `qubits=<N> params=<m>` followed by one `KIND q<i>[ q<j>][ slot<k>]`
    /// line per gene. Slots must already be canonical.
    fn from_str(s: &str) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse { line, msg };
        let mut lines = s.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| perr(1, "missing header".into()))?;
        let mut hdr = header.split(' ');
        let num_qubits: usize = hdr
            .next()
            .and_then(|t| t.strip_prefix("qubits="))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| perr(1, format!("bad header `{header}`")))?;
        let params: usize = hdr
            .next()
            .and_then(|t| t.strip_prefix("params="))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| perr(1, format!("bad header `{header}`")))?;
        if hdr.next().is_some() {
            return Err(perr(1, format!("bad header `{header}`")));
        }
        let mut genes = Vec::new();
        let mut slots = Vec::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            let mut toks = line.split(' ');
            let kind: GeneKind = toks.next().unwrap_or("").parse().map_err(|e: Error| perr(lineno, e.to_string()))?;
            let mut qubits = Vec::with_capacity(2);
            let mut slot = None;
            for tok in toks {
                if let Some(q) = tok.strip_prefix('q') {
                    if slot.is_some() {
                        return Err(perr(lineno, "qubit after slot".into()));
                    }
                    qubits.push(q.parse::<usize>().map_err(|_| perr(lineno, format!("bad qubit `{tok}`")))?);
                } else if let Some(k) = tok.strip_prefix("slot") {
                    if slot.is_some() {
                        return Err(perr(lineno, "duplicate slot".into()));
                    }
                    slot = Some(k.parse::<usize>().map_err(|_| perr(lineno, format!("bad slot `{tok}`")))?);
                } else {
                    return Err(perr(lineno, format!("unexpected token `{tok}`")));
                }
            }
            if slot.is_some() != kind.is_parametric() {
                return Err(perr(lineno, format!("slot presence wrong for {}", kind.name())));
            }
            genes.push(Gene::new(kind, &qubits).map_err(|e| perr(lineno, e.to_string()))?);
            slots.push((lineno, slot));
        }
        let genome = CircuitGenome::new(num_qubits, genes).map_err(|e| perr(1, e.to_string()))?;
        for (g, (lineno, slot)) in genome.genes.iter().zip(slots) {
            if g.param_slot != slot {
                return Err(perr(lineno, "parameter slots are not in canonical order".into()));
            }
        }
        if genome.param_count != params {
            return Err(perr(1, format!("header says {params} params, genes carry {}", genome.param_count)));
        }
        Ok(genome)
    }
}
