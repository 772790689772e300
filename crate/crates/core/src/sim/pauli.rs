use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::linalg::DenseOperator;
use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// Tensor product of single-qubit Paulis, stored as X/Z bit masks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliWord {
    num_qubits: usize,
    x: usize,
    z: usize,
}

impl PauliWord {
    pub fn identity(num_qubits: usize) -> Self {
        PauliWord { num_qubits, x: 0, z: 0 }
    }

    /// Word with the given Paulis on the listed qubits and identity elsewhere.
    pub fn from_sparse(num_qubits: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut w = Self::identity(num_qubits);
        for &(q, p) in ops {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, num_qubits });
            }
            if w.get(q) != Pauli::I {
                return Err(invalid(format!("qubit {q} listed twice in Pauli word")));
            }
            w.set(q, p);
        }
        Ok(w)
    }

    fn set(&mut self, q: usize, p: Pauli) {
        let m = 1usize << q;
        self.x &= !m;
        self.z &= !m;
        match p {
            Pauli::I => {}
            Pauli::X => self.x |= m,
            Pauli::Z => self.z |= m,
            Pauli::Y => {
                self.x |= m;
                self.z |= m
            }
        }
    }

    pub fn get(&self, q: usize) -> Pauli {
        let m = 1usize << q;
        match (self.x & m != 0, self.z & m != 0) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (false, true) => Pauli::Z,
            (true, true) => Pauli::Y,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Qubits acted on non-trivially, ascending.
    pub fn support(&self) -> Vec<(usize, Pauli)> {
        (0..self.num_qubits).map(|q| (q, self.get(q))).filter(|(_, p)| *p != Pauli::I).collect()
    }

    pub(crate) fn flip_mask(&self) -> usize {
        self.x
    }

    pub(crate) fn sign_mask(&self) -> usize {
        self.z
    }

    /// `i^{#Y}`: with it, `P|b⟩ = i^{#Y} (-1)^{|b ∧ z|} |b ⊕ x⟩`.
    pub(crate) fn y_phase(&self) -> C64 {
        match (self.x & self.z).count_ones() % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }
}

impl FromStr for PauliWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.chars().count();
        if n == 0 {
            return Err(invalid("empty Pauli word"));
        }
        if n > usize::BITS as usize - 1 {
            return Err(invalid("Pauli word too long"));
        }
        let mut w = Self::identity(n);
        for (q, ch) in s.chars().enumerate() {
            let p = match ch {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(invalid(format!("invalid Pauli letter `{other}`"))),
            };
            w.set(q, p);
        }
        Ok(w)
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.num_qubits {
            let c = match self.get(q) {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Hermitian operator `Σ c_t P_t` with real coefficients and unique words.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    num_qubits: usize,
    terms: Vec<(f64, PauliWord)>,
}

impl PauliSum {
    /// Builds a sum, merging repeated words (first appearance keeps its slot).
    pub fn new(num_qubits: usize, terms: Vec<(f64, PauliWord)>) -> Result<Self> {
        let mut merged: Vec<(f64, PauliWord)> = Vec::with_capacity(terms.len());
        for (c, w) in terms {
            if w.num_qubits() != num_qubits {
                return Err(Error::DimensionMismatch { expected: num_qubits, got: w.num_qubits() });
            }
            if !c.is_finite() {
                return Err(Error::NonFinite(format!("coefficient of {w}")));
            }
            match merged.iter_mut().find(|(_, m)| *m == w) {
                Some(slot) => slot.0 += c,
                None => merged.push((c, w)),
            }
        }
        Ok(PauliSum { num_qubits, terms: merged })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliWord)] {
        &self.terms
    }

    /// Coefficient of `word`, zero when absent.
    pub fn coefficient(&self, word: &PauliWord) -> f64 {
        self.terms.iter().find(|(_, w)| w == word).map_or(0.0, |(c, _)| *c)
    }

    pub fn to_dense(&self) -> DenseOperator {
        let dim = 1usize << self.num_qubits;
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        for (c, w) in &self.terms {
            let phase = w.y_phase() * *c;
            for b in 0..dim {
                let s = if (b & w.sign_mask()).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                m[(b ^ w.flip_mask(), b)] += phase * s;
            }
        }
        DenseOperator::new(m)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, w) in &self.terms {
            writeln!(f, "{w} {c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        let w: PauliWord = "XIYZ".parse().unwrap();
        assert_eq!(w.to_string(), "XIYZ");
        assert_eq!(w.get(0), Pauli::X);
        assert_eq!(w.get(2), Pauli::Y);
        assert!("XQ".parse::<PauliWord>().is_err());
    }

    #[test]
    fn duplicates_merge() {
        let zz: PauliWord = "ZZ".parse().unwrap();
        let h = PauliSum::new(2, vec![(1.0, zz), (0.5, "XI".parse().unwrap()), (1.0, zz)]).unwrap();
        assert_eq!(h.terms().len(), 2);
        assert_eq!(h.coefficient(&zz), 2.0);
    }

    #[test]
    fn dense_y_matches_definition() {
        let y = PauliSum::new(1, vec![(1.0, "Y".parse().unwrap())]).unwrap().to_dense();
        let m = y.matrix();
        assert_eq!(m[(0, 1)], C64::new(0.0, -1.0));
        assert_eq!(m[(1, 0)], C64::new(0.0, 1.0));
    }
}
