use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::gate::{Gate, GateKind};
use super::linalg::DenseOperator;
use super::pauli::{PauliSum, PauliWord};
use crate::error::{invalid, Error, Result};

const I: C64 = C64::new(0.0, 1.0);

/// Pure state of `num_qubits` qubits as a dense amplitude vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amps: Vec<C64>,
}

impl Statevector {
    /// `|0…0⟩`.
    pub fn zero(num_qubits: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = C64::new(1.0, 0.0);
        Statevector { num_qubits, amps }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if index >= 1 << num_qubits {
            return Err(invalid(format!("basis index {index} out of range for {num_qubits} qubits")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << num_qubits];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Statevector { num_qubits, amps })
    }

    /// Builds a state from raw amplitudes, normalizing them.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(invalid(format!("amplitude count {len} is not a power of two >= 2")));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("amplitude".into()));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(invalid("zero vector cannot be normalized"));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Statevector { num_qubits: len.trailing_zeros() as usize, amps })
    }

    /// Random state with complex Gaussian amplitudes (uniform on the sphere).
    pub fn random<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Self {
        let amps = (0..1usize << num_qubits)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::from_amplitudes(amps).expect("gaussian vector is nonzero")
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            Err(Error::QubitOutOfRange { qubit: q, num_qubits: self.num_qubits })
        } else {
            Ok(())
        }
    }

    /// Applies a primitive gate, validating operands and the angle.
    pub fn apply_gate(&mut self, kind: GateKind, qubits: &[usize], theta: Option<f64>) -> Result<()> {
        let gate = Gate::new(kind, qubits, theta)?;
        self.apply(&gate)
    }

    /// Applies an already-validated gate after a range check.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        for &q in gate.qubits() {
            self.check_qubit(q)?;
        }
        let qs = gate.qubits();
        let q1 = if qs.len() == 2 { qs[1] } else { qs[0] };
        self.apply_raw(gate.kind(), qs[0], q1, gate.theta().unwrap_or(0.0));
        Ok(())
    }

    /// Gate kernel without validation. Operands must be in range and distinct
    /// for two-qubit kinds.
    pub(crate) fn apply_raw(&mut self, kind: GateKind, q0: usize, q1: usize, theta: f64) {
        match kind {
            GateKind::H => {
                let h = C64::new(FRAC_1_SQRT_2, 0.0);
                self.single(q0, [[h, h], [h, -h]]);
            }
            GateKind::S => self.phase(q0, I),
            GateKind::Sdg => self.phase(q0, -I),
            GateKind::X => self.pauli_x(q0),
            GateKind::Cx => self.cx(q0, q1),
            GateKind::Rx => {
                let (c, s) = half_angle(theta);
                self.single(q0, [[c, -I * s], [-I * s, c]]);
            }
            GateKind::Ry => {
                let (c, s) = half_angle(theta);
                self.single(q0, [[c, -s], [s, c]]);
            }
            GateKind::Rz => {
                let e = C64::from_polar(1.0, theta / 2.0);
                self.diag(q0, e.conj(), e);
            }
            GateKind::Rxx => self.two_flip(q0, q1, theta, false),
            GateKind::Ryy => self.two_flip(q0, q1, theta, true),
            GateKind::Rzz => self.rzz(q0, q1, theta),
        }
    }

    fn single(&mut self, q: usize, m: [[C64; 2]; 2]) {
        let mask = 1usize << q;
        let dim = self.amps.len();
        let mut base = 0;
        while base < dim {
            for i in base..base + mask {
                let a = self.amps[i];
                let b = self.amps[i | mask];
                self.amps[i] = m[0][0] * a + m[0][1] * b;
                self.amps[i | mask] = m[1][0] * a + m[1][1] * b;
            }
            base += mask << 1;
        }
    }

    fn diag(&mut self, q: usize, d0: C64, d1: C64) {
        let mask = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= if i & mask == 0 { d0 } else { d1 };
        }
    }

    fn phase(&mut self, q: usize, p: C64) {
        let mask = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask != 0 {
                *a *= p;
            }
        }
    }

    fn pauli_x(&mut self, q: usize) {
        let mask = 1usize << q;
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                self.amps.swap(i, i | mask);
            }
        }
    }

    fn cx(&mut self, control: usize, target: usize) {
        let cm = 1usize << control;
        let tm = 1usize << target;
        for i in 0..self.amps.len() {
            if i & cm != 0 && i & tm == 0 {
                self.amps.swap(i, i | tm);
            }
        }
    }

    /// exp(-iθ/2 P⊗P) for P = X (`yy = false`) or P = Y (`yy = true`).
    fn two_flip(&mut self, q0: usize, q1: usize, theta: f64, yy: bool) {
        let (c, s) = half_angle(theta);
        let m0 = 1usize << q0;
        let m1 = 1usize << q1;
        let both = m0 | m1;
        for i in 0..self.amps.len() {
            if i & m0 != 0 {
                continue;
            }
            let j = i ^ both;
            // YY carries -1 on |00⟩,|11⟩ and +1 on |01⟩,|10⟩ relative to XX.
            let sign = if yy && (i & m1 == 0) { -1.0 } else { 1.0 };
            let a = self.amps[i];
            let b = self.amps[j];
            let k = -I * s * sign;
            self.amps[i] = c * a + k * b;
            self.amps[j] = c * b + k * a;
        }
    }

    fn rzz(&mut self, q0: usize, q1: usize, theta: f64) {
        let e = C64::from_polar(1.0, theta / 2.0);
        let m0 = 1usize << q0;
        let m1 = 1usize << q1;
        for (i, a) in self.amps.iter_mut().enumerate() {
            let odd = ((i & m0 != 0) as u8 ^ (i & m1 != 0) as u8) == 1;
            *a *= if odd { e } else { e.conj() };
        }
    }

    /// Applies every gate of a sequence in order.
    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a Gate>) -> Result<()> {
        for g in gates {
            self.apply(g)?;
        }
        Ok(())
    }

    /// `⟨self|other⟩ = Σ conj(self_k) other_k`.
    pub fn inner(&self, other: &Statevector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(inner_unchecked(&self.amps, &other.amps))
    }

    /// Real expectation value `⟨ψ|H|ψ⟩` of a Pauli sum.
    pub fn expectation(&self, h: &PauliSum) -> Result<f64> {
        if h.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, got: h.num_qubits() });
        }
        Ok(h.terms().iter().map(|(c, w)| c * self.word_expectation(w)).sum())
    }

    fn word_expectation(&self, w: &PauliWord) -> f64 {
        let flip = w.flip_mask();
        let sign_mask = w.sign_mask();
        let y_phase = w.y_phase();
        let mut acc = C64::new(0.0, 0.0);
        for (b, a) in self.amps.iter().enumerate() {
            let s = if (b & sign_mask).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            acc += self.amps[b ^ flip].conj() * *a * s;
        }
        (acc * y_phase).re
    }

    /// Probability of reading `bit` on `qubit`.
    pub fn probability(&self, qubit: usize, bit: bool) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = 1usize << qubit;
        Ok(self.amps.iter().enumerate().filter(|(i, _)| (i & mask != 0) == bit).map(|(_, a)| a.norm_sqr()).sum())
    }

    /// Multiplies by a dense operator of matching dimension.
    pub fn apply_operator(&self, op: &DenseOperator) -> Result<Statevector> {
        let m = op.matrix();
        if m.nrows() != self.dim() || m.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: m.nrows() });
        }
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        let out = m * v;
        Ok(Statevector { num_qubits: self.num_qubits, amps: out.as_slice().to_vec() })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> DenseOperator {
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        DenseOperator::new(&v * v.adjoint())
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }
}

pub(crate) fn inner_unchecked(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn half_angle(theta: f64) -> (C64, C64) {
    let (s, c) = (theta / 2.0).sin_cos();
    (C64::new(c, 0.0), C64::new(s, 0.0))
}
