use std::ops::{Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};

/// Square complex matrix of dimension `2^N`.
///
/// Unitaries, Hermitian operators and density operators all use this type;
/// operations that need a particular kind validate it on entry.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator(DMatrix<C64>);

impl DenseOperator {
    pub fn new(m: DMatrix<C64>) -> Self {
        DenseOperator(m)
    }

    pub fn identity(dim: usize) -> Self {
        DenseOperator(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        DenseOperator(DMatrix::zeros(dim, dim))
    }

    /// Real diagonal operator.
    pub fn from_diagonal(d: &[f64]) -> Self {
        let v = DVector::from_iterator(d.len(), d.iter().map(|&x| C64::new(x, 0.0)));
        DenseOperator(DMatrix::from_diagonal(&v))
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Number of qubits, when the dimension is a power of two.
    pub fn num_qubits(&self) -> Option<usize> {
        let d = self.dim();
        (d.is_power_of_two() && self.0.is_square()).then(|| d.trailing_zeros() as usize)
    }

    pub fn adjoint(&self) -> Self {
        DenseOperator(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, s: C64) -> Self {
        DenseOperator(&self.0 * s)
    }

    /// `max |M - M†|`.
    pub fn hermitian_deviation(&self) -> f64 {
        max_abs(&(&self.0 - self.0.adjoint()))
    }

    /// `max |M†M - I|`.
    pub fn unitary_deviation(&self) -> f64 {
        let d = self.dim();
        max_abs(&(self.0.adjoint() * &self.0 - DMatrix::<C64>::identity(d, d)))
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.0)
    }

    pub(crate) fn check_hermitian(&self) -> Result<()> {
        if !self.0.is_square() {
            return Err(invalid("matrix is not square"));
        }
        let dev = self.hermitian_deviation();
        if dev > 1e-12 * self.max_abs().max(1.0) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(())
    }

    /// Validates the density-operator invariants: Hermitian, unit trace,
    /// eigenvalues ≥ -1e-10.
    pub fn check_density(&self) -> Result<()> {
        self.check_hermitian().map_err(|e| Error::NotDensity(e.to_string()))?;
        let tr = self.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::NotDensity(format!("trace {tr}")));
        }
        let min = eigh(self)?.values.first().copied().unwrap_or(0.0);
        if min < -1e-10 {
            return Err(Error::NotDensity(format!("eigenvalue {min:.3e}")));
        }
        Ok(())
    }
}

impl Mul for &DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: &DenseOperator) -> DenseOperator {
        DenseOperator(&self.0 * &rhs.0)
    }
}

impl Sub for &DenseOperator {
    type Output = DenseOperator;
    fn sub(self, rhs: &DenseOperator) -> DenseOperator {
        DenseOperator(&self.0 - &rhs.0)
    }
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Spectrum of a Hermitian operator, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Eigendecomposition {
    pub values: Vec<f64>,
    /// Column `j` is the eigenvector for `values[j]`, phase-fixed so that its
    /// largest-magnitude component is real and positive.
    pub vectors: DenseOperator,
}

impl Eigendecomposition {
    /// Column `j` as an owned vector.
    pub fn vector(&self, j: usize) -> Vec<C64> {
        self.vectors.matrix().column(j).iter().copied().collect()
    }

    /// `V diag(f(λ)) V†`.
    pub fn reconstruct(&self, f: impl Fn(f64) -> C64) -> DenseOperator {
        let v = self.vectors.matrix();
        let mut scaled = v.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let s = f(lam);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= s);
        }
        DenseOperator(scaled * v.adjoint())
    }
}

/// Hermitian eigendecomposition.
pub fn eigh(op: &DenseOperator) -> Result<Eigendecomposition> {
    op.check_hermitian()?;
    let m = op.matrix();
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::new(sym);
    let dim = m.nrows();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut vectors = DMatrix::<C64>::zeros(dim, dim);
    let mut values = Vec::with_capacity(dim);
    for (dst, &src) in order.iter().enumerate() {
        values.push(eig.eigenvalues[src]);
        let col = eig.eigenvectors.column(src);
        let mut pivot = 0;
        let mut best = -1.0;
        for (i, z) in col.iter().enumerate() {
            // Prefer the first index among (numerically) tied maxima.
            if z.norm() > best + 1e-12 {
                best = z.norm();
                pivot = i;
            }
        }
        let phase = if best > 0.0 { col[pivot].conj() / col[pivot].norm() } else { C64::new(1.0, 0.0) };
        for (i, z) in col.iter().enumerate() {
            vectors[(i, dst)] = z * phase;
        }
    }
    Ok(Eigendecomposition { values, vectors: DenseOperator(vectors) })
}

/// `exp(scale · H)` for Hermitian `H`, via its eigendecomposition.
pub fn expm_hermitian(h: &DenseOperator, scale: C64) -> Result<DenseOperator> {
    let e = eigh(h)?;
    Ok(e.reconstruct(|lam| (scale * lam).exp()))
}

/// Haar-distributed unitary: Ginibre matrix, QR, then the diagonal of `R`
/// is rotated to the positive reals so the factorization is unique.
pub fn haar_random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DenseOperator> {
    if dim < 2 {
        return Err(invalid(format!("Haar unitary needs dim >= 2, got {dim}")));
    }
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = DMatrix::<C64>::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    Ok(DenseOperator(q))
}

/// Traces out the high-order half of a `2·n_a`-qubit operator. Subsystem A is
/// qubits `0..n_a` (the low bits of the basis index), B is `n_a..2·n_a`.
pub fn partial_trace_b(rho: &DenseOperator, n_a: usize) -> Result<DenseOperator> {
    let total = rho.num_qubits().ok_or_else(|| invalid("operator dimension is not a power of two"))?;
    if total != 2 * n_a {
        return Err(invalid(format!("cannot split {total} qubits into two halves of {n_a}")));
    }
    let da = 1usize << n_a;
    let m = rho.matrix();
    let out = DMatrix::from_fn(da, da, |a, a2| (0..da).map(|b| m[(a + b * da, a2 + b * da)]).sum());
    Ok(DenseOperator(out))
}

/// Sum of singular values.
pub fn trace_norm(m: &DenseOperator) -> Result<f64> {
    if !m.matrix().is_square() {
        return Err(invalid("trace norm needs a square matrix"));
    }
    let svd = m.matrix().clone().svd(false, false);
    Ok(svd.singular_values.iter().sum())
}
