use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{eigh, CMatrix};
use crate::scalar::{Real, C};

/// Reduced state of a subset of qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    matrix: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates hermiticity (1e-12), unit trace (1e-12) and positivity
    /// (eigenvalues ≥ −1e-10) for `f64`; `f32` uses its own tolerances.
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        if !matrix.dim().is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "density matrix dimension {} is not a power of two",
                matrix.dim()
            )));
        }
        let dev = matrix.hermitian_deviation().as_f64();
        if dev > T::HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let tr = matrix.trace();
        if (tr.re.as_f64() - 1.0).abs() > T::NORM_TOLERANCE || tr.im.as_f64().abs() > T::NORM_TOLERANCE {
            return Err(Error::InvalidArgument(format!("trace {tr} is not 1")));
        }
        let min = eigh(&matrix).eigenvalues.first().copied().unwrap_or_else(T::zero);
        if min.as_f64() < -1e-10_f64.max(T::NORM_TOLERANCE) {
            return Err(Error::InvalidArgument(format!("negative eigenvalue {min}")));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix<T>) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> C<T> {
        self.matrix[(i, j)]
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<T> {
        crate::linalg::eigvalsh(&self.matrix)
    }
}

/// One eigenspace of a Hermitian operator: its eigenvalue and an
/// orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigenspace<T: Real> {
    pub eigenvalue: T,
    pub basis: Vec<Vec<C<T>>>,
}

impl<T: Real> Eigenspace<T> {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

/// Self-adjoint operator on a block of qubits.
///
/// Either the dense matrix or the spectral decomposition may be supplied;
/// the other is derived on first use and cached.
#[derive(Clone, Debug)]
pub struct HermitianOperator<T: Real> {
    dim: usize,
    matrix: OnceLock<CMatrix<T>>,
    spectrum: OnceLock<Vec<Eigenspace<T>>>,
}

/// Relative gap below which two eigenvalues belong to the same eigenspace.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

impl<T: Real> HermitianOperator<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        let scale = matrix.max_abs().as_f64().max(1.0);
        let dev = matrix.hermitian_deviation().as_f64();
        if dev > T::HERMITIAN_TOLERANCE * scale {
            return Err(Error::NotHermitian { deviation: dev });
        }
        Ok(Self {
            dim: matrix.dim(),
            matrix: OnceLock::from(matrix),
            spectrum: OnceLock::new(),
        })
    }

    /// Operator `Σ λₖ |vₖ⟩⟨vₖ|`. The vectors must be orthonormal; only their
    /// lengths and norms are checked here.
    pub fn from_spectrum(eigenvalues: Vec<T>, eigenvectors: Vec<Vec<C<T>>>) -> Result<Self> {
        let dim = eigenvectors.len();
        if eigenvalues.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: eigenvalues.len(),
            });
        }
        for v in &eigenvectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            let n = crate::linalg::norm_sqr(v).sqrt().as_f64();
            if (n - 1.0).abs() > 1e3 * T::NORM_TOLERANCE {
                return Err(Error::NotNormalized { norm: n });
            }
        }
        let mut pairs: Vec<(T, Vec<C<T>>)> = eigenvalues.into_iter().zip(eigenvectors).collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let (vals, vecs): (Vec<T>, Vec<Vec<C<T>>>) = pairs.into_iter().unzip();
        Ok(Self {
            dim,
            matrix: OnceLock::new(),
            spectrum: OnceLock::from(group_eigenspaces(vals, vecs)),
        })
    }

    pub fn identity(dim: usize) -> Self {
        let basis = (0..dim)
            .map(|k| {
                let mut v = vec![C::new(T::zero(), T::zero()); dim];
                v[k] = C::new(T::one(), T::zero());
                v
            })
            .collect();
        Self {
            dim,
            matrix: OnceLock::from(CMatrix::identity(dim)),
            spectrum: OnceLock::from(vec![Eigenspace {
                eigenvalue: T::one(),
                basis,
            }]),
        }
    }

    /// Pauli Z, `diag(1, −1)`.
    pub fn pauli_z() -> Self {
        Self::new(CMatrix::diagonal(&[T::one(), -T::one()])).expect("diagonal is Hermitian")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        self.matrix.get_or_init(|| {
            let spectrum = self.spectrum.get().expect("operator has a representation");
            let mut m = CMatrix::zeros(self.dim);
            for space in spectrum {
                for v in &space.basis {
                    for i in 0..self.dim {
                        let a = v[i] * space.eigenvalue;
                        for j in 0..self.dim {
                            m[(i, j)] = m[(i, j)] + a * v[j].conj();
                        }
                    }
                }
            }
            m
        })
    }

    /// Eigenspaces in ascending eigenvalue order.
    pub fn spectrum(&self) -> &[Eigenspace<T>] {
        self.spectrum.get_or_init(|| {
            let matrix = self.matrix.get().expect("operator has a representation");
            let e = eigh(matrix);
            group_eigenspaces(e.eigenvalues, e.eigenvectors)
        })
    }

    /// True when the operator has a single eigenspace spanning the block.
    pub fn is_trivial(&self) -> bool {
        let s = self.spectrum();
        s.len() == 1 && s[0].rank() == self.dim
    }
}

impl<T: Real> PartialEq for HermitianOperator<T> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.matrix() == other.matrix()
    }
}

fn group_eigenspaces<T: Real>(values: Vec<T>, vectors: Vec<Vec<C<T>>>) -> Vec<Eigenspace<T>> {
    let tol = T::lit(DEGENERACY_TOLERANCE);
    let mut out: Vec<Eigenspace<T>> = Vec::new();
    for (lam, v) in values.into_iter().zip(vectors) {
        match out.last_mut() {
            Some(last) if (lam - last.eigenvalue).abs() <= tol * T::one().max(lam.abs()) => {
                last.basis.push(v);
            }
            _ => out.push(Eigenspace {
                eigenvalue: lam,
                basis: vec![v],
            }),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_rows(&[
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(HermitianOperator::new(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn degenerate_eigenvalues_share_an_eigenspace() {
        let op = HermitianOperator::<f64>::new(CMatrix::diagonal(&[2.0, -1.0, 2.0, -1.0])).unwrap();
        let s = op.spectrum();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].eigenvalue, -1.0);
        assert_eq!(s[0].rank(), 2);
        assert_eq!(s[1].rank(), 2);
        assert!(HermitianOperator::<f64>::identity(4).is_trivial());
        assert!(!op.is_trivial());
    }

    #[test]
    fn spectral_and_dense_forms_agree() {
        let dense = HermitianOperator::<f64>::new(crate::random::gue(4, &mut crate::random::stream_rng(1, 0))).unwrap();
        let s = dense.spectrum();
        let vals = s.iter().map(|e| e.eigenvalue).collect();
        let vecs = s.iter().map(|e| e.basis[0].clone()).collect();
        let rebuilt = HermitianOperator::from_spectrum(vals, vecs).unwrap();
        assert!(rebuilt.matrix().max_abs_diff(dense.matrix()).unwrap() < 1e-12);
    }

    #[test]
    fn density_matrix_validation() {
        let half = Complex64::new(0.5, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let mixed = CMatrix::from_rows(&[vec![half, zero], vec![zero, half]]).unwrap();
        assert!(DensityMatrix::new(mixed).is_ok());
        let bad_trace = CMatrix::<f64>::identity(2);
        assert!(DensityMatrix::new(bad_trace).is_err());
        let negative = CMatrix::<f64>::diagonal(&[1.5, -0.5]);
        assert!(DensityMatrix::new(negative).is_err());
    }
}
