//! Jordan-Wigner fermionic ladder operators on a qubit register.
//!
//! Mode `j` lives on qubit `j` and `|1⟩` means occupied, so
//! `a_j = Z ⊗ … ⊗ Z ⊗ σ⁻ ⊗ I ⊗ … ⊗ I` with `σ⁻ = [[0,1],[0,0]]` on qubit `j`
//! and the Z string over modes `0..j`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::qstate::bit_of;
use crate::scalar::{czero, Real, C};

/// Largest register for which operators are built and verified.
pub const MAX_MODES: usize = 12;
/// Registers up to this size use dense matrices.
pub const DENSE_MAX_MODES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LadderKind {
    Annihilation,
    Creation,
}

/// Column-compressed sparse matrix: `cols[c]` lists `(row, value)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<T: Real> {
    dim: usize,
    cols: Vec<Vec<(usize, C<T>)>>,
}

impl<T: Real> SparseMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            cols: vec![Vec::new(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Adds `v` at `(row, col)`.
    pub fn push(&mut self, row: usize, col: usize, v: C<T>) {
        let col = &mut self.cols[col];
        match col.iter_mut().find(|(r, _)| *r == row) {
            Some((_, x)) => *x = *x + v,
            None => col.push((row, v)),
        }
    }

    pub fn get(&self, row: usize, col: usize) -> C<T> {
        self.cols[col]
            .iter()
            .find(|(r, _)| *r == row)
            .map_or_else(czero, |(_, v)| *v)
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                out.push(c, r, v.conj());
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = Self::zeros(self.dim);
        for (c, col) in other.cols.iter().enumerate() {
            for &(k, b) in col {
                for &(r, a) in &self.cols[k] {
                    out.push(r, c, a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (c, col) in other.cols.iter().enumerate() {
            for &(r, v) in col {
                out.push(r, c, v);
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> CMatrix<T> {
        let mut m = CMatrix::zeros(self.dim);
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                m[(r, c)] = v;
            }
        }
        m
    }

    /// `max |A_rc − s·δ_rc|` over all entries.
    fn max_deviation_from_scaled_identity(&self, s: T) -> T {
        let mut worst = T::zero();
        for (c, col) in self.cols.iter().enumerate() {
            let mut diag = czero();
            for &(r, v) in col {
                if r == c {
                    diag = v;
                } else {
                    worst = worst.max(v.norm());
                }
            }
            worst = worst.max((diag - C::new(s, T::zero())).norm());
        }
        worst
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

/// Dense below [`DENSE_MAX_MODES`] modes, sparse above.
#[derive(Clone, Debug, PartialEq)]
pub enum OperatorMatrix<T: Real> {
    Dense(CMatrix<T>),
    Sparse(SparseMatrix<T>),
}

impl<T: Real> OperatorMatrix<T> {
    pub fn dim(&self) -> usize {
        match self {
            Self::Dense(m) => m.dim(),
            Self::Sparse(m) => m.dim(),
        }
    }

    pub fn to_dense(&self) -> CMatrix<T> {
        match self {
            Self::Dense(m) => m.clone(),
            Self::Sparse(m) => m.to_dense(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Self::Dense(a), Self::Dense(b)) => Ok(Self::Dense(a.matmul(b)?)),
            (Self::Sparse(a), Self::Sparse(b)) => Ok(Self::Sparse(a.matmul(b)?)),
            _ => Err(Error::InvalidArgument("cannot mix dense and sparse operators".into())),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Self::Dense(a), Self::Dense(b)) => Ok(Self::Dense(a.add(b)?)),
            (Self::Sparse(a), Self::Sparse(b)) => Ok(Self::Sparse(a.add(b)?)),
            _ => Err(Error::InvalidArgument("cannot mix dense and sparse operators".into())),
        }
    }

    /// Largest entrywise deviation from `s·I`.
    pub fn max_deviation_from_identity(&self, s: T) -> T {
        match self {
            Self::Dense(m) => {
                let mut worst = T::zero();
                for i in 0..m.dim() {
                    for j in 0..m.dim() {
                        let want = if i == j { s } else { T::zero() };
                        worst = worst.max((m[(i, j)] - C::new(want, T::zero())).norm());
                    }
                }
                worst
            }
            Self::Sparse(m) => m.max_deviation_from_scaled_identity(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LadderOperator<T: Real> {
    mode: usize,
    kind: LadderKind,
    num_qubits: usize,
    matrix: OperatorMatrix<T>,
}

impl<T: Real> LadderOperator<T> {
    pub fn mode(&self) -> usize {
        self.mode
    }

    pub fn kind(&self) -> LadderKind {
        self.kind
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn matrix(&self) -> &OperatorMatrix<T> {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        let kind = match self.kind {
            LadderKind::Annihilation => LadderKind::Creation,
            LadderKind::Creation => LadderKind::Annihilation,
        };
        let matrix = match &self.matrix {
            OperatorMatrix::Dense(m) => OperatorMatrix::Dense(m.adjoint()),
            OperatorMatrix::Sparse(m) => OperatorMatrix::Sparse(m.adjoint()),
        };
        Self {
            mode: self.mode,
            kind,
            num_qubits: self.num_qubits,
            matrix,
        }
    }
}

/// `a_j` or `a_j†` on `num_qubits` modes.
pub fn build_ladder<T: Real>(mode: usize, kind: LadderKind, num_qubits: usize) -> Result<LadderOperator<T>> {
    if num_qubits == 0 || num_qubits > MAX_MODES {
        return Err(Error::QubitCount(num_qubits));
    }
    if mode >= num_qubits {
        return Err(Error::InvalidArgument(format!(
            "mode {mode} out of range for {num_qubits} modes"
        )));
    }
    let dim = 1usize << num_qubits;
    let bit = 1usize << bit_of(mode, num_qubits);
    // Modes 0..mode sit on the bits above `bit`.
    let string_mask = !((bit << 1) - 1) & (dim - 1);
    let mut sparse = SparseMatrix::zeros(dim);
    for col in 0..dim {
        if col & bit == 0 {
            continue;
        }
        let sign = if (col & string_mask).count_ones().is_multiple_of(2) { T::one() } else { -T::one() };
        sparse.push(col ^ bit, col, C::new(sign, T::zero()));
    }
    let annihilation = LadderOperator {
        mode,
        kind: LadderKind::Annihilation,
        num_qubits,
        matrix: if num_qubits <= DENSE_MAX_MODES {
            OperatorMatrix::Dense(sparse.to_dense())
        } else {
            OperatorMatrix::Sparse(sparse)
        },
    };
    Ok(match kind {
        LadderKind::Annihilation => annihilation,
        LadderKind::Creation => annihilation.adjoint(),
    })
}

/// `AB + BA`.
pub fn anticommutator<T: Real>(a: &LadderOperator<T>, b: &LadderOperator<T>) -> Result<OperatorMatrix<T>> {
    if a.num_qubits != b.num_qubits {
        return Err(Error::DimensionMismatch {
            expected: a.matrix.dim(),
            found: b.matrix.dim(),
        });
    }
    a.matrix.matmul(&b.matrix)?.add(&b.matrix.matmul(&a.matrix)?)
}

/// Largest deviations from the canonical anticommutation relations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CarReport {
    pub num_qubits: usize,
    /// `max_{i,j} ‖{a_i, a_j†} − δ_ij I‖_max`
    pub max_deviation_delta: f64,
    /// `max_{i,j} ‖{a_i, a_j}‖_max`
    pub max_deviation_zero: f64,
}

/// Checks `{a_i, a_j†} = δ_ij I` and `{a_i, a_j} = 0` over all mode pairs.
pub fn verify_car<T: Real>(num_qubits: usize) -> Result<CarReport> {
    if !(2..=MAX_MODES).contains(&num_qubits) {
        return Err(Error::QubitCount(num_qubits));
    }
    let a: Vec<LadderOperator<T>> = (0..num_qubits)
        .map(|j| build_ladder(j, LadderKind::Annihilation, num_qubits))
        .collect::<Result<_>>()?;
    let a_dag: Vec<LadderOperator<T>> = a.iter().map(LadderOperator::adjoint).collect();
    let mut delta = T::zero();
    let mut zero = T::zero();
    for i in 0..num_qubits {
        for j in 0..num_qubits {
            let want = if i == j { T::one() } else { T::zero() };
            delta = delta.max(anticommutator(&a[i], &a_dag[j])?.max_deviation_from_identity(want));
            if j >= i {
                zero = zero.max(anticommutator(&a[i], &a[j])?.max_deviation_from_identity(T::zero()));
            }
        }
    }
    Ok(CarReport {
        num_qubits,
        max_deviation_delta: delta.as_f64(),
        max_deviation_zero: zero.as_f64(),
    })
}
