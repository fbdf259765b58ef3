//! Dense complex linear algebra with explicit tolerance handling.
//!
//! Everything numerical in the crate funnels through this module: the
//! square-matrix carrier, residual predicates, kernels from singular values,
//! Hermitian and unitary eigendecompositions and subspace arithmetic.
//! Factorizations are delegated to `nalgebra`; the decisions about what
//! counts as "zero", "equal" or "the same subspace" are made here.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;
use thiserror::Error;

pub use nalgebra::Complex;

/// Complex scalar used throughout.
pub type C64 = Complex<f64>;
/// Rectangular complex matrix (column-major, `nalgebra` layout).
pub type CMatrix = DMatrix<C64>;
/// Complex column vector.
pub type CVector = DVector<C64>;

pub const ZERO: C64 = Complex { re: 0.0, im: 0.0 };
pub const ONE: C64 = Complex { re: 1.0, im: 0.0 };
pub const I: C64 = Complex { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix dimension must be positive")]
    Empty,
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("entry {index} is not finite")]
    NonFinite { index: usize },
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("tolerance `{name}` must lie in (0, 1), got {value}")]
    InvalidTolerance { name: &'static str, value: f64 },
}

/// Numerical thresholds.
///
/// `structural` bounds residuals of algebraic identities (unitarity,
/// involution, commutation). `rank` is the relative singular-value cutoff
/// deciding nullity. `cluster` groups eigenvalues that are considered equal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    structural: f64,
    rank: f64,
    cluster: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            structural: 1e-10,
            rank: 1e-8,
            cluster: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(structural: f64, rank: f64, cluster: f64) -> Result<Self, MatrixError> {
        for (name, value) in [
            ("structural", structural),
            ("rank", rank),
            ("cluster", cluster),
        ] {
            if !(value > 0.0 && value < 1.0) {
                return Err(MatrixError::InvalidTolerance { name, value });
            }
        }
        Ok(Self {
            structural,
            rank,
            cluster,
        })
    }

    pub fn structural(&self) -> f64 {
        self.structural
    }

    pub fn rank(&self) -> f64 {
        self.rank
    }

    pub fn cluster(&self) -> f64 {
        self.cluster
    }

    /// Threshold for comparing two subspaces through their projectors.
    ///
    /// Kernel directions are resolved only to about `ε / rank`, so the
    /// threshold is a modest multiple of that.
    pub fn subspace(&self) -> f64 {
        (64.0 * f64::EPSILON / self.rank).max(self.structural)
    }
}

/// A dense complex square matrix with finite entries and positive dimension.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix(CMatrix);

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SquareMatrix{}", self.0)
    }
}

impl SquareMatrix {
    /// Builds a matrix from `dim * dim` entries in row-major order.
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self, MatrixError> {
        if dim == 0 {
            return Err(MatrixError::Empty);
        }
        if entries.len() != dim * dim {
            return Err(MatrixError::LengthMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Self::from_matrix(CMatrix::from_row_slice(dim, dim, &entries))
    }

    pub fn from_matrix(m: CMatrix) -> Result<Self, MatrixError> {
        if m.nrows() != m.ncols() {
            return Err(MatrixError::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(MatrixError::Empty);
        }
        // Row-major index in the error message, matching `new`.
        let n = m.nrows();
        for r in 0..n {
            for c in 0..n {
                let z = m[(r, c)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(MatrixError::NonFinite { index: r * n + c });
                }
            }
        }
        Ok(Self(m))
    }

    /// Wraps a matrix known to be square and finite.
    pub(crate) fn wrap(m: CMatrix) -> Self {
        debug_assert!(m.is_square() && m.nrows() > 0);
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self::wrap(CMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::wrap(CMatrix::zeros(dim, dim))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self::wrap(CMatrix::from_diagonal(&CVector::from_column_slice(diag)))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<C64> {
        self.0.transpose().as_slice().to_vec()
    }

    pub fn adjoint(&self) -> Self {
        Self::wrap(self.0.adjoint())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::wrap(&self.0 * s)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// `self - s * 1`.
    pub fn shifted(&self, s: C64) -> Self {
        let mut m = self.0.clone();
        for k in 0..m.nrows() {
            m[(k, k)] -= s;
        }
        Self::wrap(m)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self::wrap(&self.0 * &other.0 - &other.0 * &self.0)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        Self::wrap(&self.0 * &other.0 + &other.0 * &self.0)
    }

    /// Largest absolute entry.
    pub fn max_norm(&self) -> f64 {
        max_abs(&self.0)
    }

    pub fn max_norm_distance(&self, other: &Self) -> f64 {
        max_abs(&(&self.0 - &other.0))
    }

    pub fn hermitian_residual(&self) -> f64 {
        max_abs(&(&self.0 - self.0.adjoint()))
    }

    pub fn unitary_residual(&self) -> f64 {
        identity_residual(&(self.0.adjoint() * &self.0))
    }

    pub fn involution_residual(&self) -> f64 {
        identity_residual(&(&self.0 * &self.0))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self::wrap(self.0.kronecker(&other.0))
    }

    pub fn mul_vector(&self, v: &CVector) -> CVector {
        &self.0 * v
    }
}

impl<'a> Mul<&'a SquareMatrix> for &'a SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: &'a SquareMatrix) -> SquareMatrix {
        SquareMatrix::wrap(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a SquareMatrix> for &'a SquareMatrix {
    type Output = SquareMatrix;
    fn add(self, rhs: &'a SquareMatrix) -> SquareMatrix {
        SquareMatrix::wrap(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a SquareMatrix> for &'a SquareMatrix {
    type Output = SquareMatrix;
    fn sub(self, rhs: &'a SquareMatrix) -> SquareMatrix {
        SquareMatrix::wrap(&self.0 - &rhs.0)
    }
}

impl Neg for &SquareMatrix {
    type Output = SquareMatrix;
    fn neg(self) -> SquareMatrix {
        SquareMatrix::wrap(-&self.0)
    }
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

fn identity_residual(m: &CMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let target = if r == c { ONE } else { ZERO };
            worst = worst.max((m[(r, c)] - target).norm());
        }
    }
    worst
}

/// An orthonormal basis of a subspace of `C^ambient_dim`, stored as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: CMatrix,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            basis: CMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            basis: CMatrix::identity(ambient_dim, ambient_dim),
        }
    }

    /// Trusts the caller that the columns are orthonormal.
    pub(crate) fn from_orthonormal(basis: CMatrix) -> Self {
        Self { basis }
    }

    /// Orthonormal basis of the column span of `vectors`.
    pub fn span_of(vectors: &CMatrix, tol: &Tolerance) -> Self {
        let n = vectors.nrows();
        if vectors.ncols() == 0 || n == 0 {
            return Self::zero(n);
        }
        let svd = vectors.clone().svd(true, false);
        let u = svd.u.expect("left singular vectors requested");
        let smax = svd.singular_values.max();
        let cutoff = tol.rank() * if smax > tol.rank() { smax } else { 1.0 };
        let keep: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&k| svd.singular_values[k] > cutoff)
            .collect();
        Self::from_orthonormal(select_columns(&u, &keep))
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    /// Max-norm deviation of the Gram matrix from the identity.
    pub fn gram_residual(&self) -> f64 {
        identity_residual(&(self.basis.adjoint() * &self.basis))
    }

    /// Image under a linear map `ambient -> m.nrows()`, re-orthonormalized.
    pub fn image(&self, m: &CMatrix, tol: &Tolerance) -> Self {
        Self::span_of(&(m * &self.basis), tol)
    }

    /// Span of `self ∪ other`.
    pub fn join(&self, other: &Self, tol: &Tolerance) -> Result<Self, MatrixError> {
        check_ambient(self, other)?;
        let n = self.ambient_dim();
        let mut stacked = CMatrix::zeros(n, self.dim() + other.dim());
        stacked.columns_mut(0, self.dim()).copy_from(&self.basis);
        stacked
            .columns_mut(self.dim(), other.dim())
            .copy_from(&other.basis);
        Ok(Self::span_of(&stacked, tol))
    }

    /// Largest overlap `|<a, b>|` between the two subspaces; zero iff orthogonal.
    pub fn overlap(&self, other: &Self) -> f64 {
        if self.is_zero() || other.is_zero() {
            return 0.0;
        }
        max_abs(&(self.basis.adjoint() * &other.basis))
    }

    /// Projector distance; infinite when the dimensions differ.
    pub fn distance(&self, other: &Self) -> f64 {
        if self.ambient_dim() != other.ambient_dim() || self.dim() != other.dim() {
            return f64::INFINITY;
        }
        max_abs(&(self.projector() - other.projector()))
    }

    pub fn same_as(&self, other: &Self, tol: &Tolerance) -> bool {
        self.distance(other) <= tol.subspace()
    }
}

fn check_ambient(a: &Subspace, b: &Subspace) -> Result<(), MatrixError> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(MatrixError::DimensionMismatch {
            left: a.ambient_dim(),
            right: b.ambient_dim(),
        });
    }
    Ok(())
}

pub(crate) fn select_columns(m: &CMatrix, cols: &[usize]) -> CMatrix {
    let mut out = CMatrix::zeros(m.nrows(), cols.len());
    for (j, &c) in cols.iter().enumerate() {
        out.set_column(j, &m.column(c));
    }
    out
}

pub fn is_unitary(a: &SquareMatrix, tol: &Tolerance) -> bool {
    a.unitary_residual() <= tol.structural()
}

pub fn is_involution(a: &SquareMatrix, tol: &Tolerance) -> bool {
    a.involution_residual() <= tol.structural()
}

pub fn is_hermitian(a: &SquareMatrix, tol: &Tolerance) -> bool {
    a.hermitian_residual() <= tol.structural()
}

/// Orthonormal basis of the numerical kernel of a square matrix.
pub fn kernel_basis(a: &SquareMatrix, tol: &Tolerance) -> Subspace {
    kernel_of(a.as_matrix(), tol)
}

/// Numerical kernel of a rectangular matrix.
///
/// Right singular vectors whose singular value is at most
/// `tol.rank * sigma_max` span it. A matrix with `sigma_max <= tol.rank`
/// is zero up to rounding and its kernel is everything.
pub fn kernel_of(m: &CMatrix, tol: &Tolerance) -> Subspace {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Subspace::zero(0);
    }
    if rows == 0 {
        return Subspace::full(cols);
    }
    // A thin SVD of a wide matrix drops part of the row space; pad with zero
    // rows so V is complete.
    let work = if rows < cols {
        let mut padded = CMatrix::zeros(cols, cols);
        padded.rows_mut(0, rows).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv = &svd.singular_values;
    let smax = sv.max();
    let cutoff = tol.rank() * if smax > tol.rank() { smax } else { 1.0 };
    let mut basis = CMatrix::zeros(cols, 0);
    let keep: Vec<usize> = (0..sv.len()).filter(|&k| sv[k] <= cutoff).collect();
    if !keep.is_empty() {
        let v = v_t.adjoint();
        basis = select_columns(&v, &keep);
    }
    Subspace::from_orthonormal(basis)
}

pub fn nullity(m: &CMatrix, tol: &Tolerance) -> usize {
    kernel_of(m, tol).dim()
}

pub fn numerical_rank(m: &CMatrix, tol: &Tolerance) -> usize {
    m.ncols() - nullity(m, tol)
}

/// Eigenpairs of a Hermitian matrix, values ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, aligned with `values`.
    pub vectors: CMatrix,
}

pub fn eig_hermitian(a: &SquareMatrix, tol: &Tolerance) -> Result<HermitianEigen, MatrixError> {
    let residual = a.hermitian_residual();
    if residual > tol.structural() {
        return Err(MatrixError::NotHermitian { residual });
    }
    Ok(hermitian_eigen(a.as_matrix()))
}

/// Hermitian eigensolve without the precondition check; symmetrizes first.
pub(crate) fn hermitian_eigen(m: &CMatrix) -> HermitianEigen {
    let n = m.nrows();
    if n == 0 {
        return HermitianEigen {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        };
    }
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = select_columns(&eig.eigenvectors, &order);
    for mut col in vectors.column_iter_mut() {
        fix_phase(&mut col);
    }
    HermitianEigen { values, vectors }
}

/// Rotates a vector so its largest-magnitude entry (first one on ties) is real positive.
fn fix_phase<S>(v: &mut nalgebra::Matrix<C64, nalgebra::Dyn, nalgebra::U1, S>)
where
    S: nalgebra::StorageMut<C64, nalgebra::Dyn, nalgebra::U1>,
{
    let mut best = 0;
    let mut best_abs = -1.0;
    for (k, z) in v.iter().enumerate() {
        // Relative slack keeps the pick stable under rounding.
        if z.norm() > best_abs * (1.0 + 1e-9) {
            best = k;
            best_abs = z.norm();
        }
    }
    if best_abs > 0.0 {
        let phase = v[best].conj() / best_abs;
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

/// Eigenpairs of a unitary matrix, ordered by principal argument in (-π, π].
#[derive(Debug, Clone)]
pub struct UnitaryEigen {
    pub values: Vec<C64>,
    pub vectors: CMatrix,
}

/// Eigendecomposition of a unitary matrix.
///
/// A unitary `A` splits as `R + iQ` with commuting Hermitian parts. `R` is
/// diagonalized first; on each of its eigenvalue clusters `Q` is compressed
/// and diagonalized, which separates `e^{iθ}` from `e^{-iθ}`. Eigenvalues are
/// the Rayleigh quotients of `A` on the resulting orthonormal vectors.
pub fn eig_unitary(a: &SquareMatrix, tol: &Tolerance) -> Result<UnitaryEigen, MatrixError> {
    let residual = a.unitary_residual();
    if residual > tol.structural() {
        return Err(MatrixError::NotUnitary { residual });
    }
    let m = a.as_matrix();
    let n = m.nrows();
    let half = C64::new(0.5, 0.0);
    let re = (m + m.adjoint()) * half;
    let im = (m - m.adjoint()) * C64::new(0.0, -0.5);
    let outer = hermitian_eigen(&re);

    let mut vectors = CMatrix::zeros(n, n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && outer.values[end] - outer.values[end - 1] <= tol.cluster() {
            end += 1;
        }
        let block = outer.vectors.columns(start, end - start).into_owned();
        if end - start == 1 {
            vectors.set_column(start, &block.column(0));
        } else {
            let compressed = block.adjoint() * &im * &block;
            let inner = hermitian_eigen(&compressed);
            let rotated = &block * &inner.vectors;
            vectors.columns_mut(start, end - start).copy_from(&rotated);
        }
        start = end;
    }

    let mut pairs: Vec<(C64, usize)> = (0..n)
        .map(|k| {
            let v = vectors.column(k);
            let lambda = (v.adjoint() * m * v)[(0, 0)];
            (lambda, k)
        })
        .collect();
    pairs.sort_by(|a, b| principal_arg(a.0, tol).total_cmp(&principal_arg(b.0, tol)));
    let values = pairs.iter().map(|p| p.0).collect();
    let order: Vec<usize> = pairs.iter().map(|p| p.1).collect();
    let mut vectors = select_columns(&vectors, &order);
    for mut col in vectors.column_iter_mut() {
        fix_phase(&mut col);
    }
    Ok(UnitaryEigen { values, vectors })
}

/// Argument in (-π, π], snapping values within `tol.cluster` of -1 to π.
pub fn principal_arg(z: C64, tol: &Tolerance) -> f64 {
    if (z + ONE).norm() <= tol.cluster() {
        return std::f64::consts::PI;
    }
    z.arg()
}

/// Orthonormal basis of `S1 ∩ S2`: the kernel of `[(1 - P1); (1 - P2)]`.
pub fn subspace_intersection(
    s1: &Subspace,
    s2: &Subspace,
    tol: &Tolerance,
) -> Result<Subspace, MatrixError> {
    check_ambient(s1, s2)?;
    let n = s1.ambient_dim();
    if s1.is_zero() || s2.is_zero() {
        return Ok(Subspace::zero(n));
    }
    let id = CMatrix::identity(n, n);
    let mut stacked = CMatrix::zeros(2 * n, n);
    stacked.rows_mut(0, n).copy_from(&(&id - s1.projector()));
    stacked.rows_mut(n, n).copy_from(&(&id - s2.projector()));
    Ok(kernel_of(&stacked, tol))
}

/// Groups ascending reals into clusters whose consecutive gaps are within `eps`.
/// Returns (mean, multiplicity) per cluster.
pub fn cluster_reals(sorted: &[f64], eps: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] - sorted[end - 1] <= eps {
            end += 1;
        }
        let mean = sorted[start..end].iter().sum::<f64>() / (end - start) as f64;
        out.push((mean, end - start));
        start = end;
    }
    out
}

/// Groups complex values by proximity (single linkage within `eps`), keeping
/// first-seen order. Returns (mean, multiplicity) per cluster.
pub fn cluster_complex(values: &[C64], eps: f64) -> Vec<(C64, usize)> {
    let n = values.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn root(label: &mut [usize], mut k: usize) -> usize {
        while label[k] != k {
            label[k] = label[label[k]];
            k = label[k];
        }
        k
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (values[i] - values[j]).norm() <= eps {
                let (a, b) = (root(&mut label, i), root(&mut label, j));
                if a != b {
                    label[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<(usize, C64, usize)> = Vec::new();
    for (k, &z) in values.iter().enumerate() {
        let r = root(&mut label, k);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += z;
                g.2 += 1;
            }
            None => groups.push((r, z, 1)),
        }
    }
    groups
        .into_iter()
        .map(|(_, sum, count)| (sum / count as f64, count))
        .collect()
}
