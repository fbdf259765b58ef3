//! Chiral pairs and their supersymmetric structure.
//!
//! A unitary `U` is chiral-symmetric with respect to a unitary involution
//! `Γ` when `ΓUΓ = U*`. Then `C = ΓU` is itself a unitary involution, so
//! `U = ΓC` is a product of two involutions. The supercharge
//! `Q = (U - U*)/2i` anticommutes with `Γ`; in the grading
//! `ker(Γ-1) ⊕ ker(Γ+1)` it is off-diagonal with lower block `α`, and the
//! index of the pair is the Fredholm index of `α`.

use thiserror::Error;

use crate::matcore::{
    hermitian_eigen, kernel_of, max_abs, nullity, select_columns, CMatrix, MatrixError,
    SquareMatrix, Subspace, Tolerance, C64, I,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChiralError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(
        "dimension mismatch: evolution is {evolution}x{evolution}, involution is {gamma}x{gamma}"
    )]
    DimensionMismatch { evolution: usize, gamma: usize },
    #[error("{which} is not unitary (residual {residual:.3e})")]
    NotUnitary { which: &'static str, residual: f64 },
    #[error("{which} is not an involution (residual {residual:.3e})")]
    NotInvolution { which: &'static str, residual: f64 },
    #[error("chiral symmetry ΓUΓ = U* violated (residual {residual:.3e})")]
    ChiralSymmetryViolated { residual: f64 },
    #[error("{which} is not an orthogonal projection (residual {residual:.3e})")]
    NotProjection { which: &'static str, residual: f64 },
}

/// A validated chiral pair `(U, Γ)` with its coin `C = ΓU`.
#[derive(Debug, Clone)]
pub struct ChiralPair {
    evolution: SquareMatrix,
    gamma: SquareMatrix,
    coin: SquareMatrix,
    tol: Tolerance,
}

/// Validates `(U, Γ)` and caches the coin.
pub fn make_pair(
    evolution: SquareMatrix,
    gamma: SquareMatrix,
    tol: Tolerance,
) -> Result<ChiralPair, ChiralError> {
    ChiralPair::new(evolution, gamma, tol)
}

impl ChiralPair {
    pub fn new(
        evolution: SquareMatrix,
        gamma: SquareMatrix,
        tol: Tolerance,
    ) -> Result<Self, ChiralError> {
        if evolution.dim() != gamma.dim() {
            return Err(ChiralError::DimensionMismatch {
                evolution: evolution.dim(),
                gamma: gamma.dim(),
            });
        }
        let limit = tol.structural();
        let residual = evolution.unitary_residual();
        if residual > limit {
            return Err(ChiralError::NotUnitary {
                which: "evolution",
                residual,
            });
        }
        let residual = gamma.involution_residual();
        if residual > limit {
            return Err(ChiralError::NotInvolution {
                which: "involution",
                residual,
            });
        }
        let residual = gamma.unitary_residual();
        if residual > limit {
            return Err(ChiralError::NotUnitary {
                which: "involution",
                residual,
            });
        }
        let mirrored = &(&gamma * &evolution) * &gamma;
        let residual = mirrored.max_norm_distance(&evolution.adjoint());
        if residual > limit {
            return Err(ChiralError::ChiralSymmetryViolated { residual });
        }
        let coin = &gamma * &evolution;
        // Follows from the above up to rounding.
        let residual = coin.involution_residual();
        if residual > limit {
            return Err(ChiralError::NotInvolution {
                which: "coin",
                residual,
            });
        }
        Ok(Self {
            evolution,
            gamma,
            coin,
            tol,
        })
    }

    /// Builds `U = ΓC` from two unitary involutions.
    pub fn from_involutions(
        gamma: SquareMatrix,
        coin: SquareMatrix,
        tol: Tolerance,
    ) -> Result<Self, ChiralError> {
        if gamma.dim() != coin.dim() {
            return Err(ChiralError::DimensionMismatch {
                evolution: coin.dim(),
                gamma: gamma.dim(),
            });
        }
        for (which, m) in [("coin", &coin), ("involution", &gamma)] {
            let residual = m.involution_residual();
            if residual > tol.structural() {
                return Err(ChiralError::NotInvolution { which, residual });
            }
            let residual = m.unitary_residual();
            if residual > tol.structural() {
                return Err(ChiralError::NotUnitary { which, residual });
            }
        }
        let evolution = &gamma * &coin;
        Self::new(evolution, gamma, tol)
    }

    pub fn evolution(&self) -> &SquareMatrix {
        &self.evolution
    }

    pub fn gamma(&self) -> &SquareMatrix {
        &self.gamma
    }

    pub fn coin(&self) -> &SquareMatrix {
        &self.coin
    }

    pub fn tolerance(&self) -> &Tolerance {
        &self.tol
    }

    pub fn dim(&self) -> usize {
        self.evolution.dim()
    }

    pub fn with_tolerance(&self, tol: Tolerance) -> Result<Self, ChiralError> {
        Self::new(self.evolution.clone(), self.gamma.clone(), tol)
    }

    /// `(-U, Γ)`, whose coin is `-C`.
    pub fn negated(&self) -> Self {
        Self {
            evolution: -&self.evolution,
            gamma: self.gamma.clone(),
            coin: -&self.coin,
            tol: self.tol,
        }
    }

    /// `(U, -Γ)`, whose coin is `-C`.
    pub fn with_negated_gamma(&self) -> Self {
        Self {
            evolution: self.evolution.clone(),
            gamma: -&self.gamma,
            coin: -&self.coin,
            tol: self.tol,
        }
    }

    /// `(U*, Γ)`.
    pub fn inverse(&self) -> Result<Self, ChiralError> {
        Self::new(self.evolution.adjoint(), self.gamma.clone(), self.tol)
    }

    /// `(VUV*, VΓV*)` for a unitary `V`.
    pub fn conjugated(&self, v: &SquareMatrix) -> Result<Self, ChiralError> {
        let residual = v.unitary_residual();
        if residual > self.tol.structural() {
            return Err(ChiralError::NotUnitary {
                which: "conjugating matrix",
                residual,
            });
        }
        let vd = v.adjoint();
        Self::new(
            &(v * &self.evolution) * &vd,
            &(v * &self.gamma) * &vd,
            self.tol,
        )
    }

    /// Same `Γ`, different coin: `(ΓC', Γ)`.
    pub fn with_coin(&self, coin: SquareMatrix) -> Result<Self, ChiralError> {
        Self::from_involutions(self.gamma.clone(), coin, self.tol)
    }

    /// Residual of `ΓUΓ - U*`.
    pub fn chiral_residual(&self) -> f64 {
        (&(&self.gamma * &self.evolution) * &self.gamma)
            .max_norm_distance(&self.evolution.adjoint())
    }
}

/// Supercharge `Q = Im U`, real part `R = Re U`, superhamiltonian `H = Q²`
/// and its graded blocks `H₊ = α*α`, `H₋ = αα*`.
#[derive(Debug, Clone)]
pub struct SuperOperators {
    pub q: SquareMatrix,
    pub r: SquareMatrix,
    pub h: SquareMatrix,
    pub h_plus: CMatrix,
    pub h_minus: CMatrix,
}

impl SuperOperators {
    /// Residual of `{Γ, Q} = 0`.
    pub fn anticommutator_residual(&self, gamma: &SquareMatrix) -> f64 {
        gamma.anticommutator(&self.q).max_norm()
    }

    /// Residual of `[Γ, R] = 0`.
    pub fn commutator_residual(&self, gamma: &SquareMatrix) -> f64 {
        gamma.commutator(&self.r).max_norm()
    }
}

pub fn supercharge(pair: &ChiralPair) -> SquareMatrix {
    let u = pair.evolution();
    (u - &u.adjoint()).scale(-I * 0.5)
}

pub fn real_part(pair: &ChiralPair) -> SquareMatrix {
    let u = pair.evolution();
    (u + &u.adjoint()).scale(C64::new(0.5, 0.0))
}

pub fn super_operators(pair: &ChiralPair) -> SuperOperators {
    let q = supercharge(pair);
    let r = real_part(pair);
    let h = &q * &q;
    let graded = graded_decomposition(pair);
    let h_plus = graded.alpha.adjoint() * &graded.alpha;
    let h_minus = &graded.alpha * graded.alpha.adjoint();
    SuperOperators {
        q,
        r,
        h,
        h_plus,
        h_minus,
    }
}

/// Bases of `ker(Γ-1)` and `ker(Γ+1)` and the block `α = Γ₋QΓ₊` in them.
#[derive(Debug, Clone)]
pub struct GradedDecomposition {
    pub plus: Subspace,
    pub minus: Subspace,
    /// Shape `minus.dim() x plus.dim()`.
    pub alpha: CMatrix,
}

impl GradedDecomposition {
    /// Rebuilds `Q` from `[[0, α*], [α, 0]]` in the graded basis.
    pub fn reconstruct_supercharge(&self) -> CMatrix {
        let (bp, bm) = (self.plus.basis(), self.minus.basis());
        bp * self.alpha.adjoint() * bm.adjoint() + bm * &self.alpha * bp.adjoint()
    }

    /// Max-norm residual of the block reconstruction against `q`.
    pub fn reconstruction_residual(&self, q: &SquareMatrix) -> f64 {
        max_abs(&(self.reconstruct_supercharge() - q.as_matrix()))
    }

    /// `ker α` embedded in the ambient space.
    pub fn kernel_alpha(&self, tol: &Tolerance) -> Subspace {
        let k = kernel_of(&self.alpha, tol);
        Subspace::span_of(&(self.plus.basis() * k.basis()), tol)
    }

    /// `ker α*` embedded in the ambient space.
    pub fn kernel_alpha_adjoint(&self, tol: &Tolerance) -> Subspace {
        let k = kernel_of(&self.alpha.adjoint(), tol);
        Subspace::span_of(&(self.minus.basis() * k.basis()), tol)
    }
}

/// Eigenspaces of `Γ` (eigenvectors with the fixed phase convention) and `α`.
pub fn graded_decomposition(pair: &ChiralPair) -> GradedDecomposition {
    let eig = hermitian_eigen(pair.gamma().as_matrix());
    let plus_cols: Vec<usize> = (0..eig.values.len())
        .filter(|&k| eig.values[k] > 0.0)
        .collect();
    let minus_cols: Vec<usize> = (0..eig.values.len())
        .filter(|&k| eig.values[k] <= 0.0)
        .collect();
    let plus = Subspace::from_orthonormal(select_columns(&eig.vectors, &plus_cols));
    let minus = Subspace::from_orthonormal(select_columns(&eig.vectors, &minus_cols));
    let q = supercharge(pair);
    let alpha = minus.basis().adjoint() * q.as_matrix() * plus.basis();
    GradedDecomposition { plus, minus, alpha }
}

/// `ind_Γ(U) = dim ker α - dim ker α*`.
pub fn index_alpha(pair: &ChiralPair) -> i64 {
    let g = graded_decomposition(pair);
    let tol = pair.tolerance();
    nullity(&g.alpha, tol) as i64 - nullity(&g.alpha.adjoint(), tol) as i64
}

/// Witten index `dim ker H₊ - dim ker H₋`.
pub fn witten_index(pair: &ChiralPair) -> i64 {
    let ops = super_operators(pair);
    let tol = pair.tolerance();
    nullity(&ops.h_plus, tol) as i64 - nullity(&ops.h_minus, tol) as i64
}

/// Signature of `Γ`: `dim ker(Γ-1) - dim ker(Γ+1)`.
pub fn gamma_signature(pair: &ChiralPair) -> i64 {
    let g = graded_decomposition(pair);
    g.plus.dim() as i64 - g.minus.dim() as i64
}

/// Orthogonal projection onto `ker(X ∓ 1)` for a unitary involution `X`:
/// `(1 ± X)/2`.
pub fn spectral_projection(x: &SquareMatrix, sign: f64) -> SquareMatrix {
    let id = SquareMatrix::identity(x.dim());
    (&id + &x.scale(C64::new(sign, 0.0))).scale(C64::new(0.5, 0.0))
}

fn projection_residual(p: &SquareMatrix) -> f64 {
    p.hermitian_residual().max((p * p).max_norm_distance(p))
}

/// Index of a pair of orthogonal projections:
/// `dim ker(P₁ - P₂ - 1) - dim ker(P₁ - P₂ + 1)`.
pub fn projection_pair_index(
    p1: &SquareMatrix,
    p2: &SquareMatrix,
    tol: &Tolerance,
) -> Result<i64, ChiralError> {
    if p1.dim() != p2.dim() {
        return Err(MatrixError::DimensionMismatch {
            left: p1.dim(),
            right: p2.dim(),
        }
        .into());
    }
    for (which, p) in [("first projection", p1), ("second projection", p2)] {
        let residual = projection_residual(p);
        if residual > tol.structural() {
            return Err(ChiralError::NotProjection { which, residual });
        }
    }
    let diff = p1 - p2;
    let one = C64::new(1.0, 0.0);
    let upper = nullity(diff.shifted(one).as_matrix(), tol) as i64;
    let lower = nullity(diff.shifted(-one).as_matrix(), tol) as i64;
    Ok(upper - lower)
}
