//! Coisometry, discriminant, eigenspace census and the spectral mapping
//! between a chiral pair and its discriminant.
//!
//! With `K = ker(C-1)` and `d` the coisometry whose rows are an orthonormal
//! basis of `K`, the discriminant is `T = dΓd*`, a self-adjoint contraction.
//! Away from `±1`, the eigenvalues of `U` are `e^{±i arccos t}` for `t` in
//! `σ(T)` with matching multiplicities; at `±1` they split into inherited
//! (`𝔗±`) and birth (`𝔅±`) eigenspaces.
//!
//! When `ker(C-1)` is trivial, or strictly larger than a nontrivial
//! `ker(C+1)`, the decomposition is built for `(-U, Γ)` instead (coin `-C`)
//! and marked `flipped`. The index is unchanged under `U -> -U`, and
//! `σ(U) = -σ(-U)`, so reported values always refer to the supplied pair.

use serde::Serialize;
use thiserror::Error;

use crate::checks::{self, Check};
use crate::chiral::{
    gamma_signature, graded_decomposition, index_alpha, super_operators, witten_index, ChiralError,
    ChiralPair, GradedDecomposition, SuperOperators,
};
use crate::matcore::{
    cluster_complex, cluster_reals, eig_hermitian, eig_unitary, kernel_basis, max_abs,
    subspace_intersection, CMatrix, HermitianEigen, MatrixError, SquareMatrix, Subspace, Tolerance,
    UnitaryEigen, C64, ONE,
};

#[derive(Debug, Clone, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Chiral(#[from] ChiralError),
    #[error("value {value} lies outside [-1, 1] beyond tolerance")]
    OutOfRange { value: f64 },
    #[error("inconsistency detected in `{identity}` (residual {residual:.3e})")]
    InconsistencyDetected {
        identity: String,
        residual: f64,
        report: Box<IndexReport>,
    },
}

/// The coisometry `d: H -> K` onto the coin eigenspace `ker(C' - 1)`, where
/// `C'` is the coin (or its negative when `flipped`), with `T = dΓd*`.
#[derive(Debug, Clone)]
pub struct CoisometryDecomposition {
    d: CMatrix,
    flipped: bool,
    discriminant: SquareMatrix,
}

impl CoisometryDecomposition {
    /// Shape `K x n`.
    pub fn d(&self) -> &CMatrix {
        &self.d
    }

    pub fn d_adjoint(&self) -> CMatrix {
        self.d.adjoint()
    }

    pub fn flipped(&self) -> bool {
        self.flipped
    }

    /// `-1` when flipped, else `1`.
    pub fn sign(&self) -> f64 {
        if self.flipped {
            -1.0
        } else {
            1.0
        }
    }

    pub fn coin_space_dim(&self) -> usize {
        self.d.nrows()
    }

    pub fn discriminant(&self) -> &SquareMatrix {
        &self.discriminant
    }

    /// The pair the decomposition describes: `(U, Γ)` or `(-U, Γ)`.
    pub fn working_pair(&self, pair: &ChiralPair) -> ChiralPair {
        if self.flipped {
            pair.negated()
        } else {
            pair.clone()
        }
    }

    /// `‖dd* - 1‖`.
    pub fn coisometry_residual(&self) -> f64 {
        let k = self.d.nrows();
        max_abs(&(&self.d * self.d.adjoint() - CMatrix::identity(k, k)))
    }

    /// `‖2d*d - 1 - C'‖`.
    pub fn coin_residual(&self, pair: &ChiralPair) -> f64 {
        let n = self.d.ncols();
        let coin = pair.coin().as_matrix() * C64::new(self.sign(), 0.0);
        let rebuilt = self.d.adjoint() * &self.d * C64::new(2.0, 0.0) - CMatrix::identity(n, n);
        max_abs(&(rebuilt - coin))
    }
}

/// Builds `d` from an orthonormal basis of the coin's `+1` eigenspace, or
/// of `-C`'s when the decomposition is flipped.
pub fn coisometry(pair: &ChiralPair) -> CoisometryDecomposition {
    let tol = pair.tolerance();
    let coin = pair.coin();
    let k_plus = kernel_basis(&coin.shifted(ONE), tol);
    let k_minus = kernel_basis(&coin.shifted(-ONE), tol);
    let flipped = k_plus.is_zero() || (!k_minus.is_zero() && k_minus.dim() < k_plus.dim());
    let space = if flipped { k_minus } else { k_plus };
    let d = space.basis().adjoint();
    let t = &d * pair.gamma().as_matrix() * space.basis();
    // T is Hermitian in exact arithmetic; symmetrize away the rounding.
    let t = (&t + t.adjoint()) * C64::new(0.5, 0.0);
    CoisometryDecomposition {
        d,
        flipped,
        discriminant: SquareMatrix::wrap(t),
    }
}

/// `φ(z) = (z + 1/z) / 2`.
pub fn joukowski(z: C64) -> C64 {
    (z + z.inv()) * 0.5
}

/// `(g₊(ξ), g₋(ξ)) = (e^{i arccos ξ}, e^{-i arccos ξ})` for each input.
///
/// Inputs within `tol.cluster` outside `[-1, 1]` are clamped; anything
/// further out is an error.
pub fn spectral_image(xs: &[f64], tol: &Tolerance) -> Result<Vec<(C64, C64)>, SpectralError> {
    xs.iter()
        .map(|&x| {
            if !x.is_finite() || x.abs() > 1.0 + tol.cluster() {
                return Err(SpectralError::OutOfRange { value: x });
            }
            let theta = x.clamp(-1.0, 1.0).acos();
            Ok((C64::from_polar(1.0, theta), C64::from_polar(1.0, -theta)))
        })
        .collect()
}

/// Dimensions of the inherited and birth eigenspaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CensusCounts {
    pub m_plus: usize,
    pub m_minus: usize,
    #[serde(rename = "M_plus")]
    pub big_m_plus: usize,
    #[serde(rename = "M_minus")]
    pub big_m_minus: usize,
}

impl CensusCounts {
    /// `(M₋ - m₋) - (M₊ - m₊)`.
    pub fn index(&self) -> i64 {
        (self.big_m_minus as i64 - self.m_minus as i64)
            - (self.big_m_plus as i64 - self.m_plus as i64)
    }
}

/// `𝔗± = ker(Γ∓1) ∩ ker(C-1)` and `𝔅± = ker(Γ±1) ∩ ker(C+1)`.
#[derive(Debug, Clone)]
pub struct EigenspaceCensus {
    pub inherited_plus: Subspace,
    pub inherited_minus: Subspace,
    pub birth_plus: Subspace,
    pub birth_minus: Subspace,
    /// Distance between the inherited spaces and their lifts `d* ker(T∓1)`.
    pub lift_residual: f64,
}

impl EigenspaceCensus {
    pub fn counts(&self) -> CensusCounts {
        CensusCounts {
            m_plus: self.inherited_plus.dim(),
            m_minus: self.inherited_minus.dim(),
            big_m_plus: self.birth_plus.dim(),
            big_m_minus: self.birth_minus.dim(),
        }
    }
}

fn involution_eigenspace(x: &SquareMatrix, sign: f64, tol: &Tolerance) -> Subspace {
    kernel_basis(&x.shifted(C64::new(sign, 0.0)), tol)
}

fn census_spaces(
    gamma: &SquareMatrix,
    coin: &SquareMatrix,
    tol: &Tolerance,
) -> Result<[Subspace; 4], MatrixError> {
    let g_plus = involution_eigenspace(gamma, 1.0, tol);
    let g_minus = involution_eigenspace(gamma, -1.0, tol);
    let c_plus = involution_eigenspace(coin, 1.0, tol);
    let c_minus = involution_eigenspace(coin, -1.0, tol);
    Ok([
        subspace_intersection(&g_plus, &c_plus, tol)?,
        subspace_intersection(&g_minus, &c_plus, tol)?,
        subspace_intersection(&g_minus, &c_minus, tol)?,
        subspace_intersection(&g_plus, &c_minus, tol)?,
    ])
}

/// Lifts `d* ker(T - s)` for `s = ±1`.
pub fn lifted_discriminant_kernel(
    dec: &CoisometryDecomposition,
    s: f64,
    tol: &Tolerance,
) -> Subspace {
    let k = kernel_basis(&dec.discriminant().shifted(C64::new(s, 0.0)), tol);
    Subspace::span_of(&(dec.d_adjoint() * k.basis()), tol)
}

/// The census of the pair as supplied.
pub fn census(pair: &ChiralPair) -> Result<EigenspaceCensus, SpectralError> {
    census_with(pair, &coisometry(pair))
}

pub(crate) fn census_with(
    pair: &ChiralPair,
    dec: &CoisometryDecomposition,
) -> Result<EigenspaceCensus, SpectralError> {
    let tol = pair.tolerance();
    let [inherited_plus, inherited_minus, birth_plus, birth_minus] =
        census_spaces(pair.gamma(), pair.coin(), tol)?;
    // For (-U, Γ) the inherited spaces are the supplied pair's birth spaces
    // with the sign swapped.
    let (target_plus, target_minus) = if dec.flipped() {
        (&birth_minus, &birth_plus)
    } else {
        (&inherited_plus, &inherited_minus)
    };
    let lift_plus = lifted_discriminant_kernel(dec, 1.0, tol);
    let lift_minus = lifted_discriminant_kernel(dec, -1.0, tol);
    let lift_residual = lift_plus
        .distance(target_plus)
        .max(lift_minus.distance(target_minus));
    Ok(EigenspaceCensus {
        inherited_plus,
        inherited_minus,
        birth_plus,
        birth_minus,
        lift_residual,
    })
}

/// `(M₋ - m₋) - (M₊ - m₊)` from the census.
pub fn index_formula(pair: &ChiralPair) -> Result<i64, SpectralError> {
    let tol = pair.tolerance();
    let [tp, tm, bp, bm] = census_spaces(pair.gamma(), pair.coin(), tol)?;
    Ok((bm.dim() as i64 - tm.dim() as i64) - (bp.dim() as i64 - tp.dim() as i64))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealCluster {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitCluster {
    /// `[re, im]`.
    pub value: [f64; 2],
    pub multiplicity: usize,
}

/// Everything `verify_spectral_mapping` computes, kept for the invariant checks.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub pair: ChiralPair,
    pub graded: GradedDecomposition,
    pub ops: SuperOperators,
    pub decomposition: CoisometryDecomposition,
    pub census: EigenspaceCensus,
    /// Census of the pair the decomposition describes.
    pub working_census: CensusCounts,
    pub u_eigen: UnitaryEigen,
    pub t_eigen: HermitianEigen,
    pub h_eigen: HermitianEigen,
    pub index_alpha: i64,
    pub index_witten: i64,
    pub index_formula: i64,
    pub gamma_signature: i64,
    pub mapping: MappingComparison,
}

/// Comparison of `σ(U')` with `φ⁻¹(σ(T))` for the working pair `U'`.
#[derive(Debug, Clone)]
pub struct MappingComparison {
    /// Max distance between matched eigenvalues away from `±1`.
    pub residual: f64,
    /// Every cluster of `σ(T) ∖ {±1}` has both preimages with equal multiplicity.
    pub multiplicities_match: bool,
    /// `nullity(U' ∓ 1)`.
    pub unit_nullities: (usize, usize),
    /// `nullity(T ∓ 1)`.
    pub discriminant_nullities: (usize, usize),
    /// Eigenvalues of `T` strictly inside `(-1, 1)`, ascending.
    pub interior: Vec<f64>,
    pub near_degenerate: bool,
}

impl Analysis {
    pub fn new(pair: &ChiralPair) -> Result<Self, SpectralError> {
        let tol = *pair.tolerance();
        let graded = graded_decomposition(pair);
        let ops = super_operators(pair);
        let decomposition = coisometry(pair);
        let census = census_with(pair, &decomposition)?;
        let counts = census.counts();
        let working_census = if decomposition.flipped() {
            CensusCounts {
                m_plus: counts.big_m_minus,
                m_minus: counts.big_m_plus,
                big_m_plus: counts.m_minus,
                big_m_minus: counts.m_plus,
            }
        } else {
            counts
        };
        let u_eigen = eig_unitary(pair.evolution(), &tol)?;
        let t_eigen = eig_hermitian(decomposition.discriminant(), &tol)?;
        let h_eigen = eig_hermitian(&ops.h, &tol)?;
        let mapping = compare_mapping(pair, &decomposition, &u_eigen, &t_eigen)?;
        Ok(Self {
            index_alpha: index_alpha(pair),
            index_witten: witten_index(pair),
            index_formula: counts.index(),
            gamma_signature: gamma_signature(pair),
            pair: pair.clone(),
            graded,
            ops,
            decomposition,
            census,
            working_census,
            u_eigen,
            t_eigen,
            h_eigen,
            mapping,
        })
    }

    pub fn tolerance(&self) -> &Tolerance {
        self.pair.tolerance()
    }

    pub fn indices(&self) -> [i64; 4] {
        [
            self.index_alpha,
            self.index_witten,
            self.index_formula,
            self.gamma_signature,
        ]
    }

    pub fn spectrum_u(&self) -> Vec<UnitCluster> {
        cluster_complex(&self.u_eigen.values, self.tolerance().cluster())
            .into_iter()
            .map(|(z, k)| UnitCluster {
                value: [z.re, z.im],
                multiplicity: k,
            })
            .collect()
    }

    pub fn spectrum_t(&self) -> Vec<RealCluster> {
        real_clusters(&self.t_eigen.values, self.tolerance().cluster())
    }

    pub fn spectrum_h(&self) -> Vec<RealCluster> {
        real_clusters(&self.h_eigen.values, self.tolerance().cluster())
    }

    pub fn report(&self, checks: Vec<Check>) -> IndexReport {
        let [a, w, f, s] = self.indices();
        let consistent =
            a == w && w == f && f == s && self.mapping.residual <= self.tolerance().cluster();
        IndexReport {
            dim: self.pair.dim(),
            index_alpha: a,
            index_witten: w,
            index_formula: f,
            gamma_signature: s,
            census: self.census.counts(),
            flipped: self.decomposition.flipped(),
            coin_space_dim: self.decomposition.coin_space_dim(),
            spectrum_u: self.spectrum_u(),
            spectrum_t: self.spectrum_t(),
            spectrum_h: self.spectrum_h(),
            mapping_residual: self.mapping.residual,
            near_degenerate_clusters: self.mapping.near_degenerate,
            consistent,
            checks,
        }
    }
}

fn real_clusters(values: &[f64], eps: f64) -> Vec<RealCluster> {
    cluster_reals(values, eps)
        .into_iter()
        .map(|(value, multiplicity)| RealCluster {
            value,
            multiplicity,
        })
        .collect()
}

/// Removes the `count` entries of `values` closest to `target`.
fn remove_closest(values: &mut Vec<C64>, target: C64, count: usize) {
    for _ in 0..count {
        if let Some((k, _)) = values
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - target).norm().total_cmp(&(b.1 - target).norm()))
        {
            values.swap_remove(k);
        }
    }
}

fn compare_mapping(
    pair: &ChiralPair,
    dec: &CoisometryDecomposition,
    u_eigen: &UnitaryEigen,
    t_eigen: &HermitianEigen,
) -> Result<MappingComparison, SpectralError> {
    let tol = pair.tolerance();
    let sign = C64::new(dec.sign(), 0.0);
    let working = pair.evolution().scale(sign);
    let unit_nullities = (
        kernel_basis(&working.shifted(ONE), tol).dim(),
        kernel_basis(&working.shifted(-ONE), tol).dim(),
    );
    let t = dec.discriminant();
    let discriminant_nullities = (
        kernel_basis(&t.shifted(ONE), tol).dim(),
        kernel_basis(&t.shifted(-ONE), tol).dim(),
    );

    let mut rest: Vec<C64> = u_eigen.values.iter().map(|z| z * sign).collect();
    remove_closest(&mut rest, ONE, unit_nullities.0);
    remove_closest(&mut rest, -ONE, unit_nullities.1);

    // t_eigen is ascending: drop the top m₊ and bottom m₋ values.
    let tv = &t_eigen.values;
    let hi = tv.len().saturating_sub(discriminant_nullities.0);
    let lo = discriminant_nullities.1.min(hi);
    let interior: Vec<f64> = tv[lo..hi].to_vec();

    let images = spectral_image(&interior, tol)?;
    let mut residual = 0.0_f64;
    if rest.len() != 2 * interior.len() {
        residual = f64::INFINITY;
    } else {
        let mut unused = rest.clone();
        for (gp, gm) in &images {
            for g in [gp, gm] {
                let (k, dist) = unused
                    .iter()
                    .enumerate()
                    .map(|(k, z)| (k, (z - g).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("as many eigenvalues as images");
                residual = residual.max(dist);
                unused.swap_remove(k);
            }
        }
    }

    let eps = tol.cluster();
    let mut multiplicities_match = residual.is_finite();
    let mut start = 0;
    while multiplicities_match && start < interior.len() {
        let mut end = start + 1;
        while end < interior.len() && interior[end] - interior[end - 1] <= eps {
            end += 1;
        }
        let (lo_t, hi_t) = (interior[start] - eps, interior[end - 1] + eps);
        let within = |z: &&C64| z.re >= lo_t && z.re <= hi_t;
        let upper = rest.iter().filter(within).filter(|z| z.im > 0.0).count();
        let lower = rest.iter().filter(within).filter(|z| z.im < 0.0).count();
        multiplicities_match = upper == end - start && lower == end - start;
        start = end;
    }

    let near = 10.0 * eps;
    let centers = cluster_complex(&u_eigen.values, eps);
    let mut near_degenerate = false;
    for i in 0..centers.len() {
        for j in (i + 1)..centers.len() {
            near_degenerate |= (centers[i].0 - centers[j].0).norm() <= near;
        }
    }
    let t_centers = cluster_reals(tv, eps);
    near_degenerate |= t_centers.windows(2).any(|w| w[1].0 - w[0].0 <= near);

    Ok(MappingComparison {
        residual,
        multiplicities_match,
        unit_nullities,
        discriminant_nullities,
        interior,
        near_degenerate,
    })
}

/// Result of checking every structural identity on one pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexReport {
    pub dim: usize,
    pub index_alpha: i64,
    pub index_witten: i64,
    pub index_formula: i64,
    pub gamma_signature: i64,
    pub census: CensusCounts,
    pub flipped: bool,
    pub coin_space_dim: usize,
    #[serde(rename = "spectrum_U")]
    pub spectrum_u: Vec<UnitCluster>,
    #[serde(rename = "spectrum_T")]
    pub spectrum_t: Vec<RealCluster>,
    #[serde(rename = "spectrum_H")]
    pub spectrum_h: Vec<RealCluster>,
    pub mapping_residual: f64,
    pub near_degenerate_clusters: bool,
    pub consistent: bool,
    pub checks: Vec<Check>,
}

impl IndexReport {
    pub fn all_passed(&self) -> bool {
        self.consistent && self.checks.iter().all(|c| c.passed)
    }
}

/// Computes `σ(U)`, `σ(T)`, `σ(H)`, all four index routes and the
/// deterministic invariant checks, failing if any of them disagrees.
pub fn verify_spectral_mapping(pair: &ChiralPair) -> Result<IndexReport, SpectralError> {
    let analysis = Analysis::new(pair)?;
    let checks = checks::structural_checks(&analysis);
    let report = analysis.report(checks);
    if let Some(failed) = report.checks.iter().find(|c| !c.passed) {
        return Err(SpectralError::InconsistencyDetected {
            identity: failed.name.clone(),
            residual: failed.residual,
            report: Box::new(report),
        });
    }
    if !report.consistent {
        return Err(SpectralError::InconsistencyDetected {
            identity: "report_consistency".into(),
            residual: report.mapping_residual,
            report: Box::new(report),
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chiral::make_pair;
    use std::f64::consts::PI;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn diag(xs: &[f64]) -> SquareMatrix {
        SquareMatrix::from_real_diagonal(xs)
    }

    #[test]
    fn identity_coin_gives_unitary_d() {
        let gamma = diag(&[1.0, -1.0, -1.0]);
        let pair = ChiralPair::from_involutions(gamma, SquareMatrix::identity(3), tol()).unwrap();
        let dec = coisometry(&pair);
        assert!(!dec.flipped());
        assert_eq!(dec.coin_space_dim(), 3);
        let d = dec.d();
        assert!(max_abs(&(d.adjoint() * d - CMatrix::identity(3, 3))) < 1e-14);
        // T = dΓd*: same spectrum as Γ
        let eig = eig_hermitian(dec.discriminant(), &tol()).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-14 && (eig.values[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn minus_one_coin_flips() {
        let pair =
            ChiralPair::from_involutions(diag(&[1.0, -1.0]), diag(&[-1.0, -1.0]), tol()).unwrap();
        let dec = coisometry(&pair);
        assert!(dec.flipped());
        assert_eq!(dec.coin_space_dim(), 2);
        assert!(dec.coin_residual(&pair) < 1e-14);
        assert!(dec.coisometry_residual() < 1e-14);
    }

    #[test]
    fn spectral_image_examples() {
        let img = spectral_image(&[1.0, 0.0, -0.5], &tol()).unwrap();
        assert!((img[0].0 - ONE).norm() < 1e-15 && (img[0].1 - ONE).norm() < 1e-15);
        assert!((img[1].0 - C64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((img[1].1 - C64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((img[2].0 - C64::from_polar(1.0, 2.0 * PI / 3.0)).norm() < 1e-15);
        assert!((img[2].1 - C64::from_polar(1.0, -2.0 * PI / 3.0)).norm() < 1e-15);
        assert!(spectral_image(&[1.0 + 1e-9], &tol()).is_ok());
        assert!(matches!(
            spectral_image(&[1.1], &tol()),
            Err(SpectralError::OutOfRange { .. })
        ));
    }

    #[test]
    fn joukowski_inverts_images() {
        let xs: Vec<f64> = (0..=20).map(|k| -1.0 + k as f64 / 10.0).collect();
        for (x, (gp, gm)) in xs.iter().zip(spectral_image(&xs, &tol()).unwrap()) {
            assert!((joukowski(gp).re - x).abs() < 1e-15);
            assert!((joukowski(gm).re - x).abs() < 1e-15);
            assert!(joukowski(gp).im.abs() < 1e-15);
        }
    }

    #[test]
    fn trivial_census() {
        let id = SquareMatrix::identity(3);
        let pair = make_pair(id.clone(), id, tol()).unwrap();
        let c = census(&pair).unwrap().counts();
        assert_eq!(
            c,
            CensusCounts {
                m_plus: 3,
                m_minus: 0,
                big_m_plus: 0,
                big_m_minus: 0
            }
        );
        assert_eq!(index_formula(&pair).unwrap(), 3);
    }

    #[test]
    fn self_adjoint_evolution_report() {
        // U = Γ, C = 1: σ(U) = {±1} only
        let g = diag(&[1.0, -1.0, -1.0]);
        let pair = make_pair(g.clone(), g, tol()).unwrap();
        let report = verify_spectral_mapping(&pair).unwrap();
        assert_eq!(report.mapping_residual, 0.0);
        assert_eq!(report.index_alpha, -1);
        assert!(report.consistent);
        let values: Vec<[f64; 2]> = report.spectrum_u.iter().map(|c| c.value).collect();
        assert!(values.iter().all(|v| (v[0].abs() - 1.0).abs() < 1e-14));
    }
}
