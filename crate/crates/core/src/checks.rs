//! Named invariant checks run against a single chiral pair.
//!
//! Each check records its residual and the threshold it was judged against
//! so tolerance choices stay auditable. Integer identities use residual
//! `|lhs - rhs|` with threshold `0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chiral::{index_alpha, projection_pair_index, spectral_projection, ChiralPair};
use crate::matcore::{
    kernel_basis, max_abs, subspace_intersection, SquareMatrix, Subspace, Tolerance, C64,
};
use crate::random;
use crate::spectral::{lifted_discriminant_kernel, Analysis};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub threshold: f64,
}

impl Check {
    pub fn real(name: &str, residual: f64, threshold: f64) -> Self {
        Self {
            name: name.to_owned(),
            // NaN never passes.
            passed: residual <= threshold,
            residual,
            threshold,
        }
    }

    pub fn integer(name: &str, lhs: i64, rhs: i64) -> Self {
        Self::real(name, (lhs - rhs).abs() as f64, 0.0)
    }

    /// Vacuously satisfied when the hypothesis does not hold.
    fn conditional(name: &str, applies: bool, lhs: i64, rhs: i64) -> Self {
        if applies {
            Self::integer(name, lhs, rhs)
        } else {
            Self::real(name, 0.0, 0.0)
        }
    }
}

/// Names of every check, deterministic first.
pub const STRUCTURAL_CHECKS: &[&str] = &[
    "index_routes_agree",
    "chiral_symmetry",
    "gamma_anticommutes_q",
    "gamma_commutes_r",
    "graded_block_form",
    "ker_q_equals_ker_one_minus_u_squared",
    "ker_alpha_equals_ker_q_in_grading",
    "ker_alpha_coin_split",
    "ker_alpha_decomposition",
    "coisometry_identities",
    "discriminant_norm_bound",
    "inherited_lift",
    "eigenspace_split",
    "spectral_mapping",
    "hamiltonian_spectrum",
    "projection_pair_identity",
    "eigenvalue_lower_bound",
    "strict_contraction_census",
    "balanced_signature_index",
    "sign_flip_evolution",
    "sign_flip_involution",
    "inverse_invariance",
];

pub const RANDOMIZED_CHECKS: &[&str] = &["conjugation_invariance", "perturbation_invariance"];

/// `ker(x - s)`.
fn eigenspace(x: &SquareMatrix, s: f64, a: &Analysis) -> Subspace {
    kernel_basis(&x.shifted(C64::new(s, 0.0)), a.tolerance())
}

/// Distance between `target` and `left ⊕ right`, also requiring orthogonality.
fn direct_sum_residual(target: &Subspace, left: &Subspace, right: &Subspace, a: &Analysis) -> f64 {
    match left.join(right, a.tolerance()) {
        Ok(sum) => target.distance(&sum).max(left.overlap(right)),
        Err(_) => f64::INFINITY,
    }
}

/// All checks that need no randomness. Feeds the index report.
pub fn structural_checks(a: &Analysis) -> Vec<Check> {
    let tol = *a.tolerance();
    let pair = &a.pair;
    let n = pair.dim() as f64;
    let op = tol.structural() * n;
    let sub = tol.subspace();
    let ind = a.index_alpha;
    let mut out = Vec::with_capacity(STRUCTURAL_CHECKS.len());

    let idx = a.indices();
    let spread = idx.iter().max().unwrap() - idx.iter().min().unwrap();
    out.push(Check::integer("index_routes_agree", spread, 0));
    out.push(Check::real(
        "chiral_symmetry",
        pair.chiral_residual(),
        tol.structural(),
    ));
    out.push(Check::real(
        "gamma_anticommutes_q",
        a.ops.anticommutator_residual(pair.gamma()),
        op,
    ));
    out.push(Check::real(
        "gamma_commutes_r",
        a.ops.commutator_residual(pair.gamma()),
        op,
    ));
    out.push(Check::real(
        "graded_block_form",
        a.graded.reconstruction_residual(&a.ops.q),
        op,
    ));

    let ker_q = kernel_basis(&a.ops.q, &tol);
    let u = pair.evolution();
    let u_sq = u * u;
    let ker_u_sq = kernel_basis(&(&SquareMatrix::identity(pair.dim()) - &u_sq), &tol);
    out.push(Check::real(
        "ker_q_equals_ker_one_minus_u_squared",
        ker_q.distance(&ker_u_sq),
        sub,
    ));

    let g_plus = eigenspace(pair.gamma(), 1.0, a);
    let g_minus = eigenspace(pair.gamma(), -1.0, a);
    let ker_alpha = a.graded.kernel_alpha(&tol);
    let ker_alpha_adj = a.graded.kernel_alpha_adjoint(&tol);
    let aqg = match (
        subspace_intersection(&ker_q, &g_plus, &tol),
        subspace_intersection(&ker_q, &g_minus, &tol),
    ) {
        (Ok(p), Ok(m)) => ker_alpha.distance(&p).max(ker_alpha_adj.distance(&m)),
        _ => f64::INFINITY,
    };
    out.push(Check::real("ker_alpha_equals_ker_q_in_grading", aqg, sub));

    // U C± φ = ± C± φ on ker α.
    let mut split = 0.0_f64;
    if !ker_alpha.is_zero() {
        for s in [1.0, -1.0] {
            let proj = spectral_projection(pair.coin(), s);
            let v = proj.as_matrix() * ker_alpha.basis();
            let lhs = u.as_matrix() * &v;
            split = split.max(max_abs(&(lhs - &v * C64::new(s, 0.0))));
        }
    }
    out.push(Check::real("ker_alpha_coin_split", split, sub));

    // With d built for the working pair (±U, Γ), its birth spaces are
    // 𝔅'± = ker(Γ±1) ∩ ker(C'+1).
    let dec = &a.decomposition;
    let (birth_w_plus, birth_w_minus) = if dec.flipped() {
        (&a.census.inherited_minus, &a.census.inherited_plus)
    } else {
        (&a.census.birth_plus, &a.census.birth_minus)
    };
    let lift_plus = lifted_discriminant_kernel(dec, 1.0, &tol);
    let lift_minus = lifted_discriminant_kernel(dec, -1.0, &tol);
    let keralpha = direct_sum_residual(&ker_alpha, &lift_plus, birth_w_minus, a).max(
        direct_sum_residual(&ker_alpha_adj, &lift_minus, birth_w_plus, a),
    );
    out.push(Check::real("ker_alpha_decomposition", keralpha, sub));

    out.push(Check::real(
        "coisometry_identities",
        dec.coisometry_residual().max(dec.coin_residual(pair)),
        op,
    ));
    let t_norm = a
        .t_eigen
        .values
        .iter()
        .fold(0.0_f64, |acc, t| acc.max(t.abs()));
    out.push(Check::real(
        "discriminant_norm_bound",
        (t_norm - 1.0).max(0.0),
        tol.structural(),
    ));

    let wc = a.working_census;
    let (dn_plus, dn_minus) = a.mapping.discriminant_nullities;
    let count_gap = (wc.m_plus as f64 - dn_plus as f64)
        .abs()
        .max((wc.m_minus as f64 - dn_minus as f64).abs());
    out.push(Check::real(
        "inherited_lift",
        if count_gap > 0.0 {
            f64::INFINITY
        } else {
            a.census.lift_residual
        },
        sub,
    ));

    let ker_u_plus = eigenspace(u, 1.0, a);
    let ker_u_minus = eigenspace(u, -1.0, a);
    let c = &a.census;
    let eig_split = direct_sum_residual(&ker_u_plus, &c.inherited_plus, &c.birth_plus, a).max(
        direct_sum_residual(&ker_u_minus, &c.inherited_minus, &c.birth_minus, a),
    );
    out.push(Check::real("eigenspace_split", eig_split, sub));

    let m = &a.mapping;
    let mapping = if m.multiplicities_match {
        m.residual
    } else {
        f64::INFINITY
    };
    out.push(Check::real("spectral_mapping", mapping, tol.cluster()));
    out.push(Check::real(
        "hamiltonian_spectrum",
        hamiltonian_residual(a),
        tol.cluster(),
    ));

    let proj_identity = {
        let gp = spectral_projection(pair.gamma(), 1.0);
        let cp = spectral_projection(pair.coin(), 1.0);
        let cm = spectral_projection(pair.coin(), -1.0);
        match (
            projection_pair_index(&gp, &cp, &tol),
            projection_pair_index(&gp, &cm, &tol),
        ) {
            (Ok(x), Ok(y)) => Check::integer("projection_pair_identity", x + y, ind),
            _ => Check::real("projection_pair_identity", f64::INFINITY, 0.0),
        }
    };
    out.push(proj_identity);

    let bound = (ker_u_plus.dim() + ker_u_minus.dim()) as i64;
    out.push(Check::real(
        "eigenvalue_lower_bound",
        (ind.abs() - bound).max(0) as f64,
        0.0,
    ));

    let contraction = t_norm < 1.0 - tol.cluster();
    // ‖T‖ < 1 forces m± = 0 and ind = M₋ - M₊.
    let contraction_gap = (wc.m_plus + wc.m_minus) as i64
        + (ind - (wc.big_m_minus as i64 - wc.big_m_plus as i64)).abs();
    out.push(Check::conditional(
        "strict_contraction_census",
        contraction,
        contraction_gap,
        0,
    ));
    out.push(Check::conditional(
        "balanced_signature_index",
        a.graded.plus.dim() == a.graded.minus.dim(),
        ind,
        0,
    ));

    out.push(Check::integer(
        "sign_flip_evolution",
        index_alpha(&pair.negated()),
        ind,
    ));
    out.push(Check::integer(
        "sign_flip_involution",
        index_alpha(&pair.with_negated_gamma()),
        -ind,
    ));
    out.push(match pair.inverse() {
        Ok(inv) => Check::integer("inverse_invariance", index_alpha(&inv), ind),
        Err(_) => Check::real("inverse_invariance", f64::INFINITY, 0.0),
    });
    debug_assert_eq!(out.len(), STRUCTURAL_CHECKS.len());
    out
}

/// `σ(H)` against `(1 - T²) ⊕ (1 - T²) ⊕ 0 ⊕ 0`: the zero count must be
/// `dim ker(1 - T²) + M₊ + M₋` and the rest must match `1 - t²` doubled.
fn hamiltonian_residual(a: &Analysis) -> f64 {
    let tol = a.tolerance();
    let wc = a.working_census;
    let (dn_plus, dn_minus) = a.mapping.discriminant_nullities;
    let zeros_expected = dn_plus + dn_minus + wc.big_m_plus + wc.big_m_minus;
    let zeros = kernel_basis(&a.ops.h, tol).dim();
    if zeros != zeros_expected {
        return f64::INFINITY;
    }
    let mut expected: Vec<f64> = a
        .mapping
        .interior
        .iter()
        .flat_map(|t| {
            let v = 1.0 - t * t;
            [v, v]
        })
        .collect();
    expected.sort_by(f64::total_cmp);
    let observed = &a.h_eigen.values[zeros..];
    if observed.len() != expected.len() {
        return f64::INFINITY;
    }
    observed
        .iter()
        .zip(&expected)
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()))
}

/// Checks that need a random unitary or a random coin.
pub fn randomized_checks<R: Rng + ?Sized>(a: &Analysis, rng: &mut R) -> Vec<Check> {
    let pair = &a.pair;
    let ind = a.index_alpha;
    let n = pair.dim();
    let v = random::haar_unitary(n, rng);
    let conj = match pair.conjugated(&v) {
        Ok(p) => Check::integer("conjugation_invariance", index_alpha(&p), ind),
        Err(_) => Check::real("conjugation_invariance", f64::INFINITY, 0.0),
    };
    let coin = random::random_involution(n, rng);
    let pert = match pair.with_coin(coin) {
        Ok(p) => Check::integer("perturbation_invariance", index_alpha(&p), ind),
        Err(_) => Check::real("perturbation_invariance", f64::INFINITY, 0.0),
    };
    vec![conj, pert]
}

/// Index of `(ΓC', Γ)` for a fresh random coin `C'`, next to the original index.
pub fn perturbed_index<R: Rng + ?Sized>(pair: &ChiralPair, rng: &mut R) -> Option<(i64, i64)> {
    let coin = random::random_involution(pair.dim(), rng);
    let perturbed = pair.with_coin(coin).ok()?;
    Some((index_alpha(pair), index_alpha(&perturbed)))
}

/// Pass counts of one selftest run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestSummary {
    pub pairs: usize,
    /// `(check name, passed, run)` in [`STRUCTURAL_CHECKS`] then
    /// [`RANDOMIZED_CHECKS`] order, with `analysis` first.
    pub counts: Vec<(String, usize, usize)>,
    /// One line per failed check: dimension, trial, name, residual.
    pub failures: Vec<String>,
}

impl SelftestSummary {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs every check on `trials` random pairs per dimension `2..=dim_max`.
pub fn run_selftest(dim_max: usize, trials: usize, seed: u64, tol: Tolerance) -> SelftestSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = std::iter::once("analysis")
        .chain(STRUCTURAL_CHECKS.iter().copied())
        .chain(RANDOMIZED_CHECKS.iter().copied());
    let mut counts: Vec<(String, usize, usize)> = names.map(|n| (n.to_owned(), 0, 0)).collect();
    let mut failures = Vec::new();
    let mut pairs = 0;
    for dim in 2..=dim_max {
        for trial in 0..trials {
            pairs += 1;
            let analysis = random::random_pair(dim, &mut rng, tol)
                .map_err(|e| e.to_string())
                .and_then(|p| Analysis::new(&p).map_err(|e| e.to_string()));
            counts[0].2 += 1;
            let a = match analysis {
                Ok(a) => a,
                Err(e) => {
                    failures.push(format!("dim {dim} trial {trial}: analysis: {e}"));
                    continue;
                }
            };
            counts[0].1 += 1;
            let mut results = structural_checks(&a);
            results.extend(randomized_checks(&a, &mut rng));
            for (slot, check) in counts[1..].iter_mut().zip(&results) {
                slot.2 += 1;
                if check.passed {
                    slot.1 += 1;
                } else {
                    failures.push(format!(
                        "dim {dim} trial {trial}: {} residual {:.3e} > {:.3e}",
                        check.name, check.residual, check.threshold
                    ));
                }
            }
        }
    }
    SelftestSummary {
        pairs,
        counts,
        failures,
    }
}
