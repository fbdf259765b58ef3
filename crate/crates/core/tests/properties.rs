use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use susywalk::checks::{structural_checks, STRUCTURAL_CHECKS};
use susywalk::chiral::{index_alpha, ChiralPair};
use susywalk::matcore::{
    eig_hermitian, kernel_basis, numerical_rank, subspace_intersection, SquareMatrix, Subspace,
};
use susywalk::models::{grover_walk, split_step_cycle, SplitStepParams};
use susywalk::random::{haar_unitary, random_connected_multigraph, random_pair};
use susywalk::spectral::{census, joukowski, spectral_image, Analysis};
use susywalk::{Tolerance, C64};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `V diag(signs) V*`.
fn rotated_diagonal(v: &SquareMatrix, signs: &[bool]) -> SquareMatrix {
    let d: Vec<f64> = signs.iter().map(|&s| if s { 1.0 } else { -1.0 }).collect();
    &(v * &SquareMatrix::from_real_diagonal(&d)) * &v.adjoint()
}

fn all_pass(pair: &ChiralPair) -> Result<(), TestCaseError> {
    let a = Analysis::new(pair).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let checks = structural_checks(&a);
    prop_assert_eq!(checks.len(), STRUCTURAL_CHECKS.len());
    for c in checks {
        prop_assert!(
            c.passed,
            "{} residual {:e} > {:e}",
            c.name,
            c.residual,
            c.threshold
        );
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_pairs_pass_every_check(dim in 2usize..=12, seed in any::<u64>()) {
        let pair = random_pair(dim, &mut rng(seed), tol()).unwrap();
        all_pass(&pair)?;
    }

    #[test]
    fn hamiltonian_spectrum_lies_in_unit_interval(dim in 2usize..=12, seed in any::<u64>()) {
        let pair = random_pair(dim, &mut rng(seed), tol()).unwrap();
        let a = Analysis::new(&pair).unwrap();
        let eig = eig_hermitian(&a.ops.h, &tol()).unwrap();
        for v in eig.values {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
        }
    }

    // Commuting Γ and C share an eigenbasis, so the census is a count of
    // sign combinations on the diagonal.
    #[test]
    fn commuting_pairs_have_diagonal_census(
        signs in prop::collection::vec((any::<bool>(), any::<bool>()), 1..=10),
        seed in any::<u64>(),
    ) {
        let v = haar_unitary(signs.len(), &mut rng(seed));
        let g: Vec<bool> = signs.iter().map(|s| s.0).collect();
        let c: Vec<bool> = signs.iter().map(|s| s.1).collect();
        let pair = ChiralPair::from_involutions(rotated_diagonal(&v, &g), rotated_diagonal(&v, &c), tol())
            .unwrap();
        let count = |gs: bool, cs: bool| signs.iter().filter(|&&s| s == (gs, cs)).count();
        let counts = census(&pair).unwrap().counts();
        prop_assert_eq!(counts.m_plus, count(true, true));
        prop_assert_eq!(counts.m_minus, count(false, true));
        prop_assert_eq!(counts.big_m_plus, count(false, false));
        prop_assert_eq!(counts.big_m_minus, count(true, false));
        all_pass(&pair)?;
    }

    #[test]
    fn spectral_image_inverts_joukowski(xs in prop::collection::vec(-1.0f64..=1.0, 0..8)) {
        for (x, (gp, gm)) in xs.iter().zip(spectral_image(&xs, &tol()).unwrap()) {
            prop_assert!((gp.norm() - 1.0).abs() < 1e-12);
            prop_assert!((gp.conj() - gm).norm() < 1e-12);
            prop_assert!(gp.im >= 0.0);
            prop_assert!((joukowski(gp).re - x).abs() < 1e-12);
            prop_assert!(joukowski(gm).im.abs() < 1e-12);
        }
    }

    #[test]
    fn nullity_plus_rank_is_dimension(
        dim in 1usize..=10,
        rank in 0usize..=10,
        seed in any::<u64>(),
    ) {
        let k = rank.min(dim);
        let mut r = rng(seed);
        let a = haar_unitary(dim, &mut r);
        let b = haar_unitary(dim, &mut r);
        let cols = a.as_matrix().columns(0, k).into_owned();
        let rows = b.as_matrix().rows(0, k).into_owned();
        let m = SquareMatrix::from_matrix(cols * rows).unwrap();
        let ker = kernel_basis(&m, &tol());
        prop_assert_eq!(ker.dim() + numerical_rank(m.as_matrix(), &tol()), dim);
        prop_assert_eq!(ker.dim(), dim - k);
        prop_assert!(ker.gram_residual() < 1e-12);
    }

    #[test]
    fn intersection_is_symmetric(dim in 2usize..=8, seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = haar_unitary(dim, &mut r);
        let split = dim / 2 + 1;
        let s1 = Subspace::span_of(&v.as_matrix().columns(0, split).into_owned(), &tol());
        let s2 = Subspace::span_of(
            &v.as_matrix().columns(split - 1, dim - split + 1).into_owned(),
            &tol(),
        );
        let a = subspace_intersection(&s1, &s2, &tol()).unwrap();
        let b = subspace_intersection(&s2, &s1, &tol()).unwrap();
        prop_assert_eq!(a.dim(), 1);
        prop_assert!(a.distance(&b) < 1e-10);
    }

    #[test]
    fn grover_walk_index_vanishes(vertices in 1usize..=7, extra in 0usize..=6, seed in any::<u64>()) {
        let g = random_connected_multigraph(vertices, vertices + extra, &mut rng(seed));
        let pair = grover_walk(&g, tol()).unwrap();
        prop_assert_eq!(index_alpha(&pair), 0);
        let s = pair.gamma().as_matrix();
        prop_assert!(s.iter().all(|z| *z == C64::new(0.0, 0.0) || *z == C64::new(1.0, 0.0)));
        prop_assert!(pair.gamma().involution_residual() == 0.0);
        let coin_plus = kernel_basis(&pair.coin().shifted(C64::new(1.0, 0.0)), &tol());
        prop_assert_eq!(coin_plus.dim(), vertices);
        all_pass(&pair)?;
    }

    #[test]
    fn split_step_index_vanishes(
        sites in 1usize..=6,
        angle in 0.0f64..std::f64::consts::TAU,
        phase in 0.0f64..std::f64::consts::TAU,
        seed in any::<u64>(),
    ) {
        let thetas = susywalk::random::random_angles(sites, &mut rng(seed));
        let params = SplitStepParams::new(sites, angle.cos(), C64::from_polar(angle.sin(), phase), thetas, &tol())
            .unwrap();
        let pair = split_step_cycle(&params, tol()).unwrap();
        prop_assert!(pair.gamma().trace().norm() < 1e-12);
        prop_assert_eq!(index_alpha(&pair), 0);
        all_pass(&pair)?;
    }

    #[test]
    fn index_survives_coin_resampling(dim in 2usize..=12, seed in any::<u64>()) {
        let mut r = rng(seed);
        let pair = random_pair(dim, &mut r, tol()).unwrap();
        let (before, after) = susywalk::checks::perturbed_index(&pair, &mut r).unwrap();
        prop_assert_eq!(before, after);
    }
}
