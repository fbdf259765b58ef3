mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use susywalk::chiral::{gamma_signature, index_alpha, witten_index};
use susywalk::random::random_pair;
use susywalk::spectral::index_formula;
use susywalk::Tolerance;

#[test]
fn index_equals_brute_force_signature_up_to_dim_32() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let tol = Tolerance::default();
    for dim in (2..=32).step_by(3).chain([32]) {
        for _ in 0..3 {
            let pair = random_pair(dim, &mut rng, tol).unwrap();
            let g = pair.gamma().as_matrix();
            let expected = common::eigen_nullity(g, 1.0, 1e-9) as i64
                - common::eigen_nullity(g, -1.0, 1e-9) as i64;
            assert_eq!(index_alpha(&pair), expected, "dim {dim}");
            assert_eq!(witten_index(&pair), expected, "dim {dim}");
            assert_eq!(gamma_signature(&pair), expected, "dim {dim}");
            assert_eq!(index_formula(&pair).unwrap(), expected, "dim {dim}");
        }
    }
}

#[test]
fn census_counts_match_brute_force_intersections() {
    // dim(ker A ∩ ker B) = nullity of the stacked matrix [A; B].
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let tol = Tolerance::default();
    for dim in [2, 5, 9, 16] {
        for _ in 0..4 {
            let pair = random_pair(dim, &mut rng, tol).unwrap();
            let id = susywalk::matcore::CMatrix::identity(dim, dim);
            let g = pair.gamma().as_matrix();
            let c = pair.coin().as_matrix();
            let both = |gs: f64, cs: f64| {
                let top = g - &id * susywalk::C64::new(gs, 0.0);
                let bottom = c - &id * susywalk::C64::new(cs, 0.0);
                let mut stacked = susywalk::matcore::CMatrix::zeros(2 * dim, dim);
                stacked.rows_mut(0, dim).copy_from(&top);
                stacked.rows_mut(dim, dim).copy_from(&bottom);
                common::nullity(&stacked, 1e-9)
            };
            let counts = susywalk::spectral::census(&pair).unwrap().counts();
            assert_eq!(counts.m_plus, both(1.0, 1.0));
            assert_eq!(counts.m_minus, both(-1.0, 1.0));
            assert_eq!(counts.big_m_plus, both(-1.0, -1.0));
            assert_eq!(counts.big_m_minus, both(1.0, -1.0));
        }
    }
}
