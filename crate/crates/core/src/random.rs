//! Random unitaries, involutions, pairs and graphs for property testing.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::chiral::{ChiralError, ChiralPair};
use crate::matcore::{CMatrix, SquareMatrix, Tolerance, C64, ONE};
use crate::models::Graph;

fn gaussian_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) / std::f64::consts::SQRT_2
    })
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix, with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SquareMatrix {
    if n == 0 {
        return SquareMatrix::identity(0);
    }
    let qr = gaussian_matrix(n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        col *= phase;
    }
    SquareMatrix::from_matrix(q).expect("square and finite")
}

/// Orthogonal projection onto a Haar-random `k`-dimensional subspace.
pub fn random_projection<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> SquareMatrix {
    let v = haar_unitary(n, rng);
    let cols = v.as_matrix().columns(0, k.min(n)).into_owned();
    let p = &cols * cols.adjoint();
    SquareMatrix::from_matrix(p).expect("square and finite")
}

/// `2P - 1` for a random projection `P` of uniformly random rank in `0..=n`.
pub fn random_involution<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SquareMatrix {
    let k = rng.random_range(0..=n);
    random_projection(n, k, rng)
        .scale(C64::new(2.0, 0.0))
        .shifted(ONE)
}

/// `(ΓC, Γ)` for two independent random involutions.
pub fn random_pair<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    tol: Tolerance,
) -> Result<ChiralPair, ChiralError> {
    let gamma = random_involution(n, rng);
    let coin = random_involution(n, rng);
    ChiralPair::from_involutions(gamma, coin, tol)
}

/// Angles uniform in `[0, 2π)`.
pub fn random_angles<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<f64> {
    (0..count)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect()
}

/// Connected multigraph with a self-loop at vertex 0: a random spanning
/// tree, the loop, then uniformly random extra edges (repeats allowed).
///
/// # Panics
/// If `vertices == 0` or `edges < vertices`.
pub fn random_connected_multigraph<R: Rng + ?Sized>(
    vertices: usize,
    edges: usize,
    rng: &mut R,
) -> Graph {
    assert!(
        vertices > 0 && edges >= vertices,
        "need a spanning tree plus a loop"
    );
    let mut list = Vec::with_capacity(edges);
    for v in 1..vertices {
        list.push((rng.random_range(0..v), v));
    }
    list.push((0, 0));
    while list.len() < edges {
        list.push((rng.random_range(0..vertices), rng.random_range(0..vertices)));
    }
    Graph::new(vertices, list).expect("connected by construction")
}
