//! Concrete chiral pairs: small toys, Grover's search, the Grover walk on a
//! finite graph and the split-step walk on a cycle.
//!
//! Basis orderings are fixed so that matrices are reproducible:
//! - search: `|x⟩⊗|s⟩` at index `2x + s`, with `s = 0` for `|+⟩`, `1` for `|−⟩`;
//! - graph walk: the listed edges in input order, then their inverses in
//!   the same order;
//! - split-step: site-major, `(x, s)` at index `2x + s`.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::chiral::{ChiralError, ChiralPair};
use crate::matcore::{CMatrix, SquareMatrix, Tolerance, C64, ONE, ZERO};

/// Largest qubit count accepted by [`grover_search`].
pub const MAX_SEARCH_QUBITS: u32 = 12;

#[derive(Debug, Clone, Error)]
pub enum ModelError {
    #[error("{what} = {value} is out of range")]
    OutOfRange { what: &'static str, value: u64 },
    #[error("invalid graph: {0}")]
    GraphInvalid(String),
    #[error("{what} violated (residual {residual:.3e})")]
    ParamInvariantViolated { what: &'static str, residual: f64 },
    #[error(transparent)]
    Chiral(#[from] ChiralError),
}

fn square(m: CMatrix) -> SquareMatrix {
    SquareMatrix::from_matrix(m).expect("builders produce square finite matrices")
}

/// `U = diag(e^{iβ}, e^{-iβ})` with `Γ = [[0, e^{iγ}], [e^{-iγ}, 0]]`.
pub fn toy_two_dim(beta: f64, gamma_phase: f64, tol: Tolerance) -> Result<ChiralPair, ModelError> {
    let u = SquareMatrix::from_diagonal(&[C64::from_polar(1.0, beta), C64::from_polar(1.0, -beta)]);
    let g = C64::from_polar(1.0, gamma_phase);
    let gamma = square(DMatrix::from_row_slice(2, 2, &[ZERO, g, g.conj(), ZERO]));
    Ok(ChiralPair::new(u, gamma, tol)?)
}

/// The five involutions paired with `U = diag(1, 1, 1, -1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FourDimVariant {
    MinusOne,
    OnePlus,
    TwoPlus,
    ThreePlusMixed,
    One,
}

impl FourDimVariant {
    pub const ALL: [Self; 5] = [
        Self::MinusOne,
        Self::OnePlus,
        Self::TwoPlus,
        Self::ThreePlusMixed,
        Self::One,
    ];

    /// Row number `1..=5`.
    pub fn from_row(row: u8) -> Option<Self> {
        Self::ALL.get(usize::from(row).checked_sub(1)?).copied()
    }

    pub fn row(self) -> u8 {
        Self::ALL.iter().position(|&v| v == self).unwrap() as u8 + 1
    }

    pub fn gamma_diagonal(self) -> [f64; 4] {
        match self {
            Self::MinusOne => [-1.0; 4],
            Self::OnePlus => [1.0, -1.0, -1.0, -1.0],
            Self::TwoPlus => [1.0, 1.0, -1.0, -1.0],
            Self::ThreePlusMixed => [1.0, -1.0, 1.0, 1.0],
            Self::One => [1.0; 4],
        }
    }
}

pub fn toy_four_dim(variant: FourDimVariant, tol: Tolerance) -> Result<ChiralPair, ModelError> {
    let u = SquareMatrix::from_real_diagonal(&[1.0, 1.0, 1.0, -1.0]);
    let gamma = SquareMatrix::from_real_diagonal(&variant.gamma_diagonal());
    Ok(ChiralPair::new(u, gamma, tol)?)
}

fn check_search(n: u32, x0: u64) -> Result<usize, ModelError> {
    if n == 0 || n > MAX_SEARCH_QUBITS {
        return Err(ModelError::OutOfRange {
            what: "qubits",
            value: n.into(),
        });
    }
    let size = 1usize << n;
    if x0 >= size as u64 {
        return Err(ModelError::OutOfRange {
            what: "target",
            value: x0,
        });
    }
    Ok(size)
}

/// Grover's search on `n` qubits with marked item `x0`: `Γ = D₀ ⊗ 1` with
/// the diffusion `D₀ = 2|φ₀⟩⟨φ₀| - 1`, coin `C = 1 - 2|χ₀⟩⟨χ₀|` for
/// `χ₀ = |x₀⟩⊗|−⟩`, and `U = ΓC`.
pub fn grover_search(n: u32, x0: u64, tol: Tolerance) -> Result<ChiralPair, ModelError> {
    let size = check_search(n, x0)?;
    let marked = 2 * x0 as usize + 1;
    let avg = 2.0 / size as f64;
    let gamma = DMatrix::from_fn(2 * size, 2 * size, |i, j| {
        if i % 2 != j % 2 {
            return ZERO;
        }
        C64::new(if i == j { avg - 1.0 } else { avg }, 0.0)
    });
    // ΓC is Γ with the marked column negated.
    let mut u = gamma.clone();
    u.column_mut(marked).neg_mut();
    Ok(ChiralPair::new(square(u), square(gamma), tol)?)
}

/// `U` applied to a real state without forming the matrix.
fn search_step(psi: &mut [f64], marked: usize) {
    psi[marked] = -psi[marked];
    for s in 0..2 {
        let mean = psi.iter().skip(s).step_by(2).sum::<f64>() * 2.0 / psi.len() as f64;
        for v in psi.iter_mut().skip(s).step_by(2) {
            *v = 2.0 * mean - *v;
        }
    }
}

/// Initial search state `|φ₀⟩⊗|−⟩`.
pub fn search_initial_state(n: u32) -> Result<Vec<f64>, ModelError> {
    let size = check_search(n, 0)?;
    let amp = 1.0 / (size as f64).sqrt();
    Ok((0..2 * size)
        .map(|i| if i % 2 == 1 { amp } else { 0.0 })
        .collect())
}

/// `(p_t(x₀), total probability)` for `t = 0..=steps`.
pub fn search_evolution(n: u32, x0: u64, steps: usize) -> Result<Vec<(f64, f64)>, ModelError> {
    search_evolution_at(n, x0, x0, steps)
}

/// As [`search_evolution`], with the probability read at `measure`
/// instead of the marked item.
pub fn search_evolution_at(
    n: u32,
    target: u64,
    measure: u64,
    steps: usize,
) -> Result<Vec<(f64, f64)>, ModelError> {
    check_search(n, target)?;
    if measure >= 1u64 << n {
        return Err(ModelError::OutOfRange {
            what: "measured vertex",
            value: measure,
        });
    }
    let mut psi = search_initial_state(n)?;
    let marked = 2 * target as usize + 1;
    let at = |psi: &[f64]| {
        let site = 2 * measure as usize;
        let p = psi[site] * psi[site] + psi[site + 1] * psi[site + 1];
        let total = psi.iter().map(|v| v * v).sum::<f64>();
        (p, total)
    };
    let mut out = Vec::with_capacity(steps + 1);
    out.push(at(&psi));
    for _ in 0..steps {
        search_step(&mut psi, marked);
        out.push(at(&psi));
    }
    Ok(out)
}

/// `‖(|x₀⟩⟨x₀| ⊗ 1) Uᵗ Ψ₀‖²`.
pub fn search_success_probability(n: u32, x0: u64, t: usize) -> Result<f64, ModelError> {
    Ok(search_evolution(n, x0, t)?[t].0)
}

/// Connected undirected multigraph; self-loops and parallel edges allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self, ModelError> {
        if vertex_count == 0 {
            return Err(ModelError::GraphInvalid("no vertices".into()));
        }
        if edges.is_empty() {
            return Err(ModelError::GraphInvalid("no edges".into()));
        }
        if let Some(&(o, t)) = edges
            .iter()
            .find(|&&(o, t)| o >= vertex_count || t >= vertex_count)
        {
            return Err(ModelError::GraphInvalid(format!(
                "edge ({o}, {t}) out of range for {vertex_count} vertices"
            )));
        }
        let mut root: Vec<usize> = (0..vertex_count).collect();
        fn find(root: &mut [usize], mut v: usize) -> usize {
            while root[v] != v {
                root[v] = root[root[v]];
                v = root[v];
            }
            v
        }
        for &(o, t) in &edges {
            let (a, b) = (find(&mut root, o), find(&mut root, t));
            root[a] = b;
        }
        let r0 = find(&mut root, 0);
        if let Some(v) = (1..vertex_count).find(|&v| find(&mut root, v) != r0) {
            return Err(ModelError::GraphInvalid(format!(
                "disconnected: vertex {v} unreachable from vertex 0"
            )));
        }
        Ok(Self {
            vertex_count,
            edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Directed edges `D = E ∪ Ē` in basis order.
    pub fn directed_edges(&self) -> Vec<(usize, usize)> {
        let inverses = self.edges.iter().map(|&(o, t)| (t, o));
        self.edges.iter().copied().chain(inverses).collect()
    }

    /// Number of directed edges leaving `v`; a loop counts twice.
    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|&(o, t)| usize::from(o == v) + usize::from(t == v))
            .sum()
    }

    pub fn complete(n: usize) -> Result<Self, ModelError> {
        let edges = (0..n)
            .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
            .collect();
        Self::new(n, edges)
    }

    pub fn cycle(n: usize) -> Result<Self, ModelError> {
        Self::new(n, (0..n).map(|a| (a, (a + 1) % n)).collect())
    }
}

/// Grover walk on `ℓ²(D)`: `Γ = S` reverses each edge and
/// `C = 2d*d - 1` with `d` sending `δ_e` to `δ_{o(e)} / √deg o(e)`.
pub fn grover_walk(g: &Graph, tol: Tolerance) -> Result<ChiralPair, ModelError> {
    let arcs = g.directed_edges();
    let half = g.edges().len();
    let dim = arcs.len();
    let reverse = |e: usize| if e < half { e + half } else { e - half };
    let degree: Vec<f64> = (0..g.vertex_count()).map(|v| g.degree(v) as f64).collect();
    let coin = DMatrix::from_fn(dim, dim, |e, f| {
        let v = arcs[e].0;
        let mut c = if v == arcs[f].0 { 2.0 / degree[v] } else { 0.0 };
        if e == f {
            c -= 1.0;
        }
        C64::new(c, 0.0)
    });
    let shift = DMatrix::from_fn(dim, dim, |e, f| if f == reverse(e) { ONE } else { ZERO });
    let u = DMatrix::from_fn(dim, dim, |e, f| coin[(reverse(e), f)]);
    Ok(ChiralPair::new(square(u), square(shift), tol)?)
}

/// Split-step parameters on a cycle of `sites` sites.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitStepParams {
    sites: usize,
    p: f64,
    q: C64,
    coin_angles: Vec<f64>,
}

impl SplitStepParams {
    pub fn new(
        sites: usize,
        p: f64,
        q: C64,
        coin_angles: Vec<f64>,
        tol: &Tolerance,
    ) -> Result<Self, ModelError> {
        if sites == 0 {
            return Err(ModelError::OutOfRange {
                what: "sites",
                value: 0,
            });
        }
        if coin_angles.len() != sites {
            return Err(ModelError::OutOfRange {
                what: "coin angle count",
                value: coin_angles.len() as u64,
            });
        }
        if !(p.is_finite() && q.re.is_finite() && q.im.is_finite())
            || coin_angles.iter().any(|a| !a.is_finite())
        {
            return Err(ModelError::ParamInvariantViolated {
                what: "finite parameters",
                residual: f64::INFINITY,
            });
        }
        let residual = (p * p + q.norm_sqr() - 1.0).abs();
        if residual > tol.structural() {
            return Err(ModelError::ParamInvariantViolated {
                what: "p² + |q|² = 1",
                residual,
            });
        }
        Ok(Self {
            sites,
            p,
            q,
            coin_angles,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> C64 {
        self.q
    }

    pub fn coin_angles(&self) -> &[f64] {
        &self.coin_angles
    }

    /// `[[p, q̄L*], [qL, -p]]` with `(Lψ)(x) = ψ(x+1)`.
    pub fn shift(&self) -> SquareMatrix {
        let m = self.sites;
        let mut s = CMatrix::zeros(2 * m, 2 * m);
        let p = C64::new(self.p, 0.0);
        for x in 0..m {
            s[(2 * x, 2 * x)] += p;
            s[(2 * x, 2 * ((x + m - 1) % m) + 1)] += self.q.conj();
            s[(2 * x + 1, 2 * ((x + 1) % m))] += self.q;
            s[(2 * x + 1, 2 * x + 1)] -= p;
        }
        square(s)
    }

    /// `⊕ₓ [[cos θ, sin θ], [sin θ, -cos θ]]`.
    pub fn coin(&self) -> SquareMatrix {
        let m = self.sites;
        let mut c = CMatrix::zeros(2 * m, 2 * m);
        for (x, &theta) in self.coin_angles.iter().enumerate() {
            let (s, co) = theta.sin_cos();
            c[(2 * x, 2 * x)] = C64::new(co, 0.0);
            c[(2 * x, 2 * x + 1)] = C64::new(s, 0.0);
            c[(2 * x + 1, 2 * x)] = C64::new(s, 0.0);
            c[(2 * x + 1, 2 * x + 1)] = C64::new(-co, 0.0);
        }
        square(c)
    }
}

pub fn split_step_cycle(
    params: &SplitStepParams,
    tol: Tolerance,
) -> Result<ChiralPair, ModelError> {
    Ok(ChiralPair::from_involutions(
        params.shift(),
        params.coin(),
        tol,
    )?)
}
