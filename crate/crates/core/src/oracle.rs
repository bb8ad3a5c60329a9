//! Dense reference implementations.
//!
//! Everything here builds explicit matrices, independently of the sparse
//! kernels in [`crate::evolve`] and [`crate::noise`], and is meant for
//! cross-checking them on small instances. The flip-flop coined walk on the
//! torus with a Grover coin is included to check its equivalence with the
//! staggered walk on the grid of 4-cliques.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::evolve::{self, EvolveError, WalkState};
use crate::graph::{make_grid_of_cliques, GraphError, GridSpec, TessellatedGraph, Tessellation};
use crate::search::{partial_cover, SearchError};

/// Largest dimension any dense operator may have.
pub const MAX_DENSE_DIM: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("dimension {0} exceeds the dense limit of {MAX_DENSE_DIM}")]
    TooLarge(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Evolve(#[from] EvolveError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

fn guard(dim: usize) -> Result<(), OracleError> {
    if dim > MAX_DENSE_DIM {
        Err(OracleError::TooLarge(dim))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseUnitary {
    matrix: DMatrix<Complex64>,
}

impl DenseUnitary {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// `max |(U†U − I)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.matrix.adjoint() * &self.matrix;
        let id = DMatrix::<Complex64>::identity(self.dim(), self.dim());
        (prod - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn apply(&self, amplitudes: &[Complex64]) -> Vec<Complex64> {
        let v = DVector::from_column_slice(amplitudes);
        (&self.matrix * v).iter().copied().collect()
    }

    pub fn compose(&self, first: &DenseUnitary) -> DenseUnitary {
        DenseUnitary {
            matrix: &self.matrix * &first.matrix,
        }
    }
}

/// `2 Σ_j |P_j⟩⟨P_j| − I` as a dense matrix.
pub fn dense_reflection(t: &Tessellation, dim: usize) -> Result<DenseUnitary, OracleError> {
    guard(dim)?;
    let mut m = DMatrix::<Complex64>::identity(dim, dim) * Complex64::new(-1.0, 0.0);
    for p in t.polygons() {
        for (&u, &au) in p.vertices().iter().zip(p.amplitudes()) {
            for (&v, &av) in p.vertices().iter().zip(p.amplitudes()) {
                m[(u, v)] += 2.0 * au * av.conj();
            }
        }
    }
    Ok(DenseUnitary { matrix: m })
}

/// Product of the tessellation reflections, tessellation 0 rightmost.
pub fn dense_step_matrix(tg: &TessellatedGraph) -> Result<DenseUnitary, OracleError> {
    let dim = tg.num_vertices();
    guard(dim)?;
    let mut u = DenseUnitary {
        matrix: DMatrix::identity(dim, dim),
    };
    for t in tg.tessellations() {
        u = dense_reflection(t, dim)?.compose(&u);
    }
    Ok(u)
}

/// Map between coined basis states `|position, direction⟩` on the `n × n`
/// torus and vertices `(x, y, k)` of the grid of 4-cliques.
///
/// Directions: 0 → +x, 1 → +y, 2 → −x, 3 → −y. The coined index is
/// `4·(x·n + y) + direction`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoinedBasisMap {
    spec: GridSpec,
}

impl CoinedBasisMap {
    pub fn new(n: usize) -> Result<Self, OracleError> {
        Ok(Self {
            spec: GridSpec::new(n, 1)?,
        })
    }

    pub fn coined_index(&self, x: usize, y: usize, direction: usize) -> usize {
        4 * (x * self.spec.n() + y) + direction
    }

    pub fn coined_coords(&self, i: usize) -> (usize, usize, usize) {
        let cell = i / 4;
        (cell / self.spec.n(), cell % self.spec.n(), i % 4)
    }

    /// Staggered vertex for coined index `i`.
    pub fn to_staggered(&self, i: usize) -> usize {
        let (x, y, d) = self.coined_coords(i);
        self.spec.vertex_index(x, y, d)
    }

    pub fn to_coined(&self, v: usize) -> usize {
        let (x, y, k) = self.spec.coords(v);
        self.coined_index(x, y, k)
    }

    pub fn dim(&self) -> usize {
        4 * self.spec.num_cliques()
    }
}

fn fcqw_parts(
    n: usize,
    marked: Option<(usize, usize)>,
) -> Result<(DenseUnitary, DenseUnitary), OracleError> {
    let map = CoinedBasisMap::new(n)?;
    let dim = map.dim();
    guard(dim)?;
    let zero = Complex64::default();

    let mut coin = DMatrix::from_element(dim, dim, zero);
    for x in 0..n {
        for y in 0..n {
            let base = map.coined_index(x, y, 0);
            if marked == Some((x, y)) {
                for d in 0..4 {
                    coin[(base + d, base + d)] = Complex64::new(-1.0, 0.0);
                }
                continue;
            }
            // Grover coin 2|s⟩⟨s| − I with |s⟩ uniform over 4 directions.
            for a in 0..4 {
                for b in 0..4 {
                    let g = if a == b { -0.5 } else { 0.5 };
                    coin[(base + a, base + b)] = Complex64::new(g, 0.0);
                }
            }
        }
    }

    // Flip-flop shift: |(x, y), d⟩ → |(x, y) + e_d, d + 2 mod 4⟩.
    let mut shift = DMatrix::from_element(dim, dim, zero);
    for x in 0..n {
        for y in 0..n {
            for d in 0..4 {
                let (tx, ty) = match d {
                    0 => ((x + 1) % n, y),
                    1 => (x, (y + 1) % n),
                    2 => ((x + n - 1) % n, y),
                    _ => (x, (y + n - 1) % n),
                };
                let from = map.coined_index(x, y, d);
                let to = map.coined_index(tx, ty, (d + 2) % 4);
                shift[(to, from)] = Complex64::new(1.0, 0.0);
            }
        }
    }
    Ok((
        DenseUnitary { matrix: coin },
        DenseUnitary { matrix: shift },
    ))
}

/// Grover coin on every position, as a dense operator.
pub fn grover_coin(n: usize) -> Result<DenseUnitary, OracleError> {
    Ok(fcqw_parts(n, None)?.0)
}

/// Flip-flop shift on the torus, as a dense operator.
pub fn flip_flop_shift(n: usize) -> Result<DenseUnitary, OracleError> {
    Ok(fcqw_parts(n, None)?.1)
}

/// `S·C` for the flip-flop coined walk with Grover coin on the `n × n` torus.
pub fn fcqw_grid_step(n: usize) -> Result<DenseUnitary, OracleError> {
    let (coin, shift) = fcqw_parts(n, None)?;
    Ok(shift.compose(&coin))
}

/// `S·C'` where `C'` is the Grover coin except `−I` at the marked position.
pub fn fcqw_search_step(n: usize, marked: (usize, usize)) -> Result<DenseUnitary, OracleError> {
    let (coin, shift) = fcqw_parts(n, Some(marked))?;
    Ok(shift.compose(&coin))
}

/// Evolves the coined walk and the staggered walk on the grid of 4-cliques
/// side by side and returns the largest amplitude deviation seen through
/// [`CoinedBasisMap`].
///
/// Without `marked` both start at position `(0, 0)` with uniform coin; with
/// `marked` the coined walk uses coin `−I` there, the staggered walk the
/// partial cover missing that green polygon, and both start uniform.
pub fn verify_equivalence(
    n: usize,
    steps: usize,
    marked: Option<(usize, usize)>,
) -> Result<f64, OracleError> {
    let map = CoinedBasisMap::new(n)?;
    let spec = GridSpec::new(n, 1)?;
    guard(map.dim())?;
    let grid = make_grid_of_cliques(spec);
    let (coined, cover, mut sqw) = match marked {
        None => (
            fcqw_grid_step(n)?,
            grid,
            WalkState::localized_clique(spec, 0, 0)?,
        ),
        Some(m) => (
            fcqw_search_step(n, m)?,
            partial_cover(&grid, spec, m)?,
            WalkState::uniform(spec.num_vertices())?,
        ),
    };

    let mut psi = vec![Complex64::default(); map.dim()];
    for (v, a) in sqw.amplitudes().iter().enumerate() {
        psi[map.to_coined(v)] = *a;
    }

    let deviation = |psi: &[Complex64], sqw: &WalkState| {
        psi.iter()
            .enumerate()
            .map(|(i, a)| (a - sqw.amplitudes()[map.to_staggered(i)]).norm())
            .fold(0.0, f64::max)
    };
    let mut worst = deviation(&psi, &sqw);
    for _ in 0..steps {
        psi = coined.apply(&psi);
        evolve::step(&cover, &mut sqw)?;
        worst = worst.max(deviation(&psi, &sqw));
    }
    Ok(worst)
}
