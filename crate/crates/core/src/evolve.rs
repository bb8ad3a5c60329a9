//! Walk states and sparse application of tessellation reflections.

use num_complex::Complex64;
use thiserror::Error;

use crate::graph::{GraphError, GridSpec, TessellatedGraph, Tessellation};

/// Norm tolerance for a freshly built state.
pub const STATE_NORM_TOL: f64 = 1e-10;
/// Drift above this after many steps means something is broken.
pub const MAX_NORM_DRIFT: f64 = 1e-8;
/// Steps between norm checks in long evolutions.
pub const RENORM_INTERVAL: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolveError {
    #[error("state has norm {0}, expected 1")]
    NotNormalized(f64),
    #[error("state has {state} amplitudes but the cover has {expected} vertices")]
    LengthMismatch { state: usize, expected: usize },
    #[error("polygon vertex {vertex} out of range for a state of length {len}")]
    VertexOutOfRange { vertex: usize, len: usize },
    #[error("norm drifted to {0}")]
    NormDrift(f64),
    #[error("cannot build a state over zero vertices")]
    Empty,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Unit vector of amplitudes over the vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    amplitudes: Vec<Complex64>,
}

impl WalkState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self, EvolveError> {
        if amplitudes.is_empty() {
            return Err(EvolveError::Empty);
        }
        let state = Self { amplitudes };
        let norm = state.norm();
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(EvolveError::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Normalizes an arbitrary non-zero vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self, EvolveError> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if amplitudes.is_empty() || norm == 0.0 {
            return Err(EvolveError::Empty);
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self { amplitudes })
    }

    pub fn uniform(num_vertices: usize) -> Result<Self, EvolveError> {
        if num_vertices == 0 {
            return Err(EvolveError::Empty);
        }
        let a = Complex64::new(1.0 / (num_vertices as f64).sqrt(), 0.0);
        Ok(Self {
            amplitudes: vec![a; num_vertices],
        })
    }

    /// Uniform superposition over the `4q` vertices of clique `(x, y)`.
    pub fn localized_clique(spec: GridSpec, x: usize, y: usize) -> Result<Self, EvolveError> {
        spec.check_clique(x, y)?;
        let mut amplitudes = vec![Complex64::default(); spec.num_vertices()];
        let a = Complex64::new(1.0 / (2.0 * (spec.q() as f64).sqrt()), 0.0);
        for v in spec.clique_range(x, y) {
            amplitudes[v] = a;
        }
        Ok(Self { amplitudes })
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn probability(&self, v: usize) -> f64 {
        self.amplitudes[v].norm_sqr()
    }

    /// Renormalizes if the norm drifted past `STATE_NORM_TOL`; errors past
    /// `MAX_NORM_DRIFT`.
    pub fn check_drift(&mut self) -> Result<(), EvolveError> {
        let norm = self.norm();
        let drift = (norm - 1.0).abs();
        if drift > MAX_NORM_DRIFT {
            return Err(EvolveError::NormDrift(norm));
        }
        if drift > STATE_NORM_TOL {
            for a in &mut self.amplitudes {
                *a /= norm;
            }
        }
        Ok(())
    }
}

pub fn uniform_state(num_vertices: usize) -> Result<WalkState, EvolveError> {
    WalkState::uniform(num_vertices)
}

pub fn localized_clique_state(
    spec: GridSpec,
    x: usize,
    y: usize,
) -> Result<WalkState, EvolveError> {
    WalkState::localized_clique(spec, x, y)
}

/// Adds the polygon term of a reflection to a state that has already been
/// negated: `s ← s - 2⟨P|s⟩|P⟩`. With `s = -ψ` this yields
/// `2⟨P|ψ⟩|P⟩ - ψ` on the support of `P`.
#[inline]
pub(crate) fn reflect_negated<I>(s: &mut [Complex64], support: I)
where
    I: Iterator<Item = (usize, Complex64)> + Clone,
{
    let inner: Complex64 = support.clone().map(|(v, a)| a.conj() * s[v]).sum();
    let two_inner = inner * 2.0;
    for (v, a) in support {
        s[v] -= two_inner * a;
    }
}

/// Applies `2 Σ_j |P_j⟩⟨P_j| - I` in place, in `O(N + Σ|P_j|)`.
pub fn apply_tessellation(t: &Tessellation, s: &mut WalkState) -> Result<(), EvolveError> {
    if let Some(m) = t.max_vertex() {
        if m >= s.len() {
            return Err(EvolveError::VertexOutOfRange {
                vertex: m,
                len: s.len(),
            });
        }
    }
    apply_unchecked(t, &mut s.amplitudes);
    Ok(())
}

pub(crate) fn apply_unchecked(t: &Tessellation, s: &mut [Complex64]) {
    for a in s.iter_mut() {
        *a = -*a;
    }
    for p in t.polygons() {
        let support = p
            .vertices()
            .iter()
            .copied()
            .zip(p.amplitudes().iter().copied());
        reflect_negated(s, support);
    }
}

/// One walk step: tessellation 0 first, then 1, and so on.
pub fn step(tg: &TessellatedGraph, s: &mut WalkState) -> Result<(), EvolveError> {
    check_length(tg, s)?;
    for t in tg.tessellations() {
        apply_unchecked(t, &mut s.amplitudes);
    }
    Ok(())
}

pub(crate) fn check_length(tg: &TessellatedGraph, s: &WalkState) -> Result<(), EvolveError> {
    if s.len() != tg.num_vertices() {
        return Err(EvolveError::LengthMismatch {
            state: s.len(),
            expected: tg.num_vertices(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{make_grid_of_cliques, Polygon, SimpleGraph};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn max_diff(a: &WalkState, b: &WalkState) -> f64 {
        a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn polygon_state_is_fixed() {
        let p = Polygon::new(vec![1, 2], vec![c(0.6), Complex64::new(0.0, 0.8)]).unwrap();
        let t = Tessellation::new(vec![p]).unwrap();
        let s0 = WalkState::new(vec![c(0.0), c(0.6), Complex64::new(0.0, 0.8)]).unwrap();
        let mut s = s0.clone();
        apply_tessellation(&t, &mut s).unwrap();
        assert!(max_diff(&s, &s0) < 1e-15);
    }

    #[test]
    fn orthogonal_state_is_negated() {
        let t = Tessellation::new(vec![Polygon::uniform(vec![0, 1]).unwrap()]).unwrap();
        let s0 = WalkState::new(vec![c(0.5), c(-0.5), Complex64::new(0.0, 0.5), c(0.5)]).unwrap();
        let mut s = s0.clone();
        apply_tessellation(&t, &mut s).unwrap();
        for (a, b) in s.amplitudes().iter().zip(s0.amplitudes()) {
            assert!((a + b).norm() < 1e-15);
        }
    }

    #[test]
    fn green_reflection_of_a_basis_vector() {
        // 2⟨α₀₀|0⟩|α₀₀⟩ − |0⟩ with ⟨α₀₀|0⟩ = ½.
        let tg = make_grid_of_cliques(GridSpec::new(2, 1).unwrap());
        let mut amps = vec![c(0.0); 16];
        amps[0] = c(1.0);
        let mut s = WalkState::new(amps).unwrap();
        apply_tessellation(&tg.tessellations()[0], &mut s).unwrap();
        let expected = [-0.5, 0.5, 0.5, 0.5];
        for (v, a) in s.amplitudes().iter().enumerate() {
            let e = expected.get(v).copied().unwrap_or(0.0);
            assert!((a - c(e)).norm() < 1e-15, "vertex {v}: {a}");
        }
    }

    #[test]
    fn out_of_range_polygon_is_an_error() {
        let t = Tessellation::new(vec![Polygon::uniform(vec![0, 4]).unwrap()]).unwrap();
        let mut s = WalkState::uniform(3).unwrap();
        assert_eq!(
            apply_tessellation(&t, &mut s),
            Err(EvolveError::VertexOutOfRange { vertex: 4, len: 3 })
        );
    }

    #[test]
    fn step_checks_length() {
        let tg = make_grid_of_cliques(GridSpec::new(2, 1).unwrap());
        let mut s = WalkState::uniform(15).unwrap();
        assert!(matches!(
            step(&tg, &mut s),
            Err(EvolveError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn single_tessellation_twice_is_identity() {
        let g = SimpleGraph::from_edges(3, [(0, 1)]).unwrap();
        let t = Tessellation::new(vec![
            Polygon::new(vec![0, 1], vec![c(0.8), Complex64::new(0.0, -0.6)]).unwrap(),
            Polygon::uniform(vec![2]).unwrap(),
        ])
        .unwrap();
        let tg = TessellatedGraph::new(g, vec![t]).unwrap();
        let s0 = WalkState::normalized(vec![c(0.3), Complex64::new(-0.2, 0.7), c(0.1)]).unwrap();
        let mut s = s0.clone();
        step(&tg, &mut s).unwrap();
        step(&tg, &mut s).unwrap();
        assert!(max_diff(&s, &s0) < 1e-15);
    }

    #[test]
    fn uniform_state_is_stationary_on_grids() {
        for (n, q) in [(2, 1), (10, 1), (3, 2)] {
            let spec = GridSpec::new(n, q).unwrap();
            let tg = make_grid_of_cliques(spec);
            let s0 = uniform_state(spec.num_vertices()).unwrap();
            let mut s = s0.clone();
            step(&tg, &mut s).unwrap();
            assert!(max_diff(&s, &s0) < 1e-14, "grid({n},{q})");
        }
    }

    #[test]
    fn uniform_state_values() {
        let s = uniform_state(4).unwrap();
        assert!(s.amplitudes().iter().all(|a| *a == c(0.5)));
        assert!((uniform_state(16).unwrap().norm() - 1.0).abs() < 1e-15);
        assert_eq!(uniform_state(0), Err(EvolveError::Empty));
    }

    #[test]
    fn localized_states() {
        let s = localized_clique_state(GridSpec::new(2, 1).unwrap(), 0, 0).unwrap();
        let expected: Vec<f64> = (0..16).map(|v| if v < 4 { 0.5 } else { 0.0 }).collect();
        for (a, e) in s.amplitudes().iter().zip(expected) {
            assert_eq!(*a, c(e));
        }

        let spec = GridSpec::new(3, 2).unwrap();
        let s = localized_clique_state(spec, 1, 2).unwrap();
        let start = (3 + 2) * 8;
        let a = 1.0 / (2.0 * 2f64.sqrt());
        for (v, amp) in s.amplitudes().iter().enumerate() {
            let e = if (start..start + 8).contains(&v) {
                a
            } else {
                0.0
            };
            assert!((amp - c(e)).norm() < 1e-16);
        }
        assert!((s.norm() - 1.0).abs() < 1e-15);

        assert!(matches!(
            localized_clique_state(spec, 3, 0),
            Err(EvolveError::Graph(GraphError::CliqueOutOfRange { .. }))
        ));
    }

    #[test]
    fn drift_handling() {
        let mut s = WalkState {
            amplitudes: vec![c(1.0 + 1e-9)],
        };
        s.check_drift().unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        let mut bad = WalkState {
            amplitudes: vec![c(1.0 + 1e-6)],
        };
        assert!(matches!(bad.check_drift(), Err(EvolveError::NormDrift(_))));
    }
}
