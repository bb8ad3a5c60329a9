//! Graphs, polygons and tessellation covers.
//!
//! A staggered walk lives on the vertices of a simple graph. Each
//! tessellation partitions (some of) the vertices into polygons, and every
//! polygon carries a unit vector supported on its vertices. The walk operator
//! is the product of one reflection per tessellation, so everything here is
//! immutable once built and can be shared freely between workers.

mod coined;
mod grid;
pub mod io;
mod random;
mod validate;

use std::collections::BTreeSet;

use num_complex::Complex64;
use thiserror::Error;

pub use coined::{coined_to_staggered, ArcMap};
pub use grid::{make_grid_of_cliques, GridSpec};
pub use random::{random_cover, random_state};
pub use validate::{validate_cover, CoverReport, PolygonRef};

/// Tolerance on the squared norm of a polygon state.
pub const POLYGON_NORM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph with {num_vertices} vertices")]
    VertexOutOfRange { vertex: usize, num_vertices: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("polygon has no vertices")]
    EmptyPolygon,
    #[error("vertex {0} appears twice in one polygon")]
    RepeatedVertex(usize),
    #[error("polygon has {vertices} vertices but {amplitudes} amplitudes")]
    AmplitudeCount { vertices: usize, amplitudes: usize },
    #[error("polygon amplitudes have squared norm {0}, expected 1")]
    NotNormalized(f64),
    #[error("vertex {vertex} belongs to polygons {first} and {second} of the same tessellation")]
    Overlap {
        vertex: usize,
        first: usize,
        second: usize,
    },
    #[error("invalid grid: n = {n}, q = {q} (need n >= 2, q >= 1)")]
    InvalidGrid { n: usize, q: usize },
    #[error("clique ({x}, {y}) outside a grid of width {n}")]
    CliqueOutOfRange { x: usize, y: usize, n: usize },
    #[error("vertex {0} is isolated")]
    IsolatedVertex(usize),
    #[error("graph is not connected")]
    Disconnected,
}

/// Undirected simple graph on vertices `0..num_vertices`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    num_vertices: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl SimpleGraph {
    pub fn new(num_vertices: usize) -> Self {
        Self {
            num_vertices,
            edges: BTreeSet::new(),
        }
    }

    /// Builds a graph from an edge list, rejecting loops and repeated edges.
    pub fn from_edges<I>(num_vertices: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::new(num_vertices);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        for w in [u, v] {
            if w >= self.num_vertices {
                return Err(GraphError::VertexOutOfRange {
                    vertex: w,
                    num_vertices: self.num_vertices,
                });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        let key = (u.min(v), u.max(v));
        if !self.edges.insert(key) {
            return Err(GraphError::DuplicateEdge(key.0, key.1));
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// Edges as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Sorted neighbor lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_vertices];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.num_vertices == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.num_vertices];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.num_vertices
    }
}

/// A clique together with its unit vector `Σ α_v |v⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<usize>,
    amplitudes: Vec<Complex64>,
}

impl Polygon {
    pub fn new(vertices: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::EmptyPolygon);
        }
        if vertices.len() != amplitudes.len() {
            return Err(GraphError::AmplitudeCount {
                vertices: vertices.len(),
                amplitudes: amplitudes.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for &v in &vertices {
            if !seen.insert(v) {
                return Err(GraphError::RepeatedVertex(v));
            }
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > POLYGON_NORM_TOL {
            return Err(GraphError::NotNormalized(norm_sqr));
        }
        Ok(Self {
            vertices,
            amplitudes,
        })
    }

    /// Polygon with the uniform amplitude `1/√|P|` on every vertex.
    pub fn uniform(vertices: Vec<usize>) -> Result<Self, GraphError> {
        let a = Complex64::new(1.0 / (vertices.len() as f64).sqrt(), 0.0);
        let amplitudes = vec![a; vertices.len()];
        Self::new(vertices, amplitudes)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    /// Amplitude on `v`, or `None` when `v` is outside the polygon.
    pub fn amplitude_of(&self, v: usize) -> Option<Complex64> {
        self.vertices
            .iter()
            .position(|&w| w == v)
            .map(|i| self.amplitudes[i])
    }

    pub fn is_uniform(&self) -> bool {
        let a = 1.0 / (self.len() as f64).sqrt();
        self.amplitudes
            .iter()
            .all(|z| z.im == 0.0 && (z.re - a).abs() <= 4.0 * f64::EPSILON)
    }

    pub fn min_vertex(&self) -> usize {
        *self.vertices.iter().min().expect("polygons are non-empty")
    }

    /// Same polygon with vertices sorted ascending.
    pub(crate) fn sorted(&self) -> Self {
        let mut pairs: Vec<_> = self
            .vertices
            .iter()
            .copied()
            .zip(self.amplitudes.iter().copied())
            .collect();
        pairs.sort_by_key(|&(v, _)| v);
        let (vertices, amplitudes) = pairs.into_iter().unzip();
        Self {
            vertices,
            amplitudes,
        }
    }
}

/// Pairwise-disjoint polygons. Vertices in no polygon are allowed; the
/// reflection acts on them as `-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tessellation {
    polygons: Vec<Polygon>,
    max_vertex: Option<usize>,
}

impl Tessellation {
    pub fn new(polygons: Vec<Polygon>) -> Result<Self, GraphError> {
        let max_vertex = polygons
            .iter()
            .flat_map(|p| p.vertices.iter().copied())
            .max();
        if let Some(max) = max_vertex {
            let mut owner = vec![usize::MAX; max + 1];
            for (i, p) in polygons.iter().enumerate() {
                for &v in &p.vertices {
                    if owner[v] != usize::MAX {
                        return Err(GraphError::Overlap {
                            vertex: v,
                            first: owner[v],
                            second: i,
                        });
                    }
                    owner[v] = i;
                }
            }
        }
        Ok(Self {
            polygons,
            max_vertex,
        })
    }

    pub fn polygons(&self) -> &[Polygon] {
        &self.polygons
    }

    pub fn len(&self) -> usize {
        self.polygons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polygons.is_empty()
    }

    /// Largest vertex index used by any polygon.
    pub fn max_vertex(&self) -> Option<usize> {
        self.max_vertex
    }

    pub fn covers_all_vertices(&self, num_vertices: usize) -> bool {
        self.polygons.iter().map(Polygon::len).sum::<usize>() == num_vertices
            && self
                .max_vertex
                .map_or(num_vertices == 0, |m| m < num_vertices)
    }

    /// Index of the polygon containing `v`.
    pub fn polygon_of(&self, v: usize) -> Option<usize> {
        self.polygons.iter().position(|p| p.contains(v))
    }
}

/// A graph and an ordered list of tessellations. Tessellation 0 acts first.
///
/// `pristine` covers are expected to satisfy the full cover rules checked by
/// [`validate_cover`]; perturbed ones (vertex removal, partial tessellations)
/// are not.
#[derive(Debug, Clone, PartialEq)]
pub struct TessellatedGraph {
    graph: SimpleGraph,
    tessellations: Vec<Tessellation>,
    pristine: bool,
}

impl TessellatedGraph {
    pub fn new(graph: SimpleGraph, tessellations: Vec<Tessellation>) -> Result<Self, GraphError> {
        for t in &tessellations {
            if let Some(m) = t.max_vertex() {
                if m >= graph.num_vertices() {
                    return Err(GraphError::VertexOutOfRange {
                        vertex: m,
                        num_vertices: graph.num_vertices(),
                    });
                }
            }
        }
        Ok(Self {
            graph,
            tessellations,
            pristine: true,
        })
    }

    /// Cover together with the graph induced by its polygons.
    pub fn from_tessellations(
        num_vertices: usize,
        tessellations: Vec<Tessellation>,
    ) -> Result<Self, GraphError> {
        let graph = Self::polygon_edges(num_vertices, &tessellations);
        Self::new(graph, tessellations)
    }

    /// Same cover marked as perturbed.
    pub fn into_perturbed(mut self) -> Self {
        self.pristine = false;
        self
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    pub fn tessellations(&self) -> &[Tessellation] {
        &self.tessellations
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn is_pristine(&self) -> bool {
        self.pristine
    }

    /// Sorts vertices within polygons and polygons by least vertex.
    pub fn canonicalize(&self) -> Self {
        let tessellations = self
            .tessellations
            .iter()
            .map(|t| {
                let mut polygons: Vec<Polygon> = t.polygons.iter().map(Polygon::sorted).collect();
                polygons.sort_by_key(|p| p.vertices[0]);
                Tessellation {
                    polygons,
                    max_vertex: t.max_vertex,
                }
            })
            .collect();
        Self {
            graph: self.graph.clone(),
            tessellations,
            pristine: self.pristine,
        }
    }

    /// Graph whose edges are exactly the pairs inside some polygon.
    pub(crate) fn polygon_edges(
        num_vertices: usize,
        tessellations: &[Tessellation],
    ) -> SimpleGraph {
        let mut g = SimpleGraph::new(num_vertices);
        for t in tessellations {
            for p in t.polygons() {
                for (i, &u) in p.vertices.iter().enumerate() {
                    for &v in &p.vertices[i + 1..] {
                        g.edges.insert((u.min(v), u.max(v)));
                    }
                }
            }
        }
        g
    }
}
