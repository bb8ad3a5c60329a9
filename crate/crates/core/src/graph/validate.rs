use std::fmt;

use super::{SimpleGraph, TessellatedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PolygonRef {
    pub tessellation: usize,
    pub polygon: usize,
}

/// Outcome of checking a cover against the tessellation-cover rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverReport {
    pub clique_ok: bool,
    /// Polygons whose vertices do not induce a clique.
    pub non_clique_polygons: Vec<PolygonRef>,
    pub partition_ok: bool,
    /// `(tessellation, vertex)` pairs where the vertex is in no polygon.
    pub uncovered_vertices: Vec<(usize, usize)>,
    pub edge_cover_ok: bool,
    /// Graph edges not inside any polygon.
    pub uncovered_edges: Vec<(usize, usize)>,
    pub tessellation_count: usize,
}

impl CoverReport {
    pub fn is_valid(&self) -> bool {
        self.clique_ok && self.partition_ok && self.edge_cover_ok
    }
}

impl fmt::Display for CoverReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tessellations: {}", self.tessellation_count)?;
        write!(f, "clique_ok: {}", self.clique_ok)?;
        if !self.clique_ok {
            write!(f, " (non-clique polygons:")?;
            for r in &self.non_clique_polygons {
                write!(f, " {}:{}", r.tessellation, r.polygon)?;
            }
            write!(f, ")")?;
        }
        writeln!(f)?;
        write!(f, "partition_ok: {}", self.partition_ok)?;
        if !self.partition_ok {
            write!(f, " (uncovered vertices:")?;
            for (t, v) in &self.uncovered_vertices {
                write!(f, " {t}:{v}")?;
            }
            write!(f, ")")?;
        }
        writeln!(f)?;
        write!(f, "edge_cover_ok: {}", self.edge_cover_ok)?;
        if !self.edge_cover_ok {
            write!(f, " (uncovered edges:")?;
            for (u, v) in &self.uncovered_edges {
                write!(f, " {u}-{v}")?;
            }
            write!(f, ")")?;
        }
        writeln!(f)?;
        write!(f, "valid: {}", self.is_valid())
    }
}

/// Checks that every polygon is a clique, every tessellation partitions the
/// vertex set, and the polygons jointly cover every edge.
pub fn validate_cover(tg: &TessellatedGraph) -> CoverReport {
    let graph = tg.graph();
    let nv = graph.num_vertices();

    let mut non_clique_polygons = Vec::new();
    let mut uncovered_vertices = Vec::new();
    for (ti, t) in tg.tessellations().iter().enumerate() {
        let mut covered = vec![false; nv];
        for (pi, p) in t.polygons().iter().enumerate() {
            if !is_clique(graph, p.vertices()) {
                non_clique_polygons.push(PolygonRef {
                    tessellation: ti,
                    polygon: pi,
                });
            }
            for &v in p.vertices() {
                covered[v] = true;
            }
        }
        uncovered_vertices.extend(
            covered
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(v, _)| (ti, v)),
        );
    }

    let inside = TessellatedGraph::polygon_edges(nv, tg.tessellations());
    let uncovered_edges: Vec<_> = graph
        .edges()
        .filter(|&(u, v)| !inside.has_edge(u, v))
        .collect();

    CoverReport {
        clique_ok: non_clique_polygons.is_empty(),
        non_clique_polygons,
        partition_ok: uncovered_vertices.is_empty(),
        uncovered_vertices,
        edge_cover_ok: uncovered_edges.is_empty(),
        uncovered_edges,
        tessellation_count: tg.tessellations().len(),
    }
}

fn is_clique(graph: &SimpleGraph, vertices: &[usize]) -> bool {
    vertices
        .iter()
        .enumerate()
        .all(|(i, &u)| vertices[i + 1..].iter().all(|&v| graph.has_edge(u, v)))
}
