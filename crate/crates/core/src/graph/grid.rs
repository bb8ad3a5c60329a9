use super::{GraphError, Polygon, TessellatedGraph, Tessellation};

/// Torus of `n × n` cliques of size `4q`, linked by `2n²` cliques of size `2q`.
///
/// Vertex `(x, y, k)` has index `((x·n) + y)·4q + k`, so the slots of one
/// clique are contiguous.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    n: usize,
    q: usize,
}

impl GridSpec {
    pub fn new(n: usize, q: usize) -> Result<Self, GraphError> {
        if n < 2 || q < 1 {
            return Err(GraphError::InvalidGrid { n, q });
        }
        Ok(Self { n, q })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn clique_size(&self) -> usize {
        4 * self.q
    }

    pub fn num_cliques(&self) -> usize {
        self.n * self.n
    }

    pub fn num_vertices(&self) -> usize {
        self.clique_size() * self.num_cliques()
    }

    #[inline]
    pub fn vertex_index(&self, x: usize, y: usize, k: usize) -> usize {
        debug_assert!(x < self.n && y < self.n && k < self.clique_size());
        (x * self.n + y) * self.clique_size() + k
    }

    /// `(x, y, k)` of a vertex index.
    pub fn coords(&self, v: usize) -> (usize, usize, usize) {
        let c = self.clique_size();
        let cell = v / c;
        (cell / self.n, cell % self.n, v % c)
    }

    pub fn check_clique(&self, x: usize, y: usize) -> Result<(), GraphError> {
        if x >= self.n || y >= self.n {
            return Err(GraphError::CliqueOutOfRange { x, y, n: self.n });
        }
        Ok(())
    }

    /// Vertex index range of clique `(x, y)`.
    pub fn clique_range(&self, x: usize, y: usize) -> std::ops::Range<usize> {
        let start = self.vertex_index(x, y, 0);
        start..start + self.clique_size()
    }
}

/// Builds the grid of `4q`-cliques with its green (index 0) and red
/// (index 1) tessellations.
///
/// Green polygon `x·n + y` is clique `(x, y)`. Red polygons come in pairs per
/// cell: index `2(x·n + y)` links the `x`-slots `0..q` with slots `2q..3q`
/// of `(x+1, y)`, index `2(x·n + y) + 1` links `q..2q` with slots `3q..4q`
/// of `(x, y+1)`. Coordinates wrap modulo `n`.
pub fn make_grid_of_cliques(spec: GridSpec) -> TessellatedGraph {
    let (n, q) = (spec.n, spec.q);
    let mut green = Vec::with_capacity(n * n);
    let mut red = Vec::with_capacity(2 * n * n);
    for x in 0..n {
        for y in 0..n {
            green.push(spec.clique_range(x, y).collect::<Vec<_>>());

            let xp = (x + 1) % n;
            let yp = (y + 1) % n;
            let along_x = (0..q)
                .map(|k| spec.vertex_index(x, y, k))
                .chain((0..q).map(|k| spec.vertex_index(xp, y, 2 * q + k)))
                .collect();
            let along_y = (0..q)
                .map(|k| spec.vertex_index(x, y, q + k))
                .chain((0..q).map(|k| spec.vertex_index(x, yp, 3 * q + k)))
                .collect();
            red.push(along_x);
            red.push(along_y);
        }
    }

    let into_tessellation = |sets: Vec<Vec<usize>>| {
        let polygons = sets
            .into_iter()
            .map(|vs| Polygon::uniform(vs).expect("grid polygons are valid"))
            .collect();
        Tessellation::new(polygons).expect("grid polygons are disjoint")
    };
    let tessellations = vec![into_tessellation(green), into_tessellation(red)];
    let graph = TessellatedGraph::polygon_edges(spec.num_vertices(), &tessellations);
    TessellatedGraph::new(graph, tessellations).expect("grid indices are in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_cover;

    #[test]
    fn rejects_small_grids() {
        assert_eq!(
            GridSpec::new(1, 1),
            Err(GraphError::InvalidGrid { n: 1, q: 1 })
        );
        assert_eq!(
            GridSpec::new(3, 0),
            Err(GraphError::InvalidGrid { n: 3, q: 0 })
        );
    }

    #[test]
    fn smallest_grid_shape() {
        let tg = make_grid_of_cliques(GridSpec::new(2, 1).unwrap());
        assert_eq!(tg.num_vertices(), 16);
        let [green, red] = tg.tessellations() else {
            panic!("expected two tessellations")
        };
        assert_eq!(green.len(), 4);
        assert!(green.polygons().iter().all(|p| p.len() == 4));
        assert_eq!(red.len(), 8);
        assert!(red.polygons().iter().all(|p| p.len() == 2));
    }

    #[test]
    fn green_amplitudes_for_q2() {
        let tg = make_grid_of_cliques(GridSpec::new(2, 2).unwrap());
        assert_eq!(tg.num_vertices(), 32);
        let expected = 1.0 / (2.0 * 2f64.sqrt());
        for p in tg.tessellations()[0].polygons() {
            for a in p.amplitudes() {
                assert!((a.re - expected).abs() < 1e-15 && a.im == 0.0);
            }
        }
        let red = 1.0 / 4f64.sqrt();
        for p in tg.tessellations()[1].polygons() {
            assert_eq!(p.len(), 4);
            assert!(p.amplitudes().iter().all(|a| (a.re - red).abs() < 1e-15));
        }
    }

    #[test]
    fn red_polygons_follow_the_pairing_rule() {
        let spec = GridSpec::new(3, 2).unwrap();
        let tg = make_grid_of_cliques(spec);
        let red = &tg.tessellations()[1];
        // cell (2, 1): x-link wraps to x = 0, y-link goes to y = 2
        let cell = 2 * 3 + 1;
        let along_x: Vec<_> = red.polygons()[2 * cell]
            .vertices()
            .iter()
            .map(|&v| spec.coords(v))
            .collect();
        assert_eq!(along_x, vec![(2, 1, 0), (2, 1, 1), (0, 1, 4), (0, 1, 5)]);
        let along_y: Vec<_> = red.polygons()[2 * cell + 1]
            .vertices()
            .iter()
            .map(|&v| spec.coords(v))
            .collect();
        assert_eq!(along_y, vec![(2, 1, 2), (2, 1, 3), (2, 2, 6), (2, 2, 7)]);
    }

    #[test]
    fn generated_grids_are_valid_covers() {
        for (n, q) in [(2, 1), (3, 1), (2, 2), (4, 3), (5, 1)] {
            let tg = make_grid_of_cliques(GridSpec::new(n, q).unwrap());
            let report = validate_cover(&tg);
            assert!(report.is_valid(), "grid({n},{q}): {report}");
            assert_eq!(report.tessellation_count, 2);
        }
    }

    #[test]
    fn every_vertex_in_one_green_and_one_red_polygon() {
        let tg = make_grid_of_cliques(GridSpec::new(4, 2).unwrap());
        for t in tg.tessellations() {
            let mut hits = vec![0usize; tg.num_vertices()];
            for p in t.polygons() {
                for &v in p.vertices() {
                    hits[v] += 1;
                }
            }
            assert!(hits.iter().all(|&h| h == 1));
        }
    }

    #[test]
    fn edge_count_by_direct_enumeration() {
        // Brute force: count unordered vertex pairs sharing a polygon in
        // either tessellation, using coordinates only.
        for (n, q) in [(2, 1), (3, 1), (3, 2), (2, 3)] {
            let spec = GridSpec::new(n, q).unwrap();
            let tg = make_grid_of_cliques(spec);
            let nv = spec.num_vertices();
            let same_green = |a: usize, b: usize| a / (4 * q) == b / (4 * q);
            let red_of = |v: usize| {
                let (x, y, k) = spec.coords(v);
                match k / q {
                    0 => (x, y, 0),
                    1 => (x, y, 1),
                    2 => ((x + n - 1) % n, y, 0),
                    _ => (x, (y + n - 1) % n, 1),
                }
            };
            let mut count = 0;
            for a in 0..nv {
                for b in a + 1..nv {
                    if same_green(a, b) || red_of(a) == red_of(b) {
                        count += 1;
                    }
                }
            }
            assert_eq!(tg.graph().num_edges(), count, "grid({n},{q})");
            // green cliques plus the q² cross pairs of every red polygon
            let c2 = |m: usize| m * (m - 1) / 2;
            assert_eq!(count, n * n * c2(4 * q) + 2 * n * n * q * q);
        }
    }
}
