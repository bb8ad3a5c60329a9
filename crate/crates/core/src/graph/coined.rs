use super::{GraphError, Polygon, SimpleGraph, TessellatedGraph, Tessellation};

/// Bijection between the vertices of a converted graph and the directed arcs
/// `(u, w)` of the original graph.
///
/// Arcs are numbered vertex by vertex, neighbors in ascending order, so the
/// arcs leaving `u` occupy `offsets[u]..offsets[u + 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcMap {
    arcs: Vec<(usize, usize)>,
    offsets: Vec<usize>,
}

impl ArcMap {
    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Arc `(tail, head)` represented by converted vertex `i`.
    pub fn arc(&self, i: usize) -> (usize, usize) {
        self.arcs[i]
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    /// Converted vertex for the arc `u → w`.
    pub fn index_of(&self, u: usize, w: usize) -> Option<usize> {
        let range = *self.offsets.get(u)?..*self.offsets.get(u + 1)?;
        self.arcs[range.clone()]
            .binary_search_by_key(&w, |&(_, head)| head)
            .ok()
            .map(|i| range.start + i)
    }
}

/// Converts the graph of a flip-flop coined walk into its staggered
/// counterpart.
///
/// Each vertex `v` becomes a `d(v)`-clique (one vertex per outgoing arc)
/// forming one uniform polygon of the coin tessellation (index 0). Every
/// original edge `{u, w}` becomes the uniform 2-clique `{u→w, w→u}` of the
/// shift tessellation (index 1).
pub fn coined_to_staggered(g: &SimpleGraph) -> Result<(TessellatedGraph, ArcMap), GraphError> {
    let adj = g.adjacency();
    if let Some(v) = adj.iter().position(Vec::is_empty) {
        return Err(GraphError::IsolatedVertex(v));
    }
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }

    let mut arcs = Vec::with_capacity(2 * g.num_edges());
    let mut offsets = Vec::with_capacity(adj.len() + 1);
    for (u, neighbors) in adj.iter().enumerate() {
        offsets.push(arcs.len());
        arcs.extend(neighbors.iter().map(|&w| (u, w)));
    }
    offsets.push(arcs.len());
    let map = ArcMap { arcs, offsets };

    let coin = (0..adj.len())
        .map(|u| Polygon::uniform((map.offsets[u]..map.offsets[u + 1]).collect()))
        .collect::<Result<Vec<_>, _>>()?;
    let shift = g
        .edges()
        .map(|(u, w)| {
            let a = map.index_of(u, w).expect("arc exists");
            let b = map.index_of(w, u).expect("arc exists");
            Polygon::uniform(vec![a, b])
        })
        .collect::<Result<Vec<_>, _>>()?;

    let tessellations = vec![Tessellation::new(coin)?, Tessellation::new(shift)?];
    let graph = TessellatedGraph::polygon_edges(map.len(), &tessellations);
    Ok((TessellatedGraph::new(graph, tessellations)?, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{make_grid_of_cliques, validate_cover, GridSpec};
    use std::collections::BTreeSet;

    #[test]
    fn single_edge() {
        let g = SimpleGraph::from_edges(2, [(0, 1)]).unwrap();
        let (tg, map) = coined_to_staggered(&g).unwrap();
        assert_eq!(tg.num_vertices(), 2);
        let coin = &tg.tessellations()[0];
        assert_eq!(coin.len(), 2);
        assert!(coin.polygons().iter().all(|p| p.len() == 1));
        let shift = &tg.tessellations()[1];
        assert_eq!(shift.len(), 1);
        assert_eq!(shift.polygons()[0].vertices(), &[0, 1]);
        assert_eq!(map.arcs(), &[(0, 1), (1, 0)]);
        assert!(validate_cover(&tg).is_valid());
    }

    #[test]
    fn triangle() {
        // Arcs in order: 0→1, 0→2, 1→0, 1→2, 2→0, 2→1.
        // Coin: {0,1}, {2,3}, {4,5}. Shift: {0→1,1→0}={0,2}, {0→2,2→0}={1,4},
        // {1→2,2→1}={3,5}.
        let g = SimpleGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let (tg, map) = coined_to_staggered(&g).unwrap();
        assert_eq!(tg.num_vertices(), 6);
        let sets = |t: &Tessellation| -> Vec<Vec<usize>> {
            t.polygons().iter().map(|p| p.vertices().to_vec()).collect()
        };
        assert_eq!(
            sets(&tg.tessellations()[0]),
            vec![vec![0, 1], vec![2, 3], vec![4, 5]]
        );
        assert_eq!(
            sets(&tg.tessellations()[1]),
            vec![vec![0, 2], vec![1, 4], vec![3, 5]]
        );
        assert_eq!(map.index_of(2, 1), Some(5));
        assert_eq!(map.index_of(2, 2), None);
        let report = validate_cover(&tg);
        assert!(report.is_valid());
        assert_eq!(report.tessellation_count, 2);
    }

    #[test]
    fn rejects_isolated_and_disconnected() {
        let g = SimpleGraph::from_edges(3, [(0, 1)]).unwrap();
        assert_eq!(
            coined_to_staggered(&g).unwrap_err(),
            GraphError::IsolatedVertex(2)
        );
        let g = SimpleGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(
            coined_to_staggered(&g).unwrap_err(),
            GraphError::Disconnected
        );
    }

    fn torus(n: usize) -> SimpleGraph {
        let mut g = SimpleGraph::new(n * n);
        for x in 0..n {
            for y in 0..n {
                let u = x * n + y;
                g.add_edge(u, ((x + 1) % n) * n + y).unwrap();
                g.add_edge(u, x * n + (y + 1) % n).unwrap();
            }
        }
        g
    }

    #[test]
    fn torus_converts_to_grid_of_four_cliques() {
        let n = 4;
        let (tg, map) = coined_to_staggered(&torus(n)).unwrap();
        let spec = GridSpec::new(n, 1).unwrap();
        let grid = make_grid_of_cliques(spec);
        assert_eq!(tg.num_vertices(), grid.num_vertices());

        // Relabel arc u→w as (x, y, k) with k the direction of w from u.
        let relabel = |i: usize| {
            let (u, w) = map.arc(i);
            let (x, y) = (u / n, u % n);
            let (wx, wy) = (w / n, w % n);
            let k = if wx == (x + 1) % n {
                0
            } else if wy == (y + 1) % n {
                1
            } else if (wx + 1) % n == x {
                2
            } else {
                3
            };
            spec.vertex_index(x, y, k)
        };
        let as_sets =
            |tg: &TessellatedGraph, f: &dyn Fn(usize) -> usize| -> Vec<BTreeSet<BTreeSet<usize>>> {
                tg.tessellations()
                    .iter()
                    .map(|t| {
                        t.polygons()
                            .iter()
                            .map(|p| p.vertices().iter().map(|&v| f(v)).collect())
                            .collect()
                    })
                    .collect()
            };
        assert_eq!(as_sets(&tg, &relabel), as_sets(&grid, &|v| v));

        let relabelled: BTreeSet<_> = tg
            .graph()
            .edges()
            .map(|(a, b)| {
                let (a, b) = (relabel(a), relabel(b));
                (a.min(b), a.max(b))
            })
            .collect();
        let expected: BTreeSet<_> = grid.graph().edges().collect();
        assert_eq!(relabelled, expected);
    }
}
