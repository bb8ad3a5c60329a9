use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{GraphError, Polygon, TessellatedGraph, Tessellation};

/// Random cover on `num_vertices` vertices with `num_tessellations`
/// tessellations.
///
/// Each tessellation shuffles the vertices, leaves roughly a tenth of them
/// uncovered and cuts the rest into polygons of one to four vertices with
/// random complex unit amplitudes. The graph is the one induced by the
/// polygons.
pub fn random_cover<R: Rng + ?Sized>(
    num_vertices: usize,
    num_tessellations: usize,
    rng: &mut R,
) -> Result<TessellatedGraph, GraphError> {
    let mut tessellations = Vec::with_capacity(num_tessellations);
    for _ in 0..num_tessellations {
        let mut order: Vec<usize> = (0..num_vertices).collect();
        order.shuffle(rng);
        order.retain(|_| !rng.random_bool(0.1));
        let mut polygons = Vec::new();
        let mut rest = order.as_slice();
        while !rest.is_empty() {
            let size = rng.random_range(1..=4).min(rest.len());
            let (block, tail) = rest.split_at(size);
            polygons.push(random_polygon(block.to_vec(), rng)?);
            rest = tail;
        }
        tessellations.push(Tessellation::new(polygons)?);
    }
    TessellatedGraph::from_tessellations(num_vertices, tessellations)
}

fn random_polygon<R: Rng + ?Sized>(
    vertices: Vec<usize>,
    rng: &mut R,
) -> Result<Polygon, GraphError> {
    let raw: Vec<Complex64> = vertices
        .iter()
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-6 {
        return Polygon::uniform(vertices);
    }
    Polygon::new(vertices, raw.into_iter().map(|a| a / norm).collect())
}

/// Random unit state on `len` vertices.
pub fn random_state<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<Complex64> {
    let raw: Vec<Complex64> = (0..len)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    raw.into_iter().map(|a| a / norm).collect()
}
