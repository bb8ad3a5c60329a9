//! Dynamic percolation: polygons or vertices break independently before
//! every step, and the cover is restored afterwards.
//!
//! Breaking a polygon splits it into sub-cliques whose amplitudes are
//! renormalized block by block. Breaking a vertex removes it from every
//! polygon containing it and renormalizes the survivors; the vertex is then
//! uncovered and every reflection acts on it as `-1`. Both keep each
//! reflection unitary.
//!
//! A [`BreakPlan`] can be materialized into an explicit perturbed cover
//! ([`materialize_plan`]) or applied directly to a state ([`apply_plan`])
//! without building one. The two routes agree; the second is what the
//! Monte-Carlo drivers use.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::distr::{Bernoulli, Distribution};
use rand::Rng;
use thiserror::Error;

use crate::evolve::{self, reflect_negated, EvolveError, WalkState};
use crate::graph::{GraphError, Polygon, TessellatedGraph, Tessellation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("noise scope is empty")]
    EmptyScope,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("block {0:?} has zero amplitude on every vertex")]
    ZeroNormBlock(Vec<usize>),
    #[error("vertex {vertex} out of range for {num_vertices} vertices")]
    VertexOutOfRange { vertex: usize, num_vertices: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Evolve(#[from] EvolveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    None,
    BreakVertices,
    BreakPolygons,
}

/// How a broken polygon is split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplitPolicy {
    /// Every vertex becomes its own 1-clique.
    Singletons,
    /// One uniformly chosen vertex alone, the rest together.
    OneVsRest,
}

/// Tessellations subject to polygon breaking.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NoiseScope {
    All,
    Only(BTreeSet<usize>),
}

impl NoiseScope {
    pub fn contains(&self, tessellation: usize) -> bool {
        match self {
            NoiseScope::All => true,
            NoiseScope::Only(set) => set.contains(&tessellation),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    kind: NoiseKind,
    p: f64,
    split: SplitPolicy,
    scope: NoiseScope,
}

impl NoiseSpec {
    pub fn new(
        kind: NoiseKind,
        p: f64,
        split: SplitPolicy,
        scope: NoiseScope,
    ) -> Result<Self, NoiseError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(NoiseError::InvalidProbability(p));
        }
        if kind != NoiseKind::None && matches!(&scope, NoiseScope::Only(s) if s.is_empty()) {
            return Err(NoiseError::EmptyScope);
        }
        Ok(Self {
            kind,
            p,
            split,
            scope,
        })
    }

    pub fn none() -> Self {
        Self {
            kind: NoiseKind::None,
            p: 0.0,
            split: SplitPolicy::Singletons,
            scope: NoiseScope::All,
        }
    }

    pub fn break_vertices(p: f64) -> Result<Self, NoiseError> {
        Self::new(
            NoiseKind::BreakVertices,
            p,
            SplitPolicy::Singletons,
            NoiseScope::All,
        )
    }

    pub fn break_polygons(p: f64, split: SplitPolicy) -> Result<Self, NoiseError> {
        Self::new(NoiseKind::BreakPolygons, p, split, NoiseScope::All)
    }

    pub fn with_scope(mut self, scope: NoiseScope) -> Result<Self, NoiseError> {
        self.scope = scope;
        Self::new(self.kind, self.p, self.split, self.scope)
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn split(&self) -> SplitPolicy {
        self.split
    }

    pub fn scope(&self) -> &NoiseScope {
        &self.scope
    }

    /// True when no step can ever be perturbed.
    pub fn is_inert(&self) -> bool {
        self.kind == NoiseKind::None || self.p == 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolygonBreak {
    pub tessellation: usize,
    pub polygon: usize,
    /// Exact partition of the polygon's vertices.
    pub blocks: Vec<Vec<usize>>,
}

/// What breaks before one step. Entries are sorted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BreakPlan {
    pub broken_vertices: Vec<usize>,
    pub polygon_breaks: Vec<PolygonBreak>,
}

impl BreakPlan {
    pub fn is_empty(&self) -> bool {
        self.broken_vertices.is_empty() && self.polygon_breaks.is_empty()
    }
}

fn block_amplitudes(pg: &Polygon, block: &[usize]) -> Result<Vec<Complex64>, NoiseError> {
    let raw = block
        .iter()
        .map(|&v| {
            pg.amplitude_of(v).ok_or_else(|| {
                NoiseError::InvalidPartition(format!("vertex {v} is not in the polygon"))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    renormalize(raw).ok_or_else(|| NoiseError::ZeroNormBlock(block.to_vec()))
}

fn renormalize(mut amps: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let beta = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if beta == 0.0 {
        return None;
    }
    for a in &mut amps {
        *a /= beta;
    }
    Some(amps)
}

/// Splits a polygon along `partition`, renormalizing each block by
/// `β = √(Σ_{v ∈ block} |α_v|²)`.
pub fn break_polygon(pg: &Polygon, partition: &[Vec<usize>]) -> Result<Vec<Polygon>, NoiseError> {
    let mut seen = BTreeSet::new();
    for block in partition {
        if block.is_empty() {
            return Err(NoiseError::InvalidPartition("empty block".into()));
        }
        for &v in block {
            if !seen.insert(v) {
                return Err(NoiseError::InvalidPartition(format!(
                    "vertex {v} in two blocks"
                )));
            }
        }
    }
    if seen.len() != pg.len() || !pg.vertices().iter().all(|v| seen.contains(v)) {
        return Err(NoiseError::InvalidPartition(
            "blocks do not cover the polygon exactly".into(),
        ));
    }
    partition
        .iter()
        .map(|block| {
            let amps = block_amplitudes(pg, block)?;
            Ok(Polygon::new(block.clone(), amps)?)
        })
        .collect()
}

/// Drops `v` from `pg` for every `broken[v]`, renormalizing the rest.
/// `None` when nothing with non-zero amplitude survives.
fn remove_from_polygon(pg: &Polygon, broken: &[bool]) -> Option<Polygon> {
    if !pg.vertices().iter().any(|&v| broken[v]) {
        return Some(pg.clone());
    }
    let (vertices, amps): (Vec<usize>, Vec<Complex64>) = pg
        .vertices()
        .iter()
        .zip(pg.amplitudes())
        .filter(|(&v, _)| !broken[v])
        .map(|(&v, &a)| (v, a))
        .unzip();
    let amps = renormalize(amps)?;
    Some(Polygon::new(vertices, amps).expect("renormalized survivors form a polygon"))
}

fn vertex_mask(num_vertices: usize, broken: &[usize]) -> Result<Vec<bool>, NoiseError> {
    let mut mask = vec![false; num_vertices];
    for &v in broken {
        if v >= num_vertices {
            return Err(NoiseError::VertexOutOfRange {
                vertex: v,
                num_vertices,
            });
        }
        mask[v] = true;
    }
    Ok(mask)
}

fn perturbed_cover(
    tg: &TessellatedGraph,
    tessellations: Vec<Tessellation>,
) -> Result<TessellatedGraph, NoiseError> {
    let graph = TessellatedGraph::polygon_edges(tg.num_vertices(), &tessellations);
    Ok(TessellatedGraph::new(graph, tessellations)?.into_perturbed())
}

/// Removes `broken` from every polygon, renormalizing survivors. Polygons
/// left empty (or with zero amplitude everywhere) disappear. The graph of
/// the result keeps only edges inside the remaining polygons.
pub fn remove_vertices(
    tg: &TessellatedGraph,
    broken: &[usize],
) -> Result<TessellatedGraph, NoiseError> {
    if broken.is_empty() {
        return Ok(tg.clone());
    }
    let mask = vertex_mask(tg.num_vertices(), broken)?;
    let tessellations = tg
        .tessellations()
        .iter()
        .map(|t| {
            let polygons = t
                .polygons()
                .iter()
                .filter_map(|p| remove_from_polygon(p, &mask))
                .collect();
            Tessellation::new(polygons)
        })
        .collect::<Result<Vec<_>, _>>()?;
    perturbed_cover(tg, tessellations)
}

fn split_polygon<R: Rng + ?Sized>(
    pg: &Polygon,
    split: SplitPolicy,
    rng: &mut R,
) -> Vec<Vec<usize>> {
    let vs = pg.vertices();
    match split {
        SplitPolicy::Singletons => vs.iter().map(|&v| vec![v]).collect(),
        SplitPolicy::OneVsRest => {
            let lone = rng.random_range(0..vs.len());
            let rest: Vec<usize> = vs
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != lone)
                .map(|(_, &v)| v)
                .collect();
            if rest.is_empty() {
                vec![vec![vs[lone]]]
            } else {
                vec![vec![vs[lone]], rest]
            }
        }
    }
}

/// Samples what breaks before one step.
///
/// Vertex breaking ignores the scope: a removed vertex leaves every
/// tessellation.
pub fn sample_plan<R: Rng + ?Sized>(
    tg: &TessellatedGraph,
    ns: &NoiseSpec,
    rng: &mut R,
) -> BreakPlan {
    let mut plan = BreakPlan::default();
    if ns.is_inert() {
        return plan;
    }
    let coin = Bernoulli::new(ns.p).expect("p validated on construction");
    match ns.kind {
        NoiseKind::None => {}
        NoiseKind::BreakVertices => {
            plan.broken_vertices = (0..tg.num_vertices())
                .filter(|_| coin.sample(rng))
                .collect();
        }
        NoiseKind::BreakPolygons => {
            for (ti, t) in tg.tessellations().iter().enumerate() {
                if !ns.scope.contains(ti) {
                    continue;
                }
                for (pi, p) in t.polygons().iter().enumerate() {
                    if coin.sample(rng) {
                        plan.polygon_breaks.push(PolygonBreak {
                            tessellation: ti,
                            polygon: pi,
                            blocks: split_polygon(p, ns.split, rng),
                        });
                    }
                }
            }
        }
    }
    plan
}

/// Builds the perturbed cover a plan describes: polygon splits first, then
/// vertex removal.
pub fn materialize_plan(
    tg: &TessellatedGraph,
    plan: &BreakPlan,
) -> Result<TessellatedGraph, NoiseError> {
    if plan.polygon_breaks.is_empty() {
        return remove_vertices(tg, &plan.broken_vertices);
    }
    let mut breaks = plan.polygon_breaks.iter().peekable();
    let mut tessellations = Vec::with_capacity(tg.tessellations().len());
    for (ti, t) in tg.tessellations().iter().enumerate() {
        let mut polygons = Vec::with_capacity(t.len());
        for (pi, p) in t.polygons().iter().enumerate() {
            match breaks.next_if(|b| (b.tessellation, b.polygon) == (ti, pi)) {
                Some(b) => polygons.extend(break_polygon(p, &b.blocks)?),
                None => polygons.push(p.clone()),
            }
        }
        tessellations.push(Tessellation::new(polygons)?);
    }
    if let Some(b) = breaks.next() {
        return Err(NoiseError::InvalidPartition(format!(
            "no polygon {} in tessellation {}",
            b.polygon, b.tessellation
        )));
    }
    let split = perturbed_cover(tg, tessellations)?;
    remove_vertices(&split, &plan.broken_vertices).map(TessellatedGraph::into_perturbed)
}

fn reflect_survivors(s: &mut [Complex64], vertices: &[usize], amps: Vec<Complex64>, mask: &[bool]) {
    let (vs, amps): (Vec<usize>, Vec<Complex64>) = vertices
        .iter()
        .copied()
        .zip(amps)
        .filter(|&(v, _)| !mask[v])
        .unzip();
    if let Some(amps) = renormalize(amps) {
        reflect_negated(s, vs.into_iter().zip(amps));
    }
}

/// Applies one step of the perturbed cover described by `plan` without
/// materializing it.
pub fn apply_plan(
    tg: &TessellatedGraph,
    plan: &BreakPlan,
    state: &mut WalkState,
) -> Result<(), NoiseError> {
    evolve::check_length(tg, state)?;
    let mask = if plan.broken_vertices.is_empty() {
        None
    } else {
        Some(vertex_mask(tg.num_vertices(), &plan.broken_vertices)?)
    };
    let s = state.amplitudes_mut();
    let mut breaks = plan.polygon_breaks.iter().peekable();
    for (ti, t) in tg.tessellations().iter().enumerate() {
        for a in s.iter_mut() {
            *a = -*a;
        }
        for (pi, p) in t.polygons().iter().enumerate() {
            if let Some(b) = breaks.next_if(|b| (b.tessellation, b.polygon) == (ti, pi)) {
                for block in &b.blocks {
                    let amps = block_amplitudes(p, block)?;
                    match &mask {
                        Some(mask) if block.iter().any(|&v| mask[v]) => {
                            reflect_survivors(s, block, amps, mask)
                        }
                        _ => reflect_negated(s, block.iter().copied().zip(amps)),
                    }
                }
                continue;
            }
            match &mask {
                Some(mask) if p.vertices().iter().any(|&v| mask[v]) => {
                    reflect_survivors(s, p.vertices(), p.amplitudes().to_vec(), mask)
                }
                _ => reflect_negated(
                    s,
                    p.vertices()
                        .iter()
                        .copied()
                        .zip(p.amplitudes().iter().copied()),
                ),
            }
        }
    }
    if let Some(b) = breaks.next() {
        return Err(NoiseError::InvalidPartition(format!(
            "no polygon {} in tessellation {}",
            b.polygon, b.tessellation
        )));
    }
    Ok(())
}

/// One noisy step: sample a fresh plan against the pristine cover and apply
/// it. Inert noise takes exactly the noiseless path.
pub fn perturbed_step<R: Rng + ?Sized>(
    tg: &TessellatedGraph,
    ns: &NoiseSpec,
    rng: &mut R,
    state: &mut WalkState,
) -> Result<(), NoiseError> {
    if ns.is_inert() {
        return Ok(evolve::step(tg, state)?);
    }
    let plan = sample_plan(tg, ns, rng);
    apply_plan(tg, &plan, state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::{localized_clique_state, step};
    use crate::graph::{make_grid_of_cliques, GridSpec};
    use crate::rng::rng_from_seed;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn grid(n: usize, q: usize) -> (GridSpec, TessellatedGraph) {
        let spec = GridSpec::new(n, q).unwrap();
        (spec, make_grid_of_cliques(spec))
    }

    fn random_state(len: usize, seed: u64) -> WalkState {
        let mut rng = rng_from_seed(seed);
        let amps = (0..len)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        WalkState::normalized(amps).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert_eq!(
            NoiseSpec::break_vertices(1.5),
            Err(NoiseError::InvalidProbability(1.5))
        );
        assert_eq!(
            NoiseSpec::break_polygons(0.1, SplitPolicy::Singletons)
                .unwrap()
                .with_scope(NoiseScope::Only(BTreeSet::new())),
            Err(NoiseError::EmptyScope)
        );
        assert!(NoiseSpec::none().is_inert());
        assert!(NoiseSpec::break_vertices(0.0).unwrap().is_inert());
    }

    #[test]
    fn break_uniform_polygon_into_singletons() {
        let pg = Polygon::uniform(vec![0, 1, 2, 3]).unwrap();
        let parts = break_polygon(&pg, &[vec![0], vec![1], vec![2], vec![3]]).unwrap();
        assert_eq!(parts.len(), 4);
        for (i, p) in parts.iter().enumerate() {
            assert_eq!(p.vertices(), &[i]);
            assert!((p.amplitudes()[0] - c(1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn break_uniform_polygon_in_halves() {
        let pg = Polygon::uniform(vec![0, 1, 2, 3]).unwrap();
        let parts = break_polygon(&pg, &[vec![0, 2], vec![1, 3]]).unwrap();
        let h = 1.0 / 2f64.sqrt();
        for p in &parts {
            assert!(p.amplitudes().iter().all(|a| (a - c(h)).norm() < 1e-15));
        }
    }

    #[test]
    fn break_weighted_pair() {
        // β = 0.8 and 0.6: each singleton ends with amplitude exactly 1.
        let pg = Polygon::new(vec![5, 9], vec![c(0.8), c(0.6)]).unwrap();
        let parts = break_polygon(&pg, &[vec![5], vec![9]]).unwrap();
        assert!((parts[0].amplitudes()[0] - c(1.0)).norm() < 1e-15);
        assert!((parts[1].amplitudes()[0] - c(1.0)).norm() < 1e-15);
        // Σ β_i² = 1
        let betas: f64 = [vec![5], vec![9]]
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&v| pg.amplitude_of(v).unwrap().norm_sqr())
                    .sum::<f64>()
            })
            .sum();
        assert!((betas - 1.0).abs() < 1e-15);
    }

    #[test]
    fn break_polygon_rejects_bad_partitions() {
        let pg = Polygon::uniform(vec![0, 1, 2]).unwrap();
        for bad in [
            vec![vec![0, 1]],
            vec![vec![0, 1], vec![1, 2]],
            vec![vec![0], vec![], vec![1, 2]],
            vec![vec![0], vec![1, 2, 7]],
        ] {
            assert!(matches!(
                break_polygon(&pg, &bad),
                Err(NoiseError::InvalidPartition(_))
            ));
        }
        let skew = Polygon::new(vec![0, 1], vec![c(1.0), c(0.0)]).unwrap();
        assert_eq!(
            break_polygon(&skew, &[vec![0], vec![1]]),
            Err(NoiseError::ZeroNormBlock(vec![1]))
        );
    }

    #[test]
    fn removing_vertex_zero_reshapes_its_polygons() {
        let (spec, tg) = grid(3, 1);
        let v0 = spec.vertex_index(0, 0, 0);
        let out = remove_vertices(&tg, &[v0]).unwrap();
        assert!(!out.is_pristine());

        let green = &out.tessellations()[0].polygons()[0];
        assert_eq!(green.vertices(), &[1, 2, 3]);
        let a = 1.0 / 3f64.sqrt();
        assert!(green.amplitudes().iter().all(|z| (z - c(a)).norm() < 1e-15));

        let red = &out.tessellations()[1].polygons()[0];
        assert_eq!(red.vertices(), &[spec.vertex_index(1, 0, 2)]);
        assert!((red.amplitudes()[0] - c(1.0)).norm() < 1e-15);

        assert_eq!(out.tessellations()[0].polygon_of(v0), None);
        assert_eq!(out.tessellations()[1].polygon_of(v0), None);
        assert!(!out.graph().edges().any(|(u, w)| u == v0 || w == v0));

        // Original untouched; removal is idempotent.
        assert_eq!(tg, make_grid_of_cliques(spec));
        assert_eq!(remove_vertices(&out, &[v0]).unwrap(), out);
        assert_eq!(remove_vertices(&tg, &[]).unwrap(), tg);
    }

    #[test]
    fn removing_a_whole_polygon_deletes_it() {
        let (spec, tg) = grid(2, 1);
        let red0: Vec<usize> = tg.tessellations()[1].polygons()[0].vertices().to_vec();
        let out = remove_vertices(&tg, &red0).unwrap();
        assert_eq!(out.tessellations()[1].len(), 7);
        assert_eq!(out.tessellations()[0].len(), 4);
        assert!(matches!(
            remove_vertices(&tg, &[spec.num_vertices()]),
            Err(NoiseError::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn inert_plans_are_empty() {
        let (_, tg) = grid(2, 1);
        let mut rng = rng_from_seed(1);
        for ns in [
            NoiseSpec::none(),
            NoiseSpec::break_vertices(0.0).unwrap(),
            NoiseSpec::break_polygons(0.0, SplitPolicy::OneVsRest).unwrap(),
        ] {
            for _ in 0..50 {
                assert!(sample_plan(&tg, &ns, &mut rng).is_empty());
            }
        }
    }

    #[test]
    fn certain_polygon_breaks_hit_every_polygon() {
        let (_, tg) = grid(2, 1);
        let ns = NoiseSpec::break_polygons(1.0, SplitPolicy::Singletons).unwrap();
        let plan = sample_plan(&tg, &ns, &mut rng_from_seed(3));
        assert_eq!(plan.polygon_breaks.len(), 12);
        assert!(plan
            .polygon_breaks
            .iter()
            .all(|b| b.blocks.iter().all(|blk| blk.len() == 1)));
        assert!(plan.broken_vertices.is_empty());
    }

    #[test]
    fn one_vs_rest_splits() {
        let (_, tg) = grid(3, 2);
        let ns = NoiseSpec::break_polygons(1.0, SplitPolicy::OneVsRest).unwrap();
        let plan = sample_plan(&tg, &ns, &mut rng_from_seed(11));
        for b in &plan.polygon_breaks {
            let size = tg.tessellations()[b.tessellation].polygons()[b.polygon].len();
            assert_eq!(b.blocks.len(), 2);
            assert_eq!(b.blocks[0].len(), 1);
            assert_eq!(b.blocks[1].len(), size - 1);
        }
        // the lone vertex is not always the first one
        let lone_first = plan
            .polygon_breaks
            .iter()
            .filter(|b| {
                b.blocks[0][0]
                    == tg.tessellations()[b.tessellation].polygons()[b.polygon].vertices()[0]
            })
            .count();
        assert!(lone_first < plan.polygon_breaks.len());
    }

    #[test]
    fn scope_restricts_polygon_breaking() {
        let (_, tg) = grid(2, 1);
        let ns = NoiseSpec::break_polygons(1.0, SplitPolicy::Singletons)
            .unwrap()
            .with_scope(NoiseScope::Only([0].into()))
            .unwrap();
        let plan = sample_plan(&tg, &ns, &mut rng_from_seed(3));
        assert_eq!(plan.polygon_breaks.len(), 4);
        assert!(plan.polygon_breaks.iter().all(|b| b.tessellation == 0));
    }

    #[test]
    fn vertex_break_rate_concentrates() {
        // 10⁴ plans over 16 vertices at p = ½: 1.6·10⁵ Bernoulli draws, so
        // the rate has standard error 1.25·10⁻³; ±0.02 is 16σ.
        let (_, tg) = grid(2, 1);
        let ns = NoiseSpec::break_vertices(0.5).unwrap();
        let mut rng = rng_from_seed(99);
        let broken: usize = (0..10_000)
            .map(|_| sample_plan(&tg, &ns, &mut rng).broken_vertices.len())
            .sum();
        let rate = broken as f64 / 160_000.0;
        assert!((rate - 0.5).abs() < 0.02, "rate {rate}");
    }

    #[test]
    fn inert_noise_matches_step_bitwise() {
        let (spec, tg) = grid(4, 1);
        let mut a = localized_clique_state(spec, 1, 2).unwrap();
        let mut b = a.clone();
        let mut rng = rng_from_seed(5);
        for _ in 0..20 {
            step(&tg, &mut a).unwrap();
            perturbed_step(&tg, &NoiseSpec::none(), &mut rng, &mut b).unwrap();
        }
        assert_eq!(a, b);
        let mut c = localized_clique_state(spec, 1, 2).unwrap();
        for _ in 0..20 {
            apply_plan(&tg, &BreakPlan::default(), &mut c).unwrap();
        }
        assert_eq!(a, c);
    }

    #[test]
    fn fast_path_matches_materialized_cover() {
        let (_, tg) = grid(3, 2);
        let specs = [
            NoiseSpec::break_vertices(0.2).unwrap(),
            NoiseSpec::break_polygons(0.3, SplitPolicy::Singletons).unwrap(),
            NoiseSpec::break_polygons(0.3, SplitPolicy::OneVsRest).unwrap(),
        ];
        let mut rng = rng_from_seed(8);
        for (i, ns) in specs.iter().enumerate() {
            for trial in 0..10 {
                let plan = sample_plan(&tg, ns, &mut rng);
                let s0 = random_state(tg.num_vertices(), 100 * i as u64 + trial);
                let mut fast = s0.clone();
                apply_plan(&tg, &plan, &mut fast).unwrap();
                let mut slow = s0.clone();
                step(&materialize_plan(&tg, &plan).unwrap(), &mut slow).unwrap();
                let diff = fast
                    .amplitudes()
                    .iter()
                    .zip(slow.amplitudes())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                assert!(diff < 1e-12, "{ns:?}: {diff}");
                assert!((fast.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn combined_plan_matches_materialized_cover() {
        let (_, tg) = grid(2, 2);
        let red3 = tg.tessellations()[1].polygons()[3].vertices().to_vec();
        let plan = BreakPlan {
            broken_vertices: vec![0, 9, red3[2]],
            polygon_breaks: vec![
                PolygonBreak {
                    tessellation: 0,
                    polygon: 0,
                    blocks: vec![vec![0, 1, 2], vec![3, 4, 5, 6, 7]],
                },
                PolygonBreak {
                    tessellation: 1,
                    polygon: 3,
                    blocks: vec![vec![red3[0]], red3[1..].to_vec()],
                },
            ],
        };
        let s0 = random_state(tg.num_vertices(), 77);
        let mut fast = s0.clone();
        apply_plan(&tg, &plan, &mut fast).unwrap();
        let mut slow = s0;
        step(&materialize_plan(&tg, &plan).unwrap(), &mut slow).unwrap();
        for (a, b) in fast.amplitudes().iter().zip(slow.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn broken_vertex_magnitudes_survive_a_two_tessellation_step() {
        let (_, tg) = grid(3, 1);
        let ns = NoiseSpec::break_vertices(0.3).unwrap();
        let mut rng = rng_from_seed(21);
        for trial in 0..20 {
            let plan = sample_plan(&tg, &ns, &mut rng);
            let s0 = random_state(tg.num_vertices(), trial);
            let mut s = s0.clone();
            apply_plan(&tg, &plan, &mut s).unwrap();
            for &v in &plan.broken_vertices {
                assert!((s.amplitudes()[v] - s0.amplitudes()[v]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn fully_broken_green_leaves_only_the_red_reflection() {
        let (_, tg) = grid(2, 1);
        let ns = NoiseSpec::break_polygons(1.0, SplitPolicy::Singletons)
            .unwrap()
            .with_scope(NoiseScope::Only([0].into()))
            .unwrap();
        let s0 = random_state(tg.num_vertices(), 4);
        let mut noisy = s0.clone();
        perturbed_step(&tg, &ns, &mut rng_from_seed(0), &mut noisy).unwrap();
        let mut red_only = s0;
        evolve::apply_tessellation(&tg.tessellations()[1], &mut red_only).unwrap();
        for (a, b) in noisy.amplitudes().iter().zip(red_only.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
