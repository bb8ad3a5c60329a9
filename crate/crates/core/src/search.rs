//! Spatial search with partial tessellations on grids of `4q`-cliques.
//!
//! Removing the green polygon of the marked clique makes the green
//! reflection act as `-I` on its vertices. Starting from the uniform
//! superposition, the success probability (mass on the marked clique) rises
//! to a peak after `O(√(N log N))` steps.

use rayon::prelude::*;
use thiserror::Error;

use crate::evolve::{EvolveError, WalkState, RENORM_INTERVAL};
use crate::graph::{GraphError, GridSpec, TessellatedGraph, Tessellation};
use crate::noise::{perturbed_step, NoiseError, NoiseSpec};
use crate::rng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("max_steps must be at least 1")]
    NoSteps,
    #[error("runs must be at least 1")]
    NoRuns,
    #[error("no green polygon contains clique ({0}, {1})")]
    MarkedPolygonMissing(usize, usize),
    #[error("success series is empty")]
    EmptySeries,
    #[error("success series is zero everywhere; running time undefined")]
    ZeroSeries,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Evolve(#[from] EvolveError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
}

/// Default step budget `⌈factor·√(N ln N)⌉` with `N = n²`.
pub fn default_max_steps(n: usize, factor: f64) -> usize {
    let big_n = (n * n) as f64;
    ((factor * (big_n * big_n.ln()).sqrt()).ceil() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub spec: GridSpec,
    pub marked: (usize, usize),
    pub noise: NoiseSpec,
    pub max_steps: usize,
    pub runs: usize,
    pub master_seed: u64,
}

impl SearchConfig {
    /// Noiseless search for clique `(0, 0)` with the default step budget.
    pub fn new(spec: GridSpec) -> Self {
        Self {
            spec,
            marked: (0, 0),
            noise: NoiseSpec::none(),
            max_steps: default_max_steps(spec.n(), 1.5),
            runs: 1,
            master_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.max_steps == 0 {
            return Err(SearchError::NoSteps);
        }
        if self.runs == 0 {
            return Err(SearchError::NoRuns);
        }
        self.spec.check_clique(self.marked.0, self.marked.1)?;
        Ok(())
    }
}

/// Success probability after each step; entry 0 is the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct SuccessSeries {
    pub probabilities: Vec<f64>,
    pub run_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub t_peak: usize,
    pub p_peak: f64,
    pub running_time: f64,
}

/// Deletes the green polygon of clique `marked`, so the green reflection
/// acts as `-I` there. The red tessellation is unchanged.
pub fn partial_cover(
    tg: &TessellatedGraph,
    spec: GridSpec,
    marked: (usize, usize),
) -> Result<TessellatedGraph, SearchError> {
    let (x, y) = marked;
    spec.check_clique(x, y)?;
    let green = tg
        .tessellations()
        .first()
        .ok_or(SearchError::MarkedPolygonMissing(x, y))?;
    let target = spec.vertex_index(x, y, 0);
    let idx = green
        .polygon_of(target)
        .ok_or(SearchError::MarkedPolygonMissing(x, y))?;
    let mut polygons = green.polygons().to_vec();
    polygons.remove(idx);
    let mut tessellations = tg.tessellations().to_vec();
    tessellations[0] = Tessellation::new(polygons)?;
    Ok(TessellatedGraph::new(tg.graph().clone(), tessellations)?.into_perturbed())
}

/// Probability mass on the `4q` vertices of clique `marked`.
pub fn success_probability(s: &WalkState, spec: GridSpec, marked: (usize, usize)) -> f64 {
    s.amplitudes()[spec.clique_range(marked.0, marked.1)]
        .iter()
        .map(|a| a.norm_sqr())
        .sum()
}

fn evolve_series(
    cover: &TessellatedGraph,
    cfg: &SearchConfig,
    run_seed: u64,
) -> Result<SuccessSeries, SearchError> {
    let mut rng = rng::rng_from_seed(run_seed);
    let mut state = WalkState::uniform(cfg.spec.num_vertices())?;
    let mut probabilities = Vec::with_capacity(cfg.max_steps + 1);
    probabilities.push(success_probability(&state, cfg.spec, cfg.marked));
    for t in 1..=cfg.max_steps {
        perturbed_step(cover, &cfg.noise, &mut rng, &mut state)?;
        if t % RENORM_INTERVAL == 0 {
            state.check_drift()?;
        }
        probabilities.push(success_probability(&state, cfg.spec, cfg.marked));
    }
    Ok(SuccessSeries {
        probabilities,
        run_seed,
    })
}

/// Runs `cfg.runs` independent searches from the uniform state.
///
/// Run `r` uses seed `derive_seed(master_seed, r)`. Runs execute on the
/// current rayon pool and come back in run order. Inert noise is simulated
/// once and shared, since every run would be identical.
pub fn run_search(cfg: &SearchConfig) -> Result<Vec<SuccessSeries>, SearchError> {
    cfg.validate()?;
    let pristine = crate::graph::make_grid_of_cliques(cfg.spec);
    let cover = partial_cover(&pristine, cfg.spec, cfg.marked)?;
    let seeds: Vec<u64> = (0..cfg.runs as u64)
        .map(|r| rng::derive_seed(cfg.master_seed, r))
        .collect();

    if cfg.noise.is_inert() {
        let base = evolve_series(&cover, cfg, seeds[0])?;
        return Ok(seeds
            .into_iter()
            .map(|run_seed| SuccessSeries {
                probabilities: base.probabilities.clone(),
                run_seed,
            })
            .collect());
    }
    seeds
        .into_par_iter()
        .map(|seed| evolve_series(&cover, cfg, seed))
        .collect()
}

/// Relative gap below which two success probabilities count as tied.
pub const PEAK_TIE_TOL: f64 = 1e-12;

/// Peak of a (mean) success series. Values within [`PEAK_TIE_TOL`] of the
/// maximum are ties and go to the earliest step, so rounding cannot move the
/// peak between symmetric steps.
pub fn peak_metrics(series: &[f64]) -> Result<RunSummary, SearchError> {
    let max = series
        .iter()
        .copied()
        .fold(None, |m: Option<f64>, p| Some(m.map_or(p, |m| m.max(p))))
        .ok_or(SearchError::EmptySeries)?;
    if max <= 0.0 {
        return Err(SearchError::ZeroSeries);
    }
    let t_peak = series
        .iter()
        .position(|&p| p >= max * (1.0 - PEAK_TIE_TOL))
        .expect("the maximum is in the series");
    let p_peak = series[t_peak];
    Ok(RunSummary {
        t_peak,
        p_peak,
        running_time: t_peak as f64 / p_peak.sqrt(),
    })
}
