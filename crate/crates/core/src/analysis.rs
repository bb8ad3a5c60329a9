//! Position distributions on the torus, their spread, the classical random
//! walk baseline and Monte-Carlo aggregation.

use rayon::prelude::*;
use thiserror::Error;

use crate::evolve::{EvolveError, WalkState, RENORM_INTERVAL};
use crate::graph::{make_grid_of_cliques, GraphError, GridSpec};
use crate::noise::{perturbed_step, NoiseError, NoiseSpec};
use crate::rng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("no series to aggregate")]
    Empty,
    #[error("series {index} has length {len}, expected {expected}")]
    RaggedSeries {
        index: usize,
        len: usize,
        expected: usize,
    },
    #[error("state of length {state} does not match a grid with {expected} vertices")]
    LengthMismatch { state: usize, expected: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Evolve(#[from] EvolveError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
}

/// Probability of each clique position `(x, y)`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionDistribution {
    n: usize,
    probs: Vec<f64>,
}

impl PositionDistribution {
    pub fn from_probabilities(n: usize, probs: Vec<f64>) -> Self {
        assert_eq!(probs.len(), n * n, "distribution must be n × n");
        Self { n, probs }
    }

    /// All mass on `(x, y)`.
    pub fn delta(n: usize, x: usize, y: usize) -> Self {
        let mut probs = vec![0.0; n * n];
        probs[x * n + y] = 1.0;
        Self { n, probs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.probs[x * self.n + y]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.probs.chunks(self.n)
    }
}

/// `P(x, y) = Σ_k |ψ(x, y, k)|²`.
pub fn position_distribution(
    s: &WalkState,
    spec: GridSpec,
) -> Result<PositionDistribution, AnalysisError> {
    if s.len() != spec.num_vertices() {
        return Err(AnalysisError::LengthMismatch {
            state: s.len(),
            expected: spec.num_vertices(),
        });
    }
    let probs = s
        .amplitudes()
        .chunks(spec.clique_size())
        .map(|cell| cell.iter().map(|a| a.norm_sqr()).sum())
        .collect();
    Ok(PositionDistribution { n: spec.n(), probs })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementStats {
    pub mean_dx: f64,
    pub mean_dy: f64,
    pub sigma: f64,
}

/// Minimal-image displacement of `x` from `origin` on a ring of size `n`.
fn minimal_image(x: usize, origin: usize, n: usize) -> i64 {
    let half = (n / 2) as i64;
    let n = n as i64;
    ((x as i64 - origin as i64 + half).rem_euclid(n)) - half
}

/// Mean displacement and `σ = √(E[dx² + dy²] − E[dx]² − E[dy]²)` using
/// minimal-image displacements from `origin`.
pub fn torus_displacement_stats(
    d: &PositionDistribution,
    origin: (usize, usize),
) -> DisplacementStats {
    let n = d.n;
    let (mut mx, mut my, mut m2) = (0.0, 0.0, 0.0);
    for x in 0..n {
        let dx = minimal_image(x, origin.0, n) as f64;
        for y in 0..n {
            let p = d.probs[x * n + y];
            let dy = minimal_image(y, origin.1, n) as f64;
            mx += p * dx;
            my += p * dy;
            m2 += p * (dx * dx + dy * dy);
        }
    }
    let var = (m2 - mx * mx - my * my).max(0.0);
    DisplacementStats {
        mean_dx: mx,
        mean_dy: my,
        sigma: var.sqrt(),
    }
}

/// Exact distribution of the simple random walk on the `n × n` torus,
/// started at `(0, 0)`, stepping to each of the four neighbors with
/// probability ¼.
#[derive(Debug, Clone)]
pub struct ClassicalWalk {
    dist: PositionDistribution,
    scratch: Vec<f64>,
}

impl ClassicalWalk {
    pub fn new(n: usize) -> Self {
        Self {
            dist: PositionDistribution::delta(n, 0, 0),
            scratch: vec![0.0; n * n],
        }
    }

    pub fn step(&mut self) {
        let n = self.dist.n;
        for x in 0..n {
            let (xm, xp) = ((x + n - 1) % n, (x + 1) % n);
            for y in 0..n {
                let (ym, yp) = ((y + n - 1) % n, (y + 1) % n);
                let p = &self.dist.probs;
                self.scratch[x * n + y] =
                    0.25 * (p[xm * n + y] + p[xp * n + y] + p[x * n + ym] + p[x * n + yp]);
            }
        }
        std::mem::swap(&mut self.dist.probs, &mut self.scratch);
    }

    pub fn distribution(&self) -> &PositionDistribution {
        &self.dist
    }
}

pub fn classical_distribution(n: usize, t: usize) -> PositionDistribution {
    let mut walk = ClassicalWalk::new(n);
    for _ in 0..t {
        walk.step();
    }
    walk.dist
}

/// σ of the classical walk for `t = 0..=steps`.
pub fn classical_sigma_series(n: usize, steps: usize) -> Vec<f64> {
    let mut walk = ClassicalWalk::new(n);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(torus_displacement_stats(walk.distribution(), (0, 0)).sigma);
    for _ in 0..steps {
        walk.step();
        out.push(torus_displacement_stats(walk.distribution(), (0, 0)).sigma);
    }
    out
}

/// Across-runs mean with a 95% normal-approximation confidence half-width.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateSeries {
    pub mean: Vec<f64>,
    pub ci_halfwidth: Vec<f64>,
    pub runs: usize,
}

/// Mean and `1.96·sd/√runs` per index.
///
/// Sums run in input order. The mean is computed as an offset from the first
/// series, so identical inputs reproduce their value exactly.
pub fn aggregate<S: AsRef<[f64]>>(series: &[S]) -> Result<AggregateSeries, AnalysisError> {
    let first = series.first().ok_or(AnalysisError::Empty)?.as_ref();
    let len = first.len();
    for (index, s) in series.iter().enumerate() {
        if s.as_ref().len() != len {
            return Err(AnalysisError::RaggedSeries {
                index,
                len: s.as_ref().len(),
                expected: len,
            });
        }
    }
    let runs = series.len();
    let r = runs as f64;
    let mut mean = Vec::with_capacity(len);
    let mut ci_halfwidth = Vec::with_capacity(len);
    for (i, &base) in first.iter().enumerate() {
        let offset: f64 = series.iter().map(|s| s.as_ref()[i] - base).sum();
        let m = base + offset / r;
        let sd = if runs > 1 {
            let ss: f64 = series.iter().map(|s| (s.as_ref()[i] - m).powi(2)).sum();
            (ss / (r - 1.0)).sqrt()
        } else {
            0.0
        };
        mean.push(m);
        ci_halfwidth.push(1.96 * sd / r.sqrt());
    }
    Ok(AggregateSeries {
        mean,
        ci_halfwidth,
        runs,
    })
}

type PointMap = fn(i64, i64) -> (i64, i64);

/// Largest `|P(g·(x, y)) − P(x, y)|` over the eight symmetries of the square
/// centred at `origin`.
pub fn check_dihedral_symmetry(d: &PositionDistribution, origin: (usize, usize)) -> f64 {
    let n = d.n as i64;
    let (ox, oy) = (origin.0 as i64, origin.1 as i64);
    let maps: [PointMap; 8] = [
        |a, b| (a, b),
        |a, b| (-a, b),
        |a, b| (a, -b),
        |a, b| (-a, -b),
        |a, b| (b, a),
        |a, b| (-b, a),
        |a, b| (b, -a),
        |a, b| (-b, -a),
    ];
    let mut worst: f64 = 0.0;
    for x in 0..n {
        for y in 0..n {
            let p = d.probs[(x * n + y) as usize];
            for g in &maps[1..] {
                let (a, b) = g(x - ox, y - oy);
                let gx = (ox + a).rem_euclid(n);
                let gy = (oy + b).rem_euclid(n);
                worst = worst.max((d.probs[(gx * n + gy) as usize] - p).abs());
            }
        }
    }
    worst
}

/// A spreading experiment: the walk starts on one clique and its σ is
/// recorded after every step.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadConfig {
    pub spec: GridSpec,
    pub origin: (usize, usize),
    pub noise: NoiseSpec,
    pub steps: usize,
    pub runs: usize,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpreadRun {
    pub run_seed: u64,
    /// σ for `t = 0..=steps`.
    pub sigma: Vec<f64>,
    pub final_distribution: PositionDistribution,
}

fn spread_run(
    cfg: &SpreadConfig,
    tg: &crate::graph::TessellatedGraph,
    run_seed: u64,
) -> Result<SpreadRun, AnalysisError> {
    let mut rng = rng::rng_from_seed(run_seed);
    let mut state = WalkState::localized_clique(cfg.spec, cfg.origin.0, cfg.origin.1)?;
    let mut sigma = Vec::with_capacity(cfg.steps + 1);
    let mut dist = position_distribution(&state, cfg.spec)?;
    sigma.push(torus_displacement_stats(&dist, cfg.origin).sigma);
    for t in 1..=cfg.steps {
        perturbed_step(tg, &cfg.noise, &mut rng, &mut state)?;
        if t % RENORM_INTERVAL == 0 {
            state.check_drift()?;
        }
        dist = position_distribution(&state, cfg.spec)?;
        sigma.push(torus_displacement_stats(&dist, cfg.origin).sigma);
    }
    Ok(SpreadRun {
        run_seed,
        sigma,
        final_distribution: dist,
    })
}

/// Runs `cfg.runs` independent trajectories on the current rayon pool,
/// returned in run order. Inert noise is simulated once.
pub fn run_spread(cfg: &SpreadConfig) -> Result<Vec<SpreadRun>, AnalysisError> {
    if cfg.runs == 0 {
        return Err(AnalysisError::Empty);
    }
    cfg.spec.check_clique(cfg.origin.0, cfg.origin.1)?;
    let tg = make_grid_of_cliques(cfg.spec);
    let seeds: Vec<u64> = (0..cfg.runs as u64)
        .map(|r| rng::derive_seed(cfg.master_seed, r))
        .collect();
    if cfg.noise.is_inert() {
        let base = spread_run(cfg, &tg, seeds[0])?;
        return Ok(seeds
            .into_iter()
            .map(|run_seed| SpreadRun {
                run_seed,
                ..base.clone()
            })
            .collect());
    }
    seeds
        .into_par_iter()
        .map(|seed| spread_run(cfg, &tg, seed))
        .collect()
}

/// Cell-wise mean of several distributions.
pub fn mean_distribution(
    dists: &[&PositionDistribution],
) -> Result<PositionDistribution, AnalysisError> {
    let n = dists.first().ok_or(AnalysisError::Empty)?.n;
    let rows: Vec<&[f64]> = dists.iter().map(|d| d.probs.as_slice()).collect();
    let agg = aggregate(&rows)?;
    Ok(PositionDistribution { n, probs: agg.mean })
}
