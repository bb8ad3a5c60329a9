use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sqw_core::analysis::{
    aggregate, classical_sigma_series, mean_distribution, run_spread, SpreadConfig,
};
use sqw_core::graph::io::{read_cover, read_graph};
use sqw_core::graph::{validate_cover, GridSpec};
use sqw_core::noise::{NoiseKind, NoiseScope, NoiseSpec, SplitPolicy};
use sqw_core::rng::derive_seed;
use sqw_core::search::{default_max_steps, peak_metrics, run_search, SearchConfig};

use crate::args::{Command, EvolveArgs, NoiseArg, NoiseArgs, RunArgs, SearchArgs, SweepArgs};
use crate::manifest::{fmt_f64, ExperimentManifest};
use crate::CliError;

/// Number of tessellations in a grid of cliques.
const GRID_TESSELLATIONS: usize = 2;

pub(crate) fn execute(command: &Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Validate { graph, cover } => cmd_validate(graph, cover, stdout),
        Command::Evolve(a) => cmd_evolve(a, stdout),
        Command::Search(a) => cmd_search(a, stdout),
        Command::Sweep(a) => cmd_sweep(a, stdout),
    }
}

fn input(e: impl ToString) -> CliError {
    CliError::Input(e.to_string())
}

fn internal(e: impl ToString) -> CliError {
    CliError::Internal(e.to_string())
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Destination chosen before any compute, so bad paths fail early.
enum Sink {
    File(PathBuf, fs::File),
    Stdout,
}

impl Sink {
    fn open(path: Option<&PathBuf>) -> Result<Self, CliError> {
        match path {
            None => Ok(Sink::Stdout),
            Some(p) => fs::File::create(p)
                .map(|f| Sink::File(p.clone(), f))
                .map_err(|source| CliError::Io {
                    path: p.clone(),
                    source,
                }),
        }
    }

    fn write(self, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
        match self {
            Sink::File(path, mut f) => f
                .write_all(text.as_bytes())
                .and_then(|_| f.flush())
                .map_err(|source| CliError::Io { path, source }),
            Sink::Stdout => stdout
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                }),
        }
    }
}

fn cmd_validate(graph: &Path, cover: &Path, stdout: &mut dyn Write) -> Result<(), CliError> {
    let g =
        read_graph(&read_text(graph)?).map_err(|e| input(format!("{}: {e}", graph.display())))?;
    let tg = read_cover(&read_text(cover)?, &g).map_err(|e| {
        let msg = format!("{}: {e}", cover.display());
        if e.is_cover_violation() {
            CliError::Validation(msg)
        } else {
            CliError::Input(msg)
        }
    })?;
    let report = validate_cover(&tg);
    writeln!(stdout, "{report}").map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })?;
    if report.is_valid() {
        Ok(())
    } else {
        Err(CliError::Validation(
            "cover is not a valid tessellation cover".into(),
        ))
    }
}

fn noise_spec(a: &NoiseArgs, p: f64) -> Result<NoiseSpec, CliError> {
    if a.noise == NoiseArg::None {
        if p != 0.0 {
            return Err(input("--p must be 0 with --noise none"));
        }
    } else if a.noise != NoiseArg::Polygons {
        if a.split.is_some() {
            return Err(input("--split only applies to --noise polygons"));
        }
        if a.scope.is_some() {
            return Err(input("--scope only applies to --noise polygons"));
        }
    }
    if let Some(NoiseScope::Only(set)) = &a.scope {
        if let Some(&t) = set.iter().find(|&&t| t >= GRID_TESSELLATIONS) {
            return Err(input(format!(
                "--scope index {t} out of range; the grid has {GRID_TESSELLATIONS} tessellations"
            )));
        }
    }
    let split = a.split.map_or(SplitPolicy::Singletons, |s| s.policy());
    let scope = a.scope.clone().unwrap_or(NoiseScope::All);
    NoiseSpec::new(a.noise.kind(), p, split, scope).map_err(input)
}

fn scope_name(scope: &NoiseScope) -> String {
    match scope {
        NoiseScope::All => "all".into(),
        NoiseScope::Only(set) => set
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(","),
    }
}

fn noise_params(m: ExperimentManifest, a: &NoiseArgs, ns: &NoiseSpec) -> ExperimentManifest {
    let m = m.param("noise", a.noise.name());
    if ns.kind() != NoiseKind::BreakPolygons {
        return m;
    }
    let split = a.split.map_or("singletons", |s| s.name());
    m.param("split", split)
        .param("scope", scope_name(ns.scope()))
}

fn check_runs(r: &RunArgs) -> Result<(), CliError> {
    if r.runs == 0 {
        return Err(input("--runs must be at least 1"));
    }
    Ok(())
}

fn thread_pool(r: &RunArgs) -> Result<rayon::ThreadPool, CliError> {
    if r.threads == Some(0) {
        return Err(input("--threads must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(r.threads.unwrap_or(0))
        .build()
        .map_err(internal)
}

fn child_seeds(master: u64, runs: usize) -> Vec<u64> {
    (0..runs as u64).map(|r| derive_seed(master, r)).collect()
}

fn check_factor(factor: f64) -> Result<(), CliError> {
    if !(factor.is_finite() && factor > 0.0) {
        return Err(input(format!(
            "--max-steps-factor must be positive, got {factor}"
        )));
    }
    Ok(())
}

fn cmd_evolve(a: &EvolveArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let spec = GridSpec::new(a.n, a.q).map_err(input)?;
    spec.check_clique(a.origin.0, a.origin.1).map_err(input)?;
    let noise = noise_spec(&a.noise, a.p)?;
    check_runs(&a.run)?;
    let pool = thread_pool(&a.run)?;
    let std_sink = Sink::open(a.out_std.as_ref())?;
    let dist_sink = a
        .out_dist
        .as_ref()
        .map(|p| Sink::open(Some(p)))
        .transpose()?;

    let cfg = SpreadConfig {
        spec,
        origin: a.origin,
        noise: noise.clone(),
        steps: a.steps,
        runs: a.run.runs,
        master_seed: a.run.seed,
    };
    let runs = pool.install(|| run_spread(&cfg)).map_err(internal)?;
    let sigmas: Vec<&[f64]> = runs.iter().map(|r| r.sigma.as_slice()).collect();
    let agg = aggregate(&sigmas).map_err(internal)?;
    let classical = classical_sigma_series(a.n, a.steps);

    let mut manifest = ExperimentManifest::new("evolve", a.run.seed)
        .param("n", a.n)
        .param("q", a.q)
        .param("steps", a.steps)
        .param("p", a.p);
    manifest = noise_params(manifest, &a.noise, &noise)
        .param("runs", a.run.runs)
        .param("origin", format!("{},{}", a.origin.0, a.origin.1));
    manifest.child_seeds = runs.iter().map(|r| r.run_seed).collect();

    let mut text = manifest.with_output("sigma").header();
    text.push_str("step,mean_sigma,ci_halfwidth,classical_sigma\n");
    for (t, ((m, c), k)) in agg
        .mean
        .iter()
        .zip(&agg.ci_halfwidth)
        .zip(&classical)
        .enumerate()
    {
        writeln!(text, "{t},{},{},{}", fmt_f64(*m), fmt_f64(*c), fmt_f64(*k)).unwrap();
    }
    std_sink.write(&text, stdout)?;

    if let Some(sink) = dist_sink {
        let finals: Vec<_> = runs.iter().map(|r| &r.final_distribution).collect();
        let mean = mean_distribution(&finals).map_err(internal)?;
        let mut text = manifest.with_output("distribution").header();
        for row in mean.rows() {
            let cells: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
        sink.write(&text, stdout)?;
    }
    Ok(())
}

/// Peak of the across-runs mean success curve for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub n: usize,
    pub q: usize,
    pub p: f64,
    pub runs: usize,
    pub max_steps: usize,
    pub t_peak: usize,
    pub p_peak: f64,
    /// Confidence half-width of the mean curve at `t_peak`.
    pub ci_halfwidth: f64,
    pub running_time: f64,
}

struct SearchOutcome {
    mean: Vec<f64>,
    ci: Vec<f64>,
    record: SweepRecord,
    seeds: Vec<u64>,
}

fn search_outcome(cfg: &SearchConfig, p: f64) -> Result<SearchOutcome, CliError> {
    let series = run_search(cfg).map_err(internal)?;
    let probs: Vec<&[f64]> = series.iter().map(|s| s.probabilities.as_slice()).collect();
    let agg = aggregate(&probs).map_err(internal)?;
    let summary = peak_metrics(&agg.mean).map_err(internal)?;
    Ok(SearchOutcome {
        record: SweepRecord {
            n: cfg.spec.n(),
            q: cfg.spec.q(),
            p,
            runs: cfg.runs,
            max_steps: cfg.max_steps,
            t_peak: summary.t_peak,
            p_peak: summary.p_peak,
            ci_halfwidth: agg.ci_halfwidth[summary.t_peak],
            running_time: summary.running_time,
        },
        seeds: series.iter().map(|s| s.run_seed).collect(),
        mean: agg.mean,
        ci: agg.ci_halfwidth,
    })
}

fn cmd_search(a: &SearchArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let spec = GridSpec::new(a.n, a.q).map_err(input)?;
    spec.check_clique(a.marked.0, a.marked.1).map_err(input)?;
    let noise = noise_spec(&a.noise, a.p)?;
    check_runs(&a.run)?;
    check_factor(a.max_steps_factor)?;
    let pool = thread_pool(&a.run)?;
    let sink = Sink::open(a.out.as_ref())?;

    let cfg = SearchConfig {
        spec,
        marked: a.marked,
        noise: noise.clone(),
        max_steps: default_max_steps(a.n, a.max_steps_factor),
        runs: a.run.runs,
        master_seed: a.run.seed,
    };
    let out = pool.install(|| search_outcome(&cfg, a.p))?;

    let mut manifest = ExperimentManifest::new("search", a.run.seed)
        .param("n", a.n)
        .param("q", a.q)
        .param("marked", format!("{},{}", a.marked.0, a.marked.1))
        .param("p", a.p);
    manifest = noise_params(manifest, &a.noise, &noise)
        .param("runs", a.run.runs)
        .param("max_steps_factor", a.max_steps_factor)
        .param("max_steps", cfg.max_steps);
    manifest.child_seeds = out.seeds;

    let mut text = manifest.header();
    text.push_str("step,mean_prob,ci_halfwidth\n");
    for (t, (m, c)) in out.mean.iter().zip(&out.ci).enumerate() {
        writeln!(text, "{t},{},{}", fmt_f64(*m), fmt_f64(*c)).unwrap();
    }
    let r = &out.record;
    text.push_str("# t_peak,p_peak,running_time\n");
    writeln!(
        text,
        "# {},{},{}",
        r.t_peak,
        fmt_f64(r.p_peak),
        fmt_f64(r.running_time)
    )
    .unwrap();
    sink.write(&text, stdout)
}

fn sorted_unique<T: Copy>(mut v: Vec<T>, cmp: impl Fn(&T, &T) -> std::cmp::Ordering) -> Vec<T> {
    v.sort_by(&cmp);
    v.dedup_by(|a, b| cmp(a, b).is_eq());
    v
}

/// One record per `(n, q, p)` in lexicographic order. Every configuration
/// uses the same master seed, so a singleton sweep matches `search`.
pub fn sweep_records(
    n_list: &[usize],
    q_list: &[usize],
    p_list: &[f64],
    noise: &NoiseArgs,
    runs: usize,
    master_seed: u64,
    max_steps_factor: f64,
) -> Result<Vec<SweepRecord>, CliError> {
    let (configs, ps) = sweep_plan(
        n_list,
        q_list,
        p_list,
        noise,
        runs,
        master_seed,
        max_steps_factor,
    )?;
    configs
        .iter()
        .zip(ps)
        .map(|(cfg, p)| search_outcome(cfg, p).map(|o| o.record))
        .collect()
}

fn sweep_plan(
    n_list: &[usize],
    q_list: &[usize],
    p_list: &[f64],
    noise: &NoiseArgs,
    runs: usize,
    master_seed: u64,
    max_steps_factor: f64,
) -> Result<(Vec<SearchConfig>, Vec<f64>), CliError> {
    if n_list.is_empty() || q_list.is_empty() || p_list.is_empty() {
        return Err(input("--n-list, --q-list and --p-list must be nonempty"));
    }
    if runs == 0 {
        return Err(input("--runs must be at least 1"));
    }
    check_factor(max_steps_factor)?;
    let ns = sorted_unique(n_list.to_vec(), usize::cmp);
    let qs = sorted_unique(q_list.to_vec(), usize::cmp);
    let ps = sorted_unique(p_list.to_vec(), f64::total_cmp);
    let mut configs = Vec::new();
    let mut config_ps = Vec::new();
    for &n in &ns {
        for &q in &qs {
            let spec = GridSpec::new(n, q).map_err(input)?;
            for &p in &ps {
                configs.push(SearchConfig {
                    spec,
                    marked: (0, 0),
                    noise: noise_spec(noise, p)?,
                    max_steps: default_max_steps(n, max_steps_factor),
                    runs,
                    master_seed,
                });
                config_ps.push(p);
            }
        }
    }
    Ok((configs, config_ps))
}

fn cmd_sweep(a: &SweepArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    check_runs(&a.run)?;
    sweep_plan(
        &a.n_list,
        &a.q_list,
        &a.p_list,
        &a.noise,
        a.run.runs,
        a.run.seed,
        a.max_steps_factor,
    )?;
    let pool = thread_pool(&a.run)?;
    let sink = Sink::open(a.out.as_ref())?;
    let records = pool.install(|| {
        sweep_records(
            &a.n_list,
            &a.q_list,
            &a.p_list,
            &a.noise,
            a.run.runs,
            a.run.seed,
            a.max_steps_factor,
        )
    })?;

    let join = |v: Vec<String>| v.join(",");
    let mut manifest = ExperimentManifest::new("sweep", a.run.seed)
        .param(
            "n_list",
            join(
                sorted_unique(a.n_list.clone(), usize::cmp)
                    .iter()
                    .map(usize::to_string)
                    .collect(),
            ),
        )
        .param(
            "q_list",
            join(
                sorted_unique(a.q_list.clone(), usize::cmp)
                    .iter()
                    .map(usize::to_string)
                    .collect(),
            ),
        )
        .param(
            "p_list",
            join(
                sorted_unique(a.p_list.clone(), f64::total_cmp)
                    .iter()
                    .map(f64::to_string)
                    .collect(),
            ),
        )
        .param("noise", a.noise.noise.name());
    if a.noise.noise == NoiseArg::Polygons {
        let split = a.noise.split.map_or("singletons", |s| s.name());
        let scope = scope_name(a.noise.scope.as_ref().unwrap_or(&NoiseScope::All));
        manifest = manifest.param("split", split).param("scope", scope);
    }
    manifest = manifest
        .param("runs", a.run.runs)
        .param("marked", "0,0")
        .param("max_steps_factor", a.max_steps_factor);
    manifest.child_seeds = child_seeds(a.run.seed, a.run.runs);

    let mut text = manifest.header();
    text.push_str("n,q,p,runs,max_steps,t_peak,p_peak,ci_halfwidth,running_time\n");
    for r in &records {
        writeln!(
            text,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            r.q,
            r.p,
            r.runs,
            r.max_steps,
            r.t_peak,
            fmt_f64(r.p_peak),
            fmt_f64(r.ci_halfwidth),
            fmt_f64(r.running_time)
        )
        .unwrap();
    }
    sink.write(&text, stdout)
}
