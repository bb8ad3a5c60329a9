use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sqw_core::noise::{NoiseKind, NoiseScope, SplitPolicy};

#[derive(Debug, Parser)]
#[command(
    name = "sqw",
    version,
    about = "Staggered quantum walks on grids of cliques"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a cover file is a valid tessellation cover of a graph file.
    Validate { graph: PathBuf, cover: PathBuf },
    /// Spread a walk from one clique and record its standard deviation.
    Evolve(EvolveArgs),
    /// Search for a marked clique starting from the uniform state.
    Search(SearchArgs),
    /// Search summaries over a grid of (n, q, p) values.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    None,
    Vertices,
    Polygons,
}

impl NoiseArg {
    pub fn kind(self) -> NoiseKind {
        match self {
            NoiseArg::None => NoiseKind::None,
            NoiseArg::Vertices => NoiseKind::BreakVertices,
            NoiseArg::Polygons => NoiseKind::BreakPolygons,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NoiseArg::None => "none",
            NoiseArg::Vertices => "vertices",
            NoiseArg::Polygons => "polygons",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitArg {
    Singletons,
    OneVsRest,
}

impl SplitArg {
    pub fn policy(self) -> SplitPolicy {
        match self {
            SplitArg::Singletons => SplitPolicy::Singletons,
            SplitArg::OneVsRest => SplitPolicy::OneVsRest,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SplitArg::Singletons => "singletons",
            SplitArg::OneVsRest => "one-vs-rest",
        }
    }
}

/// Noise flags shared by every simulating subcommand.
#[derive(Debug, Clone, Args)]
pub struct NoiseArgs {
    #[arg(long, value_enum, default_value_t = NoiseArg::None)]
    pub noise: NoiseArg,
    /// Split for broken polygons (polygon noise only).
    #[arg(long, value_enum)]
    pub split: Option<SplitArg>,
    /// Tessellations whose polygons may break: `all` or indices like `0,1`.
    #[arg(long, alias = "noise-scope", value_parser = parse_scope)]
    pub scope: Option<NoiseScope>,
}

/// Flags controlling repetition and parallelism.
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    /// Master seed; falls back to SQW_SEED, then 0.
    #[arg(long, env = "SQW_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to the available hardware.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Starting clique as `x,y`.
    #[arg(long, value_parser = parse_pair, default_value = "0,0")]
    pub origin: (usize, usize),
    /// Mean final position distribution, n rows by n columns.
    #[arg(long)]
    pub out_dist: Option<PathBuf>,
    /// Per-step σ series; written to stdout when absent.
    #[arg(long)]
    pub out_std: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    /// Marked clique as `x,y`.
    #[arg(long, value_parser = parse_pair, default_value = "0,0")]
    pub marked: (usize, usize),
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Step budget is ⌈factor·√(N ln N)⌉ with N = n².
    #[arg(long, default_value_t = 1.5)]
    pub max_steps_factor: f64,
    /// Success series; written to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub q_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub p_list: Vec<f64>,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 1.5)]
    pub max_steps_factor: f64,
    /// Summary records; written to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected x,y but got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn parse_scope(s: &str) -> Result<NoiseScope, String> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(NoiseScope::All);
    }
    let set = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<BTreeSet<_>, _>>()?;
    Ok(NoiseScope::Only(set))
}
