//! Benchmark sweep over graph sizes, with CSV and SVG output.
//!
//! A sweep generates `graphs_per_size` graphs for every size, runs each
//! requested method on each graph and records one [`BenchRow`] per run. GNN
//! and KL are repeated over `seeds_per_graph` run seeds; spectral bisection
//! is deterministic and gets a single row per graph. Runs are executed in
//! parallel but rows always come back in the same order: size, then method,
//! then graph seed, then run seed.

mod csv;
mod svg;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

pub use self::csv::{emit_csv, format_csv, parse_csv, read_csv, CSV_HEADER};
pub use self::svg::{emit_plot, render_svg};

use crate::baselines::{kernighan_lin, spectral_bisect, KlConfig, SpectralConfig};
use crate::error::{Error, Result};
use crate::gnn::ModelConfig;
use crate::graph::{cut_metrics, generate, Graph, Partition};
use crate::loss::LossConfig;
use crate::train::{gnn_partition, Decoder, TrainConfig};

/// Seeds tried per graph before the connected-ER generator gives up.
const CONNECT_ATTEMPTS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Gnn,
    Kl,
    Spectral,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Gnn, Method::Kl, Method::Spectral];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Gnn => "gnn",
            Method::Kl => "kl",
            Method::Spectral => "spectral",
        }
    }

    /// Whether repeated runs on one graph can differ.
    pub fn is_seeded(self) -> bool {
        !matches!(self, Method::Spectral)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gnn" => Ok(Method::Gnn),
            "kl" => Ok(Method::Kl),
            "spectral" => Ok(Method::Spectral),
            other => Err(Error::InvalidConfig(format!("unknown method `{other}`"))),
        }
    }
}

/// Settings for every partitioner, so one method can be run by name.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Solvers {
    pub model: ModelConfig,
    pub loss: LossConfig,
    pub train: TrainConfig,
    pub decoder: Decoder,
    pub kl: KlConfig,
    pub spectral: SpectralConfig,
}

impl Solvers {
    /// Runs `method` on `g`. `seed` drives model initialization for the GNN
    /// and the starting partition for KL; spectral ignores it.
    pub fn partition(&self, g: &Graph, method: Method, seed: u64) -> Result<Partition> {
        match method {
            Method::Gnn => {
                let train = TrainConfig { seed, ..self.train };
                Ok(gnn_partition(g, &self.model, &self.loss, &train, self.decoder)?.0)
            }
            Method::Kl => kernighan_lin(g, &KlConfig { seed, ..self.kl }),
            Method::Spectral => spectral_bisect(g, &self.spectral),
        }
    }
}

/// Random graph family used by a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GraphFamily {
    /// Connected Erdős–Rényi draws.
    Er { p: f64 },
    /// Two equal planted communities.
    Planted { p_in: f64, p_out: f64 },
    /// Two `K_{n/2}` joined by one edge (every graph is the same).
    TwoCliques,
}

impl Default for GraphFamily {
    fn default() -> Self {
        GraphFamily::Er { p: 0.1 }
    }
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphFamily::Er { p } => write!(f, "family=er p={p}"),
            GraphFamily::Planted { p_in, p_out } => write!(f, "family=planted p_in={p_in} p_out={p_out}"),
            GraphFamily::TwoCliques => write!(f, "family=two-cliques"),
        }
    }
}

impl GraphFamily {
    /// Graph number `index` of size `n`, with the seed that produced it.
    pub fn generate(&self, n: usize, index: usize) -> Result<(Graph, u64)> {
        let seed = ((n as u64) << 32) | ((index as u64) << 16);
        match *self {
            GraphFamily::Er { p } => generate::generate_connected_er(n, p, seed, CONNECT_ATTEMPTS),
            GraphFamily::Planted { p_in, p_out } => Ok((generate::generate_planted(n, p_in, p_out, seed)?.0, seed)),
            GraphFamily::TwoCliques => {
                if n < 2 || n % 2 == 1 {
                    return Err(Error::InvalidConfig(format!(
                        "two-cliques needs an even n >= 2, got {n}"
                    )));
                }
                Ok((generate::two_cliques_bridge(n / 2).0, index as u64))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub graphs_per_size: usize,
    /// Run seeds per graph for the seeded methods.
    pub seeds_per_graph: usize,
    pub family: GraphFamily,
    pub methods: Vec<Method>,
    pub solvers: Solvers,
    /// When false, `runtime_ms` is written as 0 so output is byte-stable.
    pub record_runtime: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: (1..=10).map(|k| 50 * k).collect(),
            graphs_per_size: 5,
            seeds_per_graph: 3,
            family: GraphFamily::default(),
            methods: Method::ALL.to_vec(),
            solvers: Solvers::default(),
            record_runtime: true,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::InvalidConfig("sizes must be nonempty".into()));
        }
        if self.graphs_per_size == 0 || self.seeds_per_graph == 0 {
            return Err(Error::InvalidConfig(
                "graphs_per_size and seeds_per_graph must be >= 1".into(),
            ));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("methods must be nonempty".into()));
        }
        let mut seen = self.methods.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.methods.len() {
            return Err(Error::InvalidConfig("methods contain duplicates".into()));
        }
        self.solvers.loss.validate()?;
        self.solvers.train.validate()?;
        Ok(())
    }
}

/// One run of one method on one graph.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub nodes: usize,
    pub method: Method,
    pub graph_seed: u64,
    pub run_seed: u64,
    /// Rounded to 2 decimals, as written to CSV.
    pub cut_percent: f64,
    /// Rounded to 2 decimals, as written to CSV.
    pub imbalance_percent: f64,
    pub cut_weight: f64,
    /// Rounded to 3 decimals.
    pub runtime_ms: f64,
    /// `ok`, or the error that stopped this run.
    pub status: String,
}

impl BenchRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Per-(size, method) means over the successful rows.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryCell {
    pub nodes: usize,
    pub method: Method,
    pub runs: usize,
    pub failures: usize,
    /// NaN when `runs == 0`.
    pub mean_cut_percent: f64,
    pub mean_imbalance_percent: f64,
    pub mean_cut_weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchResult {
    pub rows: Vec<BenchRow>,
    pub summary: Vec<SummaryCell>,
}

impl BenchResult {
    pub fn cell(&self, nodes: usize, method: Method) -> Option<&SummaryCell> {
        self.summary.iter().find(|c| c.nodes == nodes && c.method == method)
    }
}

fn round_to(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    (x * scale).round() / scale
}

fn run_cell(cfg: &BenchConfig, nodes: usize, graph: &Result<(Graph, u64)>, method: Method, run_seed: u64) -> BenchRow {
    let mut row = BenchRow {
        nodes,
        method,
        graph_seed: 0,
        run_seed,
        cut_percent: 0.0,
        imbalance_percent: 0.0,
        cut_weight: 0.0,
        runtime_ms: 0.0,
        status: "ok".into(),
    };
    let (g, graph_seed) = match graph {
        Ok((g, s)) => (g, *s),
        Err(e) => {
            row.status = format!("graph: {e}");
            return row;
        }
    };
    row.graph_seed = graph_seed;
    let start = Instant::now();
    let outcome = cfg
        .solvers
        .partition(g, method, run_seed)
        .and_then(|p| cut_metrics(g, &p));
    let elapsed = start.elapsed();
    match outcome {
        Ok(m) => {
            row.cut_percent = round_to(m.cut_percent, 2);
            row.imbalance_percent = round_to(m.imbalance_percent, 2);
            row.cut_weight = m.cut_weight;
            if cfg.record_runtime {
                row.runtime_ms = round_to(elapsed.as_secs_f64() * 1e3, 3);
            }
        }
        Err(e) => row.status = e.to_string(),
    }
    row
}

/// Means per (size, method) in row order, over rows with status `ok`.
pub fn summarize(rows: &[BenchRow]) -> Vec<SummaryCell> {
    let mut cells: Vec<SummaryCell> = Vec::new();
    for row in rows {
        let idx = match cells
            .iter()
            .position(|c| c.nodes == row.nodes && c.method == row.method)
        {
            Some(i) => i,
            None => {
                cells.push(SummaryCell {
                    nodes: row.nodes,
                    method: row.method,
                    runs: 0,
                    failures: 0,
                    mean_cut_percent: 0.0,
                    mean_imbalance_percent: 0.0,
                    mean_cut_weight: 0.0,
                });
                cells.len() - 1
            }
        };
        let cell = &mut cells[idx];
        if row.is_ok() {
            cell.runs += 1;
            cell.mean_cut_percent += row.cut_percent;
            cell.mean_imbalance_percent += row.imbalance_percent;
            cell.mean_cut_weight += row.cut_weight;
        } else {
            cell.failures += 1;
        }
    }
    for cell in &mut cells {
        let k = cell.runs as f64;
        cell.mean_cut_percent /= k;
        cell.mean_imbalance_percent /= k;
        cell.mean_cut_weight /= k;
    }
    cells
}

/// Runs the full sweep. Individual failures are recorded in the row status;
/// only an invalid configuration is an error.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchResult> {
    cfg.validate()?;
    let graph_keys: Vec<(usize, usize)> = cfg
        .sizes
        .iter()
        .flat_map(|&n| (0..cfg.graphs_per_size).map(move |i| (n, i)))
        .collect();
    let graphs: Vec<Result<(Graph, u64)>> = graph_keys.par_iter().map(|&(n, i)| cfg.family.generate(n, i)).collect();

    let mut cells = Vec::new();
    for (si, &n) in cfg.sizes.iter().enumerate() {
        for &method in &cfg.methods {
            let runs = if method.is_seeded() { cfg.seeds_per_graph } else { 1 };
            for gi in 0..cfg.graphs_per_size {
                for seed in 0..runs as u64 {
                    cells.push((n, si * cfg.graphs_per_size + gi, method, seed));
                }
            }
        }
    }
    let rows: Vec<BenchRow> = cells
        .par_iter()
        .map(|&(n, gidx, method, seed)| run_cell(cfg, n, &graphs[gidx], method, seed))
        .collect();
    let summary = summarize(&rows);
    Ok(BenchResult { rows, summary })
}
