//! `gpart`: graph bisection with a GNN partitioner, Kernighan-Lin and
//! spectral bisection, plus a benchmark sweep.
//!
//! Exit codes: 0 success, 1 usage error, 2 input error, 3 runtime failure.

mod config;

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};

use gpart_core::baselines::SplitRule;
use gpart_core::bench::{self, BenchConfig, GraphFamily, Method, Solvers};
use gpart_core::graph::io::{load_graph, read_partition, save_graph, write_partition, Format};
use gpart_core::graph::{cut_metrics, generate, Graph, Metrics};
use gpart_core::loss::LossMode;
use gpart_core::train::{gnn_partition, Decoder};
use gpart_core::Error as CoreError;

#[derive(Debug)]
enum Failure {
    Usage(anyhow::Error),
    Input(anyhow::Error),
    Runtime(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Usage(e) | Failure::Input(e) | Failure::Runtime(e) => e,
        }
    }
}

fn usage(msg: impl Display) -> Failure {
    Failure::Usage(anyhow!("{msg}"))
}

/// Sorts library errors into the exit-code classes.
fn classify(e: CoreError) -> Failure {
    match e {
        CoreError::InvalidConfig(_) => Failure::Usage(e.into()),
        CoreError::Parse { .. }
        | CoreError::SelfLoop { .. }
        | CoreError::IndexOutOfRange { .. }
        | CoreError::DuplicateEdge { .. }
        | CoreError::InvalidWeight { .. }
        | CoreError::LengthMismatch { .. }
        | CoreError::EmptyEdgeSet
        | CoreError::Disconnected
        | CoreError::Io { .. } => Failure::Input(e.into()),
        _ => Failure::Runtime(e.into()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    Er,
    Planted,
    TwoCliques,
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "er" => Ok(Family::Er),
            "planted" => Ok(Family::Planted),
            "two-cliques" => Ok(Family::TwoCliques),
            other => Err(format!("unknown family `{other}` (er, planted, two-cliques)")),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "gpart", version, about = "Graph bisection: GNN, Kernighan-Lin and spectral")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a random graph (and its planted split, if any) to --out.
    Generate {
        /// Node count.
        #[arg(long)]
        nodes: usize,
    },
    /// Partition one graph and print its metrics.
    Partition { graph: PathBuf },
    /// Run the size sweep and write bench.csv and bench.svg to --out.
    Bench,
    /// Print the metrics of an existing partition file.
    Eval { graph: PathBuf, partition: PathBuf },
}

/// Settings shared by the subcommands. Each can also be given in the
/// `--config` file under its long name; flags win over the file.
#[derive(clap::Args, Debug, Default)]
struct Options {
    /// Flat `key = value` settings file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Partitioner; bench accepts a comma-separated list.
    #[arg(long, global = true, value_delimiter = ',')]
    method: Option<Vec<Method>>,
    /// Loss variant: literal or corrected.
    #[arg(long, global = true)]
    mode: Option<LossMode>,
    /// Sharpness of the tanh terms [default: 2].
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Width of the centrality term [default: 0.6].
    #[arg(long, global = true)]
    xi: Option<f64>,
    /// Markov confidence level in [0, 1) [default: 0].
    #[arg(long, global = true)]
    z: Option<f64>,
    /// Training epochs [default: 500].
    #[arg(long, global = true)]
    epochs: Option<usize>,
    /// Adam learning rate [default: 0.01].
    #[arg(long, global = true)]
    lr: Option<f64>,
    /// GCN hidden width [default: 16].
    #[arg(long, global = true)]
    hidden: Option<usize>,
    /// Learned node embedding width [default: 16].
    #[arg(long = "embed-dim", global = true)]
    embed_dim: Option<usize>,
    /// Graph seed for generate; model/KL seed for partition.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Graph family: er, planted or two-cliques.
    #[arg(long, global = true)]
    family: Option<Family>,
    /// Edge probability of the er family [default: 0.1].
    #[arg(long = "er-p", global = true)]
    er_p: Option<f64>,
    /// Within-community probability of the planted family [default: 0.5].
    #[arg(long = "p-in", global = true)]
    p_in: Option<f64>,
    /// Cross-community probability of the planted family [default: 0.05].
    #[arg(long = "p-out", global = true)]
    p_out: Option<f64>,
    /// Comma-separated node counts [default: 50,100,...,500].
    #[arg(long, global = true, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Graphs per size [default: 5].
    #[arg(long = "graphs-per-size", global = true)]
    graphs_per_size: Option<usize>,
    /// Runs per graph for gnn and kl [default: 3].
    #[arg(long = "seeds-per-graph", global = true)]
    seeds_per_graph: Option<usize>,
    /// Spectral split: sign or median.
    #[arg(long = "split-rule", global = true)]
    split_rule: Option<SplitRule>,
    /// GNN decoder: argmax or balanced.
    #[arg(long, global = true)]
    decoder: Option<Decoder>,
    /// Graph file format: edge-list or metis.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write runtime_ms as 0 so repeated sweeps give identical CSV bytes.
    #[arg(long = "no-timing", global = true)]
    no_timing: bool,
}

fn fill<T: FromStr>(slot: &mut Option<T>, e: &config::Entry) -> Result<(), Failure>
where
    T::Err: Display,
{
    if slot.is_none() {
        let v = e
            .value
            .parse()
            .map_err(|err| usage(format!("config line {}: `{}`: {err}", e.line, e.key)))?;
        *slot = Some(v);
    }
    Ok(())
}

fn fill_list<T: FromStr>(slot: &mut Option<Vec<T>>, e: &config::Entry) -> Result<(), Failure>
where
    T::Err: Display,
{
    if slot.is_none() {
        let v = e
            .value
            .split(',')
            .map(|s| s.trim().parse())
            .collect::<Result<Vec<T>, _>>()
            .map_err(|err| usage(format!("config line {}: `{}`: {err}", e.line, e.key)))?;
        *slot = Some(v);
    }
    Ok(())
}

impl Options {
    /// Fills every unset option from the config file, if one was given.
    fn merge_config(&mut self) -> Result<(), Failure> {
        let Some(path) = self.config.clone() else {
            return Ok(());
        };
        let text = fs::read_to_string(&path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(Failure::Input)?;
        let entries = config::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        for e in &entries {
            match e.key.as_str() {
                "method" => fill_list(&mut self.method, e)?,
                "mode" => fill(&mut self.mode, e)?,
                "alpha" => fill(&mut self.alpha, e)?,
                "xi" => fill(&mut self.xi, e)?,
                "z" => fill(&mut self.z, e)?,
                "epochs" => fill(&mut self.epochs, e)?,
                "lr" => fill(&mut self.lr, e)?,
                "hidden" => fill(&mut self.hidden, e)?,
                "embed-dim" => fill(&mut self.embed_dim, e)?,
                "seed" => fill(&mut self.seed, e)?,
                "family" => fill(&mut self.family, e)?,
                "er-p" => fill(&mut self.er_p, e)?,
                "p-in" => fill(&mut self.p_in, e)?,
                "p-out" => fill(&mut self.p_out, e)?,
                "sizes" => fill_list(&mut self.sizes, e)?,
                "graphs-per-size" => fill(&mut self.graphs_per_size, e)?,
                "seeds-per-graph" => fill(&mut self.seeds_per_graph, e)?,
                "split-rule" => fill(&mut self.split_rule, e)?,
                "decoder" => fill(&mut self.decoder, e)?,
                "format" => fill(&mut self.format, e)?,
                "out" => fill(&mut self.out, e)?,
                "no-timing" => {
                    let mut v: Option<bool> = None;
                    fill(&mut v, e)?;
                    self.no_timing |= v.unwrap_or(false);
                }
                other => return Err(usage(format!("config line {}: unknown key `{other}`", e.line))),
            }
        }
        Ok(())
    }

    fn solvers(&self) -> Result<Solvers, Failure> {
        let mut s = Solvers::default();
        if let Some(v) = self.mode {
            s.loss.mode = v;
        }
        if let Some(v) = self.alpha {
            s.loss.alpha = v;
        }
        if let Some(v) = self.xi {
            s.loss.xi = v;
        }
        if let Some(v) = self.z {
            s.loss.z = v;
        }
        if let Some(v) = self.epochs {
            s.train.epochs = v;
        }
        if let Some(v) = self.lr {
            s.train.adam.learning_rate = v;
        }
        if let Some(v) = self.hidden {
            s.model.hidden_dim = v;
        }
        if let Some(v) = self.embed_dim {
            s.model.embed_dim = v;
        }
        if let Some(v) = self.seed {
            s.train.seed = v;
            s.kl.seed = v;
        }
        if let Some(v) = self.split_rule {
            s.spectral.split_rule = v;
        }
        if let Some(v) = self.decoder {
            s.decoder = v;
        }
        if s.model.hidden_dim == 0 || s.model.embed_dim == 0 {
            return Err(usage("--hidden and --embed-dim must be >= 1"));
        }
        s.loss.validate().map_err(classify)?;
        s.train.validate().map_err(classify)?;
        Ok(s)
    }

    fn graph_family(&self) -> GraphFamily {
        match self.family.unwrap_or(Family::Er) {
            Family::Er => GraphFamily::Er {
                p: self.er_p.unwrap_or(0.1),
            },
            Family::Planted => GraphFamily::Planted {
                p_in: self.p_in.unwrap_or(0.5),
                p_out: self.p_out.unwrap_or(0.05),
            },
            Family::TwoCliques => GraphFamily::TwoCliques,
        }
    }

    fn single_method(&self) -> Result<Method, Failure> {
        match self.method.as_deref() {
            None => Ok(Method::Gnn),
            Some([m]) => Ok(*m),
            Some(_) => Err(usage("partition takes exactly one --method")),
        }
    }

    fn out_dir(&self, default: &str) -> Result<PathBuf, Failure> {
        let dir = self.out.clone().unwrap_or_else(|| PathBuf::from(default));
        fs::create_dir_all(&dir)
            .with_context(|| format!("creating {}", dir.display()))
            .map_err(Failure::Runtime)?;
        Ok(dir)
    }
}

fn print_metrics(g: &Graph, m: &Metrics) {
    println!("nodes={}", g.n());
    println!("edges={}", g.edge_count());
    println!("cut_weight={}", m.cut_weight);
    println!("cut_edges={}", m.cut_edges);
    println!("cut_percent={:.2}", m.cut_percent);
    println!("imbalance_percent={:.2}", m.imbalance_percent);
}

fn load(path: &Path, opts: &Options) -> Result<Graph, Failure> {
    load_graph(path, opts.format.unwrap_or_default()).map_err(classify)
}

fn cmd_generate(opts: &Options, nodes: usize) -> Result<(), Failure> {
    let seed = opts.seed.unwrap_or(0);
    let format = opts.format.unwrap_or_default();
    let (g, planted, seed_used) = match opts.family.unwrap_or(Family::Er) {
        Family::Er => {
            let (g, s) =
                generate::generate_connected_er(nodes, opts.er_p.unwrap_or(0.1), seed, 1000).map_err(classify)?;
            (g, None, s)
        }
        Family::Planted => {
            let (g, p) = generate::generate_planted(nodes, opts.p_in.unwrap_or(0.5), opts.p_out.unwrap_or(0.05), seed)
                .map_err(classify)?;
            (g, Some(p), seed)
        }
        Family::TwoCliques => {
            if nodes < 2 || nodes % 2 == 1 {
                return Err(usage("two-cliques needs an even --nodes >= 2"));
            }
            let (g, p) = generate::two_cliques_bridge(nodes / 2);
            (g, Some(p), seed)
        }
    };
    let dir = opts.out_dir(".")?;
    let name = match format {
        Format::EdgeList => "graph.txt",
        Format::Metis => "graph.metis",
    };
    let path = dir.join(name);
    save_graph(&g, &path, format).map_err(|e| Failure::Runtime(e.into()))?;
    println!("graph={}", path.display());
    if let Some(p) = planted {
        let ppath = dir.join("planted.txt");
        write_partition(&p, &ppath).map_err(|e| Failure::Runtime(e.into()))?;
        println!("planted={}", ppath.display());
        println!("planted_cut_weight={}", g.cut_weight(p.labels()));
    }
    println!("nodes={}", g.n());
    println!("edges={}", g.edge_count());
    println!("seed={seed_used}");
    Ok(())
}

fn cmd_partition(opts: &Options, graph: &Path) -> Result<(), Failure> {
    let method = opts.single_method()?;
    let solvers = opts.solvers()?;
    let g = load(graph, opts)?;
    let seed = opts.seed.unwrap_or(0);
    let start = Instant::now();
    let (part, report) = match method {
        Method::Gnn => {
            let train = gpart_core::train::TrainConfig { seed, ..solvers.train };
            let (p, r) = gnn_partition(&g, &solvers.model, &solvers.loss, &train, solvers.decoder).map_err(classify)?;
            (p, Some(r))
        }
        other => (solvers.partition(&g, other, seed).map_err(classify)?, None),
    };
    let elapsed = start.elapsed();
    let m = cut_metrics(&g, &part).map_err(classify)?;
    println!("method={method}");
    print_metrics(&g, &m);
    println!("runtime_ms={:.3}", elapsed.as_secs_f64() * 1e3);
    if let Some(r) = report {
        println!("best_epoch={}", r.best_epoch);
        println!("best_loss={}", r.best_loss);
        println!("expected_cut={}", r.expected_cut);
        println!("markov_bound={}", r.markov_bound);
    }
    if opts.out.is_some() {
        let path = opts.out_dir(".")?.join("partition.txt");
        write_partition(&part, &path).map_err(|e| Failure::Runtime(e.into()))?;
        println!("partition={}", path.display());
    }
    Ok(())
}

fn cmd_bench(opts: &Options) -> Result<(), Failure> {
    let defaults = BenchConfig::default();
    let cfg = BenchConfig {
        sizes: opts.sizes.clone().unwrap_or(defaults.sizes),
        graphs_per_size: opts.graphs_per_size.unwrap_or(defaults.graphs_per_size),
        seeds_per_graph: opts.seeds_per_graph.unwrap_or(defaults.seeds_per_graph),
        family: opts.graph_family(),
        methods: opts.method.clone().unwrap_or(defaults.methods),
        solvers: opts.solvers()?,
        record_runtime: !opts.no_timing,
    };
    cfg.validate().map_err(classify)?;
    let dir = opts.out_dir("bench-results")?;
    let result = bench::run_benchmark(&cfg).map_err(classify)?;
    let csv_path = dir.join("bench.csv");
    let svg_path = dir.join("bench.svg");
    bench::emit_csv(&cfg, &result.rows, &csv_path).map_err(|e| Failure::Runtime(e.into()))?;
    bench::emit_plot(&result.summary, &svg_path).map_err(|e| Failure::Runtime(e.into()))?;

    println!(
        "{:>6} {:<9} {:>5} {:>12} {:>18}",
        "nodes", "method", "runs", "cut_percent", "imbalance_percent"
    );
    for c in &result.summary {
        println!(
            "{:>6} {:<9} {:>5} {:>12.2} {:>18.2}",
            c.nodes,
            c.method.as_str(),
            c.runs,
            c.mean_cut_percent,
            c.mean_imbalance_percent
        );
    }
    let failed = result.rows.iter().filter(|r| !r.is_ok()).count();
    if failed > 0 {
        eprintln!(
            "warning: {failed} of {} runs failed; see the status column",
            result.rows.len()
        );
    }
    println!("csv={}", csv_path.display());
    println!("svg={}", svg_path.display());
    Ok(())
}

fn cmd_eval(opts: &Options, graph: &Path, partition: &Path) -> Result<(), Failure> {
    let g = load(graph, opts)?;
    let part = read_partition(partition).map_err(classify)?;
    let m = cut_metrics(&g, &part).map_err(classify)?;
    print_metrics(&g, &m);
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut opts = cli.opts;
    opts.merge_config()?;
    match cli.command {
        Command::Generate { nodes } => cmd_generate(&opts, nodes),
        Command::Partition { graph } => cmd_partition(&opts, &graph),
        Command::Bench => cmd_bench(&opts),
        Command::Eval { graph, partition } => cmd_eval(&opts, &graph, &partition),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("gpart").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "xi = 0.3\nepochs = 7\nsizes = 10, 20\nmethod = kl,spectral\n").unwrap();
        let cfg = path.to_str().unwrap();
        let mut opts = parse(&["bench", "--config", cfg, "--xi", "0.9"]).opts;
        opts.merge_config().unwrap();
        assert_eq!(opts.xi, Some(0.9));
        assert_eq!(opts.epochs, Some(7));
        assert_eq!(opts.sizes, Some(vec![10, 20]));
        assert_eq!(opts.method, Some(vec![Method::Kl, Method::Spectral]));
        let s = opts.solvers().unwrap();
        assert_eq!((s.loss.xi, s.train.epochs), (0.9, 7));
    }

    #[test]
    fn bad_config_values_are_usage_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        for text in ["xi = wide", "colour = red", "just words"] {
            fs::write(&path, text).unwrap();
            let mut opts = parse(&["bench", "--config", path.to_str().unwrap()]).opts;
            assert_eq!(opts.merge_config().unwrap_err().code(), 1, "{text}");
        }
        let mut opts = parse(&["bench", "--config", "/nonexistent/run.conf"]).opts;
        assert_eq!(opts.merge_config().unwrap_err().code(), 2);
    }

    #[test]
    fn error_classes() {
        assert_eq!(classify(CoreError::InvalidConfig("x".into())).code(), 1);
        assert_eq!(
            classify(CoreError::Parse {
                line: 1,
                msg: "x".into()
            })
            .code(),
            2
        );
        assert_eq!(classify(CoreError::LengthMismatch { expected: 1, actual: 2 }).code(), 2);
        assert_eq!(
            classify(CoreError::NonFiniteLoss {
                epoch: 0,
                value: f64::NAN
            })
            .code(),
            3
        );
    }

    #[test]
    fn partition_needs_one_method() {
        let opts = parse(&["partition", "g.txt", "--method", "kl,gnn"]).opts;
        assert_eq!(opts.single_method().unwrap_err().code(), 1);
        assert_eq!(
            parse(&["partition", "g.txt"]).opts.single_method().unwrap(),
            Method::Gnn
        );
    }
}
