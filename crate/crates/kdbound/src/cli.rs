// SPDX-License-Identifier: Apache-2.0

//! Command-line interface: `build`, `query` and `experiment <name>`.
//!
//! Exit codes: 0 on success, 1 when an experiment ran but a threshold
//! failed, 2 for usage, I/O and validation errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use kdbound_core::search::{brute_force_nn, comprehensive_search, defeatist_search};
use kdbound_core::{KdTree, Sampler, SearchOutcome, TreeConfig};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expectations::Expectations;
use crate::experiments::{
    comprehensive, defeatist, diameter, example1, median, regularity, ExperimentOutput, QueryMode,
    RunOptions, EXPERIMENT_NAMES,
};
use crate::fixture;
use crate::format::{
    read_json, sha256_hex, tree_from_json, tree_to_json, BuildManifest, DistributionConfig,
    PointsFile,
};

#[derive(Debug, Parser)]
#[command(
    name = "kdbound",
    version,
    about = "k-d tree nearest-neighbor search and its probabilistic guarantees"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a tree from a point file, the bundled fixture, or a sampled distribution.
    Build(BuildArgs),
    /// Answer one nearest-neighbor query against a tree file.
    Query(QueryArgs),
    /// Run a seeded Monte-Carlo experiment.
    Experiment {
        #[command(subcommand)]
        experiment: ExperimentCommand,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fixture {
    /// 20 points in [0,6]^2 with leaf size 2 and a query at (3.47, 5.5).
    Planar20,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistKind {
    Uniform,
    Corner,
}

impl DistKind {
    fn config(self, d: usize) -> DistributionConfig {
        match self {
            DistKind::Uniform => DistributionConfig::uniform(d),
            DistKind::Corner => DistributionConfig::corner(d),
        }
    }
}

/// Where a distribution comes from: a named family or a JSON config file.
#[derive(Debug, Clone, Args)]
pub struct DistArgs {
    /// Distribution family.
    #[arg(long, value_enum, conflicts_with = "dist_file")]
    pub dist: Option<DistKind>,
    /// JSON distribution config (`type`, `d`, optional `intervals`, `masses`, `seed`).
    #[arg(long, value_name = "PATH")]
    pub dist_file: Option<PathBuf>,
}

impl DistArgs {
    fn resolve(&self, default: DistKind, d: usize) -> Result<DistributionConfig> {
        if let Some(path) = &self.dist_file {
            let cfg: DistributionConfig = read_json(path)?;
            return Ok(cfg);
        }
        Ok(self.dist.unwrap_or(default).config(d))
    }
}

#[derive(Debug, Clone, Args)]
pub struct BuildArgs {
    /// JSON point file (`points`, optional `bounding_box`, `query`, `min_leaf_size`).
    #[arg(long, value_name = "PATH", group = "source")]
    pub data: Option<PathBuf>,
    /// A bundled fixture.
    #[arg(long, value_enum, group = "source")]
    pub fixture: Option<Fixture>,
    /// Sample from this distribution family.
    #[arg(long, value_enum, group = "source", requires_all = ["n", "d", "seed"])]
    pub dist: Option<DistKind>,
    /// Sample from a JSON distribution config.
    #[arg(long, value_name = "PATH", group = "source", requires = "n")]
    pub dist_file: Option<PathBuf>,
    /// Number of sampled points.
    #[arg(long)]
    pub n: Option<usize>,
    /// Dimension for `--dist`.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Minimum leaf size; defaults to the point file's value.
    #[arg(long)]
    pub n0: Option<usize>,
    /// Output tree file; the manifest goes next to it as `<out>.manifest.json`.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SearchMode {
    Defeatist,
    Comprehensive,
    Brute,
}

#[derive(Debug, Clone, Args)]
pub struct QueryArgs {
    #[arg(long, value_name = "PATH")]
    pub tree: PathBuf,
    /// Comma-separated coordinates.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub q: Vec<f64>,
    #[arg(long, value_enum, default_value = "comprehensive")]
    pub mode: SearchMode,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Master seed; falls back to the distribution config's `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; output does not depend on it.
    #[arg(long)]
    pub parallelism: Option<usize>,
    /// Directory for `<name>.jsonl` and `<name>.csv`.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    /// Defeatist success rate across dimensions.
    DefeatistSuccess {
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        n0: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,8,32,128,512")]
        d_grid: Vec<usize>,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        /// `random`, or comma-separated coordinates (one value is broadcast).
        #[arg(long, default_value = "random", allow_hyphen_values = true)]
        query: String,
        /// Floor on every dimension's success rate.
        #[arg(long)]
        min_success_rate: Option<f64>,
        #[command(flatten)]
        dist: DistArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Leaves visited by comprehensive search over an (n, d) grid.
    ComprehensiveVisits {
        #[arg(long, value_delimiter = ',', default_value = "1024")]
        n_grid: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "512")]
        d_grid: Vec<usize>,
        #[arg(long, default_value_t = 16)]
        n0: usize,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value = "random", allow_hyphen_values = true)]
        query: String,
        /// Floor on the every-leaf rate; by default applied only where the closed-form bound reaches it.
        #[arg(long)]
        min_all_visited_rate: Option<f64>,
        /// Ceiling on mean visits relative to the smallest n.
        #[arg(long)]
        max_growth_factor: Option<f64>,
        #[command(flatten)]
        dist: DistArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Aspect ratio and mass of every leaf for uniform data.
    CellRegularity {
        #[arg(long, default_value_t = 65536)]
        n: usize,
        #[arg(long, default_value_t = 64)]
        n0: usize,
        #[arg(long, default_value_t = 8)]
        d: usize,
        #[arg(long, default_value_t = 20)]
        trees: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// L1 diameter of the query's leaf.
    Diameter {
        #[arg(long, default_value_t = 32768)]
        n: usize,
        #[arg(long, default_value_t = 64)]
        n0: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
        d_grid: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        queries: usize,
        #[arg(long, default_value_t = 100)]
        queries_per_tree: usize,
        #[command(flatten)]
        dist: DistArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Median deviation with adversarial fixed points.
    MedianConcentration {
        #[arg(long, value_delimiter = ',', default_value = "100,200,500")]
        n_grid: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0,5,10")]
        k_grid: Vec<usize>,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.15,0.2")]
        delta_grid: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Corner distribution with `n = n0 2^d`.
    Example1 {
        #[arg(long, default_value_t = 8)]
        d: usize,
        #[arg(long, default_value_t = 25)]
        trials: usize,
        /// Override the leaf size `ceil(d^3 log2^3 d)`.
        #[arg(long)]
        n0: Option<usize>,
        /// Override `n = n0 2^d`.
        #[arg(long)]
        n: Option<usize>,
        /// Largest `n * d` one trial may hold.
        #[arg(long, default_value_t = example1::DEFAULT_MEMORY_BUDGET)]
        memory_budget: u128,
        #[command(flatten)]
        run: RunArgs,
    },
}

/// Parses `args` (including the program name) and runs the command,
/// writing to `out` and `err`. Returns the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            if e.kind() == ErrorKind::InvalidSubcommand {
                let _ = writeln!(err, "valid experiments: {}", EXPERIMENT_NAMES.join(", "));
            }
            return code;
        }
    };
    match run(cli, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

/// Runs a parsed command. `Ok(false)` means an experiment threshold failed.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<bool> {
    match cli.command {
        Command::Build(args) => cmd_build(&args, out).map(|()| true),
        Command::Query(args) => cmd_query(&args, out).map(|()| true),
        Command::Experiment { experiment } => cmd_experiment(experiment, out),
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn manifest_path(tree_path: &Path) -> PathBuf {
    let mut s = tree_path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn cmd_build(args: &BuildArgs, out: &mut dyn Write) -> Result<()> {
    let (points, source) = if let Some(path) = &args.data {
        (read_json::<PointsFile>(path)?, path.display().to_string())
    } else if let Some(Fixture::Planar20) = args.fixture {
        (fixture::planar20(), "fixture:planar20".to_string())
    } else {
        let cfg = if let Some(path) = &args.dist_file {
            read_json::<DistributionConfig>(path)?
        } else if let Some(kind) = args.dist {
            kind.config(args.d.unwrap_or(0))
        } else {
            return Err(Error::Params(
                "one of --data, --fixture, --dist or --dist-file is required".into(),
            ));
        };
        let seed = args
            .seed
            .or(cfg.seed)
            .ok_or_else(|| Error::Params("--seed is required when sampling".into()))?;
        let n = args
            .n
            .ok_or_else(|| Error::Params("--n is required when sampling".into()))?;
        let data = cfg.build()?.sample(&mut Sampler::new(seed), n)?;
        let rows: Vec<Vec<f64>> = data.rows().map(|r| r.to_vec()).collect();
        let file = PointsFile {
            points: rows,
            bounding_box: None,
            query: None,
            min_leaf_size: None,
        };
        (file, format!("{}:d={}:seed={seed}", cfg.label(), cfg.d))
    };

    let n0 = args
        .n0
        .or(points.min_leaf_size)
        .ok_or_else(|| Error::Params("--n0 is required".into()))?;
    let mut config = TreeConfig::new(n0);
    if let Some(b) = &points.bounding_box {
        config = config.with_bounding_box(b.to_rect()?);
    }
    let data = points.dataset()?;
    let (n, d) = (data.len(), data.dim());
    let tree = KdTree::build(data, config)?;
    let text = tree_to_json(&tree);
    write_file(&args.out, &text)?;
    let manifest = BuildManifest {
        tree_file: args.out.display().to_string(),
        source,
        n,
        d,
        n0,
        seed: if args.data.is_none() && args.fixture.is_none() {
            args.seed
        } else {
            None
        },
        sha256: sha256_hex(text.as_bytes()),
    };
    let mpath = manifest_path(&args.out);
    let mut mtext = serde_json::to_string_pretty(&manifest)?;
    mtext.push('\n');
    write_file(&mpath, &mtext)?;
    write_out(
        out,
        &format!(
            "built {} leaves (depth {}) from {n} points in d = {d}\n  tree: {}\n  manifest: {}\n",
            tree.leaf_count(),
            tree.depth(),
            args.out.display(),
            mpath.display()
        ),
    )
}

#[derive(Debug, Serialize)]
struct OutcomeDoc<'a> {
    mode: &'a str,
    index: usize,
    point: &'a [f64],
    distance: f64,
    visited_leaves: usize,
    distance_computations: usize,
    backtracks: usize,
}

fn cmd_query(args: &QueryArgs, out: &mut dyn Write) -> Result<()> {
    let text = std::fs::read_to_string(&args.tree).map_err(|e| Error::io(&args.tree, e))?;
    let tree = tree_from_json(&text)?;
    let (mode, outcome): (&str, SearchOutcome) = match args.mode {
        SearchMode::Defeatist => ("defeatist", defeatist_search(&tree, &args.q)?),
        SearchMode::Comprehensive => ("comprehensive", comprehensive_search(&tree, &args.q)?),
        SearchMode::Brute => ("brute", brute_force_nn(tree.data(), &args.q)?),
    };
    let doc = OutcomeDoc {
        mode,
        index: outcome.index,
        point: tree.data().point(outcome.index),
        distance: outcome.distance,
        visited_leaves: outcome.visited_leaves,
        distance_computations: outcome.distance_computations,
        backtracks: outcome.backtracks,
    };
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    write_out(out, &s)
}

fn parse_query(s: &str) -> Result<QueryMode> {
    if s == "random" {
        return Ok(QueryMode::Random);
    }
    let coords: std::result::Result<Vec<f64>, _> =
        s.split(',').map(|c| c.trim().parse::<f64>()).collect();
    match coords {
        Ok(v) if !v.is_empty() => Ok(QueryMode::Fixed(v)),
        _ => Err(Error::Params(format!(
            "query must be `random` or comma-separated numbers, got {s:?}"
        ))),
    }
}

fn options(run: &RunArgs, fallback_seed: Option<u64>) -> Result<RunOptions> {
    let seed = run
        .seed
        .or(fallback_seed)
        .ok_or_else(|| Error::Params("--seed is required".into()))?;
    let parallelism = run
        .parallelism
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()));
    Ok(RunOptions::new(seed, parallelism))
}

fn cmd_experiment(cmd: ExperimentCommand, out: &mut dyn Write) -> Result<bool> {
    let expectations = Expectations::bundled();
    let (output, run_args): (ExperimentOutput, RunArgs) = match cmd {
        ExperimentCommand::DefeatistSuccess {
            n,
            n0,
            d_grid,
            trials,
            query,
            min_success_rate,
            dist,
            run,
        } => {
            let cfg = dist.resolve(DistKind::Uniform, 1)?;
            let opts = options(&run, cfg.seed)?;
            let mut p = defeatist::DefeatistParams::uniform(n, n0, d_grid, trials);
            p.query = parse_query(&query)?;
            p.distribution = cfg.clone();
            for &d in &p.d_grid {
                let floor = min_success_rate.or_else(|| {
                    (p.query == QueryMode::Random)
                        .then(|| expectations.defeatist(cfg.kind, n, n0, d))
                        .flatten()
                });
                if let Some(f) = floor {
                    p.min_success_rate.insert(d, f);
                }
            }
            (defeatist::run(&p, &opts)?, run)
        }
        ExperimentCommand::ComprehensiveVisits {
            n_grid,
            d_grid,
            n0,
            trials,
            query,
            min_all_visited_rate,
            max_growth_factor,
            dist,
            run,
        } => {
            let cfg = dist.resolve(DistKind::Uniform, 1)?;
            let opts = options(&run, cfg.seed)?;
            let mut p = comprehensive::VisitParams::uniform(n_grid, d_grid, n0, trials);
            p.distribution = cfg;
            p.query = parse_query(&query)?;
            let defaults = &expectations.comprehensive_visits;
            p.min_all_visited_rate = match min_all_visited_rate {
                Some(f) => Some(f),
                None if comprehensive::bound_supports_floor(&p, defaults.min_all_visited_rate)? => {
                    Some(defaults.min_all_visited_rate)
                }
                None => None,
            };
            p.max_growth_factor = Some(max_growth_factor.unwrap_or(defaults.max_growth_factor));
            (comprehensive::run(&p, &opts)?, run)
        }
        ExperimentCommand::CellRegularity {
            n,
            n0,
            d,
            trees,
            run,
        } => {
            let opts = options(&run, None)?;
            let p = regularity::RegularityParams { n, n0, d, trees };
            (regularity::run(&p, &opts)?, run)
        }
        ExperimentCommand::Diameter {
            n,
            n0,
            d_grid,
            queries,
            queries_per_tree,
            dist,
            run,
        } => {
            let cfg = dist.resolve(DistKind::Uniform, 1)?;
            let opts = options(&run, cfg.seed)?;
            let mut p = diameter::DiameterParams::new(cfg, n, n0, d_grid, queries);
            p.queries_per_tree = queries_per_tree;
            (diameter::run(&p, &opts)?, run)
        }
        ExperimentCommand::MedianConcentration {
            n_grid,
            k_grid,
            t,
            delta_grid,
            trials,
            run,
        } => {
            let opts = options(&run, None)?;
            let p = median::MedianParams {
                n_grid,
                k_grid,
                t,
                delta_grid,
                trials,
            };
            (median::run(&p, &opts)?, run)
        }
        ExperimentCommand::Example1 {
            d,
            trials,
            n0,
            n,
            memory_budget,
            run,
        } => {
            let opts = options(&run, None)?;
            let mut p = example1::Example1Params::new(d, trials);
            p.n0 = n0;
            p.n = n;
            p.memory_budget = memory_budget;
            let (n, n0) = p.sizes()?;
            if let Some(e) = expectations.example1(d, n, n0) {
                p.min_rates = e.min_rates.clone();
            }
            (example1::run(&p, &opts)?, run)
        }
    };
    let (jsonl, csv) = output.write(&run_args.out_dir)?;
    let mut text = output.report();
    text.push_str(&format!(
        "  records: {}\n  summary: {}\n",
        jsonl.display(),
        csv.display()
    ));
    write_out(out, &text)?;
    Ok(output.passed())
}
