//! Subcommand implementations behind the `ks2v` binary.
//!
//! Exit codes: 0 success, 1 configuration error, 2 stage failure.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::complex::{Graph, Simplex, SimplicialComplex};
use crate::embed::{self, Hyperparams, TrainMode};
use crate::eval::{self, PointCloud};
use crate::pipeline::{self, ClusteringConfig, ExperimentGrid, InputSource, RunConfig};
use crate::sbm;
use crate::walks::{self, WalkCorpus, WalkMode};
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "ks2v", about = "Random-walk feature vectors for the k-simplices of a simplicial complex", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample a stochastic block model graph and its block labels.
    Sbm(SbmArgs),
    /// Build the clique complex of an edge list and print its simplices.
    Complex(ComplexArgs),
    /// Generate a random-walk corpus over the k-simplices.
    Walks(WalksArgs),
    /// Train a skip-gram embedding from a walk corpus.
    Train(TrainArgs),
    /// Cluster an embedding and emit PCA/scatter artifacts.
    Eval(EvalArgs),
    /// Run the full pipeline into an artifact directory.
    Pipeline(PipelineArgs),
    /// Sweep dimension x walk-count cells with repetitions.
    Grid(GridArgs),
}

#[derive(Args, Debug)]
pub struct SbmArgs {
    /// Comma-separated block sizes, e.g. 20,20,20
    #[arg(long, value_delimiter = ',', required = true)]
    pub block_sizes: Vec<usize>,
    #[arg(long)]
    pub p_in: f64,
    #[arg(long)]
    pub p_out: f64,
    #[arg(long)]
    pub seed: u64,
    /// Edge-list output path.
    #[arg(long)]
    pub out_graph: PathBuf,
    /// Vertex block CSV output path.
    #[arg(long)]
    pub out_blocks: PathBuf,
}

#[derive(Args, Debug)]
pub struct ComplexArgs {
    /// Edge-list input path.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub max_dim: usize,
    /// Simplex-list output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct WalksArgs {
    /// Edge-list input path.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 2)]
    pub max_dim: usize,
    /// Walks per simplex (N).
    #[arg(long, short = 'n')]
    pub walks: usize,
    /// Walk length in steps (l).
    #[arg(long, short = 'l')]
    pub length: usize,
    /// both | upper | lower
    #[arg(long, default_value = "both")]
    pub mode: WalkMode,
    #[arg(long)]
    pub seed: u64,
    /// Corpus output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Walk corpus path (output of `walks`).
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, short = 'd')]
    pub dim: usize,
    #[arg(long, default_value_t = 10)]
    pub window: usize,
    #[arg(long, default_value_t = 5)]
    pub epochs: usize,
    #[arg(long, default_value_t = 5)]
    pub negatives: usize,
    #[arg(long, default_value_t = 0.0125)]
    pub lr_initial: f64,
    #[arg(long, default_value_t = 0.0001)]
    pub lr_final: f64,
    #[arg(long)]
    pub seed: u64,
    /// Simplex-list file (output of `complex`) used to label embedding
    /// rows; rows fall back to bare indices when omitted.
    #[arg(long)]
    pub simplices: Option<PathBuf>,
    /// Hogwild workers; sequential and bit-reproducible when omitted.
    #[arg(long)]
    pub parallel: Option<usize>,
    /// Embedding output path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Embedding file (output of `train`).
    #[arg(long)]
    pub embedding: PathBuf,
    /// kmeans | dbscan
    #[arg(long, default_value = "kmeans")]
    pub algorithm: String,
    /// Number of clusters (kmeans).
    #[arg(long)]
    pub clusters: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    /// DBSCAN radius; knee heuristic when omitted.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = 3)]
    pub min_pts: usize,
    /// PCA components to project onto before clustering (0 = raw embedding).
    #[arg(long, default_value_t = 2)]
    pub cluster_components: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Ground-truth labels CSV (`simplex,class_multiset,label`) for the
    /// Rand index.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct ConfigOverrides {
    /// TOML config file; flags below override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Re-run the exact configuration recorded in a manifest.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Edge-list input path (exclusive with --block-sizes).
    #[arg(long)]
    pub edge_list: Option<PathBuf>,
    /// SBM block sizes, e.g. 20,20,20 (exclusive with --edge-list).
    #[arg(long, value_delimiter = ',')]
    pub block_sizes: Option<Vec<usize>>,
    #[arg(long)]
    pub p_in: Option<f64>,
    #[arg(long)]
    pub p_out: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub max_dim: Option<usize>,
    #[arg(long)]
    pub mode: Option<WalkMode>,
    /// Walks per simplex (N).
    #[arg(long)]
    pub walks: Option<usize>,
    /// Walk length in steps (l).
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub negatives: Option<usize>,
    /// kmeans | dbscan
    #[arg(long)]
    pub clustering: Option<String>,
    #[arg(long)]
    pub clusters: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub min_pts: Option<usize>,
    /// PCA components to project onto before clustering (0 = raw embedding).
    #[arg(long)]
    pub cluster_components: Option<usize>,
    /// Master seed; mandatory (no silent entropy).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Hogwild training workers.
    #[arg(long)]
    pub parallel: Option<usize>,
}

#[derive(Args, Debug)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub overrides: ConfigOverrides,
}

#[derive(Args, Debug)]
pub struct GridArgs {
    #[command(flatten)]
    pub overrides: ConfigOverrides,
    /// Feature dimensions to sweep, e.g. 10,20,30
    #[arg(long, value_delimiter = ',', required = true)]
    pub dims: Vec<usize>,
    /// Walk counts to sweep, e.g. 10,20,30,40,50
    #[arg(long, value_delimiter = ',', required = true)]
    pub walk_counts: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

impl ConfigOverrides {
    /// Resolve the run configuration: manifest or config file as the base,
    /// command-line flags winning over file values.
    fn resolve(&self) -> Result<RunConfig> {
        let base = if let Some(path) = &self.manifest {
            Some(RunConfig::from_manifest_path(path)?)
        } else if let Some(path) = &self.config {
            Some(RunConfig::from_toml_path(path)?)
        } else {
            None
        };

        let input = if let Some(path) = &self.edge_list {
            Some(InputSource::EdgeList { path: path.clone() })
        } else if let Some(sizes) = &self.block_sizes {
            Some(InputSource::Sbm {
                block_sizes: sizes.clone(),
                p_in: self
                    .p_in
                    .ok_or_else(|| Error::Config("--block-sizes requires --p-in".into()))?,
                p_out: self
                    .p_out
                    .ok_or_else(|| Error::Config("--block-sizes requires --p-out".into()))?,
            })
        } else {
            None
        };

        let clustering = match self.clustering.as_deref() {
            Some("kmeans") => Some(ClusteringConfig::Kmeans {
                k: self
                    .clusters
                    .ok_or_else(|| Error::Config("kmeans needs --clusters".into()))?,
                restarts: self.restarts.unwrap_or(10),
            }),
            Some("dbscan") => Some(ClusteringConfig::Dbscan {
                eps: self.eps,
                min_pts: self.min_pts.unwrap_or(3),
            }),
            Some(other) => {
                return Err(Error::Config(format!("unknown clustering '{other}'")));
            }
            None => None,
        };

        let mut config = match base {
            Some(config) => config,
            None => {
                // no file: the required pieces must all come from flags
                let input = input
                    .clone()
                    .ok_or_else(|| Error::Config("need --edge-list, --block-sizes or --config".into()))?;
                let clustering = clustering
                    .clone()
                    .ok_or_else(|| Error::Config("need --clustering (or --config)".into()))?;
                RunConfig {
                    input,
                    k: self.k.ok_or_else(|| Error::Config("need --k".into()))?,
                    max_dim: 2,
                    mode: WalkMode::Both,
                    walks_per_simplex: self
                        .walks
                        .ok_or_else(|| Error::Config("need --walks".into()))?,
                    walk_len: self
                        .length
                        .ok_or_else(|| Error::Config("need --length".into()))?,
                    embed: Hyperparams {
                        dim: self.dim.ok_or_else(|| Error::Config("need --dim".into()))?,
                        ..Hyperparams::default()
                    },
                    clustering,
                    cluster_components: 2,
                    seed: 0,
                    output_dir: PathBuf::from("out"),
                    train_mode: TrainMode::Sequential,
                }
            }
        };

        if let Some(input) = input {
            config.input = input;
        }
        if let Some(clustering) = clustering {
            config.clustering = clustering;
        }
        if let Some(k) = self.k {
            config.k = k;
        }
        if let Some(max_dim) = self.max_dim {
            config.max_dim = max_dim;
        }
        if let Some(mode) = self.mode {
            config.mode = mode;
        }
        if let Some(walks) = self.walks {
            config.walks_per_simplex = walks;
        }
        if let Some(length) = self.length {
            config.walk_len = length;
        }
        if let Some(dim) = self.dim {
            config.embed.dim = dim;
        }
        if let Some(window) = self.window {
            config.embed.window = window;
        }
        if let Some(epochs) = self.epochs {
            config.embed.epochs = epochs;
        }
        if let Some(negatives) = self.negatives {
            config.embed.negatives = negatives;
        }
        if let Some(components) = self.cluster_components {
            config.cluster_components = components;
        }
        if let Some(out) = &self.out {
            config.output_dir = out.clone();
        }
        if let Some(workers) = self.parallel {
            config.train_mode = TrainMode::Parallel { workers };
        }
        match self.seed {
            Some(seed) => config.seed = seed,
            // a manifest pins its seed; anything else must be explicit
            None if self.manifest.is_none() => {
                return Err(Error::Config("--seed is mandatory".into()));
            }
            None => {}
        }
        Ok(config)
    }
}

fn writer_or_stdout(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn cmd_sbm(args: &SbmArgs) -> Result<()> {
    let (graph, blocks) = sbm::sample_sbm(&args.block_sizes, args.p_in, args.p_out, args.seed)?;
    graph.write_edge_list(BufWriter::new(fs::File::create(&args.out_graph)?))?;
    let mut w = BufWriter::new(fs::File::create(&args.out_blocks)?);
    writeln!(w, "vertex,block")?;
    for (v, b) in blocks.labels().iter().enumerate() {
        writeln!(w, "{v},{b}")?;
    }
    eprintln!(
        "sbm: {} vertices, {} edges -> {:?}, {:?}",
        graph.vertex_count(),
        graph.edge_count(),
        args.out_graph,
        args.out_blocks
    );
    Ok(())
}

fn cmd_complex(args: &ComplexArgs) -> Result<()> {
    let (graph, _) = Graph::from_edge_list_path(&args.input).map_err(|e| e.in_stage("input"))?;
    let complex = SimplicialComplex::clique_complex(&graph, args.max_dim)
        .map_err(|e| e.in_stage("complex"))?;
    complex.write_simplex_list(writer_or_stdout(&args.out)?)?;
    Ok(())
}

fn cmd_walks(args: &WalksArgs) -> Result<()> {
    let (graph, _) = Graph::from_edge_list_path(&args.input).map_err(|e| e.in_stage("input"))?;
    let complex = SimplicialComplex::clique_complex(&graph, args.max_dim)
        .map_err(|e| e.in_stage("complex"))?;
    let corpus = walks::generate_corpus(
        &complex,
        args.k,
        args.walks,
        args.length,
        args.mode,
        args.seed,
    )
    .map_err(|e| e.in_stage("walks"))?;
    corpus.write(writer_or_stdout(&args.out)?)?;
    Ok(())
}

/// Parse a simplex-list file, keeping only simplices of dimension `k`.
fn read_simplices_of_dim(path: &PathBuf, k: usize) -> Result<Vec<Simplex>> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let vs = line
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>().map_err(|e| Error::Parse {
                    line: lineno + 1,
                    msg: format!("{e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if vs.len() == k + 1 {
            out.push(Simplex::new(vs)?);
        }
    }
    Ok(out)
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let corpus = WalkCorpus::read(fs::File::open(&args.corpus)?).map_err(|e| e.in_stage("train"))?;
    let hp = Hyperparams {
        dim: args.dim,
        window: args.window,
        epochs: args.epochs,
        negatives: args.negatives,
        lr_initial: args.lr_initial,
        lr_final: args.lr_final,
        seed: args.seed,
    };
    let mode = match args.parallel {
        Some(workers) => TrainMode::Parallel { workers },
        None => TrainMode::Sequential,
    };
    let (model, report) = embed::train(&corpus, &hp, mode).map_err(|e| e.in_stage("train"))?;
    let simplices = match &args.simplices {
        Some(path) => read_simplices_of_dim(path, corpus.k)?,
        None => (0..model.len())
            .map(|i| Simplex::new(vec![i]).expect("index simplex"))
            .collect(),
    };
    if simplices.len() != model.len() {
        return Err(Error::Config(format!(
            "simplex list has {} entries of dimension {}, corpus has {}",
            simplices.len(),
            corpus.k,
            model.len()
        )));
    }
    embed::write_embedding(&model, &simplices, BufWriter::new(fs::File::create(&args.out)?))?;
    eprintln!(
        "train: {} tokens/epoch, final loss {:.4}, {:.2}s",
        report.token_count,
        report.epoch_losses.last().unwrap_or(&f64::NAN),
        report.wall_time.as_secs_f64()
    );
    Ok(())
}

/// Ground-truth labels from a `simplex,class_multiset,label` CSV, aligned
/// with the embedding's simplex keys.
fn read_truth_labels(path: &PathBuf, keys: &[String]) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path)?;
    let mut by_key = std::collections::HashMap::new();
    for (lineno, line) in text.lines().enumerate().skip(1) {
        let mut fields = line.split(',');
        let key = fields.next().unwrap_or_default().to_string();
        let label = fields
            .next_back()
            .unwrap_or_default()
            .parse::<usize>()
            .map_err(|e| Error::Parse {
                line: lineno + 1,
                msg: format!("{e}"),
            })?;
        by_key.insert(key, label);
    }
    keys.iter()
        .map(|k| {
            by_key.get(k).copied().ok_or_else(|| {
                Error::Config(format!("truth file has no label for simplex {k}"))
            })
        })
        .collect()
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let (keys, data, dim) =
        embed::read_embedding(fs::File::open(&args.embedding)?).map_err(|e| e.in_stage("eval"))?;
    let embedding_cloud = PointCloud::from_flat(keys.len(), dim, data);
    let projected = if args.cluster_components == 0
        || args.cluster_components >= embedding_cloud.dim()
    {
        None
    } else {
        Some(
            eval::pca_project(&embedding_cloud, args.cluster_components)
                .map_err(|e| e.in_stage("eval"))?
                .projected,
        )
    };
    let points = projected.as_ref().unwrap_or(&embedding_cloud);
    let labels: Vec<Option<usize>> = match args.algorithm.as_str() {
        "kmeans" => {
            let k = args
                .clusters
                .ok_or_else(|| Error::Config("kmeans needs --clusters".into()))?;
            let res = eval::kmeans(points, k, args.restarts, args.seed)
                .map_err(|e| e.in_stage("eval"))?;
            println!("kmeans: inertia {:.4}", res.inertia);
            res.labels.iter().map(|&l| Some(l)).collect()
        }
        "dbscan" => {
            let eps = args.eps.unwrap_or_else(|| eval::choose_eps(points, args.min_pts));
            let res = eval::dbscan(points, eps, args.min_pts);
            println!(
                "dbscan: eps {:.4}, {} clusters, {:.1}% noise",
                eps,
                res.n_clusters,
                100.0 * res.noise_fraction()
            );
            res.labels
        }
        other => return Err(Error::Config(format!("unknown algorithm '{other}'"))),
    };

    fs::create_dir_all(&args.out_dir)?;
    eval::write_clusters_csv(
        &keys,
        &labels,
        BufWriter::new(fs::File::create(args.out_dir.join("clusters.csv"))?),
    )?;
    let pca = eval::pca_project(&embedding_cloud, 2.min(embedding_cloud.dim()))
        .map_err(|e| e.in_stage("eval"))?;
    eval::write_pca_csv(
        &keys,
        &pca.projected,
        BufWriter::new(fs::File::create(args.out_dir.join("pca.csv"))?),
    )?;
    if pca.projected.dim() == 2 {
        eval::write_scatter_svg(
            &pca.projected,
            &labels,
            BufWriter::new(fs::File::create(args.out_dir.join("scatter.svg"))?),
        )?;
    }
    if let Some(truth_path) = &args.truth {
        let truth = read_truth_labels(truth_path, &keys)?;
        let truth_opt: Vec<Option<usize>> = truth.iter().map(|&l| Some(l)).collect();
        let ri = eval::rand_index_filtered(&truth_opt, &labels).map_err(|e| e.in_stage("eval"))?;
        println!("rand_index: {ri:.6}");
    }
    Ok(())
}

fn cmd_pipeline(args: &PipelineArgs) -> Result<()> {
    let config = args.overrides.resolve()?;
    let (dir, manifest) = pipeline::run_pipeline(&config)?;
    println!("artifacts: {}", dir.display());
    if let Some(ri) = manifest.metrics.rand_index {
        println!("rand_index: {ri:.6}");
    }
    if let Some(noise) = manifest.metrics.noise_fraction {
        println!("noise_fraction: {noise:.6}");
    }
    Ok(())
}

fn cmd_grid(args: &GridArgs) -> Result<()> {
    let base = args.overrides.resolve()?;
    let grid = ExperimentGrid {
        dims: args.dims.clone(),
        walk_counts: args.walk_counts.clone(),
        repetitions: args.reps,
        workers: args.workers,
    };
    let results = pipeline::run_grid(&grid, &base)?;
    fs::create_dir_all(&base.output_dir)?;
    results.write_runs_csv(BufWriter::new(fs::File::create(
        base.output_dir.join("runs.csv"),
    )?))?;
    results.write_aggregate_csv(BufWriter::new(fs::File::create(
        base.output_dir.join("aggregate.csv"),
    )?))?;
    for row in &results.aggregate {
        println!(
            "d={} N={}: rand {:.4} +/- {:.4} ({} runs)",
            row.dim, row.walks, row.mean_rand_index, row.std_rand_index, row.runs
        );
    }
    let failures = results.rows.iter().filter(|r| r.error.is_some()).count();
    if failures > 0 {
        eprintln!("{failures} runs failed; see runs.csv");
    }
    Ok(())
}

/// Dispatch a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Sbm(args) => cmd_sbm(args),
        Command::Complex(args) => cmd_complex(args),
        Command::Walks(args) => cmd_walks(args),
        Command::Train(args) => cmd_train(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Pipeline(args) => cmd_pipeline(args),
        Command::Grid(args) => cmd_grid(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Parse { .. } => 1,
                _ => 2,
            }
        }
    }
}
