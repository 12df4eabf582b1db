//! End-to-end orchestration: generate or load a graph, build the clique
//! complex, walk, train, cluster, and write every artifact plus a manifest
//! that makes the run reproducible.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{Graph, SimplicialComplex};
use crate::embed::{self, EmbeddingModel, Hyperparams, TrainMode, TrainingReport};
use crate::eval::{self, PointCloud};
use crate::rng::derive_seed;
use crate::sbm::{self, BlockAssignment};
use crate::walks::{self, WalkCorpus, WalkMode};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputSource {
    EdgeList { path: PathBuf },
    Sbm { block_sizes: Vec<usize>, p_in: f64, p_out: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case")]
pub enum ClusteringConfig {
    Kmeans {
        k: usize,
        #[serde(default = "default_restarts")]
        restarts: usize,
    },
    Dbscan {
        /// Chosen from the kNN-distance knee when absent.
        eps: Option<f64>,
        #[serde(default = "default_min_pts")]
        min_pts: usize,
    },
}

fn default_restarts() -> usize {
    10
}

fn default_min_pts() -> usize {
    3
}

fn default_max_dim() -> usize {
    2
}

fn default_mode() -> WalkMode {
    WalkMode::Both
}

fn default_train_mode() -> TrainMode {
    TrainMode::Sequential
}

fn default_cluster_components() -> usize {
    2
}

/// Full description of one pipeline run. Serializable as TOML (config
/// file) and embedded verbatim in the manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: InputSource,
    /// Simplex dimension to embed.
    pub k: usize,
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
    #[serde(default = "default_mode")]
    pub mode: WalkMode,
    /// Walks started at each simplex (N).
    pub walks_per_simplex: usize,
    /// Steps per walk (l).
    pub walk_len: usize,
    pub embed: Hyperparams,
    pub clustering: ClusteringConfig,
    /// PCA components the point cloud is projected onto before clustering
    /// (0 = cluster the raw embedding). Raw d-dimensional embeddings put most
    /// of their variance into directions that track token frequency rather
    /// than class, which derails centroid-based clustering; the leading
    /// principal plane is where the class structure lives.
    #[serde(default = "default_cluster_components")]
    pub cluster_components: usize,
    /// Master seed; every stage derives its own stream from it.
    pub seed: u64,
    pub output_dir: PathBuf,
    #[serde(default = "default_train_mode")]
    pub train_mode: TrainMode,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.walks_per_simplex < 1 || self.walk_len < 1 {
            return Err(Error::Config(
                "walks_per_simplex and walk_len must be >= 1".into(),
            ));
        }
        if self.k > self.max_dim {
            return Err(Error::Config(format!(
                "k={} exceeds max_dim={}",
                self.k, self.max_dim
            )));
        }
        self.embed.validate()?;
        if let InputSource::EdgeList { path } = &self.input {
            if !path.exists() {
                return Err(Error::Config(format!("edge list {path:?} does not exist")));
            }
        }
        if let InputSource::Sbm { block_sizes, p_in, p_out } = &self.input {
            if block_sizes.is_empty() || block_sizes.contains(&0) {
                return Err(Error::Config("block sizes must be positive".into()));
            }
            if !(0.0..=1.0).contains(p_out) || !(*p_out..=1.0).contains(p_in) {
                return Err(Error::Config("need 0 <= p_out <= p_in <= 1".into()));
            }
        }
        Ok(())
    }

    pub fn from_toml_path(path: impl AsRef<Path>) -> Result<RunConfig> {
        let text = fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("config parse error: {e}")))
    }

    /// Extract the config back out of a manifest written by `run_pipeline`.
    pub fn from_manifest_path(path: impl AsRef<Path>) -> Result<RunConfig> {
        let text = fs::read_to_string(path)?;
        let manifest: Manifest = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("manifest parse error: {e}")))?;
        Ok(manifest.config)
    }

    pub fn run_id(&self) -> String {
        format!(
            "k{}-d{}-N{}-l{}-{}-seed{}",
            self.k, self.embed.dim, self.walks_per_simplex, self.walk_len, self.mode, self.seed
        )
    }
}

/// Per-stage seeds derived from the master seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DerivedSeeds {
    pub sbm: u64,
    pub walks: u64,
    pub embed: u64,
    pub clustering: u64,
}

impl DerivedSeeds {
    fn from_master(seed: u64) -> DerivedSeeds {
        DerivedSeeds {
            sbm: derive_seed(seed, 1, 0),
            walks: derive_seed(seed, 2, 0),
            embed: derive_seed(seed, 3, 0),
            clustering: derive_seed(seed, 4, 0),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMetrics {
    pub simplex_counts: Vec<usize>,
    /// Rand index vs ground-truth classes; present only for SBM inputs.
    pub rand_index: Option<f64>,
    /// kmeans only.
    pub inertia: Option<f64>,
    /// DBSCAN only.
    pub noise_fraction: Option<f64>,
    pub n_clusters: usize,
    pub epoch_losses: Vec<f64>,
    pub token_count: usize,
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub config: RunConfig,
    pub seeds: DerivedSeeds,
    pub metrics: RunMetrics,
}

/// In-memory outcome of one run (no files written).
pub struct Execution {
    pub complex: SimplicialComplex,
    pub blocks: Option<BlockAssignment>,
    pub truth_labels: Option<Vec<usize>>,
    pub corpus: WalkCorpus,
    pub model: EmbeddingModel,
    pub report: TrainingReport,
    pub cluster_labels: Vec<Option<usize>>,
    pub metrics: RunMetrics,
    pub seeds: DerivedSeeds,
    /// Original vertex ids when an edge list was re-indexed.
    pub vertex_map: Option<Vec<u64>>,
}

/// Run all stages in memory.
pub fn execute(config: &RunConfig) -> Result<Execution> {
    config.validate()?;
    let started = Instant::now();
    let seeds = DerivedSeeds::from_master(config.seed);

    let (graph, blocks, vertex_map) = match &config.input {
        InputSource::Sbm { block_sizes, p_in, p_out } => {
            let (g, b) = sbm::sample_sbm(block_sizes, *p_in, *p_out, seeds.sbm)
                .map_err(|e| e.in_stage("sbm"))?;
            (g, Some(b), None)
        }
        InputSource::EdgeList { path } => {
            let (g, ids) = Graph::from_edge_list_path(path).map_err(|e| e.in_stage("input"))?;
            let identity = ids.iter().enumerate().all(|(i, &v)| i as u64 == v);
            (g, None, (!identity).then_some(ids))
        }
    };

    let complex = SimplicialComplex::clique_complex(&graph, config.max_dim)
        .map_err(|e| e.in_stage("complex"))?;
    if complex.count(config.k) == 0 {
        return Err(Error::EmptyDimension(config.k).in_stage("complex"));
    }
    let simplex_counts: Vec<usize> = (0..=complex.dim()).map(|k| complex.count(k)).collect();

    let corpus = walks::generate_corpus(
        &complex,
        config.k,
        config.walks_per_simplex,
        config.walk_len,
        config.mode,
        seeds.walks,
    )
    .map_err(|e| e.in_stage("walks"))?;

    let hp = Hyperparams {
        seed: seeds.embed,
        ..config.embed.clone()
    };
    let (model, report) =
        embed::train(&corpus, &hp, config.train_mode).map_err(|e| e.in_stage("train"))?;

    let embedding_cloud = PointCloud::from(&model);
    let points = if config.cluster_components == 0 || config.cluster_components >= embedding_cloud.dim() {
        embedding_cloud
    } else {
        eval::pca_project(&embedding_cloud, config.cluster_components)
            .map_err(|e| e.in_stage("eval"))?
            .projected
    };
    let (cluster_labels, inertia, noise_fraction, n_clusters) = match &config.clustering {
        ClusteringConfig::Kmeans { k, restarts } => {
            let res = eval::kmeans(&points, *k, *restarts, seeds.clustering)
                .map_err(|e| e.in_stage("eval"))?;
            let labels: Vec<Option<usize>> = res.labels.iter().map(|&l| Some(l)).collect();
            (labels, Some(res.inertia), None, *k)
        }
        ClusteringConfig::Dbscan { eps, min_pts } => {
            let eps = eps.unwrap_or_else(|| eval::choose_eps(&points, *min_pts));
            let res = eval::dbscan(&points, eps, *min_pts);
            let noise = res.noise_fraction();
            (res.labels, None, Some(noise), res.n_clusters)
        }
    };

    let truth_labels = blocks
        .as_ref()
        .map(|b| sbm::class_labels(&complex, config.k, b))
        .transpose()
        .map_err(|e| e.in_stage("eval"))?;
    let rand_index = truth_labels
        .as_ref()
        .map(|truth| {
            let truth_opt: Vec<Option<usize>> = truth.iter().map(|&l| Some(l)).collect();
            eval::rand_index_filtered(&truth_opt, &cluster_labels)
        })
        .transpose()
        .map_err(|e| e.in_stage("eval"))?;

    let metrics = RunMetrics {
        simplex_counts,
        rand_index,
        inertia,
        noise_fraction,
        n_clusters,
        epoch_losses: report.epoch_losses.clone(),
        token_count: report.token_count,
        wall_time_secs: started.elapsed().as_secs_f64(),
    };
    Ok(Execution {
        complex,
        blocks,
        truth_labels,
        corpus,
        model,
        report,
        cluster_labels,
        metrics,
        seeds,
        vertex_map,
    })
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    Ok(BufWriter::new(fs::File::create(path)?))
}

/// Execute a run and write the artifact directory:
/// `<out>/<run-id>/{manifest.json, complex.txt, walks.txt, embedding.txt,
/// clusters.csv, pca.csv, scatter.svg}` plus `labels.csv` for SBM inputs.
/// Artifacts are written as stages complete, so a failing stage leaves the
/// earlier outputs in place.
pub fn run_pipeline(config: &RunConfig) -> Result<(PathBuf, Manifest)> {
    config.validate()?;
    let dir = config.output_dir.join(config.run_id());
    fs::create_dir_all(&dir)?;
    let exec = execute(config)?;

    exec.complex
        .write_simplex_list(create(&dir.join("complex.txt"))?)?;
    if let Some(map) = &exec.vertex_map {
        let mut w = create(&dir.join("vertex_map.csv"))?;
        use std::io::Write;
        writeln!(w, "dense_id,original_id")?;
        for (dense, orig) in map.iter().enumerate() {
            writeln!(w, "{dense},{orig}")?;
        }
    }
    exec.corpus.write(create(&dir.join("walks.txt"))?)?;

    let simplices = exec.complex.simplices(config.k);
    embed::write_embedding(&exec.model, simplices, create(&dir.join("embedding.txt"))?)?;

    let keys: Vec<String> = simplices.iter().map(|s| s.key()).collect();
    eval::write_clusters_csv(&keys, &exec.cluster_labels, create(&dir.join("clusters.csv"))?)?;

    let points = PointCloud::from(&exec.model);
    let pca = eval::pca_project(&points, 2.min(points.dim())).map_err(|e| e.in_stage("eval"))?;
    eval::write_pca_csv(&keys, &pca.projected, create(&dir.join("pca.csv"))?)?;
    if pca.projected.dim() == 2 {
        eval::write_scatter_svg(
            &pca.projected,
            &exec.cluster_labels,
            create(&dir.join("scatter.svg"))?,
        )?;
    }

    if let Some(blocks) = &exec.blocks {
        sbm::write_labels_csv(&exec.complex, config.k, blocks, create(&dir.join("labels.csv"))?)?;
    }

    let manifest = Manifest {
        config: config.clone(),
        seeds: exec.seeds,
        metrics: exec.metrics,
    };
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Config(format!("manifest serialization: {e}")))?;
    fs::write(dir.join("manifest.json"), json)?;
    Ok((dir, manifest))
}

/// Sweep over feature dimensions and walk counts with repetitions, the
/// layout commonly used for sweep result tables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentGrid {
    pub dims: Vec<usize>,
    pub walk_counts: Vec<usize>,
    pub repetitions: usize,
    /// Parallel run cap; defaults to one cell at a time with inner
    /// parallelism left to the walk generator.
    #[serde(default = "default_workers")]
    pub workers: usize,
}

fn default_workers() -> usize {
    1
}

#[derive(Debug, Clone, Serialize)]
pub struct GridRow {
    pub dim: usize,
    pub walks: usize,
    pub repetition: usize,
    pub rand_index: Option<f64>,
    pub inertia: Option<f64>,
    pub noise_fraction: Option<f64>,
    pub wall_time_secs: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AggregateRow {
    pub dim: usize,
    pub walks: usize,
    pub mean_rand_index: f64,
    pub std_rand_index: f64,
    pub runs: usize,
}

pub struct GridResults {
    pub rows: Vec<GridRow>,
    pub aggregate: Vec<AggregateRow>,
}

/// Run the grid; failures are recorded per row and do not stop the sweep.
/// Each cell/repetition gets a seed derived from the base seed, so the
/// result is independent of scheduling.
pub fn run_grid(grid: &ExperimentGrid, base: &RunConfig) -> Result<GridResults> {
    if grid.dims.is_empty() || grid.walk_counts.is_empty() || grid.repetitions == 0 {
        return Err(Error::Config("grid must be non-empty".into()));
    }
    let mut cells = Vec::new();
    for (di, &dim) in grid.dims.iter().enumerate() {
        for (ni, &walks) in grid.walk_counts.iter().enumerate() {
            for rep in 0..grid.repetitions {
                let cell_id = (di * grid.walk_counts.len() + ni) as u64;
                cells.push((dim, walks, rep, cell_id));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(grid.workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let rows: Vec<GridRow> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(dim, walks, rep, cell_id)| {
                let mut config = base.clone();
                config.embed.dim = dim;
                config.walks_per_simplex = walks;
                config.seed = derive_seed(base.seed, cell_id, rep as u64);
                let started = Instant::now();
                match execute(&config) {
                    Ok(exec) => GridRow {
                        dim,
                        walks,
                        repetition: rep,
                        rand_index: exec.metrics.rand_index,
                        inertia: exec.metrics.inertia,
                        noise_fraction: exec.metrics.noise_fraction,
                        wall_time_secs: started.elapsed().as_secs_f64(),
                        error: None,
                    },
                    Err(e) => GridRow {
                        dim,
                        walks,
                        repetition: rep,
                        rand_index: None,
                        inertia: None,
                        noise_fraction: None,
                        wall_time_secs: started.elapsed().as_secs_f64(),
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect()
    });

    let mut aggregate = Vec::new();
    for &dim in &grid.dims {
        for &walks in &grid.walk_counts {
            let values: Vec<f64> = rows
                .iter()
                .filter(|r| r.dim == dim && r.walks == walks)
                .filter_map(|r| r.rand_index)
                .collect();
            if values.is_empty() {
                continue;
            }
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                / values.len() as f64;
            aggregate.push(AggregateRow {
                dim,
                walks,
                mean_rand_index: mean,
                std_rand_index: var.sqrt(),
                runs: values.len(),
            });
        }
    }
    Ok(GridResults { rows, aggregate })
}

fn fmt6(x: f64) -> String {
    format!("{x:.5e}")
}

impl GridResults {
    /// One row per (dim, walks, repetition): `runs.csv`.
    pub fn write_runs_csv(&self, mut w: impl std::io::Write) -> Result<()> {
        writeln!(
            w,
            "dim,walks,repetition,rand_index,inertia,noise_fraction,wall_time_secs,error"
        )?;
        for r in &self.rows {
            let opt = |v: Option<f64>| v.map(fmt6).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.dim,
                r.walks,
                r.repetition,
                opt(r.rand_index),
                opt(r.inertia),
                opt(r.noise_fraction),
                fmt6(r.wall_time_secs),
                r.error.clone().unwrap_or_default()
            )?;
        }
        Ok(())
    }

    /// Mean +/- std per grid cell.
    pub fn write_aggregate_csv(&self, mut w: impl std::io::Write) -> Result<()> {
        writeln!(w, "dim,walks,mean_rand_index,std_rand_index,runs")?;
        for a in &self.aggregate {
            writeln!(
                w,
                "{},{},{},{},{}",
                a.dim,
                a.walks,
                fmt6(a.mean_rand_index),
                fmt6(a.std_rand_index),
                a.runs
            )?;
        }
        Ok(())
    }
}
