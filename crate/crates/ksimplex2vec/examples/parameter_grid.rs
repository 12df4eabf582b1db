use ksimplex2vec::embed::Hyperparams;
use ksimplex2vec::pipeline::{self, ClusteringConfig, ExperimentGrid, InputSource, RunConfig};
use ksimplex2vec::{TrainMode, WalkMode};

// A small sweep over feature dimension and walk count, aggregated as
// mean +/- std of the Rand index per cell. A full-size sweep
// uses dims 10,20,30 x walks 10..50 with 10 repetitions; that takes a
// while, so this runs a 2x2 slice with 2 repetitions.
fn main() {
    let base = RunConfig {
        input: InputSource::Sbm {
            block_sizes: vec![20, 20, 20],
            p_in: 0.8,
            p_out: 0.3,
        },
        k: 1,
        max_dim: 2,
        mode: WalkMode::Both,
        walks_per_simplex: 10,
        walk_len: 20,
        embed: Hyperparams { dim: 10, ..Default::default() },
        clustering: ClusteringConfig::Kmeans { k: 6, restarts: 10 },
        cluster_components: 2,
        seed: 1,
        output_dir: "target/grid".into(),
        train_mode: TrainMode::Sequential,
    };
    let grid = ExperimentGrid {
        dims: vec![10, 20],
        walk_counts: vec![10, 20],
        repetitions: 2,
        workers: 1,
    };
    let results = pipeline::run_grid(&grid, &base).unwrap();
    results.write_aggregate_csv(std::io::stdout().lock()).unwrap();
}
