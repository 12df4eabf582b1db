use ksimplex2vec::embed::{self, Hyperparams};
use ksimplex2vec::walks::generate_corpus;
use ksimplex2vec::{Graph, SimplicialComplex, TrainMode, WalkMode};

// Stage-by-stage use of the library, without the pipeline wrapper:
// graph -> clique complex -> walk corpus -> skip-gram embedding.
fn main() {
    // A barbell: two K4 blocks joined by a bridge.
    let mut edges = Vec::new();
    for block in [0usize, 4] {
        for a in 0..4 {
            for b in (a + 1)..4 {
                edges.push((block + a, block + b));
            }
        }
    }
    edges.push((3, 4));
    let graph = Graph::new(8, edges).unwrap();
    let complex = SimplicialComplex::clique_complex(&graph, 2).unwrap();
    println!("{} edges in the complex", complex.count(1));

    let corpus = generate_corpus(&complex, 1, 20, 15, WalkMode::Both, 11).unwrap();
    let hp = Hyperparams { dim: 8, seed: 3, ..Default::default() };
    let (model, report) = embed::train(&corpus, &hp, TrainMode::Sequential).unwrap();
    println!(
        "trained {} vectors of dim {} ({} tokens, {:.2}s)",
        model.len(),
        model.dim(),
        report.token_count,
        report.wall_time.as_secs_f64()
    );

    // Edges inside one block should sit closer together than edges in
    // opposite blocks.
    let dot = |a: usize, b: usize| -> f64 {
        model.vector(a).iter().zip(model.vector(b)).map(|(x, y)| x * y).sum()
    };
    let left = complex.index_of(&ksimplex2vec::Simplex::new(vec![0, 1]).unwrap()).unwrap();
    let left2 = complex.index_of(&ksimplex2vec::Simplex::new(vec![2, 3]).unwrap()).unwrap();
    let right = complex.index_of(&ksimplex2vec::Simplex::new(vec![4, 5]).unwrap()).unwrap();
    println!("<F(01), F(23)> = {:.4}  (same block)", dot(left, left2));
    println!("<F(01), F(45)> = {:.4}  (opposite blocks)", dot(left, right));

    embed::write_embedding(&model, complex.simplices(1), std::io::stdout().lock()).unwrap();
}
