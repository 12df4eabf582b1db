use ksimplex2vec::walks::{generate_corpus, TransitionMatrix};
use ksimplex2vec::{Graph, SimplicialComplex, WalkMode};

// Random walks on the edges of a small clique complex, stepping through
// shared vertices and shared triangles with equal probability per neighbor.
fn main() {
    let graph = Graph::new(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
    let complex = SimplicialComplex::clique_complex(&graph, 2).unwrap();

    let matrix = TransitionMatrix::build(&complex, 1, WalkMode::Both).unwrap();
    println!("transition matrix over {} edges:", matrix.size());
    for i in 0..matrix.size() {
        let key = complex.simplices(1)[i].key();
        let row: Vec<String> = matrix
            .support(i)
            .iter()
            .map(|&j| format!("{}:{:.3}", complex.simplices(1)[j].key(), matrix.prob(i, j)))
            .collect();
        println!("  {key} -> {}", row.join(" "));
    }

    let corpus = generate_corpus(&complex, 1, 4, 10, WalkMode::Both, 7).unwrap();
    println!("\n{} walks of length {}:", corpus.walks.len(), corpus.walk_len);
    for walk in corpus.walks.iter().take(4) {
        let path: Vec<String> = walk.iter().map(|&i| complex.simplices(1)[i].key()).collect();
        println!("  {}", path.join(" -> "));
    }
}
