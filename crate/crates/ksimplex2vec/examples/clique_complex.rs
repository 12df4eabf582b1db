use ksimplex2vec::{Graph, SimplicialComplex};

fn main() {
    // Two triangles sharing an edge, plus a pendant vertex.
    let graph = Graph::new(
        5,
        vec![(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4)],
    )
    .unwrap();

    let complex = SimplicialComplex::clique_complex(&graph, 2).unwrap();
    for k in 0..=complex.dim() {
        println!("{} simplices of dimension {k}:", complex.count(k));
        for s in complex.simplices(k) {
            println!("  {}", s.key());
        }
    }

    // Neighbor queries on the shared edge {1,2}.
    let edge = ksimplex2vec::Simplex::new(vec![1, 2]).unwrap();
    let i = complex.index_of(&edge).unwrap();
    let upper = complex.upper_neighbors(1, i);
    let lower = complex.lower_neighbors(1, i).unwrap();
    println!(
        "edge {}: {} upper neighbors, {} lower neighbors",
        edge.key(),
        upper.len(),
        lower.len()
    );
    for j in upper {
        println!("  shares a triangle with {}", complex.simplices(1)[j].key());
    }
}
