//! Stochastic block model generation and ground-truth class labels for the
//! simplices of the resulting clique complex.

use std::collections::BTreeMap;
use std::io::Write;

use rand::Rng;

use crate::complex::{Graph, Simplex, SimplicialComplex, VertexId};
use crate::rng::master_rng;
use crate::{Error, Result};

/// Map from vertex to block index. Blocks are contiguous: the first
/// `block_sizes[0]` vertices form block 0, and so on.
#[derive(Debug, Clone)]
pub struct BlockAssignment {
    block: Vec<usize>,
}

impl BlockAssignment {
    pub fn contiguous(block_sizes: &[usize]) -> BlockAssignment {
        let block = block_sizes
            .iter()
            .enumerate()
            .flat_map(|(b, &size)| std::iter::repeat(b).take(size))
            .collect();
        BlockAssignment { block }
    }

    pub fn block_of(&self, v: VertexId) -> Result<usize> {
        self.block.get(v).copied().ok_or(Error::UnknownVertex(v))
    }

    pub fn vertex_count(&self) -> usize {
        self.block.len()
    }

    /// Per-vertex block labels, aligned with vertex ids.
    pub fn labels(&self) -> &[usize] {
        &self.block
    }
}

/// Canonical class of a simplex: the sorted multiset of its vertices'
/// blocks. For 3 blocks there are 6 edge classes and 10 triangle classes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimplexClass(Vec<usize>);

impl SimplexClass {
    pub fn blocks(&self) -> &[usize] {
        &self.0
    }

    /// Serialization used in the labels CSV, e.g. `0|0|2`.
    pub fn key(&self) -> String {
        self.0
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// Sample a stochastic block model graph. Each intra-block vertex pair is
/// an edge with probability `p_in`, each inter-block pair with `p_out`.
///
/// One RNG stream is consumed in lexicographic pair order (u, v) with
/// u < v, so the sample is reproducible bit-for-bit from the seed.
pub fn sample_sbm(
    block_sizes: &[usize],
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<(Graph, BlockAssignment)> {
    if block_sizes.is_empty() || block_sizes.contains(&0) {
        return Err(Error::Config("block sizes must be positive".into()));
    }
    if !(0.0..=1.0).contains(&p_out) || !(p_out..=1.0).contains(&p_in) {
        return Err(Error::Config(format!(
            "need 0 <= p_out <= p_in <= 1, got p_in={p_in} p_out={p_out}"
        )));
    }
    let blocks = BlockAssignment::contiguous(block_sizes);
    let n = blocks.vertex_count();
    let mut rng = master_rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = if blocks.block[u] == blocks.block[v] {
                p_in
            } else {
                p_out
            };
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Ok((Graph::new(n, edges)?, blocks))
}

/// Class of a single simplex under a block assignment.
pub fn simplex_class(s: &Simplex, blocks: &BlockAssignment) -> Result<SimplexClass> {
    let mut bs = s
        .vertices()
        .iter()
        .map(|&v| blocks.block_of(v))
        .collect::<Result<Vec<_>>>()?;
    bs.sort_unstable();
    Ok(SimplexClass(bs))
}

/// Dense ground-truth label per k-simplex, ordered lexicographically by
/// canonical class so labels are stable across runs.
pub fn class_labels(
    complex: &SimplicialComplex,
    k: usize,
    blocks: &BlockAssignment,
) -> Result<Vec<usize>> {
    let classes = complex
        .simplices(k)
        .iter()
        .map(|s| simplex_class(s, blocks))
        .collect::<Result<Vec<_>>>()?;
    let mut distinct: Vec<&SimplexClass> = classes.iter().collect();
    distinct.sort_unstable();
    distinct.dedup();
    let rank: BTreeMap<&SimplexClass, usize> =
        distinct.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    Ok(classes.iter().map(|c| rank[c]).collect())
}

/// Labels CSV: header `simplex,class_multiset,label`.
pub fn write_labels_csv(
    complex: &SimplicialComplex,
    k: usize,
    blocks: &BlockAssignment,
    mut w: impl Write,
) -> Result<()> {
    let labels = class_labels(complex, k, blocks)?;
    writeln!(w, "simplex,class_multiset,label")?;
    for (s, label) in complex.simplices(k).iter().zip(&labels) {
        let class = simplex_class(s, blocks)?;
        writeln!(w, "{},{},{}", s.key(), class.key(), label)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_block_full_probability_is_complete_graph() {
        let (g, _) = sample_sbm(&[4], 1.0, 1.0, 0).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 6);
    }

    #[test]
    fn zero_probabilities_give_empty_graph() {
        let (g, _) = sample_sbm(&[3, 2], 0.0, 0.0, 0).unwrap();
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn seed_determinism() {
        let (g1, _) = sample_sbm(&[20, 20, 20], 0.8, 0.3, 123).unwrap();
        let (g2, _) = sample_sbm(&[20, 20, 20], 0.8, 0.3, 123).unwrap();
        assert_eq!(g1.edges(), g2.edges());
        let (g3, _) = sample_sbm(&[20, 20, 20], 0.8, 0.3, 124).unwrap();
        assert_ne!(g1.edges(), g3.edges());
    }

    #[test]
    fn paper_parameters_edge_count_near_expectation() {
        // E[edges] = 3*C(20,2)*0.8 + 3*400*0.3 = 456 + 360 = 816
        let mut total = 0usize;
        let seeds = 20;
        for seed in 0..seeds {
            let (g, _) = sample_sbm(&[20, 20, 20], 0.8, 0.3, seed).unwrap();
            total += g.edge_count();
        }
        let mean = total as f64 / seeds as f64;
        assert!((mean - 816.0).abs() < 30.0, "mean edge count {mean}");
    }

    #[test]
    fn simplex_classes() {
        let blocks = BlockAssignment::contiguous(&[2, 2, 2]);
        let e = Simplex::new(vec![0, 1]).unwrap();
        assert_eq!(simplex_class(&e, &blocks).unwrap().blocks(), &[0, 0]);
        let t = Simplex::new(vec![0, 1, 4]).unwrap();
        assert_eq!(simplex_class(&t, &blocks).unwrap().blocks(), &[0, 0, 2]);
        let t = Simplex::new(vec![0, 2, 4]).unwrap();
        assert_eq!(simplex_class(&t, &blocks).unwrap().blocks(), &[0, 1, 2]);
    }

    #[test]
    fn unknown_vertex_is_error() {
        let blocks = BlockAssignment::contiguous(&[2]);
        let e = Simplex::new(vec![0, 5]).unwrap();
        assert!(matches!(
            simplex_class(&e, &blocks),
            Err(Error::UnknownVertex(5))
        ));
    }

    #[test]
    fn class_counts_for_three_blocks() {
        let (g, blocks) = sample_sbm(&[20, 20, 20], 0.8, 0.3, 7).unwrap();
        let x = SimplicialComplex::clique_complex(&g, 2).unwrap();
        let edge_labels = class_labels(&x, 1, &blocks).unwrap();
        let tri_labels = class_labels(&x, 2, &blocks).unwrap();
        let distinct = |ls: &[usize]| {
            let mut v = ls.to_vec();
            v.sort_unstable();
            v.dedup();
            v.len()
        };
        assert_eq!(distinct(&edge_labels), 6);
        assert_eq!(distinct(&tri_labels), 10);
    }

    #[test]
    fn single_block_all_label_zero() {
        let (g, blocks) = sample_sbm(&[8], 0.9, 0.9, 3).unwrap();
        let x = SimplicialComplex::clique_complex(&g, 2).unwrap();
        let labels = class_labels(&x, 1, &blocks).unwrap();
        assert!(labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn labels_csv_format() {
        let blocks = BlockAssignment::contiguous(&[2, 1]);
        let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let x = SimplicialComplex::clique_complex(&g, 2).unwrap();
        let mut out = Vec::new();
        write_labels_csv(&x, 1, &blocks, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "simplex,class_multiset,label\n0-1,0|0,0\n1-2,0|1,1\n");
    }
}
