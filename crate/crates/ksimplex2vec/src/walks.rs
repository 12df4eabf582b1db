//! Random walks on the k-simplices of a complex: the row-stochastic
//! transition matrix for a walk mode, and corpus generation (N walks of
//! length l from every k-simplex).

use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{AdjacencyStructure, SimplicialComplex};
use crate::rng::{master_rng, stream_rng};
use crate::{Error, Result};

/// Which connections a walker may use between k-simplices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkMode {
    /// Upper and lower connections together.
    Both,
    /// Only through shared (k+1)-cofaces.
    UpperOnly,
    /// Only through shared (k-1)-faces.
    LowerOnly,
}

impl std::fmt::Display for WalkMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            WalkMode::Both => "both",
            WalkMode::UpperOnly => "upper",
            WalkMode::LowerOnly => "lower",
        };
        f.write_str(s)
    }
}

impl FromStr for WalkMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<WalkMode> {
        match s {
            "both" => Ok(WalkMode::Both),
            "upper" => Ok(WalkMode::UpperOnly),
            "lower" => Ok(WalkMode::LowerOnly),
            other => Err(Error::Config(format!("unknown walk mode '{other}'"))),
        }
    }
}

/// Row-stochastic transition matrix over X_k, stored sparse. Each row is
/// uniform over the mode's neighbor set; isolated simplices self-loop.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    rows: Vec<Row>,
}

#[derive(Debug, Clone)]
struct Row {
    targets: Vec<usize>,
    // cumulative probabilities, last entry 1.0; sampled by inversion
    cum: Vec<f64>,
}

impl Row {
    fn uniform(targets: Vec<usize>) -> Row {
        let n = targets.len() as f64;
        let cum = (1..=targets.len()).map(|i| i as f64 / n).collect();
        Row { targets, cum }
    }
}

impl TransitionMatrix {
    /// Build P for dimension `k` under `mode`.
    pub fn build(complex: &SimplicialComplex, k: usize, mode: WalkMode) -> Result<TransitionMatrix> {
        let n = complex.count(k);
        if n == 0 {
            return Err(Error::EmptyDimension(k));
        }
        let adj = AdjacencyStructure::build(complex, k);
        let rows = (0..n)
            .map(|i| {
                let targets = match mode {
                    WalkMode::UpperOnly => adj.upper[i].clone(),
                    WalkMode::LowerOnly => adj.lower[i].clone(),
                    WalkMode::Both => merge_sorted(&adj.upper[i], &adj.lower[i]),
                };
                if targets.is_empty() {
                    Row::uniform(vec![i])
                } else {
                    Row::uniform(targets)
                }
            })
            .collect();
        Ok(TransitionMatrix { rows })
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    /// P[i][j].
    pub fn prob(&self, i: usize, j: usize) -> f64 {
        let row = &self.rows[i];
        if row.targets.binary_search(&j).is_ok() {
            1.0 / row.targets.len() as f64
        } else {
            0.0
        }
    }

    /// Indices with positive probability in row `i` (sorted).
    pub fn support(&self, i: usize) -> &[usize] {
        &self.rows[i].targets
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        let row = &self.rows[i];
        row.targets.len() as f64 * (1.0 / row.targets.len() as f64)
    }

    /// Sample one step from row `i` by cumulative-sum inversion.
    pub fn sample_step(&self, i: usize, rng: &mut impl Rng) -> usize {
        let row = &self.rows[i];
        let u: f64 = rng.gen();
        let pos = row.cum.partition_point(|&c| c <= u);
        row.targets[pos.min(row.targets.len() - 1)]
    }
}

fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(a);
    out.extend_from_slice(b);
    out.sort_unstable();
    out.dedup();
    out
}

/// One random walk of `l` steps starting at `start`.
pub fn simplicial_walk(
    start: usize,
    l: usize,
    matrix: &TransitionMatrix,
    rng: &mut impl Rng,
) -> Vec<usize> {
    let mut walk = Vec::with_capacity(l + 1);
    walk.push(start);
    let mut current = start;
    for _ in 0..l {
        current = matrix.sample_step(current, rng);
        walk.push(current);
    }
    walk
}

/// Training corpus: N walks per k-simplex, each of l+1 indices.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkCorpus {
    pub k: usize,
    pub walks_per_simplex: usize,
    pub walk_len: usize,
    pub mode: WalkMode,
    pub seed: u64,
    /// Vocabulary size |X_k|.
    pub n_simplices: usize,
    pub walks: Vec<Vec<usize>>,
}

/// Generate the corpus in Algorithm-1 order: repetition-major, then start
/// simplex. Walks run in parallel; walk (start, rep) draws from its own
/// RNG stream derived from the master seed, so the output is identical to
/// the sequential mode regardless of scheduling.
pub fn generate_corpus(
    complex: &SimplicialComplex,
    k: usize,
    walks_per_simplex: usize,
    walk_len: usize,
    mode: WalkMode,
    seed: u64,
) -> Result<WalkCorpus> {
    let matrix = TransitionMatrix::build(complex, k, mode)?;
    let n = matrix.size();
    let walks: Vec<Vec<usize>> = (0..walks_per_simplex * n)
        .into_par_iter()
        .map(|idx| {
            let (rep, start) = (idx / n, idx % n);
            let mut rng = stream_rng(seed, start as u64, rep as u64);
            simplicial_walk(start, walk_len, &matrix, &mut rng)
        })
        .collect();
    Ok(WalkCorpus {
        k,
        walks_per_simplex,
        walk_len,
        mode,
        seed,
        n_simplices: n,
        walks,
    })
}

/// Strictly sequential corpus generation; byte-identical to
/// `generate_corpus` with the same arguments.
pub fn generate_corpus_sequential(
    complex: &SimplicialComplex,
    k: usize,
    walks_per_simplex: usize,
    walk_len: usize,
    mode: WalkMode,
    seed: u64,
) -> Result<WalkCorpus> {
    let matrix = TransitionMatrix::build(complex, k, mode)?;
    let n = matrix.size();
    let mut walks = Vec::with_capacity(walks_per_simplex * n);
    for rep in 0..walks_per_simplex {
        for start in 0..n {
            let mut rng = stream_rng(seed, start as u64, rep as u64);
            walks.push(simplicial_walk(start, walk_len, &matrix, &mut rng));
        }
    }
    Ok(WalkCorpus {
        k,
        walks_per_simplex,
        walk_len,
        mode,
        seed,
        n_simplices: n,
        walks,
    })
}

/// Normalized visit counts of one long walk; diagnostic only.
pub fn stationary_check(
    matrix: &TransitionMatrix,
    steps: usize,
    start: usize,
    seed: u64,
) -> Vec<f64> {
    let mut rng = master_rng(seed);
    let mut counts = vec![0usize; matrix.size()];
    let mut current = start;
    counts[current] += 1;
    for _ in 0..steps {
        current = matrix.sample_step(current, &mut rng);
        counts[current] += 1;
    }
    let total = (steps + 1) as f64;
    counts.iter().map(|&c| c as f64 / total).collect()
}

impl WalkCorpus {
    /// Corpus file: header `#k=<k> N=<N> l=<l> mode=<mode> seed=<seed>`,
    /// then one walk per line, space-separated simplex indices.
    pub fn write(&self, mut w: impl Write) -> Result<()> {
        writeln!(
            w,
            "#k={} N={} l={} mode={} seed={}",
            self.k, self.walks_per_simplex, self.walk_len, self.mode, self.seed
        )?;
        let mut line = String::new();
        for walk in &self.walks {
            line.clear();
            for (i, idx) in walk.iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                line.push_str(&idx.to_string());
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn read(reader: impl Read) -> Result<WalkCorpus> {
        let mut lines = BufReader::new(reader).lines();
        let header = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty corpus file".into(),
        })??;
        let header = header.strip_prefix('#').ok_or(Error::Parse {
            line: 1,
            msg: "missing # header".into(),
        })?;
        let mut fields = std::collections::HashMap::new();
        for kv in header.split_whitespace() {
            let (key, value) = kv.split_once('=').ok_or(Error::Parse {
                line: 1,
                msg: format!("bad header field '{kv}'"),
            })?;
            fields.insert(key.to_string(), value.to_string());
        }
        let get = |key: &str| {
            fields.get(key).cloned().ok_or(Error::Parse {
                line: 1,
                msg: format!("header missing '{key}'"),
            })
        };
        let parse_num = |key: &str| -> Result<usize> {
            get(key)?.parse().map_err(|e| Error::Parse {
                line: 1,
                msg: format!("bad '{key}': {e}"),
            })
        };
        let mut walks = Vec::new();
        let mut max_idx = 0usize;
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let walk = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|e| Error::Parse {
                        line: lineno + 2,
                        msg: format!("{e}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            max_idx = max_idx.max(walk.iter().copied().max().unwrap_or(0));
            walks.push(walk);
        }
        Ok(WalkCorpus {
            k: parse_num("k")?,
            walks_per_simplex: parse_num("N")?,
            walk_len: parse_num("l")?,
            mode: get("mode")?.parse()?,
            seed: get("seed")?.parse().map_err(|e| Error::Parse {
                line: 1,
                msg: format!("bad 'seed': {e}"),
            })?,
            n_simplices: max_idx + 1,
            walks,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Graph;

    fn triangle_complex() -> SimplicialComplex {
        let g = Graph::new(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        SimplicialComplex::clique_complex(&g, 2).unwrap()
    }

    fn c4_complex() -> SimplicialComplex {
        let g = Graph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        SimplicialComplex::clique_complex(&g, 2).unwrap()
    }

    #[test]
    fn triangle_edges_have_two_neighbors() {
        let x = triangle_complex();
        let p = TransitionMatrix::build(&x, 1, WalkMode::Both).unwrap();
        for i in 0..3 {
            assert_eq!(p.support(i).len(), 2);
            assert!(!p.support(i).contains(&i));
            for &j in p.support(i) {
                assert!((p.prob(i, j) - 0.5).abs() < 1e-15);
            }
            assert!((p.row_sum(i) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn isolated_edges_self_loop() {
        // two disjoint edges: lower-only neighbors are empty
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        let x = SimplicialComplex::clique_complex(&g, 2).unwrap();
        let p = TransitionMatrix::build(&x, 1, WalkMode::Both).unwrap();
        for i in 0..2 {
            assert_eq!(p.support(i), &[i]);
            assert!((p.prob(i, i) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn c4_upper_only_is_all_self_loops() {
        let x = c4_complex();
        let p = TransitionMatrix::build(&x, 1, WalkMode::UpperOnly).unwrap();
        for i in 0..4 {
            assert_eq!(p.support(i), &[i]);
        }
    }

    #[test]
    fn empty_dimension_is_error() {
        let x = c4_complex();
        assert!(matches!(
            TransitionMatrix::build(&x, 2, WalkMode::Both),
            Err(Error::EmptyDimension(2))
        ));
    }

    #[test]
    fn k0_reduction_matches_simple_random_walk() {
        let g = Graph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]).unwrap();
        let x = SimplicialComplex::clique_complex(&g, 2).unwrap();
        let p = TransitionMatrix::build(&x, 0, WalkMode::Both).unwrap();
        for v in 0..4 {
            let deg = g.neighbors(v).len() as f64;
            assert_eq!(p.support(v), g.neighbors(v));
            for &u in g.neighbors(v) {
                assert!((p.prob(v, u) - 1.0 / deg).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn walk_length_and_validity() {
        let x = triangle_complex();
        let p = TransitionMatrix::build(&x, 1, WalkMode::Both).unwrap();
        let mut rng = master_rng(5);
        let walk = simplicial_walk(0, 10, &p, &mut rng);
        assert_eq!(walk.len(), 11);
        assert_eq!(walk[0], 0);
        for pair in walk.windows(2) {
            assert!(p.prob(pair[0], pair[1]) > 0.0);
        }
        let trivial = simplicial_walk(2, 0, &p, &mut rng);
        assert_eq!(trivial, vec![2]);
    }

    #[test]
    fn one_step_frequencies_near_uniform() {
        let x = triangle_complex();
        let p = TransitionMatrix::build(&x, 1, WalkMode::Both).unwrap();
        let mut rng = master_rng(11);
        let mut counts = [0usize; 3];
        let trials = 10_000;
        for _ in 0..trials {
            counts[p.sample_step(0, &mut rng)] += 1;
        }
        assert_eq!(counts[0], 0);
        for &c in &counts[1..] {
            let freq = c as f64 / trials as f64;
            assert!((freq - 0.5).abs() < 0.02, "freq {freq}");
        }
    }

    #[test]
    fn corpus_shape_and_determinism() {
        let x = triangle_complex();
        let c1 = generate_corpus(&x, 1, 4, 7, WalkMode::Both, 9).unwrap();
        assert_eq!(c1.walks.len(), 12);
        assert!(c1.walks.iter().all(|w| w.len() == 8));
        // exactly N walks start at each simplex
        for s in 0..3 {
            let starts = c1.walks.iter().filter(|w| w[0] == s).count();
            assert_eq!(starts, 4);
        }
        let c2 = generate_corpus(&x, 1, 4, 7, WalkMode::Both, 9).unwrap();
        assert_eq!(c1, c2);
        let seq = generate_corpus_sequential(&x, 1, 4, 7, WalkMode::Both, 9).unwrap();
        assert_eq!(c1, seq);
    }

    #[test]
    fn mode_support_union() {
        let (g, _) = crate::sbm::sample_sbm(&[6, 6], 0.9, 0.4, 2).unwrap();
        let x = SimplicialComplex::clique_complex(&g, 2).unwrap();
        let both = TransitionMatrix::build(&x, 1, WalkMode::Both).unwrap();
        let upper = TransitionMatrix::build(&x, 1, WalkMode::UpperOnly).unwrap();
        let lower = TransitionMatrix::build(&x, 1, WalkMode::LowerOnly).unwrap();
        for i in 0..both.size() {
            if both.support(i) == [i] {
                continue;
            }
            let mut union: Vec<usize> = upper
                .support(i)
                .iter()
                .chain(lower.support(i))
                .copied()
                .filter(|&j| j != i)
                .collect();
            union.sort_unstable();
            union.dedup();
            assert_eq!(both.support(i), union.as_slice());
        }
    }

    #[test]
    fn stationary_uniform_on_triangle() {
        let x = triangle_complex();
        let p = TransitionMatrix::build(&x, 1, WalkMode::Both).unwrap();
        let occ = stationary_check(&p, 100_000, 0, 3);
        assert!((occ.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for &o in &occ {
            assert!((o - 1.0 / 3.0).abs() < 0.02, "occupancy {o}");
        }
    }

    #[test]
    fn corpus_roundtrip() {
        let x = triangle_complex();
        let c = generate_corpus(&x, 1, 2, 5, WalkMode::LowerOnly, 17).unwrap();
        let mut buf = Vec::new();
        c.write(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("#k=1 N=2 l=5 mode=lower seed=17\n"));
        let back = WalkCorpus::read(buf.as_slice()).unwrap();
        assert_eq!(back, c);
    }
}
