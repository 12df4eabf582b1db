//! Simplicial complexes, clique-complex construction, and the upper/lower
//! neighbor structure that random walks are built on.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::{Error, Result};

pub type VertexId = usize;

/// A k-simplex: a set of k+1 vertices, stored sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    vertices: Vec<VertexId>,
}

impl Simplex {
    /// Canonicalize a vertex sequence into a simplex.
    pub fn new(vertices: impl Into<Vec<VertexId>>) -> Result<Self> {
        let mut vertices = vertices.into();
        if vertices.is_empty() {
            return Err(Error::EmptySimplex);
        }
        vertices.sort_unstable();
        for w in vertices.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateVertex(w[0]));
            }
        }
        Ok(Simplex { vertices })
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    /// Dimension k = number of vertices - 1.
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// The (k-1)-faces, each obtained by dropping one vertex.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        (0..self.vertices.len()).map(move |skip| {
            let vertices: Vec<VertexId> = self
                .vertices
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, &v)| v)
                .collect();
            Simplex { vertices }
        })
    }

    /// Serialization used in CSV and embedding files: `v0-v1-...-vk`.
    pub fn key(&self) -> String {
        self.vertices
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("-")
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.key())
    }
}

/// A simple undirected graph over dense vertex ids `[0, n)`.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<(VertexId, VertexId)>,
    adjacency: Vec<Vec<VertexId>>,
}

impl Graph {
    /// Build from an edge list. Ids must be dense in `[0, n)`; loops and
    /// duplicate edges are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (VertexId, VertexId)>) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::Config(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::Config(format!(
                    "edge ({u},{v}) out of range for {n} vertices"
                )));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            if !seen.insert((a, b)) {
                continue; // duplicate edge, keep graph simple
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
            out.push((a, b));
        }
        for nb in &mut adjacency {
            nb.sort_unstable();
        }
        out.sort_unstable();
        Ok(Graph {
            n,
            edges: out,
            adjacency,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as sorted pairs (u < v), lexicographic order.
    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Parse the edge-list text format: one edge per line, two
    /// whitespace-separated non-negative integers, `#` comment lines
    /// ignored. Sparse ids are re-indexed densely; the returned map gives
    /// the original id of each dense vertex.
    pub fn from_edge_list_reader(reader: impl Read) -> Result<(Graph, Vec<u64>)> {
        let mut raw: Vec<(u64, u64)> = Vec::new();
        for (lineno, line) in BufReader::new(reader).lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<u64> {
                tok.ok_or(Error::Parse {
                    line: lineno + 1,
                    msg: "expected two vertex ids".into(),
                })?
                .parse()
                .map_err(|e| Error::Parse {
                    line: lineno + 1,
                    msg: format!("{e}"),
                })
            };
            let u = parse(it.next())?;
            let v = parse(it.next())?;
            if it.next().is_some() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: "expected exactly two vertex ids".into(),
                });
            }
            raw.push((u, v));
        }
        let mut ids: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
        ids.sort_unstable();
        ids.dedup();
        let dense: HashMap<u64, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges = raw.iter().map(|&(u, v)| (dense[&u], dense[&v]));
        Ok((Graph::new(ids.len(), edges)?, ids))
    }

    pub fn from_edge_list_path(path: impl AsRef<Path>) -> Result<(Graph, Vec<u64>)> {
        Graph::from_edge_list_reader(std::fs::File::open(path)?)
    }

    pub fn write_edge_list(&self, mut w: impl Write) -> Result<()> {
        for &(u, v) in &self.edges {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }
}

/// A simplicial complex, stored as per-dimension ordered simplex lists with
/// dense indices. Immutable after construction.
#[derive(Debug, Clone)]
pub struct SimplicialComplex {
    levels: Vec<Level>,
}

#[derive(Debug, Clone, Default)]
struct Level {
    simplices: Vec<Simplex>,
    index: HashMap<Simplex, usize>,
}

impl Level {
    fn from_sorted(simplices: Vec<Simplex>) -> Level {
        let index = simplices
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        Level { simplices, index }
    }
}

impl SimplicialComplex {
    /// Clique complex of `graph` up to dimension `max_dim`: every
    /// (k+1)-clique becomes a k-simplex, for k <= max_dim.
    ///
    /// Cliques are enumerated incrementally, extending each k-clique by
    /// vertices above its maximum that are adjacent to all its members.
    pub fn clique_complex(graph: &Graph, max_dim: usize) -> Result<Self> {
        if max_dim < 1 {
            return Err(Error::InvalidDimension(max_dim, "max_dim must be >= 1"));
        }
        let mut levels = Vec::with_capacity(max_dim + 1);
        let vertices: Vec<Simplex> = (0..graph.vertex_count())
            .map(|v| Simplex { vertices: vec![v] })
            .collect();
        levels.push(Level::from_sorted(vertices));

        // Each clique carries the sorted set of common neighbors above its
        // maximum vertex, so extension is a single intersection per step.
        let mut frontier: Vec<(Vec<VertexId>, Vec<VertexId>)> = (0..graph.vertex_count())
            .map(|v| {
                let cands: Vec<VertexId> =
                    graph.neighbors(v).iter().copied().filter(|&u| u > v).collect();
                (vec![v], cands)
            })
            .collect();

        for _k in 1..=max_dim {
            let mut next: Vec<(Vec<VertexId>, Vec<VertexId>)> = Vec::new();
            for (clique, cands) in &frontier {
                for &v in cands {
                    let mut extended = clique.clone();
                    extended.push(v);
                    let nv = graph.neighbors(v);
                    let new_cands: Vec<VertexId> = cands
                        .iter()
                        .copied()
                        .filter(|&u| u > v && nv.binary_search(&u).is_ok())
                        .collect();
                    next.push((extended, new_cands));
                }
            }
            next.sort_unstable_by(|a, b| a.0.cmp(&b.0));
            let simplices: Vec<Simplex> = next
                .iter()
                .map(|(c, _)| Simplex {
                    vertices: c.clone(),
                })
                .collect();
            levels.push(Level::from_sorted(simplices));
            frontier = next;
        }
        // Drop empty top levels so `dim()` reports the true dimension.
        while levels.len() > 1 && levels.last().is_some_and(|l| l.simplices.is_empty()) {
            levels.pop();
        }
        Ok(SimplicialComplex { levels })
    }

    /// Build from an explicit simplex list, closing under faces.
    pub fn from_simplices(simplices: impl IntoIterator<Item = Simplex>) -> Result<Self> {
        let mut by_dim: Vec<std::collections::BTreeSet<Simplex>> = Vec::new();
        let mut queue: Vec<Simplex> = simplices.into_iter().collect();
        while let Some(s) = queue.pop() {
            let k = s.dim();
            if by_dim.len() <= k {
                by_dim.resize_with(k + 1, Default::default);
            }
            if by_dim[k].insert(s.clone()) && k > 0 {
                queue.extend(s.facets());
            }
        }
        if by_dim.is_empty() {
            return Err(Error::EmptySimplex);
        }
        let levels = by_dim
            .into_iter()
            .map(|set| Level::from_sorted(set.into_iter().collect()))
            .collect();
        Ok(SimplicialComplex { levels })
    }

    /// Top dimension (largest k with a nonempty X_k).
    pub fn dim(&self) -> usize {
        self.levels.len() - 1
    }

    /// Number of k-simplices.
    pub fn count(&self, k: usize) -> usize {
        self.levels.get(k).map_or(0, |l| l.simplices.len())
    }

    /// The ordered list X_k.
    pub fn simplices(&self, k: usize) -> &[Simplex] {
        self.levels.get(k).map_or(&[], |l| &l.simplices)
    }

    /// Dense index of a simplex within its dimension, if present.
    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.levels.get(s.dim())?.index.get(s).copied()
    }

    /// Indices of k-simplices sharing a (k+1)-coface with simplex `i`.
    pub fn upper_neighbors(&self, k: usize, i: usize) -> Vec<usize> {
        let adj = AdjacencyStructure::build(self, k);
        adj.upper[i].clone()
    }

    /// Indices of k-simplices sharing a (k-1)-face with simplex `i`.
    /// Errors for k = 0: vertices have no proper faces.
    pub fn lower_neighbors(&self, k: usize, i: usize) -> Result<Vec<usize>> {
        if k == 0 {
            return Err(Error::InvalidDimension(0, "0-simplices have no lower neighbors"));
        }
        let adj = AdjacencyStructure::build(self, k);
        Ok(adj.lower[i].clone())
    }

    /// Check the closure invariant: every facet of every simplex is present.
    pub fn is_closed(&self) -> bool {
        self.levels.iter().skip(1).all(|level| {
            level
                .simplices
                .iter()
                .all(|s| s.facets().all(|f| self.index_of(&f).is_some()))
        })
    }

    /// Simplex-list output: one simplex per line, sorted vertex ids
    /// whitespace-separated, grouped by ascending dimension.
    pub fn write_simplex_list(&self, mut w: impl Write) -> Result<()> {
        for level in &self.levels {
            for s in &level.simplices {
                let line = s
                    .vertices
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                writeln!(w, "{line}")?;
            }
        }
        Ok(())
    }
}

/// Upper and lower neighbor lists for the k-simplices of a complex, with
/// set semantics: each neighbor appears once however many shared faces or
/// cofaces connect it.
#[derive(Debug, Clone)]
pub struct AdjacencyStructure {
    pub upper: Vec<Vec<usize>>,
    pub lower: Vec<Vec<usize>>,
}

impl AdjacencyStructure {
    pub fn build(complex: &SimplicialComplex, k: usize) -> AdjacencyStructure {
        let n = complex.count(k);
        let mut upper = vec![Vec::new(); n];
        let mut lower = vec![Vec::new(); n];

        // Upper: the k-faces of each (k+1)-simplex are pairwise neighbors.
        for coface in complex.simplices(k + 1) {
            let face_ids: Vec<usize> = coface
                .facets()
                .map(|f| complex.index_of(&f).expect("closure invariant"))
                .collect();
            for &a in &face_ids {
                for &b in &face_ids {
                    if a != b {
                        upper[a].push(b);
                    }
                }
            }
        }

        // Lower: group k-simplices by each of their (k-1)-faces.
        if k > 0 {
            let mut groups: HashMap<Simplex, Vec<usize>> = HashMap::new();
            for (i, s) in complex.simplices(k).iter().enumerate() {
                for f in s.facets() {
                    groups.entry(f).or_default().push(i);
                }
            }
            for group in groups.values() {
                for &a in group {
                    for &b in group {
                        if a != b {
                            lower[a].push(b);
                        }
                    }
                }
            }
        }

        for list in upper.iter_mut().chain(lower.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        AdjacencyStructure { upper, lower }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex(vs: &[usize]) -> Simplex {
        Simplex::new(vs.to_vec()).unwrap()
    }

    #[test]
    fn make_simplex_canonicalizes() {
        let s = simplex(&[2, 0, 1]);
        assert_eq!(s.vertices(), &[0, 1, 2]);
        assert_eq!(s.dim(), 2);
        let v = simplex(&[5]);
        assert_eq!(v.dim(), 0);
    }

    #[test]
    fn make_simplex_rejects_duplicates() {
        assert!(matches!(
            Simplex::new(vec![1, 1, 2]),
            Err(Error::DuplicateVertex(1))
        ));
        assert!(matches!(Simplex::new(vec![]), Err(Error::EmptySimplex)));
    }

    fn triangle_graph() -> Graph {
        Graph::new(3, [(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    fn c4_graph() -> Graph {
        Graph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap()
    }

    fn k4_graph() -> Graph {
        Graph::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn clique_complex_k3() {
        let x = SimplicialComplex::clique_complex(&triangle_graph(), 2).unwrap();
        assert_eq!(x.count(0), 3);
        assert_eq!(x.count(1), 3);
        assert_eq!(x.count(2), 1);
        assert!(x.is_closed());
    }

    #[test]
    fn clique_complex_c4_has_no_triangles() {
        let x = SimplicialComplex::clique_complex(&c4_graph(), 2).unwrap();
        assert_eq!(x.count(0), 4);
        assert_eq!(x.count(1), 4);
        assert_eq!(x.count(2), 0);
        assert_eq!(x.dim(), 1);
    }

    #[test]
    fn clique_complex_k4() {
        let x = SimplicialComplex::clique_complex(&k4_graph(), 2).unwrap();
        assert_eq!(x.count(0), 4);
        assert_eq!(x.count(1), 6);
        // brute force: C(4,3) = 4 triangles, all present in K4
        assert_eq!(x.count(2), 4);
    }

    #[test]
    fn clique_complex_k4_full_dim() {
        let x = SimplicialComplex::clique_complex(&k4_graph(), 3).unwrap();
        assert_eq!(x.count(3), 1);
        assert_eq!(x.dim(), 3);
        // k=2 upper neighbors: every triangle borders the others via the tetrahedron
        for i in 0..4 {
            assert_eq!(x.upper_neighbors(2, i).len(), 3);
        }
        let x2 = SimplicialComplex::clique_complex(&k4_graph(), 2).unwrap();
        for i in 0..4 {
            assert!(x2.upper_neighbors(2, i).is_empty());
        }
    }

    #[test]
    fn upper_neighbors_triangle() {
        let x = SimplicialComplex::clique_complex(&triangle_graph(), 2).unwrap();
        let e01 = x.index_of(&simplex(&[0, 1])).unwrap();
        let up = x.upper_neighbors(1, e01);
        let expected: Vec<usize> = [[0usize, 2], [1, 2]]
            .iter()
            .map(|vs| x.index_of(&simplex(vs)).unwrap())
            .collect();
        assert_eq!(up, {
            let mut e = expected.clone();
            e.sort_unstable();
            e
        });
    }

    #[test]
    fn upper_neighbors_c4_empty() {
        let x = SimplicialComplex::clique_complex(&c4_graph(), 2).unwrap();
        for i in 0..4 {
            assert!(x.upper_neighbors(1, i).is_empty());
        }
    }

    #[test]
    fn lower_neighbors_path() {
        let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let x = SimplicialComplex::clique_complex(&g, 2).unwrap();
        let e01 = x.index_of(&simplex(&[0, 1])).unwrap();
        let e12 = x.index_of(&simplex(&[1, 2])).unwrap();
        assert_eq!(x.lower_neighbors(1, e01).unwrap(), vec![e12]);
    }

    #[test]
    fn lower_neighbors_k0_is_error() {
        let x = SimplicialComplex::clique_complex(&triangle_graph(), 2).unwrap();
        assert!(matches!(
            x.lower_neighbors(0, 0),
            Err(Error::InvalidDimension(0, _))
        ));
    }

    #[test]
    fn adjacency_symmetry_and_no_self() {
        let x = SimplicialComplex::clique_complex(&k4_graph(), 2).unwrap();
        for k in 0..=x.dim() {
            let adj = AdjacencyStructure::build(&x, k);
            for (i, nbrs) in adj.upper.iter().enumerate() {
                assert!(!nbrs.contains(&i));
                for &j in nbrs {
                    assert!(adj.upper[j].contains(&i));
                }
            }
            for (i, nbrs) in adj.lower.iter().enumerate() {
                assert!(!nbrs.contains(&i));
                for &j in nbrs {
                    assert!(adj.lower[j].contains(&i));
                }
            }
        }
    }

    #[test]
    fn edge_upper_subset_of_lower() {
        // two edges in a common triangle always share a vertex
        let x = SimplicialComplex::clique_complex(&k4_graph(), 2).unwrap();
        let adj = AdjacencyStructure::build(&x, 1);
        for i in 0..x.count(1) {
            for j in &adj.upper[i] {
                assert!(adj.lower[i].contains(j));
            }
        }
    }

    #[test]
    fn edge_list_roundtrip_and_reindex() {
        let text = "# comment\n10 30\n30 20\n\n20 10\n";
        let (g, ids) = Graph::from_edge_list_reader(text.as_bytes()).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(ids, vec![10, 20, 30]);
        let mut out = Vec::new();
        g.write_edge_list(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0 1\n0 2\n1 2\n");
    }

    #[test]
    fn simplex_list_output_grouped_by_dimension() {
        let x = SimplicialComplex::clique_complex(&triangle_graph(), 2).unwrap();
        let mut out = Vec::new();
        x.write_simplex_list(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "0\n1\n2\n0 1\n0 2\n1 2\n0 1 2\n");
    }

    #[test]
    fn from_simplices_closes_under_faces() {
        let x = SimplicialComplex::from_simplices([simplex(&[0, 1, 2])]).unwrap();
        assert_eq!(x.count(0), 3);
        assert_eq!(x.count(1), 3);
        assert!(x.is_closed());
    }
}
