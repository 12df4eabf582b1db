//! Clustering of embedding point clouds (kmeans, DBSCAN), the Rand index
//! against ground-truth simplex classes, and PCA projection for plots.

use std::io::Write;

use rand::Rng;

use crate::rng::stream_rng;
use crate::{Error, Result};

/// n x d real matrix, rows aligned with simplex indices.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    n: usize,
    dim: usize,
    data: Vec<f64>,
}

impl PointCloud {
    pub fn from_flat(n: usize, dim: usize, data: Vec<f64>) -> PointCloud {
        assert_eq!(data.len(), n * dim);
        assert!(data.iter().all(|x| x.is_finite()));
        PointCloud { n, dim, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> PointCloud {
        let dim = rows.first().map_or(0, |r| r.len());
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        PointCloud::from_flat(rows.len(), dim, data)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

impl From<&crate::embed::EmbeddingModel> for PointCloud {
    fn from(model: &crate::embed::EmbeddingModel) -> PointCloud {
        PointCloud::from_flat(model.len(), model.dim(), model.input_table().to_vec())
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Result of a kmeans run: best of the requested restarts by inertia.
#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub labels: Vec<usize>,
    pub inertia: f64,
    /// Inertia after each Lloyd iteration of the winning restart.
    pub inertia_history: Vec<f64>,
}

/// Lloyd's algorithm with kmeans++ seeding. Ties in nearest-centroid
/// assignment break toward the lowest centroid index; empty clusters are
/// reseeded from the point farthest from its centroid.
pub fn kmeans(points: &PointCloud, k: usize, restarts: usize, seed: u64) -> Result<KMeansResult> {
    if points.len() < k {
        return Err(Error::TooFewPoints {
            needed: k,
            got: points.len(),
        });
    }
    assert!(restarts >= 1);
    let mut best: Option<KMeansResult> = None;
    for restart in 0..restarts {
        let run = kmeans_single(points, k, stream_rng(seed, restart as u64, 0));
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.unwrap())
}

const KMEANS_MAX_ITER: usize = 300;
const KMEANS_TOL: f64 = 1e-6;

fn kmeans_single(points: &PointCloud, k: usize, mut rng: impl Rng) -> KMeansResult {
    let (n, d) = (points.len(), points.dim());
    // kmeans++ seeding
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    centroids.push(points.row(rng.gen_range(0..n)).to_vec());
    let mut dists: Vec<f64> = (0..n).map(|i| sq_dist(points.row(i), &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = dists.iter().sum();
        let next = if total <= 0.0 {
            rng.gen_range(0..n)
        } else {
            let mut u = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in dists.iter().enumerate() {
                u -= w;
                if u <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        };
        let c = points.row(next).to_vec();
        for i in 0..n {
            dists[i] = dists[i].min(sq_dist(points.row(i), &c));
        }
        centroids.push(c);
    }

    let mut labels = vec![0usize; n];
    let mut history = Vec::new();
    let mut prev_inertia = f64::INFINITY;
    for _ in 0..KMEANS_MAX_ITER {
        // assignment; iterating centroids in order makes ties pick the lowest index
        let mut inertia = 0.0;
        for i in 0..n {
            let p = points.row(i);
            let mut best_c = 0;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let dist = sq_dist(p, centroid);
                if dist < best_d {
                    best_d = dist;
                    best_c = c;
                }
            }
            labels[i] = best_c;
            inertia += best_d;
        }
        history.push(inertia);

        // update
        let mut sums = vec![vec![0.0; d]; k];
        let mut counts = vec![0usize; k];
        for i in 0..n {
            counts[labels[i]] += 1;
            for (s, &x) in sums[labels[i]].iter_mut().zip(points.row(i)) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                // reseed from the point farthest from its centroid
                let far = (0..n)
                    .max_by(|&a, &b| {
                        let da = sq_dist(points.row(a), &centroids[labels[a]]);
                        let db = sq_dist(points.row(b), &centroids[labels[b]]);
                        da.partial_cmp(&db).unwrap()
                    })
                    .unwrap();
                centroids[c] = points.row(far).to_vec();
            } else {
                for (j, s) in sums[c].iter().enumerate() {
                    centroids[c][j] = s / counts[c] as f64;
                }
            }
        }
        if prev_inertia.is_finite()
            && prev_inertia - inertia <= KMEANS_TOL * prev_inertia.max(f64::MIN_POSITIVE)
        {
            break;
        }
        prev_inertia = inertia;
    }
    let inertia = *history.last().unwrap();
    KMeansResult {
        labels,
        inertia,
        inertia_history: history,
    }
}

/// DBSCAN labels: cluster index or `None` for noise.
#[derive(Debug, Clone)]
pub struct DbscanResult {
    pub labels: Vec<Option<usize>>,
    pub n_clusters: usize,
    pub eps: f64,
    pub min_pts: usize,
}

impl DbscanResult {
    pub fn noise_fraction(&self) -> f64 {
        if self.labels.is_empty() {
            return 0.0;
        }
        self.labels.iter().filter(|l| l.is_none()).count() as f64 / self.labels.len() as f64
    }
}

/// Standard density-reachability clustering. Non-core points not reachable
/// from any core point stay noise.
pub fn dbscan(points: &PointCloud, eps: f64, min_pts: usize) -> DbscanResult {
    assert!(eps > 0.0 && min_pts >= 1);
    let n = points.len();
    let eps2 = eps * eps;
    let neighbors = |i: usize| -> Vec<usize> {
        (0..n)
            .filter(|&j| sq_dist(points.row(i), points.row(j)) <= eps2)
            .collect()
    };
    let mut labels: Vec<Option<usize>> = vec![None; n];
    let mut visited = vec![false; n];
    let mut cluster = 0usize;
    for i in 0..n {
        if visited[i] {
            continue;
        }
        visited[i] = true;
        let nbrs = neighbors(i);
        if nbrs.len() < min_pts {
            continue; // noise unless later absorbed as a border point
        }
        labels[i] = Some(cluster);
        let mut queue: std::collections::VecDeque<usize> = nbrs.into();
        while let Some(j) = queue.pop_front() {
            if labels[j].is_none() {
                labels[j] = Some(cluster);
            }
            if visited[j] {
                continue;
            }
            visited[j] = true;
            let jn = neighbors(j);
            if jn.len() >= min_pts {
                queue.extend(jn);
            }
        }
        cluster += 1;
    }
    DbscanResult {
        labels,
        n_clusters: cluster,
        eps,
        min_pts,
    }
}

///// Quantile of the sorted `min_pts`-NN distance curve used by `choose_eps`.
/// The knee-of-the-curve rule sounds appealing but on smooth curves it lands
/// near the top and DBSCAN collapses everything into one cluster; a fixed
/// quantile well below the tail keeps touching clusters apart while labeling
/// only the sparse fringe as noise.
const EPS_QUANTILE: f64 = 0.70;

/// Pick eps for DBSCAN as the `EPS_QUANTILE` quantile of each point's
/// distance to its `min_pts`-th nearest neighbor.
pub fn choose_eps(points: &PointCloud, min_pts: usize) -> f64 {
    let n = points.len();
    let mut kdist: Vec<f64> = (0..n)
        .map(|i| {
            let mut d: Vec<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| sq_dist(points.row(i), points.row(j)).sqrt())
                .collect();
            d.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
            d.get(min_pts - 1).copied().unwrap_or(0.0)
        })
        .collect();
    kdist.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let idx = ((n - 1) as f64 * EPS_QUANTILE).round() as usize;
    kdist[idx].max(1e-12)
}

fn choose_2(n: usize) -> u128 {
    (n as u128) * (n as u128 - 1) / 2
}

/// Unadjusted Rand index via the contingency table:
/// (agreeing pairs) / (all unordered pairs).
pub fn rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n < 2 {
        return Ok(1.0);
    }
    let mut cont: std::collections::HashMap<(usize, usize), usize> = Default::default();
    let mut rows: std::collections::HashMap<usize, usize> = Default::default();
    let mut cols: std::collections::HashMap<usize, usize> = Default::default();
    for (&x, &y) in a.iter().zip(b) {
        *cont.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let s_ab: u128 = cont.values().map(|&c| choose_2(c)).sum();
    let s_a: u128 = rows.values().map(|&c| choose_2(c)).sum();
    let s_b: u128 = cols.values().map(|&c| choose_2(c)).sum();
    let total = choose_2(n);
    // same-same pairs + different-different pairs
    let agree = s_ab + (total + s_ab - s_a - s_b);
    Ok(agree as f64 / total as f64)
}

/// Rand index ignoring points marked noise (`None`) in either labeling.
pub fn rand_index_filtered(a: &[Option<usize>], b: &[Option<usize>]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let (mut fa, mut fb) = (Vec::new(), Vec::new());
    for (&x, &y) in a.iter().zip(b) {
        if let (Some(x), Some(y)) = (x, y) {
            fa.push(x);
            fb.push(y);
        }
    }
    rand_index(&fa, &fb)
}

/// PCA projection onto the top `out_dim` principal components.
#[derive(Debug, Clone)]
pub struct PcaResult {
    pub projected: PointCloud,
    /// Fraction of total variance captured per component, non-increasing.
    pub explained_variance_ratio: Vec<f64>,
    /// Components as rows, out_dim x d, orthonormal.
    pub components: Vec<Vec<f64>>,
}

pub fn pca_project(points: &PointCloud, out_dim: usize) -> Result<PcaResult> {
    let (n, d) = (points.len(), points.dim());
    if out_dim > d {
        return Err(Error::Config(format!("out_dim {out_dim} exceeds data dim {d}")));
    }
    if n == 0 {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let mut mean = vec![0.0; d];
    for i in 0..n {
        for (m, &x) in mean.iter_mut().zip(points.row(i)) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    // covariance, d x d
    let denom = (n.saturating_sub(1)).max(1) as f64;
    let mut cov = vec![vec![0.0; d]; d];
    for i in 0..n {
        let row = points.row(i);
        for a in 0..d {
            let xa = row[a] - mean[a];
            for b in a..d {
                cov[a][b] += xa * (row[b] - mean[b]) / denom;
            }
        }
    }
    for a in 0..d {
        for b in 0..a {
            cov[a][b] = cov[b][a];
        }
    }

    let (eigvals, eigvecs) = jacobi_eigen(&cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_unstable_by(|&a, &b| eigvals[b].partial_cmp(&eigvals[a]).unwrap());
    let total: f64 = eigvals.iter().map(|&v| v.max(0.0)).sum();
    let components: Vec<Vec<f64>> = order[..out_dim]
        .iter()
        .map(|&c| (0..d).map(|r| eigvecs[r][c]).collect())
        .collect();
    let explained_variance_ratio: Vec<f64> = order[..out_dim]
        .iter()
        .map(|&c| {
            if total > 0.0 {
                eigvals[c].max(0.0) / total
            } else {
                0.0
            }
        })
        .collect();

    let mut projected = Vec::with_capacity(n * out_dim);
    for i in 0..n {
        let row = points.row(i);
        for comp in &components {
            let v: f64 = row
                .iter()
                .zip(&mean)
                .zip(comp)
                .map(|((&x, &m), &c)| (x - m) * c)
                .sum();
            projected.push(v);
        }
    }
    Ok(PcaResult {
        projected: PointCloud::from_flat(n, out_dim, projected),
        explained_variance_ratio,
        components,
    })
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// (eigenvalues, eigenvector matrix with eigenvectors as columns).
fn jacobi_eigen(m: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let d = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut v = vec![vec![0.0; d]; d];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..d)
            .flat_map(|p| ((p + 1)..d).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum();
        if off < 1e-24 {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..d {
                    let (aip, aiq) = (a[i][p], a[i][q]);
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for i in 0..d {
                    let (api, aqi) = (a[p][i], a[q][i]);
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
                for row in v.iter_mut() {
                    let (vip, viq) = (row[p], row[q]);
                    row[p] = c * vip - s * viq;
                    row[q] = s * vip + c * viq;
                }
            }
        }
    }
    let eigvals = (0..d).map(|i| a[i][i]).collect();
    (eigvals, v)
}

/// Cluster output CSV: `simplex,label`, noise written as `noise`.
pub fn write_clusters_csv(
    keys: &[String],
    labels: &[Option<usize>],
    mut w: impl Write,
) -> Result<()> {
    writeln!(w, "simplex,label")?;
    for (key, label) in keys.iter().zip(labels) {
        match label {
            Some(l) => writeln!(w, "{key},{l}")?,
            None => writeln!(w, "{key},noise")?,
        }
    }
    Ok(())
}

/// PCA output CSV: `simplex,pc1,pc2,...`.
pub fn write_pca_csv(keys: &[String], projected: &PointCloud, mut w: impl Write) -> Result<()> {
    let header: Vec<String> = (1..=projected.dim()).map(|i| format!("pc{i}")).collect();
    writeln!(w, "simplex,{}", header.join(","))?;
    for (i, key) in keys.iter().enumerate() {
        let row: Vec<String> = projected.row(i).iter().map(|x| format!("{x:.6e}")).collect();
        writeln!(w, "{key},{}", row.join(","))?;
    }
    Ok(())
}

const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
];

/// Scatter plot of a 2-D point cloud as SVG. Clustered points are filled
/// circles colored by label; noise points are drawn as crosses.
pub fn write_scatter_svg(
    points: &PointCloud,
    labels: &[Option<usize>],
    mut w: impl Write,
) -> Result<()> {
    assert_eq!(points.dim(), 2);
    assert_eq!(points.len(), labels.len());
    let (width, height, margin) = (640.0, 640.0, 40.0);
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..points.len() {
        let r = points.row(i);
        min_x = min_x.min(r[0]);
        max_x = max_x.max(r[0]);
        min_y = min_y.min(r[1]);
        max_y = max_y.max(r[1]);
    }
    let span_x = (max_x - min_x).max(1e-12);
    let span_y = (max_y - min_y).max(1e-12);
    let sx = |x: f64| margin + (x - min_x) / span_x * (width - 2.0 * margin);
    let sy = |y: f64| height - margin - (y - min_y) / span_y * (height - 2.0 * margin);
    writeln!(
        w,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    )?;
    writeln!(w, "<rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>")?;
    for (i, label) in labels.iter().enumerate() {
        let r = points.row(i);
        let (x, y) = (sx(r[0]), sy(r[1]));
        match label {
            Some(l) => {
                let color = PALETTE[l % PALETTE.len()];
                writeln!(w, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"{color}\"/>")?;
            }
            None => {
                writeln!(
                    w,
                    "<path d=\"M {:.2} {:.2} L {:.2} {:.2} M {:.2} {:.2} L {:.2} {:.2}\" stroke=\"black\" stroke-width=\"1.2\"/>",
                    x - 3.0, y - 3.0, x + 3.0, y + 3.0, x - 3.0, y + 3.0, x + 3.0, y - 3.0
                )?;
            }
        }
    }
    writeln!(w, "</svg>")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::master_rng;

    #[test]
    fn kmeans_distinct_points_zero_inertia() {
        let points = PointCloud::from_rows(&[vec![0.0, 0.0], vec![5.0, 0.0], vec![0.0, 5.0]]);
        let res = kmeans(&points, 3, 5, 1).unwrap();
        assert!(res.inertia < 1e-12);
        let mut ls = res.labels.clone();
        ls.sort_unstable();
        ls.dedup();
        assert_eq!(ls.len(), 3);
    }

    #[test]
    fn kmeans_k1_inertia_is_total_scatter() {
        let rows = vec![vec![0.0], vec![2.0], vec![4.0]];
        let points = PointCloud::from_rows(&rows);
        let res = kmeans(&points, 1, 1, 0).unwrap();
        // centroid 2.0, scatter = 4 + 0 + 4
        assert!((res.inertia - 8.0).abs() < 1e-12);
        assert!(res.labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn kmeans_separated_blobs() {
        let mut rng = master_rng(5);
        let mut rows = Vec::new();
        let mut truth = Vec::new();
        for _ in 0..50 {
            rows.push(vec![rng.gen::<f64>(), rng.gen::<f64>()]);
            truth.push(0usize);
        }
        for _ in 0..50 {
            rows.push(vec![10.0 + rng.gen::<f64>(), 10.0 + rng.gen::<f64>()]);
            truth.push(1usize);
        }
        let points = PointCloud::from_rows(&rows);
        let res = kmeans(&points, 2, 10, 3).unwrap();
        assert_eq!(rand_index(&res.labels, &truth).unwrap(), 1.0);
    }

    #[test]
    fn kmeans_inertia_non_increasing() {
        let mut rng = master_rng(9);
        let rows: Vec<Vec<f64>> = (0..120)
            .map(|_| (0..4).map(|_| rng.gen::<f64>() * 10.0).collect())
            .collect();
        let points = PointCloud::from_rows(&rows);
        let res = kmeans(&points, 5, 3, 11).unwrap();
        for w in res.inertia_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "inertia increased: {:?}", w);
        }
    }

    #[test]
    fn kmeans_too_few_points() {
        let points = PointCloud::from_rows(&[vec![1.0]]);
        assert!(matches!(
            kmeans(&points, 2, 1, 0),
            Err(Error::TooFewPoints { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn dbscan_identical_points_one_cluster() {
        let points = PointCloud::from_rows(&vec![vec![1.0, 1.0]; 6]);
        let res = dbscan(&points, 0.5, 4);
        assert_eq!(res.n_clusters, 1);
        assert!(res.labels.iter().all(|l| *l == Some(0)));
    }

    #[test]
    fn dbscan_outlier_is_noise() {
        let mut rows = vec![vec![0.0, 0.0]; 10];
        for (i, r) in rows.iter_mut().enumerate() {
            r[0] = (i as f64) * 0.01;
        }
        rows.push(vec![100.0, 0.0]);
        let points = PointCloud::from_rows(&rows);
        let res = dbscan(&points, 1.0, 3);
        assert_eq!(res.labels[10], None);
        assert!(res.labels[..10].iter().all(|l| *l == Some(0)));
    }

    #[test]
    fn dbscan_order_independent() {
        let mut rng = master_rng(2);
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let base = if i < 20 { 0.0 } else { 10.0 };
                vec![base + rng.gen::<f64>(), base + rng.gen::<f64>()]
            })
            .collect();
        let points = PointCloud::from_rows(&rows);
        let res = dbscan(&points, 1.5, 3);
        // reversed input: same clusters as sets
        let rev: Vec<Vec<f64>> = rows.iter().rev().cloned().collect();
        let res_rev = dbscan(&PointCloud::from_rows(&rev), 1.5, 3);
        let set = |labels: &[Option<usize>], idx: Box<dyn Fn(usize) -> usize>| {
            let mut clusters: std::collections::HashMap<usize, std::collections::BTreeSet<usize>> =
                Default::default();
            for (i, l) in labels.iter().enumerate() {
                if let Some(l) = l {
                    clusters.entry(*l).or_default().insert(idx(i));
                }
            }
            let mut v: Vec<_> = clusters.into_values().collect();
            v.sort();
            v
        };
        let n = rows.len();
        assert_eq!(
            set(&res.labels, Box::new(|i| i)),
            set(&res_rev.labels, Box::new(move |i| n - 1 - i))
        );
    }

    #[test]
    fn rand_index_basics() {
        assert_eq!(rand_index(&[0, 0, 1, 1], &[0, 0, 1, 1]).unwrap(), 1.0);
        assert_eq!(rand_index(&[0, 0, 1, 1], &[1, 1, 0, 0]).unwrap(), 1.0);
        let ri = rand_index(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap();
        assert!((ri - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            rand_index(&[0, 1], &[0]),
            Err(Error::LengthMismatch(2, 1))
        ));
    }

    #[test]
    fn rand_index_symmetry() {
        let a = [0, 1, 2, 0, 1, 2, 0];
        let b = [1, 1, 0, 0, 2, 2, 1];
        assert_eq!(rand_index(&a, &b).unwrap(), rand_index(&b, &a).unwrap());
    }

    /// O(n^2) pair-loop oracle for the Rand index.
    pub fn rand_index_pairs(a: &[usize], b: &[usize]) -> f64 {
        let n = a.len();
        let mut agree = 0u64;
        let mut total = 0u64;
        for i in 0..n {
            for j in (i + 1)..n {
                total += 1;
                if (a[i] == a[j]) == (b[i] == b[j]) {
                    agree += 1;
                }
            }
        }
        agree as f64 / total as f64
    }

    #[test]
    fn rand_index_matches_pair_oracle() {
        let mut rng = master_rng(17);
        for _ in 0..20 {
            let n = rng.gen_range(2..200);
            let a: Vec<usize> = (0..n).map(|_| rng.gen_range(0..6)).collect();
            let b: Vec<usize> = (0..n).map(|_| rng.gen_range(0..4)).collect();
            assert_eq!(rand_index(&a, &b).unwrap(), rand_index_pairs(&a, &b));
        }
    }

    #[test]
    fn rand_index_filtered_drops_noise() {
        let a = [Some(0), Some(0), None, Some(1)];
        let b = [Some(1), Some(1), Some(0), Some(0)];
        assert_eq!(rand_index_filtered(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn pca_identity_on_2d() {
        let mut rng = master_rng(23);
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|_| vec![rng.gen::<f64>() * 3.0, rng.gen::<f64>()])
            .collect();
        let points = PointCloud::from_rows(&rows);
        let pca = pca_project(&points, 2).unwrap();
        // orthogonal transform preserves pairwise distances
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                let orig = sq_dist(points.row(i), points.row(j)).sqrt();
                let proj = sq_dist(pca.projected.row(i), pca.projected.row(j)).sqrt();
                assert!((orig - proj).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn pca_rank_one_data() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 2.0 * i as f64, 0.0]).collect();
        let pca = pca_project(&PointCloud::from_rows(&rows), 2).unwrap();
        assert!((pca.explained_variance_ratio[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pca_components_orthonormal() {
        let mut rng = master_rng(31);
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|_| (0..6).map(|_| rng.gen::<f64>()).collect())
            .collect();
        let pca = pca_project(&PointCloud::from_rows(&rows), 4).unwrap();
        for (i, a) in pca.components.iter().enumerate() {
            for (j, b) in pca.components.iter().enumerate() {
                let d: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((d - expect).abs() < 1e-9, "({i},{j}) -> {d}");
            }
        }
        for w in pca.explained_variance_ratio.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        assert!(pca.explained_variance_ratio.iter().sum::<f64>() <= 1.0 + 1e-9);
    }

    #[test]
    fn svg_output_has_crosses_for_noise() {
        let points = PointCloud::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]]);
        let mut buf = Vec::new();
        write_scatter_svg(&points, &[Some(0), None], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("<circle"));
        assert!(text.contains("<path"));
        assert!(text.starts_with("<svg"));
    }
}
