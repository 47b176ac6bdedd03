//! External validation metrics, elbow curves over within-cluster
//! dissimilarity, cluster profiling, and the method-comparison harness.

use serde::Serialize;

use crate::clustering::{agglomerate, cut, kmeans, ClusterLabels, Dendrogram, Linkage};
use crate::dissimilarity::{best_tilted_corr, dissim_matrix, DissimilarityMatrix, Measure};
use crate::error::{Error, Result};
use crate::params::TravelParams;
use crate::series::TimeSeries;

/// Cross-tabulation of two labelings of the same points.
#[derive(Debug, Clone)]
pub struct ContingencyTable {
    counts: Vec<Vec<usize>>,
    row_sums: Vec<usize>,
    col_sums: Vec<usize>,
    n: usize,
}

impl ContingencyTable {
    pub fn new(pred: &ClusterLabels, truth: &ClusterLabels) -> Result<Self> {
        if pred.n() != truth.n() {
            return Err(Error::ShapeMismatch {
                left: pred.n(),
                right: truth.n(),
            });
        }
        let (k, kk) = (pred.k(), truth.k());
        let mut counts = vec![vec![0usize; kk]; k];
        for (&p, &t) in pred.assignments().iter().zip(truth.assignments()) {
            counts[p - 1][t - 1] += 1;
        }
        let row_sums: Vec<usize> = counts.iter().map(|r| r.iter().sum()).collect();
        let col_sums: Vec<usize> = (0..kk).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
        Ok(Self {
            counts,
            row_sums,
            col_sums,
            n: pred.n(),
        })
    }

    pub fn counts(&self) -> &[Vec<usize>] {
        &self.counts
    }

    /// True when the two labelings induce the same partition: exactly one
    /// nonzero cell per row and per column.
    fn identical_partitions(&self) -> bool {
        self.counts.len() == self.col_sums.len()
            && self
                .counts
                .iter()
                .all(|row| row.iter().filter(|&&c| c > 0).count() == 1)
            && (0..self.col_sums.len())
                .all(|j| self.counts.iter().filter(|row| row[j] > 0).count() == 1)
    }
}

fn comb2(x: usize) -> f64 {
    let x = x as f64;
    x * (x - 1.0) / 2.0
}

/// Adjusted Rand index in `[-1, 1]` via pair counting on the contingency
/// table. When the adjustment denominator vanishes (both partitions are all
/// singletons or both a single cluster), identical partitions score 1 and
/// anything else 0.
pub fn ari(pred: &ClusterLabels, truth: &ClusterLabels) -> Result<f64> {
    let table = ContingencyTable::new(pred, truth)?;
    let sum_cells: f64 = table
        .counts
        .iter()
        .flat_map(|r| r.iter())
        .map(|&c| comb2(c))
        .sum();
    let sum_rows: f64 = table.row_sums.iter().map(|&c| comb2(c)).sum();
    let sum_cols: f64 = table.col_sums.iter().map(|&c| comb2(c)).sum();
    let pairs = comb2(table.n);
    if pairs == 0.0 {
        return Ok(1.0); // a single point agrees with itself
    }
    let expected = sum_rows * sum_cols / pairs;
    let max_index = (sum_rows + sum_cols) / 2.0;
    if max_index == expected {
        return Ok(if table.identical_partitions() { 1.0 } else { 0.0 });
    }
    Ok((sum_cells - expected) / (max_index - expected))
}

/// Clustering accuracy: the best fraction of agreeing points over all
/// injective assignments of predicted labels to truth labels, found with the
/// Hungarian method on the (zero-padded) contingency table.
pub fn accuracy(pred: &ClusterLabels, truth: &ClusterLabels) -> Result<f64> {
    let table = ContingencyTable::new(pred, truth)?;
    let dim = table.counts.len().max(table.col_sums.len());
    let mut square = vec![vec![0i64; dim]; dim];
    for (i, row) in table.counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            square[i][j] = c as i64;
        }
    }
    let matched = hungarian_max(&square);
    Ok(matched as f64 / table.n as f64)
}

/// Maximum-weight perfect matching on a square nonnegative matrix
/// (O(n^3) Hungarian algorithm with potentials, phrased for maximization).
fn hungarian_max(w: &[Vec<i64>]) -> i64 {
    let n = w.len();
    if n == 0 {
        return 0;
    }
    // Convert to a min-cost assignment on negated weights.
    let big = w
        .iter()
        .flat_map(|r| r.iter())
        .copied()
        .max()
        .unwrap_or(0);
    let cost = |i: usize, j: usize| big - w[i][j];
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut match_of_col = vec![0usize; n + 1]; // row matched to column (1-based rows)
    for i in 1..=n {
        let mut j0 = 0usize;
        match_of_col[0] = i;
        let mut min_v = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        let mut way = vec![0usize; n + 1];
        loop {
            used[j0] = true;
            let i0 = match_of_col[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < min_v[j] {
                    min_v[j] = cur;
                    way[j] = j0;
                }
                if min_v[j] < delta {
                    delta = min_v[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[match_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_v[j] -= delta;
                }
            }
            j0 = j1;
            if match_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            match_of_col[j0] = match_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut total = 0i64;
    for j in 1..=n {
        if match_of_col[j] != 0 {
            total += w[match_of_col[j] - 1][j - 1];
        }
    }
    total
}

/// Total within-cluster pairwise dissimilarity: for each cluster, the sum of
/// matrix entries over its unordered member pairs, summed over clusters.
pub fn wcd(matrix: &DissimilarityMatrix, labels: &ClusterLabels) -> Result<f64> {
    if labels.n() != matrix.n() {
        return Err(Error::ShapeMismatch {
            left: labels.n(),
            right: matrix.n(),
        });
    }
    let mut total = 0.0;
    for members in labels.members() {
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                total += matrix.get(i, j);
            }
        }
    }
    Ok(total)
}

/// Within-cluster dissimilarity evaluated at each cut of one dendrogram.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElbowCurve {
    pub points: Vec<ElbowPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElbowPoint {
    pub k: usize,
    pub wcd: f64,
}

/// Builds the dendrogram once and evaluates [`wcd`] at every `k` in
/// `[kmin, kmax]`.
pub fn elbow_curve(
    matrix: &DissimilarityMatrix,
    linkage: Linkage,
    kmin: usize,
    kmax: usize,
) -> Result<ElbowCurve> {
    if kmin < 1 || kmin > kmax || kmax > matrix.n() {
        return Err(Error::InvalidParam(format!(
            "k range [{kmin}, {kmax}] invalid for n = {}",
            matrix.n()
        )));
    }
    let dendrogram = agglomerate(matrix, linkage)?;
    elbow_curve_from_dendrogram(matrix, &dendrogram, kmin, kmax)
}

pub fn elbow_curve_from_dendrogram(
    matrix: &DissimilarityMatrix,
    dendrogram: &Dendrogram,
    kmin: usize,
    kmax: usize,
) -> Result<ElbowCurve> {
    let mut points = Vec::with_capacity(kmax - kmin + 1);
    for k in kmin..=kmax {
        let labels = cut(dendrogram, k)?;
        points.push(ElbowPoint {
            k,
            wcd: wcd(matrix, &labels)?,
        });
    }
    Ok(ElbowCurve { points })
}

/// Descriptive statistics of one cluster of series.
#[derive(Debug, Clone, Serialize)]
pub struct GroupProfile {
    pub group: usize,
    pub size: usize,
    /// Mean over members of the mean of the last three observations.
    pub mean_last3: f64,
    /// Mean over members of the per-series maximum.
    pub mean_max: f64,
    /// Mean 1-based position of the per-series maximum (earliest on ties).
    pub mean_argmax_visit: f64,
    /// Mean count of observations at or above each threshold, parallel to
    /// the threshold list.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub mean_visits_ge: Vec<f64>,
    /// Member counts of the per-series maximum per value bin.
    pub max_histogram: Vec<usize>,
    /// Member counts of the last-three mean per value bin.
    pub last3_histogram: Vec<usize>,
    /// Average over within-cluster pairs of the best tilt-traveled
    /// correlation; absent for singleton groups.
    pub avg_trend_corr: Option<f64>,
    /// Fraction of within-cluster pairs with that correlation at or above
    /// 0.5; absent for singleton groups.
    pub frac_corr_ge_half: Option<f64>,
}

/// Default thresholds for glycemic profiling (percent HbA1c).
pub const DEFAULT_THRESHOLDS: [f64; 3] = [6.5, 7.0, 10.0];
/// Default bin edges; bins are `[e0, e1), ..., [e_last, inf)`.
pub const DEFAULT_BIN_EDGES: [f64; 6] = [0.0, 6.5, 7.0, 8.0, 9.0, 10.0];

fn bin_index(edges: &[f64], v: f64) -> usize {
    let mut idx = 0;
    for (i, &e) in edges.iter().enumerate() {
        if v >= e {
            idx = i;
        }
    }
    idx
}

/// Per-group profile statistics.
///
/// `bin_edges` define left-closed bins ending in an unbounded last bin;
/// values below the first edge are counted in the first bin so that each
/// histogram always totals the group size. `tilts` drive the pair
/// correlation statistic and must contain 0.
pub fn profile(
    dataset: &[TimeSeries],
    labels: &ClusterLabels,
    thresholds: &[f64],
    bin_edges: &[f64],
    tilts: &[f64],
) -> Result<Vec<GroupProfile>> {
    if labels.n() != dataset.len() {
        return Err(Error::ShapeMismatch {
            left: labels.n(),
            right: dataset.len(),
        });
    }
    if thresholds.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParam("thresholds must be sorted".into()));
    }
    if bin_edges.len() < 2 || bin_edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParam(
            "bin edges must be strictly increasing with at least 2 entries".into(),
        ));
    }
    if !tilts.contains(&0.0) {
        return Err(Error::InvalidParam("tilt set must contain 0".into()));
    }
    let mut out = Vec::with_capacity(labels.k());
    for (g, members) in labels.members().iter().enumerate() {
        let size = members.len();
        let mut sum_last3 = 0.0;
        let mut sum_max = 0.0;
        let mut sum_argmax = 0.0;
        let mut sum_counts = vec![0.0; thresholds.len()];
        let mut max_hist = vec![0usize; bin_edges.len()];
        let mut last3_hist = vec![0usize; bin_edges.len()];
        for &i in members {
            let v = dataset[i].values();
            let tail = &v[v.len().saturating_sub(3)..];
            let last3 = tail.iter().sum::<f64>() / tail.len() as f64;
            let (argmax, max) = v
                .iter()
                .enumerate()
                .fold((0usize, f64::NEG_INFINITY), |(ai, am), (i, &x)| {
                    if x > am {
                        (i, x)
                    } else {
                        (ai, am)
                    }
                });
            sum_last3 += last3;
            sum_max += max;
            sum_argmax += (argmax + 1) as f64;
            for (ti, &thr) in thresholds.iter().enumerate() {
                sum_counts[ti] += v.iter().filter(|&&x| x >= thr).count() as f64;
            }
            max_hist[bin_index(bin_edges, max)] += 1;
            last3_hist[bin_index(bin_edges, last3)] += 1;
        }
        let (avg_trend_corr, frac_corr_ge_half) = if size >= 2 {
            let mut sum_corr = 0.0;
            let mut ge_half = 0usize;
            let mut pairs = 0usize;
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    let c = best_tilted_corr(dataset[i].values(), dataset[j].values(), tilts)?;
                    sum_corr += c;
                    if c >= 0.5 {
                        ge_half += 1;
                    }
                    pairs += 1;
                }
            }
            (
                Some(sum_corr / pairs as f64),
                Some(ge_half as f64 / pairs as f64),
            )
        } else {
            (None, None)
        };
        let sz = size as f64;
        out.push(GroupProfile {
            group: g + 1,
            size,
            mean_last3: sum_last3 / sz,
            mean_max: sum_max / sz,
            mean_argmax_visit: sum_argmax / sz,
            mean_visits_ge: sum_counts.iter().map(|c| c / sz).collect(),
            max_histogram: max_hist,
            last3_histogram: last3_hist,
            avg_trend_corr,
            frac_corr_ge_half,
        });
    }
    Ok(out)
}

/// A clustering pipeline entered into the comparison harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    KMeans,
    Hierarchical(Measure),
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::KMeans => "kmeans",
            Method::Hierarchical(m) => m.name(),
        }
    }

    pub fn parse(s: &str) -> Result<Method> {
        if s.eq_ignore_ascii_case("kmeans") {
            return Ok(Method::KMeans);
        }
        Ok(Method::Hierarchical(Measure::parse(s)?))
    }
}

/// One row of the comparison table.
#[derive(Debug, Clone, Serialize)]
pub struct MethodScore {
    pub method: String,
    pub accuracy: f64,
    pub ari: f64,
}

/// Runs every method at `k = truth.k()` and reports accuracy and ARI in the
/// input order. Hierarchical methods share `params` and `linkage`; K-means
/// uses `seed` and `restarts`.
pub fn compare_methods(
    dataset: &[TimeSeries],
    truth: &ClusterLabels,
    methods: &[Method],
    params: &TravelParams,
    linkage: Linkage,
    seed: u64,
    restarts: usize,
) -> Result<Vec<MethodScore>> {
    if truth.n() != dataset.len() {
        return Err(Error::ShapeMismatch {
            left: truth.n(),
            right: dataset.len(),
        });
    }
    let k = truth.k();
    let mut out = Vec::with_capacity(methods.len());
    for method in methods {
        let labels = match method {
            Method::KMeans => kmeans(dataset, k, seed, restarts)?.labels,
            Method::Hierarchical(measure) => {
                let matrix = dissim_matrix(dataset, params, *measure)?;
                cut(&agglomerate(&matrix, linkage)?, k)?
            }
        };
        out.push(MethodScore {
            method: method.name().to_string(),
            accuracy: accuracy(&labels, truth)?,
            ari: ari(&labels, truth)?,
        });
    }
    Ok(out)
}
