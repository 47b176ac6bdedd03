//! Agglomerative hierarchical clustering over a dissimilarity matrix,
//! dendrogram cutting, and a seeded K-means baseline on raw series.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::series::{common_length, TimeSeries};

/// Inter-cluster distance rule used during agglomeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Linkage {
    /// Distance of the closest pair of points.
    Single,
    /// Distance of the farthest pair of points.
    Complete,
    /// Mean distance over all cross pairs.
    Average,
}

impl Linkage {
    pub fn name(&self) -> &'static str {
        match self {
            Linkage::Single => "single",
            Linkage::Complete => "complete",
            Linkage::Average => "average",
        }
    }

    pub fn parse(s: &str) -> Result<Linkage> {
        match s.to_ascii_lowercase().as_str() {
            "single" => Ok(Linkage::Single),
            "complete" => Ok(Linkage::Complete),
            "average" => Ok(Linkage::Average),
            other => Err(Error::InvalidParam(format!("unknown linkage `{other}`"))),
        }
    }
}

/// One agglomeration step: clusters `a` and `b` (with `a < b`) merge at
/// `height` into a new cluster `new_id`.
#[derive(Debug, Clone, PartialEq)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub height: f64,
    pub new_id: usize,
}

/// The ordered merge list of an agglomeration run. Leaves are `0..n`, merged
/// clusters take ids `n..2n-1` in merge order.
///
/// `inversions` counts merges whose height is below the preceding merge's;
/// the three supported linkages are monotone, so this stays 0 for matrices
/// that satisfy their invariants, but it is recorded rather than enforced.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    n: usize,
    merges: Vec<Merge>,
    inversions: usize,
}

impl Dendrogram {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn inversions(&self) -> usize {
        self.inversions
    }
}

/// Flat cluster assignment: labels `1..=k`, each label non-empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterLabels {
    assignments: Vec<usize>,
    k: usize,
}

impl ClusterLabels {
    pub fn new(assignments: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParam("k must be at least 1".into()));
        }
        let mut seen = vec![false; k];
        for &a in &assignments {
            if a < 1 || a > k {
                return Err(Error::InvalidParam(format!(
                    "label {a} outside 1..={k}"
                )));
            }
            seen[a - 1] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidParam("every label must be used".into()));
        }
        Ok(Self { assignments, k })
    }

    /// Builds labels from arbitrary tokens, numbering groups `1..=k` in order
    /// of first appearance.
    pub fn from_tokens<T: PartialEq + Clone>(tokens: &[T]) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::InsufficientData("no labels given".into()));
        }
        let mut distinct: Vec<T> = Vec::new();
        let mut assignments = Vec::with_capacity(tokens.len());
        for t in tokens {
            let idx = match distinct.iter().position(|d| d == t) {
                Some(i) => i,
                None => {
                    distinct.push(t.clone());
                    distinct.len() - 1
                }
            };
            assignments.push(idx + 1);
        }
        let k = distinct.len();
        Self::new(assignments, k)
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.assignments.len()
    }

    /// Member indices of each cluster, in label order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &a) in self.assignments.iter().enumerate() {
            out[a - 1].push(i);
        }
        out
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.k];
        for &a in &self.assignments {
            out[a - 1] += 1;
        }
        out
    }
}

/// Agglomerates the matrix into a full dendrogram under the chosen linkage.
///
/// Deterministic: the closest active pair merges first, with exact-distance
/// ties broken by the lexicographically smallest pair of cluster ids.
pub fn agglomerate(matrix: &DissimilarityMatrix, linkage: Linkage) -> Result<Dendrogram> {
    let n = matrix.n();
    if n < 1 {
        return Err(Error::InsufficientData("matrix is empty".into()));
    }
    // Working distances between active slots; slot s currently hosts cluster
    // ids[s] with sizes[s] leaves.
    let mut dist = matrix.entries().to_vec();
    let mut ids: Vec<usize> = (0..n).collect();
    let mut sizes: Vec<usize> = vec![1; n];
    let mut alive: Vec<bool> = vec![true; n];
    let mut merges = Vec::with_capacity(n - 1);
    let mut inversions = 0usize;
    let mut prev_height = f64::NEG_INFINITY;

    for step in 0..n.saturating_sub(1) {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for si in 0..n {
            if !alive[si] {
                continue;
            }
            for sj in (si + 1)..n {
                if !alive[sj] {
                    continue;
                }
                let d = dist[si * n + sj];
                let (lo, hi) = if ids[si] < ids[sj] {
                    (ids[si], ids[sj])
                } else {
                    (ids[sj], ids[si])
                };
                let better = match best {
                    None => true,
                    Some((bd, blo, bhi, _, _)) => {
                        d < bd || (d == bd && (lo, hi) < (blo, bhi))
                    }
                };
                if better {
                    best = Some((d, lo, hi, si, sj));
                }
            }
        }
        let (height, lo, hi, si, sj) = best.expect("at least one active pair");
        if height < prev_height {
            inversions += 1;
        }
        prev_height = height;

        let new_id = n + step;
        for sk in 0..n {
            if !alive[sk] || sk == si || sk == sj {
                continue;
            }
            let dik = dist[si * n + sk];
            let djk = dist[sj * n + sk];
            let nd = match linkage {
                Linkage::Single => dik.min(djk),
                Linkage::Complete => dik.max(djk),
                Linkage::Average => {
                    let (wi, wj) = (sizes[si] as f64, sizes[sj] as f64);
                    (wi * dik + wj * djk) / (wi + wj)
                }
            };
            dist[si * n + sk] = nd;
            dist[sk * n + si] = nd;
        }
        sizes[si] += sizes[sj];
        ids[si] = new_id;
        alive[sj] = false;
        merges.push(Merge {
            a: lo,
            b: hi,
            height,
            new_id,
        });
    }

    Ok(Dendrogram {
        n,
        merges,
        inversions,
    })
}

/// Undoes the last `k - 1` merges, yielding `k` flat clusters labeled
/// `1..=k` in order of first member appearance.
pub fn cut(dendrogram: &Dendrogram, k: usize) -> Result<ClusterLabels> {
    let n = dendrogram.n();
    if k < 1 || k > n {
        return Err(Error::InvalidParam(format!(
            "k = {k} outside 1..={n}"
        )));
    }
    let mut parent: Vec<usize> = (0..2 * n - 1).collect();
    fn find(parent: &mut [usize], mut a: usize) -> usize {
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    for m in &dendrogram.merges()[..n - k] {
        let ra = find(&mut parent, m.a);
        let rb = find(&mut parent, m.b);
        parent[ra] = m.new_id;
        parent[rb] = m.new_id;
    }
    let mut label_of_root: Vec<(usize, usize)> = Vec::new();
    let mut assignments = Vec::with_capacity(n);
    for i in 0..n {
        let r = find(&mut parent, i);
        let label = match label_of_root.iter().find(|(root, _)| *root == r) {
            Some(&(_, l)) => l,
            None => {
                let l = label_of_root.len() + 1;
                label_of_root.push((r, l));
                l
            }
        };
        assignments.push(label);
    }
    ClusterLabels::new(assignments, k)
}

/// Result of a K-means run: the winning assignment and its squared-error
/// objective.
#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub labels: ClusterLabels,
    pub objective: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// Lloyd iterations from seeded uniform-random distinct starting points,
/// best of `restarts` by the squared-error objective (ties keep the earlier
/// restart). An emptied cluster is reseeded with the point farthest from its
/// assigned centroid.
pub fn kmeans(
    dataset: &[TimeSeries],
    k: usize,
    seed: u64,
    restarts: usize,
) -> Result<KMeansResult> {
    let n = dataset.len();
    common_length(dataset)?;
    if k < 1 || k > n {
        return Err(Error::InvalidParam(format!("k = {k} outside 1..={n}")));
    }
    if restarts < 1 {
        return Err(Error::InvalidParam("restarts must be at least 1".into()));
    }
    let points: Vec<&[f64]> = dataset.iter().map(|s| s.values()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<KMeansResult> = None;

    for _ in 0..restarts {
        let init = rand::seq::index::sample(&mut rng, n, k).into_vec();
        let mut centroids: Vec<Vec<f64>> = init.iter().map(|&i| points[i].to_vec()).collect();
        let mut assignment = vec![0usize; n];
        for _ in 0..300 {
            // Assignment step; ties go to the lower centroid index.
            let mut changed = false;
            for (i, p) in points.iter().enumerate() {
                let mut arg = 0usize;
                let mut bestd = sq_dist(p, &centroids[0]);
                for (c, centroid) in centroids.iter().enumerate().skip(1) {
                    let d = sq_dist(p, centroid);
                    if d < bestd {
                        bestd = d;
                        arg = c;
                    }
                }
                if assignment[i] != arg {
                    assignment[i] = arg;
                    changed = true;
                }
            }
            // Reseed empty clusters from the farthest point.
            let mut counts = vec![0usize; k];
            for &a in &assignment {
                counts[a] += 1;
            }
            for c in 0..k {
                if counts[c] > 0 {
                    continue;
                }
                let far = (0..n)
                    .filter(|&i| counts[assignment[i]] > 1)
                    .max_by(|&i, &j| {
                        let di = sq_dist(points[i], &centroids[assignment[i]]);
                        let dj = sq_dist(points[j], &centroids[assignment[j]]);
                        di.partial_cmp(&dj)
                            .unwrap()
                            .then(j.cmp(&i)) // ties keep the lowest index
                    })
                    .expect("k <= n leaves a donor point");
                counts[assignment[far]] -= 1;
                assignment[far] = c;
                counts[c] = 1;
                changed = true;
            }
            // Update step.
            for (c, centroid) in centroids.iter_mut().enumerate() {
                centroid.iter_mut().for_each(|v| *v = 0.0);
                for (i, p) in points.iter().enumerate() {
                    if assignment[i] == c {
                        for (cv, &pv) in centroid.iter_mut().zip(*p) {
                            *cv += pv;
                        }
                    }
                }
                let cnt = counts[c] as f64;
                centroid.iter_mut().for_each(|v| *v /= cnt);
            }
            if !changed {
                break;
            }
        }
        let objective: f64 = points
            .iter()
            .enumerate()
            .map(|(i, p)| sq_dist(p, &centroids[assignment[i]]))
            .sum();
        let labels = ClusterLabels::new(assignment.iter().map(|&a| a + 1).collect(), k)?;
        let candidate = KMeansResult { labels, objective };
        let replace = match &best {
            None => true,
            Some(b) => candidate.objective < b.objective,
        };
        if replace {
            best = Some(candidate);
        }
    }
    Ok(best.expect("at least one restart"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissimilarity::DissimilarityMatrix;

    fn matrix(n: usize, f: impl Fn(usize, usize) -> f64) -> DissimilarityMatrix {
        let mut e = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    e[i * n + j] = f(i.min(j), i.max(j));
                }
            }
        }
        DissimilarityMatrix::from_entries(n, e, "test".into()).unwrap()
    }

    #[test]
    fn two_tight_groups_merge_last_at_cross_distance() {
        // Points 0-2 and 3-5 are mutually at distance 0 within groups.
        let m = matrix(6, |i, j| if (i < 3) == (j < 3) { 0.0 } else { 5.0 });
        for linkage in [Linkage::Single, Linkage::Complete, Linkage::Average] {
            let d = agglomerate(&m, linkage).unwrap();
            let last = d.merges().last().unwrap();
            assert_eq!(last.height, 5.0, "{linkage:?}");
            let labels = cut(&d, 2).unwrap();
            assert_eq!(labels.assignments(), &[1, 1, 1, 2, 2, 2]);
            assert_eq!(d.inversions(), 0);
        }
    }

    #[test]
    fn cut_extremes() {
        let m = matrix(4, |i, j| (i + j) as f64);
        let d = agglomerate(&m, Linkage::Average).unwrap();
        assert_eq!(cut(&d, 1).unwrap().assignments(), &[1, 1, 1, 1]);
        assert_eq!(cut(&d, 4).unwrap().assignments(), &[1, 2, 3, 4]);
        assert!(cut(&d, 0).is_err());
        assert!(cut(&d, 5).is_err());
    }

    #[test]
    fn tie_break_is_lexicographic() {
        // All distances equal: the first merge must join clusters 0 and 1,
        // the second the new cluster with... ids (2,3) beat (4,x) pairs.
        let m = matrix(4, |_, _| 1.0);
        let d = agglomerate(&m, Linkage::Single).unwrap();
        assert_eq!((d.merges()[0].a, d.merges()[0].b), (0, 1));
        assert_eq!((d.merges()[1].a, d.merges()[1].b), (2, 3));
        assert_eq!((d.merges()[2].a, d.merges()[2].b), (4, 5));
    }

    #[test]
    fn labels_number_by_first_appearance() {
        let m = matrix(4, |i, j| match (i, j) {
            (2, 3) => 0.1,
            _ => 1.0,
        });
        let d = agglomerate(&m, Linkage::Single).unwrap();
        let labels = cut(&d, 3).unwrap();
        // 2 and 3 share a cluster; numbering follows first appearance.
        assert_eq!(labels.assignments(), &[1, 2, 3, 3]);
    }

    #[test]
    fn kmeans_k1_and_kn() {
        let data: Vec<TimeSeries> = (0..5)
            .map(|i| TimeSeries::new(format!("s{i}"), vec![i as f64, (i * i) as f64]).unwrap())
            .collect();
        let r1 = kmeans(&data, 1, 7, 3).unwrap();
        assert_eq!(r1.labels.assignments(), &[1, 1, 1, 1, 1]);
        // J at k=1 equals the total squared deviation from the mean.
        let mean0 = data.iter().map(|s| s.values()[0]).sum::<f64>() / 5.0;
        let mean1 = data.iter().map(|s| s.values()[1]).sum::<f64>() / 5.0;
        let total: f64 = data
            .iter()
            .map(|s| {
                let d0 = s.values()[0] - mean0;
                let d1 = s.values()[1] - mean1;
                d0 * d0 + d1 * d1
            })
            .sum();
        assert!((r1.objective - total).abs() < 1e-9);

        let rn = kmeans(&data, 5, 7, 3).unwrap();
        assert_eq!(rn.objective, 0.0);
        assert_eq!(rn.labels.k(), 5);
        assert_eq!(rn.labels.sizes(), vec![1, 1, 1, 1, 1]);
    }

    #[test]
    fn kmeans_matches_exhaustive_two_partition() {
        // Two tight blobs in the plane; enumerate all 2-partitions for the
        // global optimum of J.
        let pts = [
            [0.0, 0.0],
            [0.2, 0.1],
            [0.1, 0.3],
            [5.0, 5.0],
            [5.2, 5.1],
            [4.9, 5.3],
        ];
        let data: Vec<TimeSeries> = pts
            .iter()
            .enumerate()
            .map(|(i, p)| TimeSeries::new(format!("s{i}"), p.to_vec()).unwrap())
            .collect();
        let mut best = f64::INFINITY;
        for mask in 1..(1u32 << 6) - 1 {
            let (mut c0, mut c1): (Vec<usize>, Vec<usize>) = (Vec::new(), Vec::new());
            for i in 0..6 {
                if mask & (1 << i) != 0 {
                    c0.push(i);
                } else {
                    c1.push(i);
                }
            }
            let j: f64 = [&c0, &c1]
                .iter()
                .map(|members| {
                    let m0 = members.iter().map(|&i| pts[i][0]).sum::<f64>()
                        / members.len() as f64;
                    let m1 = members.iter().map(|&i| pts[i][1]).sum::<f64>()
                        / members.len() as f64;
                    members
                        .iter()
                        .map(|&i| {
                            let d0 = pts[i][0] - m0;
                            let d1 = pts[i][1] - m1;
                            d0 * d0 + d1 * d1
                        })
                        .sum::<f64>()
                })
                .sum();
            if j < best {
                best = j;
            }
        }
        let r = kmeans(&data, 2, 11, 20).unwrap();
        assert!((r.objective - best).abs() < 1e-9);
    }

    #[test]
    fn cluster_labels_validation() {
        assert!(ClusterLabels::new(vec![1, 2, 2], 2).is_ok());
        assert!(ClusterLabels::new(vec![1, 1], 2).is_err()); // label 2 unused
        assert!(ClusterLabels::new(vec![0, 1], 1).is_err()); // 0 out of range
        let l = ClusterLabels::from_tokens(&["b", "a", "b", "c"]).unwrap();
        assert_eq!(l.assignments(), &[1, 2, 1, 3]);
    }
}
