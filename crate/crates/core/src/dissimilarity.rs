//! Shift/tilt operators, base and traveled dissimilarities, the data-driven
//! correlation weight, and the full pairwise dissimilarity matrix.
//!
//! The traveling measure searches over time shifts `l in {0..=L}` (applied in
//! both directions), tilt angles `eps in E` (a linear ramp added to one series
//! before the correlation term), and both orderings of the pair, taking the
//! minimum of the blended base dissimilarity over all candidates. Trying the
//! tilt on each series in turn makes the measure symmetric by construction;
//! tilting only one fixed side does not, even for a symmetric tilt grid.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::TravelParams;
use crate::series::{common_length, TimeSeries};

/// Which end of the series survives a shift by `l`.
///
/// `Forward` keeps the first `T - l` points, `Backward` the last `T - l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftDirection {
    Forward,
    Backward,
}

/// How a shift by `l` is split between the two series of a pair: one side
/// drops its head while the other drops its tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairAlignment {
    XBackwardYForward,
    XForwardYBackward,
}

const PAIR_ALIGNMENTS: [PairAlignment; 2] = [
    PairAlignment::XBackwardYForward,
    PairAlignment::XForwardYBackward,
];

/// Drops `l` points from one end and adds the tilt ramp `eps * (0, 1, 2, ...)`
/// to what remains. The input is unchanged.
pub fn shift_tilt(x: &[f64], l: usize, direction: ShiftDirection, eps: f64) -> Result<Vec<f64>> {
    if l >= x.len() {
        return Err(Error::InvalidShift {
            shift: l,
            len: x.len(),
        });
    }
    let base = match direction {
        ShiftDirection::Forward => &x[..x.len() - l],
        ShiftDirection::Backward => &x[l..],
    };
    let mut out = Vec::with_capacity(base.len());
    tilt_into(&mut out, base, eps);
    Ok(out)
}

/// `out = base + eps * (0, 1, 2, ...)`, reusing the buffer.
fn tilt_into(out: &mut Vec<f64>, base: &[f64], eps: f64) {
    out.clear();
    out.extend(
        base.iter()
            .enumerate()
            .map(|(i, &v)| v + eps * i as f64),
    );
}

fn is_constant(u: &[f64]) -> bool {
    u.iter().all(|&v| v == u[0])
}

/// Sample Pearson correlation with the zero-variance convention: identical
/// sequences (in particular equal constants) correlate at 1, and a constant
/// paired with anything else at 0. The result is clamped to `[-1, 1]` so the
/// derived dissimilarity can never go negative through rounding.
pub(crate) fn pearson_corr(u: &[f64], v: &[f64]) -> f64 {
    debug_assert_eq!(u.len(), v.len());
    if u == v {
        return 1.0;
    }
    let cu = is_constant(u);
    let cv = is_constant(v);
    if cu && cv {
        return if u[0] == v[0] { 1.0 } else { 0.0 };
    }
    if cu || cv {
        return 0.0;
    }
    let n = u.len() as f64;
    let (mut su, mut sv, mut suu, mut svv, mut suv) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&a, &b) in u.iter().zip(v) {
        su += a;
        sv += b;
        suu += a * a;
        svv += b * b;
        suv += a * b;
    }
    let num = n * suv - su * sv;
    let den_u = n * suu - su * su;
    let den_v = n * svv - sv * sv;
    // Nearly-constant inputs can cancel to a nonpositive variance term.
    if den_u <= 0.0 || den_v <= 0.0 {
        return 0.0;
    }
    (num / (den_u * den_v).sqrt()).clamp(-1.0, 1.0)
}

/// Pearson correlation dissimilarity `1 - Corr(x, y)`, in `[0, 2]`.
pub fn pearson_dissim(x: &[f64], y: &[f64]) -> Result<f64> {
    check_same_len(x, y)?;
    if x.len() < 2 {
        return Err(Error::InsufficientData(
            "correlation needs at least 2 points".into(),
        ));
    }
    Ok(1.0 - pearson_corr(x, y))
}

/// Root-mean-square difference: `sqrt(sum((x - y)^2) / len)`.
///
/// The per-point normalization keeps values comparable across the different
/// aligned lengths produced by shifting.
pub fn weighted_euclidean(x: &[f64], y: &[f64]) -> Result<f64> {
    check_same_len(x, y)?;
    if x.is_empty() {
        return Err(Error::InsufficientData(
            "distance needs at least 1 point".into(),
        ));
    }
    Ok(rms_diff(x, y))
}

fn rms_diff(x: &[f64], y: &[f64]) -> f64 {
    let sum: f64 = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| {
            let d = a - b;
            d * d
        })
        .sum();
    (sum / x.len() as f64).sqrt()
}

/// Plain Euclidean distance over full-length series.
pub fn euclidean(x: &[f64], y: &[f64]) -> Result<f64> {
    check_same_len(x, y)?;
    let sum: f64 = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| {
            let d = a - b;
            d * d
        })
        .sum();
    Ok(sum.sqrt())
}

fn check_same_len(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::ShapeMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(())
}

/// One candidate of the traveling search: the blend
/// `alpha * (1 - exp(-C*|eps|) * Corr(x', y'_tilted)) + (1 - alpha) * rms(x', y')`
/// where `x'` and `y'` are the shift-aligned subsequences. The tilt is applied
/// to `y` and only inside the correlation term; the Euclidean term always
/// compares untilted subsequences.
pub fn base_dissim(
    x: &[f64],
    y: &[f64],
    l: usize,
    alignment: PairAlignment,
    eps: f64,
    params: &TravelParams,
) -> Result<f64> {
    check_same_len(x, y)?;
    if l >= x.len() {
        return Err(Error::InvalidShift {
            shift: l,
            len: x.len(),
        });
    }
    let mut scratch = Vec::new();
    Ok(base_dissim_unchecked(
        x,
        y,
        l,
        alignment,
        eps,
        params.penalty(),
        params.alpha(),
        &mut scratch,
    ))
}

#[allow(clippy::too_many_arguments)]
fn base_dissim_unchecked(
    x: &[f64],
    y: &[f64],
    l: usize,
    alignment: PairAlignment,
    eps: f64,
    penalty: f64,
    alpha: f64,
    scratch: &mut Vec<f64>,
) -> f64 {
    let (xs, ys) = match alignment {
        PairAlignment::XBackwardYForward => (&x[l..], &y[..y.len() - l]),
        PairAlignment::XForwardYBackward => (&x[..x.len() - l], &y[l..]),
    };
    tilt_into(scratch, ys, eps);
    let corr = pearson_corr(xs, scratch);
    let corr_term = 1.0 - (-penalty * eps.abs()).exp() * corr;
    alpha * corr_term + (1.0 - alpha) * rms_diff(xs, ys)
}

/// The traveling dissimilarity: minimum of [`base_dissim`] over all shifts
/// `l in {0..=L}`, both alignments, every tilt angle, and both orderings of
/// the pair. Candidates are evaluated in a fixed order so results are
/// reproducible bit for bit regardless of parallelism.
pub fn tastic_dissim(x: &TimeSeries, y: &TimeSeries, params: &TravelParams) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::ShapeMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    params.check_applicable(x.len())?;
    let mut scratch = Vec::with_capacity(x.len());
    Ok(traveled_min(
        x.values(),
        y.values(),
        params.max_shift(),
        params.tilts(),
        params.penalty(),
        params.alpha(),
        &mut scratch,
    ))
}

fn traveled_min(
    x: &[f64],
    y: &[f64],
    max_shift: usize,
    tilts: &[f64],
    penalty: f64,
    alpha: f64,
    scratch: &mut Vec<f64>,
) -> f64 {
    let mut best = f64::INFINITY;
    for l in 0..=max_shift {
        for alignment in PAIR_ALIGNMENTS {
            for &eps in tilts {
                let a = base_dissim_unchecked(x, y, l, alignment, eps, penalty, alpha, scratch);
                if a < best {
                    best = a;
                }
                let b = base_dissim_unchecked(y, x, l, alignment, eps, penalty, alpha, scratch);
                if b < best {
                    best = b;
                }
            }
        }
    }
    best
}

/// Base measure searched over by [`time_travel_dissim`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TravelBase {
    /// Root-mean-square difference on the aligned subsequences.
    Euclidean,
    /// Pearson correlation dissimilarity; this is the cross-correlation
    /// dissimilarity baseline.
    Pearson,
}

/// Minimum of the chosen base measure over shifts `l in {0..=L}` and both
/// alignments of untilted subsequences.
pub fn time_travel_dissim(
    x: &TimeSeries,
    y: &TimeSeries,
    max_shift: usize,
    base: TravelBase,
) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::ShapeMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if max_shift >= x.len() {
        return Err(Error::InvalidShift {
            shift: max_shift,
            len: x.len(),
        });
    }
    let (xv, yv) = (x.values(), y.values());
    let mut best = f64::INFINITY;
    for l in 0..=max_shift {
        for alignment in PAIR_ALIGNMENTS {
            let (xs, ys) = match alignment {
                PairAlignment::XBackwardYForward => (&xv[l..], &yv[..yv.len() - l]),
                PairAlignment::XForwardYBackward => (&xv[..xv.len() - l], &yv[l..]),
            };
            let d = match base {
                TravelBase::Euclidean => rms_diff(xs, ys),
                TravelBase::Pearson => 1.0 - pearson_corr(xs, ys),
            };
            if d < best {
                best = d;
            }
        }
    }
    Ok(best)
}

/// Minimum over tilt angles of the penalized correlation dissimilarity
/// `1 - exp(-C*|eps|) * Corr(x, y + eps*ramp)`, with the tilt applied to `y`.
/// Used standalone for within-cluster correlation reporting.
pub fn trend_travel_dissim(x: &TimeSeries, y: &TimeSeries, tilts: &[f64], penalty: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::ShapeMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if !tilts.contains(&0.0) {
        return Err(Error::InvalidParam("tilt set must contain 0".into()));
    }
    if !penalty.is_finite() || penalty < 0.0 {
        return Err(Error::InvalidParam(
            "penalty coefficient must be a nonnegative real".into(),
        ));
    }
    let mut scratch = Vec::with_capacity(y.len());
    let mut best = f64::INFINITY;
    for &eps in tilts {
        tilt_into(&mut scratch, y.values(), eps);
        let d = 1.0 - (-penalty * eps.abs()).exp() * pearson_corr(x.values(), &scratch);
        if d < best {
            best = d;
        }
    }
    Ok(best)
}

/// Best tilt-traveled correlation `max over eps of Corr(x, y + eps*ramp)`,
/// without any penalty factor. This is the descriptive statistic used by
/// cluster profiles.
pub fn best_tilted_corr(x: &[f64], y: &[f64], tilts: &[f64]) -> Result<f64> {
    check_same_len(x, y)?;
    if tilts.is_empty() {
        return Err(Error::InvalidParam("tilt set must not be empty".into()));
    }
    let mut scratch = Vec::with_capacity(y.len());
    let mut best = f64::NEG_INFINITY;
    for &eps in tilts {
        tilt_into(&mut scratch, y, eps);
        let c = pearson_corr(x, &scratch);
        if c > best {
            best = c;
        }
    }
    Ok(best)
}

/// Linear-interpolation percentile of a sorted sample, `p` as a fraction.
fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Data-driven correlation weight
/// `max d_eu / (Q_p({1 - Corr}) + max d_eu)`
/// over all unordered pairs, where `d_eu` is the plain full-length Euclidean
/// distance and `Q_p` the p-th percentile of the raw correlation
/// dissimilarities. A dataset of identical series yields 1.
pub fn default_alpha(dataset: &[TimeSeries], p: f64) -> Result<f64> {
    if dataset.len() < 2 {
        return Err(Error::InsufficientData(
            "the default alpha needs at least 2 series".into(),
        ));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParam(format!(
            "percentile order must lie in [0, 1], got {p}"
        )));
    }
    common_length(dataset)?;
    let n = dataset.len();
    let mut max_eu = 0.0f64;
    let mut corr_dissims = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let (xi, xj) = (dataset[i].values(), dataset[j].values());
            let d = euclidean(xi, xj)?;
            if d > max_eu {
                max_eu = d;
            }
            corr_dissims.push(1.0 - pearson_corr(xi, xj));
        }
    }
    corr_dissims.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = percentile_sorted(&corr_dissims, p);
    let denom = q + max_eu;
    if denom == 0.0 {
        return Ok(1.0);
    }
    Ok(max_eu / denom)
}

/// The pairwise measures the matrix builder understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    /// The traveling blend of penalized correlation and RMS difference.
    Tastic,
    /// Plain Euclidean distance on full-length series.
    Euclidean,
    /// Time-traveled RMS difference.
    EuclideanTimeTravel,
    /// Plain Pearson correlation dissimilarity.
    Pearson,
    /// Time-traveled correlation dissimilarity (cross-correlation).
    PearsonTimeTravel,
    /// Time-and-tilt-traveled penalized correlation dissimilarity
    /// (the traveling blend with the Euclidean term switched off).
    PearsonTimeTrendTravel,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::Tastic,
        Measure::Euclidean,
        Measure::EuclideanTimeTravel,
        Measure::Pearson,
        Measure::PearsonTimeTravel,
        Measure::PearsonTimeTrendTravel,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Measure::Tastic => "tastic",
            Measure::Euclidean => "euclidean",
            Measure::EuclideanTimeTravel => "euclidean-tt",
            Measure::Pearson => "pearson",
            Measure::PearsonTimeTravel => "pearson-tt",
            Measure::PearsonTimeTrendTravel => "pearson-tt-trend",
        }
    }

    pub fn parse(s: &str) -> Result<Measure> {
        match s.to_ascii_lowercase().as_str() {
            "tastic" => Ok(Measure::Tastic),
            "euclidean" | "euclid" => Ok(Measure::Euclidean),
            "euclidean-tt" | "euclid-tt" => Ok(Measure::EuclideanTimeTravel),
            "pearson" => Ok(Measure::Pearson),
            "pearson-tt" | "cross-correlation" | "xcorr" => Ok(Measure::PearsonTimeTravel),
            "pearson-tt-trend" | "pearson-ttt" => Ok(Measure::PearsonTimeTrendTravel),
            other => Err(Error::InvalidParam(format!("unknown measure `{other}`"))),
        }
    }

    /// Whether this measure uses the shift search (and therefore `L`).
    fn uses_travel(&self) -> bool {
        !matches!(self, Measure::Euclidean | Measure::Pearson)
    }
}

/// Symmetric pairwise dissimilarity matrix with zero diagonal, stored dense
/// row-major with both triangles materialized.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    n: usize,
    entries: Vec<f64>,
    method_tag: String,
}

impl DissimilarityMatrix {
    /// Validates symmetry (exact), zero diagonal, and finite nonnegative
    /// entries.
    pub fn from_entries(n: usize, entries: Vec<f64>, method_tag: String) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for n = {n}, got {}",
                n * n,
                entries.len()
            )));
        }
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return Err(Error::InvalidMatrix(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let v = entries[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidMatrix(format!(
                        "entry ({i}, {j}) = {v} is not a finite nonnegative real"
                    )));
                }
                if entries[i * n + j] != entries[j * n + i] {
                    return Err(Error::InvalidMatrix(format!(
                        "asymmetry at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self {
            n,
            entries,
            method_tag,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn method_tag(&self) -> &str {
        &self.method_tag
    }

    /// Multiplies every entry by a positive constant (the method tag is kept).
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidParam(format!(
                "scale factor must be a positive real, got {c}"
            )));
        }
        Ok(Self {
            n: self.n,
            entries: self.entries.iter().map(|&v| v * c).collect(),
            method_tag: self.method_tag.clone(),
        })
    }
}

fn pair_value(measure: Measure, x: &TimeSeries, y: &TimeSeries, params: &TravelParams) -> f64 {
    let mut scratch = Vec::with_capacity(x.len());
    match measure {
        Measure::Tastic => traveled_min(
            x.values(),
            y.values(),
            params.max_shift(),
            params.tilts(),
            params.penalty(),
            params.alpha(),
            &mut scratch,
        ),
        Measure::Euclidean => euclidean(x.values(), y.values()).expect("validated lengths"),
        Measure::EuclideanTimeTravel => traveled_min(
            x.values(),
            y.values(),
            params.max_shift(),
            &[0.0],
            0.0,
            0.0,
            &mut scratch,
        ),
        Measure::Pearson => 1.0 - pearson_corr(x.values(), y.values()),
        Measure::PearsonTimeTravel => traveled_min(
            x.values(),
            y.values(),
            params.max_shift(),
            &[0.0],
            0.0,
            1.0,
            &mut scratch,
        ),
        Measure::PearsonTimeTrendTravel => traveled_min(
            x.values(),
            y.values(),
            params.max_shift(),
            params.tilts(),
            params.penalty(),
            1.0,
            &mut scratch,
        ),
    }
}

/// Builds the full pairwise matrix of the selected measure.
///
/// Unordered pairs are distributed across the current rayon pool; each entry
/// is a pure function of its pair, so the result is identical for any worker
/// count, including sequential execution.
pub fn dissim_matrix(
    dataset: &[TimeSeries],
    params: &TravelParams,
    measure: Measure,
) -> Result<DissimilarityMatrix> {
    if dataset.len() < 2 {
        return Err(Error::InsufficientData(
            "a dissimilarity matrix needs at least 2 series".into(),
        ));
    }
    let len = common_length(dataset)?;
    if measure.uses_travel() {
        params.check_applicable(len)?;
    }
    let n = dataset.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| pair_value(measure, &dataset[i], &dataset[j], params))
        .collect();
    let mut entries = vec![0.0; n * n];
    for (&(i, j), &v) in pairs.iter().zip(&values) {
        entries[i * n + j] = v;
        entries[j * n + i] = v;
    }
    let tag = method_tag(measure, params);
    DissimilarityMatrix::from_entries(n, entries, tag)
}

fn method_tag(measure: Measure, params: &TravelParams) -> String {
    match measure {
        Measure::Euclidean | Measure::Pearson => measure.name().to_string(),
        Measure::EuclideanTimeTravel | Measure::PearsonTimeTravel => {
            format!("{}(L={})", measure.name(), params.max_shift())
        }
        Measure::Tastic => format!(
            "{}(alpha={},L={},E={:?},C={})",
            measure.name(),
            params.alpha(),
            params.max_shift(),
            params.tilts(),
            params.penalty()
        ),
        Measure::PearsonTimeTrendTravel => format!(
            "{}(L={},E={:?},C={})",
            measure.name(),
            params.max_shift(),
            params.tilts(),
            params.penalty()
        ),
    }
}
