//! Time-and-trend traveling dissimilarity (4TaStiC) for fixed-length time
//! series, with agglomerative hierarchical clustering, classic baselines,
//! external evaluation metrics, cluster profiling, and seeded synthetic
//! benchmarks.
//!
//! The measure compares two series at every time shift up to `L` (in both
//! directions) and every small linear tilt from a grid `E`, blending a
//! penalized Pearson correlation dissimilarity with a per-point-normalized
//! Euclidean distance under a weight `alpha`, and keeps the best match. It is
//! built for data where observation timelines are flexible — series that
//! share a pattern at a lag, or at a slightly different trend, should land in
//! the same cluster.

pub mod clustering;
pub mod datagen;
pub mod dissimilarity;
pub mod error;
pub mod evaluation;
pub mod io;
pub mod params;
pub mod series;

pub use clustering::{agglomerate, cut, kmeans, ClusterLabels, Dendrogram, KMeansResult, Linkage, Merge};
pub use datagen::{generate, load_dataset, preset, preset_names, ClusterRecipe, GeneratorSpec};
pub use dissimilarity::{
    base_dissim, default_alpha, dissim_matrix, pearson_dissim, shift_tilt, tastic_dissim,
    time_travel_dissim, trend_travel_dissim, weighted_euclidean, DissimilarityMatrix, Measure,
    PairAlignment, ShiftDirection, TravelBase,
};
pub use error::{Error, Result};
pub use evaluation::{
    accuracy, ari, compare_methods, elbow_curve, profile, wcd, ContingencyTable, ElbowCurve,
    ElbowPoint, GroupProfile, Method, MethodScore,
};
pub use params::{AlphaSpec, TravelParams, DEFAULT_MAX_SHIFT, DEFAULT_PENALTY, DEFAULT_PERCENTILE, DEFAULT_TILT};
pub use series::TimeSeries;
