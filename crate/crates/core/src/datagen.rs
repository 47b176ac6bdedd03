//! Seeded synthetic benchmark generator: per-cluster recipes combining level,
//! trend, seasonality, and noise, with random per-series start offsets
//! realized by oversampling and windowing (no wrap-around).

use std::f64::consts::TAU;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::clustering::ClusterLabels;
use crate::error::{Error, Result};
use crate::io;
use crate::series::TimeSeries;

/// Recipe for one cluster of series.
///
/// A member's value at window position `t` with start offset `d` is
/// `(level + z_l*level_sd) + (trend + z_t*trend_sd)*(t + d)
///  + amplitude*sin(TAU*((t + d) + phase)/period) + z*noise_sd`
/// with independent standard normal draws `z_l`, `z_t` (one each per series)
/// and `z` (one per point). The per-series level and trend spreads model
/// individual baselines and tiny private trends on top of the shared shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRecipe {
    pub count: usize,
    pub level: f64,
    #[serde(default)]
    pub level_sd: f64,
    #[serde(default)]
    pub trend: f64,
    #[serde(default)]
    pub trend_sd: f64,
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default = "default_period")]
    pub period: f64,
    #[serde(default)]
    pub phase: f64,
    #[serde(default)]
    pub noise_sd: f64,
}

fn default_period() -> f64 {
    1.0
}

/// Per-dataset generation recipe. `class` is a descriptive tag (1, 2, or 3)
/// recording which benchmark family the spec belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub class: u8,
    pub recipes: Vec<ClusterRecipe>,
    pub series_len: usize,
    pub shift_range: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.class) {
            return Err(Error::InvalidParam(format!(
                "class must be 1, 2, or 3, got {}",
                self.class
            )));
        }
        if self.recipes.is_empty() {
            return Err(Error::InvalidParam("no cluster recipes".into()));
        }
        if self.series_len < 2 {
            return Err(Error::InvalidParam("series length must be at least 2".into()));
        }
        if self.shift_range >= self.series_len {
            return Err(Error::InvalidParam(format!(
                "shift range {} must be smaller than the series length {}",
                self.shift_range, self.series_len
            )));
        }
        for (i, r) in self.recipes.iter().enumerate() {
            if r.count < 1 {
                return Err(Error::InvalidParam(format!("recipe {i}: count must be >= 1")));
            }
            if r.period <= 0.0 {
                return Err(Error::InvalidParam(format!("recipe {i}: period must be > 0")));
            }
            for (name, v) in [
                ("level_sd", r.level_sd),
                ("trend_sd", r.trend_sd),
                ("amplitude", r.amplitude),
                ("noise_sd", r.noise_sd),
            ] {
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::InvalidParam(format!(
                        "recipe {i}: {name} must be a nonnegative real, got {v}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn total_count(&self) -> usize {
        self.recipes.iter().map(|r| r.count).sum()
    }
}

/// Generates the dataset and its ground-truth labels. Output is a pure
/// function of the spec, including the seed.
pub fn generate(spec: &GeneratorSpec) -> Result<(Vec<TimeSeries>, ClusterLabels)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut dataset = Vec::with_capacity(spec.total_count());
    let mut truth = Vec::with_capacity(spec.total_count());
    let mut idx = 0usize;
    for (ci, recipe) in spec.recipes.iter().enumerate() {
        for _ in 0..recipe.count {
            let delta = rng.random_range(0..=spec.shift_range);
            let z_level: f64 = StandardNormal.sample(&mut rng);
            let z_trend: f64 = StandardNormal.sample(&mut rng);
            let level = recipe.level + z_level * recipe.level_sd;
            let trend = recipe.trend + z_trend * recipe.trend_sd;
            let mut values = Vec::with_capacity(spec.series_len);
            for t in 0..spec.series_len {
                let s = (t + delta) as f64;
                let z: f64 = StandardNormal.sample(&mut rng);
                let v = level
                    + trend * s
                    + recipe.amplitude * (TAU * (s + recipe.phase) / recipe.period).sin()
                    + z * recipe.noise_sd;
                values.push(v);
            }
            idx += 1;
            dataset.push(TimeSeries::new(format!("s{idx}"), values)?);
            truth.push(ci + 1);
        }
    }
    let k = spec.recipes.len();
    Ok((dataset, ClusterLabels::new(truth, k)?))
}

/// Reads a dataset from the CSV schema (`id,label?,t1..tT`); ground-truth
/// labels are attached when a label column is present.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<(Vec<TimeSeries>, Option<ClusterLabels>)> {
    io::read_dataset_file(path)
}

const BENCH_LEN: usize = 12;
const BENCH_SHIFT: usize = 3;

fn recipe(
    count: usize,
    level: f64,
    level_sd: f64,
    trend: f64,
    trend_sd: f64,
    amplitude: f64,
    period: f64,
    phase: f64,
    noise_sd: f64,
) -> ClusterRecipe {
    ClusterRecipe {
        count,
        level,
        level_sd,
        trend,
        trend_sd,
        amplitude,
        period,
        phase,
        noise_sd,
    }
}

/// Names of the nine bundled benchmark presets.
pub fn preset_names() -> [&'static str; 9] {
    [
        "G1_1", "G1_2", "G1_3", "G2_1", "G2_2", "G2_3", "G3_1", "G3_2", "G3_3",
    ]
}

/// The bundled benchmark presets, three per class.
///
/// Class 1 separates clusters by mean level under a shared mild seasonal
/// shape. Class 2 overlaps levels (with per-series baselines) and separates
/// clusters by shape: distinct frequencies, up/down trends. Class 3 combines
/// both: one clean shape at two well-separated levels plus a level-overlapping
/// zoo of shapes, with tiny per-series trends everywhere.
pub fn preset(name: &str, seed: u64) -> Option<GeneratorSpec> {
    let (class, recipes): (u8, Vec<ClusterRecipe>) = match name.to_ascii_uppercase().as_str() {
        // Class 1: distinct levels, common shape, no per-series baselines.
        "G1_1" => (
            1,
            vec![
                recipe(10, 5.0, 0.0, 0.0, 0.0, 0.4, 6.0, 0.0, 0.45),
                recipe(10, 8.0, 0.0, 0.0, 0.0, 0.4, 6.0, 0.0, 0.45),
                recipe(10, 11.0, 0.0, 0.0, 0.0, 0.4, 6.0, 0.0, 0.45),
            ],
        ),
        "G1_2" => (
            1,
            vec![
                recipe(12, 4.5, 0.0, 0.0, 0.0, 0.4, 6.0, 0.0, 0.45),
                recipe(11, 7.0, 0.0, 0.0, 0.0, 0.4, 6.0, 0.0, 0.45),
                recipe(11, 9.5, 0.0, 0.0, 0.0, 0.4, 6.0, 0.0, 0.45),
                recipe(11, 12.0, 0.0, 0.0, 0.0, 0.4, 6.0, 0.0, 0.45),
            ],
        ),
        "G1_3" => (
            1,
            vec![
                recipe(11, 4.0, 0.0, 0.0, 0.0, 0.4, 6.0, 0.0, 0.45),
                recipe(11, 5.5, 0.0, 0.0, 0.0, 0.4, 6.0, 0.0, 0.45),
                recipe(11, 7.0, 0.0, 0.0, 0.0, 0.4, 6.0, 0.0, 0.45),
                recipe(11, 8.5, 0.0, 0.0, 0.0, 0.4, 6.0, 0.0, 0.45),
                recipe(11, 10.0, 0.0, 0.0, 0.0, 0.4, 6.0, 0.0, 0.45),
                recipe(10, 11.5, 0.0, 0.0, 0.0, 0.4, 6.0, 0.0, 0.45),
                recipe(10, 13.0, 0.0, 0.0, 0.0, 0.4, 6.0, 0.0, 0.45),
            ],
        ),
        // Class 2: overlapping levels with per-series baselines; clusters
        // differ in frequency or trend direction.
        "G2_1" => (
            2,
            vec![
                recipe(10, 7.0, 1.2, 0.0, 0.0, 1.4, 4.0, 0.0, 0.2),
                recipe(10, 7.0, 1.2, 0.0, 0.0, 1.4, 6.0, 0.0, 0.2),
                recipe(10, 7.0, 1.2, 0.0, 0.0, 1.4, 8.0, 0.0, 0.2),
            ],
        ),
        "G2_2" => (
            2,
            vec![
                recipe(10, 7.0, 1.2, 0.0, 0.0, 1.4, 4.0, 0.0, 0.2),
                recipe(10, 7.0, 1.2, 0.0, 0.0, 1.4, 6.0, 0.0, 0.2),
                recipe(10, 7.0, 1.2, 0.0, 0.0, 1.4, 8.0, 0.0, 0.2),
                recipe(10, 7.0, 1.2, 0.25, 0.0, 0.5, 6.0, 0.0, 0.2),
                recipe(10, 7.0, 1.2, -0.25, 0.0, 0.5, 6.0, 3.0, 0.2),
            ],
        ),
        "G2_3" => (
            2,
            vec![
                recipe(10, 7.0, 1.2, 0.0, 0.0, 1.4, 3.0, 0.0, 0.2),
                recipe(10, 7.0, 1.2, 0.0, 0.0, 1.4, 4.0, 0.0, 0.2),
                recipe(10, 7.0, 1.2, 0.0, 0.0, 1.4, 5.0, 0.0, 0.2),
                recipe(10, 7.0, 1.2, 0.0, 0.0, 1.4, 6.0, 0.0, 0.2),
                recipe(10, 7.0, 1.2, 0.0, 0.0, 1.4, 8.0, 0.0, 0.2),
                recipe(10, 7.0, 1.2, 0.0, 0.0, 1.4, 12.0, 0.0, 0.2),
                recipe(10, 7.0, 1.2, 0.0, 0.0, 1.4, 12.0, 6.0, 0.2),
                recipe(10, 7.0, 1.2, 0.25, 0.0, 0.5, 6.0, 0.0, 0.2),
                recipe(10, 7.0, 1.2, -0.25, 0.0, 0.5, 6.0, 3.0, 0.2),
            ],
        ),
        // Class 3: one clean shape at two levels plus a level-overlapping
        // zoo of shapes; tiny per-series trends on every cluster.
        "G3_1" => (
            3,
            vec![
                recipe(13, 4.5, 0.3, 0.0, 0.05, 1.3, 6.0, 0.0, 0.1),
                recipe(13, 11.5, 0.3, 0.0, 0.05, 1.3, 6.0, 3.0, 0.1),
                recipe(13, 7.75, 1.25, 0.0, 0.05, 1.5, 4.0, 0.0, 0.12),
                recipe(13, 7.75, 1.25, 0.0, 0.05, 1.5, 8.0, 0.0, 0.12),
                recipe(13, 7.75, 1.25, 0.0, 0.05, 1.5, 5.0, 0.0, 0.12),
                recipe(13, 7.75, 1.25, 0.15, 0.05, 0.8, 6.0, 1.5, 0.12),
                recipe(12, 7.75, 1.25, -0.15, 0.05, 0.8, 6.0, 4.5, 0.12),
            ],
        ),
        "G3_2" => (
            3,
            vec![
                recipe(12, 4.5, 0.3, 0.0, 0.05, 1.3, 6.0, 0.0, 0.1),
                recipe(12, 11.5, 0.3, 0.0, 0.05, 1.3, 6.0, 3.0, 0.1),
                recipe(12, 7.75, 1.25, 0.0, 0.05, 1.5, 4.0, 0.0, 0.12),
                recipe(12, 7.75, 1.25, 0.0, 0.05, 1.5, 8.0, 0.0, 0.12),
                recipe(12, 7.75, 1.25, 0.15, 0.05, 0.8, 6.0, 1.5, 0.12),
            ],
        ),
        "G3_3" => (
            3,
            vec![
                recipe(10, 4.5, 0.25, 0.0, 0.05, 1.3, 6.0, 0.0, 0.1),
                recipe(10, 11.5, 0.25, 0.0, 0.05, 1.3, 6.0, 3.0, 0.1),
                recipe(10, 7.5, 1.25, 0.0, 0.05, 1.5, 4.0, 0.0, 0.15),
                recipe(10, 8.0, 1.25, 0.0, 0.05, 1.5, 8.0, 0.0, 0.15),
            ],
        ),
        _ => return None,
    };
    Some(GeneratorSpec {
        class,
        recipes,
        series_len: BENCH_LEN,
        shift_range: BENCH_SHIFT,
        seed,
    })
}
