//! Search-space parameters for the traveling dissimilarity.

use crate::error::{Error, Result};

/// Default percentile order for the data-driven correlation weight.
pub const DEFAULT_PERCENTILE: f64 = 0.09;
/// Default maximum number of time steps to shift.
pub const DEFAULT_MAX_SHIFT: usize = 3;
/// Default magnitude of the tilt grid `{-eps, 0, eps}`.
pub const DEFAULT_TILT: f64 = 0.075;
/// Default tilt penalty coefficient.
pub const DEFAULT_PENALTY: f64 = 0.0;

/// The tuple `(L, E, C, alpha)` governing time shifts, tilt angles, the tilt
/// penalty, and the blend between the correlation and Euclidean terms.
///
/// The tilt grid is stored sorted ascending with exact duplicates removed and
/// must contain `0`, which guarantees that the traveled dissimilarity never
/// exceeds the untraveled one.
#[derive(Debug, Clone, PartialEq)]
pub struct TravelParams {
    max_shift: usize,
    tilts: Vec<f64>,
    penalty: f64,
    alpha: f64,
}

impl TravelParams {
    pub fn new(max_shift: usize, tilts: Vec<f64>, penalty: f64, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParam(format!(
                "alpha must lie in [0, 1], got {alpha}"
            )));
        }
        if !penalty.is_finite() || penalty < 0.0 {
            return Err(Error::InvalidParam(format!(
                "penalty coefficient must be a nonnegative real, got {penalty}"
            )));
        }
        if tilts.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidParam("tilt angles must be finite".into()));
        }
        if !tilts.contains(&0.0) {
            return Err(Error::InvalidParam("tilt set must contain 0".into()));
        }
        let mut tilts = tilts;
        tilts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        tilts.dedup();
        Ok(Self {
            max_shift,
            tilts,
            penalty,
            alpha,
        })
    }

    /// Time-traveling-only parameters: tilt grid `{0}` and no penalty.
    pub fn time_only(max_shift: usize, alpha: f64) -> Result<Self> {
        Self::new(max_shift, vec![0.0], 0.0, alpha)
    }

    /// The recommended preset: `L = 3`, `E = {-0.075, 0, 0.075}`, `C = 0`.
    pub fn preset(alpha: f64) -> Result<Self> {
        Self::new(
            DEFAULT_MAX_SHIFT,
            vec![-DEFAULT_TILT, 0.0, DEFAULT_TILT],
            DEFAULT_PENALTY,
            alpha,
        )
    }

    pub fn max_shift(&self) -> usize {
        self.max_shift
    }

    pub fn tilts(&self) -> &[f64] {
        &self.tilts
    }

    pub fn penalty(&self) -> f64 {
        self.penalty
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.max_shift, self.tilts.clone(), self.penalty, alpha)
    }

    /// Errors unless `L < len` so that every shifted subsequence is non-empty.
    pub fn check_applicable(&self, len: usize) -> Result<()> {
        if self.max_shift >= len {
            return Err(Error::InvalidShift {
                shift: self.max_shift,
                len,
            });
        }
        Ok(())
    }
}

/// How the correlation weight `alpha` is chosen: either an explicit value or
/// the data-driven default parameterized by a percentile order `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaSpec {
    Explicit(f64),
    DefaultPercentile(f64),
}

impl AlphaSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AlphaSpec::Explicit(a) if !(0.0..=1.0).contains(&a) => Err(Error::InvalidParam(
                format!("explicit alpha must lie in [0, 1], got {a}"),
            )),
            AlphaSpec::DefaultPercentile(p) if !(0.0..=1.0).contains(&p) => Err(
                Error::InvalidParam(format!("percentile order must lie in [0, 1], got {p}")),
            ),
            _ => Ok(()),
        }
    }
}

impl Default for AlphaSpec {
    fn default() -> Self {
        AlphaSpec::DefaultPercentile(DEFAULT_PERCENTILE)
    }
}
