//! Time series container and dataset-level checks.

use crate::error::{Error, Result};

/// One observation sequence of fixed length with an identifier.
///
/// Values are unitless reals; every entry must be finite and the length must
/// be at least 2. All series of one dataset share the same length.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    id: String,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(id: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidParam(format!(
                "series must have at least 2 observations, got {}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "series value at index {pos} is not finite"
            )));
        }
        Ok(Self {
            id: id.into(),
            values,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length >= 2 by construction
    }
}

/// Checks that a dataset is non-empty and all series share one length;
/// returns that length.
pub fn common_length(dataset: &[TimeSeries]) -> Result<usize> {
    let first = dataset
        .first()
        .ok_or_else(|| Error::InsufficientData("dataset is empty".into()))?;
    let len = first.len();
    for s in dataset {
        if s.len() != len {
            return Err(Error::ShapeMismatch {
                left: len,
                right: s.len(),
            });
        }
    }
    Ok(len)
}
