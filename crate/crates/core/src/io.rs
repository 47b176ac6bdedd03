//! CSV formats: wide datasets (`id,label?,t1..tT`), label files (`id,label`),
//! full square dissimilarity matrices with id headers, and elbow curves.
//!
//! Values are written with Rust's shortest round-trip float formatting, so a
//! written file parses back to identical values. Parse errors carry 1-based
//! line and column (field) positions.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::clustering::ClusterLabels;
use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::evaluation::ElbowCurve;
use crate::series::TimeSeries;

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn parse_value(tok: &str, line: usize, column: usize) -> Result<f64> {
    let v: f64 = tok
        .trim()
        .parse()
        .map_err(|_| parse_err(line, column, format!("`{tok}` is not a number")))?;
    if !v.is_finite() {
        return Err(parse_err(line, column, "value is not finite"));
    }
    Ok(v)
}

/// Parses the dataset schema from any reader. Returns the series and, when a
/// `label` column is present, the ground-truth labels.
pub fn read_dataset(reader: impl Read) -> Result<(Vec<TimeSeries>, Option<ClusterLabels>)> {
    let reader = BufReader::new(reader);
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, 1, "empty file"))?;
    let header = header?;
    let fields: Vec<&str> = header.split(',').collect();
    if fields.first().map(|f| f.trim()) != Some("id") {
        return Err(parse_err(1, 1, "header must start with `id`"));
    }
    let has_label = fields.get(1).map(|f| f.trim()) == Some("label");
    let value_start = if has_label { 2 } else { 1 };
    let width = fields.len() - value_start;
    if width < 2 {
        return Err(parse_err(1, value_start + 1, "need at least 2 value columns"));
    }

    let mut dataset = Vec::new();
    let mut label_tokens: Vec<String> = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split(',').collect();
        if toks.len() != fields.len() {
            return Err(parse_err(
                line_no,
                toks.len().min(fields.len()) + 1,
                format!("expected {} fields, got {}", fields.len(), toks.len()),
            ));
        }
        let id = toks[0].trim();
        if id.is_empty() {
            return Err(parse_err(line_no, 1, "empty id"));
        }
        if has_label {
            let lab = toks[1].trim();
            if lab.is_empty() {
                return Err(parse_err(line_no, 2, "empty label"));
            }
            label_tokens.push(lab.to_string());
        }
        let mut values = Vec::with_capacity(width);
        for (ci, tok) in toks[value_start..].iter().enumerate() {
            values.push(parse_value(tok, line_no, value_start + ci + 1)?);
        }
        dataset.push(TimeSeries::new(id, values)?);
    }
    if dataset.is_empty() {
        return Err(parse_err(2, 1, "no data rows"));
    }
    let labels = if has_label {
        Some(ClusterLabels::from_tokens(&label_tokens)?)
    } else {
        None
    };
    Ok((dataset, labels))
}

pub fn read_dataset_file(
    path: impl AsRef<Path>,
) -> Result<(Vec<TimeSeries>, Option<ClusterLabels>)> {
    read_dataset(File::open(path)?)
}

/// Writes the dataset schema; the label column is included when given.
pub fn write_dataset(
    writer: impl Write,
    dataset: &[TimeSeries],
    labels: Option<&ClusterLabels>,
) -> Result<()> {
    if let Some(l) = labels {
        if l.n() != dataset.len() {
            return Err(Error::ShapeMismatch {
                left: l.n(),
                right: dataset.len(),
            });
        }
    }
    let mut w = BufWriter::new(writer);
    let width = dataset.first().map(|s| s.len()).unwrap_or(0);
    write!(w, "id")?;
    if labels.is_some() {
        write!(w, ",label")?;
    }
    for t in 1..=width {
        write!(w, ",t{t}")?;
    }
    writeln!(w)?;
    for (i, s) in dataset.iter().enumerate() {
        write!(w, "{}", s.id())?;
        if let Some(l) = labels {
            write!(w, ",{}", l.assignments()[i])?;
        }
        for v in s.values() {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_dataset_file(
    path: impl AsRef<Path>,
    dataset: &[TimeSeries],
    labels: Option<&ClusterLabels>,
) -> Result<()> {
    write_dataset(File::create(path)?, dataset, labels)
}

/// Reads a label file (`id,label`).
pub fn read_labels(reader: impl Read) -> Result<(Vec<String>, ClusterLabels)> {
    let reader = BufReader::new(reader);
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, 1, "empty file"))?;
    let header = header?;
    let fields: Vec<&str> = header.split(',').map(|f| f.trim()).collect();
    if fields != ["id", "label"] {
        return Err(parse_err(1, 1, "header must be `id,label`"));
    }
    let mut ids = Vec::new();
    let mut tokens = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split(',').collect();
        if toks.len() != 2 {
            return Err(parse_err(line_no, toks.len().min(2) + 1, "expected 2 fields"));
        }
        ids.push(toks[0].trim().to_string());
        tokens.push(toks[1].trim().to_string());
    }
    if ids.is_empty() {
        return Err(parse_err(2, 1, "no data rows"));
    }
    Ok((ids, ClusterLabels::from_tokens(&tokens)?))
}

pub fn read_labels_file(path: impl AsRef<Path>) -> Result<(Vec<String>, ClusterLabels)> {
    read_labels(File::open(path)?)
}

pub fn write_labels(writer: impl Write, ids: &[String], labels: &ClusterLabels) -> Result<()> {
    if ids.len() != labels.n() {
        return Err(Error::ShapeMismatch {
            left: ids.len(),
            right: labels.n(),
        });
    }
    let mut w = BufWriter::new(writer);
    writeln!(w, "id,label")?;
    for (id, &a) in ids.iter().zip(labels.assignments()) {
        writeln!(w, "{id},{a}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_labels_file(
    path: impl AsRef<Path>,
    ids: &[String],
    labels: &ClusterLabels,
) -> Result<()> {
    write_labels(File::create(path)?, ids, labels)
}

/// Writes the full square matrix with an id header row and column.
pub fn write_matrix(
    writer: impl Write,
    matrix: &DissimilarityMatrix,
    ids: &[String],
) -> Result<()> {
    if ids.len() != matrix.n() {
        return Err(Error::ShapeMismatch {
            left: ids.len(),
            right: matrix.n(),
        });
    }
    let mut w = BufWriter::new(writer);
    write!(w, "id")?;
    for id in ids {
        write!(w, ",{id}")?;
    }
    writeln!(w)?;
    for (i, id) in ids.iter().enumerate() {
        write!(w, "{id}")?;
        for j in 0..matrix.n() {
            write!(w, ",{}", matrix.get(i, j))?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_matrix_file(
    path: impl AsRef<Path>,
    matrix: &DissimilarityMatrix,
    ids: &[String],
) -> Result<()> {
    write_matrix(File::create(path)?, matrix, ids)
}

pub fn write_elbow(writer: impl Write, curve: &ElbowCurve) -> Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "k,wcd")?;
    for p in &curve.points {
        writeln!(w, "{},{}", p.k, p.wcd)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_elbow_file(path: impl AsRef<Path>, curve: &ElbowCurve) -> Result<()> {
    write_elbow(File::create(path)?, curve)
}
