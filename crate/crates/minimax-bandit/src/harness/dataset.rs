//! CSV ingestion with min-max normalization to the unit box, plus the
//! deterministic synthetic regression generator used by tests and demos.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::learner::{Dataset, Targets, TaskKind};
use crate::sampling::RngStream;

/// What the loader did: dimensions plus how many rows were dropped.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct LoadReport {
    pub n: usize,
    pub d: usize,
    pub classes: usize,
    pub skipped_rows: usize,
}

/// Load a headered CSV with numeric feature columns and the target in the
/// last column. Features are min-max normalized per column to [0, 1];
/// regression targets likewise; classification labels are mapped to
/// 0..C-1 in sorted order of their distinct raw values. Rows with missing
/// fields are skipped and counted.
pub fn load_dataset(path: &Path, task: TaskKind) -> Result<(Dataset, LoadReport)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)?;
    let width = reader.headers()?.len();
    if width < 2 {
        return Err(Error::Dataset(
            "need at least one feature column and one target column".into(),
        ));
    }
    let d = width - 1;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut raw_targets: Vec<String> = Vec::new();
    let mut skipped = 0usize;
    for record in reader.records() {
        let record = record?;
        if record.len() != width || record.iter().any(|f| f.trim().is_empty()) {
            skipped += 1;
            continue;
        }
        let mut row = Vec::with_capacity(d);
        let mut bad = false;
        for field in record.iter().take(d) {
            match field.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => row.push(v),
                Ok(_) => {
                    skipped += 1;
                    bad = true;
                    break;
                }
                Err(_) => {
                    return Err(Error::Dataset(format!(
                        "non-numeric feature value '{}'",
                        field.trim()
                    )))
                }
            }
        }
        if bad {
            continue;
        }
        rows.push(row);
        raw_targets.push(record.get(width - 1).unwrap_or("").trim().to_string());
    }
    if skipped > 0 {
        eprintln!("warning: skipped {skipped} rows with missing or non-finite values");
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::Dataset("no usable rows".into()));
    }

    // per-column min-max; constant columns normalize to zero
    let mut features = vec![0.0; n * d];
    for j in 0..d {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for row in &rows {
            lo = lo.min(row[j]);
            hi = hi.max(row[j]);
        }
        let range = hi - lo;
        for (i, row) in rows.iter().enumerate() {
            features[i * d + j] = if range > 0.0 { (row[j] - lo) / range } else { 0.0 };
        }
    }

    let (targets, classes) = match task {
        TaskKind::Regression => {
            let mut y = Vec::with_capacity(n);
            for t in &raw_targets {
                let v: f64 = t.parse().map_err(|_| {
                    Error::Dataset(format!("non-numeric regression target '{t}'"))
                })?;
                if !v.is_finite() {
                    return Err(Error::Dataset("non-finite regression target".into()));
                }
                y.push(v);
            }
            let lo = y.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let range = hi - lo;
            let y: Vec<f64> = y
                .into_iter()
                .map(|v| if range > 0.0 { (v - lo) / range } else { 0.0 })
                .collect();
            (Targets::Regression(y), 1)
        }
        TaskKind::Classification => {
            let mut mapping: BTreeMap<String, usize> = BTreeMap::new();
            for t in &raw_targets {
                let next = mapping.len();
                mapping.entry(t.clone()).or_insert(next);
            }
            // remap in sorted order of the raw label text for determinism
            let sorted: Vec<&String> = mapping.keys().collect();
            let by_sorted: BTreeMap<String, usize> = sorted
                .iter()
                .enumerate()
                .map(|(i, s)| ((*s).clone(), i))
                .collect();
            let count = by_sorted.len();
            let labels: Vec<usize> = raw_targets.iter().map(|t| by_sorted[t]).collect();
            (Targets::Classes { labels, count }, count)
        }
    };

    let data = Dataset::new(features, n, d, targets)?;
    Ok((
        data,
        LoadReport {
            n,
            d,
            classes,
            skipped_rows: skipped,
        },
    ))
}

/// Deterministic synthetic convex regression instance: features uniform on
/// the unit box, targets a bounded linear function plus small noise, clamped
/// to [0, 1].
pub fn synthetic_regression(n: usize, d: usize, seed: u64) -> Dataset {
    let mut rng = RngStream::new(seed);
    let features: Vec<f64> = (0..n * d).map(|_| rng.uniform()).collect();
    let coef: Vec<f64> = (0..d).map(|_| (rng.uniform() - 0.5) * 0.8).collect();
    let intercept = 0.3 + 0.4 * rng.uniform();
    let targets: Vec<f64> = (0..n)
        .map(|i| {
            let x = &features[i * d..(i + 1) * d];
            let mut y: f64 = intercept + x.iter().zip(&coef).map(|(a, b)| a * b).sum::<f64>();
            y += 0.05 * (rng.uniform() - 0.5);
            y.clamp(0.0, 1.0)
        })
        .collect();
    Dataset::new(features, n, d, Targets::Regression(targets))
        .expect("generator output is always well-formed")
}
