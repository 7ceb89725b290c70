//! Similarity-matrix TSV persistence.
//!
//! Square layout with a label header row and a label column; values are
//! printed with 17 significant digits so a save/load round trip is
//! value-exact.

use crate::error::{Error, Result};
use crate::sim::SimilarityMatrix;
use ndarray::Array2;
use std::fs;
use std::io::Write;
use std::path::Path;

pub fn save_similarity<P: AsRef<Path>>(sm: &SimilarityMatrix, path: P) -> Result<()> {
    let mut out = fs::File::create(path)?;
    let mut header = String::new();
    for l in &sm.labels {
        header.push('\t');
        header.push_str(l);
    }
    writeln!(out, "{header}")?;
    for (i, l) in sm.labels.iter().enumerate() {
        let mut row = l.clone();
        for j in 0..sm.n() {
            row.push('\t');
            row.push_str(&format!("{:.16e}", sm.values[[i, j]]));
        }
        writeln!(out, "{row}")?;
    }
    Ok(())
}

pub fn load_similarity<P: AsRef<Path>>(path: P) -> Result<SimilarityMatrix> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();

    let (_, header) = lines.next().ok_or_else(|| Error::Parse {
        path: display.clone(),
        line: 0,
        msg: "empty similarity file".into(),
    })?;
    let labels: Vec<String> = header
        .split('\t')
        .skip(1)
        .map(|s| s.trim().to_string())
        .collect();
    let n = labels.len();
    if n == 0 {
        return Err(Error::Parse {
            path: display,
            line: 1,
            msg: "header has no labels".into(),
        });
    }

    let mut values = Array2::zeros((n, n));
    let mut row = 0usize;
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        if row >= n {
            return Err(Error::Parse {
                path: display,
                line: lineno + 1,
                msg: format!("matrix is not square: more than {n} rows"),
            });
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != n + 1 {
            return Err(Error::Parse {
                path: display,
                line: lineno + 1,
                msg: format!("expected {} columns, got {}", n + 1, fields.len()),
            });
        }
        if fields[0].trim().to_lowercase() != labels[row].to_lowercase() {
            return Err(Error::Parse {
                path: display,
                line: lineno + 1,
                msg: format!(
                    "row label '{}' does not match header label '{}'",
                    fields[0].trim(),
                    labels[row]
                ),
            });
        }
        for (j, field) in fields[1..].iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                path: display.clone(),
                line: lineno + 1,
                msg: format!("bad value '{field}'"),
            })?;
            values[[row, j]] = v;
        }
        row += 1;
    }
    if row != n {
        return Err(Error::Parse {
            path: display,
            line: 0,
            msg: format!("matrix is not square: {row} rows for {n} labels"),
        });
    }

    for i in 0..n {
        for j in 0..i {
            let (a, b) = (values[[i, j]], values[[j, i]]);
            if (a - b).abs() > 1e-9 {
                return Err(Error::InvalidParam(format!(
                    "{display}: asymmetric at ({i},{j}): {a} vs {b}"
                )));
            }
            let mean = 0.5 * (a + b);
            if !(-1e-9..=1.0 + 1e-9).contains(&mean) {
                return Err(Error::InvalidParam(format!(
                    "{display}: value out of [0,1] at ({i},{j}): {mean}"
                )));
            }
            let mean = mean.clamp(0.0, 1.0);
            values[[i, j]] = mean;
            values[[j, i]] = mean;
        }
        let d = values[[i, i]];
        if (d - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParam(format!(
                "{display}: diagonal must be 1, got {d} at row {i}"
            )));
        }
        values[[i, i]] = 1.0;
    }
    SimilarityMatrix::new(labels, values)
}
