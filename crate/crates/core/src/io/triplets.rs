//! Triplet TSV ingestion.
//!
//! Three tab-separated columns per line: miRNA id, disease id, type id.
//! An optional header is recognized by its literal column names
//! (`mirna`/`mirna_id`, `disease`/`disease_id`, `type`/`type_id`).

use crate::data::Dataset;
use crate::error::{Error, Result};
use std::fs;
use std::path::Path;

fn is_header(fields: &[&str]) -> bool {
    let norm: Vec<String> = fields.iter().map(|f| f.trim().to_lowercase()).collect();
    matches!(
        (norm[0].as_str(), norm[1].as_str(), norm[2].as_str()),
        ("mirna" | "mirna_id", "disease" | "disease_id", "type" | "type_id")
    )
}

/// Load a triplet TSV into a [`Dataset`]. Duplicate rows are collapsed
/// and counted in a warning.
pub fn load_triplets<P: AsRef<Path>>(path: P) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let display = path.display().to_string();

    let mut records: Vec<(String, String, String)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                path: display,
                line: lineno + 1,
                msg: format!("expected 3 tab-separated columns, got {}", fields.len()),
            });
        }
        if lineno == 0 && is_header(&fields) {
            continue;
        }
        if fields.iter().any(|f| f.trim().is_empty()) {
            return Err(Error::Parse {
                path: display,
                line: lineno + 1,
                msg: "empty identifier".into(),
            });
        }
        records.push((
            fields[0].to_string(),
            fields[1].to_string(),
            fields[2].to_string(),
        ));
    }
    if records.is_empty() {
        return Err(Error::Parse {
            path: display,
            line: 0,
            msg: "no triplet rows".into(),
        });
    }
    let (ds, duplicates) = Dataset::from_records(records)?;
    if duplicates > 0 {
        log::warn!("{display}: {duplicates} duplicate triplet rows collapsed");
    }
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn three_lines_two_of_everything() {
        let f = write_tmp("m1\td1\tt1\nm2\td2\tt2\nm1\td2\tt1\n");
        let ds = load_triplets(f.path()).unwrap();
        assert_eq!(ds.dims(), (2, 2, 2));
        assert_eq!(ds.triplets.len(), 3);
    }

    #[test]
    fn header_is_skipped() {
        let f = write_tmp("mirna_id\tdisease_id\ttype_id\nm1\td1\tt1\n");
        let ds = load_triplets(f.path()).unwrap();
        assert_eq!(ds.dims(), (1, 1, 1));
    }

    #[test]
    fn duplicate_rows_collapse() {
        let f = write_tmp("m1\td1\tt1\nm1\td1\tt1\n");
        let ds = load_triplets(f.path()).unwrap();
        assert_eq!(ds.triplets.len(), 1);
    }

    #[test]
    fn wrong_column_count_reports_line() {
        let f = write_tmp("m1\td1\tt1\nm2\td2\n");
        let err = load_triplets(f.path()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn empty_file_rejected() {
        let f = write_tmp("");
        assert!(load_triplets(f.path()).is_err());
    }

    #[test]
    fn header_only_rejected() {
        let f = write_tmp("mirna\tdisease\ttype\n");
        assert!(load_triplets(f.path()).is_err());
    }
}
