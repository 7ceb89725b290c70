//! Ranked prediction exports.
//!
//! TSV with one row per ranked cell: `disease_id, rank, mirna_id,
//! type_id, score`, scores printed with 6 decimals. An empty ranking
//! still writes the header line.

use crate::data::Dataset;
use crate::error::Result;
use crate::eval::RankedCell;
use std::fs;
use std::io::Write;
use std::path::Path;

pub fn write_predictions<P: AsRef<Path>>(
    path: P,
    ds: &Dataset,
    rankings: &[(usize, Vec<RankedCell>)],
) -> Result<()> {
    let mut out = fs::File::create(path)?;
    writeln!(out, "disease_id\trank\tmirna_id\ttype_id\tscore")?;
    for (disease, cells) in rankings {
        for (pos, cell) in cells.iter().enumerate() {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{:.6}",
                ds.diseases.name(*disease),
                pos + 1,
                ds.mirnas.name(cell.mirna),
                ds.types.name(cell.ty),
                cell.score
            )?;
        }
    }
    Ok(())
}
