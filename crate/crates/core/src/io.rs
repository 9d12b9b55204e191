//! File output. Every write goes to a temporary file in the destination
//! directory and is renamed into place, so readers never observe a partial
//! file.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analysis::Witness;
use crate::error::Result;
use crate::hedge::{TrajectoryRecord, CSV_HEADER};

pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn to_json_text<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, to_json_text(value)?.as_bytes())
}

pub fn trajectory_csv(records: &[TrajectoryRecord]) -> String {
    let mut out = String::with_capacity(96 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

pub fn write_trajectory_csv(path: &Path, records: &[TrajectoryRecord]) -> Result<()> {
    write_atomic(path, trajectory_csv(records).as_bytes())
}

/// Writes `dir/<stem>.json` and returns its path.
pub fn write_witness(dir: &Path, stem: &str, witness: &Witness) -> Result<PathBuf> {
    let path = dir.join(format!("{stem}.json"));
    let mut text = witness.to_json();
    text.push('\n');
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/out.txt");
        write_atomic(&path, b"first").unwrap();
        write_atomic(&path, b"second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
        let leftovers = std::fs::read_dir(path.parent().unwrap()).unwrap().count();
        assert_eq!(leftovers, 1);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let rec = TrajectoryRecord {
            k: 3,
            eps_iterate: 0.25,
            eps_average: 0.0,
            bound_rhs: 1.0,
            regret_avg: -0.5,
        };
        let text = trajectory_csv(&[rec, rec]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "3,2.5000000000000000e-1,0.0000000000000000e0,1.0000000000000000e0,-5.0000000000000000e-1");
    }
}
