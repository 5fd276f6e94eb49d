use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub path: String,
    pub label: String,
    pub case_id: String,
}

/// Image list with class labels; relative paths resolve against the
/// manifest's directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub rows: Vec<ManifestRow>,
    base: PathBuf,
}

impl Manifest {
    pub fn new(rows: Vec<ManifestRow>, base: impl Into<PathBuf>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut ids = HashSet::new();
        for row in &rows {
            if row.label.trim().is_empty() {
                return Err(CliError::Data(format!("{}: empty label", row.path)));
            }
            if !seen.insert(&row.path) {
                return Err(CliError::Data(format!("duplicate manifest path {}", row.path)));
            }
            if !ids.insert(sample_id(&row.path)) {
                return Err(CliError::Data(format!("two manifest entries share the id {}", sample_id(&row.path))));
            }
        }
        Ok(Self { rows, base: base.into() })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::csv(path, e))?;
        let rows = reader
            .deserialize()
            .collect::<Result<Vec<ManifestRow>, _>>()
            .map_err(|e| CliError::csv(path, e))?;
        Manifest::new(rows, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| CliError::csv(path, e))?;
        for row in &self.rows {
            w.serialize(row).map_err(|e| CliError::csv(path, e))?;
        }
        w.flush().map_err(|e| CliError::io(path, e))
    }

    pub fn resolve(&self, row: &ManifestRow) -> PathBuf {
        self.base.join(&row.path)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// File stem of a manifest path; doubles as the sample id and the mask name.
pub fn sample_id(path: &str) -> String {
    Path::new(path).file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(path: &str, label: &str) -> ManifestRow {
        ManifestRow { path: path.into(), label: label.into(), case_id: "c".into() }
    }

    #[test]
    fn rejects_duplicates_and_blank_labels() {
        assert!(Manifest::new(vec![row("a.png", "x"), row("a.png", "y")], ".").is_err());
        assert!(Manifest::new(vec![row("a.png", "x"), row("sub/a.png", "y")], ".").is_err());
        assert!(Manifest::new(vec![row("a.png", " ")], ".").is_err());
        assert!(Manifest::new(vec![row("a.png", "x"), row("b.png", "x")], ".").is_ok());
    }

    #[test]
    fn round_trip_and_resolution() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.csv");
        let m = Manifest::new(vec![row("img/a.png", "x"), row("b.tif", "y")], dir.path()).unwrap();
        m.write(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("path,label,case_id\n"));
        let back = Manifest::load(&path).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.resolve(&back.rows[0]), dir.path().join("img/a.png"));
        assert_eq!(sample_id("img/a.png"), "a");
    }

    #[test]
    fn missing_file_is_io() {
        let err = Manifest::load(Path::new("/nonexistent/manifest.csv")).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}
