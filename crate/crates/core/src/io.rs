//! CSV and JSON artifact helpers.
//!
//! Every artifact file starts with a comment line carrying the tool
//! version and a hash of the producing configuration, so artifacts are
//! traceable and byte-identical across repeated runs of the same config.

use crate::error::{Error, Result};
use std::io::{BufRead, Write};
use std::path::Path;

/// Provenance stamp written into every artifact.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ArtifactMeta {
    pub version: String,
    pub config_hash: String,
}

impl ArtifactMeta {
    pub fn new(version: &str, config_text: &str) -> Self {
        ArtifactMeta {
            version: version.to_string(),
            config_hash: format!("{:016x}", fnv1a64(config_text.as_bytes())),
        }
    }

    pub fn comment_line(&self) -> String {
        format!("# specinv {} config={}", self.version, self.config_hash)
    }
}

/// FNV-1a, used for config hashes: stable across platforms and builds.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Write a CSV with a provenance comment line and the given header.
pub fn write_csv<'a>(
    path: &Path,
    meta: &ArtifactMeta,
    columns: &[&str],
    rows: impl Iterator<Item = &'a [f64]>,
) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "{}", meta.comment_line())?;
    writeln!(out, "{}", columns.join(","))?;
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                write!(out, ",")?;
            }
            write!(out, "{v}")?;
            first = false;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Read a CSV produced by [`write_csv`] (or any plain CSV with the given
/// header); `#`-prefixed lines are skipped. Returns one vector per column.
pub fn read_csv(path: &Path, expected_columns: &[&str]) -> Result<Vec<Vec<f64>>> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); expected_columns.len()];
    let mut header_seen = false;
    for (lineno, line) in file.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if !header_seen {
            let got: Vec<&str> = trimmed.split(',').map(|s| s.trim()).collect();
            if got != expected_columns {
                return Err(Error::Parse(format!(
                    "{}: expected header {:?}, got {:?}",
                    path.display(),
                    expected_columns,
                    got
                )));
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != expected_columns.len() {
            return Err(Error::Parse(format!(
                "{}:{}: expected {} fields, got {}",
                path.display(),
                lineno + 1,
                expected_columns.len(),
                fields.len()
            )));
        }
        for (c, field) in fields.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::Parse(format!(
                    "{}:{}: bad number {:?}",
                    path.display(),
                    lineno + 1,
                    field
                ))
            })?;
            cols[c].push(v);
        }
    }
    if !header_seen {
        return Err(Error::Parse(format!("{}: no header line", path.display())));
    }
    Ok(cols)
}

/// Serialize a value as pretty JSON with a trailing newline.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Parse(format!("json serialization failed: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_with_comment_header() {
        let dir = std::env::temp_dir().join("specinv-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("curve.csv");
        let meta = ArtifactMeta::new("0.0.0", "cmd=test");
        let rows = [[1.0, -0.25f64], [2.0, -1.0]];
        write_csv(&path, &meta, &["v", "F"], rows.iter().map(|r| r.as_slice())).unwrap();
        let cols = read_csv(&path, &["v", "F"]).unwrap();
        assert_eq!(cols[0], vec![1.0, 2.0]);
        assert_eq!(cols[1], vec![-0.25, -1.0]);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# specinv 0.0.0 config="));
    }

    #[test]
    fn read_rejects_wrong_header() {
        let dir = std::env::temp_dir().join("specinv-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.csv");
        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(read_csv(&path, &["r", "f"]).is_err());
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), fnv1a64(b"a"));
        assert_ne!(fnv1a64(b"a"), fnv1a64(b"b"));
    }
}
