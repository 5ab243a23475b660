//! CSV emission: a comment line with the config hash and seed, a header,
//! rows; every file written to a temporary name and renamed into place.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Shortest round-trip decimal, with `inf`, `-inf` and `nan` spelled out.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: impl Into<String>, header: &[&str]) -> Self {
        Self {
            file: file.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, config_hash: &str, seed: u64) -> io::Result<Vec<u8>> {
        let mut out = format!("# config_hash={config_hash} seed={seed}\n").into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&self.header)?;
            for r in &self.rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        Ok(out)
    }
}

/// What a run wrote, with the SHA-256 of each file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config: PathBuf,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub config_hash: String,
    pub files: Vec<(String, String)>,
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> io::Result<()> {
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, dir.join(name))
}

/// Writes the tables and `manifest.csv` into `out_dir`.
pub fn write_tables(
    config: &Path,
    out_dir: &Path,
    config_hash: &str,
    seed: u64,
    tables: &[Table],
) -> io::Result<RunManifest> {
    fs::create_dir_all(out_dir)?;
    let mut manifest = Table::new("manifest.csv", &["file", "sha256"]);
    let mut files = Vec::new();
    for t in tables {
        let bytes = t.render(config_hash, seed)?;
        let hash = sha256_hex(&bytes);
        write_atomic(out_dir, &t.file, &bytes)?;
        manifest.push(vec![t.file.clone(), hash.clone()]);
        files.push((t.file.clone(), hash));
    }
    write_atomic(out_dir, &manifest.file, &manifest.render(config_hash, seed)?)?;
    Ok(RunManifest {
        config: config.to_path_buf(),
        out_dir: out_dir.to_path_buf(),
        seed,
        config_hash: config_hash.into(),
        files,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 2.0 / 3.0, 1e-300, -5.5] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(opt(None), "");
    }

    #[test]
    fn render_quotes_and_prefixes() {
        let mut t = Table::new("t.csv", &["a", "b"]);
        t.push(vec!["1".into(), "x, y".into()]);
        let text = String::from_utf8(t.render("ab", 7).unwrap()).unwrap();
        assert_eq!(text, "# config_hash=ab seed=7\na,b\n1,\"x, y\"\n");
    }

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
