//! Deterministic artifact writing: config hashing, float formatting,
//! header-stamped CSV and JSON files.

use crate::CliError;
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

/// FNV-1a over the canonical run-configuration string; stable across
/// platforms, embedded in every artifact so reruns are attributable.
pub fn config_hash(canonical: &str) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in canonical.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

/// 17 significant digits: round-trip exact for f64.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct RunContext {
    pub out_dir: PathBuf,
    pub seed: u64,
    pub hash: String,
    pub echo_json: bool,
}

impl RunContext {
    pub fn new(out_dir: &Path, seed: u64, command_desc: &str, echo_json: bool) -> Result<Self, CliError> {
        std::fs::create_dir_all(out_dir)?;
        let canonical = format!("pharmonic v{} seed={} {}", pharmonic::VERSION, seed, command_desc);
        Ok(Self {
            out_dir: out_dir.to_path_buf(),
            seed,
            hash: config_hash(&canonical),
            echo_json,
        })
    }

    pub fn header_comment(&self) -> String {
        format!("# pharmonic v{} config={} seed={}", pharmonic::VERSION, self.hash, self.seed)
    }

    /// Write a CSV with the config header, a column header and rows.
    pub fn write_csv(
        &self,
        name: &str,
        columns: &[&str],
        rows: &[Vec<String>],
    ) -> Result<PathBuf, CliError> {
        let path = self.out_dir.join(name);
        let mut f = std::fs::File::create(&path)?;
        writeln!(f, "{}", self.header_comment())?;
        writeln!(f, "{}", columns.join(","))?;
        for row in rows {
            writeln!(f, "{}", row.join(","))?;
        }
        Ok(path)
    }

    /// Write a JSON artifact wrapping the payload with version, hash, seed.
    pub fn write_json<T: Serialize>(&self, name: &str, payload: &T) -> Result<PathBuf, CliError> {
        let wrapped = serde_json::json!({
            "version": pharmonic::VERSION,
            "config_hash": self.hash,
            "seed": self.seed,
            "data": payload,
        });
        let text = serde_json::to_string_pretty(&wrapped)?;
        let path = self.out_dir.join(name);
        std::fs::write(&path, text.as_bytes())?;
        if self.echo_json {
            println!("{text}");
        }
        Ok(path)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<PathBuf, CliError> {
        let path = self.out_dir.join(name);
        std::fs::write(&path, text.as_bytes())?;
        Ok(path)
    }
}

/// Parse "a,b,..." into a vector of floats.
pub fn parse_vec(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::validation(format!("cannot parse number '{t}'")))
        })
        .collect()
}

/// Inline JSON, or `@path` to read it from a file.
pub fn read_inline_or_file(spec: &str) -> Result<String, CliError> {
    if let Some(path) = spec.strip_prefix('@') {
        Ok(std::fs::read_to_string(path)?)
    } else {
        Ok(spec.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable() {
        assert_eq!(config_hash("x"), config_hash("x"));
        assert_ne!(config_hash("x"), config_hash("y"));
    }

    #[test]
    fn float_format_round_trips() {
        for x in [1.0, -0.1, 3.5e-17, 123456.789012345678, f64::MIN_POSITIVE] {
            let s = fmt_float(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
    }
}
