//! File emission. Every file carries the unit convention: CSV files in a
//! leading `#` line, JSON files in a `units` field.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const UNITS: &str = "energies in k_BT, times in beta*hbar, entropies in k_B, lengths in lambda_th";

#[derive(Serialize, Deserialize)]
pub struct Envelope<T> {
    pub units: String,
    pub data: T,
}

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|source| CliError::Io { path: root.into(), source })?;
        Ok(Self { root: root.into() })
    }

    /// Existing directory, for commands that consume earlier output.
    pub fn open(root: &Path) -> Self {
        Self { root: root.into() }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn create_file(&self, name: &str) -> Result<BufWriter<File>> {
        let path = self.path(name);
        File::create(&path).map(BufWriter::new).map_err(|source| CliError::Io { path, source })
    }

    pub fn write_json<T: Serialize>(&self, name: &str, data: &T) -> Result<PathBuf> {
        let path = self.path(name);
        let mut w = self.create_file(name)?;
        let env = Envelope { units: UNITS.to_string(), data };
        serde_json::to_writer_pretty(&mut w, &env).map_err(|source| CliError::Json { path: path.clone(), source })?;
        w.flush().map_err(|source| CliError::Io { path: path.clone(), source })?;
        Ok(path)
    }

    pub fn read_json<T: DeserializeOwned>(&self, name: &str, needs: &'static str) -> Result<T> {
        let path = self.path(name);
        if !path.exists() {
            return Err(CliError::MissingFile { path, needs });
        }
        let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
        let env: Envelope<T> = serde_json::from_str(&text).map_err(|source| CliError::Json { path, source })?;
        Ok(env.data)
    }

    /// Opens a CSV file with the units line already written.
    pub fn csv(&self, name: &str) -> Result<csv::Writer<BufWriter<File>>> {
        let path = self.path(name);
        let mut w = self.create_file(name)?;
        writeln!(w, "# units: {UNITS}").map_err(|source| CliError::Io { path, source })?;
        Ok(csv::Writer::from_writer(w))
    }

    /// Raw writer for emitters that write their own header lines.
    pub fn raw(&self, name: &str) -> Result<BufWriter<File>> {
        self.create_file(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_through_envelope() {
        let dir = tempfile::tempdir().unwrap();
        let out = OutDir::create(dir.path()).unwrap();
        out.write_json("x.json", &vec![1.5, -2.0]).unwrap();
        let back: Vec<f64> = out.read_json("x.json", "nothing").unwrap();
        assert_eq!(back, vec![1.5, -2.0]);
        assert!(matches!(out.read_json::<Vec<f64>>("y.json", "tomography"), Err(CliError::MissingFile { .. })));
    }

    #[test]
    fn csv_starts_with_units() {
        let dir = tempfile::tempdir().unwrap();
        let out = OutDir::create(dir.path()).unwrap();
        let mut w = out.csv("a.csv").unwrap();
        w.write_record(["t", "v"]).unwrap();
        w.flush().unwrap();
        drop(w);
        let text = std::fs::read_to_string(out.path("a.csv")).unwrap();
        assert!(text.starts_with("# units:"));
        assert_eq!(text.lines().nth(1), Some("t,v"));
    }
}
