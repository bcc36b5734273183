//! Run manifests.
//!
//! A manifest is written next to every output as `<output>.manifest.json`.
//! `params` holds the fully resolved arguments of the command, so replaying
//! it regenerates identical outputs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::output::{to_json_pretty, write_file, RngDoc};

pub const MANIFEST_FORMAT: &str = "sre-manifest/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format: String,
    pub command: String,
    pub argv: Vec<String>,
    pub params: serde_json::Value,
    /// Base generator of seeded commands.
    pub rng: Option<RngDoc>,
    pub version: String,
    pub wall_seconds: f64,
    pub workers: usize,
    pub outputs: Vec<PathBuf>,
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> CliResult<()> {
        write_file(path, to_json_pretty(self).as_bytes())
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let m: RunManifest =
            serde_json::from_str(&text).map_err(|e| CliError::format(path, e.to_string()))?;
        if m.format != MANIFEST_FORMAT {
            return Err(CliError::format(path, format!("unsupported manifest format {:?}", m.format)));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_appends_suffix() {
        assert_eq!(manifest_path(Path::new("out/trace")), PathBuf::from("out/trace.manifest.json"));
        assert_eq!(manifest_path(Path::new("r.json")), PathBuf::from("r.json.manifest.json"));
    }

    #[test]
    fn round_trip_and_format_check() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        let mut m = RunManifest {
            format: MANIFEST_FORMAT.into(),
            command: "compute".into(),
            argv: vec!["sre".into()],
            params: serde_json::json!({"n": 3}),
            rng: Some(RngDoc { seed: 1, stream: 2 }),
            version: "0.1.0".into(),
            wall_seconds: 0.5,
            workers: 2,
            outputs: vec![PathBuf::from("r.json")],
        };
        m.write(&path).unwrap();
        assert_eq!(RunManifest::read(&path).unwrap(), m);
        m.format = "other".into();
        m.write(&path).unwrap();
        assert_eq!(RunManifest::read(&path).unwrap_err().exit_code(), 2);
    }
}
