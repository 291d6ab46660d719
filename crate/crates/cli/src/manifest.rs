//! Plain-text run manifests.
//!
//! A manifest lists the subcommand and every resolved parameter as
//! `key = value` lines, followed by `meta.*` lines for the tool version,
//! wall-clock time and SHA-256 digests of inputs and outputs. Passing it back
//! with `--config` reruns the command with identical parameters; the `meta.*`
//! lines are skipped on load.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::settings::META_PREFIX;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub params: Vec<(String, String)>,
    pub version: String,
    pub wall_clock: Duration,
    pub inputs: Vec<(String, String)>,
    pub outputs: Vec<(String, String)>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `<out>.manifest` next to the primary output.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest");
    PathBuf::from(name)
}

/// Writes `bytes` to `path` and returns its digest entry.
pub fn write_output(path: &Path, bytes: &[u8]) -> CliResult<(String, String)> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))?;
    Ok((path.display().to_string(), sha256_hex(bytes)))
}

impl RunManifest {
    pub fn new(command: &str, params: Vec<(String, String)>) -> Self {
        Self {
            command: command.to_string(),
            params,
            version: TOOL_VERSION.to_string(),
            wall_clock: Duration::ZERO,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# ocb run manifest; rerun with `ocb {} --config <this file>`",
            self.command
        );
        let _ = writeln!(s, "command = {}", self.command);
        for (k, v) in &self.params {
            let _ = writeln!(s, "{k} = {v}");
        }
        let _ = writeln!(s, "{META_PREFIX}version = {}", self.version);
        let _ = writeln!(
            s,
            "{META_PREFIX}wall-clock-s = {:.3}",
            self.wall_clock.as_secs_f64()
        );
        for (path, digest) in &self.inputs {
            let _ = writeln!(s, "{META_PREFIX}input-sha256 = {digest}  {path}");
        }
        for (path, digest) in &self.outputs {
            let _ = writeln!(s, "{META_PREFIX}output-sha256 = {digest}  {path}");
        }
        s
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        std::fs::write(path, self.render()).map_err(|e| CliError::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::settings::Settings;

    #[test]
    fn digest_matches_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn sidecar_appends_suffix() {
        assert_eq!(
            sidecar_path(Path::new("out/c.csv")),
            Path::new("out/c.csv.manifest")
        );
    }

    #[test]
    fn rendered_manifest_loads_as_settings() {
        let mut m = RunManifest::new("curves", vec![("seed".into(), "3".into())]);
        m.outputs.push(("c.csv".into(), sha256_hex(b"")));
        let mut s = Settings::parse(&m.render(), "m").unwrap();
        s.expect_command("curves").unwrap();
        assert_eq!(s.resolve("seed", None, 0u64).unwrap(), 3);
        assert_eq!(s.finish().unwrap(), m.params);
    }
}
