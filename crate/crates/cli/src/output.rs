//! Single writer for the output directory.

use crate::experiment::Artifact;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

pub const MANIFEST: &str = "manifest.txt";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub struct RunInfo<'a> {
    pub kind: &'a str,
    pub config_path: &'a str,
    pub seed: u64,
    pub workers: usize,
    pub wall_time_s: f64,
    pub config: Vec<(&'static str, String)>,
}

/// Manifest text: run metadata, the resolved config and one
/// `sha256  file` line per artifact.
pub fn manifest(info: &RunInfo, artifacts: &[Artifact]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# simadc run manifest");
    let _ = writeln!(s, "kind = {}", info.kind);
    let _ = writeln!(s, "version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "config_file = {}", info.config_path);
    let _ = writeln!(s, "seed = {}", info.seed);
    let _ = writeln!(s, "workers = {}", info.workers);
    let _ = writeln!(s, "wall_time_s = {:.3}", info.wall_time_s);
    let _ = writeln!(s, "\n[config]");
    for (k, v) in &info.config {
        let _ = writeln!(s, "{k} = {v}");
    }
    let _ = writeln!(s, "\n[artifacts]");
    for a in artifacts {
        let _ = writeln!(s, "{}  {}", sha256_hex(&a.bytes), a.name);
    }
    s
}

pub fn write_all(dir: &Path, artifacts: &[Artifact]) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for a in artifacts {
        fs::write(dir.join(&a.name), &a.bytes)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn manifest_lists_every_artifact() {
        let arts = vec![
            Artifact::new("a.csv", "x\n1\n".into()),
            Artifact::new("b.csv", "y\n2\n".into()),
        ];
        let info = RunInfo {
            kind: "adc",
            config_path: "c.cfg",
            seed: 42,
            workers: 1,
            wall_time_s: 0.0,
            config: vec![("bits", "4".into())],
        };
        let m = manifest(&info, &arts);
        for a in &arts {
            assert!(m.contains(&format!("{}  {}", sha256_hex(&a.bytes), a.name)));
        }
        assert!(m.contains("seed = 42") && m.contains("bits = 4"));
    }
}
