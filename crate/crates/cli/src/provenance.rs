//! Artifact provenance: content digests, sidecar metadata files, and
//! atomic-ish output (write to `.partial`, rename on success).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// FNV-1a 64-bit digest of a file's bytes.
pub fn digest_file(path: &Path) -> Result<u64> {
    let bytes = std::fs::read(path)
        .with_context(|| format!("cannot read {} for digest", path.display()))?;
    Ok(fnv1a64(&bytes))
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100_0000_01b3);
    }
    hash
}

/// An output that only appears under its final name when complete.
/// Interrupted runs leave a clearly suffixed `.partial` file behind.
pub struct PartialFile {
    final_path: PathBuf,
    partial_path: PathBuf,
}

impl PartialFile {
    pub fn new(final_path: &Path) -> Self {
        let mut name = final_path.file_name().unwrap_or_default().to_os_string();
        name.push(".partial");
        PartialFile {
            final_path: final_path.to_path_buf(),
            partial_path: final_path.with_file_name(name),
        }
    }

    pub fn working_path(&self) -> &Path {
        &self.partial_path
    }

    pub fn commit(self) -> Result<()> {
        std::fs::rename(&self.partial_path, &self.final_path).with_context(|| {
            format!(
                "cannot move {} into place",
                self.partial_path.display()
            )
        })
    }
}

/// Writes `<artifact>.meta` describing how an artifact was produced: tool
/// version, subcommand, resolved configuration, seed, and input digests.
pub fn write_sidecar(
    artifact: &Path,
    command: &str,
    resolved_config: &str,
    seed: u64,
    inputs: &[(&str, &Path)],
) -> Result<()> {
    let mut meta = String::new();
    let _ = writeln!(meta, "tool = walkvec {TOOL_VERSION}");
    let _ = writeln!(meta, "command = {command}");
    let _ = writeln!(meta, "seed = {seed}");
    for (role, path) in inputs {
        let digest = digest_file(path)?;
        let _ = writeln!(meta, "input.{role} = {} (fnv1a64 {digest:#018x})", path.display());
    }
    let _ = writeln!(meta, "config:");
    for line in resolved_config.lines() {
        let _ = writeln!(meta, "  {line}");
    }
    let mut name = artifact.file_name().unwrap_or_default().to_os_string();
    name.push(".meta");
    let meta_path = artifact.with_file_name(name);
    std::fs::write(&meta_path, meta)
        .with_context(|| format!("cannot write {}", meta_path.display()))?;
    Ok(())
}
