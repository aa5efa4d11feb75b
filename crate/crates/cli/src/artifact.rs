//! Run manifests and the on-disk result cache.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Canonical bytes of a JSON value: `serde_json` keeps object keys sorted.
pub fn canonical(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s.into_bytes()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub config: Value,
    pub version: String,
    pub inputs: Vec<InputDigest>,
    pub wall_time_ms: u128,
    pub result_sha256: String,
    pub cache_hit: bool,
    /// Search effort; varies with the worker count, unlike the result.
    pub search_nodes: u64,
}

/// Identifies a computation: same key, same result.
pub struct CacheKey(String);

impl CacheKey {
    /// `parts` must name the command and every parameter that affects the
    /// result; inputs enter through their digests.
    pub fn new(parts: &[String], inputs: &[InputDigest]) -> Self {
        let mut h = Sha256::new();
        h.update(VERSION.as_bytes());
        for p in parts {
            h.update([0]);
            h.update(p.as_bytes());
        }
        for i in inputs {
            h.update([1]);
            h.update(i.sha256.as_bytes());
        }
        CacheKey(hex::encode(h.finalize()))
    }
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    exit: i32,
    summary: String,
    result: Value,
}

/// Content-addressed store of `(exit code, summary, result JSON)`. Every entry is
/// self-contained, so any file or the whole directory can be removed.
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Cache { dir }
    }

    fn path(&self, key: &CacheKey) -> Option<PathBuf> {
        self.dir
            .as_ref()
            .map(|d| d.join(&key.0[..2]).join(format!("{}.json", key.0)))
    }

    pub fn get(&self, key: &CacheKey) -> Option<(i32, String, Value)> {
        let text = fs::read(self.path(key)?).ok()?;
        let entry: CacheEntry = serde_json::from_slice(&text).ok()?;
        Some((entry.exit, entry.summary, entry.result))
    }

    /// Best effort: a cache that cannot be written is skipped.
    pub fn put(&self, key: &CacheKey, exit: i32, summary: &str, result: &Value) {
        let Some(path) = self.path(key) else { return };
        let Some(parent) = path.parent() else { return };
        if fs::create_dir_all(parent).is_err() {
            return;
        }
        let entry = CacheEntry {
            exit,
            summary: summary.to_string(),
            result: result.clone(),
        };
        let Ok(mut tmp) = tempfile::NamedTempFile::new_in(parent) else {
            return;
        };
        if serde_json::to_writer(&mut tmp, &entry).is_ok() && tmp.flush().is_ok() {
            let _ = tmp.persist(&path);
        }
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}
