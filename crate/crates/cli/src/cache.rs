//! Content-addressed result store.
//!
//! The key is the SHA-256 of the canonical JSON of a fingerprint (operation,
//! system, parsed inputs, algorithm version). Each entry is a file holding
//! the fingerprint next to the value, so a hit is only trusted when the
//! stored fingerprint matches. Anything unreadable is deleted and treated
//! as a miss. Writes go to a temporary file that is renamed into place, so
//! concurrent processes never observe partial entries.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Bumped whenever a change alters any cached result.
pub const ALGORITHM_VERSION: &str = concat!("liemf-", env!("CARGO_PKG_VERSION"), "/1");

#[derive(Debug, Clone)]
pub struct Cache {
    dir: Option<PathBuf>,
}

static TMP_SEQ: AtomicU64 = AtomicU64::new(0);

impl Cache {
    pub fn disabled() -> Cache {
        Cache { dir: None }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Cache {
        Cache { dir: Some(dir.into()) }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn key(fingerprint: &Value) -> String {
        let canonical = serde_json::to_string(fingerprint).expect("json values serialize");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(&key[..2]).join(format!("{key}.json")))
    }

    pub fn get(&self, fingerprint: &Value) -> Option<Value> {
        let path = self.path(&Self::key(fingerprint))?;
        let bytes = fs::read(&path).ok()?;
        let entry: Option<Value> = serde_json::from_slice(&bytes).ok();
        match entry {
            Some(Value::Object(mut m)) if m.get("fingerprint") == Some(fingerprint) && m.contains_key("value") => m.remove("value"),
            _ => {
                let _ = fs::remove_file(&path);
                None
            }
        }
    }

    pub fn put(&self, fingerprint: &Value, value: &Value) -> std::io::Result<()> {
        let Some(path) = self.path(&Self::key(fingerprint)) else { return Ok(()) };
        let parent = path.parent().expect("entry has a parent");
        fs::create_dir_all(parent)?;
        let tmp = parent.join(format!(
            ".{}.{}.{}.tmp",
            path.file_stem().and_then(|s| s.to_str()).unwrap_or("entry"),
            std::process::id(),
            TMP_SEQ.fetch_add(1, Ordering::Relaxed)
        ));
        let body = serde_json::to_vec(&json!({ "fingerprint": fingerprint, "value": value })).expect("json values serialize");
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&body)?;
        f.sync_all()?;
        drop(f);
        fs::rename(&tmp, &path).inspect_err(|_| {
            let _ = fs::remove_file(&tmp);
        })
    }
}

/// Fingerprint of an operation on parsed inputs.
pub fn fingerprint(op: &str, inputs: &Value) -> Value {
    json!({ "op": op, "inputs": inputs, "version": ALGORITHM_VERSION })
}
