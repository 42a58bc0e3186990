//! Disk-backed response cache keyed by request fingerprint.
//!
//! Entries are one JSON file per fingerprint, written atomically (temp file
//! + rename in the same directory), so a crash mid-write never leaves a
//! torn entry and concurrent writers of the same key simply race to an
//! identical result.

use std::io;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::request::{LlmResponse, TokenUsage};

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    text: String,
    usage: TokenUsage,
    backend_id: String,
}

pub struct ResponseCache {
    dir: PathBuf,
}

impl ResponseCache {
    /// Opens (creating if needed) a cache directory.
    pub fn open(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(ResponseCache { dir })
    }

    fn path(&self, fingerprint: &str) -> PathBuf {
        self.dir.join(format!("{fingerprint}.json"))
    }

    /// The cached response for `fingerprint`, marked `cached: true`.
    /// Unreadable or corrupt entries are treated as misses.
    pub fn get(&self, fingerprint: &str) -> Option<LlmResponse> {
        let bytes = std::fs::read(self.path(fingerprint)).ok()?;
        let entry: CacheEntry = serde_json::from_slice(&bytes).ok()?;
        Some(LlmResponse {
            text: entry.text,
            usage: entry.usage,
            backend_id: entry.backend_id,
            cached: true,
        })
    }

    pub fn put(&self, fingerprint: &str, response: &LlmResponse) -> io::Result<()> {
        let entry = CacheEntry {
            text: response.text.clone(),
            usage: response.usage,
            backend_id: response.backend_id.clone(),
        };
        let bytes = serde_json::to_vec(&entry).map_err(io::Error::other)?;
        let mut temp = tempfile::NamedTempFile::new_in(&self.dir)?;
        io::Write::write_all(&mut temp, &bytes)?;
        temp.persist(self.path(fingerprint))
            .map_err(|e| e.error)?;
        Ok(())
    }
}
