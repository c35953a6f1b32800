//! On-disk reply cache, one JSON file per request key.

use std::fs;
use std::io;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::backend::Message;

#[derive(Serialize)]
struct KeyMaterial<'a> {
    model: &'a str,
    temperature: f64,
    messages: &'a [Message],
}

#[derive(Serialize, Deserialize)]
struct Entry {
    reply: String,
}

/// Hex SHA-256 over the model id, temperature and the full message prefix.
pub fn cache_key(model: &str, temperature: f64, messages: &[Message]) -> String {
    let json = serde_json::to_vec(&KeyMaterial {
        model,
        temperature,
        messages,
    })
    .expect("messages serialize");
    hex::encode(Sha256::digest(&json))
}

#[derive(Debug, Clone, Default)]
pub struct ResponseCache {
    dir: Option<PathBuf>,
}

impl ResponseCache {
    /// A cache that stores nothing.
    pub fn disabled() -> Self {
        ResponseCache { dir: None }
    }

    pub fn open(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(ResponseCache { dir: Some(dir) })
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    /// Unreadable or corrupt entries count as misses.
    pub fn get(&self, key: &str) -> Option<String> {
        let text = fs::read_to_string(self.path(key)?).ok()?;
        match serde_json::from_str::<Entry>(&text) {
            Ok(e) => Some(e.reply),
            Err(e) => {
                log::warn!("ignoring corrupt cache entry {key}: {e}");
                None
            }
        }
    }

    /// Written to a temporary file first, then renamed into place.
    pub fn put(&self, key: &str, reply: &str) -> io::Result<()> {
        let Some(path) = self.path(key) else {
            return Ok(());
        };
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let json = serde_json::to_vec(&Entry { reply: reply.to_string() }).map_err(io::Error::from)?;
        fs::write(&tmp, json)?;
        fs::rename(&tmp, &path)
    }
}
