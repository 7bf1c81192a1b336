//! On-disk JSON cache for expensive linear-algebra results.
//!
//! Entries are written to a temporary file and renamed into place, so
//! concurrent writers of the same key never expose a torn file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Serialize};

use crate::error::Result;

pub const CACHE_ENV: &str = "PETERSON_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".peterson-cache";

#[derive(Clone, Debug, Default)]
pub struct CacheDir {
    root: Option<PathBuf>,
}

impl CacheDir {
    pub fn disabled() -> Self {
        CacheDir { root: None }
    }

    pub fn at(path: impl Into<PathBuf>) -> Self {
        CacheDir {
            root: Some(path.into()),
        }
    }

    pub fn path(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    fn file(&self, key: &str) -> Option<PathBuf> {
        self.root.as_ref().map(|r| r.join(format!("{key}.json")))
    }

    /// Unreadable or malformed entries count as misses.
    pub fn load<T: DeserializeOwned>(&self, key: &str) -> Option<T> {
        let text = fs::read_to_string(self.file(key)?).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn store<T: Serialize>(&self, key: &str, value: &T) -> Result<()> {
        let (Some(root), Some(dest)) = (self.root.as_ref(), self.file(key)) else {
            return Ok(());
        };
        fs::create_dir_all(root)?;
        let tmp = root.join(format!(".{key}.{}.tmp", std::process::id()));
        fs::write(&tmp, serde_json::to_vec(value)?)?;
        fs::rename(&tmp, &dest)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn store_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CacheDir::at(dir.path().join("nested"));
        assert_eq!(cache.load::<Vec<u32>>("k"), None);
        cache.store("k", &vec![1u32, 2, 3]).unwrap();
        assert_eq!(cache.load::<Vec<u32>>("k"), Some(vec![1, 2, 3]));
        assert_eq!(cache.load::<String>("k"), None);
    }

    #[test]
    fn disabled_cache_is_a_no_op() {
        let cache = CacheDir::disabled();
        cache.store("k", &1u8).unwrap();
        assert_eq!(cache.load::<u8>("k"), None);
    }
}
