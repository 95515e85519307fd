//! Content-addressed store for expensive solves.
//!
//! Records live at `<dir>/<first two hex digits>/<key>.json` and are written
//! through a temporary file that is renamed into place, so a reader sees
//! either nothing or a complete record.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::fss::{GapMethod, GapPoint, GapSource};

/// Bumped whenever a solver change alters results.
pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "/solvers-3");

#[derive(Debug, Serialize, Deserialize)]
struct CacheRecord<T> {
    key: String,
    version: String,
    /// Seconds since the epoch; metadata only.
    created: u64,
    payload: T,
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// SHA-256 over the JSON form of `descriptor` and [`CODE_VERSION`].
    pub fn key<T: Serialize + ?Sized>(descriptor: &T) -> Result<String> {
        let mut hasher = Sha256::new();
        hasher.update(CODE_VERSION.as_bytes());
        hasher.update([0u8]);
        hasher.update(serde_json::to_vec(descriptor)?);
        Ok(hex::encode(hasher.finalize()))
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(&key[..2.min(key.len())]).join(format!("{key}.json"))
    }

    /// The stored payload, or `None` when absent. Unreadable or mismatched
    /// records are reported and treated as absent.
    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Option<T> {
        let path = self.path(key);
        let bytes = match std::fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return None,
            Err(e) => {
                log::warn!("cache record {} unreadable: {e}", path.display());
                return None;
            }
        };
        match serde_json::from_slice::<CacheRecord<T>>(&bytes) {
            Ok(r) if r.key == key && r.version == CODE_VERSION => Some(r.payload),
            Ok(_) => {
                log::warn!("cache record {} does not match its key; ignoring", path.display());
                None
            }
            Err(e) => {
                log::warn!("corrupt cache record {}: {e}; ignoring", path.display());
                None
            }
        }
    }

    pub fn put<T: Serialize>(&self, key: &str, payload: &T) -> Result<()> {
        let path = self.path(key);
        let parent = path.parent().expect("record path has a parent");
        std::fs::create_dir_all(parent)?;
        let created = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let record = CacheRecord {
            key: key.to_owned(),
            version: CODE_VERSION.to_owned(),
            created,
            payload,
        };
        let mut tmp = tempfile::NamedTempFile::new_in(parent)?;
        serde_json::to_writer(&mut tmp, &record)?;
        tmp.as_file_mut().flush()?;
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(())
    }
}

/// A [`GapSource`] whose points are looked up in, and saved to, a cache.
///
/// `descriptor` must capture everything besides the coupling and index
/// that the inner source's results depend on.
pub struct CachedSource<S> {
    inner: S,
    cache: Option<Cache>,
    descriptor: serde_json::Value,
}

impl<S: GapSource> CachedSource<S> {
    pub fn new(inner: S, cache: Option<Cache>, descriptor: serde_json::Value) -> Self {
        Self {
            inner,
            cache,
            descriptor,
        }
    }

    pub fn inner(&self) -> &S {
        &self.inner
    }
}

impl<S: GapSource> GapSource for CachedSource<S> {
    fn method(&self) -> GapMethod {
        self.inner.method()
    }

    fn size(&self, index: usize) -> f64 {
        self.inner.size(index)
    }

    fn coupling_of_charge(&self, z: f64) -> f64 {
        self.inner.coupling_of_charge(z)
    }

    fn charge_of_coupling(&self, coupling: f64) -> f64 {
        self.inner.charge_of_coupling(coupling)
    }

    fn gap_point(&self, coupling: f64, index: usize) -> Result<GapPoint> {
        let Some(cache) = &self.cache else {
            return self.inner.gap_point(coupling, index);
        };
        let key = Cache::key(&("gap", &self.descriptor, coupling, index))?;
        if let Some(p) = cache.get::<GapPoint>(&key) {
            return Ok(p);
        }
        let p = self.inner.gap_point(coupling, index)?;
        if let Err(e) = cache.put(&key, &p) {
            log::warn!("could not store cache record {key}: {e}");
        }
        Ok(p)
    }
}
