//! Content-addressed result cache keyed by a 64-bit FNV-1a hash of canonical JSON.

use std::hash::Hasher;
use std::path::{Path, PathBuf};

use fnv::FnvHasher;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{io_err, write_file, AppResult};

/// FNV-1a of the compact JSON of `value` (object keys sorted), then `extra`.
pub fn cache_key<T: Serialize>(value: &T, extra: &str) -> AppResult<u64> {
    // serde_json's default map keeps keys ordered, so this text is canonical.
    let canonical = serde_json::to_string(&serde_json::to_value(value)?)?;
    let mut h = FnvHasher::default();
    h.write(canonical.as_bytes());
    h.write(&[0]);
    h.write(extra.as_bytes());
    Ok(h.finish())
}

pub fn key_hex(key: u64) -> String {
    format!("{key:016x}")
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: &Path) -> AppResult<Self> {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        Ok(Self { dir: dir.to_owned() })
    }

    fn path(&self, key: u64) -> PathBuf {
        self.dir.join(format!("{}.json", key_hex(key)))
    }

    /// A stored entry, or `None` when absent or unreadable.
    pub fn get<T: DeserializeOwned>(&self, key: u64) -> Option<T> {
        let bytes = std::fs::read(self.path(key)).ok()?;
        serde_json::from_slice(&bytes).ok()
    }

    /// Writes through a temporary file and a rename; concurrent writers of the
    /// same key store identical content, so the last one simply wins.
    pub fn put<T: Serialize>(&self, key: u64, value: &T) -> AppResult<()> {
        let tmp = self.dir.join(format!("{}.{}.tmp", key_hex(key), std::process::id()));
        write_file(&tmp, &serde_json::to_vec(value)?)?;
        let dest = self.path(key);
        std::fs::rename(&tmp, &dest).map_err(io_err(dest))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv1a_reference_values() {
        // FNV-1a of the empty string and of "a".
        let mut h = FnvHasher::default();
        assert_eq!(h.finish(), 0xcbf29ce484222325);
        h.write(b"a");
        assert_eq!(h.finish(), 0xaf63dc4c8601ec8c);
    }

    #[test]
    fn key_is_order_free_and_sensitive() {
        let a = serde_json::json!({"x": 1, "y": [1, 2]});
        let b: serde_json::Value = serde_json::from_str(r#"{"y": [1, 2], "x": 1}"#).unwrap();
        assert_eq!(cache_key(&a, "s0").unwrap(), cache_key(&b, "s0").unwrap());
        assert_ne!(cache_key(&a, "s0").unwrap(), cache_key(&a, "s1").unwrap());
    }

    #[test]
    fn put_then_get() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        assert_eq!(cache.get::<Vec<f64>>(7), None);
        cache.put(7, &vec![0.1, 2.5]).unwrap();
        assert_eq!(cache.get::<Vec<f64>>(7), Some(vec![0.1, 2.5]));
    }

    #[test]
    fn floats_round_trip_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        // Values the default serde_json parser reads back one ulp off.
        let values: Vec<f64> = vec![-0.0009179520473865787, -8.322991000557663e-8, -1.0425602236250123e-7, 1.0 / 3.0];
        cache.put(1, &values).unwrap();
        let back: Vec<f64> = cache.get(1).unwrap();
        assert_eq!(back.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), values.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }
}
