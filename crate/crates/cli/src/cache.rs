//! On-disk cache of formal group laws, keyed by a content hash of the
//! construction parameters. Entries carry a hash of their payload; anything
//! that fails to verify is rebuilt.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use tcm_core::fgl::{Fgl, PSeriesSpec};
use tcm_core::Result;

pub const CACHE_ENV: &str = "TCM_CACHE_DIR";
const FORMAT: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheEvent {
    Hit,
    Miss,
    /// An entry existed but failed verification.
    Rebuilt,
    Disabled,
}

impl CacheEvent {
    pub fn name(self) -> &'static str {
        match self {
            CacheEvent::Hit => "hit",
            CacheEvent::Miss => "miss",
            CacheEvent::Rebuilt => "rebuilt",
            CacheEvent::Disabled => "disabled",
        }
    }
}

pub struct FglCache {
    dir: Option<PathBuf>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Cache key of a law: `p, n`, coordinate, `a, d`, `D_F` and the file format.
pub fn cache_key(spec: &PSeriesSpec, a: u32, d: i32, df: usize) -> String {
    let v = json!({ "format": FORMAT, "spec": spec, "a": a, "d": d, "df": df });
    sha256_hex(v.to_string().as_bytes())
}

impl FglCache {
    /// `flag`, else `$TCM_CACHE_DIR`, else `.tcm-cache` in the working directory.
    pub fn new(flag: Option<&str>) -> FglCache {
        let dir = flag
            .map(PathBuf::from)
            .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(".tcm-cache"));
        FglCache { dir: Some(dir) }
    }

    pub fn disabled() -> FglCache {
        FglCache { dir: None }
    }

    pub fn path_for(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("fgl-{key}.json")))
    }

    pub fn load_or_build(&self, p: u64, n: usize, a: u32, d: i32, df: usize) -> Result<(Arc<Fgl>, CacheEvent)> {
        let spec = PSeriesSpec::standard(p, n);
        let key = cache_key(&spec, a, d, df);
        let Some(path) = self.path_for(&key) else {
            return Ok((Arc::new(Fgl::with_spec(spec, a, d, df)?), CacheEvent::Disabled));
        };
        let mut event = CacheEvent::Miss;
        if path.exists() {
            match read_entry(&path, &key).and_then(|law| Fgl::from_parts(spec.clone(), a, d, df, &law).ok()) {
                Some(f) => return Ok((Arc::new(f), CacheEvent::Hit)),
                None => {
                    eprintln!("warning: cache entry {} failed verification; rebuilding", path.display());
                    event = CacheEvent::Rebuilt;
                }
            }
        }
        let f = Fgl::with_spec(spec, a, d, df)?;
        if let Err(e) = store(&path, &key, &f) {
            eprintln!("warning: could not write cache entry {}: {e}", path.display());
        }
        Ok((Arc::new(f), event))
    }
}

fn read_entry(path: &Path, key: &str) -> Option<Value> {
    let text = std::fs::read_to_string(path).ok()?;
    let v: Value = serde_json::from_str(&text).ok()?;
    if v.get("key")?.as_str()? != key {
        return None;
    }
    let law = v.get("law")?;
    if v.get("sha256")?.as_str()? != sha256_hex(law.to_string().as_bytes()) {
        return None;
    }
    Some(law.clone())
}

/// Write-temp-then-rename, so readers never see a partial entry.
fn store(path: &Path, key: &str, f: &Fgl) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let law = f.law().to_json();
    let entry = json!({ "key": key, "sha256": sha256_hex(law.to_string().as_bytes()), "law": law });
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(entry.to_string().as_bytes())?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_separate_parameters() {
        let s = PSeriesSpec::standard(2, 2);
        assert_ne!(cache_key(&s, 4, 12, 12), cache_key(&s, 4, 12, 10));
        assert_ne!(cache_key(&s, 4, 12, 12), cache_key(&PSeriesSpec::standard(3, 2), 4, 12, 12));
        assert_eq!(cache_key(&s, 4, 12, 12), cache_key(&s, 4, 12, 12));
    }

    #[test]
    fn hit_after_miss_and_rebuild_after_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let c = FglCache::new(Some(dir.path().to_str().unwrap()));
        let (f1, e1) = c.load_or_build(2, 2, 4, 6, 6).unwrap();
        assert_eq!(e1, CacheEvent::Miss);
        let (f2, e2) = c.load_or_build(2, 2, 4, 6, 6).unwrap();
        assert_eq!(e2, CacheEvent::Hit);
        assert_eq!(f1.law().to_json(), f2.law().to_json());

        let path = c.path_for(&cache_key(&PSeriesSpec::standard(2, 2), 4, 6, 6)).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        let i = bytes.iter().rposition(|b| b.is_ascii_digit()).unwrap();
        bytes[i] = if bytes[i] == b'1' { b'2' } else { b'1' };
        std::fs::write(&path, bytes).unwrap();
        let (f3, e3) = c.load_or_build(2, 2, 4, 6, 6).unwrap();
        assert_eq!(e3, CacheEvent::Rebuilt);
        assert_eq!(f3.law().to_json(), f1.law().to_json());
        assert_eq!(c.load_or_build(2, 2, 4, 6, 6).unwrap().1, CacheEvent::Hit);
    }
}
