//! On-disk cache of algebra dumps.

use std::io::Write;
use std::path::{Path, PathBuf};

use modlie::catalog::sha256_hex;
use modlie::Error;

use crate::dump::AlgebraDump;
use crate::registry::Params;

pub const CACHE_DIR_ENV: &str = "MODLIE_CACHE_DIR";

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

/// The string hashed into a cache key.
pub fn key_text(name: &str, params: &Params) -> String {
    format!(
        "name={name};p={:?};N={:?};a={};b={};c={};derived={};cap={};version={}",
        params.p,
        params.heights,
        params.a,
        params.b,
        params.c,
        params.derived,
        params.cap,
        modlie::CODE_VERSION
    )
}

impl Cache {
    pub fn new(dir: impl AsRef<Path>) -> Self {
        Cache { dir: dir.as_ref().to_path_buf() }
    }

    /// The directory from `--cache-dir`, else from the environment; no cache otherwise.
    pub fn resolve(flag: Option<&Path>) -> Option<Self> {
        flag.map(Cache::new).or_else(|| std::env::var_os(CACHE_DIR_ENV).filter(|d| !d.is_empty()).map(Cache::new))
    }

    pub fn path(&self, name: &str, params: &Params) -> PathBuf {
        let digest = sha256_hex(&key_text(name, params));
        self.dir.join(format!("{name}-{}.json", &digest[..16]))
    }

    pub fn load(&self, name: &str, params: &Params) -> Option<AlgebraDump> {
        let text = std::fs::read_to_string(self.path(name, params)).ok()?;
        AlgebraDump::from_json(&text).ok()
    }

    pub fn store(&self, name: &str, params: &Params, dump: &AlgebraDump) -> Result<PathBuf, Error> {
        let path = self.path(name, params);
        write_atomic(&path, &dump.to_json())?;
        Ok(path)
    }
}

/// Write through a temporary file in the target directory and rename it into place.
pub fn write_atomic(path: &Path, text: &str) -> Result<(), Error> {
    let io = |e: std::io::Error| Error::BadInput(format!("cannot write {}: {e}", path.display()));
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
