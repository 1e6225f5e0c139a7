//! Checksummed on-disk cache: `<key>.json` next to `<key>.sha256`.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

pub struct Cache {
    dir: PathBuf,
}

#[derive(Debug, PartialEq, Eq)]
pub enum Lookup {
    Hit(String),
    Miss,
    Corrupt,
}

pub fn checksum(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Cache {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Cache { dir: dir.to_path_buf() })
    }

    fn paths(&self, key: &str) -> (PathBuf, PathBuf) {
        (self.dir.join(format!("{key}.json")), self.dir.join(format!("{key}.sha256")))
    }

    pub fn get(&self, key: &str) -> Lookup {
        let (data, sum) = self.paths(key);
        let (Ok(body), Ok(expected)) = (std::fs::read_to_string(&data), std::fs::read_to_string(&sum)) else {
            return if data.exists() || sum.exists() { Lookup::Corrupt } else { Lookup::Miss };
        };
        if checksum(body.as_bytes()) == expected.trim() {
            Lookup::Hit(body)
        } else {
            Lookup::Corrupt
        }
    }

    pub fn put(&self, key: &str, body: &str) -> Result<()> {
        let (data, sum) = self.paths(key);
        std::fs::write(&data, body).with_context(|| format!("writing {}", data.display()))?;
        std::fs::write(&sum, checksum(body.as_bytes())).with_context(|| format!("writing {}", sum.display()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_tampering() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(dir.path()).unwrap();
        assert_eq!(c.get("x"), Lookup::Miss);
        c.put("x", "{}").unwrap();
        assert_eq!(c.get("x"), Lookup::Hit("{}".into()));
        std::fs::write(dir.path().join("x.json"), "{ }").unwrap();
        assert_eq!(c.get("x"), Lookup::Corrupt);
        std::fs::remove_file(dir.path().join("x.sha256")).unwrap();
        assert_eq!(c.get("x"), Lookup::Corrupt);
    }
}
