use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use ssforms::arith::int::{gcd_u64, is_prime};
use ssforms::oracle::default_ells;

/// Character weights to sweep, written `a..b` (half-open) or `a,b,c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightSpec {
    Range(String),
    List(Vec<u64>),
}

impl WeightSpec {
    pub fn parse(s: &str) -> Result<Self> {
        if s.contains("..") {
            let spec = WeightSpec::Range(s.to_string());
            spec.kappas(u64::MAX)?;
            Ok(spec)
        } else {
            let list = s.split(',').map(|x| x.trim().parse::<u64>().with_context(|| format!("bad weight `{x}`"))).collect::<Result<_>>()?;
            Ok(WeightSpec::List(list))
        }
    }

    /// Weights reduced to `0..q1` (the character group has order `q1`), sorted and deduplicated.
    pub fn kappas(&self, q1: u64) -> Result<Vec<u64>> {
        let mut out: Vec<u64> = match self {
            WeightSpec::List(v) => v.clone(),
            WeightSpec::Range(s) => {
                let (a, b) = s.split_once("..").context("range needs `..`")?;
                let a: u64 = a.trim().parse().with_context(|| format!("bad range start in `{s}`"))?;
                let b: u64 = b.trim().parse().with_context(|| format!("bad range end in `{s}`"))?;
                if a > b {
                    bail!("empty weight range `{s}`");
                }
                (a..b).collect()
            }
        };
        if q1 != u64::MAX {
            out = out.into_iter().map(|k| k % q1).collect();
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

/// Settings as read from a TOML file; every field optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub p: Option<u64>,
    #[serde(rename = "N")]
    pub n: Option<u64>,
    pub ell: Option<Vec<u64>>,
    pub weights: Option<WeightSpec>,
    pub witt_k: Option<u32>,
    pub qprec: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Values from `over` win.
    pub fn overlay(self, over: FileConfig) -> FileConfig {
        FileConfig {
            p: over.p.or(self.p),
            n: over.n.or(self.n),
            ell: over.ell.or(self.ell),
            weights: over.weights.or(self.weights),
            witt_k: over.witt_k.or(self.witt_k),
            qprec: over.qprec.or(self.qprec),
            cache_dir: over.cache_dir.or(self.cache_dir),
            jobs: over.jobs.or(self.jobs),
            out: over.out.or(self.out),
        }
    }
}

/// Validated run configuration.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub p: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub ell: Vec<u64>,
    pub kappas: Vec<u64>,
    pub witt_k: u32,
    pub qprec: usize,
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,
    #[serde(skip)]
    pub jobs: usize,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_file_config(c: FileConfig) -> Result<Self> {
        let p = c.p.unwrap_or(11);
        let n = c.n.unwrap_or(3);
        if !is_prime(p) {
            bail!("p = {p} is not prime");
        }
        if n < 3 {
            bail!("N = {n} must be at least 3");
        }
        if gcd_u64(n, p) != 1 {
            bail!("N = {n} is not coprime to p = {p}");
        }
        let ell = c.ell.unwrap_or_else(|| default_ells(p, n));
        if ell.is_empty() {
            bail!("no Hecke primes given");
        }
        for &l in &ell {
            if !is_prime(l) {
                bail!("ell = {l} is not prime");
            }
            if (p * n) % l == 0 {
                bail!("ell = {l} divides pN = {}", p * n);
            }
        }
        let q1 = p * p - 1;
        let kappas = match c.weights {
            Some(w) => w.kappas(q1)?,
            None => (0..q1).collect(),
        };
        let witt_k = c.witt_k.unwrap_or(4);
        if witt_k < 2 {
            bail!("Witt precision must be at least 2");
        }
        let max_ell = *ell.iter().max().unwrap() as usize;
        let qprec = c.qprec.unwrap_or(256).max(16 * max_ell);
        let jobs = c.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1);
        Ok(RunConfig { p, n, ell, kappas, witt_k, qprec, cache_dir: c.cache_dir, jobs, out: c.out })
    }

    /// Seed for randomized checks, derived from the configuration content.
    pub fn seed(&self) -> u64 {
        let json = serde_json::to_vec(self).expect("serializable");
        let digest = Sha256::digest(&json);
        u64::from_le_bytes(digest[..8].try_into().unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_parse() {
        assert_eq!(WeightSpec::parse("0..4").unwrap().kappas(120).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(WeightSpec::parse("5,1,125").unwrap().kappas(120).unwrap(), vec![1, 5]);
        assert!(WeightSpec::parse("4..1").is_err());
        assert!(WeightSpec::parse("a").is_err());
    }

    #[test]
    fn validation() {
        let ok = |p, n| RunConfig::from_file_config(FileConfig { p: Some(p), n: Some(n), ..Default::default() });
        assert!(ok(11, 3).is_ok());
        assert!(ok(4, 3).is_err());
        assert!(ok(11, 2).is_err());
        assert!(ok(3, 6).is_err());
        assert_eq!(ok(13, 4).unwrap().ell, vec![3, 5, 7, 11]);
        let bad = FileConfig { ell: Some(vec![3]), ..Default::default() };
        assert!(RunConfig::from_file_config(bad).is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = FileConfig { p: Some(13), n: Some(4), jobs: Some(2), ..Default::default() };
        let flags = FileConfig { p: Some(17), ..Default::default() };
        let merged = file.overlay(flags);
        assert_eq!((merged.p, merged.n, merged.jobs), (Some(17), Some(4), Some(2)));
    }
}
