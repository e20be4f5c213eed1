//! TOML configuration: every section is optional and falls back to the
//! shipped defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use conefield::manifold::ManifoldOptions;
use conefield::shooting::{BlockConfig, IntegratorConfig, OrbitCandidate, ProofConfig, SubdivisionConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const ENV_VAR: &str = "CONEFIELD_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateEntry {
    pub n: usize,
    pub r_hat: f64,
    pub delta_r: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub blocks: BlockConfig,
    pub integrator: IntegratorConfig,
    pub subdivisions: SubdivisionConfig,
    pub manifold: ManifoldOptions,
    /// Absent means the six shipped candidates.
    pub candidates: Option<Vec<CandidateEntry>>,
}

impl FileConfig {
    pub fn into_proof(self) -> anyhow::Result<ProofConfig> {
        let candidates = match self.candidates {
            None => OrbitCandidate::defaults(),
            Some(list) => list
                .iter()
                .enumerate()
                .map(|(i, c)| OrbitCandidate::new(c.n, c.r_hat, c.delta_r).with_context(|| format!("candidates[{i}]")))
                .collect::<anyhow::Result<_>>()?,
        };
        let cfg = ProofConfig {
            blocks: self.blocks,
            candidates,
            integrator: self.integrator,
            subdivisions: self.subdivisions,
            manifold: self.manifold,
        };
        cfg.check()?;
        Ok(cfg)
    }

    pub fn from_proof(cfg: &ProofConfig) -> Self {
        FileConfig {
            blocks: cfg.blocks,
            integrator: cfg.integrator,
            subdivisions: cfg.subdivisions,
            manifold: cfg.manifold,
            candidates: Some(cfg.candidates.iter().map(|c| CandidateEntry { n: c.n, r_hat: c.r_hat, delta_r: c.delta_r }).collect()),
        }
    }
}

pub fn parse(text: &str) -> anyhow::Result<ProofConfig> {
    // toml's messages carry line, column and the offending key.
    let file: FileConfig = toml::from_str(text).map_err(|e| anyhow::anyhow!("{e}"))?;
    file.into_proof()
}

/// `--config` wins over `CONEFIELD_CONFIG`; neither means defaults.
pub fn resolve_path(flag: Option<&Path>) -> Option<PathBuf> {
    flag.map(Path::to_path_buf).or_else(|| std::env::var_os(ENV_VAR).filter(|v| !v.is_empty()).map(PathBuf::from))
}

pub fn load(flag: Option<&Path>) -> anyhow::Result<ProofConfig> {
    let Some(path) = resolve_path(flag) else {
        return Ok(ProofConfig::default());
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {}", path.display()))?;
    parse(&text).with_context(|| format!("in config {}", path.display()))
}

/// SHA-256 of the canonical JSON form.
pub fn digest(cfg: &ProofConfig) -> String {
    let json = serde_json::to_vec(cfg).expect("config serializes");
    Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn to_toml(cfg: &ProofConfig) -> anyhow::Result<String> {
    Ok(toml::to_string_pretty(&FileConfig::from_proof(cfg))?)
}

pub fn require_candidate(cfg: &ProofConfig, n: usize) -> anyhow::Result<OrbitCandidate> {
    match cfg.candidates.iter().find(|c| c.n == n) {
        Some(c) => Ok(*c),
        None => bail!("no candidate with n = {n} in the configuration"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default() {
        assert_eq!(parse("").unwrap(), ProofConfig::default());
    }

    #[test]
    fn toml_round_trip() {
        let d = ProofConfig::default();
        assert_eq!(parse(&to_toml(&d).unwrap()).unwrap(), d);
    }

    #[test]
    fn unknown_field_reports_location() {
        let e = parse("[blocks]\ndb1 = 0.1\nbogus = 3\n").unwrap_err().to_string();
        assert!(e.contains("bogus") && e.contains("line 3"), "{e}");
    }

    #[test]
    fn partial_sections_keep_defaults() {
        let c = parse("[integrator]\norder = 25\n").unwrap();
        assert_eq!(c.integrator.order, 25);
        assert_eq!(c.integrator.tol, 1e-14);
        assert_eq!(c.blocks, BlockConfig::default());
    }

    #[test]
    fn shipped_file_is_default() {
        let text = include_str!("../../../config/default.toml");
        assert_eq!(parse(text).unwrap(), ProofConfig::default());
    }

    #[test]
    fn default_digest_is_pinned() {
        assert_eq!(digest(&ProofConfig::default()), "5a48d930c29a4311a83acf5dfc487e4afc90db007dbb67d799311d6ec58d191d");
    }
}
