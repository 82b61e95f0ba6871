//! Settings shared by every command and law suite.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finitary::DEFAULT_FIN_K;
use crate::poly::DEFAULT_CAP;

pub const SEED_VAR: &str = "POLYAGG_SEED";
pub const DEFAULT_SEED: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Table,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkspaceConfig {
    /// Bound on every enumeration.
    pub cap: usize,
    /// Truncation `K` of the list polynomial `u_K`.
    pub fin_k: usize,
    pub seed: u64,
    pub format: OutputFormat,
}

impl Default for WorkspaceConfig {
    fn default() -> Self {
        WorkspaceConfig { cap: DEFAULT_CAP, fin_k: DEFAULT_FIN_K, seed: DEFAULT_SEED, format: OutputFormat::Table }
    }
}

impl WorkspaceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cap == 0 {
            return Err(Error::mismatch("config cap", "must be positive"));
        }
        if self.fin_k == 0 {
            return Err(Error::mismatch("config fin_k", "must be positive"));
        }
        Ok(())
    }

    pub fn from_json_text(text: &str) -> Result<Self> {
        let cfg: WorkspaceConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
            location: crate::error::Location::at("config").with_line(Some(e.line())),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies `POLYAGG_SEED` when the variable is set.
    pub fn with_env_seed(mut self, value: Option<&str>) -> Result<Self> {
        if let Some(v) = value {
            self.seed = v.trim().parse().map_err(|_| Error::parse(SEED_VAR, format!("`{v}` is not an unsigned integer")))?;
        }
        Ok(self)
    }

    pub fn from_env(self) -> Result<Self> {
        self.with_env_seed(std::env::var(SEED_VAR).ok().as_deref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let cfg = WorkspaceConfig::default();
        assert_eq!((cfg.cap, cfg.fin_k, cfg.format), (100_000, 8, OutputFormat::Table));
        let cfg = WorkspaceConfig::from_json_text(r#"{"seed": 9, "format": "json"}"#).unwrap();
        assert_eq!((cfg.seed, cfg.format, cfg.cap), (9, OutputFormat::Json, 100_000));
        assert_eq!(cfg.clone().with_env_seed(Some("42")).unwrap().seed, 42);
        assert!(cfg.with_env_seed(Some("x")).is_err());
        assert!(WorkspaceConfig::from_json_text(r#"{"cap": 0}"#).is_err());
        assert!(WorkspaceConfig::from_json_text(r#"{"bogus": 1}"#).is_err());
    }
}
