use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::render::RenderSpec;
use crate::lattice::{DomainKind, LatticeDomain};
use crate::loop_measure::SoupConfig;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Error with the process exit code it maps to.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError { code: EXIT_CONFIG, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } | Error::TriesExhausted { .. } | Error::ConditioningFailure { .. } => EXIT_BUDGET,
            _ => EXIT_CONFIG,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::config(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::config(format!("invalid JSON: {e}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Sample,
    PhaseScan,
    Render,
    Explore,
    RestrictionTest,
    PinningFit,
}

/// Everything needed to regenerate a command's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub command: Command,
    pub domain: DomainKind,
    pub c: f64,
    pub cutoff: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicas: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Hulls as (a, ε) pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hulls: Option<Vec<[f64; 2]>>,
    /// Scale of the disk chart used by restriction tests.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_clusters: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub render: Option<RenderSpec>,
    pub tool_version: String,
    pub outputs: Vec<String>,
}

impl ExperimentManifest {
    pub fn new(command: Command, domain: DomainKind, seed: u64) -> Self {
        ExperimentManifest {
            command,
            domain,
            c: 1.0,
            cutoff: SoupConfig::DEFAULT_CUTOFF,
            n_max: None,
            seed,
            replicas: None,
            eps: None,
            delta: None,
            lambda: None,
            hulls: None,
            sigma: None,
            c_grid: None,
            min_clusters: None,
            input: None,
            render: None,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: Vec::new(),
        }
    }

    pub fn lattice_domain(&self) -> Result<LatticeDomain> {
        LatticeDomain::build(self.domain)
    }

    pub fn soup_config(&self) -> Result<SoupConfig> {
        let mut cfg = SoupConfig::new(self.lattice_domain()?, self.c, self.seed).with_cutoff(self.cutoff);
        if let Some(n) = self.n_max {
            cfg = cfg.with_n_max(n);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// First output path, if any.
    pub fn out(&self) -> Option<&str> {
        self.outputs.first().map(String::as_str)
    }
}

/// Parses `disk:R` or `box:W,H`.
pub fn parse_domain(s: &str) -> std::result::Result<DomainKind, String> {
    let (kind, rest) = s.split_once(':').ok_or_else(|| format!("domain '{s}' is not disk:R or box:W,H"))?;
    let num = |v: &str| v.trim().parse::<u32>().map_err(|e| format!("bad size '{v}': {e}"));
    match kind {
        "disk" => Ok(DomainKind::Disk { radius: num(rest)? }),
        "box" => {
            let (w, h) = rest.split_once(',').ok_or_else(|| format!("box needs W,H, got '{rest}'"))?;
            Ok(DomainKind::HalfPlaneBox { width: num(w)?, height: num(h)? })
        }
        _ => Err(format!("unknown domain kind '{kind}'")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_strings() {
        assert_eq!(parse_domain("disk:32"), Ok(DomainKind::Disk { radius: 32 }));
        assert_eq!(parse_domain("box:64,48"), Ok(DomainKind::HalfPlaneBox { width: 64, height: 48 }));
        assert!(parse_domain("disk").is_err());
        assert!(parse_domain("ring:3").is_err());
        assert!(parse_domain("box:3").is_err());
    }

    #[test]
    fn manifest_round_trip() {
        let mut m = ExperimentManifest::new(Command::Sample, DomainKind::Disk { radius: 16 }, 7);
        m.outputs.push("a.json".into());
        let s = serde_json::to_string(&m).unwrap();
        assert!(!s.contains("lambda"));
        assert_eq!(serde_json::from_str::<ExperimentManifest>(&s).unwrap(), m);
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::from(Error::BudgetExceeded { budget: 3 }).code, EXIT_BUDGET);
        assert_eq!(CliError::from(Error::InvalidParameter("x".into())).code, EXIT_CONFIG);
    }
}
