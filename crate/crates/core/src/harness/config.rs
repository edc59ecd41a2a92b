use crate::ensembles::{Ensemble, EnsembleSpec};
use crate::linalg::TRACE_POWER_CAP;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    #[serde(alias = "CSV")]
    Csv,
    #[serde(alias = "JSON")]
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

/// Experiment configuration: a flat TOML table with exactly these keys.
/// Missing keys take their defaults; unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    #[serde(deserialize_with = "ensemble_name")]
    pub ensemble: Ensemble,
    pub v: f64,
    #[serde(rename = "N_list")]
    pub n_list: Vec<usize>,
    pub b_list: Vec<usize>,
    pub trials: u64,
    /// Largest moment order `p` in `(1/N) Tr H^p`.
    pub k_max: usize,
    pub eps_list: Vec<f64>,
    /// Worker threads; 0 picks the available parallelism.
    pub workers: usize,
    /// Empty means standard output.
    pub output_path: String,
    pub format: OutputFormat,
}

fn ensemble_name<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<Ensemble, D::Error> {
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            master_seed: 1,
            ensemble: Ensemble::Gue,
            v: 1.0,
            n_list: vec![64, 125],
            b_list: vec![],
            trials: 5000,
            k_max: 8,
            eps_list: vec![0.3],
            workers: 0,
            output_path: String::new(),
            format: OutputFormat::Csv,
        }
    }
}

/// One `(N, b)` point of the experiment grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridPoint {
    pub n: usize,
    pub b: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)?;
        Self::from_toml_str(&s).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.trials < 1 {
            return bad("trials must be at least 1".into());
        }
        if self.k_max > TRACE_POWER_CAP {
            return bad(format!("k_max = {} exceeds {TRACE_POWER_CAP}", self.k_max));
        }
        if !(self.v > 0.0 && self.v.is_finite()) {
            return bad(format!("v must be positive, got {}", self.v));
        }
        if self.n_list.is_empty() || self.n_list.contains(&0) {
            return bad("N_list must hold positive sizes".into());
        }
        if let Some(e) = self.eps_list.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return bad(format!("eps_list entries must be positive, got {e}"));
        }
        if self.ensemble == Ensemble::Band {
            if self.b_list.is_empty() || self.b_list.contains(&0) {
                return bad("BAND needs a non-empty b_list of positive values".into());
            }
            for &n in &self.n_list {
                if let Some(b) = self.b_list.iter().find(|&&b| b > n) {
                    return bad(format!("b = {b} exceeds N = {n}"));
                }
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<GridPoint> {
        let mut g = vec![];
        for &n in &self.n_list {
            if self.ensemble == Ensemble::Band {
                g.extend(self.b_list.iter().map(|&b| GridPoint { n, b: Some(b) }));
            } else {
                g.push(GridPoint { n, b: None });
            }
        }
        g
    }

    pub fn spec(&self, p: GridPoint) -> EnsembleSpec {
        EnsembleSpec::new(
            self.ensemble,
            p.n,
            self.v,
            p.b.unwrap_or(0),
            self.master_seed,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let cfg = ExperimentConfig::from_toml_str(
            r#"
master_seed = 7
ensemble = "BAND"
v = 0.5
N_list = [64, 128]
b_list = [8, 32]
trials = 10
k_max = 6
eps_list = [0.1, 0.2]
workers = 2
output_path = "out.csv"
format = "json"
"#,
        )
        .unwrap();
        assert_eq!(cfg.ensemble, Ensemble::Band);
        assert_eq!(cfg.format, OutputFormat::Json);
        assert_eq!(cfg.grid().len(), 4);
        assert_eq!(cfg.grid()[1], GridPoint { n: 64, b: Some(32) });
        assert_eq!(cfg.spec(cfg.grid()[3]).b, 32);
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(ExperimentConfig::from_toml_str("trails = 3").is_err());
        assert!(ExperimentConfig::from_toml_str("trials = 0").is_err());
        assert!(ExperimentConfig::from_toml_str("k_max = 65").is_err());
        assert!(ExperimentConfig::from_toml_str("ensemble = \"WISHART\"").is_err());
        assert!(
            ExperimentConfig::from_toml_str("ensemble = \"BAND\"\nN_list = [8]\nb_list = [9]")
                .is_err()
        );
        assert!(ExperimentConfig::from_toml_str("ensemble = \"BAND\"").is_err());
        assert!(ExperimentConfig::from_toml_str("eps_list = [-1.0]").is_err());
        assert!(ExperimentConfig::from_toml_str("ensemble = \"goe\"").is_ok());
        assert!(ExperimentConfig::from_toml_str("").is_ok());
    }
}
