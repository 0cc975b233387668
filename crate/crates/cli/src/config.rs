//! Experiment file schema (TOML, or the `config` object of a JSON sidecar).

use std::path::{Path, PathBuf};

use caaoi::sim::{
    Experiment, PolicyKind, PolicyRun, PolicySpec, SweepPath, SystemSource, DEFAULT_HORIZON,
    DEFAULT_REPLICATIONS,
};
use caaoi::{Csi, MetricKind, SensorSpec, SystemSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub system: Vec<SensorEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_system: Option<RandomSystem>,
    #[serde(default = "yes")]
    pub normalize_weights: bool,
    pub policies: Vec<PolicyEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepEntry>,
    #[serde(default = "default_horizon")]
    pub horizon: u64,
    #[serde(default = "default_replications")]
    pub replications: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn yes() -> bool {
    true
}

fn default_horizon() -> u64 {
    DEFAULT_HORIZON
}

fn default_replications() -> u32 {
    DEFAULT_REPLICATIONS
}

fn ca_aoi() -> MetricKind {
    MetricKind::CaAoi
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorEntry {
    pub weight: f64,
    pub p: f64,
    pub csi: Csi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSystem {
    pub n: usize,
    pub csi: Csi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyEntry {
    pub kind: PolicyKind,
    #[serde(default = "ca_aoi")]
    pub metric: MetricKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<MetricKind>,
}

impl PolicyEntry {
    pub fn new(kind: PolicyKind, metric: MetricKind) -> Self {
        Self {
            kind,
            metric,
            target: None,
        }
    }

    pub fn targeting(mut self, target: MetricKind) -> Self {
        self.target = Some(target);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepEntry {
    pub path: String,
    pub values: Vec<f64>,
}

/// A validated config, ready to run.
#[derive(Debug, Clone)]
pub struct Plan {
    pub experiment: Experiment,
    pub sweep: Option<(SweepPath, Vec<f64>)>,
}

impl Plan {
    pub fn sweep_ref(&self) -> Option<(SweepPath, &[f64])> {
        self.sweep.as_ref().map(|(p, v)| (*p, v.as_slice()))
    }
}

/// Reads TOML, or JSON when the file ends in `.json`. A JSON file holding a
/// `config` object (a results sidecar) yields that object.
pub fn load(path: &Path) -> CliResult<Config> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let shown = path.display().to_string();
    let parse_err = |message: String| CliError::Parse {
        path: shown.clone(),
        message,
    };
    if path.extension().is_some_and(|e| e == "json") {
        let mut value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| parse_err(e.to_string()))?;
        if let Some(inner) = value.get_mut("config") {
            value = inner.take();
        }
        serde_json::from_value(value).map_err(|e| parse_err(e.to_string()))
    } else {
        toml::from_str(&text).map_err(|e| parse_err(e.to_string()))
    }
}

impl Config {
    pub fn system_source(&self) -> CliResult<SystemSource> {
        match (&self.random_system, self.system.is_empty()) {
            (Some(_), false) => Err(CliError::Validation(
                "system, random_system: give exactly one of them".into(),
            )),
            (None, true) => Err(CliError::Validation("system: at least one sensor is required".into())),
            (Some(r), true) => Ok(SystemSource::Random {
                n: r.n,
                csi: r.csi,
                normalize_weights: self.normalize_weights,
            }),
            (None, false) => Ok(SystemSource::Fixed(SystemSpec::new(
                self.system
                    .iter()
                    .map(|s| SensorSpec::new(s.weight, s.p, s.csi))
                    .collect(),
                self.normalize_weights,
            ))),
        }
    }

    /// Checks every field, including each sweep point and each policy
    /// against each system it will meet.
    pub fn validate(&self) -> CliResult<Plan> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Validation(format!(
                "schema_version: expected {SCHEMA_VERSION}, got {}",
                self.schema_version
            )));
        }
        if self.horizon == 0 {
            return Err(CliError::from_core("horizon", caaoi::Error::ZeroHorizon));
        }
        if self.replications == 0 {
            return Err(CliError::from_core("replications", caaoi::Error::ZeroReplications));
        }
        if self.policies.is_empty() {
            return Err(CliError::Validation("policies: at least one policy is required".into()));
        }
        if let Some(r) = &self.random_system {
            if r.n == 0 {
                return Err(CliError::Validation("random_system.n: must be at least 1".into()));
            }
        }
        let source = self.system_source()?;
        let sweep = match &self.sweep {
            None => None,
            Some(s) => {
                let path: SweepPath = s
                    .path
                    .parse()
                    .map_err(|e| CliError::from_core("sweep.path", e))?;
                Some((path, s.values.clone()))
            }
        };

        let mut points = Vec::new();
        match &sweep {
            None => points.push(("system".to_string(), source.clone())),
            Some((path, values)) => {
                for (k, &v) in values.iter().enumerate() {
                    let field = format!("sweep.values[{k}]");
                    let src = source.with(*path, v).map_err(|e| CliError::from_core(&field, e))?;
                    points.push((field, src));
                }
            }
        }
        let runs: Vec<PolicyRun> = self
            .policies
            .iter()
            .map(|p| PolicyRun {
                policy: PolicySpec {
                    kind: p.kind,
                    target: p.target,
                    params: None,
                },
                metric: p.metric,
            })
            .collect();
        for (field, src) in &points {
            let system = src
                .resolve(self.seed)
                .validate()
                .map_err(|e| CliError::from_core(field, e))?;
            for (i, run) in runs.iter().enumerate() {
                run.policy
                    .build(&system, run.metric)
                    .map_err(|e| CliError::from_core(&format!("policies[{i}]"), e))?;
            }
        }

        Ok(Plan {
            experiment: Experiment {
                source,
                runs,
                horizon: self.horizon,
                seed: self.seed,
                replications: self.replications,
            },
            sweep,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
schema_version = 1
seed = 3
horizon = 1000
replications = 2

[[system]]
weight = 1.0
p = 0.1
csi = "unknown"

[[system]]
weight = 2.0
p = 0.9
csi = "known"

[[policies]]
kind = "whittle"

[[policies]]
kind = "whittle"
metric = "aoi"
target = "ca_aoi"

[sweep]
path = "sensors[1].p"
values = [0.2, 0.4]
"#;

    #[test]
    fn parses_and_validates() {
        let cfg: Config = toml::from_str(SAMPLE).unwrap();
        assert!(cfg.normalize_weights);
        assert_eq!(cfg.policies[0].metric, MetricKind::CaAoi);
        let plan = cfg.validate().unwrap();
        assert_eq!(plan.sweep.unwrap().1, vec![0.2, 0.4]);
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = SAMPLE.replace("seed = 3", "seed = 3\nsed = 4");
        assert!(toml::from_str::<Config>(&bad).is_err());
        let bad = SAMPLE.replace("csi = \"known\"", "csi = \"known\"\ncolour = 1");
        assert!(toml::from_str::<Config>(&bad).is_err());
    }

    #[test]
    fn errors_name_the_field() {
        let mut cfg: Config = toml::from_str(SAMPLE).unwrap();
        cfg.system[1].weight = -1.0;
        let msg = cfg.validate().unwrap_err().to_string();
        assert!(msg.contains("system[1].weight"), "{msg}");

        let mut cfg: Config = toml::from_str(SAMPLE).unwrap();
        cfg.sweep.as_mut().unwrap().values.push(1.5);
        let msg = cfg.validate().unwrap_err().to_string();
        assert!(msg.contains("sweep.values[2]"), "{msg}");

        let mut cfg: Config = toml::from_str(SAMPLE).unwrap();
        cfg.sweep.as_mut().unwrap().path = "sensors[1].q".into();
        assert!(cfg.validate().unwrap_err().to_string().contains("sweep.path"));

        let mut cfg: Config = toml::from_str(SAMPLE).unwrap();
        cfg.policies[0] = PolicyEntry::new(PolicyKind::Greedy, MetricKind::CaAoi).targeting(MetricKind::VanillaAoi);
        assert!(cfg.validate().unwrap_err().to_string().contains("policies[0]"));

        let mut cfg: Config = toml::from_str(SAMPLE).unwrap();
        cfg.schema_version = 2;
        assert_eq!(cfg.validate().unwrap_err().exit_code(), 1);
    }
}
