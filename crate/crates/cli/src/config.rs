use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use ticksim::clock::InputClock;
use ticksim::tick::WaitingTimeDistribution;

use crate::error::CliError;

pub const SEED_ENV: &str = "TICKSIM_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Whole configuration file. Every key has a default, so an empty file is
/// valid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub trials: usize,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub sweep: SweepConfig,
    pub bounds: BoundsConfig,
    pub run: RunConfig,
    pub network: NetworkConfig,
    #[serde(rename = "estimator-check")]
    pub estimator_check: EstimatorConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 1,
            trials: 10_000,
            format: Format::Csv,
            out: None,
            sweep: SweepConfig::default(),
            bounds: BoundsConfig::default(),
            run: RunConfig::default(),
            network: NetworkConfig::default(),
            estimator_check: EstimatorConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub input: String,
    pub d: Vec<u32>,
    pub eta: f64,
    /// Tail of the input confidence interval.
    pub eps: f64,
    /// Tail at which the output inaccuracy is estimated.
    pub eps0: f64,
    pub eps_ec: f64,
    pub protocols: Vec<String>,
    pub j: u32,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            input: "box-sigma:1:0.33".into(),
            d: (4..=10).map(|k| 1 << k).collect(),
            eta: 0.1,
            eps: 0.01,
            eps0: 0.01,
            eps_ec: 0.001,
            protocols: vec!["P1".into(), "P3".into(), "P4".into()],
            j: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsConfig {
    pub sigma_in: Vec<f64>,
    pub d: Vec<u32>,
    pub nu: f64,
    pub j: Vec<u32>,
    /// Tail level of the Chebyshev bound.
    pub eps: f64,
    /// Single-tick R-accuracies for the Chebyshev bound.
    pub r1: Vec<f64>,
    /// Width multiplier of the Hoeffding bound.
    pub n: f64,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            sigma_in: vec![0.0, 0.1, 0.33],
            d: vec![16, 64, 256, 1024],
            nu: 0.1,
            j: vec![1, 2],
            eps: 0.04,
            r1: vec![100.0],
            n: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub protocol: String,
    pub input: String,
    pub d: u32,
    pub eta: f64,
    pub eps: f64,
    pub eps0: f64,
    pub eps_ec: f64,
    /// Output ticks `J` per trial.
    pub outputs: usize,
    pub design_index: u32,
    /// Estimate the `j`-th output at tail `j * eps0` rather than `eps0`.
    pub scale_tail: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restart_every: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            protocol: "P2".into(),
            input: "box-sigma:1:0.1".into(),
            d: 256,
            eta: 0.1,
            eps: 0.01,
            eps0: 0.01,
            eps_ec: 0.001,
            outputs: 20,
            design_index: 1,
            scale_tail: true,
            restart_every: None,
            horizon: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    pub nodes: usize,
    pub input: String,
    pub eps: f64,
    /// Total width of the uniform delay jitter.
    pub jitter: f64,
    pub delay: f64,
    /// Extra delay of each further node.
    pub delay_step: f64,
    pub d: u32,
    pub eta: f64,
    pub eps_ec: f64,
    /// Enhanced ticks per node.
    pub outputs: usize,
    /// Tick index at which the spread is measured.
    pub k: usize,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            nodes: 8,
            input: "box-sigma:1:0.1".into(),
            eps: 0.01,
            jitter: 0.1,
            delay: 0.06,
            delay_step: 0.005,
            d: 256,
            eta: 0.1,
            eps_ec: 0.001,
            outputs: 5,
            k: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorConfig {
    pub instances: usize,
    pub max_n: usize,
    pub eps: Vec<f64>,
    pub max_j: u32,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            instances: 100,
            max_n: 200,
            eps: vec![0.01, 0.1, 0.34],
            max_j: 5,
        }
    }
}

/// Text between these markers in a results file is the embedded config.
pub const BEGIN_MARKER: &str = "# config:";
pub const END_MARKER: &str = "# end config";

impl Config {
    /// Parses a configuration file or a results file that embeds one.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            let v: serde_json::Value = serde_json::from_str(trimmed)
                .map_err(|e| CliError::Config(format!("results file: {e}")))?;
            let embedded = v
                .get("config")
                .and_then(|c| c.as_str())
                .ok_or_else(|| CliError::Config("results file has no `config` string".into()))?;
            return Self::parse_toml(embedded);
        }
        if let Some(embedded) = extract_embedded(text) {
            return Self::parse_toml(&embedded);
        }
        Self::parse_toml(text)
    }

    fn parse_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }
}

fn extract_embedded(text: &str) -> Option<String> {
    let mut lines = text.lines();
    lines.by_ref().find(|l| l.trim_end() == BEGIN_MARKER)?;
    let mut out = String::new();
    for line in lines {
        if line.trim_end() == END_MARKER {
            return Some(out);
        }
        let body = line.strip_prefix("# ").or_else(|| line.strip_prefix('#'))?;
        out.push_str(body);
        out.push('\n');
    }
    None
}

/// Parses an input clock specification:
/// `delta:T`, `box:CENTER:WIDTH`, `box-sigma:CENTER:INACCURACY`,
/// `gaussian:MEAN:SD` or `mixture:T@P;T@P;...`.
/// `eps` is the tail level used by `box-sigma`.
pub fn parse_input(spec: &str, eps: f64) -> Result<InputClock, CliError> {
    let bad = |reason: String| CliError::Config(format!("input `{spec}`: {reason}"));
    let num = |s: &str| -> Result<f64, CliError> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| bad(format!("`{s}` is not a number")))
    };
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| bad("missing `:`".into()))?;
    let args: Vec<&str> = rest.split(':').collect();
    let arity = |n: usize| -> Result<(), CliError> {
        if args.len() == n {
            Ok(())
        } else {
            Err(bad(format!("`{kind}` takes {n} value(s)")))
        }
    };
    let dist = match kind {
        "delta" => {
            arity(1)?;
            WaitingTimeDistribution::delta(num(args[0])?)
        }
        "box" => {
            arity(2)?;
            WaitingTimeDistribution::boxed(num(args[0])?, num(args[1])?)
        }
        "box-sigma" => {
            arity(2)?;
            WaitingTimeDistribution::box_with_inaccuracy(num(args[0])?, num(args[1])?, eps)
        }
        "gaussian" => {
            arity(2)?;
            WaitingTimeDistribution::gaussian(num(args[0])?, num(args[1])?)
        }
        "mixture" => {
            let atoms = rest
                .split(';')
                .map(|a| {
                    let (t, p) = a
                        .split_once('@')
                        .ok_or_else(|| bad(format!("atom `{a}` is not TIME@PROB")))?;
                    Ok((num(t)?, num(p)?))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            WaitingTimeDistribution::delta_mixture(atoms)
        }
        other => return Err(bad(format!("unknown law `{other}`"))),
    };
    dist.map(InputClock::new).map_err(|e| bad(e.to_string()))
}
