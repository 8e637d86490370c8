//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # desk-scale batch
//! models = er, ws, ba
//! n = 12, 16, 20
//! ell = 2, 3
//! tsm = linear, exponential
//! reps = 5
//! algos = bu, td, cmp, cmps
//! mode = approx2
//! oracle = on
//! ```
//!
//! Unknown keys are rejected. Lists are comma separated.

use std::str::FromStr;

use mlst_core::netgen::{GraphModel, Tsm};
use mlst_core::SteinerMode;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{key}: {msg}")]
    Value { key: String, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algo {
    Bu,
    Td,
    Cmp,
    Cmps,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Bu => "bu",
            Algo::Td => "td",
            Algo::Cmp => "cmp",
            Algo::Cmps => "cmps",
        }
    }
}

impl FromStr for Algo {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bu" => Ok(Algo::Bu),
            "td" => Ok(Algo::Td),
            "cmp" => Ok(Algo::Cmp),
            "cmps" => Ok(Algo::Cmps),
            other => Err(format!("unknown algorithm {other:?} (bu, td, cmp, cmps)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub models: Vec<String>,
    pub n: Vec<usize>,
    pub ell: Vec<usize>,
    pub tsm: Vec<Tsm>,
    pub reps: usize,
    pub algos: Vec<Algo>,
    pub mode: SteinerMode,
    pub oracle: bool,
    /// Largest `|T_1| - 1` the exact oracle accepts.
    pub oracle_terminals: usize,
    pub seed: u64,
    /// 0 picks the rayon default.
    pub threads: usize,
    /// Wall-clock timings make the CSV non-reproducible, so they are off
    /// unless asked for.
    pub runtime: bool,
    pub er_epsilon: f64,
    pub ws_k: usize,
    pub ws_beta: f64,
    pub ba_m0: usize,
    pub ba_m: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            models: vec!["er".into(), "ws".into(), "ba".into()],
            n: vec![12, 16, 20],
            ell: vec![2, 3],
            tsm: vec![Tsm::Linear, Tsm::Exponential],
            reps: 5,
            algos: vec![Algo::Bu, Algo::Td, Algo::Cmp, Algo::Cmps],
            mode: SteinerMode::Approx2,
            oracle: true,
            oracle_terminals: mlst_core::steiner::EXACT_TERMINAL_LIMIT,
            seed: 1,
            threads: 0,
            runtime: false,
            er_epsilon: 1.0,
            ws_k: 6,
            ws_beta: 0.2,
            ba_m0: 6,
            ba_m: 3,
        }
    }
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: std::fmt::Display,
{
    let items: Result<Vec<T>, _> = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| format!("{s:?}: {e}")))
        .collect();
    match items {
        Ok(v) if v.is_empty() => Err(ConfigError::Value { key: key.into(), msg: "empty list".into() }),
        Ok(v) => Ok(v),
        Err(msg) => Err(ConfigError::Value { key: key.into(), msg }),
    }
}

fn one<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse::<T>()
        .map_err(|e| ConfigError::Value { key: key.into(), msg: format!("{value:?}: {e}") })
}

fn switch(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.trim() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        other => Err(ConfigError::Value { key: key.into(), msg: format!("expected on/off, got {other:?}") }),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line: idx + 1, msg: format!("expected key = value, got {line:?}") })?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one setting; also used for command-line overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "models" | "model" => {
                let models: Vec<String> = list(key, value)?;
                for m in &models {
                    m.parse::<GraphModel>().map_err(|e| ConfigError::Value { key: key.into(), msg: e.to_string() })?;
                }
                self.models = models;
            }
            "n" => self.n = list(key, value)?,
            "ell" => self.ell = list(key, value)?,
            "tsm" => self.tsm = list(key, value)?,
            "reps" => self.reps = one(key, value)?,
            "algos" => self.algos = list(key, value)?,
            "mode" => self.mode = one(key, value)?,
            "oracle" => self.oracle = switch(key, value)?,
            "oracle.max_terminals" => self.oracle_terminals = one(key, value)?,
            "seed" => self.seed = one(key, value)?,
            "threads" => self.threads = one(key, value)?,
            "runtime" => self.runtime = switch(key, value)?,
            "er.epsilon" => self.er_epsilon = one(key, value)?,
            "ws.k" => self.ws_k = one(key, value)?,
            "ws.beta" => self.ws_beta = one(key, value)?,
            "ba.m0" => self.ba_m0 = one(key, value)?,
            "ba.m" => self.ba_m = one(key, value)?,
            other => return Err(ConfigError::Value { key: other.into(), msg: "unknown key".into() }),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, msg: &str| Err(ConfigError::Value { key: key.into(), msg: msg.into() });
        if self.reps == 0 {
            return bad("reps", "must be positive");
        }
        if self.n.iter().any(|&n| n < 2) {
            return bad("n", "every n must be at least 2");
        }
        if self.ell.contains(&0) {
            return bad("ell", "levels start at 1");
        }
        Ok(())
    }

    pub fn model(&self, name: &str) -> GraphModel {
        match name {
            "er" => GraphModel::Er { epsilon: self.er_epsilon },
            "ws" => GraphModel::Ws { k: self.ws_k, beta: self.ws_beta },
            _ => GraphModel::Ba { m0: self.ba_m0, m: self.ba_m },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lists_and_overrides() {
        let cfg = ExperimentConfig::parse(
            "# comment\nmodels = er\nn = 20\nell=2\ntsm = linear\nreps = 2\nalgos = bu, td, cmp, cmps\nmode = exact\noracle = on\n",
        )
        .unwrap();
        assert_eq!(cfg.models, vec!["er".to_string()]);
        assert_eq!(cfg.n, vec![20]);
        assert_eq!(cfg.tsm, vec![Tsm::Linear]);
        assert_eq!(cfg.mode, SteinerMode::Exact);
        assert_eq!(cfg.algos.len(), 4);
        assert!(!cfg.runtime);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(ExperimentConfig::parse("n 20"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(ExperimentConfig::parse("colour = red").is_err());
        assert!(ExperimentConfig::parse("models = geometric").is_err());
        assert!(ExperimentConfig::parse("algos = bu, mst").is_err());
        assert!(ExperimentConfig::parse("reps = 0").is_err());
        assert!(ExperimentConfig::parse("oracle = maybe").is_err());
    }

    #[test]
    fn model_parameters() {
        let mut cfg = ExperimentConfig::default();
        cfg.set("ba.m0", "10").unwrap();
        cfg.set("ba.m", "5").unwrap();
        assert_eq!(cfg.model("ba"), GraphModel::Ba { m0: 10, m: 5 });
        assert_eq!(cfg.model("ws"), GraphModel::Ws { k: 6, beta: 0.2 });
    }
}
