use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::EnvKind;
use crate::guidance::ChildSelect;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    BestFs,
    AStar,
    Mcts,
    KSubS,
    AdaSubS,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::BestFs => "bestfs",
            Algorithm::AStar => "astar",
            Algorithm::Mcts => "mcts",
            Algorithm::KSubS => "ksubs",
            Algorithm::AdaSubS => "adasubs",
        }
    }

    pub fn is_subgoal(self) -> bool {
        matches!(self, Algorithm::KSubS | Algorithm::AdaSubS)
    }
}

impl FromStr for Algorithm {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Ok(match s {
            "bestfs" => Algorithm::BestFs,
            "astar" => Algorithm::AStar,
            "mcts" => Algorithm::Mcts,
            "ksubs" => Algorithm::KSubS,
            "adasubs" => Algorithm::AdaSubS,
            _ => return Err(()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueSource {
    Oracle,
    Fitted,
    Heuristic,
}

impl ValueSource {
    pub fn as_str(self) -> &'static str {
        match self {
            ValueSource::Oracle => "oracle",
            ValueSource::Fitted => "fitted",
            ValueSource::Heuristic => "heuristic",
        }
    }
}

impl FromStr for ValueSource {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Ok(match s {
            "oracle" => ValueSource::Oracle,
            "fitted" => ValueSource::Fitted,
            "heuristic" => ValueSource::Heuristic,
            _ => return Err(()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicySource {
    Softmax,
    Uniform,
    Dataset,
}

/// Everything one evaluation run needs. Parsed from flat `key = value`
/// text; `#` starts a comment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub env: EnvKind,
    /// Rubik scramble length in quarter turns.
    pub scramble_depth: usize,
    /// N-puzzle random slides from the goal.
    pub shuffle_depth: usize,
    /// Board side (N-puzzle and Sokoban).
    pub side: usize,
    pub boxes: usize,
    pub inflation: usize,

    pub algorithm: Algorithm,
    pub child_mode: ChildSelect,
    pub lambda: f64,
    pub mcts_simulations: usize,
    pub mcts_c_puct: f64,
    pub mcts_temperature: f64,
    pub mcts_gamma: f64,
    pub mcts_max_steps: usize,
    /// Generator distances, largest first.
    pub ks: Vec<usize>,
    pub generator_experts: Vec<String>,
    pub proposals_per_generator: usize,
    pub cllp_multiplier: usize,

    pub value: ValueSource,
    /// Radius of the Rubik distance table used by oracle guidance.
    pub oracle_radius: u8,
    pub dataset: Option<PathBuf>,
    pub bundle: Option<PathBuf>,
    pub noise_sigma: f64,
    pub policy: PolicySource,
    /// Value the softmax policy ranks successors by; `None` means `value`.
    pub policy_value: Option<ValueSource>,
    pub policy_temperature: f64,
    pub sokoban_expert_cap: usize,

    pub n_instances: usize,
    pub budget_cap: usize,
    pub budget_grid: Vec<usize>,
    pub seed: u64,
    /// Worker threads; 0 uses all cores.
    pub workers: usize,
    /// Exact dead-end share of expanded Sokoban states.
    pub dead_end: bool,
    pub dead_end_states: usize,
    /// Record wall-clock time (makes reruns differ in `wall_ms`).
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            env: EnvKind::Rubik,
            scramble_depth: 20,
            shuffle_depth: crate::npuzzle::DEFAULT_SHUFFLE,
            side: 0,
            boxes: 4,
            inflation: 1,
            algorithm: Algorithm::BestFs,
            child_mode: ChildSelect::Confidence(0.7),
            lambda: 1.0,
            mcts_simulations: 50,
            mcts_c_puct: 1.0,
            mcts_temperature: 0.0,
            mcts_gamma: 1.0,
            mcts_max_steps: 100,
            ks: vec![4],
            generator_experts: Vec::new(),
            proposals_per_generator: 1,
            cllp_multiplier: crate::guidance::DEFAULT_CLLP_MULTIPLIER,
            value: ValueSource::Heuristic,
            oracle_radius: 6,
            dataset: None,
            bundle: None,
            noise_sigma: 0.0,
            policy: PolicySource::Softmax,
            policy_value: None,
            policy_temperature: 1.0,
            sokoban_expert_cap: crate::experts::SOKOBAN_NODE_CAP,
            n_instances: 100,
            budget_cap: 5000,
            budget_grid: Vec::new(),
            seed: 0,
            workers: 0,
            dead_end: true,
            dead_end_states: 200_000,
            timing: false,
        }
    }
}

fn list<T: FromStr>(v: &str) -> Option<Vec<T>> {
    v.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse().ok())
        .collect()
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut kv = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        Self::from_pairs(kv.iter().map(|(k, v)| (k.as_str(), v.as_str())))
    }

    /// Defaults overridden by `pairs`, then validated.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self, ConfigError> {
        let mut c = ExperimentConfig::default();
        for (k, v) in pairs {
            c.set(k, v)?;
        }
        c.resolve()?;
        Ok(c)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        let bad = || ConfigError::BadValue {
            key: key.to_string(),
            value: v.to_string(),
        };
        macro_rules! num {
            () => {
                v.parse().map_err(|_| bad())?
            };
        }
        match key {
            "env" => self.env = v.parse().map_err(|_| bad())?,
            "scramble_depth" => self.scramble_depth = num!(),
            "shuffle_depth" => self.shuffle_depth = num!(),
            "side" => self.side = num!(),
            "boxes" => self.boxes = num!(),
            "inflation" => self.inflation = num!(),
            "algorithm" => self.algorithm = v.parse().map_err(|_| bad())?,
            "child_mode" => self.child_mode = v.parse().map_err(|_| bad())?,
            "lambda" => self.lambda = num!(),
            "mcts_simulations" => self.mcts_simulations = num!(),
            "mcts_c_puct" => self.mcts_c_puct = num!(),
            "mcts_temperature" => self.mcts_temperature = num!(),
            "mcts_gamma" => self.mcts_gamma = num!(),
            "mcts_max_steps" => self.mcts_max_steps = num!(),
            "ks" => self.ks = list(v).ok_or_else(bad)?,
            "generator_experts" => {
                self.generator_experts = v
                    .split(',')
                    .map(|x| x.trim().to_string())
                    .filter(|x| !x.is_empty())
                    .collect()
            }
            "proposals_per_generator" => self.proposals_per_generator = num!(),
            "cllp_multiplier" => self.cllp_multiplier = num!(),
            "value" => self.value = v.parse().map_err(|_| bad())?,
            "policy_value" => {
                self.policy_value = if v.is_empty() { None } else { Some(v.parse().map_err(|_| bad())?) }
            }
            "oracle_radius" => self.oracle_radius = num!(),
            "dataset" => self.dataset = (!v.is_empty()).then(|| PathBuf::from(v)),
            "bundle" => self.bundle = (!v.is_empty()).then(|| PathBuf::from(v)),
            "noise_sigma" => self.noise_sigma = num!(),
            "policy" => {
                self.policy = match v {
                    "softmax" => PolicySource::Softmax,
                    "uniform" => PolicySource::Uniform,
                    "dataset" => PolicySource::Dataset,
                    _ => return Err(bad()),
                }
            }
            "policy_temperature" => self.policy_temperature = num!(),
            "sokoban_expert_cap" => self.sokoban_expert_cap = num!(),
            "n_instances" => self.n_instances = num!(),
            "budget_cap" => self.budget_cap = num!(),
            "budget_grid" => self.budget_grid = list(v).ok_or_else(bad)?,
            "seed" => self.seed = num!(),
            "workers" => self.workers = num!(),
            "dead_end" => self.dead_end = num!(),
            "dead_end_states" => self.dead_end_states = num!(),
            "timing" => self.timing = num!(),
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Fills environment-dependent defaults and checks invariants.
    pub fn resolve(&mut self) -> Result<(), ConfigError> {
        let invalid = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.side == 0 {
            self.side = match self.env {
                EnvKind::Npuzzle => crate::npuzzle::DEFAULT_SIDE,
                EnvKind::Sokoban => crate::sokoban::GeneratorConfig::default().side,
                EnvKind::Rubik => 3,
            };
        }
        if self.generator_experts.is_empty() {
            self.generator_experts = vec![match self.env {
                EnvKind::Rubik => "beginner",
                EnvKind::Npuzzle => "ascending",
                EnvKind::Sokoban => "astar",
            }
            .to_string()];
        }
        for x in &self.generator_experts {
            let known: &[&str] = match self.env {
                EnvKind::Rubik => &["beginner", "oracle", "policy", "reversal"],
                EnvKind::Npuzzle => &["ascending", "policy"],
                EnvKind::Sokoban => &["astar", "policy"],
            };
            if !known.contains(&x.as_str()) {
                return invalid(&format!("expert `{x}` is not available for {}", self.env));
            }
        }
        if self.budget_grid.is_empty() {
            self.budget_grid = default_grid(self.budget_cap);
        }
        if self.n_instances == 0 {
            return invalid("n_instances must be at least 1");
        }
        if self.budget_cap == 0 {
            return invalid("budget_cap must be at least 1");
        }
        if self.budget_grid.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("budget_grid must be strictly ascending");
        }
        if self.inflation == 0 {
            return invalid("inflation must be at least 1");
        }
        if self.ks.is_empty() || self.ks.contains(&0) {
            return invalid("ks must list positive distances");
        }
        if self.algorithm == Algorithm::KSubS && self.ks.len() != 1 {
            return invalid("ksubs takes exactly one k");
        }
        if self.lambda < 0.0 {
            return invalid("lambda must be non-negative");
        }
        if !(self.mcts_gamma > 0.0 && self.mcts_gamma <= 1.0) {
            return invalid("mcts_gamma must lie in (0, 1]");
        }
        if self.mcts_simulations == 0 {
            return invalid("mcts_simulations must be at least 1");
        }
        if self.noise_sigma < 0.0 || !self.noise_sigma.is_finite() {
            return invalid("noise_sigma must be finite and non-negative");
        }
        if self.policy_temperature <= 0.0 {
            return invalid("policy_temperature must be positive");
        }
        if self.proposals_per_generator == 0 {
            return invalid("proposals_per_generator must be at least 1");
        }
        let needs_data = self.uses(ValueSource::Fitted) || self.policy == PolicySource::Dataset;
        if needs_data && self.dataset.is_none() && self.bundle.is_none() {
            return invalid("fitted value or dataset policy needs `bundle` or `dataset`");
        }
        for p in self.dataset.iter().chain(&self.bundle) {
            if !p.exists() {
                return invalid(&format!("{} does not exist", p.display()));
            }
        }
        Ok(())
    }

    /// Resolved configuration in the same format `parse` reads.
    pub fn to_text(&self) -> String {
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("env", self.env.to_string());
        put("scramble_depth", self.scramble_depth.to_string());
        put("shuffle_depth", self.shuffle_depth.to_string());
        put("side", self.side.to_string());
        put("boxes", self.boxes.to_string());
        put("inflation", self.inflation.to_string());
        put("algorithm", self.algorithm.as_str().into());
        put("child_mode", self.child_mode.to_string());
        put("lambda", self.lambda.to_string());
        put("mcts_simulations", self.mcts_simulations.to_string());
        put("mcts_c_puct", self.mcts_c_puct.to_string());
        put("mcts_temperature", self.mcts_temperature.to_string());
        put("mcts_gamma", self.mcts_gamma.to_string());
        put("mcts_max_steps", self.mcts_max_steps.to_string());
        put("ks", join(&self.ks));
        put("generator_experts", self.generator_experts.join(","));
        put("proposals_per_generator", self.proposals_per_generator.to_string());
        put("cllp_multiplier", self.cllp_multiplier.to_string());
        put("value", self.value.as_str().into());
        put("oracle_radius", self.oracle_radius.to_string());
        put("dataset", path(&self.dataset));
        put("bundle", path(&self.bundle));
        put("noise_sigma", self.noise_sigma.to_string());
        put(
            "policy",
            match self.policy {
                PolicySource::Softmax => "softmax",
                PolicySource::Uniform => "uniform",
                PolicySource::Dataset => "dataset",
            }
            .into(),
        );
        put("policy_value", self.policy_value.map(ValueSource::as_str).unwrap_or_default().into());
        put("policy_temperature", self.policy_temperature.to_string());
        put("sokoban_expert_cap", self.sokoban_expert_cap.to_string());
        put("n_instances", self.n_instances.to_string());
        put("budget_cap", self.budget_cap.to_string());
        put("budget_grid", join(&self.budget_grid));
        put("seed", self.seed.to_string());
        put("workers", self.workers.to_string());
        put("dead_end", self.dead_end.to_string());
        put("dead_end_states", self.dead_end_states.to_string());
        put("timing", self.timing.to_string());
        s
    }

    /// Whether the search value or the softmax policy reads `source`.
    pub fn uses(&self, source: ValueSource) -> bool {
        self.value == source || (self.policy != PolicySource::Uniform && self.policy_value == Some(source))
    }

    /// Short run label, e.g. `adasubs-4+3+2`.
    pub fn label(&self) -> String {
        match self.algorithm {
            Algorithm::KSubS | Algorithm::AdaSubS => format!(
                "{}-{}",
                self.algorithm.as_str(),
                self.ks.iter().map(|k| k.to_string()).collect::<Vec<_>>().join("+")
            ),
            a => a.as_str().to_string(),
        }
    }
}

/// Roughly geometric budgets from 1 to `cap` (inclusive).
pub fn default_grid(cap: usize) -> Vec<usize> {
    let mut g: Vec<usize> = (0..=24)
        .map(|i| ((cap as f64).powf(i as f64 / 24.0)).round() as usize)
        .map(|b| b.clamp(1, cap))
        .collect();
    g.dedup();
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_round_trip() {
        let c = ExperimentConfig::parse(
            "env = npuzzle  # five by five\nalgorithm = adasubs\nks = 4,3,2\nbudget_cap = 1000\n",
        )
        .unwrap();
        assert_eq!(c.side, 5);
        assert_eq!(c.ks, vec![4, 3, 2]);
        assert_eq!(c.label(), "adasubs-4+3+2");
        assert_eq!(*c.budget_grid.last().unwrap(), 1000);
        assert_eq!(ExperimentConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(ExperimentConfig::parse("nope = 1"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(ExperimentConfig::parse("garbage"), Err(ConfigError::Syntax { line: 1 })));
        assert!(ExperimentConfig::parse("budget_grid = 5,3").is_err());
        assert!(ExperimentConfig::parse("n_instances = 0").is_err());
        assert!(ExperimentConfig::parse("value = fitted").is_err());
        assert!(ExperimentConfig::parse("bundle = /no/such/file").is_err());
        assert!(ExperimentConfig::parse("env = sokoban\ngenerator_experts = beginner").is_err());
    }

    #[test]
    fn default_grid_is_ascending_and_ends_at_cap() {
        for cap in [1, 2, 10, 5000] {
            let g = default_grid(cap);
            assert!(g.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(*g.last().unwrap(), cap);
        }
    }
}
