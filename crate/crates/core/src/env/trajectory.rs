use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ActionId, EnvKind, Environment, ParseError};

/// Expert solution: `states.len() == actions.len() + 1`, consecutive states
/// related by `step`, last state solved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory<S> {
    pub states: Vec<S>,
    pub actions: Vec<ActionId>,
    pub expert: String,
}

#[derive(Debug, Error)]
pub enum TrajectoryError {
    #[error("trajectory has {states} states for {actions} actions")]
    Shape { states: usize, actions: usize },
    #[error("step {index} does not reproduce the recorded successor")]
    Transition { index: usize },
    #[error("final state is not solved")]
    Unsolved,
    #[error("record is for environment `{found}`, expected `{expected}`")]
    WrongEnv { expected: String, found: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl<S: Clone + Eq> Trajectory<S> {
    /// Builds a trajectory by replaying `actions` from `start`.
    pub fn from_actions<E>(
        env: &E,
        start: S,
        actions: Vec<ActionId>,
        expert: impl Into<String>,
    ) -> Result<Self, TrajectoryError>
    where
        E: Environment<State = S> + ?Sized,
    {
        let mut states = Vec::with_capacity(actions.len() + 1);
        states.push(start);
        for (i, &a) in actions.iter().enumerate() {
            let next = env
                .step(states.last().expect("non-empty"), a)
                .map_err(|_| TrajectoryError::Transition { index: i })?;
            states.push(next);
        }
        let t = Trajectory {
            states,
            actions,
            expert: expert.into(),
        };
        t.validate(env)?;
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn validate<E>(&self, env: &E) -> Result<(), TrajectoryError>
    where
        E: Environment<State = S> + ?Sized,
    {
        if self.states.len() != self.actions.len() + 1 {
            return Err(TrajectoryError::Shape {
                states: self.states.len(),
                actions: self.actions.len(),
            });
        }
        for (i, &a) in self.actions.iter().enumerate() {
            match env.step(&self.states[i], a) {
                Ok(next) if next == self.states[i + 1] => {}
                _ => return Err(TrajectoryError::Transition { index: i }),
            }
        }
        if !env.is_solved(self.states.last().expect("non-empty")) {
            return Err(TrajectoryError::Unsolved);
        }
        Ok(())
    }

    pub fn to_record<E>(&self, env: &E) -> TrajectoryRecord
    where
        E: Environment<State = S> + ?Sized,
    {
        TrajectoryRecord {
            env: env.kind(),
            expert: self.expert.clone(),
            states: self.states.iter().map(|s| env.encode(s)).collect(),
            actions: self.actions.iter().map(|a| a.0).collect(),
        }
    }

    pub fn from_record<E>(env: &E, rec: &TrajectoryRecord) -> Result<Self, TrajectoryError>
    where
        E: Environment<State = S> + ?Sized,
    {
        if rec.env != env.kind() {
            return Err(TrajectoryError::WrongEnv {
                expected: env.kind().as_str().to_string(),
                found: rec.env.to_string(),
            });
        }
        let states = rec
            .states
            .iter()
            .map(|s| env.decode(s))
            .collect::<Result<Vec<_>, _>>()?;
        let t = Trajectory {
            states,
            actions: rec.actions.iter().map(|&a| ActionId(a)).collect(),
            expert: rec.expert.clone(),
        };
        t.validate(env)?;
        Ok(t)
    }
}

/// One line of a trajectory JSONL file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub env: EnvKind,
    pub expert: String,
    pub states: Vec<String>,
    pub actions: Vec<u32>,
}

pub fn write_jsonl<W: Write>(mut out: W, records: &[TrajectoryRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<TrajectoryRecord>, TrajectoryError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| TrajectoryError::Json {
            line: i + 1,
            source: e,
        })?;
        out.push(rec);
    }
    Ok(out)
}
