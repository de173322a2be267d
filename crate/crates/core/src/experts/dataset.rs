use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{
    npuzzle_ascending_expert, rubik_beginner_expert, rubik_random_expert, sokoban_search_expert,
};
use crate::env::{read_jsonl, write_jsonl, EnvKind, Trajectory, TrajectoryError, TrajectoryRecord};
use crate::npuzzle::{shuffle, NPuzzleEnv};
use crate::rubik::{self, RubikEnv};
use crate::seed::derive_seed;
use crate::sokoban::{generate, GeneratorConfig, SokobanEnv};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("dataset mixes environments {0} and {1}")]
    MixedEnv(EnvKind, EnvKind),
    #[error("expert failed on instance {index}: {reason}")]
    ExpertFailed { index: usize, reason: String },
    #[error("bad expert spec `{0}`")]
    BadSpec(String),
}

/// An expert and its instance distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum ExpertSpec {
    RubikRandom { scramble_depth: usize },
    RubikBeginner { scramble_depth: usize },
    NpuzzleAscending { side: usize, shuffle_depth: usize },
    SokobanAstar { side: usize, boxes: usize, node_cap: usize },
    Imported { env: EnvKind, path: PathBuf },
}

impl ExpertSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ExpertSpec::RubikRandom { .. } => "rubik-random",
            ExpertSpec::RubikBeginner { .. } => "rubik-beginner",
            ExpertSpec::NpuzzleAscending { .. } => "npuzzle-ascending",
            ExpertSpec::SokobanAstar { .. } => "sokoban-astar",
            ExpertSpec::Imported { .. } => "imported",
        }
    }

    pub fn env(&self) -> EnvKind {
        match self {
            ExpertSpec::RubikRandom { .. } | ExpertSpec::RubikBeginner { .. } => EnvKind::Rubik,
            ExpertSpec::NpuzzleAscending { .. } => EnvKind::Npuzzle,
            ExpertSpec::SokobanAstar { .. } => EnvKind::Sokoban,
            ExpertSpec::Imported { env, .. } => *env,
        }
    }
}

/// `rubik-random:20`, `rubik-beginner:20`, `npuzzle-ascending:5:200`,
/// `sokoban-astar:12:4:200000`, `imported:rubik:path.jsonl`.
impl FromStr for ExpertSpec {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DatasetError::BadSpec(s.to_string());
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize| -> Result<usize, DatasetError> {
            parts.get(i).ok_or_else(bad)?.parse().map_err(|_| bad())
        };
        Ok(match parts[0] {
            "rubik-random" => ExpertSpec::RubikRandom { scramble_depth: num(1)? },
            "rubik-beginner" => ExpertSpec::RubikBeginner { scramble_depth: num(1)? },
            "npuzzle-ascending" => ExpertSpec::NpuzzleAscending {
                side: num(1)?,
                shuffle_depth: num(2)?,
            },
            "sokoban-astar" => ExpertSpec::SokobanAstar {
                side: num(1)?,
                boxes: num(2)?,
                node_cap: num(3)?,
            },
            "imported" => ExpertSpec::Imported {
                env: parts.get(1).ok_or_else(bad)?.parse().map_err(|_| bad())?,
                path: PathBuf::from(parts[2..].join(":")),
            },
            _ => return Err(bad()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub expert: ExpertSpec,
    pub count: usize,
    pub seed: u64,
    pub file: PathBuf,
    /// Instances the expert could not solve (skipped, not counted).
    pub discarded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub env: EnvKind,
    pub seed: u64,
    pub total: usize,
    pub entries: Vec<ManifestEntry>,
}

/// `count` trajectories of one expert. Instance `i` uses its own derived
/// seed, so the output does not depend on the thread count. Sokoban
/// instances the expert cannot solve are skipped and replaced.
pub fn generate_records(
    spec: &ExpertSpec,
    count: usize,
    seed: u64,
) -> Result<(Vec<TrajectoryRecord>, usize), DatasetError> {
    match spec {
        ExpertSpec::RubikRandom { scramble_depth } => Ok((
            (0..count)
                .into_par_iter()
                .map(|i| {
                    let d = (*scramble_depth).max(1);
                    rubik_random_expert(derive_seed(seed, i as u64), d).to_record(&RubikEnv)
                })
                .collect(),
            0,
        )),
        ExpertSpec::RubikBeginner { scramble_depth } => {
            let recs = (0..count)
                .into_par_iter()
                .map(|i| {
                    let (c, _) = rubik::scramble(derive_seed(seed, i as u64), *scramble_depth);
                    rubik_beginner_expert(&c)
                        .map(|t| t.to_record(&RubikEnv))
                        .map_err(|e| DatasetError::ExpertFailed {
                            index: i,
                            reason: e.to_string(),
                        })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok((recs, 0))
        }
        ExpertSpec::NpuzzleAscending {
            side,
            shuffle_depth,
        } => {
            let env = NPuzzleEnv::new(*side);
            let recs = (0..count)
                .into_par_iter()
                .map(|i| {
                    let t = shuffle(derive_seed(seed, i as u64), *side, *shuffle_depth);
                    npuzzle_ascending_expert(&env, &t)
                        .map(|t| t.to_record(&env))
                        .ok_or(DatasetError::ExpertFailed {
                            index: i,
                            reason: "unsolvable shuffle".into(),
                        })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok((recs, 0))
        }
        ExpertSpec::SokobanAstar {
            side,
            boxes,
            node_cap,
        } => {
            let cfg = GeneratorConfig {
                side: *side,
                boxes: *boxes,
                ..GeneratorConfig::default()
            };
            let mut out = Vec::with_capacity(count);
            let mut discarded = 0;
            let mut next = 0u64;
            // Batches keep the result independent of scheduling.
            while out.len() < count {
                let need = count - out.len();
                let batch: Vec<Option<TrajectoryRecord>> = (next..next + need as u64)
                    .into_par_iter()
                    .map(|i| {
                        let (env, s) = generate(derive_seed(seed, i), &cfg);
                        sokoban_search_expert(&env, &s, *node_cap).map(|t| t.to_record(&env))
                    })
                    .collect();
                next += need as u64;
                for r in batch {
                    match r {
                        Some(r) => out.push(r),
                        None => {
                            discarded += 1;
                            log::info!("sokoban expert gave up on an instance; skipped");
                        }
                    }
                }
                if discarded > 4 * count + 16 {
                    return Err(DatasetError::ExpertFailed {
                        index: next as usize,
                        reason: "too many unsolved boards".into(),
                    });
                }
            }
            Ok((out, discarded))
        }
        ExpertSpec::Imported { env, path } => {
            let recs = read_dataset_file(path)?;
            for r in &recs {
                validate_record(*env, r)?;
            }
            let recs: Vec<_> = recs.into_iter().take(count).collect();
            Ok((recs, 0))
        }
    }
}

/// Replays a record in its environment.
pub(crate) fn validate_record(env: EnvKind, r: &TrajectoryRecord) -> Result<(), TrajectoryError> {
    match env {
        EnvKind::Rubik => Trajectory::from_record(&RubikEnv, r).map(|_| ()),
        EnvKind::Npuzzle => {
            let side = (r.states[0].split(',').count() as f64).sqrt().round() as usize;
            Trajectory::from_record(&NPuzzleEnv::new(side.max(2)), r).map(|_| ())
        }
        EnvKind::Sokoban => {
            let first = r.states.first().ok_or(TrajectoryError::Shape {
                states: 0,
                actions: r.actions.len(),
            })?;
            let (senv, _) = SokobanEnv::from_encoding(first)?;
            Trajectory::from_record(&senv, r).map(|_| ())
        }
    }
}

fn read_dataset_file(path: &Path) -> Result<Vec<TrajectoryRecord>, DatasetError> {
    Ok(read_jsonl(BufReader::new(File::open(path)?))?)
}

/// Generates every expert's share, writes `<expert>-<i>.jsonl` files and
/// `manifest.json` into `out_dir`.
pub fn assemble_dataset(
    experts: &[(ExpertSpec, usize)],
    seed: u64,
    out_dir: &Path,
) -> Result<DatasetManifest, DatasetError> {
    let env = experts.first().map(|(s, _)| s.env()).unwrap_or(EnvKind::Rubik);
    for (s, _) in experts {
        if s.env() != env {
            return Err(DatasetError::MixedEnv(env, s.env()));
        }
    }
    std::fs::create_dir_all(out_dir)?;
    let mut entries = Vec::new();
    for (j, (spec, count)) in experts.iter().enumerate() {
        let s = derive_seed(seed, j as u64);
        let (recs, discarded) = generate_records(spec, *count, s)?;
        let file = PathBuf::from(format!("{}-{j}.jsonl", spec.name()));
        let mut w = BufWriter::new(File::create(out_dir.join(&file))?);
        write_jsonl(&mut w, &recs)?;
        w.flush()?;
        entries.push(ManifestEntry {
            expert: spec.clone(),
            count: recs.len(),
            seed: s,
            file,
            discarded,
        });
    }
    let manifest = DatasetManifest {
        env,
        seed,
        total: entries.iter().map(|e| e.count).sum(),
        entries,
    };
    let f = File::create(out_dir.join("manifest.json"))?;
    serde_json::to_writer_pretty(f, &manifest)?;
    Ok(manifest)
}

pub fn load_manifest(path: &Path) -> Result<DatasetManifest, DatasetError> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}

/// All records listed by a manifest, in manifest order.
pub fn read_dataset(manifest_path: &Path) -> Result<(DatasetManifest, Vec<TrajectoryRecord>), DatasetError> {
    let m = load_manifest(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let mut all = Vec::new();
    for e in &m.entries {
        all.extend(read_dataset_file(&dir.join(&e.file))?);
    }
    Ok((m, all))
}

/// Hex SHA-256 of the manifest file bytes.
pub fn manifest_sha256(path: &Path) -> Result<String, DatasetError> {
    let bytes = std::fs::read(path)?;
    Ok(Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}
