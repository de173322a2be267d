use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::rc::Rc;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use super::config::{Algorithm, ConfigError, ExperimentConfig, PolicySource, ValueSource};
use super::report::{write_csv, BudgetMeasure, CsvSummary, CurvesFile, InstanceRecord, success_curve};
use crate::env::{ActionId, EnvKind, Environment, Inflated};
use crate::experts::{
    read_dataset, AscendingExpert, BeginnerExpert, DatasetError, Expert, Memo, OnBase,
    OracleDescent, ScrambleReversal, SokobanAStarExpert,
};
use crate::guidance::{
    BundleError, DatasetPolicy, DistanceOracle, ExpertRollout, Featurize, FitError, FittedValue,
    GuidanceBundle, HeuristicValue, Noisy, OracleValue, Policy, PolicyCounts, PolicyRollout,
    SoftmaxPolicy, SubgoalGenerator, UniformPolicy, ValueFn,
};
use crate::npuzzle::{self, NPuzzleEnv, NPuzzleTable};
use crate::rubik::{self, DistanceTable, RubikEnv, TableTooLarge};
use crate::search::{
    astar_search, best_first_search, mcts_solve, AStarConfig, BestFsConfig, MctsConfig,
    SearchResult,
};
use crate::seed::derive_seed;
use crate::sokoban::{self, dead_end_fraction, DeadEndOracle, GeneratorConfig, SokobanEnv};
use crate::subgoal::{adasubs_solve, SubgoalConfig};

/// Stream index for value noise within an instance seed.
const NOISE_STREAM: u64 = 0x6e6f_6973;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Table(#[from] TableTooLarge),
    #[error(transparent)]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("{0}")]
    Unavailable(String),
}

/// Read-only guidance shared by all instances of a run.
#[derive(Default)]
pub struct Prepared {
    pub fitted: Option<Arc<FittedValue>>,
    pub counts: Option<Arc<PolicyCounts>>,
    pub rubik_table: Option<Arc<DistanceTable>>,
    pub npuzzle_table: Option<Arc<NPuzzleTable>>,
}

/// Loads datasets, bundles and distance tables the config refers to.
pub fn prepare(cfg: &ExperimentConfig) -> Result<Prepared, HarnessError> {
    let mut p = Prepared::default();
    let needs_data = cfg.uses(ValueSource::Fitted) || cfg.policy == PolicySource::Dataset;
    if needs_data {
        let (value, counts) = if let Some(b) = &cfg.bundle {
            let b = GuidanceBundle::load(b)?;
            (b.value, b.policy)
        } else {
            let path = cfg.dataset.as_ref().expect("validated config");
            let (_, recs) = read_dataset(path)?;
            (FittedValue::fit(&recs)?, PolicyCounts::fit(&recs))
        };
        if value.env() != cfg.env {
            return Err(HarnessError::Unavailable(format!(
                "guidance was fitted on {} but the run is on {}",
                value.env(),
                cfg.env
            )));
        }
        p.fitted = Some(Arc::new(value));
        p.counts = Some(Arc::new(counts));
    }
    let wants_oracle = cfg.uses(ValueSource::Oracle)
        || cfg.generator_experts.iter().any(|x| x == "oracle");
    if wants_oracle {
        match cfg.env {
            EnvKind::Rubik => p.rubik_table = Some(Arc::new(DistanceTable::build(cfg.oracle_radius)?)),
            EnvKind::Npuzzle => {
                let t = NPuzzleTable::build(cfg.side)
                    .map_err(|e| HarnessError::Unavailable(e.to_string()))?;
                p.npuzzle_table = Some(Arc::new(t));
            }
            EnvKind::Sokoban => {
                return Err(HarnessError::Unavailable(
                    "no exact distance oracle for sokoban".into(),
                ))
            }
        }
    }
    Ok(p)
}

type Experts<E> = Vec<(String, Rc<dyn Expert<E>>)>;

struct Instance<B: Environment> {
    base: B,
    root: B::State,
    /// Experts by name, except the policy rollout.
    experts: Experts<Inflated<B>>,
    oracle: Option<Rc<dyn DistanceOracle<Inflated<B>>>>,
}

fn on_base<B: Environment + 'static, X: Expert<B> + 'static>(x: X) -> Rc<dyn Expert<Inflated<B>>> {
    Rc::new(OnBase(x))
}

/// Runs the configured search on one instance.
fn solve_on<B>(cfg: &ExperimentConfig, prep: &Prepared, inst: Instance<B>, seed: u64) -> SearchResult
where
    B: Featurize + Clone + 'static,
{
    let env = Inflated::new(inst.base.clone(), cfg.inflation);
    let source = |v: ValueSource| -> Rc<dyn ValueFn<Inflated<B>>> {
        match v {
            ValueSource::Oracle => Rc::new(OracleValue::new(inst.oracle.clone().expect("oracle prepared"))),
            ValueSource::Fitted => Rc::new(prep.fitted.clone().expect("fitted prepared")),
            ValueSource::Heuristic => Rc::new(HeuristicValue),
        }
    };
    let clean = source(cfg.value);
    let ranked = match cfg.policy_value {
        Some(v) if v != cfg.value => source(v),
        _ => clean.clone(),
    };
    let softmax = SoftmaxPolicy::new(ranked, cfg.policy_temperature);
    let policy: Rc<dyn Policy<Inflated<B>>> = match cfg.policy {
        PolicySource::Softmax => Rc::new(softmax),
        PolicySource::Uniform => Rc::new(UniformPolicy),
        PolicySource::Dataset => Rc::new(DatasetPolicy::new(
            prep.counts.clone().expect("counts prepared"),
            softmax,
        )),
    };
    let value = Noisy::new(clean, cfg.noise_sigma, derive_seed(seed, NOISE_STREAM));
    let trace = cfg.dead_end && env.kind() == EnvKind::Sokoban;
    let root = &inst.root;
    match cfg.algorithm {
        Algorithm::BestFs => best_first_search::<f64, _, _, _>(
            &env,
            root,
            &value,
            &policy,
            &BestFsConfig {
                child_mode: cfg.child_mode,
                budget_cap: cfg.budget_cap,
                trace,
            },
        ),
        Algorithm::AStar => astar_search::<f64, _, _, _>(
            &env,
            root,
            &value,
            &policy,
            &AStarConfig {
                lambda: cfg.lambda,
                child_mode: cfg.child_mode,
                budget_cap: cfg.budget_cap,
                trace,
            },
        ),
        Algorithm::Mcts => mcts_solve::<f64, _, _, _>(
            &env,
            root,
            &value,
            &policy,
            &MctsConfig {
                n_simulations: cfg.mcts_simulations,
                c_puct: cfg.mcts_c_puct,
                temperature: cfg.mcts_temperature,
                gamma: cfg.mcts_gamma,
                max_episode_steps: cfg.mcts_max_steps,
                budget_cap: cfg.budget_cap,
                seed,
            },
        ),
        Algorithm::KSubS | Algorithm::AdaSubS => {
            let rollout: Rc<dyn Expert<Inflated<B>>> = Rc::new(PolicyRollout::new(policy.clone()));
            let chosen: Vec<Rc<dyn Expert<Inflated<B>>>> = cfg
                .generator_experts
                .iter()
                .filter_map(|name| {
                    if name == "policy" {
                        return Some(rollout.clone());
                    }
                    inst.experts.iter().find(|(n, _)| n == name).map(|(_, x)| x.clone())
                })
                .collect();
            let gens: Vec<ExpertRollout<Inflated<B>>> = cfg
                .ks
                .iter()
                .map(|&k| {
                    let xs = chosen
                        .iter()
                        .map(|x| Box::new(x.clone()) as Box<dyn Expert<Inflated<B>>>)
                        .collect();
                    ExpertRollout::new(xs, k)
                })
                .collect();
            let refs: Vec<&dyn SubgoalGenerator<Inflated<B>>> =
                gens.iter().map(|g| g as &dyn SubgoalGenerator<Inflated<B>>).collect();
            adasubs_solve::<f64, _, _>(
                &env,
                root,
                &refs,
                &value,
                &SubgoalConfig {
                    budget_cap: cfg.budget_cap,
                    proposals_per_generator: cfg.proposals_per_generator,
                    cllp_multiplier: cfg.cllp_multiplier,
                    trace,
                },
            )
        }
    }
}

/// Start state of instance `index` as an encoding, plus its seed.
pub fn instance_seed(cfg: &ExperimentConfig, index: usize) -> u64 {
    derive_seed(cfg.seed, index as u64)
}

fn sokoban_level(cfg: &ExperimentConfig, seed: u64) -> (SokobanEnv, sokoban::SokobanState) {
    sokoban::generate(
        seed,
        &GeneratorConfig {
            side: cfg.side,
            boxes: cfg.boxes,
            ..GeneratorConfig::default()
        },
    )
}

/// Runs instance `index` and returns its record and the full search result.
pub fn run_instance(cfg: &ExperimentConfig, prep: &Prepared, index: usize) -> (InstanceRecord, SearchResult) {
    let seed = instance_seed(cfg, index);
    let t0 = Instant::now();
    let (root, mut result, dead) = match cfg.env {
        EnvKind::Rubik => {
            let (cube, moves) = rubik::scramble(seed, cfg.scramble_depth);
            let mut experts: Experts<Inflated<RubikEnv>> = vec![
                ("beginner".into(), on_base(Memo::<RubikEnv, _>::new(BeginnerExpert))),
                ("reversal".into(), on_base(ScrambleReversal::new(&moves))),
            ];
            let oracle = prep.rubik_table.clone().map(|t| {
                experts.push(("oracle".into(), on_base(OracleDescent::new(t.clone()))));
                Rc::new(t) as Rc<dyn DistanceOracle<Inflated<RubikEnv>>>
            });
            let root = RubikEnv.encode(&cube);
            let inst = Instance { base: RubikEnv, root: cube, experts, oracle };
            (root, solve_on(cfg, prep, inst, seed), None)
        }
        EnvKind::Npuzzle => {
            let env = NPuzzleEnv::new(cfg.side);
            let tiles = npuzzle::shuffle(seed, cfg.side, cfg.shuffle_depth);
            let experts: Experts<Inflated<NPuzzleEnv>> =
                vec![("ascending".into(), on_base(Memo::<NPuzzleEnv, _>::new(AscendingExpert)))];
            let oracle = prep
                .npuzzle_table
                .clone()
                .map(|t| Rc::new(t) as Rc<dyn DistanceOracle<Inflated<NPuzzleEnv>>>);
            let root = env.encode(&tiles);
            let inst = Instance { base: env, root: tiles, experts, oracle };
            (root, solve_on(cfg, prep, inst, seed), None)
        }
        EnvKind::Sokoban => {
            let (env, s) = sokoban_level(cfg, seed);
            let x = SokobanAStarExpert {
                node_cap: cfg.sokoban_expert_cap,
            };
            let experts: Experts<Inflated<SokobanEnv>> =
                vec![("astar".into(), on_base(Memo::<SokobanEnv, _>::new(x)))];
            let root = env.encode(&s);
            let inst = Instance {
                base: env.clone(),
                root: s,
                experts,
                oracle: None,
            };
            let mut r = solve_on(cfg, prep, inst, seed);
            let dead = cfg.dead_end.then(|| {
                let states: Vec<_> = r.expanded.iter().filter_map(|e| env.decode(e).ok()).collect();
                let mut oracle = DeadEndOracle::new(env.clone(), cfg.dead_end_states);
                dead_end_fraction(&mut oracle, &states)
            });
            r.expanded.clear();
            (root, r, dead)
        }
    };
    let wall = t0.elapsed();
    result.expanded.clear();
    let rec = InstanceRecord {
        instance_id: index,
        seed,
        algorithm: cfg.label(),
        env: cfg.env,
        status: result.status,
        nodes_total: result.nodes_total,
        nodes_high_level: result.nodes_high_level,
        solution_len: result.solution.len(),
        subgoals_on_path: result.tree.subgoals_on_path,
        wall_ms: cfg.timing.then_some(wall.as_millis() as u64),
        dead_end_fraction: dead,
        tree: result.tree,
        root,
    };
    (rec, result)
}

/// Every instance of the run, sorted by index. Independent of `workers`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<InstanceRecord>, HarnessError> {
    let prep = prepare(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build()?;
    let records = pool.install(|| {
        (0..cfg.n_instances)
            .into_par_iter()
            .map(|i| run_instance(cfg, &prep, i).0)
            .collect::<Vec<_>>()
    });
    Ok(records)
}

/// Writes `results.csv`, `results.jsonl`, `curves.json` and the resolved
/// `config.txt` into `dir`.
pub fn write_results(
    dir: &Path,
    cfg: &ExperimentConfig,
    records: &[InstanceRecord],
) -> Result<(), HarnessError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.txt"), cfg.to_text())?;
    write_csv(BufWriter::new(fs::File::create(dir.join("results.csv"))?), records)?;
    let mut jl = BufWriter::new(fs::File::create(dir.join("results.jsonl"))?);
    for r in records {
        serde_json::to_writer(&mut jl, r)?;
        jl.write_all(b"\n")?;
    }
    jl.flush()?;
    let rows: Vec<CsvSummary> = records.iter().map(CsvSummary::from).collect();
    let curves = CurvesFile {
        curves: vec![success_curve(&cfg.label(), &rows, &cfg.budget_grid, BudgetMeasure::Total)],
    };
    fs::write(dir.join("curves.json"), serde_json::to_string_pretty(&curves)?)?;
    Ok(())
}

/// Reads records written by [`write_results`].
pub fn read_records(path: &Path) -> Result<Vec<InstanceRecord>, HarnessError> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(HarnessError::from))
        .collect()
}

/// Replays a solution from an encoded start state.
pub fn replay_solved(env: EnvKind, root: &str, solution: &[ActionId]) -> bool {
    match env {
        EnvKind::Rubik => RubikEnv
            .decode(root)
            .ok()
            .and_then(|s| RubikEnv.replay(&s, solution))
            .is_some_and(|s| s.is_solved()),
        EnvKind::Npuzzle => {
            let side = (root.split(',').count() as f64).sqrt().round() as usize;
            let e = NPuzzleEnv::new(side.max(2));
            e.decode(root)
                .ok()
                .and_then(|s| e.replay(&s, solution))
                .is_some_and(|s| e.is_solved(&s))
        }
        EnvKind::Sokoban => SokobanEnv::from_encoding(root)
            .ok()
            .and_then(|(e, s)| e.replay(&s, solution).map(|x| e.is_solved(&x)))
            .unwrap_or(false),
    }
}

pub type LengthLookup = Box<dyn Fn(&str) -> Option<usize> + Sync>;

/// Exact distance lookup over encoded start states, for length-gap tables.
/// Rubik covers scrambles up to `radius`; the sliding puzzle needs side ≤ 3.
pub fn optimal_lengths(env: EnvKind, radius: u8) -> Result<LengthLookup, HarnessError> {
    match env {
        EnvKind::Rubik => {
            let t = DistanceTable::build(radius)?;
            Ok(Box::new(move |root| {
                let c = RubikEnv.decode(root).ok()?;
                t.distance(&c).map(usize::from)
            }))
        }
        EnvKind::Npuzzle => {
            let t = NPuzzleTable::build(3).map_err(|e| HarnessError::Unavailable(e.to_string()))?;
            Ok(Box::new(move |root| {
                let tiles = NPuzzleEnv::new(3).decode(root).ok()?;
                t.distance(&tiles).map(usize::from)
            }))
        }
        EnvKind::Sokoban => Err(HarnessError::Unavailable("no exact distance oracle for sokoban".into())),
    }
}
