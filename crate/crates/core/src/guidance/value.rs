use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Featurize, ValueFn};
use crate::env::{EnvKind, Environment, Inflated, TrajectoryError, TrajectoryRecord};
use crate::npuzzle::{NPuzzleEnv, NPuzzleTable, Tiles};
use crate::rubik::{Cube, DistanceTable, RubikEnv};
use crate::scalar::Scalar;
use crate::sokoban::SokobanEnv;

/// Exact distances to the goal for the states it covers.
pub trait DistanceOracle<E: Environment> {
    fn distance(&self, env: &E, state: &E::State) -> Option<usize>;

    /// Lower bound on the distance of every state the oracle does not cover.
    fn uncovered_bound(&self) -> usize {
        0
    }
}

impl DistanceOracle<RubikEnv> for DistanceTable {
    fn distance(&self, _: &RubikEnv, c: &Cube) -> Option<usize> {
        DistanceTable::distance(self, c).map(usize::from)
    }
    fn uncovered_bound(&self) -> usize {
        self.radius() as usize + 1
    }
}

impl DistanceOracle<Inflated<RubikEnv>> for DistanceTable {
    fn distance(&self, _: &Inflated<RubikEnv>, c: &Cube) -> Option<usize> {
        DistanceTable::distance(self, c).map(usize::from)
    }
    fn uncovered_bound(&self) -> usize {
        self.radius() as usize + 1
    }
}

impl DistanceOracle<NPuzzleEnv> for NPuzzleTable {
    fn distance(&self, _: &NPuzzleEnv, t: &Tiles) -> Option<usize> {
        NPuzzleTable::distance(self, t).map(usize::from)
    }
}

impl DistanceOracle<Inflated<NPuzzleEnv>> for NPuzzleTable {
    fn distance(&self, _: &Inflated<NPuzzleEnv>, t: &Tiles) -> Option<usize> {
        NPuzzleTable::distance(self, t).map(usize::from)
    }
}

impl<E: Environment, O: DistanceOracle<E> + ?Sized> DistanceOracle<E> for Arc<O> {
    fn distance(&self, env: &E, state: &E::State) -> Option<usize> {
        (**self).distance(env, state)
    }
    fn uncovered_bound(&self) -> usize {
        (**self).uncovered_bound()
    }
}

impl<E: Environment, O: DistanceOracle<E> + ?Sized> DistanceOracle<E> for std::rc::Rc<O> {
    fn distance(&self, env: &E, state: &E::State) -> Option<usize> {
        (**self).distance(env, state)
    }
    fn uncovered_bound(&self) -> usize {
        (**self).uncovered_bound()
    }
}

/// Negated exact distance; states outside the oracle fall back to the
/// environment heuristic, raised to the oracle's bound, and are counted.
pub struct OracleValue<O> {
    oracle: O,
    fallbacks: AtomicUsize,
}

impl<O> OracleValue<O> {
    pub fn new(oracle: O) -> Self {
        OracleValue {
            oracle,
            fallbacks: AtomicUsize::new(0),
        }
    }

    /// Queries answered by the heuristic so far.
    pub fn fallbacks(&self) -> usize {
        self.fallbacks.load(Ordering::Relaxed)
    }
}

impl<E: Featurize, S: Scalar, O: DistanceOracle<E>> ValueFn<E, S> for OracleValue<O> {
    fn value(&self, env: &E, state: &E::State) -> S {
        match self.oracle.distance(env, state) {
            Some(d) => -S::from_count(d),
            None => {
                self.fallbacks.fetch_add(1, Ordering::Relaxed);
                S::lit(-env.heuristic(state).max(self.oracle.uncovered_bound() as f64))
            }
        }
    }
}

/// Negated environment heuristic.
#[derive(Debug, Clone, Copy, Default)]
pub struct HeuristicValue;

impl<E: Featurize, S: Scalar> ValueFn<E, S> for HeuristicValue {
    fn value(&self, env: &E, state: &E::State) -> S {
        S::lit(-env.heuristic(state))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ConstantValue(pub f64);

impl<E: Environment, S: Scalar> ValueFn<E, S> for ConstantValue {
    fn value(&self, _: &E, _: &E::State) -> S {
        S::lit(self.0)
    }
}

#[derive(Debug, Error)]
pub enum FitError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dataset mixes environments {0} and {1}")]
    MixedEnv(EnvKind, EnvKind),
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Bucket {
    sum: f64,
    count: u64,
}

/// Nearest buckets consulted for an unseen feature vector.
const NEIGHBORS: usize = 4;

/// Mean training target per feature bucket. The target of the `i`-th state
/// of an `n`-step trajectory is `i - n`.
#[derive(Debug, Serialize, Deserialize)]
pub struct FittedValue {
    env: EnvKind,
    #[serde(with = "bucket_list")]
    buckets: BTreeMap<Vec<i32>, Bucket>,
    /// Neighbor estimates for feature vectors without a bucket.
    #[serde(skip)]
    misses: Mutex<HashMap<Vec<i32>, f64>>,
}

impl Clone for FittedValue {
    fn clone(&self) -> Self {
        FittedValue {
            env: self.env,
            buckets: self.buckets.clone(),
            misses: Mutex::default(),
        }
    }
}

impl PartialEq for FittedValue {
    fn eq(&self, other: &Self) -> bool {
        self.env == other.env && self.buckets == other.buckets
    }
}

mod bucket_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<Se: Serializer>(
        m: &BTreeMap<Vec<i32>, Bucket>,
        s: Se,
    ) -> Result<Se::Ok, Se::Error> {
        s.collect_seq(m.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<Vec<i32>, Bucket>, D::Error> {
        let v: Vec<(Vec<i32>, Bucket)> = Vec::deserialize(d)?;
        Ok(v.into_iter().collect())
    }
}

impl FittedValue {
    pub fn fit(records: &[TrajectoryRecord]) -> Result<Self, FitError> {
        let first = records.first().ok_or(FitError::EmptyDataset)?;
        let env = first.env;
        let mut fitted = FittedValue {
            env,
            buckets: BTreeMap::new(),
            misses: Mutex::default(),
        };
        for r in records {
            if r.env != env {
                return Err(FitError::MixedEnv(env, r.env));
            }
            match env {
                EnvKind::Rubik => fitted.add(&RubikEnv, r)?,
                EnvKind::Npuzzle => {
                    let side = (r.states[0].split(',').count() as f64).sqrt().round() as usize;
                    fitted.add(&NPuzzleEnv::new(side.max(2)), r)?
                }
                EnvKind::Sokoban => {
                    let (senv, _) = SokobanEnv::from_encoding(&r.states[0]).map_err(TrajectoryError::from)?;
                    fitted.add(&senv, r)?
                }
            }
        }
        Ok(fitted)
    }

    fn add<E: Featurize>(&mut self, env: &E, r: &TrajectoryRecord) -> Result<(), FitError> {
        let n = r.states.len() - 1;
        for (i, enc) in r.states.iter().enumerate() {
            let s = env.decode(enc).map_err(TrajectoryError::from)?;
            let b = self.buckets.entry(env.features(&s)).or_insert(Bucket {
                sum: 0.0,
                count: 0,
            });
            b.sum += i as f64 - n as f64;
            b.count += 1;
        }
        Ok(())
    }

    pub fn env(&self) -> EnvKind {
        self.env
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }

    /// Bucket mean, or the count-weighted mean of the nearest buckets by L1
    /// distance (ties resolved by bucket order).
    pub fn estimate(&self, features: &[i32]) -> f64 {
        if let Some(b) = self.buckets.get(features) {
            return b.sum / b.count as f64;
        }
        if let Some(&v) = self.misses.lock().expect("miss cache").get(features) {
            return v;
        }
        // Nearest buckets, earlier buckets winning distance ties.
        let mut near: Vec<(i64, &Bucket)> = Vec::with_capacity(NEIGHBORS + 1);
        for (k, b) in &self.buckets {
            let d = k
                .iter()
                .zip(features)
                .map(|(x, y)| (*x as i64 - *y as i64).abs())
                .sum::<i64>();
            if near.len() == NEIGHBORS && d >= near[NEIGHBORS - 1].0 {
                continue;
            }
            let at = near.partition_point(|&(e, _)| e <= d);
            near.insert(at, (d, b));
            near.truncate(NEIGHBORS);
        }
        let (sum, count) = near
            .iter()
            .fold((0.0, 0u64), |(s, c), (_, b)| (s + b.sum, c + b.count));
        let v = sum / count as f64;
        self.misses.lock().expect("miss cache").insert(features.to_vec(), v);
        v
    }
}

impl<E: Featurize, S: Scalar> ValueFn<E, S> for FittedValue {
    fn value(&self, env: &E, state: &E::State) -> S {
        S::lit(self.estimate(&env.features(state)))
    }
}

/// Adds `N(0, sigma)` to every query of the wrapped estimator. Searches
/// query once per inserted node, so each node gets one draw. Holds its own
/// RNG: use one wrapper per search.
pub struct Noisy<V> {
    inner: V,
    noise: Option<Normal<f64>>,
    rng: RefCell<ChaCha8Rng>,
}

impl<V> Noisy<V> {
    pub fn new(inner: V, sigma: f64, seed: u64) -> Self {
        assert!(sigma >= 0.0 && sigma.is_finite(), "noise sigma must be finite and >= 0");
        Noisy {
            inner,
            noise: (sigma > 0.0).then(|| Normal::new(0.0, sigma).expect("valid sigma")),
            rng: RefCell::new(ChaCha8Rng::seed_from_u64(seed)),
        }
    }

    pub fn inner(&self) -> &V {
        &self.inner
    }
}

impl<E: Environment, S: Scalar, V: ValueFn<E, S>> ValueFn<E, S> for Noisy<V> {
    fn value(&self, env: &E, state: &E::State) -> S {
        let v = self.inner.value(env, state);
        match &self.noise {
            None => v,
            Some(n) => v + S::lit(n.sample(&mut *self.rng.borrow_mut())),
        }
    }
}
