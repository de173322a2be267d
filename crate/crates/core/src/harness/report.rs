use std::collections::{BTreeMap, HashSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::EnvKind;
use crate::search::{SearchStatus, TreeStats};

/// Column order of the results CSV.
pub const CSV_HEADER: [&str; 11] = [
    "instance_id",
    "seed",
    "algorithm",
    "env",
    "status",
    "nodes_total",
    "nodes_high_level",
    "solution_len",
    "subgoals_on_path",
    "wall_ms",
    "dead_end_fraction",
];

/// Outcome of one search, with what the reports need beyond the CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub instance_id: usize,
    pub seed: u64,
    pub algorithm: String,
    pub env: EnvKind,
    pub status: SearchStatus,
    pub nodes_total: usize,
    pub nodes_high_level: usize,
    pub solution_len: usize,
    pub subgoals_on_path: usize,
    pub wall_ms: Option<u64>,
    pub dead_end_fraction: Option<f64>,
    pub tree: TreeStats,
    /// Encoding of the start state.
    pub root: String,
}

impl InstanceRecord {
    pub fn solved(&self) -> bool {
        self.status == SearchStatus::Solved
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    instance_id: usize,
    seed: u64,
    algorithm: String,
    env: EnvKind,
    status: SearchStatus,
    nodes_total: usize,
    nodes_high_level: usize,
    solution_len: usize,
    subgoals_on_path: usize,
    wall_ms: Option<u64>,
    dead_end_fraction: Option<f64>,
}

pub fn write_csv<W: Write>(out: W, records: &[InstanceRecord]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.serialize(CsvRow {
            instance_id: r.instance_id,
            seed: r.seed,
            algorithm: r.algorithm.clone(),
            env: r.env,
            status: r.status,
            nodes_total: r.nodes_total,
            nodes_high_level: r.nodes_high_level,
            solution_len: r.solution_len,
            subgoals_on_path: r.subgoals_on_path,
            wall_ms: r.wall_ms,
            dead_end_fraction: r.dead_end_fraction,
        })?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvSummary {
    pub algorithm: String,
    pub status: SearchStatus,
    pub nodes_total: usize,
    pub nodes_high_level: usize,
}

/// Reads a results CSV, rejecting any header other than [`CSV_HEADER`].
pub fn read_csv<R: Read>(input: R) -> Result<Vec<CsvSummary>, csv::Error> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("unexpected CSV header {header:?}"),
        )));
    }
    r.deserialize::<CsvRow>()
        .map(|row| {
            row.map(|x| CsvSummary {
                algorithm: x.algorithm,
                status: x.status,
                nodes_total: x.nodes_total,
                nodes_high_level: x.nodes_high_level,
            })
        })
        .collect()
}

/// Which counter a curve thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetMeasure {
    Total,
    HighLevel,
}

/// Fraction of instances solved within each budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessCurve {
    pub algorithm: String,
    pub measure: BudgetMeasure,
    pub instances: usize,
    pub budgets: Vec<usize>,
    pub rates: Vec<f64>,
}

impl SuccessCurve {
    pub fn rate_at(&self, budget: usize) -> f64 {
        match self.budgets.iter().rposition(|&b| b <= budget) {
            Some(i) => self.rates[i],
            None => 0.0,
        }
    }

    pub fn is_monotone(&self) -> bool {
        self.rates.windows(2).all(|w| w[0] <= w[1])
            && self.rates.iter().all(|r| (0.0..=1.0).contains(r))
            && self.budgets.windows(2).all(|w| w[0] < w[1])
    }
}

/// Success rate per budget: solved with the chosen counter at most the budget.
pub fn success_curve<'a>(
    algorithm: &str,
    records: impl IntoIterator<Item = &'a CsvSummary>,
    budgets: &[usize],
    measure: BudgetMeasure,
) -> SuccessCurve {
    let rows: Vec<&CsvSummary> = records.into_iter().collect();
    let n = rows.len();
    let cost = |r: &CsvSummary| match measure {
        BudgetMeasure::Total => r.nodes_total,
        BudgetMeasure::HighLevel => r.nodes_high_level,
    };
    let rates = budgets
        .iter()
        .map(|&b| {
            let solved = rows
                .iter()
                .filter(|r| r.status == SearchStatus::Solved && cost(r) <= b)
                .count();
            if n == 0 {
                0.0
            } else {
                solved as f64 / n as f64
            }
        })
        .collect();
    SuccessCurve {
        algorithm: algorithm.to_string(),
        measure,
        instances: n,
        budgets: budgets.to_vec(),
        rates,
    }
}

impl From<&InstanceRecord> for CsvSummary {
    fn from(r: &InstanceRecord) -> Self {
        CsvSummary {
            algorithm: r.algorithm.clone(),
            status: r.status,
            nodes_total: r.nodes_total,
            nodes_high_level: r.nodes_high_level,
        }
    }
}

fn by_algorithm<T, F: Fn(&T) -> &str>(rows: &[T], name: F) -> Vec<(String, Vec<&T>)> {
    let mut out: Vec<(String, Vec<&T>)> = Vec::new();
    for r in rows {
        match out.iter_mut().find(|(a, _)| a == name(r)) {
            Some((_, v)) => v.push(r),
            None => out.push((name(r).to_string(), vec![r])),
        }
    }
    out
}

/// Two curves per algorithm: thresholds on all visited states and on
/// high-level nodes only.
pub fn compare_budget_definitions(rows: &[CsvSummary], budgets: &[usize]) -> Vec<SuccessCurve> {
    by_algorithm(rows, |r| &r.algorithm)
        .into_iter()
        .flat_map(|(alg, rs)| {
            [BudgetMeasure::Total, BudgetMeasure::HighLevel]
                .map(|m| success_curve(&alg, rs.iter().copied(), budgets, m))
        })
        .collect()
}

/// Curves file written next to a results CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvesFile {
    pub curves: Vec<SuccessCurve>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeRow {
    pub algorithm: String,
    pub instances: usize,
    pub tree_size: f64,
    pub leaves: f64,
    pub branching: f64,
    pub solution_len: f64,
    pub subgoals_on_path: f64,
}

/// Start states solved by every algorithm present.
fn common_roots(records: &[InstanceRecord]) -> (Vec<(String, Vec<&InstanceRecord>)>, HashSet<&str>) {
    let groups = by_algorithm(records, |r| &r.algorithm);
    let mut common: Option<HashSet<&str>> = None;
    for (_, rs) in &groups {
        let solved: HashSet<&str> = rs.iter().filter(|r| r.solved()).map(|r| r.root.as_str()).collect();
        common = Some(match common {
            None => solved,
            Some(c) => c.intersection(&solved).copied().collect(),
        });
    }
    (groups, common.unwrap_or_default())
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

/// Mean tree shape per algorithm over the commonly solved instances.
pub fn tree_statistics(records: &[InstanceRecord]) -> Vec<TreeRow> {
    let (groups, common) = common_roots(records);
    groups
        .into_iter()
        .map(|(alg, rs)| {
            let mut seen = HashSet::new();
            let rs: Vec<&InstanceRecord> = rs
                .into_iter()
                .filter(|r| r.solved() && common.contains(r.root.as_str()) && seen.insert(r.root.as_str()))
                .collect();
            TreeRow {
                algorithm: alg,
                instances: rs.len(),
                tree_size: mean(rs.iter().map(|r| r.tree.size as f64)),
                leaves: mean(rs.iter().map(|r| r.tree.leaves as f64)),
                branching: mean(rs.iter().map(|r| r.tree.branching)),
                solution_len: mean(rs.iter().map(|r| r.solution_len as f64)),
                subgoals_on_path: mean(rs.iter().map(|r| r.subgoals_on_path as f64)),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub algorithm: String,
    pub instances: usize,
    pub mean_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no optimal distance known for start state {0}")]
pub struct OracleUnavailable(pub String);

/// Mean excess of found solution lengths over optimal ones, per algorithm,
/// over the commonly solved instances.
pub fn compare_to_optimal(
    records: &[InstanceRecord],
    optimal: &dyn Fn(&str) -> Option<usize>,
) -> Result<Vec<GapRow>, OracleUnavailable> {
    let (groups, common) = common_roots(records);
    let mut dist = BTreeMap::new();
    for root in &common {
        let d = optimal(root).ok_or_else(|| OracleUnavailable(root.to_string()))?;
        dist.insert(*root, d);
    }
    Ok(groups
        .into_iter()
        .map(|(alg, rs)| {
            let mut seen = HashSet::new();
            let gaps: Vec<f64> = rs
                .iter()
                .filter(|r| r.solved() && seen.insert(r.root.as_str()))
                .filter_map(|r| dist.get(r.root.as_str()).map(|&d| r.solution_len as f64 - d as f64))
                .collect();
            GapRow {
                algorithm: alg,
                instances: gaps.len(),
                mean_gap: mean(gaps.iter().copied()),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(alg: &str, solved: bool, total: usize, high: usize) -> CsvSummary {
        CsvSummary {
            algorithm: alg.into(),
            status: if solved { SearchStatus::Solved } else { SearchStatus::BudgetExhausted },
            nodes_total: total,
            nodes_high_level: high,
        }
    }

    fn rec(alg: &str, root: &str, len: usize, tree: TreeStats) -> InstanceRecord {
        InstanceRecord {
            instance_id: 0,
            seed: 0,
            algorithm: alg.into(),
            env: EnvKind::Rubik,
            status: SearchStatus::Solved,
            nodes_total: 1,
            nodes_high_level: 1,
            solution_len: len,
            subgoals_on_path: 0,
            wall_ms: None,
            dead_end_fraction: None,
            tree,
            root: root.into(),
        }
    }

    #[test]
    fn counting_example() {
        let rows = [row("a", true, 10, 10), row("a", true, 50, 50), row("a", true, 200, 200), row("a", false, 500, 500)];
        let c = success_curve("a", &rows, &[100, 500], BudgetMeasure::Total);
        assert_eq!(c.rates, vec![0.5, 0.75]);
        assert_eq!(c.rate_at(499), 0.5);
        assert!(c.is_monotone());
    }

    #[test]
    fn best_first_projections_coincide() {
        let rows = [row("bestfs", true, 30, 30), row("bestfs", true, 80, 80)];
        let c = compare_budget_definitions(&rows, &[10, 50, 100]);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].rates, c[1].rates);
    }

    #[test]
    fn witness_runs_shift_left_by_about_k() {
        // Five accepted witness subgoals of length 4: high = 6, total = 6 + 5 * 3.
        let rows = [row("ksubs-4", true, 21, 6)];
        let c = compare_budget_definitions(&rows, &[6, 21]);
        assert_eq!(c[0].rates, vec![0.0, 1.0]);
        assert_eq!(c[1].rates, vec![1.0, 1.0]);
    }

    #[test]
    fn csv_header_is_published_schema() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[rec("bestfs", "x", 3, TreeStats::default())]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
        assert!(text.lines().nth(1).unwrap().ends_with(",,"), "{text}");
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back[0].status, SearchStatus::Solved);
        assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn tree_rows_use_common_instances() {
        let path = TreeStats::from_parents(&[None, Some(0), Some(1)], 2, 0);
        let recs = [rec("a", "r1", 2, path), rec("a", "r2", 9, path), rec("b", "r1", 4, path)];
        let t = tree_statistics(&recs);
        assert_eq!(t[0].instances, 1);
        assert_eq!((t[0].tree_size, t[0].branching), (3.0, 1.0));
        let gaps = compare_to_optimal(&recs, &|_| Some(2)).unwrap();
        assert_eq!(gaps[0].mean_gap, 0.0);
        assert_eq!(gaps[1].mean_gap, 2.0);
        assert!(compare_to_optimal(&recs, &|_| None).is_err());
    }
}
