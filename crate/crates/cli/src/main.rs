use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use subgoal_bench::experts::{assemble_dataset, manifest_sha256, read_dataset, ExpertSpec};
use subgoal_bench::guidance::GuidanceBundle;
use subgoal_bench::harness::{
    compare_budget_definitions, compare_to_optimal, default_grid, optimal_lengths, prepare,
    read_csv, read_records, run_experiment, run_instance, tree_statistics, write_results,
    CurvesFile, ExperimentConfig,
};

#[derive(Parser)]
#[command(name = "subgoal-bench", version, about = "Subgoal and low-level search benchmarks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct ConfigArgs {
    /// Flat `key = value` experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides applied after the config file, e.g. `--set seed=3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut text = match &self.config {
            Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
            None => String::new(),
        };
        for o in &self.overrides {
            if !o.contains('=') {
                bail!("override `{o}` is not KEY=VALUE");
            }
            text.push('\n');
            text.push_str(o);
        }
        Ok(ExperimentConfig::parse(&text)?)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Run experts and write a JSONL dataset with its manifest.
    GenData {
        /// `<expert-spec>=<count>`, e.g. `rubik-random:20=1000`.
        #[arg(long = "expert", required = true)]
        experts: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a guidance bundle from a dataset manifest.
    Fit {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Search one instance and print the result as JSON.
    Solve {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value_t = 0)]
        instance: usize,
    },
    /// Run every instance of a config and write CSV, JSONL and curves.
    Eval {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tree statistics, and optionally solution-length gaps, over result files.
    Stats {
        /// `results.jsonl` files written by `eval`.
        #[arg(required = true)]
        results: Vec<PathBuf>,
        /// Also compare solution lengths with exact distances.
        #[arg(long)]
        optimal: bool,
        #[arg(long, default_value_t = 6)]
        oracle_radius: u8,
    },
    /// Success curves over total and over high-level node counts.
    BudgetCompare {
        /// `results.csv` files written by `eval`.
        #[arg(required = true)]
        csv: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        budgets: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_expert(arg: &str) -> Result<(ExpertSpec, usize)> {
    let (spec, count) = arg
        .rsplit_once('=')
        .with_context(|| format!("`{arg}` is not SPEC=COUNT"))?;
    Ok((spec.parse()?, count.parse().context("bad count")?))
}

fn main() -> Result<()> {
    env_logger::init();
    match Cli::parse().cmd {
        Cmd::GenData { experts, seed, out } => {
            let experts = experts.iter().map(|e| parse_expert(e)).collect::<Result<Vec<_>>>()?;
            let m = assemble_dataset(&experts, seed, &out)?;
            println!("{}", serde_json::to_string_pretty(&m)?);
        }
        Cmd::Fit { manifest, out } => {
            let (_, records) = read_dataset(&manifest)?;
            let bundle = GuidanceBundle::fit(&records, manifest_sha256(&manifest)?)?;
            bundle.save(&out)?;
            println!(
                "{}",
                json!({"env": bundle.env, "records": records.len(), "buckets": bundle.value.bucket_count()})
            );
        }
        Cmd::Solve { cfg, instance } => {
            let cfg = cfg.load()?;
            let prep = prepare(&cfg)?;
            let (rec, result) = run_instance(&cfg, &prep, instance);
            println!("{}", serde_json::to_string_pretty(&json!({"instance": rec, "result": result}))?);
        }
        Cmd::Eval { cfg, out } => {
            let cfg = cfg.load()?;
            let records = run_experiment(&cfg)?;
            write_results(&out, &cfg, &records)?;
            let solved = records.iter().filter(|r| r.solved()).count();
            println!("{}: solved {solved}/{}", cfg.label(), records.len());
        }
        Cmd::Stats { results, optimal, oracle_radius } => {
            let mut records = Vec::new();
            for p in &results {
                records.extend(read_records(p)?);
            }
            let mut report = json!({"trees": tree_statistics(&records)});
            if optimal {
                let env = match records.first() {
                    Some(r) => r.env,
                    None => bail!("no records"),
                };
                if records.iter().any(|r| r.env != env) {
                    bail!("records mix environments");
                }
                let lookup = optimal_lengths(env, oracle_radius)?;
                report["gaps"] = serde_json::to_value(compare_to_optimal(&records, &*lookup)?)?;
            }
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Cmd::BudgetCompare { csv, budgets, out } => {
            let mut rows = Vec::new();
            for p in &csv {
                rows.extend(read_csv(fs::File::open(p).with_context(|| p.display().to_string())?)?);
            }
            let budgets = if budgets.is_empty() {
                default_grid(rows.iter().map(|r| r.nodes_total).max().unwrap_or(1).max(1))
            } else {
                budgets
            };
            let curves = CurvesFile {
                curves: compare_budget_definitions(&rows, &budgets),
            };
            let text = serde_json::to_string_pretty(&curves)?;
            match out {
                Some(p) => fs::write(p, text)?,
                None => println!("{text}"),
            }
        }
    }
    Ok(())
}
