//! Multi-seed benchmark harness.
//!
//! Runs the colony over an instance set, recomputes every reported cost
//! from scratch as an independent check, and renders result tables (text
//! and tab-delimited) plus per-iteration population traces.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::colony::{self, ColonyParams, RunOutcome};
use crate::graph::{build_network, shortest_paths, DistanceTables, Network};
use crate::instance::{parse_any, parse_lb_table, validate, InstanceFile};
use crate::split::evaluate_trip;
use crate::{Cost, Error, Result};

/// Environment variable naming the default instance directory; relative
/// instance paths that do not resolve against the working directory are
/// retried under it.
pub const INSTANCE_DIR_ENV: &str = "CARP_INSTANCE_DIR";

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub instances: Vec<PathBuf>,
    /// One colony restart per seed; the BACO column is the best over them.
    pub seeds: Vec<u64>,
    pub params: ColonyParams,
    /// Lower bounds by lowercase instance name.
    pub lower_bounds: HashMap<String, Cost>,
    pub keep_traces: bool,
    pub parallel: bool,
}

impl ExperimentConfig {
    pub fn new(instances: Vec<PathBuf>) -> Self {
        ExperimentConfig {
            instances,
            seeds: vec![1, 2, 3],
            params: ColonyParams::default(),
            lower_bounds: HashMap::new(),
            keep_traces: false,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedResult {
    pub seed: u64,
    pub cost: Cost,
    /// (cost - LB) / LB, when the bound is known.
    pub dev: Option<f64>,
    pub time_to_best: f64,
    pub total_time: f64,
    pub best_iteration: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub name: String,
    pub nodes: usize,
    pub tasks: usize,
    pub lb: Option<Cost>,
    pub seeds: Vec<SeedResult>,
    pub baco: Cost,
    pub baco_dev: Option<f64>,
    pub avg_time: f64,
}

/// Everything produced for one instance, outcomes included so callers can
/// write traces and solution files.
#[derive(Debug)]
pub struct InstanceReport {
    pub row: ResultRow,
    pub instance: InstanceFile,
    pub network: Network,
    pub distances: DistanceTables,
    pub outcomes: Vec<(u64, RunOutcome)>,
}

#[derive(Debug)]
pub struct BenchReport {
    pub reports: Vec<InstanceReport>,
    /// (instance path, error) for instances that failed; the run continues.
    pub failures: Vec<(String, String)>,
}

impl BenchReport {
    pub fn rows(&self) -> Vec<ResultRow> {
        self.reports.iter().map(|r| r.row.clone()).collect()
    }
}

/// Mean BACO deviation (percent) and number of lower-bound hits, the two
/// footer lines of the results table.
pub fn summarize(rows: &[ResultRow]) -> (f64, usize) {
    let devs: Vec<f64> = rows.iter().filter_map(|r| r.baco_dev).collect();
    let av_dev = if devs.is_empty() {
        0.0
    } else {
        100.0 * devs.iter().sum::<f64>() / devs.len() as f64
    };
    let hits = rows
        .iter()
        .filter(|r| r.lb.is_some_and(|lb| r.baco == lb))
        .count();
    (av_dev, hits)
}

fn dev_of(cost: Cost, lb: Option<Cost>) -> Option<f64> {
    lb.map(|lb| (cost - lb) as f64 / lb as f64)
}

/// Resolves an instance path against the working directory, then against
/// `$CARP_INSTANCE_DIR`.
pub fn resolve_instance_path(path: &Path) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    if let Ok(dir) = std::env::var(INSTANCE_DIR_ENV) {
        let candidate = Path::new(&dir).join(path);
        if candidate.exists() {
            return candidate;
        }
    }
    path.to_path_buf()
}

pub fn load_instance(path: &Path) -> Result<InstanceFile> {
    let text = std::fs::read_to_string(resolve_instance_path(path))?;
    let inst = parse_any(&text)?;
    validate(&inst).map_err(Error::Validation)?;
    Ok(inst)
}

pub fn load_lb_table(path: &Path) -> Result<HashMap<String, Cost>> {
    parse_lb_table(&std::fs::read_to_string(path)?)
}

fn run_one_instance(config: &ExperimentConfig, path: &Path) -> Result<InstanceReport> {
    let instance = load_instance(path)?;
    let network = build_network(&instance)?;
    let distances = shortest_paths(&network)?;
    let lb = config
        .lower_bounds
        .get(&instance.name.to_ascii_lowercase())
        .copied()
        .or(instance.lower_bound);

    let mut outcomes = Vec::with_capacity(config.seeds.len());
    let mut seed_results = Vec::with_capacity(config.seeds.len());
    for &seed in &config.seeds {
        let params = ColonyParams { seed, ..config.params.clone() };
        let mut outcome = colony::run(&network, &distances, &params, lb, config.parallel)?;

        // The reported cost must re-derive from the instance alone.
        outcome
            .best
            .check(&network, &distances)
            .map_err(Error::Infeasible)?;
        let recomputed: Cost = outcome
            .best
            .trips
            .iter()
            .map(|t| evaluate_trip(&t.tasks, &network, &distances).cost)
            .sum();
        if recomputed != outcome.best_cost {
            return Err(Error::Infeasible(format!(
                "reported cost {} but recomputation gives {recomputed}",
                outcome.best_cost
            )));
        }
        if let Some(lb) = lb {
            if outcome.best_cost < lb {
                return Err(Error::Infeasible(format!(
                    "cost {} beats the declared lower bound {lb}; instance data or bound is wrong",
                    outcome.best_cost
                )));
            }
        }

        seed_results.push(SeedResult {
            seed,
            cost: outcome.best_cost,
            dev: dev_of(outcome.best_cost, lb),
            time_to_best: outcome.time_to_best.as_secs_f64(),
            total_time: outcome.total_time.as_secs_f64(),
            best_iteration: outcome.best_iteration,
        });
        if !config.keep_traces {
            outcome.trace.clear();
        }
        outcomes.push((seed, outcome));
    }

    let baco = seed_results.iter().map(|s| s.cost).min().expect("at least one seed");
    let avg_time =
        seed_results.iter().map(|s| s.total_time).sum::<f64>() / seed_results.len() as f64;
    let row = ResultRow {
        name: instance.name.clone(),
        nodes: instance.node_count,
        tasks: instance.required_count(),
        lb,
        baco,
        baco_dev: dev_of(baco, lb),
        avg_time,
        seeds: seed_results,
    };
    Ok(InstanceReport { row, instance, network, distances, outcomes })
}

/// Runs every instance in the configured order. Failures are collected,
/// not fatal. With `parallel` the instances share the rayon pool; the
/// output order stays the configured one either way.
pub fn run_experiments(config: &ExperimentConfig) -> BenchReport {
    let run = |path: &PathBuf| (path.clone(), run_one_instance(config, path));
    let results: Vec<(PathBuf, Result<InstanceReport>)> = if config.parallel {
        config.instances.par_iter().map(run).collect()
    } else {
        config.instances.iter().map(run).collect()
    };

    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for (path, result) in results {
        match result {
            Ok(report) => reports.push(report),
            Err(err) => failures.push((path.display().to_string(), err.to_string())),
        }
    }
    BenchReport { reports, failures }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Text,
    Delimited,
}

fn fmt_dev(dev: Option<f64>) -> String {
    match dev {
        Some(d) => format!("{:.2}", 100.0 * d),
        None => "-".into(),
    }
}

fn fmt_lb(lb: Option<Cost>) -> String {
    match lb {
        Some(lb) => lb.to_string(),
        None => "-".into(),
    }
}

/// Renders the result table. Column order follows the benchmark tables:
/// instance stats, per-seed results, best-over-seeds, footer with the
/// average deviation and lower-bound hit count.
pub fn render_table(rows: &[ResultRow], format: TableFormat) -> String {
    let seed_count = rows.first().map_or(0, |r| r.seeds.len());
    let mut header: Vec<String> = ["file", "n", "tau", "lb"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for s in 1..=seed_count {
        for col in ["cost", "dev", "time_best", "time_total", "iters"] {
            header.push(format!("{col}{s}"));
        }
    }
    header.extend(["baco".into(), "baco_dev".into(), "avg_time".into()]);

    let mut table: Vec<Vec<String>> = vec![header];
    for row in rows {
        let mut cells = vec![
            row.name.clone(),
            row.nodes.to_string(),
            row.tasks.to_string(),
            fmt_lb(row.lb),
        ];
        for s in &row.seeds {
            cells.push(s.cost.to_string());
            cells.push(fmt_dev(s.dev));
            cells.push(format!("{:.2}", s.time_to_best));
            cells.push(format!("{:.2}", s.total_time));
            cells.push(s.best_iteration.to_string());
        }
        cells.push(row.baco.to_string());
        cells.push(fmt_dev(row.baco_dev));
        cells.push(format!("{:.2}", row.avg_time));
        table.push(cells);
    }

    let (av_dev, hits) = summarize(rows);
    match format {
        TableFormat::Delimited => {
            let mut out = String::new();
            for row in &table {
                out.push_str(&row.join("\t"));
                out.push('\n');
            }
            out.push_str(&format!("# Av.Dev (%)\t{av_dev:.2}\n# Nb hits\t{hits}\n"));
            out
        }
        TableFormat::Text => {
            let cols = table.iter().map(Vec::len).max().unwrap_or(0);
            let mut widths = vec![0usize; cols];
            for row in &table {
                for (i, cell) in row.iter().enumerate() {
                    widths[i] = widths[i].max(cell.len());
                }
            }
            let mut out = String::new();
            for row in &table {
                let line: Vec<String> = row
                    .iter()
                    .enumerate()
                    .map(|(i, c)| format!("{:<w$}", c, w = widths[i]))
                    .collect();
                out.push_str(line.join("  ").trim_end());
                out.push('\n');
            }
            out.push_str(&format!("Av.Dev (%): {av_dev:.2}\nNb hits: {hits}\n"));
            out
        }
    }
}

/// Parses the delimited table back into rows; timing fields keep their
/// rendered 2-decimal precision. Inverse of [`render_table`] for the
/// machine-readable variant.
pub fn parse_table_delimited(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.starts_with('#'));
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty table".into() })?;
    let cols: Vec<&str> = header.split('\t').collect();
    if cols.len() < 7 || (cols.len() - 7) % 5 != 0 {
        return Err(Error::Parse { line: 1, msg: "unexpected column count".into() });
    }
    let seed_count = (cols.len() - 7) / 5;

    let mut rows = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != cols.len() {
            return Err(Error::Parse { line: lineno, msg: "ragged row".into() });
        }
        let int = |s: &str| -> Result<i64> {
            s.parse().map_err(|_| Error::Parse { line: lineno, msg: format!("bad integer `{s}`") })
        };
        let float = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse { line: lineno, msg: format!("bad number `{s}`") })
        };
        let opt_int = |s: &str| -> Result<Option<i64>> {
            if s == "-" { Ok(None) } else { int(s).map(Some) }
        };
        let opt_pct = |s: &str| -> Result<Option<f64>> {
            if s == "-" { Ok(None) } else { float(s).map(|v| Some(v / 100.0)) }
        };

        let lb = opt_int(cells[3])?;
        let mut seeds = Vec::with_capacity(seed_count);
        for s in 0..seed_count {
            let base = 4 + 5 * s;
            seeds.push(SeedResult {
                seed: (s + 1) as u64,
                cost: int(cells[base])?,
                dev: opt_pct(cells[base + 1])?,
                time_to_best: float(cells[base + 2])?,
                total_time: float(cells[base + 3])?,
                best_iteration: int(cells[base + 4])? as usize,
            });
        }
        let base = 4 + 5 * seed_count;
        rows.push(ResultRow {
            name: cells[0].to_string(),
            nodes: int(cells[1])? as usize,
            tasks: int(cells[2])? as usize,
            lb,
            seeds,
            baco: int(cells[base])?,
            baco_dev: opt_pct(cells[base + 1])?,
            avg_time: float(cells[base + 2])?,
        });
    }
    Ok(rows)
}

/// One record per (iteration, slot): slot costs in sorted order (slot 1 is
/// the worst, the last slot the best) plus the elitist flag. Iteration 0 is
/// the initial population.
pub fn render_trace(outcome: &RunOutcome, ants: usize, elitist: usize) -> String {
    let mut out = String::from("iteration\tslot\tcost\telitist\n");
    for it in &outcome.trace {
        for (idx, cost) in it.costs.iter().enumerate() {
            let mu = idx + 1;
            let flag = u8::from(mu > ants - elitist);
            out.push_str(&format!("{}\t{mu}\t{cost}\t{flag}\n", it.iteration));
        }
    }
    out
}
