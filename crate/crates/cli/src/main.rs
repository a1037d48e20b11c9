//! Benchmark CLI: `solve` one instance, `bench` an instance set over
//! several seeds, `check` a solution file against its instance.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use carp_aco::bench::{
    self, load_instance, load_lb_table, render_table, render_trace, ExperimentConfig, TableFormat,
};
use carp_aco::colony::ColonyParams;
use carp_aco::graph::{build_network, shortest_paths};
use carp_aco::instance::{check_solution, parse_solution, write_solution};
use carp_aco::Cost;

#[derive(Parser)]
#[command(name = "carp-aco", about = "Capacitated arc routing solver (ant colony)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Colony parameters, benchmark defaults: f=60, f_e=10, rho=0.90, k=10,
/// p_LS=50%, p_p=10%, I_max=200, n_s=10, alpha=beta=1.
#[derive(Args, Clone)]
struct ParamArgs {
    /// Number of ants f
    #[arg(long, default_value_t = 60)]
    ants: usize,
    /// Number of elitist ants f_e
    #[arg(long, default_value_t = 10)]
    elitist: usize,
    /// Trail persistence rho
    #[arg(long, default_value_t = 0.90)]
    rho: f64,
    /// Candidate list size k
    #[arg(long, default_value_t = 10)]
    candidates: usize,
    /// Local search probability
    #[arg(long = "p-ls", default_value_t = 0.5)]
    p_ls: f64,
    /// Probability of ignoring pheromone trails
    #[arg(long = "p-p", default_value_t = 0.1)]
    p_p: f64,
    /// Iteration cap I_max
    #[arg(long, default_value_t = 200)]
    iterations: usize,
    /// Iterations without improvement before the trails are erased
    #[arg(long, default_value_t = 10)]
    stagnation: usize,
    /// Saving exponent alpha
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Pheromone exponent beta
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Initial pheromone level
    #[arg(long, default_value_t = 1.0)]
    tau0: f64,
    /// Disable parallel execution (results are identical either way)
    #[arg(long)]
    serial: bool,
}

impl ParamArgs {
    fn to_params(&self, seed: u64) -> ColonyParams {
        ColonyParams {
            ants: self.ants,
            elitist: self.elitist,
            rho: self.rho,
            candidate_size: self.candidates,
            p_local_search: self.p_ls,
            p_ignore_pheromone: self.p_p,
            max_iterations: self.iterations,
            stagnation_window: self.stagnation,
            alpha: self.alpha,
            beta: self.beta,
            tau0: self.tau0,
            seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance with one seed and print the result
    Solve {
        instance: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Stop when this cost is reached
        #[arg(long)]
        lb: Option<Cost>,
        /// Sidecar table of lower bounds (name lb per line)
        #[arg(long)]
        lb_table: Option<PathBuf>,
        /// Write the best solution file here
        #[arg(long)]
        solution: Option<PathBuf>,
        /// Write the population trace here
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Run an instance set over several seeds and emit result tables
    Bench {
        instances: Vec<PathBuf>,
        /// Comma-separated seeds, one restart each
        #[arg(long, default_value = "1,2,3", value_delimiter = ',')]
        seeds: Vec<u64>,
        #[arg(long)]
        lb_table: Option<PathBuf>,
        /// Output directory for tables, traces and solutions
        #[arg(long, default_value = "bench-out")]
        out: PathBuf,
        /// Skip writing per-iteration traces
        #[arg(long)]
        no_trace: bool,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Validate a solution file against its instance
    Check { instance: PathBuf, solution: PathBuf },
    /// Print the constructive heuristic costs for an instance
    Construct { instance: PathBuf },
}

fn load_bounds(path: &Option<PathBuf>) -> anyhow::Result<HashMap<String, Cost>> {
    match path {
        Some(p) => load_lb_table(p).with_context(|| format!("reading {}", p.display())),
        None => Ok(HashMap::new()),
    }
}

fn cmd_solve(
    instance: &Path,
    seed: u64,
    lb: Option<Cost>,
    lb_table: &Option<PathBuf>,
    solution_path: &Option<PathBuf>,
    trace_path: &Option<PathBuf>,
    args: &ParamArgs,
) -> anyhow::Result<()> {
    let inst = load_instance(instance)?;
    let bounds = load_bounds(lb_table)?;
    let lb = lb.or_else(|| bounds.get(&inst.name.to_ascii_lowercase()).copied());
    let net = build_network(&inst)?;
    let dist = shortest_paths(&net)?;
    let params = args.to_params(seed);
    params.validate()?;

    let out = carp_aco::colony::run(&net, &dist, &params, lb, !args.serial)?;
    out.best.check(&net, &dist).map_err(anyhow::Error::msg)?;

    println!("instance   {}", inst.name);
    println!("cost       {}", out.best_cost);
    if let Some(lb) = lb {
        println!("lb         {lb}");
        println!("dev        {:.2}%", 100.0 * (out.best_cost - lb) as f64 / lb as f64);
    }
    println!("trips      {}", out.best.trips.len());
    println!("iterations {} (best at {})", out.iterations_run, out.best_iteration);
    println!(
        "time       {:.2}s (best at {:.2}s)",
        out.total_time.as_secs_f64(),
        out.time_to_best.as_secs_f64()
    );

    if let Some(path) = solution_path {
        fs::write(path, write_solution(&net, &dist, &out.best))?;
    }
    if let Some(path) = trace_path {
        fs::write(path, render_trace(&out, params.ants, params.elitist))?;
    }
    Ok(())
}

fn cmd_bench(
    instances: &[PathBuf],
    seeds: &[u64],
    lb_table: &Option<PathBuf>,
    out_dir: &Path,
    no_trace: bool,
    args: &ParamArgs,
) -> anyhow::Result<bool> {
    if instances.is_empty() {
        bail!("no instances given");
    }
    if seeds.is_empty() {
        bail!("no seeds given");
    }
    let mut config = ExperimentConfig::new(instances.to_vec());
    config.seeds = seeds.to_vec();
    config.params = args.to_params(0);
    config.params.validate()?;
    config.lower_bounds = load_bounds(lb_table)?;
    config.keep_traces = !no_trace;
    config.parallel = !args.serial;

    let report = bench::run_experiments(&config);
    let rows = report.rows();
    print!("{}", render_table(&rows, TableFormat::Text));

    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("results.txt"), render_table(&rows, TableFormat::Text))?;
    fs::write(out_dir.join("results.tsv"), render_table(&rows, TableFormat::Delimited))?;
    for rep in &report.reports {
        for (seed, outcome) in &rep.outcomes {
            let stem = format!("{}_s{seed}", rep.row.name);
            fs::write(
                out_dir.join(format!("{stem}.sol.txt")),
                write_solution(&rep.network, &rep.distances, &outcome.best),
            )?;
            if !no_trace {
                fs::write(
                    out_dir.join(format!("{stem}.trace.tsv")),
                    render_trace(outcome, config.params.ants, config.params.elitist),
                )?;
            }
        }
    }

    for (path, err) in &report.failures {
        eprintln!("FAILED {path}: {err}");
    }
    Ok(report.failures.is_empty())
}

fn cmd_construct(instance: &Path) -> anyhow::Result<()> {
    use carp_aco::heuristics::{augment_merge, path_scanning, ulusoy_heuristic, ScanCriterion};
    let inst = load_instance(instance)?;
    let net = build_network(&inst)?;
    let dist = shortest_paths(&net)?;
    let ps_d = path_scanning(&net, &dist, ScanCriterion::MinDistance);
    let ps_p = path_scanning(&net, &dist, ScanCriterion::MaxProductivity);
    let am = augment_merge(&net, &dist);
    let ul = ulusoy_heuristic(&net, &dist);
    println!("path_scanning_distance     {}", ps_d.total_cost);
    println!("path_scanning_productivity {}", ps_p.total_cost);
    println!("augment_merge              {}", am.total_cost);
    println!("ulusoy                     {}", ul.total_cost);
    Ok(())
}

fn cmd_check(instance: &Path, solution: &Path) -> anyhow::Result<bool> {
    let inst = load_instance(instance)?;
    let sol = parse_solution(&fs::read_to_string(solution)?)?;
    if sol.instance != inst.name {
        println!("solution names instance `{}`, file is `{}`", sol.instance, inst.name);
    }
    match check_solution(&inst, &sol) {
        Ok(()) => {
            println!("OK: cost {} over {} trips", sol.cost, sol.trips.len());
            Ok(true)
        }
        Err(errs) => {
            for e in &errs {
                println!("VIOLATION: {e}");
            }
            Ok(false)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve { instance, seed, lb, lb_table, solution, trace, params } => {
            cmd_solve(instance, *seed, *lb, lb_table, solution, trace, params).map(|()| true)
        }
        Command::Bench { instances, seeds, lb_table, out, no_trace, params } => {
            cmd_bench(instances, seeds, lb_table, out, *no_trace, params)
        }
        Command::Check { instance, solution } => cmd_check(instance, solution),
        Command::Construct { instance } => cmd_construct(instance).map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
