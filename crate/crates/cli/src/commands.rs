use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use jsspt_core::external::EndpointSpec;
use jsspt_core::instance::{generate_instance, AgvCount, GenerationConfig, Instance};
use jsspt_core::oracle::{brute_force_oracle, OracleLimits};
use jsspt_core::protocol::Role;
use jsspt_core::rules::RuleRegistry;
use jsspt_metrics::ResultRecord;

use crate::error::CliError;
use crate::experiment::{self, snap_rho};
use crate::plan::{ExperimentPlan, PlannedInstance};
use crate::regress::fit_models;
use crate::table;

pub const OUT_DIR_ENV: &str = "JSSPT_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "jsspt-out";

#[derive(Debug, Parser)]
#[command(name = "jsspt", version, about = "Job-shop scheduling with AGV transport: generation, benchmarks and analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Overrides the plan seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    pub out: Option<PathBuf>,
    /// Experiment plan (JSON). Defaults to the eight-size benchmark configuration.
    #[arg(long, global = true)]
    pub plan: Option<PathBuf>,
    /// Comma-separated combo ids, e.g. `MOR+SCTA,SPT+SPUT`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub solvers: Option<Vec<String>>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RoleArg {
    Joint,
    Operation,
    Agv,
}

impl From<RoleArg> for Role {
    fn from(r: RoleArg) -> Role {
        match r {
            RoleArg::Joint => Role::Joint,
            RoleArg::Operation => Role::Operation,
            RoleArg::Agv => Role::Agv,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write instance documents: one instance with --n/--m/--k, otherwise the plan's benchmark (or grid) set.
    Gen {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// Fleet size; sampled from 3..=n when omitted.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        grid: bool,
    },
    /// Solve one instance document with each solver.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// Also write each schedule as JSON.
        #[arg(long)]
        schedules: bool,
    },
    /// Run every solver on the plan's benchmark instances.
    Bench,
    /// Run the (processing bin x transport bin) grid experiment.
    Grid {
        /// Solver pair `A,B` for the RPI of A against B.
        #[arg(long, value_delimiter = ',')]
        compare: Option<Vec<String>>,
    },
    /// Fit the bottleneck-feature regressions on RPI(A vs B).
    Regress {
        /// Results tables to read.
        #[arg(long, required = true, num_args = 1..)]
        results: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        pair: Vec<String>,
        /// Regress on individual instances instead of (rho, tau) cell means.
        #[arg(long)]
        per_instance: bool,
    },
    /// Evaluate an external policy process on a set of instances.
    EvalExternal {
        /// Command line of the policy process.
        #[arg(long)]
        endpoint: String,
        /// Solver id written to result rows.
        #[arg(long, default_value = "external")]
        name: String,
        #[arg(long, value_enum, default_value = "joint")]
        role: RoleArg,
        /// Built-in rule for the half the endpoint does not decide.
        #[arg(long)]
        rule: Option<String>,
        /// Directory of instance documents; the plan's benchmark set when omitted.
        #[arg(long)]
        instances: Option<PathBuf>,
        /// Per-decision timeout in seconds.
        #[arg(long, default_value_t = 30)]
        timeout: u64,
        /// Results tables to rank together with the external rows.
        #[arg(long, num_args = 1..)]
        merge: Vec<PathBuf>,
    },
    /// Exact optimum of a tiny instance by exhaustive enumeration.
    Oracle {
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 8)]
        max_decisions: usize,
        #[arg(long, default_value_t = 8)]
        max_agvs: usize,
    },
}

/// Resolved global options.
#[derive(Debug, Clone)]
pub struct Context {
    pub plan: ExperimentPlan,
    pub out: PathBuf,
    pub jobs: Option<usize>,
}

impl Context {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let mut plan = match &cli.plan {
            Some(p) => ExperimentPlan::load(p)?,
            None => ExperimentPlan::default(),
        };
        if let Some(seed) = cli.seed {
            plan.seed = seed;
        }
        if let Some(s) = &cli.solvers {
            plan.solvers = s.clone();
        }
        plan.validate()?;
        Ok(Context {
            plan,
            out: cli.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
            jobs: cli.jobs,
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

/// Runs a parsed command line and returns the text to print.
pub fn run(cli: Cli) -> Result<String, CliError> {
    let ctx = Context::from_cli(&cli)?;
    match cli.command {
        Command::Gen { n, m, k, grid } => cmd_gen(&ctx, n, m, k, grid),
        Command::Solve { instance, schedules } => cmd_solve(&ctx, &instance, schedules),
        Command::Bench => cmd_bench(&ctx).map(|o| o.message),
        Command::Grid { compare } => cmd_grid(&ctx, compare),
        Command::Regress { results, pair, per_instance } => cmd_regress(&ctx, &results, &pair, per_instance),
        Command::EvalExternal {
            endpoint,
            name,
            role,
            rule,
            instances,
            timeout,
            merge,
        } => {
            let spec = EndpointSpec::from_command_line(&endpoint, role.into(), Duration::from_secs(timeout))?;
            cmd_eval_external(&ctx, &spec, &name, rule.as_deref(), instances.as_deref(), &merge)
        }
        Command::Oracle {
            instance,
            n,
            m,
            k,
            max_decisions,
            max_agvs,
        } => cmd_oracle(&ctx, instance.as_deref(), n, m, k, OracleLimits { max_decisions, max_agvs }),
    }
}

fn write_instances(dir: &Path, instances: &[PlannedInstance]) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    for p in instances {
        let path = dir.join(format!("{}.json", p.instance.id()));
        fs::write(&path, p.instance.to_json()).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(())
}

pub fn load_instance(path: &Path) -> Result<Instance, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(Instance::from_json(&text)?)
}

/// Instance documents of a directory in file-name order.
pub fn load_instance_dir(dir: &Path) -> Result<Vec<PlannedInstance>, CliError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let instance = load_instance(p)?;
            let cell = instance
                .id()
                .split('-')
                .find(|s| s.starts_with("cell"))
                .map(str::to_string);
            Ok(PlannedInstance { instance, cell })
        })
        .collect()
}

fn single_config(ctx: &Context, n: usize, m: usize, k: Option<usize>) -> GenerationConfig {
    GenerationConfig {
        jobs: n,
        machines: m,
        agvs: k.map_or(AgvCount::SampledFromJobs, AgvCount::Fixed),
        proc_range: ctx.plan.proc_range,
        transport_range: ctx.plan.transport_range,
        seed: ctx.plan.seed,
    }
}

fn cmd_gen(ctx: &Context, n: Option<usize>, m: Option<usize>, k: Option<usize>, grid: bool) -> Result<String, CliError> {
    let dir = ctx.path("instances");
    let instances = match (n, m) {
        (Some(n), Some(m)) => vec![PlannedInstance {
            instance: generate_instance(&single_config(ctx, n, m, k))?,
            cell: None,
        }],
        (None, None) if grid => ctx.plan.grid_instances()?,
        (None, None) => ctx.plan.bench_instances()?,
        _ => return Err(CliError::Plan("--n and --m must be given together".into())),
    };
    write_instances(&dir, &instances)?;
    Ok(format!("wrote {} instance(s) to {}", instances.len(), dir.display()))
}

fn cmd_solve(ctx: &Context, path: &Path, schedules: bool) -> Result<String, CliError> {
    let planned = PlannedInstance {
        instance: load_instance(path)?,
        cell: None,
    };
    let solvers = ctx.plan.resolve_solvers(&RuleRegistry::default())?;
    let mut rows = Vec::new();
    let mut text = String::from("solver,makespan\n");
    for s in &solvers {
        let result = s.solve(&planned.instance, planned.instance.seed())?;
        if schedules {
            let p = ctx.path(&format!("schedules/{}--{}.json", planned.instance.id(), result.solver.replace('+', "_")));
            fs::create_dir_all(p.parent().expect("has parent")).map_err(|e| CliError::io(&p, e))?;
            fs::write(&p, result.to_json()).map_err(|e| CliError::io(&p, e))?;
        }
        text.push_str(&format!("{},{}\n", result.solver, result.makespan));
        rows.push(experiment::record_for(&planned, &result.solver, result.makespan)?);
    }
    table::write_records(&ctx.path("solve.csv"), &rows)?;
    Ok(text)
}

pub struct BenchOutput {
    pub records: Vec<ResultRecord>,
    pub message: String,
}

/// Writes `results.csv`, `summary.csv` and `summary_by_rho.csv`.
pub fn cmd_bench(ctx: &Context) -> Result<BenchOutput, CliError> {
    let registry = RuleRegistry::default();
    let solvers = ctx.plan.resolve_solvers(&registry)?;
    let records = experiment::with_threads(ctx.jobs, || {
        let instances = ctx.plan.bench_instances()?;
        experiment::run_solvers(&instances, &solvers)
    })??;
    table::write_records(&ctx.path("results.csv"), &records)?;
    let summary = experiment::summarize(&records, &registry)?;
    table::write_table(&ctx.path("summary.csv"), &table::SUMMARY_HEADER, &table::summary_rows(&summary))?;

    let mut by_rho = Vec::new();
    for level in jsspt_metrics::formulas::RHO_LEVELS {
        let subset: Vec<ResultRecord> = records.iter().filter(|r| snap_rho(r.rho) == level).cloned().collect();
        if subset.is_empty() {
            continue;
        }
        let s = experiment::summarize(&subset, &registry)?;
        let mut rows: Vec<_> = s.solvers.into_iter().collect();
        rows.sort_by(|a, b| a.solver.cmp(&b.solver));
        for r in rows {
            by_rho.push(vec![
                format!("{level:.1}"),
                r.solver,
                r.instances.to_string(),
                format!("{:.6}", r.rpi_best_mean),
                r.rpi_best_ci.map(|v| format!("{v:.6}")).unwrap_or_default(),
            ]);
        }
    }
    table::write_table(
        &ctx.path("summary_by_rho.csv"),
        &["rho", "solver", "instances", "rpi_best_mean", "rpi_best_ci95"],
        &by_rho,
    )?;
    let message = format!(
        "{} rows; global best {} (win rate {:.6}); tables in {}",
        records.len(),
        summary.global_best,
        summary.global_best_win_rate,
        ctx.out.display()
    );
    Ok(BenchOutput { records, message })
}

fn compare_pair(ctx: &Context, compare: Option<Vec<String>>, solvers: &[String]) -> Result<(String, String), CliError> {
    if let Some(c) = compare {
        return match c.as_slice() {
            [a, b] => Ok((a.clone(), b.clone())),
            _ => Err(CliError::Plan("--compare takes exactly two solver ids".into())),
        };
    }
    if let Some(c) = &ctx.plan.compare {
        return Ok(c.clone());
    }
    match solvers {
        [a, b, ..] => Ok((a.clone(), b.clone())),
        [a] => Ok((a.clone(), a.clone())),
        [] => Err(CliError::Plan("no solvers".into())),
    }
}

/// Writes `grid_results.csv`, `grid_cells.csv` and `grid_heatmap.csv`.
pub fn cmd_grid(ctx: &Context, compare: Option<Vec<String>>) -> Result<String, CliError> {
    let solvers = ctx.plan.resolve_solvers(&RuleRegistry::default())?;
    let ids: Vec<String> = solvers.iter().map(|s| s.id()).collect();
    let (a, b) = compare_pair(ctx, compare, &ids)?;
    for s in [&a, &b] {
        if !ids.contains(s) {
            return Err(CliError::Plan(format!("compared solver {s} is not in the solver set")));
        }
    }
    let records = experiment::with_threads(ctx.jobs, || {
        let instances = ctx.plan.grid_instances()?;
        experiment::run_solvers(&instances, &solvers)
    })??;
    table::write_records(&ctx.path("grid_results.csv"), &records)?;
    let (cells, heatmap) = experiment::grid_tables(&records, &a, &b)?;
    table::write_table(&ctx.path("grid_cells.csv"), &table::CELL_HEADER, &table::cell_rows(&cells))?;
    let (header, rows) = table::heatmap_table(&heatmap);
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    table::write_table(&ctx.path("grid_heatmap.csv"), &header, &rows)?;
    Ok(format!(
        "{} rows over {} cells; RPI of {a} vs {b}; tables in {}",
        records.len(),
        cells.len(),
        ctx.out.display()
    ))
}

/// Writes `regression.txt` and returns its contents.
pub fn cmd_regress(ctx: &Context, results: &[PathBuf], pair: &[String], per_instance: bool) -> Result<String, CliError> {
    let [a, b] = pair else {
        return Err(CliError::Plan("--pair takes exactly two solver ids".into()));
    };
    let mut records = Vec::new();
    for p in results {
        records.extend(table::read_records(p)?);
    }
    let paired = experiment::pair_solvers(&records, a, b)?;
    let points = if per_instance {
        experiment::instance_points(&paired)
    } else {
        experiment::aggregate_points(&paired)
    };
    let suite = fit_models(&points)?;
    let text = format!("# RPI of {a} vs {b} over {} points\n{suite}", suite.points);
    let path = ctx.path("regression.txt");
    fs::create_dir_all(&ctx.out).map_err(|e| CliError::io(&ctx.out, e))?;
    fs::write(&path, &text).map_err(|e| CliError::io(&path, e))?;
    Ok(text)
}

/// Writes `external.csv`, plus `summary.csv` over the merged tables when
/// `merge` is non-empty. Nothing is written if any episode fails.
pub fn cmd_eval_external(
    ctx: &Context,
    spec: &EndpointSpec,
    name: &str,
    rule: Option<&str>,
    dir: Option<&Path>,
    merge: &[PathBuf],
) -> Result<String, CliError> {
    let instances = match dir {
        Some(d) => load_instance_dir(d)?,
        None => ctx.plan.bench_instances()?,
    };
    let rows = experiment::with_threads(ctx.jobs, || experiment::run_external(&instances, name, spec, rule))??;
    let records: Vec<ResultRecord> = rows.into_iter().map(|(r, _)| r).collect();
    table::write_records(&ctx.path("external.csv"), &records)?;
    let mut message = format!("{} external rows in {}", records.len(), ctx.path("external.csv").display());
    if !merge.is_empty() {
        let mut all = Vec::new();
        for p in merge {
            all.extend(table::read_records(p)?);
        }
        all.extend(records);
        let summary = experiment::summarize(&all, &RuleRegistry::default())?;
        table::write_table(&ctx.path("summary.csv"), &table::SUMMARY_HEADER, &table::summary_rows(&summary))?;
        message.push_str(&format!("; merged summary ranks {} solvers", summary.solvers.len()));
    }
    Ok(message)
}

fn cmd_oracle(
    ctx: &Context,
    path: Option<&Path>,
    n: Option<usize>,
    m: Option<usize>,
    k: Option<usize>,
    limits: OracleLimits,
) -> Result<String, CliError> {
    let instance = match (path, n, m) {
        (Some(p), None, None) => load_instance(p)?,
        (None, Some(n), Some(m)) => generate_instance(&single_config(ctx, n, m, Some(k.unwrap_or(1))))?,
        _ => return Err(CliError::Plan("give either --instance or --n and --m".into())),
    };
    let sol = brute_force_oracle(&instance, limits)?;
    let witness: Vec<String> = sol.witness.iter().map(|a| format!("({},{})", a.job, a.agv)).collect();
    Ok(format!(
        "instance {}\noptimum {}\nsequences {}\nwitness {}\n",
        instance.id(),
        sol.makespan,
        sol.sequences_explored,
        witness.join(" ")
    ))
}
