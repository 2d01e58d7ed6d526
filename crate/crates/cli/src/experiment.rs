//! Running solvers over instance sets and reducing the results.

use std::collections::{BTreeMap, HashMap};

use jsspt_core::engine::ScheduleResult;
use jsspt_core::external::{EndpointSpec, ExternalPolicy};
use jsspt_core::policy::run_episode;
use jsspt_core::rules::{ComboSolver, RuleRegistry};
use jsspt_core::engine::DEFAULT_REWARD_SCALE;
use jsspt_metrics::formulas::{tau_levels, RHO_LEVELS};
use jsspt_metrics::stats::{aggregate_ci, mean};
use jsspt_metrics::{rpi, win, ResultRecord};
use rayon::prelude::*;

use crate::error::CliError;
use crate::plan::PlannedInstance;

/// Combo preferred when several combos share the top win rate.
pub const PREFERRED_GLOBAL_BEST: &str = "MOR+SCTA";

pub fn record_for(planned: &PlannedInstance, solver: &str, makespan: u64) -> Result<ResultRecord, CliError> {
    let inst = &planned.instance;
    Ok(ResultRecord::new(
        inst.id(),
        solver,
        makespan,
        (inst.jobs(), inst.machines(), inst.agvs()),
        inst.mean_processing_time(),
        inst.mean_transport_time(),
        planned.cell.clone(),
        inst.seed(),
    )?)
}

/// Runs `f` on a pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(CliError::Plan("--jobs must be >= 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Plan(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// One row per (instance, solver), instance-major in input order. Each
/// episode is seeded with its instance seed.
pub fn run_solvers(instances: &[PlannedInstance], solvers: &[ComboSolver]) -> Result<Vec<ResultRecord>, CliError> {
    let per_instance: Vec<Vec<ResultRecord>> = instances
        .par_iter()
        .map(|planned| {
            solvers
                .iter()
                .map(|s| {
                    let result = s.solve(&planned.instance, planned.instance.seed())?;
                    record_for(planned, &result.solver, result.makespan)
                })
                .collect::<Result<Vec<_>, CliError>>()
        })
        .collect::<Result<_, _>>()?;
    Ok(per_instance.into_iter().flatten().collect())
}

/// Builds the policy that talks to `spec`, completing single-role endpoints
/// with the built-in rule named `companion`.
pub fn external_policy(
    name: &str,
    spec: &EndpointSpec,
    companion: Option<&str>,
    registry: &RuleRegistry,
) -> Result<ExternalPolicy, CliError> {
    use jsspt_core::protocol::Role;
    let mut policy = ExternalPolicy::new(name, spec.clone());
    match (spec.role, companion) {
        (Role::Joint, _) => {}
        (Role::Operation, Some(rule)) => {
            let r = registry
                .agv(rule)
                .ok_or_else(|| CliError::Plan(format!("unknown AGV rule `{rule}`")))?;
            policy = policy.with_agv_rule(r);
        }
        (Role::Agv, Some(rule)) => {
            let r = registry
                .operation(rule)
                .ok_or_else(|| CliError::Plan(format!("unknown operation rule `{rule}`")))?;
            policy = policy.with_operation_rule(r);
        }
        (_, None) => return Err(CliError::Plan("single-role endpoints need --rule for the other half".into())),
    }
    Ok(policy)
}

/// Evaluates an external endpoint on every instance. Any failure aborts the
/// whole evaluation and yields no rows.
pub fn run_external(
    instances: &[PlannedInstance],
    name: &str,
    spec: &EndpointSpec,
    companion: Option<&str>,
) -> Result<Vec<(ResultRecord, ScheduleResult)>, CliError> {
    let registry = RuleRegistry::default();
    external_policy(name, spec, companion, &registry)?;
    instances
        .par_iter()
        .map(|planned| {
            let mut policy = external_policy(name, spec, companion, &registry)?;
            let trace = run_episode(&planned.instance, &mut policy, planned.instance.seed(), DEFAULT_REWARD_SCALE)?;
            Ok((record_for(planned, name, trace.makespan)?, trace.result))
        })
        .collect()
}

/// Rows grouped by instance in first-seen order.
fn by_instance(records: &[ResultRecord]) -> Vec<(&str, Vec<&ResultRecord>)> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: HashMap<&str, Vec<&ResultRecord>> = HashMap::new();
    for r in records {
        let entry = groups.entry(r.instance_id.as_str()).or_default();
        if entry.is_empty() {
            order.push(r.instance_id.as_str());
        }
        entry.push(r);
    }
    order
        .into_iter()
        .map(|id| {
            let rows = groups.remove(id).unwrap_or_default();
            (id, rows)
        })
        .collect()
}

fn solver_order(records: &[ResultRecord]) -> Vec<String> {
    let mut seen = Vec::new();
    for r in records {
        if !seen.contains(&r.solver) {
            seen.push(r.solver.clone());
        }
    }
    seen
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSummary {
    pub solver: String,
    pub instances: usize,
    pub rpi_best_mean: f64,
    /// Absent with fewer than two instances.
    pub rpi_best_ci: Option<f64>,
    pub rpi_global_mean: f64,
    pub rpi_global_ci: Option<f64>,
    pub win_rate_vs_global: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSummary {
    pub global_best: String,
    pub global_best_win_rate: f64,
    /// Ranked by mean RPI against the global best, then by id.
    pub solvers: Vec<SolverSummary>,
}

/// Per-solver RPI against the per-instance best dispatching-rule combo and
/// against the combo with the highest win rate. Every solver must appear on
/// every instance; rows from external solvers are ranked like any other.
pub fn summarize(records: &[ResultRecord], registry: &RuleRegistry) -> Result<BenchSummary, CliError> {
    let solvers = solver_order(records);
    let rule_combos: Vec<&String> = solvers.iter().filter(|s| registry.combo(s).is_ok()).collect();
    if rule_combos.is_empty() {
        return Err(CliError::Join("summary needs at least one dispatching-rule combo".into()));
    }
    let groups = by_instance(records);
    let mut table: Vec<HashMap<&str, f64>> = Vec::with_capacity(groups.len());
    for (id, rows) in &groups {
        let mut row = HashMap::new();
        for r in rows {
            if row.insert(r.solver.as_str(), r.makespan as f64).is_some() {
                return Err(CliError::Join(format!("duplicate row for {} on {id}", r.solver)));
            }
        }
        for s in &solvers {
            if !row.contains_key(s.as_str()) {
                return Err(CliError::Join(format!("solver {s} has no row for instance {id}")));
            }
        }
        table.push(row);
    }

    let win_rate = |c: &str| {
        let mut wins = 0u64;
        let mut total = 0u64;
        for row in &table {
            for d in &rule_combos {
                if d.as_str() != c {
                    wins += u64::from(win(row[c], row[d.as_str()]));
                    total += 1;
                }
            }
        }
        if total == 0 {
            0.0
        } else {
            wins as f64 / total as f64
        }
    };
    let rates: Vec<(String, f64)> = rule_combos.iter().map(|c| ((*c).clone(), win_rate(c))).collect();
    let top = rates.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let mut tied: Vec<&String> = rates.iter().filter(|r| r.1 == top).map(|r| &r.0).collect();
    tied.sort();
    let global_best = tied
        .iter()
        .find(|s| s.as_str() == PREFERRED_GLOBAL_BEST)
        .copied()
        .unwrap_or(tied[0])
        .clone();

    let mut out = Vec::new();
    for s in &solvers {
        let mut vs_best = Vec::with_capacity(table.len());
        let mut vs_global = Vec::with_capacity(table.len());
        let mut wins = Vec::with_capacity(table.len());
        for row in &table {
            let best = rule_combos
                .iter()
                .map(|c| row[c.as_str()])
                .fold(f64::INFINITY, f64::min);
            let c = row[s.as_str()];
            vs_best.push(rpi(c, best)?);
            vs_global.push(rpi(c, row[global_best.as_str()])?);
            wins.push(win(c, row[global_best.as_str()]) as f64);
        }
        out.push(SolverSummary {
            solver: s.clone(),
            instances: table.len(),
            rpi_best_mean: mean(&vs_best),
            rpi_best_ci: aggregate_ci(&vs_best, 0.95).ok().map(|c| c.half_width),
            rpi_global_mean: mean(&vs_global),
            rpi_global_ci: aggregate_ci(&vs_global, 0.95).ok().map(|c| c.half_width),
            win_rate_vs_global: mean(&wins),
        });
    }
    out.sort_by(|a, b| {
        b.rpi_global_mean
            .total_cmp(&a.rpi_global_mean)
            .then_with(|| a.solver.cmp(&b.solver))
    });
    Ok(BenchSummary {
        global_best,
        global_best_win_rate: top,
        solvers: out,
    })
}

/// Nearest benchmark rho level.
pub fn snap_rho(rho: f64) -> f64 {
    RHO_LEVELS
        .iter()
        .copied()
        .min_by(|a, b| (a - rho).abs().total_cmp(&(b - rho).abs()))
        .expect("levels are non-empty")
}

/// `tau` rounded to the heatmap's 0.1 grid, as an integer tenth.
pub fn tau_tenths(tau: f64) -> i64 {
    (tau * 10.0).round() as i64
}

fn rho_tenths(rho: f64) -> i64 {
    (snap_rho(rho) * 10.0).round() as i64
}

/// RPI of solver `a` against solver `b` on one instance.
#[derive(Debug, Clone)]
pub struct PairedPoint<'a> {
    pub record: &'a ResultRecord,
    pub makespan_b: u64,
    pub rpi: f64,
}

/// Joins the rows of `a` and `b` on instance id.
pub fn pair_solvers<'a>(records: &'a [ResultRecord], a: &str, b: &str) -> Result<Vec<PairedPoint<'a>>, CliError> {
    for s in [a, b] {
        if !records.iter().any(|r| r.solver == s) {
            return Err(CliError::Join(format!("solver {s} does not appear in the results")));
        }
    }
    let mut out = Vec::new();
    for (id, rows) in by_instance(records) {
        let ra = rows.iter().find(|r| r.solver == a);
        let rb = rows.iter().find(|r| r.solver == b);
        match (ra, rb) {
            (Some(ra), Some(rb)) => out.push(PairedPoint {
                record: ra,
                makespan_b: rb.makespan,
                rpi: rpi(ra.makespan as f64, rb.makespan as f64)?,
            }),
            (None, None) => {}
            _ => return Err(CliError::Join(format!("instance {id} lacks a row for {a} or {b}"))),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellAggregate {
    pub size: String,
    pub cell: String,
    pub instances: usize,
    pub mean_tau: Option<f64>,
    pub mean_makespan_a: f64,
    pub mean_makespan_b: f64,
    pub mean_rpi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    /// Rows from `tau = 1.0` down to `-1.0`.
    pub tau: Vec<f64>,
    pub rho: Vec<f64>,
    /// `mean[row][col]`, absent where no instance falls.
    pub mean: Vec<Vec<Option<f64>>>,
    pub count: Vec<Vec<usize>>,
}

/// Per-(size, cell) aggregates and the (rho, tau) heatmap of RPI(a vs b).
pub fn grid_tables(records: &[ResultRecord], a: &str, b: &str) -> Result<(Vec<CellAggregate>, Heatmap), CliError> {
    let points = pair_solvers(records, a, b)?;
    let mut cells: BTreeMap<(usize, usize, String), Vec<&PairedPoint>> = BTreeMap::new();
    for p in &points {
        let cell = p
            .record
            .cell
            .clone()
            .ok_or_else(|| CliError::Join(format!("instance {} has no grid cell", p.record.instance_id)))?;
        cells.entry((p.record.n, p.record.m, cell)).or_default().push(p);
    }
    let mut aggregates = Vec::new();
    for ((n, m, cell), pts) in cells {
        let taus: Vec<f64> = pts.iter().filter_map(|p| p.record.tau).collect();
        let values = |f: &dyn Fn(&PairedPoint) -> f64| mean(&pts.iter().map(|p| f(p)).collect::<Vec<_>>());
        aggregates.push(CellAggregate {
            size: format!("{n}x{m}"),
            cell,
            instances: pts.len(),
            mean_tau: (!taus.is_empty()).then(|| mean(&taus)),
            mean_makespan_a: values(&|p| p.record.makespan as f64),
            mean_makespan_b: values(&|p| p.makespan_b as f64),
            mean_rpi: values(&|p| p.rpi),
        });
    }
    aggregates.sort_by(|x, y| {
        let key = |c: &CellAggregate| {
            let (n, m) = c.size.split_once('x').map(|(n, m)| (n.parse::<usize>().unwrap_or(0), m.parse::<usize>().unwrap_or(0))).unwrap_or((0, 0));
            let (p, t) = c.cell.trim_start_matches("cell").split_once('_').map(|(p, t)| (p.parse::<usize>().unwrap_or(0), t.parse::<usize>().unwrap_or(0))).unwrap_or((0, 0));
            (n, m, p, t)
        };
        key(x).cmp(&key(y))
    });

    let tau: Vec<f64> = tau_levels().into_iter().rev().collect();
    let rho = RHO_LEVELS.to_vec();
    let mut sums = vec![vec![0.0; rho.len()]; tau.len()];
    let mut count = vec![vec![0usize; rho.len()]; tau.len()];
    for p in &points {
        let Some(t) = p.record.tau else { continue };
        let row = (10 - tau_tenths(t)) as usize;
        let col = RHO_LEVELS.iter().position(|&r| r == snap_rho(p.record.rho)).expect("snapped");
        sums[row][col] += p.rpi;
        count[row][col] += 1;
    }
    let mean = sums
        .iter()
        .zip(&count)
        .map(|(s, c)| s.iter().zip(c).map(|(s, &c)| (c > 0).then(|| s / c as f64)).collect())
        .collect();
    Ok((aggregates, Heatmap { tau, rho, mean, count }))
}

/// A regression observation: the paired RPI at one (rho, tau) location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionPoint {
    pub rho: f64,
    pub tau: f64,
    pub rpi: f64,
}

/// Mean RPI per (rho level, tau tenth). Instances with undefined tau are
/// dropped. Points come out ordered by rho, then tau.
pub fn aggregate_points(points: &[PairedPoint]) -> Vec<RegressionPoint> {
    let mut acc: BTreeMap<(i64, i64), Vec<f64>> = BTreeMap::new();
    for p in points {
        if let Some(t) = p.record.tau {
            acc.entry((rho_tenths(p.record.rho), tau_tenths(t))).or_default().push(p.rpi);
        }
    }
    acc.into_iter()
        .map(|((r, t), v)| RegressionPoint {
            rho: r as f64 / 10.0,
            tau: t as f64 / 10.0,
            rpi: mean(&v),
        })
        .collect()
}

pub fn instance_points(points: &[PairedPoint]) -> Vec<RegressionPoint> {
    points
        .iter()
        .filter_map(|p| {
            p.record.tau.map(|tau| RegressionPoint {
                rho: p.record.rho,
                tau,
                rpi: p.rpi,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, solver: &str, makespan: u64) -> ResultRecord {
        ResultRecord::new(id, solver, makespan, (5, 2, 3), 50.0, 20.0, Some("cell4_1".into()), 0).unwrap()
    }

    #[test]
    fn summary_prefers_mor_scta_on_ties() {
        let rows = vec![
            rec("a", "SPT+SCTA", 10),
            rec("a", "MOR+SCTA", 10),
            rec("a", "ext", 9),
            rec("b", "SPT+SCTA", 12),
            rec("b", "MOR+SCTA", 12),
            rec("b", "ext", 13),
        ];
        let s = summarize(&rows, &RuleRegistry::default()).unwrap();
        assert_eq!(s.global_best, "MOR+SCTA");
        let ext = s.solvers.iter().find(|x| x.solver == "ext").unwrap();
        let expect = (10.0 + -100.0 / 12.0) / 2.0;
        assert!((ext.rpi_best_mean - expect).abs() < 1e-12);
        assert_eq!(ext.win_rate_vs_global, 0.5);
        let best = s.solvers.iter().find(|x| x.solver == "SPT+SCTA").unwrap();
        assert_eq!(best.rpi_best_mean, 0.0);
    }

    #[test]
    fn summary_rejects_missing_rows() {
        let rows = vec![rec("a", "SPT+SCTA", 10), rec("a", "MOR+SCTA", 10), rec("b", "SPT+SCTA", 12)];
        assert!(matches!(summarize(&rows, &RuleRegistry::default()), Err(CliError::Join(_))));
    }

    #[test]
    fn pairing() {
        let rows = vec![rec("a", "x", 90), rec("a", "y", 100), rec("b", "x", 100), rec("b", "y", 100)];
        let pts = pair_solvers(&rows, "x", "y").unwrap();
        assert_eq!(pts.iter().map(|p| p.rpi).collect::<Vec<_>>(), vec![10.0, 0.0]);
        assert!(pair_solvers(&rows, "x", "z").is_err());
        let same = pair_solvers(&rows, "x", "x").unwrap();
        assert!(same.iter().all(|p| p.rpi == 0.0));
        let partial = vec![rec("a", "x", 1), rec("a", "y", 1), rec("b", "x", 1)];
        assert!(pair_solvers(&partial, "x", "y").is_err());
    }

    #[test]
    fn snapping() {
        assert_eq!(snap_rho(14.0 / 12.0), 1.2);
        assert_eq!(snap_rho(0.29), 0.2);
        assert_eq!(tau_tenths(-0.96), -10);
        assert_eq!(tau_tenths(0.04), 0);
    }
}
