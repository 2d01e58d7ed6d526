use std::path::Path;

use jsspt_core::instance::{
    generate_instance, instance_id, AgvCount, DecadeBin, GenerationConfig, Instance, Time,
};
use jsspt_core::rules::{ComboSolver, RuleRegistry};
use jsspt_metrics::formulas::RHO_LEVELS;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Grid seeds start here so they never collide with benchmark seeds.
const GRID_SEED_OFFSET: u64 = 1 << 32;

/// Fleet sizes for `n` jobs, largest first: `max(1, round(rho * n))` for
/// every benchmark rho level.
pub fn agv_ladder(n: usize) -> Vec<usize> {
    RHO_LEVELS
        .iter()
        .rev()
        .map(|r| ((r * n as f64).round() as usize).max(1))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeConfig {
    pub jobs: usize,
    pub machines: usize,
    /// Explicit fleet sizes; the rho ladder when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agvs: Option<Vec<usize>>,
}

impl SizeConfig {
    pub fn new(jobs: usize, machines: usize) -> Self {
        SizeConfig {
            jobs,
            machines,
            agvs: None,
        }
    }

    pub fn with_agvs(jobs: usize, machines: usize, agvs: Vec<usize>) -> Self {
        SizeConfig {
            jobs,
            machines,
            agvs: Some(agvs),
        }
    }

    pub fn ladder(&self) -> Vec<usize> {
        self.agvs.clone().unwrap_or_else(|| agv_ladder(self.jobs))
    }

    pub fn label(&self) -> String {
        format!("{}x{}", self.jobs, self.machines)
    }
}

fn default_sizes() -> Vec<SizeConfig> {
    [(15, 10), (10, 10), (12, 12), (14, 14), (20, 5), (5, 10), (15, 15), (30, 10)]
        .into_iter()
        .map(|(n, m)| SizeConfig::new(n, m))
        .collect()
}

fn default_instances() -> usize {
    100
}

fn default_cell_instances() -> usize {
    20
}

fn default_range() -> (Time, Time) {
    (1, 100)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    #[serde(default = "default_sizes")]
    pub sizes: Vec<SizeConfig>,
    /// Benchmark instances per (size, fleet) configuration.
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default = "default_cell_instances")]
    pub grid_instances_per_cell: usize,
    /// Combo ids such as `MOR+SCTA`; every registered combo when empty.
    #[serde(default)]
    pub solvers: Vec<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_range")]
    pub proc_range: (Time, Time),
    #[serde(default = "default_range")]
    pub transport_range: (Time, Time),
    /// Solver pair `(a, b)` for grid RPI; the first two solvers when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<(String, String)>,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        ExperimentPlan {
            sizes: default_sizes(),
            instances: default_instances(),
            grid_instances_per_cell: default_cell_instances(),
            solvers: Vec::new(),
            seed: 0,
            proc_range: default_range(),
            transport_range: default_range(),
            compare: None,
        }
    }
}

/// A generated instance plus the grid cell it was drawn for.
#[derive(Debug, Clone)]
pub struct PlannedInstance {
    pub instance: Instance,
    pub cell: Option<String>,
}

impl ExperimentPlan {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let plan: ExperimentPlan =
            serde_json::from_str(text).map_err(|e| CliError::Plan(format!("invalid plan: {e}")))?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.sizes.is_empty() {
            return Err(CliError::Plan("plan has no sizes".into()));
        }
        for s in &self.sizes {
            if s.jobs == 0 || s.machines == 0 {
                return Err(CliError::Plan(format!("size {} must have n, m >= 1", s.label())));
            }
            let ladder = s.ladder();
            if ladder.is_empty() || ladder.contains(&0) {
                return Err(CliError::Plan(format!("size {}: fleet sizes must be >= 1", s.label())));
            }
        }
        for (name, (lo, hi)) in [("proc_range", self.proc_range), ("transport_range", self.transport_range)] {
            if lo < 1 || hi > 100 || lo > hi {
                return Err(CliError::Plan(format!("{name} must satisfy 1 <= lo <= hi <= 100")));
            }
        }
        if self.instances == 0 {
            return Err(CliError::Plan("instances must be >= 1".into()));
        }
        self.resolve_solvers(&RuleRegistry::default())?;
        Ok(())
    }

    pub fn resolve_solvers(&self, registry: &RuleRegistry) -> Result<Vec<ComboSolver>, CliError> {
        if self.solvers.is_empty() {
            return Ok(registry.combos());
        }
        self.solvers
            .iter()
            .map(|id| registry.combo(id).map_err(|e| CliError::Plan(e.to_string())))
            .collect()
    }

    /// Benchmark instances ordered by size, fleet size, then index. Instance
    /// seeds are `seed, seed + 1, ...` in that order.
    pub fn bench_instances(&self) -> Result<Vec<PlannedInstance>, CliError> {
        let mut out = Vec::new();
        let mut next = self.seed;
        for size in &self.sizes {
            for k in size.ladder() {
                for _ in 0..self.instances {
                    let config = GenerationConfig {
                        jobs: size.jobs,
                        machines: size.machines,
                        agvs: AgvCount::Fixed(k),
                        proc_range: self.proc_range,
                        transport_range: self.transport_range,
                        seed: next,
                    };
                    next = next.wrapping_add(1);
                    out.push(PlannedInstance {
                        instance: generate_instance(&config)?,
                        cell: None,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Grid instances: for every size and each of the 100 decade cells,
    /// `grid_instances_per_cell` instances whose fleet sizes cycle through the
    /// size's ladder.
    pub fn grid_instances(&self) -> Result<Vec<PlannedInstance>, CliError> {
        let mut out = Vec::new();
        let mut next = self.seed.wrapping_add(GRID_SEED_OFFSET);
        for size in &self.sizes {
            let ladder = size.ladder();
            for p in DecadeBin::all() {
                for t in DecadeBin::all() {
                    let cell = format!("cell{}_{}", p.index(), t.index());
                    for i in 0..self.grid_instances_per_cell {
                        let k = ladder[i % ladder.len()];
                        let seed = next;
                        next = next.wrapping_add(1);
                        let config = GenerationConfig {
                            jobs: size.jobs,
                            machines: size.machines,
                            agvs: AgvCount::Fixed(k),
                            proc_range: p.range(),
                            transport_range: t.range(),
                            seed,
                        };
                        let id = format!("{}-{cell}-i{i}", instance_id(size.jobs, size.machines, k, seed));
                        let instance = generate_instance(&config)?.with_agvs(k, id)?;
                        out.push(PlannedInstance {
                            instance,
                            cell: Some(cell.clone()),
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn benchmark_ladders() {
        let expect: [((usize, usize), [usize; 6]); 8] = [
            ((15, 10), [18, 15, 12, 9, 6, 3]),
            ((10, 10), [12, 10, 8, 6, 4, 2]),
            ((12, 12), [14, 12, 10, 7, 5, 2]),
            ((14, 14), [17, 14, 11, 8, 6, 3]),
            ((20, 5), [24, 20, 16, 12, 8, 4]),
            ((5, 10), [6, 5, 4, 3, 2, 1]),
            ((15, 15), [18, 15, 12, 9, 6, 3]),
            ((30, 10), [36, 30, 24, 18, 12, 6]),
        ];
        let plan = ExperimentPlan::default();
        for (size, (nm, ladder)) in plan.sizes.iter().zip(expect) {
            assert_eq!((size.jobs, size.machines), nm);
            assert_eq!(size.ladder(), ladder.to_vec());
        }
        assert_eq!(agv_ladder(1), vec![1; 6]);
    }

    #[test]
    fn plan_json_defaults_and_validation() {
        let plan = ExperimentPlan::from_json(r#"{"sizes": [{"jobs": 3, "machines": 2}], "instances": 2}"#).unwrap();
        assert_eq!(plan.grid_instances_per_cell, 20);
        assert_eq!(plan.bench_instances().unwrap().len(), 12);
        assert_eq!(ExperimentPlan::from_json(&plan.to_json()).unwrap(), plan);
        assert!(ExperimentPlan::from_json(r#"{"sizes": []}"#).is_err());
        assert!(ExperimentPlan::from_json(r#"{"solvers": ["SPT+NOPE"]}"#).is_err());
        assert!(ExperimentPlan::from_json(r#"{"bogus": 1}"#).is_err());
        assert!(ExperimentPlan::from_json(r#"{"proc_range": [0, 10]}"#).is_err());
    }

    #[test]
    fn grid_instance_count_and_ids() {
        let plan = ExperimentPlan {
            sizes: vec![SizeConfig::new(2, 2), SizeConfig::new(3, 1)],
            grid_instances_per_cell: 3,
            ..ExperimentPlan::default()
        };
        let grid = plan.grid_instances().unwrap();
        assert_eq!(grid.len(), 2 * 100 * 3);
        let first = &grid[0].instance;
        assert!(first.id().ends_with("-cell0_0-i0"), "{}", first.id());
        assert_eq!(grid[0].cell.as_deref(), Some("cell0_0"));
        // Fleet sizes cycle through the ladder, largest first.
        assert_eq!(grid[0].instance.agvs(), 2);
        assert_eq!(grid[1].instance.agvs(), 2);
        assert_eq!(grid[2].instance.agvs(), 2);
        assert_eq!(agv_ladder(2), vec![2, 2, 2, 1, 1, 1]);
        let ids: std::collections::HashSet<&str> = grid.iter().map(|g| g.instance.id()).collect();
        assert_eq!(ids.len(), grid.len());
    }
}
