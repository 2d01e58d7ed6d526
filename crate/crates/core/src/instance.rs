//! Problem instances: definition, validation, random generation and the JSON
//! document format.
//!
//! Locations are indexed in a fixed order shared by every component:
//! `0` is the load machine, `1` the unload machine and `2..m+2` the
//! processing machines `M_1..M_m`. Routings store 0-based processing-machine
//! indices, so routed machine `r` lives at location `r + 2`.

use std::fmt;
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::InstanceError;

/// Integer time unit used throughout the engine.
pub type Time = u64;

/// Largest admissible generated duration.
pub const TIME_DOMAIN: RangeInclusive<Time> = 1..=100;

/// Index into the `(m + 2) x (m + 2)` transport matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Location(pub usize);

impl Location {
    pub const LOAD: Location = Location(0);
    pub const UNLOAD: Location = Location(1);

    /// Location of 0-based processing machine `index`.
    pub const fn machine(index: usize) -> Location {
        Location(index + 2)
    }

    /// The processing-machine index, or `None` for load/unload.
    pub fn processing_index(self) -> Option<usize> {
        self.0.checked_sub(2)
    }

    pub fn is_processing(self) -> bool {
        self.0 >= 2
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => f.write_str("load"),
            1 => f.write_str("unload"),
            i => write!(f, "M{}", i - 1),
        }
    }
}

/// An immutable JSSPT instance.
///
/// Every job visits all `m` processing machines in its own order, and each
/// job has `m + 1` operations: `m` processing operations followed by the
/// release at the unload machine whose processing time is always zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    id: String,
    seed: u64,
    jobs: usize,
    machines: usize,
    agvs: usize,
    routings: Vec<Vec<usize>>,
    proc_times: Vec<Vec<Time>>,
    transport: Vec<Time>,
}

impl Instance {
    /// Builds and validates an instance. `proc_times[j]` has `m + 1` entries
    /// and `transport` is the row-major `(m + 2)^2` matrix.
    pub fn new(
        id: impl Into<String>,
        seed: u64,
        agvs: usize,
        routings: Vec<Vec<usize>>,
        proc_times: Vec<Vec<Time>>,
        transport: Vec<Time>,
    ) -> Result<Self, InstanceError> {
        let jobs = routings.len();
        let machines = routings.first().map_or(0, Vec::len);
        let inst = Instance {
            id: id.into(),
            seed,
            jobs,
            machines,
            agvs,
            routings,
            proc_times,
            transport,
        };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<(), InstanceError> {
        let (n, m) = (self.jobs, self.machines);
        if n == 0 {
            return Err(InstanceError::field("routings", "at least one job is required"));
        }
        if m == 0 {
            return Err(InstanceError::field("routings", "at least one machine is required"));
        }
        if self.agvs == 0 {
            return Err(InstanceError::field("k", "at least one AGV is required"));
        }
        for (j, routing) in self.routings.iter().enumerate() {
            if routing.len() != m {
                return Err(InstanceError::field(
                    format!("routings[{j}]"),
                    format!("expected {m} machines, found {}", routing.len()),
                ));
            }
            let mut seen = vec![false; m];
            for &r in routing {
                if r >= m || seen[r] {
                    return Err(InstanceError::field(
                        format!("routings[{j}]"),
                        format!("not a permutation of 0..{m}"),
                    ));
                }
                seen[r] = true;
            }
        }
        if self.proc_times.len() != n {
            return Err(InstanceError::field(
                "proc_times",
                format!("expected {n} rows, found {}", self.proc_times.len()),
            ));
        }
        for (j, row) in self.proc_times.iter().enumerate() {
            if row.len() != m + 1 {
                return Err(InstanceError::field(
                    format!("proc_times[{j}]"),
                    format!("expected {} entries, found {}", m + 1, row.len()),
                ));
            }
            if let Some(i) = row[..m].iter().position(|&p| p == 0) {
                return Err(InstanceError::field(
                    format!("proc_times[{j}][{i}]"),
                    "processing times of routed operations must be at least 1",
                ));
            }
            if row[m] != 0 {
                return Err(InstanceError::field(
                    format!("proc_times[{j}][{m}]"),
                    "the unload operation must have processing time 0",
                ));
            }
        }
        let side = m + 2;
        if self.transport.len() != side * side {
            return Err(InstanceError::field(
                "transport",
                format!("expected {} entries, found {}", side * side, self.transport.len()),
            ));
        }
        for a in 0..side {
            if self.transport[a * side + a] != 0 {
                return Err(InstanceError::field(
                    format!("transport[{a}][{a}]"),
                    "diagonal entries must be 0",
                ));
            }
        }
        Ok(())
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of jobs `n`.
    pub fn jobs(&self) -> usize {
        self.jobs
    }

    /// Number of processing machines `m`.
    pub fn machines(&self) -> usize {
        self.machines
    }

    /// Fleet size `k`.
    pub fn agvs(&self) -> usize {
        self.agvs
    }

    /// Operations per job, counting the unload release.
    pub fn ops_per_job(&self) -> usize {
        self.machines + 1
    }

    pub fn total_operations(&self) -> usize {
        self.jobs * self.ops_per_job()
    }

    /// Number of locations in the transport matrix (`m + 2`).
    pub fn locations(&self) -> usize {
        self.machines + 2
    }

    pub fn routing(&self, job: usize) -> &[usize] {
        &self.routings[job]
    }

    pub fn routings(&self) -> &[Vec<usize>] {
        &self.routings
    }

    pub fn proc_times(&self) -> &[Vec<Time>] {
        &self.proc_times
    }

    pub fn transport_matrix(&self) -> &[Time] {
        &self.transport
    }

    /// Processing time of 0-based operation `op` of `job`.
    pub fn proc_time(&self, job: usize, op: usize) -> Time {
        self.proc_times[job][op]
    }

    /// Where operation `op` of `job` is processed.
    pub fn location_of(&self, job: usize, op: usize) -> Location {
        if op < self.machines {
            Location::machine(self.routings[job][op])
        } else {
            Location::UNLOAD
        }
    }

    /// Where the job sits before operation `op` is transported.
    pub fn source_of(&self, job: usize, op: usize) -> Location {
        if op == 0 {
            Location::LOAD
        } else {
            self.location_of(job, op - 1)
        }
    }

    pub fn travel(&self, from: Location, to: Location) -> Time {
        self.transport[from.0 * self.locations() + to.0]
    }

    /// Contention-free critical path of `job`, transports included.
    pub fn job_path_length(&self, job: usize) -> Time {
        (0..self.ops_per_job())
            .map(|op| {
                self.proc_time(job, op)
                    + self.travel(self.source_of(job, op), self.location_of(job, op))
            })
            .sum()
    }

    /// Makespan lower bound: the longest job critical path.
    pub fn lower_bound(&self) -> Time {
        (0..self.jobs).map(|j| self.job_path_length(j)).max().unwrap_or(0)
    }

    /// Mean processing time over the routed operations (unload excluded).
    pub fn mean_processing_time(&self) -> f64 {
        let m = self.machines;
        let total: Time = self.proc_times.iter().map(|row| row[..m].iter().sum::<Time>()).sum();
        total as f64 / (self.jobs * m) as f64
    }

    /// Mean over all off-diagonal transport entries.
    pub fn mean_transport_time(&self) -> f64 {
        let side = self.locations();
        let mut total: Time = 0;
        for a in 0..side {
            for b in 0..side {
                if a != b {
                    total += self.transport[a * side + b];
                }
            }
        }
        total as f64 / (side * (side - 1)) as f64
    }

    /// Copy of this instance with a different fleet size; the id is rebuilt
    /// to reflect the new `k`.
    pub fn with_agvs(&self, agvs: usize, id: impl Into<String>) -> Result<Instance, InstanceError> {
        Instance::new(
            id,
            self.seed,
            agvs,
            self.routings.clone(),
            self.proc_times.clone(),
            self.transport.clone(),
        )
    }

    pub fn to_document(&self) -> InstanceDocument {
        let side = self.locations();
        InstanceDocument {
            id: self.id.clone(),
            n: self.jobs as i64,
            m: self.machines as i64,
            k: self.agvs as i64,
            routings: self
                .routings
                .iter()
                .map(|r| r.iter().map(|&x| x as i64).collect())
                .collect(),
            proc_times: self
                .proc_times
                .iter()
                .map(|r| r.iter().map(|&x| x as i64).collect())
                .collect(),
            transport: self
                .transport
                .chunks(side)
                .map(|r| r.iter().map(|&x| x as i64).collect())
                .collect(),
            seed: self.seed,
        }
    }

    /// Pretty-printed JSON document. Byte-stable for a given instance.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("instance document serializes")
    }

    pub fn from_json(text: &str) -> Result<Instance, InstanceError> {
        let doc: InstanceDocument =
            serde_json::from_str(text).map_err(|e| InstanceError::Parse(e.to_string()))?;
        Instance::try_from(doc)
    }
}

/// On-disk form of an [`Instance`]. Integers are signed so that negative
/// values reach validation and are reported against their field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub id: String,
    pub n: i64,
    pub m: i64,
    pub k: i64,
    pub routings: Vec<Vec<i64>>,
    pub proc_times: Vec<Vec<i64>>,
    pub transport: Vec<Vec<i64>>,
    pub seed: u64,
}

fn non_negative(field: String, value: i64) -> Result<u64, InstanceError> {
    u64::try_from(value).map_err(|_| InstanceError::field(field, format!("{value} is negative")))
}

impl TryFrom<InstanceDocument> for Instance {
    type Error = InstanceError;

    fn try_from(doc: InstanceDocument) -> Result<Self, Self::Error> {
        let n = non_negative("n".into(), doc.n)? as usize;
        let m = non_negative("m".into(), doc.m)? as usize;
        let k = non_negative("k".into(), doc.k)? as usize;
        if doc.routings.len() != n {
            return Err(InstanceError::field(
                "routings",
                format!("n = {n} but {} routings given", doc.routings.len()),
            ));
        }
        let mut routings = Vec::with_capacity(n);
        for (j, row) in doc.routings.iter().enumerate() {
            if row.len() != m {
                return Err(InstanceError::field(
                    format!("routings[{j}]"),
                    format!("m = {m} but {} machines given", row.len()),
                ));
            }
            let r = row
                .iter()
                .enumerate()
                .map(|(i, &v)| non_negative(format!("routings[{j}][{i}]"), v).map(|v| v as usize))
                .collect::<Result<Vec<_>, _>>()?;
            routings.push(r);
        }
        let mut proc_times = Vec::with_capacity(doc.proc_times.len());
        for (j, row) in doc.proc_times.iter().enumerate() {
            let r = row
                .iter()
                .enumerate()
                .map(|(i, &v)| non_negative(format!("proc_times[{j}][{i}]"), v))
                .collect::<Result<Vec<_>, _>>()?;
            proc_times.push(r);
        }
        let side = m + 2;
        if doc.transport.len() != side || doc.transport.iter().any(|r| r.len() != side) {
            return Err(InstanceError::field(
                "transport",
                format!("expected a {side}x{side} matrix"),
            ));
        }
        let mut transport = Vec::with_capacity(side * side);
        for (a, row) in doc.transport.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                transport.push(non_negative(format!("transport[{a}][{b}]"), v)?);
            }
        }
        Instance::new(doc.id, doc.seed, k, routings, proc_times, transport)
    }
}

/// How the fleet size of a generated instance is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgvCount {
    Fixed(usize),
    /// Uniform draw from `3..=n`; clamped to `n` when `n < 3`.
    SampledFromJobs,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub jobs: usize,
    pub machines: usize,
    pub agvs: AgvCount,
    pub proc_range: (Time, Time),
    pub transport_range: (Time, Time),
    pub seed: u64,
}

impl GenerationConfig {
    /// Training-style defaults: all durations from `DU(1, 100)`.
    pub fn uniform(jobs: usize, machines: usize, agvs: AgvCount, seed: u64) -> Self {
        GenerationConfig {
            jobs,
            machines,
            agvs,
            proc_range: (1, 100),
            transport_range: (1, 100),
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        if self.jobs == 0 || self.machines == 0 {
            return Err(InstanceError::Config("n and m must be at least 1".into()));
        }
        for (name, (lo, hi)) in [("proc_range", self.proc_range), ("transport_range", self.transport_range)] {
            if lo > hi || !TIME_DOMAIN.contains(&lo) || !TIME_DOMAIN.contains(&hi) {
                return Err(InstanceError::Config(format!(
                    "{name} [{lo}, {hi}] must be a non-empty interval inside [1, 100]"
                )));
            }
        }
        if let AgvCount::Fixed(0) = self.agvs {
            return Err(InstanceError::Config("k must be at least 1".into()));
        }
        Ok(())
    }
}

/// `<n>x<m>x<k>-seed<seed>`
pub fn instance_id(n: usize, m: usize, k: usize, seed: u64) -> String {
    format!("{n}x{m}x{k}-seed{seed}")
}

pub fn generate_instance(config: &GenerationConfig) -> Result<Instance, InstanceError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (n, m) = (config.jobs, config.machines);
    let k = match config.agvs {
        AgvCount::Fixed(k) => k,
        AgvCount::SampledFromJobs if n >= 3 => rng.random_range(3..=n),
        AgvCount::SampledFromJobs => n,
    };
    let (plo, phi) = config.proc_range;
    let (tlo, thi) = config.transport_range;

    let mut routings = Vec::with_capacity(n);
    let mut proc_times = Vec::with_capacity(n);
    for _ in 0..n {
        let mut routing: Vec<usize> = (0..m).collect();
        routing.shuffle(&mut rng);
        routings.push(routing);
        let mut times: Vec<Time> = (0..m).map(|_| rng.random_range(plo..=phi)).collect();
        times.push(0);
        proc_times.push(times);
    }
    let side = m + 2;
    let mut transport = vec![0; side * side];
    for a in 0..side {
        for b in 0..side {
            if a != b {
                transport[a * side + b] = rng.random_range(tlo..=thi);
            }
        }
    }
    Instance::new(instance_id(n, m, k, config.seed), config.seed, k, routings, proc_times, transport)
}

/// One of the ten decade intervals `[1,10], [11,20], ..., [91,100]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct DecadeBin(u8);

impl DecadeBin {
    pub const COUNT: usize = 10;

    pub fn new(index: usize) -> Result<Self, InstanceError> {
        if index < Self::COUNT {
            Ok(DecadeBin(index as u8))
        } else {
            Err(InstanceError::Config(format!("bin index {index} outside 0..10")))
        }
    }

    pub fn all() -> impl Iterator<Item = DecadeBin> {
        (0..Self::COUNT as u8).map(DecadeBin)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn range(self) -> (Time, Time) {
        let lo = 10 * self.0 as Time + 1;
        (lo, lo + 9)
    }

    /// Bin containing a (possibly fractional) duration in `[1, 100]`.
    pub fn containing(value: f64) -> Option<DecadeBin> {
        if !(1.0..=100.0).contains(&value) {
            return None;
        }
        let idx = ((value - 1.0) / 10.0).floor().min(9.0) as u8;
        Some(DecadeBin(idx))
    }
}

impl TryFrom<usize> for DecadeBin {
    type Error = InstanceError;
    fn try_from(value: usize) -> Result<Self, Self::Error> {
        DecadeBin::new(value)
    }
}

impl From<DecadeBin> for usize {
    fn from(bin: DecadeBin) -> usize {
        bin.index()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCellConfig {
    pub proc_bin: DecadeBin,
    pub transport_bin: DecadeBin,
    pub jobs: usize,
    pub machines: usize,
    pub agvs: usize,
    pub instances_per_cell: usize,
    pub seed: u64,
}

impl GridCellConfig {
    /// `cell<pbin>_<tbin>` fragment of generated instance ids.
    pub fn cell_id(&self) -> String {
        format!("cell{}_{}", self.proc_bin.index(), self.transport_bin.index())
    }
}

/// Instances of one grid cell. Instance `i` uses seed `cell.seed + i`, so a
/// cell can be regenerated, or extended, index by index.
pub fn generate_grid_cell_instances(cell: &GridCellConfig) -> Result<Vec<Instance>, InstanceError> {
    (0..cell.instances_per_cell)
        .map(|i| {
            let seed = cell.seed.wrapping_add(i as u64);
            let config = GenerationConfig {
                jobs: cell.jobs,
                machines: cell.machines,
                agvs: AgvCount::Fixed(cell.agvs),
                proc_range: cell.proc_bin.range(),
                transport_range: cell.transport_bin.range(),
                seed,
            };
            let base = generate_instance(&config)?;
            let id = format!(
                "{}-{}-i{i}",
                instance_id(cell.jobs, cell.machines, cell.agvs, seed),
                cell.cell_id()
            );
            base.with_agvs(cell.agvs, id)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_structure() {
        let config = GenerationConfig::uniform(6, 6, AgvCount::Fixed(3), 7);
        let inst = generate_instance(&config).unwrap();
        assert_eq!(inst.jobs(), 6);
        assert_eq!(inst.total_operations(), 42);
        for j in 0..6 {
            let mut r = inst.routing(j).to_vec();
            r.sort_unstable();
            assert_eq!(r, (0..6).collect::<Vec<_>>());
            assert_eq!(inst.proc_time(j, 6), 0);
            assert!((0..6).all(|i| (1..=100).contains(&inst.proc_time(j, i))));
        }
        assert_eq!(inst.id(), "6x6x3-seed7");
    }

    #[test]
    fn degenerate_ranges_give_the_unique_instance() {
        let config = GenerationConfig {
            jobs: 1,
            machines: 1,
            agvs: AgvCount::Fixed(1),
            proc_range: (5, 5),
            transport_range: (2, 2),
            seed: 0,
        };
        let inst = generate_instance(&config).unwrap();
        assert_eq!(inst.proc_times(), &[vec![5, 0]]);
        assert_eq!(inst.transport_matrix(), &[0, 2, 2, 2, 0, 2, 2, 2, 0]);
    }

    #[test]
    fn sampled_fleet_is_in_range_and_reproducible() {
        for seed in 0..50 {
            let config = GenerationConfig::uniform(15, 10, AgvCount::SampledFromJobs, seed);
            let a = generate_instance(&config).unwrap();
            let b = generate_instance(&config).unwrap();
            assert!((3..=15).contains(&a.agvs()));
            assert_eq!(a, b);
            assert_eq!(a.to_json(), b.to_json());
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut c = GenerationConfig::uniform(0, 3, AgvCount::Fixed(1), 0);
        assert!(matches!(generate_instance(&c), Err(InstanceError::Config(_))));
        c.jobs = 2;
        c.proc_range = (10, 5);
        assert!(generate_instance(&c).is_err());
        c.proc_range = (0, 5);
        assert!(generate_instance(&c).is_err());
        c.proc_range = (1, 101);
        assert!(generate_instance(&c).is_err());
    }

    #[test]
    fn uniform_sampling_mean() {
        let inst = generate_instance(&GenerationConfig::uniform(100, 100, AgvCount::Fixed(1), 3)).unwrap();
        let mean = inst.mean_processing_time();
        assert!((48.0..=53.0).contains(&mean), "{mean}");
    }

    #[test]
    fn grid_cell_ranges() {
        let cell = GridCellConfig {
            proc_bin: DecadeBin::new(0).unwrap(),
            transport_bin: DecadeBin::new(9).unwrap(),
            jobs: 15,
            machines: 10,
            agvs: 3,
            instances_per_cell: 20,
            seed: 11,
        };
        let insts = generate_grid_cell_instances(&cell).unwrap();
        assert_eq!(insts.len(), 20);
        for (i, inst) in insts.iter().enumerate() {
            assert!(inst.proc_times().iter().all(|r| r[..10].iter().all(|p| (1..=10).contains(p))));
            let side = inst.locations();
            for a in 0..side {
                for b in 0..side {
                    let t = inst.travel(Location(a), Location(b));
                    assert!(a == b || (91..=100).contains(&t));
                }
            }
            assert_eq!(inst.id(), format!("15x10x3-seed{}-cell0_9-i{i}", 11 + i));
        }
    }

    #[test]
    fn grid_cell_serialization_is_reproducible() {
        let cell = GridCellConfig {
            proc_bin: DecadeBin::new(0).unwrap(),
            transport_bin: DecadeBin::new(0).unwrap(),
            jobs: 4,
            machines: 3,
            agvs: 2,
            instances_per_cell: 1,
            seed: 99,
        };
        let a = generate_grid_cell_instances(&cell).unwrap();
        let b = generate_grid_cell_instances(&cell).unwrap();
        assert_eq!(a[0].to_json(), b[0].to_json());
    }

    #[test]
    fn symmetric_bins_balance_means() {
        let cell = GridCellConfig {
            proc_bin: DecadeBin::new(5).unwrap(),
            transport_bin: DecadeBin::new(5).unwrap(),
            jobs: 10,
            machines: 10,
            agvs: 4,
            instances_per_cell: 5,
            seed: 1,
        };
        for inst in generate_grid_cell_instances(&cell).unwrap() {
            let (p, t) = (inst.mean_processing_time(), inst.mean_transport_time());
            assert!((51.0..=60.0).contains(&p) && (51.0..=60.0).contains(&t));
            assert!((p - t).abs() < 2.0);
        }
    }

    #[test]
    fn decade_bins_partition_the_domain() {
        let bins: Vec<_> = DecadeBin::all().map(DecadeBin::range).collect();
        assert_eq!(bins.first(), Some(&(1, 10)));
        assert_eq!(bins.last(), Some(&(91, 100)));
        for w in bins.windows(2) {
            assert_eq!(w[0].1 + 1, w[1].0);
        }
        for v in 1..=100 {
            let bin = DecadeBin::containing(v as f64).unwrap();
            let (lo, hi) = bin.range();
            assert!((lo..=hi).contains(&v));
        }
        assert_eq!(DecadeBin::containing(10.5).unwrap().index(), 0);
        assert!(DecadeBin::containing(0.5).is_none());
    }

    #[test]
    fn document_round_trip() {
        let inst = generate_instance(&GenerationConfig::uniform(3, 4, AgvCount::Fixed(2), 5)).unwrap();
        assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
    }

    fn tiny_doc() -> InstanceDocument {
        InstanceDocument {
            id: "t".into(),
            n: 1,
            m: 2,
            k: 1,
            routings: vec![vec![1, 0]],
            proc_times: vec![vec![3, 4, 0]],
            transport: vec![vec![0, 1, 1, 1]; 4]
                .into_iter()
                .enumerate()
                .map(|(a, mut r)| {
                    r[a] = 0;
                    r
                })
                .collect(),
            seed: 0,
        }
    }

    #[test]
    fn zero_processing_before_unload_is_rejected() {
        let mut doc = tiny_doc();
        doc.proc_times[0][0] = 0;
        let err = Instance::try_from(doc).unwrap_err();
        assert!(err.to_string().contains("proc_times[0][0]"), "{err}");
    }

    #[test]
    fn negative_transport_is_rejected() {
        let mut doc = tiny_doc();
        doc.transport[2][3] = -4;
        let err = Instance::try_from(doc).unwrap_err();
        assert!(err.to_string().contains("transport[2][3]"), "{err}");
    }

    #[test]
    fn bad_routing_and_diagonal_are_rejected() {
        let mut doc = tiny_doc();
        doc.routings[0] = vec![1, 1];
        assert!(Instance::try_from(doc).unwrap_err().to_string().contains("routings[0]"));
        let mut doc = tiny_doc();
        doc.transport[1][1] = 3;
        assert!(Instance::try_from(doc).unwrap_err().to_string().contains("transport[1][1]"));
        let mut doc = tiny_doc();
        doc.proc_times[0][2] = 1;
        assert!(Instance::try_from(doc).unwrap_err().to_string().contains("proc_times[0][2]"));
    }

    #[test]
    fn location_labels() {
        assert_eq!(Location::LOAD.to_string(), "load");
        assert_eq!(Location::UNLOAD.to_string(), "unload");
        assert_eq!(Location::machine(0).to_string(), "M1");
        assert_eq!(Location::machine(3).processing_index(), Some(3));
    }
}
