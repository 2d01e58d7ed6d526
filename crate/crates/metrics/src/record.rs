use serde::{Deserialize, Serialize};

use crate::formulas::{classify_regime, rho, temporal_dominance, Regime};
use crate::MetricsError;

/// One solver run on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub instance_id: String,
    pub solver: String,
    pub makespan: u64,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub p_raw: f64,
    pub t_raw: f64,
    pub rho: f64,
    /// Undefined when both raw means sit at the lower time bound.
    pub tau: Option<f64>,
    pub regime: Option<Regime>,
    pub cell: Option<String>,
    pub seed: u64,
}

impl ResultRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        instance_id: impl Into<String>,
        solver: impl Into<String>,
        makespan: u64,
        (n, m, k): (usize, usize, usize),
        p_raw: f64,
        t_raw: f64,
        cell: Option<String>,
        seed: u64,
    ) -> Result<Self, MetricsError> {
        let rho = rho(k, n)?;
        let tau = match temporal_dominance(p_raw, t_raw) {
            Ok(d) => Some(d.tau),
            Err(MetricsError::UndefinedDominance) => None,
            Err(e) => return Err(e),
        };
        Ok(ResultRecord {
            instance_id: instance_id.into(),
            solver: solver.into(),
            makespan,
            n,
            m,
            k,
            p_raw,
            t_raw,
            rho,
            tau,
            regime: tau.map(|t| classify_regime(rho, t)),
            cell,
            seed,
        })
    }

    pub const HEADER: [&'static str; 13] = [
        "instance_id",
        "solver",
        "makespan",
        "n",
        "m",
        "k",
        "p_raw",
        "t_raw",
        "rho",
        "tau",
        "regime",
        "cell",
        "seed",
    ];

    /// Fields in header order, floats at 6 decimals and absent values empty.
    pub fn csv_fields(&self) -> Vec<String> {
        vec![
            self.instance_id.clone(),
            self.solver.clone(),
            self.makespan.to_string(),
            self.n.to_string(),
            self.m.to_string(),
            self.k.to_string(),
            format!("{:.6}", self.p_raw),
            format!("{:.6}", self.t_raw),
            format!("{:.6}", self.rho),
            self.tau.map_or(String::new(), |t| format!("{t:.6}")),
            self.regime.map_or(String::new(), |r| r.label().to_string()),
            self.cell.clone().unwrap_or_default(),
            self.seed.to_string(),
        ]
    }

    /// Inverse of [`ResultRecord::csv_fields`].
    pub fn from_csv_fields(fields: &[&str]) -> Result<Self, MetricsError> {
        if fields.len() != Self::HEADER.len() {
            return Err(MetricsError::Shape(format!(
                "expected {} fields, got {}",
                Self::HEADER.len(),
                fields.len()
            )));
        }
        fn num<T: std::str::FromStr>(name: &str, v: &str) -> Result<T, MetricsError> {
            v.parse()
                .map_err(|_| MetricsError::Domain(format!("field `{name}`: cannot parse `{v}`")))
        }
        let opt = |v: &str| (!v.is_empty()).then(|| v.to_string());
        let regime = match fields[10] {
            "" => None,
            l => Some(Regime::from_label(l).ok_or_else(|| MetricsError::Domain(format!("field `regime`: `{l}`")))?),
        };
        Ok(ResultRecord {
            instance_id: fields[0].into(),
            solver: fields[1].into(),
            makespan: num("makespan", fields[2])?,
            n: num("n", fields[3])?,
            m: num("m", fields[4])?,
            k: num("k", fields[5])?,
            p_raw: num("p_raw", fields[6])?,
            t_raw: num("t_raw", fields[7])?,
            rho: num("rho", fields[8])?,
            tau: opt(fields[9]).map(|v| num("tau", &v)).transpose()?,
            regime,
            cell: opt(fields[11]),
            seed: num("seed", fields[12])?,
        })
    }
}
