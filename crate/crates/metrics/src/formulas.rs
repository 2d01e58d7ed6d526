use serde::{Deserialize, Serialize};

use crate::MetricsError;

pub const T_MIN: f64 = 1.0;
pub const T_MAX: f64 = 100.0;

/// Relative percentage improvement of `c_i` over the baseline `c_y`.
/// Positive when solver `i` is better.
pub fn rpi(c_i: f64, c_y: f64) -> Result<f64, MetricsError> {
    if c_y.is_nan() || c_y <= 0.0 {
        return Err(MetricsError::Domain(format!("baseline makespan must be positive, got {c_y}")));
    }
    Ok((c_y - c_i) / c_y * 100.0)
}

/// 1 when `c_i` strictly beats `c_y`.
pub fn win(c_i: f64, c_y: f64) -> u8 {
    u8::from(c_i < c_y)
}

pub fn win_rate(pairs: &[(f64, f64)]) -> Result<f64, MetricsError> {
    if pairs.is_empty() {
        return Err(MetricsError::Empty);
    }
    let wins: u32 = pairs.iter().map(|&(a, b)| u32::from(win(a, b))).sum();
    Ok(wins as f64 / pairs.len() as f64)
}

/// Resource scarcity `k / n`.
pub fn rho(k: usize, n: usize) -> Result<f64, MetricsError> {
    if k == 0 || n == 0 {
        return Err(MetricsError::Domain(format!("rho needs k, n >= 1, got k={k}, n={n}")));
    }
    Ok(k as f64 / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemporalDominance {
    pub p_norm: f64,
    pub t_norm: f64,
    pub phi: f64,
    pub tau: f64,
}

pub fn temporal_dominance(p_raw: f64, t_raw: f64) -> Result<TemporalDominance, MetricsError> {
    for (name, v) in [("p_raw", p_raw), ("t_raw", t_raw)] {
        if !(T_MIN..=T_MAX).contains(&v) {
            return Err(MetricsError::Domain(format!("{name} = {v} outside [{T_MIN}, {T_MAX}]")));
        }
    }
    let p_norm = (p_raw - T_MIN) / (T_MAX - T_MIN);
    let t_norm = (t_raw - T_MIN) / (T_MAX - T_MIN);
    let total = p_norm + t_norm;
    if total == 0.0 {
        return Err(MetricsError::UndefinedDominance);
    }
    Ok(TemporalDominance {
        p_norm,
        t_norm,
        phi: p_norm / total,
        tau: (p_norm - t_norm) / total,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    UnderutilizedTransport,
    ProcessConstrained,
    TransportConstrained,
    ResourceSaturated,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::UnderutilizedTransport => "underutilized-transport",
            Regime::ProcessConstrained => "process-constrained",
            Regime::TransportConstrained => "transport-constrained",
            Regime::ResourceSaturated => "resource-saturated",
        }
    }

    pub fn from_label(label: &str) -> Option<Regime> {
        [
            Regime::UnderutilizedTransport,
            Regime::ProcessConstrained,
            Regime::TransportConstrained,
            Regime::ResourceSaturated,
        ]
        .into_iter()
        .find(|r| r.label() == label)
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Quadrant of `(rho, tau)`. `rho = 0.5` counts as high-resource and
/// `tau = 0` as transport-dominant.
pub fn classify_regime(rho: f64, tau: f64) -> Regime {
    match (rho < 0.5, tau > 0.0) {
        (true, true) => Regime::UnderutilizedTransport,
        (false, true) => Regime::ProcessConstrained,
        (true, false) => Regime::TransportConstrained,
        (false, false) => Regime::ResourceSaturated,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BottleneckFeatures {
    pub bd: f64,
    pub bm: f64,
    pub jbn: f64,
    pub abn: f64,
}

pub fn bottleneck_features(rho: f64, tau: f64) -> BottleneckFeatures {
    let bd = (-tau.max(0.0) + (1.0 - rho)).abs();
    BottleneckFeatures {
        bd,
        bm: (bd - 1.0).powi(2),
        jbn: tau * rho,
        abn: (rho - 1.0) * tau,
    }
}

/// Resource-scarcity levels of the benchmark ladders.
pub const RHO_LEVELS: [f64; 6] = [0.2, 0.4, 0.6, 0.8, 1.0, 1.2];

/// `tau` axis values -1.0, -0.9, ..., 1.0.
pub fn tau_levels() -> Vec<f64> {
    (0..21).map(|i| (i as f64 - 10.0) / 10.0).collect()
}

/// The 126 `(rho, tau)` heatmap points, rho-major.
pub fn axis_grid() -> Vec<(f64, f64)> {
    RHO_LEVELS
        .iter()
        .flat_map(|&r| tau_levels().into_iter().map(move |t| (r, t)))
        .collect()
}

/// Raw `BM`, `JBN` and `ABN` columns for the given points.
pub fn feature_columns(points: &[(f64, f64)]) -> Vec<crate::stats::Column> {
    let feats: Vec<BottleneckFeatures> = points.iter().map(|&(r, t)| bottleneck_features(r, t)).collect();
    vec![
        crate::stats::Column::new("BM", feats.iter().map(|f| f.bm).collect()),
        crate::stats::Column::new("JBN", feats.iter().map(|f| f.jbn).collect()),
        crate::stats::Column::new("ABN", feats.iter().map(|f| f.abn).collect()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rpi_examples() {
        assert_eq!(rpi(95.0, 100.0).unwrap(), 5.0);
        assert_eq!(rpi(100.0, 100.0).unwrap(), 0.0);
        assert_eq!(rpi(105.0, 100.0).unwrap(), -5.0);
        assert!(rpi(1.0, 0.0).is_err());
    }

    #[test]
    fn wins() {
        assert_eq!(win(99.0, 100.0), 1);
        assert_eq!(win(100.0, 100.0), 0);
        let pairs = [(1.0, 2.0), (2.0, 2.0), (1.0, 3.0), (0.5, 1.0)];
        assert_eq!(win_rate(&pairs).unwrap(), 0.75);
        assert_eq!(win_rate(&[]), Err(MetricsError::Empty));
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(18, 15).unwrap(), 1.2);
        assert_eq!(rho(3, 15).unwrap(), 0.2);
        assert_eq!(rho(7, 7).unwrap(), 1.0);
        assert!(rho(0, 3).is_err());
    }

    #[test]
    fn dominance_examples() {
        assert_eq!(temporal_dominance(37.0, 37.0).unwrap().tau, 0.0);
        let d = temporal_dominance(100.0, 1.0).unwrap();
        assert_eq!((d.p_norm, d.t_norm, d.phi, d.tau), (1.0, 0.0, 1.0, 1.0));
        assert_eq!(temporal_dominance(1.0, 100.0).unwrap().tau, -1.0);
        // p' = 54/99, t' = 14.5/99, tau = 39.5/68.5.
        let d = temporal_dominance(55.0, 15.5).unwrap();
        assert!((d.p_norm - 0.545455).abs() < 5e-7);
        assert!((d.t_norm - 0.146465).abs() < 5e-7);
        assert!((d.phi - 0.788321).abs() < 5e-7);
        assert!((d.tau - 0.576642).abs() < 5e-7);
        assert_eq!(temporal_dominance(1.0, 1.0), Err(MetricsError::UndefinedDominance));
        assert!(temporal_dominance(0.5, 3.0).is_err());
    }

    #[test]
    fn regimes() {
        assert_eq!(classify_regime(0.2, 0.5), Regime::UnderutilizedTransport);
        assert_eq!(classify_regime(0.8, -0.5), Regime::ResourceSaturated);
        assert_eq!(classify_regime(0.5, 0.0), Regime::ResourceSaturated);
        assert_eq!(classify_regime(0.8, 0.1), Regime::ProcessConstrained);
        assert_eq!(classify_regime(0.4, 0.0), Regime::TransportConstrained);
        for r in [Regime::TransportConstrained, Regime::ProcessConstrained] {
            assert_eq!(Regime::from_label(r.label()), Some(r));
        }
    }

    #[test]
    fn bottleneck_examples() {
        let f = bottleneck_features(1.0, 1.0);
        assert_eq!((f.bd, f.bm, f.jbn, f.abn), (1.0, 0.0, 1.0, 0.0));
        let f = bottleneck_features(0.2, -1.0);
        assert!((f.bd - 0.8).abs() < 1e-15);
        assert!((f.bm - 0.04).abs() < 1e-15);
        assert!((f.jbn + 0.2).abs() < 1e-15);
        assert!((f.abn - 0.8).abs() < 1e-15);
        let f = bottleneck_features(1.0, 0.0);
        assert_eq!((f.bd, f.bm, f.jbn), (0.0, 1.0, 0.0));
        assert_eq!(f.abn, 0.0);
    }
}
