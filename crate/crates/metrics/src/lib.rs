//! Evaluation formulas, regime features and regression diagnostics.

pub mod formulas;
pub mod ols;
pub mod record;
pub mod stats;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("temporal dominance undefined: normalized processing and transport means are both zero")]
    UndefinedDominance,
    #[error("empty series")]
    Empty,
    #[error("column `{0}` has zero variance")]
    ZeroVariance(String),
    #[error("singular design: {0}")]
    SingularDesign(String),
    #[error("perfect collinearity: `{0}` is explained by the other regressors")]
    Collinear(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

pub use formulas::{
    bottleneck_features, classify_regime, rho, rpi, temporal_dominance, win, win_rate, BottleneckFeatures, Regime,
    TemporalDominance,
};
pub use ols::{ols_fit, vif, CoefficientRow, Design, RegressionReport};
pub use record::ResultRecord;
pub use stats::{aggregate_ci, z_normalize, Column, ConfidenceInterval};
