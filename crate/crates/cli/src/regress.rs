use std::fmt;

use jsspt_metrics::formulas::feature_columns;
use jsspt_metrics::{ols_fit, z_normalize, Column, Design, RegressionReport};

use crate::error::CliError;
use crate::experiment::RegressionPoint;

/// Feature sets fitted in order: each single feature, the two bottleneck
/// terms, then the full model.
pub const MODELS: [&[&str]; 5] = [&["BM"], &["ABN"], &["JBN"], &["ABN", "JBN"], &["BM", "JBN", "ABN"]];

#[derive(Debug, Clone)]
pub struct FittedModel {
    pub features: Vec<String>,
    pub report: RegressionReport,
}

impl FittedModel {
    pub fn label(&self) -> String {
        self.features.join("+")
    }
}

#[derive(Debug, Clone)]
pub struct RegressionSuite {
    pub points: usize,
    pub models: Vec<FittedModel>,
}

impl RegressionSuite {
    pub fn full(&self) -> &FittedModel {
        self.models.last().expect("suite has models")
    }

    pub fn model(&self, label: &str) -> Option<&FittedModel> {
        self.models.iter().find(|m| m.label() == label)
    }
}

impl fmt::Display for RegressionSuite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "model,R2")?;
        for m in &self.models {
            writeln!(f, "{},{:.6}", m.label(), m.report.r_squared)?;
        }
        for m in &self.models {
            writeln!(f)?;
            writeln!(f, "# model {}", m.label())?;
            write!(f, "{}", m.report)?;
        }
        Ok(())
    }
}

/// Builds z-normalized BM/JBN/ABN features at each point and fits every
/// model in [`MODELS`] with an intercept.
pub fn fit_models(points: &[RegressionPoint]) -> Result<RegressionSuite, CliError> {
    let locations: Vec<(f64, f64)> = points.iter().map(|p| (p.rho, p.tau)).collect();
    let features = z_normalize(&feature_columns(&locations))?;
    let y: Vec<f64> = points.iter().map(|p| p.rpi).collect();
    let column = |name: &str| -> Column { features.iter().find(|c| c.name == name).expect("known feature").clone() };
    let models = MODELS
        .iter()
        .map(|names| {
            let design = Design::with_intercept(names.iter().map(|n| column(n)).collect());
            Ok(FittedModel {
                features: names.iter().map(|s| s.to_string()).collect(),
                report: ols_fit(&design, &y)?,
            })
        })
        .collect::<Result<_, CliError>>()?;
    Ok(RegressionSuite {
        points: points.len(),
        models,
    })
}
