use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::stats::{f_upper_p, mean, t_quantile, t_two_sided_p, Column};
use crate::MetricsError;

pub const INTERCEPT: &str = "const";

/// Relative pivot size below which the design is treated as rank deficient.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub intercept: bool,
    pub regressors: Vec<Column>,
}

impl Design {
    pub fn with_intercept(regressors: Vec<Column>) -> Self {
        Design {
            intercept: true,
            regressors,
        }
    }

    pub fn without_intercept(regressors: Vec<Column>) -> Self {
        Design {
            intercept: false,
            regressors,
        }
    }

    pub fn names(&self) -> Vec<String> {
        let mut names: Vec<String> = Vec::new();
        if self.intercept {
            names.push(INTERCEPT.into());
        }
        names.extend(self.regressors.iter().map(|c| c.name.clone()));
        names
    }

    pub fn rows(&self) -> Option<usize> {
        self.regressors.first().map(|c| c.values.len())
    }

    fn matrix(&self, rows: usize) -> Result<DMatrix<f64>, MetricsError> {
        for c in &self.regressors {
            if c.values.len() != rows {
                return Err(MetricsError::Shape(format!(
                    "column `{}` has {} rows, response has {rows}",
                    c.name,
                    c.values.len()
                )));
            }
        }
        let cols = self.regressors.len() + usize::from(self.intercept);
        let offset = usize::from(self.intercept);
        Ok(DMatrix::from_fn(rows, cols, |r, c| {
            if self.intercept && c == 0 {
                1.0
            } else {
                self.regressors[c - offset].values[r]
            }
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub variable: String,
    pub coef: f64,
    pub std_error: f64,
    pub t: f64,
    pub p_value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Absent for the intercept.
    pub vif: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionReport {
    pub coefficients: Vec<CoefficientRow>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    /// Absent for intercept-only models.
    pub f_statistic: Option<f64>,
    pub f_p_value: Option<f64>,
    pub condition_number: f64,
    pub observations: usize,
    pub df_residual: usize,
    pub residuals: Vec<f64>,
}

impl RegressionReport {
    pub fn coefficient(&self, name: &str) -> Option<&CoefficientRow> {
        self.coefficients.iter().find(|c| c.variable == name)
    }

    pub fn coef_values(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.coef).collect()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or("-".into(), |x| format!("{x:.6}"))
}

impl fmt::Display for RegressionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "parameter,value")?;
        writeln!(f, "R2,{:.6}", self.r_squared)?;
        writeln!(f, "adj. R2,{:.6}", self.adj_r_squared)?;
        writeln!(f, "F-statistic,{}", opt(self.f_statistic))?;
        writeln!(f, "Prob (F-statistic),{}", self.f_p_value.map_or("-".into(), |p| format!("{p:.6e}")))?;
        writeln!(f, "observations,{}", self.observations)?;
        writeln!(f, "cond no.,{:.6}", self.condition_number)?;
        writeln!(f)?;
        writeln!(f, "variable,coef,std error,t,P>|t|,ci low,ci high,VIF")?;
        for c in &self.coefficients {
            writeln!(
                f,
                "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{}",
                c.variable,
                c.coef,
                c.std_error,
                c.t,
                c.p_value,
                c.ci_low,
                c.ci_high,
                opt(c.vif)
            )?;
        }
        Ok(())
    }
}

struct Fit {
    coef: DVector<f64>,
    /// Diagonal of `(X'X)^-1`.
    unscaled_var: DVector<f64>,
    residuals: DVector<f64>,
}

fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>, names: &[String]) -> Result<Fit, MetricsError> {
    let (rows, cols) = x.shape();
    if rows <= cols {
        return Err(MetricsError::Shape(format!("need more rows than columns, got {rows} x {cols}")));
    }
    let qr = x.clone().qr();
    let r = qr.r();
    let scale = (0..cols).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    for i in 0..cols {
        if r[(i, i)].is_nan() || r[(i, i)].abs() <= RANK_TOL * scale {
            return Err(MetricsError::SingularDesign(format!("column `{}` is linearly dependent", names[i])));
        }
    }
    let qty = qr.q().transpose() * y;
    let coef = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| MetricsError::SingularDesign("triangular solve failed".into()))?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(cols, cols))
        .ok_or_else(|| MetricsError::SingularDesign("triangular inverse failed".into()))?;
    let unscaled_var = DVector::from_fn(cols, |i, _| r_inv.row(i).norm_squared());
    let residuals = y - x * &coef;
    Ok(Fit {
        coef,
        unscaled_var,
        residuals,
    })
}

fn r_squared(y: &[f64], residuals: &DVector<f64>, centered: bool) -> f64 {
    let rss = residuals.norm_squared();
    let mu = if centered { mean(y) } else { 0.0 };
    let tss: f64 = y.iter().map(|v| (v - mu).powi(2)).sum();
    1.0 - rss / tss
}

fn condition_number(x: &DMatrix<f64>) -> f64 {
    let sv = x.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

/// Ordinary least squares through a QR decomposition with classical
/// standard errors, t-based 95% intervals and VIFs.
pub fn ols_fit(design: &Design, y: &[f64]) -> Result<RegressionReport, MetricsError> {
    let rows = y.len();
    let x = design.matrix(rows)?;
    let names = design.names();
    let cols = names.len();
    if cols == 0 {
        return Err(MetricsError::Shape("design has no columns".into()));
    }
    let yv = DVector::from_column_slice(y);
    let fit = least_squares(&x, &yv, &names)?;

    let df = rows - cols;
    let rss = fit.residuals.norm_squared();
    let sigma2 = rss / df as f64;
    let t_crit = t_quantile(0.95, df as f64);
    let vifs = regressor_vifs(design)?;

    let offset = usize::from(design.intercept);
    let coefficients = (0..cols)
        .map(|i| {
            let coef = fit.coef[i];
            let se = (sigma2 * fit.unscaled_var[i]).sqrt();
            let t = if se > 0.0 {
                coef / se
            } else if coef == 0.0 {
                0.0
            } else {
                coef.signum() * f64::INFINITY
            };
            CoefficientRow {
                variable: names[i].clone(),
                coef,
                std_error: se,
                t,
                p_value: t_two_sided_p(t, df as f64),
                ci_low: coef - t_crit * se,
                ci_high: coef + t_crit * se,
                vif: if i < offset { None } else { Some(vifs[i - offset]) },
            }
        })
        .collect();

    let r2 = r_squared(y, &fit.residuals, design.intercept);
    let df_model = cols - offset;
    let denom = rows - offset;
    let adj = 1.0 - (1.0 - r2) * denom as f64 / df as f64;
    let (f_statistic, f_p_value) = if df_model == 0 {
        (None, None)
    } else {
        let explained = r2 / df_model as f64;
        let unexplained = (1.0 - r2) / df as f64;
        let f = if unexplained > 0.0 { explained / unexplained } else { f64::INFINITY };
        (Some(f), Some(f_upper_p(f, df_model as f64, df as f64)))
    };

    Ok(RegressionReport {
        coefficients,
        r_squared: r2,
        adj_r_squared: adj,
        f_statistic,
        f_p_value,
        condition_number: condition_number(&x),
        observations: rows,
        df_residual: df,
        residuals: fit.residuals.iter().cloned().collect(),
    })
}

fn regressor_vifs(design: &Design) -> Result<Vec<f64>, MetricsError> {
    match design.regressors.len() {
        0 => Ok(vec![]),
        1 => Ok(vec![1.0]),
        _ => vif(&design.regressors),
    }
}

/// `1 / (1 - R²)` of each regressor against the others plus an intercept.
pub fn vif(regressors: &[Column]) -> Result<Vec<f64>, MetricsError> {
    if regressors.len() < 2 {
        return Err(MetricsError::Shape("VIF needs at least two regressors".into()));
    }
    (0..regressors.len())
        .map(|i| {
            let target = &regressors[i];
            let others: Vec<Column> = regressors
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, c)| c.clone())
                .collect();
            let aux = Design::with_intercept(others);
            let x = aux.matrix(target.values.len())?;
            let yv = DVector::from_column_slice(&target.values);
            let fit = least_squares(&x, &yv, &aux.names()).map_err(|e| match e {
                MetricsError::SingularDesign(_) => MetricsError::Collinear(target.name.clone()),
                other => other,
            })?;
            let r2 = r_squared(&target.values, &fit.residuals, true);
            if r2.is_nan() || r2 >= 1.0 - RANK_TOL {
                return Err(MetricsError::Collinear(target.name.clone()));
            }
            Ok(1.0 / (1.0 - r2))
        })
        .collect()
}
