use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::beta::beta_reg;

use crate::MetricsError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

impl Column {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        Column {
            name: name.into(),
            values,
        }
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn population_sd(values: &[f64]) -> f64 {
    let mu = mean(values);
    (values.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
}

pub fn sample_sd(values: &[f64]) -> f64 {
    let mu = mean(values);
    (values.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

/// Centers each column and divides by its population standard deviation.
pub fn z_normalize(columns: &[Column]) -> Result<Vec<Column>, MetricsError> {
    columns
        .iter()
        .map(|c| {
            if c.values.is_empty() {
                return Err(MetricsError::Empty);
            }
            let mu = mean(&c.values);
            let sd = population_sd(&c.values);
            if sd.is_nan() || sd <= 0.0 {
                return Err(MetricsError::ZeroVariance(c.name.clone()));
            }
            Ok(Column::new(c.name.clone(), c.values.iter().map(|v| (v - mu) / sd).collect()))
        })
        .collect()
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub mean: f64,
    pub half_width: f64,
    pub count: usize,
}

impl ConfidenceInterval {
    pub fn low(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn high(&self) -> f64 {
        self.mean + self.half_width
    }
}

/// Two-sided Student-t quantile `t_{(1+level)/2, df}`.
pub fn t_quantile(level: f64, df: f64) -> f64 {
    StudentsT::new(0.0, 1.0, df)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.5 + level / 2.0)
}

/// `mean ± t * sd / sqrt(n)` with the sample standard deviation.
pub fn aggregate_ci(values: &[f64], level: f64) -> Result<ConfidenceInterval, MetricsError> {
    if values.len() < 2 {
        return Err(MetricsError::Domain(format!(
            "confidence interval needs at least 2 values, got {}",
            values.len()
        )));
    }
    if !(0.0..1.0).contains(&level) || level == 0.0 {
        return Err(MetricsError::Domain(format!("confidence level {level} outside (0, 1)")));
    }
    let n = values.len() as f64;
    let sd = sample_sd(values);
    let half_width = if sd == 0.0 {
        0.0
    } else {
        t_quantile(level, n - 1.0) * sd / n.sqrt()
    };
    Ok(ConfidenceInterval {
        mean: mean(values),
        half_width,
        count: values.len(),
    })
}

/// Two-sided tail probability `P(|T| > |t|)` for `df` degrees of freedom.
pub fn t_two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    beta_reg(df / 2.0, 0.5, df / (df + t * t))
}

/// Upper tail `P(F > f)` for `F(d1, d2)`.
pub fn f_upper_p(f: f64, d1: f64, d2: f64) -> f64 {
    if f.is_nan() {
        return f64::NAN;
    }
    if f.is_infinite() {
        return 0.0;
    }
    if f <= 0.0 {
        return 1.0;
    }
    beta_reg(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_examples() {
        let z = z_normalize(&[Column::new("x", vec![1.0, 2.0, 3.0])]).unwrap();
        let expect = [-1.224745, 0.0, 1.224745];
        for (a, b) in z[0].values.iter().zip(expect) {
            assert!((a - b).abs() < 5e-7);
        }
        let again = z_normalize(&z).unwrap();
        for (a, b) in again[0].values.iter().zip(&z[0].values) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(
            z_normalize(&[Column::new("flat", vec![4.0; 3])]),
            Err(MetricsError::ZeroVariance("flat".into()))
        );
    }

    #[test]
    fn ci_examples() {
        let c = aggregate_ci(&[3.0; 5], 0.95).unwrap();
        assert_eq!((c.mean, c.half_width), (3.0, 0.0));
        let c = aggregate_ci(&[-1.0, 1.0], 0.95).unwrap();
        assert_eq!(c.mean, 0.0);
        assert!((c.half_width - 12.7062).abs() < 5e-5, "{}", c.half_width);
        assert!(aggregate_ci(&[1.0], 0.95).is_err());
    }

    #[test]
    fn tail_probabilities() {
        // t_{0.975, 10} = 2.228139.
        assert!((t_two_sided_p(2.228139, 10.0) - 0.05).abs() < 1e-6);
        assert!((t_two_sided_p(0.0, 7.0) - 1.0).abs() < 1e-12);
        assert!((f_upper_p(1.0, 4.0, 4.0) - 0.5).abs() < 1e-12);
        // df = 1 is Cauchy: P(|T| > 1) = 0.5.
        assert!((t_two_sided_p(1.0, 1.0) - 0.5).abs() < 1e-12);
    }
}
