use jsspt_metrics::formulas::{axis_grid, feature_columns};
use jsspt_metrics::stats::pearson;
use jsspt_metrics::{ols_fit, z_normalize, Column, Design, RegressionReport};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const TRUTH: [f64; 4] = [2.55, 0.54, -0.95, -0.80];

fn features() -> Vec<Column> {
    z_normalize(&feature_columns(&axis_grid())).unwrap()
}

fn response(z: &[Column], noise: impl Fn(usize) -> f64) -> Vec<f64> {
    (0..z[0].values.len())
        .map(|i| TRUTH[0] + TRUTH[1] * z[0].values[i] + TRUTH[2] * z[1].values[i] + TRUTH[3] * z[2].values[i] + noise(i))
        .collect()
}

fn fit(noise: impl Fn(usize) -> f64) -> RegressionReport {
    let z = features();
    let y = response(&z, noise);
    ols_fit(&Design::with_intercept(z), &y).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

#[test]
fn grid_correlations_and_collinearity() {
    let z = features();
    let r = |a: usize, b: usize| pearson(&z[a].values, &z[b].values);
    assert!((r(1, 0) + 0.418501809427).abs() < 1e-9);
    assert!((r(1, 2) + 0.263588520593).abs() < 1e-9);
    assert!((r(2, 0) + 0.432994288005).abs() < 1e-9);
    let rep = fit(|_| 0.0);
    let vifs: Vec<f64> = rep.coefficients[1..].iter().map(|c| c.vif.unwrap()).collect();
    for (v, reference) in vifs.iter().zip([1.97, 1.72, 1.75]) {
        assert!((v - reference).abs() < 0.006, "{v}");
        assert!(*v < 5.0);
    }
    assert!((rep.condition_number - 2.428308758714224).abs() < 1e-9);
}

#[test]
fn zero_noise_recovers_generating_coefficients() {
    let rep = fit(|_| 0.0);
    for (c, t) in rep.coefficients.iter().zip(TRUTH) {
        assert!((c.coef - t).abs() < 1e-9, "{}: {}", c.variable, c.coef);
    }
    assert!((rep.r_squared - 1.0).abs() < 1e-12);
    assert_eq!(rep.observations, 126);
}

// Reference values below come from an independent statsmodels OLS fit of the
// same design with noise `s * sin(1.7 i + 0.3)`.

#[test]
fn diagnostics_match_reference_fit_low_noise() {
    let rep = fit(|i| 0.5 * (1.7 * i as f64 + 0.3).sin());
    let coef = [2.549611139918, 0.54606420973, -0.947146352677, -0.799886383568];
    let se = [0.031945481949, 0.04483674853, 0.041897387814, 0.042214352377];
    let p = [3.761900293043e-107, 8.092790273275e-23, 1.922690289515e-45, 3.761841480139e-38];
    for i in 0..4 {
        let c = &rep.coefficients[i];
        assert!(close(c.coef, coef[i], 1e-9), "coef {i}");
        assert!(close(c.std_error, se[i], 1e-9), "se {i}");
        assert!(close(c.p_value, p[i], 1e-6), "p {i}: {}", c.p_value);
    }
    assert!(close(rep.r_squared, 0.9474972175194589, 1e-10));
    assert!(close(rep.adj_r_squared, 0.9462061654912489, 1e-10));
    assert!(close(rep.f_statistic.unwrap(), 733.8954564310732, 1e-8));
    assert!(close(rep.f_p_value.unwrap(), 7.368511600218826e-78, 1e-6));
}

#[test]
fn diagnostics_match_reference_fit_high_noise() {
    let rep = fit(|i| 6.0 * (1.7 * i as f64 + 0.3).sin());
    let t = [6.639785252095, 1.138891900152, -1.821426664668, -1.576550307814];
    let p = [9.208495225698e-10, 2.569796045346e-01, 7.099212796221e-02, 1.174886043606e-01];
    let ci = [
        (1.786462412806, 3.304204945226),
        (-0.452335346528, 1.677876380053),
        (-1.911036998007, 0.079524533759),
        (-1.801446924831, 0.204173719208),
    ];
    for i in 0..4 {
        let c = &rep.coefficients[i];
        assert!(close(c.t, t[i], 1e-9), "t {i}");
        assert!(close(c.p_value, p[i], 1e-9), "p {i}: {}", c.p_value);
        assert!((c.ci_low - ci[i].0).abs() < 1e-9 && (c.ci_high - ci[i].1).abs() < 1e-9, "ci {i}");
    }
    assert!(close(rep.r_squared, 0.11631594648487986, 1e-9));
    assert!(close(rep.f_p_value.unwrap(), 0.0016952608051153289, 1e-8));
}

#[test]
fn noisy_fits_cover_truth_within_three_standard_errors() {
    let z = features();
    let dist = Normal::new(0.0, 0.5).unwrap();
    let trials = 1000;
    let mut covered = [0usize; 4];
    for seed in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise: Vec<f64> = (0..126).map(|_| dist.sample(&mut rng)).collect();
        let y = response(&z, |i| noise[i]);
        let rep = ols_fit(&Design::with_intercept(z.clone()), &y).unwrap();
        for (i, c) in rep.coefficients.iter().enumerate() {
            covered[i] += usize::from((c.coef - TRUTH[i]).abs() <= 3.0 * c.std_error);
        }
    }
    for (i, &c) in covered.iter().enumerate() {
        assert!(c * 100 >= 99 * trials as usize, "coefficient {i}: {c}/{trials}");
    }
}

#[test]
fn report_invariants() {
    let rep = fit(|i| (i as f64 * 0.37).cos());
    assert!((0.0..=1.0).contains(&rep.r_squared));
    assert!(rep.adj_r_squared <= rep.r_squared);
    assert!(rep.coefficients[1..].iter().all(|c| c.vif.unwrap() >= 1.0));
    let text = rep.to_string();
    assert!(text.contains("cond no.,2.428309"));
    assert!(text.lines().any(|l| l.starts_with("BM,")));
}
