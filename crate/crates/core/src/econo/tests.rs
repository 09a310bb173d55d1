use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::*;
use crate::simgen::oracles;
use crate::timeseries::{trailing_mean_dummy, Period};

fn start() -> Period {
    Period::monthly(2000, 1)
}

fn series(v: Vec<f64>) -> PeriodSeries {
    PeriodSeries::new(start(), v)
}

fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

fn design(cols: Vec<Vec<f64>>) -> DesignMatrix {
    let names = (0..cols.len()).map(|i| format!("x{i}")).collect();
    DesignMatrix::new(start(), names, cols).unwrap()
}

fn flat(m: &DMatrix<f64>) -> Vec<f64> {
    (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)]))
        .collect()
}

fn flat_rows(m: &oracles::Matrix) -> Vec<f64> {
    m.iter().flatten().copied().collect()
}

/// Relative deviation scaled by the largest entry of the reference.
fn rel(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    oracles::max_abs_diff(a, b) / scale
}

#[test]
fn exact_fit() {
    let x = design(vec![vec![1.0, 2.0, 3.0, 4.0]]);
    let fit = ols(&x, &series(vec![2.0, 4.0, 6.0, 8.0])).unwrap();
    assert!((fit.coefficient("x0").unwrap() - 2.0).abs() < 1e-12);
    assert!(fit.coefficient(INTERCEPT).unwrap().abs() < 1e-12);
    assert!((fit.r_squared - 1.0).abs() < 1e-12);
}

#[test]
fn orthogonal_response_has_zero_slope() {
    // x - mean = [-2,-1,0,1,2] is orthogonal to y
    let x = design(vec![vec![1.0, 2.0, 3.0, 4.0, 5.0]]);
    let fit = ols(&x, &series(vec![2.0, -1.0, -2.0, -1.0, 2.0])).unwrap();
    assert!(fit.coefficients[1].abs() < 1e-12);
    assert!(fit.r_squared.abs() < 1e-12);
}

#[test]
fn matches_normal_equations_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cols = vec![normals(&mut rng, 50), normals(&mut rng, 50), normals(&mut rng, 50)];
    let e = normals(&mut rng, 50);
    let y: Vec<f64> = (0..50)
        .map(|t| 0.3 + 1.5 * cols[0][t] - 0.7 * cols[1][t] + 0.1 * cols[2][t] + e[t])
        .collect();
    let fit = ols_with(&design(cols.clone()), &series(y.clone()), OlsOptions { nw_lags: 4, drop_collinear: false }).unwrap();

    let rows = oracles::rows_with_intercept(&cols);
    let beta = oracles::normal_equations(&rows, &y).unwrap();
    assert!(rel(&fit.coefficients, &beta) < 1e-8);

    let resid = oracles::residuals(&rows, &y, &beta);
    assert!(oracles::max_abs_diff(fit.residuals.values(), &resid) < 1e-10);
    assert!(rel(&flat(&fit.cov_white), &flat_rows(&oracles::white(&rows, &resid).unwrap())) < 1e-8);
    assert!(rel(&flat(&fit.cov_nw), &flat_rows(&oracles::newey_west(&rows, &resid, 4).unwrap())) < 1e-8);
}

#[test]
fn residuals_orthogonal_to_design() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cols = vec![normals(&mut rng, 80), normals(&mut rng, 80)];
    let y = normals(&mut rng, 80);
    let fit = ols(&design(cols.clone()), &series(y)).unwrap();
    let e = fit.residuals.values();
    assert!(e.iter().sum::<f64>().abs() < 1e-10);
    for c in &cols {
        let dot: f64 = c.iter().zip(e).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1e-10);
    }
}

#[test]
fn nested_r_squared_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cols: Vec<Vec<f64>> = (0..4).map(|_| normals(&mut rng, 60)).collect();
    let y = series(normals(&mut rng, 60));
    let mut last = 0.0;
    for k in 1..=4 {
        let r2 = ols(&design(cols[..k].to_vec()), &y).unwrap().r_squared;
        assert!(r2 >= last - 1e-14, "R² fell from {last} to {r2} at k={k}");
        last = r2;
    }
}

#[test]
fn affine_regressor_transform_leaves_fit_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let x = normals(&mut rng, 70);
    let y = series(normals(&mut rng, 70));
    let a = ols(&design(vec![x.clone()]), &y).unwrap();
    let b = ols(&design(vec![x.iter().map(|v| -3.5 * v + 12.0).collect()]), &y).unwrap();
    assert!(oracles::max_abs_diff(a.residuals.values(), b.residuals.values()) < 1e-10);
    for flavor in [CovFlavor::Ols, CovFlavor::White, CovFlavor::NeweyWest] {
        let (ta, tb) = (a.t_stats(flavor).unwrap()[1], b.t_stats(flavor).unwrap()[1]);
        assert!((ta + tb).abs() < 1e-8, "{flavor:?}: {ta} vs {tb}");
    }
}

#[test]
fn rank_deficient_design_is_rejected() {
    let x = vec![1.0, 2.0, 3.0, 4.0, 5.0, 7.0];
    let d = design(vec![x.clone(), x.iter().map(|v| 2.0 * v).collect()]);
    let err = ols(&d, &series(vec![1.0, 0.0, 2.0, 1.0, 3.0, 2.0])).unwrap_err();
    assert!(matches!(err, Error::SingularDesign(_)));

    let fit = ols_with(&d, &series(vec![1.0, 0.0, 2.0, 1.0, 3.0, 2.0]), OlsOptions { nw_lags: 1, drop_collinear: true }).unwrap();
    assert_eq!(fit.dropped, vec!["x1".to_string()]);
    assert_eq!(fit.names, vec![INTERCEPT.to_string(), "x0".to_string()]);
}

#[test]
fn length_mismatch_and_short_samples() {
    let d = design(vec![vec![1.0, 2.0, 3.0, 4.0]]);
    assert!(matches!(ols(&d, &series(vec![1.0, 2.0, 3.0])), Err(Error::Alignment(_))));
    let d = design(vec![vec![1.0, 2.0, 3.0]]);
    assert!(matches!(ols(&d, &series(vec![1.0, 2.0, 4.0])), Err(Error::InsufficientData(_))));
}

#[test]
fn design_validation() {
    assert!(DesignMatrix::new(start(), vec!["a".into(), "a".into()], vec![vec![1.0], vec![2.0]]).is_err());
    assert!(DesignMatrix::new(start(), vec![INTERCEPT.into()], vec![vec![1.0]]).is_err());
    assert!(DesignMatrix::new(start(), vec!["a".into(), "b".into()], vec![vec![1.0], vec![2.0, 3.0]]).is_err());
    let d = design(vec![vec![1.0, 2.0, 3.0, 4.0]]);
    let sub = d.rows(start().offset(1), start().offset(2)).unwrap();
    assert_eq!(sub.column(0), &[2.0, 3.0]);
    assert!(d.rows(start(), start().offset(4)).is_err());
}

#[test]
fn newey_west_zero_lags_is_white() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let d = design(vec![normals(&mut rng, 40)]);
    let e = normals(&mut rng, 40);
    let w = white_covariance(&d, &e).unwrap();
    let nw = newey_west_covariance(&d, &e, 0).unwrap();
    assert!(oracles::max_abs_diff(&flat(&w), &flat(&nw)) < 1e-15);
    assert!(newey_west_covariance(&d, &e, 40).is_err());
}

#[test]
fn hodrick_one_period_is_white() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let d = design(vec![normals(&mut rng, 60), normals(&mut rng, 60)]);
    let e = normals(&mut rng, 60);
    let w = white_covariance(&d, &e).unwrap();
    let hk = hodrick_covariance(&d, &e, 1).unwrap();
    assert!(rel(&flat(&hk), &flat(&w)) < 1e-12);
}

#[test]
fn hodrick_matches_window_membership_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for h in [2, 3, 6, 12] {
        let d = design(vec![normals(&mut rng, 90)]);
        let e = normals(&mut rng, 90 + h - 1);
        let hk = hodrick_covariance(&d, &e, h).unwrap();
        let rows = oracles::rows_with_intercept(&[d.column(0).to_vec()]);
        let oracle = oracles::hodrick(&rows, &e, h).unwrap();
        assert!(rel(&flat(&hk), &flat_rows(&oracle)) < 1e-10, "h={h}");
    }
}

#[test]
fn hodrick_degenerate_inputs() {
    let d = design(vec![(0..30).map(|i| (i as f64).sin()).collect()]);
    let zero = hodrick_covariance(&d, &vec![0.0; 32], 3).unwrap();
    assert!(zero.iter().all(|v| *v == 0.0));
    assert!(matches!(hodrick_covariance(&d, &vec![0.0; 30], 0), Err(Error::Domain(_))));
    assert!(hodrick_covariance(&d, &vec![0.0; 31], 3).is_err());
    assert!(matches!(hodrick_covariance(&d, &vec![0.0; 57], 28), Err(Error::InsufficientData(_))));
}

#[test]
fn hodrick_slope_variance_scales_with_regressor() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let x = normals(&mut rng, 50);
    let e = normals(&mut rng, 53);
    let c = 4.0;
    let v1 = hodrick_covariance(&design(vec![x.clone()]), &e, 4).unwrap()[(1, 1)];
    let v2 = hodrick_covariance(&design(vec![x.iter().map(|v| c * v).collect()]), &e, 4).unwrap()[(1, 1)];
    assert!((v2 * c * c / v1 - 1.0).abs() < 1e-10);
}

#[test]
fn predictive_regression_layout() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let s = normals(&mut rng, 120);
    let r = normals(&mut rng, 120);
    let h = 3;
    let fit = predictive_regression(&series(s.clone()), &series(r.clone()), h, None).unwrap();
    assert_eq!(fit.n_obs, 117);
    assert_eq!(fit.nw_lags, 3);
    assert_eq!(fit.horizon, 3);
    assert_eq!(fit.names, vec![INTERCEPT, SIGNAL]);

    // oracle: standardized signal, explicit forward averages, null residuals
    let sig = crate::timeseries::standardize_values(&s[..117]).unwrap();
    let y: Vec<f64> = (0..117).map(|t| r[t + 1..=t + 3].iter().sum::<f64>() / 3.0).collect();
    let rows = oracles::rows_with_intercept(&[sig]);
    let beta = oracles::normal_equations(&rows, &y).unwrap();
    assert!(rel(&fit.coefficients, &beta) < 1e-10);
    let m = r[1..].iter().sum::<f64>() / 119.0;
    let e: Vec<f64> = r[1..].iter().map(|v| v - m).collect();
    let oracle = oracles::hodrick(&rows, &e, h).unwrap();
    assert!(rel(&flat(fit.cov_hodrick.as_ref().unwrap()), &flat_rows(&oracle)) < 1e-10);

    let contemporaneous = predictive_regression(&series(s), &series(r), 0, None).unwrap();
    assert_eq!(contemporaneous.n_obs, 120);
    assert!(contemporaneous.cov_hodrick.is_none());
    assert_eq!(contemporaneous.nw_lags, 1);
}

#[test]
fn predictive_regression_with_controls() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let s = series(normals(&mut rng, 100));
    let r = series(normals(&mut rng, 100));
    let c = DesignMatrix::new(start().offset(5), vec!["ctl".into()], vec![normals(&mut rng, 90)]).unwrap();
    let fit = predictive_regression(&s, &r, 1, Some(&c)).unwrap();
    assert_eq!(fit.names, vec![INTERCEPT, SIGNAL, "ctl"]);
    assert_eq!(fit.residuals.start(), start().offset(5));
    assert_eq!(fit.n_obs, 89);
    assert_eq!(fit.cov_hodrick.as_ref().unwrap().shape(), (3, 3));
}

#[test]
fn interaction_with_always_high_state_collapses() {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let n = 100;
    // strictly rising base starting one period early: high for every regression row
    let base = PeriodSeries::new(start().offset(-1), (0..=n).map(|i| i as f64).collect());
    let dummy = trailing_mean_dummy(&base, 60).unwrap();
    let s = series(normals(&mut rng, n));
    let r = series(normals(&mut rng, n));
    let fit = interaction_regression(&s, &r, &dummy, 1).unwrap();
    assert_eq!(fit.dropped, vec![LOW_X_SIGNAL.to_string(), HIGH.to_string()]);
    let plain = predictive_regression(&s, &r, 1, None).unwrap();
    let b1 = fit.coefficient(HIGH_X_SIGNAL).unwrap();
    assert!((b1 - plain.coefficient(SIGNAL).unwrap()).abs() < 1e-12);
    let t1 = fit.t_stat(HIGH_X_SIGNAL, CovFlavor::Hodrick).unwrap();
    let t0 = plain.t_stat(SIGNAL, CovFlavor::Hodrick).unwrap();
    assert!((t1 - t0).abs() < 1e-9);
}

#[test]
fn interaction_recovers_low_state_slope() {
    let planted = 0.4;
    let reps = 200;
    let n = 324;
    let estimates: Vec<(f64, f64)> = (0..reps)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let activity = normals(&mut rng, n);
            let dummy = trailing_mean_dummy(&series(activity), 60).unwrap();
            let s = normals(&mut rng, n);
            let eps = normals(&mut rng, n);
            let mut r = vec![0.0; n];
            for t in 0..n - 1 {
                let low = if dummy.is_high(t) { 0.0 } else { 1.0 };
                r[t + 1] = planted * low * s[t] + eps[t + 1];
            }
            let fit = interaction_regression(&series(s), &series(r), &dummy, 1).unwrap();
            (fit.coefficient(LOW_X_SIGNAL).unwrap(), fit.coefficient(HIGH_X_SIGNAL).unwrap())
        })
        .collect();
    let mean = |v: Vec<f64>| -> (f64, f64) {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        let sd = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0)).sqrt();
        (m, sd / (v.len() as f64).sqrt())
    };
    let (b2, se2) = mean(estimates.iter().map(|e| e.0).collect());
    let (b1, se1) = mean(estimates.iter().map(|e| e.1).collect());
    assert!((b2 - planted).abs() < 2.0 * se2 + 0.01, "low slope {b2} ± {se2}");
    assert!(b1.abs() < 2.0 * se1 + 0.01, "high slope {b1} ± {se1}");
}

#[test]
fn macro_link_shapes() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let proxy = series(normals(&mut rng, 80));
    let signal = series(normals(&mut rng, 80));
    let simple = macro_link_regression(&proxy, &signal, MacroFlavor::Simple).unwrap();
    assert_eq!(simple.n_obs, 79);
    assert_eq!(simple.nw_lags, 1);
    assert_eq!(simple.names, vec![INTERCEPT, SIGNAL]);
    let ar = macro_link_regression(&proxy, &signal, MacroFlavor::ArControlled).unwrap();
    assert_eq!(ar.names, vec![INTERCEPT, SIGNAL, LAGGED_RESPONSE]);
}

#[test]
fn macro_ar_recovers_persistence() {
    let psi = 0.7;
    let n = 108;
    let est: Vec<f64> = (0..200u64)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(5000 + seed);
            let s = normals(&mut rng, n);
            let e = normals(&mut rng, n);
            let mut y = vec![0.0; n];
            y[0] = e[0] / (1.0f64 - psi * psi).sqrt();
            for t in 1..n {
                y[t] = psi * y[t - 1] + 0.3 * s[t - 1] + e[t];
            }
            let fit = macro_link_regression(&series(y), &series(s), MacroFlavor::ArControlled).unwrap();
            fit.coefficient(LAGGED_RESPONSE).unwrap()
        })
        .collect();
    let within = est.iter().filter(|p| (*p - psi).abs() < 0.1).count();
    let mean = est.iter().sum::<f64>() / est.len() as f64;
    assert!((mean - psi).abs() < 0.1, "mean ψ̂ {mean}");
    assert!(within as f64 / est.len() as f64 > 0.75, "{within}/200 within 0.1");
}

#[test]
fn macro_null_slope_coverage() {
    let reps = 400;
    let covered = (0..reps)
        .filter(|&seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(9000 + seed);
            let fit = macro_link_regression(&series(normals(&mut rng, 200)), &series(normals(&mut rng, 200)), MacroFlavor::Simple).unwrap();
            fit.t_stat(SIGNAL, CovFlavor::NeweyWest).unwrap().abs() < 2.0
        })
        .count();
    let rate = covered as f64 / reps as f64;
    assert!((0.91..=0.99).contains(&rate), "coverage {rate}");
}

fn ar1(rng: &mut ChaCha8Rng, n: usize, rho: f64) -> Vec<f64> {
    let shocks = normals(rng, n);
    let mut out = vec![0.0; n];
    out[0] = shocks[0] / (1.0 - rho * rho).sqrt();
    for t in 1..n {
        out[t] = rho * out[t - 1] + shocks[t];
    }
    out
}

#[test]
fn newey_west_inflates_variance_under_autocorrelation() {
    let reps = 500;
    let larger = (0..reps)
        .filter(|&seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(20_000 + seed);
            let d = design(vec![ar1(&mut rng, 300, 0.5)]);
            let e = ar1(&mut rng, 300, 0.5);
            let nw = newey_west_covariance(&d, &e, 6).unwrap()[(1, 1)];
            let w = newey_west_covariance(&d, &e, 0).unwrap()[(1, 1)];
            nw > w
        })
        .count();
    assert!(larger as f64 >= 0.95 * reps as f64, "{larger}/{reps}");
}

#[test]
fn newey_west_close_to_ols_under_iid() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let n = 5000;
    let x = normals(&mut rng, n);
    let y = normals(&mut rng, n);
    let fit = ols_with(&design(vec![x]), &series(y), OlsOptions { nw_lags: 8, drop_collinear: false }).unwrap();
    let ratio = fit.cov_nw[(1, 1)] / fit.cov_ols[(1, 1)];
    assert!((ratio - 1.0).abs() < 0.15, "ratio {ratio}");
}

#[test]
fn pca_perfectly_correlated_pair() {
    let x: Vec<f64> = (0..20).map(|i| (i as f64 * 0.37).sin()).collect();
    let d = design(vec![x.clone(), x.iter().map(|v| 3.0 * v - 1.0).collect()]);
    let pc = principal_components(&d, 1).unwrap();
    assert!((pc.explained[0] - 1.0).abs() < 1e-12);
    assert!(pc.loadings.iter().all(|l| *l > 0.0));
    assert!(matches!(principal_components(&d, 2), Err(Error::Domain(_))));
}

#[test]
fn pca_orthogonal_columns_are_their_own_components() {
    let cols = vec![
        vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0],
        vec![1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0],
        vec![1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0],
    ];
    let d = design(cols.clone());
    let pc = principal_components(&d, 3).unwrap();
    for ev in &pc.eigenvalues {
        assert!((ev - 1.0).abs() < 1e-12);
    }
    // every score column equals some standardized input column up to sign
    for c in 0..3 {
        let score = pc.scores.column(c);
        let matched = cols.iter().any(|col| {
            let z = crate::timeseries::standardize_values(col).unwrap();
            oracles::max_abs_diff(score, &z) < 1e-10
                || oracles::max_abs_diff(score, &z.iter().map(|v| -v).collect::<Vec<_>>()) < 1e-10
        });
        assert!(matched, "component {c} is a mixture");
    }
}

#[test]
fn pca_eigenvalues_match_jacobi() {
    let mut rng = ChaCha8Rng::seed_from_u64(60);
    let base = normals(&mut rng, 200);
    let cols: Vec<Vec<f64>> = (0..14)
        .map(|j| {
            let noise = normals(&mut rng, 200);
            base.iter().zip(noise).map(|(b, e)| b * (j as f64 / 14.0) + e).collect()
        })
        .collect();
    let pc = principal_components(&design(cols.clone()), 5).unwrap();
    let oracle = oracles::jacobi_eigenvalues(&oracles::correlation_matrix(&cols));
    assert!(rel(&pc.eigenvalues, &oracle) < 1e-8);
    assert_eq!(pc.scores.names()[4], "pc5");
    let total: f64 = pc.eigenvalues.iter().sum();
    assert!((total - 14.0).abs() < 1e-9);
    // scores are uncorrelated with variance equal to their eigenvalue
    for a in 0..5 {
        let sa = pc.scores.column(a);
        let var = sa.iter().map(|v| v * v).sum::<f64>() / 199.0;
        assert!((var - pc.eigenvalues[a]).abs() < 1e-9);
        for b in a + 1..5 {
            let cov: f64 = sa.iter().zip(pc.scores.column(b)).map(|(x, y)| x * y).sum();
            assert!(cov.abs() < 1e-8);
        }
    }
}

#[test]
fn pca_rejects_constant_column() {
    let d = design(vec![vec![1.0, 2.0, 3.0], vec![4.0, 4.0, 4.0]]);
    assert!(matches!(principal_components(&d, 1), Err(Error::Degenerate(_))));
}

#[test]
fn fit_report_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(70);
    let fit = predictive_regression(&series(normals(&mut rng, 60)), &series(normals(&mut rng, 60)), 3, None).unwrap();
    let report = FitReport::from_fit("nr_good", &fit);
    assert_eq!(report.horizon, 3);
    assert!(report.t_hodrick.is_some());
    let json = serde_json::to_string(&report).unwrap();
    assert!(!json.contains("dropped"));
    let back: FitReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, report);
}

fn is_psd(m: &DMatrix<f64>) -> bool {
    let sym = (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= 1e-12 * m[(i, i)].abs().max(1.0)));
    let ev = nalgebra::SymmetricEigen::new(m.clone()).eigenvalues;
    let top = ev.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    sym && ev.iter().all(|l| *l >= -1e-8 * top.max(1e-300))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn covariances_are_symmetric_psd(seed in 0u64..10_000, lags in 0usize..8, h in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = series(normals(&mut rng, 60));
        let r = series(normals(&mut rng, 60));
        let fit = predictive_regression(&s, &r, h, None).unwrap();
        prop_assert!(is_psd(&fit.cov_ols));
        prop_assert!(is_psd(&fit.cov_white));
        prop_assert!(is_psd(&fit.cov_nw));
        prop_assert!(is_psd(fit.cov_hodrick.as_ref().unwrap()));
        let d = design(vec![normals(&mut rng, 40)]);
        let e = normals(&mut rng, 40);
        prop_assert!(is_psd(&newey_west_covariance(&d, &e, lags).unwrap()));
    }

    #[test]
    fn t_stats_match_their_definition(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fit = ols(&design(vec![normals(&mut rng, 30)]), &series(normals(&mut rng, 30))).unwrap();
        for flavor in [CovFlavor::Ols, CovFlavor::White, CovFlavor::NeweyWest] {
            let t = fit.t_stats(flavor).unwrap();
            let cov = fit.covariance(flavor).unwrap();
            for i in 0..2 {
                prop_assert!((t[i] - fit.coefficients[i] / cov[(i, i)].sqrt()).abs() < 1e-12);
            }
        }
        prop_assert!((0.0..=1.0).contains(&fit.r_squared));
    }
}
