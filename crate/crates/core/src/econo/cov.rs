//! Sandwich covariance estimators.
//!
//! All three share the bread (X'X)^-1 and differ in the meat:
//!
//! ```text
//! White        S = sum_t e_t^2 x_t x_t'
//! Newey-West   S = G_0 + sum_{j=1..L} (1 - j/(L+1)) (G_j + G_j'),  G_j = sum_t e_t e_{t-j} x_t x_{t-j}'
//! Hodrick 1B   S = h^-2 sum_s e_s^2 z_s z_s',   z_s = sum of the h regressor rows whose
//!                                               horizon window contains one-period return s
//! ```
//!
//! The Hodrick form applies to regressions of h-period *average* returns,
//! hence the h^-2 factor. It rolls the regressors rather than the residuals,
//! so one-period residuals (typically computed under the no-predictability
//! null) enter squared and serial correlation from overlap never does.

use nalgebra::{DMatrix, DVector};

use super::{bread, DesignMatrix};
use crate::error::{Error, Result};

pub(crate) fn sandwich(bread: &DMatrix<f64>, meat: &DMatrix<f64>) -> DMatrix<f64> {
    let v = bread * meat * bread;
    (&v + v.transpose()) * 0.5
}

fn outer_add(acc: &mut DMatrix<f64>, a: &DVector<f64>, b: &DVector<f64>, w: f64) {
    acc.ger(w, a, b, 1.0);
}

fn row(x: &DMatrix<f64>, t: usize) -> DVector<f64> {
    x.row(t).transpose()
}

pub(crate) fn white_meat(x: &DMatrix<f64>, e: &[f64]) -> DMatrix<f64> {
    newey_west_meat(x, e, 0)
}

pub(crate) fn newey_west_meat(x: &DMatrix<f64>, e: &[f64], lags: usize) -> DMatrix<f64> {
    let (n, k) = x.shape();
    // scores g_t = e_t x_t
    let scores: Vec<DVector<f64>> = (0..n).map(|t| row(x, t) * e[t]).collect();
    let mut s = DMatrix::zeros(k, k);
    for g in &scores {
        outer_add(&mut s, g, g, 1.0);
    }
    for j in 1..=lags {
        let w = 1.0 - j as f64 / (lags as f64 + 1.0);
        let mut gamma = DMatrix::zeros(k, k);
        for t in j..n {
            outer_add(&mut gamma, &scores[t], &scores[t - j], 1.0);
        }
        s += (&gamma + gamma.transpose()) * w;
    }
    s
}

pub(crate) fn hodrick_meat(x: &DMatrix<f64>, one_period: &[f64], h: usize) -> DMatrix<f64> {
    let (t_obs, k) = x.shape();
    let mut s = DMatrix::zeros(k, k);
    // running window sum over rows max(0, s+1-h) ..= min(T-1, s)
    let mut z = DVector::zeros(k);
    for (idx, e) in one_period.iter().enumerate() {
        if idx < t_obs {
            z += row(x, idx);
        }
        if idx + 1 > h {
            let out = idx + 1 - h - 1;
            if out < t_obs {
                z -= row(x, out);
            }
        }
        outer_add(&mut s, &z, &z, e * e);
    }
    s / (h * h) as f64
}

fn check_rows(x: &DesignMatrix, e: &[f64], expected: usize, what: &str) -> Result<()> {
    if e.len() != expected {
        return Err(Error::Alignment(format!(
            "{what}: {} residuals for a {}-row design (expected {expected})",
            e.len(),
            x.nrows()
        )));
    }
    Ok(())
}

/// Heteroskedasticity-consistent (HC0) covariance of the OLS coefficients,
/// intercept first.
pub fn white_covariance(x: &DesignMatrix, residuals: &[f64]) -> Result<DMatrix<f64>> {
    check_rows(x, residuals, x.nrows(), "white")?;
    let xm = x.with_intercept();
    Ok(sandwich(&bread(&xm)?, &white_meat(&xm, residuals)))
}

/// Bartlett-kernel HAC covariance, intercept first. `lags = 0` is White.
pub fn newey_west_covariance(x: &DesignMatrix, residuals: &[f64], lags: usize) -> Result<DMatrix<f64>> {
    check_rows(x, residuals, x.nrows(), "newey-west")?;
    if lags >= x.nrows() {
        return Err(Error::InsufficientData(format!(
            "{lags} lags with {} observations",
            x.nrows()
        )));
    }
    let xm = x.with_intercept();
    Ok(sandwich(&bread(&xm)?, &newey_west_meat(&xm, residuals, lags)))
}

/// Hodrick (1992) 1B covariance for a regression of h-period average
/// returns on `x`, intercept first.
///
/// `one_period` holds the residuals of the `T + h - 1` one-period returns
/// that the T horizon averages span, in time order: element `s` is the
/// return at position `s + 1` relative to the first regression row.
/// At `h = 1` this is exactly [`white_covariance`] with those residuals.
pub fn hodrick_covariance(x: &DesignMatrix, one_period: &[f64], h: usize) -> Result<DMatrix<f64>> {
    if h == 0 {
        return Err(Error::Domain("Hodrick covariance needs h >= 1".into()));
    }
    if x.nrows() <= h + x.ncols() + 1 {
        return Err(Error::InsufficientData(format!(
            "{} observations for horizon {h} with {} coefficients",
            x.nrows(),
            x.ncols() + 1
        )));
    }
    check_rows(x, one_period, x.nrows() + h - 1, "hodrick")?;
    let xm = x.with_intercept();
    Ok(sandwich(&bread(&xm)?, &hodrick_meat(&xm, one_period, h)))
}

/// Hodrick covariance on an already intercept-augmented matrix.
pub(crate) fn hodrick_raw(x: &DMatrix<f64>, bread: &DMatrix<f64>, one_period: &[f64], h: usize) -> DMatrix<f64> {
    sandwich(bread, &hodrick_meat(x, one_period, h))
}
