//! Regression kernel: OLS with an automatic intercept, heteroskedasticity and
//! autocorrelation robust covariances, and the predictive, interaction and
//! macro-link specifications built on top of it.

mod cov;
mod pca;
mod regressions;
mod report;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::timeseries::{Period, PeriodSeries};

pub use cov::{hodrick_covariance, newey_west_covariance, white_covariance};
pub use pca::{principal_components, PrincipalComponents};
pub use regressions::{
    interaction_regression, macro_link_regression, predictive_regression, MacroFlavor,
    HIGH, HIGH_X_SIGNAL, LAGGED_RESPONSE, LOW_X_SIGNAL, SIGNAL,
};
pub use report::FitReport;

pub const INTERCEPT: &str = "const";

/// Named regressors over a contiguous period range. The intercept is not
/// stored; estimators prepend it.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    start: Period,
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl DesignMatrix {
    pub fn new(start: Period, names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::Alignment(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        if let Some(c) = columns.first() {
            if columns.iter().any(|col| col.len() != c.len()) {
                return Err(Error::Alignment("columns differ in length".into()));
            }
        }
        for (i, n) in names.iter().enumerate() {
            if n == INTERCEPT || names[..i].contains(n) {
                return Err(Error::Duplicate(format!("regressor name `{n}`")));
            }
        }
        Ok(Self { start, names, columns })
    }

    /// Columns from series that already share one period range.
    pub fn from_series(cols: &[(&str, &PeriodSeries)]) -> Result<Self> {
        let (_, first) = cols
            .first()
            .ok_or_else(|| Error::InsufficientData("design needs at least one column".into()))?;
        for (name, s) in cols {
            if s.start() != first.start() || s.len() != first.len() {
                return Err(Error::Alignment(format!("column `{name}` is not aligned")));
            }
        }
        Self::new(
            first.start(),
            cols.iter().map(|(n, _)| n.to_string()).collect(),
            cols.iter().map(|(_, s)| s.values().to_vec()).collect(),
        )
    }

    pub fn start(&self) -> Period {
        self.start
    }

    pub fn nrows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.columns[i]
    }

    pub fn column_series(&self, i: usize) -> PeriodSeries {
        PeriodSeries::new(self.start, self.columns[i].clone())
    }

    /// Rows covering `[from, to]`; errors if the range is not fully covered.
    pub fn rows(&self, from: Period, to: Period) -> Result<Self> {
        let a = from.ordinal - self.start.ordinal;
        let b = to.ordinal - self.start.ordinal;
        if from.frequency != self.start.frequency || a < 0 || b < a || b as usize >= self.nrows() {
            return Err(Error::Alignment(format!(
                "design does not cover [{from}, {to}]"
            )));
        }
        let (a, b) = (a as usize, b as usize);
        Self::new(
            from,
            self.names.clone(),
            self.columns.iter().map(|c| c[a..=b].to_vec()).collect(),
        )
    }

    fn push(&mut self, name: &str, values: Vec<f64>) {
        self.names.push(name.to_string());
        self.columns.push(values);
    }

    /// Dense matrix with a leading column of ones.
    pub(crate) fn with_intercept(&self) -> DMatrix<f64> {
        let n = self.nrows();
        DMatrix::from_fn(n, self.ncols() + 1, |i, j| {
            if j == 0 {
                1.0
            } else {
                self.columns[j - 1][i]
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovFlavor {
    Ols,
    White,
    NeweyWest,
    Hodrick,
}

/// One fitted specification. Names, coefficients and every covariance share
/// the same column order, intercept first; collinear regressors that were
/// dropped are listed in `dropped` and appear nowhere else.
#[derive(Debug, Clone)]
pub struct RegressionFit {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub residuals: PeriodSeries,
    pub r_squared: f64,
    pub n_obs: usize,
    pub horizon: usize,
    pub cov_ols: DMatrix<f64>,
    pub cov_white: DMatrix<f64>,
    pub cov_nw: DMatrix<f64>,
    pub nw_lags: usize,
    pub cov_hodrick: Option<DMatrix<f64>>,
    pub dropped: Vec<String>,
}

impl RegressionFit {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.index_of(name).map(|i| self.coefficients[i])
    }

    pub fn covariance(&self, flavor: CovFlavor) -> Option<&DMatrix<f64>> {
        match flavor {
            CovFlavor::Ols => Some(&self.cov_ols),
            CovFlavor::White => Some(&self.cov_white),
            CovFlavor::NeweyWest => Some(&self.cov_nw),
            CovFlavor::Hodrick => self.cov_hodrick.as_ref(),
        }
    }

    /// coefficient / sqrt(diag) for the chosen covariance.
    pub fn t_stats(&self, flavor: CovFlavor) -> Option<Vec<f64>> {
        let cov = self.covariance(flavor)?;
        Some(
            self.coefficients
                .iter()
                .enumerate()
                .map(|(i, b)| b / cov[(i, i)].sqrt())
                .collect(),
        )
    }

    pub fn t_stat(&self, name: &str, flavor: CovFlavor) -> Option<f64> {
        let i = self.index_of(name)?;
        self.t_stats(flavor).map(|t| t[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OlsOptions {
    pub nw_lags: usize,
    /// Drop collinear regressors (with a warning) instead of failing.
    pub drop_collinear: bool,
}

impl Default for OlsOptions {
    fn default() -> Self {
        Self {
            nw_lags: 1,
            drop_collinear: false,
        }
    }
}

const RANK_TOL: f64 = 1e-10;

/// Least squares via Householder QR; see [`ols_with`].
pub fn ols(x: &DesignMatrix, y: &PeriodSeries) -> Result<RegressionFit> {
    ols_with(x, y, OlsOptions::default())
}

/// Least squares of `y` on an intercept plus the columns of `x`.
///
/// Columns are screened in order: one whose component orthogonal to the
/// columns already kept is below `1e-10 * max column norm` is rank deficient.
pub fn ols_with(x: &DesignMatrix, y: &PeriodSeries, opts: OlsOptions) -> Result<RegressionFit> {
    if x.nrows() != y.len() || x.start() != y.start() {
        return Err(Error::Alignment(format!(
            "design covers {} rows from {}, response {} from {}",
            x.nrows(),
            x.start(),
            y.len(),
            y.start()
        )));
    }
    let full = x.with_intercept();
    let mut all_names = vec![INTERCEPT.to_string()];
    all_names.extend(x.names().iter().cloned());

    let keep = independent_columns(&full);
    let dropped: Vec<String> = (0..full.ncols())
        .filter(|j| !keep.contains(j))
        .map(|j| all_names[j].clone())
        .collect();
    if !dropped.is_empty() {
        if !opts.drop_collinear {
            return Err(Error::SingularDesign(format!(
                "rank deficient in: {}",
                dropped.join(", ")
            )));
        }
        log::warn!("dropping collinear regressors: {}", dropped.join(", "));
    }
    let xm = full.select_columns(keep.iter());
    let names: Vec<String> = keep.iter().map(|&j| all_names[j].clone()).collect();

    let (n, k) = xm.shape();
    if n < k + 2 {
        return Err(Error::InsufficientData(format!(
            "{n} observations for {k} coefficients"
        )));
    }
    let yv = DVector::from_column_slice(y.values());
    let (beta, bread) = solve_qr(&xm, &yv)?;
    let fitted = &xm * &beta;
    let resid: Vec<f64> = (&yv - &fitted).iter().copied().collect();

    let ybar = yv.mean();
    let sst: f64 = yv.iter().map(|v| (v - ybar).powi(2)).sum();
    let ssr: f64 = resid.iter().map(|e| e * e).sum();
    let r_squared = if sst > 0.0 { (1.0 - ssr / sst).clamp(0.0, 1.0) } else { 0.0 };

    let s2 = ssr / (n - k) as f64;
    let cov_ols = &bread * s2;
    let cov_white = cov::sandwich(&bread, &cov::white_meat(&xm, &resid));
    let nw_lags = opts.nw_lags.min(n - 1);
    let cov_nw = cov::sandwich(&bread, &cov::newey_west_meat(&xm, &resid, nw_lags));

    Ok(RegressionFit {
        names,
        coefficients: beta.iter().copied().collect(),
        residuals: PeriodSeries::new(y.start(), resid),
        r_squared,
        n_obs: n,
        horizon: 0,
        cov_ols,
        cov_white,
        cov_nw,
        nw_lags,
        cov_hodrick: None,
        dropped,
    })
}

/// Indices of columns that add rank, in order (modified Gram-Schmidt with
/// one reorthogonalization pass).
fn independent_columns(x: &DMatrix<f64>) -> Vec<usize> {
    let max_norm = x.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let tol = RANK_TOL * max_norm;
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut keep = Vec::new();
    for (j, col) in x.column_iter().enumerate() {
        let mut v: DVector<f64> = col.into_owned();
        for _ in 0..2 {
            for q in &basis {
                let proj = q.dot(&v);
                v.axpy(-proj, q, 1.0);
            }
        }
        let norm = v.norm();
        if norm > tol && norm > 0.0 {
            basis.push(v / norm);
            keep.push(j);
        }
    }
    keep
}

/// Returns (beta, (X'X)^-1) from a thin QR of a full-column-rank X.
fn solve_qr(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let qr = x.clone().qr();
    let q = qr.q();
    let r = qr.r();
    let singular = || Error::SingularDesign("triangular factor is singular".into());
    let beta = r.solve_upper_triangular(&(q.transpose() * y)).ok_or_else(singular)?;
    let k = x.ncols();
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(singular)?;
    let bread = &r_inv * r_inv.transpose();
    Ok((beta, (&bread + bread.transpose()) * 0.5))
}

/// (X'X)^-1 for a design that must have full column rank.
pub(crate) fn bread(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if independent_columns(x).len() != x.ncols() {
        return Err(Error::SingularDesign("design is rank deficient".into()));
    }
    let y = DVector::zeros(x.nrows());
    Ok(solve_qr(x, &y)?.1)
}

#[cfg(test)]
mod tests;
