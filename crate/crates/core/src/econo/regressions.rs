use super::cov::hodrick_raw;
use super::{bread, ols_with, DesignMatrix, OlsOptions, RegressionFit};
use crate::error::{Error, Result};
use crate::timeseries::{align, horizon_average, standardize, standardize_values, Period, PeriodSeries, StateDummy};

pub const SIGNAL: &str = "signal";
pub const HIGH_X_SIGNAL: &str = "high_x_signal";
pub const LOW_X_SIGNAL: &str = "low_x_signal";
pub const HIGH: &str = "high";
pub const LAGGED_RESPONSE: &str = "lagged_response";

/// Common period range of the inputs, further restricted to the design.
fn common_range(series: &[&PeriodSeries], controls: Option<&DesignMatrix>) -> Result<(Period, Period)> {
    let aligned = align(series)?;
    let (mut lo, mut hi) = (aligned[0].start(), aligned[0].end());
    if let Some(c) = controls {
        if c.start().frequency != lo.frequency {
            return Err(Error::Frequency("controls use a different frequency".into()));
        }
        if c.nrows() == 0 {
            return Err(Error::InsufficientData("controls are empty".into()));
        }
        let c_end = c.start().offset(c.nrows() as i64 - 1);
        lo = lo.max(c.start());
        hi = hi.min(c_end);
        if lo > hi {
            return Err(Error::Alignment("controls do not overlap the sample".into()));
        }
    }
    Ok((lo, hi))
}

/// Response, standardized-signal period range for horizon `h`.
struct Sample {
    y: PeriodSeries,
    signal: PeriodSeries,
    /// One-period returns at positions 1.. of the aligned sample.
    returns: Vec<f64>,
}

fn horizon_sample(signal: &PeriodSeries, returns: &PeriodSeries, lo: Period, hi: Period, h: usize) -> Result<Sample> {
    let r = returns.slice(lo, hi)?;
    let s = signal.slice(lo, hi)?;
    if h == 0 {
        return Ok(Sample {
            signal: standardize(&s)?,
            y: r.clone(),
            returns: r.into_values(),
        });
    }
    let y = horizon_average(&r, h)?;
    let s = s.slice(y.start(), y.end())?;
    Ok(Sample {
        signal: standardize(&s)?,
        y,
        returns: r.values().to_vec(),
    })
}

fn attach_hodrick(fit: &mut RegressionFit, design: &DesignMatrix, returns: &[f64], h: usize) -> Result<()> {
    fit.horizon = h;
    if h == 0 {
        return Ok(());
    }
    // one-period residuals under the no-predictability null
    let future = &returns[1..];
    let m = future.iter().sum::<f64>() / future.len() as f64;
    let e: Vec<f64> = future.iter().map(|r| r - m).collect();

    let kept: Vec<usize> = design
        .names()
        .iter()
        .enumerate()
        .filter(|(_, n)| fit.names.contains(n))
        .map(|(j, _)| j + 1)
        .collect();
    let full = design.with_intercept();
    let cols: Vec<usize> = std::iter::once(0).chain(kept).collect();
    let x = full.select_columns(cols.iter());
    if x.nrows() <= h + x.ncols() {
        return Err(Error::InsufficientData(format!(
            "{} observations for horizon {h}",
            x.nrows()
        )));
    }
    fit.cov_hodrick = Some(hodrick_raw(&x, &bread(&x)?, &e, h));
    Ok(())
}

/// Regresses the h-period average return from t+1 to t+h on the signal at t
/// (h = 0: contemporaneous return on signal). The signal is standardized over
/// the regression sample, so the slope is the return response to a one
/// standard deviation move. Newey-West uses max(h, 1) lags; h >= 1 adds the
/// Hodrick 1B covariance.
pub fn predictive_regression(
    signal: &PeriodSeries,
    returns: &PeriodSeries,
    h: usize,
    controls: Option<&DesignMatrix>,
) -> Result<RegressionFit> {
    let (lo, hi) = common_range(&[signal, returns], controls)?;
    let sample = horizon_sample(signal, returns, lo, hi, h)?;
    let mut design = DesignMatrix::from_series(&[(SIGNAL, &sample.signal)])?;
    if let Some(c) = controls {
        let rows = c.rows(sample.y.start(), sample.y.end())?;
        for (j, name) in rows.names().iter().enumerate() {
            design.push(name, rows.column(j).to_vec());
        }
    }
    let opts = OlsOptions {
        nw_lags: h.max(1),
        drop_collinear: false,
    };
    let mut fit = ols_with(&design, &sample.y, opts)?;
    attach_hodrick(&mut fit, &design, &sample.returns, h)?;
    Ok(fit)
}

/// State-dependent slopes: returns on high x signal, low x signal and the
/// high-state level. Collinear columns (e.g. a dummy that never switches)
/// are dropped with a warning.
pub fn interaction_regression(
    signal: &PeriodSeries,
    returns: &PeriodSeries,
    dummy: &StateDummy,
    h: usize,
) -> Result<RegressionFit> {
    let high_series = dummy.high();
    let (lo, hi) = common_range(&[signal, returns, &high_series], None)?;
    let sample = horizon_sample(signal, returns, lo, hi, h)?;
    let high = high_series.slice(sample.y.start(), sample.y.end())?;
    let s = sample.signal.values();
    let hv = high.values();
    let design = DesignMatrix::new(
        sample.y.start(),
        vec![HIGH_X_SIGNAL.into(), LOW_X_SIGNAL.into(), HIGH.into()],
        vec![
            s.iter().zip(hv).map(|(x, d)| x * d).collect(),
            s.iter().zip(hv).map(|(x, d)| x * (1.0 - d)).collect(),
            hv.to_vec(),
        ],
    )?;
    let opts = OlsOptions {
        nw_lags: h.max(1),
        drop_collinear: true,
    };
    let mut fit = ols_with(&design, &sample.y, opts)?;
    attach_hodrick(&mut fit, &design, &sample.returns, h)?;
    Ok(fit)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MacroFlavor {
    /// y_{t+1} on signal_t.
    Simple,
    /// y_{t+1} on signal_t and y_t.
    ArControlled,
}

/// Regresses next period's standardized macro proxy on the standardized
/// signal (and, for [`MacroFlavor::ArControlled`], the current proxy value).
/// Rows are indexed by the signal period t; Newey-West uses one lag.
pub fn macro_link_regression(
    proxy: &PeriodSeries,
    signal: &PeriodSeries,
    flavor: MacroFlavor,
) -> Result<RegressionFit> {
    let aligned = align(&[proxy, signal])?;
    let n = aligned[0].len();
    if n < 3 {
        return Err(Error::InsufficientData(format!("{n} aligned observations")));
    }
    let y_all = standardize_values(aligned[0].values())?;
    let start = aligned[0].start();
    let y = PeriodSeries::new(start, y_all[1..].to_vec());
    let s = PeriodSeries::new(start, standardize_values(&aligned[1].values()[..n - 1])?);
    let mut design = DesignMatrix::from_series(&[(SIGNAL, &s)])?;
    if flavor == MacroFlavor::ArControlled {
        design.push(LAGGED_RESPONSE, y_all[..n - 1].to_vec());
    }
    let mut fit = ols_with(&design, &y, OlsOptions::default())?;
    fit.horizon = 1;
    Ok(fit)
}
