use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CovFlavor, RegressionFit};

/// JSON summary of one fit. Values are in model units (decimal returns);
/// percentage scaling happens only in report tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub spec: String,
    pub horizon: usize,
    pub coefficients: BTreeMap<String, f64>,
    pub t_nw: BTreeMap<String, f64>,
    pub t_hodrick: Option<BTreeMap<String, f64>>,
    pub r2: f64,
    pub n_obs: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dropped: Vec<String>,
}

impl FitReport {
    pub fn from_fit(spec: impl Into<String>, fit: &RegressionFit) -> Self {
        let named = |vals: &[f64]| -> BTreeMap<String, f64> {
            fit.names.iter().cloned().zip(vals.iter().copied()).collect()
        };
        Self {
            spec: spec.into(),
            horizon: fit.horizon,
            coefficients: named(&fit.coefficients),
            t_nw: named(&fit.t_stats(CovFlavor::NeweyWest).expect("always present")),
            t_hodrick: fit.t_stats(CovFlavor::Hodrick).map(|t| named(&t)),
            r2: fit.r_squared,
            n_obs: fit.n_obs,
            dropped: fit.dropped.clone(),
        }
    }
}
