use nalgebra::{DMatrix, SymmetricEigen};

use super::DesignMatrix;
use crate::error::{Error, Result};
use crate::timeseries::standardize_values;

#[derive(Debug, Clone)]
pub struct PrincipalComponents {
    /// Component scores named `pc1..pck`.
    pub scores: DesignMatrix,
    /// Every eigenvalue of the correlation matrix, descending.
    pub eigenvalues: Vec<f64>,
    /// Loadings of the retained components, one column each.
    pub loadings: DMatrix<f64>,
    /// Share of total variance per retained component.
    pub explained: Vec<f64>,
}

/// First `k` principal components of the correlation matrix of `x`.
/// Each loading vector is signed so its largest-magnitude entry is positive.
pub fn principal_components(x: &DesignMatrix, k: usize) -> Result<PrincipalComponents> {
    let p = x.ncols();
    let n = x.nrows();
    if k == 0 || k > p {
        return Err(Error::Domain(format!("cannot take {k} components of {p} columns")));
    }
    let z: Vec<Vec<f64>> = (0..p)
        .map(|j| {
            standardize_values(x.column(j)).map_err(|e| match e {
                Error::Degenerate(_) => Error::Degenerate(format!("column `{}` is constant", x.names()[j])),
                other => other,
            })
        })
        .collect::<Result<_>>()?;
    let zm = DMatrix::from_fn(n, p, |i, j| z[j][i]);
    let corr = zm.transpose() * &zm / (n as f64 - 1.0);
    let corr = (&corr + corr.transpose()) * 0.5;

    let eig = SymmetricEigen::new(corr);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();

    let top = eigenvalues[0];
    let rank = eigenvalues.iter().filter(|&&l| l > 1e-10 * top).count();
    if k > rank {
        return Err(Error::Domain(format!("requested {k} components but rank is {rank}")));
    }

    let mut loadings = DMatrix::zeros(p, k);
    for (c, &i) in order.iter().take(k).enumerate() {
        let mut v = eig.eigenvectors.column(i).into_owned();
        let lead = v.iter().copied().fold(0.0f64, |m, a| if a.abs() > m.abs() { a } else { m });
        if lead < 0.0 {
            v = -v;
        }
        loadings.set_column(c, &v);
    }
    let scores = &zm * &loadings;
    let total: f64 = eigenvalues.iter().sum();
    Ok(PrincipalComponents {
        scores: DesignMatrix::new(
            x.start(),
            (1..=k).map(|i| format!("pc{i}")).collect(),
            (0..k).map(|c| scores.column(c).iter().copied().collect()).collect(),
        )?,
        explained: eigenvalues[..k].iter().map(|l| l / total).collect(),
        eigenvalues,
        loadings,
    })
}
