//! Brute-force reference implementations.
//!
//! Everything here works on plain `Vec`s with textbook formulas and shares
//! no code with the production estimators: normal equations with
//! Gauss-Jordan elimination instead of QR, explicit double sums instead of
//! lag-wise accumulation, cyclic Jacobi rotations instead of a library
//! eigensolver. They are slow on purpose.

/// Row-major dense matrix.
pub type Matrix = Vec<Vec<f64>>;

pub fn transpose_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, p, q) = (a.len(), a[0].len(), b[0].len());
    let mut out = vec![vec![0.0; q]; p];
    for i in 0..p {
        for j in 0..q {
            out[i][j] = (0..n).map(|t| a[t][i] * b[t][j]).sum();
        }
    }
    out
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, m, q) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![0.0; q]; n];
    for i in 0..n {
        for j in 0..q {
            out[i][j] = (0..m).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Gauss-Jordan inverse with partial pivoting; `None` when singular.
pub fn invert(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        let d = a[col][col];
        for v in a[col].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    for c in 0..2 * n {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Prepends a column of ones to `columns` (each a regressor) and returns rows.
pub fn rows_with_intercept(columns: &[Vec<f64>]) -> Matrix {
    let n = columns.first().map_or(0, Vec::len);
    (0..n)
        .map(|t| std::iter::once(1.0).chain(columns.iter().map(|c| c[t])).collect())
        .collect()
}

/// beta = (X'X)^-1 X'y.
pub fn normal_equations(x: &Matrix, y: &[f64]) -> Option<Vec<f64>> {
    let xtx = transpose_mul(x, x);
    let ycol: Matrix = y.iter().map(|v| vec![*v]).collect();
    let xty = transpose_mul(x, &ycol);
    let inv = invert(&xtx)?;
    Some(mat_mul(&inv, &xty).into_iter().map(|r| r[0]).collect())
}

pub fn residuals(x: &Matrix, y: &[f64], beta: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(y)
        .map(|(row, yi)| yi - row.iter().zip(beta).map(|(a, b)| a * b).sum::<f64>())
        .collect()
}

fn sandwich(x: &Matrix, meat: &Matrix) -> Option<Matrix> {
    let inv = invert(&transpose_mul(x, x))?;
    Some(mat_mul(&mat_mul(&inv, meat), &inv))
}

/// HC0 covariance.
pub fn white(x: &Matrix, e: &[f64]) -> Option<Matrix> {
    let k = x[0].len();
    let mut meat = vec![vec![0.0; k]; k];
    for (row, et) in x.iter().zip(e) {
        for i in 0..k {
            for j in 0..k {
                meat[i][j] += et * et * row[i] * row[j];
            }
        }
    }
    sandwich(x, &meat)
}

/// Newey-West as the full double sum over all observation pairs.
pub fn newey_west(x: &Matrix, e: &[f64], lags: usize) -> Option<Matrix> {
    let (n, k) = (x.len(), x[0].len());
    let mut meat = vec![vec![0.0; k]; k];
    for t in 0..n {
        for s in 0..n {
            let d = t.abs_diff(s);
            if d > lags {
                continue;
            }
            let w = 1.0 - d as f64 / (lags as f64 + 1.0);
            for i in 0..k {
                for j in 0..k {
                    meat[i][j] += w * e[t] * e[s] * x[t][i] * x[s][j];
                }
            }
        }
    }
    sandwich(x, &meat)
}

/// Hodrick 1B for h-period average returns, with membership of each
/// one-period return in each horizon window checked explicitly.
pub fn hodrick(x: &Matrix, one_period: &[f64], h: usize) -> Option<Matrix> {
    let (n, k) = (x.len(), x[0].len());
    let mut meat = vec![vec![0.0; k]; k];
    for (s, es) in one_period.iter().enumerate() {
        // return s+1 is inside the window of row t when t+1 <= s+1 <= t+h
        let mut z = vec![0.0; k];
        for t in 0..n {
            if t <= s && s < t + h {
                for i in 0..k {
                    z[i] += x[t][i];
                }
            }
        }
        for i in 0..k {
            for j in 0..k {
                meat[i][j] += es * es * z[i] * z[j] / (h * h) as f64;
            }
        }
    }
    sandwich(x, &meat)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
pub fn jacobi_eigenvalues(m: &Matrix) -> Vec<f64> {
    let n = m.len();
    let mut a = m.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    let (arp, arq) = (a[r][p], a[r][q]);
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for r in 0..n {
                    let (apr, aqr) = (a[p][r], a[q][r]);
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Sample correlation matrix of the given columns.
pub fn correlation_matrix(columns: &[Vec<f64>]) -> Matrix {
    let p = columns.len();
    let mut out = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in 0..p {
            out[i][j] = pearson(&columns[i], &columns[j]);
        }
    }
    out
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Novelty from the full pairwise correlation table of period means: for
/// each period after the first, 1 - max correlation with up to `lookback`
/// predecessors.
pub fn novelty(means: &[Vec<f64>], lookback: usize) -> Vec<f64> {
    let n = means.len();
    let table: Matrix = (0..n)
        .map(|i| (0..n).map(|j| pearson(&means[i], &means[j])).collect())
        .collect();
    (1..n)
        .map(|t| {
            let best = (1..=lookback.min(t))
                .map(|j| table[t][t - j])
                .fold(f64::NEG_INFINITY, f64::max);
            1.0 - best
        })
        .collect()
}

/// Recursive one-step forecasts by refitting from scratch at every date.
/// Forecast `i` targets position `first + i` and uses (signal[s], r[s+1])
/// pairs with s + 1 < first + i, plus the expanding mean of r[..first + i].
/// Returns (benchmark, model) paths.
pub fn recursive_forecasts(signal: &[f64], returns: &[f64], first: usize) -> (Vec<f64>, Vec<f64>) {
    let mut bench = Vec::new();
    let mut model = Vec::new();
    for target in first..returns.len() {
        let origin = target - 1;
        bench.push(returns[..=origin].iter().sum::<f64>() / (origin + 1) as f64);
        let x = rows_with_intercept(&[signal[..origin].to_vec()]);
        let y = &returns[1..=origin];
        let beta = normal_equations(&x, y).expect("training design is regular");
        model.push(beta[0] + beta[1] * signal[origin]);
    }
    (bench, model)
}

/// Certainty-equivalent return, annualized: (mean - gamma/2 * var) * ppy.
pub fn cer(portfolio: &[f64], gamma: f64, periods_per_year: f64) -> f64 {
    let n = portfolio.len() as f64;
    let m = portfolio.iter().sum::<f64>() / n;
    let v = portfolio.iter().map(|p| (p - m) * (p - m)).sum::<f64>() / (n - 1.0);
    (m - 0.5 * gamma * v) * periods_per_year
}

pub fn sharpe(excess: &[f64], periods_per_year: f64) -> f64 {
    let n = excess.len() as f64;
    let m = excess.iter().sum::<f64>() / n;
    let v = excess.iter().map(|p| (p - m) * (p - m)).sum::<f64>() / (n - 1.0);
    m / v.sqrt() * periods_per_year.sqrt()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// max |a - b| / max(1, |b|) entrywise.
pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / y.abs().max(1e-300))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invert_small() {
        let m = vec![vec![4.0, 7.0], vec![2.0, 6.0]];
        let inv = invert(&m).unwrap();
        let expected = [[0.6, -0.7], [-0.2, 0.4]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((inv[i][j] - expected[i][j]).abs() < 1e-14);
            }
        }
        assert!(invert(&vec![vec![1.0, 2.0], vec![2.0, 4.0]]).is_none());
    }

    #[test]
    fn jacobi_known_spectrum() {
        // [[2,1],[1,2]] has eigenvalues 3 and 1
        let ev = jacobi_eigenvalues(&vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!((ev[0] - 3.0).abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_line() {
        let x = rows_with_intercept(&[vec![1.0, 2.0, 3.0, 4.0]]);
        let b = normal_equations(&x, &[3.0, 5.0, 7.0, 9.0]).unwrap();
        assert!((b[0] - 1.0).abs() < 1e-12 && (b[1] - 2.0).abs() < 1e-12);
    }
}
