//! Sample statistics used by the instrument analyses. Variances use the n−1 denominator.

use crate::psychometrics::PsychError;

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

pub fn sample_variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() as f64 - 1.0)
}

/// Pearson correlation, or `None` when fewer than two observations or either side is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "pearson: length mismatch");
    if x.len() < 2 {
        return None;
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn check_columns(columns: &[Vec<f64>]) -> Result<usize, PsychError> {
    let n = columns.first().map_or(0, Vec::len);
    if columns.iter().any(|c| c.len() != n) {
        return Err(PsychError::Ragged);
    }
    if n < 2 {
        return Err(PsychError::InsufficientRespondents { n });
    }
    Ok(n)
}

/// Symmetric correlation matrix with unit diagonal.
pub fn pearson_correlation_matrix(columns: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, PsychError> {
    check_columns(columns)?;
    if let Some(i) = columns.iter().position(|c| sample_variance(c) == 0.0) {
        return Err(PsychError::ZeroVariance { column: i });
    }
    let k = columns.len();
    let mut r = vec![vec![0.0; k]; k];
    for i in 0..k {
        r[i][i] = 1.0;
        for j in (i + 1)..k {
            let v = pearson(&columns[i], &columns[j]).expect("variances checked non-zero");
            r[i][j] = v;
            r[j][i] = v;
        }
    }
    Ok(r)
}

/// Coefficient alpha: `k/(k−1) · (1 − Σ var(item) / var(total))`.
pub fn cronbach_alpha(items: &[Vec<f64>]) -> Result<f64, PsychError> {
    if items.len() < 2 {
        return Err(PsychError::SingleItemConstruct);
    }
    let n = check_columns(items)?;
    let k = items.len() as f64;
    let totals: Vec<f64> = (0..n).map(|r| items.iter().map(|c| c[r]).sum()).collect();
    let total_var = sample_variance(&totals);
    if total_var == 0.0 {
        return Err(PsychError::ZeroTotalVariance);
    }
    let item_var: f64 = items.iter().map(|c| sample_variance(c)).sum();
    Ok(k / (k - 1.0) * (1.0 - item_var / total_var))
}
