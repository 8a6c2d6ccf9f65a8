//! Test statistics shared by the checks.

use crate::error::{Error, Result};
use crate::numerics::{kolmogorov_survival, regularized_gamma_q};

/// Two-sided KS statistic from ascending samples and their CDF values.
pub fn ks_statistic(cdf_sorted: &[f64]) -> f64 {
    let n = cdf_sorted.len() as f64;
    cdf_sorted
        .iter()
        .enumerate()
        .map(|(i, &f)| {
            let above = (i as f64 + 1.0) / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS p-value with Stephens' finite-sample correction.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d).clamp(0.0, 1.0)
}

pub fn chi_square_p_value(statistic: f64, dof: usize) -> Result<f64> {
    if dof == 0 {
        return Err(Error::domain("chi-square test needs at least one degree of freedom"));
    }
    Ok(regularized_gamma_q(0.5 * dof as f64, 0.5 * statistic.max(0.0))?.clamp(0.0, 1.0))
}

/// Bin index `0..bins` of every value by its rank among `values`.
pub fn rank_bins(values: &[f64], bins: usize) -> Vec<usize> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut out = vec![0; n];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = rank * bins / n;
    }
    out
}

/// Pearson statistic of a `rows × cols` contingency table given as
/// `(row, col)` labels.
pub fn contingency_chi_square(rows: &[usize], cols: &[usize], n_rows: usize, n_cols: usize) -> f64 {
    let mut table = vec![0u64; n_rows * n_cols];
    let mut row_sum = vec![0u64; n_rows];
    let mut col_sum = vec![0u64; n_cols];
    for (&r, &c) in rows.iter().zip(cols) {
        table[r * n_cols + c] += 1;
        row_sum[r] += 1;
        col_sum[c] += 1;
    }
    let n = rows.len() as f64;
    let mut stat = 0.0;
    for r in 0..n_rows {
        for c in 0..n_cols {
            let expected = row_sum[r] as f64 * col_sum[c] as f64 / n;
            if expected > 0.0 {
                let d = table[r * n_cols + c] as f64 - expected;
                stat += d * d / expected;
            }
        }
    }
    stat
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_of_exact_uniform_grid() {
        let n = 100;
        let f: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        assert!((ks_statistic(&f) - 0.5 / n as f64).abs() < 1e-15);
    }

    #[test]
    fn ks_critical_value() {
        // λ = 1.6276236115189502 has Kolmogorov tail probability 0.01.
        let n = 1_000_000;
        let sn = (n as f64).sqrt();
        let d = 1.6276236115189502 / (sn + 0.12 + 0.11 / sn);
        assert!((ks_p_value(d, n) - 0.01).abs() < 1e-10);
    }

    #[test]
    fn chi_square_tail_reference() {
        // Q(180.5, 190) for 361 degrees of freedom at statistic 380.
        let p = chi_square_p_value(380.0, 361).unwrap();
        assert!((p - 0.2358314884209929).abs() < 1e-12);
        assert!(chi_square_p_value(1.0, 0).is_err());
    }

    #[test]
    fn rank_bins_are_balanced() {
        let values: Vec<f64> = (0..1000).map(|i| ((i * 7919) % 1000) as f64).collect();
        let bins = rank_bins(&values, 20);
        let mut counts = [0; 20];
        for b in bins {
            counts[b] += 1;
        }
        assert!(counts.iter().all(|&c| c == 50));
    }

    #[test]
    fn perfectly_dependent_table() {
        let rows: Vec<usize> = (0..400).map(|i| i % 4).collect();
        let stat = contingency_chi_square(&rows, &rows, 4, 4);
        // Diagonal table: χ² = n (k - 1).
        assert!((stat - 1200.0).abs() < 1e-9);
    }
}
