//! Distribution quantiles and small statistical helpers.
//!
//! Quantiles are computed in `f64` via `statrs` and converted at the
//! boundary; they parameterize interval widths, so `f64` precision is the
//! binding accuracy either way.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

/// Standard normal quantile `Phi^{-1}(p)`.
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile probability must be in (0,1)");
    Normal::standard().inverse_cdf(p)
}

/// Standard normal CDF.
pub fn standard_normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

/// Two-sided z multiplier for a central interval at `level`.
pub fn normal_two_sided(level: f64) -> f64 {
    assert!(level > 0.0 && level < 1.0, "level must be in (0,1)");
    normal_quantile(1.0 - (1.0 - level) / 2.0)
}

/// Chi-squared quantile with `dof` degrees of freedom.
pub fn chi_squared_quantile(dof: f64, p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile probability must be in (0,1)");
    ChiSquared::new(dof)
        .expect("positive degrees of freedom")
        .inverse_cdf(p)
}

/// Kolmogorov-Smirnov statistic of a sample against the standard normal.
pub fn ks_statistic_standard_normal(sample: &[f64]) -> f64 {
    assert!(!sample.is_empty());
    let mut xs = sample.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let cdf = standard_normal_cdf(x);
        let upper = (i as f64 + 1.0) / n - cdf;
        let lower = cdf - i as f64 / n;
        d = d.max(upper).max(lower);
    }
    d
}

/// OLS slope of `y` on `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "slope needs at least two points");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    sxy / sxx
}

/// Sample mean and (unbiased) variance.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Spearman rank correlation.
pub fn spearman_rank_correlation(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let rx = ranks(x);
    let ry = ranks(y);
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap());
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        // average ranks over ties
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            out[idx[k]] = avg;
        }
        i = j + 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn normal_quantile_reference_values() {
        assert_abs_diff_eq!(normal_two_sided(0.95), 1.959964, epsilon = 1e-6);
        assert_abs_diff_eq!(normal_quantile(0.5), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn chi_squared_reference_values() {
        // chi^2_2(0.95) = 5.9915
        assert_abs_diff_eq!(chi_squared_quantile(2.0, 0.95), 5.9915, epsilon = 1e-4);
        // chi^2_2 quantile has closed form -2 ln(1 - p)
        assert_abs_diff_eq!(
            chi_squared_quantile(2.0, 0.7),
            -2.0 * (1.0f64 - 0.7).ln(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn ks_statistic_detects_shift() {
        let centered: Vec<f64> = (0..400)
            .map(|i| normal_quantile((i as f64 + 0.5) / 400.0))
            .collect();
        assert!(ks_statistic_standard_normal(&centered) < 0.01);
        let shifted: Vec<f64> = centered.iter().map(|x| x + 1.0).collect();
        assert!(ks_statistic_standard_normal(&shifted) > 0.3);
    }

    #[test]
    fn slope_of_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [2.0, 4.0, 6.0, 8.0];
        assert_abs_diff_eq!(ols_slope(&x, &y), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn spearman_signs() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [10.0, 8.0, 6.0, 4.0, 2.0];
        assert_abs_diff_eq!(spearman_rank_correlation(&x, &y), -1.0, epsilon = 1e-12);
    }
}
