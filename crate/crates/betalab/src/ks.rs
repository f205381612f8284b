//! Small statistics toolbox: two-sample Kolmogorov–Smirnov, chi-square
//! goodness of fit with bin merging, and least-squares line fits for tail
//! diagnostics.

/// Two-sample KS statistic `sup |F_a − F_b|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty());
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.total_cmp(q));
    ys.sort_by(|p, q| p.total_cmp(q));
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let t = xs[i].min(ys[j]);
        while i < n && xs[i] <= t {
            i += 1;
        }
        while j < m && ys[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    d
}

/// Critical value of the two-sample KS statistic at the 1% level:
/// `1.628·sqrt((n+m)/(n·m))` (asymptotic).
pub fn ks_critical_1pct(n: usize, m: usize) -> f64 {
    1.628 * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Least-squares line fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fit `y = slope·x + intercept`; `None` with fewer than two distinct `x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

/// Merge adjacent bins until every expected count is at least
/// `min_expected`, returning (observed, expected) pairs. A trailing
/// underfull bin is merged backwards.
pub fn merge_low_expected_bins(
    observed: &[f64],
    expected: &[f64],
    min_expected: f64,
) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(observed.len(), expected.len());
    let mut obs = Vec::new();
    let mut exp = Vec::new();
    let mut acc_o = 0.0;
    let mut acc_e = 0.0;
    for (&o, &e) in observed.iter().zip(expected) {
        acc_o += o;
        acc_e += e;
        if acc_e >= min_expected {
            obs.push(acc_o);
            exp.push(acc_e);
            acc_o = 0.0;
            acc_e = 0.0;
        }
    }
    if acc_e > 0.0 {
        if let (Some(o), Some(e)) = (obs.last_mut(), exp.last_mut()) {
            *o += acc_o;
            *e += acc_e;
        } else {
            obs.push(acc_o);
            exp.push(acc_e);
        }
    }
    (obs, exp)
}

/// Pearson chi-square statistic over already-merged bins.
pub fn chi_square_statistic(observed: &[f64], expected: &[f64]) -> f64 {
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| (o - e).powi(2) / e)
        .sum()
}

/// 99.9% quantile of the chi-square distribution with `df` degrees of
/// freedom: tabulated for small `df`, Wilson–Hilferty beyond.
pub fn chi_square_threshold_999(df: usize) -> f64 {
    const TABLE: [(usize, f64); 19] = [
        (1, 10.828),
        (2, 13.816),
        (3, 16.266),
        (4, 18.467),
        (5, 20.515),
        (6, 22.458),
        (7, 24.322),
        (8, 26.124),
        (9, 27.877),
        (10, 29.588),
        (11, 31.264),
        (12, 32.909),
        (13, 34.528),
        (14, 36.123),
        (15, 37.697),
        (20, 45.315),
        (25, 52.620),
        (30, 59.703),
        (40, 73.402),
    ];
    if let Some(&(_, v)) = TABLE.iter().find(|&&(d, _)| d == df) {
        return v;
    }
    // Wilson–Hilferty: χ²_q(df) ≈ df·(1 − 2/(9df) + z_q·sqrt(2/(9df)))³,
    // z_0.999 = 3.0902.
    let d = df as f64;
    let z = 3.0902;
    d * (1.0 - 2.0 / (9.0 * d) + z * (2.0 / (9.0 * d)).sqrt()).powi(3)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_of_identical_samples_is_zero() {
        let a = [0.1, 0.5, 0.9, 0.3];
        assert_eq!(ks_two_sample(&a, &a), 0.0);
    }

    #[test]
    fn ks_of_disjoint_samples_is_one() {
        let a = [0.0, 1.0, 2.0];
        let b = [5.0, 6.0];
        assert_eq!(ks_two_sample(&a, &b), 1.0);
    }

    #[test]
    fn ks_handles_a_known_small_case() {
        // a = {1, 3}, b = {2, 4}: after x=1, gap 1/2; after 2, 0; after 3,
        // 1/2; after 4, 0.
        let d = ks_two_sample(&[1.0, 3.0], &[2.0, 4.0]);
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ks_critical_value_formula() {
        let c = ks_critical_1pct(10_000, 10_000);
        assert!((c - 1.628 * (2e4f64 / 1e8).sqrt()).abs() < 1e-12);
        assert!((c - 0.02302).abs() < 1e-4);
    }

    #[test]
    fn line_fit_recovers_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| -2.0 * x + 0.5).collect();
        let fit = linear_fit(&xs, &ys).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-13);
        assert!((fit.intercept - 0.5).abs() < 1e-13);
        assert!((fit.r_squared - 1.0).abs() < 1e-13);
    }

    #[test]
    fn bin_merging_reaches_minimum_expected() {
        let obs = [1.0, 2.0, 0.0, 7.0, 1.0, 0.0];
        let exp = [2.0, 3.0, 1.0, 6.0, 0.5, 0.5];
        let (o, e) = merge_low_expected_bins(&obs, &exp, 5.0);
        assert!(e.iter().all(|&x| x >= 5.0));
        assert!((o.iter().sum::<f64>() - obs.iter().sum::<f64>()).abs() < 1e-12);
        assert!((e.iter().sum::<f64>() - exp.iter().sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn chi_square_thresholds() {
        assert!((chi_square_threshold_999(4) - 18.467).abs() < 1e-9);
        // Wilson–Hilferty at a tabulated point stays within 0.3%.
        let wh = {
            let d = 30.0f64;
            let z = 3.0902;
            d * (1.0 - 2.0 / (9.0 * d) + z * (2.0 / (9.0 * d)).sqrt()).powi(3)
        };
        assert!((wh - 59.703).abs() / 59.703 < 3e-3);
        // Off-table values fall between neighbors.
        let t = chi_square_threshold_999(17);
        assert!(t > 37.697 && t < 45.315);
    }
}
