//! Tridiagonal realizations of the Gaussian and Laguerre beta-ensembles,
//! with a symmetric-tridiagonal eigensolver.
//!
//! The scaling convention puts the spectral edge at `mu_plus · N`: the
//! single-eigenvalue weight is exp(−θλ²/(2Nδ)) for the Gaussian model and
//! λ^{θ(L−N+1)−1} exp(−θλ/α) for the Laguerre model, θ = β/2, so that
//! E[p_M]/N^{M+1} reproduces the exact moment machinery (Catalan numbers
//! for the Gaussian, Narayana sums for Laguerre) and λᵢ/N follows the
//! semicircle / Marchenko–Pastur bulk.
//!
//! Realization: the Gaussian model is a symmetric tridiagonal matrix with
//! independent N(0, 2Nδ/β) diagonal and √(Nδ/β)·χ_{β(N−i)} off-diagonal;
//! the Laguerre model is α·BBᵀ/β for a lower-bidiagonal B with χ_{β(L−i+1)}
//! diagonal and χ_{β(N−i)} subdiagonal (1-based i). Both are classical
//! constructions; their single-eigenvalue (N = 1) laws are pinned by tests
//! against the Gamma/Normal ground truth.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::StochasticsError;

/// A real symmetric tridiagonal matrix, stored as its two bands.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self, StochasticsError> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(StochasticsError::Dimension(format!(
                "tridiagonal needs n ≥ 1 and n−1 off-diagonal entries, got {} and {}",
                diag.len(),
                off.len()
            )));
        }
        Ok(SymTridiag { diag, off })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// All eigenvalues, sorted descending. Implicit-shift QL with the
    /// standard Wilkinson-style shift; O(N²) total, no eigenvectors.
    pub fn eigenvalues(&self) -> Result<Vec<f64>, StochasticsError> {
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(0.0);
        ql_implicit(&mut d, &mut e)?;
        d.sort_by(|a, b| b.partial_cmp(a).expect("eigenvalues are finite"));
        Ok(d)
    }
}

/// QL iteration on (diagonal, super-diagonal) in place; `e` carries a
/// trailing sentinel slot. Eigenvalues land in `d`, unordered.
pub(crate) fn ql_implicit(d: &mut [f64], e: &mut [f64]) -> Result<(), StochasticsError> {
    let n = d.len();
    const MAX_SWEEPS: u32 = 30;
    for l in 0..n {
        let mut iter = 0u32;
        loop {
            // Find the first negligible coupling at or after l; the block
            // [l, m] is what the shift acts on.
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if iter == MAX_SWEEPS {
                return Err(StochasticsError::EigenNoConvergence(l));
            }
            iter += 1;

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // A rotation annihilated the coupling early; restart
                    // the sweep on the shrunken block.
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// χ_k draw: the square root of a Gamma(k/2, scale 2) variable.
fn chi<R: Rng + ?Sized>(k: f64, rng: &mut R) -> Result<f64, StochasticsError> {
    if k == 0.0 {
        return Ok(0.0);
    }
    let gamma = Gamma::new(k / 2.0, 2.0).map_err(|e| {
        StochasticsError::UnsupportedEnsemble(format!("chi({k}) is not samplable: {e}"))
    })?;
    Ok(gamma.sample(rng).sqrt())
}

/// Tridiagonal Gaussian beta-ensemble with weight parameter `delta`:
/// diagonal N(0, 2Nδ/β), off-diagonal √(Nδ/β)·χ with decreasing index.
pub fn gaussian_model<R: Rng + ?Sized>(
    n: usize,
    delta: f64,
    beta: f64,
    rng: &mut R,
) -> Result<SymTridiag, StochasticsError> {
    if n == 0 {
        return Err(StochasticsError::Dimension("n must be ≥ 1".into()));
    }
    if delta <= 0.0 || beta <= 0.0 {
        return Err(StochasticsError::UnsupportedEnsemble(format!(
            "Gaussian model needs delta > 0 and beta > 0, got {delta} and {beta}"
        )));
    }
    let scale = (n as f64 * delta / beta).sqrt();
    let diag: Vec<f64> = (0..n)
        .map(|_| {
            let g: f64 = StandardNormal.sample(rng);
            g * scale * std::f64::consts::SQRT_2
        })
        .collect();
    let off = (0..n - 1)
        .map(|i| Ok(scale * chi(beta * (n - 1 - i) as f64, rng)?))
        .collect::<Result<Vec<f64>, StochasticsError>>()?;
    SymTridiag::new(diag, off)
}

/// Tridiagonal Laguerre beta-ensemble: α·BBᵀ/β for the lower-bidiagonal
/// χ-matrix B with `l ≥ n` columns in the underlying rectangle. Negative
/// `alpha` flips the spectrum onto the negative half-line.
pub fn laguerre_model<R: Rng + ?Sized>(
    n: usize,
    l: usize,
    alpha: f64,
    beta: f64,
    rng: &mut R,
) -> Result<SymTridiag, StochasticsError> {
    if n == 0 || l < n {
        return Err(StochasticsError::Dimension(format!(
            "Laguerre model needs 1 ≤ n ≤ l, got n = {n}, l = {l}"
        )));
    }
    if alpha == 0.0 || beta <= 0.0 {
        return Err(StochasticsError::UnsupportedEnsemble(format!(
            "Laguerre model needs alpha ≠ 0 and beta > 0, got {alpha} and {beta}"
        )));
    }
    let d = (0..n)
        .map(|i| chi(beta * (l - i) as f64, rng))
        .collect::<Result<Vec<f64>, StochasticsError>>()?;
    let s = (0..n - 1)
        .map(|i| chi(beta * (n - 1 - i) as f64, rng))
        .collect::<Result<Vec<f64>, StochasticsError>>()?;
    let scale = alpha / beta;
    let diag: Vec<f64> = (0..n)
        .map(|i| {
            let prev = if i > 0 { s[i - 1] * s[i - 1] } else { 0.0 };
            scale * (d[i] * d[i] + prev)
        })
        .collect();
    let off: Vec<f64> = (0..n - 1).map(|i| scale * d[i] * s[i]).collect();
    SymTridiag::new(diag, off)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::{stream_rng, RunningStats};

    #[test]
    fn ql_reproduces_a_closed_form_spectrum() {
        // The (-1, 2, -1) discrete Laplacian has eigenvalues
        // 2 − 2cos(kπ/(n+1)).
        let n = 9;
        let t = SymTridiag::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap();
        let eig = t.eigenvalues().unwrap();
        for (k, lambda) in eig.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((n - k) as f64 * std::f64::consts::PI
                / (n as f64 + 1.0))
                .cos();
            assert!((lambda - exact).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn ql_matches_trace_identities_on_random_input() {
        let mut rng = stream_rng(7, 0);
        for trial in 0..5 {
            let n = 40 + 17 * trial;
            let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let off: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let t = SymTridiag::new(diag.clone(), off.clone()).unwrap();
            let eig = t.eigenvalues().unwrap();
            let tr: f64 = diag.iter().sum();
            let tr2: f64 = diag.iter().map(|x| x * x).sum::<f64>()
                + 2.0 * off.iter().map(|x| x * x).sum::<f64>();
            let sum: f64 = eig.iter().sum();
            let sum2: f64 = eig.iter().map(|x| x * x).sum();
            assert!((sum - tr).abs() < 1e-9 * (1.0 + tr.abs()));
            assert!((sum2 - tr2).abs() < 1e-9 * (1.0 + tr2.abs()));
            assert!(eig.windows(2).all(|w| w[0] >= w[1]), "sorted descending");
        }
    }

    #[test]
    fn diagonal_matrix_is_a_fixed_point() {
        let t = SymTridiag::new(vec![3.0, 1.0, 4.0, 1.0, 5.0], vec![0.0; 4]).unwrap();
        assert_eq!(t.eigenvalues().unwrap(), vec![5.0, 4.0, 3.0, 1.0, 1.0]);
    }

    #[test]
    fn single_site_gaussian_has_the_pinned_variance() {
        // N = 1: one diagonal entry, variance 2δ/β.
        let mut rng = stream_rng(11, 0);
        let mut stats = RunningStats::new();
        for _ in 0..200_000 {
            let t = gaussian_model(1, 1.0, 4.0, &mut rng).unwrap();
            let lambda = t.eigenvalues().unwrap()[0];
            stats.push(lambda * lambda);
        }
        let est = stats.estimate(11);
        assert!(est.z_against(0.5).abs() < 4.0, "E[λ²] = 2δ/β = 1/2");
    }

    #[test]
    fn single_site_laguerre_moments_are_factorials() {
        // N = L = 1, β = 2 (θ = 1), α = 1: λ ~ Gamma(1, 1), E[λ^M] = M!.
        let mut rng = stream_rng(13, 0);
        let mut stats = [
            RunningStats::new(),
            RunningStats::new(),
            RunningStats::new(),
            RunningStats::new(),
        ];
        for _ in 0..200_000 {
            let t = laguerre_model(1, 1, 1.0, 2.0, &mut rng).unwrap();
            let lambda = t.eigenvalues().unwrap()[0];
            let mut p = 1.0;
            for stat in stats.iter_mut() {
                p *= lambda;
                stat.push(p);
            }
        }
        let mut factorial = 1.0;
        for (m, stat) in stats.iter().enumerate() {
            factorial *= (m + 1) as f64;
            let est = stat.estimate(13);
            assert!(
                est.z_against(factorial).abs() < 4.0,
                "M = {}: {} vs {}",
                m + 1,
                est.mean,
                factorial
            );
        }
    }

    #[test]
    fn gaussian_second_trace_moment_matches_the_operator_engine() {
        // E[Tr H²] = N²δ((N−1) + 2/β) exactly; at N = 2, β = 2, δ = 1 this
        // is 8, the same value the symbolic expansion gives for E[p₂].
        let mut rng = stream_rng(17, 0);
        let mut stats = RunningStats::new();
        for _ in 0..100_000 {
            let t = gaussian_model(2, 1.0, 2.0, &mut rng).unwrap();
            let p2: f64 = t.eigenvalues().unwrap().iter().map(|x| x * x).sum();
            stats.push(p2);
        }
        assert!(stats.estimate(17).z_against(8.0).abs() < 4.0);
    }

    #[test]
    fn laguerre_trace_mean_is_alpha_n_l() {
        let mut rng = stream_rng(19, 0);
        let (n, l, alpha, beta) = (3usize, 5usize, 0.5, 1.0);
        let mut stats = RunningStats::new();
        for _ in 0..50_000 {
            let t = laguerre_model(n, l, alpha, beta, &mut rng).unwrap();
            stats.push(t.eigenvalues().unwrap().iter().sum());
        }
        let truth = alpha * n as f64 * l as f64;
        assert!(stats.estimate(19).z_against(truth).abs() < 4.0);
    }

    #[test]
    fn negative_alpha_flips_the_laguerre_spectrum() {
        let mut rng = stream_rng(23, 0);
        let t = laguerre_model(4, 6, -2.0, 2.0, &mut rng).unwrap();
        let eig = t.eigenvalues().unwrap();
        assert!(eig.iter().all(|&x| x <= 0.0));
    }

    #[test]
    fn dimension_errors_are_reported() {
        let mut rng = stream_rng(1, 0);
        assert!(matches!(
            gaussian_model(0, 1.0, 2.0, &mut rng),
            Err(StochasticsError::Dimension(_))
        ));
        assert!(matches!(
            laguerre_model(5, 3, 1.0, 2.0, &mut rng),
            Err(StochasticsError::Dimension(_))
        ));
        assert!(matches!(
            SymTridiag::new(vec![1.0, 2.0], vec![0.5, 0.5]),
            Err(StochasticsError::Dimension(_))
        ));
    }
}
