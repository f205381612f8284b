//! Brownian-excursion machinery: exact Bessel(3)-bridge sampling on a
//! grid, occupation local time, the Laplace-transform estimator for the
//! edge point process, and the limiting values of the walk functionals.
//!
//! The excursion is sampled as the radial part of three independent
//! Brownian bridges generated by the sequential Gaussian conditioning
//! recursion, so every finite-dimensional marginal is exact; the only
//! approximation anywhere in this module is the grid itself.

use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

use crate::edge::EdgeParameters;
use crate::error::StochasticsError;
use crate::excursion::BridgeSampler;
use crate::ks::ks_two_sample;
use crate::mc::{stream_rng, McEstimate, RunningStats};
use crate::stepdist::StepDistribution;
use crate::walkfn::FunctionalSignature;
use crate::walks::LukasiewiczWalk;

/// E[∫₀¹𝔈] = √(π/8), the mean area under the standard Brownian excursion.
pub const EXPECTED_EXCURSION_AREA: f64 = 0.626_657_068_657_750_1;

/// Provenance of a grid path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    /// Diffusively rescaled lattice excursion h_{⌊sM⌋}/(σ√M).
    WalkRescaled,
    /// Bessel(3)-bridge sample of the Brownian excursion.
    Brownian,
}

/// Nonnegative path on the equispaced grid {k/n: k = 0..n}, pinned to zero
/// at both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcursionPath {
    values: Vec<f64>,
    kind: PathKind,
}

impl ExcursionPath {
    /// Rescale a lattice excursion onto [0,1].
    pub fn from_walk(walk: &LukasiewiczWalk, sigma: f64) -> Self {
        let scale = sigma * (walk.len() as f64).sqrt();
        let values = walk.heights().iter().map(|&h| h as f64 / scale).collect();
        ExcursionPath {
            values,
            kind: PathKind::WalkRescaled,
        }
    }

    /// Number of grid intervals.
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    /// Trapezoid approximation of ∫₀¹ path.
    pub fn area(&self) -> f64 {
        let n = self.n();
        let interior: f64 = self.values.iter().sum();
        (interior - (self.values[0] + self.values[n]) / 2.0) / n as f64
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(0.0, |a, &b| a.max(b))
    }

    /// Value at t = 1/2 (grid point n/2).
    pub fn midpoint(&self) -> f64 {
        self.values[self.n() / 2]
    }
}

/// Sample the standard Brownian excursion on an `n`-interval grid as the
/// radial part of three independent Brownian bridges, each generated by
/// the sequential conditioning b_{k+1} | b_k ~ N(b_k·(1−t_{k+1})/(1−t_k),
/// Δt·(1−t_{k+1})/(1−t_k)). Finite-dimensional marginals are exact.
pub fn sample_brownian_excursion<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ExcursionPath {
    assert!(n >= 2);
    let dt = 1.0 / n as f64;
    let mut comps = [
        vec![0.0f64; n + 1],
        vec![0.0f64; n + 1],
        vec![0.0f64; n + 1],
    ];
    for comp in &mut comps {
        for k in 0..n - 1 {
            let t_now = k as f64 * dt;
            let t_next = t_now + dt;
            let shrink = (1.0 - t_next) / (1.0 - t_now);
            let z: f64 = rng.sample(StandardNormal);
            comp[k + 1] = comp[k] * shrink + (dt * shrink).sqrt() * z;
        }
        // comp[n] stays 0: the bridge is pinned.
    }
    let values: Vec<f64> = (0..=n)
        .map(|k| {
            (comps[0][k] * comps[0][k] + comps[1][k] * comps[1][k] + comps[2][k] * comps[2][k])
                .sqrt()
        })
        .collect();
    ExcursionPath {
        values,
        kind: PathKind::Brownian,
    }
}

/// Draw 𝔈(t) directly from its exact marginal √(t(1−t))·χ₃ without
/// sampling a whole path.
pub fn sample_excursion_marginal<R: Rng + ?Sized>(t: f64, rng: &mut R) -> f64 {
    assert!(0.0 < t && t < 1.0);
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    let c: f64 = rng.sample(StandardNormal);
    (t * (1.0 - t) * (a * a + b * b + c * c)).sqrt()
}

/// Occupation-density histogram of a path: `density[j]` approximates the
/// local time at level j·bin_width.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTimeProfile {
    pub bin_width: f64,
    pub density: Vec<f64>,
}

impl LocalTimeProfile {
    /// Σ l_y·Δy — exactly 1 by construction (total time).
    pub fn total_time(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.bin_width
    }

    /// ∫ (l_y)² dy over the histogram.
    pub fn square_integral(&self) -> f64 {
        self.density.iter().map(|l| l * l).sum::<f64>() * self.bin_width
    }
}

/// Default occupation bin width: max(path)/√n.
pub fn default_bin_width(path: &ExcursionPath) -> f64 {
    path.max() / (path.n() as f64).sqrt()
}

pub fn local_time_profile(path: &ExcursionPath, bin_width: f64) -> LocalTimeProfile {
    assert!(bin_width > 0.0, "bin width must be positive");
    let n = path.n();
    let dt = 1.0 / n as f64;
    let bins = (path.max() / bin_width) as usize + 1;
    let mut density = vec![0.0; bins];
    for &v in &path.values()[..n] {
        let j = ((v / bin_width) as usize).min(bins - 1);
        density[j] += dt / bin_width;
    }
    LocalTimeProfile { bin_width, density }
}

/// ∫ (l_y)² dy of the occupation histogram; the estimate carries an
/// O(bin_width) bias, which the refinement tests keep in view.
pub fn local_time_functional(path: &ExcursionPath, bin_width: f64) -> f64 {
    local_time_profile(path, bin_width).square_integral()
}

/// Monte Carlo estimate of the first-moment Laplace transform of the edge
/// point process at inverse temperature `beta`:
/// √(2/π)·T^{−3/2}·E[exp(−(T^{3/2}/2)∫𝔈 + (T^{3/2}/(2β))∫(l_y)²)].
///
/// The prefactor √(2/π) is forced by two exact anchors: as T → 0 the
/// exponent vanishes and the value must reproduce the edge density-of-states
/// integral ∫e^{Tt/2}·(√−t/π)dt = √(2/π)·T^{−3/2}, and at β = 2 the whole
/// expression has the Airy-kernel closed form √(2/π)·T^{−3/2}·e^{T³/96}
/// (the unit tests pin both). Matching the T^{3/2} order of that closed
/// form also fixes the local-time convention: l_y is the occupation
/// density, with E[∫(l_y)²dy] = 2·E[∫𝔈].
///
/// The positive local-time term in the exponent makes the estimator
/// variance explode for large T^{3/2}/(2β); requests beyond the guard are
/// refused rather than silently returning noise.
pub fn airy_laplace_first_moment(
    t_edge: f64,
    beta: f64,
    n_paths: usize,
    n_grid: usize,
    seed: u64,
) -> Result<McEstimate, StochasticsError> {
    assert!(t_edge > 0.0 && beta > 0.0);
    let t32 = t_edge.powf(1.5);
    let lt_coefficient = t32 / (2.0 * beta);
    const GUARD: f64 = 2.0;
    if lt_coefficient > GUARD {
        return Err(StochasticsError::VarianceGuard {
            coefficient: lt_coefficient,
            limit: GUARD,
        });
    }
    let prefactor = (2.0 / PI).sqrt() / t32;
    let mut stats = RunningStats::new();
    for path in 0..n_paths {
        let mut rng = stream_rng(seed, path as u64);
        let exc = sample_brownian_excursion(n_grid, &mut rng);
        let lt = local_time_functional(&exc, default_bin_width(&exc));
        let exponent = -(t32 / 2.0) * exc.area() + lt_coefficient * lt;
        stats.push(prefactor * exponent.exp());
    }
    Ok(stats.estimate(seed))
}

/// Limiting value of a walk functional class under edge scaling: the
/// continuum expectations that the finite-size ledger sums converge to.
///
/// Partials(p) → (σP₋₁T^{3/2}/θ)^p/p!·E[(∫𝔈)^p]; Partials(0) is exactly 1;
/// SwapPair → −σP₋₁T^{3/2}·E[∫𝔈].
pub fn limiting_functional(
    sig: FunctionalSignature,
    params: &EdgeParameters,
    t_edge: f64,
    theta: f64,
    n_paths: usize,
    n_grid: usize,
    seed: u64,
) -> McEstimate {
    assert!(t_edge > 0.0 && theta > 0.0);
    let sp = params.sigma() * params.p_minus1 * t_edge.powf(1.5);
    let mut stats = RunningStats::new();
    match sig {
        FunctionalSignature::Partials(0) => {
            for _ in 0..n_paths {
                stats.push(1.0);
            }
        }
        FunctionalSignature::Partials(p) => {
            let factorial: f64 = (1..=p).map(f64::from).product();
            let coeff = (sp / theta).powi(p as i32) / factorial;
            for path in 0..n_paths {
                let mut rng = stream_rng(seed, path as u64);
                let area = sample_brownian_excursion(n_grid, &mut rng).area();
                stats.push(coeff * area.powi(p as i32));
            }
        }
        FunctionalSignature::SwapPair => {
            for path in 0..n_paths {
                let mut rng = stream_rng(seed, path as u64);
                let area = sample_brownian_excursion(n_grid, &mut rng).area();
                stats.push(-sp * area);
            }
        }
    }
    stats.estimate(seed)
}

/// Two-sample Kolmogorov–Smirnov statistic between the rescaled lattice
/// marginal 𝔈_M(t) = h_{⌊tM⌋}/(σ√M) and the exact Brownian-excursion
/// marginal at the same grid time, `n_samples` draws per side.
pub fn clt_marginal_check(
    dist: &StepDistribution,
    m: usize,
    t: f64,
    n_samples: usize,
    seed: u64,
) -> Result<f64, StochasticsError> {
    assert!(0.0 < t && t < 1.0);
    let sampler = BridgeSampler::new(dist, m)?;
    let t_index = (t * m as f64).round() as usize;
    let scale = dist.variance().sqrt() * (m as f64).sqrt();
    let mut rng_walk = stream_rng(seed, 0);
    let walk_side: Vec<f64> = (0..n_samples)
        .map(|_| sampler.sample_height_at(t_index, &mut rng_walk) as f64 / scale)
        .collect();
    let t_grid = t_index as f64 / m as f64;
    let mut rng_brown = stream_rng(seed, 1);
    let brown_side: Vec<f64> = (0..n_samples)
        .map(|_| sample_excursion_marginal(t_grid, &mut rng_brown))
        .collect();
    Ok(ks_two_sample(&walk_side, &brown_side))
}

/// Error function, Abramowitz–Stegun 7.1.26 polynomial fit.
/// Absolute error below 1.5e-7, far inside the distances compared here.
fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.327_591_1 * x);
    let poly = ((((1.061_405_429 * t - 1.453_152_027) * t + 1.421_413_741) * t
        - 0.284_496_736)
        * t
        + 0.254_829_592)
        * t;
    sign * (1.0 - poly * (-x * x).exp())
}

/// CDF of the excursion midpoint 𝔈(1/2), which is distributed as half a
/// chi(3) variable: P[𝔈(1/2) ≤ x] = erf(√2 x) − 2x√(2/π) e^{−2x²}.
pub fn excursion_midpoint_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    erf(std::f64::consts::SQRT_2 * x) - 2.0 * x * (2.0 / PI).sqrt() * (-2.0 * x * x).exp()
}

/// Exact Kolmogorov distance between the rescaled lattice midpoint law
/// (computed from the bridge table, no sampling) and the continuum midpoint
/// CDF.  Checks both sides of every atom, so the staircase discrepancy of
/// the discrete law is fully accounted for.  This is the systematic part of
/// what [`clt_marginal_check`] measures; it decays like 1/√M.
pub fn midpoint_lattice_distance(
    dist: &StepDistribution,
    m: usize,
) -> Result<f64, StochasticsError> {
    let sampler = BridgeSampler::new(dist, m)?;
    let scale = dist.variance().sqrt() * (m as f64).sqrt();
    let mut cum = 0.0;
    let mut worst: f64 = 0.0;
    for (y, p) in sampler.midpoint_marginal().into_iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let f = excursion_midpoint_cdf(y as f64 / scale);
        worst = worst.max((cum - f).abs());
        cum += p;
        worst = worst.max((cum - f).abs());
    }
    Ok(worst)
}
