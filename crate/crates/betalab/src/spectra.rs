//! Spectrum sampling and empirical edge statistics: routing specs to the
//! cheapest exact matrix realization, rescaling top eigenvalues into edge
//! coordinates, and the two cross-ensemble experiments (edge universality
//! and largest-eigenvalue tails).

use serde::Serialize;

use crate::addition::{sample_classical_addition, ClassicalBeta};
use crate::edge::{edge_parameters, EdgeParameters};
use crate::ensemble::{Centering, EnsembleSpec};
use crate::error::StochasticsError;
use crate::exact::rational_to_f64;
use crate::ks::{ks_critical_1pct, ks_two_sample};
use crate::mc::stream_rng;
use crate::tridiag::{gaussian_model, laguerre_model};
use crate::voiculescu::VoiculescuTransform;
use num::Zero;
use rand::Rng;

/// Tabulated mean of the β = 2 Tracy–Widom law; soft reference for the
/// rescaled largest eigenvalue.
pub const TRACY_WIDOM_BETA2_MEAN: f64 = -1.771_086_807_4;

/// One spectrum draw with its provenance.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSample {
    /// Eigenvalues sorted descending.
    pub eigenvalues: Vec<f64>,
    pub spec: EnsembleSpec,
    pub n: u32,
    pub beta: f64,
    pub seed: u64,
}

impl SpectrumSample {
    pub fn draw(
        spec: &EnsembleSpec,
        n: usize,
        beta: f64,
        seed: u64,
    ) -> Result<Self, StochasticsError> {
        let mut rng = stream_rng(seed, 0);
        let eigenvalues = sample_spectrum(spec, n, beta, &mut rng)?;
        Ok(SpectrumSample {
            eigenvalues,
            spec: spec.clone(),
            n: n as u32,
            beta,
            seed,
        })
    }
}

/// Finite-size edge parameters for the spec realized at matrix size `n`.
pub fn finite_n_edge(spec: &EnsembleSpec, n: u32) -> Result<EdgeParameters, StochasticsError> {
    Ok(edge_parameters(&VoiculescuTransform::finite_n(spec, n))?)
}

/// One spectrum draw, sorted descending. Pure-Gaussian and single-Laguerre
/// specs use the O(N²) tridiagonal models at any β > 0; genuine mixtures
/// fall back to the dense classical sampler, which exists only at β ∈ {1, 2}.
pub fn sample_spectrum<R: Rng + ?Sized>(
    spec: &EnsembleSpec,
    n: usize,
    beta: f64,
    rng: &mut R,
) -> Result<Vec<f64>, StochasticsError> {
    if spec.is_gaussian_only() {
        let delta = rational_to_f64(spec.delta());
        return gaussian_model(n, delta, beta, rng)?.eigenvalues();
    }
    if spec.delta().is_zero() && spec.components().len() == 1 {
        let component = &spec.components()[0];
        let l = rational_to_f64(&spec.component_dims(n as u32)[0]).round() as usize;
        let alpha = rational_to_f64(&component.alpha);
        let mut eig = laguerre_model(n, l, alpha, beta, rng)?.eigenvalues()?;
        if spec.centering() == Centering::Centered {
            let shift = alpha * l as f64;
            for lambda in &mut eig {
                *lambda -= shift;
            }
        }
        return Ok(eig);
    }
    let class = ClassicalBeta::from_beta(beta).ok_or_else(|| {
        StochasticsError::UnsupportedEnsemble(format!(
            "mixture specs have a matrix realization only at beta 1 or 2, got {beta}"
        ))
    })?;
    sample_classical_addition(spec, n, class, rng)
}

/// Σᵢ (λᵢ/(μ₊N))^{⌊T·N^{2/3}⌋}. For spectra whose bottom edge stays well
/// inside μ₊N in magnitude (Laguerre-like), this approximates the Laplace
/// statistic below; a two-sided spectrum adds a bottom-edge image term.
pub fn empirical_power_sum(eigenvalues: &[f64], t: f64, params: &EdgeParameters) -> f64 {
    let n = eigenvalues.len() as f64;
    let m = (t * n.powf(2.0 / 3.0)).floor() as i32;
    let scale = params.mu_plus * n;
    eigenvalues.iter().map(|&x| (x / scale).powi(m)).sum()
}

/// Σᵢ exp(T·λ′ᵢ/μ₊) with λ′ᵢ = (λᵢ − μ₊N)/N^{1/3}: the edge Laplace
/// statistic, dominated by the top eigenvalues.
pub fn empirical_laplace(eigenvalues: &[f64], t: f64, params: &EdgeParameters) -> f64 {
    let n = eigenvalues.len() as f64;
    let edge = params.mu_plus * n;
    let scale = n.powf(1.0 / 3.0) * params.mu_plus;
    eigenvalues
        .iter()
        .map(|&x| ((t * (x - edge)) / scale).exp())
        .sum()
}

/// Largest eigenvalue in edge coordinates: (λ₁ − μ₊N)/(C₀·N^{1/3}).
pub fn top_rescaled(eigenvalues: &[f64], params: &EdgeParameters) -> f64 {
    let n = eigenvalues.len() as f64;
    (eigenvalues[0] - params.mu_plus * n) / (params.c0 * n.powf(1.0 / 3.0))
}

/// Rescaled-top samples for one (spec, β) cell.
#[derive(Debug, Clone, Serialize)]
pub struct UniversalityCell {
    pub spec_index: usize,
    pub beta: f64,
    pub rescaled_top: Vec<f64>,
}

/// Two-sample comparison of rescaled-top laws across specs at fixed β.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct UniversalityPair {
    pub spec_a: usize,
    pub spec_b: usize,
    pub beta: f64,
    pub ks: f64,
    pub critical_1pct: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct UniversalityReport {
    pub n: u32,
    pub reps: u32,
    pub seed: u64,
    pub cells: Vec<UniversalityCell>,
    pub pairs: Vec<UniversalityPair>,
}

impl UniversalityReport {
    /// True when every cross-spec pair sits below its 1% KS threshold.
    pub fn indistinguishable(&self) -> bool {
        self.pairs.iter().all(|p| p.ks < p.critical_1pct)
    }
}

/// Sample `reps` spectra per (spec, β) cell, rescale the top eigenvalue of
/// each by that spec's own finite-N edge parameters, and report pairwise
/// two-sample KS statistics across specs at fixed β. Universality predicts
/// every pair is statistically indistinguishable.
pub fn edge_universality_experiment(
    specs: &[EnsembleSpec],
    betas: &[f64],
    n: usize,
    reps: u32,
    seed: u64,
) -> Result<UniversalityReport, StochasticsError> {
    let mut cells = Vec::new();
    for (spec_index, spec) in specs.iter().enumerate() {
        let params = finite_n_edge(spec, n as u32)?;
        for &beta in betas {
            let cell_id = (cells.len() as u64) << 32;
            let rescaled_top = (0..reps)
                .map(|rep| {
                    let mut rng = stream_rng(seed, cell_id | rep as u64);
                    let eig = sample_spectrum(spec, n, beta, &mut rng)?;
                    Ok(top_rescaled(&eig, &params))
                })
                .collect::<Result<Vec<f64>, StochasticsError>>()?;
            cells.push(UniversalityCell {
                spec_index,
                beta,
                rescaled_top,
            });
        }
    }
    let mut pairs = Vec::new();
    for (i, a) in cells.iter().enumerate() {
        for b in cells.iter().skip(i + 1) {
            if a.beta != b.beta {
                continue;
            }
            let ks = ks_two_sample(&a.rescaled_top, &b.rescaled_top);
            pairs.push(UniversalityPair {
                spec_a: a.spec_index,
                spec_b: b.spec_index,
                beta: a.beta,
                ks,
                critical_1pct: ks_critical_1pct(
                    a.rescaled_top.len(),
                    b.rescaled_top.len(),
                ),
            });
        }
    }
    Ok(UniversalityReport {
        n: n as u32,
        reps,
        seed,
        cells,
        pairs,
    })
}

/// One point of the largest-eigenvalue tail curve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailPoint {
    /// Relative overshoot: the event is λ₁ > (1 + x)·μ₊N.
    pub x: f64,
    pub exceedances: u64,
    pub reps: u64,
}

impl TailPoint {
    pub fn probability(&self) -> f64 {
        self.exceedances as f64 / self.reps as f64
    }
}

/// Empirical P[λ₁ > (1+x)·μ₊(N)·N] over `reps` independent spectra, for
/// each x in `xs`. All points share the same spectra, so the curve is
/// monotone by construction.
pub fn largest_eigenvalue_tail(
    spec: &EnsembleSpec,
    beta: f64,
    n: usize,
    reps: u64,
    xs: &[f64],
    seed: u64,
) -> Result<Vec<TailPoint>, StochasticsError> {
    let params = finite_n_edge(spec, n as u32)?;
    let edge = params.mu_plus * n as f64;
    let mut counts = vec![0u64; xs.len()];
    for rep in 0..reps {
        let mut rng = stream_rng(seed, rep);
        let eig = sample_spectrum(spec, n, beta, &mut rng)?;
        let top = eig[0];
        for (count, &x) in counts.iter_mut().zip(xs) {
            if top > (1.0 + x) * edge {
                *count += 1;
            }
        }
    }
    Ok(xs
        .iter()
        .zip(counts)
        .map(|(&x, exceedances)| TailPoint {
            x,
            exceedances,
            reps,
        })
        .collect())
}
