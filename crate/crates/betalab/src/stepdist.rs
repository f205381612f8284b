//! The step law of the conditioned walk.
//!
//! At an evaluation point `z` the walk steps take values `−1, 0, 1, …` with
//!
//! ```text
//! P[X = −1] = 1/(z·V(z)),    P[X = l] = κ_{l+1}·z^l / V(z)   (l ≥ 0),
//! ```
//!
//! which sums to 1 because `V(z) = 1/z + Σ_l κ_l z^{l−1}`. At the critical
//! point the law has mean exactly 0 and variance `σ² = z_c²V''(z_c)/V(z_c)`.
//! The support is truncated where the geometric tail bound drops below
//! 1e−15, and draws use an alias table.

use rand::Rng;
use rand_distr::weighted_alias::WeightedAliasIndex;
use rand_distr::Distribution;

use crate::cumulants::CumulantSequence;
use crate::edge::{edge_parameters, EdgeParameters};
use crate::ensemble::EnsembleSpec;
use crate::error::StochasticsError;
use crate::exact::rational_to_f64;
use crate::voiculescu::VoiculescuTransform;

const TAIL_TOL: f64 = 1e-15;
const SUPPORT_CAP: usize = 100_000;

/// Finite step law `{−1, 0, …, l_max}` with an alias table for O(1) draws.
#[derive(Debug, Clone)]
pub struct StepDistribution {
    z: f64,
    v_norm: f64,
    /// `probs[k]` is the probability of step `k − 1`.
    probs: Vec<f64>,
    mean: f64,
    variance: f64,
    alias: WeightedAliasIndex<f64>,
}

impl StepDistribution {
    /// Step law of `spec` at its limiting critical point; also returns the
    /// edge parameters since they come out of the same computation.
    pub fn at_critical_point(
        spec: &EnsembleSpec,
    ) -> Result<(Self, EdgeParameters), StochasticsError> {
        let vt = VoiculescuTransform::limiting(spec);
        let params = edge_parameters(&vt)?;
        let dist = Self::build(spec, None, &vt, params.z_c)?;
        Ok((dist, params))
    }

    /// Step law at an arbitrary point `z` of the limiting transform.
    pub fn at_point(spec: &EnsembleSpec, z: f64) -> Result<Self, StochasticsError> {
        let vt = VoiculescuTransform::limiting(spec);
        Self::build(spec, None, &vt, z)
    }

    /// Finite-size step law (weights `⌈γᵢN⌉/N`) at its own critical point.
    pub fn finite_n(spec: &EnsembleSpec, n: u32) -> Result<Self, StochasticsError> {
        let vt = VoiculescuTransform::finite_n(spec, n);
        let params = edge_parameters(&vt)?;
        Self::build(spec, Some(n), &vt, params.z_c)
    }

    fn build(
        spec: &EnsembleSpec,
        n: Option<u32>,
        vt: &VoiculescuTransform,
        z: f64,
    ) -> Result<Self, StochasticsError> {
        let v_norm = vt.eval_f64(z, 0);
        if z.is_nan() || z <= 0.0 || !v_norm.is_finite() || v_norm <= 0.0 {
            return Err(StochasticsError::UnsupportedEnsemble(format!(
                "step law needs z > 0 with V(z) finite and positive; got z = {z}, V = {v_norm}"
            )));
        }

        // Support size: κ_{l+1}z^l ≤ (Σ wᵢ|αᵢ|)·r^l with r = max|αᵢ|·z, so
        // the tail past l is below a·r^{l+1}/(1−r). A Gaussian-only spec
        // stops at l = 1 exactly.
        let l_max = if vt.terms().is_empty() {
            1
        } else {
            let a: f64 = vt
                .terms()
                .iter()
                .map(|(alpha, w)| rational_to_f64(w) * rational_to_f64(alpha).abs())
                .sum();
            let r = vt
                .terms()
                .iter()
                .map(|(alpha, _)| rational_to_f64(alpha).abs() * z)
                .fold(0.0f64, f64::max);
            if r >= 1.0 {
                return Err(StochasticsError::TailTruncation {
                    tol: TAIL_TOL,
                    cap: SUPPORT_CAP,
                });
            }
            let mut l = 1usize;
            let mut bound = a * r * r / (1.0 - r);
            while bound >= TAIL_TOL * v_norm {
                l += 1;
                bound *= r;
                if l > SUPPORT_CAP {
                    return Err(StochasticsError::TailTruncation {
                        tol: TAIL_TOL,
                        cap: SUPPORT_CAP,
                    });
                }
            }
            l
        };

        let kappas = match n {
            Some(n) => CumulantSequence::finite_n(spec, n, l_max as u32 + 1)?,
            None => CumulantSequence::limiting(spec, l_max as u32 + 1)?,
        };

        let mut probs = Vec::with_capacity(l_max + 2);
        probs.push(1.0 / (z * v_norm));
        let mut z_pow = 1.0;
        for l in 0..=l_max {
            let p = rational_to_f64(kappas.kappa(l as u32 + 1)) * z_pow / v_norm;
            if p < 0.0 {
                return Err(StochasticsError::NegativeProbability {
                    step: l as i64,
                    value: p,
                });
            }
            probs.push(p);
            z_pow *= z;
        }

        let mean: f64 = probs
            .iter()
            .enumerate()
            .map(|(k, p)| (k as f64 - 1.0) * p)
            .sum();
        let variance: f64 = probs
            .iter()
            .enumerate()
            .map(|(k, p)| (k as f64 - 1.0 - mean).powi(2) * p)
            .sum();

        let alias = WeightedAliasIndex::new(probs.clone()).map_err(|e| {
            StochasticsError::UnsupportedEnsemble(format!("alias table rejected step law: {e}"))
        })?;

        Ok(StepDistribution {
            z,
            v_norm,
            probs,
            mean,
            variance,
            alias,
        })
    }

    /// One step draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        self.alias.sample(rng) as i64 - 1
    }

    /// Probability of step `s` (0 outside the truncated support).
    pub fn probability(&self, s: i64) -> f64 {
        if s < -1 {
            return 0.0;
        }
        self.probs.get((s + 1) as usize).copied().unwrap_or(0.0)
    }

    /// `(step, probability)` pairs over the truncated support.
    pub fn support(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(k, p)| (k as i64 - 1, *p))
    }

    pub fn max_step(&self) -> i64 {
        self.probs.len() as i64 - 2
    }

    pub fn p_down(&self) -> f64 {
        self.probs[0]
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn normalizer(&self) -> f64 {
        self.v_norm
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{Centering, Component};
    use crate::exact::{int, ratio};
    use crate::mc::{stream_rng, RunningStats};

    #[test]
    fn semicircle_step_law_is_fair_updown() {
        let (dist, params) = StepDistribution::at_critical_point(&EnsembleSpec::semicircle())
            .unwrap();
        assert!((dist.probability(-1) - 0.5).abs() < 1e-12);
        assert!(dist.probability(0).abs() < 1e-15);
        assert!((dist.probability(1) - 0.5).abs() < 1e-12);
        assert_eq!(dist.max_step(), 1);
        assert!(dist.mean().abs() < 1e-12);
        assert!((dist.variance() - params.sigma2).abs() < 1e-9);
    }

    #[test]
    fn marchenko_pastur_step_law_is_geometric() {
        // z_c = 1/2, V = 4: P(−1) = 1/2, P(l) = (1/2)^l/4.
        let spec = EnsembleSpec::marchenko_pastur(int(1)).unwrap();
        let (dist, params) = StepDistribution::at_critical_point(&spec).unwrap();
        assert!((dist.probability(-1) - 0.5).abs() < 1e-12);
        for l in 0..20 {
            assert!(
                (dist.probability(l) - 0.5f64.powi(l as i32) / 4.0).abs() < 1e-13,
                "l = {l}"
            );
        }
        assert!(dist.mean().abs() < 1e-12);
        assert!((dist.variance() - params.sigma2).abs() < 1e-9);
        assert!((dist.total_mass() - 1.0).abs() < 1e-12);
        // Tail truncation leaves at least 45 support points before 1e−15.
        assert!(dist.max_step() > 40);
    }

    #[test]
    fn empirical_moments_match_at_scale() {
        let spec = EnsembleSpec::marchenko_pastur(int(1)).unwrap();
        let (dist, _) = StepDistribution::at_critical_point(&spec).unwrap();
        let mut rng = stream_rng(11, 0);
        let mut stats = RunningStats::new();
        for _ in 0..200_000 {
            stats.push(dist.sample(&mut rng) as f64);
        }
        let se_mean = (dist.variance() / stats.n() as f64).sqrt();
        assert!(
            (stats.mean() - dist.mean()).abs() < 4.0 * se_mean,
            "mean {} vs {}",
            stats.mean(),
            dist.mean()
        );
        assert!((stats.variance() - dist.variance()).abs() / dist.variance() < 0.05);
    }

    #[test]
    fn off_critical_point_has_nonzero_mean() {
        let spec = EnsembleSpec::marchenko_pastur(int(1)).unwrap();
        let vt = VoiculescuTransform::limiting(&spec);
        let z = 0.3;
        let dist = StepDistribution::at_point(&spec, z).unwrap();
        let expected = z * vt.eval_f64(z, 1) / vt.eval_f64(z, 0);
        assert!((dist.mean() - expected).abs() < 1e-12);
        assert!(dist.mean() < 0.0);
    }

    #[test]
    fn finite_n_law_uses_ceiling_weights() {
        let spec = EnsembleSpec::marchenko_pastur(ratio(3, 2)).unwrap();
        let dist5 = StepDistribution::finite_n(&spec, 5).unwrap();
        // γ(5) = 8/5 > 3/2 pushes mass upward relative to the limit.
        let (limit, _) = StepDistribution::at_critical_point(&spec).unwrap();
        assert!(dist5.mean().abs() < 1e-12);
        assert!(dist5.z() < limit.z());
    }

    #[test]
    fn negative_cumulants_are_rejected() {
        // Single α = −1 component: κ₃ = −1 < 0.
        let spec = EnsembleSpec::new(
            int(0),
            vec![Component::new(int(-1), int(1))],
            Centering::Uncentered,
        )
        .unwrap();
        let err = StepDistribution::at_point(&spec, 0.4);
        assert!(err.is_err());
    }
}
