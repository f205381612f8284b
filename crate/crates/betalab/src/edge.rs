//! Critical point, edge parameters, contour quadrature, and saddle-point
//! asymptotics for the moment sequence.
//!
//! The transform `V` has a unique critical point `z_c` on the positive axis
//! left of the smallest positive pole: `(z/2)V'' + V' = delta +
//! Σ w_i alpha_i²/(1 − alpha_i z)³ > 0` there, so every zero of `V'` is an
//! ascending crossing and there can be only one. `V'(0+) = −∞`, and `V'`
//! turns positive either near the pole or (with a Gaussian part) for large
//! `z`, which brackets the root for bisection.
//!
//! Raw moments overflow `f64` quickly (they grow like `mu_plus^M`), so the
//! quadrature and saddle-point routines report the scaled value
//! `m_M / mu_plus^M` together with `log10 |m_M|`, and the raw value only as
//! a convenience that may be infinite.

use num::complex::Complex64;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

use crate::ensemble::EnsembleSpec;
use crate::error::EdgeError;
use crate::exact::rational_to_f64;
use crate::voiculescu::VoiculescuTransform;

/// Everything the edge asymptotics need, evaluated at the critical point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeParameters {
    /// Critical point of `V` (unique positive root of `V'`).
    pub z_c: f64,
    /// Edge location `V(z_c)`.
    pub mu_plus: f64,
    /// Step-law variance `z_c² V''(z_c) / V(z_c)`.
    pub sigma2: f64,
    /// Limiting down-step probability `1/(z_c V(z_c))`.
    pub p_minus1: f64,
    /// Edge scale `2^{−1/3} V''(z_c)^{1/3}`.
    pub c0: f64,
    /// Curvature ratio `V''(z_c) / V(z_c)`.
    pub f2: f64,
}

impl EdgeParameters {
    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }
}

/// A moment reported in overflow-safe form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledMoment {
    /// `m_M / mu_plus^M`.
    pub scaled: f64,
    /// `log10 |m_M|` (`-inf` when the moment is 0).
    pub log10_abs: f64,
    /// `m_M` itself; may overflow to `inf` for large `M`.
    pub raw: f64,
}

impl ScaledMoment {
    fn new(scaled: f64, mu_plus: f64, m: u32) -> Self {
        ScaledMoment {
            scaled,
            log10_abs: scaled.abs().log10() + m as f64 * mu_plus.log10(),
            raw: scaled * mu_plus.powi(m as i32),
        }
    }
}

/// Result of the adaptive contour quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub moment: ScaledMoment,
    /// Nodes on the full circle at convergence.
    pub nodes: u32,
}

/// One row of the finite-size critical-point drift table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftRow {
    pub n: u32,
    pub z_c_n: f64,
    /// `|z_c(N) − z_c| · N^{2/3}`.
    pub scaled_drift: f64,
}

const BISECTION_MAX_ITER: u32 = 200;

/// Unique positive critical point of `V`, by bisection on `V'`.
pub fn critical_point(vt: &VoiculescuTransform) -> Result<f64, EdgeError> {
    let pole = vt.positive_pole().map(|p| rational_to_f64(&p));

    // Lower end: V'(z) → −∞ as z → 0+, so halve until the sign shows up.
    let mut lo = pole.map_or(1.0, |p| p / 2.0);
    let mut found_lo = false;
    for _ in 0..600 {
        if vt.eval_f64(lo, 1) < 0.0 {
            found_lo = true;
            break;
        }
        lo /= 2.0;
    }
    if !found_lo || lo == 0.0 {
        return Err(EdgeError::NoSignChange);
    }

    // Upper end: approach the pole (where V' → +∞), or double off to the
    // right when there is no positive pole (the Gaussian part takes over).
    let mut hi = None;
    match pole {
        Some(p) => {
            for k in 1..=60 {
                let cand = p * (1.0 - 0.5f64.powi(k));
                if cand > lo && vt.eval_f64(cand, 1) > 0.0 {
                    hi = Some(cand);
                    break;
                }
            }
        }
        None => {
            let mut cand = (2.0 * lo).max(1.0);
            for _ in 0..200 {
                if vt.eval_f64(cand, 1) > 0.0 {
                    hi = Some(cand);
                    break;
                }
                cand *= 2.0;
            }
        }
    }
    let mut hi = hi.ok_or(EdgeError::NoSignChange)?;

    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 4.0 * f64::EPSILON * mid {
            break;
        }
        if vt.eval_f64(mid, 1) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let z_c = 0.5 * (lo + hi);

    let residual = vt.eval_f64(z_c, 1).abs();
    let curvature = vt.eval_f64(z_c, 2).abs();
    if residual >= 1e-10 * curvature {
        return Err(EdgeError::Hypothesis(format!(
            "critical point not resolved: |V'({z_c})| = {residual:e} vs 1e-10·|V''| = {:e}",
            1e-10 * curvature
        )));
    }
    Ok(z_c)
}

/// All edge parameters, with the hypothesis checks (`mu_plus > 0`,
/// `z_c V'' > 0`, `0 < P₋₁ < 1`) enforced.
pub fn edge_parameters(vt: &VoiculescuTransform) -> Result<EdgeParameters, EdgeError> {
    let z_c = critical_point(vt)?;
    let v = vt.eval_f64(z_c, 0);
    let vpp = vt.eval_f64(z_c, 2);
    if v <= 0.0 {
        return Err(EdgeError::Hypothesis(format!(
            "edge location mu_plus = V(z_c) = {v} is not positive"
        )));
    }
    if z_c * vpp <= 0.0 {
        return Err(EdgeError::Hypothesis(format!(
            "z_c·V''(z_c) = {} is not positive",
            z_c * vpp
        )));
    }
    let p_minus1 = 1.0 / (z_c * v);
    if !(0.0..1.0).contains(&p_minus1) {
        return Err(EdgeError::Hypothesis(format!(
            "down-step probability P₋₁ = {p_minus1} outside (0, 1)"
        )));
    }
    Ok(EdgeParameters {
        z_c,
        mu_plus: v,
        sigma2: z_c * z_c * vpp / v,
        p_minus1,
        c0: 0.5f64.cbrt() * vpp.cbrt(),
        f2: vpp / v,
    })
}

/// `σ·P₋₁·(μ₊/(2C₀))^{3/2} − 1/2`: identically zero in exact arithmetic,
/// so the return is pure floating-point error.
pub fn universality_residual(params: &EdgeParameters) -> f64 {
    params.sigma() * params.p_minus1 * (params.mu_plus / (2.0 * params.c0)).powf(1.5) - 0.5
}

const QUAD_START_NODES: u32 = 1024;
const QUAD_MAX_NODES: u32 = 1 << 20;
const QUAD_REL_TOL: f64 = 1e-10;

/// `m_M` by trapezoidal quadrature of `V(z)^{M+1}` on the circle
/// `|z| = z_c`, doubling nodes until the relative change is below 1e−10.
///
/// The integrand is analytic on the contour (all poles lie strictly
/// outside), so doubling converges geometrically. Conjugate symmetry cuts
/// the work to the upper semicircle.
pub fn contour_moment(vt: &VoiculescuTransform, m: u32) -> Result<QuadratureResult, EdgeError> {
    let params = edge_parameters(vt)?;
    let z_c = params.z_c;
    let mu = params.mu_plus;

    // Absolute floor for the stopping rule: |scaled| ≤ z_c·μ/(M+1) for
    // uncentered specs, so changes far below that scale are noise.
    let floor = 1e-15 * z_c * mu / (m as f64 + 1.0);

    let half_average = |n: u32| -> f64 {
        // (1/n)·Σ_{k=0}^{n−1} g(2πk/n) with g(φ) = Re[(V/μ)^{M+1}·z],
        // folded onto [0, π] using g(2π−φ) = g(φ).
        let mut sum = 0.5 * (node_value(vt, z_c, mu, m, 0.0) + node_value(vt, z_c, mu, m, PI));
        for k in 1..n / 2 {
            sum += node_value(vt, z_c, mu, m, TAU * k as f64 / n as f64);
        }
        2.0 * sum / n as f64
    };

    let mut n = QUAD_START_NODES;
    let mut prev = half_average(n);
    loop {
        let next_n = n * 2;
        if next_n > QUAD_MAX_NODES {
            return Err(EdgeError::NoConvergence {
                max_nodes: QUAD_MAX_NODES,
                last_change: f64::NAN,
            });
        }
        let cur = half_average(next_n);
        let change = (cur - prev).abs();
        if change <= QUAD_REL_TOL * cur.abs() + floor {
            let scaled = mu / (m as f64 + 1.0) * cur;
            return Ok(QuadratureResult {
                moment: ScaledMoment::new(scaled, mu, m),
                nodes: next_n,
            });
        }
        if next_n == QUAD_MAX_NODES {
            return Err(EdgeError::NoConvergence {
                max_nodes: QUAD_MAX_NODES,
                last_change: change / cur.abs().max(floor),
            });
        }
        prev = cur;
        n = next_n;
    }
}

fn node_value(vt: &VoiculescuTransform, z_c: f64, mu: f64, m: u32, phi: f64) -> f64 {
    let z = Complex64::from_polar(z_c, phi);
    let ratio = vt.eval_complex(z) / mu;
    (ratio.powu(m + 1) * z).re
}

/// Single-saddle asymptotic `μ₊^M·(2π)^{−1/2}·V^{3/2} V''^{−1/2}·M^{−3/2}`.
///
/// Refuses pure Gaussian specs: their transform is odd-symmetric with two
/// saddles, and the single-saddle formula would be off by the parity factor.
pub fn steepest_descent_moment(
    vt: &VoiculescuTransform,
    m: u32,
) -> Result<ScaledMoment, EdgeError> {
    if vt.terms().is_empty() {
        return Err(EdgeError::PureGaussian);
    }
    let params = edge_parameters(vt)?;
    let scaled = asymptotic_constant(&params) * (m as f64).powf(-1.5);
    Ok(ScaledMoment::new(scaled, params.mu_plus, m))
}

/// The constant `C` in `m_M / μ₊^M ≈ C·M^{−3/2}`:
/// `C = μ₊ / sqrt(2π f₂) = (2π)^{−1/2} V^{3/2} V''^{−1/2}`.
pub fn asymptotic_constant(params: &EdgeParameters) -> f64 {
    params.mu_plus / (TAU * params.f2).sqrt()
}

/// Asymptotic weight of free-start walks:
/// `sqrt(L+1)·z_c²·V^{L+1}·sqrt(V''/V)/sqrt(2π)`. Raw value — overflows
/// for `L` beyond a few hundred; meant for moderate `L` consistency checks.
pub fn free_start_asymptotic(params: &EdgeParameters, l: u32) -> f64 {
    ((l + 1) as f64).sqrt() * params.z_c * params.z_c * params.mu_plus.powi(l as i32 + 1)
        * (params.f2 / TAU).sqrt()
}

/// Predicted probability that a free walk of the step law stays nonnegative
/// for `L` steps: `σ/(P₋₁·sqrt(2π(L+1)))`, the ratio of the conditioned and
/// free partition-function asymptotics.
pub fn conditional_survival_prediction(params: &EdgeParameters, l: u32) -> f64 {
    params.sigma() / (params.p_minus1 * (TAU * (l as f64 + 1.0)).sqrt())
}

/// Finite-size critical points against the limit: rows of
/// `(N, z_c(N), |z_c(N) − z_c|·N^{2/3})`.
pub fn critical_point_drift(
    spec: &EnsembleSpec,
    n_list: &[u32],
) -> Result<Vec<DriftRow>, EdgeError> {
    let limit = critical_point(&VoiculescuTransform::limiting(spec))?;
    n_list
        .iter()
        .map(|&n| {
            let z_c_n = critical_point(&VoiculescuTransform::finite_n(spec, n))?;
            Ok(DriftRow {
                n,
                z_c_n,
                scaled_drift: (z_c_n - limit).abs() * (n as f64).powf(2.0 / 3.0),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cumulants::CumulantSequence;
    use crate::ensemble::{Centering, Component};
    use crate::exact::{int, ratio};
    use crate::moments::moment_coefficient;

    fn mp(gamma: i64) -> VoiculescuTransform {
        let spec = EnsembleSpec::marchenko_pastur(int(gamma)).unwrap();
        VoiculescuTransform::limiting(&spec)
    }

    #[test]
    fn marchenko_pastur_edge_parameters() {
        let params = edge_parameters(&mp(1)).unwrap();
        assert!((params.z_c - 0.5).abs() < 1e-13);
        assert!((params.mu_plus - 4.0).abs() < 1e-11);
        assert!((params.sigma2 - 2.0).abs() < 1e-10);
        assert!((params.p_minus1 - 0.5).abs() < 1e-11);
        assert!((params.c0 - 2f64.powf(4.0 / 3.0)).abs() < 1e-10);
        assert!((params.f2 - 8.0).abs() < 1e-9);
    }

    #[test]
    fn marchenko_pastur_gamma_family_edges() {
        // z_c = 1/(√γ+1), μ₊ = (√γ+1)².
        for gamma in [1i64, 2, 4] {
            let params = edge_parameters(&mp(gamma)).unwrap();
            let root = (gamma as f64).sqrt();
            assert!(
                (params.z_c - 1.0 / (root + 1.0)).abs() < 1e-12,
                "gamma = {gamma}"
            );
            assert!(
                (params.mu_plus - (root + 1.0).powi(2)).abs() < 1e-10,
                "gamma = {gamma}"
            );
        }
    }

    #[test]
    fn semicircle_edge_parameters() {
        let vt = VoiculescuTransform::limiting(&EnsembleSpec::semicircle());
        let params = edge_parameters(&vt).unwrap();
        assert!((params.z_c - 1.0).abs() < 1e-13);
        assert!((params.mu_plus - 2.0).abs() < 1e-12);
        assert!((params.sigma2 - 1.0).abs() < 1e-11);
        assert!((params.p_minus1 - 0.5).abs() < 1e-12);
        assert!((params.c0 - 1.0).abs() < 1e-11);
    }

    #[test]
    fn universality_identity_on_assorted_specs() {
        let specs = vec![
            EnsembleSpec::semicircle(),
            EnsembleSpec::marchenko_pastur(int(1)).unwrap(),
            EnsembleSpec::marchenko_pastur(ratio(7, 3)).unwrap(),
            EnsembleSpec::new(
                ratio(1, 3),
                vec![
                    Component::new(int(1), int(2)),
                    Component::new(ratio(-1, 2), int(1)),
                ],
                Centering::Uncentered,
            )
            .unwrap(),
        ];
        for spec in specs {
            let params = edge_parameters(&VoiculescuTransform::limiting(&spec)).unwrap();
            assert!(
                universality_residual(&params).abs() < 1e-12,
                "spec {spec:?}"
            );
        }
    }

    #[test]
    fn contour_matches_exact_moments() {
        let vt = mp(1);
        let kappas = CumulantSequence::from_values(vec![int(1); 20]);
        for m in [1u32, 2, 6, 11, 20] {
            let exact = rational_to_f64(&moment_coefficient(&kappas, m).unwrap());
            let quad = contour_moment(&vt, m).unwrap();
            assert!(
                (quad.moment.raw - exact).abs() <= 1e-8 * exact,
                "m = {m}: {} vs {exact}",
                quad.moment.raw
            );
        }
        // Catalan(6) = 132 at M = 6 specifically.
        let q6 = contour_moment(&vt, 6).unwrap();
        assert!((q6.moment.raw - 132.0).abs() < 1e-6 * 132.0);
    }

    #[test]
    fn contour_on_odd_semicircle_moments_vanishes() {
        let vt = VoiculescuTransform::limiting(&EnsembleSpec::semicircle());
        let q = contour_moment(&vt, 5).unwrap();
        assert!(q.moment.raw.abs() < 1e-10);
        let q6 = contour_moment(&vt, 6).unwrap();
        assert!((q6.moment.raw - 5.0).abs() < 1e-8 * 5.0);
    }

    #[test]
    fn steepest_descent_constant_is_catalan_constant() {
        // MP γ=1 moments are Catalan numbers: C_M ~ 4^M·M^{−3/2}/√π.
        let params = edge_parameters(&mp(1)).unwrap();
        let expected = 1.0 / std::f64::consts::PI.sqrt();
        assert!((asymptotic_constant(&params) - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn contour_approaches_steepest_descent() {
        for gamma in [1i64, 2, 4] {
            let vt = mp(gamma);
            let quad = contour_moment(&vt, 2000).unwrap();
            let asym = steepest_descent_moment(&vt, 2000).unwrap();
            let ratio = quad.moment.scaled / asym.scaled;
            assert!(
                (0.995..=1.005).contains(&ratio),
                "gamma = {gamma}: ratio {ratio}"
            );
        }
    }

    #[test]
    fn steepest_descent_refuses_pure_gaussian() {
        let vt = VoiculescuTransform::limiting(&EnsembleSpec::semicircle());
        assert!(matches!(
            steepest_descent_moment(&vt, 100),
            Err(EdgeError::PureGaussian)
        ));
    }

    #[test]
    fn free_start_weight_grows_like_sqrt_l() {
        let params = edge_parameters(&mp(1)).unwrap();
        let f =
            |l: u32| free_start_asymptotic(&params, l) / params.mu_plus.powi(l as i32 + 1);
        assert!((f(399) / f(99) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn drift_vanishes_on_exact_dimension_schedules() {
        // γ = 1: L = N exactly, so the finite-size transform is the limit.
        let spec = EnsembleSpec::marchenko_pastur(int(1)).unwrap();
        for row in critical_point_drift(&spec, &[10, 100, 1000]).unwrap() {
            assert!(row.scaled_drift < 1e-9, "N = {}", row.n);
        }
        // γ = 3/2 at even N likewise.
        let spec = EnsembleSpec::marchenko_pastur(ratio(3, 2)).unwrap();
        for row in critical_point_drift(&spec, &[10, 100]).unwrap() {
            assert!(row.scaled_drift < 1e-9, "N = {}", row.n);
        }
    }

    #[test]
    fn drift_decreases_on_ceiling_schedules() {
        let spec = EnsembleSpec::marchenko_pastur(ratio(4, 3)).unwrap();
        let rows = critical_point_drift(&spec, &[100, 1000, 10000]).unwrap();
        assert!(rows[0].scaled_drift > rows[1].scaled_drift);
        assert!(rows[1].scaled_drift > rows[2].scaled_drift);
    }

    #[test]
    fn centered_spec_shifts_the_edge_by_the_mean() {
        let spec = EnsembleSpec::new(
            int(0),
            vec![Component::new(int(1), int(1))],
            Centering::Centered,
        )
        .unwrap();
        let params = edge_parameters(&VoiculescuTransform::limiting(&spec)).unwrap();
        assert!((params.z_c - 0.5).abs() < 1e-12);
        assert!((params.mu_plus - 3.0).abs() < 1e-11);
    }
}
