//! Weighted ballot walks and bridge partition functions.
//!
//! Walks take integer steps ≥ −1 with a multiplicative weight per step. For
//! walks from height y0 down to 0 in L steps, the "good" walks (strictly
//! above the axis before the final arrival) carry exactly the fraction y0/L
//! of the total weight — the rotation/cycle argument. Bridges conditioned to
//! stay nonnegative admit an exact coefficient formula, which `bridge_series`
//! evaluates and `bridge_partition_enum` checks by dynamic programming.

use num::rational::BigRational;
use num::{One, Zero};
use std::collections::HashMap;

use crate::cumulants::CumulantSequence;
use crate::error::CombinatoricsError;
use crate::series::RatPoly;

/// Rational step weights for steps −1, 0, 1, …, in order; `weight(k)` is the
/// weight of step k.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedStepSystem {
    weights: Vec<BigRational>,
}

impl WeightedStepSystem {
    /// Weights for steps −1, 0, 1, … (index 0 is the −1 step). Trailing zero
    /// weights are allowed.
    pub fn new(weights_from_minus_one: Vec<BigRational>) -> Self {
        WeightedStepSystem {
            weights: weights_from_minus_one,
        }
    }

    /// Steps −1 (weight 1) and +l (weight kappa_{l+1}), the excursion-weight
    /// convention.
    pub fn from_cumulants(kappas: &CumulantSequence) -> Self {
        let mut weights = vec![BigRational::one()];
        weights.extend(kappas.values().iter().cloned());
        WeightedStepSystem { weights }
    }

    pub fn max_step(&self) -> i64 {
        self.weights.len() as i64 - 2
    }

    pub fn weight(&self, step: i64) -> BigRational {
        if step < -1 {
            return BigRational::zero();
        }
        self.weights
            .get((step + 1) as usize)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    fn steps_with_weights(&self) -> impl Iterator<Item = (i64, &BigRational)> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.is_zero())
            .map(|(i, w)| (i as i64 - 1, w))
    }
}

/// Total and "good" weighted counts of walks from height y0 to 0 in `len`
/// steps.
#[derive(Debug, Clone, PartialEq)]
pub struct BallotCounts {
    /// All walks (no sign constraint along the way).
    pub all: BigRational,
    /// Walks with height ≥ 1 at every time before the final step.
    pub good: BigRational,
}

/// Weighted counts of walks (0, y0) → (len, 0). `y0 ≥ 1`, `len ≥ y0`
/// (steps are ≥ −1, so descending y0 needs at least y0 steps).
pub fn bridge_counts(
    sys: &WeightedStepSystem,
    y0: u32,
    len: u32,
) -> Result<BallotCounts, CombinatoricsError> {
    if len == 0 {
        return Err(CombinatoricsError::ZeroLength);
    }
    if y0 > len {
        return Err(CombinatoricsError::UnreachableEndpoint { y0, len });
    }
    Ok(BallotCounts {
        all: dp_walk_weight(sys, y0 as i64, len, None),
        good: dp_walk_weight(sys, y0 as i64, len, Some(1)),
    })
}

/// The residual good − (y0/len) · all of the rotation identity; zero when the
/// identity holds.
pub fn ballot_identity_residual(counts: &BallotCounts, y0: u32, len: u32) -> BigRational {
    &counts.good - BigRational::new(y0.into(), len.into()) * &counts.all
}

/// Weighted count of bridges (0, h) → (m, 0) staying ≥ 0 the whole way,
/// with down steps of weight 1 and up steps of size l weighted kappa_{l+1}.
pub fn bridge_partition_enum(
    kappas: &CumulantSequence,
    h: u32,
    m: u32,
) -> Result<BigRational, CombinatoricsError> {
    if m == 0 {
        return Ok(if h == 0 {
            BigRational::one()
        } else {
            BigRational::zero()
        });
    }
    if h > m {
        return Err(CombinatoricsError::UnreachableEndpoint { y0: h, len: m });
    }
    let sys = WeightedStepSystem::from_cumulants(kappas);
    Ok(dp_walk_weight(&sys, h as i64, m, Some(0)))
}

/// The coefficient formula for the same bridge weight:
/// ((h+1)/(m+1)) · [z^{m−h}] (1 + Σ_l kappa_l z^l)^{m+1}.
pub fn bridge_series(
    kappas: &CumulantSequence,
    h: u32,
    m: u32,
) -> Result<BigRational, CombinatoricsError> {
    if m == 0 {
        return Ok(if h == 0 {
            BigRational::one()
        } else {
            BigRational::zero()
        });
    }
    if h > m {
        return Err(CombinatoricsError::UnreachableEndpoint { y0: h, len: m });
    }
    let deg = (m - h) as usize;
    let mut coeffs = Vec::with_capacity(m as usize + 1);
    coeffs.push(BigRational::one());
    for l in 1..=m {
        if l > kappas.max_order() {
            return Err(CombinatoricsError::MissingCumulants {
                needed: l,
                available: kappas.max_order(),
            });
        }
        coeffs.push(kappas.kappa(l).clone());
    }
    let poly = RatPoly::from_coeffs(coeffs);
    let coeff = poly.pow_trunc(m + 1, deg).coeff(deg);
    Ok(coeff * BigRational::new((h + 1).into(), (m + 1).into()))
}

/// Weighted sum over walks from `start` to 0 in `len` steps; `floor` (height
/// lower bound at all times before the final step) applies when given, and
/// the final height 0 is always accepted.
fn dp_walk_weight(
    sys: &WeightedStepSystem,
    start: i64,
    len: u32,
    floor: Option<i64>,
) -> BigRational {
    let mut layer: HashMap<i64, BigRational> = HashMap::new();
    layer.insert(start, BigRational::one());
    for t in 0..len {
        let last = t + 1 == len;
        let mut next: HashMap<i64, BigRational> = HashMap::new();
        let remaining = (len - t - 1) as i64;
        for (h, w) in &layer {
            for (step, sw) in sys.steps_with_weights() {
                let nh = h + step;
                // Steps are ≥ −1, so a height above `remaining` can't get
                // back to 0; one below −remaining·max_step can't either.
                if nh > remaining || nh < -(remaining * sys.max_step().max(1)) {
                    continue;
                }
                if last {
                    if nh != 0 {
                        continue;
                    }
                } else if let Some(fl) = floor {
                    if nh < fl {
                        continue;
                    }
                }
                *next.entry(nh).or_insert_with(BigRational::zero) += w * sw;
            }
        }
        layer = next;
    }
    layer.remove(&0).unwrap_or_else(BigRational::zero)
}

/// Exhaustively verify the rotation argument: every raw step sequence of
/// length `len` over the support of `sys` summing to −y0 has exactly y0
/// rotations that are good walks started at y0. Feasible for `len ≤ 8`.
pub fn verify_cycle_lemma(
    sys: &WeightedStepSystem,
    y0: u32,
    len: u32,
) -> Result<bool, CombinatoricsError> {
    if len == 0 {
        return Err(CombinatoricsError::ZeroLength);
    }
    if len > 8 {
        return Err(CombinatoricsError::EnumerationTooLarge { m: len, cap: 8 });
    }
    let support: Vec<i64> = sys.steps_with_weights().map(|(s, _)| s).collect();
    let mut seq: Vec<i64> = Vec::with_capacity(len as usize);
    fn rec(
        support: &[i64],
        seq: &mut Vec<i64>,
        len: u32,
        target: i64,
        ok: &mut bool,
        y0: i64,
    ) {
        if !*ok {
            return;
        }
        if seq.len() == len as usize {
            let total: i64 = seq.iter().sum();
            if total != target {
                return;
            }
            let mut good_rotations = 0;
            for r in 0..seq.len() {
                let mut h = y0;
                let mut good = true;
                for k in 0..seq.len() {
                    h += seq[(r + k) % seq.len()];
                    if k + 1 < seq.len() && h < 1 {
                        good = false;
                        break;
                    }
                }
                if good && h == 0 {
                    good_rotations += 1;
                }
            }
            if good_rotations != y0 {
                *ok = false;
            }
            return;
        }
        for &s in support {
            seq.push(s);
            rec(support, seq, len, target, ok, y0);
            seq.pop();
        }
    }
    let mut ok = true;
    rec(
        &support,
        &mut seq,
        len,
        -(y0 as i64),
        &mut ok,
        y0 as i64,
    );
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};
    use crate::moments::moment_nc;

    fn small_system() -> WeightedStepSystem {
        WeightedStepSystem::new(vec![ratio(1, 2), int(3), ratio(2, 7), ratio(5, 3)])
    }

    #[test]
    fn ballot_identity_holds_for_rational_weights() {
        let sys = small_system();
        for y0 in 1..=4u32 {
            for len in y0..=8u32 {
                let counts = bridge_counts(&sys, y0, len).unwrap();
                assert_eq!(
                    ballot_identity_residual(&counts, y0, len),
                    int(0),
                    "y0 = {y0}, len = {len}"
                );
            }
        }
    }

    #[test]
    fn cycle_lemma_exhaustive_small() {
        let sys = small_system();
        for y0 in 1..=3u32 {
            for len in y0.max(2)..=6u32 {
                assert!(verify_cycle_lemma(&sys, y0, len).unwrap());
            }
        }
    }

    #[test]
    fn bridge_enum_equals_series() {
        let kappas = CumulantSequence::from_values(vec![
            ratio(2, 3),
            int(1),
            ratio(5, 2),
            ratio(1, 4),
            int(2),
            int(1),
            int(1),
            int(1),
            int(1),
            int(1),
        ]);
        for h in 0..=3u32 {
            for m in h.max(1)..=10u32 {
                assert_eq!(
                    bridge_partition_enum(&kappas, h, m).unwrap(),
                    bridge_series(&kappas, h, m).unwrap(),
                    "h = {h}, m = {m}"
                );
            }
        }
    }

    #[test]
    fn bridge_with_unit_cumulants_counts_lattice_paths() {
        // Walks (0,1) → (3,0) staying ≥ 0 with unit weights: 5 of them.
        let kappas = CumulantSequence::from_values(vec![int(1); 10]);
        assert_eq!(bridge_partition_enum(&kappas, 1, 3).unwrap(), int(5));
        assert_eq!(bridge_series(&kappas, 1, 3).unwrap(), int(5));
    }

    #[test]
    fn zero_height_bridge_recovers_moments() {
        let kappas = CumulantSequence::from_values(vec![
            ratio(1, 3),
            ratio(4, 5),
            int(2),
            ratio(7, 2),
            int(1),
            int(1),
            int(1),
            int(1),
        ]);
        for m in 1..=8u32 {
            assert_eq!(
                bridge_partition_enum(&kappas, 0, m).unwrap(),
                moment_nc(&kappas, m).unwrap(),
                "m = {m}"
            );
        }
    }

    #[test]
    fn unreachable_endpoints_error() {
        let sys = small_system();
        assert!(bridge_counts(&sys, 5, 4).is_err());
        assert!(bridge_counts(&sys, 1, 0).is_err());
    }
}
