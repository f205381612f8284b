//! Randomized property tests for the identities the library is built on.
//! Each property is a statement that holds exactly (or to float precision)
//! on a whole domain, checked on proptest-generated inputs: formal cumulant
//! sequences with arbitrary signs, random positive step weights, and random
//! ensemble specs inside the validated domain.

use approx::assert_abs_diff_eq;
use num::rational::BigRational;
use num::{BigInt, Zero};
use proptest::collection::vec;
use proptest::prelude::*;

use betalab::ballot::{
    ballot_identity_residual, bridge_counts, bridge_partition_enum, bridge_series,
    WeightedStepSystem,
};
use betalab::dunkl::dunkl_moment_from_cumulants;
use betalab::edge::{edge_parameters, universality_residual};
use betalab::exact::{int, ratio};
use betalab::moments::{moment_coefficient, moment_nc};
use betalab::walks::{moment_walk_sum, partition_from_walk, walk_from_partition};
use betalab::{
    classify_against_walks, dunkl_joint_moment, Centering, Component, CumulantSequence,
    EnsembleSpec, LowerConvention, LukasiewiczWalk, StepDistribution, VoiculescuTransform,
};

/// Rational in [-max_num, max_num] x {1..max_den} — signed, for the formal
/// identities that hold with arbitrary cumulants.
fn signed_rational(max_num: i64, max_den: i64) -> impl Strategy<Value = BigRational> {
    (-max_num..=max_num, 1..=max_den).prop_map(|(n, d)| ratio(n, d))
}

/// Strictly positive rational, for step weights.
fn positive_rational(max_num: i64, max_den: i64) -> impl Strategy<Value = BigRational> {
    (1..=max_num, 1..=max_den).prop_map(|(n, d)| ratio(n, d))
}

/// A spec drawn from the library's domain: nonnegative delta, decreasing
/// positive scales with an optional smaller signed component, cumulants
/// nonnegative and the top edge well defined (both enforced by filtering).
fn domain_spec() -> impl Strategy<Value = EnsembleSpec> {
    (
        0..=4i64,
        prop::option::of((2..=9i64, 1..=3i64, 0..=6i64, any::<bool>())),
        any::<bool>(),
    )
        .prop_filter_map(
            "spec must lie in the validated domain",
            |(delta2, comp, centered)| {
                let delta = ratio(delta2, 2);
                let mut components = Vec::new();
                if let Some((alpha_num, alpha_den, gamma4, negate_tail)) = comp {
                    let alpha = ratio(alpha_num, alpha_den);
                    components.push(Component::new(alpha.clone(), int(1) + ratio(gamma4, 4)));
                    // A strictly smaller second scale, signed.
                    let tail = &alpha / int(3);
                    let tail = if negate_tail { -tail } else { tail };
                    components.push(Component::new(tail, int(1)));
                }
                let centering = if centered {
                    Centering::Centered
                } else {
                    Centering::Uncentered
                };
                let spec = EnsembleSpec::new(delta, components, centering).ok()?;
                CumulantSequence::limiting(&spec, 12).ok()?;
                edge_parameters(&VoiculescuTransform::limiting(&spec)).ok()?;
                Some(spec)
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The three exact moment routes — non-crossing partition sum,
    /// coefficient extraction, weighted excursion count — are one identity;
    /// it holds for arbitrary signed cumulants, not just measure-backed ones.
    #[test]
    fn moment_routes_agree_on_formal_cumulants(
        values in vec(signed_rational(9, 4), 7),
        m in 1u32..=7,
    ) {
        let kappas = CumulantSequence::from_values(values);
        let nc = moment_nc(&kappas, m).unwrap();
        let coeff = moment_coefficient(&kappas, m).unwrap();
        let walk = moment_walk_sum(&kappas, m).unwrap();
        prop_assert_eq!(&nc, &coeff);
        prop_assert_eq!(&nc, &walk);
    }

    /// Lukasiewicz walks and non-crossing partitions are in bijection: any
    /// valid excursion survives the round trip through its partition, and
    /// the partition's blocks tile {0, …, m−1}.
    #[test]
    fn walk_partition_roundtrip(steps in vec(-1i32..=3, 1..=9)) {
        prop_assume!(steps.iter().map(|&s| s as i64).sum::<i64>() == 0);
        let Some(walk) = LukasiewiczWalk::new(steps) else {
            // Dips below zero: not an excursion, nothing to check.
            return Ok(());
        };
        let blocks = partition_from_walk(&walk);
        let mut seen: Vec<u32> = blocks.iter().flatten().copied().collect();
        seen.sort_unstable();
        let expected: Vec<u32> = (0..walk.len()).collect();
        prop_assert_eq!(seen, expected);
        prop_assert_eq!(walk_from_partition(&blocks, walk.len()), walk);
    }

    /// The rotation identity: among weighted bridges from height y0 down to
    /// 0 in L steps (increments ≥ −1), the ones staying strictly positive
    /// before the end carry exactly y0/L of the total weight.
    #[test]
    fn ballot_identity_on_random_weights(
        weights in vec(positive_rational(6, 4), 2..=5),
        len in 1u32..=6,
        y0_offset in 0u32..6,
    ) {
        let y0 = 1 + y0_offset % len;
        let sys = WeightedStepSystem::new(weights);
        let counts = bridge_counts(&sys, y0, len).unwrap();
        prop_assert!(ballot_identity_residual(&counts, y0, len).is_zero());
    }

    /// The closed-form series for nonnegative bridge weights equals direct
    /// enumeration, for any nonnegative cumulants and any start height.
    #[test]
    fn bridge_series_equals_enumeration(
        values in vec(positive_rational(5, 3), 6),
        h in 0u32..=2,
        m in 1u32..=6,
    ) {
        prop_assume!(h <= m);
        let kappas = CumulantSequence::from_values(values);
        let direct = bridge_partition_enum(&kappas, h, m).unwrap();
        let series = bridge_series(&kappas, h, m).unwrap();
        prop_assert_eq!(direct, series);
    }

    /// The scale-free edge identity σ·P₋₁·(μ₊/2C₀)^{3/2} = 1/2 holds across
    /// the whole spec domain, and the critical-point step law realizes the
    /// same parameters: mean zero, variance σ², down-probability P₋₁.
    #[test]
    fn edge_identity_and_step_law_consistency(spec in domain_spec()) {
        let params = edge_parameters(&VoiculescuTransform::limiting(&spec)).unwrap();
        prop_assert!(universality_residual(&params).abs() < 1e-10);
        let (dist, params_again) = StepDistribution::at_critical_point(&spec).unwrap();
        assert_abs_diff_eq!(dist.mean(), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(dist.variance(), params.sigma2, epsilon = 1e-9 * params.sigma2);
        assert_abs_diff_eq!(dist.p_down(), params.p_minus1, epsilon = 1e-12);
        assert_abs_diff_eq!(params_again.mu_plus, params.mu_plus, epsilon = 1e-12);
    }

    /// Spec JSON is a faithful round trip.
    #[test]
    fn spec_json_roundtrip(spec in domain_spec()) {
        let back = EnsembleSpec::from_json(&spec.to_json()).unwrap();
        prop_assert_eq!(back, spec);
    }

    /// When every aspect weight γᵢ·N is an integer, the finite-size
    /// cumulants equal the limiting ones exactly — the ceiling in
    /// L_i(N) = ⌈γᵢN⌉ is the only source of finite-size difference.
    #[test]
    fn finite_n_cumulants_collapse_on_integer_dimensions(spec in domain_spec()) {
        // Gammas here have denominators dividing 4, so any multiple of 4 works.
        let n = 8u32;
        let finite = CumulantSequence::finite_n(&spec, n, 8).unwrap();
        let limiting = CumulantSequence::limiting(&spec, 8).unwrap();
        for l in 1..=8 {
            prop_assert_eq!(finite.kappa(l), limiting.kappa(l));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    /// Every ledger class of the operator expansion (leading lowering
    /// convention) equals its walk-functional sum — the identity behind the
    /// classification of expansion terms, on random signed cumulants.
    #[test]
    fn ledger_classes_match_walk_functionals(
        values in vec(signed_rational(4, 2), 4),
        n in 2u32..=3,
        m in 1u32..=4,
        theta_num in 1i64..=3,
        theta_den in 1i64..=3,
    ) {
        let kappas = CumulantSequence::from_values(values);
        let theta = ratio(theta_num, theta_den);
        let expansion =
            dunkl_moment_from_cumulants(&kappas, n, &theta, m, LowerConvention::Simplified)
                .unwrap();
        prop_assert!(classify_against_walks(&expansion, &kappas).is_ok());
    }

    /// E[p_{k₁}p_{k₂}…] cannot depend on the order the power sums are
    /// listed; the operator engine applies them sequentially, so agreement
    /// under permutation is a genuine consistency check of the
    /// raising/lowering bookkeeping.
    #[test]
    fn joint_moments_are_permutation_invariant(
        spec in domain_spec(),
        n in 2u32..=3,
        first in 1u32..=3,
        second in 1u32..=2,
    ) {
        let theta = ratio(1, 2);
        let forward = dunkl_joint_moment(&spec, n, &theta, &[first, second]).unwrap();
        let backward = dunkl_joint_moment(&spec, n, &theta, &[second, first]).unwrap();
        prop_assert_eq!(forward, backward);
    }
}

/// Sum over all partitions via the bijection: the walk route's weight of a
/// single excursion must equal the partition-product weight of its image.
/// (Deterministic spot check that the bijection preserves weights, which is
/// what makes the route equality above a bijective proof rather than a
/// numerical accident.)
#[test]
fn bijection_preserves_weights_at_order_five() {
    let kappas = CumulantSequence::from_values(vec![
        ratio(1, 2),
        int(2),
        ratio(-1, 3),
        int(1),
        ratio(3, 4),
    ]);
    let mut total = BigRational::zero();
    betalab::walks::for_each_excursion(5, &mut |walk: &LukasiewiczWalk| {
        let via_walk = walk.weight(&kappas).unwrap();
        let blocks = partition_from_walk(walk);
        let via_partition: BigRational = blocks
            .iter()
            .map(|b| kappas.kappa(b.len() as u32).clone())
            .product();
        assert_eq!(via_walk, via_partition);
        total += via_walk;
    })
    .unwrap();
    assert_eq!(total, moment_nc(&kappas, 5).unwrap());
    assert!(total.numer() != &BigInt::zero() || total.is_zero());
}
