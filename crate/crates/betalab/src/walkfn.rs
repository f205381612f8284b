//! Walk functionals: the per-walk factors that turn excursion sums into the
//! non-walk classes of the operator expansion.
//!
//! Two signatures have closed walk-functional forms. With `E(t)` the walk
//! height and the down steps at times `t₁ < … < t_p`,
//!
//! ```text
//! I_{partials = p}(w) = (Nθ)^{−p} · e_p(E(t₁−), …, E(t_k−))
//! I_{swap-pair}(w)    = −((N−1)/N²) · Σ_{down t} E(t)
//! ```
//!
//! where `e_p` is the elementary symmetric polynomial over the heights just
//! before each down step, and the swap-pair sum runs over heights just
//! after each down step. Summing `I·weight` over all length-M excursions
//! reproduces the expansion's ledger class with the matching signature.

use num::rational::BigRational;
use num::{BigInt, One, Zero};

use crate::cumulants::CumulantSequence;
use crate::error::DunklError;
use crate::exact::int;
use crate::walks::{for_each_excursion, LukasiewiczWalk};

/// Ledger-class signatures with closed walk-functional forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionalSignature {
    /// `p` partial-derivative steps, no swaps: the `(0⃗, p)` classes.
    Partials(u32),
    /// One variable receiving two swap steps, aggregated over the `N − 1`
    /// non-main variables: the `|k⃗| = 2, p = 0` classes.
    SwapPair,
}

/// Evaluate the functional of one walk.
pub fn walk_functional(
    walk: &LukasiewiczWalk,
    signature: FunctionalSignature,
    n: u32,
    theta: &BigRational,
) -> Result<BigRational, DunklError> {
    match signature {
        FunctionalSignature::Partials(p) => {
            let heights = walk.heights();
            let pre_down: Vec<i64> = walk.down_times().map(|t| heights[t - 1]).collect();
            let e_p = elementary_symmetric(&pre_down, p as usize);
            let n_theta = int(n as i64) * theta;
            Ok(BigRational::from_integer(e_p) / n_theta.pow(p as i32))
        }
        FunctionalSignature::SwapPair => {
            let heights = walk.heights();
            let after_down: i64 = walk.down_times().map(|t| heights[t]).sum();
            let n_sq = int((n as i64) * (n as i64));
            Ok(-int(n as i64 - 1) * int(after_down) / n_sq)
        }
    }
}

/// `Σ_{w ∈ 𝒲(M)} I(w)·weight(w)` over all length-`m` excursions.
pub fn functional_class_sum(
    kappas: &CumulantSequence,
    m: u32,
    signature: FunctionalSignature,
    n: u32,
    theta: &BigRational,
) -> Result<BigRational, DunklError> {
    let mut total = BigRational::zero();
    let mut inner: Result<(), DunklError> = Ok(());
    for_each_excursion(m, &mut |walk: &LukasiewiczWalk| {
        if inner.is_err() {
            return;
        }
        match walk
            .weight(kappas)
            .map_err(DunklError::from)
            .and_then(|w| {
                if w.is_zero() {
                    return Ok(BigRational::zero());
                }
                walk_functional(walk, signature, n, theta).map(|i| i * w)
            }) {
            Ok(term) => total += term,
            Err(e) => inner = Err(e),
        }
    })
    .map_err(DunklError::from)?;
    inner?;
    Ok(total)
}

/// Elementary symmetric polynomial `e_p` of integer values, by the
/// coefficient recurrence of `Π (1 + v·x)`.
fn elementary_symmetric(values: &[i64], p: usize) -> BigInt {
    if p > values.len() {
        return BigInt::zero();
    }
    let mut coeffs = vec![BigInt::zero(); p + 1];
    coeffs[0] = BigInt::one();
    for &v in values {
        let v = BigInt::from(v);
        for k in (1..=p).rev() {
            let add = &coeffs[k - 1] * &v;
            coeffs[k] += add;
        }
    }
    coeffs[p].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn walk(steps: &[i32]) -> LukasiewiczWalk {
        LukasiewiczWalk::new(steps.to_vec()).unwrap()
    }

    #[test]
    fn partials_functional_sums_predown_heights() {
        // Walk (+2, −1, −1): heights before the downs are 2 and 1.
        let w = walk(&[2, -1, -1]);
        let theta = ratio(1, 2);
        let i1 = walk_functional(&w, FunctionalSignature::Partials(1), 3, &theta).unwrap();
        assert_eq!(i1, ratio(3, 1) / (int(3) * theta.clone()));
        let i2 = walk_functional(&w, FunctionalSignature::Partials(2), 3, &theta).unwrap();
        assert_eq!(i2, int(2) / (int(3) * theta.clone()).pow(2));
        // e_3 over two heights is empty.
        let i3 = walk_functional(&w, FunctionalSignature::Partials(3), 3, &theta).unwrap();
        assert_eq!(i3, int(0));
    }

    #[test]
    fn zero_walk_has_no_down_steps() {
        let w = walk(&[0, 0, 0]);
        let theta = int(1);
        for sig in [
            FunctionalSignature::Partials(1),
            FunctionalSignature::SwapPair,
        ] {
            assert_eq!(walk_functional(&w, sig, 2, &theta).unwrap(), int(0));
        }
        // p = 0 is the empty product: always 1.
        assert_eq!(
            walk_functional(&w, FunctionalSignature::Partials(0), 2, &theta).unwrap(),
            int(1)
        );
    }

    #[test]
    fn swap_pair_uses_heights_after_downs() {
        // Walk (+2, −1, −1): heights after the downs are 1 and 0.
        let w = walk(&[2, -1, -1]);
        let i = walk_functional(&w, FunctionalSignature::SwapPair, 4, &int(1)).unwrap();
        assert_eq!(i, ratio(-3, 16));
    }

    #[test]
    fn swap_pair_class_sum_is_minus_kappa3_scaled() {
        // Over 𝒲(3) only (+2,−1,−1) contributes: Σ I·w = −(N−1)/N²·κ₃.
        let kappas = CumulantSequence::from_values(vec![ratio(2, 3), int(1), ratio(5, 7)]);
        for n in 2..=4u32 {
            let sum = functional_class_sum(
                &kappas,
                3,
                FunctionalSignature::SwapPair,
                n,
                &ratio(1, 3),
            )
            .unwrap();
            let expected =
                -int(n as i64 - 1) * ratio(5, 7) / int((n as i64) * (n as i64));
            assert_eq!(sum, expected, "n = {n}");
        }
    }

    #[test]
    fn single_partial_class_sum_at_m3() {
        // Heights before downs: (+2,−1,−1) gives 2+1 = 3 with weight κ₃;
        // (+1,−1,0) and (+1,0,−1) and (0,+1,−1) each give 1 with weight
        // κ₁κ₂. Total (3κ₃ + 3κ₁κ₂)/(Nθ).
        let k1 = ratio(1, 2);
        let k2 = int(2);
        let k3 = ratio(3, 5);
        let kappas = CumulantSequence::from_values(vec![k1.clone(), k2.clone(), k3.clone()]);
        let n = 3u32;
        let theta = ratio(2, 7);
        let sum =
            functional_class_sum(&kappas, 3, FunctionalSignature::Partials(1), n, &theta)
                .unwrap();
        let expected = (int(3) * &k3 + int(3) * &k1 * &k2) / (int(n as i64) * &theta);
        assert_eq!(sum, expected);
    }

    #[test]
    fn partials_zero_class_sum_is_the_moment() {
        use crate::moments::moment_nc;
        let kappas = CumulantSequence::from_values(vec![
            ratio(1, 2),
            int(1),
            ratio(2, 5),
            int(3),
            int(1),
            int(1),
        ]);
        for m in 1..=6u32 {
            let sum = functional_class_sum(
                &kappas,
                m,
                FunctionalSignature::Partials(0),
                2,
                &int(1),
            )
            .unwrap();
            assert_eq!(sum, moment_nc(&kappas, m).unwrap(), "m = {m}");
        }
    }
}
