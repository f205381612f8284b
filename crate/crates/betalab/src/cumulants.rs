//! Free-cumulant sequences attached to an ensemble spec.
//!
//! Limiting cumulants: kappa_1 = sum_i alpha_i gamma_i (0 when centered),
//! kappa_2 = delta + sum_i alpha_i^2 gamma_i, and
//! kappa_l = sum_i alpha_i^l gamma_i for l >= 3.
//!
//! At matrix size N the aspect weights are replaced by L_i(N)/N with
//! L_i(N) = ceil(gamma_i N), which perturbs every order by O(1/N).

use num::rational::BigRational;
use num::{Signed, Zero};

use crate::ensemble::{Centering, EnsembleSpec};
use crate::error::SpecError;
use crate::exact::{format_rational, int};

/// Cumulants kappa_1..kappa_max stored exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulantSequence {
    values: Vec<BigRational>,
}

impl CumulantSequence {
    /// Wrap raw values (kappa_1 first) without a positivity check; used for
    /// formal identities that hold for arbitrary rational cumulants.
    pub fn from_values(values: Vec<BigRational>) -> Self {
        CumulantSequence { values }
    }

    /// Limiting cumulants of a spec up to `max_order`, rejecting any
    /// negative value.
    pub fn limiting(spec: &EnsembleSpec, max_order: u32) -> Result<Self, SpecError> {
        let weights: Vec<(BigRational, BigRational)> = spec
            .components()
            .iter()
            .map(|c| (c.alpha.clone(), c.gamma.clone()))
            .collect();
        Self::build(spec, &weights, max_order)
    }

    /// Finite-size cumulants at matrix size `n`, using aspect weights
    /// `L_i(n)/n` with `L_i(n) = ceil(gamma_i n)`.
    pub fn finite_n(spec: &EnsembleSpec, n: u32, max_order: u32) -> Result<Self, SpecError> {
        let n_rat = int(n as i64);
        let weights: Vec<(BigRational, BigRational)> = spec
            .components()
            .iter()
            .map(|c| {
                let dims = (&c.gamma * &n_rat).ceil();
                (c.alpha.clone(), dims / &n_rat)
            })
            .collect();
        Self::build(spec, &weights, max_order)
    }

    fn build(
        spec: &EnsembleSpec,
        weights: &[(BigRational, BigRational)],
        max_order: u32,
    ) -> Result<Self, SpecError> {
        let mut values = Vec::with_capacity(max_order as usize);
        // Running powers alpha_i^l, updated once per order.
        let mut powers: Vec<BigRational> =
            weights.iter().map(|(alpha, _)| alpha.clone()).collect();
        for order in 1..=max_order {
            let mut kappa = BigRational::zero();
            for ((_, gamma), power) in weights.iter().zip(powers.iter()) {
                kappa += gamma * power;
            }
            if order == 1 && spec.centering() == Centering::Centered {
                kappa = BigRational::zero();
            }
            if order == 2 {
                kappa += spec.delta();
            }
            if kappa.is_negative() {
                return Err(SpecError::NegativeCumulant {
                    order,
                    value: format_rational(&kappa),
                });
            }
            values.push(kappa);
            for ((alpha, _), power) in weights.iter().zip(powers.iter_mut()) {
                *power *= alpha;
            }
        }
        Ok(CumulantSequence { values })
    }

    pub fn max_order(&self) -> u32 {
        self.values.len() as u32
    }

    /// kappa_l (1-based). Panics if `l` is 0 or beyond `max_order`.
    pub fn kappa(&self, l: u32) -> &BigRational {
        &self.values[(l - 1) as usize]
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }
}
