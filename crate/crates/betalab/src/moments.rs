//! Moments from cumulants by two independent exact routes:
//!
//! * `moment_nc` — the sum over non-crossing partitions of products of
//!   block-size cumulants;
//! * `moment_coefficient` — coefficient extraction
//!   m_M = [z^M] (1 + Σ_l κ_l z^l)^{M+1} / (M+1).
//!
//! A third route, the weighted excursion sum, lives in `walks`.

use num::rational::BigRational;
use num::{One, Zero};

use crate::cumulants::CumulantSequence;
use crate::error::CombinatoricsError;
use crate::ncpart::for_each_noncrossing;
use crate::series::RatPoly;
use crate::walks::ENUMERATION_CAP;

/// m_M as a sum over non-crossing partitions. Requires M ≤ 14 (Catalan
/// growth) and cumulants up to order M.
pub fn moment_nc(kappas: &CumulantSequence, m: u32) -> Result<BigRational, CombinatoricsError> {
    if m > ENUMERATION_CAP {
        return Err(CombinatoricsError::EnumerationTooLarge {
            m,
            cap: ENUMERATION_CAP,
        });
    }
    if kappas.max_order() < m {
        return Err(CombinatoricsError::MissingCumulants {
            needed: m,
            available: kappas.max_order(),
        });
    }
    let mut total = BigRational::zero();
    for_each_noncrossing(m, &mut |blocks| {
        let mut product = BigRational::one();
        for block in blocks {
            let kappa = kappas.kappa(block.len() as u32);
            if kappa.is_zero() {
                return;
            }
            product *= kappa;
        }
        total += product;
    });
    Ok(total)
}

/// m_M by coefficient extraction from the (M+1)-st power of the cumulant
/// polynomial. Exact for any M with cumulants up to order M.
pub fn moment_coefficient(
    kappas: &CumulantSequence,
    m: u32,
) -> Result<BigRational, CombinatoricsError> {
    if kappas.max_order() < m {
        return Err(CombinatoricsError::MissingCumulants {
            needed: m,
            available: kappas.max_order(),
        });
    }
    if m == 0 {
        return Ok(BigRational::one());
    }
    let mut coeffs = Vec::with_capacity(m as usize + 1);
    coeffs.push(BigRational::one());
    for l in 1..=m {
        coeffs.push(kappas.kappa(l).clone());
    }
    let poly = RatPoly::from_coeffs(coeffs);
    let power = poly.pow_trunc(m + 1, m as usize);
    Ok(power.coeff(m as usize) / BigRational::from_integer((m + 1).into()))
}
