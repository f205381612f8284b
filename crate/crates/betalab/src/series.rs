//! Dense truncated polynomial arithmetic over exact rationals, used for
//! coefficient-extraction moment formulas.

use num::rational::BigRational;
use num::{One, Zero};

/// A polynomial truncated at a fixed degree; `coeffs[k]` is the z^k
/// coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        RatPoly { coeffs }
    }

    pub fn one() -> Self {
        RatPoly {
            coeffs: vec![BigRational::one()],
        }
    }

    /// Coefficient of z^k (zero beyond the stored truncation).
    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn degree_bound(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Product truncated at degree `deg`.
    pub fn mul_trunc(&self, other: &RatPoly, deg: usize) -> RatPoly {
        let len = (deg + 1).min(self.coeffs.len() + other.coeffs.len() - 1);
        let mut out = vec![BigRational::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > deg || a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j > deg {
                    break;
                }
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        RatPoly { coeffs: out }
    }

    /// Power by binary exponentiation, truncated at degree `deg`.
    pub fn pow_trunc(&self, mut exp: u32, deg: usize) -> RatPoly {
        let mut base = self.clone();
        let mut acc = RatPoly::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_trunc(&base, deg);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul_trunc(&base, deg);
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn truncated_product_drops_high_degrees() {
        // (1 + z)^2 truncated at degree 1 is 1 + 2z.
        let p = RatPoly::from_coeffs(vec![int(1), int(1)]);
        let sq = p.mul_trunc(&p, 1);
        assert_eq!(sq.coeff(0), int(1));
        assert_eq!(sq.coeff(1), int(2));
        assert_eq!(sq.coeff(2), int(0));
    }

    #[test]
    fn binomial_power() {
        let p = RatPoly::from_coeffs(vec![int(1), int(1)]);
        let pow = p.pow_trunc(6, 6);
        for k in 0..=6 {
            assert_eq!(pow.coeff(k), crate::exact::binomial(6, k as u64).into());
        }
    }

    #[test]
    fn geometric_power_coefficient() {
        // [z^2] (1 + z + z^2 + z^3)^4 = 10 (ordered 4-part sums of 2).
        let p = RatPoly::from_coeffs(vec![int(1), int(1), int(1), int(1)]);
        assert_eq!(p.pow_trunc(4, 3).coeff(2), int(10));
    }
}
