//! The inverse-transform V whose critical point locates the spectral edge.
//!
//! For a spec with Gaussian weight `delta` and components `(alpha_i, w_i)`
//! (weights are `gamma_i` in the limit, or `ceil(gamma_i n)/n` at finite
//! matrix size),
//!
//! ```text
//! V(z)    = 1/z + delta·z + Σ_i w_i·alpha_i / (1 − alpha_i·z) + c
//! V'(z)   = −1/z² + delta + Σ_i w_i·alpha_i² / (1 − alpha_i·z)²
//! V''(z)  = 2/z³ + Σ_i 2·w_i·alpha_i³ / (1 − alpha_i·z)³
//! V'''(z) = −6/z⁴ + Σ_i 6·w_i·alpha_i⁴ / (1 − alpha_i·z)⁴
//! ```
//!
//! where `c = −Σ w_i·alpha_i` for centered specs and 0 otherwise. Expanding
//! the geometric series shows `V(z) = 1/z + Σ_{l≥1} kappa_l z^{l−1}` with the
//! spec's free cumulants, so `V` packages the whole cumulant sequence.

use num::complex::Complex64;
use num::rational::BigRational;
use num::{BigInt, One, Signed, Zero};

use crate::ensemble::{Centering, EnsembleSpec};
use crate::error::EdgeError;
use crate::exact::{format_rational, int, rational_to_f64};

/// `V` and its first three derivatives, for a fixed spec (limiting or
/// finite-size weights).
#[derive(Debug, Clone, PartialEq)]
pub struct VoiculescuTransform {
    delta: BigRational,
    /// `(alpha_i, w_i)` pairs.
    terms: Vec<(BigRational, BigRational)>,
    /// Constant removing the first cumulant for centered specs.
    kappa1_offset: BigRational,
}

impl VoiculescuTransform {
    fn build(delta: BigRational, terms: Vec<(BigRational, BigRational)>, centering: Centering) -> Self {
        let kappa1_offset = match centering {
            Centering::Centered => -terms
                .iter()
                .map(|(a, w)| a * w)
                .fold(BigRational::zero(), |acc, t| acc + t),
            Centering::Uncentered => BigRational::zero(),
        };
        VoiculescuTransform {
            delta,
            terms,
            kappa1_offset,
        }
    }

    /// Transform with limiting weights `w_i = gamma_i`.
    pub fn limiting(spec: &EnsembleSpec) -> Self {
        let terms = spec
            .components()
            .iter()
            .map(|c| (c.alpha.clone(), c.gamma.clone()))
            .collect();
        Self::build(spec.delta().clone(), terms, spec.centering())
    }

    /// Transform with finite-size weights `w_i = ceil(gamma_i·n)/n`.
    pub fn finite_n(spec: &EnsembleSpec, n: u32) -> Self {
        let dims = spec.component_dims(n);
        let terms = spec
            .components()
            .iter()
            .zip(dims)
            .map(|(c, l)| (c.alpha.clone(), l / int(n as i64)))
            .collect();
        Self::build(spec.delta().clone(), terms, spec.centering())
    }

    pub fn delta(&self) -> &BigRational {
        &self.delta
    }

    pub fn terms(&self) -> &[(BigRational, BigRational)] {
        &self.terms
    }

    pub fn kappa1_offset(&self) -> &BigRational {
        &self.kappa1_offset
    }

    /// Smallest positive pole `1/alpha_i` (poles with `alpha_i < 0` sit on
    /// the negative axis and don't bound the search interval).
    pub fn positive_pole(&self) -> Option<BigRational> {
        self.terms
            .iter()
            .filter(|(a, _)| a.is_positive())
            .map(|(a, _)| a.recip())
            .min()
    }

    /// Exact evaluation of the `order`-th derivative (0 ≤ order ≤ 3) at a
    /// rational point. Fails at `z = 0` and at the poles `z = 1/alpha_i`.
    pub fn eval_rational(&self, z: &BigRational, order: u32) -> Result<BigRational, EdgeError> {
        assert!(order <= 3, "derivatives implemented up to order 3");
        if z.is_zero() {
            return Err(EdgeError::PoleEvaluation {
                z: format_rational(z),
            });
        }
        let one = BigRational::one();
        // 1/z term: d^k/dz^k z^{-1} = (−1)^k k! z^{-1-k}.
        let mut acc = pole_derivative(&z.recip(), order);
        match order {
            0 => acc += &self.delta * z + &self.kappa1_offset,
            1 => acc += &self.delta,
            _ => {}
        }
        for (alpha, w) in &self.terms {
            let denom = &one - alpha * z;
            if denom.is_zero() {
                return Err(EdgeError::PoleEvaluation {
                    z: format_rational(z),
                });
            }
            // d^k/dz^k alpha/(1−alpha·z) = k! alpha^{k+1} (1−alpha·z)^{-1-k}.
            let mut term = w * alpha;
            let frac = alpha / &denom;
            for _ in 0..order {
                term *= &frac;
            }
            term /= &denom;
            acc += factorial(order) * term;
        }
        Ok(acc)
    }

    /// Floating evaluation of the `order`-th derivative (0 ≤ order ≤ 3).
    /// Returns non-finite values at poles instead of erroring.
    pub fn eval_f64(&self, z: f64, order: u32) -> f64 {
        assert!(order <= 3, "derivatives implemented up to order 3");
        let k = order as i32;
        let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
        let fact = factorial_f64(order);
        let mut acc = sign * fact * z.powi(-1 - k);
        match order {
            0 => acc += self.delta_f64() * z + self.kappa1_offset_f64(),
            1 => acc += self.delta_f64(),
            _ => {}
        }
        for (alpha, w) in &self.terms {
            let a = rational_to_f64(alpha);
            let wf = rational_to_f64(w);
            acc += fact * wf * a.powi(k + 1) * (1.0 - a * z).powi(-1 - k);
        }
        acc
    }

    /// `V(z)` on the complex plane (used by contour quadrature).
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let mut acc = z.inv() + self.delta_f64() * z + self.kappa1_offset_f64();
        for (alpha, w) in &self.terms {
            let a = rational_to_f64(alpha);
            let wf = rational_to_f64(w);
            acc += wf * a / (Complex64::new(1.0, 0.0) - a * z);
        }
        acc
    }

    pub fn delta_f64(&self) -> f64 {
        rational_to_f64(&self.delta)
    }

    pub fn kappa1_offset_f64(&self) -> f64 {
        rational_to_f64(&self.kappa1_offset)
    }
}

/// `k`-th derivative of `1/z`, given `1/z`: `(−1)^k k! z^{−1−k}`.
fn pole_derivative(z_inv: &BigRational, order: u32) -> BigRational {
    let mut acc = z_inv.clone();
    for _ in 0..order {
        acc *= z_inv;
    }
    let out = factorial(order) * acc;
    if order % 2 == 1 {
        -out
    } else {
        out
    }
}

fn factorial(k: u32) -> BigRational {
    let mut f = BigInt::one();
    for i in 2..=k as u64 {
        f *= i;
    }
    BigRational::from_integer(f)
}

fn factorial_f64(k: u32) -> f64 {
    (1..=k as u64).map(|i| i as f64).product()
}
