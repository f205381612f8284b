//! Exact symbolic expansion of the Dunkl-operator action that generates
//! ensemble moments: E[p_M] is obtained by applying the M-th power of the
//! normalized operator to the constant 1 and reading off the constant term.
//!
//! One application of the normalized operator is the sum of four step types
//! acting on a monomial whose main variable is z₁:
//!
//! * raise(l): multiply by κ_l(N)·θ^{1−l}·z₁^{l−1} (degree +l−1),
//! * standard lower: θ·((N−1−Y₁)/N)·d̂₁ with d̂₁ z₁^p = z₁^{p−1} and Y₁ the
//!   number of other variables of degree ≥ deg z₁ (degree −1),
//! * exchange with variable j: (θ/N)·Δd_j, which trades z₁-degree against
//!   z_j-degree, every split of total degree p+q−1 appearing once, with a
//!   minus sign when deg z_j decreases (degree −1),
//! * partial: (1/N)·∂₁ (degree −1).
//!
//! Exchange and partial steps are the "weird jumps"; each full expansion is
//! classified by its per-variable exchange counts k⃗ and partial count p into
//! a ledger of exact rational class values. The walk class (k⃗ = 0⃗, p = 0)
//! reproduces the non-crossing-partition moment; the other classes are the
//! finite-N corrections that the walk functionals approximate.
//!
//! The standard-lower prefactor deserves a note: summing the per-variable
//! exchange identity over j gives (N−1−Y₁)·d̂₁ — the main variable is not its
//! own partner — and that count is what the `Exact` convention uses. The
//! widely used asymptotic simplification drops the prefactor entirely
//! (coefficient θ); class-level reference values in the literature and the
//! walk-functional identities are stated in that convention, so `Simplified`
//! is kept alongside and is the convention `classify_against_walks` expects.

use std::collections::HashMap;

use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::Serialize;

use crate::cumulants::CumulantSequence;
use crate::ensemble::EnsembleSpec;
use crate::error::DunklError;
use crate::exact::{format_rational, int};
use crate::moments::moment_nc;
use crate::walkfn::{functional_class_sum, FunctionalSignature};

/// Coefficient of the degree-lowering operator d̂₁.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerConvention {
    /// θ·(N−1−Y₁)/N — the true expansion; use for ground-truth moments.
    Exact,
    /// θ — the asymptotic device; use for ledger-class and walk identities.
    Simplified,
}

/// Weird-jump signature of one operator sequence: how many exchange steps
/// touched each variable, and how many partial-derivative steps occurred.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JumpSignature {
    /// Exchange counts per variable index (the main variable's entry is 0).
    pub swaps: Vec<u32>,
    /// Partial-derivative count.
    pub partials: u32,
}

impl JumpSignature {
    fn zero(n: usize) -> Self {
        JumpSignature {
            swaps: vec![0; n],
            partials: 0,
        }
    }

    /// Variable-order-independent form: nonzero exchange counts sorted
    /// descending, plus the partial count.
    pub fn collapsed(&self) -> (Vec<u32>, u32) {
        let mut counts: Vec<u32> = self.swaps.iter().copied().filter(|&k| k > 0).collect();
        counts.sort_unstable_by(|a, b| b.cmp(a));
        (counts, self.partials)
    }

    /// True for the walk class: no exchanges, no partials.
    pub fn is_walk_class(&self) -> bool {
        self.partials == 0 && self.swaps.iter().all(|&k| k == 0)
    }
}

/// Ledger of exact class values produced by expanding the M-th operator
/// power, together with the conventions it was built under.
#[derive(Debug, Clone)]
pub struct DunklExpansion {
    n: u32,
    theta: BigRational,
    m: u32,
    convention: LowerConvention,
    ledger: HashMap<JumpSignature, BigRational>,
}

/// One exported ledger row.
#[derive(Debug, Serialize)]
struct LedgerRow {
    signature: LedgerSignature,
    value: String,
}

#[derive(Debug, Serialize)]
struct LedgerSignature {
    k: Vec<u32>,
    p: u32,
}

impl DunklExpansion {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn theta(&self) -> &BigRational {
        &self.theta
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn convention(&self) -> LowerConvention {
        self.convention
    }

    /// The full signature ↦ value map.
    pub fn ledger(&self) -> &HashMap<JumpSignature, BigRational> {
        &self.ledger
    }

    /// Value of the normalized expansion: the sum of all classes.
    pub fn total(&self) -> BigRational {
        self.ledger.values().sum()
    }

    /// The moment E[p_M] = N^{M+1} · total.
    pub fn moment(&self) -> BigRational {
        int(self.n as i64).pow(self.m as i32 + 1) * self.total()
    }

    /// Per-variable class value. `partner_swaps` lists exchange counts for
    /// the non-main variables in order (length ≤ N−1, missing entries zero).
    pub fn class(&self, partner_swaps: &[u32], partials: u32) -> BigRational {
        let mut swaps = vec![0u32; self.n as usize];
        for (slot, &k) in swaps[1..].iter_mut().zip(partner_swaps) {
            *slot = k;
        }
        let key = JumpSignature { swaps, partials };
        self.ledger
            .get(&key)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Sum of all classes whose collapsed form matches `pattern` (nonzero
    /// exchange counts, sorted descending) and `partials`.
    pub fn collapsed_class(&self, pattern: &[u32], partials: u32) -> BigRational {
        self.ledger
            .iter()
            .filter(|(sig, _)| {
                let (counts, p) = sig.collapsed();
                p == partials && counts == pattern
            })
            .map(|(_, v)| v)
            .sum()
    }

    /// JSON export: one row per class, deterministically ordered, values as
    /// exact rational strings.
    pub fn ledger_json(&self) -> String {
        let mut keys: Vec<&JumpSignature> = self.ledger.keys().collect();
        keys.sort();
        let rows: Vec<LedgerRow> = keys
            .into_iter()
            .map(|sig| LedgerRow {
                signature: LedgerSignature {
                    k: sig.swaps[1..].to_vec(),
                    p: sig.partials,
                },
                value: format_rational(&self.ledger[sig]),
            })
            .collect();
        serde_json::to_string_pretty(&rows).expect("ledger rows serialize")
    }
}

const CAP_N: u32 = 5;
const CAP_M: u32 = 7;
const CAP_M_UNIVARIATE: u32 = 10;
const CAP_JOINT_N: u32 = 4;
const CAP_JOINT_TOTAL: u32 = 7;
const TERM_BUDGET: usize = 2_000_000;

fn check_theta(theta: &BigRational) -> Result<(), DunklError> {
    if theta.is_positive() {
        Ok(())
    } else {
        Err(DunklError::InvalidTheta(format_rational(theta)))
    }
}

/// Expand the M-th normalized operator power for a spec's finite-N
/// cumulants and return the classified ledger.
pub fn dunkl_moment(
    spec: &EnsembleSpec,
    n: u32,
    theta: &BigRational,
    m: u32,
    convention: LowerConvention,
) -> Result<DunklExpansion, DunklError> {
    let kappas = CumulantSequence::finite_n(spec, n, m.max(1))?;
    dunkl_moment_from_cumulants(&kappas, n, theta, m, convention)
}

/// Same expansion for an arbitrary cumulant sequence (formal identities).
pub fn dunkl_moment_from_cumulants(
    kappas: &CumulantSequence,
    n: u32,
    theta: &BigRational,
    m: u32,
    convention: LowerConvention,
) -> Result<DunklExpansion, DunklError> {
    let cap_m = if n == 1 { CAP_M_UNIVARIATE } else { CAP_M };
    if n == 0 || n > CAP_N || m == 0 || m > cap_m {
        return Err(DunklError::LimitExceeded {
            n,
            m,
            cap_n: CAP_N,
            cap_m,
        });
    }
    check_theta(theta)?;
    if kappas.max_order() < m {
        return Err(DunklError::MissingCumulants {
            needed: m,
            have: kappas.max_order(),
        });
    }
    let ledger = expand(kappas, n as usize, theta, m as usize, convention, 0)?;
    Ok(DunklExpansion {
        n,
        theta: theta.clone(),
        m,
        convention,
        ledger,
    })
}

type State = HashMap<(Vec<u8>, JumpSignature), BigRational>;

fn add_term(state: &mut State, key: (Vec<u8>, JumpSignature), value: BigRational) {
    if value.is_zero() {
        return;
    }
    let slot = state.entry(key).or_insert_with(BigRational::zero);
    *slot += value;
    // Exact cancellations happen (opposite-sign exchange branches); keeping
    // zero entries would only bloat the budget.
}

fn expand(
    kappas: &CumulantSequence,
    n: usize,
    theta: &BigRational,
    m: usize,
    convention: LowerConvention,
    main: usize,
) -> Result<HashMap<JumpSignature, BigRational>, DunklError> {
    let theta_over_n = theta / int(n as i64);
    let mut state: State = HashMap::new();
    state.insert((vec![0u8; n], JumpSignature::zero(n)), BigRational::one());

    for step in 0..m {
        let remaining = m - step - 1;
        let mut next: State = HashMap::new();
        for ((exps, sig), coeff) in &state {
            let degree: usize = exps.iter().map(|&e| e as usize).sum();
            let p = exps[main] as usize;

            // Raise: degree budget keeps l−1 within what later steps can
            // still bring back to zero.
            let l_max = (remaining + 1 - degree).min(kappas.max_order() as usize);
            for l in 1..=l_max {
                let kappa = kappas.kappa(l as u32);
                if kappa.is_zero() {
                    continue;
                }
                let mut e = exps.clone();
                e[main] += (l - 1) as u8;
                let factor = if l == 1 {
                    kappa.clone()
                } else {
                    kappa * theta.pow(1 - l as i32)
                };
                add_term(&mut next, (e, sig.clone()), coeff * factor);
            }

            if p >= 1 {
                // Standard lower.
                let prefactor = match convention {
                    LowerConvention::Exact => {
                        let y1 = exps
                            .iter()
                            .enumerate()
                            .filter(|&(j, &e)| j != main && e as usize >= p)
                            .count();
                        int((n - 1 - y1) as i64) * theta / int(n as i64)
                    }
                    LowerConvention::Simplified => theta.clone(),
                };
                if !prefactor.is_zero() {
                    let mut e = exps.clone();
                    e[main] -= 1;
                    add_term(&mut next, (e, sig.clone()), coeff * prefactor);
                }

                // Partial.
                let mut e = exps.clone();
                e[main] -= 1;
                let mut s = sig.clone();
                s.partials += 1;
                add_term(&mut next, (e, s), coeff * int(p as i64) / int(n as i64));
            }

            // Exchange with each other variable. The degree-trading sum has
            // p−q−1 terms when lowering the main variable, so a gap of one
            // contributes nothing.
            for j in (0..n).filter(|&j| j != main) {
                let q = exps[j] as usize;
                if p > q + 1 {
                    for i in 0..=(p - q - 2) {
                        let mut e = exps.clone();
                        e[main] = (p - 2 - i) as u8;
                        e[j] = (q + 1 + i) as u8;
                        let mut s = sig.clone();
                        s.swaps[j] += 1;
                        add_term(&mut next, (e, s), coeff * &theta_over_n);
                    }
                } else if p < q {
                    for i in 0..=(q - p - 1) {
                        let mut e = exps.clone();
                        e[main] = (p + i) as u8;
                        e[j] = (q - 1 - i) as u8;
                        let mut s = sig.clone();
                        s.swaps[j] += 1;
                        add_term(&mut next, (e, s), -(coeff * &theta_over_n));
                    }
                }
            }
        }
        if next.len() > TERM_BUDGET {
            return Err(DunklError::TermBudgetExceeded {
                budget: TERM_BUDGET,
            });
        }
        state = next;
    }

    let mut ledger: HashMap<JumpSignature, BigRational> = HashMap::new();
    for ((exps, sig), coeff) in state {
        debug_assert!(
            exps.iter().all(|&e| e == 0),
            "degree budget must force all surviving terms to the constant"
        );
        if !coeff.is_zero() {
            *ledger.entry(sig).or_insert_with(BigRational::zero) += coeff;
        }
    }
    ledger.retain(|_, v| !v.is_zero());
    Ok(ledger)
}

/// Exact joint moment E[Π p_{kᵢ}(λ)] via iterated symmetric operator
/// powers: each factor applies Σ_j 𝒟_j^{kᵢ} with the raw (unnormalized)
/// step weights.
pub fn dunkl_joint_moment(
    spec: &EnsembleSpec,
    n: u32,
    theta: &BigRational,
    powers: &[u32],
) -> Result<BigRational, DunklError> {
    let total: u32 = powers.iter().sum();
    if n == 0 || n > CAP_JOINT_N || total == 0 || total > CAP_JOINT_TOTAL
        || powers.contains(&0)
    {
        return Err(DunklError::LimitExceeded {
            n,
            m: total,
            cap_n: CAP_JOINT_N,
            cap_m: CAP_JOINT_TOTAL,
        });
    }
    check_theta(theta)?;
    let kappas = CumulantSequence::finite_n(spec, n, total)?;

    // Raw raise coefficients: N·κ_l(N)·θ^{1−l}.
    let raises: Vec<BigRational> = (1..=total)
        .map(|l| {
            let base = kappas.kappa(l) * int(n as i64);
            if l == 1 {
                base
            } else {
                base * theta.pow(1 - l as i32)
            }
        })
        .collect();

    let n = n as usize;
    let mut state: HashMap<Vec<u8>, BigRational> = HashMap::new();
    state.insert(vec![0u8; n], BigRational::one());
    let mut remaining = total as usize;

    for &k in powers {
        // Σ over the choice of acting variable of its k-fold action.
        let mut summed: HashMap<Vec<u8>, BigRational> = HashMap::new();
        for var in 0..n {
            let mut branch = state.clone();
            let mut branch_remaining = remaining;
            for _ in 0..k {
                branch_remaining -= 1;
                branch = apply_raw_step(&branch, var, n, theta, &raises, branch_remaining)?;
            }
            for (key, value) in branch {
                let slot = summed.entry(key).or_insert_with(BigRational::zero);
                *slot += value;
            }
        }
        summed.retain(|_, v| !v.is_zero());
        remaining -= k as usize;
        state = summed;
    }

    Ok(state
        .remove(&vec![0u8; n])
        .unwrap_or_else(BigRational::zero))
}

/// One raw 𝒟_var application to every term of `state`, pruning monomials
/// whose total degree exceeds `budget` (they cannot return to a constant).
fn apply_raw_step(
    state: &HashMap<Vec<u8>, BigRational>,
    var: usize,
    n: usize,
    theta: &BigRational,
    raises: &[BigRational],
    budget: usize,
) -> Result<HashMap<Vec<u8>, BigRational>, DunklError> {
    let mut next: HashMap<Vec<u8>, BigRational> = HashMap::new();
    let mut add = |key: Vec<u8>, value: BigRational| {
        if !value.is_zero() {
            let slot = next.entry(key).or_insert_with(BigRational::zero);
            *slot += value;
        }
    };

    for (exps, coeff) in state {
        let degree: usize = exps.iter().map(|&e| e as usize).sum();
        let p = exps[var] as usize;

        let l_max = (budget + 1).saturating_sub(degree).min(raises.len());
        for l in 1..=l_max {
            if raises[l - 1].is_zero() {
                continue;
            }
            let mut e = exps.clone();
            e[var] += (l - 1) as u8;
            add(e, coeff * &raises[l - 1]);
        }

        if p >= 1 {
            // ∂_var on the polynomial part.
            let mut e = exps.clone();
            e[var] -= 1;
            add(e, coeff * int(p as i64));
        }

        for j in (0..n).filter(|&j| j != var) {
            let q = exps[j] as usize;
            // Pairwise lowering half of the exchange term.
            if p >= 1 && p > q {
                let mut e = exps.clone();
                e[var] -= 1;
                add(e, coeff * theta);
            }
            // Degree-trading half (empty when the gap is exactly one).
            if p > q + 1 {
                for i in 0..=(p - q - 2) {
                    let mut e = exps.clone();
                    e[var] = (p - 2 - i) as u8;
                    e[j] = (q + 1 + i) as u8;
                    add(e, coeff * theta);
                }
            } else if p < q {
                for i in 0..=(q - p - 1) {
                    let mut e = exps.clone();
                    e[var] = (p + i) as u8;
                    e[j] = (q - 1 - i) as u8;
                    add(e, -(coeff * theta));
                }
            }
        }
    }
    if next.len() > TERM_BUDGET {
        return Err(DunklError::TermBudgetExceeded {
            budget: TERM_BUDGET,
        });
    }
    Ok(next)
}

/// Cross-check a simplified-convention expansion against the independent
/// walk machinery: the walk class must equal the non-crossing-partition
/// moment, the partial classes must match the elementary-symmetric walk
/// functional, and the two-exchange class must match the paired-exchange
/// functional (which carries the N−1 choice multiplicity, so it compares
/// against the collapsed class).
pub fn classify_against_walks(
    expansion: &DunklExpansion,
    kappas: &CumulantSequence,
) -> Result<(), DunklError> {
    if expansion.convention() != LowerConvention::Simplified {
        return Err(DunklError::UnsupportedSignature(
            "walk classification is stated in the simplified lower convention".into(),
        ));
    }
    let n = expansion.n();
    let m = expansion.m();
    let theta = expansion.theta();
    let mut mismatches = Vec::new();

    let walk_class = expansion.class(&[], 0);
    let nc = moment_nc(kappas, m)?;
    if walk_class != nc {
        mismatches.push(format!(
            "walk class: ledger {} vs non-crossing sum {}",
            format_rational(&walk_class),
            format_rational(&nc)
        ));
    }

    for p in 1..=m {
        let ledger = expansion.class(&[], p);
        let functional =
            functional_class_sum(kappas, m, FunctionalSignature::Partials(p), n, theta)?;
        if ledger != functional {
            mismatches.push(format!(
                "partial class p = {p}: ledger {} vs functional {}",
                format_rational(&ledger),
                format_rational(&functional)
            ));
            break;
        }
    }

    let ledger_pair = expansion.collapsed_class(&[2], 0);
    let functional_pair =
        functional_class_sum(kappas, m, FunctionalSignature::SwapPair, n, theta)?;
    if ledger_pair != functional_pair {
        mismatches.push(format!(
            "paired-exchange class: ledger {} vs functional {}",
            format_rational(&ledger_pair),
            format_rational(&functional_pair)
        ));
    }

    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(DunklError::MismatchReport(mismatches.join("\n")))
    }
}
