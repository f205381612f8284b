//! Łukasiewicz excursions: integer walks of a given length with steps in
//! {−1, 0, 1, 2, …} that stay nonnegative after every step and end at
//! height 0. They are in bijection with non-crossing partitions: the block
//! with least element t contributes the step |B| − 1 at time t, every other
//! element contributes a −1 step.

use num::rational::BigRational;
use num::{One, Zero};

use crate::cumulants::CumulantSequence;
use crate::error::CombinatoricsError;

/// Hard cap on the length of exhaustive walk enumerations (Catalan growth).
pub const ENUMERATION_CAP: u32 = 14;

/// An excursion given by its steps (each ≥ −1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LukasiewiczWalk {
    steps: Vec<i32>,
}

impl LukasiewiczWalk {
    /// Validate that the steps form an excursion: partial sums stay ≥ 0 and
    /// the final sum is 0.
    pub fn new(steps: Vec<i32>) -> Option<Self> {
        let mut h: i64 = 0;
        for &s in &steps {
            if s < -1 {
                return None;
            }
            h += s as i64;
            if h < 0 {
                return None;
            }
        }
        (h == 0).then_some(LukasiewiczWalk { steps })
    }

    pub fn len(&self) -> u32 {
        self.steps.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[i32] {
        &self.steps
    }

    /// Heights after each step, prefixed with the starting height 0
    /// (length = len + 1).
    pub fn heights(&self) -> Vec<i64> {
        let mut hs = Vec::with_capacity(self.steps.len() + 1);
        let mut h = 0i64;
        hs.push(h);
        for &s in &self.steps {
            h += s as i64;
            hs.push(h);
        }
        hs
    }

    /// Times (1-based) of the down steps.
    pub fn down_times(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == -1)
            .map(|(i, _)| i + 1)
    }

    /// Product of kappa_{l+1} over the up steps of size l ≥ 0 (down steps
    /// contribute the factor 1).
    pub fn weight(&self, kappas: &CumulantSequence) -> Result<BigRational, CombinatoricsError> {
        let mut w = BigRational::one();
        for &s in &self.steps {
            if s >= 0 {
                let order = (s + 1) as u32;
                if order > kappas.max_order() {
                    return Err(CombinatoricsError::MissingCumulants {
                        needed: order,
                        available: kappas.max_order(),
                    });
                }
                if kappas.kappa(order).is_zero() {
                    return Ok(BigRational::zero());
                }
                w *= kappas.kappa(order);
            }
        }
        Ok(w)
    }
}

/// Visit every excursion of length `m`. Errors beyond the enumeration cap.
pub fn for_each_excursion<F: FnMut(&LukasiewiczWalk)>(
    m: u32,
    f: &mut F,
) -> Result<(), CombinatoricsError> {
    if m > ENUMERATION_CAP {
        return Err(CombinatoricsError::EnumerationTooLarge {
            m,
            cap: ENUMERATION_CAP,
        });
    }
    let mut steps: Vec<i32> = Vec::with_capacity(m as usize);
    dfs(0, m, &mut steps, f);
    Ok(())
}

fn dfs<F: FnMut(&LukasiewiczWalk)>(height: i64, remaining: u32, steps: &mut Vec<i32>, f: &mut F) {
    if remaining == 0 {
        if height == 0 {
            let walk = LukasiewiczWalk {
                steps: steps.clone(),
            };
            f(&walk);
        }
        return;
    }
    // Any suffix must be able to descend back to 0: height ≤ remaining.
    let min_step = if height > 0 { -1 } else { 0 };
    let max_step = remaining as i64 - 1 - height;
    let mut s = min_step;
    while s as i64 <= max_step {
        steps.push(s);
        dfs(height + s as i64, remaining - 1, steps, f);
        steps.pop();
        s += 1;
    }
}

/// The walk associated to a non-crossing partition (canonical blocks).
pub fn walk_from_partition(blocks: &[Vec<u32>], m: u32) -> LukasiewiczWalk {
    let mut steps = vec![-1i32; m as usize];
    for block in blocks {
        steps[block[0] as usize] = block.len() as i32 - 1;
    }
    LukasiewiczWalk { steps }
}

/// The non-crossing partition associated to a walk: an up step of size l at
/// time t opens a block expecting l further elements; each −1 step joins the
/// innermost open block.
pub fn partition_from_walk(walk: &LukasiewiczWalk) -> Vec<Vec<u32>> {
    let mut finished: Vec<Vec<u32>> = Vec::new();
    // Stack of (block, pending down steps it still absorbs).
    let mut open: Vec<(Vec<u32>, i32)> = Vec::new();
    for (t, &s) in walk.steps().iter().enumerate() {
        if s >= 0 {
            if s == 0 {
                finished.push(vec![t as u32]);
            } else {
                open.push((vec![t as u32], s));
            }
        } else {
            let (mut block, pending) = open.pop().expect("excursion stays nonnegative");
            block.push(t as u32);
            if pending > 1 {
                open.push((block, pending - 1));
            } else {
                finished.push(block);
            }
        }
    }
    debug_assert!(open.is_empty());
    finished.sort_by_key(|b| b[0]);
    finished
}

/// Moment of order m as the weighted count of excursions (the walk-sum
/// route).
pub fn moment_walk_sum(
    kappas: &CumulantSequence,
    m: u32,
) -> Result<BigRational, CombinatoricsError> {
    let mut total = BigRational::zero();
    let mut err: Option<CombinatoricsError> = None;
    for_each_excursion(m, &mut |walk| {
        if err.is_some() {
            return;
        }
        match walk.weight(kappas) {
            Ok(w) => total += w,
            Err(e) => err = Some(e),
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{catalan, int};
    use crate::ncpart::for_each_noncrossing;
    use num::BigInt;

    #[test]
    fn excursion_counts_are_catalan() {
        for m in 0..=9 {
            let mut count = 0u64;
            for_each_excursion(m, &mut |_| count += 1).unwrap();
            assert_eq!(BigInt::from(count), catalan(m as u64), "m = {m}");
        }
    }

    #[test]
    fn enumeration_cap_enforced() {
        let err = for_each_excursion(15, &mut |_| {}).unwrap_err();
        assert!(matches!(
            err,
            CombinatoricsError::EnumerationTooLarge { m: 15, cap: 14 }
        ));
    }

    #[test]
    fn bijection_round_trips_both_ways() {
        for m in 1..=8u32 {
            // partition -> walk -> partition
            for_each_noncrossing(m, &mut |blocks| {
                let walk = walk_from_partition(blocks, m);
                assert!(LukasiewiczWalk::new(walk.steps().to_vec()).is_some());
                assert_eq!(partition_from_walk(&walk), blocks.to_vec());
            });
            // walk -> partition -> walk
            for_each_excursion(m, &mut |walk| {
                let blocks = partition_from_walk(walk);
                assert_eq!(&walk_from_partition(&blocks, m), walk);
            })
            .unwrap();
        }
    }

    #[test]
    fn bijection_preserves_block_sizes_as_up_steps() {
        for_each_noncrossing(6, &mut |blocks| {
            let walk = walk_from_partition(blocks, 6);
            let mut sizes: Vec<i32> = blocks.iter().map(|b| b.len() as i32 - 1).collect();
            let mut ups: Vec<i32> = walk.steps().iter().copied().filter(|&s| s >= 0).collect();
            sizes.sort_unstable();
            ups.sort_unstable();
            assert_eq!(sizes, ups);
        });
    }

    #[test]
    fn weight_of_single_walk() {
        // Walk (+2, -1, -1) has weight kappa_3.
        let kappas = CumulantSequence::from_values(vec![int(5), int(7), int(11)]);
        let walk = LukasiewiczWalk::new(vec![2, -1, -1]).unwrap();
        assert_eq!(walk.weight(&kappas).unwrap(), int(11));
    }

    #[test]
    fn missing_cumulants_reported() {
        let kappas = CumulantSequence::from_values(vec![int(1)]);
        let walk = LukasiewiczWalk::new(vec![1, -1]).unwrap();
        assert!(matches!(
            walk.weight(&kappas),
            Err(CombinatoricsError::MissingCumulants {
                needed: 2,
                available: 1
            })
        ));
    }
}
