//! Non-crossing set partitions of {0, …, m−1}: streaming enumeration and a
//! crossing check.
//!
//! Enumeration walks positions left to right keeping a stack of open blocks.
//! At each position the element either opens a new block (pushed on the
//! stack) or joins an open block at some depth d, which permanently closes
//! every block above d — exactly the moves that keep the partition
//! non-crossing, and each partition arises from exactly one move sequence.

use num::BigInt;

use crate::exact::catalan;

/// Visit every non-crossing partition of {0, …, m−1}. Blocks are passed in
/// canonical order (sorted by least element, elements increasing). `m = 0`
/// yields the single empty partition.
pub fn for_each_noncrossing<F: FnMut(&[Vec<u32>])>(m: u32, f: &mut F) {
    let mut closed: Vec<Vec<u32>> = Vec::new();
    let mut open: Vec<Vec<u32>> = Vec::new();
    let mut scratch: Vec<Vec<u32>> = Vec::new();
    recurse(0, m, &mut closed, &mut open, &mut scratch, f);
}

fn recurse<F: FnMut(&[Vec<u32>])>(
    t: u32,
    m: u32,
    closed: &mut Vec<Vec<u32>>,
    open: &mut Vec<Vec<u32>>,
    scratch: &mut Vec<Vec<u32>>,
    f: &mut F,
) {
    if t == m {
        scratch.clear();
        scratch.extend(closed.iter().cloned());
        scratch.extend(open.iter().cloned());
        scratch.sort_by_key(|block| block[0]);
        f(scratch);
        return;
    }
    // Open a new block containing t.
    open.push(vec![t]);
    recurse(t + 1, m, closed, open, scratch, f);
    open.pop();
    // Join the open block at depth d, closing everything above it.
    for d in (0..open.len()).rev() {
        let reopened: Vec<Vec<u32>> = open.drain(d + 1..).collect();
        let closed_mark = closed.len();
        closed.extend(reopened);
        open[d].push(t);
        recurse(t + 1, m, closed, open, scratch, f);
        open[d].pop();
        let reopened: Vec<Vec<u32>> = closed.drain(closed_mark..).collect();
        open.extend(reopened);
    }
}

/// Check whether a partition (blocks with strictly increasing elements) is
/// non-crossing: no a < b < c < d with {a, c} in one block and {b, d} in
/// another. Two blocks cross exactly when one of them meets two different
/// regions cut out by the other (a gap between consecutive elements, or the
/// outside on either end).
pub fn is_noncrossing(blocks: &[Vec<u32>]) -> bool {
    fn crosses(b1: &[u32], b2: &[u32]) -> bool {
        let region = |y: u32| b1.partition_point(|&x| x < y);
        let first = region(b2[0]);
        b2.iter().any(|&y| region(y) != first)
    }
    for i in 0..blocks.len() {
        for j in (i + 1)..blocks.len() {
            if crosses(&blocks[i], &blocks[j]) {
                return false;
            }
        }
    }
    true
}

/// The number of non-crossing partitions of an m-set: Catalan(m).
pub fn count_noncrossing(m: u32) -> BigInt {
    catalan(m as u64)
}
