//! Brute-force reference for the exterior product, independent of the
//! bitmask kernel: blades are sorted axis lists, signs come from counting
//! inversions of the concatenated list.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num::{BigRational, Zero};

pub type Dense = BTreeMap<Vec<usize>, BigRational>;

/// `e_a ∧ e_b = sign · e_{sorted(a ++ b)}`, or `None` when an axis repeats.
pub fn wedge_blades(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, i64)> {
    let mut word: Vec<usize> = a.iter().chain(b).copied().collect();
    let mut inversions = 0usize;
    for i in 0..word.len() {
        for j in i + 1..word.len() {
            if word[i] == word[j] {
                return None;
            }
            if word[i] > word[j] {
                inversions += 1;
            }
        }
    }
    word.sort_unstable();
    Some((word, if inversions.is_multiple_of(2) { 1 } else { -1 }))
}

pub fn wedge(x: &Dense, y: &Dense) -> Dense {
    let mut out = Dense::new();
    for (a, ca) in x {
        for (b, cb) in y {
            if let Some((c, s)) = wedge_blades(a, b) {
                let v = out.entry(c).or_insert_with(BigRational::zero);
                *v += ca * cb * BigRational::from_integer(s.into());
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// All `k`-subsets of `1..=n`, found by scanning every bitmask.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u64..(1 << n))
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (1..=n).filter(|a| m >> (a - 1) & 1 == 1).collect())
        .collect()
}
