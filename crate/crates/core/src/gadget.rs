//! Gadget matrices for embedding disjointness into row distinctness.
//!
//! `M1_k = B_k F1_k` and `M0_k = B_k F0_k`, where `B_k` enumerates all of
//! `{0,1}^k`. The columns of `F1_k` are `e_1, ..., e_{k-1}` followed by
//! `e_1 + ... + e_{k-1}`, so `F1_k` has rank `k - 1` and every row of `M1_k`
//! appears exactly twice. `F0_k` is the all-ones lower triangle. Swapping any
//! nonempty set of columns of `F1_k` for those of `F0_k` gives a full-rank
//! matrix, which is what makes the mixed matrices `M_k(b)`, `b != 1`, row
//! distinct.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{enumeration_matrix, Gf2Matrix};

/// Largest `k` accepted by [`gadget_matrices`].
pub const GADGET_CAP: usize = 16;
/// Largest `k` accepted by [`verify_gadget`].
pub const VERIFY_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetPair {
    pub k: usize,
    pub m0: Gf2Matrix,
    pub m1: Gf2Matrix,
    pub f0: Gf2Matrix,
    pub f1: Gf2Matrix,
}

pub fn f1_matrix(k: usize) -> Gf2Matrix {
    let mut f = Gf2Matrix::zeros(k, k);
    for i in 0..k.saturating_sub(1) {
        f.set(i, i, true);
        f.set(i, k - 1, true);
    }
    f
}

pub fn f0_matrix(k: usize) -> Gf2Matrix {
    let mut f = Gf2Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..=i {
            f.set(i, j, true);
        }
    }
    f
}

pub fn gadget_matrices(k: usize) -> Result<GadgetPair> {
    if k == 0 || k > GADGET_CAP {
        return Err(Error::OutOfRange(format!("gadget needs 1 <= k <= {GADGET_CAP}, got {k}")));
    }
    let b = enumeration_matrix(k)?;
    let f0 = f0_matrix(k);
    let f1 = f1_matrix(k);
    Ok(GadgetPair {
        k,
        m0: b.mul(&f0)?,
        m1: b.mul(&f1)?,
        f0,
        f1,
    })
}

impl GadgetPair {
    /// `M_k(b)`: column `i` from `m1` when `b[i]` is set, from `m0` otherwise.
    pub fn mix(&self, b: &[bool]) -> Result<Gf2Matrix> {
        if b.len() != self.k {
            return Err(Error::DimensionMismatch(format!(
                "selector has length {}, gadget has k = {}",
                b.len(),
                self.k
            )));
        }
        let mut out = self.m0.clone();
        for (i, &bit) in b.iter().enumerate() {
            if bit {
                out.copy_column_from(i, &self.m1, i)?;
            }
        }
        Ok(out)
    }

    /// Column `col` of `M_k(b)` when `b[col] == bit`; depends on nothing else.
    pub fn column(&self, col: usize, bit: bool) -> Vec<bool> {
        if bit {
            self.m1.col_bits(col)
        } else {
            self.m0.col_bits(col)
        }
    }
}

/// Free-function form of [`GadgetPair::mix`].
pub fn mix(pair: &GadgetPair, b: &[bool]) -> Result<Gf2Matrix> {
    pair.mix(b)
}

/// `F^S_k`: columns listed in `s` (0-based) come from `F0_k`, the rest from `F1_k`.
pub fn column_replacement(k: usize, s: &[usize]) -> Result<Gf2Matrix> {
    let f0 = f0_matrix(k);
    let mut out = f1_matrix(k);
    for &c in s {
        if c >= k {
            return Err(Error::OutOfRange(format!("column {c} not in [0, {k})")));
        }
        out.copy_column_from(c, &f0, c)?;
    }
    Ok(out)
}

pub fn column_replacement_rank(k: usize, s: &[usize]) -> Result<usize> {
    Ok(column_replacement(k, s)?.rank())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GadgetReport {
    pub k: usize,
    pub property1_ok: bool,
    pub property2_ok: bool,
    pub pair_count: u64,
    /// First selector `b != 1` (as a 0/1 string) whose mix has a repeated row.
    pub failing_b: Option<String>,
}

/// Number of unordered pairs of identical rows, and whether every row value
/// occurs exactly twice.
fn duplicate_profile(m: &Gf2Matrix) -> (u64, bool) {
    let mut counts: HashMap<&[u64], u64> = HashMap::new();
    for r in 0..m.rows() {
        *counts.entry(m.row_words(r)).or_default() += 1;
    }
    let pairs = counts.values().map(|&c| c * (c - 1) / 2).sum();
    let all_twice = counts.values().all(|&c| c == 2);
    (pairs, all_twice)
}

/// Exhaustively checks both gadget properties for one `k`.
pub fn verify_gadget(k: usize) -> Result<GadgetReport> {
    if k == 0 || k > VERIFY_CAP {
        return Err(Error::OutOfRange(format!("verify needs 1 <= k <= {VERIFY_CAP}, got {k}")));
    }
    let pair = gadget_matrices(k)?;
    let (pair_count, all_twice) = duplicate_profile(&pair.m1);
    let property1_ok = all_twice && pair_count == 1u64 << (k - 1);

    let all_ones = (1u64 << k) - 1;
    let mut failing_b = None;
    for mask in 0..all_ones {
        let b: Vec<bool> = (0..k).map(|i| (mask >> (k - 1 - i)) & 1 == 1).collect();
        let mixed = pair.mix(&b)?;
        if mixed.distinct_rows() != mixed.rows() {
            failing_b = Some(b.iter().map(|&x| if x { '1' } else { '0' }).collect());
            break;
        }
    }
    Ok(GadgetReport {
        k,
        property1_ok,
        property2_ok: failing_b.is_none(),
        pair_count,
        failing_b,
    })
}
