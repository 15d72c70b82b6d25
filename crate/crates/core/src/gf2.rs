//! Bit-packed dense matrices over GF(2).
//!
//! Rows are stored as runs of `u64` words, column `c` living in bit `c % 64`
//! of word `c / 64`. Bits past `cols` in the last word of a row are always
//! zero, so derived equality compares matrices entrywise.
//!
//! Binary strings use MSB-first order throughout the crate: in
//! [`enumeration_matrix`], column 0 of row `j` holds the most significant bit
//! of `j`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest `k` accepted by [`enumeration_matrix`].
pub const ENUMERATION_CAP: usize = 24;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

fn words_for(cols: usize) -> usize {
    cols.div_ceil(64)
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = words_for(cols);
        Gf2Matrix {
            rows,
            cols,
            words_per_row,
            bits: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of booleans. All rows must have equal length.
    pub fn from_rows<R: AsRef<[bool]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (j, &b) in row.iter().enumerate() {
                m.set(i, j, b);
            }
        }
        Ok(m)
    }

    /// Builds a matrix from `0`/`1` strings, e.g. `["101", "011"]`.
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|s| parse_bits(s))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(&parsed)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of bounds");
        let w = self.bits[r * self.words_per_row + c / 64];
        (w >> (c % 64)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of bounds");
        let w = &mut self.bits[r * self.words_per_row + c / 64];
        let mask = 1u64 << (c % 64);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    /// Packed words of row `r`.
    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    pub fn row_bits(&self, r: usize) -> Vec<bool> {
        (0..self.cols).map(|c| self.get(r, c)).collect()
    }

    pub fn col_bits(&self, c: usize) -> Vec<bool> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// Row `r` read as an MSB-first integer. Requires `cols <= 64`.
    pub fn row_value(&self, r: usize) -> u64 {
        assert!(self.cols <= 64, "row_value needs at most 64 columns");
        (0..self.cols).fold(0u64, |acc, c| (acc << 1) | self.get(r, c) as u64)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &Gf2Matrix) -> Result<Gf2Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        let wpr = out.words_per_row;
        for r in 0..self.rows {
            let acc = &mut out.bits[r * wpr..(r + 1) * wpr];
            for k in 0..self.cols {
                if self.get(r, k) {
                    for (a, b) in acc.iter_mut().zip(other.row_words(k)) {
                        *a ^= *b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Rank over GF(2), by Gaussian elimination on the packed rows.
    pub fn rank(&self) -> usize {
        let wpr = self.words_per_row;
        let mut rows: Vec<Vec<u64>> = (0..self.rows).map(|r| self.row_words(r).to_vec()).collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let (w, mask) = (c / 64, 1u64 << (c % 64));
            let Some(pivot) = (rank..rows.len()).find(|&i| rows[i][w] & mask != 0) else {
                continue;
            };
            rows.swap(rank, pivot);
            let pivot_row = rows[rank].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != rank && row[w] & mask != 0 {
                    for x in 0..wpr {
                        row[x] ^= pivot_row[x];
                    }
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Number of distinct rows.
    pub fn distinct_rows(&self) -> usize {
        let mut seen: Vec<&[u64]> = (0..self.rows).map(|r| self.row_words(r)).collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    /// Copies column `src_col` of `src` into column `dst_col` of `self`.
    pub fn copy_column_from(&mut self, dst_col: usize, src: &Gf2Matrix, src_col: usize) -> Result<()> {
        if src.rows != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "column source has {} rows, target has {}",
                src.rows, self.rows
            )));
        }
        for r in 0..self.rows {
            self.set(r, dst_col, src.get(r, src_col));
        }
        Ok(())
    }

    /// Serialises to the text format: `"rows cols"` then one 0/1 string per row.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::MatrixFormat("missing header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::MatrixFormat(format!("bad header {header:?}: {e}")))?;
        let [rows, cols] = dims[..] else {
            return Err(Error::MatrixFormat(format!("bad header {header:?}")));
        };
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| Error::MatrixFormat(format!("missing row {r}")))?
                .trim();
            let bits = parse_bits(line)?;
            if bits.len() != cols {
                return Err(Error::MatrixFormat(format!(
                    "row {r} has {} entries, expected {cols}",
                    bits.len()
                )));
            }
            for (c, b) in bits.into_iter().enumerate() {
                m.set(r, c, b);
            }
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(Error::MatrixFormat("trailing rows".into()));
        }
        Ok(m)
    }
}

fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|ch| match ch {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::MatrixFormat(format!("unexpected character {other:?}"))),
        })
        .collect()
}

impl fmt::Display for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                f.write_str(if self.get(r, c) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Matrix(")?;
        fmt::Display::fmt(self, f)?;
        write!(f, ")")
    }
}

impl FromStr for Gf2Matrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_text(s)
    }
}

/// `bin_k(j)` as an MSB-first bit vector.
pub fn bin(k: usize, j: u64) -> Vec<bool> {
    (0..k).map(|c| (j >> (k - 1 - c)) & 1 == 1).collect()
}

/// The `2^k x k` matrix whose row `j` is `bin_k(j)`.
pub fn enumeration_matrix(k: usize) -> Result<Gf2Matrix> {
    if k == 0 || k > ENUMERATION_CAP {
        return Err(Error::OutOfRange(format!(
            "enumeration matrix needs 1 <= k <= {ENUMERATION_CAP}, got {k}"
        )));
    }
    let mut m = Gf2Matrix::zeros(1 << k, k);
    for j in 0..(1usize << k) {
        for c in 0..k {
            if (j >> (k - 1 - c)) & 1 == 1 {
                m.set(j, c, true);
            }
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_neutral() {
        let f = Gf2Matrix::from_strs(&["100", "110", "111"]).unwrap();
        assert_eq!(Gf2Matrix::identity(3).mul(&f).unwrap(), f);
    }

    #[test]
    fn enumeration_times_gadget_factors() {
        let b2 = enumeration_matrix(2).unwrap();
        let f1 = Gf2Matrix::from_strs(&["11", "00"]).unwrap();
        let f0 = Gf2Matrix::from_strs(&["10", "11"]).unwrap();
        assert_eq!(
            b2.mul(&f1).unwrap(),
            Gf2Matrix::from_strs(&["00", "00", "11", "11"]).unwrap()
        );
        assert_eq!(
            b2.mul(&f0).unwrap(),
            Gf2Matrix::from_strs(&["00", "11", "10", "01"]).unwrap()
        );
    }

    #[test]
    fn mul_rejects_mismatch() {
        let a = Gf2Matrix::zeros(2, 3);
        assert!(matches!(a.mul(&a), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Gf2Matrix::zeros(3, 3).rank(), 0);
        for k in 1..=10 {
            let mut lower = Gf2Matrix::zeros(k, k);
            for i in 0..k {
                for j in 0..=i {
                    lower.set(i, j, true);
                }
            }
            assert_eq!(lower.rank(), k);
        }
        // e1, e1 (k = 2) and e1, e2, e1+e2 (k = 3)
        assert_eq!(Gf2Matrix::from_strs(&["11", "00"]).unwrap().rank(), 1);
        assert_eq!(Gf2Matrix::from_strs(&["101", "011", "000"]).unwrap().rank(), 2);
    }

    #[test]
    fn rank_wide_matrix_spans_words() {
        let mut m = Gf2Matrix::zeros(3, 130);
        m.set(0, 0, true);
        m.set(1, 70, true);
        m.set(2, 129, true);
        m.set(2, 0, true);
        assert_eq!(m.rank(), 3);
        assert_eq!(m.transpose().rank(), 3);
    }

    #[test]
    fn enumeration_rows() {
        assert_eq!(enumeration_matrix(1).unwrap(), Gf2Matrix::from_strs(&["0", "1"]).unwrap());
        assert_eq!(
            enumeration_matrix(2).unwrap(),
            Gf2Matrix::from_strs(&["00", "01", "10", "11"]).unwrap()
        );
        let b3 = enumeration_matrix(3).unwrap();
        assert_eq!(b3.row_bits(5), vec![true, false, true]);
        assert_eq!(b3.row_value(5), 5);
        assert!(enumeration_matrix(0).is_err());
        assert!(enumeration_matrix(ENUMERATION_CAP + 1).is_err());
    }

    #[test]
    fn text_round_trip() {
        let m = Gf2Matrix::from_strs(&["101", "011"]).unwrap();
        let text = m.to_text();
        assert_eq!(text, "2 3\n101\n011\n");
        assert_eq!(Gf2Matrix::from_text(&text).unwrap(), m);
        assert!(Gf2Matrix::from_text("2 3\n101\n").is_err());
        assert!(Gf2Matrix::from_text("1 2\n1x\n").is_err());
        assert_eq!(Gf2Matrix::from_text("0 0\n").unwrap(), Gf2Matrix::zeros(0, 0));
    }

    #[test]
    fn set_clears_bits() {
        let mut m = Gf2Matrix::zeros(1, 3);
        m.set(0, 1, true);
        m.set(0, 1, false);
        assert_eq!(m, Gf2Matrix::zeros(1, 3));
    }
}
