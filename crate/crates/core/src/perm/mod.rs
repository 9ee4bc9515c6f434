//! Permutations, patterns, query rectangles and test-input generators.

mod contains;
mod generate;
pub mod oracle;

pub use contains::contains;
pub use generate::{generate_avoiding, Family};

use crate::error::{Error, Result};
use std::fmt;

/// A permutation of `1..=n` in one-line notation.
///
/// `values()[i]` is `τ_{i+1}`. Row `v` of the matrix holds the point of
/// column `i` with `τ_i = v`; rows are ordered by increasing value.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    values: Vec<u32>,
}

impl Permutation {
    pub fn new(values: Vec<u32>) -> Result<Self> {
        check_bijection(&values)?;
        Ok(Self { values })
    }

    /// Builds from 0-based values (`values[i] ∈ 0..n`).
    pub fn from_zero_based(values: Vec<u32>) -> Result<Self> {
        Self::new(values.into_iter().map(|v| v + 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self { values: (1..=n as u32).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// `τ_i` for 1-based `i`.
    pub fn get(&self, i: usize) -> u32 {
        self.values[i - 1]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.values.len()];
        for (i, &v) in self.values.iter().enumerate() {
            inv[v as usize - 1] = i as u32 + 1;
        }
        Permutation { values: inv }
    }

    pub fn reversed(&self) -> Permutation {
        let mut values = self.values.clone();
        values.reverse();
        Permutation { values }
    }

    /// Parses the text format: `n` followed by the `n` values.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let n: usize = tokens.next().ok_or_else(|| Error::Parse("empty input".into()))?.parse().map_err(|e| Error::Parse(format!("bad length: {e}")))?;
        let values = tokens.map(|t| t.parse::<u32>().map_err(|e| Error::Parse(format!("bad value `{t}`: {e}")))).collect::<Result<Vec<_>>>()?;
        if values.len() != n {
            return Err(Error::Parse(format!("expected {n} values, found {}", values.len())));
        }
        Self::new(values)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.values.len());
        let body: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        s.push_str(&body.join(" "));
        s.push('\n');
        s
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.values.len() <= 32 {
            write!(f, "Permutation{:?}", self.values)
        } else {
            write!(f, "Permutation(n={})", self.values.len())
        }
    }
}

fn check_bijection(values: &[u32]) -> Result<()> {
    let n = values.len();
    if n == 0 {
        return Err(Error::NotAPermutation("empty".into()));
    }
    let mut seen = vec![false; n];
    for &v in values {
        let v = v as usize;
        if v == 0 || v > n {
            return Err(Error::NotAPermutation(format!("value {v} outside 1..={n}")));
        }
        if std::mem::replace(&mut seen[v - 1], true) {
            return Err(Error::NotAPermutation(format!("value {v} repeated")));
        }
    }
    Ok(())
}

/// A pattern `π` of length `k`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Pattern {
    values: Vec<u32>,
}

impl Pattern {
    pub fn new(values: Vec<u32>) -> Result<Self> {
        check_bijection(&values)?;
        Ok(Self { values })
    }

    /// Parses compact digit notation such as `231`, or a comma list.
    pub fn parse(s: &str) -> Result<Self> {
        let values = if s.contains(',') {
            s.split(',').map(|t| t.trim().parse::<u32>().map_err(|e| Error::Parse(e.to_string()))).collect::<Result<Vec<_>>>()?
        } else {
            s.chars().map(|c| c.to_digit(10).ok_or_else(|| Error::Parse(format!("bad digit `{c}`")))).collect::<Result<Vec<_>>>()?
        };
        Self::new(values)
    }

    /// `k…1`.
    pub fn decreasing(k: usize) -> Self {
        Self { values: (1..=k as u32).rev().collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn reversed(&self) -> Pattern {
        let mut values = self.values.clone();
        values.reverse();
        Pattern { values }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.values.len() > 9 { "," } else { "" };
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(sep))
    }
}

/// Inclusive rectangle: rows are values, columns are indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct QueryRect {
    pub row_lo: usize,
    pub row_hi: usize,
    pub col_lo: usize,
    pub col_hi: usize,
}

impl QueryRect {
    pub fn new(row_lo: usize, row_hi: usize, col_lo: usize, col_hi: usize) -> Self {
        Self { row_lo, row_hi, col_lo, col_hi }
    }

    pub fn full(n: usize) -> Self {
        Self::new(1, n, 1, n)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        for x in [self.row_lo, self.row_hi, self.col_lo, self.col_hi] {
            if x == 0 || x > n {
                return Err(Error::OutOfRange { index: x, n });
            }
        }
        if self.row_lo > self.row_hi {
            return Err(Error::InvalidRange { lo: self.row_lo, hi: self.row_hi });
        }
        if self.col_lo > self.col_hi {
            return Err(Error::InvalidRange { lo: self.col_lo, hi: self.col_hi });
        }
        Ok(())
    }

    pub fn contains(&self, col: usize, value: usize) -> bool {
        (self.col_lo..=self.col_hi).contains(&col) && (self.row_lo..=self.row_hi).contains(&value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
        assert!(Permutation::new(vec![]).is_err());
        assert!(Permutation::new(vec![2, 3, 1]).is_ok());
    }

    #[test]
    fn text_round_trip() {
        let p = Permutation::new(vec![3, 1, 2]).unwrap();
        assert_eq!(Permutation::parse(&p.to_text()).unwrap(), p);
        assert!(Permutation::parse("3\n1 2").is_err());
    }

    #[test]
    fn inverse_composes() {
        let p = Permutation::new(vec![4, 1, 3, 2]).unwrap();
        let q = p.inverse();
        for i in 1..=4 {
            assert_eq!(q.get(p.get(i) as usize) as usize, i);
        }
    }

    #[test]
    fn pattern_parse() {
        assert_eq!(Pattern::parse("231").unwrap().values(), &[2, 3, 1]);
        assert_eq!(Pattern::parse("2,1").unwrap().values(), &[2, 1]);
        assert!(Pattern::parse("22").is_err());
    }
}
