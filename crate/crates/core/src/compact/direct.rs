//! Plain-array index used when `n` is too small for the two-level layout.

use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};
use crate::succinct::{ceil_lg, RangeMinIndex};

#[derive(Clone, Debug)]
pub struct DirectIndex {
    values: Vec<u32>,
    inverse: Vec<u32>,
    rmq: RangeMinIndex,
    next: Vec<u32>,
}

impl DirectIndex {
    /// `values` is 0-based.
    pub fn build(values: Vec<u32>) -> Self {
        let n = values.len();
        let mut inverse = vec![0u32; n];
        for (i, &v) in values.iter().enumerate() {
            inverse[v as usize] = i as u32;
        }
        let rmq = RangeMinIndex::build(&values);
        let mut next = vec![n as u32; n];
        let mut stack: Vec<usize> = Vec::new();
        for i in (0..n).rev() {
            while stack.last().is_some_and(|&j| values[j] > values[i]) {
                stack.pop();
            }
            if let Some(&j) = stack.last() {
                next[i] = j as u32;
            }
            stack.push(i);
        }
        Self { values, inverse, rmq, next }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    #[inline]
    pub fn rank(&self, x: usize) -> usize {
        self.values[x] as usize
    }

    #[inline]
    pub fn unrank(&self, y: usize) -> usize {
        self.inverse[y] as usize
    }

    #[inline]
    pub fn range_min(&self, a: usize, b: usize) -> usize {
        self.rmq.argmin(a, b)
    }

    #[inline]
    pub fn next_smaller(&self, x: usize) -> Option<usize> {
        let j = self.next[x] as usize;
        (j < self.values.len()).then_some(j)
    }

    /// Bits of one packed array of `n` values.
    pub fn array_bits(&self) -> u64 {
        self.values.len() as u64 * ceil_lg(self.values.len() as u64) as u64
    }

    pub fn rmq(&self) -> &RangeMinIndex {
        &self.rmq
    }

    pub fn encode(&self, w: &mut Writer) {
        w.u32s(&self.values);
    }

    pub fn decode(r: &mut Reader) -> Result<Self> {
        let values = r.u32s()?;
        let n = values.len();
        let mut seen = vec![false; n];
        for &v in &values {
            if v as usize >= n || std::mem::replace(&mut seen[v as usize], true) {
                return Err(Error::Format("stored values are not a permutation".into()));
            }
        }
        Ok(Self::build(values))
    }
}
