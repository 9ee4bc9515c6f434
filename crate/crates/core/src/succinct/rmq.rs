use super::{directory_model_bits, Size};
use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};

/// Range-minimum index that never reads the source array after build.
///
/// Answers come from Cartesian-tree depths: the leftmost minimum of a range
/// is its unique shallowest position. In-block queries use per-position
/// stack masks, cross-block queries a sparse table over block answers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangeMinIndex {
    depth: Vec<u32>,
    masks: Vec<u64>,
    /// `table[k][b]`: answer over blocks `b..b + 2^k`.
    table: Vec<Vec<u32>>,
}

impl RangeMinIndex {
    pub fn build<T: Ord>(values: &[T]) -> Self {
        let m = values.len();
        let mut depth = vec![0u32; m];
        let mut stack: Vec<usize> = Vec::new();
        // Cartesian tree by parent links; equal values hang to the right.
        let mut parent = vec![usize::MAX; m];
        for i in 0..m {
            let mut last = usize::MAX;
            while let Some(&top) = stack.last() {
                if values[top] > values[i] {
                    last = stack.pop().unwrap();
                } else {
                    break;
                }
            }
            if last != usize::MAX {
                parent[last] = i;
            }
            if let Some(&top) = stack.last() {
                parent[i] = top;
            }
            stack.push(i);
        }
        // Parents may come later in the array, so resolve depths by memo.
        let mut done = vec![false; m];
        let mut path = Vec::new();
        for i in 0..m {
            let mut v = i;
            while !done[v] && parent[v] != usize::MAX {
                path.push(v);
                v = parent[v];
            }
            if !done[v] {
                depth[v] = 0;
                done[v] = true;
            }
            while let Some(u) = path.pop() {
                depth[u] = depth[parent[u]] + 1;
                done[u] = true;
            }
        }
        let mut masks = vec![0u64; m];
        for start in (0..m).step_by(64) {
            let mut stack: Vec<usize> = Vec::new();
            let mut cur = 0u64;
            for i in start..(start + 64).min(m) {
                while let Some(&top) = stack.last() {
                    if values[top] > values[i] {
                        stack.pop();
                        cur &= !(1 << (top - start));
                    } else {
                        break;
                    }
                }
                stack.push(i);
                cur |= 1 << (i - start);
                masks[i] = cur;
            }
        }
        let mut out = Self { depth, masks, table: Vec::new() };
        out.build_table();
        out
    }

    fn build_table(&mut self) {
        let m = self.depth.len();
        let blocks = m.div_ceil(64);
        let mut level: Vec<u32> = (0..blocks).map(|b| self.in_block(b * 64, ((b + 1) * 64).min(m) - 1) as u32).collect();
        let mut table = Vec::new();
        let mut span = 1;
        while !level.is_empty() {
            let next: Vec<u32> = if level.len() > span {
                (0..level.len() - span).map(|b| self.better(level[b] as usize, level[b + span] as usize) as u32).collect()
            } else {
                Vec::new()
            };
            table.push(level);
            level = next;
            span *= 2;
        }
        self.table = table;
    }

    pub fn len(&self) -> usize {
        self.depth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.depth.is_empty()
    }

    #[inline]
    fn better(&self, a: usize, b: usize) -> usize {
        if self.depth[b] < self.depth[a] {
            b
        } else {
            a
        }
    }

    #[inline]
    fn in_block(&self, a: usize, b: usize) -> usize {
        let start = b & !63;
        let m = self.masks[b] & (!0u64 << (a - start));
        start + m.trailing_zeros() as usize
    }

    /// 0-based leftmost argmin over `a..=b`.
    #[inline]
    pub fn argmin(&self, a: usize, b: usize) -> usize {
        debug_assert!(a <= b && b < self.depth.len());
        let (ba, bb) = (a / 64, b / 64);
        if ba == bb {
            return self.in_block(a, b);
        }
        let mut best = self.in_block(a, ba * 64 + 63);
        if bb > ba + 1 {
            let (lo, hi) = (ba + 1, bb - 1);
            let k = (usize::BITS - 1 - (hi - lo + 1).leading_zeros()) as usize;
            let x = self.table[k][lo] as usize;
            let y = self.table[k][hi + 1 - (1 << k)] as usize;
            best = self.better(best, self.better(x, y));
        }
        self.better(best, self.in_block(bb * 64, b))
    }

    /// 1-based query over `a..=b`.
    pub fn query(&self, a: usize, b: usize) -> Result<usize> {
        if a == 0 || a > b || b > self.depth.len() {
            return Err(Error::InvalidRange { lo: a, hi: b });
        }
        Ok(self.argmin(a - 1, b - 1) + 1)
    }

    /// Model: a 2m-bit tree shape with its navigation directories.
    pub fn size(&self) -> Size {
        let m = self.depth.len() as u64;
        let table: u64 = self.table.iter().map(|l| 32 * l.len() as u64).sum();
        Size::new(32 * m + 64 * m + table, 2 * m + 2 * directory_model_bits(2 * m))
    }

    pub fn encode(&self, w: &mut Writer) {
        w.u32s(&self.depth);
        w.u64s(&self.masks);
    }

    pub fn decode(r: &mut Reader) -> Result<Self> {
        let depth = r.u32s()?;
        let masks = r.u64s()?;
        if depth.len() != masks.len() {
            return Err(Error::Format("range-min arrays disagree".into()));
        }
        for (i, &mk) in masks.iter().enumerate() {
            if mk >> (i % 64) >> 1 != 0 || mk >> (i % 64) & 1 == 0 {
                return Err(Error::Format("range-min mask malformed".into()));
            }
        }
        let mut out = Self { depth, masks, table: Vec::new() };
        out.build_table();
        Ok(out)
    }
}
