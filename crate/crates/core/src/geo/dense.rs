//! Per-strip tables of the dense hierarchy.
//!
//! A node is a strip at level `k-1`. Its children (substrips at level `k`)
//! are indexed by `i`. Across the strip, the level-`k` strips that meet a
//! non-empty level-`(k-1)` cell are laid out one after another: position
//! `off[c] + j` is the `j`-th substrip of the `c`-th non-empty cell.

use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};
use crate::succinct::bits_for;

pub const EMPTY: u32 = u32::MAX;

/// How rectangle minima are tabulated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// Any substrip range, any position range: minimum is the first
    /// non-empty position.
    Col,
    /// Any substrip range, whole cells only: minimum is the first
    /// non-empty substrip.
    Row,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseNode {
    pub q: u32,
    pub cells: u32,
    pub v: u32,
    pub off: Vec<u16>,
    /// `ne[i·(v+1) + p]`: non-empty cells of substrip `i` before position `p`.
    pub ne: Vec<u16>,
    /// `cnt[i·(v+1) + p]`: points in substrips `< i` at positions `< p`.
    pub cnt: Vec<u32>,
    /// Per range pair, a bitset of positions (`Col`) or substrips (`Row`).
    pub first: Vec<u64>,
    /// Per range pair and bit: the substrip (`Col`) or position (`Row`)
    /// holding the minimum.
    pub best: Vec<u16>,
    /// Offset inside substrip `i` of the minimum of cell `(i, p)`.
    pub minoff: Vec<u32>,
}

#[inline]
pub fn pair(a: usize, b: usize) -> usize {
    debug_assert!(a < b);
    b * (b - 1) / 2 + a
}

fn words(len: usize) -> usize {
    len.div_ceil(64).max(1)
}

/// Lowest set bit in `lo..hi`.
fn first_in(bits: &[u64], lo: usize, hi: usize) -> Option<usize> {
    if lo >= hi {
        return None;
    }
    let mut w = lo / 64;
    let mut x = bits[w] & (!0u64 << (lo % 64));
    loop {
        if x != 0 {
            let p = w * 64 + x.trailing_zeros() as usize;
            return (p < hi).then_some(p);
        }
        w += 1;
        if w * 64 >= hi || w >= bits.len() {
            return None;
        }
        x = bits[w];
    }
}

/// Raw per-node input: substrip widths, cell sizes in positions and every
/// point as `(substrip, position, own offset, key)`; the smallest key wins.
pub struct NodeInput {
    pub q: usize,
    pub cell_sizes: Vec<usize>,
    pub points: Vec<(u32, u32, u32, u32)>,
}

impl DenseNode {
    pub fn build(kind: Kind, input: &NodeInput) -> Result<Self> {
        let q = input.q;
        let c_n = input.cell_sizes.len();
        let mut off = Vec::with_capacity(c_n + 1);
        let mut acc = 0usize;
        off.push(0u16);
        for &s in &input.cell_sizes {
            acc += s;
            off.push(u16::try_from(acc).map_err(|_| Error::Decomposition("dense node too tall".into()))?);
        }
        let v = acc;
        if q >= u16::MAX as usize {
            return Err(Error::Decomposition("dense node too wide".into()));
        }
        let s = v + 1;
        let mut key = vec![EMPTY; q * v];
        let mut minoff = vec![EMPTY; q * v];
        let mut cnt = vec![0u32; (q + 1) * s];
        for &(i, p, o, k) in &input.points {
            let (i, p) = (i as usize, p as usize);
            cnt[(i + 1) * s + p + 1] += 1;
            if k < key[i * v + p] {
                key[i * v + p] = k;
                minoff[i * v + p] = o;
            }
        }
        for i in 1..=q {
            for p in 1..s {
                cnt[i * s + p] += cnt[i * s + p - 1];
            }
            for p in 0..s {
                cnt[i * s + p] += cnt[(i - 1) * s + p];
            }
        }
        let mut ne = vec![0u16; q * s];
        for i in 0..q {
            for p in 0..v {
                ne[i * s + p + 1] = ne[i * s + p] + (key[i * v + p] != EMPTY) as u16;
            }
        }
        let (first, best) = match kind {
            Kind::Col => {
                let wd = words(v);
                let pairs = q * (q + 1) / 2;
                let mut first = vec![0u64; pairs * wd];
                let mut best = vec![0u16; pairs * v];
                for a in 0..q {
                    let mut run: Vec<(u32, u16)> = vec![(EMPTY, 0); v];
                    for b in a + 1..=q {
                        let i = b - 1;
                        for p in 0..v {
                            if key[i * v + p] < run[p].0 {
                                run[p] = (key[i * v + p], i as u16);
                            }
                        }
                        let id = pair(a, b);
                        for (p, &(k, sub)) in run.iter().enumerate() {
                            if k != EMPTY {
                                first[id * wd + p / 64] |= 1 << (p % 64);
                                best[id * v + p] = sub;
                            }
                        }
                    }
                }
                (first, best)
            }
            Kind::Row => {
                let wd = words(q);
                let pairs = c_n * (c_n + 1) / 2;
                let mut first = vec![0u64; pairs * wd];
                let mut best = vec![0u16; pairs * q];
                for a in 0..c_n {
                    let mut run: Vec<(u32, u16)> = vec![(EMPTY, 0); q];
                    for b in a + 1..=c_n {
                        for p in off[b - 1] as usize..off[b] as usize {
                            for (i, r) in run.iter_mut().enumerate() {
                                if key[i * v + p] < r.0 {
                                    *r = (key[i * v + p], p as u16);
                                }
                            }
                        }
                        let id = pair(a, b);
                        for (i, &(k, p)) in run.iter().enumerate() {
                            if k != EMPTY {
                                first[id * wd + i / 64] |= 1 << (i % 64);
                                best[id * q + i] = p;
                            }
                        }
                    }
                }
                (first, best)
            }
        };
        Ok(Self { q: q as u32, cells: c_n as u32, v: v as u32, off, ne, cnt, first, best, minoff })
    }

    #[inline]
    pub fn off(&self, c: usize) -> Option<usize> {
        self.off.get(c).map(|&x| x as usize)
    }

    #[inline]
    pub fn ne(&self, i: usize, p: usize) -> Option<usize> {
        if i >= self.q as usize || p > self.v as usize {
            return None;
        }
        Some(self.ne[i * (self.v as usize + 1) + p] as usize)
    }

    #[inline]
    pub fn non_empty(&self, i: usize, p: usize) -> Option<bool> {
        if p >= self.v as usize {
            return None;
        }
        Some(self.ne(i, p + 1)? > self.ne(i, p)?)
    }

    /// Points in substrips `i1..i2` at positions `p1..p2`.
    pub fn count(&self, i1: usize, i2: usize, p1: usize, p2: usize) -> Option<usize> {
        if i1 >= i2 || p1 >= p2 {
            return Some(0);
        }
        let s = self.v as usize + 1;
        if i2 > self.q as usize || p2 >= s {
            return None;
        }
        let f = |i: usize, p: usize| self.cnt[i * s + p] as usize;
        Some(f(i2, p2) + f(i1, p1) - f(i1, p2) - f(i2, p1))
    }

    /// Points in the whole strip.
    pub fn total(&self) -> usize {
        *self.cnt.last().unwrap_or(&0) as usize
    }

    /// `(substrip, own offset)` of the minimum over substrips `i1..i2` and
    /// positions `p1..p2`.
    pub fn min_col(&self, i1: usize, i2: usize, p1: usize, p2: usize) -> Option<(usize, usize)> {
        let (q, v) = (self.q as usize, self.v as usize);
        if i1 >= i2 || p1 >= p2 || i2 > q || p2 > v {
            return None;
        }
        let wd = words(v);
        let id = pair(i1, i2);
        let p = first_in(&self.first[id * wd..(id + 1) * wd], p1, p2)?;
        let i = self.best[id * v + p] as usize;
        Some((i, self.minoff[i * v + p] as usize))
    }

    /// `(substrip, own offset)` of the minimum over substrips `i1..i2` and
    /// whole cells `c1..c2`.
    pub fn min_row(&self, i1: usize, i2: usize, c1: usize, c2: usize) -> Option<(usize, usize)> {
        let (q, v) = (self.q as usize, self.v as usize);
        if i1 >= i2 || c1 >= c2 || i2 > q || c2 > self.cells as usize {
            return None;
        }
        let wd = words(q);
        let id = pair(c1, c2);
        let i = first_in(&self.first[id * wd..(id + 1) * wd], i1, i2)?;
        let p = self.best[id * q + i] as usize;
        Some((i, self.minoff[i * v + p] as usize))
    }

    /// Packed size of the tables; `own_width` bounds any own offset and
    /// `points` any count.
    pub fn model_bits(&self, kind: Kind, own_width: u64, points: u64) -> u64 {
        let (q, c, v) = (self.q as u64, self.cells as u64, self.v as u64);
        let wv = bits_for(v) as u64;
        let header = 2 * 16;
        let off = (c + 1) * wv;
        let ne = q * (v + 1) * wv;
        let cnt = (q + 1) * (v + 1) * bits_for(points) as u64;
        let minoff = q * v * bits_for(own_width) as u64;
        let minima = match kind {
            Kind::Col => q * (q + 1) / 2 * v * (1 + bits_for(q.saturating_sub(1)) as u64),
            Kind::Row => c * (c + 1) / 2 * q * (1 + wv),
        };
        header + off + ne + cnt + minoff + minima
    }

    pub fn physical_bits(&self) -> u64 {
        96 + 16 * (self.off.len() + self.ne.len() + self.best.len()) as u64 + 32 * (self.cnt.len() + self.minoff.len()) as u64 + 64 * self.first.len() as u64
    }

    pub fn encode(&self, w: &mut Writer) {
        w.u32(self.q);
        w.u32(self.cells);
        w.u32(self.v);
        w.u16s(&self.off);
        w.u16s(&self.ne);
        w.u32s(&self.cnt);
        w.u64s(&self.first);
        w.u16s(&self.best);
        w.u32s(&self.minoff);
    }

    pub fn decode(r: &mut Reader, kind: Kind) -> Result<Self> {
        let q = r.u32()?;
        let cells = r.u32()?;
        let v = r.u32()?;
        let node = Self { q, cells, v, off: r.u16s()?, ne: r.u16s()?, cnt: r.u32s()?, first: r.u64s()?, best: r.u16s()?, minoff: r.u32s()? };
        node.check_shape(kind)?;
        Ok(node)
    }

    /// Every cell of the point prefix table is non-negative.
    fn prefix_ok(&self) -> bool {
        let s = self.v as usize + 1;
        let f = |i: usize, p: usize| self.cnt[i * s + p] as i64;
        (0..s).all(|p| f(0, p) == 0)
            && (0..=self.q as usize).all(|i| f(i, 0) == 0)
            && (0..self.q as usize).all(|i| (0..self.v as usize).all(|p| f(i + 1, p + 1) - f(i, p + 1) - f(i + 1, p) + f(i, p) >= 0))
    }

    fn check_shape(&self, kind: Kind) -> Result<()> {
        let (q, c, v) = (self.q as usize, self.cells as usize, self.v as usize);
        let (pairs, len, wd) = match kind {
            Kind::Col => (q * (q + 1) / 2, v, words(v)),
            Kind::Row => (c * (c + 1) / 2, q, words(q)),
        };
        let ok = self.off.len() == c + 1
            && self.off.first() == Some(&0)
            && self.off.windows(2).all(|w| w[0] <= w[1])
            && self.off[c] as usize == v
            && self.ne.len() == q * (v + 1)
            && self.cnt.len() == (q + 1) * (v + 1)
            && self.first.len() == pairs * wd
            && self.best.len() == pairs * len
            && self.minoff.len() == q * v
            && self.ne.iter().all(|&x| x as usize <= v)
            && self.prefix_ok()
            && match kind {
                Kind::Col => self.best.iter().all(|&x| (x as usize) < q.max(1)),
                Kind::Row => self.best.iter().all(|&x| (x as usize) < v.max(1)),
            };
        if ok {
            Ok(())
        } else {
            Err(Error::Format("dense node tables have inconsistent shapes".into()))
        }
    }
}
