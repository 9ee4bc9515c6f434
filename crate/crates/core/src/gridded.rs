//! Deduplicated gridded permutations with precomputed answers.
//!
//! A gridded permutation describes the points of one fine column (or row):
//! the offset of each point inside the strip and its cross rank, the rank
//! along the other axis. Cross ranks are grouped into consecutive non-zero
//! cells.

use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};
use crate::succinct::{bits_for, ceil_lg, Size};
use std::collections::HashMap;

pub const NONE: u16 = u16::MAX;

/// The points of one strip: `perm[k]` is the 0-based cross rank of offset
/// `k`, `cells` the number of points in each non-zero cell in cross order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GriddedPermutation {
    perm: Vec<u16>,
    cells: Vec<u16>,
}

impl GriddedPermutation {
    /// `perm` is 1-based: a permutation of `1..=w`.
    pub fn new(perm: &[u16], cells: &[u16]) -> Result<Self> {
        let w = perm.len();
        if w == 0 || w >= NONE as usize {
            return Err(Error::InvalidSizes(format!("width {w}")));
        }
        let mut seen = vec![false; w];
        for &p in perm {
            if p == 0 || p as usize > w || std::mem::replace(&mut seen[p as usize - 1], true) {
                return Err(Error::NotAPermutation(format!("{perm:?}")));
            }
        }
        if cells.contains(&0) || cells.iter().map(|&c| c as usize).sum::<usize>() != w {
            return Err(Error::InvalidSizes(format!("cell counts {cells:?} for width {w}")));
        }
        Ok(Self { perm: perm.iter().map(|p| p - 1).collect(), cells: cells.to_vec() })
    }

    pub(crate) fn from_zero_based(perm: Vec<u16>, cells: Vec<u16>) -> Self {
        debug_assert_eq!(cells.iter().map(|&c| c as usize).sum::<usize>(), perm.len());
        Self { perm, cells }
    }

    pub fn width(&self) -> usize {
        self.perm.len()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    fn encoding(&self) -> Vec<u16> {
        let mut key = Vec::with_capacity(2 + self.perm.len() + self.cells.len());
        key.push(self.perm.len() as u16);
        key.push(self.cells.len() as u16);
        key.extend_from_slice(&self.perm);
        key.extend_from_slice(&self.cells);
        key
    }
}

/// A point named by its non-zero cell (1-based) and the number of points of
/// the same cell with smaller cross rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellRef {
    pub c: usize,
    pub v: usize,
}

/// Rank bound inside a cell for [`Entry::rect_count_local`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellRank {
    /// Before the first point of the cell.
    Zero,
    /// The `j`-th point (1-based).
    At(usize),
    /// After the last point of the cell.
    Inf,
}

#[derive(Clone, Debug)]
pub struct Entry {
    w: usize,
    perm: Vec<u16>,
    inv: Vec<u16>,
    cell_of: Vec<u16>,
    cell_start: Vec<u16>,
    /// Rank of each offset among the offsets of its cell, by offset.
    rank_by_offset: Vec<u16>,
    /// Offsets grouped by cell (cells laid out as in `cell_start`), increasing.
    by_offset: Vec<u16>,
    range_min: Vec<u16>,
    next_smaller: Vec<u16>,
    row_next: Vec<u16>,
    prefix: Vec<u16>,
    cell_offset: Vec<u16>,
    /// Bitset of cross ranks held by offsets `< i`, for `i ∈ 0..=w`.
    cross_sets: Vec<u64>,
    /// Bitset of offsets whose cross rank is `< p`, for `p ∈ 0..=w`.
    offset_sets: Vec<u64>,
    words: usize,
}

impl Entry {
    fn build(gp: &GriddedPermutation) -> Self {
        let w = gp.perm.len();
        let k = gp.cells.len();
        let perm = gp.perm.clone();
        let mut inv = vec![0u16; w];
        for (i, &p) in perm.iter().enumerate() {
            inv[p as usize] = i as u16;
        }
        let mut cell_start = Vec::with_capacity(k + 1);
        let mut cell_of = Vec::with_capacity(w);
        let mut acc = 0u16;
        for (c, &cnt) in gp.cells.iter().enumerate() {
            cell_start.push(acc);
            cell_of.extend(std::iter::repeat_n(c as u16, cnt as usize));
            acc += cnt;
        }
        cell_start.push(acc);
        let mut rank_by_offset = vec![0u16; w];
        let mut by_offset = vec![0u16; w];
        let mut fill: Vec<u16> = cell_start[..k].to_vec();
        for (i, &p) in perm.iter().enumerate() {
            let c = cell_of[p as usize] as usize;
            rank_by_offset[i] = fill[c] - cell_start[c];
            by_offset[fill[c] as usize] = i as u16;
            fill[c] += 1;
        }

        let mut range_min = vec![NONE; w * w];
        for a in 0..w {
            let mut best = a;
            for b in a..w {
                if perm[b] < perm[best] {
                    best = b;
                }
                range_min[a * w + b] = best as u16;
            }
        }
        let mut next_smaller = vec![NONE; w];
        let mut stack: Vec<usize> = Vec::new();
        for i in 0..w {
            while let Some(&t) = stack.last() {
                if perm[i] < perm[t] {
                    next_smaller[t] = i as u16;
                    stack.pop();
                } else {
                    break;
                }
            }
            stack.push(i);
        }
        let mut row_next = vec![NONE; w];
        for r in 0..w {
            let mut best: Option<usize> = None;
            for r2 in 0..r {
                if perm[r2] > perm[r] && best.is_none_or(|b| perm[r2] < perm[b]) {
                    best = Some(r2);
                }
            }
            if let Some(b) = best {
                row_next[r] = b as u16;
            }
        }
        let mut prefix = vec![0u16; (w + 1) * (w + 1)];
        for i in 0..w {
            for p in 0..=w {
                prefix[(i + 1) * (w + 1) + p] = prefix[i * (w + 1) + p] + ((perm[i] as usize) < p) as u16;
            }
        }
        let mut cell_offset = vec![0u16; (w + 1) * k];
        for i in 0..w {
            for c in 0..k {
                cell_offset[(i + 1) * k + c] = cell_offset[i * k + c] + (cell_of[perm[i] as usize] as usize == c) as u16;
            }
        }
        let words = w.div_ceil(64);
        let mut cross_sets = vec![0u64; (w + 1) * words];
        let mut offset_sets = vec![0u64; (w + 1) * words];
        for i in 0..w {
            let (done, rest) = cross_sets.split_at_mut((i + 1) * words);
            rest[..words].copy_from_slice(&done[i * words..]);
            let p = perm[i] as usize;
            rest[p / 64] |= 1 << (p % 64);
        }
        for p in 0..w {
            let (done, rest) = offset_sets.split_at_mut((p + 1) * words);
            rest[..words].copy_from_slice(&done[p * words..]);
            let i = inv[p] as usize;
            rest[i / 64] |= 1 << (i % 64);
        }
        Self {
            w,
            perm,
            inv,
            cell_of,
            cell_start,
            rank_by_offset,
            by_offset,
            range_min,
            next_smaller,
            row_next,
            prefix,
            cell_offset,
            cross_sets,
            offset_sets,
            words,
        }
    }

    pub fn width(&self) -> usize {
        self.w
    }

    pub fn cell_count(&self) -> usize {
        self.cell_start.len() - 1
    }

    /// Points in cell `c` (0-based).
    pub fn cell_size(&self, c: usize) -> usize {
        (self.cell_start[c + 1] - self.cell_start[c]) as usize
    }

    /// First cross rank of cell `c` (0-based, `c ≤ cells`).
    #[inline]
    pub fn cell_start(&self, c: usize) -> usize {
        self.cell_start[c] as usize
    }

    #[inline]
    pub fn cross(&self, k: usize) -> usize {
        self.perm[k] as usize
    }

    #[inline]
    pub fn offset_of_cross(&self, p: usize) -> usize {
        self.inv[p] as usize
    }

    /// 0-based `(cell, rank in cell)` of offset `k`.
    #[inline]
    pub fn locate(&self, k: usize) -> (usize, usize) {
        let p = self.perm[k] as usize;
        let c = self.cell_of[p] as usize;
        (c, p - self.cell_start[c] as usize)
    }

    /// Offset of the `v`-th point of cell `c`, both 0-based.
    #[inline]
    pub fn offset_at(&self, c: usize, v: usize) -> usize {
        self.inv[self.cell_start[c] as usize + v] as usize
    }

    /// Like [`Entry::locate`] but ranks inside the cell by offset.
    #[inline]
    pub fn locate_by_offset(&self, k: usize) -> (usize, usize) {
        (self.cell_of[self.perm[k] as usize] as usize, self.rank_by_offset[k] as usize)
    }

    /// The `v`-th smallest offset of cell `c`, both 0-based.
    #[inline]
    pub fn offset_at_by_offset(&self, c: usize, v: usize) -> usize {
        self.by_offset[self.cell_start[c] as usize + v] as usize
    }

    /// Offset of the smallest cross rank among offsets `a..=b`.
    #[inline]
    pub fn range_min(&self, a: usize, b: usize) -> usize {
        self.range_min[a * self.w + b] as usize
    }

    /// Next offset after `k` with a smaller cross rank.
    #[inline]
    pub fn next_smaller(&self, k: usize) -> Option<usize> {
        opt(self.next_smaller[k])
    }

    /// Among offsets before `k` with a larger cross rank, the one whose cross
    /// rank is smallest.
    #[inline]
    pub fn nearest_above_before(&self, k: usize) -> Option<usize> {
        opt(self.row_next[k])
    }

    /// Points with offset in `i_lo..i_hi` and cross rank in `p_lo..p_hi`.
    #[inline]
    pub fn count(&self, i_lo: usize, i_hi: usize, p_lo: usize, p_hi: usize) -> usize {
        if i_lo >= i_hi || p_lo >= p_hi {
            return 0;
        }
        let s = self.w + 1;
        let f = |i: usize, p: usize| self.prefix[i * s + p] as usize;
        f(i_hi, p_hi) + f(i_lo, p_lo) - f(i_lo, p_hi) - f(i_hi, p_lo)
    }

    /// Points of cell `c` (0-based) among the first `k` offsets.
    #[inline]
    pub fn cell_offset(&self, k: usize, c: usize) -> usize {
        self.cell_offset[k * self.cell_count() + c] as usize
    }

    /// Smallest cross rank in `p_lo..p_hi` held by an offset in `i_lo..i_hi`.
    #[inline]
    pub fn first_cross(&self, i_lo: usize, i_hi: usize, p_lo: usize, p_hi: usize) -> Option<usize> {
        lowest_between(&self.cross_sets, self.words, i_lo, i_hi, p_lo, p_hi)
    }

    /// Smallest offset in `i_lo..i_hi` whose cross rank lies in `p_lo..p_hi`.
    #[inline]
    pub fn first_offset(&self, p_lo: usize, p_hi: usize, i_lo: usize, i_hi: usize) -> Option<usize> {
        lowest_between(&self.offset_sets, self.words, p_lo, p_hi, i_lo, i_hi)
    }

    /// Points with offset in `i1..=i2` (1-based) and cross position between
    /// `(c1, j1)` and `(c2, j2)` inclusive.
    pub fn rect_count_local(&self, i1: usize, i2: usize, c1: usize, j1: CellRank, c2: usize, j2: CellRank) -> Result<usize> {
        let k = self.cell_count();
        if i1 == 0 || i1 > i2 || i2 > self.w {
            return Err(Error::InvalidRange { lo: i1, hi: i2 });
        }
        if c1 == 0 || c1 > c2 || c2 > k {
            return Err(Error::InvalidRange { lo: c1, hi: c2 });
        }
        let lo = match j1 {
            CellRank::Zero => self.cell_start(c1 - 1),
            CellRank::At(j) if j >= 1 && j <= self.cell_size(c1 - 1) => self.cell_start(c1 - 1) + j - 1,
            CellRank::Inf => self.cell_start(c1),
            CellRank::At(j) => return Err(Error::OutOfRange { index: j, n: self.cell_size(c1 - 1) }),
        };
        let hi = match j2 {
            CellRank::Zero => self.cell_start(c2 - 1),
            CellRank::At(j) if j >= 1 && j <= self.cell_size(c2 - 1) => self.cell_start(c2 - 1) + j,
            CellRank::Inf => self.cell_start(c2),
            CellRank::At(j) => return Err(Error::OutOfRange { index: j, n: self.cell_size(c2 - 1) }),
        };
        Ok(self.count(i1 - 1, i2, lo, hi))
    }

    /// Precomputed storage at its packed field widths.
    pub fn model_bits(&self) -> u64 {
        let w = self.w as u64;
        let k = self.cell_count() as u64;
        let f = bits_for(w) as u64;
        // perm, inv, cell_of, both within-cell orders, next_smaller, row_next;
        // cell starts; range-min; prefix counts; cell offsets; two bitset
        // families.
        7 * w * f + (k + 1) * f + w * w * f + (w + 1) * (w + 1) * f + (w + 1) * k * f + 2 * (w + 1) * w
    }

    pub fn physical_bits(&self) -> u64 {
        let halves = self.perm.len()
            + self.inv.len()
            + self.rank_by_offset.len()
            + self.by_offset.len()
            + self.cell_of.len()
            + self.cell_start.len()
            + self.range_min.len()
            + self.next_smaller.len()
            + self.row_next.len()
            + self.prefix.len()
            + self.cell_offset.len();
        16 * halves as u64 + 64 * (self.cross_sets.len() + self.offset_sets.len()) as u64
    }
}

#[inline]
fn opt(x: u16) -> Option<usize> {
    if x == NONE {
        None
    } else {
        Some(x as usize)
    }
}

/// Lowest bit in `b_lo..b_hi` of `sets[a_hi] \ sets[a_lo]`.
#[inline]
fn lowest_between(sets: &[u64], words: usize, a_lo: usize, a_hi: usize, b_lo: usize, b_hi: usize) -> Option<usize> {
    if a_lo >= a_hi || b_lo >= b_hi {
        return None;
    }
    let hi = &sets[a_hi * words..(a_hi + 1) * words];
    let lo = &sets[a_lo * words..(a_lo + 1) * words];
    for wd in b_lo / 64..=(b_hi - 1) / 64 {
        let mut x = hi[wd] ^ lo[wd];
        if wd == b_lo / 64 {
            x &= !0u64 << (b_lo % 64);
        }
        if wd == (b_hi - 1) / 64 {
            let top = (b_hi - 1) % 64;
            if top < 63 {
                x &= (1u64 << (top + 1)) - 1;
            }
        }
        if x != 0 {
            return Some(wd * 64 + x.trailing_zeros() as usize);
        }
    }
    None
}

/// Interned gridded permutations, bucketed by width.
#[derive(Clone, Debug)]
pub struct GriddedPermTable {
    cap: usize,
    entries: Vec<Entry>,
    keys: Vec<GriddedPermutation>,
    by_width: Vec<Vec<u32>>,
    local: Vec<u32>,
    dict: HashMap<Vec<u16>, u32>,
}

impl GriddedPermTable {
    pub fn new(width_cap: usize) -> Self {
        Self { cap: width_cap, entries: Vec::new(), keys: Vec::new(), by_width: Vec::new(), local: Vec::new(), dict: HashMap::new() }
    }

    pub fn width_cap(&self) -> usize {
        self.cap
    }

    pub fn intern(&mut self, gp: GriddedPermutation) -> Result<u32> {
        let w = gp.width();
        if w > self.cap {
            return Err(Error::Decomposition(format!("strip width {w} exceeds cap {}", self.cap)));
        }
        let key = gp.encoding();
        if let Some(&id) = self.dict.get(&key) {
            return Ok(id);
        }
        let id = self.entries.len() as u32;
        self.entries.push(Entry::build(&gp));
        if self.by_width.len() <= w {
            self.by_width.resize(w + 1, Vec::new());
        }
        self.local.push(self.by_width[w].len() as u32);
        self.by_width[w].push(id);
        self.keys.push(gp);
        self.dict.insert(key, id);
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[inline]
    pub fn entry(&self, id: u32) -> &Entry {
        &self.entries[id as usize]
    }

    pub fn gridded(&self, id: u32) -> &GriddedPermutation {
        &self.keys[id as usize]
    }

    /// Position of `id` among the entries of its width.
    pub fn local_index(&self, id: u32) -> u32 {
        self.local[id as usize]
    }

    #[inline]
    pub fn by_local(&self, w: usize, local: u32) -> u32 {
        self.by_width[w][local as usize]
    }

    pub fn count_at_width(&self, w: usize) -> usize {
        self.by_width.get(w).map_or(0, |v| v.len())
    }

    pub fn max_width(&self) -> usize {
        self.by_width.len().saturating_sub(1)
    }

    /// Bits of a packed index for a strip of width `w`.
    pub fn index_bits(&self, w: usize) -> u32 {
        ceil_lg(self.count_at_width(w).max(1) as u64)
    }

    /// 1-based column-permutation lookup: offset `k` to its cell reference.
    pub fn col_perm(&self, id: u32, k: usize) -> Result<CellRef> {
        let e = self.entry(id);
        if k == 0 || k > e.width() {
            return Err(Error::OutOfRange { index: k, n: e.width() });
        }
        let (c, v) = e.locate(k - 1);
        Ok(CellRef { c: c + 1, v })
    }

    pub fn col_perm_inv(&self, id: u32, r: CellRef) -> Result<usize> {
        let e = self.entry(id);
        if r.c == 0 || r.c > e.cell_count() {
            return Err(Error::OutOfRange { index: r.c, n: e.cell_count() });
        }
        if r.v >= e.cell_size(r.c - 1) {
            return Err(Error::OutOfRange { index: r.v, n: e.cell_size(r.c - 1) });
        }
        Ok(e.offset_at(r.c - 1, r.v) + 1)
    }

    /// 1-based row-permutation lookup. Offsets of a row are values, so the
    /// within-cell rank counts same-cell points with a smaller offset.
    pub fn row_perm(&self, id: u32, k: usize) -> Result<CellRef> {
        let e = self.entry(id);
        if k == 0 || k > e.width() {
            return Err(Error::OutOfRange { index: k, n: e.width() });
        }
        let (c, v) = e.locate_by_offset(k - 1);
        Ok(CellRef { c: c + 1, v })
    }

    pub fn row_perm_inv(&self, id: u32, r: CellRef) -> Result<usize> {
        let e = self.entry(id);
        if r.c == 0 || r.c > e.cell_count() {
            return Err(Error::OutOfRange { index: r.c, n: e.cell_count() });
        }
        if r.v >= e.cell_size(r.c - 1) {
            return Err(Error::OutOfRange { index: r.v, n: e.cell_size(r.c - 1) });
        }
        Ok(e.offset_at_by_offset(r.c - 1, r.v) + 1)
    }

    pub fn in_strip_range_min(&self, id: u32, a: usize, b: usize) -> Result<usize> {
        let e = self.entry(id);
        if a == 0 || a > b || b > e.width() {
            return Err(Error::InvalidRange { lo: a, hi: b });
        }
        Ok(e.range_min(a - 1, b - 1) + 1)
    }

    pub fn in_strip_next_smaller(&self, id: u32, k: usize) -> Result<Option<usize>> {
        let e = self.entry(id);
        if k == 0 || k > e.width() {
            return Err(Error::OutOfRange { index: k, n: e.width() });
        }
        Ok(e.next_smaller(k - 1).map(|x| x + 1))
    }

    pub fn size(&self) -> Size {
        let model: u64 = self.entries.iter().map(|e| e.model_bits()).sum();
        let physical: u64 = self.entries.iter().map(|e| e.physical_bits()).sum();
        Size::new(physical, model)
    }

    pub fn encode(&self, w: &mut Writer) {
        w.usize(self.cap);
        w.usize(self.keys.len());
        for gp in &self.keys {
            w.u16s(&gp.perm);
            w.u16s(&gp.cells);
        }
    }

    pub fn decode(r: &mut Reader) -> Result<Self> {
        let cap = r.usize()?;
        let count = r.usize()?;
        let mut t = Self::new(cap);
        for _ in 0..count {
            let perm: Vec<u16> = r.u16s()?;
            let cells = r.u16s()?;
            let one_based: Vec<u16> = perm.iter().map(|&p| p.wrapping_add(1)).collect();
            let gp = GriddedPermutation::new(&one_based, &cells).map_err(|e| Error::Format(e.to_string()))?;
            let before = t.len();
            t.intern(gp)?;
            if t.len() == before {
                return Err(Error::Format("duplicate table entry".into()));
            }
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_gp(rng: &mut impl Rng, w: usize) -> GriddedPermutation {
        let mut perm: Vec<u16> = (1..=w as u16).collect();
        perm.shuffle(rng);
        let mut cells = Vec::new();
        let mut left = w;
        while left > 0 {
            let c = rng.gen_range(1..=left);
            cells.push(c as u16);
            left -= c;
        }
        GriddedPermutation::new(&perm, &cells).unwrap()
    }

    #[test]
    fn examples() {
        let mut t = GriddedPermTable::new(16);
        let one = t.intern(GriddedPermutation::new(&[1], &[1]).unwrap()).unwrap();
        assert_eq!(t.col_perm(one, 1).unwrap(), CellRef { c: 1, v: 0 });
        assert_eq!(t.intern(GriddedPermutation::new(&[1], &[1]).unwrap()).unwrap(), one);

        let id = t.intern(GriddedPermutation::new(&[1, 2, 3], &[3]).unwrap()).unwrap();
        assert_eq!(t.col_perm(id, 2).unwrap(), CellRef { c: 1, v: 1 });
        let two = t.intern(GriddedPermutation::new(&[2, 3, 1], &[2, 1]).unwrap()).unwrap();
        assert_eq!(t.col_perm(two, 2).unwrap(), CellRef { c: 2, v: 0 });

        for a in 1..=3 {
            for b in a..=3 {
                assert_eq!(t.in_strip_range_min(id, a, b).unwrap(), a);
            }
        }
        let dec = t.intern(GriddedPermutation::new(&[4, 3, 2, 1], &[4]).unwrap()).unwrap();
        for k in 1..4 {
            assert_eq!(t.in_strip_next_smaller(dec, k).unwrap(), Some(k + 1));
        }
        assert_eq!(t.in_strip_next_smaller(dec, 4).unwrap(), None);
        let e = t.entry(dec);
        assert_eq!(e.rect_count_local(1, 4, 1, CellRank::Zero, 1, CellRank::Inf).unwrap(), 4);
        assert_eq!(e.cell_offset(0, 0), 0);
        assert!(t.intern(random_gp(&mut ChaCha8Rng::seed_from_u64(0), 17)).is_err());
    }

    #[test]
    fn random_entries_against_scans() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut t = GriddedPermTable::new(200);
        for _ in 0..1000 {
            let w = rng.gen_range(1..=12);
            let gp = random_gp(&mut rng, w);
            let id = t.intern(gp.clone()).unwrap();
            let e = t.entry(id);
            let p = &gp.perm;
            for k in 1..=w {
                let r = t.col_perm(id, k).unwrap();
                assert_eq!(t.col_perm_inv(id, r).unwrap(), k);
                let rr = t.row_perm(id, k).unwrap();
                assert_eq!(t.row_perm_inv(id, rr).unwrap(), k);
                assert_eq!(rr.c, r.c);
                assert_eq!(rr.v, (0..k - 1).filter(|&j| t.col_perm(id, j + 1).unwrap().c == r.c).count());
                let want = (k..w).find(|&j| p[j] < p[k - 1]).map(|j| j + 1);
                assert_eq!(t.in_strip_next_smaller(id, k).unwrap(), want);
                let want = (0..k - 1).filter(|&j| p[j] > p[k - 1]).min_by_key(|&j| p[j]);
                assert_eq!(e.nearest_above_before(k - 1), want);
            }
            for a in 1..=w {
                for b in a..=w {
                    let want = (a..=b).min_by_key(|&j| p[j - 1]).unwrap();
                    assert_eq!(t.in_strip_range_min(id, a, b).unwrap(), want);
                }
            }
            for i_lo in 0..=w {
                for i_hi in i_lo..=w {
                    for p_lo in 0..=w {
                        for p_hi in p_lo..=w {
                            let pts: Vec<usize> = (i_lo..i_hi).filter(|&i| (p_lo..p_hi).contains(&(p[i] as usize))).collect();
                            assert_eq!(e.count(i_lo, i_hi, p_lo, p_hi), pts.len());
                            assert_eq!(e.first_cross(i_lo, i_hi, p_lo, p_hi), pts.iter().map(|&i| p[i] as usize).min());
                            assert_eq!(e.first_offset(p_lo, p_hi, i_lo, i_hi), pts.first().copied());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rect_count_local_exhaustive_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut t = GriddedPermTable::new(8);
        for _ in 0..60 {
            let w = rng.gen_range(1..=8);
            let gp = random_gp(&mut rng, w);
            let id = t.intern(gp.clone()).unwrap();
            let e = t.entry(id);
            let starts: Vec<usize> = std::iter::once(0)
                .chain(gp.cells.iter().scan(0, |a, &c| {
                    *a += c as usize;
                    Some(*a)
                }))
                .collect();
            let k = gp.cells.len();
            let ranks = |c: usize| {
                let mut v = vec![CellRank::Zero, CellRank::Inf];
                v.extend((1..=gp.cells[c - 1] as usize).map(CellRank::At));
                v
            };
            for i1 in 1..=w {
                for i2 in i1..=w {
                    for c1 in 1..=k {
                        for c2 in c1..=k {
                            for j1 in ranks(c1) {
                                for j2 in ranks(c2) {
                                    let lo = match j1 {
                                        CellRank::Zero => starts[c1 - 1],
                                        CellRank::At(j) => starts[c1 - 1] + j - 1,
                                        CellRank::Inf => starts[c1],
                                    };
                                    let hi = match j2 {
                                        CellRank::Zero => starts[c2 - 1],
                                        CellRank::At(j) => starts[c2 - 1] + j,
                                        CellRank::Inf => starts[c2],
                                    };
                                    let want = (i1 - 1..i2).filter(|&i| (gp.perm[i] as usize) >= lo && (gp.perm[i] as usize) < hi).count();
                                    assert_eq!(e.rect_count_local(i1, i2, c1, j1, c2, j2).unwrap(), want);
                                }
                            }
                        }
                    }
                }
            }
            for kk in 0..=w {
                for c in 0..k {
                    let want = (0..kk).filter(|&i| (starts[c]..starts[c + 1]).contains(&(gp.perm[i] as usize))).count();
                    assert_eq!(e.cell_offset(kk, c), want);
                }
            }
        }
    }

    #[test]
    fn dedup_and_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut t = GriddedPermTable::new(100);
        let gps: Vec<_> = (0..300)
            .map(|_| {
                let w = rng.gen_range(1..5);
                random_gp(&mut rng, w)
            })
            .collect();
        let ids: Vec<u32> = gps.iter().map(|g| t.intern(g.clone()).unwrap()).collect();
        for (a, ga) in gps.iter().enumerate() {
            for (b, gb) in gps.iter().enumerate() {
                assert_eq!(ga == gb, ids[a] == ids[b]);
            }
        }
        for w in 1..5 {
            assert_eq!(t.index_bits(w), ceil_lg(t.count_at_width(w).max(1) as u64));
        }
        let mut wr = Writer::new();
        t.encode(&mut wr);
        let bytes = wr.into_bytes();
        let back = GriddedPermTable::decode(&mut Reader::new(&bytes)).unwrap();
        let mut wr2 = Writer::new();
        back.encode(&mut wr2);
        assert_eq!(bytes, wr2.into_bytes());
        for &id in &ids {
            assert_eq!(back.local_index(id), t.local_index(id));
        }
    }

    #[test]
    fn wide_bitsets() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut t = GriddedPermTable::new(200);
        let gp = random_gp(&mut rng, 150);
        let id = t.intern(gp.clone()).unwrap();
        let e = t.entry(id);
        for _ in 0..2000 {
            let i_lo = rng.gen_range(0..150);
            let i_hi = rng.gen_range(i_lo..=150);
            let p_lo = rng.gen_range(0..150);
            let p_hi = rng.gen_range(p_lo..=150);
            let pts: Vec<usize> = (i_lo..i_hi).filter(|&i| (p_lo..p_hi).contains(&(gp.perm[i] as usize))).collect();
            assert_eq!(e.first_cross(i_lo, i_hi, p_lo, p_hi), pts.iter().map(|&i| gp.perm[i] as usize).min());
            assert_eq!(e.first_offset(p_lo, p_hi, i_lo, i_hi), pts.first().copied());
            assert_eq!(e.count(i_lo, i_hi, p_lo, p_hi), pts.len());
        }
    }
}
