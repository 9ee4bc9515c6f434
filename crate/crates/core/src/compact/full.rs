//! The two-level index: strip trees, boundary bitvectors, the packed strip
//! structures and the shared gridded-permutation tables.

use super::layout::StripStructure;
use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};
use crate::gridded::{Entry, GriddedPermTable};
use crate::succinct::{BitVector, OrderedTree, RangeMinIndex};
use crate::tally::{NoTally, Tally};

#[derive(Clone, Debug)]
pub struct FullIndex {
    pub n: usize,
    pub m1: usize,
    pub m2: usize,
    pub d_max: u64,
    /// Root, coarse columns, fine columns in level order.
    pub tc: OrderedTree,
    pub tr: OrderedTree,
    /// A one at the first position of every fine column (row).
    pub ic: BitVector,
    pub ir: BitVector,
    pub gc: StripStructure,
    pub gr: StripStructure,
    pub col_table: GriddedPermTable,
    pub row_table: GriddedPermTable,
    /// Minimum value of each fine column.
    pub col_min: RangeMinIndex,
}

/// A fine strip resolved down to its table entry.
pub(crate) struct StripRef {
    pub top: usize,
    pub sub: usize,
    pub node: usize,
    pub index: usize,
    pub start: usize,
    pub id: u32,
}

impl FullIndex {
    #[inline]
    fn fine_col_of<T: Tally>(&self, x: usize, t: &mut T) -> (usize, usize) {
        t.tick();
        let f = self.ic.rank(x + 1) - 1;
        t.tick();
        (f, self.ic.select(f + 1) - 1)
    }

    #[inline]
    fn fine_row_of<T: Tally>(&self, y: usize, t: &mut T) -> (usize, usize) {
        t.tick();
        let g = self.ir.rank(y + 1) - 1;
        t.tick();
        (g, self.ir.select(g + 1) - 1)
    }

    #[inline]
    fn width<T: Tally>(&self, bounds: &BitVector, j: usize, start: usize, t: &mut T) -> usize {
        t.tick();
        let end = if j + 1 < self.m2 { bounds.select(j + 2) - 1 } else { self.n };
        end - start
    }

    /// Fine column `f` (0-based) starting at `start`.
    pub(crate) fn col_strip<T: Tally>(&self, f: usize, start: usize, t: &mut T) -> StripRef {
        t.tick();
        let leaf = self.tc.leaf_select(f + 1);
        t.tick();
        let sub = self.tc.child_rank(leaf);
        t.tick();
        let top = self.tc.child_rank(self.tc.parent(leaf).expect("leaf below root"));
        self.col_leaf(top, sub, f, start, t)
    }

    /// Fine column at child `sub` of coarse column `top`.
    pub(crate) fn col_strip_at<T: Tally>(&self, top: usize, sub: usize, t: &mut T) -> StripRef {
        t.tick();
        let v = self.tc.child(self.tc.child(0, top + 1), sub + 1);
        t.tick();
        let f = self.tc.leaf_rank(v);
        t.tick();
        let start = self.ic.select(f + 1) - 1;
        self.col_leaf(top, sub, f, start, t)
    }

    fn col_leaf<T: Tally>(&self, top: usize, sub: usize, f: usize, start: usize, t: &mut T) -> StripRef {
        let w = self.width(&self.ic, f, start, t);
        t.tick();
        let node = self.gc.child(top);
        t.tick();
        t.visit();
        let local = self.gc.node_leaf(node, sub, w);
        t.tick();
        let id = self.col_table.by_local(w, local);
        StripRef { top, sub, node, index: f, start, id }
    }

    pub(crate) fn row_strip<T: Tally>(&self, g: usize, start: usize, t: &mut T) -> StripRef {
        t.tick();
        let leaf = self.tr.leaf_select(g + 1);
        t.tick();
        let sub = self.tr.child_rank(leaf);
        t.tick();
        let top = self.tr.child_rank(self.tr.parent(leaf).expect("leaf below root"));
        self.row_leaf(top, sub, g, start, t)
    }

    pub(crate) fn row_strip_at<T: Tally>(&self, top: usize, sub: usize, t: &mut T) -> StripRef {
        t.tick();
        let v = self.tr.child(self.tr.child(0, top + 1), sub + 1);
        t.tick();
        let g = self.tr.leaf_rank(v);
        t.tick();
        let start = self.ir.select(g + 1) - 1;
        self.row_leaf(top, sub, g, start, t)
    }

    fn row_leaf<T: Tally>(&self, top: usize, sub: usize, g: usize, start: usize, t: &mut T) -> StripRef {
        let w = self.width(&self.ir, g, start, t);
        t.tick();
        let node = self.gr.child(top);
        t.tick();
        t.visit();
        let local = self.gr.node_leaf(node, sub, w);
        t.tick();
        let id = self.row_table.by_local(w, local);
        StripRef { top, sub, node, index: g, start, id }
    }

    #[inline]
    pub(crate) fn col_entry(&self, s: &StripRef) -> &Entry {
        self.col_table.entry(s.id)
    }

    #[inline]
    pub(crate) fn row_entry(&self, s: &StripRef) -> &Entry {
        self.row_table.entry(s.id)
    }

    /// Fine row meeting cell `c` of a fine column, with the cell's rank in it.
    pub(crate) fn col_to_row<T: Tally>(&self, s: &StripRef, c: usize, t: &mut T) -> (StripRef, usize) {
        t.tick();
        let (c2r, rsub) = self.gc.node_cross(s.node, s.sub, c);
        t.tick();
        let c1 = self.gc.node_parent(s.node, s.sub, c);
        t.tick();
        let (_, r1) = self.gc.root_cross(s.top, c1);
        (self.row_strip_at(r1, rsub, t), c2r)
    }

    /// Fine column meeting cell `c` of a fine row, with the cell's rank in it.
    pub(crate) fn row_to_col<T: Tally>(&self, s: &StripRef, c: usize, t: &mut T) -> (StripRef, usize) {
        t.tick();
        let (c2, csub) = self.gr.node_cross(s.node, s.sub, c);
        t.tick();
        let c1 = self.gr.node_parent(s.node, s.sub, c);
        t.tick();
        let (_, s1) = self.gr.root_cross(s.top, c1);
        (self.col_strip_at(s1, csub, t), c2)
    }

    /// 0-based `τ(x)`.
    pub(crate) fn rank<T: Tally>(&self, x: usize, t: &mut T) -> usize {
        let (f, start) = self.fine_col_of(x, t);
        let s = self.col_strip(f, start, t);
        t.tick();
        let (c2, v) = self.col_entry(&s).locate(x - start);
        let (rs, c2r) = self.col_to_row(&s, c2, t);
        t.tick();
        rs.start + self.row_entry(&rs).offset_at_by_offset(c2r, v)
    }

    /// 0-based `τ⁻¹(y)`.
    pub(crate) fn unrank<T: Tally>(&self, y: usize, t: &mut T) -> usize {
        let (g, start) = self.fine_row_of(y, t);
        let s = self.row_strip(g, start, t);
        t.tick();
        let (c2r, v) = self.row_entry(&s).locate_by_offset(y - start);
        let (cs, c2) = self.row_to_col(&s, c2r, t);
        t.tick();
        cs.start + self.col_entry(&cs).offset_at(c2, v)
    }

    /// 0-based position of the minimum in `a..=b`.
    pub(crate) fn range_min<T: Tally>(&self, a: usize, b: usize, t: &mut T) -> usize {
        let (fa, sa) = self.fine_col_of(a, t);
        let (fb, sb) = self.fine_col_of(b, t);
        let ea = self.col_strip(fa, sa, t);
        let e = self.col_entry(&ea);
        t.tick();
        if fa == fb {
            return sa + e.range_min(a - sa, b - sa);
        }
        let mut best = sa + e.range_min(a - sa, e.width() - 1);
        let mut best_v = self.rank(best, t);
        let eb = self.col_strip(fb, sb, t);
        t.tick();
        let cand = sb + self.col_entry(&eb).range_min(0, b - sb);
        let cv = self.rank(cand, t);
        if cv < best_v {
            best = cand;
            best_v = cv;
        }
        if fb > fa + 1 {
            t.tick();
            let f = self.col_min.argmin(fa + 1, fb - 1);
            t.tick();
            let start = self.ic.select(f + 1) - 1;
            let s = self.col_strip(f, start, t);
            let e = self.col_entry(&s);
            t.tick();
            let cand = start + e.range_min(0, e.width() - 1);
            if self.rank(cand, t) < best_v {
                best = cand;
            }
        }
        best
    }

    /// 0-based next position right of `x` holding a smaller value.
    pub(crate) fn next_smaller<T: Tally>(&self, x: usize, t: &mut T) -> Option<usize> {
        let (f, start) = self.fine_col_of(x, t);
        let s = self.col_strip(f, start, t);
        let e = self.col_entry(&s);
        let k = x - start;
        t.tick();
        if let Some(k2) = e.next_smaller(k) {
            return Some(start + k2);
        }
        t.tick();
        let (c2, v) = e.locate(k);
        let mut best: Option<usize> = None;
        let mut take = |c: usize| {
            if best.is_none_or(|b| c < b) {
                best = Some(c);
            }
        };
        // Same fine row, further right.
        let (rs, c2r) = self.col_to_row(&s, c2, t);
        let re = self.row_entry(&rs);
        t.tick();
        let r3 = re.offset_at_by_offset(c2r, v);
        t.tick();
        if let Some(r) = re.nearest_above_before(r3) {
            take(self.unrank(rs.start + r, t));
        }
        t.tick();
        if let Some(o) = self.gc.node_ns3(s.node, s.sub, c2) {
            take(self.col_strip_at(s.top, 0, t).start + o);
        }
        t.tick();
        if let Some(o) = self.gc.node_ns4(s.node, s.sub, c2) {
            let y = self.row_strip_at(rs.top, 0, t).start + o;
            take(self.unrank(y, t));
        }
        t.tick();
        let c1 = self.gc.node_parent(s.node, s.sub, c2);
        t.tick();
        if let Some(col) = self.gc.root_ns5(s.top, c1) {
            take(col);
        }
        best
    }

    /// Structural checks after loading, then a full rank/unrank pass.
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Format(format!("index: {what}")));
        let (n, m1, m2) = (self.n, self.m1, self.m2);
        for b in [&self.ic, &self.ir] {
            if b.len() != n || b.count_ones() != m2 || !b.read(1) {
                return bad("strip bounds");
            }
        }
        for t in [&self.tc, &self.tr] {
            if t.node_count() != 1 + m1 + m2 || t.degree(0) != m1 || (1..=m1).any(|v| t.degree(v) == 0) {
                return bad("strip tree");
            }
        }
        if self.col_min.len() != m2 {
            return bad("column minima");
        }
        let shape = |t: &OrderedTree, b: &BitVector| -> Vec<Vec<usize>> {
            let mut f = 0;
            (1..=m1)
                .map(|v| {
                    (0..t.degree(v))
                        .map(|_| {
                            let s = b.select(f + 1) - 1;
                            let e = if f + 1 < m2 { b.select(f + 2) - 1 } else { n };
                            f += 1;
                            e - s
                        })
                        .collect()
                })
                .collect()
        };
        self.gc.validate(&shape(&self.tc, &self.ic))?;
        self.gr.validate(&shape(&self.tr, &self.ir))?;
        let slots = self.gc.fields.slots as usize;
        if self.gr.fields.slots as usize != slots || !self.gc.fields.extra || self.gr.fields.extra {
            return bad("field layout");
        }
        let t = &mut NoTally;
        for (tree, bounds, nodes, table) in [(&self.tc, &self.ic, &self.gc, &self.col_table), (&self.tr, &self.ir, &self.gr, &self.row_table)] {
            for j in 0..m2 {
                let leaf = tree.leaf_select(j + 1);
                let sub = tree.child_rank(leaf);
                let top = tree.child_rank(tree.parent(leaf).expect("leaf below root"));
                let w = self.width(bounds, j, bounds.select(j + 1) - 1, t);
                let local = nodes.node_leaf(nodes.child(top), sub, w);
                if local as usize >= table.count_at_width(w) {
                    return bad("leaf index");
                }
            }
        }
        for f in 0..m2 {
            let s = self.col_strip(f, self.ic.select(f + 1) - 1, t);
            let e = self.col_entry(&s);
            if s.id as usize >= self.col_table.len() || e.cell_count() > slots {
                return bad("column leaf");
            }
        }
        for g in 0..m2 {
            let s = self.row_strip(g, self.ir.select(g + 1) - 1, t);
            if s.id as usize >= self.row_table.len() || self.row_entry(&s).cell_count() > slots {
                return bad("row leaf");
            }
        }
        // Every cell link must land on a cell of equal size.
        for f in 0..m2 {
            let s = self.col_strip(f, self.ic.select(f + 1) - 1, t);
            let e = self.col_entry(&s);
            for c in 0..e.cell_count() {
                let (c2r, rsub) = self.gc.node_cross(s.node, s.sub, c);
                let c1 = self.gc.node_parent(s.node, s.sub, c);
                if c1 >= slots {
                    return bad("cell parent");
                }
                let (_, r1) = self.gc.root_cross(s.top, c1);
                if r1 >= m1 || rsub >= self.tr.degree(r1 + 1) {
                    return bad("cell link");
                }
                let rs = self.row_strip_at(r1, rsub, t);
                let re = self.row_entry(&rs);
                if c2r >= re.cell_count() || re.cell_size(c2r) != e.cell_size(c) {
                    return bad("cell size");
                }
            }
        }
        for g in 0..m2 {
            let s = self.row_strip(g, self.ir.select(g + 1) - 1, t);
            let e = self.row_entry(&s);
            for c in 0..e.cell_count() {
                let (c2, csub) = self.gr.node_cross(s.node, s.sub, c);
                let c1 = self.gr.node_parent(s.node, s.sub, c);
                if c1 >= slots {
                    return bad("cell parent");
                }
                let (_, s1) = self.gr.root_cross(s.top, c1);
                if s1 >= m1 || csub >= self.tc.degree(s1 + 1) {
                    return bad("cell link");
                }
                let cs = self.col_strip_at(s1, csub, t);
                let ce = self.col_entry(&cs);
                if c2 >= ce.cell_count() || ce.cell_size(c2) != e.cell_size(c) {
                    return bad("cell size");
                }
            }
        }
        let mut seen = vec![false; n];
        for x in 0..n {
            let y = self.rank(x, t);
            if y >= n || std::mem::replace(&mut seen[y], true) || self.unrank(y, t) != x {
                return bad("links do not form a permutation");
            }
        }
        Ok(())
    }

    pub fn encode(&self, w: &mut Writer) {
        w.section(|w| self.tc.encode(w));
        w.section(|w| self.tr.encode(w));
        w.section(|w| self.ic.encode(w));
        w.section(|w| self.ir.encode(w));
        w.section(|w| self.col_table.encode(w));
        w.section(|w| self.row_table.encode(w));
        w.section(|w| self.gc.encode(w));
        w.section(|w| self.gr.encode(w));
        w.section(|w| self.col_min.encode(w));
    }

    pub fn decode(r: &mut Reader, n: usize, m1: usize, m2: usize, d_max: u64) -> Result<Self> {
        let tc = r.section(OrderedTree::decode)?;
        let tr = r.section(OrderedTree::decode)?;
        let ic = r.section(BitVector::decode)?;
        let ir = r.section(BitVector::decode)?;
        let col_table = r.section(GriddedPermTable::decode)?;
        let row_table = r.section(GriddedPermTable::decode)?;
        let gc = r.section(StripStructure::decode)?;
        let gr = r.section(StripStructure::decode)?;
        let col_min = r.section(RangeMinIndex::decode)?;
        Ok(Self { n, m1, m2, d_max, tc, tr, ic, ir, gc, gr, col_table, row_table, col_min })
    }
}
