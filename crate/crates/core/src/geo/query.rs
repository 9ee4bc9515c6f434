//! Rectangle decomposition into table-answerable pieces.
//!
//! The four corners of the query each have a root-to-leaf path in the
//! column and row trees. Walking a column path against a row path gives,
//! per level, how many non-empty cells of the column strip lie below the
//! row and whether the cell at the row itself is non-empty. From those
//! states the rectangle splits into one central piece at the level where
//! the corners separate, four frame pieces per finer level, and four pieces
//! inside the fine strips of the base index.

use super::dense::DenseNode;
use super::GeoFull;
use crate::compact::{FullIndex, StripRef};
use crate::error::{Error, Result};
use crate::gridded::Entry;
use crate::succinct::{BitVector, OrderedTree};
use crate::tally::Tally;

fn corrupt() -> Error {
    Error::Format("rectangle tables are inconsistent".into())
}

/// Root-to-leaf path of a position (or value) in a dense tree.
pub(crate) struct Path {
    /// `nodes[k]` is the level-`k` strip; `nodes[0]` is the root.
    pub nodes: Vec<usize>,
    /// `subs[k]`: rank of `nodes[k]` among its siblings.
    pub subs: Vec<usize>,
    pub fine: usize,
    pub start: usize,
    pub off: usize,
}

/// Per level: non-empty cells below (left of) the cross coordinate, and
/// whether the cell at it is non-empty.
type Walk = Vec<(usize, bool)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Piece {
    /// Substrips `i` of column node `node`, positions `p`.
    Col {
        level: usize,
        node: usize,
        i: (usize, usize),
        p: (usize, usize),
    },
    /// Substrips `i` of row node `node`, whole cells `c`.
    Row {
        level: usize,
        node: usize,
        i: (usize, usize),
        c: (usize, usize),
    },
    /// Offsets `o` and cross ranks `p` of a fine column (index into `strips`).
    FineCol {
        strip: usize,
        o: (usize, usize),
        p: (usize, usize),
    },
    FineRow {
        strip: usize,
        o: (usize, usize),
        p: (usize, usize),
    },
}

pub(crate) struct Plan<'a> {
    pub pieces: Vec<Piece>,
    /// Fine strips: `(0-based index, start, entry)`.
    pub strips: Vec<(usize, usize, &'a Entry)>,
}

fn lo(node: &DenseNode, (a, b): (usize, bool), r: usize) -> Result<usize> {
    Ok(node.off(a).ok_or_else(corrupt)? + if b { r + 1 } else { 0 })
}

fn hi(node: &DenseNode, (a, b): (usize, bool), r: usize) -> Result<usize> {
    Ok(node.off(a).ok_or_else(corrupt)? + if b { r } else { 0 })
}

/// Cross ranks of `e` below the cut at offset `k` of the crossing strip
/// entry `x`, where the shared cell is cell `c` of `x`.
fn fine_cut(e: &Entry, (a, b): (usize, bool), x: &Entry, c: usize, k: usize) -> Result<usize> {
    if a > e.cell_count() || (b && (c >= x.cell_count() || k > x.width())) {
        return Err(corrupt());
    }
    Ok(e.cell_start(a) + if b { x.cell_offset(k, c) } else { 0 })
}

fn cell_start(e: &Entry, c: usize) -> Result<usize> {
    if c > e.cell_count() {
        return Err(corrupt());
    }
    Ok(e.cell_start(c))
}

impl GeoFull {
    pub(crate) fn path<T: Tally>(&self, tree: &OrderedTree, bounds: &BitVector, x: usize, t: &mut T) -> Path {
        let l = self.levels();
        t.tick();
        let fine = bounds.rank(x + 1) - 1;
        t.tick();
        let start = bounds.select(fine + 1) - 1;
        let mut nodes = vec![0; l + 1];
        let mut subs = vec![0; l + 1];
        t.tick();
        let mut v = tree.leaf_select(fine + 1);
        for k in (1..=l).rev() {
            nodes[k] = v;
            t.tick();
            subs[k] = tree.child_rank(v);
            t.tick();
            v = tree.parent(v).expect("leaf depth checked on load");
        }
        Path { nodes, subs, fine, start, off: x - start }
    }

    /// Walks the strip path `own` against two cross paths at once; each
    /// node is entered once.
    fn walk<T: Tally>(&self, nodes: &[DenseNode], own: &Path, cross: [&Path; 2], t: &mut T) -> Result<[Walk; 2]> {
        let l = self.levels();
        let mut out = [Vec::with_capacity(l + 1), Vec::with_capacity(l + 1)];
        for st in &mut out {
            st.push((0, true));
        }
        for k in 1..=l {
            let node = nodes.get(own.nodes[k - 1]).ok_or_else(corrupt)?;
            t.visit();
            let s = own.subs[k];
            for (st, cp) in out.iter_mut().zip(cross) {
                t.tick();
                let (a, b) = st[k - 1];
                let p0 = node.off(a).ok_or_else(corrupt)?;
                let next = if b {
                    let p = p0 + cp.subs[k];
                    (node.ne(s, p).ok_or_else(corrupt)?, node.non_empty(s, p).ok_or_else(corrupt)?)
                } else {
                    (node.ne(s, p0).ok_or_else(corrupt)?, false)
                };
                st.push(next);
            }
        }
        Ok(out)
    }

    /// Points of fine column `s` with value below `y`, through the cell
    /// links of the base index.
    fn below<T: Tally>(base: &FullIndex, s: &StripRef, y: usize, t: &mut T) -> Result<usize> {
        let e = base.col_entry(s);
        if y >= base.n {
            return Ok(e.width());
        }
        t.tick();
        let g = base.ir.rank(y + 1) - 1;
        for c in 0..e.cell_count() {
            let (rs, c2r) = base.col_to_row(s, c, t);
            if rs.index == g {
                t.tick();
                let re = base.row_entry(&rs);
                if c2r >= re.cell_count() || y - rs.start > re.width() {
                    return Err(corrupt());
                }
                return Ok(e.cell_start(c) + re.cell_offset(y - rs.start, c2r));
            }
            if rs.index > g {
                return Ok(e.cell_start(c));
            }
        }
        Ok(e.width())
    }

    /// Points of fine row `s` in columns left of `x`.
    fn left_of<T: Tally>(base: &FullIndex, s: &StripRef, x: usize, t: &mut T) -> Result<usize> {
        let e = base.row_entry(s);
        if x >= base.n {
            return Ok(e.width());
        }
        t.tick();
        let f = base.ic.rank(x + 1) - 1;
        for c in 0..e.cell_count() {
            let (cs, c2) = base.row_to_col(s, c, t);
            if cs.index == f {
                t.tick();
                let ce = base.col_entry(&cs);
                if c2 >= ce.cell_count() || x - cs.start > ce.width() {
                    return Err(corrupt());
                }
                return Ok(e.cell_start(c) + ce.cell_offset(x - cs.start, c2));
            }
            if cs.index > f {
                return Ok(e.cell_start(c));
            }
        }
        Ok(e.width())
    }

    /// Pieces for the 0-based inclusive rectangle `x1..=x2` by `y1..=y2`.
    pub(crate) fn plan<'a, T: Tally>(&self, base: &'a FullIndex, x1: usize, x2: usize, y1: usize, y2: usize, t: &mut T) -> Result<Plan<'a>> {
        let l = self.levels();
        t.tick();
        let (fw, fe) = (base.ic.rank(x1 + 1), base.ic.rank(x2 + 1));
        t.tick();
        let (fn_, fs) = (base.ir.rank(y1 + 1), base.ir.rank(y2 + 1));
        if fw == fe || fn_ == fs {
            let col = fw == fe;
            let (bounds, f, x) = if col { (&base.ic, fw - 1, x1) } else { (&base.ir, fn_ - 1, y1) };
            t.tick();
            let start = bounds.select(f + 1) - 1;
            let sr = if col { base.col_strip(f, start, t) } else { base.row_strip(f, start, t) };
            let (piece, e) = if col {
                let p = (Self::below(base, &sr, y1, t)?, Self::below(base, &sr, y2 + 1, t)?);
                (Piece::FineCol { strip: 0, o: (x - start, x2 - start + 1), p }, base.col_entry(&sr))
            } else {
                let p = (Self::left_of(base, &sr, x1, t)?, Self::left_of(base, &sr, x2 + 1, t)?);
                (Piece::FineRow { strip: 0, o: (x - start, y2 - start + 1), p }, base.row_entry(&sr))
            };
            return Ok(Plan { pieces: vec![piece], strips: vec![(f, start, e)] });
        }

        let w = self.path(&self.tc, &base.ic, x1, t);
        let e = self.path(&self.tc, &base.ic, x2, t);
        let n = self.path(&self.tr, &base.ir, y1, t);
        let s = self.path(&self.tr, &base.ir, y2, t);
        let [nw_c, sw_c] = self.walk(&self.cols, &w, [&n, &s], t)?;
        let [ne_c, se_c] = self.walk(&self.cols, &e, [&n, &s], t)?;
        let [nw_r, ne_r] = self.walk(&self.rows, &n, [&w, &e], t)?;
        let [sw_r, se_r] = self.walk(&self.rows, &s, [&w, &e], t)?;

        let sw_ = base.col_strip(w.fine, w.start, t);
        let se_ = base.col_strip(e.fine, e.start, t);
        let sn_ = base.row_strip(n.fine, n.start, t);
        let ss_ = base.row_strip(s.fine, s.start, t);
        let (ew, ee) = (base.col_entry(&sw_), base.col_entry(&se_));
        let (en, es) = (base.row_entry(&sn_), base.row_entry(&ss_));
        let strips = vec![(w.fine, w.start, ew), (e.fine, e.start, ee), (n.fine, n.start, en), (s.fine, s.start, es)];
        const W: usize = 0;
        const E: usize = 1;
        const N: usize = 2;
        const S: usize = 3;

        let mut pieces = Vec::new();
        let kc = (1..=l).find(|&k| w.nodes[k] != e.nodes[k]).ok_or_else(corrupt)?;
        let kr = (1..=l).find(|&k| n.nodes[k] != s.nodes[k]).ok_or_else(corrupt)?;
        let big_k = kc.max(kr);
        let col = |v: usize| self.cols.get(v).ok_or_else(corrupt);
        let row = |v: usize| self.rows.get(v).ok_or_else(corrupt);
        let after = |(a, b): (usize, bool)| a + b as usize;

        let k = big_k;
        if k == kc {
            let v = w.nodes[k - 1];
            let nd = col(v)?;
            let p = (lo(nd, ne_c[k - 1], n.subs[k])?, hi(nd, se_c[k - 1], s.subs[k])?);
            pieces.push(Piece::Col { level: k, node: v, i: (w.subs[k] + 1, e.subs[k]), p });
        } else {
            pieces.push(Piece::Row { level: k, node: n.nodes[k - 1], i: (n.subs[k] + 1, s.subs[k]), c: (after(nw_r[k - 1]), ne_r[k - 1].0) });
            for (path, st, west) in [(&w, nw_c[k - 1], true), (&e, ne_c[k - 1], false)] {
                let v = path.nodes[k - 1];
                let nd = col(v)?;
                if let (a, true) = st {
                    let base = nd.off(a).ok_or_else(corrupt)?;
                    let i = if west { (path.subs[k] + 1, nd.q as usize) } else { (0, path.subs[k]) };
                    pieces.push(Piece::Col { level: k, node: v, i, p: (base + n.subs[k] + 1, base + s.subs[k]) });
                }
            }
        }
        for k in big_k + 1..=l {
            let v = e.nodes[k - 1];
            let nd = col(v)?;
            let p = (lo(nd, ne_c[k - 1], n.subs[k])?, hi(nd, se_c[k - 1], s.subs[k])?);
            pieces.push(Piece::Col { level: k, node: v, i: (0, e.subs[k]), p });

            let v = w.nodes[k - 1];
            let nd = col(v)?;
            let p = (lo(nd, nw_c[k - 1], n.subs[k])?, hi(nd, sw_c[k - 1], s.subs[k])?);
            pieces.push(Piece::Col { level: k, node: v, i: (w.subs[k] + 1, nd.q as usize), p });

            let v = n.nodes[k - 1];
            let q = row(v)?.q as usize;
            pieces.push(Piece::Row { level: k, node: v, i: (n.subs[k] + 1, q), c: (after(nw_r[k - 1]), ne_r[k - 1].0) });

            pieces.push(Piece::Row { level: k, node: s.nodes[k - 1], i: (0, s.subs[k]), c: (after(sw_r[k - 1]), se_r[k - 1].0) });
        }

        let p = (fine_cut(ee, ne_c[l], en, ne_r[l].0, n.off)?, fine_cut(ee, se_c[l], es, se_r[l].0, s.off + 1)?);
        pieces.push(Piece::FineCol { strip: E, o: (0, e.off + 1), p });
        let p = (fine_cut(ew, nw_c[l], en, nw_r[l].0, n.off)?, fine_cut(ew, sw_c[l], es, sw_r[l].0, s.off + 1)?);
        pieces.push(Piece::FineCol { strip: W, o: (w.off, ew.width()), p });
        let p = (cell_start(en, after(nw_r[l]))?, cell_start(en, ne_r[l].0)?);
        pieces.push(Piece::FineRow { strip: N, o: (n.off, en.width()), p });
        let p = (cell_start(es, after(sw_r[l]))?, cell_start(es, se_r[l].0)?);
        pieces.push(Piece::FineRow { strip: S, o: (0, s.off + 1), p });
        Ok(Plan { pieces, strips })
    }

    pub(crate) fn piece_count<T: Tally>(&self, plan: &Plan, piece: &Piece, t: &mut T) -> Result<usize> {
        t.tick();
        match *piece {
            Piece::Col { node, i, p, .. } => self.cols.get(node).and_then(|nd| nd.count(i.0, i.1, p.0, p.1)).ok_or_else(corrupt),
            Piece::Row { node, i, c, .. } => {
                if c.0 >= c.1 {
                    return Ok(0);
                }
                let nd = self.rows.get(node).ok_or_else(corrupt)?;
                let (p0, p1) = (nd.off(c.0).ok_or_else(corrupt)?, nd.off(c.1).ok_or_else(corrupt)?);
                nd.count(i.0, i.1, p0, p1).ok_or_else(corrupt)
            }
            Piece::FineCol { strip, o, p } | Piece::FineRow { strip, o, p } => {
                let e = plan.strips[strip].2;
                if o.1 > e.width() || p.1 > e.width() {
                    return Err(corrupt());
                }
                Ok(e.count(o.0, o.1, p.0, p.1))
            }
        }
    }

    /// Smallest 0-based value in the piece.
    pub(crate) fn piece_min<T: Tally>(&self, base: &FullIndex, plan: &Plan, piece: &Piece, t: &mut T) -> Result<Option<usize>> {
        t.tick();
        let n = base.n;
        let checked = |x: usize| if x < n { Ok(x) } else { Err(corrupt()) };
        match *piece {
            Piece::Col { node, i, p, .. } => {
                let nd = self.cols.get(node).ok_or_else(corrupt)?;
                let Some((sub, o)) = nd.min_col(i.0, i.1, p.0, p.1) else { return Ok(None) };
                t.tick();
                let child = self.tc.child(node, sub + 1);
                t.tick();
                let x = base.ic.select(self.tc.leaf_rank(child) + 1) - 1 + o;
                Ok(Some(base.rank(checked(x)?, t)))
            }
            Piece::Row { node, i, c, .. } => {
                let nd = self.rows.get(node).ok_or_else(corrupt)?;
                let Some((sub, o)) = nd.min_row(i.0, i.1, c.0, c.1) else { return Ok(None) };
                t.tick();
                let child = self.tr.child(node, sub + 1);
                t.tick();
                Ok(Some(checked(base.ir.select(self.tr.leaf_rank(child) + 1) - 1 + o)?))
            }
            Piece::FineCol { strip, o, p } => {
                let (_, start, e) = plan.strips[strip];
                if o.1 > e.width() || p.1 > e.width() {
                    return Err(corrupt());
                }
                let Some(c) = e.first_cross(o.0, o.1, p.0, p.1) else { return Ok(None) };
                Ok(Some(base.rank(checked(start + e.offset_of_cross(c))?, t)))
            }
            Piece::FineRow { strip, o, p } => {
                let (_, start, e) = plan.strips[strip];
                if o.1 > e.width() || p.1 > e.width() {
                    return Err(corrupt());
                }
                Ok(e.first_offset(p.0, p.1, o.0, o.1).map(|k| start + k))
            }
        }
    }
}
