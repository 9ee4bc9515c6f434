//! Rectangle counting and rectangle minimum.
//!
//! A [`GeoIndex`] wraps a [`CompactIndex`] and adds a deeper hierarchy of
//! divisions whose finest level is the base index's fine division. Every
//! strip of every level but the finest carries a small table over its
//! substrips and the cells it meets, so a rectangle splits into a constant
//! number of table lookups per level.

mod build;
mod dense;
mod direct;
mod query;

use std::sync::OnceLock;

use self::dense::{DenseNode, Kind};
use self::direct::SortedBlocks;
use self::query::Piece;
use crate::codec::{Reader, Writer};
use crate::compact::{CompactIndex, FullIndex, Params, Repr, SpaceReport};
use crate::decomposition::{build_hierarchy, Division};
use crate::error::{Error, Result};
use crate::perm::{Permutation, QueryRect};
use crate::succinct::{BitVector, OrderedTree};
use crate::tally::{NoTally, Tally};

/// Operation counts of one rectangle query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LevelTrace {
    /// Depth of the hierarchy the query ran on.
    pub levels: usize,
    /// Tables entered: dense nodes and fine strip entries.
    pub visits: u64,
    /// Primitive lookups of any kind.
    pub lookups: u64,
    /// Pieces the rectangle was split into.
    pub pieces: usize,
}

impl Tally for LevelTrace {
    #[inline]
    fn tick(&mut self) {
        self.lookups += 1;
    }

    #[inline]
    fn visit(&mut self) {
        self.visits += 1;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PieceKind {
    Column,
    Row,
    FineColumn,
    FineRow,
}

/// A non-empty piece of a rectangle query: bounding box of the region it
/// covers (1-based, inclusive) and the points inside it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PieceInfo {
    pub kind: PieceKind,
    /// Level of the substrips the piece is made of; fine pieces sit one
    /// below the last level.
    pub level: usize,
    pub count: usize,
    pub cols: (usize, usize),
    pub rows: (usize, usize),
}

/// Level sizes for `n` with finest size `m2`: the widths shrink as
/// `w_i = ⌊w_{i-1}^{5/6}⌋` from `w_0 = n` until `n / w_i` reaches `m2`.
/// Returns `(w_0..w_ℓ, m_1..m_ℓ)`; repeated sizes are dropped.
pub fn geo_sizes(n: usize, m2: usize) -> (Vec<u64>, Vec<usize>) {
    let mut ws = vec![n as u64];
    let mut sizes = Vec::new();
    loop {
        let next = root_5_6(*ws.last().unwrap());
        ws.push(next);
        if next <= 1 || n as u64 >= m2 as u64 * next {
            sizes.push(m2);
            return (ws, sizes);
        }
        let m = n / next as usize;
        if m > 1 && m < m2 && sizes.last().is_none_or(|&p| m > p) {
            sizes.push(m);
        }
    }
}

/// Largest `r` with `r^6 ≤ w^5`.
fn root_5_6(w: u64) -> u64 {
    let fits = |r: u64| match ((r as u128).checked_pow(6), (w as u128).checked_pow(5)) {
        (Some(a), Some(b)) => a <= b,
        _ => (r as f64).powi(6) <= (w as f64).powi(5),
    };
    let mut r = (w as f64).powf(5.0 / 6.0) as u64;
    while r > 0 && !fits(r) {
        r -= 1;
    }
    while fits(r + 1) {
        r += 1;
    }
    r
}

pub(crate) struct GeoFull {
    pub w_seq: Vec<u64>,
    /// `m_1..m_ℓ`; the last equals the base fine size.
    pub sizes: Vec<usize>,
    pub tc: OrderedTree,
    pub tr: OrderedTree,
    /// One node per internal tree node, indexed by node id.
    pub cols: Vec<DenseNode>,
    pub rows: Vec<DenseNode>,
    /// `D_0..D_ℓ`, rebuilt from the trees on demand after loading.
    divisions: OnceLock<Vec<Division>>,
}

enum GeoRepr {
    Direct(SortedBlocks),
    Full(Box<GeoFull>),
}

pub struct GeoIndex {
    base: CompactIndex,
    repr: GeoRepr,
}

impl std::fmt::Debug for GeoIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GeoIndex").field("n", &self.len()).field("levels", &self.levels()).finish()
    }
}

impl GeoFull {
    pub(crate) fn levels(&self) -> usize {
        self.sizes.len()
    }

    /// Tree id of the first strip at level `k`.
    fn level_first(&self, k: usize) -> usize {
        if k == 0 {
            0
        } else {
            1 + self.sizes[..k - 1].iter().sum::<usize>()
        }
    }

    fn build(tau: &Permutation, divs: Vec<Division>) -> Result<Self> {
        let n = tau.len();
        let vals: Vec<u32> = tau.values().iter().map(|&v| v - 1).collect();
        let mut inv = vec![0u32; n];
        for (i, &v) in vals.iter().enumerate() {
            inv[v as usize] = i as u32;
        }
        let tc = build::dense_tree(&divs, true)?;
        let tr = build::dense_tree(&divs, false)?;
        let cols = build::build_nodes(&divs, Kind::Col, &vals)?;
        let rows = build::build_nodes(&divs, Kind::Row, &inv)?;
        let sizes = divs[1..].iter().map(|d| d.size()).collect();
        let divisions = OnceLock::new();
        let _ = divisions.set(divs);
        Ok(Self { w_seq: Vec::new(), sizes, tc, tr, cols, rows, divisions })
    }

    /// Start and end of the strip at tree node `v`.
    fn extent(tree: &OrderedTree, bounds: &BitVector, n: usize, v: usize) -> (usize, usize) {
        let first = tree.leaf_rank(v);
        let after = first + tree.leaves_under(v);
        let start = bounds.select(first + 1) - 1;
        let end = if after < tree.leaf_count() { bounds.select(after + 1) - 1 } else { n };
        (start, end)
    }

    /// Strip starts per level, read back from the trees.
    fn level_starts(tree: &OrderedTree, bounds: &BitVector, n: usize, levels: usize) -> Vec<Vec<u32>> {
        let mut out = vec![vec![0u32]];
        let mut frontier = vec![0usize];
        for _ in 0..levels {
            frontier = frontier.iter().flat_map(|&v| (1..=tree.degree(v)).map(move |i| (v, i))).map(|(v, i)| tree.child(v, i)).collect();
            out.push(frontier.iter().map(|&v| Self::extent(tree, bounds, n, v).0 as u32).collect());
        }
        out
    }

    fn divisions(&self, base: &CompactIndex, full: &FullIndex) -> &[Division] {
        self.divisions.get_or_init(|| {
            let tau = base.to_permutation();
            let l = self.levels();
            let cs = Self::level_starts(&self.tc, &full.ic, full.n, l);
            let rs = Self::level_starts(&self.tr, &full.ir, full.n, l);
            cs.into_iter().zip(rs).map(|(c, r)| Division::from_starts(&tau, r, c)).collect()
        })
    }

    /// Structural checks tying the trees, the nodes and the base index together.
    fn check(&self, full: &FullIndex) -> Result<()> {
        let bad = |what: String| Err(Error::Format(format!("rectangle tables: {what}")));
        let l = self.levels();
        if self.sizes.last() != Some(&full.m2) || self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return bad("level sizes".into());
        }
        for (name, tree, bounds, nodes) in [("column", &self.tc, &full.ic, &self.cols), ("row", &self.tr, &full.ir, &self.rows)] {
            let internal = tree.node_count() - tree.leaf_count();
            if tree.leaf_count() != full.m2 || nodes.len() != internal || tree.node_count() != 1 + self.sizes.iter().sum::<usize>() {
                return bad(format!("{name} tree shape"));
            }
            // Level by level: sizes match and leaves only at the last level.
            let mut frontier = vec![0usize];
            for (k, &m) in self.sizes.iter().enumerate() {
                if frontier.iter().any(|&v| tree.is_leaf(v)) {
                    return bad(format!("{name} tree leaf above level {}", k + 1));
                }
                frontier = frontier.iter().flat_map(|&v| (1..=tree.degree(v)).map(move |i| (v, i))).map(|(v, i)| tree.child(v, i)).collect();
                if frontier.len() != m {
                    return bad(format!("{name} tree level {} has {} strips", k + 1, frontier.len()));
                }
            }
            if frontier.iter().any(|&v| !tree.is_leaf(v)) {
                return bad(format!("{name} tree deeper than {l} levels"));
            }
            for (v, node) in nodes.iter().enumerate() {
                let (start, end) = Self::extent(tree, bounds, full.n, v);
                if node.q as usize != tree.degree(v) || node.total() != end - start {
                    return bad(format!("{name} node {v} does not match its strip"));
                }
                let vv = node.v as usize;
                for i in 0..node.q as usize {
                    let child = tree.child(v, i + 1);
                    let (cs, ce) = Self::extent(tree, bounds, full.n, child);
                    let cells = if tree.is_leaf(child) {
                        let f = tree.leaf_rank(child);
                        if name == "column" {
                            full.col_entry(&full.col_strip(f, cs, &mut NoTally)).cell_count()
                        } else {
                            full.row_entry(&full.row_strip(f, cs, &mut NoTally)).cell_count()
                        }
                    } else {
                        nodes[child].cells as usize
                    };
                    if node.ne(i, vv) != Some(cells) || node.count(i, i + 1, 0, vv) != Some(ce - cs) {
                        return bad(format!("{name} node {v} substrip {i} does not match its child"));
                    }
                    for p in 0..vv {
                        let o = node.minoff[i * vv + p];
                        if node.non_empty(i, p) == Some(true) && o as usize >= ce - cs {
                            return bad(format!("{name} node {v} minimum outside substrip {i}"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

impl GeoIndex {
    pub fn build(tau: &Permutation) -> Result<Self> {
        let params = Params::for_len(tau.len());
        if !params.is_two_level() {
            let base = CompactIndex::build_with(tau, params)?;
            let vals: Vec<u32> = tau.values().iter().map(|&v| v - 1).collect();
            return Ok(Self { base, repr: GeoRepr::Direct(SortedBlocks::build(&vals)) });
        }
        let (w_seq, sizes) = geo_sizes(tau.len(), params.m2);
        let mut all = sizes.clone();
        all.push(params.m1);
        all.sort_unstable();
        all.dedup();
        let h = build_hierarchy(tau, &all)?;
        let at = |m: usize| all.iter().position(|&x| x == m).expect("size requested");
        let base = CompactIndex::from_hierarchy(tau, &h, at(params.m1), at(params.m2), params)?;
        let mut divs = vec![Division::from_starts(tau, vec![0], vec![0])];
        divs.extend(sizes.iter().map(|&m| h.divisions[at(m)].clone()));
        let mut geo = GeoFull::build(tau, divs)?;
        geo.w_seq = w_seq;
        Ok(Self { base, repr: GeoRepr::Full(Box::new(geo)) })
    }

    pub fn base(&self) -> &CompactIndex {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    /// Depth `ℓ` of the hierarchy; zero for small inputs answered directly.
    pub fn levels(&self) -> usize {
        match &self.repr {
            GeoRepr::Direct(_) => 0,
            GeoRepr::Full(g) => g.levels(),
        }
    }

    /// `m_1..m_ℓ`.
    pub fn sizes(&self) -> &[usize] {
        match &self.repr {
            GeoRepr::Direct(_) => &[],
            GeoRepr::Full(g) => &g.sizes,
        }
    }

    /// `w_0..w_ℓ` as computed before repeated sizes were dropped.
    pub fn width_sequence(&self) -> &[u64] {
        match &self.repr {
            GeoRepr::Direct(_) => &[],
            GeoRepr::Full(g) => &g.w_seq,
        }
    }

    /// `D_0..D_ℓ`: the trivial division followed by every level. Rebuilt
    /// from the trees on first use after loading.
    pub fn divisions(&self) -> &[Division] {
        match self.full() {
            Some((g, f)) => g.divisions(&self.base, f),
            None => &[],
        }
    }

    fn full(&self) -> Option<(&GeoFull, &FullIndex)> {
        match (&self.repr, &self.base.repr) {
            (GeoRepr::Full(g), Repr::Full(f)) => Some((g, f)),
            _ => None,
        }
    }

    fn zero_based(&self, r: &QueryRect) -> Result<(usize, usize, usize, usize)> {
        r.validate(self.len())?;
        Ok((r.col_lo - 1, r.col_hi - 1, r.row_lo - 1, r.row_hi - 1))
    }

    /// Points `(i, τ(i))` inside the rectangle.
    pub fn rect_count(&self, r: &QueryRect) -> Result<usize> {
        Ok(self.rect_count_traced(r)?.0)
    }

    pub fn rect_count_traced(&self, r: &QueryRect) -> Result<(usize, LevelTrace)> {
        let (x1, x2, y1, y2) = self.zero_based(r)?;
        let mut t = LevelTrace { levels: self.levels(), ..Default::default() };
        let Some((g, f)) = self.full() else {
            let GeoRepr::Direct(d) = &self.repr else { unreachable!() };
            t.tick();
            return Ok((d.count(x1, x2, y1 as u32, y2 as u32), t));
        };
        let plan = g.plan(f, x1, x2, y1, y2, &mut t)?;
        t.pieces = plan.pieces.len();
        let mut total = 0;
        for p in &plan.pieces {
            total += g.piece_count(&plan, p, &mut t)?;
        }
        Ok((total, t))
    }

    /// Smallest value inside the rectangle.
    pub fn rect_min(&self, r: &QueryRect) -> Result<Option<usize>> {
        Ok(self.rect_min_traced(r)?.0)
    }

    pub fn rect_min_traced(&self, r: &QueryRect) -> Result<(Option<usize>, LevelTrace)> {
        let (x1, x2, y1, y2) = self.zero_based(r)?;
        let mut t = LevelTrace { levels: self.levels(), ..Default::default() };
        let Some((g, f)) = self.full() else {
            let GeoRepr::Direct(d) = &self.repr else { unreachable!() };
            t.tick();
            return Ok((d.min(x1, x2, y1 as u32, y2 as u32).map(|v| v as usize + 1), t));
        };
        let plan = g.plan(f, x1, x2, y1, y2, &mut t)?;
        t.pieces = plan.pieces.len();
        let mut best: Option<usize> = None;
        for p in &plan.pieces {
            if let Some(v) = g.piece_min(f, &plan, p, &mut t)? {
                best = Some(best.map_or(v, |b| b.min(v)));
            }
        }
        Ok((best.map(|v| v + 1), t))
    }

    /// The non-empty pieces a rectangle query is split into. Small inputs
    /// answered directly give a single piece.
    pub fn pieces(&self, r: &QueryRect) -> Result<Vec<PieceInfo>> {
        let (x1, x2, y1, y2) = self.zero_based(r)?;
        let Some((g, f)) = self.full() else {
            let count = self.rect_count(r)?;
            let whole = PieceInfo { kind: PieceKind::FineColumn, level: 0, count, cols: (r.col_lo, r.col_hi), rows: (r.row_lo, r.row_hi) };
            return Ok(if count > 0 { vec![whole] } else { Vec::new() });
        };
        let divs = g.divisions(&self.base, f);
        let n = f.n;
        let plan = g.plan(f, x1, x2, y1, y2, &mut NoTally)?;
        let mut out = Vec::new();
        for p in &plan.pieces {
            let count = g.piece_count(&plan, p, &mut NoTally)?;
            if count == 0 {
                continue;
            }
            let info = match *p {
                Piece::Col { level, node, i, p: (p1, p2) } => {
                    let d = &divs[level];
                    let (j, rows) = Self::node_cross(g, divs, &g.tc, n, node, level, true, p1, p2);
                    let lo = d.col_range(j + i.0, n).0;
                    let hi = d.col_range(j + i.1 - 1, n).1;
                    PieceInfo { kind: PieceKind::Column, level, count, cols: (lo + 1, hi), rows }
                }
                Piece::Row { level, node, i, c } => {
                    let nd = &g.rows[node];
                    let (p1, p2) = (nd.off(c.0).unwrap_or(0), nd.off(c.1).unwrap_or(0));
                    let d = &divs[level];
                    let (j, cols) = Self::node_cross(g, divs, &g.tr, n, node, level, false, p1, p2);
                    let lo = d.row_range(j + i.0, n).0;
                    let hi = d.row_range(j + i.1 - 1, n).1;
                    PieceInfo { kind: PieceKind::Row, level, count, cols, rows: (lo + 1, hi) }
                }
                Piece::FineCol { strip, o, p } => {
                    let (_, start, e) = plan.strips[strip];
                    let value = |c: usize| self.base.rank(start + e.offset_of_cross(c) + 1);
                    PieceInfo {
                        kind: PieceKind::FineColumn,
                        level: g.levels() + 1,
                        count,
                        cols: (start + o.0 + 1, start + o.1),
                        rows: (value(p.0)?, value(p.1 - 1)?),
                    }
                }
                Piece::FineRow { strip, o, p } => {
                    let (_, start, e) = plan.strips[strip];
                    let col = |c: usize| self.base.unrank(start + e.offset_of_cross(c) + 1);
                    PieceInfo { kind: PieceKind::FineRow, level: g.levels() + 1, count, cols: (col(p.0)?, col(p.1 - 1)?), rows: (start + o.0 + 1, start + o.1) }
                }
            };
            out.push(info);
        }
        Ok(out)
    }

    /// For a node at level `level - 1`: index of its first child among the
    /// level strips, and the 1-based cross range spanned by positions
    /// `p1..p2` (non-empty).
    #[allow(clippy::too_many_arguments)]
    fn node_cross(
        g: &GeoFull,
        divs: &[Division],
        tree: &OrderedTree,
        n: usize,
        node: usize,
        level: usize,
        cols: bool,
        p1: usize,
        p2: usize,
    ) -> (usize, (usize, usize)) {
        let (pd, qd) = (&divs[level - 1], &divs[level]);
        let j = node - g.level_first(level - 1);
        let first_child = tree.child(node, 1) - g.level_first(level);
        let cells = build::own_cells(pd, cols, j);
        let off = if cols { &g.cols[node].off } else { &g.rows[node].off };
        let (cross_p, cross_q) = (build::cross(pd, cols), build::cross(qd, cols));
        let strip_at = |p: usize| {
            let c = off.partition_point(|&o| o as usize <= p) - 1;
            let r = cells[c] as usize;
            cross_q.partition_point(|&s| s < cross_p[r]) + p - off[c] as usize
        };
        let lo = cross_q[strip_at(p1)] as usize;
        let hi = cross_q.get(strip_at(p2 - 1) + 1).map_or(n, |&s| s as usize);
        (first_child, (lo + 1, hi))
    }

    /// Invariants of the rectangle tables against the base index.
    pub fn check_nodes(&self) -> Result<()> {
        match self.full() {
            Some((g, f)) => g.check(f),
            None => Ok(()),
        }
    }

    pub fn space(&self) -> SpaceReport {
        let mut r = self.base.space();
        match &self.repr {
            GeoRepr::Direct(d) => r.push("geo.blocks", d.bits(), d.bits(), false),
            GeoRepr::Full(g) => {
                let Repr::Full(f) = &self.base.repr else { return r };
                let t = g.tc.size();
                r.push("geo.col_tree", t.physical, t.model, false);
                let t = g.tr.size();
                r.push("geo.row_tree", t.physical, t.model, false);
                for (name, kind, tree, bounds, nodes) in
                    [("geo.col_nodes", Kind::Col, &g.tc, &f.ic, &g.cols), ("geo.row_nodes", Kind::Row, &g.tr, &f.ir, &g.rows)]
                {
                    let (mut phys, mut model) = (0, 0);
                    for (v, nd) in nodes.iter().enumerate() {
                        let widest = (1..=tree.degree(v))
                            .map(|i| {
                                let (s, e) = GeoFull::extent(tree, bounds, f.n, tree.child(v, i));
                                e - s
                            })
                            .max()
                            .unwrap_or(0);
                        phys += nd.physical_bits();
                        model += nd.model_bits(kind, widest as u64, nd.total() as u64);
                    }
                    r.push(name, phys, model, false);
                }
            }
        }
        r
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.base.write_header(&mut w, true);
        self.base.write_body(&mut w);
        w.section(|w| match &self.repr {
            GeoRepr::Direct(_) => w.u64(0),
            GeoRepr::Full(g) => {
                w.u64(g.levels() as u64);
                w.u64s(&g.w_seq);
                w.u64s(&g.sizes.iter().map(|&m| m as u64).collect::<Vec<_>>());
                g.tc.encode(w);
                g.tr.encode(w);
                for nodes in [&g.cols, &g.rows] {
                    w.u64(nodes.len() as u64);
                    for nd in nodes {
                        nd.encode(w);
                    }
                }
            }
        });
        crate::codec::seal(w.into_bytes())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(crate::codec::unseal(bytes)?);
        let (base, geo) = CompactIndex::read(&mut r)?;
        if !geo {
            return Err(Error::NoGeo);
        }
        let repr = r.section(|r| {
            let l = r.u64()? as usize;
            match &base.repr {
                Repr::Direct(d) => {
                    if l != 0 {
                        return Err(Error::Format("levels given for a direct index".into()));
                    }
                    Ok(GeoRepr::Direct(SortedBlocks::build(d.values())))
                }
                Repr::Full(_) => {
                    let w_seq = r.u64s()?;
                    let sizes: Vec<usize> = r.u64s()?.into_iter().map(|m| m as usize).collect();
                    if l == 0 || sizes.len() != l {
                        return Err(Error::Format("level count mismatch".into()));
                    }
                    let tc = OrderedTree::decode(r)?;
                    let tr = OrderedTree::decode(r)?;
                    let mut read_nodes = |kind: Kind| -> Result<Vec<DenseNode>> {
                        let count = r.u64()? as usize;
                        if count > tc.node_count().max(tr.node_count()) {
                            return Err(Error::Format("too many nodes".into()));
                        }
                        (0..count).map(|_| DenseNode::decode(r, kind)).collect()
                    };
                    let cols = read_nodes(Kind::Col)?;
                    let rows = read_nodes(Kind::Row)?;
                    Ok(GeoRepr::Full(Box::new(GeoFull { w_seq, sizes, tc, tr, cols, rows, divisions: OnceLock::new() })))
                }
            }
        })?;
        r.finish()?;
        let idx = Self { base, repr };
        idx.check_nodes()?;
        Ok(idx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::strip_map;
    use crate::perm::{generate_avoiding, Family};

    /// Every table entry of every node against a scan of its own cells.
    #[test]
    fn nodes_match_brute_force() {
        for f in [Family::Avoid231, Family::Separable, Family::InterleavedRuns(3)] {
            let tau = generate_avoiding(f, 1 << 11, 7);
            let idx = GeoIndex::build(&tau).unwrap();
            let (g, _) = idx.full().unwrap();
            let divs = idx.divisions();
            let n = tau.len();
            let vals: Vec<u32> = tau.values().iter().map(|&v| v - 1).collect();
            for k in 1..divs.len() {
                let (pd, qd) = (&divs[k - 1], &divs[k]);
                let qcol = strip_map(qd.col_starts(), n);
                let qrow = strip_map(qd.row_starts(), n);
                let prow = strip_map(pd.row_starts(), n);
                for j in 0..pd.size() {
                    let node = &g.cols[g.level_first(k - 1) + j];
                    let (lo, hi) = pd.col_range(j, n);
                    let sub0 = qcol[lo] as usize;
                    // Position of each level-k row inside the node.
                    let mut pos = std::collections::HashMap::new();
                    let mut acc = 0;
                    for &r in pd.col_cells(j) {
                        let (rlo, rhi) = pd.row_range(r as usize, n);
                        for kr in qrow[rlo] as usize..=qrow[rhi - 1] as usize {
                            pos.insert(kr, acc);
                            acc += 1;
                        }
                    }
                    assert_eq!(node.v as usize, acc);
                    let mut grid = vec![vec![(0usize, u32::MAX); acc]; node.q as usize];
                    for x in lo..hi {
                        let y = vals[x] as usize;
                        assert!(pd.col_cells(j).contains(&prow[y]));
                        let cell = &mut grid[qcol[x] as usize - sub0][pos[&(qrow[y] as usize)]];
                        cell.0 += 1;
                        cell.1 = cell.1.min(y as u32);
                    }
                    for (i, row) in grid.iter().enumerate() {
                        let mut ne = 0;
                        for (p, &(c, _)) in row.iter().enumerate() {
                            assert_eq!(node.ne(i, p), Some(ne));
                            assert_eq!(node.count(i, i + 1, p, p + 1), Some(c));
                            ne += (c > 0) as usize;
                        }
                    }
                    // Minimum over every substrip range and position range.
                    for i1 in 0..grid.len() {
                        for i2 in i1 + 1..=grid.len() {
                            for p1 in 0..acc {
                                let p2 = (p1 + 3).min(acc);
                                let want = (i1..i2).flat_map(|i| grid[i][p1..p2].iter()).map(|c| c.1).min().filter(|&m| m != u32::MAX);
                                let got = node.min_col(i1, i2, p1, p2).map(|(i, o)| {
                                    let (s, _) = qd.col_range(sub0 + i1 + (i - i1), n);
                                    vals[s + o]
                                });
                                assert_eq!(got, want, "node {j} at level {k}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sizes_follow_the_width_sequence() {
        let n = 1 << 18;
        let m2 = Params::for_len(n).m2;
        let (w, m) = geo_sizes(n, m2);
        assert_eq!(w[0], n as u64);
        assert!(w.windows(2).all(|p| (p[1] as u128).pow(6) <= (p[0] as u128).pow(5) && (p[1] as u128 + 1).pow(6) > (p[0] as u128).pow(5)));
        assert_eq!(*m.last().unwrap(), m2);
        assert!(m.windows(2).all(|p| p[0] < p[1]));
    }
}
