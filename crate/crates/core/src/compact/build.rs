//! Construction of the two-level index from a coarse and a fine division.

use super::full::FullIndex;
use super::layout::{Fields, RootCell, StripStructure, SubCell, SubInput};
use crate::decomposition::{strip_map, Division};
use crate::error::{Error, Result};
use crate::gridded::{GriddedPermTable, GriddedPermutation};
use crate::perm::Permutation;
use crate::succinct::{bits_for, BitVector, OrderedTree, RangeMinIndex};

/// Leftmost index in a range holding a value below a threshold.
struct LeftmostBelow {
    size: usize,
    min: Vec<u32>,
}

impl LeftmostBelow {
    fn new(vals: &[u32]) -> Self {
        let size = vals.len().next_power_of_two();
        let mut min = vec![u32::MAX; 2 * size];
        min[size..size + vals.len()].copy_from_slice(vals);
        for i in (1..size).rev() {
            min[i] = min[2 * i].min(min[2 * i + 1]);
        }
        Self { size, min }
    }

    fn find(&self, lo: usize, hi: usize, thr: u32) -> Option<usize> {
        self.go(1, 0, self.size, lo, hi, thr)
    }

    fn go(&self, v: usize, nl: usize, nr: usize, lo: usize, hi: usize, thr: u32) -> Option<usize> {
        if nr <= lo || hi <= nl || self.min[v] >= thr {
            return None;
        }
        if nr - nl == 1 {
            return Some(nl);
        }
        let mid = (nl + nr) / 2;
        self.go(2 * v, nl, mid, lo, hi, thr).or_else(|| self.go(2 * v + 1, mid, nr, lo, hi, thr))
    }
}

/// One axis of a division pair: strips along it and the cells they meet.
struct Axis<'a> {
    coarse: &'a Division,
    fine: &'a Division,
    cols: bool,
}

impl<'a> Axis<'a> {
    fn starts(&self, d: &'a Division) -> &'a [u32] {
        if self.cols {
            d.col_starts()
        } else {
            d.row_starts()
        }
    }

    fn own(&self, d: &'a Division, j: usize) -> &'a [u32] {
        if self.cols {
            d.col_cells(j)
        } else {
            d.row_cells(j)
        }
    }

    fn cross(&self, d: &'a Division, k: usize) -> &'a [u32] {
        if self.cols {
            d.row_cells(k)
        } else {
            d.col_cells(k)
        }
    }

    fn cross_starts(&self, d: &'a Division) -> &'a [u32] {
        if self.cols {
            d.row_starts()
        } else {
            d.col_starts()
        }
    }
}

fn index_of(list: &[u32], x: u32) -> u32 {
    list.binary_search(&x).expect("cell lists are transposes") as u32
}

/// First fine strip of every coarse strip.
fn first_fine(coarse: &[u32], fine: &[u32]) -> Result<Vec<u32>> {
    coarse
        .iter()
        .map(|s| fine.binary_search(s).map(|i| i as u32))
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Decomposition("fine division does not refine the coarse one".into()))
}

/// Interns the gridded permutation of every fine strip along `axis`.
fn intern_strips(coords: &[u32], starts: &[u32], cross_map: &[u32], table: &mut GriddedPermTable) -> Result<Vec<u32>> {
    let n = coords.len();
    let mut ids = Vec::with_capacity(starts.len());
    let mut order: Vec<u32> = Vec::new();
    for k in 0..starts.len() {
        let lo = starts[k] as usize;
        let hi = starts.get(k + 1).map_or(n, |&s| s as usize);
        let pts = &coords[lo..hi];
        order.clear();
        order.extend(0..pts.len() as u32);
        order.sort_unstable_by_key(|&i| pts[i as usize]);
        let mut perm = vec![0u16; pts.len()];
        let mut cells: Vec<u16> = Vec::new();
        let mut last = u32::MAX;
        for (p, &i) in order.iter().enumerate() {
            perm[i as usize] = p as u16;
            let c = cross_map[pts[i as usize] as usize];
            if c != last {
                cells.push(0);
                last = c;
            }
            *cells.last_mut().unwrap() += 1;
        }
        ids.push(table.intern(GriddedPermutation::from_zero_based(perm, cells))?);
    }
    Ok(ids)
}

/// Per-cell offset callback: `(coarse strip, fine strip, cell, crossing strip)`.
type CellOffsets<'a> = &'a mut dyn FnMut(usize, usize, usize, u32) -> (u64, u64, u64);

fn structure(
    axis: &Axis,
    n: usize,
    slots: u64,
    table: &GriddedPermTable,
    ids: &[u32],
    mut ns: Option<CellOffsets>,
    ns_widths: (u32, u32, u32),
) -> Result<StripStructure> {
    let (coarse, fine) = (axis.coarse, axis.fine);
    let fs = axis.starts(fine);
    let cs = axis.starts(coarse);
    let first = first_fine(cs, fs)?;
    let cross_first = first_fine(axis.cross_starts(coarse), axis.cross_starts(fine))?;
    let cross_parent = strip_map(axis.cross_starts(coarse), n);
    let cross_starts = axis.cross_starts(fine);
    let m1 = cs.len();
    let m2 = fs.len();
    let mut roots = Vec::with_capacity(m1);
    let mut nodes = Vec::with_capacity(m1);
    let mut q_max = 1usize;
    for big in 0..m1 {
        let f_lo = first[big] as usize;
        let f_hi = first.get(big + 1).map_or(m2, |&x| x as usize);
        q_max = q_max.max(f_hi - f_lo);
        let own_coarse = axis.own(coarse, big);
        let mut rc = Vec::with_capacity(own_coarse.len());
        for (c1, &other) in own_coarse.iter().enumerate() {
            let ns5 = ns.as_mut().map_or(0, |f| f(big, usize::MAX, c1, other).2);
            rc.push(RootCell { cross_rank: index_of(axis.cross(coarse, other as usize), big as u32), cross_top: other, ns5 });
        }
        roots.push(rc);
        let mut subs = Vec::with_capacity(f_hi - f_lo);
        for (f, &id) in ids.iter().enumerate().take(f_hi).skip(f_lo) {
            let mut cells = Vec::new();
            for (c, &g) in axis.own(fine, f).iter().enumerate() {
                let g_big = cross_parent[cross_starts[g as usize] as usize];
                let (ns3, ns4, _) = ns.as_mut().map_or((0, 0, 0), |h| h(big, f, c, g));
                cells.push(SubCell {
                    cross_rank: index_of(axis.cross(fine, g as usize), f as u32),
                    cross_sub: g - cross_first[g_big as usize],
                    parent: index_of(own_coarse, g_big),
                    ns3,
                    ns4,
                });
            }
            if cells.len() as u64 > slots {
                return Err(Error::Decomposition(format!("strip with {} cells exceeds {slots}", cells.len())));
            }
            let w = table.entry(id).width();
            subs.push(SubInput { cells, width: w as u32, local: table.local_index(id) });
        }
        nodes.push(subs);
    }
    // Children per coarse strip on the other axis bound the cross sub-rank.
    let cross_q = cross_first
        .iter()
        .enumerate()
        .map(|(j, &x)| cross_first.get(j + 1).map_or(axis.cross_starts(fine).len(), |&y| y as usize) - x as usize)
        .max()
        .unwrap_or(1);
    let max_w = table.max_width();
    let fields = Fields {
        top: m1 as u64,
        slots,
        w_rank: bits_for(slots.saturating_sub(1)),
        w_top: bits_for(m1 as u64 - 1),
        w_sub: bits_for(cross_q as u64 - 1),
        w_q: bits_for(q_max as u64),
        w_off_root: 0,
        w_off_node: 0,
        extra: ns.is_some(),
        w_ns3: ns_widths.0,
        w_ns4: ns_widths.1,
        w_ns5: ns_widths.2,
        index_bits: (0..=max_w).map(|w| table.index_bits(w)).collect(),
    };
    Ok(StripStructure::build(fields, &roots, &nodes))
}

pub(crate) fn build_full(tau: &Permutation, coarse: &Division, fine: &Division, d_max: u64, width_cap: usize) -> Result<FullIndex> {
    let n = tau.len();
    let vals: Vec<u32> = tau.values().iter().map(|&v| v - 1).collect();
    let mut inv = vec![0u32; n];
    for (i, &v) in vals.iter().enumerate() {
        inv[v as usize] = i as u32;
    }
    let (m1, m2) = (coarse.size(), fine.size());
    let fine_row = strip_map(fine.row_starts(), n);
    let fine_col = strip_map(fine.col_starts(), n);
    let mut col_table = GriddedPermTable::new(width_cap);
    let mut row_table = GriddedPermTable::new(width_cap);
    let col_ids = intern_strips(&vals, fine.col_starts(), &fine_row, &mut col_table)?;
    let row_ids = intern_strips(&inv, fine.row_starts(), &fine_col, &mut row_table)?;

    let actual = (0..m2).map(|j| fine.col_cells(j).len().max(fine.row_cells(j).len())).max().unwrap_or(1);
    let actual = (0..m1).map(|j| coarse.col_cells(j).len().max(coarse.row_cells(j).len())).fold(actual, usize::max);
    let slots = d_max.max(actual as u64);

    let tree = |cs: &[u32], fs: &[u32]| -> Result<OrderedTree> {
        let first = first_fine(cs, fs)?;
        let mut deg = Vec::with_capacity(1 + m1 + m2);
        deg.push(m1 as u32);
        for j in 0..m1 {
            deg.push(first.get(j + 1).map_or(m2 as u32, |&x| x) - first[j]);
        }
        deg.resize(1 + m1 + m2, 0);
        OrderedTree::from_degrees(deg)
    };
    let tc = tree(coarse.col_starts(), fine.col_starts())?;
    let tr = tree(coarse.row_starts(), fine.row_starts())?;
    let ic = BitVector::from_positions(n, fine.col_starts().iter().map(|&s| s as usize + 1));
    let ir = BitVector::from_positions(n, fine.row_starts().iter().map(|&s| s as usize + 1));

    // Next-smaller candidates outside the fine column.
    let lb = LeftmostBelow::new(&vals);
    let end = |starts: &[u32], j: usize| starts.get(j + 1).map_or(n, |&s| s as usize);
    let coarse_row_of = strip_map(coarse.row_starts(), n);
    let (fcs, frs, ccs, crs) = (fine.col_starts(), fine.row_starts(), coarse.col_starts(), coarse.row_starts());
    let mut max_cw = 1usize;
    let mut max_rh = 1usize;
    for j in 0..m1 {
        max_cw = max_cw.max(end(ccs, j) - ccs[j] as usize);
        max_rh = max_rh.max(end(crs, j) - crs[j] as usize);
    }
    // ns4 per fine column, filled lazily one column at a time.
    let mut ns4_col = usize::MAX;
    let mut ns4_vals: Vec<u64> = Vec::new();
    let mut ns = |big: usize, f: usize, c: usize, other: u32| -> (u64, u64, u64) {
        if f == usize::MAX {
            let hit = lb.find(end(ccs, big), n, crs[other as usize]);
            return (0, 0, hit.map_or(0, |x| x as u64 + 1));
        }
        let g = other as usize;
        let col_end = end(fcs, f);
        let big_end = end(ccs, big);
        let ns3 = lb.find(col_end, big_end, frs[g]).map_or(0, |x| (x - ccs[big] as usize) as u64 + 1);
        if ns4_col != f {
            ns4_col = f;
            ns4_vals.clear();
            let cells = fine.col_cells(f);
            let mut i = 0;
            while i < cells.len() {
                let big_row = coarse_row_of[frs[cells[i] as usize] as usize] as usize;
                let lo = crs[big_row] as usize;
                let mut best: Option<usize> = None;
                let mut y = lo;
                while i < cells.len() && coarse_row_of[frs[cells[i] as usize] as usize] as usize == big_row {
                    let stop = frs[cells[i] as usize] as usize;
                    while y < stop {
                        let x = inv[y] as usize;
                        if x >= col_end && best.is_none_or(|b| x < inv[b] as usize) {
                            best = Some(y);
                        }
                        y += 1;
                    }
                    ns4_vals.push(best.map_or(0, |b| (b - lo) as u64 + 1));
                    i += 1;
                }
            }
        }
        (ns3, ns4_vals[c], 0)
    };
    let col_axis = Axis { coarse, fine, cols: true };
    let row_axis = Axis { coarse, fine, cols: false };
    let widths = (bits_for(max_cw as u64), bits_for(max_rh as u64), bits_for(n as u64));
    let gc = structure(&col_axis, n, slots, &col_table, &col_ids, Some(&mut ns), widths)?;
    let gr = structure(&row_axis, n, slots, &row_table, &row_ids, None, (0, 0, 0))?;

    let mins: Vec<u32> = (0..m2).map(|f| vals[fcs[f] as usize..end(fcs, f)].iter().copied().min().unwrap()).collect();
    let col_min = RangeMinIndex::build(&mins);
    Ok(FullIndex { n, m1, m2, d_max, tc, tr, ic, ir, gc, gr, col_table, row_table, col_min })
}
