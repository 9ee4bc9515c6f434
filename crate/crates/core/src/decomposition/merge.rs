//! The merge-queue construction. Strips and cells live in arenas indexed by
//! their original position; merging keeps the left (upper) record.

use super::{Csr, Division};
use crate::error::{Error, Result};
use std::collections::VecDeque;

pub(super) const DELTA: u64 = 20;
const NIL: u32 = u32::MAX;
const ROW: usize = 0;
const COL: usize = 1;

#[derive(Clone, Copy)]
struct Strip {
    prev: u32,
    next: u32,
    cells: u32,
    first_cell: u32,
    size: u32,
    in_queue: bool,
    density: u32,
    /// Non-zero cells of this strip united with `next`; `NIL` for the last.
    cells_with_next: u32,
}

/// A non-zero cell. `link[a]` runs along the strip of axis `a`, ordered by
/// the orthogonal strip.
#[derive(Clone, Copy)]
struct Cell {
    strip: [u32; 2],
    prev: [u32; 2],
    next: [u32; 2],
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub merges: u64,
    pub doublings: u64,
    /// Cell records read or written while merging.
    pub cell_ops: u64,
    /// Strip records examined by full re-scans.
    pub strip_scans: u64,
}

pub(super) struct Output {
    pub divisions: Vec<Division>,
    pub d_max: u64,
    pub d_trace: Vec<u64>,
    pub stats: BuildStats,
}

struct Engine {
    n: u64,
    strips: [Vec<Strip>; 2],
    cells: Vec<Cell>,
    count: [u64; 2],
    queue: [VecDeque<u32>; 2],
    bucket: Vec<Vec<(usize, u32)>>,
    d: u64,
    /// `[1, m_1, …, m_ℓ, n]`.
    ext: Vec<u64>,
    phase: usize,
    stats: BuildStats,
    entries: Vec<(u32, u32, u32)>,
    touched: Vec<u32>,
    #[cfg(test)]
    verify: bool,
    #[cfg(test)]
    origin: Vec<(u32, u32)>,
}

pub(super) fn run(tau: &[u32], sizes: &[usize], #[cfg(test)] verify: bool) -> Result<Output> {
    let n = tau.len();
    let mut e = Engine::new(tau, sizes);
    #[cfg(test)]
    {
        e.verify = verify;
    }
    let mut snaps = Vec::new();
    let mut d_trace = Vec::new();
    for i in (1..n as u64).rev() {
        while e.queue[ROW].is_empty() || e.queue[COL].is_empty() {
            e.d *= 2;
            e.stats.doublings += 1;
            d_trace.push(e.d);
            if e.d > 4 * e.n {
                return Err(Error::Decomposition(format!("no mergeable pair at size {}", i + 1)));
            }
            e.requeue_all();
        }
        for axis in [ROW, COL] {
            let t = e.queue[axis].pop_front().expect("queue checked non-empty");
            e.merge(axis, t);
        }
        for (axis, s) in std::mem::take(&mut e.bucket[i as usize]) {
            let p = e.strips[axis][s as usize].prev;
            e.enqueue(axis, p);
            e.enqueue(axis, s);
        }
        if e.phase >= 1 && i == e.ext[e.phase] {
            snaps.push(e.snapshot());
            e.phase -= 1;
            for axis in [ROW, COL] {
                let mut s = 0u32;
                while s != NIL {
                    e.strips[axis][s as usize].density = 1;
                    s = e.strips[axis][s as usize].next;
                }
            }
            e.requeue_all();
        }
    }
    snaps.reverse();
    Ok(Output { divisions: snaps, d_max: e.d, d_trace, stats: e.stats })
}

impl Engine {
    fn new(tau: &[u32], sizes: &[usize]) -> Self {
        let n = tau.len();
        let mut ext = vec![1u64];
        ext.extend(sizes.iter().map(|&m| m as u64));
        ext.push(n as u64);
        let mut cells = Vec::with_capacity(n);
        for (i, &v) in tau.iter().enumerate() {
            cells.push(Cell { strip: [v - 1, i as u32], prev: [NIL; 2], next: [NIL; 2] });
        }
        let mut inv = vec![0u32; n];
        for (i, &v) in tau.iter().enumerate() {
            inv[v as usize - 1] = i as u32;
        }
        let make = |first: &dyn Fn(usize) -> u32| -> Vec<Strip> {
            (0..n)
                .map(|s| Strip {
                    prev: if s == 0 { NIL } else { s as u32 - 1 },
                    next: if s + 1 == n { NIL } else { s as u32 + 1 },
                    cells: 1,
                    first_cell: first(s),
                    size: 1,
                    in_queue: false,
                    density: 1,
                    cells_with_next: if s + 1 == n { NIL } else { 2 },
                })
                .collect()
        };
        let rows = make(&|s| inv[s]);
        let cols = make(&|s| s as u32);
        let phase = sizes.len();
        Self {
            n: n as u64,
            strips: [rows, cols],
            cells,
            count: [n as u64; 2],
            queue: [VecDeque::new(), VecDeque::new()],
            bucket: vec![Vec::new(); n + 1],
            d: 1,
            ext,
            phase,
            stats: BuildStats::default(),
            entries: Vec::new(),
            touched: Vec::new(),
            #[cfg(test)]
            verify: false,
            #[cfg(test)]
            origin: tau.iter().enumerate().map(|(i, &v)| (v - 1, i as u32)).collect(),
        }
    }

    fn tall(&self, axis: usize, s: u32) -> bool {
        self.strips[axis][s as usize].size as u64 * self.count[axis] > DELTA * self.n
    }

    fn dense(&self, axis: usize, s: u32) -> bool {
        self.strips[axis][s as usize].density as u64 * self.ext[self.phase] > DELTA * self.ext[self.phase + 1]
    }

    fn enqueue(&mut self, axis: usize, t: u32) {
        if t == NIL {
            return;
        }
        let st = self.strips[axis][t as usize];
        let u = st.next;
        if u == NIL || st.in_queue || self.strips[axis][u as usize].in_queue {
            return;
        }
        if self.tall(axis, t) || self.tall(axis, u) || self.dense(axis, t) || self.dense(axis, u) {
            return;
        }
        if st.cells_with_next as u64 > self.d {
            return;
        }
        self.strips[axis][t as usize].in_queue = true;
        self.strips[axis][u as usize].in_queue = true;
        self.queue[axis].push_back(t);
    }

    fn requeue_all(&mut self) {
        for axis in [ROW, COL] {
            let mut s = 0u32;
            while s != NIL {
                self.stats.strip_scans += 1;
                self.enqueue(axis, s);
                s = self.strips[axis][s as usize].next;
            }
        }
    }

    /// Non-zero cells of `s` united with its successor, by a merged walk.
    fn cells_with_next(&mut self, axis: usize, s: u32) -> u32 {
        let u = self.strips[axis][s as usize].next;
        if u == NIL {
            return NIL;
        }
        let orth = 1 - axis;
        let (mut a, mut b) = (self.strips[axis][s as usize].first_cell, self.strips[axis][u as usize].first_cell);
        let mut total = 0;
        while a != NIL || b != NIL {
            self.stats.cell_ops += 1;
            let oa = if a == NIL { NIL } else { self.cells[a as usize].strip[orth] };
            let ob = if b == NIL { NIL } else { self.cells[b as usize].strip[orth] };
            if oa <= ob {
                a = self.cells[a as usize].next[axis];
            }
            if ob <= oa {
                b = self.cells[b as usize].next[axis];
            }
            total += 1;
        }
        total
    }

    /// Merges `t` with its successor along `axis`.
    fn merge(&mut self, axis: usize, t: u32) {
        let orth = 1 - axis;
        let u = self.strips[axis][t as usize].next;
        debug_assert!(u != NIL);
        self.stats.merges += 1;
        let mut entries = std::mem::take(&mut self.entries);
        entries.clear();
        let (mut a, mut b) = (self.strips[axis][t as usize].first_cell, self.strips[axis][u as usize].first_cell);
        while a != NIL || b != NIL {
            self.stats.cell_ops += 1;
            let oa = if a == NIL { NIL } else { self.cells[a as usize].strip[orth] };
            let ob = if b == NIL { NIL } else { self.cells[b as usize].strip[orth] };
            let (x, ca, cb) = if oa < ob {
                (oa, a, NIL)
            } else if ob < oa {
                (ob, NIL, b)
            } else {
                (oa, a, b)
            };
            if ca != NIL {
                a = self.cells[a as usize].next[axis];
            }
            if cb != NIL {
                b = self.cells[b as usize].next[axis];
            }
            entries.push((x, ca, cb));
        }
        debug_assert!(entries.len() as u64 <= self.d);

        // Orthogonal strips lose one cell-with-next for every pair of
        // formerly separate cells that now coincide.
        let mut touched = std::mem::take(&mut self.touched);
        touched.clear();
        for idx in 0..entries.len() {
            let (x, ca, cb) = entries[idx];
            let (a1, a2) = (ca != NIL, cb != NIL);
            let xs = self.strips[orth][x as usize];
            if xs.next != NIL {
                let (b1, b2) = match entries.get(idx + 1) {
                    Some(&(y, ya, yb)) if y == xs.next => (ya != NIL, yb != NIL),
                    _ => (false, false),
                };
                let after = (a1 | a2 | b1 | b2) as u32;
                let before = (a1 | b1) as u32 + (a2 | b2) as u32;
                if after < before {
                    self.strips[orth][x as usize].cells_with_next -= before - after;
                    touched.push(x);
                }
            }
            let z = xs.prev;
            if z != NIL && a1 && a2 && !(idx > 0 && entries[idx - 1].0 == z) {
                self.strips[orth][z as usize].cells_with_next -= 1;
                touched.push(z);
            }
        }

        let mut prev_kept = NIL;
        let mut first = NIL;
        for &(x, ca, cb) in &entries {
            self.stats.cell_ops += 1;
            let keep = if ca != NIL {
                if cb != NIL {
                    let nx = self.cells[cb as usize].next[orth];
                    self.cells[ca as usize].next[orth] = nx;
                    if nx != NIL {
                        self.cells[nx as usize].prev[orth] = ca;
                    }
                    self.strips[orth][x as usize].cells -= 1;
                }
                ca
            } else {
                self.cells[cb as usize].strip[axis] = t;
                cb
            };
            self.cells[keep as usize].prev[axis] = prev_kept;
            if prev_kept == NIL {
                first = keep;
            } else {
                self.cells[prev_kept as usize].next[axis] = keep;
            }
            prev_kept = keep;
        }
        if prev_kept != NIL {
            self.cells[prev_kept as usize].next[axis] = NIL;
        }

        let us = self.strips[axis][u as usize];
        let ts = &mut self.strips[axis][t as usize];
        ts.first_cell = first;
        ts.cells = entries.len() as u32;
        ts.size += us.size;
        ts.density += us.density;
        ts.next = us.next;
        ts.in_queue = false;
        if us.next != NIL {
            self.strips[axis][us.next as usize].prev = t;
        }
        self.strips[axis][u as usize].in_queue = false;
        self.count[axis] -= 1;
        self.entries = entries;

        let cwn = self.cells_with_next(axis, t);
        self.strips[axis][t as usize].cells_with_next = cwn;
        let p = self.strips[axis][t as usize].prev;
        if p != NIL {
            let cwn = self.cells_with_next(axis, p);
            self.strips[axis][p as usize].cells_with_next = cwn;
        }

        for &x in &touched {
            self.enqueue(orth, x);
        }
        self.touched = touched;

        if self.tall(axis, t) {
            let at = (DELTA * self.n / self.strips[axis][t as usize].size as u64) as usize;
            debug_assert!((at as u64) < self.count[axis]);
            self.bucket[at].push((axis, t));
        }
        self.enqueue(axis, p);
        self.enqueue(axis, t);

        #[cfg(test)]
        if self.verify {
            self.check_records();
        }
    }

    fn snapshot(&mut self) -> Division {
        let mut ord: [Vec<u32>; 2] = [vec![NIL; self.n as usize], vec![NIL; self.n as usize]];
        let mut starts: [Vec<u32>; 2] = [Vec::new(), Vec::new()];
        for axis in [ROW, COL] {
            let mut s = 0u32;
            let mut pos = 0u32;
            while s != NIL {
                ord[axis][s as usize] = starts[axis].len() as u32;
                starts[axis].push(pos);
                pos += self.strips[axis][s as usize].size;
                s = self.strips[axis][s as usize].next;
            }
        }
        let mut lists: [Csr; 2] = [Csr::default(), Csr::default()];
        for axis in [ROW, COL] {
            let orth = 1 - axis;
            let mut csr = Csr::default();
            csr.offsets.push(0);
            let mut s = 0u32;
            while s != NIL {
                let mut c = self.strips[axis][s as usize].first_cell;
                while c != NIL {
                    csr.items.push(ord[orth][self.cells[c as usize].strip[orth] as usize]);
                    c = self.cells[c as usize].next[axis];
                }
                csr.offsets.push(csr.items.len() as u32);
                s = self.strips[axis][s as usize].next;
            }
            lists[axis] = csr;
        }
        let [row_starts, col_starts] = starts;
        let [row_cells, col_cells] = lists;
        Division { row_starts, col_starts, row_cells, col_cells }
    }

    /// Compares every linked record against a from-scratch recomputation.
    #[cfg(test)]
    fn check_records(&self) {
        use std::collections::BTreeSet;
        for axis in [ROW, COL] {
            let orth = 1 - axis;
            let mut live = Vec::new();
            let mut s = 0u32;
            while s != NIL {
                live.push(s);
                s = self.strips[axis][s as usize].next;
            }
            assert_eq!(live.len() as u64, self.count[axis]);
            let mut sets: Vec<BTreeSet<u32>> = Vec::new();
            for &s in &live {
                let mut got = Vec::new();
                let mut c = self.strips[axis][s as usize].first_cell;
                let mut last = NIL;
                while c != NIL {
                    assert_eq!(self.cells[c as usize].strip[axis], s);
                    assert_eq!(self.cells[c as usize].prev[axis], last);
                    got.push(self.cells[c as usize].strip[orth]);
                    last = c;
                    c = self.cells[c as usize].next[axis];
                }
                assert!(got.windows(2).all(|w| w[0] < w[1]), "chain out of order");
                assert_eq!(got.len() as u32, self.strips[axis][s as usize].cells);
                sets.push(got.into_iter().collect());
            }
            for (k, &s) in live.iter().enumerate() {
                let want = match sets.get(k + 1) {
                    Some(next) => sets[k].union(next).count() as u32,
                    None => NIL,
                };
                assert_eq!(self.strips[axis][s as usize].cells_with_next, want, "cellsWithNext of strip {s}");
            }
        }
        // Every point lies in exactly the cell its strips name.
        let mut found = BTreeSet::new();
        let mut s = 0u32;
        while s != NIL {
            let mut c = self.strips[ROW][s as usize].first_cell;
            while c != NIL {
                found.insert((self.cells[c as usize].strip[ROW], self.cells[c as usize].strip[COL]));
                c = self.cells[c as usize].next[ROW];
            }
            s = self.strips[ROW][s as usize].next;
        }
        let owner = |axis: usize, pos: u32| -> u32 {
            let mut s = 0u32;
            let mut start = 0u32;
            loop {
                let size = self.strips[axis][s as usize].size;
                if pos < start + size {
                    return s;
                }
                start += size;
                s = self.strips[axis][s as usize].next;
            }
        };
        let want: BTreeSet<(u32, u32)> = self.origin.iter().map(|&(r, c)| (owner(ROW, r), owner(COL, c))).collect();
        assert_eq!(found, want);
    }
}
