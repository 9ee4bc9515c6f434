//! Balanced row/column divisions of a permutation matrix.
//!
//! [`build_hierarchy`] coarsens the trivial `n × n` division by merging
//! neighbouring rows and columns until it has passed every requested size,
//! keeping each strip sparse (few non-zero cells) and balanced.

mod merge;

pub use merge::BuildStats;

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Ragged lists stored back to back.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Csr {
    offsets: Vec<u32>,
    items: Vec<u32>,
}

impl Csr {
    pub fn from_lists<I: IntoIterator<Item = Vec<u32>>>(lists: I) -> Self {
        let mut out = Csr { offsets: vec![0], items: Vec::new() };
        for l in lists {
            out.items.extend(l);
            out.offsets.push(out.items.len() as u32);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, k: usize) -> &[u32] {
        &self.items[self.offsets[k] as usize..self.offsets[k + 1] as usize]
    }

    pub fn total(&self) -> usize {
        self.items.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        (0..self.len()).map(|k| self.get(k))
    }
}

/// One division: contiguous row and column intervals with their non-zero cells.
///
/// Internally 0-based: `row_starts[k]` is the smallest 0-based value in row
/// strip `k`. `col_cells(j)` lists the row strips meeting column strip `j` in
/// a non-zero cell, increasing; `row_cells(k)` is the transpose.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Division {
    row_starts: Vec<u32>,
    col_starts: Vec<u32>,
    row_cells: Csr,
    col_cells: Csr,
}

impl Division {
    /// Builds a division from interval starts, deriving the cells from `tau`.
    pub fn from_starts(tau: &Permutation, row_starts: Vec<u32>, col_starts: Vec<u32>) -> Self {
        let n = tau.len();
        let row_of = strip_map(&row_starts, n);
        let col_of = strip_map(&col_starts, n);
        let mut col_lists = vec![Vec::new(); col_starts.len()];
        let mut row_lists = vec![Vec::new(); row_starts.len()];
        for (i, &v) in tau.values().iter().enumerate() {
            let (r, c) = (row_of[v as usize - 1], col_of[i]);
            col_lists[c as usize].push(r);
            row_lists[r as usize].push(c);
        }
        for l in col_lists.iter_mut().chain(row_lists.iter_mut()) {
            l.sort_unstable();
            l.dedup();
        }
        Division { row_starts, col_starts, row_cells: Csr::from_lists(row_lists), col_cells: Csr::from_lists(col_lists) }
    }

    /// Number of row strips (equal to the number of column strips).
    pub fn size(&self) -> usize {
        self.row_starts.len()
    }

    pub fn row_starts(&self) -> &[u32] {
        &self.row_starts
    }

    pub fn col_starts(&self) -> &[u32] {
        &self.col_starts
    }

    pub fn row_cells(&self, k: usize) -> &[u32] {
        self.row_cells.get(k)
    }

    pub fn col_cells(&self, j: usize) -> &[u32] {
        self.col_cells.get(j)
    }

    pub fn cell_count(&self) -> usize {
        self.col_cells.total()
    }

    /// Half-open 0-based extent of row strip `k` inside `0..n`.
    pub fn row_range(&self, k: usize, n: usize) -> (usize, usize) {
        extent(&self.row_starts, k, n)
    }

    pub fn col_range(&self, j: usize, n: usize) -> (usize, usize) {
        extent(&self.col_starts, j, n)
    }

    /// Row strip holding 0-based value `v`.
    pub fn row_of(&self, v: usize) -> usize {
        self.row_starts.partition_point(|&s| s as usize <= v) - 1
    }

    pub fn col_of(&self, i: usize) -> usize {
        self.col_starts.partition_point(|&s| s as usize <= i) - 1
    }
}

fn extent(starts: &[u32], k: usize, n: usize) -> (usize, usize) {
    let lo = starts[k] as usize;
    let hi = starts.get(k + 1).map_or(n, |&s| s as usize);
    (lo, hi)
}

/// Strip index of every 0-based position.
pub fn strip_map(starts: &[u32], n: usize) -> Vec<u32> {
    let mut out = vec![0u32; n];
    for k in 0..starts.len() {
        let (lo, hi) = extent(starts, k, n);
        out[lo..hi].fill(k as u32);
    }
    out
}

/// Divisions at increasing sizes `m_1 < … < m_ℓ`, each a coarsening of the next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionHierarchy {
    pub n: usize,
    pub sizes: Vec<usize>,
    /// `divisions[i]` has `sizes[i]` rows and columns.
    pub divisions: Vec<Division>,
    /// Final sparsity parameter reached by doubling.
    pub d_max: u64,
    /// Every value `d` took after its initial 1.
    pub d_trace: Vec<u64>,
    pub delta: u64,
    pub stats: BuildStats,
}

/// Runs the merge-queue construction and snapshots the division at every
/// requested size.
pub fn build_hierarchy(tau: &Permutation, sizes: &[usize]) -> Result<DecompositionHierarchy> {
    validate_sizes(sizes, tau.len())?;
    let out = merge::run(
        tau.values(),
        sizes,
        #[cfg(test)]
        false,
    )?;
    finish(tau, sizes, out)
}

fn finish(tau: &Permutation, sizes: &[usize], out: merge::Output) -> Result<DecompositionHierarchy> {
    let h = DecompositionHierarchy {
        n: tau.len(),
        sizes: sizes.to_vec(),
        divisions: out.divisions,
        d_max: out.d_max,
        d_trace: out.d_trace,
        delta: merge::DELTA,
        stats: out.stats,
    };
    let attempts = h.stats.merges + h.stats.doublings;
    let budget = 2 * h.n as u64 + h.n as u64 * crate::succinct::ceil_lg(h.d_max) as u64;
    if attempts > budget {
        return Err(Error::Decomposition(format!("{attempts} merge attempts exceed {budget}")));
    }
    Ok(h)
}

pub fn validate_sizes(sizes: &[usize], n: usize) -> Result<()> {
    if sizes.is_empty() {
        return Err(Error::InvalidSizes("no sizes given".into()));
    }
    let mut last = 1;
    for &m in sizes {
        if m <= last || m >= n {
            return Err(Error::InvalidSizes(format!("{sizes:?} must increase strictly inside (1, {n})")));
        }
        last = m;
    }
    Ok(())
}

impl DecompositionHierarchy {
    /// All structural violations; empty when the hierarchy is sound.
    pub fn violations(&self, tau: &Permutation) -> Vec<String> {
        let n = self.n;
        let bound = 2 * self.delta as usize;
        let mut bad = Vec::new();
        if tau.len() != n {
            bad.push("permutation size differs".into());
            return bad;
        }
        for (i, div) in self.divisions.iter().enumerate() {
            let m = self.sizes[i];
            for (name, starts) in [("row", div.row_starts()), ("column", div.col_starts())] {
                if starts.len() != m {
                    bad.push(format!("division {i}: {} {name} strips, expected {m}", starts.len()));
                }
                if starts.first() != Some(&0) || starts.windows(2).any(|w| w[0] >= w[1]) || starts.last().is_some_and(|&s| s as usize >= n) {
                    bad.push(format!("division {i}: {name} starts malformed"));
                    continue;
                }
                for k in 0..starts.len() {
                    let (lo, hi) = extent(starts, k, n);
                    if (hi - lo) * m > bound * n {
                        bad.push(format!("division {i}: {name} strip {k} has size {} > {bound}n/{m}", hi - lo));
                    }
                }
            }
            let fresh = Division::from_starts(tau, div.row_starts.clone(), div.col_starts.clone());
            if fresh.row_cells != div.row_cells || fresh.col_cells != div.col_cells {
                bad.push(format!("division {i}: recorded cells differ from the points"));
            }
            for (name, csr) in [("row", &div.row_cells), ("column", &div.col_cells)] {
                for (k, cells) in csr.iter().enumerate() {
                    if cells.len() as u64 > self.d_max {
                        bad.push(format!("division {i}: {name} {k} has {} cells > dMax {}", cells.len(), self.d_max));
                    }
                }
            }
            if let Some(finer) = self.divisions.get(i + 1) {
                let mf = self.sizes[i + 1];
                for (name, coarse, fine) in [("row", div.row_starts(), finer.row_starts()), ("column", div.col_starts(), finer.col_starts())] {
                    if coarse.iter().any(|s| fine.binary_search(s).is_err()) {
                        bad.push(format!("division {i}: {name} starts are not a coarsening of division {}", i + 1));
                        continue;
                    }
                    for k in 0..coarse.len() {
                        let (lo, hi) = extent(coarse, k, n);
                        let parts = fine.partition_point(|&s| (s as usize) < hi) - fine.partition_point(|&s| (s as usize) < lo);
                        if parts * m > bound * mf {
                            bad.push(format!("division {i}: {name} strip {k} spans {parts} finer strips > {bound}·{mf}/{m}"));
                        }
                    }
                }
            }
        }
        bad
    }
}
