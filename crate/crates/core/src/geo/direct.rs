//! Merge-sort tree over positions for small inputs.

/// `levels[d]` holds the values of every aligned block of `2^d` positions,
/// each block sorted.
#[derive(Clone, Debug)]
pub struct SortedBlocks {
    levels: Vec<Vec<u32>>,
}

impl SortedBlocks {
    /// `values` is 0-based.
    pub fn build(values: &[u32]) -> Self {
        let n = values.len();
        let mut levels = vec![values.to_vec()];
        let mut width = 1;
        while width < n {
            let prev = levels.last().unwrap();
            let mut next = Vec::with_capacity(n);
            for lo in (0..n).step_by(2 * width) {
                let mid = (lo + width).min(n);
                let hi = (lo + 2 * width).min(n);
                let (mut a, mut b) = (lo, mid);
                while a < mid || b < hi {
                    if b >= hi || (a < mid && prev[a] < prev[b]) {
                        next.push(prev[a]);
                        a += 1;
                    } else {
                        next.push(prev[b]);
                        b += 1;
                    }
                }
            }
            levels.push(next);
            width *= 2;
        }
        Self { levels }
    }

    /// Calls `f` on the sorted values of the aligned blocks covering `lo..hi`.
    fn cover(&self, mut lo: usize, hi: usize, mut f: impl FnMut(&[u32])) {
        while lo < hi {
            let mut d = 0;
            while d + 1 < self.levels.len() && lo.is_multiple_of(2 << d) && lo + (2 << d) <= hi {
                d += 1;
            }
            f(&self.levels[d][lo..lo + (1 << d)]);
            lo += 1 << d;
        }
    }

    /// Points with position in `x1..=x2` and value in `y1..=y2`, 0-based.
    pub fn count(&self, x1: usize, x2: usize, y1: u32, y2: u32) -> usize {
        let mut total = 0;
        self.cover(x1, x2 + 1, |b| total += b.partition_point(|&v| v <= y2) - b.partition_point(|&v| v < y1));
        total
    }

    pub fn min(&self, x1: usize, x2: usize, y1: u32, y2: u32) -> Option<u32> {
        let mut best: Option<u32> = None;
        self.cover(x1, x2 + 1, |b| {
            if let Some(&v) = b.get(b.partition_point(|&v| v < y1)) {
                if v <= y2 && best.is_none_or(|m| v < m) {
                    best = Some(v);
                }
            }
        });
        best
    }

    pub fn bits(&self) -> u64 {
        self.levels.iter().map(|l| l.len() as u64 * 32).sum()
    }
}
