use super::{Pattern, Permutation};

/// Exact containment test by backtracking over index subsequences.
///
/// Each placed pattern element narrows the admissible value interval of the
/// later ones. The last element is resolved with a suffix bitset instead of
/// a scan.
pub fn contains(tau: &Permutation, pi: &Pattern) -> bool {
    let n = tau.len();
    let k = pi.len();
    if k > n {
        return false;
    }
    if k == 1 {
        return true;
    }
    let p: Vec<u32> = pi.values().to_vec();
    // For each pattern position, the earlier positions holding the nearest
    // smaller and nearest larger pattern values.
    let mut lower = vec![None; k];
    let mut upper = vec![None; k];
    for t in 1..k {
        for s in 0..t {
            if p[s] < p[t] && lower[t].is_none_or(|l: usize| p[l] < p[s]) {
                lower[t] = Some(s);
            }
            if p[s] > p[t] && upper[t].is_none_or(|u: usize| p[u] > p[s]) {
                upper[t] = Some(s);
            }
        }
    }
    let search = Search { tau: tau.values(), k, lower, upper, suffix: SuffixSets::new(tau.values()) };
    let mut chosen = vec![0usize; k];
    search.place(0, 0, &mut chosen)
}

struct Search<'a> {
    tau: &'a [u32],
    k: usize,
    lower: Vec<Option<usize>>,
    upper: Vec<Option<usize>>,
    suffix: SuffixSets,
}

impl Search<'_> {
    fn bounds(&self, t: usize, chosen: &[usize]) -> (u32, u32) {
        let lo = self.lower[t].map_or(0, |s| self.tau[chosen[s]]);
        let hi = self.upper[t].map_or(self.tau.len() as u32 + 1, |s| self.tau[chosen[s]]);
        (lo, hi)
    }

    fn place(&self, t: usize, from: usize, chosen: &mut [usize]) -> bool {
        let n = self.tau.len();
        let (lo, hi) = self.bounds(t, chosen);
        if hi <= lo + 1 {
            return false;
        }
        if t + 1 == self.k {
            return self.suffix.any_between(self.tau, from, lo, hi);
        }
        let last = n - (self.k - t);
        for j in from..=last {
            let v = self.tau[j];
            if v > lo && v < hi {
                chosen[t] = j;
                if self.place(t + 1, j + 1, chosen) {
                    return true;
                }
            }
        }
        false
    }
}

const BLOCK: usize = 64;

/// Value bitsets of every suffix starting at a multiple of [`BLOCK`].
struct SuffixSets {
    words: usize,
    sets: Vec<u64>,
}

impl SuffixSets {
    fn new(tau: &[u32]) -> Self {
        let n = tau.len();
        let words = (n + 1).div_ceil(64);
        let blocks = n.div_ceil(BLOCK) + 1;
        let mut sets = vec![0u64; blocks * words];
        for b in (0..blocks - 1).rev() {
            let (head, tail) = sets.split_at_mut((b + 1) * words);
            head[b * words..].copy_from_slice(&tail[..words]);
            for &v in &tau[b * BLOCK..((b + 1) * BLOCK).min(n)] {
                head[b * words + v as usize / 64] |= 1 << (v % 64);
            }
        }
        Self { words, sets }
    }

    /// Whether some position `>= from` holds a value strictly inside `(lo, hi)`.
    fn any_between(&self, tau: &[u32], from: usize, lo: u32, hi: u32) -> bool {
        let boundary = from.div_ceil(BLOCK) * BLOCK;
        for &v in &tau[from.min(tau.len())..boundary.min(tau.len())] {
            if v > lo && v < hi {
                return true;
            }
        }
        if boundary >= tau.len() {
            return false;
        }
        let set = &self.sets[(boundary / BLOCK) * self.words..][..self.words];
        let (a, b) = (lo as usize + 1, hi as usize);
        if a >= b {
            return false;
        }
        let (wa, wb) = (a / 64, (b - 1) / 64);
        for (w, &word) in set.iter().enumerate().take(wb + 1).skip(wa) {
            let mut mask = !0u64;
            if w == wa {
                mask &= !0u64 << (a % 64);
            }
            if w == wb {
                let top = (b - 1) % 64;
                mask &= if top == 63 { !0 } else { (1u64 << (top + 1)) - 1 };
            }
            if word & mask != 0 {
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(v: &[u32]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    fn pat(s: &str) -> Pattern {
        Pattern::parse(s).unwrap()
    }

    fn brute(tau: &[u32], pi: &[u32]) -> bool {
        let n = tau.len();
        let k = pi.len();
        if k > n {
            return false;
        }
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let ok = (0..k).all(|a| (0..k).all(|b| (tau[idx[a]] < tau[idx[b]]) == (pi[a] < pi[b])));
            if ok {
                return true;
            }
            let mut t = k;
            loop {
                if t == 0 {
                    return false;
                }
                t -= 1;
                if idx[t] < n - k + t {
                    idx[t] += 1;
                    for u in t + 1..k {
                        idx[u] = idx[u - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn small_examples() {
        assert!(contains(&perm(&[2, 3, 1]), &pat("12")));
        assert!(!contains(&perm(&[1, 2, 3]), &pat("21")));
        assert!(contains(&perm(&[5, 3, 4, 1, 2]), &pat("312")));
        assert!(!contains(&perm(&[1]), &pat("12")));
    }

    #[test]
    fn matches_brute_force_on_all_small_perms() {
        let patterns = ["231", "2413", "3142", "321", "1", "12"];
        let mut v: Vec<u32> = (1..=6).collect();
        let mut count = 0;
        // Heap's algorithm over S_6.
        let mut c = [0usize; 6];
        let check = |v: &[u32]| {
            for p in patterns {
                let p = pat(p);
                assert_eq!(contains(&perm(v), &p), brute(v, p.values()), "{v:?} {p}");
            }
        };
        check(&v);
        let mut i = 0;
        while i < 6 {
            if c[i] < i {
                if i % 2 == 0 {
                    v.swap(0, i);
                } else {
                    v.swap(c[i], i);
                }
                check(&v);
                count += 1;
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        assert_eq!(count, 719);
    }
}
