use super::{Pattern, Permutation};
use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;

/// Input families for tests and benchmarks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Preorder of a uniformly random binary search tree; avoids 231.
    Avoid231,
    /// Random signed binary tree; avoids 2413 and 3142.
    Separable,
    /// Union of `k` increasing runs; avoids `(k+1)…1`.
    InterleavedRuns(usize),
    Identity,
    Reverse,
    UniformRandom,
}

impl Family {
    /// Patterns every output of this family avoids.
    pub fn avoided(&self) -> Vec<Pattern> {
        let p = |s: &str| Pattern::parse(s).expect("static pattern");
        match *self {
            Family::Avoid231 => vec![p("231")],
            Family::Separable => vec![p("2413"), p("3142")],
            Family::InterleavedRuns(k) => vec![Pattern::decreasing(k + 1)],
            Family::Identity => vec![p("21")],
            Family::Reverse => vec![p("12")],
            Family::UniformRandom => vec![],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Avoid231 => write!(f, "avoid231"),
            Family::Separable => write!(f, "separable"),
            Family::InterleavedRuns(k) => write!(f, "interleavedRuns({k})"),
            Family::Identity => write!(f, "identity"),
            Family::Reverse => write!(f, "reverse"),
            Family::UniformRandom => write!(f, "uniformRandom"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let runs = lower
            .strip_prefix("interleavedruns(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| lower.strip_prefix("interleaved-runs:"))
            .or_else(|| lower.strip_prefix("runs"));
        if let Some(k) = runs {
            return match k.parse::<usize>() {
                Ok(k) if k >= 1 => Ok(Family::InterleavedRuns(k)),
                _ => Err(Error::UnknownFamily(s.to_string())),
            };
        }
        match lower.as_str() {
            "avoid231" => Ok(Family::Avoid231),
            "separable" => Ok(Family::Separable),
            "identity" => Ok(Family::Identity),
            "reverse" => Ok(Family::Reverse),
            "uniformrandom" | "random" => Ok(Family::UniformRandom),
            _ => Err(Error::UnknownFamily(s.to_string())),
        }
    }
}

/// Deterministic generator: the same family, size and seed give the same output.
pub fn generate_avoiding(family: Family, n: usize, seed: u64) -> Permutation {
    assert!(n >= 1, "permutation size must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = match family {
        Family::Identity => (1..=n as u32).collect(),
        Family::Reverse => (1..=n as u32).rev().collect(),
        Family::UniformRandom => {
            let mut v: Vec<u32> = (1..=n as u32).collect();
            v.shuffle(&mut rng);
            v
        }
        Family::Avoid231 => bst_preorder(n, &mut rng),
        Family::Separable => separable(n, &mut rng),
        Family::InterleavedRuns(k) => interleaved_runs(n, k, &mut rng),
    };
    Permutation::new(values).expect("generators emit bijections")
}

const NIL: u32 = u32::MAX;

/// Full binary tree with `internal` internal nodes, uniform over shapes.
/// Returns child links; node 0 is the root.
fn remy(internal: usize, rng: &mut impl Rng) -> Vec<[u32; 2]> {
    let total = 2 * internal + 1;
    let mut kids = vec![[NIL; 2]; total];
    let mut parent = vec![NIL; total];
    let mut root = 0u32;
    let mut count = 1usize;
    for _ in 0..internal {
        let x = rng.gen_range(0..count) as u32;
        let y = count as u32;
        let z = count as u32 + 1;
        count += 2;
        let p = parent[x as usize];
        if p == NIL {
            root = y;
        } else {
            let slot = if kids[p as usize][0] == x { 0 } else { 1 };
            kids[p as usize][slot] = y;
        }
        parent[y as usize] = p;
        let side = rng.gen_range(0..2);
        kids[y as usize][side] = x;
        kids[y as usize][1 - side] = z;
        parent[x as usize] = y;
        parent[z as usize] = y;
    }
    // Relabel so the root is node 0.
    if root != 0 {
        let r = root as usize;
        kids.swap(0, r);
        for k in kids.iter_mut() {
            for c in k.iter_mut() {
                if *c == root {
                    *c = 0;
                } else if *c == 0 {
                    *c = root;
                }
            }
        }
    }
    kids
}

fn is_leaf(kids: &[[u32; 2]], v: u32) -> bool {
    kids[v as usize][0] == NIL
}

fn bst_preorder(n: usize, rng: &mut impl Rng) -> Vec<u32> {
    let kids = remy(n, rng);
    // In-order labels of the internal nodes.
    let mut label = vec![0u32; kids.len()];
    let mut next = 1u32;
    let mut stack = Vec::new();
    let mut cur = 0u32;
    loop {
        while !is_leaf(&kids, cur) {
            stack.push(cur);
            cur = kids[cur as usize][0];
        }
        match stack.pop() {
            None => break,
            Some(v) => {
                label[v as usize] = next;
                next += 1;
                cur = kids[v as usize][1];
            }
        }
    }
    let mut out = Vec::with_capacity(n);
    let mut stack = vec![0u32];
    while let Some(v) = stack.pop() {
        if is_leaf(&kids, v) {
            continue;
        }
        out.push(label[v as usize]);
        stack.push(kids[v as usize][1]);
        stack.push(kids[v as usize][0]);
    }
    out
}

fn separable(n: usize, rng: &mut impl Rng) -> Vec<u32> {
    let kids = remy(n - 1, rng);
    let m = kids.len();
    let mut leaves = vec![0u32; m];
    let mut order = Vec::with_capacity(m);
    let mut stack = vec![0u32];
    while let Some(v) = stack.pop() {
        order.push(v);
        if !is_leaf(&kids, v) {
            stack.extend(kids[v as usize]);
        }
    }
    for &v in order.iter().rev() {
        leaves[v as usize] = if is_leaf(&kids, v) { 1 } else { kids[v as usize].iter().map(|&c| leaves[c as usize]).sum() };
    }
    let skew: Vec<bool> = (0..m).map(|_| rng.gen()).collect();
    let mut out = Vec::with_capacity(n);
    // (node, lowest value of its range); children pushed right then left.
    let mut stack = vec![(0u32, 1u32)];
    while let Some((v, lo)) = stack.pop() {
        if is_leaf(&kids, v) {
            out.push(lo);
            continue;
        }
        let [l, r] = kids[v as usize];
        let (ll, rl) = (leaves[l as usize], leaves[r as usize]);
        let (lo_l, lo_r) = if skew[v as usize] { (lo + rl, lo) } else { (lo, lo + ll) };
        stack.push((r, lo_r));
        stack.push((l, lo_l));
    }
    out
}

fn interleaved_runs(n: usize, k: usize, rng: &mut impl Rng) -> Vec<u32> {
    let k = k.max(1);
    let run_of: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    let mut sizes = vec![0usize; k];
    for &r in &run_of {
        sizes[r] += 1;
    }
    let mut pool: Vec<u32> = (1..=n as u32).collect();
    pool.shuffle(rng);
    let mut runs: Vec<Vec<u32>> = Vec::with_capacity(k);
    let mut at = 0;
    for &s in &sizes {
        let mut vals = pool[at..at + s].to_vec();
        vals.sort_unstable();
        vals.reverse();
        runs.push(vals);
        at += s;
    }
    run_of.iter().map(|&r| runs[r].pop().expect("run sized by its positions")).collect()
}
