use super::{directory_model_bits, Size};
use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};

/// Static ordered tree in level order. Node 0 is the root and the children
/// of each node occupy consecutive ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedTree {
    degrees: Vec<u32>,
    first_child: Vec<u32>,
    parent: Vec<u32>,
    /// Leaves strictly left of the node's subtree.
    leaves_before: Vec<u32>,
    leaves_within: Vec<u32>,
    leaf_order: Vec<u32>,
}

impl OrderedTree {
    /// Builds from the child counts of all nodes in level order.
    pub fn from_degrees(degrees: Vec<u32>) -> Result<Self> {
        let n = degrees.len();
        if n == 0 {
            return Err(Error::Format("tree needs a root".into()));
        }
        let total: u64 = degrees.iter().map(|&d| d as u64).sum();
        if total + 1 != n as u64 {
            return Err(Error::Format(format!("degree sum {total} does not match {n} nodes")));
        }
        let mut first_child = vec![0u32; n];
        let mut parent = vec![u32::MAX; n];
        let mut next = 1u32;
        for v in 0..n {
            first_child[v] = next;
            for c in next..next + degrees[v] {
                parent[c as usize] = v as u32;
            }
            next += degrees[v];
        }
        for (c, &p) in parent.iter().enumerate().skip(1) {
            if p as usize >= c {
                return Err(Error::Format("children must follow their parent".into()));
            }
        }
        let mut leaves_within = vec![0u32; n];
        for v in (0..n).rev() {
            if degrees[v] == 0 {
                leaves_within[v] = 1;
            }
            if v > 0 {
                leaves_within[parent[v] as usize] += leaves_within[v];
            }
        }
        let mut leaves_before = vec![0u32; n];
        for v in 0..n {
            let mut acc = leaves_before[v];
            for c in first_child[v]..first_child[v] + degrees[v] {
                leaves_before[c as usize] = acc;
                acc += leaves_within[c as usize];
            }
        }
        let mut leaf_order = vec![0u32; leaves_within[0] as usize];
        for v in 0..n {
            if degrees[v] == 0 {
                leaf_order[leaves_before[v] as usize] = v as u32;
            }
        }
        Ok(Self { degrees, first_child, parent, leaves_before, leaves_within, leaf_order })
    }

    pub fn node_count(&self) -> usize {
        self.degrees.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_order.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v] as usize
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        if v == 0 {
            None
        } else {
            Some(self.parent[v] as usize)
        }
    }

    /// The `i`-th child (1-based).
    #[inline]
    pub fn child(&self, v: usize, i: usize) -> usize {
        debug_assert!(i >= 1 && i <= self.degrees[v] as usize, "child {i} of node {v}");
        self.first_child[v] as usize + i - 1
    }

    pub fn try_child(&self, v: usize, i: usize) -> Result<usize> {
        if i == 0 || i > self.degrees[v] as usize {
            Err(Error::OutOfRange { index: i, n: self.degrees[v] as usize })
        } else {
            Ok(self.child(v, i))
        }
    }

    /// Number of siblings left of `v`.
    #[inline]
    pub fn child_rank(&self, v: usize) -> usize {
        v - self.first_child[self.parent[v] as usize] as usize
    }

    /// The `i`-th leaf from the left (1-based).
    #[inline]
    pub fn leaf_select(&self, i: usize) -> usize {
        self.leaf_order[i - 1] as usize
    }

    /// Number of leaves left of `v`.
    #[inline]
    pub fn leaf_rank(&self, v: usize) -> usize {
        self.leaves_before[v] as usize
    }

    /// Number of leaves in the subtree of `v`.
    pub fn leaves_under(&self, v: usize) -> usize {
        self.leaves_within[v] as usize
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.degrees[v] == 0
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// Model: balanced parentheses plus rank and excess directories.
    pub fn size(&self) -> Size {
        let n = self.node_count() as u64;
        let physical = 32
            * (self.degrees.len() + self.first_child.len() + self.parent.len() + self.leaves_before.len() + self.leaves_within.len() + self.leaf_order.len())
                as u64;
        Size::new(physical, 2 * n + 2 * directory_model_bits(2 * n))
    }

    pub fn encode(&self, w: &mut Writer) {
        w.u32s(&self.degrees);
    }

    pub fn decode(r: &mut Reader) -> Result<Self> {
        Self::from_degrees(r.u32s()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn three_levels() {
        // 1 + 2 + 4 nodes.
        let t = OrderedTree::from_degrees(vec![2, 2, 2, 0, 0, 0, 0]).unwrap();
        assert_eq!(t.leaf_select(3), t.child(t.child(0, 2), 1));
        for v in 3..7 {
            assert_eq!(t.leaf_select(t.leaf_rank(v) + 1), v);
        }
        assert_eq!(t.parent(0), None);
        assert!(t.try_child(3, 1).is_err());
    }

    /// Explicit adjacency reference.
    struct Naive {
        kids: Vec<Vec<usize>>,
        parent: Vec<Option<usize>>,
    }

    impl Naive {
        fn leaves_dfs(&self) -> Vec<usize> {
            let mut out = Vec::new();
            let mut stack = vec![0];
            while let Some(v) = stack.pop() {
                if self.kids[v].is_empty() {
                    out.push(v);
                }
                stack.extend(self.kids[v].iter().rev());
            }
            out
        }
    }

    #[test]
    fn random_tree_matches_adjacency() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 10_000;
        // Random level-order tree: each new node picks a parent among the
        // nodes of the current frontier, in nondecreasing order.
        let mut parent_of = vec![None];
        let mut p = 0usize;
        for v in 1..n {
            p = rng.gen_range(p..v.min(p + 3));
            parent_of.push(Some(p));
        }
        let mut kids = vec![Vec::new(); n];
        for v in 1..n {
            kids[parent_of[v].unwrap()].push(v);
        }
        let naive = Naive { kids, parent: parent_of };
        let t = OrderedTree::from_degrees(naive.kids.iter().map(|k| k.len() as u32).collect()).unwrap();
        for v in 0..n {
            assert_eq!(t.parent(v), naive.parent[v]);
            for (i, &c) in naive.kids[v].iter().enumerate() {
                assert_eq!(t.child(v, i + 1), c);
                assert_eq!(t.child_rank(c), i);
            }
        }
        let leaves = naive.leaves_dfs();
        for (i, &l) in leaves.iter().enumerate() {
            assert_eq!(t.leaf_select(i + 1), l);
            assert_eq!(t.leaf_rank(l), i);
        }
    }
}
