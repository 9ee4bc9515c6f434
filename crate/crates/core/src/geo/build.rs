//! Dense trees and node tables from a division hierarchy.

use super::dense::{DenseNode, Kind, NodeInput};
use crate::decomposition::{strip_map, Division};
use crate::error::{Error, Result};
use crate::succinct::OrderedTree;

pub(crate) fn own(d: &Division, cols: bool) -> &[u32] {
    if cols {
        d.col_starts()
    } else {
        d.row_starts()
    }
}

pub(crate) fn cross(d: &Division, cols: bool) -> &[u32] {
    own(d, !cols)
}

pub(crate) fn own_cells(d: &Division, cols: bool, j: usize) -> &[u32] {
    if cols {
        d.col_cells(j)
    } else {
        d.row_cells(j)
    }
}

/// First child strip of every parent strip, plus a final sentinel.
pub(crate) fn children_first(parent: &[u32], child: &[u32]) -> Result<Vec<u32>> {
    let mut out = Vec::with_capacity(parent.len() + 1);
    for s in parent {
        let i = child.binary_search(s).map_err(|_| Error::Decomposition("division levels are not nested".into()))?;
        out.push(i as u32);
    }
    out.push(child.len() as u32);
    Ok(out)
}

pub(crate) fn dense_tree(divs: &[Division], cols: bool) -> Result<OrderedTree> {
    let mut deg = Vec::new();
    for k in 0..divs.len() - 1 {
        let first = children_first(own(&divs[k], cols), own(&divs[k + 1], cols))?;
        deg.extend(first.windows(2).map(|w| w[1] - w[0]));
    }
    deg.resize(deg.len() + divs.last().unwrap().size(), 0);
    OrderedTree::from_degrees(deg)
}

/// Nodes of all levels below the finest, in tree order.
pub(crate) fn build_nodes(divs: &[Division], kind: Kind, coords: &[u32]) -> Result<Vec<DenseNode>> {
    let cols = kind == Kind::Col;
    let n = coords.len();
    let mut out = Vec::new();
    for k in 1..divs.len() {
        let (pd, qd) = (&divs[k - 1], &divs[k]);
        let own_first = children_first(own(pd, cols), own(qd, cols))?;
        let cross_first = children_first(cross(pd, cols), cross(qd, cols))?;
        let own_map = strip_map(own(qd, cols), n);
        let cross_map = strip_map(cross(qd, cols), n);
        let q_starts = own(qd, cols);
        let p_starts = own(pd, cols);
        let mut pos_of = vec![u32::MAX; cross(qd, cols).len()];
        for j in 0..p_starts.len() {
            let mut sizes = Vec::new();
            let mut acc = 0u32;
            for &r in own_cells(pd, cols, j) {
                let (a, b) = (cross_first[r as usize], cross_first[r as usize + 1]);
                for (t, kr) in (a..b).enumerate() {
                    pos_of[kr as usize] = acc + t as u32;
                }
                sizes.push((b - a) as usize);
                acc += b - a;
            }
            let lo = p_starts[j] as usize;
            let hi = p_starts.get(j + 1).map_or(n, |&s| s as usize);
            let sub0 = own_first[j];
            let points = (lo..hi)
                .map(|x| {
                    let sub = own_map[x];
                    let y = coords[x];
                    let p = pos_of[cross_map[y as usize] as usize];
                    debug_assert_ne!(p, u32::MAX);
                    let key = if cols { y } else { x as u32 };
                    (sub - sub0, p, x as u32 - q_starts[sub as usize], key)
                })
                .collect();
            let input = NodeInput { q: (own_first[j + 1] - sub0) as usize, cell_sizes: sizes, points };
            out.push(DenseNode::build(kind, &input)?);
        }
    }
    Ok(out)
}
