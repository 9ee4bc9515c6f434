//! Bit-packed two-level strip structure.
//!
//! Root: cross table `[m1]×[slots]`, optional next-smaller table, offsets,
//! then the level-1 node blobs. A level-1 node: its child count `q`, cross
//! and parent tables `[q]×[slots]`, two optional next-smaller tables,
//! offsets, then the leaves. A leaf is the index of its gridded permutation
//! among all entries of the same width; the width itself comes from the
//! strip boundaries.

use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};
use crate::succinct::{bits_for, PackedBits};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fields {
    pub top: u64,
    pub slots: u64,
    pub w_rank: u32,
    pub w_top: u32,
    pub w_sub: u32,
    pub w_q: u32,
    pub w_off_root: u32,
    pub w_off_node: u32,
    /// Whether the next-smaller tables are present (column structure only).
    pub extra: bool,
    pub w_ns3: u32,
    pub w_ns4: u32,
    pub w_ns5: u32,
    /// Packed index length per width.
    pub index_bits: Vec<u32>,
}

/// One cell slot of a fine strip.
#[derive(Clone, Debug, Default)]
pub struct SubCell {
    pub cross_rank: u32,
    pub cross_sub: u32,
    pub parent: u32,
    /// Stored plus one; zero means absent.
    pub ns3: u64,
    pub ns4: u64,
}

#[derive(Clone, Debug, Default)]
pub struct SubInput {
    pub cells: Vec<SubCell>,
    pub width: u32,
    pub local: u32,
}

#[derive(Clone, Debug, Default)]
pub struct RootCell {
    pub cross_rank: u32,
    pub cross_top: u32,
    pub ns5: u64,
}

#[derive(Clone, Debug)]
pub struct StripStructure {
    pub fields: Fields,
    bits: PackedBits,
    payload_bits: u64,
}

impl StripStructure {
    /// `roots[j]` lists the 1-cells of coarse strip `j`; `nodes[j]` its fine strips.
    pub fn build(mut fields: Fields, roots: &[Vec<RootCell>], nodes: &[Vec<SubInput>]) -> Self {
        let slots = fields.slots as usize;
        let top = roots.len();
        let mut payload_bits = 0u64;
        // Leaves first: offsets are sized by the longest leaf area.
        let mut leaf_areas = Vec::with_capacity(top);
        let mut leaf_offsets = Vec::with_capacity(top);
        for subs in nodes {
            let mut area = PackedBits::new();
            let mut offs = Vec::with_capacity(subs.len());
            for s in subs {
                offs.push(area.len() as u64);
                let ib = fields.index_bits[s.width as usize];
                area.push(s.local as u64, ib);
                payload_bits += ib as u64;
            }
            leaf_areas.push(area);
            leaf_offsets.push(offs);
        }
        fields.w_off_node = bits_for(leaf_areas.iter().map(|a| a.len() as u64).max().unwrap_or(0));
        let mut blobs = Vec::with_capacity(top);
        for (j, subs) in nodes.iter().enumerate() {
            let q = subs.len();
            let mut b = PackedBits::new();
            b.push(q as u64, fields.w_q);
            for s in subs {
                for c in 0..slots {
                    let cell = s.cells.get(c).cloned().unwrap_or_default();
                    b.push(cell.cross_rank as u64, fields.w_rank);
                    b.push(cell.cross_sub as u64, fields.w_sub);
                }
            }
            for s in subs {
                for c in 0..slots {
                    b.push(s.cells.get(c).map_or(0, |x| x.parent) as u64, fields.w_rank);
                }
            }
            if fields.extra {
                for s in subs {
                    for c in 0..slots {
                        b.push(s.cells.get(c).map_or(0, |x| x.ns3), fields.w_ns3);
                    }
                }
                for s in subs {
                    for c in 0..slots {
                        b.push(s.cells.get(c).map_or(0, |x| x.ns4), fields.w_ns4);
                    }
                }
            }
            for &o in &leaf_offsets[j] {
                b.push(o, fields.w_off_node);
            }
            b.append(&leaf_areas[j]);
            blobs.push(b);
        }
        let mut total = 0u64;
        let mut root_offsets = Vec::with_capacity(top);
        for b in &blobs {
            root_offsets.push(total);
            total += b.len() as u64;
        }
        fields.w_off_root = bits_for(total);
        let mut bits = PackedBits::new();
        for cells in roots {
            for c in 0..slots {
                let cell = cells.get(c).cloned().unwrap_or_default();
                bits.push(cell.cross_rank as u64, fields.w_rank);
                bits.push(cell.cross_top as u64, fields.w_top);
            }
        }
        if fields.extra {
            for cells in roots {
                for c in 0..slots {
                    bits.push(cells.get(c).map_or(0, |x| x.ns5), fields.w_ns5);
                }
            }
        }
        for &o in &root_offsets {
            bits.push(o, fields.w_off_root);
        }
        for b in &blobs {
            bits.append(b);
        }
        Self { fields, bits, payload_bits }
    }

    #[inline]
    fn root_cross_base(&self) -> usize {
        0
    }

    #[inline]
    fn root_off_base(&self) -> usize {
        let f = &self.fields;
        let cells = (f.top * f.slots) as usize;
        let mut p = cells * (f.w_rank + f.w_top) as usize;
        if f.extra {
            p += cells * f.w_ns5 as usize;
        }
        p
    }

    /// `(c′, r)` of the `c`-th 1-cell of coarse strip `j` (0-based).
    #[inline]
    pub fn root_cross(&self, j: usize, c: usize) -> (usize, usize) {
        let f = &self.fields;
        let w = (f.w_rank + f.w_top) as usize;
        let p = self.root_cross_base() + (j * f.slots as usize + c) * w;
        (self.bits.get(p, f.w_rank) as usize, self.bits.get(p + f.w_rank as usize, f.w_top) as usize)
    }

    /// Leftmost global column right of the coarse strip and above the 1-cell.
    #[inline]
    pub fn root_ns5(&self, j: usize, c: usize) -> Option<usize> {
        let f = &self.fields;
        let cells = (f.top * f.slots) as usize;
        let p = cells * (f.w_rank + f.w_top) as usize + (j * f.slots as usize + c) * f.w_ns5 as usize;
        decode_opt(self.bits.get(p, f.w_ns5))
    }

    /// Bit position of level-1 node `j`.
    #[inline]
    pub fn child(&self, j: usize) -> usize {
        let f = &self.fields;
        let base = self.root_off_base();
        let nodes = base + f.top as usize * f.w_off_root as usize;
        nodes + self.bits.get(base + j * f.w_off_root as usize, f.w_off_root) as usize
    }

    #[inline]
    pub fn node_q(&self, node: usize) -> usize {
        self.bits.get(node, self.fields.w_q) as usize
    }

    #[inline]
    fn table_base(&self, node: usize, table: usize, q: usize) -> usize {
        let f = &self.fields;
        let per = q * f.slots as usize;
        let mut p = node + f.w_q as usize;
        let widths = [(f.w_rank + f.w_sub) as usize, f.w_rank as usize, f.w_ns3 as usize, f.w_ns4 as usize];
        for w in widths.iter().take(table) {
            p += per * w;
        }
        p
    }

    /// `(c′, r)` for cell `c` of fine strip `j` inside `node`.
    #[inline]
    pub fn node_cross(&self, node: usize, j: usize, c: usize) -> (usize, usize) {
        let f = &self.fields;
        let q = self.node_q(node);
        let w = (f.w_rank + f.w_sub) as usize;
        let p = self.table_base(node, 0, q) + (j * f.slots as usize + c) * w;
        (self.bits.get(p, f.w_rank) as usize, self.bits.get(p + f.w_rank as usize, f.w_sub) as usize)
    }

    /// Rank of the enclosing 1-cell inside the coarse strip.
    #[inline]
    pub fn node_parent(&self, node: usize, j: usize, c: usize) -> usize {
        let f = &self.fields;
        let q = self.node_q(node);
        let p = self.table_base(node, 1, q) + (j * f.slots as usize + c) * f.w_rank as usize;
        self.bits.get(p, f.w_rank) as usize
    }

    /// Column offset inside the coarse column (next-smaller area three).
    #[inline]
    pub fn node_ns3(&self, node: usize, j: usize, c: usize) -> Option<usize> {
        let f = &self.fields;
        let q = self.node_q(node);
        let p = self.table_base(node, 2, q) + (j * f.slots as usize + c) * f.w_ns3 as usize;
        decode_opt(self.bits.get(p, f.w_ns3))
    }

    /// Value offset inside the coarse row (next-smaller area four).
    #[inline]
    pub fn node_ns4(&self, node: usize, j: usize, c: usize) -> Option<usize> {
        let f = &self.fields;
        let q = self.node_q(node);
        let p = self.table_base(node, 3, q) + (j * f.slots as usize + c) * f.w_ns4 as usize;
        decode_opt(self.bits.get(p, f.w_ns4))
    }

    /// Index among entries of width `w` of fine strip `j`.
    #[inline]
    pub fn node_leaf(&self, node: usize, j: usize, w: usize) -> u32 {
        let f = &self.fields;
        let q = self.node_q(node);
        let off_base = self.table_base(node, if f.extra { 4 } else { 2 }, q);
        let leaves = off_base + q * f.w_off_node as usize;
        let p = leaves + self.bits.get(off_base + j * f.w_off_node as usize, f.w_off_node) as usize;
        self.bits.get(p, f.index_bits[w]) as u32
    }

    /// Checks that every read for the given shape stays inside the stored
    /// bits. `widths[j]` lists the fine strip widths below coarse strip `j`.
    pub fn validate(&self, widths: &[Vec<usize>]) -> Result<()> {
        let f = &self.fields;
        let len = self.bits.len();
        let bad = |what: &str| Err(Error::Format(format!("strip structure: {what}")));
        if f.top as usize != widths.len() || f.slots == 0 || f.w_q > 32 {
            return bad("shape");
        }
        let cells = (f.top * f.slots) as usize;
        let root_end = self.root_off_base() + f.top as usize * f.w_off_root as usize;
        if root_end > len || cells * (f.w_rank + f.w_top) as usize > len {
            return bad("root truncated");
        }
        for (j, ws) in widths.iter().enumerate() {
            let node = self.child(j);
            if node + f.w_q as usize > len || self.node_q(node) != ws.len() {
                return bad("node header");
            }
            let off_base = self.table_base(node, if f.extra { 4 } else { 2 }, ws.len());
            let leaves = off_base + ws.len() * f.w_off_node as usize;
            if leaves > len {
                return bad("node truncated");
            }
            for (i, &w) in ws.iter().enumerate() {
                let p = leaves + self.bits.get(off_base + i * f.w_off_node as usize, f.w_off_node) as usize;
                match f.index_bits.get(w) {
                    Some(&b) if p + b as usize <= len => {}
                    _ => return bad("leaf"),
                }
            }
        }
        Ok(())
    }

    pub fn total_bits(&self) -> u64 {
        self.bits.len() as u64
    }

    /// Packed indexes of all leaves.
    pub fn payload_bits(&self) -> u64 {
        self.payload_bits
    }

    pub fn encode(&self, w: &mut Writer) {
        let f = &self.fields;
        w.u64(f.top);
        w.u64(f.slots);
        for x in [f.w_rank, f.w_top, f.w_sub, f.w_q, f.w_off_root, f.w_off_node, f.w_ns3, f.w_ns4, f.w_ns5] {
            w.u32(x);
        }
        w.u8(f.extra as u8);
        w.u32s(&f.index_bits);
        w.u64(self.payload_bits);
        self.bits.encode(w);
    }

    pub fn decode(r: &mut Reader) -> Result<Self> {
        let top = r.u64()?;
        let slots = r.u64()?;
        let mut x = [0u32; 9];
        for v in x.iter_mut() {
            *v = r.u32()?;
            if *v > 64 {
                return Err(Error::Format("field width above 64".into()));
            }
        }
        let extra = match r.u8()? {
            0 => false,
            1 => true,
            _ => return Err(Error::Format("bad flag".into())),
        };
        let index_bits = r.u32s()?;
        if index_bits.iter().any(|&b| b > 32) {
            return Err(Error::Format("index width above 32".into()));
        }
        let payload_bits = r.u64()?;
        let bits = PackedBits::decode(r)?;
        let fields = Fields {
            top,
            slots,
            w_rank: x[0],
            w_top: x[1],
            w_sub: x[2],
            w_q: x[3],
            w_off_root: x[4],
            w_off_node: x[5],
            w_ns3: x[6],
            w_ns4: x[7],
            w_ns5: x[8],
            extra,
            index_bits,
        };
        Ok(Self { fields, bits, payload_bits })
    }
}

#[inline]
fn decode_opt(x: u64) -> Option<usize> {
    if x == 0 {
        None
    } else {
        Some(x as usize - 1)
    }
}
