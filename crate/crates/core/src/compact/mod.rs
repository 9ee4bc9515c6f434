//! Compact index for `τ(i)`, `τ⁻¹(v)`, range minimum and next smaller.
//!
//! Above a small threshold the permutation is split by a coarse and a fine
//! division. Every fine column and every fine row is stored as a short index
//! into a shared table of gridded permutations, and two bit-packed strip
//! structures link cells of columns to the matching cells of rows.

mod build;
mod direct;
mod full;
mod layout;
mod space;

pub(crate) use direct::DirectIndex;
pub(crate) use full::{FullIndex, StripRef};
pub use space::{SpaceComponent, SpaceReport};

use crate::codec::{Reader, Writer};
use crate::decomposition::{build_hierarchy, BuildStats, DecompositionHierarchy};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::succinct::ceil_lg;
use crate::tally::{NoTally, Tally};

pub(crate) const MAGIC: &[u8; 8] = b"PERMIDX\0";
pub(crate) const VERSION: u32 = 1;
pub(crate) const FLAG_FULL: u8 = 1;
pub(crate) const FLAG_GEO: u8 = 2;

/// Sizes of the two divisions and the strip width limit of the tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Params {
    pub n: usize,
    pub m1: usize,
    pub m2: usize,
    pub width_cap: usize,
}

/// `⌈√x⌉` for small `x`.
pub(crate) fn ceil_sqrt(x: u64) -> u64 {
    let mut r = (x as f64).sqrt() as u64;
    while r * r < x {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= x {
        r -= 1;
    }
    r
}

impl Params {
    pub fn for_len(n: usize) -> Self {
        let l = ceil_lg(n as u64).max(1) as usize;
        let root = ceil_sqrt(l as u64) as usize;
        Self { n, m1: n / (l * l), m2: n / root, width_cap: 80 * root }
    }

    /// Whether the two-level layout applies: `1 < m1 < m2 < n`.
    pub fn is_two_level(&self) -> bool {
        1 < self.m1 && self.m1 < self.m2 && self.m2 < self.n
    }
}

/// Decomposition figures kept from the build; absent after loading.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildInfo {
    pub d_max: u64,
    pub d_trace: Vec<u64>,
    pub stats: BuildStats,
}

#[derive(Clone, Debug)]
pub(crate) enum Repr {
    Direct(DirectIndex),
    Full(Box<FullIndex>),
}

#[derive(Clone, Debug)]
pub struct CompactIndex {
    params: Params,
    pub(crate) repr: Repr,
    info: Option<BuildInfo>,
}

impl CompactIndex {
    pub fn build(tau: &Permutation) -> Result<Self> {
        Self::build_with(tau, Params::for_len(tau.len()))
    }

    pub fn build_with(tau: &Permutation, params: Params) -> Result<Self> {
        if params.n != tau.len() {
            return Err(Error::InvalidSizes(format!("parameters for n = {} used with n = {}", params.n, tau.len())));
        }
        if !params.is_two_level() {
            let vals = tau.values().iter().map(|&v| v - 1).collect();
            return Ok(Self { params, repr: Repr::Direct(DirectIndex::build(vals)), info: None });
        }
        let h = build_hierarchy(tau, &[params.m1, params.m2])?;
        Self::from_hierarchy(tau, &h, 0, 1, params)
    }

    /// Uses divisions `coarse` and `fine` of `h`, which must have sizes
    /// `m1` and `m2`.
    pub(crate) fn from_hierarchy(tau: &Permutation, h: &DecompositionHierarchy, coarse: usize, fine: usize, params: Params) -> Result<Self> {
        if h.sizes[coarse] != params.m1 || h.sizes[fine] != params.m2 {
            return Err(Error::InvalidSizes(format!("hierarchy levels do not match m1 = {}, m2 = {}", params.m1, params.m2)));
        }
        let full = build::build_full(tau, &h.divisions[coarse], &h.divisions[fine], h.d_max, params.width_cap)?;
        let info = BuildInfo { d_max: h.d_max, d_trace: h.d_trace.clone(), stats: h.stats.clone() };
        Ok(Self { params, repr: Repr::Full(Box::new(full)), info: Some(info) })
    }

    pub fn len(&self) -> usize {
        self.params.n
    }

    pub fn is_empty(&self) -> bool {
        self.params.n == 0
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn is_direct(&self) -> bool {
        matches!(self.repr, Repr::Direct(_))
    }

    pub fn build_info(&self) -> Option<&BuildInfo> {
        self.info.as_ref()
    }

    pub fn d_max(&self) -> Option<u64> {
        match &self.repr {
            Repr::Full(f) => Some(f.d_max),
            Repr::Direct(_) => None,
        }
    }

    /// Widths of the fine columns and fine rows; `None` for direct indexes.
    pub fn fine_widths(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        let Repr::Full(f) = &self.repr else { return None };
        let widths = |b: &crate::succinct::BitVector| {
            let mut starts: Vec<usize> = (1..=f.m2).map(|j| b.select(j) - 1).collect();
            starts.push(f.n);
            starts.windows(2).map(|w| w[1] - w[0]).collect()
        };
        Some((widths(&f.ic), widths(&f.ir)))
    }

    fn check(&self, i: usize) -> Result<usize> {
        if i == 0 || i > self.params.n {
            return Err(Error::OutOfRange { index: i, n: self.params.n });
        }
        Ok(i - 1)
    }

    /// `τ(i)`, 1-based.
    pub fn rank(&self, i: usize) -> Result<usize> {
        self.rank_counted(i, &mut NoTally)
    }

    pub fn rank_counted<T: Tally>(&self, i: usize, t: &mut T) -> Result<usize> {
        let x = self.check(i)?;
        Ok(1 + match &self.repr {
            Repr::Direct(d) => {
                t.tick();
                d.rank(x)
            }
            Repr::Full(f) => f.rank(x, t),
        })
    }

    /// `τ⁻¹(v)`, 1-based.
    pub fn unrank(&self, v: usize) -> Result<usize> {
        self.unrank_counted(v, &mut NoTally)
    }

    pub fn unrank_counted<T: Tally>(&self, v: usize, t: &mut T) -> Result<usize> {
        let y = self.check(v)?;
        Ok(1 + match &self.repr {
            Repr::Direct(d) => {
                t.tick();
                d.unrank(y)
            }
            Repr::Full(f) => f.unrank(y, t),
        })
    }

    /// Position of the smallest value among positions `a..=b`.
    pub fn range_min(&self, a: usize, b: usize) -> Result<usize> {
        self.range_min_counted(a, b, &mut NoTally)
    }

    pub fn range_min_counted<T: Tally>(&self, a: usize, b: usize, t: &mut T) -> Result<usize> {
        if a == 0 || a > b || b > self.params.n {
            return Err(Error::InvalidRange { lo: a, hi: b });
        }
        Ok(1 + match &self.repr {
            Repr::Direct(d) => {
                t.tick();
                d.range_min(a - 1, b - 1)
            }
            Repr::Full(f) => f.range_min(a - 1, b - 1, t),
        })
    }

    /// Smallest `j > i` with `τ(j) < τ(i)`.
    pub fn next_smaller(&self, i: usize) -> Result<Option<usize>> {
        self.next_smaller_counted(i, &mut NoTally)
    }

    pub fn next_smaller_counted<T: Tally>(&self, i: usize, t: &mut T) -> Result<Option<usize>> {
        let x = self.check(i)?;
        let r = match &self.repr {
            Repr::Direct(d) => {
                t.tick();
                d.next_smaller(x)
            }
            Repr::Full(f) => f.next_smaller(x, t),
        };
        Ok(r.map(|j| j + 1))
    }

    /// All values in position order, 1-based.
    pub fn to_permutation(&self) -> Permutation {
        let vals = (1..=self.params.n).map(|i| self.rank(i).expect("in range") as u32).collect();
        Permutation::new(vals).expect("index holds a permutation")
    }

    pub fn space(&self) -> SpaceReport {
        let mut r = SpaceReport::new(self.params.n);
        match &self.repr {
            Repr::Direct(d) => {
                let a = d.array_bits();
                r.push("values", a, a, true);
                r.push("inverse", a, a, false);
                r.push("next_smaller", a, a, false);
                let s = d.rmq().size();
                r.push("range_min", s.physical, s.model, false);
            }
            Repr::Full(f) => {
                let mut add = |name: &str, s: crate::succinct::Size| r.push(name, s.physical, s.model, false);
                add("col_tree", f.tc.size());
                add("row_tree", f.tr.size());
                add("col_bounds", f.ic.size());
                add("row_bounds", f.ir.size());
                add("col_table", f.col_table.size());
                add("row_table", f.row_table.size());
                add("col_min", f.col_min.size());
                for (name, g) in [("col_strips", &f.gc), ("row_strips", &f.gr)] {
                    let p = g.payload_bits();
                    let rest = g.total_bits() - p;
                    r.push(&format!("{name}.tables"), rest, rest, false);
                    r.push(&format!("{name}.leaves"), p, p, true);
                }
            }
        }
        r
    }

    pub(crate) fn write_header(&self, w: &mut Writer, geo: bool) {
        w.bytes(MAGIC);
        w.u32(VERSION);
        let mut flags = 0u8;
        if !self.is_direct() {
            flags |= FLAG_FULL;
        }
        if geo {
            flags |= FLAG_GEO;
        }
        w.u8(flags);
        w.u64(self.params.n as u64);
        w.u64(self.params.m1 as u64);
        w.u64(self.params.m2 as u64);
        w.u64(self.d_max().unwrap_or(0));
        w.u64(self.params.width_cap as u64);
    }

    pub(crate) fn write_body(&self, w: &mut Writer) {
        w.section(|w| match &self.repr {
            Repr::Direct(d) => d.encode(w),
            Repr::Full(f) => f.encode(w),
        });
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.write_header(&mut w, false);
        self.write_body(&mut w);
        crate::codec::seal(w.into_bytes())
    }

    /// Reads the header and the base index; returns whether geo data follows.
    pub(crate) fn read(r: &mut Reader) -> Result<(Self, bool)> {
        if r.take(8)? != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let flags = r.u8()?;
        if flags & !(FLAG_FULL | FLAG_GEO) != 0 {
            return Err(Error::Format(format!("unknown flags {flags:#x}")));
        }
        let n = r.u64()? as usize;
        let m1 = r.u64()? as usize;
        let m2 = r.u64()? as usize;
        let d_max = r.u64()?;
        let width_cap = r.u64()? as usize;
        let params = Params { n, m1, m2, width_cap };
        let repr = if flags & FLAG_FULL != 0 {
            if !params.is_two_level() {
                return Err(Error::Format("two-level flag with direct sizes".into()));
            }
            let f = r.section(|r| FullIndex::decode(r, n, m1, m2, d_max))?;
            f.validate()?;
            Repr::Full(Box::new(f))
        } else {
            let d = r.section(DirectIndex::decode)?;
            if d.len() != n {
                return Err(Error::Format("length mismatch".into()));
            }
            Repr::Direct(d)
        };
        Ok((Self { params, repr, info: None }, flags & FLAG_GEO != 0))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(crate::codec::unseal(bytes)?);
        let (idx, geo) = Self::read(&mut r)?;
        if geo {
            return Err(Error::Format("file holds a geometric index; load it with GeoIndex".into()));
        }
        r.finish()?;
        Ok(idx)
    }
}
