//! Rank/select bitvectors, navigable ordered trees and range-minimum indexes,
//! each reporting a physical and a model bit count.

mod bits;
mod bitvector;
mod rmq;
mod tree;

pub use bits::PackedBits;
pub use bitvector::BitVector;
pub use rmq::RangeMinIndex;
pub use tree::OrderedTree;

/// Bits needed to store any value in `0..=max`.
pub fn bits_for(max: u64) -> u32 {
    64 - max.leading_zeros()
}

/// `⌈lg x⌉`, with `ceil_lg(0) = ceil_lg(1) = 0`.
pub fn ceil_lg(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Model size of a two-level rank directory over `len` bits: one absolute
/// count per 4096 bits and one 12-bit relative count per 256 bits.
pub fn directory_model_bits(len: u64) -> u64 {
    len.div_ceil(4096) * bits_for(len) as u64 + len.div_ceil(256) * 12
}

/// Physical and model size of a component, in bits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Size {
    pub physical: u64,
    pub model: u64,
}

impl Size {
    pub fn new(physical: u64, model: u64) -> Self {
        Self { physical, model }
    }

    /// Both counts equal: the stored form is already packed.
    pub fn exact(bits: u64) -> Self {
        Self { physical: bits, model: bits }
    }
}

impl std::ops::Add for Size {
    type Output = Size;

    fn add(self, o: Size) -> Size {
        Size { physical: self.physical + o.physical, model: self.model + o.model }
    }
}

impl std::ops::AddAssign for Size {
    fn add_assign(&mut self, o: Size) {
        *self = *self + o;
    }
}

impl std::iter::Sum for Size {
    fn sum<I: Iterator<Item = Size>>(iter: I) -> Size {
        iter.fold(Size::default(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_helpers() {
        assert_eq!(bits_for(0), 0);
        assert_eq!(bits_for(1), 1);
        assert_eq!(bits_for(255), 8);
        assert_eq!(bits_for(256), 9);
        assert_eq!(ceil_lg(1), 0);
        assert_eq!(ceil_lg(2), 1);
        assert_eq!(ceil_lg(5), 3);
        assert_eq!(ceil_lg(1 << 18), 18);
    }
}
