use super::{bits_for, Size};
use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};

const WORDS_PER_BLOCK: usize = 8;
const SELECT_SAMPLE: usize = 64;
const RRR_BLOCK: u64 = 63;
const RRR_SUPER: u64 = 32;

/// Static bitvector with constant-time rank and sampled select.
///
/// Positions are 1-based: `rank(i)` counts ones in `B[1..=i]` and
/// `select(j)` is the position of the `j`-th one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitVector {
    len: usize,
    ones: usize,
    words: Vec<u64>,
    /// Ones before each block of `WORDS_PER_BLOCK` words.
    blocks: Vec<u64>,
    /// Ones before each word, relative to its block.
    sub: Vec<u16>,
    /// Word holding the `(k·SELECT_SAMPLE + 1)`-th one.
    samples: Vec<u32>,
}

impl BitVector {
    pub fn from_bits(bits: &[bool]) -> Self {
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        Self::from_words(words, bits.len())
    }

    /// Bitvector of length `len` with ones at the given 1-based positions.
    pub fn from_positions(len: usize, positions: impl IntoIterator<Item = usize>) -> Self {
        let mut words = vec![0u64; len.div_ceil(64)];
        for p in positions {
            assert!(p >= 1 && p <= len, "position {p} outside 1..={len}");
            words[(p - 1) / 64] |= 1 << ((p - 1) % 64);
        }
        Self::from_words(words, len)
    }

    fn from_words(words: Vec<u64>, len: usize) -> Self {
        let mut blocks = Vec::with_capacity(words.len() / WORDS_PER_BLOCK + 1);
        let mut sub = Vec::with_capacity(words.len());
        let mut samples = Vec::new();
        let mut total = 0u64;
        let mut in_block = 0u64;
        for (w, &word) in words.iter().enumerate() {
            if w % WORDS_PER_BLOCK == 0 {
                blocks.push(total);
                in_block = 0;
            }
            sub.push(in_block as u16);
            let c = word.count_ones() as u64;
            // Record the word containing every SELECT_SAMPLE-th one.
            let first = total.div_ceil(SELECT_SAMPLE as u64) * SELECT_SAMPLE as u64;
            let mut k = first;
            while k < total + c {
                samples.push(w as u32);
                k += SELECT_SAMPLE as u64;
            }
            total += c;
            in_block += c;
        }
        Self { len, ones: total as usize, words, blocks, sub, samples }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count_ones(&self) -> usize {
        self.ones
    }

    /// Bit at 1-based position `i`.
    pub fn read(&self, i: usize) -> bool {
        assert!(i >= 1 && i <= self.len, "bit position {i} outside 1..={}", self.len);
        self.words[(i - 1) / 64] >> ((i - 1) % 64) & 1 == 1
    }

    /// Number of ones among the first `i` bits.
    #[inline]
    pub fn rank(&self, i: usize) -> usize {
        debug_assert!(i <= self.len);
        let w = i / 64;
        let r = i % 64;
        if w == self.words.len() {
            return self.ones;
        }
        let base = self.blocks[w / WORDS_PER_BLOCK] + self.sub[w] as u64;
        let part = if r == 0 { 0 } else { (self.words[w] << (64 - r)).count_ones() as u64 };
        (base + part) as usize
    }

    #[inline]
    fn ones_before_word(&self, w: usize) -> u64 {
        self.blocks[w / WORDS_PER_BLOCK] + self.sub[w] as u64
    }

    /// Position of the `j`-th one. Panics when `j` is out of range.
    #[inline]
    pub fn select(&self, j: usize) -> usize {
        assert!(j >= 1 && j <= self.ones, "select({j}) with {} ones", self.ones);
        let mut w = self.samples[(j - 1) / SELECT_SAMPLE] as usize;
        while w + 1 < self.words.len() && self.ones_before_word(w + 1) < j as u64 {
            w += 1;
        }
        let mut k = j as u64 - self.ones_before_word(w) - 1;
        let mut word = self.words[w];
        while k > 0 {
            word &= word - 1;
            k -= 1;
        }
        w * 64 + word.trailing_zeros() as usize + 1
    }

    pub fn try_select(&self, j: usize) -> Result<usize> {
        if j == 0 || j > self.ones {
            Err(Error::SelectOutOfRange(j))
        } else {
            Ok(self.select(j))
        }
    }

    /// Empirical entropy bound `n·H(m/n)` in bits.
    pub fn entropy_bits(&self) -> f64 {
        let n = self.len as f64;
        if self.ones == 0 || self.ones == self.len {
            return 0.0;
        }
        let p = self.ones as f64 / n;
        n * -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
    }

    /// Size of a block-compressed encoding of the same bits: 63-bit blocks
    /// stored as (class, offset) with a rank sample and pointer every 32
    /// blocks.
    pub fn model_bits(&self) -> u64 {
        let mut offsets = 0u64;
        let blocks = (self.len as u64).div_ceil(RRR_BLOCK);
        for b in 0..blocks {
            let lo = (b * RRR_BLOCK) as usize;
            let hi = (lo + RRR_BLOCK as usize).min(self.len);
            let k = (self.rank(hi) - self.rank(lo)) as u64;
            offsets += lg_binomial_63(k);
        }
        let classes = blocks * bits_for(RRR_BLOCK) as u64;
        let supers = blocks.div_ceil(RRR_SUPER) * (bits_for(self.len as u64) + bits_for(offsets)) as u64;
        offsets + classes + supers
    }

    pub fn physical_bits(&self) -> u64 {
        64 * (self.words.len() + self.blocks.len()) as u64 + 16 * self.sub.len() as u64 + 32 * self.samples.len() as u64
    }

    pub fn size(&self) -> Size {
        Size::new(self.physical_bits(), self.model_bits())
    }

    pub fn encode(&self, w: &mut Writer) {
        w.usize(self.len);
        w.u64s(&self.words);
    }

    pub fn decode(r: &mut Reader) -> Result<Self> {
        let len = r.usize()?;
        let words = r.u64s()?;
        if words.len() != len.div_ceil(64) {
            return Err(Error::Format("bitvector length mismatch".into()));
        }
        if len % 64 != 0 && words.last().is_some_and(|&w| w >> (len % 64) != 0) {
            return Err(Error::Format("bitvector padding not zero".into()));
        }
        Ok(Self::from_words(words, len))
    }
}

/// `⌈lg C(63, k)⌉`.
fn lg_binomial_63(k: u64) -> u64 {
    let k = k.min(RRR_BLOCK - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (RRR_BLOCK - i) as u128 / (i + 1) as u128;
    }
    super::ceil_lg(c as u64) as u64
}
