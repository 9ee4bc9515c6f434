use crate::codec::{Reader, Writer};
use crate::error::Result;

/// Append-only sequence of fixed-width fields packed into 64-bit words.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PackedBits {
    words: Vec<u64>,
    len: usize,
}

impl PackedBits {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Appends the low `width` bits of `value`.
    pub fn push(&mut self, value: u64, width: u32) {
        if width == 0 {
            return;
        }
        debug_assert!(width == 64 || value >> width == 0, "value {value} wider than {width}");
        let off = self.len % 64;
        if off == 0 {
            self.words.push(0);
        }
        let last = self.words.len() - 1;
        self.words[last] |= value << off;
        if off + width as usize > 64 {
            self.words.push(value >> (64 - off));
        }
        self.len += width as usize;
    }

    pub fn get(&self, pos: usize, width: u32) -> u64 {
        if width == 0 {
            return 0;
        }
        debug_assert!(pos + width as usize <= self.len);
        let w = pos / 64;
        let off = pos % 64;
        let mut v = self.words[w] >> off;
        if off + width as usize > 64 {
            v |= self.words[w + 1] << (64 - off);
        }
        if width == 64 {
            v
        } else {
            v & ((1u64 << width) - 1)
        }
    }

    pub fn append(&mut self, other: &PackedBits) {
        let mut pos = 0;
        while pos < other.len {
            let w = (other.len - pos).min(64) as u32;
            self.push(other.get(pos, w), w);
            pos += w as usize;
        }
    }

    pub fn encode(&self, w: &mut Writer) {
        w.usize(self.len);
        w.u64s(&self.words);
    }

    pub fn decode(r: &mut Reader) -> Result<Self> {
        let len = r.usize()?;
        let words = r.u64s()?;
        if words.len() != len.div_ceil(64) {
            return Err(crate::Error::Format("packed bit length mismatch".into()));
        }
        Ok(Self { words, len })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields_round_trip() {
        let mut p = PackedBits::new();
        let fields: Vec<(u64, u32)> = (0..500u64).map(|i| ((i * 2654435761) % (1 << (i % 40 + 1)), (i % 40 + 1) as u32)).collect();
        for &(v, w) in &fields {
            p.push(v, w);
        }
        let mut pos = 0;
        for &(v, w) in &fields {
            assert_eq!(p.get(pos, w), v);
            pos += w as usize;
        }
        let mut q = PackedBits::new();
        q.push(1, 3);
        q.append(&p);
        assert_eq!(q.get(3 + 1, 2), fields[1].0);
    }
}
