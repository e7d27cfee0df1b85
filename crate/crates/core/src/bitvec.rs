//! Packed binary vectors.
//!
//! Bit `j` lives at bit `j % 64` of word `j / 64`; serialized bytes therefore
//! carry bit `j` at bit `j % 8` of byte `j / 8`. Storage past `len` is always
//! zero so that derived equality is bitwise equality.

use std::fmt;

use crate::error::{dim_check, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = BitVector {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        v.clear_tail();
        v
    }

    /// Unit vector with a single one at `index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_support<I: IntoIterator<Item = usize>>(len: usize, support: I) -> Self {
        let mut v = Self::zeros(len);
        for i in support {
            v.set(i, true);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_support(
            bits.len(),
            bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i),
        )
    }

    pub(crate) fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        let mut v = BitVector { len, words };
        v.clear_tail();
        v
    }

    /// Decodes `len` bits from little-endian-within-byte packed bytes.
    /// Returns `None` when `bytes` has the wrong length or nonzero pad bits.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Option<Self> {
        if bytes.len() != len.div_ceil(8) {
            return None;
        }
        let mut words = vec![0u64; words_for(len)];
        for (i, b) in bytes.iter().enumerate() {
            words[i / 8] |= (*b as u64) << (8 * (i % 8));
        }
        let v = BitVector { len, words };
        let mut canon = v.clone();
        canon.clear_tail();
        (canon == v).then_some(v)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.len.div_ceil(8);
        (0..n)
            .map(|i| (self.words[i / 8] >> (8 * (i % 8))) as u8)
            .collect()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i & 63);
        if bit {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn xor_assign(&mut self, other: &BitVector) -> Result<()> {
        dim_check(self.len == other.len, || {
            format!("xor of lengths {} and {}", self.len, other.len)
        })?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
        Ok(())
    }

    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn distance(&self, other: &BitVector) -> Result<usize> {
        Ok(self.xor(other)?.weight())
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> Result<bool> {
        dim_check(self.len == other.len, || {
            format!("dot of lengths {} and {}", self.len, other.len)
        })?;
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        Ok(ones & 1 == 1)
    }

    /// Positions of the set bits, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + tz)
            })
        })
    }

    /// Copy of bits `start..start + len`.
    pub fn slice(&self, start: usize, len: usize) -> BitVector {
        assert!(start + len <= self.len, "slice out of range");
        let words = shifted_down(&self.words, start, words_for(len));
        BitVector::from_words(len, words)
    }

    /// Concatenation `[a | b | ...]`.
    pub fn concat(parts: &[&BitVector]) -> BitVector {
        let total = parts.iter().map(|p| p.len).sum();
        let mut out = BitVector::zeros(total);
        let mut offset = 0;
        for p in parts {
            out.or_shifted(p, offset);
            offset += p.len;
        }
        out
    }

    /// Splits into consecutive pieces of `block` bits each.
    pub fn chunks(&self, block: usize) -> Vec<BitVector> {
        assert!(block > 0 && self.len.is_multiple_of(block), "length not a multiple of block");
        (0..self.len / block)
            .map(|i| self.slice(i * block, block))
            .collect()
    }

    /// ORs `src` into `self` starting at bit `offset`.
    fn or_shifted(&mut self, src: &BitVector, offset: usize) {
        let moved = shifted_up(&src.words, offset, self.words.len());
        for (a, b) in self.words.iter_mut().zip(moved) {
            *a |= b;
        }
        self.clear_tail();
    }

    /// Cyclic rotation towards higher indices: bit `j` moves to `(j + s) mod len`.
    /// This is multiplication by `x^s` modulo `x^len - 1`.
    pub fn rotated(&self, s: usize) -> BitVector {
        if self.len == 0 {
            return self.clone();
        }
        let s = s % self.len;
        if s == 0 {
            return self.clone();
        }
        let nw = self.words.len();
        let mut up = shifted_up(&self.words, s, nw);
        let down = shifted_down(&self.words, self.len - s, nw);
        for (a, b) in up.iter_mut().zip(down) {
            *a |= b;
        }
        BitVector::from_words(self.len, up)
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

/// Output bit `j + s` equals input bit `j`, producing `out_words` words.
pub(crate) fn shifted_up(words: &[u64], s: usize, out_words: usize) -> Vec<u64> {
    let (ws, bs) = (s / 64, s % 64);
    let mut out = vec![0u64; out_words];
    for (i, o) in out.iter_mut().enumerate().skip(ws) {
        let src = i - ws;
        let mut v = words.get(src).copied().unwrap_or(0) << bs;
        if bs > 0 && src >= 1 {
            v |= words.get(src - 1).copied().unwrap_or(0) >> (64 - bs);
        }
        *o = v;
    }
    out
}

/// Output bit `j` equals input bit `j + s`, producing `out_words` words.
pub(crate) fn shifted_down(words: &[u64], s: usize, out_words: usize) -> Vec<u64> {
    let (ws, bs) = (s / 64, s % 64);
    let mut out = vec![0u64; out_words];
    for (i, o) in out.iter_mut().enumerate() {
        let src = i + ws;
        let mut v = words.get(src).copied().unwrap_or(0) >> bs;
        if bs > 0 {
            v |= words.get(src + 1).copied().unwrap_or(0) << (64 - bs);
        }
        *o = v;
    }
    out
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            let s: String = (0..self.len)
                .map(|i| if self.get(i) { '1' } else { '0' })
                .collect();
            write!(f, "BitVector[{}]({s})", self.len)
        } else {
            write!(f, "BitVector[{}](weight {})", self.len, self.weight())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_of_zero_and_ones() {
        assert_eq!(BitVector::zeros(77).weight(), 0);
        assert_eq!(BitVector::ones(77).weight(), 77);
        assert_eq!(BitVector::ones(128).weight(), 128);
    }

    #[test]
    fn concat_weight_is_additive() {
        let a = BitVector::from_support(70, [0, 5, 69]);
        let b = BitVector::from_support(13, [1, 12]);
        let c = BitVector::concat(&[&a, &b]);
        assert_eq!(c.len(), 83);
        assert_eq!(c.weight(), a.weight() + b.weight());
        assert_eq!(c.slice(0, 70), a);
        assert_eq!(c.slice(70, 13), b);
    }

    #[test]
    fn rotation_matches_index_formula() {
        let v = BitVector::from_support(131, [0, 3, 64, 130]);
        for s in [0, 1, 63, 64, 65, 130, 131, 200] {
            let r = v.rotated(s);
            for j in 0..131 {
                assert_eq!(r.get((j + s) % 131), v.get(j));
            }
        }
    }

    #[test]
    fn bytes_roundtrip_and_pad_check() {
        let v = BitVector::from_support(13, [0, 8, 12]);
        let bytes = v.to_bytes();
        assert_eq!(bytes, vec![0x01, 0x11]);
        assert_eq!(BitVector::from_bytes(&bytes, 13), Some(v));
        assert_eq!(BitVector::from_bytes(&[0x01, 0x21], 13), None);
        assert_eq!(BitVector::from_bytes(&[0x01], 13), None);
    }

    #[test]
    fn mismatched_xor_is_dimension_error() {
        let mut a = BitVector::zeros(3);
        assert!(a.xor_assign(&BitVector::zeros(4)).is_err());
    }
}
