//! Deterministic bit source: SHAKE-256 of a 32-byte seed read as a bitstream.
//!
//! Bits are consumed least-significant first within each output byte, matching
//! the packing of [`BitVector`]. Every sampler in the crate draws from this
//! stream so that a seed fully determines keys, ciphertexts and simulations.

use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

use crate::bitvec::BitVector;
use crate::error::{Error, Result};

pub const SEED_BYTES: usize = 32;

pub struct RandomStream {
    reader: <Shake256 as ExtendableOutput>::Reader,
    buf: u64,
    avail: u32,
}

impl RandomStream {
    pub fn from_seed(seed: &[u8; SEED_BYTES]) -> Self {
        let mut h = Shake256::default();
        h.update(seed);
        RandomStream {
            reader: h.finalize_xof(),
            buf: 0,
            avail: 0,
        }
    }

    /// Seed of the `index`-th sub-stream: first 32 bytes of
    /// SHAKE-256(seed || index as u64 little-endian).
    pub fn derive_seed(seed: &[u8; SEED_BYTES], index: u64) -> [u8; SEED_BYTES] {
        let mut h = Shake256::default();
        h.update(seed);
        h.update(&index.to_le_bytes());
        let mut out = [0u8; SEED_BYTES];
        h.finalize_xof().read(&mut out);
        out
    }

    pub fn substream(seed: &[u8; SEED_BYTES], index: u64) -> Self {
        Self::from_seed(&Self::derive_seed(seed, index))
    }

    /// Fresh 32-byte seed drawn from this stream.
    pub fn fork_seed(&mut self) -> [u8; SEED_BYTES] {
        let mut out = [0u8; SEED_BYTES];
        for chunk in out.chunks_mut(8) {
            chunk.copy_from_slice(&self.next_bits(64).to_le_bytes());
        }
        out
    }

    fn refill(&mut self) {
        let mut b = [0u8; 8];
        self.reader.read(&mut b);
        self.buf = u64::from_le_bytes(b);
        self.avail = 64;
    }

    /// Next `count` bits (at most 64); the first bit read is bit 0 of the result.
    pub fn next_bits(&mut self, count: u32) -> u64 {
        assert!(count <= 64);
        if count == 0 {
            return 0;
        }
        let mut out = 0u64;
        let mut got = 0u32;
        while got < count {
            if self.avail == 0 {
                self.refill();
            }
            let take = (count - got).min(self.avail);
            let mask = if take == 64 { u64::MAX } else { (1u64 << take) - 1 };
            out |= (self.buf & mask) << got;
            self.buf = if take == 64 { 0 } else { self.buf >> take };
            self.avail -= take;
            got += take;
        }
        out
    }

    /// Uniform index in `0..n` by rejection on `ceil(log2 n)`-bit candidates.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0);
        let bits = candidate_bits(n);
        loop {
            let c = self.next_bits(bits) as usize;
            if c < n {
                return c;
            }
        }
    }

    /// Uniformly random vector of `len` bits.
    pub fn bits(&mut self, len: usize) -> BitVector {
        let words = (0..len.div_ceil(64)).map(|_| self.next_bits(64)).collect();
        BitVector::from_words(len, words)
    }

    /// Uniform permutation of `0..n` (Fisher-Yates).
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.below(i + 1);
            p.swap(i, j);
        }
        p
    }
}

fn candidate_bits(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// Uniform weight-`t` vector of length `n`: `ceil(log2 n)`-bit candidates,
/// rejecting values `>= n` and positions already chosen.
pub fn sample_fixed_weight(rng: &mut RandomStream, n: usize, t: usize) -> Result<BitVector> {
    Ok(BitVector::from_support(n, sample_support(rng, n, t)?))
}

/// Support of a uniform weight-`t` vector, in draw order.
pub fn sample_support(rng: &mut RandomStream, n: usize, t: usize) -> Result<Vec<usize>> {
    if t > n {
        return Err(Error::Parameter(format!("weight {t} exceeds length {n}")));
    }
    let bits = candidate_bits(n);
    let mut taken = BitVector::zeros(n);
    let mut out = Vec::with_capacity(t);
    while out.len() < t {
        let c = rng.next_bits(bits) as usize;
        if c >= n || taken.get(c) {
            continue;
        }
        taken.set(c, true);
        out.push(c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_is_deterministic() {
        let mut a = RandomStream::from_seed(&[7; 32]);
        let mut b = RandomStream::from_seed(&[7; 32]);
        for k in [1, 3, 64, 17, 0, 40] {
            assert_eq!(a.next_bits(k), b.next_bits(k));
        }
    }

    #[test]
    fn bitstream_split_is_consistent() {
        let mut a = RandomStream::from_seed(&[1; 32]);
        let mut b = RandomStream::from_seed(&[1; 32]);
        let whole = a.next_bits(64);
        let lo = b.next_bits(20);
        let hi = b.next_bits(44);
        assert_eq!(whole, lo | (hi << 20));
    }

    #[test]
    fn fixed_weight_edge_cases() {
        let mut rng = RandomStream::from_seed(&[2; 32]);
        assert!(sample_fixed_weight(&mut rng, 50, 0).unwrap().is_zero());
        assert_eq!(sample_fixed_weight(&mut rng, 50, 50).unwrap(), BitVector::ones(50));
        assert_eq!(sample_fixed_weight(&mut rng, 1, 1).unwrap().weight(), 1);
        assert!(matches!(
            sample_fixed_weight(&mut rng, 5, 6),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn fixed_weight_positions_are_uniform() {
        let mut rng = RandomStream::from_seed(&[3; 32]);
        let mut counts = [0u32; 100];
        let samples = 10_000;
        for _ in 0..samples {
            let v = sample_fixed_weight(&mut rng, 100, 10).unwrap();
            assert_eq!(v.weight(), 10);
            for i in v.iter_ones() {
                counts[i] += 1;
            }
        }
        for c in counts {
            let freq = c as f64 / samples as f64;
            assert!((freq - 0.1).abs() <= 0.01, "frequency {freq}");
        }
    }

    #[test]
    fn permutation_is_a_permutation() {
        let mut rng = RandomStream::from_seed(&[4; 32]);
        let mut p = rng.permutation(97);
        p.sort_unstable();
        assert_eq!(p, (0..97).collect::<Vec<_>>());
    }
}
