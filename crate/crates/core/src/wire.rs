//! Binary file formats for keys and ciphertexts.
//!
//! Every file starts with an 18-byte header:
//!
//! | bytes | field                      |
//! |-------|----------------------------|
//! | 0..4  | magic `PQUV`               |
//! | 4     | version `0x01`             |
//! | 5     | `n0`                       |
//! | 6..10 | `r`, u32 little-endian     |
//! | 10..18| `w1, w2, t1, t2`, u16 LE   |
//!
//! followed by one bit-packed payload (bit `j` at bit `j % 8` of byte
//! `j / 8`, pad bits zero):
//!
//! * public key: first rows of the `S G1` blocks row-major, then `S G2`;
//! * secret key: `H1` blocks, `H2` blocks, `S` blocks row-major;
//! * ciphertext: `c1` then `c2`.

use thiserror::Error;

use crate::bitvec::BitVector;
use crate::circulant::{BlockMatrix, CirculantBlock};
use crate::params::SchemeParams;
use crate::pke::{Ciphertext, PublicKey, SecretKey};
use crate::qc::QcParityCheck;

pub const MAGIC: [u8; 4] = *b"PQUV";
pub const VERSION: u8 = 0x01;
pub const HEADER_LEN: usize = 18;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("unsupported format version {0:#04x}")]
    UnsupportedVersion(u8),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("truncated payload: {got} bytes, expected {expected}")]
    Truncated { expected: usize, got: usize },
    #[error("payload length {got} bytes inconsistent with parameters (expected {expected})")]
    LengthMismatch { expected: usize, got: usize },
    #[error("nonzero padding bits in payload")]
    NonzeroPadding,
    #[error("inconsistent key material: {0}")]
    InvalidKey(String),
}

pub fn encode_header(p: &SchemeParams) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN);
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(u8::try_from(p.n0).expect("n0 fits in a byte"));
    out.extend_from_slice(&u32::try_from(p.r).expect("r fits in 32 bits").to_le_bytes());
    for v in [p.w1, p.w2, p.t1, p.t2] {
        out.extend_from_slice(&u16::try_from(v).expect("weights fit in 16 bits").to_le_bytes());
    }
    out
}

/// Parses and validates a header, returning the parameters and the payload.
pub fn decode_header(bytes: &[u8]) -> Result<(SchemeParams, &[u8]), ParseError> {
    if bytes.len() < HEADER_LEN {
        return Err(ParseError::MalformedHeader(format!(
            "{} bytes, header needs {HEADER_LEN}",
            bytes.len()
        )));
    }
    if bytes[0..4] != MAGIC {
        return Err(ParseError::MalformedHeader("bad magic".into()));
    }
    if bytes[4] != VERSION {
        return Err(ParseError::UnsupportedVersion(bytes[4]));
    }
    let u16_at = |i: usize| u16::from_le_bytes([bytes[i], bytes[i + 1]]) as usize;
    let params = SchemeParams {
        n0: bytes[5] as usize,
        r: u32::from_le_bytes(bytes[6..10].try_into().expect("4 bytes")) as usize,
        w1: u16_at(10),
        w2: u16_at(12),
        t1: u16_at(14),
        t2: u16_at(16),
    };
    params
        .validate()
        .map_err(|e| ParseError::InvalidParams(e.to_string()))?;
    Ok((params, &bytes[HEADER_LEN..]))
}

fn with_payload(p: &SchemeParams, parts: &[&BitVector]) -> Vec<u8> {
    let mut out = encode_header(p);
    out.extend_from_slice(&BitVector::concat(parts).to_bytes());
    out
}

/// Splits an exact-length payload into `count` pieces of `r` bits.
fn read_payload(payload: &[u8], r: usize, count: usize) -> Result<Vec<BitVector>, ParseError> {
    let bits = r * count;
    let expected = bits.div_ceil(8);
    if payload.len() < expected {
        return Err(ParseError::Truncated {
            expected,
            got: payload.len(),
        });
    }
    if payload.len() > expected {
        return Err(ParseError::LengthMismatch {
            expected,
            got: payload.len(),
        });
    }
    let all = BitVector::from_bytes(payload, bits).ok_or(ParseError::NonzeroPadding)?;
    Ok(all.chunks(r))
}

pub fn serialize_public(pk: &PublicKey) -> Vec<u8> {
    let rows: Vec<&BitVector> = pk
        .sg1()
        .blocks()
        .iter()
        .chain(pk.sg2().blocks())
        .map(CirculantBlock::row0)
        .collect();
    with_payload(pk.params(), &rows)
}

pub fn deserialize_public(bytes: &[u8]) -> Result<PublicKey, ParseError> {
    let (p, payload) = decode_header(bytes)?;
    let per_code = p.k0() * p.n0;
    let mut rows = read_payload(payload, p.r, 2 * per_code)?.into_iter();
    let mut take = |count: usize| -> Result<BlockMatrix, ParseError> {
        let blocks = rows.by_ref().take(count).map(CirculantBlock::from_row).collect();
        BlockMatrix::from_blocks(p.k0(), p.n0, blocks).map_err(|e| ParseError::InvalidKey(e.to_string()))
    };
    let sg1 = take(per_code)?;
    let sg2 = take(per_code)?;
    PublicKey::from_parts(p, sg1, sg2).map_err(|e| ParseError::InvalidKey(e.to_string()))
}

pub fn serialize_secret(sk: &SecretKey) -> Vec<u8> {
    let rows: Vec<&BitVector> = sk
        .h1()
        .blocks()
        .iter()
        .chain(sk.h2().blocks())
        .chain(sk.s().blocks())
        .map(CirculantBlock::row0)
        .collect();
    with_payload(sk.params(), &rows)
}

pub fn deserialize_secret(bytes: &[u8]) -> Result<SecretKey, ParseError> {
    let (p, payload) = decode_header(bytes)?;
    let k0 = p.k0();
    let rows = read_payload(payload, p.r, 2 * p.n0 + k0 * k0)?;
    let mut blocks = rows.into_iter().map(CirculantBlock::from_row);
    let invalid = |e: crate::error::Error| ParseError::InvalidKey(e.to_string());
    let h1 = QcParityCheck::new(p.mdpc(), blocks.by_ref().take(p.n0).collect()).map_err(invalid)?;
    let h2 = QcParityCheck::new(p.ldpc(), blocks.by_ref().take(p.n0).collect()).map_err(invalid)?;
    let s = BlockMatrix::from_blocks(k0, k0, blocks.collect()).map_err(invalid)?;
    SecretKey::from_parts(p, h1, h2, s).map_err(invalid)
}

pub fn serialize_ct(p: &SchemeParams, ct: &Ciphertext) -> Vec<u8> {
    with_payload(p, &[&ct.c1, &ct.c2])
}

pub fn deserialize_ct(bytes: &[u8]) -> Result<(SchemeParams, Ciphertext), ParseError> {
    let (p, payload) = decode_header(bytes)?;
    let mut halves = read_payload(payload, p.n(), 2)?.into_iter();
    let c1 = halves.next().expect("two halves");
    let c2 = halves.next().expect("two halves");
    Ok((p, Ciphertext { c1, c2 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pke::keygen;
    use crate::rng::RandomStream;

    fn keys() -> (PublicKey, SecretKey) {
        let p = SchemeParams::new(2, 29, 6, 3, 2, 1).unwrap();
        keygen(&p, &mut RandomStream::from_seed(&[8; 32])).unwrap()
    }

    #[test]
    fn header_layout() {
        let p = SchemeParams::new(2, 11779, 142, 14, 134, 300).unwrap();
        let h = encode_header(&p);
        assert_eq!(h.len(), HEADER_LEN);
        assert_eq!(&h[..4], b"PQUV");
        assert_eq!(h[4], 1);
        assert_eq!(h[5], 2);
        assert_eq!(&h[6..10], &11779u32.to_le_bytes());
        assert_eq!(&h[10..12], &142u16.to_le_bytes());
        assert_eq!(&h[16..18], &300u16.to_le_bytes());
        assert_eq!(decode_header(&h).unwrap(), (p, &[][..]));
    }

    #[test]
    fn corrupted_inputs_give_distinct_errors() {
        let (pk, sk) = keys();
        let good = serialize_public(&pk);

        let mut bad = good.clone();
        bad[0] ^= 1;
        assert!(matches!(deserialize_public(&bad), Err(ParseError::MalformedHeader(_))));

        let mut bad = good.clone();
        bad[4] = 2;
        assert_eq!(deserialize_public(&bad), Err(ParseError::UnsupportedVersion(2)));

        let mut bad = good.clone();
        bad[6] = 28;
        assert!(matches!(deserialize_public(&bad), Err(ParseError::InvalidParams(_))));

        assert!(matches!(
            deserialize_public(&good[..good.len() - 1]),
            Err(ParseError::Truncated { .. })
        ));

        let mut long = good.clone();
        long.push(0);
        assert!(matches!(deserialize_public(&long), Err(ParseError::LengthMismatch { .. })));

        let mut pad = good.clone();
        *pad.last_mut().unwrap() |= 0x80;
        assert_eq!(deserialize_public(&pad), Err(ParseError::NonzeroPadding));

        assert!(matches!(deserialize_public(&good[..5]), Err(ParseError::MalformedHeader(_))));

        let mut sec = serialize_secret(&sk);
        // clear the first row of H1 so its weight no longer matches w1
        for b in &mut sec[HEADER_LEN..HEADER_LEN + 3] {
            *b = 0;
        }
        sec[HEADER_LEN + 3] &= 0xe0;
        assert!(matches!(deserialize_secret(&sec), Err(ParseError::InvalidKey(_))));
    }

    #[test]
    fn payload_sizes() {
        let (pk, sk) = keys();
        // 4 blocks of 29 bits -> 15 bytes
        assert_eq!(serialize_public(&pk).len(), HEADER_LEN + 15);
        // 5 blocks of 29 bits -> 19 bytes
        assert_eq!(serialize_secret(&sk).len(), HEADER_LEN + 19);
    }
}
