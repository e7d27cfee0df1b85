//! Public-key encryption over the (U | U+V) concatenation of a QC-MDPC code
//! and a QC-LDPC code.
//!
//! The public generator is
//!
//! ```text
//! G' = | S G1   S G1 |
//!      |  0     S G2 |
//! ```
//!
//! with `S` a dense block-circulant scrambler shared by both halves. Only the
//! circulant first rows of `S G1` and `S G2` are kept; `G'` is never built.
//! A ciphertext is `c = [m1 SG1 + z1 | m1 SG1 + m2 SG2 + z2 + h(z1)]`.

use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;
use thiserror::Error;

use crate::bitflip::{decode, DecoderConfig, ThresholdRule};
use crate::bitvec::BitVector;
use crate::circulant::{BlockMatrix, CirculantBlock};
use crate::error::{dim_check, Error, Result};
use crate::params::SchemeParams;
use crate::qc::{derive_generator, sample_parity_check, QcGenerator, QcParityCheck};
use crate::rng::{sample_fixed_weight, RandomStream};

/// Domain-separation byte prepended to the hash-mask input.
pub const HASH_MASK_DOMAIN: u8 = 0x48;

/// Bound on scrambler resampling during key generation.
pub const MAX_SCRAMBLER_ATTEMPTS: usize = 1000;

/// `h(z1)`: the first `n` bits of SHAKE-256(0x48 || packed z1).
pub fn hash_mask(z1: &BitVector) -> BitVector {
    let n = z1.len();
    let mut h = Shake256::default();
    h.update(&[HASH_MASK_DOMAIN]);
    h.update(&z1.to_bytes());
    let mut out = vec![0u8; n.div_ceil(8)];
    h.finalize_xof().read(&mut out);
    if !n.is_multiple_of(8) {
        let last = out.len() - 1;
        out[last] &= (1u8 << (n % 8)) - 1;
    }
    BitVector::from_bytes(&out, n).expect("length and padding are canonical")
}

/// Decoder for the MDPC half: Backflip with majority thresholds.
pub fn mdpc_decoder() -> DecoderConfig {
    DecoderConfig::backflip(ThresholdRule::Majority)
}

/// Decoder for the LDPC half: classic bit flipping on the maximal counts.
pub fn ldpc_decoder() -> DecoderConfig {
    DecoderConfig::classic(ThresholdRule::MaxUpcDelta(0))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicKey {
    params: SchemeParams,
    sg1: BlockMatrix,
    sg2: BlockMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretKey {
    params: SchemeParams,
    h1: QcParityCheck,
    h2: QcParityCheck,
    s: BlockMatrix,
    s_inv: BlockMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ciphertext {
    pub c1: BitVector,
    pub c2: BitVector,
}

impl Ciphertext {
    pub fn to_bits(&self) -> BitVector {
        BitVector::concat(&[&self.c1, &self.c2])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Mdpc,
    Ldpc,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stage::Mdpc => "MDPC",
            Stage::Ldpc => "LDPC",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecryptError {
    #[error("decoding failed at the {0} stage")]
    DecodingFailure(Stage),
    #[error(transparent)]
    Invalid(#[from] Error),
}

/// Dense invertible scrambler and its inverse.
#[derive(Clone, Debug)]
pub struct Scrambler {
    pub s: BlockMatrix,
    pub s_inv: BlockMatrix,
    /// Candidates drawn before one was accepted.
    pub attempts: usize,
}

/// Block row weights accepted as dense: `[floor(0.4 r), ceil(0.6 r)]`.
pub fn density_window(r: usize) -> (usize, usize) {
    ((2 * r) / 5, (3 * r).div_ceil(5))
}

pub fn is_dense(m: &BlockMatrix) -> bool {
    let (lo, hi) = density_window(m.r());
    m.blocks().iter().all(|b| (lo..=hi).contains(&b.weight()))
}

/// Draws `k0 x k0` uniformly random circulant blocks until the matrix is
/// dense and invertible.
pub fn sample_scrambler(rng: &mut RandomStream, k0: usize, r: usize) -> Result<Scrambler> {
    for attempt in 1..=MAX_SCRAMBLER_ATTEMPTS {
        let blocks = (0..k0 * k0)
            .map(|_| CirculantBlock::from_row(rng.bits(r)))
            .collect();
        let s = BlockMatrix::from_blocks(k0, k0, blocks)?;
        if !is_dense(&s) {
            continue;
        }
        if let Ok(s_inv) = s.inverse() {
            return Ok(Scrambler {
                s,
                s_inv,
                attempts: attempt,
            });
        }
    }
    Err(Error::Generation(format!(
        "no dense invertible scrambler after {MAX_SCRAMBLER_ATTEMPTS} attempts"
    )))
}

/// `S G = [S | S A]` where `A` stacks the generator's parity blocks.
fn scrambled_generator(s: &BlockMatrix, g: &QcGenerator) -> Result<BlockMatrix> {
    let k0 = s.rows();
    let a = BlockMatrix::from_blocks(k0, 1, g.right_blocks().to_vec())?;
    let sa = s.mul(&a)?;
    let mut blocks = Vec::with_capacity(k0 * (k0 + 1));
    for i in 0..k0 {
        for j in 0..k0 {
            blocks.push(s.block(i, j).clone());
        }
        blocks.push(sa.block(i, 0).clone());
    }
    BlockMatrix::from_blocks(k0, k0 + 1, blocks)
}

pub fn keygen(params: &SchemeParams, rng: &mut RandomStream) -> Result<(PublicKey, SecretKey)> {
    params.validate()?;
    let h1 = sample_parity_check(rng, params.mdpc())?;
    let g1 = derive_generator(&h1)?;
    let h2 = sample_parity_check(rng, params.ldpc())?;
    let g2 = derive_generator(&h2)?;
    let Scrambler { s, s_inv, .. } = sample_scrambler(rng, params.k0(), params.r)?;
    let pk = PublicKey {
        params: *params,
        sg1: scrambled_generator(&s, &g1)?,
        sg2: scrambled_generator(&s, &g2)?,
    };
    let sk = SecretKey {
        params: *params,
        h1,
        h2,
        s,
        s_inv,
    };
    Ok((pk, sk))
}

impl PublicKey {
    pub fn from_parts(params: SchemeParams, sg1: BlockMatrix, sg2: BlockMatrix) -> Result<Self> {
        params.validate()?;
        for m in [&sg1, &sg2] {
            dim_check(
                m.rows() == params.k0() && m.cols() == params.n0 && m.r() == params.r,
                || format!("{}x{} blocks of r={} in a public key", m.rows(), m.cols(), m.r()),
            )?;
        }
        Ok(PublicKey { params, sg1, sg2 })
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    /// `S G1` as a `k0 x n0` block matrix.
    pub fn sg1(&self) -> &BlockMatrix {
        &self.sg1
    }

    /// `S G2` as a `k0 x n0` block matrix.
    pub fn sg2(&self) -> &BlockMatrix {
        &self.sg2
    }

    /// Linear part `m G'` split into its two length-`n` halves.
    pub fn encode(&self, m: &BitVector) -> Result<Ciphertext> {
        let k = self.params.k();
        dim_check(m.len() == 2 * k, || {
            format!("plaintext of {} bits, expected {}", m.len(), 2 * k)
        })?;
        let u = self.sg1.vec_mul(&m.slice(0, k))?;
        let v = self.sg2.vec_mul(&m.slice(k, k))?;
        let c2 = u.xor(&v)?;
        Ok(Ciphertext { c1: u, c2 })
    }

    /// Encryption with caller-chosen error halves.
    pub fn encrypt_with_errors(&self, m: &BitVector, z1: &BitVector, z2: &BitVector) -> Result<Ciphertext> {
        let n = self.params.n();
        dim_check(z1.len() == n && z2.len() == n, || {
            format!("error halves of {} and {} bits, expected {n}", z1.len(), z2.len())
        })?;
        let mut ct = self.encode(m)?;
        ct.c1.xor_assign(z1)?;
        ct.c2.xor_assign(z2)?;
        ct.c2.xor_assign(&hash_mask(z1))?;
        Ok(ct)
    }
}

/// Samples `z1` (weight `t1`) then `z2` (weight `t2`) and encrypts.
pub fn encrypt(pk: &PublicKey, m: &BitVector, rng: &mut RandomStream) -> Result<Ciphertext> {
    let p = pk.params;
    let z1 = sample_fixed_weight(rng, p.n(), p.t1)?;
    let z2 = sample_fixed_weight(rng, p.n(), p.t2)?;
    pk.encrypt_with_errors(m, &z1, &z2)
}

impl SecretKey {
    /// Rebuilds a secret key, recomputing `S^-1`.
    pub fn from_parts(params: SchemeParams, h1: QcParityCheck, h2: QcParityCheck, s: BlockMatrix) -> Result<Self> {
        params.validate()?;
        if *h1.params() != params.mdpc() || *h2.params() != params.ldpc() {
            return Err(Error::Parameter("parity checks do not match the parameters".into()));
        }
        dim_check(s.rows() == params.k0() && s.cols() == params.k0() && s.r() == params.r, || {
            format!("{}x{} scrambler of r={}", s.rows(), s.cols(), s.r())
        })?;
        let s_inv = s.inverse()?;
        Ok(SecretKey {
            params,
            h1,
            h2,
            s,
            s_inv,
        })
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn h1(&self) -> &QcParityCheck {
        &self.h1
    }

    pub fn h2(&self) -> &QcParityCheck {
        &self.h2
    }

    pub fn s(&self) -> &BlockMatrix {
        &self.s
    }

    pub fn s_inv(&self) -> &BlockMatrix {
        &self.s_inv
    }

    /// The public key belonging to this secret key.
    pub fn public_key(&self) -> Result<PublicKey> {
        let g1 = derive_generator(&self.h1)?;
        let g2 = derive_generator(&self.h2)?;
        PublicKey::from_parts(
            self.params,
            scrambled_generator(&self.s, &g1)?,
            scrambled_generator(&self.s, &g2)?,
        )
    }
}

pub fn decrypt(sk: &SecretKey, ct: &Ciphertext) -> std::result::Result<BitVector, DecryptError> {
    decrypt_with(sk, ct, &mdpc_decoder(), &ldpc_decoder())
}

pub fn decrypt_with(
    sk: &SecretKey,
    ct: &Ciphertext,
    mdpc_cfg: &DecoderConfig,
    ldpc_cfg: &DecoderConfig,
) -> std::result::Result<BitVector, DecryptError> {
    let n = sk.params.n();
    let k = sk.params.k();
    dim_check(ct.c1.len() == n && ct.c2.len() == n, || {
        format!("ciphertext halves of {} and {} bits, expected {n}", ct.c1.len(), ct.c2.len())
    })?;
    let first = decode(&sk.h1, &ct.c1, mdpc_cfg)?;
    if !first.success {
        return Err(DecryptError::DecodingFailure(Stage::Mdpc));
    }
    // c2 + m1 SG1 + h(z1) = m2 SG2 + z2
    let mut rest = ct.c2.xor(&first.codeword)?;
    rest.xor_assign(&hash_mask(&first.error_vector))?;
    let second = decode(&sk.h2, &rest, ldpc_cfg)?;
    if !second.success {
        return Err(DecryptError::DecodingFailure(Stage::Ldpc));
    }
    let m1 = sk.s_inv.vec_mul(&first.codeword.slice(0, k))?;
    let m2 = sk.s_inv.vec_mul(&second.codeword.slice(0, k))?;
    Ok(BitVector::concat(&[&m1, &m2]))
}
