//! Weak-key attack on the LDPC half.
//!
//! The public `S G2` spans the LDPC code, so its dual contains the sparse
//! rows of `H2`. Stern finds one of them and its block rotations rebuild a
//! sparse parity check `H2'` as good as the secret one. Plaintext recovery
//! still fails because the LDPC half of a ciphertext carries `m1 S G1` and
//! the mask `h(z1)`, which together look like an error of weight `n/2`.

use serde::{Deserialize, Serialize};

use crate::bitflip::decode;
use crate::bitvec::BitVector;
use crate::circulant::{BlockMatrix, CirculantBlock};
use crate::error::{Error, Result};
use crate::params::SchemeParams;
use crate::pke::{ldpc_decoder, Ciphertext, PublicKey};
use crate::qc::{rotate_blocks, Flavor, QcParityCheck};
use crate::rng::{sample_fixed_weight, RandomStream, SEED_BYTES};
use crate::security::stern::{stern_search, DenseMatrix};

/// MDPC weight error used by [`demo_params`].
pub const DEMO_T1: usize = 4;
/// LDPC weight error used by [`demo_params`].
pub const DEMO_T2: usize = 2;

/// Toy parameters around a given LDPC shape: `w1` is the valid MDPC weight
/// closest to `sqrt(2r)`.
pub fn demo_params(r: usize, w2: usize) -> Result<SchemeParams> {
    let w1 = ((2.0 * r as f64).sqrt().round() as usize).max(2);
    SchemeParams::new(2, r, w1, w2, DEMO_T1, DEMO_T2)
}

#[derive(Clone, Debug)]
pub struct RecoveredDual {
    /// Distinct block rotations of the word Stern found.
    pub rows: Vec<BitVector>,
    /// The rotations span an `r`-dimensional space.
    pub complete: bool,
    /// Every row is orthogonal to every row of `S G2`.
    pub orthogonal: bool,
    pub stern_iterations: u64,
    /// Block-circulant parity check whose first row is the found word.
    pub parity_check: QcParityCheck,
}

impl RecoveredDual {
    pub fn row_weight(&self) -> usize {
        self.rows[0].weight()
    }
}

/// Runs Stern on the dual of the public LDPC code for a word of weight at
/// most `w2`, then completes it by rotation.
pub fn recover_dual(
    pk: &PublicKey,
    seed: &[u8; SEED_BYTES],
    max_iterations: u64,
    workers: usize,
) -> Result<Option<RecoveredDual>> {
    let p = pk.params();
    let g = DenseMatrix::from_block_matrix(pk.sg2());
    let Some(hit) = stern_search(&g, p.w2, seed, max_iterations, workers)? else {
        return Ok(None);
    };
    let v = hit.codeword;
    let mut rows: Vec<BitVector> = Vec::with_capacity(p.r);
    for s in 0..p.r {
        let rot = rotate_blocks(&v, p.r, s);
        if !rows.contains(&rot) {
            rows.push(rot);
        }
    }
    let complete = DenseMatrix::from_rows(p.n(), rows.clone())?.rank() == p.r;
    let blocks = v.chunks(p.r).into_iter().map(CirculantBlock::from_row).collect();
    let parity_check = QcParityCheck::for_decoding(Flavor::Ldpc, blocks)?;
    let mut orthogonal = true;
    for row in g.rows() {
        orthogonal &= parity_check.syndrome(row)?.is_zero();
    }
    Ok(Some(RecoveredDual {
        rows,
        complete,
        orthogonal,
        stern_iterations: hit.iterations,
        parity_check,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DecodeAttempt {
    /// Weight of the word's offset from `m2 S G2`, computed with the oracle.
    pub residual_weight: usize,
    pub decoder_success: bool,
    /// The decoded codeword maps back to the true `m2`.
    pub plaintext_recovered: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AttackReport {
    pub recovered_row_weight: usize,
    pub dual_orthogonal: bool,
    pub dual_complete: bool,
    /// Decoding `c2` directly with `H2'`.
    pub direct_c2: DecodeAttempt,
    /// Decoding `c1 + c2 = m2 S G2 + z1 + z2 + h(z1)` with `H2'`.
    pub sum_c1_c2: DecodeAttempt,
    /// `H2'` decodes an unmasked `m2 S G2 + z2`.
    pub clean_decode_success: bool,
    pub attack_succeeded: bool,
}

/// The scrambler sits in the clear as the left blocks of `S G2`.
fn public_scrambler_inverse(pk: &PublicKey) -> Result<BlockMatrix> {
    let sg2 = pk.sg2();
    let k0 = sg2.rows();
    let blocks = (0..k0)
        .flat_map(|i| (0..k0).map(move |j| (i, j)))
        .map(|(i, j)| sg2.block(i, j).clone())
        .collect();
    BlockMatrix::from_blocks(k0, k0, blocks)?.inverse()
}

fn attempt(
    h: &QcParityCheck,
    y: &BitVector,
    reference: &BitVector,
    m2: &BitVector,
    s_inv: &BlockMatrix,
) -> Result<DecodeAttempt> {
    let out = decode(h, y, &ldpc_decoder())?;
    let plaintext_recovered =
        out.success && s_inv.vec_mul(&out.codeword.slice(0, m2.len()))? == *m2;
    Ok(DecodeAttempt {
        residual_weight: y.distance(reference)?,
        decoder_success: out.success,
        plaintext_recovered,
    })
}

/// Tries to read `m2` out of `ct` with the recovered dual. `plaintext` is
/// the oracle used only for scoring; `rng` draws the clean comparison word.
pub fn weak_key_attack_demo(
    pk: &PublicKey,
    ct: &Ciphertext,
    plaintext: &BitVector,
    dual: &RecoveredDual,
    rng: &mut RandomStream,
) -> Result<AttackReport> {
    let p = pk.params();
    let k = p.k();
    if plaintext.len() != 2 * k {
        return Err(Error::Dimension(format!(
            "oracle plaintext of {} bits, expected {}",
            plaintext.len(),
            2 * k
        )));
    }
    let m2 = plaintext.slice(k, k);
    let s_inv = public_scrambler_inverse(pk)?;
    let reference = pk.sg2().vec_mul(&m2)?;
    let h = &dual.parity_check;

    let direct_c2 = attempt(h, &ct.c2, &reference, &m2, &s_inv)?;
    let sum = ct.c1.xor(&ct.c2)?;
    let sum_c1_c2 = attempt(h, &sum, &reference, &m2, &s_inv)?;

    let mut clean = reference.clone();
    clean.xor_assign(&sample_fixed_weight(rng, p.n(), p.t2)?)?;
    let clean_out = decode(h, &clean, &ldpc_decoder())?;
    let clean_decode_success = clean_out.success && clean_out.codeword == reference;

    Ok(AttackReport {
        recovered_row_weight: dual.row_weight(),
        dual_orthogonal: dual.orthogonal,
        dual_complete: dual.complete,
        attack_succeeded: direct_c2.plaintext_recovered || sum_c1_c2.plaintext_recovered,
        direct_c2,
        sum_c1_c2,
        clean_decode_success,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demo_params_are_valid() {
        let p = demo_params(101, 6).unwrap();
        assert_eq!((p.n0, p.r, p.w1, p.w2), (2, 101, 14, 6));
        assert!(demo_params(100, 6).is_err());
    }
}
