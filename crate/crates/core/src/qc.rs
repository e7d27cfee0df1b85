//! Quasi-cyclic MDPC/LDPC codes given by a row of circulant parity-check blocks.

use serde::{Deserialize, Serialize};

use crate::bitvec::BitVector;
use crate::circulant::CirculantBlock;
use crate::error::{dim_check, Error, Result};
use crate::rng::{sample_support, RandomStream};

/// Bound on resampling the last parity block before giving up.
pub const MAX_LAST_BLOCK_ATTEMPTS: usize = 100;

/// Largest row weight accepted for the low-density flavor.
pub const LDPC_MAX_WEIGHT: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Flavor {
    Mdpc,
    Ldpc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QcParams {
    pub n0: usize,
    pub r: usize,
    pub w: usize,
    pub flavor: Flavor,
}

impl QcParams {
    pub fn new(n0: usize, r: usize, w: usize, flavor: Flavor) -> Result<Self> {
        let p = QcParams { n0, r, w, flavor };
        p.validate()?;
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n0 * self.r
    }

    pub fn k(&self) -> usize {
        (self.n0 - 1) * self.r
    }

    pub fn validate(&self) -> Result<()> {
        if self.n0 < 2 {
            return Err(Error::Parameter(format!("n0 = {} must be at least 2", self.n0)));
        }
        if self.r.is_multiple_of(2) {
            return Err(Error::Parameter(format!("r = {} must be odd", self.r)));
        }
        let weights = self.block_weights();
        if weights.iter().any(|w| *w > self.r) {
            return Err(Error::Parameter(format!(
                "row weight {} cannot be spread over {} blocks of size {}",
                self.w, self.n0, self.r
            )));
        }
        if weights[self.n0 - 1].is_multiple_of(2) {
            return Err(Error::Parameter(format!(
                "row weight {} leaves an even-weight last block",
                self.w
            )));
        }
        let sqrt_n = (self.n() as f64).sqrt();
        match self.flavor {
            Flavor::Mdpc if (self.w as f64) < sqrt_n / 2.0 || (self.w as f64) > 4.0 * sqrt_n => {
                Err(Error::Parameter(format!(
                    "MDPC row weight {} outside [{:.1}, {:.1}] for n = {}",
                    self.w,
                    sqrt_n / 2.0,
                    4.0 * sqrt_n,
                    self.n()
                )))
            }
            Flavor::Ldpc if self.w > LDPC_MAX_WEIGHT => Err(Error::Parameter(format!(
                "LDPC row weight {} exceeds {LDPC_MAX_WEIGHT}",
                self.w
            ))),
            _ => Ok(()),
        }
    }

    /// Per-block weights: as even as possible, earlier blocks taking the
    /// remainder, then one unit moved from block 0 to the last block when the
    /// last share is even.
    pub fn block_weights(&self) -> Vec<usize> {
        split_weight(self.w, self.n0)
    }
}

pub(crate) fn split_weight(w: usize, n0: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..n0)
        .map(|i| w / n0 + usize::from(i < w % n0))
        .collect();
    if out[n0 - 1].is_multiple_of(2) && out[0] > 0 && n0 > 1 {
        out[0] -= 1;
        out[n0 - 1] += 1;
    }
    out
}

/// Parity-check matrix `H = [H_0 | ... | H_{n0-1}]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QcParityCheck {
    params: QcParams,
    blocks: Vec<CirculantBlock>,
    supports: Vec<Vec<usize>>,
}

impl QcParityCheck {
    /// Validates block count, block size, per-block weights and invertibility
    /// of the last block.
    pub fn new(params: QcParams, blocks: Vec<CirculantBlock>) -> Result<Self> {
        params.validate()?;
        let h = Self::build(params, blocks)?;
        let weights: Vec<usize> = h.blocks.iter().map(|b| b.weight()).collect();
        if weights != params.block_weights() {
            return Err(Error::Parameter(format!(
                "block weights {weights:?} differ from the split {:?} of w = {}",
                params.block_weights(),
                params.w
            )));
        }
        h.blocks[params.n0 - 1].inverse()?;
        Ok(h)
    }

    /// Parity-check used only for decoding: the blocks need not follow the
    /// weight split, and the last block need not be invertible.
    pub fn for_decoding(flavor: Flavor, blocks: Vec<CirculantBlock>) -> Result<Self> {
        if blocks.len() < 2 {
            return Err(Error::Parameter("at least two blocks are required".into()));
        }
        let params = QcParams {
            n0: blocks.len(),
            r: blocks[0].r(),
            w: blocks.iter().map(|b| b.weight()).sum(),
            flavor,
        };
        Self::build(params, blocks)
    }

    fn build(params: QcParams, blocks: Vec<CirculantBlock>) -> Result<Self> {
        dim_check(blocks.len() == params.n0, || {
            format!("{} blocks for n0 = {}", blocks.len(), params.n0)
        })?;
        dim_check(blocks.iter().all(|b| b.r() == params.r), || {
            format!("block size differs from r = {}", params.r)
        })?;
        let supports = blocks.iter().map(|b| b.row0().support()).collect();
        Ok(QcParityCheck {
            params,
            blocks,
            supports,
        })
    }

    pub fn params(&self) -> &QcParams {
        &self.params
    }

    pub fn blocks(&self) -> &[CirculantBlock] {
        &self.blocks
    }

    /// Supports of the first rows, one list per block.
    pub fn supports(&self) -> &[Vec<usize>] {
        &self.supports
    }

    pub fn block_weights(&self) -> Vec<usize> {
        self.supports.iter().map(Vec::len).collect()
    }

    /// Column weight of code position `j`.
    pub fn column_weight(&self, j: usize) -> usize {
        self.supports[j / self.params.r].len()
    }

    pub fn n(&self) -> usize {
        self.params.n()
    }

    pub fn r(&self) -> usize {
        self.params.r
    }

    /// `H x^T` as an `r`-bit vector, accumulated block by block.
    pub fn syndrome(&self, x: &BitVector) -> Result<BitVector> {
        dim_check(x.len() == self.n(), || {
            format!("word of length {} for code length {}", x.len(), self.n())
        })?;
        let r = self.params.r;
        let mut s = BitVector::zeros(r);
        for (i, part) in x.chunks(r).iter().enumerate() {
            // row c of H_i x_i^T sums x_{c + p} over the block support p
            for l in part.iter_ones() {
                for &p in &self.supports[i] {
                    s.flip((l + r - p) % r);
                }
            }
        }
        Ok(s)
    }

    /// Dense `r x n` expansion.
    pub fn expand(&self) -> Vec<BitVector> {
        let expanded: Vec<Vec<BitVector>> = self.blocks.iter().map(|b| b.expand()).collect();
        (0..self.params.r)
            .map(|row| BitVector::concat(&expanded.iter().map(|e| &e[row]).collect::<Vec<_>>()))
            .collect()
    }
}

/// Samples each block's first row at its fixed weight; the last block is
/// resampled until it is invertible.
pub fn sample_parity_check(rng: &mut RandomStream, params: QcParams) -> Result<QcParityCheck> {
    params.validate()?;
    let weights = params.block_weights();
    let mut blocks = Vec::with_capacity(params.n0);
    for &w in &weights[..params.n0 - 1] {
        blocks.push(CirculantBlock::from_support(params.r, sample_support(rng, params.r, w)?));
    }
    let last_w = weights[params.n0 - 1];
    for _ in 0..MAX_LAST_BLOCK_ATTEMPTS {
        let candidate = CirculantBlock::from_support(params.r, sample_support(rng, params.r, last_w)?);
        if candidate.inverse().is_ok() {
            blocks.push(candidate);
            return QcParityCheck::build(params, blocks);
        }
    }
    Err(Error::Generation(format!(
        "no invertible last block after {MAX_LAST_BLOCK_ATTEMPTS} attempts"
    )))
}

/// Systematic generator `[I_k | Q]` where the parity column holds
/// `Q_i = (H_{n0-1}^{-1} H_i)^T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QcGenerator {
    params: QcParams,
    right_blocks: Vec<CirculantBlock>,
}

impl QcGenerator {
    pub fn params(&self) -> &QcParams {
        &self.params
    }

    pub fn right_blocks(&self) -> &[CirculantBlock] {
        &self.right_blocks
    }

    pub fn k(&self) -> usize {
        self.params.k()
    }

    /// Systematic encoding `[m | sum_i m_i Q_i]`.
    pub fn encode(&self, m: &BitVector) -> Result<BitVector> {
        dim_check(m.len() == self.k(), || {
            format!("message of length {} for dimension {}", m.len(), self.k())
        })?;
        let mut parity = BitVector::zeros(self.params.r);
        for (part, q) in m.chunks(self.params.r).iter().zip(&self.right_blocks) {
            parity.xor_assign(&q.vec_mul(part)?)?;
        }
        Ok(BitVector::concat(&[m, &parity]))
    }

    /// Dense `k x n` expansion of `[I | Q]`.
    pub fn expand(&self) -> Vec<BitVector> {
        let r = self.params.r;
        let k = self.k();
        let mut rows = Vec::with_capacity(k);
        for (bi, q) in self.right_blocks.iter().enumerate() {
            for (row, qrow) in q.expand().into_iter().enumerate() {
                let ident = BitVector::unit(k, bi * r + row);
                rows.push(BitVector::concat(&[&ident, &qrow]));
            }
        }
        rows
    }
}

pub fn derive_generator(h: &QcParityCheck) -> Result<QcGenerator> {
    let n0 = h.params.n0;
    let last_inv = h.blocks[n0 - 1].inverse()?;
    let right_blocks = h.blocks[..n0 - 1]
        .iter()
        .map(|hi| Ok(last_inv.mul(hi)?.transpose()))
        .collect::<Result<Vec<_>>>()?;
    Ok(QcGenerator {
        params: h.params,
        right_blocks,
    })
}

/// Cyclically shifts every length-`r` block of `x` by `s` positions.
pub fn rotate_blocks(x: &BitVector, r: usize, s: usize) -> BitVector {
    let parts: Vec<BitVector> = x.chunks(r).iter().map(|p| p.rotated(s)).collect();
    BitVector::concat(&parts.iter().collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(b: u8) -> RandomStream {
        RandomStream::from_seed(&[b; 32])
    }

    #[test]
    fn weight_split_rules() {
        assert_eq!(split_weight(6, 2), vec![3, 3]);
        assert_eq!(split_weight(30, 2), vec![15, 15]);
        assert_eq!(split_weight(8, 2), vec![3, 5]);
        assert_eq!(split_weight(5, 2), vec![2, 3]);
        assert_eq!(split_weight(3, 2), vec![2, 1]);
        assert_eq!(split_weight(14, 3), vec![4, 5, 5]);
        assert_eq!(split_weight(142, 2), vec![71, 71]);
    }

    #[test]
    fn params_validation() {
        assert!(QcParams::new(2, 14, 6, Flavor::Ldpc).is_err());
        assert!(QcParams::new(1, 13, 6, Flavor::Ldpc).is_err());
        assert!(QcParams::new(2, 13, 40, Flavor::Ldpc).is_err());
        assert!(QcParams::new(2, 523, 10, Flavor::Mdpc).is_err());
        assert!(QcParams::new(2, 523, 30, Flavor::Mdpc).is_ok());
        assert!(QcParams::new(2, 3, 9, Flavor::Ldpc).is_err());
    }

    #[test]
    fn sampled_ldpc_toy() {
        let p = QcParams::new(2, 13, 6, Flavor::Ldpc).unwrap();
        let h = sample_parity_check(&mut rng(1), p).unwrap();
        assert_eq!(h.block_weights(), vec![3, 3]);
        assert!(h.blocks()[1].inverse().is_ok());
        assert!(QcParityCheck::new(p, h.blocks().to_vec()).is_ok());
    }

    #[test]
    fn sampled_mdpc_toy() {
        let p = QcParams::new(2, 523, 30, Flavor::Mdpc).unwrap();
        let h = sample_parity_check(&mut rng(2), p).unwrap();
        assert_eq!(h.block_weights(), vec![15, 15]);
        assert!(h.blocks()[1].inverse().is_ok());
    }

    #[test]
    fn even_share_moves_to_last_block() {
        let p = QcParams::new(2, 523, 8, Flavor::Ldpc).unwrap();
        let h = sample_parity_check(&mut rng(3), p).unwrap();
        assert_eq!(h.block_weights(), vec![3, 5]);
    }

    #[test]
    fn identity_parity_gives_repetition_code() {
        let p = QcParams {
            n0: 2,
            r: 7,
            w: 2,
            flavor: Flavor::Ldpc,
        };
        let h = QcParityCheck::new(p, vec![CirculantBlock::identity(7); 2]).unwrap();
        let g = derive_generator(&h).unwrap();
        assert!(g.right_blocks()[0].is_identity());
        let m = BitVector::from_support(7, [1, 4, 6]);
        assert_eq!(g.encode(&m).unwrap(), BitVector::concat(&[&m, &m]));
        assert!(g.encode(&BitVector::zeros(7)).unwrap().is_zero());
    }

    #[test]
    fn codewords_have_zero_syndrome() {
        for (n0, w) in [(2, 6), (3, 9)] {
            let p = QcParams::new(n0, 13, w, Flavor::Ldpc).unwrap();
            let mut rng = rng(4);
            let h = sample_parity_check(&mut rng, p).unwrap();
            let g = derive_generator(&h).unwrap();
            for _ in 0..20 {
                let m = rng.bits(g.k());
                let c = g.encode(&m).unwrap();
                assert_eq!(c.slice(0, g.k()), m);
                assert!(h.syndrome(&c).unwrap().is_zero());
                assert!(h.syndrome(&rotate_blocks(&c, 13, 1)).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn new_rejects_bad_blocks() {
        let p = QcParams::new(2, 13, 6, Flavor::Ldpc).unwrap();
        let wrong_weight = vec![
            CirculantBlock::from_support(13, [0, 1]),
            CirculantBlock::from_support(13, [0, 1, 2, 3]),
        ];
        assert!(QcParityCheck::new(p, wrong_weight).is_err());
        assert!(matches!(
            QcParityCheck::new(p, vec![CirculantBlock::identity(13)]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn dimension_errors() {
        let p = QcParams::new(2, 13, 6, Flavor::Ldpc).unwrap();
        let h = sample_parity_check(&mut rng(5), p).unwrap();
        let g = derive_generator(&h).unwrap();
        assert!(matches!(g.encode(&BitVector::zeros(12)), Err(Error::Dimension(_))));
        assert!(matches!(h.syndrome(&BitVector::zeros(25)), Err(Error::Dimension(_))));
    }
}
