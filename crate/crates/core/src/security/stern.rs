//! Dense GF(2) matrices and Stern's search for low-weight dual codewords.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::bitvec::BitVector;
use crate::circulant::BlockMatrix;
use crate::error::{dim_check, Result};
use crate::rng::{RandomStream, SEED_BYTES};

/// Row-major dense binary matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

impl DenseMatrix {
    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            dim_check(row.len() == cols, || format!("row {i} has {} bits, expected {cols}", row.len()))?;
        }
        Ok(DenseMatrix { cols, rows })
    }

    pub fn from_block_matrix(m: &BlockMatrix) -> Self {
        DenseMatrix {
            cols: m.cols() * m.r(),
            rows: m.expand(),
        }
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    /// `v M^T`: bit `i` is the inner product of `v` with row `i`.
    pub fn mul_transpose(&self, v: &BitVector) -> Result<BitVector> {
        dim_check(v.len() == self.cols, || format!("vector of {} bits, {} columns", v.len(), self.cols))?;
        let mut out = BitVector::zeros(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            if row.dot(v)? {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Gauss-Jordan elimination taking pivots in the given column order.
    /// Zero rows are dropped; row `i` of the result has its pivot at the
    /// returned column `i` and is the only row with a one there.
    pub fn reduce(&mut self, order: &[usize]) -> Vec<usize> {
        let mut pivots = Vec::new();
        for &c in order {
            let rank = pivots.len();
            if rank == self.rows.len() {
                break;
            }
            let Some(p) = (rank..self.rows.len()).find(|&i| self.rows[i].get(c)) else {
                continue;
            };
            self.rows.swap(rank, p);
            let pivot = self.rows[rank].clone();
            for (i, row) in self.rows.iter_mut().enumerate() {
                if i != rank && row.get(c) {
                    row.xor_assign(&pivot).expect("rows share a length");
                }
            }
            pivots.push(c);
        }
        self.rows.truncate(pivots.len());
        pivots
    }

    pub fn rank(&self) -> usize {
        let order: Vec<usize> = (0..self.cols).collect();
        self.clone().reduce(&order).len()
    }

    /// Basis of the orthogonal complement of the row space.
    pub fn dual(&self) -> DenseMatrix {
        let mut m = self.clone();
        let order: Vec<usize> = (0..self.cols).collect();
        let pivots = m.reduce(&order);
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let rows = (0..self.cols)
            .filter(|&j| !is_pivot[j])
            .map(|j| {
                let mut v = BitVector::unit(self.cols, j);
                for (row, &p) in m.rows.iter().zip(&pivots) {
                    if row.get(j) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect();
        DenseMatrix { cols: self.cols, rows }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SternHit {
    pub codeword: BitVector,
    /// Iterations consumed, counting the successful one.
    pub iterations: u64,
}

/// Window length: about `log2` of the half-list size, so that each list
/// element meets one candidate on average.
fn window(info: usize, redundancy: usize) -> usize {
    let half = info / 2;
    let pairs = (half * half.saturating_sub(1) / 2).max(1);
    (pairs.ilog2() as usize).min(redundancy).min(64)
}

/// Searches the dual of the code generated by `g` for a nonzero word of
/// weight at most `target_weight`.
///
/// Iteration `i` uses `substream(seed, i)` and the lowest successful index
/// wins, so the result does not depend on `workers`.
pub fn stern_search(
    g: &DenseMatrix,
    target_weight: usize,
    seed: &[u8; SEED_BYTES],
    max_iterations: u64,
    workers: usize,
) -> Result<Option<SternHit>> {
    let dual = g.dual();
    if dual.nrows() == 0 {
        return Ok(None);
    }
    let l = window(dual.nrows(), dual.ncols() - dual.nrows());
    let batch = workers.max(1) as u64;
    let mut start = 0;
    while start < max_iterations {
        let end = (start + batch).min(max_iterations);
        let found: Vec<Option<BitVector>> = (start..end)
            .into_par_iter()
            .map(|i| iteration(&dual, target_weight, l, &mut RandomStream::substream(seed, i)))
            .collect();
        if let Some((j, v)) = found.into_iter().enumerate().find_map(|(j, v)| v.map(|v| (j, v))) {
            debug_assert!(g.mul_transpose(&v).map(|s| s.is_zero()).unwrap_or(false));
            return Ok(Some(SternHit {
                codeword: v,
                iterations: start + j as u64 + 1,
            }));
        }
        start = end;
    }
    Ok(None)
}

/// One Stern iteration with two rows from each half of the information set
/// and `l` window positions that must cancel.
fn iteration(dual: &DenseMatrix, target: usize, l: usize, rng: &mut RandomStream) -> Option<BitVector> {
    let n = dual.ncols();
    let order = rng.permutation(n);
    let mut m = dual.clone();
    let pivots = m.reduce(&order);
    let rows = &m.rows;
    if let Some(v) = rows.iter().find(|v| v.weight() <= target) {
        return Some(v.clone());
    }
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let window: Vec<usize> = order.iter().copied().filter(|&c| !is_pivot[c]).take(l).collect();
    let keys: Vec<u64> = rows
        .iter()
        .map(|v| {
            window
                .iter()
                .enumerate()
                .fold(0u64, |acc, (b, &c)| acc | ((v.get(c) as u64) << b))
        })
        .collect();
    let half = rows.len() / 2;
    let mut left: HashMap<u64, Vec<(usize, usize)>> = HashMap::new();
    for a in 0..half {
        for b in a + 1..half {
            left.entry(keys[a] ^ keys[b]).or_default().push((a, b));
        }
    }
    for c in half..rows.len() {
        for d in c + 1..rows.len() {
            let Some(matches) = left.get(&(keys[c] ^ keys[d])) else {
                continue;
            };
            let right = rows[c].xor(&rows[d]).expect("rows share a length");
            for &(a, b) in matches {
                let mut v = right.xor(&rows[a]).expect("rows share a length");
                v.xor_assign(&rows[b]).expect("rows share a length");
                if v.weight() <= target {
                    return Some(v);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_is_orthogonal_and_complementary() {
        let mut rng = RandomStream::from_seed(&[4; 32]);
        let rows = (0..7).map(|_| rng.bits(20)).collect();
        let g = DenseMatrix::from_rows(20, rows).unwrap();
        let d = g.dual();
        assert_eq!(g.rank() + d.nrows(), 20);
        for v in d.rows() {
            assert!(g.mul_transpose(v).unwrap().is_zero());
        }
    }

    #[test]
    fn full_target_weight_takes_one_iteration() {
        let mut rng = RandomStream::from_seed(&[5; 32]);
        let rows = (0..10).map(|_| rng.bits(24)).collect();
        let g = DenseMatrix::from_rows(24, rows).unwrap();
        let hit = stern_search(&g, 24, &[0; 32], 5, 1).unwrap().unwrap();
        assert_eq!(hit.iterations, 1);
        assert!(g.mul_transpose(&hit.codeword).unwrap().is_zero());
    }

    #[test]
    fn whole_space_has_empty_dual() {
        let g = DenseMatrix::from_rows(4, (0..4).map(|i| BitVector::unit(4, i)).collect()).unwrap();
        assert_eq!(stern_search(&g, 4, &[0; 32], 3, 1).unwrap(), None);
    }
}
