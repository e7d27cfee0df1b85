//! Dense GF(2) matrices as plain `Vec<Vec<bool>>`, written without touching
//! the library's arithmetic so it can serve as an oracle.

#![allow(dead_code)]

use plotkin_mceliece::bitvec::BitVector;

pub type Dense = Vec<Vec<bool>>;

pub fn bits(v: &BitVector) -> Vec<bool> {
    (0..v.len()).map(|i| v.get(i)).collect()
}

pub fn to_bitvector(v: &[bool]) -> BitVector {
    BitVector::from_bools(v)
}

pub fn zeros(rows: usize, cols: usize) -> Dense {
    vec![vec![false; cols]; rows]
}

pub fn identity(n: usize) -> Dense {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = true;
    }
    m
}

/// Row `i` is `row0` shifted right by `i`.
pub fn circulant(row0: &[bool]) -> Dense {
    let r = row0.len();
    (0..r)
        .map(|i| (0..r).map(|j| row0[(j + r - i) % r]).collect())
        .collect()
}

pub fn add(a: &Dense, b: &Dense) -> Dense {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p ^ q).collect())
        .collect()
}

pub fn mul(a: &Dense, b: &Dense) -> Dense {
    let (n, m, p) = (a.len(), b.len(), b.first().map_or(0, |r| r.len()));
    let mut out = zeros(n, p);
    for i in 0..n {
        for k in 0..m {
            if a[i][k] {
                for j in 0..p {
                    out[i][j] ^= b[k][j];
                }
            }
        }
    }
    out
}

pub fn transpose(a: &Dense) -> Dense {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols).map(|j| a.iter().map(|row| row[j]).collect()).collect()
}

pub fn vec_mul(v: &[bool], m: &Dense) -> Vec<bool> {
    mul(&vec![v.to_vec()], m).remove(0)
}

/// Gauss-Jordan inverse, `None` when singular.
pub fn inverse(a: &Dense) -> Option<Dense> {
    let n = a.len();
    let mut m: Dense = a
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().copied().chain(id).collect())
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| m[i][c])?;
        m.swap(c, p);
        let pivot = m[c].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != c && row[c] {
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Assembles a grid of equally sized dense blocks.
pub fn from_blocks(grid: &[Vec<Dense>]) -> Dense {
    let mut out = Vec::new();
    for block_row in grid {
        let height = block_row[0].len();
        for i in 0..height {
            out.push(block_row.iter().flat_map(|b| b[i].iter().copied()).collect());
        }
    }
    out
}

pub fn is_zero(a: &Dense) -> bool {
    a.iter().all(|row| row.iter().all(|&b| !b))
}

pub fn rows_to_dense(rows: &[BitVector]) -> Dense {
    rows.iter().map(bits).collect()
}
