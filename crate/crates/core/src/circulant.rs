//! Binary circulant matrices as elements of GF(2)[x]/(x^r - 1).
//!
//! A block is stored as its first row `a_0..a_{r-1}`; row `i` of the matrix is
//! that row cyclically shifted `i` places to the right, so the matrix entry at
//! `(i, j)` is `a_{(j - i) mod r}`. Under this convention the matrix of
//! `a(x)` times the matrix of `b(x)` is the matrix of `a(x) b(x)`, and a row
//! vector `v` times the matrix of `a` is the coefficient vector of `v(x) a(x)`.

use crate::bitvec::{shifted_down, shifted_up, BitVector};
use crate::error::{dim_check, Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CirculantBlock {
    row0: BitVector,
}

impl CirculantBlock {
    pub fn from_row(row0: BitVector) -> Self {
        assert!(!row0.is_empty(), "circulant block size must be positive");
        CirculantBlock { row0 }
    }

    pub fn zero(r: usize) -> Self {
        Self::from_row(BitVector::zeros(r))
    }

    pub fn identity(r: usize) -> Self {
        Self::monomial(r, 0)
    }

    /// The block of `x^i`: a cyclic shift matrix.
    pub fn monomial(r: usize, i: usize) -> Self {
        Self::from_row(BitVector::unit(r, i % r))
    }

    pub fn from_support<I: IntoIterator<Item = usize>>(r: usize, support: I) -> Self {
        Self::from_row(BitVector::from_support(r, support))
    }

    #[inline]
    pub fn r(&self) -> usize {
        self.row0.len()
    }

    #[inline]
    pub fn row0(&self) -> &BitVector {
        &self.row0
    }

    pub fn into_row0(self) -> BitVector {
        self.row0
    }

    pub fn weight(&self) -> usize {
        self.row0.weight()
    }

    pub fn is_zero(&self) -> bool {
        self.row0.is_zero()
    }

    pub fn is_identity(&self) -> bool {
        self.row0.get(0) && self.row0.weight() == 1
    }

    fn same_r(&self, other: &Self, op: &str) -> Result<()> {
        dim_check(self.r() == other.r(), || {
            format!("{op} of circulants with r={} and r={}", self.r(), other.r())
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_r(other, "sum")?;
        Ok(Self::from_row(self.row0.xor(&other.row0)?))
    }

    /// Product `a(x) b(x) mod (x^r - 1)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_r(other, "product")?;
        Ok(Self::from_row(poly_mul_mod(&self.row0, &other.row0)))
    }

    /// Row vector times this block, `v(x) a(x) mod (x^r - 1)`.
    pub fn vec_mul(&self, v: &BitVector) -> Result<BitVector> {
        dim_check(v.len() == self.r(), || {
            format!("vector of length {} times circulant with r={}", v.len(), self.r())
        })?;
        Ok(poly_mul_mod(v, &self.row0))
    }

    /// Matrix transpose, i.e. `a(x^{-1})`.
    pub fn transpose(&self) -> Self {
        let r = self.r();
        Self::from_support(r, self.row0.iter_ones().map(|i| (r - i) % r))
    }

    /// Inverse by the extended Euclidean algorithm on `a(x)` and `x^r - 1`.
    pub fn inverse(&self) -> Result<Self> {
        let r = self.r();
        // a(1) = 0 puts (x + 1) in the gcd.
        if self.weight().is_multiple_of(2) {
            return Err(Error::NotInvertible);
        }
        let modulus = {
            let mut m = Poly::zero();
            m.flip(0);
            m.flip(r);
            m
        };
        let mut u = Poly::from_bits(&self.row0);
        let mut v = modulus;
        let mut g1 = Poly::one();
        let mut g2 = Poly::zero();
        loop {
            match u.degree() {
                None => {
                    return if v.degree() == Some(0) {
                        Ok(Self::from_row(g2.reduce_cyclic(r)))
                    } else {
                        Err(Error::NotInvertible)
                    };
                }
                Some(0) => return Ok(Self::from_row(g1.reduce_cyclic(r))),
                Some(du) => {
                    let dv = v.degree().expect("v is nonzero while u is nonzero");
                    if du < dv {
                        std::mem::swap(&mut u, &mut v);
                        std::mem::swap(&mut g1, &mut g2);
                        continue;
                    }
                    let j = du - dv;
                    u.xor_shifted(&v, j);
                    g1.xor_shifted(&g2, j);
                }
            }
        }
    }

    /// Explicit `r x r` expansion, one `BitVector` per row.
    pub fn expand(&self) -> Vec<BitVector> {
        (0..self.r()).map(|i| self.row0.rotated(i)).collect()
    }
}

/// Cyclic product of two length-`r` coefficient vectors.
pub(crate) fn poly_mul_mod(a: &BitVector, b: &BitVector) -> BitVector {
    let r = a.len();
    debug_assert_eq!(r, b.len());
    let (wa, wb) = (a.weight(), b.weight());
    let (sparse, dense, ws) = if wa <= wb { (a, b, wa) } else { (b, a, wb) };
    if ws * ws <= r {
        let mut acc = BitVector::zeros(r);
        for i in sparse.iter_ones() {
            acc.xor_assign(&dense.rotated(i)).expect("equal lengths");
        }
        return acc;
    }
    let full = schoolbook(a.words(), b.words());
    let nw = r.div_ceil(64);
    let low = BitVector::from_words(r, full[..nw.min(full.len())].to_vec());
    let high = BitVector::from_words(r, shifted_down(&full, r, nw));
    low.xor(&high).expect("equal lengths")
}

/// Full (non-reduced) carryless product of two word arrays.
fn schoolbook(aw: &[u64], bw: &[u64]) -> Vec<u64> {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("pclmulqdq") {
            // SAFETY: the required CPU feature was detected at runtime.
            return unsafe { schoolbook_pclmul(aw, bw) };
        }
    }
    schoolbook_portable(aw, bw)
}

fn schoolbook_portable(aw: &[u64], bw: &[u64]) -> Vec<u64> {
    let mut full = vec![0u64; aw.len() + bw.len() + 1];
    for (i, &x) in aw.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in bw.iter().enumerate() {
            let (lo, hi) = clmul64(x, y);
            full[i + j] ^= lo;
            full[i + j + 1] ^= hi;
        }
    }
    full
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "pclmulqdq,sse2")]
unsafe fn schoolbook_pclmul(aw: &[u64], bw: &[u64]) -> Vec<u64> {
    use std::arch::x86_64::{_mm_clmulepi64_si128, _mm_cvtsi128_si64, _mm_set_epi64x, _mm_srli_si128};
    let mut full = vec![0u64; aw.len() + bw.len() + 1];
    for (i, &x) in aw.iter().enumerate() {
        if x == 0 {
            continue;
        }
        let xv = _mm_set_epi64x(0, x as i64);
        for (j, &y) in bw.iter().enumerate() {
            let p = _mm_clmulepi64_si128(xv, _mm_set_epi64x(0, y as i64), 0x00);
            full[i + j] ^= _mm_cvtsi128_si64(p) as u64;
            full[i + j + 1] ^= _mm_cvtsi128_si64(_mm_srli_si128(p, 8)) as u64;
        }
    }
    full
}

/// Carryless 64x64 -> 128 multiply.
#[inline]
fn clmul64(a: u64, b: u64) -> (u64, u64) {
    let mut lo = 0u64;
    let mut hi = 0u64;
    let mut y = b;
    while y != 0 {
        let i = y.trailing_zeros();
        y &= y - 1;
        lo ^= a << i;
        if i > 0 {
            hi ^= a >> (64 - i);
        }
    }
    (lo, hi)
}

/// Unbounded GF(2)[x] polynomial used by the inversion routine.
#[derive(Clone)]
struct Poly {
    words: Vec<u64>,
}

impl Poly {
    fn zero() -> Self {
        Poly { words: Vec::new() }
    }

    fn one() -> Self {
        Poly { words: vec![1] }
    }

    fn from_bits(v: &BitVector) -> Self {
        let mut p = Poly {
            words: v.words().to_vec(),
        };
        p.trim();
        p
    }

    fn flip(&mut self, i: usize) {
        if self.words.len() <= i / 64 {
            self.words.resize(i / 64 + 1, 0);
        }
        self.words[i / 64] ^= 1 << (i % 64);
        self.trim();
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    fn degree(&self) -> Option<usize> {
        let last = *self.words.last()?;
        Some((self.words.len() - 1) * 64 + 63 - last.leading_zeros() as usize)
    }

    /// `self += other * x^j`.
    fn xor_shifted(&mut self, other: &Poly, j: usize) {
        let Some(d) = other.degree() else { return };
        let need = (d + j) / 64 + 1;
        if self.words.len() < need {
            self.words.resize(need, 0);
        }
        let moved = shifted_up(&other.words, j, need);
        for (a, b) in self.words.iter_mut().zip(moved) {
            *a ^= b;
        }
        self.trim();
    }

    /// Reduction modulo `x^r - 1` into a length-`r` vector.
    fn reduce_cyclic(&self, r: usize) -> BitVector {
        let mut acc = BitVector::zeros(r);
        let mut offset = 0;
        let total = self.words.len() * 64;
        while offset < total {
            let nw = r.div_ceil(64);
            let piece = BitVector::from_words(r, shifted_down(&self.words, offset, nw));
            acc.xor_assign(&piece).expect("equal lengths");
            offset += r;
        }
        acc
    }
}

/// Rectangular grid of circulant blocks sharing one block size.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BlockMatrix {
    rows: usize,
    cols: usize,
    r: usize,
    blocks: Vec<CirculantBlock>,
}

impl BlockMatrix {
    /// Builds a matrix from row-major blocks.
    pub fn from_blocks(rows: usize, cols: usize, blocks: Vec<CirculantBlock>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Parameter("block matrix needs at least one block".into()));
        }
        dim_check(blocks.len() == rows * cols, || {
            format!("{} blocks for a {rows}x{cols} grid", blocks.len())
        })?;
        let r = blocks[0].r();
        dim_check(blocks.iter().all(|b| b.r() == r), || {
            "blocks of differing size".to_string()
        })?;
        Ok(BlockMatrix { rows, cols, r, blocks })
    }

    pub fn zero(rows: usize, cols: usize, r: usize) -> Self {
        BlockMatrix {
            rows,
            cols,
            r,
            blocks: vec![CirculantBlock::zero(r); rows * cols],
        }
    }

    pub fn identity(size: usize, r: usize) -> Self {
        let mut m = Self::zero(size, size, r);
        for i in 0..size {
            *m.block_mut(i, i) = CirculantBlock::identity(r);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn blocks(&self) -> &[CirculantBlock] {
        &self.blocks
    }

    pub fn block(&self, i: usize, j: usize) -> &CirculantBlock {
        &self.blocks[i * self.cols + j]
    }

    fn block_mut(&mut self, i: usize, j: usize) -> &mut CirculantBlock {
        &mut self.blocks[i * self.cols + j]
    }

    pub fn mul(&self, other: &BlockMatrix) -> Result<BlockMatrix> {
        dim_check(self.cols == other.rows && self.r == other.r, || {
            format!(
                "{}x{} (r={}) times {}x{} (r={})",
                self.rows, self.cols, self.r, other.rows, other.cols, other.r
            )
        })?;
        let mut out = Self::zero(self.rows, other.cols, self.r);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = CirculantBlock::zero(self.r);
                for l in 0..self.cols {
                    acc = acc.add(&self.block(i, l).mul(other.block(l, j))?)?;
                }
                *out.block_mut(i, j) = acc;
            }
        }
        Ok(out)
    }

    /// Row vector (length `rows * r`) times this matrix.
    pub fn vec_mul(&self, v: &BitVector) -> Result<BitVector> {
        dim_check(v.len() == self.rows * self.r, || {
            format!("vector of length {} times {} block rows of r={}", v.len(), self.rows, self.r)
        })?;
        let parts = v.chunks(self.r);
        let mut out = Vec::with_capacity(self.cols);
        for j in 0..self.cols {
            let mut acc = BitVector::zeros(self.r);
            for (i, part) in parts.iter().enumerate() {
                acc.xor_assign(&self.block(i, j).vec_mul(part)?)?;
            }
            out.push(acc);
        }
        Ok(BitVector::concat(&out.iter().collect::<Vec<_>>()))
    }

    /// Inverse by Gauss-Jordan elimination over the circulant ring. A column
    /// with no invertible pivot block at or below the diagonal is reported as
    /// `NotInvertible` even if some combination of rows would succeed.
    pub fn inverse(&self) -> Result<BlockMatrix> {
        dim_check(self.rows == self.cols, || {
            format!("inverse of non-square {}x{} block matrix", self.rows, self.cols)
        })?;
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n, self.r);
        for col in 0..n {
            let (pivot_row, pivot_inv) = (col..n)
                .find_map(|i| a.block(i, col).inverse().ok().map(|p| (i, p)))
                .ok_or(Error::NotInvertible)?;
            a.swap_rows(col, pivot_row);
            inv.swap_rows(col, pivot_row);
            a.scale_row(col, &pivot_inv)?;
            inv.scale_row(col, &pivot_inv)?;
            for i in 0..n {
                if i == col || a.block(i, col).is_zero() {
                    continue;
                }
                let factor = a.block(i, col).clone();
                a.add_scaled_row(i, col, &factor)?;
                inv.add_scaled_row(i, col, &factor)?;
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.blocks.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn scale_row(&mut self, i: usize, factor: &CirculantBlock) -> Result<()> {
        for c in 0..self.cols {
            let b = factor.mul(self.block(i, c))?;
            *self.block_mut(i, c) = b;
        }
        Ok(())
    }

    /// `row[target] += factor * row[source]`.
    fn add_scaled_row(&mut self, target: usize, source: usize, factor: &CirculantBlock) -> Result<()> {
        for c in 0..self.cols {
            let b = self.block(target, c).add(&factor.mul(self.block(source, c))?)?;
            *self.block_mut(target, c) = b;
        }
        Ok(())
    }

    /// Dense expansion: `rows * r` rows of `cols * r` bits.
    pub fn expand(&self) -> Vec<BitVector> {
        let mut out = Vec::with_capacity(self.rows * self.r);
        for i in 0..self.rows {
            let expanded: Vec<Vec<BitVector>> =
                (0..self.cols).map(|j| self.block(i, j).expand()).collect();
            for row in 0..self.r {
                let parts: Vec<&BitVector> = expanded.iter().map(|e| &e[row]).collect();
                out.push(BitVector::concat(&parts));
            }
        }
        out
    }
}
