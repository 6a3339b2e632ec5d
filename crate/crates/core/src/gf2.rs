//! Dense GF(2) vectors and matrices.
//!
//! Vectors are packed into 64-bit limbs. Bit `i` of a vector is physical
//! qubit `i + 1` in the usual one-based labelling; all APIs in this crate
//! are zero-based and only the human-facing renderings add one.
//!
//! Every elimination routine pivots on the leftmost available column and
//! never randomizes, so results are reproducible bit for bit.

use std::fmt;
use std::ops::{BitAnd, BitXor, BitXorAssign};
use std::str::FromStr;

use thiserror::Error;

const LIMB: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("linear system has no solution")]
    NoSolution,
    #[error("matrix is rank deficient: rank {rank} with {rows} rows")]
    RankDeficient { rank: usize, rows: usize },
    #[error("row {row} of the subspace is not contained in the ambient row space")]
    NotContained { row: usize },
    #[error("invalid character {found:?} at position {position} in bit string")]
    Parse { position: usize, found: char },
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    limbs: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            limbs: vec![0; len.div_ceil(LIMB)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for limb in v.limbs.iter_mut() {
            *limb = u64::MAX;
        }
        v.mask_tail();
        v
    }

    /// Unit vector `e_index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Vector of length `len` with ones exactly at `support`.
    pub fn from_support<I: IntoIterator<Item = usize>>(len: usize, support: I) -> Self {
        let mut v = Self::zeros(len);
        for i in support {
            v.set(i, true);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        (self.limbs[i / LIMB] >> (i % LIMB)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % LIMB);
        if value {
            self.limbs[i / LIMB] |= mask;
        } else {
            self.limbs[i / LIMB] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.limbs[i / LIMB] ^= 1u64 << (i % LIMB);
    }

    pub fn weight(&self) -> usize {
        self.limbs.iter().map(|l| l.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    /// Indices of the one bits, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.limbs.iter().enumerate().flat_map(|(w, &limb)| {
            let mut bits = limb;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let t = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(w * LIMB + t)
                }
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.support().next()
    }

    /// Number of positions where both vectors are one.
    pub fn overlap(&self, other: &Self) -> Result<usize, Gf2Error> {
        self.check_len(other)?;
        Ok(self
            .limbs
            .iter()
            .zip(&other.limbs)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum())
    }

    /// Inner product `Σ aᵢbᵢ mod 2`.
    pub fn dot(&self, other: &Self) -> Result<bool, Gf2Error> {
        Ok(self.overlap(other)? % 2 == 1)
    }

    pub fn xor_assign_checked(&mut self, other: &Self) -> Result<(), Gf2Error> {
        self.check_len(other)?;
        for (a, b) in self.limbs.iter_mut().zip(&other.limbs) {
            *a ^= b;
        }
        Ok(())
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut v = Self::zeros(self.len + other.len);
        for i in self.support() {
            v.set(i, true);
        }
        for i in other.support() {
            v.set(self.len + i, true);
        }
        v
    }

    /// Bits `start..end` as a new vector.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.len);
        Self::from_bits((start..end).map(|i| self.get(i)))
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    fn check_len(&self, other: &Self) -> Result<(), Gf2Error> {
        if self.len != other.len {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.len,
                found: other.len,
            });
        }
        Ok(())
    }

    fn mask_tail(&mut self) {
        let rem = self.len % LIMB;
        if rem != 0 {
            if let Some(last) = self.limbs.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

/// Inner product of two equal-length vectors over GF(2).
pub fn dot_mod2(a: &BitVector, b: &BitVector) -> Result<bool, Gf2Error> {
    a.dot(b)
}

impl BitXorAssign<&BitVector> for BitVector {
    fn bitxor_assign(&mut self, rhs: &BitVector) {
        self.xor_assign_checked(rhs)
            .expect("xor of bit vectors with different lengths");
    }
}

impl BitXor<&BitVector> for &BitVector {
    type Output = BitVector;
    fn bitxor(self, rhs: &BitVector) -> BitVector {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

impl BitAnd<&BitVector> for &BitVector {
    type Output = BitVector;
    fn bitand(self, rhs: &BitVector) -> BitVector {
        assert_eq!(self.len, rhs.len, "and of bit vectors with different lengths");
        BitVector {
            len: self.len,
            limbs: self.limbs.iter().zip(&rhs.limbs).map(|(a, b)| a & b).collect(),
        }
    }
}

/// Renders as a 0/1 string with index 0 first.
impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Gf2Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut bits = Vec::with_capacity(s.len());
        for (position, c) in s.chars().enumerate() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                found => return Err(Gf2Error::Parse { position, found }),
            }
        }
        Ok(Self::from_bits(bits))
    }
}

/// A dense matrix over GF(2) stored as a list of rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            rows: Vec::new(),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            cols: n,
            rows: (0..n).map(|i| BitVector::unit(n, i)).collect(),
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self, Gf2Error> {
        for r in &rows {
            if r.len() != cols {
                return Err(Gf2Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
        }
        Ok(Self { cols, rows })
    }

    /// Parses rows given as 0/1 strings. All rows must share a length.
    pub fn from_strs(rows: &[&str]) -> Result<Self, Gf2Error> {
        let parsed = rows
            .iter()
            .map(|s| s.parse::<BitVector>())
            .collect::<Result<Vec<_>, _>>()?;
        let cols = parsed.first().map_or(0, BitVector::len);
        Self::from_rows(cols, parsed)
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols)
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<BitVector> {
        self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    pub fn push_row(&mut self, row: BitVector) -> Result<(), Gf2Error> {
        if row.len() != self.cols {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.cols,
                found: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &Self) -> Result<Self, Gf2Error> {
        if self.cols != other.cols {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.cols,
                found: other.cols,
            });
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(Self {
            cols: self.cols,
            rows,
        })
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.support() {
                t.rows[c].set(r, true);
            }
        }
        t
    }

    /// Matrix-vector product `M v`.
    pub fn mul_vec(&self, v: &BitVector) -> Result<BitVector, Gf2Error> {
        if v.len() != self.cols {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let mut out = BitVector::zeros(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            if row.dot(v)? {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self, Gf2Error> {
        if self.cols != other.nrows() {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.cols,
                found: other.nrows(),
            });
        }
        let mut out = Self::zeros(self.rows.len(), other.cols);
        for (i, row) in self.rows.iter().enumerate() {
            for k in row.support() {
                out.rows[i] ^= &other.rows[k];
            }
        }
        Ok(out)
    }

    /// Reduced row-echelon form and the pivot columns.
    ///
    /// Zero rows are kept and moved to the bottom so the shape is unchanged.
    pub fn rref(&self) -> (BitMatrix, Vec<usize>) {
        let mut rows = self.rows.clone();
        let pivots = eliminate(&mut rows, self.cols);
        (
            BitMatrix {
                cols: self.cols,
                rows,
            },
            pivots,
        )
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Whether `v` lies in the row space.
    pub fn row_space_contains(&self, v: &BitVector) -> Result<bool, Gf2Error> {
        if v.len() != self.cols {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let (reduced, pivots) = self.rref();
        Ok(reduce_against(&reduced.rows, &pivots, v).is_zero())
    }

    /// Greedy selection of rows (in order) that are linearly independent.
    /// Returns the kept rows and the indices of the dropped ones.
    pub fn independent_rows(&self) -> (BitMatrix, Vec<usize>) {
        let mut basis = EchelonBasis::new(self.cols);
        let mut kept = Vec::new();
        let mut dropped = Vec::new();
        for (i, r) in self.rows.iter().enumerate() {
            if basis.insert(r) {
                kept.push(r.clone());
            } else {
                dropped.push(i);
            }
        }
        (
            BitMatrix {
                cols: self.cols,
                rows: kept,
            },
            dropped,
        )
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows.len(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

/// In-place Gauss-Jordan elimination. Leftmost pivot, first available row.
fn eliminate(rows: &mut [BitVector], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..cols {
        if next == rows.len() {
            break;
        }
        let Some(found) = (next..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(next, found);
        let pivot_row = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next && row.get(col) {
                *row ^= &pivot_row;
            }
        }
        pivots.push(col);
        next += 1;
    }
    pivots
}

fn reduce_against(reduced: &[BitVector], pivots: &[usize], v: &BitVector) -> BitVector {
    let mut out = v.clone();
    for (row, &p) in reduced.iter().zip(pivots) {
        if out.get(p) {
            out ^= row;
        }
    }
    out
}

/// Incrementally maintained echelon basis, used for independence tests.
#[derive(Clone, Debug)]
pub(crate) struct EchelonBasis {
    cols: usize,
    rows: Vec<(usize, BitVector)>,
}

impl EchelonBasis {
    pub(crate) fn new(cols: usize) -> Self {
        Self {
            cols,
            rows: Vec::new(),
        }
    }

    pub(crate) fn from_rows<'a, I: IntoIterator<Item = &'a BitVector>>(cols: usize, rows: I) -> Self {
        let mut b = Self::new(cols);
        for r in rows {
            b.insert(r);
        }
        b
    }

    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }

    pub(crate) fn reduce(&self, v: &BitVector) -> BitVector {
        debug_assert_eq!(v.len(), self.cols);
        let mut out = v.clone();
        for (p, row) in &self.rows {
            if out.get(*p) {
                out ^= row;
            }
        }
        out
    }

    pub(crate) fn contains(&self, v: &BitVector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` if it is independent; returns whether it was added.
    pub(crate) fn insert(&mut self, v: &BitVector) -> bool {
        let r = self.reduce(v);
        match r.first_one() {
            None => false,
            Some(p) => {
                for (_, row) in self.rows.iter_mut() {
                    if row.get(p) {
                        *row ^= &r;
                    }
                }
                self.rows.push((p, r));
                true
            }
        }
    }
}

/// One solution of `M v = d` with every free variable set to zero.
///
/// `M` must have full row rank; a rank-deficient `M` is reported even when
/// the particular system happens to be consistent.
pub fn solve_linear(m: &BitMatrix, d: &BitVector) -> Result<BitVector, Gf2Error> {
    if d.len() != m.nrows() {
        return Err(Gf2Error::DimensionMismatch {
            expected: m.nrows(),
            found: d.len(),
        });
    }
    let cols = m.ncols();
    // Augment each row with its right-hand side bit in column `cols`.
    let mut aug: Vec<BitVector> = m
        .rows()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut a = r.concat(&BitVector::zeros(1));
            a.set(cols, d.get(i));
            a
        })
        .collect();
    let pivots = eliminate(&mut aug, cols);
    if aug[pivots.len()..].iter().any(|r| r.get(cols)) {
        return Err(Gf2Error::NoSolution);
    }
    if pivots.len() < m.nrows() {
        return Err(Gf2Error::RankDeficient {
            rank: pivots.len(),
            rows: m.nrows(),
        });
    }
    let mut v = BitVector::zeros(cols);
    for (row, &p) in aug.iter().zip(&pivots) {
        if row.get(cols) {
            v.set(p, true);
        }
    }
    Ok(v)
}

/// Basis of `{v : M v = 0}`, one vector per free column in ascending order.
pub fn nullspace_basis(m: &BitMatrix) -> BitMatrix {
    let cols = m.ncols();
    let (reduced, pivots) = m.rref();
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut out = BitMatrix::new(cols);
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = BitVector::unit(cols, free);
        for (row, &p) in reduced.rows().iter().zip(&pivots) {
            if row.get(free) {
                v.set(p, true);
            }
        }
        out.rows.push(v);
    }
    out
}

/// Vectors from `full` (scanned in row order) that extend `sub` to a basis
/// of `rowspace(full)`; they are independent modulo `rowspace(sub)`.
pub fn extend_to_coset_basis(sub: &BitMatrix, full: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
    if sub.ncols() != full.ncols() {
        return Err(Gf2Error::DimensionMismatch {
            expected: full.ncols(),
            found: sub.ncols(),
        });
    }
    let ambient = EchelonBasis::from_rows(full.ncols(), full.rows());
    for (row, v) in sub.rows().iter().enumerate() {
        if !ambient.contains(v) {
            return Err(Gf2Error::NotContained { row });
        }
    }
    let mut span = EchelonBasis::from_rows(sub.ncols(), sub.rows());
    let mut out = BitMatrix::new(full.ncols());
    for v in full.rows() {
        if span.insert(v) {
            out.rows.push(v.clone());
        }
    }
    Ok(out)
}
