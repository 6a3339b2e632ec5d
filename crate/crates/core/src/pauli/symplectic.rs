//! Binary symplectic images of logical Clifford generators and the order
//! of the group they generate.
//!
//! A Clifford on `q` qubits, modulo phases and Paulis, is a `2q × 2q`
//! binary matrix acting on column vectors `(x_1..x_q, z_1..z_q)`.

use std::collections::HashSet;

use thiserror::Error;

use crate::gf2::{BitMatrix, BitVector};

/// Largest number of qubits the closure accepts.
pub const MAX_CLOSURE_QUBITS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymplecticError {
    #[error("generator {index} is not a {dim}x{dim} matrix")]
    Shape { index: usize, dim: usize },
    #[error("generator {index} is not symplectic")]
    NotSymplectic { index: usize },
    #[error("closure on {qubits} qubits exceeds the limit of {limit}")]
    TooLarge { qubits: usize, limit: usize },
    #[error("generator list is empty and no dimension was given")]
    NoDimension,
}

/// `[[0, I], [I, 0]]` of size `2q`.
pub fn omega(q: usize) -> BitMatrix {
    let mut m = BitMatrix::zeros(2 * q, 2 * q);
    for i in 0..q {
        m.set(i, q + i, true);
        m.set(q + i, i, true);
    }
    m
}

pub fn is_symplectic(m: &BitMatrix) -> bool {
    let (r, c) = m.shape();
    if r != c || r % 2 == 1 {
        return false;
    }
    let w = omega(r / 2);
    let lhs = m.transpose().mul(&w).and_then(|t| t.mul(m));
    matches!(lhs, Ok(ref l) if *l == w)
}

pub fn hadamard(q: usize, j: usize) -> BitMatrix {
    let mut m = BitMatrix::identity(2 * q);
    m.set(j, j, false);
    m.set(q + j, q + j, false);
    m.set(j, q + j, true);
    m.set(q + j, j, true);
    m
}

/// Phase gate: `z_j += x_j`. `S` and `S†` share this image.
pub fn phase(q: usize, j: usize) -> BitMatrix {
    let mut m = BitMatrix::identity(2 * q);
    m.set(q + j, j, true);
    m
}

/// CNOT from `c` to `t`: `x_t += x_c`, `z_c += z_t`.
pub fn cnot(q: usize, c: usize, t: usize) -> BitMatrix {
    assert_ne!(c, t);
    let mut m = BitMatrix::identity(2 * q);
    m.set(t, c, true);
    m.set(q + c, q + t, true);
    m
}

/// CZ on `a, b`: `z_a += x_b`, `z_b += x_a`.
pub fn cz(q: usize, a: usize, b: usize) -> BitMatrix {
    assert_ne!(a, b);
    let mut m = BitMatrix::identity(2 * q);
    m.set(q + a, b, true);
    m.set(q + b, a, true);
    m
}

/// The in-block alternatives for the second generator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InBlockSet {
    HadamardCnot,
    PhaseCnot,
    HadamardCz,
    CnotCz,
}

/// The between-block alternatives for the third generator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetweenBlockSet {
    Cnot,
    Cz,
}

/// Symplectic images of the full-Clifford generating set for `m` blocks of
/// `k` logical qubits each. Logical qubit `(p, j)` is index `p·k + j`.
pub fn full_clifford_generators(m: usize, k: usize, in_block: InBlockSet, between: BetweenBlockSet) -> Vec<BitMatrix> {
    let q = m * k;
    let idx = |p: usize, j: usize| p * k + j;
    let product = |ms: Vec<BitMatrix>| {
        ms.into_iter()
            .reduce(|a, b| a.mul(&b).expect("square matrices of equal size"))
            .unwrap_or_else(|| BitMatrix::identity(2 * q))
    };
    let mut gens = Vec::new();

    for p in 0..m {
        gens.push(product((0..k).map(|j| hadamard(q, idx(p, j))).collect()));
        gens.push(product((0..k).map(|j| phase(q, idx(p, j))).collect()));
        for p2 in 0..m {
            if p2 != p {
                gens.push(product((0..k).map(|j| cnot(q, idx(p, j), idx(p2, j))).collect()));
            }
        }
    }

    for p in 0..m {
        for j in 0..k {
            match in_block {
                InBlockSet::HadamardCnot | InBlockSet::HadamardCz => gens.push(hadamard(q, idx(p, j))),
                InBlockSet::PhaseCnot => gens.push(phase(q, idx(p, j))),
                InBlockSet::CnotCz => {}
            }
            for l in 0..k {
                if l == j {
                    continue;
                }
                match in_block {
                    InBlockSet::HadamardCnot | InBlockSet::PhaseCnot => gens.push(cnot(q, idx(p, j), idx(p, l))),
                    InBlockSet::HadamardCz => gens.push(cz(q, idx(p, j), idx(p, l))),
                    InBlockSet::CnotCz => {
                        gens.push(cnot(q, idx(p, j), idx(p, l)));
                        gens.push(cz(q, idx(p, j), idx(p, l)));
                    }
                }
            }
        }
    }

    for p in 0..m {
        for p2 in 0..m {
            if p != p2 {
                gens.push(match between {
                    BetweenBlockSet::Cnot => cnot(q, idx(p, 0), idx(p2, 0)),
                    BetweenBlockSet::Cz => cz(q, idx(p, 0), idx(p2, 0)),
                });
            }
        }
    }
    gens
}

/// Matrix packed as `dim` rows of `dim` bits, row `r` at bit offset `r·dim`.
type Packed = u64;

fn pack(m: &BitMatrix) -> Packed {
    let d = m.ncols();
    let mut out = 0u64;
    for r in 0..d {
        for c in m.row(r).support() {
            out |= 1 << (r * d + c);
        }
    }
    out
}

fn packed_mul(a: Packed, b: Packed, d: usize) -> Packed {
    let row_mask = (1u64 << d) - 1;
    let mut out = 0u64;
    for r in 0..d {
        let arow = (a >> (r * d)) & row_mask;
        let mut acc = 0u64;
        let mut bits = arow;
        while bits != 0 {
            let k = bits.trailing_zeros() as usize;
            acc ^= (b >> (k * d)) & row_mask;
            bits &= bits - 1;
        }
        out |= acc << (r * d);
    }
    out
}

fn packed_identity(d: usize) -> Packed {
    (0..d).fold(0, |acc, i| acc | 1 << (i * d + i))
}

/// Order of the group generated by `generators` inside `Sp(2q, 2)`.
///
/// `qubits` fixes the dimension when the list is empty.
pub fn symplectic_closure(generators: &[BitMatrix], qubits: Option<usize>) -> Result<u64, SymplecticError> {
    let q = match (generators.first(), qubits) {
        (Some(g), _) => g.nrows() / 2,
        (None, Some(q)) => q,
        (None, None) => return Err(SymplecticError::NoDimension),
    };
    if q > MAX_CLOSURE_QUBITS {
        return Err(SymplecticError::TooLarge {
            qubits: q,
            limit: MAX_CLOSURE_QUBITS,
        });
    }
    let d = 2 * q;
    let mut packed = Vec::with_capacity(generators.len());
    for (index, g) in generators.iter().enumerate() {
        if g.shape() != (d, d) {
            return Err(SymplecticError::Shape { index, dim: d });
        }
        if !is_symplectic(g) {
            return Err(SymplecticError::NotSymplectic { index });
        }
        packed.push(pack(g));
    }
    packed.sort_unstable();
    packed.dedup();

    let id = packed_identity(d);
    let mut seen: HashSet<Packed> = HashSet::from([id]);
    let mut frontier = vec![id];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &e in &frontier {
            for &g in &packed {
                let prod = packed_mul(e, g, d);
                if seen.insert(prod) {
                    next.push(prod);
                }
            }
        }
        frontier = next;
    }
    Ok(seen.len() as u64)
}

/// Number of symplectic `2q × 2q` matrices, by testing every binary matrix.
/// Feasible for `q ≤ 2`.
pub fn count_symplectic_bruteforce(q: usize) -> u64 {
    let d = 2 * q;
    assert!(d * d <= 20, "brute force is limited to 2^20 candidates");
    let mut count = 0;
    for bits in 0u64..(1 << (d * d)) {
        let rows = (0..d)
            .map(|r| BitVector::from_bits((0..d).map(|c| (bits >> (r * d + c)) & 1 == 1)))
            .collect();
        let m = BitMatrix::from_rows(d, rows).expect("rows have width d");
        if is_symplectic(&m) {
            count += 1;
        }
    }
    count
}

/// `|Sp(2q, 2)| = 2^{q²} ∏_{i=1}^{q} (4^i − 1)`.
pub fn symplectic_group_order(q: u32) -> u64 {
    (1..=q).fold(1u64 << (q * q), |acc, i| acc * (4u64.pow(i) - 1))
}
