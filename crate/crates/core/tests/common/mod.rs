#![allow(dead_code)]

use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sdcss::code::SelfDualCssCode;
use sdcss::gf2::BitVector;
use sdcss::pauli::{Gate1, PauliOperator, TransversalLayer};

/// Random `(P, layer)` cases on at most `max_qubits` qubits; roughly one in
/// five uses a two-block CNOT layer.
pub fn random_conjugation_cases(seed: u64, count: usize, max_qubits: usize) -> Vec<(PauliOperator, TransversalLayer)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let (qubits, layer) = if rng.random_bool(0.2) && max_qubits >= 2 {
                let half = rng.random_range(1..=max_qubits / 2);
                let mask = BitVector::from_bits((0..half).map(|_| rng.random_bool(0.6)));
                (2 * half, TransversalLayer::Cnot { mask })
            } else {
                let n = rng.random_range(1..=max_qubits);
                let gates = (0..n).map(|_| *Gate1::ALL.choose(&mut rng).unwrap()).collect();
                (n, TransversalLayer::Single(gates))
            };
            let x = BitVector::from_bits((0..qubits).map(|_| rng.random_bool(0.5)));
            let z = BitVector::from_bits((0..qubits).map(|_| rng.random_bool(0.5)));
            let p = PauliOperator::new(x, z, rng.random_range(0..4)).unwrap();
            (p, layer)
        })
        .collect()
}

fn mask(v: &BitVector) -> u32 {
    v.support().fold(0, |m, i| m | 1 << i)
}

fn check_masks(code: &SelfDualCssCode) -> Vec<u32> {
    code.check().rows().iter().map(mask).collect()
}

fn in_kernel(rows: &[u32], v: u32) -> bool {
    rows.iter().all(|r| (r & v).count_ones() % 2 == 0)
}

fn row_span(rows: &[u32]) -> HashSet<u32> {
    let mut span = HashSet::from([0u32]);
    for &r in rows {
        let grown: Vec<u32> = span.iter().map(|s| s ^ r).collect();
        span.extend(grown);
    }
    span
}

/// `(some v ∈ ker H has odd weight, some coset representative has odd
/// weight)` by enumerating all `2^n` vectors.
pub fn odd_weight_by_enumeration(code: &SelfDualCssCode) -> (bool, bool) {
    assert!(code.n() <= 20);
    let rows = check_masks(code);
    let any_odd = (0u32..1 << code.n()).any(|v| v.count_ones() % 2 == 1 && in_kernel(&rows, v));
    let rep_odd = code.coset_reps().rows().iter().any(|h| h.weight() % 2 == 1);
    (any_odd, rep_odd)
}

/// Minimum weight over `ker H \ rowspace(H)` by enumerating all `2^n`
/// vectors.
pub fn distance_by_enumeration(code: &SelfDualCssCode) -> usize {
    assert!(code.n() <= 20);
    let rows = check_masks(code);
    let span = row_span(&rows);
    (1u32..1 << code.n())
        .filter(|&v| in_kernel(&rows, v) && !span.contains(&v))
        .map(|v| v.count_ones() as usize)
        .min()
        .expect("k >= 1")
}

/// `|Sp(4, 2)|` by testing every 4×4 binary matrix against `MᵀΩM = Ω`.
pub fn sp4_by_enumeration() -> u64 {
    let omega = |r: usize, c: usize| (r + 2 == c) || (c + 2 == r);
    let mut count = 0;
    for bits in 0u32..1 << 16 {
        let m = |r: usize, c: usize| (bits >> (4 * r + c)) & 1 == 1;
        let ok = (0..4).all(|a| {
            (0..4).all(|b| {
                let mut s = false;
                for r in 0..4 {
                    for c in 0..4 {
                        s ^= m(r, a) && omega(r, c) && m(c, b);
                    }
                }
                s == omega(a, b)
            })
        });
        count += ok as u64;
    }
    count
}
