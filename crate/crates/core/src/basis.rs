//! Symplectic bases of self-dual CSS codes, the existence test for a
//! Hadamard- and phase-compatible basis, and its construction.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::code::SelfDualCssCode;
use crate::gf2::{BitVector, EchelonBasis};
use crate::pauli::{conjugate_by_layer, Gate1, PauliOperator, TransversalLayer};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BasisError {
    #[error("no compatible basis exists: every coset representative has even weight")]
    Unsupported { verdict: ExistenceVerdict },
    #[error("pair {index} is {found}, expected {expected}")]
    ClassMismatch {
        index: usize,
        expected: &'static str,
        found: String,
    },
    #[error("merge indices must be distinct, got {a}, {b}, {c}")]
    RepeatedIndex { a: usize, b: usize, c: usize },
    #[error("index {index} out of range for {k} pairs")]
    OutOfRange { index: usize, k: usize },
    #[error("symplectic Gram-Schmidt stalled at vector {index}: it is orthogonal to every remaining vector")]
    Stalled { index: usize },
    #[error("basis pairs disagree in length")]
    Dimension,
}

/// How a pair relates to the others.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case", tag = "class", content = "partner")]
pub enum PairClass {
    /// `ℓˣ = ℓᶻ`.
    Matched,
    /// `ℓˣ_j = ℓᶻ_{j'}` and `ℓˣ_{j'} = ℓᶻ_j`; holds the partner index.
    Crossed(usize),
    Other,
}

impl fmt::Display for PairClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairClass::Matched => f.write_str("matched"),
            PairClass::Crossed(p) => write!(f, "crossed({})", p + 1),
            PairClass::Other => f.write_str("other"),
        }
    }
}

/// `k` pairs `(ℓˣ_j, ℓᶻ_j)` of supports for `X̄_j` and `Z̄_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticBasis {
    pairs: Vec<(BitVector, BitVector)>,
    structure: Vec<PairClass>,
}

impl SymplecticBasis {
    /// Builds a basis and classifies each pair from its supports.
    pub fn from_pairs(pairs: Vec<(BitVector, BitVector)>) -> Self {
        let structure = classify(&pairs);
        Self { pairs, structure }
    }

    /// Builds a basis with a declared structure, which is checked later by
    /// [`verify_basis`].
    pub fn with_structure(pairs: Vec<(BitVector, BitVector)>, structure: Vec<PairClass>) -> Self {
        Self { pairs, structure }
    }

    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn n(&self) -> usize {
        self.pairs.first().map_or(0, |(x, _)| x.len())
    }

    pub fn pairs(&self) -> &[(BitVector, BitVector)] {
        &self.pairs
    }

    pub fn x(&self, j: usize) -> &BitVector {
        &self.pairs[j].0
    }

    pub fn z(&self, j: usize) -> &BitVector {
        &self.pairs[j].1
    }

    pub fn structure(&self) -> &[PairClass] {
        &self.structure
    }

    pub fn logical_x(&self, j: usize) -> PauliOperator {
        PauliOperator::x_type(self.pairs[j].0.clone())
    }

    pub fn logical_z(&self, j: usize) -> PauliOperator {
        PauliOperator::z_type(self.pairs[j].1.clone())
    }

    pub fn is_all_matched(&self) -> bool {
        self.structure.iter().all(|c| *c == PairClass::Matched) && classify(&self.pairs) == self.structure
    }

    pub fn matched_count(&self) -> usize {
        self.structure.iter().filter(|c| **c == PairClass::Matched).count()
    }

    /// Lowest-index crossed pair `(j, j')` with `j < j'`.
    pub fn first_crossed(&self) -> Option<(usize, usize)> {
        self.structure.iter().enumerate().find_map(|(j, c)| match c {
            PairClass::Crossed(p) if *p > j => Some((j, *p)),
            _ => None,
        })
    }
}

fn classify(pairs: &[(BitVector, BitVector)]) -> Vec<PairClass> {
    (0..pairs.len())
        .map(|j| {
            let (x, z) = &pairs[j];
            if x == z {
                return PairClass::Matched;
            }
            (0..pairs.len())
                .find(|&p| p != j && pairs[p].1 == *x && pairs[p].0 == *z)
                .map_or(PairClass::Other, PairClass::Crossed)
        })
        .collect()
}

/// Outcome of the existence test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExistenceVerdict {
    pub exists: bool,
    /// An odd-weight coset representative, present iff `exists`.
    pub witness: Option<BitVector>,
    /// Index of the witness among the code's representatives.
    pub witness_index: Option<usize>,
}

/// A compatible basis exists iff some coset representative has odd weight.
pub fn existence_check(code: &SelfDualCssCode) -> ExistenceVerdict {
    let found = code
        .coset_reps()
        .rows()
        .iter()
        .enumerate()
        .find(|(_, h)| h.weight() % 2 == 1);
    ExistenceVerdict {
        exists: found.is_some(),
        witness: found.map(|(_, h)| h.clone()),
        witness_index: found.map(|(i, _)| i),
    }
}

fn dot(a: &BitVector, b: &BitVector) -> bool {
    a.dot(b).expect("vectors share the code length")
}

/// Symplectic Gram-Schmidt for self-dual CSS codes.
///
/// Each round either emits a matched pair from the first self-odd vector,
/// or a crossed pair from `w_1` and the first `w_p` with `w_1·w_p = 1`.
pub fn symplectic_gram_schmidt(h: &[BitVector]) -> Result<SymplecticBasis, BasisError> {
    let mut w: Vec<BitVector> = h.to_vec();
    if w.windows(2).any(|p| p[0].len() != p[1].len()) {
        return Err(BasisError::Dimension);
    }
    let mut pairs = Vec::with_capacity(h.len());
    let mut structure = Vec::with_capacity(h.len());
    let mut consumed = 0usize;
    while !w.is_empty() {
        if let Some(p) = w.iter().position(|v| dot(v, v)) {
            let wp = w.remove(p);
            for wq in w.iter_mut() {
                if dot(wq, &wp) {
                    *wq ^= &wp;
                }
            }
            pairs.push((wp.clone(), wp));
            structure.push(PairClass::Matched);
        } else {
            let Some(p) = (1..w.len()).find(|&p| dot(&w[0], &w[p])) else {
                return Err(BasisError::Stalled { index: consumed });
            };
            let w1 = w[0].clone();
            let wp = w[p].clone();
            let mut rest = Vec::with_capacity(w.len() - 2);
            for (q, wq) in w.iter().enumerate() {
                if q == 0 || q == p {
                    continue;
                }
                let mut v = wq.clone();
                if q > p && dot(wq, &w1) {
                    v ^= &wp;
                }
                if dot(wq, &wp) {
                    v ^= &w1;
                }
                rest.push(v);
            }
            let m = pairs.len();
            pairs.push((w1.clone(), wp.clone()));
            pairs.push((wp, w1));
            structure.push(PairClass::Crossed(m + 1));
            structure.push(PairClass::Crossed(m));
            w = rest;
            consumed += 1;
        }
        consumed += 1;
    }
    Ok(SymplecticBasis { pairs, structure })
}

/// Turns matched pair `a` and crossed pairs `(b, c)` into three matched pairs.
pub fn merge_triple(basis: &SymplecticBasis, a: usize, b: usize, c: usize) -> Result<SymplecticBasis, BasisError> {
    let k = basis.k();
    for index in [a, b, c] {
        if index >= k {
            return Err(BasisError::OutOfRange { index, k });
        }
    }
    if a == b || b == c || a == c {
        return Err(BasisError::RepeatedIndex { a, b, c });
    }
    if basis.structure[a] != PairClass::Matched {
        return Err(BasisError::ClassMismatch {
            index: a,
            expected: "matched",
            found: basis.structure[a].to_string(),
        });
    }
    if basis.structure[b] != PairClass::Crossed(c) || basis.structure[c] != PairClass::Crossed(b) {
        return Err(BasisError::ClassMismatch {
            index: b,
            expected: "crossed with the third index",
            found: basis.structure[b].to_string(),
        });
    }
    let (ax, az) = &basis.pairs[a];
    let (bx, bz) = &basis.pairs[b];
    let (cx, cz) = &basis.pairs[c];
    let mut pairs = basis.pairs.clone();
    pairs[a] = (&(ax ^ bx) ^ cx, &(az ^ bz) ^ cz);
    pairs[b] = (ax ^ bx, az ^ cz);
    pairs[c] = (ax ^ cx, az ^ bz);
    let mut structure = basis.structure.clone();
    for i in [a, b, c] {
        structure[i] = if pairs[i].0 == pairs[i].1 {
            PairClass::Matched
        } else {
            PairClass::Other
        };
    }
    Ok(SymplecticBasis { pairs, structure })
}

/// Builds an all-matched basis: witness first, Gram-Schmidt, then merges of
/// the lowest matched pair with the lowest crossed pair.
pub fn build_compatible_basis(code: &SelfDualCssCode) -> Result<SymplecticBasis, BasisError> {
    let verdict = existence_check(code);
    let Some(wi) = verdict.witness_index else {
        return Err(BasisError::Unsupported { verdict });
    };
    let mut reps: Vec<BitVector> = code.coset_reps().rows().to_vec();
    let witness = reps.remove(wi);
    reps.insert(0, witness);
    let mut basis = symplectic_gram_schmidt(&reps)?;
    while let Some((b, c)) = basis.first_crossed() {
        let a = basis
            .structure
            .iter()
            .position(|s| *s == PairClass::Matched)
            .ok_or(BasisError::Stalled { index: b })?;
        basis = merge_triple(&basis, a, b, c)?;
    }
    Ok(basis)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    X,
    Z,
}

/// One violated property. Pair and row indices are zero-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum BasisFailure {
    PairCount { expected: usize, found: usize },
    Length { pair: usize },
    NotAnticommuting { pair: usize },
    NotCommuting { x_pair: usize, z_pair: usize },
    NotLogical { pair: usize, part: Part, row: usize },
    SpanDeficient { part: Part, rank: usize, expected: usize },
    StructureMismatch { pair: usize, declared: String, actual: String },
    /// All-H maps this pair's operators somewhere other than each other;
    /// `swapped_with` names the pair they land on, if any.
    HadamardMismatch { pair: usize, swapped_with: Option<usize> },
    StabilizerNotPreserved { row: usize, part: Part },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BasisReport {
    pub failures: Vec<BasisFailure>,
}

impl BasisReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Logical swaps implied by Hadamard mismatches, as `(j, j')` with `j < j'`.
    pub fn hadamard_swaps(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .failures
            .iter()
            .filter_map(|f| match f {
                BasisFailure::HadamardMismatch {
                    pair,
                    swapped_with: Some(p),
                } => Some((*pair.min(p), *pair.max(p))),
                _ => None,
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn hadamard_violations(&self) -> usize {
        self.failures
            .iter()
            .filter(|f| matches!(f, BasisFailure::HadamardMismatch { .. }))
            .count()
    }
}

/// Checks the symplectic relations, stabilizer commutation, spans and the
/// declared structure. With `require_matched`, also checks that all-H swaps
/// every `X̄_j` with `Z̄_j` exactly (phase 0) and preserves the stabilizers.
pub fn verify_basis(code: &SelfDualCssCode, basis: &SymplecticBasis, require_matched: bool) -> BasisReport {
    let mut failures = Vec::new();
    let n = code.n();
    let k = code.k();
    if basis.k() != k {
        failures.push(BasisFailure::PairCount {
            expected: k,
            found: basis.k(),
        });
    }
    if basis.structure.len() != basis.k() {
        failures.push(BasisFailure::PairCount {
            expected: basis.k(),
            found: basis.structure.len(),
        });
    }
    let bad_len: Vec<usize> = (0..basis.k())
        .filter(|&j| basis.pairs[j].0.len() != n || basis.pairs[j].1.len() != n)
        .collect();
    if !bad_len.is_empty() {
        failures.extend(bad_len.into_iter().map(|pair| BasisFailure::Length { pair }));
        return BasisReport { failures };
    }

    for j in 0..basis.k() {
        for jp in 0..basis.k() {
            let d = dot(&basis.pairs[j].0, &basis.pairs[jp].1);
            if j == jp && !d {
                failures.push(BasisFailure::NotAnticommuting { pair: j });
            } else if j != jp && d {
                failures.push(BasisFailure::NotCommuting { x_pair: j, z_pair: jp });
            }
        }
    }
    for j in 0..basis.k() {
        for (part, v) in [(Part::X, &basis.pairs[j].0), (Part::Z, &basis.pairs[j].1)] {
            if let Some(row) = code.check().rows().iter().position(|g| dot(g, v)) {
                failures.push(BasisFailure::NotLogical { pair: j, part, row });
            }
        }
    }
    let expected = code.r() + k;
    for part in [Part::X, Part::Z] {
        let span = EchelonBasis::from_rows(
            n,
            code.check().rows().iter().chain(basis.pairs.iter().map(|(x, z)| match part {
                Part::X => x,
                Part::Z => z,
            })),
        );
        if span.rank() != expected {
            failures.push(BasisFailure::SpanDeficient {
                part,
                rank: span.rank(),
                expected,
            });
        }
    }
    let actual = classify(&basis.pairs);
    for (j, (declared, actual)) in basis.structure.iter().zip(&actual).enumerate() {
        if declared != actual {
            failures.push(BasisFailure::StructureMismatch {
                pair: j,
                declared: declared.to_string(),
                actual: actual.to_string(),
            });
        }
    }

    if require_matched {
        let all_h = TransversalLayer::uniform(n, Gate1::H);
        for j in 0..basis.k() {
            let xi = conjugate_by_layer(&basis.logical_x(j), &all_h).expect("layer matches code length");
            let zi = conjugate_by_layer(&basis.logical_z(j), &all_h).expect("layer matches code length");
            let x_ok = xi == basis.logical_z(j);
            let z_ok = zi == basis.logical_x(j);
            if !(x_ok && z_ok) {
                let swapped_with = (0..basis.k()).find(|&p| {
                    p != j && xi == basis.logical_z(p) && zi == basis.logical_x(p)
                });
                failures.push(BasisFailure::HadamardMismatch { pair: j, swapped_with });
            }
        }
        for (row, g) in code.check().rows().iter().enumerate() {
            for (part, op) in [
                (Part::X, PauliOperator::x_type(g.clone())),
                (Part::Z, PauliOperator::z_type(g.clone())),
            ] {
                let img = conjugate_by_layer(&op, &all_h).expect("layer matches code length");
                if !code.stabilizer_contains(&img) {
                    failures.push(BasisFailure::StabilizerNotPreserved { row, part });
                }
            }
        }
    }
    BasisReport { failures }
}
