//! Self-dual CSS codes: one check matrix `H` serves as both the X and the Z
//! stabilizer matrix.
//!
//! `D⊥ = rowspace(H)` and `D = ker H = span(g_i, h_j)`, where the `h_j` are
//! coset representatives of `D⊥` in `D`.

use rand::Rng;
use thiserror::Error;

use crate::basis::SymplecticBasis;
use crate::gf2::{extend_to_coset_basis, nullspace_basis, BitMatrix, BitVector, EchelonBasis, Gf2Error};
use crate::pauli::PauliOperator;

/// Largest `r + k` accepted by the brute-force routines.
pub const MAX_ENUMERATION_DIM: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("check matrix has no nonzero rows")]
    Empty,
    #[error("rows {i} and {j} of the check matrix are not orthogonal")]
    NotSelfDual { i: usize, j: usize },
    #[error("code encodes no logical qubits")]
    Degenerate,
    #[error("expected {expected} coset representatives, found {found}")]
    RepCount { expected: usize, found: usize },
    #[error("coset representative {rep} is not orthogonal to check row {row}")]
    RepNotInCode { rep: usize, row: usize },
    #[error("coset representatives are dependent modulo the stabilizer space")]
    RepsDependent,
    #[error("hamming code needs m >= 3, got {0}")]
    HammingParameter(u32),
    #[error("unknown catalog code {0:?}")]
    UnknownCode(String),
    #[error("enumeration over 2^{dim} codewords refused; limit is r + k <= {limit}")]
    TooLarge { dim: usize, limit: usize },
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfDualCssCode {
    name: Option<String>,
    n: usize,
    k: usize,
    r: usize,
    check: BitMatrix,
    coset_reps: BitMatrix,
    dropped_rows: Vec<usize>,
    distance_label: Option<usize>,
}

impl SelfDualCssCode {
    /// Validates `h` and derives coset representatives when none are given.
    ///
    /// Redundant rows are dropped; their original indices are kept in
    /// [`dropped_rows`](Self::dropped_rows).
    pub fn from_check_matrix(h: &BitMatrix, coset_reps: Option<&BitMatrix>) -> Result<Self, CodeError> {
        let n = h.ncols();
        if h.rows().iter().all(BitVector::is_zero) {
            return Err(CodeError::Empty);
        }
        for i in 0..h.nrows() {
            for j in i..h.nrows() {
                if h.row(i).dot(h.row(j))? {
                    return Err(CodeError::NotSelfDual { i, j });
                }
            }
        }
        let (check, dropped_rows) = h.independent_rows();
        let r = check.nrows();
        let k = n - 2 * r;
        if k == 0 {
            return Err(CodeError::Degenerate);
        }
        let coset_reps = match coset_reps {
            None => extend_to_coset_basis(&check, &nullspace_basis(&check))?,
            Some(reps) => {
                if reps.ncols() != n {
                    return Err(Gf2Error::DimensionMismatch {
                        expected: n,
                        found: reps.ncols(),
                    }
                    .into());
                }
                if reps.nrows() != k {
                    return Err(CodeError::RepCount {
                        expected: k,
                        found: reps.nrows(),
                    });
                }
                for (rep, v) in reps.rows().iter().enumerate() {
                    for (row, g) in check.rows().iter().enumerate() {
                        if v.dot(g)? {
                            return Err(CodeError::RepNotInCode { rep, row });
                        }
                    }
                }
                if check.stack(reps)?.rank() != r + k {
                    return Err(CodeError::RepsDependent);
                }
                reps.clone()
            }
        };
        Ok(Self {
            name: None,
            n,
            k,
            r,
            check,
            coset_reps,
            dropped_rows,
            distance_label: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_distance_label(mut self, d: usize) -> Self {
        self.distance_label = Some(d);
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn check(&self) -> &BitMatrix {
        &self.check
    }

    pub fn coset_reps(&self) -> &BitMatrix {
        &self.coset_reps
    }

    /// Indices of input rows removed as linearly dependent.
    pub fn dropped_rows(&self) -> &[usize] {
        &self.dropped_rows
    }

    pub fn had_redundant_rows(&self) -> bool {
        !self.dropped_rows.is_empty()
    }

    pub fn distance_label(&self) -> Option<usize> {
        self.distance_label
    }

    /// Whether `v ∈ D`, i.e. `Hv = 0`.
    pub fn in_code(&self, v: &BitVector) -> bool {
        self.check.mul_vec(v).map(|s| s.is_zero()).unwrap_or(false)
    }

    /// Whether `v ∈ D⊥ = rowspace(H)`.
    pub fn in_dual(&self, v: &BitVector) -> bool {
        self.check.row_space_contains(v).unwrap_or(false)
    }

    pub fn x_stabilizers(&self) -> Vec<PauliOperator> {
        self.check.rows().iter().cloned().map(PauliOperator::x_type).collect()
    }

    pub fn z_stabilizers(&self) -> Vec<PauliOperator> {
        self.check.rows().iter().cloned().map(PauliOperator::z_type).collect()
    }

    /// Every generator, X-type first.
    pub fn stabilizers(&self) -> Vec<PauliOperator> {
        let mut s = self.x_stabilizers();
        s.extend(self.z_stabilizers());
        s
    }

    /// Membership in the stabilizer group. Elements have phase 0 and both
    /// parts in `rowspace(H)`, since `H` is self-orthogonal.
    pub fn stabilizer_contains(&self, p: &PauliOperator) -> bool {
        p.n() == self.n && p.phase() == 0 && self.in_dual(p.x()) && self.in_dual(p.z())
    }

    /// Minimum weight over `D \ D⊥`.
    pub fn min_distance_bruteforce(&self) -> Result<usize, CodeError> {
        let dim = self.r + self.k;
        if dim > MAX_ENUMERATION_DIM {
            return Err(CodeError::TooLarge {
                dim,
                limit: MAX_ENUMERATION_DIM,
            });
        }
        // Gray-code walk over coefficient vectors; generators are g then h.
        let gens: Vec<&BitVector> = self.check.rows().iter().chain(self.coset_reps.rows()).collect();
        let mut v = BitVector::zeros(self.n);
        let mut h_coeffs: u64 = 0;
        let mut best = usize::MAX;
        for step in 1u64..(1u64 << dim) {
            let flip = step.trailing_zeros() as usize;
            v ^= gens[flip];
            if flip >= self.r {
                h_coeffs ^= 1 << (flip - self.r);
            }
            if h_coeffs != 0 {
                best = best.min(v.weight());
            }
        }
        Ok(best)
    }

    /// Whether some codeword of `D` has odd weight, by enumerating `D`.
    pub fn has_odd_codeword_bruteforce(&self) -> Result<bool, CodeError> {
        let dim = self.r + self.k;
        if dim > MAX_ENUMERATION_DIM {
            return Err(CodeError::TooLarge {
                dim,
                limit: MAX_ENUMERATION_DIM,
            });
        }
        let gens: Vec<&BitVector> = self.check.rows().iter().chain(self.coset_reps.rows()).collect();
        let mut v = BitVector::zeros(self.n);
        for step in 1u64..(1u64 << dim) {
            v ^= gens[step.trailing_zeros() as usize];
            if v.weight() % 2 == 1 {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Whether two representative sets span the same quotient `D / D⊥`.
    pub fn same_quotient(&self, a: &BitMatrix, b: &BitMatrix) -> bool {
        let sa = EchelonBasis::from_rows(self.n, self.check.rows().iter().chain(a.rows()));
        let sb = EchelonBasis::from_rows(self.n, self.check.rows().iter().chain(b.rows()));
        sa.rank() == sb.rank() && a.rows().iter().all(|v| sb.contains(v)) && b.rows().iter().all(|v| sa.contains(v))
    }
}

/// Quantum Hamming code `[[2^m − 1, 2^m − 1 − 2m, 3]]`.
///
/// Column `i` (qubit `i + 1`) of `H` is the binary expansion of `i + 1`,
/// least significant bit in row 0.
pub fn hamming_code(m: u32) -> Result<SelfDualCssCode, CodeError> {
    if !(3..=16).contains(&m) {
        return Err(CodeError::HammingParameter(m));
    }
    let n = (1usize << m) - 1;
    let rows = (0..m as usize)
        .map(|b| BitVector::from_bits((1..=n).map(|label| (label >> b) & 1 == 1)))
        .collect();
    let h = BitMatrix::from_rows(n, rows)?;
    Ok(SelfDualCssCode::from_check_matrix(&h, None)?
        .with_name(format!("hamming{m}"))
        .with_distance_label(3))
}

pub const CATALOG_NAMES: [&str; 4] = ["qhamming15", "c422", "c622", "steane7"];

/// A catalog code together with the bases printed alongside it.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub code: SelfDualCssCode,
    /// A compatible basis, when one is known.
    pub reference_basis: Option<SymplecticBasis>,
    /// The basis obtained from gauge operators (only `qhamming15`).
    pub gauge_basis: Option<SymplecticBasis>,
}

fn one_based(n: usize, support: &[usize]) -> BitVector {
    BitVector::from_support(n, support.iter().map(|i| i - 1))
}

/// `(X support, Z support)` of the gauge-derived pairs of the `[[15,7,3]]`
/// code, one-based.
const GAUGE_PAIRS: [(&[usize], &[usize]); 6] = [
    (&[3, 7, 11, 15], &[12, 13, 14, 15]),
    (&[12, 13, 14, 15], &[3, 7, 11, 15]),
    (&[5, 7, 13, 15], &[10, 11, 14, 15]),
    (&[10, 11, 14, 15], &[5, 7, 13, 15]),
    (&[9, 11, 13, 15], &[6, 7, 14, 15]),
    (&[6, 7, 14, 15], &[9, 11, 13, 15]),
];

/// Products of gauge operators giving the compatible basis: the X part of
/// pair `j` multiplies gauge X operators, the Z part gauge Z operators.
const NEW_BASIS_PRODUCTS: [(&[usize], &[usize]); 7] = [
    (&[1, 7], &[2, 7]),
    (&[2, 7], &[1, 7]),
    (&[1, 2, 3, 7], &[1, 2, 4, 7]),
    (&[1, 2, 4, 7], &[1, 2, 3, 7]),
    (&[1, 2, 3, 4, 5, 7], &[1, 2, 3, 4, 6, 7]),
    (&[1, 2, 3, 4, 6, 7], &[1, 2, 3, 4, 5, 7]),
    (&[1, 2, 3, 4, 5, 6, 7], &[1, 2, 3, 4, 5, 6, 7]),
];

fn qhamming15_gauge_pairs() -> Vec<(BitVector, BitVector)> {
    let mut pairs: Vec<_> = GAUGE_PAIRS
        .iter()
        .map(|(x, z)| (one_based(15, x), one_based(15, z)))
        .collect();
    pairs.push((BitVector::ones(15), BitVector::ones(15)));
    pairs
}

fn qhamming15_entry() -> Result<CatalogEntry, CodeError> {
    let h = BitMatrix::from_rows(
        15,
        vec![
            one_based(15, &[1, 3, 5, 7, 9, 11, 13, 15]),
            one_based(15, &[2, 3, 6, 7, 10, 11, 14, 15]),
            one_based(15, &[4, 5, 6, 7, 12, 13, 14, 15]),
            one_based(15, &[8, 9, 10, 11, 12, 13, 14, 15]),
        ],
    )?;
    let gauge = qhamming15_gauge_pairs();
    let reps = BitMatrix::from_rows(15, gauge.iter().map(|(x, _)| x.clone()).collect())?;
    let code = SelfDualCssCode::from_check_matrix(&h, Some(&reps))?
        .with_name("qhamming15")
        .with_distance_label(3);
    let product = |idx: &[usize], pick_x: bool| {
        idx.iter().fold(BitVector::zeros(15), |mut acc, &g| {
            let (x, z) = &gauge[g - 1];
            acc ^= if pick_x { x } else { z };
            acc
        })
    };
    let new_pairs = NEW_BASIS_PRODUCTS
        .iter()
        .map(|(xs, zs)| (product(xs, true), product(zs, false)))
        .collect();
    Ok(CatalogEntry {
        code,
        reference_basis: Some(SymplecticBasis::from_pairs(new_pairs)),
        gauge_basis: Some(SymplecticBasis::from_pairs(gauge)),
    })
}

/// Looks up one of [`CATALOG_NAMES`].
pub fn builtin(name: &str) -> Result<CatalogEntry, CodeError> {
    match name {
        "qhamming15" => qhamming15_entry(),
        "c422" => {
            let h = BitMatrix::from_strs(&["1111"])?;
            Ok(CatalogEntry {
                code: SelfDualCssCode::from_check_matrix(&h, None)?
                    .with_name("c422")
                    .with_distance_label(2),
                reference_basis: None,
                gauge_basis: None,
            })
        }
        "c622" => {
            let h = BitMatrix::from_strs(&["110011", "001111"])?;
            let reps = BitMatrix::from_strs(&["101010", "010101"])?;
            let code = SelfDualCssCode::from_check_matrix(&h, Some(&reps))?
                .with_name("c622")
                .with_distance_label(2);
            let pairs = reps.rows().iter().map(|v| (v.clone(), v.clone())).collect();
            Ok(CatalogEntry {
                code,
                reference_basis: Some(SymplecticBasis::from_pairs(pairs)),
                gauge_basis: None,
            })
        }
        "steane7" => Ok(CatalogEntry {
            code: hamming_code(3)?.with_name("steane7"),
            reference_basis: None,
            gauge_basis: None,
        }),
        other => Err(CodeError::UnknownCode(other.to_string())),
    }
}

/// A random self-orthogonal check matrix with at most `max_rows` rows and
/// at least one logical qubit. Rows are drawn from the orthogonal complement
/// of the rows chosen so far.
pub fn random_self_orthogonal<R: Rng + ?Sized>(n: usize, max_rows: usize, rng: &mut R) -> BitMatrix {
    let target = max_rows.min(n.saturating_sub(1) / 2);
    let mut h = BitMatrix::new(n);
    let mut span = EchelonBasis::new(n);
    for _ in 0..(8 * target + 8) {
        if h.nrows() == target {
            break;
        }
        let complement = if h.nrows() == 0 {
            BitMatrix::identity(n)
        } else {
            nullspace_basis(&h)
        };
        let mut v = BitVector::zeros(n);
        for row in complement.rows() {
            if rng.random_bool(0.5) {
                v ^= row;
            }
        }
        if v.weight() % 2 == 0 && !v.is_zero() && span.insert(&v) {
            h.push_row(v).expect("row has width n");
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_parameters() {
        for (name, n, k, d) in [("qhamming15", 15, 7, 3), ("c422", 4, 2, 2), ("c622", 6, 2, 2), ("steane7", 7, 1, 3)] {
            let e = builtin(name).unwrap();
            assert_eq!((e.code.n(), e.code.k()), (n, k), "{name}");
            assert_eq!(e.code.min_distance_bruteforce().unwrap(), d, "{name}");
            assert_eq!(e.code.distance_label(), Some(d));
        }
        assert!(matches!(builtin("nope"), Err(CodeError::UnknownCode(_))));
    }

    #[test]
    fn rejects_non_orthogonal() {
        let h = BitMatrix::from_strs(&["1100", "1010"]).unwrap();
        assert_eq!(
            SelfDualCssCode::from_check_matrix(&h, None),
            Err(CodeError::NotSelfDual { i: 0, j: 1 })
        );
        let odd = BitMatrix::from_strs(&["111"]).unwrap();
        assert_eq!(
            SelfDualCssCode::from_check_matrix(&odd, None),
            Err(CodeError::NotSelfDual { i: 0, j: 0 })
        );
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let h = BitMatrix::from_strs(&["110011", "001111", "111100"]).unwrap();
        let c = SelfDualCssCode::from_check_matrix(&h, None).unwrap();
        assert_eq!((c.r(), c.k()), (2, 2));
        assert_eq!(c.dropped_rows(), &[2]);
    }

    #[test]
    fn degenerate_and_empty() {
        let h = BitMatrix::from_strs(&["1100", "0011"]).unwrap();
        assert_eq!(SelfDualCssCode::from_check_matrix(&h, None), Err(CodeError::Degenerate));
        let z = BitMatrix::zeros(1, 4);
        assert_eq!(SelfDualCssCode::from_check_matrix(&z, None), Err(CodeError::Empty));
    }

    #[test]
    fn hamming_family() {
        let h4 = hamming_code(4).unwrap();
        assert_eq!((h4.n(), h4.k()), (15, 7));
        let q = builtin("qhamming15").unwrap().code;
        assert_eq!(h4.check(), q.check());
        assert_eq!(hamming_code(3).unwrap().k(), 1);
        assert_eq!(hamming_code(5).unwrap().k(), 21);
        assert_eq!(hamming_code(2), Err(CodeError::HammingParameter(2)));
    }

    #[test]
    fn stabilizer_membership() {
        let c = builtin("c622").unwrap().code;
        let g: PauliOperator = "XXIIXX".parse().unwrap();
        assert!(c.stabilizer_contains(&g));
        assert!(!c.stabilizer_contains(&g.clone().with_phase(2)));
        let l: PauliOperator = "XIXIXI".parse().unwrap();
        assert!(!c.stabilizer_contains(&l));
    }
}
