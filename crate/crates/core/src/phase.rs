//! Transversal S/S† layers.
//!
//! Sign convention: `+1` on a physical qubit means `S`, `-1` means `S†`.
//! On a logical qubit, `+1` means `S̄_j`, i.e. `X̄_j ↦ +i X̄_j Z̄_j`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::basis::{verify_basis, BasisReport, SymplecticBasis};
use crate::code::SelfDualCssCode;
use crate::gf2::{solve_linear, BitVector, Gf2Error};
use crate::pauli::{conjugate_by_layer, Gate1, PauliOperator, TransversalLayer};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhaseError {
    #[error("basis pair {pair} is not matched")]
    NotMatched { pair: usize },
    #[error("expected {expected} signs, found {found}")]
    SignCount { expected: usize, found: usize },
    #[error("sign formula and conjugation disagree on logical qubit {pair}")]
    FormulaMismatch { pair: usize },
    #[error("layer does not preserve the stabilizer group")]
    NotStabilizerPreserving,
    #[error("basis is not compatible with transversal Hadamard")]
    InconsistentBasis { report: BasisReport },
    #[error("cannot parse sign pattern: {0}")]
    Parse(String),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn gate(self) -> Gate1 {
        match self {
            Sign::Plus => Gate1::S,
            Sign::Minus => Gate1::Sdg,
        }
    }

    /// Sign of `i^p` for odd `p`.
    fn from_odd_phase(p: u8) -> Option<Self> {
        match p % 4 {
            1 => Some(Sign::Plus),
            3 => Some(Sign::Minus),
            _ => None,
        }
    }
}

/// A sequence of signs, one per physical or logical qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct PhasePattern(pub Vec<Sign>);

impl PhasePattern {
    pub fn uniform(len: usize, sign: Sign) -> Self {
        Self(vec![sign; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    /// Zero-based positions holding `-1`.
    pub fn minus_positions(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == Sign::Minus)
            .map(|(i, _)| i)
            .collect()
    }

    /// Flips every position in the support of `v`.
    pub fn flip_on(&mut self, v: &BitVector) {
        for i in v.support() {
            self.0[i] = self.0[i].flip();
        }
    }

    pub fn to_layer(&self) -> TransversalLayer {
        TransversalLayer::Single(self.0.iter().map(|s| s.gate()).collect())
    }

    /// Compact rendering, one `+` or `-` per entry.
    pub fn compact(&self) -> String {
        self.0
            .iter()
            .map(|s| match s {
                Sign::Plus => '+',
                Sign::Minus => '-',
            })
            .collect()
    }

    /// Gate rendering such as `S S† S`.
    pub fn gates(&self) -> String {
        self.to_layer().to_string()
    }

    /// Exhaustive pattern number `index` of length `len`; bit `j` set means `-1`.
    pub fn from_index(len: usize, index: u64) -> Self {
        Self(
            (0..len)
                .map(|j| if (index >> j) & 1 == 1 { Sign::Minus } else { Sign::Plus })
                .collect(),
        )
    }
}

impl fmt::Display for PhasePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.compact())
    }
}

impl FromStr for PhasePattern {
    type Err = PhaseError;

    /// Accepts a compact `+-+` string or a comma/space separated list of
    /// `1`, `+1`, `-1`, `+`, `-`, `S`, `S†`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if !s.is_empty() && s.chars().all(|c| c == '+' || c == '-') {
            return Ok(Self(
                s.chars()
                    .map(|c| if c == '+' { Sign::Plus } else { Sign::Minus })
                    .collect(),
            ));
        }
        s.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| match t {
                "1" | "+1" | "+" | "S" => Ok(Sign::Plus),
                "-1" | "-" | "S†" | "Sdg" => Ok(Sign::Minus),
                other => Err(PhaseError::Parse(format!("unexpected token {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }
}

/// Signs `c` such that `⊗ S_i^{c_i}` maps every `gˣ` to `gˣgᶻ` with phase 0.
///
/// Solves `Hv = δ` with `δ_i = [wt(g_i) ≡ 2 mod 4]` and sets `c_i = (-1)^{v_i}`.
pub fn stabilizer_preserving_layer(code: &SelfDualCssCode) -> Result<PhasePattern, PhaseError> {
    let delta = BitVector::from_bits(code.check().rows().iter().map(|g| g.weight() % 4 == 2));
    let v = solve_linear(code.check(), &delta)?;
    let mut layer = PhasePattern::uniform(code.n(), Sign::Plus);
    layer.flip_on(&v);
    Ok(layer)
}

fn require_matched(basis: &SymplecticBasis) -> Result<(), PhaseError> {
    for j in 0..basis.k() {
        if basis.x(j) != basis.z(j) {
            return Err(PhaseError::NotMatched { pair: j });
        }
    }
    Ok(())
}

fn check_len(expected: usize, found: usize) -> Result<(), PhaseError> {
    if expected != found {
        return Err(PhaseError::SignCount { expected, found });
    }
    Ok(())
}

/// Whether the layer maps `gˣ ↦ gˣgᶻ` (phase 0) and fixes `gᶻ` for every row.
pub fn preserves_stabilizers(code: &SelfDualCssCode, layer: &PhasePattern) -> bool {
    let l = layer.to_layer();
    code.check().rows().iter().all(|g| {
        let gx = PauliOperator::x_type(g.clone());
        let gz = PauliOperator::z_type(g.clone());
        let want = gx.multiply(&gz).expect("equal lengths");
        conjugate_by_layer(&gx, &l).ok() == Some(want) && conjugate_by_layer(&gz, &l).ok() == Some(gz)
    })
}

/// Logical signs realized by a stabilizer-preserving layer.
///
/// Uses `q_j = wt(ℓ_j) − 2Σ v_i ℓ_ji` and `q̃_j = ((q_j + 2) mod 4) − 2`,
/// then confirms each sign by conjugating `X̄_j`.
pub fn logical_phase_signs(
    code: &SelfDualCssCode,
    basis: &SymplecticBasis,
    layer: &PhasePattern,
) -> Result<PhasePattern, PhaseError> {
    require_matched(basis)?;
    check_len(code.n(), layer.len())?;
    if !preserves_stabilizers(code, layer) {
        return Err(PhaseError::NotStabilizerPreserving);
    }
    let v = BitVector::from_bits(layer.signs().iter().map(|s| *s == Sign::Minus));
    let l = layer.to_layer();
    let mut out = Vec::with_capacity(basis.k());
    for j in 0..basis.k() {
        let ell = basis.x(j);
        let q = ell.weight() as i64 - 2 * ell.overlap(&v)? as i64;
        let q_tilde = (q + 2).rem_euclid(4) - 2;
        let by_formula = if q_tilde == 1 { Sign::Plus } else { Sign::Minus };

        let image = conjugate_by_layer(&basis.logical_x(j), &l).expect("layer has code length");
        let by_conjugation = (image.x() == ell && image.z() == ell)
            .then(|| Sign::from_odd_phase(image.phase()))
            .flatten();
        if by_conjugation != Some(by_formula) || q_tilde.abs() != 1 {
            return Err(PhaseError::FormulaMismatch { pair: j });
        }
        out.push(by_formula);
    }
    Ok(PhasePattern(out))
}

/// Physical signs realizing `⊗_j S̄_j^{target_j}`.
///
/// Starts from [`stabilizer_preserving_layer`] and, for every logical qubit
/// whose sign is wrong, flips the layer on `supp(ℓ_j)` (multiplying by `Z̄_j`).
pub fn synthesize_phase_layer(
    code: &SelfDualCssCode,
    basis: &SymplecticBasis,
    target: &PhasePattern,
) -> Result<PhasePattern, PhaseError> {
    require_matched(basis)?;
    check_len(basis.k(), target.len())?;
    let mut layer = stabilizer_preserving_layer(code)?;
    let current = logical_phase_signs(code, basis, &layer)?;
    for j in 0..basis.k() {
        if current.0[j] != target.0[j] {
            layer.flip_on(basis.x(j));
        }
    }
    Ok(layer)
}

/// One failed property of a phase layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PhaseFailure {
    WrongLogicalX { pair: usize, expected: String, found: String },
    LogicalZMoved { pair: usize },
    StabilizerNotPreserved { row: usize },
}

/// Conjugation transcript for a phase layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhaseReport {
    pub logical_x_images: Vec<String>,
    pub failures: Vec<PhaseFailure>,
}

impl PhaseReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `X̄_j ↦ i^{target_j} X̄_jZ̄_j`, `Z̄_j ↦ Z̄_j`, and stabilizer
/// preservation, all by Pauli conjugation.
pub fn verify_phase_layer(
    code: &SelfDualCssCode,
    basis: &SymplecticBasis,
    layer: &PhasePattern,
    target: &PhasePattern,
) -> Result<PhaseReport, PhaseError> {
    check_len(code.n(), layer.len())?;
    check_len(basis.k(), target.len())?;
    let l = layer.to_layer();
    let mut failures = Vec::new();
    let mut images = Vec::with_capacity(basis.k());
    for j in 0..basis.k() {
        let xj = basis.logical_x(j);
        let zj = basis.logical_z(j);
        let img = conjugate_by_layer(&xj, &l).expect("layer has code length");
        let p = match target.0[j] {
            Sign::Plus => 1,
            Sign::Minus => 3,
        };
        let xz = xj.multiply(&zj).expect("equal lengths");
        let phase = xz.phase() + p;
        let want = xz.with_phase(phase);
        images.push(img.to_string());
        if img != want {
            failures.push(PhaseFailure::WrongLogicalX {
                pair: j,
                expected: want.to_string(),
                found: img.to_string(),
            });
        }
        if conjugate_by_layer(&zj, &l).expect("layer has code length") != zj {
            failures.push(PhaseFailure::LogicalZMoved { pair: j });
        }
    }
    for (row, g) in code.check().rows().iter().enumerate() {
        for op in [PauliOperator::x_type(g.clone()), PauliOperator::z_type(g.clone())] {
            let img = conjugate_by_layer(&op, &l).expect("layer has code length");
            if !code.stabilizer_contains(&img) {
                failures.push(PhaseFailure::StabilizerNotPreserved { row });
                break;
            }
        }
    }
    Ok(PhaseReport {
        logical_x_images: images,
        failures,
    })
}

/// The all-H layer, after confirming it acts as `⊗_j H̄_j` in this basis.
pub fn hadamard_layer(code: &SelfDualCssCode, basis: &SymplecticBasis) -> Result<(TransversalLayer, BasisReport), PhaseError> {
    let report = verify_basis(code, basis, true);
    if !report.passed() {
        return Err(PhaseError::InconsistentBasis { report });
    }
    Ok((TransversalLayer::uniform(code.n(), Gate1::H), report))
}
