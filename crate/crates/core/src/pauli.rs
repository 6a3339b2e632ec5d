//! Phase-tracked Pauli operators and their conjugation by transversal
//! Clifford layers.
//!
//! An operator is stored canonically as `i^phase · X^x Z^z`, X part first.
//! In this form `Y = i·XZ`, so a rendered `Y` letter absorbs one factor of
//! `i` from the stored phase.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::gf2::{BitVector, Gf2Error};

pub mod dense;
pub mod symplectic;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("size mismatch: expected {expected} qubits, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("two-block operator needs an even qubit count, found {0}")]
    OddLength(usize),
    #[error("layer kind not supported here: {0}")]
    WrongLayerKind(&'static str),
    #[error("cannot parse Pauli string: {0}")]
    Parse(String),
    #[error("dense oracle refuses {qubits} qubits (limit {limit})")]
    TooLarge { qubits: usize, limit: usize },
    #[error("matrix is not a scaled Pauli operator")]
    NotPauli,
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// `i^phase · X^x Z^z` on `n` qubits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    x: BitVector,
    z: BitVector,
    phase: u8,
}

impl PauliOperator {
    pub fn new(x: BitVector, z: BitVector, phase: u8) -> Result<Self, PauliError> {
        if x.len() != z.len() {
            return Err(PauliError::SizeMismatch {
                expected: x.len(),
                found: z.len(),
            });
        }
        Ok(Self {
            x,
            z,
            phase: phase % 4,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            x: BitVector::zeros(n),
            z: BitVector::zeros(n),
            phase: 0,
        }
    }

    pub fn x_type(x: BitVector) -> Self {
        let n = x.len();
        Self {
            x,
            z: BitVector::zeros(n),
            phase: 0,
        }
    }

    pub fn z_type(z: BitVector) -> Self {
        let n = z.len();
        Self {
            x: BitVector::zeros(n),
            z,
            phase: 0,
        }
    }

    /// Hermitian single-qubit Pauli `letter ∈ {I, X, Y, Z}` on qubit `q`.
    pub fn single(n: usize, q: usize, letter: char) -> Result<Self, PauliError> {
        let mut p = Self::identity(n);
        match letter {
            'I' => {}
            'X' => p.x.set(q, true),
            'Z' => p.z.set(q, true),
            'Y' => {
                p.x.set(q, true);
                p.z.set(q, true);
                p.phase = 1;
            }
            other => return Err(PauliError::Parse(format!("unknown letter {other:?}"))),
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &BitVector {
        &self.x
    }

    pub fn z(&self) -> &BitVector {
        &self.z
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase % 4;
        self
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Number of qubits where both the X and Z parts are set.
    pub fn y_count(&self) -> usize {
        self.x.overlap(&self.z).expect("x and z share a length")
    }

    pub fn is_hermitian(&self) -> bool {
        (self.phase as usize) % 2 == self.y_count() % 2
    }

    /// Phase a rendered Pauli string would carry, i.e. with every `Y`
    /// letter counted as a Hermitian `Y`.
    pub fn display_phase(&self) -> u8 {
        ((self.phase as usize + 4 * self.n() - self.y_count()) % 4) as u8
    }

    /// Same operator with the sign that makes it Hermitian and renders
    /// with a `+1` prefix.
    pub fn hermitian_representative(&self) -> Self {
        let phase = (self.y_count() % 4) as u8;
        Self {
            x: self.x.clone(),
            z: self.z.clone(),
            phase,
        }
    }

    pub fn weight(&self) -> usize {
        self.support().len()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| self.x.get(i) || self.z.get(i))
            .collect()
    }

    pub fn multiply(&self, other: &Self) -> Result<Self, PauliError> {
        self.check_size(other)?;
        let cross = self.z.overlap(&other.x)?;
        Ok(Self {
            x: &self.x ^ &other.x,
            z: &self.z ^ &other.z,
            phase: ((self.phase as usize + other.phase as usize + 2 * cross) % 4) as u8,
        })
    }

    pub fn commutes_with(&self, other: &Self) -> Result<bool, PauliError> {
        self.check_size(other)?;
        Ok((self.x.overlap(&other.z)? + self.z.overlap(&other.x)?) % 2 == 0)
    }

    /// Equality up to an overall sign (phase difference 0 or 2).
    pub fn eq_up_to_sign(&self, other: &Self) -> bool {
        self.x == other.x && self.z == other.z && (self.phase + 4 - other.phase) % 2 == 0
    }

    /// Letters followed by nothing; the phase token is omitted.
    pub fn letters(&self) -> String {
        self.x
            .iter()
            .zip(self.z.iter())
            .map(|(a, b)| match (a, b) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            })
            .collect()
    }

    fn check_size(&self, other: &Self) -> Result<(), PauliError> {
        if self.n() != other.n() {
            return Err(PauliError::SizeMismatch {
                expected: self.n(),
                found: other.n(),
            });
        }
        Ok(())
    }
}

pub fn pauli_multiply(a: &PauliOperator, b: &PauliOperator) -> Result<PauliOperator, PauliError> {
    a.multiply(b)
}

const PHASE_TOKENS: [&str; 4] = ["+1", "+i", "-1", "-i"];

/// Renders as `<phase token><letters>`, e.g. `-iXYZ`.
impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", PHASE_TOKENS[self.display_phase() as usize], self.letters())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli({self})")
    }
}

impl FromStr for PauliOperator {
    type Err = PauliError;

    /// Accepts an optional phase token (`+1`, `+i`, `-1`, `-i`, `+`, `-`,
    /// `i`, `-i`) followed by letters from `IXYZ`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (display_phase, rest) = [
            ("+1", 0u8),
            ("-1", 2),
            ("+i", 1),
            ("-i", 3),
            ("i", 1),
            ("+", 0),
            ("-", 2),
        ]
        .iter()
        .find_map(|(tok, p)| s.strip_prefix(tok).map(|r| (*p, r)))
        .unwrap_or((0, s));
        let n = rest.chars().count();
        let mut x = BitVector::zeros(n);
        let mut z = BitVector::zeros(n);
        let mut ys = 0usize;
        for (i, c) in rest.chars().enumerate() {
            match c {
                'I' => {}
                'X' => x.set(i, true),
                'Z' => z.set(i, true),
                'Y' => {
                    x.set(i, true);
                    z.set(i, true);
                    ys += 1;
                }
                other => {
                    return Err(PauliError::Parse(format!(
                        "unexpected {other:?} at position {i} in {s:?}"
                    )))
                }
            }
        }
        Ok(Self {
            x,
            z,
            phase: ((display_phase as usize + ys) % 4) as u8,
        })
    }
}

/// Single-qubit gates allowed in a transversal layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gate1 {
    I,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
}

impl Gate1 {
    pub const ALL: [Gate1; 7] = [
        Gate1::I,
        Gate1::X,
        Gate1::Y,
        Gate1::Z,
        Gate1::H,
        Gate1::S,
        Gate1::Sdg,
    ];

    pub fn inverse(self) -> Self {
        match self {
            Gate1::S => Gate1::Sdg,
            Gate1::Sdg => Gate1::S,
            g => g,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Gate1::I => "I",
            Gate1::X => "X",
            Gate1::Y => "Y",
            Gate1::Z => "Z",
            Gate1::H => "H",
            Gate1::S => "S",
            Gate1::Sdg => "S†",
        }
    }

    pub fn is_pauli(self) -> bool {
        matches!(self, Gate1::I | Gate1::X | Gate1::Y | Gate1::Z)
    }

    /// Image of the single-qubit factor `X^x Z^z` as `(x', z', Δphase)`.
    #[inline]
    pub fn conjugate_bits(self, x: bool, z: bool) -> (bool, bool, u8) {
        match self {
            Gate1::I => (x, z, 0),
            Gate1::X => (x, z, if z { 2 } else { 0 }),
            Gate1::Z => (x, z, if x { 2 } else { 0 }),
            Gate1::Y => (x, z, if x != z { 2 } else { 0 }),
            Gate1::H => (z, x, if x && z { 2 } else { 0 }),
            Gate1::S => (x, z ^ x, if x { 1 } else { 0 }),
            Gate1::Sdg => (x, z ^ x, if x { 3 } else { 0 }),
        }
    }
}

impl fmt::Display for Gate1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Gate1 {
    type Err = PauliError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "I" => Gate1::I,
            "X" => Gate1::X,
            "Y" => Gate1::Y,
            "Z" => Gate1::Z,
            "H" => Gate1::H,
            "S" => Gate1::S,
            "S†" | "Sdg" | "SDG" | "Sd" => Gate1::Sdg,
            other => return Err(PauliError::Parse(format!("unknown gate {other:?}"))),
        })
    }
}

/// A physical layer: one gate per qubit, or a transversal CNOT between two
/// blocks of `n` qubits (block 1 controls, block 2 targets).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TransversalLayer {
    Single(Vec<Gate1>),
    /// CNOT from qubit `i` to qubit `n + i` for every `i` in the mask.
    Cnot { mask: BitVector },
}

impl TransversalLayer {
    pub fn uniform(n: usize, gate: Gate1) -> Self {
        TransversalLayer::Single(vec![gate; n])
    }

    pub fn cnot(n: usize) -> Self {
        TransversalLayer::Cnot {
            mask: BitVector::ones(n),
        }
    }

    /// Number of qubits the layer acts on (2n for a CNOT layer).
    pub fn qubits(&self) -> usize {
        match self {
            TransversalLayer::Single(g) => g.len(),
            TransversalLayer::Cnot { mask } => 2 * mask.len(),
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            TransversalLayer::Single(g) => TransversalLayer::Single(g.iter().map(|g| g.inverse()).collect()),
            c => c.clone(),
        }
    }

    pub fn gates(&self) -> Option<&[Gate1]> {
        match self {
            TransversalLayer::Single(g) => Some(g),
            TransversalLayer::Cnot { .. } => None,
        }
    }

    pub fn conjugate(&self, p: &PauliOperator) -> Result<PauliOperator, PauliError> {
        match self {
            TransversalLayer::Single(_) => conjugate_by_layer(p, self),
            TransversalLayer::Cnot { mask } => cnot_conjugate(p, mask),
        }
    }
}

impl fmt::Display for TransversalLayer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransversalLayer::Single(g) => {
                let parts: Vec<&str> = g.iter().map(|g| g.symbol()).collect();
                f.write_str(&parts.join(" "))
            }
            TransversalLayer::Cnot { mask } => write!(f, "CNOT[{mask}]"),
        }
    }
}

/// `L P L†` for a single-block layer.
pub fn conjugate_by_layer(p: &PauliOperator, layer: &TransversalLayer) -> Result<PauliOperator, PauliError> {
    let TransversalLayer::Single(gates) = layer else {
        return Err(PauliError::WrongLayerKind("expected a single-block layer"));
    };
    if gates.len() != p.n() {
        return Err(PauliError::SizeMismatch {
            expected: p.n(),
            found: gates.len(),
        });
    }
    let mut out = p.clone();
    let mut phase = p.phase as u32;
    for (q, g) in gates.iter().enumerate() {
        if *g == Gate1::I {
            continue;
        }
        let (x, z, dp) = g.conjugate_bits(p.x.get(q), p.z.get(q));
        out.x.set(q, x);
        out.z.set(q, z);
        phase += dp as u32;
    }
    out.phase = (phase % 4) as u8;
    Ok(out)
}

/// Conjugation by CNOTs from every qubit of block 1 to the matching qubit
/// of block 2. The operator acts on `2n` qubits, block 1 first.
pub fn conjugate_by_transversal_cnot(p: &PauliOperator) -> Result<PauliOperator, PauliError> {
    if p.n() % 2 == 1 {
        return Err(PauliError::OddLength(p.n()));
    }
    cnot_conjugate(p, &BitVector::ones(p.n() / 2))
}

fn cnot_conjugate(p: &PauliOperator, mask: &BitVector) -> Result<PauliOperator, PauliError> {
    let n = mask.len();
    if p.n() != 2 * n {
        return Err(PauliError::SizeMismatch {
            expected: 2 * n,
            found: p.n(),
        });
    }
    let mut out = p.clone();
    for i in mask.support() {
        if p.x.get(i) {
            out.x.flip(n + i);
        }
        if p.z.get(n + i) {
            out.z.flip(i);
        }
    }
    Ok(out)
}

/// A single-qubit Clifford modulo global phase, stored as the conjugation
/// images of `X` and `Z`. Composition follows application order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Clifford1 {
    /// (x, z, phase) of `U X U†`.
    pub x_image: (bool, bool, u8),
    /// (x, z, phase) of `U Z U†`.
    pub z_image: (bool, bool, u8),
}

impl Clifford1 {
    pub const IDENTITY: Clifford1 = Clifford1 {
        x_image: (true, false, 0),
        z_image: (false, true, 0),
    };

    pub fn from_gate(g: Gate1) -> Self {
        Clifford1 {
            x_image: g.conjugate_bits(true, false),
            z_image: g.conjugate_bits(false, true),
        }
    }

    /// Product for the word `gates`, first element applied first.
    pub fn from_word(gates: &[Gate1]) -> Self {
        gates
            .iter()
            .fold(Self::IDENTITY, |acc, &g| acc.then(Self::from_gate(g)))
    }

    /// Image of `i^p X^x Z^z` under this Clifford.
    pub fn apply(&self, x: bool, z: bool, p: u8) -> (bool, bool, u8) {
        let mut acc = (false, false, p % 4);
        if x {
            acc = mul1(acc, self.x_image);
        }
        if z {
            acc = mul1(acc, self.z_image);
        }
        acc
    }

    /// `next ∘ self`: apply `self` first, then `next`.
    pub fn then(&self, next: Clifford1) -> Clifford1 {
        let (x, z, p) = self.x_image;
        let (zx, zz, zp) = self.z_image;
        Clifford1 {
            x_image: next.apply(x, z, p),
            z_image: next.apply(zx, zz, zp),
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// The layer gate equal to this Clifford (modulo global phase), if any.
    pub fn as_gate(&self) -> Option<Gate1> {
        Gate1::ALL.into_iter().find(|&g| Self::from_gate(g) == *self)
    }
}

fn mul1(a: (bool, bool, u8), b: (bool, bool, u8)) -> (bool, bool, u8) {
    let cross = if a.1 && b.0 { 2 } else { 0 };
    (a.0 ^ b.0, a.1 ^ b.1, (a.2 + b.2 + cross) % 4)
}
