//! Explicit complex matrices for small systems.
//!
//! Used only to cross-check the symbolic conjugation rules. Qubit `q` is
//! bit `q` of a basis-state index.

use num_complex::Complex64;

use super::{Gate1, PauliError, PauliOperator, TransversalLayer};
use crate::gf2::BitVector;

/// Largest qubit count the oracle accepts.
pub const MAX_QUBITS: usize = 7;

const TOL: f64 = 1e-9;

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self.data[r * d + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let row = &other.data[k * d..(k + 1) * d];
                let dst = &mut out.data[r * d..(r + 1) * d];
                for (o, b) in dst.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for c in 0..d {
                out.data[c * d + r] = self.data[r * d + c].conj();
            }
        }
        out
    }

    /// Whether `self = λ·I` for some unit-modulus `λ`.
    pub fn is_scalar_identity(&self) -> bool {
        let lambda = self.at(0, 0);
        if (lambda.norm() - 1.0).abs() > TOL {
            return false;
        }
        (0..self.dim).all(|r| {
            (0..self.dim).all(|c| {
                let want = if r == c { lambda } else { Complex64::new(0.0, 0.0) };
                (self.at(r, c) - want).norm() < TOL
            })
        })
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| (a - b).norm() < TOL)
    }
}

/// The 2×2 matrix of a layer gate.
pub fn gate_matrix(g: Gate1) -> [[Complex64; 2]; 2] {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    match g {
        Gate1::I => [[l, o], [o, l]],
        Gate1::X => [[o, l], [l, o]],
        Gate1::Y => [[o, -i], [i, o]],
        Gate1::Z => [[l, o], [o, -l]],
        Gate1::H => [[h, h], [h, -h]],
        Gate1::S => [[l, o], [o, i]],
        Gate1::Sdg => [[l, o], [o, -i]],
    }
}

/// Product of 2×2 gate matrices for a word, first element applied first.
pub fn word_matrix(word: &[Gate1]) -> DenseMatrix {
    let mut acc = DenseMatrix::identity(2);
    for &g in word {
        let m = gate_matrix(g);
        let gm = DenseMatrix {
            dim: 2,
            data: vec![m[0][0], m[0][1], m[1][0], m[1][1]],
        };
        acc = gm.mul(&acc);
    }
    acc
}

fn check_size(qubits: usize) -> Result<(), PauliError> {
    if qubits > MAX_QUBITS {
        return Err(PauliError::TooLarge {
            qubits,
            limit: MAX_QUBITS,
        });
    }
    Ok(())
}

fn phase_value(p: u8) -> Complex64 {
    [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ][(p % 4) as usize]
}

/// Dense matrix of `i^p X^x Z^z`.
pub fn pauli_matrix(p: &PauliOperator) -> Result<DenseMatrix, PauliError> {
    let n = p.n();
    check_size(n)?;
    let dim = 1usize << n;
    let xm = bits_to_index(p.x());
    let zm = bits_to_index(p.z());
    let scale = phase_value(p.phase());
    let mut m = DenseMatrix::zeros(dim);
    for c in 0..dim {
        let sign = if (zm & c).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        m.data[(c ^ xm) * dim + c] = scale * sign;
    }
    Ok(m)
}

/// Dense matrix of a layer on `layer.qubits()` qubits.
pub fn layer_matrix(layer: &TransversalLayer) -> Result<DenseMatrix, PauliError> {
    let n = layer.qubits();
    check_size(n)?;
    let dim = 1usize << n;
    let mut m = DenseMatrix::zeros(dim);
    match layer {
        TransversalLayer::Single(gates) => {
            let mats: Vec<_> = gates.iter().map(|&g| gate_matrix(g)).collect();
            for r in 0..dim {
                for c in 0..dim {
                    let mut v = Complex64::new(1.0, 0.0);
                    for (q, g) in mats.iter().enumerate() {
                        v *= g[(r >> q) & 1][(c >> q) & 1];
                        if v.norm_sqr() == 0.0 {
                            break;
                        }
                    }
                    m.data[r * dim + c] = v;
                }
            }
        }
        TransversalLayer::Cnot { mask } => {
            let half = mask.len();
            for c in 0..dim {
                let mut r = c;
                for i in mask.support() {
                    if (c >> i) & 1 == 1 {
                        r ^= 1 << (half + i);
                    }
                }
                m.data[r * dim + c] = Complex64::new(1.0, 0.0);
            }
        }
    }
    Ok(m)
}

/// Reads `(x, z, phase)` back out of a matrix that should equal
/// `i^p X^x Z^z`, and confirms every entry.
pub fn extract_pauli(m: &DenseMatrix, n: usize) -> Result<PauliOperator, PauliError> {
    let dim = 1usize << n;
    if m.dim != dim {
        return Err(PauliError::NotPauli);
    }
    // Column 0 is i^p |x>.
    let col0: Vec<usize> = (0..dim).filter(|&r| m.at(r, 0).norm() > TOL).collect();
    let [xm] = col0[..] else {
        return Err(PauliError::NotPauli);
    };
    let lead = m.at(xm, 0);
    let phase = (0..4u8)
        .find(|&p| (phase_value(p) - lead).norm() < TOL)
        .ok_or(PauliError::NotPauli)?;
    // Column e_q is i^p (-1)^{z_q} |x ⊕ e_q>.
    let mut zm = 0usize;
    for q in 0..n {
        let v = m.at(xm ^ (1 << q), 1 << q);
        if (v + lead).norm() < TOL {
            zm |= 1 << q;
        } else if (v - lead).norm() >= TOL {
            return Err(PauliError::NotPauli);
        }
    }
    let candidate = PauliOperator::new(index_to_bits(xm, n), index_to_bits(zm, n), phase)?;
    if !pauli_matrix(&candidate)?.approx_eq(m) {
        return Err(PauliError::NotPauli);
    }
    Ok(candidate)
}

/// `L P L†` computed with explicit matrices.
pub fn dense_oracle_conjugate(p: &PauliOperator, layer: &TransversalLayer) -> Result<PauliOperator, PauliError> {
    let n = p.n();
    if layer.qubits() != n {
        return Err(PauliError::SizeMismatch {
            expected: n,
            found: layer.qubits(),
        });
    }
    check_size(n)?;
    let l = layer_matrix(layer)?;
    let pm = pauli_matrix(p)?;
    let out = l.mul(&pm).mul(&l.adjoint());
    extract_pauli(&out, n)
}

fn bits_to_index(v: &BitVector) -> usize {
    v.support().fold(0, |acc, q| acc | (1 << q))
}

fn index_to_bits(idx: usize, n: usize) -> BitVector {
    BitVector::from_bits((0..n).map(|q| (idx >> q) & 1 == 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_matrix_round_trip() {
        for s in ["+1XZ", "-iYI", "+iZZ", "-1XY"] {
            let p: PauliOperator = s.parse().unwrap();
            let m = pauli_matrix(&p).unwrap();
            assert_eq!(extract_pauli(&m, 2).unwrap(), p);
        }
    }

    #[test]
    fn identity_is_fixed() {
        let id = PauliOperator::identity(3);
        let layer = TransversalLayer::Single(vec![Gate1::H, Gate1::S, Gate1::Y]);
        assert_eq!(dense_oracle_conjugate(&id, &layer).unwrap(), id);
    }

    #[test]
    fn hshshs_is_scalar() {
        use Gate1::*;
        assert!(word_matrix(&[H, S, H, S, H, S]).is_scalar_identity());
        assert!(!word_matrix(&[H, S]).is_scalar_identity());
    }

    #[test]
    fn refuses_large() {
        let p = PauliOperator::identity(8);
        let l = TransversalLayer::uniform(8, Gate1::H);
        assert!(matches!(
            dense_oracle_conjugate(&p, &l),
            Err(PauliError::TooLarge { qubits: 8, .. })
        ));
    }
}
