//! Logical measurement conversion by global `H̄^{⊗k}` and `S̄^{⊗k}` layers,
//! ancilla-type grouping, and the standard gate-conversion identities.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::gf2::BitVector;
use crate::pauli::dense::word_matrix;
use crate::pauli::{conjugate_by_layer, Clifford1, Gate1, PauliOperator, TransversalLayer};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FtqcError {
    #[error("cannot parse measurement target {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("measurement target must be Hermitian")]
    NotHermitian,
    #[error("measurement target must not be the identity")]
    Identity,
    #[error("gate {0} is not a global conversion move")]
    BadMove(Gate1),
    #[error("need at least {needed} logical qubits, found {k}")]
    TooFewQubits { needed: usize, k: usize },
}

/// A nonidentity Hermitian logical Pauli operator to be measured.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MeasurementTarget {
    operator: PauliOperator,
}

impl MeasurementTarget {
    pub fn new(operator: PauliOperator) -> Result<Self, FtqcError> {
        if operator.is_identity() {
            return Err(FtqcError::Identity);
        }
        if !operator.is_hermitian() {
            return Err(FtqcError::NotHermitian);
        }
        Ok(Self { operator })
    }

    /// Parses `"Zi Zj"`, `"X_i Z_j"`, `"-Y1Y3"` or a dense string such as
    /// `"XZI"`. Named indices `i, j, l, m` are qubits 1 to 4; numeric
    /// indices are one-based.
    pub fn parse(s: &str, k: usize) -> Result<Self, FtqcError> {
        let err = |reason: String| FtqcError::Parse {
            input: s.to_string(),
            reason,
        };
        let t = s.trim();
        let (minus, body) = match t.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let compact: String = body.chars().filter(|c| !c.is_whitespace()).collect();
        let dense = compact.chars().count() == k && compact.chars().all(|c| "IXYZ".contains(c));
        let mut letters = vec!['I'; k];
        if dense {
            letters = compact.chars().collect();
        } else {
            let chars: Vec<char> = compact.chars().collect();
            let mut pos = 0;
            while pos < chars.len() {
                let letter = chars[pos];
                if !"XYZ".contains(letter) {
                    return Err(err(format!("expected X, Y or Z at {pos}, found {letter:?}")));
                }
                pos += 1;
                if chars.get(pos) == Some(&'_') {
                    pos += 1;
                }
                let q = match chars.get(pos) {
                    Some(c) if c.is_ascii_digit() => {
                        let start = pos;
                        while chars.get(pos).is_some_and(|c| c.is_ascii_digit()) {
                            pos += 1;
                        }
                        let idx: usize = chars[start..pos].iter().collect::<String>().parse().map_err(|_| err("bad index".into()))?;
                        idx.checked_sub(1).ok_or_else(|| err("indices are one-based".into()))?
                    }
                    Some(c) => {
                        pos += 1;
                        ['i', 'j', 'l', 'm']
                            .iter()
                            .position(|n| n == c)
                            .ok_or_else(|| err(format!("unknown index name {c:?}")))?
                    }
                    None => return Err(err(format!("missing index after {letter}"))),
                };
                if q >= k {
                    return Err(err(format!("qubit {} exceeds k = {k}", q + 1)));
                }
                if letters[q] != 'I' {
                    return Err(err(format!("qubit {} appears twice", q + 1)));
                }
                letters[q] = letter;
            }
        }
        let dense: String = letters.into_iter().collect();
        let token = if minus { "-" } else { "+" };
        let op: PauliOperator = format!("{token}{dense}").parse().map_err(|e| err(format!("{e}")))?;
        Self::new(op)
    }

    pub fn operator(&self) -> &PauliOperator {
        &self.operator
    }

    pub fn k(&self) -> usize {
        self.operator.n()
    }

    /// `+1` or `-1`.
    pub fn sign(&self) -> i8 {
        if self.operator.display_phase() == 0 {
            1
        } else {
            -1
        }
    }

    /// Label without the sign, e.g. `"X1 Z2"`.
    pub fn label(&self) -> String {
        self.operator
            .letters()
            .chars()
            .enumerate()
            .filter(|(_, c)| *c != 'I')
            .map(|(q, c)| format!("{c}{}", q + 1))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn key(&self) -> (BitVector, BitVector) {
        (self.operator.x().clone(), self.operator.z().clone())
    }

    pub fn eq_up_to_sign(&self, other: &Self) -> bool {
        self.operator.eq_up_to_sign(&other.operator)
    }
}

impl fmt::Display for MeasurementTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign() < 0 {
            write!(f, "-")?;
        }
        write!(f, "{}", self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conversion {
    pub image: MeasurementTarget,
    /// Sign of the image relative to the source.
    pub sign: i8,
}

fn check_move(g: Gate1) -> Result<(), FtqcError> {
    match g {
        Gate1::H | Gate1::S | Gate1::Sdg => Ok(()),
        other => Err(FtqcError::BadMove(other)),
    }
}

fn apply_global(p: &PauliOperator, g: Gate1) -> PauliOperator {
    conjugate_by_layer(p, &TransversalLayer::uniform(p.n(), g)).expect("uniform layer matches")
}

/// `U P U†` for `U` the product of the global layers in `word`, first
/// element applied first.
pub fn convert_measurement(p: &MeasurementTarget, word: &[Gate1]) -> Result<Conversion, FtqcError> {
    word.iter().try_for_each(|&g| check_move(g))?;
    let image = word.iter().fold(p.operator.clone(), |acc, &g| apply_global(&acc, g));
    let image = MeasurementTarget::new(image)?;
    let sign = image.sign() * p.sign();
    Ok(Conversion { image, sign })
}

/// Shortest word over `{H, S}` taking `source` to `target` up to sign,
/// found by breadth-first search with `H` tried before `S`.
pub fn conversion_chain(source: &MeasurementTarget, target: &MeasurementTarget, max_depth: usize) -> Option<Vec<Gate1>> {
    if source.k() != target.k() {
        return None;
    }
    let goal = target.key();
    let mut seen: HashMap<(BitVector, BitVector), Option<((BitVector, BitVector), Gate1)>> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(source.key(), None);
    queue.push_back((source.operator.clone(), 0usize));
    while let Some((op, depth)) = queue.pop_front() {
        let key = (op.x().clone(), op.z().clone());
        if key == goal {
            let mut word = Vec::new();
            let mut cur = key;
            while let Some(Some((prev, g))) = seen.get(&cur) {
                word.push(*g);
                cur = prev.clone();
            }
            word.reverse();
            return Some(word);
        }
        if depth == max_depth {
            continue;
        }
        for g in [Gate1::H, Gate1::S] {
            let next = apply_global(&op, g);
            let nk = (next.x().clone(), next.z().clone());
            if !seen.contains_key(&nk) {
                seen.insert(nk, Some((key.clone(), g)));
                queue.push_back((next, depth + 1));
            }
        }
    }
    None
}

/// Arrow rendering of the targets visited by `word`, e.g.
/// `Z1 Z2 <-H-> X1 X2 <-S-> Y1 Y2`.
pub fn render_chain(source: &MeasurementTarget, word: &[Gate1]) -> Result<String, FtqcError> {
    let mut out = source.to_string();
    let mut cur = source.clone();
    for &g in word {
        cur = convert_measurement(&cur, &[g])?.image;
        out.push_str(&format!(" <-{}-> {}", g.symbol(), cur));
    }
    Ok(out)
}

/// Groups targets that can share an ancilla type: indices in the same
/// class are linked by conversion words of length at most `max_depth`.
pub fn ancilla_classes(targets: &[MeasurementTarget], max_depth: usize) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..targets.len()).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = i;
        while parent[c] != r {
            let next = parent[c];
            parent[c] = r;
            c = next;
        }
        r
    }
    for a in 0..targets.len() {
        for b in a + 1..targets.len() {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb && conversion_chain(&targets[a], &targets[b], max_depth).is_some() {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..targets.len() {
        let r = find(&mut parent, i);
        let idx = *slot.entry(r).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[idx].push(i);
    }
    classes
}

/// One side of a layer identity: layers in operator-product order, each a
/// gate per logical qubit.
type Circuit = Vec<Vec<Gate1>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    /// Equal as Clifford tableaux on every qubit.
    pub tableau_equal: bool,
    /// Equal as 2×2 unitaries up to a scalar on every qubit.
    pub matrix_equal: bool,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.tableau_equal && self.matrix_equal
    }
}

fn compare(name: &str, k: usize, lhs: &Circuit, rhs: &Circuit) -> IdentityCheck {
    let per_qubit = |c: &Circuit, q: usize| -> Vec<Gate1> { c.iter().rev().map(|layer| layer[q]).collect() };
    let mut tableau_equal = true;
    let mut matrix_equal = true;
    for q in 0..k {
        let (a, b) = (per_qubit(lhs, q), per_qubit(rhs, q));
        tableau_equal &= Clifford1::from_word(&a) == Clifford1::from_word(&b);
        matrix_equal &= word_matrix(&a).mul(&word_matrix(&b).adjoint()).is_scalar_identity();
    }
    IdentityCheck {
        name: name.to_string(),
        tableau_equal,
        matrix_equal,
    }
}

/// The five layer identities used to trade addressable logical gates for
/// global ones, checked for a block of `k` logical qubits, subset `a` and
/// qubit `j`.
pub fn conversion_identities(k: usize, a: &[usize], j: usize) -> Result<Vec<IdentityCheck>, FtqcError> {
    if k == 0 || j >= k || a.iter().any(|&i| i >= k) {
        return Err(FtqcError::TooFewQubits {
            needed: a.iter().copied().chain([j]).max().unwrap_or(0) + 1,
            k,
        });
    }
    let on = |set: &dyn Fn(usize) -> bool, g: Gate1| -> Vec<Gate1> { (0..k).map(|i| if set(i) { g } else { Gate1::I }).collect() };
    let in_a = |i: usize| a.contains(&i);
    let not_a = |i: usize| !a.contains(&i);
    let all = |_: usize| true;
    let only_j = |i: usize| i == j;
    let minus_at_j: Vec<Gate1> = (0..k).map(|i| if i == j { Gate1::Sdg } else { Gate1::S }).collect();

    let mut out = Vec::new();
    out.push(compare(
        "H(A) = H(all) H(complement)",
        k,
        &vec![on(&in_a, Gate1::H)],
        &vec![on(&all, Gate1::H), on(&not_a, Gate1::H)],
    ));
    out.push(compare(
        "S(A) = S(all) Sdg(complement)",
        k,
        &vec![on(&in_a, Gate1::S)],
        &vec![on(&all, Gate1::S), on(&not_a, Gate1::Sdg)],
    ));
    out.push(compare(
        "H_j S_j H_j = H(all) S_j H(all)",
        k,
        &vec![on(&only_j, Gate1::H), on(&only_j, Gate1::S), on(&only_j, Gate1::H)],
        &vec![on(&all, Gate1::H), on(&only_j, Gate1::S), on(&all, Gate1::H)],
    ));
    out.push(compare(
        "H_j S_j H_j = Sdg(all) H_j S(minus at j)",
        k,
        &vec![on(&only_j, Gate1::H), on(&only_j, Gate1::S), on(&only_j, Gate1::H)],
        &vec![on(&all, Gate1::Sdg), on(&only_j, Gate1::H), minus_at_j.clone()],
    ));
    out.push(compare(
        "S_j = H(all) Sdg(all) H_j S(minus at j) H(all)",
        k,
        &vec![on(&only_j, Gate1::S)],
        &vec![
            on(&all, Gate1::H),
            on(&all, Gate1::Sdg),
            on(&only_j, Gate1::H),
            minus_at_j,
            on(&all, Gate1::H),
        ],
    ));
    Ok(out)
}

/// Whether a single-qubit word is the identity up to a global phase, by
/// tableau and by 2×2 matrix.
pub fn word_is_identity(word: &[Gate1]) -> (bool, bool) {
    (Clifford1::from_word(word).is_identity(), word_matrix(word).is_scalar_identity())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str, k: usize) -> MeasurementTarget {
        MeasurementTarget::parse(s, k).unwrap()
    }

    #[test]
    fn parsing() {
        assert_eq!(t("Zi Zj", 2), t("ZZ", 2));
        assert_eq!(t("X_i Z_j", 3), t("X1Z2", 3));
        assert_eq!(t("Y2", 2).to_string(), "Y2");
        assert_eq!(t("-Y1 X2", 2).sign(), -1);
        assert!(MeasurementTarget::parse("Zi Zi", 2).is_err());
        assert!(MeasurementTarget::parse("Z3", 2).is_err());
        assert!(MeasurementTarget::parse("II", 2).is_err());
    }

    #[test]
    fn spec_examples() {
        let c = convert_measurement(&t("Zi Zj", 2), &[Gate1::H]).unwrap();
        assert!(c.image.eq_up_to_sign(&t("Xi Xj", 2)));
        let c = convert_measurement(&t("Xi Zj", 2), &[Gate1::S]).unwrap();
        assert!(c.image.eq_up_to_sign(&t("Yi Zj", 2)));
        let p = t("Xi Yj", 2);
        assert_eq!(convert_measurement(&p, &[]).unwrap().image, p);
        assert_eq!(conversion_chain(&p, &p, 3), Some(vec![]));
        assert_eq!(conversion_chain(&t("Zi", 1), &t("Yi", 1), 2), Some(vec![Gate1::H, Gate1::S]));
        assert_eq!(conversion_chain(&t("Zi", 1), &t("Yi", 1), 1), None);
    }

    #[test]
    fn rendering() {
        let s = render_chain(&t("Zi Zj", 2), &[Gate1::H, Gate1::S]).unwrap();
        assert_eq!(s, "Z1 Z2 <-H-> X1 X2 <-S-> Y1 Y2");
    }

    #[test]
    fn identities_hold() {
        for check in conversion_identities(4, &[0, 2], 1).unwrap() {
            assert!(check.holds(), "{}", check.name);
        }
        assert_eq!(word_is_identity(&[Gate1::H, Gate1::S, Gate1::H, Gate1::S, Gate1::H, Gate1::S]), (true, true));
        assert_eq!(word_is_identity(&[Gate1::H, Gate1::S]), (false, false));
    }
}
