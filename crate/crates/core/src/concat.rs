//! Concatenated codes `Q_L ∘ … ∘ Q_1` built from self-dual CSS codes with
//! compatible bases, and transversality of logical gates at each level.
//!
//! `Q_1` is innermost and acts on physical qubits. A qubit at level `l` has
//! coordinates `(c_1, …, c_L)` with `c_i ∈ [k_i]` for `i ≤ l` and
//! `c_i ∈ [n_i]` for `i > l`. Flat indices are row-major with `c_L`
//! varying fastest. Level 0 is physical, level `L` holds the `K` logical
//! qubits of the whole code.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::basis::{build_compatible_basis, existence_check, verify_basis, BasisError, BasisFailure, ExistenceVerdict, SymplecticBasis};
use crate::code::{CodeError, SelfDualCssCode};
use crate::gf2::{BitMatrix, BitVector, EchelonBasis};
use crate::pauli::{conjugate_by_layer, Clifford1, Gate1, PauliOperator, TransversalLayer};
use crate::phase::{logical_phase_signs, preserves_stabilizers, synthesize_phase_layer, PhaseError, PhasePattern, Sign};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConcatError {
    #[error("no codes given")]
    Empty,
    #[error("level {level} has no compatible basis")]
    UnsupportedLevel { level: usize, verdict: ExistenceVerdict },
    #[error("level {level}: {source}")]
    Basis { level: usize, source: BasisError },
    #[error("level {level}: basis has {found} pairs of length {len}, code is [[{n},{k}]]")]
    BasisShape {
        level: usize,
        found: usize,
        len: usize,
        n: usize,
        k: usize,
    },
    #[error("level {level} out of range 0..={max}")]
    LevelOutOfRange { level: usize, max: usize },
    #[error("coordinate {value} at position {position} exceeds bound {bound}")]
    CoordOutOfRange { position: usize, value: usize, bound: usize },
    #[error("expected {expected} coordinate sets, found {found}")]
    CoordCount { expected: usize, found: usize },
    #[error("index shape not supported: {0}")]
    UnsupportedShape(String),
    #[error("expected {expected} signs, found {found}")]
    SignCount { expected: usize, found: usize },
    #[error("layer at level {level} cannot be re-expressed below it (block {block})")]
    CannotDescend { level: usize, block: usize },
    #[error("layer has {found} qubits, level {level} has {expected}")]
    LayerSize { level: usize, expected: usize, found: usize },
    #[error("qubit {qubit} at level {level} carries a Clifford outside the gate alphabet")]
    NotSingleGate { level: usize, qubit: usize },
    #[error("cannot combine CNOT layers with single-qubit layers")]
    IncompatibleKinds,
    #[error("no layers to merge")]
    EmptyProduct,
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcatLevel {
    pub code: SelfDualCssCode,
    pub basis: SymplecticBasis,
}

/// Fully materialized concatenated code.
#[derive(Debug, Clone)]
pub struct ConcatenatedCode {
    levels: Vec<ConcatLevel>,
    widths: Vec<usize>,
    x_stabilizers: Vec<BitVector>,
    z_stabilizers: Vec<BitVector>,
    logicals: Vec<(BitVector, BitVector)>,
    distance_lower_bound: Option<usize>,
}

/// Builds the code with a constructed compatible basis at every level.
pub fn concatenate(codes: &[SelfDualCssCode]) -> Result<ConcatenatedCode, ConcatError> {
    let mut levels = Vec::with_capacity(codes.len());
    for (i, code) in codes.iter().enumerate() {
        let verdict = existence_check(code);
        if !verdict.exists {
            return Err(ConcatError::UnsupportedLevel { level: i + 1, verdict });
        }
        let basis = build_compatible_basis(code).map_err(|source| ConcatError::Basis { level: i + 1, source })?;
        levels.push(ConcatLevel {
            code: code.clone(),
            basis,
        });
    }
    ConcatenatedCode::from_levels(levels)
}

/// Row-major bijection between `[N^{(l)}]` and level-`l` coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelIndexMap {
    level: usize,
    dims: Vec<usize>,
}

impl LevelIndexMap {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_flat(&self, coords: &[usize]) -> Result<usize, ConcatError> {
        if coords.len() != self.dims.len() {
            return Err(ConcatError::CoordCount {
                expected: self.dims.len(),
                found: coords.len(),
            });
        }
        let mut flat = 0;
        for (position, (&c, &d)) in coords.iter().zip(&self.dims).enumerate() {
            if c >= d {
                return Err(ConcatError::CoordOutOfRange {
                    position,
                    value: c,
                    bound: d,
                });
            }
            flat = flat * d + c;
        }
        Ok(flat)
    }

    pub fn to_coords(&self, flat: usize) -> Result<Vec<usize>, ConcatError> {
        if flat >= self.len() {
            return Err(ConcatError::CoordOutOfRange {
                position: 0,
                value: flat,
                bound: self.len(),
            });
        }
        let mut out = vec![0; self.dims.len()];
        let mut rest = flat;
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = rest % d;
            rest /= d;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Part {
    X,
    Z,
}

impl ConcatenatedCode {
    /// Builds the code from codes paired with bases of the caller's choice.
    /// Bases are not checked here; see [`verify_multilevel`].
    pub fn from_levels(levels: Vec<ConcatLevel>) -> Result<Self, ConcatError> {
        if levels.is_empty() {
            return Err(ConcatError::Empty);
        }
        for (i, lv) in levels.iter().enumerate() {
            if lv.basis.k() != lv.code.k() || lv.basis.n() != lv.code.n() {
                return Err(ConcatError::BasisShape {
                    level: i + 1,
                    found: lv.basis.k(),
                    len: lv.basis.n(),
                    n: lv.code.n(),
                    k: lv.code.k(),
                });
            }
        }
        let big_l = levels.len();
        let widths = (0..=big_l)
            .map(|l| {
                levels
                    .iter()
                    .enumerate()
                    .map(|(i, lv)| if i < l { lv.code.k() } else { lv.code.n() })
                    .product()
            })
            .collect();
        let distance_lower_bound = levels
            .iter()
            .map(|lv| lv.code.distance_label().or_else(|| lv.code.min_distance_bruteforce().ok()))
            .try_fold(1usize, |acc, d| d.map(|d| acc * d));
        let mut cc = Self {
            levels,
            widths,
            x_stabilizers: Vec::new(),
            z_stabilizers: Vec::new(),
            logicals: Vec::new(),
            distance_lower_bound,
        };
        cc.materialize();
        Ok(cc)
    }

    fn materialize(&mut self) {
        let big_l = self.levels.len();
        for l in 1..=big_l {
            let (outer, inner) = self.geometry(l);
            let n_l = self.levels[l - 1].code.n();
            let rows = self.levels[l - 1].code.check().rows().to_vec();
            for o in 0..outer {
                for rest in 0..inner {
                    for g in &rows {
                        let mut v = BitVector::zeros(self.widths[l - 1]);
                        for i in g.support() {
                            v.set(o * n_l * inner + i * inner + rest, true);
                        }
                        self.x_stabilizers.push(self.expand_to_physical(&v, l - 1, Part::X));
                        self.z_stabilizers.push(self.expand_to_physical(&v, l - 1, Part::Z));
                    }
                }
            }
        }
        let top = self.widths[big_l];
        self.logicals = (0..top)
            .map(|t| {
                let e = BitVector::unit(top, t);
                (
                    self.expand_to_physical(&e, big_l, Part::X),
                    self.expand_to_physical(&e, big_l, Part::Z),
                )
            })
            .collect();
    }

    /// `(outer, inner)` block geometry of `Q_l`: qubit `(o, i, rest)` at
    /// level `l-1` has flat index `o·n_l·inner + i·inner + rest`.
    fn geometry(&self, l: usize) -> (usize, usize) {
        let outer = self.levels[..l - 1].iter().map(|lv| lv.code.k()).product();
        let inner = self.levels[l..].iter().map(|lv| lv.code.n()).product();
        (outer, inner)
    }

    fn expand_once(&self, v: &BitVector, l: usize, part: Part) -> BitVector {
        let (_, inner) = self.geometry(l);
        let lv = &self.levels[l - 1];
        let (n_l, k_l) = (lv.code.n(), lv.code.k());
        let mut out = BitVector::zeros(self.widths[l - 1]);
        for f in v.support() {
            let o = f / (k_l * inner);
            let j = (f / inner) % k_l;
            let rest = f % inner;
            let ell = match part {
                Part::X => lv.basis.x(j),
                Part::Z => lv.basis.z(j),
            };
            for i in ell.support() {
                out.flip(o * n_l * inner + i * inner + rest);
            }
        }
        out
    }

    fn expand_to_physical(&self, v: &BitVector, from: usize, part: Part) -> BitVector {
        let mut cur = v.clone();
        for l in (1..=from).rev() {
            cur = self.expand_once(&cur, l, part);
        }
        cur
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[ConcatLevel] {
        &self.levels
    }

    /// Physical qubit count `N`.
    pub fn n(&self) -> usize {
        self.widths[0]
    }

    /// Logical qubit count `K`.
    pub fn k(&self) -> usize {
        self.widths[self.levels.len()]
    }

    /// `N^{(l)}` for `l = 0..=L`.
    pub fn level_widths(&self) -> &[usize] {
        &self.widths
    }

    /// Product of per-level distances; the true distance is at least this.
    pub fn distance_lower_bound(&self) -> Option<usize> {
        self.distance_lower_bound
    }

    pub fn x_stabilizers(&self) -> &[BitVector] {
        &self.x_stabilizers
    }

    pub fn z_stabilizers(&self) -> &[BitVector] {
        &self.z_stabilizers
    }

    /// Physical supports of the top-level pairs, indexed by flat top-level index.
    pub fn logical_pairs(&self) -> &[(BitVector, BitVector)] {
        &self.logicals
    }

    pub fn level_index_map(&self, level: usize) -> Result<LevelIndexMap, ConcatError> {
        if level > self.levels.len() {
            return Err(ConcatError::LevelOutOfRange {
                level,
                max: self.levels.len(),
            });
        }
        Ok(LevelIndexMap {
            level,
            dims: self
                .levels
                .iter()
                .enumerate()
                .map(|(i, lv)| if i < level { lv.code.k() } else { lv.code.n() })
                .collect(),
        })
    }

    /// Physical X or Z support of a vector of level-`level` qubits.
    pub fn expand_x(&self, v: &BitVector, level: usize) -> BitVector {
        self.expand_to_physical(v, level, Part::X)
    }

    pub fn expand_z(&self, v: &BitVector, level: usize) -> BitVector {
        self.expand_to_physical(v, level, Part::Z)
    }

    /// Membership in the stabilizer group of the whole code.
    pub fn stabilizer_contains(&self, p: &PauliOperator) -> bool {
        let sx = EchelonBasis::from_rows(self.n(), &self.x_stabilizers);
        let sz = EchelonBasis::from_rows(self.n(), &self.z_stabilizers);
        p.n() == self.n() && p.phase() == 0 && sx.contains(p.x()) && sz.contains(p.z())
    }

    /// The whole code as one self-dual CSS code with the lifted basis.
    /// Needs identical X and Z stabilizer patterns.
    pub fn flatten(&self) -> Result<(SelfDualCssCode, SymplecticBasis), ConcatError> {
        if self.x_stabilizers != self.z_stabilizers {
            return Err(ConcatError::UnsupportedShape(
                "X and Z stabilizer patterns differ; the code is not self-dual".into(),
            ));
        }
        let h = BitMatrix::from_rows(self.n(), self.x_stabilizers.clone()).map_err(CodeError::from)?;
        let reps =
            BitMatrix::from_rows(self.n(), self.logicals.iter().map(|(x, _)| x.clone()).collect()).map_err(CodeError::from)?;
        let code = SelfDualCssCode::from_check_matrix(&h, Some(&reps))?;
        Ok((code, SymplecticBasis::from_pairs(self.logicals.clone())))
    }

    fn check_level(&self, level: usize) -> Result<(), ConcatError> {
        if level > self.levels.len() {
            return Err(ConcatError::LevelOutOfRange {
                level,
                max: self.levels.len(),
            });
        }
        Ok(())
    }

    /// Re-expresses a level-`l` layer with level-`(l−1)` gates, block by block.
    fn descend(&self, layer: &TransversalLayer, l: usize, cache: &mut PhaseCache) -> Result<TransversalLayer, ConcatError> {
        let (outer, inner) = self.geometry(l);
        let lv = &self.levels[l - 1];
        let (n_l, k_l) = (lv.code.n(), lv.code.k());
        let hi = |o: usize, j: usize, rest: usize| o * k_l * inner + j * inner + rest;
        let lo = |o: usize, i: usize, rest: usize| o * n_l * inner + i * inner + rest;
        match layer {
            TransversalLayer::Cnot { mask } => {
                let mut out = BitVector::zeros(self.widths[l - 1]);
                for o in 0..outer {
                    for rest in 0..inner {
                        let set: Vec<bool> = (0..k_l).map(|j| mask.get(hi(o, j, rest))).collect();
                        if set.iter().all(|&b| b) {
                            for i in 0..n_l {
                                out.set(lo(o, i, rest), true);
                            }
                        } else if set.iter().any(|&b| b) {
                            return Err(ConcatError::CannotDescend {
                                level: l,
                                block: o * inner + rest,
                            });
                        }
                    }
                }
                Ok(TransversalLayer::Cnot { mask: out })
            }
            TransversalLayer::Single(gates) => {
                let mut out = vec![Gate1::I; self.widths[l - 1]];
                for o in 0..outer {
                    for rest in 0..inner {
                        let block: Vec<Gate1> = (0..k_l).map(|j| gates[hi(o, j, rest)]).collect();
                        let lowered = descend_block(lv, &block, l, cache).ok_or(ConcatError::CannotDescend {
                            level: l,
                            block: o * inner + rest,
                        })??;
                        for (i, g) in lowered.into_iter().enumerate() {
                            out[lo(o, i, rest)] = g;
                        }
                    }
                }
                Ok(TransversalLayer::Single(out))
            }
        }
    }

    /// Re-expresses a level-`(l−1)` layer with level-`l` gates, if every
    /// block acts as a logical layer.
    fn ascend(&self, layer: &TransversalLayer, l: usize) -> Option<TransversalLayer> {
        let (outer, inner) = self.geometry(l);
        let lv = &self.levels[l - 1];
        let (n_l, k_l) = (lv.code.n(), lv.code.k());
        let hi = |o: usize, j: usize, rest: usize| o * k_l * inner + j * inner + rest;
        let lo = |o: usize, i: usize, rest: usize| o * n_l * inner + i * inner + rest;
        match layer {
            TransversalLayer::Cnot { mask } => {
                let mut out = BitVector::zeros(self.widths[l]);
                for o in 0..outer {
                    for rest in 0..inner {
                        let set: Vec<bool> = (0..n_l).map(|i| mask.get(lo(o, i, rest))).collect();
                        if set.iter().all(|&b| b) {
                            for j in 0..k_l {
                                out.set(hi(o, j, rest), true);
                            }
                        } else if set.iter().any(|&b| b) {
                            return None;
                        }
                    }
                }
                Some(TransversalLayer::Cnot { mask: out })
            }
            TransversalLayer::Single(gates) => {
                let mut out = vec![Gate1::I; self.widths[l]];
                for o in 0..outer {
                    for rest in 0..inner {
                        let block: Vec<Gate1> = (0..n_l).map(|i| gates[lo(o, i, rest)]).collect();
                        let raised = ascend_block(lv, &block)?;
                        for (j, g) in raised.into_iter().enumerate() {
                            out[hi(o, j, rest)] = g;
                        }
                    }
                }
                Some(TransversalLayer::Single(out))
            }
        }
    }
}

type PhaseCache = HashMap<(usize, Vec<Sign>), PhasePattern>;

fn descend_block(
    lv: &ConcatLevel,
    block: &[Gate1],
    l: usize,
    cache: &mut PhaseCache,
) -> Option<Result<Vec<Gate1>, ConcatError>> {
    let n = lv.code.n();
    if block.iter().all(|g| *g == Gate1::I) {
        return Some(Ok(vec![Gate1::I; n]));
    }
    if block.iter().all(|g| *g == Gate1::H) {
        return Some(Ok(vec![Gate1::H; n]));
    }
    if block.iter().all(|g| matches!(g, Gate1::S | Gate1::Sdg)) {
        let target = PhasePattern(
            block
                .iter()
                .map(|g| if *g == Gate1::S { Sign::Plus } else { Sign::Minus })
                .collect(),
        );
        let key = (l, target.0.clone());
        if let Some(p) = cache.get(&key) {
            return Some(Ok(p.to_layer().gates().expect("single layer").to_vec()));
        }
        return Some(match synthesize_phase_layer(&lv.code, &lv.basis, &target) {
            Ok(p) => {
                let gates = p.to_layer().gates().expect("single layer").to_vec();
                cache.insert(key, p);
                Ok(gates)
            }
            Err(e) => Err(e.into()),
        });
    }
    if block.iter().all(|g| g.is_pauli()) {
        let mut x = BitVector::zeros(n);
        let mut z = BitVector::zeros(n);
        for (j, g) in block.iter().enumerate() {
            if matches!(g, Gate1::X | Gate1::Y) {
                x ^= lv.basis.x(j);
            }
            if matches!(g, Gate1::Z | Gate1::Y) {
                z ^= lv.basis.z(j);
            }
        }
        return Some(Ok(pauli_gates(&x, &z)));
    }
    None
}

fn ascend_block(lv: &ConcatLevel, block: &[Gate1]) -> Option<Vec<Gate1>> {
    let k = lv.code.k();
    if block.iter().all(|g| *g == Gate1::I) {
        return Some(vec![Gate1::I; k]);
    }
    if block.iter().all(|g| *g == Gate1::H) {
        return verify_basis(&lv.code, &lv.basis, true)
            .passed()
            .then(|| vec![Gate1::H; k]);
    }
    if block.iter().all(|g| matches!(g, Gate1::S | Gate1::Sdg)) {
        let pattern = PhasePattern(
            block
                .iter()
                .map(|g| if *g == Gate1::S { Sign::Plus } else { Sign::Minus })
                .collect(),
        );
        if !preserves_stabilizers(&lv.code, &pattern) {
            return None;
        }
        let signs = logical_phase_signs(&lv.code, &lv.basis, &pattern).ok()?;
        return Some(signs.signs().iter().map(|s| s.gate()).collect());
    }
    if block.iter().all(|g| g.is_pauli()) {
        let x = BitVector::from_bits(block.iter().map(|g| matches!(g, Gate1::X | Gate1::Y)));
        let z = BitVector::from_bits(block.iter().map(|g| matches!(g, Gate1::Z | Gate1::Y)));
        if !lv.code.in_code(&x) || !lv.code.in_code(&z) {
            return None;
        }
        let a = BitVector::from_bits((0..k).map(|j| x.dot(lv.basis.z(j)).unwrap_or(false)));
        let b = BitVector::from_bits((0..k).map(|j| z.dot(lv.basis.x(j)).unwrap_or(false)));
        return Some(pauli_gates(&a, &b));
    }
    None
}

fn pauli_gates(x: &BitVector, z: &BitVector) -> Vec<Gate1> {
    x.iter()
        .zip(z.iter())
        .map(|(a, b)| match (a, b) {
            (false, false) => Gate1::I,
            (true, false) => Gate1::X,
            (false, true) => Gate1::Z,
            (true, true) => Gate1::Y,
        })
        .collect()
}

/// Index set at one coordinate position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoordSet {
    One(usize),
    All,
    Subset(Vec<usize>),
}

impl CoordSet {
    fn expand(&self, bound: usize, position: usize) -> Result<Vec<usize>, ConcatError> {
        let items = match self {
            CoordSet::One(i) => vec![*i],
            CoordSet::All => (0..bound).collect(),
            CoordSet::Subset(s) => {
                let mut s = s.clone();
                s.sort_unstable();
                s.dedup();
                s
            }
        };
        if let Some(&bad) = items.iter().find(|&&i| i >= bound) {
            return Err(ConcatError::CoordOutOfRange {
                position,
                value: bad,
                bound,
            });
        }
        Ok(items)
    }

    /// `Some(true)` for the full range, `Some(false)` for one index.
    fn shape_class(&self, bound: usize) -> Option<bool> {
        match self {
            CoordSet::All => Some(true),
            CoordSet::One(_) => Some(bound == 1),
            CoordSet::Subset(s) => {
                let distinct: HashSet<_> = s.iter().collect();
                if distinct.len() == bound {
                    Some(true)
                } else if distinct.len() == 1 {
                    Some(false)
                } else {
                    None
                }
            }
        }
    }
}

/// The logical gate family to lift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LiftKind {
    Hadamard,
    /// One sign per targeted qubit, in row-major order of the index set.
    Phase(PhasePattern),
    PauliX,
    PauliY,
    PauliZ,
    Cnot,
}

/// A layer of gates acting on the `N^{(level)}` qubits of one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedLayer {
    pub level: usize,
    pub layer: TransversalLayer,
}

impl LiftedLayer {
    pub fn new(cc: &ConcatenatedCode, level: usize, layer: TransversalLayer) -> Result<Self, ConcatError> {
        cc.check_level(level)?;
        let width = cc.widths[level];
        let found = match &layer {
            TransversalLayer::Single(g) => g.len(),
            TransversalLayer::Cnot { mask } => mask.len(),
        };
        if found != width {
            return Err(ConcatError::LayerSize {
                level,
                expected: width,
                found,
            });
        }
        Ok(Self { level, layer })
    }

    pub fn is_physical(&self) -> bool {
        self.level == 0
    }
}

fn target_flats(cc: &ConcatenatedCode, level: usize, sets: &[CoordSet]) -> Result<Vec<usize>, ConcatError> {
    let map = cc.level_index_map(level)?;
    if sets.len() != map.dims.len() {
        return Err(ConcatError::CoordCount {
            expected: map.dims.len(),
            found: sets.len(),
        });
    }
    let axes = sets
        .iter()
        .zip(&map.dims)
        .enumerate()
        .map(|(p, (s, &d))| s.expand(d, p))
        .collect::<Result<Vec<_>, _>>()?;
    let mut flats = vec![0usize];
    for (axis, &d) in axes.iter().zip(&map.dims) {
        flats = flats
            .iter()
            .flat_map(|&f| axis.iter().map(move |&c| f * d + c))
            .collect();
    }
    Ok(flats)
}

/// Lowest level reachable for a Hadamard, phase or CNOT gate with the
/// given index shape: singletons, then full ranges up to `level`, then
/// singletons.
fn shape_floor(cc: &ConcatenatedCode, level: usize, sets: &[CoordSet]) -> Result<usize, ConcatError> {
    let map = cc.level_index_map(level)?;
    let classes: Vec<Option<bool>> = sets.iter().zip(&map.dims).map(|(s, &d)| s.shape_class(d)).collect();
    if let Some(p) = classes.iter().position(|c| c.is_none()) {
        return Err(ConcatError::UnsupportedShape(format!(
            "position {} is neither a single index nor the full range",
            p + 1
        )));
    }
    let full: Vec<bool> = classes.into_iter().map(|c| c.expect("checked above")).collect();
    if let Some(p) = (level..full.len()).find(|&p| full[p] && map.dims[p] > 1) {
        return Err(ConcatError::UnsupportedShape(format!(
            "position {} above level {level} must be a single index",
            p + 1
        )));
    }
    let m = (0..level).rev().take_while(|&p| full[p]).count();
    let m = level - m;
    if let Some(p) = (0..m).find(|&p| full[p] && map.dims[p] > 1) {
        return Err(ConcatError::UnsupportedShape(format!(
            "full range at position {} must be followed by full ranges up to level {level}",
            p + 1
        )));
    }
    Ok(m)
}

/// Re-expresses a gate on level-`level` qubits with gates at the lowest
/// level its index shape allows (level 0 for Pauli gates).
pub fn lift_transversal(
    cc: &ConcatenatedCode,
    kind: &LiftKind,
    level: usize,
    sets: &[CoordSet],
) -> Result<LiftedLayer, ConcatError> {
    cc.check_level(level)?;
    let targets = target_flats(cc, level, sets)?;
    let width = cc.widths[level];
    let floor = match kind {
        LiftKind::PauliX | LiftKind::PauliY | LiftKind::PauliZ => 0,
        _ => shape_floor(cc, level, sets)?,
    };
    let mut layer = match kind {
        LiftKind::Cnot => TransversalLayer::Cnot {
            mask: BitVector::from_support(width, targets.iter().copied()),
        },
        LiftKind::Phase(signs) => {
            if signs.len() != targets.len() {
                return Err(ConcatError::SignCount {
                    expected: targets.len(),
                    found: signs.len(),
                });
            }
            let mut g = vec![Gate1::I; width];
            for (&t, s) in targets.iter().zip(signs.signs()) {
                g[t] = s.gate();
            }
            TransversalLayer::Single(g)
        }
        other => {
            let gate = match other {
                LiftKind::Hadamard => Gate1::H,
                LiftKind::PauliX => Gate1::X,
                LiftKind::PauliY => Gate1::Y,
                _ => Gate1::Z,
            };
            let mut g = vec![Gate1::I; width];
            for &t in &targets {
                g[t] = gate;
            }
            TransversalLayer::Single(g)
        }
    };
    let mut cache = PhaseCache::new();
    for l in (floor + 1..=level).rev() {
        layer = cc.descend(&layer, l, &mut cache)?;
    }
    Ok(LiftedLayer { level: floor, layer })
}

/// Result of merging a product of layers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeOutcome {
    /// The product expressed at the lowest level found.
    pub layer: LiftedLayer,
    pub lowest_level: usize,
    pub highest_level: usize,
}

impl MergeOutcome {
    pub fn transversal_levels(&self) -> std::ops::RangeInclusive<usize> {
        self.lowest_level..=self.highest_level
    }
}

/// Multiplies layers given in operator-product order (the last one acts
/// first) and finds the levels at which the product is transversal.
pub fn merge_product(cc: &ConcatenatedCode, gates: &[LiftedLayer]) -> Result<MergeOutcome, ConcatError> {
    let common = gates.iter().map(|g| g.level).min().ok_or(ConcatError::EmptyProduct)?;
    let mut cache = PhaseCache::new();
    let mut lowered = Vec::with_capacity(gates.len());
    for g in gates {
        cc.check_level(g.level)?;
        let mut layer = g.layer.clone();
        for l in (common + 1..=g.level).rev() {
            layer = cc.descend(&layer, l, &mut cache)?;
        }
        lowered.push(layer);
    }
    let width = cc.widths[common];
    let product = if lowered.iter().all(|l| matches!(l, TransversalLayer::Cnot { .. })) {
        let mut mask = BitVector::zeros(width);
        for l in &lowered {
            if let TransversalLayer::Cnot { mask: m } = l {
                mask ^= m;
            }
        }
        TransversalLayer::Cnot { mask }
    } else if lowered.iter().all(|l| matches!(l, TransversalLayer::Single(_))) {
        let mut per_qubit = vec![Clifford1::IDENTITY; width];
        for l in lowered.iter().rev() {
            let gates = l.gates().expect("single layer");
            for (acc, &g) in per_qubit.iter_mut().zip(gates) {
                *acc = acc.then(Clifford1::from_gate(g));
            }
        }
        TransversalLayer::Single(
            per_qubit
                .iter()
                .enumerate()
                .map(|(qubit, c)| {
                    c.as_gate().ok_or(ConcatError::NotSingleGate {
                        level: common,
                        qubit,
                    })
                })
                .collect::<Result<_, _>>()?,
        )
    } else {
        return Err(ConcatError::IncompatibleKinds);
    };

    let mut highest = common;
    let mut up = product.clone();
    while highest < cc.depth() {
        match cc.ascend(&up, highest + 1) {
            Some(next) => {
                up = next;
                highest += 1;
            }
            None => break,
        }
    }
    let mut lowest = common;
    let mut down = product;
    while lowest > 0 {
        match cc.descend(&down, lowest, &mut cache) {
            Ok(next) => {
                down = next;
                lowest -= 1;
            }
            Err(_) => break,
        }
    }
    Ok(MergeOutcome {
        layer: LiftedLayer {
            level: lowest,
            layer: down,
        },
        lowest_level: lowest,
        highest_level: highest,
    })
}

/// One failed multilevel property.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MultilevelFailure {
    /// A level's own basis check failed; `level` is one-based.
    Level { level: usize, failure: BasisFailure },
    LogicalRelation { x_pair: usize, z_pair: usize },
    StabilizersAnticommute { x_row: usize, z_row: usize },
    HadamardLogical { pair: usize },
    HadamardStabilizer { row: usize },
    PhaseSynthesis { pattern: String, error: String },
    PhaseLogical { pattern: String, pair: usize },
    PhaseStabilizer { pattern: String, row: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultilevelReport {
    pub n: usize,
    pub k: usize,
    pub patterns_checked: usize,
    pub exhaustive: bool,
    pub failures: Vec<MultilevelFailure>,
}

impl MultilevelReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// One-based levels whose own basis check failed.
    pub fn failing_levels(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .failures
            .iter()
            .filter_map(|f| match f {
                MultilevelFailure::Level { level, .. } => Some(*level),
                _ => None,
            })
            .collect();
        v.dedup();
        v
    }
}

/// Checks every level's basis, the physical all-H swap of all top-level
/// pairs, and physical S/S† layers for `samples` sign patterns (all of them
/// when `samples ≥ 2^K`, otherwise patterns drawn with `seed`).
pub fn verify_multilevel(cc: &ConcatenatedCode, samples: usize, seed: u64) -> MultilevelReport {
    let mut failures = Vec::new();
    for (i, lv) in cc.levels.iter().enumerate() {
        for f in verify_basis(&lv.code, &lv.basis, true).failures {
            failures.push(MultilevelFailure::Level {
                level: i + 1,
                failure: f,
            });
        }
    }

    let n = cc.n();
    let k = cc.k();
    let xs = &cc.x_stabilizers;
    let zs = &cc.z_stabilizers;
    for (a, gx) in xs.iter().enumerate() {
        for (b, gz) in zs.iter().enumerate() {
            if gx.dot(gz).unwrap_or(true) {
                failures.push(MultilevelFailure::StabilizersAnticommute { x_row: a, z_row: b });
            }
        }
    }
    for (j, (x, _)) in cc.logicals.iter().enumerate() {
        for (jp, (_, z)) in cc.logicals.iter().enumerate() {
            if x.dot(z).unwrap_or(false) != (j == jp) {
                failures.push(MultilevelFailure::LogicalRelation { x_pair: j, z_pair: jp });
            }
        }
    }

    let all_h = TransversalLayer::uniform(n, Gate1::H);
    for (j, (x, z)) in cc.logicals.iter().enumerate() {
        let xi = conjugate_by_layer(&PauliOperator::x_type(x.clone()), &all_h).expect("length N");
        let zi = conjugate_by_layer(&PauliOperator::z_type(z.clone()), &all_h).expect("length N");
        if xi != PauliOperator::z_type(z.clone()) || zi != PauliOperator::x_type(x.clone()) {
            failures.push(MultilevelFailure::HadamardLogical { pair: j });
        }
    }
    for (row, (gx, gz)) in xs.iter().zip(zs).enumerate() {
        let a = conjugate_by_layer(&PauliOperator::x_type(gx.clone()), &all_h).expect("length N");
        let b = conjugate_by_layer(&PauliOperator::z_type(gz.clone()), &all_h).expect("length N");
        if !cc.stabilizer_contains(&a) || !cc.stabilizer_contains(&b) {
            failures.push(MultilevelFailure::HadamardStabilizer { row });
        }
    }

    let exhaustive = k < 63 && (samples as u128) >= (1u128 << k);
    let patterns: Vec<PhasePattern> = if exhaustive {
        (0..(1u64 << k)).map(|i| PhasePattern::from_index(k, i)).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples)
            .map(|_| PhasePattern((0..k).map(|_| if rng.random_bool(0.5) { Sign::Minus } else { Sign::Plus }).collect()))
            .collect()
    };
    let top_sets = vec![CoordSet::All; cc.depth()];
    for pattern in &patterns {
        let label = pattern.compact();
        let lifted = match lift_transversal(cc, &LiftKind::Phase(pattern.clone()), cc.depth(), &top_sets) {
            Ok(l) => l,
            Err(e) => {
                failures.push(MultilevelFailure::PhaseSynthesis {
                    pattern: label,
                    error: e.to_string(),
                });
                continue;
            }
        };
        for (j, (x, z)) in cc.logicals.iter().enumerate() {
            let xj = PauliOperator::x_type(x.clone());
            let zj = PauliOperator::z_type(z.clone());
            let xz = xj.multiply(&zj).expect("length N");
            let shift = if pattern.signs()[j] == Sign::Plus { 1 } else { 3 };
            let phase = xz.phase() + shift;
            let want = xz.with_phase(phase);
            let ximg = conjugate_by_layer(&xj, &lifted.layer).expect("length N");
            let zimg = conjugate_by_layer(&zj, &lifted.layer).expect("length N");
            if ximg != want || zimg != zj {
                failures.push(MultilevelFailure::PhaseLogical {
                    pattern: label.clone(),
                    pair: j,
                });
            }
        }
        for (row, (gx, gz)) in xs.iter().zip(zs).enumerate() {
            let a = conjugate_by_layer(&PauliOperator::x_type(gx.clone()), &lifted.layer).expect("length N");
            let b = conjugate_by_layer(&PauliOperator::z_type(gz.clone()), &lifted.layer).expect("length N");
            if !cc.stabilizer_contains(&a) || !cc.stabilizer_contains(&b) {
                failures.push(MultilevelFailure::PhaseStabilizer {
                    pattern: label.clone(),
                    row,
                });
            }
        }
    }

    MultilevelReport {
        n,
        k,
        patterns_checked: patterns.len(),
        exhaustive,
        failures,
    }
}
