mod common;

use std::time::{Duration, Instant};

use sdcss::basis::{build_compatible_basis, existence_check, verify_basis, SymplecticBasis};
use sdcss::code::{builtin, hamming_code, SelfDualCssCode, CATALOG_NAMES};
use sdcss::concat::{concatenate, lift_transversal, merge_product, verify_multilevel, CoordSet, LiftKind, LiftedLayer};
use sdcss::ftqc::{ancilla_classes, convert_measurement, MeasurementTarget};
use sdcss::pauli::dense::{dense_oracle_conjugate, word_matrix};
use sdcss::pauli::symplectic::{full_clifford_generators, symplectic_closure, BetweenBlockSet, InBlockSet};
use sdcss::pauli::{Clifford1, Gate1, PauliOperator, TransversalLayer};
use sdcss::phase::{logical_phase_signs, synthesize_phase_layer, verify_phase_layer, PhasePattern, Sign};

const SEED: u64 = 0x5eed;
const ORACLE_CASES: usize = 200;
const MAX_ORACLE_QUBITS: usize = 7;
const CONCAT_SAMPLES: usize = 32;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn code(name: &str) -> SelfDualCssCode {
    builtin(name).unwrap().code
}

fn yes_codes() -> Vec<SelfDualCssCode> {
    let mut v = vec![code("c622"), code("steane7"), code("qhamming15")];
    v.extend((3..=6).map(|m| hamming_code(m).unwrap()));
    v
}

fn name(c: &SelfDualCssCode) -> String {
    c.name().map(str::to_string).unwrap_or_else(|| format!("[[{},{}]]", c.n(), c.k()))
}

fn orthogonal_to_rows(c: &SelfDualCssCode, v: &sdcss::gf2::BitVector) -> bool {
    c.check().rows().iter().all(|g| g.overlap(v).unwrap() % 2 == 0)
}

fn existence() -> Result<String, String> {
    let c422 = code("c422");
    ensure(!existence_check(&c422).exists, || "c422 reported as supported".into())?;
    ensure(existence_check(&c422).witness.is_none(), || "c422 carries a witness".into())?;
    let codes = yes_codes();
    for c in &codes {
        let v = existence_check(c);
        let w = v.witness.ok_or_else(|| format!("{} has no witness", name(c)))?;
        ensure(v.exists && w.weight() % 2 == 1, || format!("{}: witness·witness != 1", name(c)))?;
        ensure(orthogonal_to_rows(c, &w), || format!("{}: witness not in D", name(c)))?;
        ensure(!c.in_dual(&w), || format!("{}: witness lies in the dual", name(c)))?;
    }
    Ok(format!("1 no, {} yes", codes.len()))
}

fn symplectic_by_dots(c: &SelfDualCssCode, b: &SymplecticBasis) -> bool {
    (0..b.k()).all(|j| {
        (0..b.k()).all(|jp| (b.x(j).overlap(b.z(jp)).unwrap() % 2 == 1) == (j == jp))
            && orthogonal_to_rows(c, b.x(j))
            && orthogonal_to_rows(c, b.z(j))
    })
}

fn basis_construction() -> Result<String, String> {
    for c in yes_codes() {
        let b = build_compatible_basis(&c).map_err(|e| format!("{}: {e}", name(&c)))?;
        let report = verify_basis(&c, &b, true);
        ensure(report.passed(), || format!("{}: {:?}", name(&c), report.failures))?;
        ensure(symplectic_by_dots(&c, &b), || format!("{}: symplectic relations fail", name(&c)))?;
        for j in 0..b.k() {
            let all_h = TransversalLayer::uniform(c.n(), Gate1::H);
            let img = all_h.conjugate(&b.logical_x(j)).unwrap();
            ensure(img == PauliOperator::z_type(b.z(j).clone()) && img.phase() == 0, || {
                format!("{}: pair {} not swapped exactly", name(&c), j + 1)
            })?;
        }
    }
    let entry = builtin("qhamming15").unwrap();
    let q15 = entry.code;
    let reference = entry.reference_basis.unwrap();
    let r = verify_basis(&q15, &reference, true);
    ensure(r.passed(), || format!("reference basis fails: {:?}", r.failures))?;
    let gauge = verify_basis(&q15, &entry.gauge_basis.unwrap(), true);
    let swaps: Vec<(usize, usize)> = gauge.hadamard_swaps().into_iter().map(|(a, b)| (a + 1, b + 1)).collect();
    ensure(swaps == [(1, 2), (3, 4), (5, 6)], || format!("gauge swaps {swaps:?}"))?;
    ensure(gauge.failures.len() == gauge.hadamard_violations(), || {
        format!("gauge basis has non-Hadamard failures: {:?}", gauge.failures)
    })?;
    Ok(format!("gauge swaps {swaps:?}"))
}

fn phase_synthesis() -> Result<String, String> {
    let entry = builtin("qhamming15").unwrap();
    let (c, b) = (entry.code, entry.reference_basis.unwrap());
    let all_s = PhasePattern::uniform(15, Sign::Plus);
    let signs = logical_phase_signs(&c, &b, &all_s).map_err(|e| e.to_string())?;
    ensure(signs.compact() == "--++--+", || format!("all-S signs {}", signs.compact()))?;
    let plus = PhasePattern::uniform(7, Sign::Plus);
    let layer = synthesize_phase_layer(&c, &b, &plus).map_err(|e| e.to_string())?;
    let minus: Vec<usize> = layer.minus_positions().iter().map(|i| i + 1).collect();
    ensure(minus == [3, 6, 9, 12], || format!("S† on {minus:?}"))?;
    let report = verify_phase_layer(&c, &b, &layer, &plus).map_err(|e| e.to_string())?;
    ensure(report.passed(), || format!("{:?}", report.failures))?;
    Ok(format!("signs {}, S† on {minus:?}", signs.compact()))
}

fn oracle_equivalence() -> Result<String, String> {
    let cases = common::random_conjugation_cases(SEED, ORACLE_CASES, MAX_ORACLE_QUBITS);
    let mut mismatches = 0;
    for (p, layer) in &cases {
        let dense = dense_oracle_conjugate(p, layer).map_err(|e| e.to_string())?;
        if layer.conjugate(p).map_err(|e| e.to_string())? != dense {
            mismatches += 1;
        }
    }
    ensure(mismatches == 0, || format!("{mismatches} mismatches"))?;
    Ok(format!("{} cases, 0 mismatches", cases.len()))
}

fn odd_codeword_rep() -> Result<String, String> {
    let mut checked = 0;
    for n in CATALOG_NAMES {
        let c = code(n);
        if c.r() + c.k() > 20 {
            continue;
        }
        let (any_odd, rep_odd) = common::odd_weight_by_enumeration(&c);
        ensure(any_odd == rep_odd, || format!("{n}: enumeration {any_odd}, reps {rep_odd}"))?;
        ensure(existence_check(&c).exists == any_odd, || format!("{n}: verdict disagrees"))?;
        checked += 1;
    }
    Ok(format!("{checked} catalog codes"))
}

fn concatenation() -> Result<String, String> {
    let small = concatenate(&[code("c622"), code("c622")]).map_err(|e| e.to_string())?;
    ensure(small.n() == 36 && small.k() == 4, || "[c622, c622] parameters".into())?;
    let r = verify_multilevel(&small, 16, SEED);
    ensure(r.exhaustive && r.patterns_checked == 16, || "not exhaustive".into())?;
    ensure(r.passed(), || format!("[c622, c622]: {:?}", r.failures))?;
    let big = concatenate(&[code("qhamming15"), code("c622")]).map_err(|e| e.to_string())?;
    ensure(big.n() == 90 && big.k() == 14, || format!("N = {}, K = {}", big.n(), big.k()))?;
    let r = verify_multilevel(&big, CONCAT_SAMPLES, SEED);
    ensure(r.patterns_checked >= 32, || "too few samples".into())?;
    ensure(r.passed(), || format!("[qhamming15, c622]: {:?}", r.failures))?;
    Ok(format!("N=36 16/16 patterns; N=90 K=14 {} patterns", r.patterns_checked))
}

fn merge_and_identity() -> Result<String, String> {
    let cc = concatenate(&[code("qhamming15"), code("c622")]).map_err(|e| e.to_string())?;
    let j1 = 0;
    let u1 = lift_transversal(&cc, &LiftKind::Hadamard, 2, &[CoordSet::One(j1), CoordSet::All]).map_err(|e| e.to_string())?;
    let map = cc.level_index_map(1).map_err(|e| e.to_string())?;
    let gates = (0..map.len())
        .map(|f| if map.to_coords(f).unwrap()[0] == j1 { Gate1::I } else { Gate1::H })
        .collect();
    let u2 = LiftedLayer::new(&cc, 1, TransversalLayer::Single(gates)).map_err(|e| e.to_string())?;
    let merged = merge_product(&cc, &[u1, u2]).map_err(|e| e.to_string())?;
    ensure(merged.lowest_level == 0, || format!("lowest level {}", merged.lowest_level))?;
    ensure(merged.layer.layer == TransversalLayer::uniform(90, Gate1::H), || "not the all-H layer".into())?;
    for (x, z) in cc.logical_pairs() {
        let img = merged.layer.layer.conjugate(&PauliOperator::x_type(x.clone())).unwrap();
        ensure(img == PauliOperator::z_type(z.clone()), || "physical layer is not logical all-H".into())?;
    }
    let word = [Gate1::H, Gate1::S, Gate1::H, Gate1::S, Gate1::H, Gate1::S];
    ensure(word_matrix(&word).is_scalar_identity(), || "HSHSHS matrix is not scalar".into())?;
    ensure(Clifford1::from_word(&word).is_identity(), || "HSHSHS tableau is not identity".into())?;
    Ok(format!("merged at levels {}..={}", merged.lowest_level, merged.highest_level))
}

fn chains() -> Result<String, String> {
    let t = |s: &str, k: usize| MeasurementTarget::parse(s, k).map_err(|e| e.to_string());
    let printed: [(&str, usize, Vec<(&str, Gate1)>); 3] = [
        ("Zi Zj", 2, vec![("Xi Xj", Gate1::H), ("Yi Yj", Gate1::S)]),
        ("Zi Zj Zl", 3, vec![("Xi Xj Xl", Gate1::H), ("Yi Yj Yl", Gate1::S)]),
        (
            "Xi Zj",
            2,
            vec![
                ("Yi Zj", Gate1::S),
                ("Yi Xj", Gate1::H),
                ("Xi Yj", Gate1::S),
                ("Zi Yj", Gate1::H),
                ("Zi Xj", Gate1::S),
            ],
        ),
    ];
    let mut links = 0;
    for (start, k, steps) in printed {
        let mut cur = t(start, k)?;
        for (next, g) in steps {
            let want = t(next, k)?;
            let got = convert_measurement(&cur, &[g]).map_err(|e| e.to_string())?.image;
            ensure(got.eq_up_to_sign(&want), || format!("{cur} -{g}-> {got}, expected {want}"))?;
            let dense = dense_oracle_conjugate(cur.operator(), &TransversalLayer::uniform(k, g)).map_err(|e| e.to_string())?;
            ensure(dense.eq_up_to_sign(want.operator()), || format!("dense oracle disagrees on {cur} -{g}->"))?;
            links += 1;
            cur = got;
        }
    }
    let singles = [t("Xi", 1)?, t("Yi", 1)?, t("Zi", 1)?];
    ensure(ancilla_classes(&singles, 4) == vec![vec![0, 1, 2]], || "single-qubit targets split".into())?;
    let pairs = [t("Xi Xj", 2)?, t("Yi Yj", 2)?, t("Zi Zj", 2)?];
    ensure(ancilla_classes(&pairs, 4) == vec![vec![0, 1, 2]], || "two-qubit targets split".into())?;
    Ok(format!("{links} links, both target sets form one class"))
}

fn closure() -> Result<String, String> {
    let gens = full_clifford_generators(1, 2, InBlockSet::HadamardCnot, BetweenBlockSet::Cnot);
    let order = symplectic_closure(&gens, None).map_err(|e| e.to_string())?;
    let full = common::sp4_by_enumeration();
    ensure(order == 720 && full == 720, || format!("closure {order}, enumeration {full}"))?;
    Ok(format!("closure {order} = enumeration {full}"))
}

fn distances() -> Result<String, String> {
    let mut got = Vec::new();
    for (n, want) in [("c422", 2), ("c622", 2), ("steane7", 3), ("qhamming15", 3)] {
        let c = code(n);
        let d = c.min_distance_bruteforce().map_err(|e| e.to_string())?;
        let oracle = common::distance_by_enumeration(&c);
        ensure(d == want && oracle == want, || format!("{n}: {d} (oracle {oracle}), expected {want}"))?;
        got.push(d);
    }
    Ok(format!("{got:?}"))
}

fn main() {
    let criteria: [(u32, &str, Option<Duration>, Check); 10] = [
        (1, "existence decisions", Some(Duration::from_secs(1)), existence),
        (2, "compatible basis construction", None, basis_construction),
        (3, "phase synthesis on [[15,7,3]]", None, phase_synthesis),
        (4, "dense oracle equivalence", Some(Duration::from_secs(30)), oracle_equivalence),
        (5, "odd codeword iff odd coset rep", None, odd_codeword_rep),
        (6, "multilevel transversality", Some(Duration::from_secs(60)), concatenation),
        (7, "product merge and HSHSHS", None, merge_and_identity),
        (8, "measurement conversion chains", None, chains),
        (9, "Clifford closure order", Some(Duration::from_secs(10)), closure),
        (10, "brute-force distances", None, distances),
    ];
    let mut failed = 0;
    for (id, title, limit, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if elapsed > l => Err(format!("took {elapsed:.2?}, limit {l:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS {id:>2} {title}: {detail} ({elapsed:.2?})"),
            Err(why) => {
                failed += 1;
                println!("FAIL {id:>2} {title}: {why} ({elapsed:.2?})");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
