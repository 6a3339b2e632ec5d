use sdcss::basis::{build_compatible_basis, SymplecticBasis};
use sdcss::code::builtin;
use sdcss::concat::*;
use sdcss::gf2::BitVector;
use sdcss::pauli::{conjugate_by_transversal_cnot, Gate1, PauliOperator, TransversalLayer};
use sdcss::phase::{PhasePattern, Sign};

fn code(name: &str) -> sdcss::code::SelfDualCssCode {
    builtin(name).unwrap().code
}

fn bits(s: &str) -> BitVector {
    s.parse().unwrap()
}

#[test]
fn c622_squared_exhaustive() {
    let cc = concatenate(&[code("c622"), code("c622")]).unwrap();
    let report = verify_multilevel(&cc, 16, 1);
    assert!(report.exhaustive);
    assert_eq!(report.patterns_checked, 16);
    assert!(report.passed(), "{:?}", report.failures);
}

#[test]
fn hamming15_over_c622_sampled() {
    let cc = concatenate(&[code("qhamming15"), code("c622")]).unwrap();
    let report = verify_multilevel(&cc, 32, 7);
    assert!(!report.exhaustive);
    assert_eq!((report.n, report.k, report.patterns_checked), (90, 14, 32));
    assert!(report.passed(), "{:?}", report.failures);
}

#[test]
fn corrupted_level_is_located() {
    let inner = code("c622");
    let good = build_compatible_basis(&inner).unwrap();
    let outer = code("c622");
    // valid symplectic pairs, but X and Z supports differ
    let bad = SymplecticBasis::from_pairs(vec![
        (bits("101010"), bits("011001")),
        (bits("010101"), bits("010101")),
    ]);
    let cc = ConcatenatedCode::from_levels(vec![
        ConcatLevel {
            code: inner,
            basis: good,
        },
        ConcatLevel {
            code: outer,
            basis: bad,
        },
    ])
    .unwrap();
    let report = verify_multilevel(&cc, 16, 0);
    assert!(!report.passed());
    assert_eq!(report.failing_levels(), vec![2]);
}

#[test]
fn fig4_product_reaches_physical_all_h() {
    let cc = concatenate(&[code("qhamming15"), code("c622")]).unwrap();
    let j1 = 2;
    let u1 = lift_transversal(&cc, &LiftKind::Hadamard, 2, &[CoordSet::One(j1), CoordSet::All]).unwrap();
    assert_eq!(u1.level, 1);
    let map = cc.level_index_map(1).unwrap();
    let gates = (0..map.len())
        .map(|f| if map.to_coords(f).unwrap()[0] != j1 { Gate1::H } else { Gate1::I })
        .collect();
    let u2 = LiftedLayer::new(&cc, 1, TransversalLayer::Single(gates)).unwrap();
    let merged = merge_product(&cc, &[u1, u2]).unwrap();
    assert_eq!(merged.lowest_level, 0);
    assert_eq!(merged.highest_level, 2);
    assert_eq!(merged.layer.layer, TransversalLayer::uniform(90, Gate1::H));
}

#[test]
fn disjoint_union_and_inverse() {
    let cc = concatenate(&[code("qhamming15"), code("c622")]).unwrap();
    let a = lift_transversal(&cc, &LiftKind::Hadamard, 2, &[CoordSet::One(0), CoordSet::All]).unwrap();
    let b = lift_transversal(&cc, &LiftKind::Hadamard, 2, &[CoordSet::One(1), CoordSet::All]).unwrap();
    let merged = merge_product(&cc, &[a.clone(), b.clone()]).unwrap();
    assert_eq!(merged.lowest_level, 1);
    let g = merged.layer.layer.gates().unwrap();
    let ga = a.layer.gates().unwrap();
    let gb = b.layer.gates().unwrap();
    for i in 0..g.len() {
        let want = if ga[i] == Gate1::H || gb[i] == Gate1::H { Gate1::H } else { Gate1::I };
        assert_eq!(g[i], want);
    }

    let signs = PhasePattern((0..14).map(|i| if i % 3 == 0 { Sign::Minus } else { Sign::Plus }).collect());
    let s = lift_transversal(&cc, &LiftKind::Phase(signs.clone()), 2, &[CoordSet::All, CoordSet::All]).unwrap();
    let sinv = lift_transversal(
        &cc,
        &LiftKind::Phase(PhasePattern(signs.signs().iter().map(|s| s.flip()).collect())),
        2,
        &[CoordSet::All, CoordSet::All],
    )
    .unwrap();
    let id = merge_product(&cc, &[s, sinv]).unwrap();
    assert_eq!(id.lowest_level, 0);
    assert_eq!(id.highest_level, 2);
    assert_eq!(id.layer.layer, TransversalLayer::uniform(90, Gate1::I));
}

#[test]
fn partial_phase_lift_is_logical() {
    let cc = concatenate(&[code("c622"), code("c622")]).unwrap();
    let signs = PhasePattern(vec![Sign::Plus, Sign::Minus]);
    let lifted = lift_transversal(&cc, &LiftKind::Phase(signs), 2, &[CoordSet::One(1), CoordSet::All]).unwrap();
    assert_eq!(lifted.level, 1);
    let merged = merge_product(&cc, &[lifted]).unwrap();
    assert_eq!((merged.lowest_level, merged.highest_level), (1, 2));
}

#[test]
fn physical_cnot_lift() {
    let cc = concatenate(&[code("c622"), code("c622")]).unwrap();
    let lifted = lift_transversal(&cc, &LiftKind::Cnot, 2, &[CoordSet::All, CoordSet::All]).unwrap();
    assert_eq!(lifted.level, 0);
    let TransversalLayer::Cnot { mask } = &lifted.layer else { panic!("expected a CNOT layer") };
    assert_eq!(mask.weight(), 36);
    let zero = BitVector::zeros(36);
    for (x, z) in cc.logical_pairs() {
        let xc = PauliOperator::x_type(x.concat(&zero));
        let img = conjugate_by_transversal_cnot(&xc).unwrap();
        assert_eq!(img, PauliOperator::x_type(x.concat(x)));
        let zt = PauliOperator::z_type(zero.concat(z));
        let img = conjugate_by_transversal_cnot(&zt).unwrap();
        assert_eq!(img, PauliOperator::z_type(z.concat(z)));
    }
}

fn random_supported(seed: u64, n: usize) -> Option<sdcss::code::SelfDualCssCode> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let h = sdcss::code::random_self_orthogonal(n, n, &mut rng);
    let code = sdcss::code::SelfDualCssCode::from_check_matrix(&h, None).ok()?;
    sdcss::basis::existence_check(&code).exists.then_some(code)
}

proptest::proptest! {
    #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]

    #[test]
    fn random_two_level_codes(a in 0u64..10_000, b in 0u64..10_000, na in 3usize..=8, nb in 3usize..=8) {
        let (Some(inner), Some(outer)) = (random_supported(a, na), random_supported(b, nb)) else { return Ok(()) };
        let cc = concatenate(&[inner, outer]).unwrap();
        proptest::prop_assert!(cc.n() <= 64);
        for (x, z) in cc.logical_pairs() {
            proptest::prop_assert_eq!(x, z);
        }
        let report = verify_multilevel(&cc, 16, a ^ b);
        proptest::prop_assert!(report.passed(), "{:?}", report.failures);
    }
}
