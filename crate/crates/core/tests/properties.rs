use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sdcss::basis::*;
use sdcss::code::{random_self_orthogonal, SelfDualCssCode};
use sdcss::formats::{parse_basis_file, parse_code_file, write_basis_file, write_code_file};
use sdcss::gf2::*;
use sdcss::pauli::{conjugate_by_layer, Gate1, PauliOperator, TransversalLayer};
use sdcss::phase::*;

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = BitMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(any::<bool>(), c), r)
            .prop_map(move |rows| BitMatrix::from_rows(c, rows.into_iter().map(BitVector::from_bits).collect()).unwrap())
    })
}

fn bits(n: usize) -> impl Strategy<Value = BitVector> {
    prop::collection::vec(any::<bool>(), n).prop_map(BitVector::from_bits)
}

fn pauli(n: usize) -> impl Strategy<Value = PauliOperator> {
    (bits(n), bits(n), 0u8..4).prop_map(|(x, z, p)| PauliOperator::new(x, z, p).unwrap())
}

fn gate() -> impl Strategy<Value = Gate1> {
    prop::sample::select(Gate1::ALL.to_vec())
}

fn layer(n: usize) -> impl Strategy<Value = TransversalLayer> {
    prop::collection::vec(gate(), n).prop_map(TransversalLayer::Single)
}

/// A random self-dual CSS code with `n ≤ 14`, or `None` if the draw was
/// degenerate.
fn random_code(seed: u64, n: usize) -> Option<SelfDualCssCode> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = random_self_orthogonal(n, n, &mut rng);
    if h.nrows() == 0 {
        return None;
    }
    SelfDualCssCode::from_check_matrix(&h, None).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn rref_keeps_row_space(m in matrix(8, 12)) {
        let (r, pivots) = m.rref();
        prop_assert_eq!(pivots.len(), m.rank());
        for row in r.rows() {
            prop_assert!(m.row_space_contains(row).unwrap());
        }
        for row in m.rows() {
            prop_assert!(r.row_space_contains(row).unwrap());
        }
    }

    #[test]
    fn solve_satisfies_system(m in matrix(6, 10), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = BitVector::from_bits((0..m.ncols()).map(|_| rand::Rng::random_bool(&mut rng, 0.5)));
        let d = m.mul_vec(&u).unwrap();
        match solve_linear(&m, &d) {
            Ok(v) => prop_assert_eq!(m.mul_vec(&v).unwrap(), d),
            Err(Gf2Error::RankDeficient { rank, rows }) => {
                prop_assert!(rank < rows);
                prop_assert_eq!(rank, m.rank());
            }
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    #[test]
    fn nullspace_is_kernel(m in matrix(8, 12)) {
        let ns = nullspace_basis(&m);
        for v in ns.rows() {
            prop_assert!(m.mul_vec(v).unwrap().is_zero());
        }
        prop_assert_eq!(ns.rank(), m.ncols() - m.rank());
        prop_assert_eq!(ns.nrows(), ns.rank());
    }

    #[test]
    fn coset_extension_completes_basis(full in matrix(8, 10), pick in prop::collection::vec(any::<bool>(), 8)) {
        let sub_rows: Vec<BitVector> = full.rows().iter().zip(&pick).filter(|(_, &p)| p).map(|(r, _)| r.clone()).collect();
        let sub = BitMatrix::from_rows(full.ncols(), sub_rows).unwrap();
        let ext = extend_to_coset_basis(&sub, &full).unwrap();
        for h in ext.rows() {
            prop_assert!(full.row_space_contains(h).unwrap());
        }
        prop_assert_eq!(sub.stack(&ext).unwrap().rank(), sub.rank() + ext.nrows());
        prop_assert_eq!(sub.rank() + ext.nrows(), full.rank());
    }

    #[test]
    fn conjugation_is_a_homomorphism(
        (p, q, l) in (1usize..=9).prop_flat_map(|n| (pauli(n), pauli(n), layer(n)))
    ) {
        let pq = p.multiply(&q).unwrap();
        let lhs = conjugate_by_layer(&pq, &l).unwrap();
        let rhs = conjugate_by_layer(&p, &l).unwrap().multiply(&conjugate_by_layer(&q, &l).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverse_layer_undoes_conjugation((p, l) in (1usize..=9).prop_flat_map(|n| (pauli(n), layer(n)))) {
        let there = conjugate_by_layer(&p, &l).unwrap();
        prop_assert_eq!(conjugate_by_layer(&there, &l.inverse()).unwrap(), p);
    }

    #[test]
    fn commutation_matches_phase_difference((p, q) in (1usize..=9).prop_flat_map(|n| (pauli(n), pauli(n)))) {
        let symplectic = (p.x().overlap(q.z()).unwrap() + p.z().overlap(q.x()).unwrap()) % 2 == 0;
        prop_assert_eq!(p.commutes_with(&q).unwrap(), symplectic);
        let pq = p.multiply(&q).unwrap();
        let qp = q.multiply(&p).unwrap();
        prop_assert_eq!(pq == qp, symplectic);
        prop_assert!(pq.eq_up_to_sign(&qp));
    }

    #[test]
    fn code_invariants(seed in any::<u64>(), n in 3usize..=14) {
        let Some(code) = random_code(seed, n) else { return Ok(()) };
        let h = code.check();
        for a in h.rows() {
            for b in h.rows() {
                prop_assert!(!a.dot(b).unwrap());
            }
            for rep in code.coset_reps().rows() {
                prop_assert!(!a.dot(rep).unwrap());
            }
        }
        prop_assert_eq!(h.stack(code.coset_reps()).unwrap().rank(), code.r() + code.k());
        let rederived = SelfDualCssCode::from_check_matrix(h, None).unwrap();
        prop_assert!(code.same_quotient(code.coset_reps(), rederived.coset_reps()));
    }

    #[test]
    fn gram_schmidt_dichotomy(seed in any::<u64>(), n in 3usize..=14) {
        let Some(code) = random_code(seed, n) else { return Ok(()) };
        let reps = code.coset_reps().rows().to_vec();
        let basis = symplectic_gram_schmidt(&reps).unwrap();
        let u = basis.matched_count();
        let crossed = basis.structure().iter().filter(|c| matches!(c, PairClass::Crossed(_))).count();
        prop_assert_eq!(crossed % 2, 0);
        prop_assert_eq!(u + crossed, code.k());
        prop_assert!(basis.structure().iter().all(|c| *c != PairClass::Other));
        let report = verify_basis(&code, &basis, false);
        prop_assert!(report.passed(), "{:?}", report.failures);
        for (j, c) in basis.structure().iter().enumerate() {
            if *c == PairClass::Matched {
                prop_assert_eq!(basis.x(j).weight() % 2, 1);
            }
        }
    }

    #[test]
    fn merge_keeps_quotient(seed in any::<u64>(), n in 3usize..=14) {
        let Some(code) = random_code(seed, n) else { return Ok(()) };
        let mut reps = code.coset_reps().rows().to_vec();
        let Some(w) = reps.iter().position(|h| h.weight() % 2 == 1) else { return Ok(()) };
        reps.swap(0, w);
        let basis = symplectic_gram_schmidt(&reps).unwrap();
        let Some((b, c)) = basis.first_crossed() else { return Ok(()) };
        let a = (0..basis.k()).find(|&j| basis.structure()[j] == PairClass::Matched).unwrap();
        let merged = merge_triple(&basis, a, b, c).unwrap();
        prop_assert_eq!(merged.matched_count(), basis.matched_count() + 2);
        prop_assert!(verify_basis(&code, &merged, false).passed());
        let old_x = BitMatrix::from_rows(code.n(), basis.pairs().iter().map(|p| p.0.clone()).collect()).unwrap();
        let new_x = BitMatrix::from_rows(code.n(), merged.pairs().iter().map(|p| p.0.clone()).collect()).unwrap();
        prop_assert!(code.same_quotient(&old_x, &new_x));
    }

    #[test]
    fn compatible_basis_and_phase_targets(seed in any::<u64>(), n in 3usize..=14, target_seed in any::<u64>()) {
        let Some(code) = random_code(seed, n) else { return Ok(()) };
        let verdict = existence_check(&code);
        prop_assert_eq!(verdict.exists, code.has_odd_codeword_bruteforce().unwrap());
        let Ok(basis) = build_compatible_basis(&code) else {
            prop_assert!(!verdict.exists);
            return Ok(());
        };
        prop_assert!(verify_basis(&code, &basis, true).passed());
        let target = PhasePattern::from_index(code.k(), target_seed % (1u64 << code.k()));
        let layer = synthesize_phase_layer(&code, &basis, &target).unwrap();
        prop_assert!(preserves_stabilizers(&code, &layer));
        prop_assert!(verify_phase_layer(&code, &basis, &layer, &target).unwrap().passed());
        prop_assert_eq!(logical_phase_signs(&code, &basis, &layer).unwrap(), target.clone());

        let mut twice = layer.clone();
        twice.flip_on(basis.x(0));
        twice.flip_on(basis.x(0));
        prop_assert_eq!(twice, layer);
    }

    #[test]
    fn odd_length_always_supported(seed in any::<u64>(), half in 1usize..=7) {
        let n = 2 * half + 1;
        let Some(code) = random_code(seed, n) else { return Ok(()) };
        let mut reps = vec![BitVector::ones(n)];
        reps.extend(code.coset_reps().rows().iter().cloned());
        let aug = BitMatrix::from_rows(n, reps).unwrap();
        let candidates = extend_to_coset_basis(code.check(), &code.check().stack(&aug).unwrap()).unwrap();
        let with_ones = SelfDualCssCode::from_check_matrix(code.check(), Some(&candidates)).unwrap();
        prop_assert_eq!(with_ones.coset_reps().row(0), &BitVector::ones(n));
        prop_assert!(existence_check(&with_ones).exists);
        prop_assert!(existence_check(&code).exists);
    }

    #[test]
    fn files_round_trip(seed in any::<u64>(), n in 3usize..=14) {
        let Some(code) = random_code(seed, n) else { return Ok(()) };
        let code = code.with_name("random");
        let basis = build_compatible_basis(&code).ok();
        let text = write_code_file(&code, basis.as_ref());
        let back = parse_code_file(&text).unwrap();
        prop_assert_eq!(&back.code, &code);
        prop_assert_eq!(&back.reference_basis, &basis);
        if let Some(b) = basis {
            prop_assert_eq!(parse_basis_file(&write_basis_file(&b)).unwrap(), b);
        }
    }
}
