use drazin_lab::drazin::corpus::{generate, random_core_nilpotent, CorpusLimits, CorpusMatrix};
use drazin_lab::drazin::*;
use drazin_lab::linalg::{power_chain, CMatrix, Complex64};
use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn opts() -> DrazinOptions {
    DrazinOptions::default()
}

fn rel(x: &CMatrix, y: &CMatrix) -> f64 {
    let s = x.norm().max(y.norm());
    if s == 0.0 {
        0.0
    } else {
        x.distance(y) / s
    }
}

fn corpus(seed: u64, count: usize) -> Vec<CorpusMatrix> {
    generate(seed, count, &CorpusLimits::default())
}

// Draws with a nonempty core. For a nilpotent draw of index 2 the computed
// A² is pure roundoff and relative residuals against it are meaningless.
fn with_index(seed: u64, index: usize, count: usize) -> Vec<CorpusMatrix> {
    corpus(seed, 600)
        .into_iter()
        .filter(|m| m.meta.true_index == index && m.meta.core_dim > 0)
        .take(count)
        .collect()
}

#[test]
fn right_checker_accepts_computed_inverses() {
    for m in corpus(11, 60) {
        let r = drazin_inverse(&m.a, &opts()).unwrap();
        let res = check_right_drazin(&m.a, &r.inverse, r.index).unwrap();
        assert!(res.passes(1e-10), "item {}: {res:?}", m.meta.item);
    }
}

#[test]
fn residual_of_a_drazin_inverse_is_nilpotent() {
    for m in corpus(12, 60) {
        let r = drazin_inverse(&m.a, &opts()).unwrap();
        let rep = residual_nilpotency(&m.a, &r.inverse, r.index, &opts()).unwrap();
        assert!(rep.passes(1e-10), "item {}: {rep:?}", m.meta.item);
    }
}

#[test]
fn idempotent_round_trip_reproduces_the_inverse() {
    for m in corpus(13, 80) {
        let d = drazin_inverse(&m.a, &opts()).unwrap();
        let s = spectral_idempotent_left(&m.a, &d.inverse, &opts()).unwrap();
        assert!(s.passes(1e-10), "item {}: {s:?}", m.meta.item);
        assert_eq!(s.nilpotency_order, Some(d.index));
        let x = inverse_from_idempotent(&m.a, &s.p, Side::Left, &opts()).unwrap();
        assert!(rel(&x.inverse, &d.inverse) < 1e-10, "item {}", m.meta.item);
    }
}

#[test]
fn left_and_right_constructions_merge() {
    for m in corpus(14, 80) {
        let p = chain_spectral_idempotent(&m.a, &opts()).unwrap();
        let x = inverse_from_idempotent(&m.a, &p, Side::Left, &opts()).unwrap();
        let y = inverse_from_idempotent(&m.a, &p, Side::Right, &opts()).unwrap();
        assert_eq!(x.index, m.meta.true_index);
        let merged = merge_two_sided(&m.a, &x.inverse, &y.inverse, x.index, &opts()).unwrap();
        assert!(merged.deviation < 1e-10, "item {}: {}", m.meta.item, merged.deviation);
    }
}

#[test]
fn power_lift_at_index_two_is_a_group_inverse() {
    let sample = with_index(15, 2, 20);
    assert_eq!(sample.len(), 20);
    for m in sample {
        let d = drazin_inverse(&m.a, &opts()).unwrap();
        let lift = power_lift(&d.inverse, &m.a, 2, 2, &opts()).unwrap();
        let g = lift.group.expect("n = j");
        assert!(g.passes(1e-10));
        let g = check_group(&m.a.pow(2), &lift.power, Side::Left).unwrap();
        assert!(g.passes(1e-10));
    }
}

#[test]
fn group_lift_from_the_square() {
    for m in with_index(16, 2, 20) {
        let a2 = m.a.pow(2);
        let x = drazin_inverse(&a2, &opts()).unwrap();
        assert_eq!(x.index, 1);
        let lift = group_lift(&m.a, &x.inverse, 2, &opts()).unwrap();
        assert!(lift.residuals.passes(1e-10));
    }
}

#[test]
fn bc_witness_on_corpus() {
    for m in corpus(17, 60) {
        let d = drazin_inverse(&m.a, &opts()).unwrap();
        let w = bc_witness(&m.a, &d.inverse, d.index, &opts()).unwrap();
        assert!(w.passes(1e-10), "item {}: {w:?}", m.meta.item);
    }
}

#[test]
fn matrix_equations_have_the_same_solution_at_size_eight() {
    let limits = CorpusLimits {
        min_dim: 8,
        max_dim: 8,
        ..CorpusLimits::default()
    };
    let mut worst: f64 = 0.0;
    for m in generate(18, 50, &limits) {
        let r = matrix_equation_equivalence(&m.a, &opts()).unwrap();
        worst = worst.max(r.deviation);
    }
    assert!(worst <= 1e-9, "{worst}");
}

#[test]
fn adjoint_of_a_left_inverse_is_a_right_inverse() {
    for m in corpus(19, 60) {
        let d = drazin_inverse(&m.a, &opts()).unwrap();
        let rep = adjoint_duality(&m.a, &d.inverse, d.index, &DrazinOptions::default().with_residual_tol(1e-10)).unwrap();
        assert!(rep.passes, "item {}: {:?}", m.meta.item, rep.residuals);
    }
}

#[test]
fn index_matches_ascent_descent_and_ground_truth() {
    for m in corpus(20, 200) {
        let n = m.meta.n;
        let chain = power_chain(&m.a, default_structural_tol(n), n + 1).unwrap();
        let idx = drazin_index(&m.a, default_structural_tol(n)).unwrap();
        assert_eq!(chain.ascent(), Some(idx));
        assert_eq!(chain.descent(), Some(idx));
        assert_eq!(idx, m.meta.true_index);
        assert!(idx <= n);
    }
}

#[test]
fn compressions_to_commuting_idempotents() {
    for m in corpus(21, 80) {
        let d = drazin_inverse(&m.a, &opts()).unwrap();
        for p in [d.idempotent.clone(), &CMatrix::identity(m.meta.n) - &d.idempotent] {
            let b = idempotent_block_invertibility(&m.a, &p, &opts()).unwrap();
            assert!(b.consistent(), "item {}: {b:?}", m.meta.item);
        }
        let b = idempotent_block_invertibility(&m.a, &d.idempotent, &opts()).unwrap();
        // The core compression is invertible; the nil one only when the nil part is empty.
        assert!(b.kernel_block);
        assert_eq!(b.range_block, m.meta.core_dim == m.meta.n);
    }
}

#[test]
fn drazin_spectrum_of_a_matrix_is_empty() {
    for m in corpus(22, 30) {
        // The exact spectrum: computed core eigenvalues (moduli ≥ 1, simple) and
        // zero. Computed copies of a defective zero are not eigenvalues of A.
        let schur = drazin_lab::linalg::ordered_schur(&m.a, m.meta.core_dim).unwrap();
        let mut lambdas: Vec<Complex64> = schur.eigenvalues()[..m.meta.core_dim].to_vec();
        lambdas.extend([Complex64::new(0.0, 0.0), Complex64::new(0.3, -0.7), Complex64::new(-2.0, 0.0)]);
        for lambda in lambdas {
            let shifted = m.a.shifted_negation(lambda);
            let r = drazin_inverse(&shifted, &opts()).unwrap();
            assert!(r.residuals.passes(1e-8), "item {} λ = {lambda}: {:?}", m.meta.item, r.residuals);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schur_split_and_chain_idempotent_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, blocks, _, _) = random_core_nilpotent(&mut rng, &CorpusLimits::default());
        let d = drazin_inverse(&a, &opts()).unwrap();
        prop_assert_eq!(d.index, blocks.iter().copied().max().unwrap_or(0));
        prop_assert!(d.residuals.passes(1e-8));
        prop_assert!(d.oracle_deviation <= 1e-8);
        let p = chain_spectral_idempotent(&a, &opts()).unwrap();
        // Idempotents have norm 0 or ≥ 1, so an absolute floor of 1 is the natural scale.
        prop_assert!(p.distance(&d.idempotent) / p.norm().max(1.0) < 1e-8);
    }

    #[test]
    fn inverse_of_a_scaled_matrix_scales_inversely(seed in any::<u64>(), c in 0.1f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, _, _, _) = random_core_nilpotent(&mut rng, &CorpusLimits::default());
        let x = drazin_inverse(&a, &opts()).unwrap().inverse;
        let y = drazin_inverse(&a.scale_real(c), &opts()).unwrap().inverse;
        prop_assert!(rel(&y.scale_real(c), &x) < 1e-9);
    }
}
