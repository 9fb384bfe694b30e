use drazin_lab::linalg::*;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let entries = (0..rows * cols).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    CMatrix::new(rows, cols, entries).unwrap()
}

/// A `rows × cols` matrix of rank `r` (almost surely).
fn low_rank(rows: usize, cols: usize, r: usize, seed: u64) -> CMatrix {
    if r == 0 {
        return CMatrix::zeros(rows, cols);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    &gaussian_matrix(rows, r, &mut rng) * &gaussian_matrix(r, cols, &mut rng)
}

fn gaussian_vectors(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    (0..count)
        .map(|_| (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
        .collect()
}

const TOL: f64 = 1e-10;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_of_adjoint(rows in 1usize..9, cols in 1usize..9, r in 0usize..9, seed in any::<u64>()) {
        let r = r.min(rows).min(cols);
        let m = low_rank(rows, cols, r, seed);
        prop_assert_eq!(rank(&m, TOL).unwrap(), r);
        prop_assert_eq!(rank(&m.adjoint(), TOL).unwrap(), r);
    }

    #[test]
    fn rank_nullity(rows in 1usize..9, cols in 1usize..9, r in 0usize..9, seed in any::<u64>()) {
        let r = r.min(rows).min(cols);
        let m = low_rank(rows, cols, r, seed);
        let kernel = null_basis(&m, TOL).unwrap();
        prop_assert_eq!(kernel.dim() + rank(&m, TOL).unwrap(), cols);
        if let Some(k) = kernel.basis_matrix() {
            prop_assert!((&m * &k).norm() <= 1e-12 * m.norm().max(1.0));
        }
    }

    #[test]
    fn grassmann_identity(n in 2usize..9, a in 0usize..5, b in 0usize..5, shared in 0usize..3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shared = shared.min(n);
        let a = a.min(n - shared);
        let b = b.min(n - shared);
        let common = gaussian_vectors(n, shared, &mut rng);
        let own_u = gaussian_vectors(n, a, &mut rng);
        let own_v = gaussian_vectors(n, b, &mut rng);
        let u = SubspaceBasis::span(n, &[common.clone(), own_u].concat(), DEFAULT_SUBSPACE_TOL).unwrap();
        let v = SubspaceBasis::span(n, &[common, own_v].concat(), DEFAULT_SUBSPACE_TOL).unwrap();
        let meet = intersect(&u, &v).unwrap();
        let sum = subspace_sum(&u, &v).unwrap();
        prop_assert_eq!(meet.dim() + sum.dim(), u.dim() + v.dim());
        prop_assert!(sum.contains(&u) && sum.contains(&v));
        prop_assert!(u.contains(&meet) && v.contains(&meet));
    }

    #[test]
    fn pinv_projectors(rows in 1usize..9, cols in 1usize..9, r in 0usize..9, seed in any::<u64>()) {
        let r = r.min(rows).min(cols);
        let m = low_rank(rows, cols, r, seed);
        let p = pinv(&m, TOL).unwrap();
        let onto_range = &m * &p;
        let onto_corange = &p * &m;
        for q in [&onto_range, &onto_corange] {
            prop_assert!(q.distance(&(q * q)) <= TOL * q.norm().max(1.0));
            prop_assert!(q.distance(&q.adjoint()) <= TOL * q.norm().max(1.0));
        }
        prop_assert!(m.distance(&(&onto_range * &m)) <= TOL * m.norm().max(1.0));
    }
}
