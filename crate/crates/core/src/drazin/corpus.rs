//! Random matrices `A = S (C ⊕ N) S⁻¹` with known Drazin structure.
//!
//! `C` is invertible with singular values in `[1, 3]`, so every core
//! eigenvalue has modulus at least 1. `N` is a direct sum of strictly upper
//! triangular blocks whose superdiagonals are bounded away from zero, so the
//! nilpotency order of each block is its size and the index of `A` is the
//! largest block. `S` has singular values spread between 1 and its condition
//! number. All randomness comes from `ChaCha8Rng`, seeded per corpus, which
//! reproduces bit for bit across platforms.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::linalg::{CMatrix, Complex64};

/// Shape limits for generated matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusLimits {
    pub min_dim: usize,
    pub max_dim: usize,
    /// Largest nilpotent block.
    pub max_block: usize,
    /// Upper bound on the condition number of `S`.
    pub max_cond: f64,
}

impl Default for CorpusLimits {
    fn default() -> Self {
        Self {
            min_dim: 1,
            max_dim: 12,
            max_block: 4,
            max_cond: 100.0,
        }
    }
}

/// Ground truth recorded next to each generated matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusMeta {
    pub seed: u64,
    pub item: usize,
    pub n: usize,
    pub core_dim: usize,
    pub nil_blocks: Vec<usize>,
    pub true_index: usize,
    pub cond_s: f64,
}

#[derive(Debug, Clone)]
pub struct CorpusMatrix {
    pub a: CMatrix,
    pub meta: CorpusMeta,
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

fn unit_phase(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Unitary factor of the QR decomposition of a complex Gaussian matrix.
fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    g.qr().q()
}

/// `U diag(s) V*` together with `V diag(1/s) U*`.
fn with_singular_values(s: &[f64], rng: &mut ChaCha8Rng) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let n = s.len();
    let u = random_unitary(n, rng);
    let v = random_unitary(n, rng);
    let d = DMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(s[i], 0.0) } else { Complex64::new(0.0, 0.0) });
    let d_inv =
        DMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(1.0 / s[i], 0.0) } else { Complex64::new(0.0, 0.0) });
    (&u * d * v.adjoint(), &v * d_inv * u.adjoint())
}

fn nilpotent_block(size: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    DMatrix::from_fn(size, size, |i, j| {
        if j == i + 1 {
            unit_phase(rng) * rng.gen_range(0.5..2.0)
        } else if j > i + 1 {
            gaussian(rng) * 0.5
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// One matrix drawn from `rng`.
pub fn random_core_nilpotent(rng: &mut ChaCha8Rng, limits: &CorpusLimits) -> (CMatrix, Vec<usize>, usize, f64) {
    let n = rng.gen_range(limits.min_dim..=limits.max_dim);
    // A quarter of the draws are invertible or nilpotent outright.
    let core_dim = match rng.gen_range(0..8) {
        0 => n,
        1 => 0,
        _ => rng.gen_range(0..=n),
    };
    let mut blocks = Vec::new();
    let mut left = n - core_dim;
    while left > 0 {
        let b = rng.gen_range(1..=left.min(limits.max_block));
        blocks.push(b);
        left -= b;
    }

    let mut m = DMatrix::<Complex64>::zeros(n, n);
    if core_dim > 0 {
        let s: Vec<f64> = (0..core_dim).map(|_| rng.gen_range(1.0..3.0)).collect();
        let (c, _) = with_singular_values(&s, rng);
        m.view_mut((0, 0), (core_dim, core_dim)).copy_from(&c);
    }
    let mut at = core_dim;
    for &b in &blocks {
        m.view_mut((at, at), (b, b)).copy_from(&nilpotent_block(b, rng));
        at += b;
    }

    let cond = if n == 1 { 1.0 } else { rng.gen_range(1.0..=limits.max_cond) };
    let mut sv: Vec<f64> = (0..n).map(|i| match i {
        0 => 1.0,
        _ if i == n - 1 => cond,
        _ => cond.powf(rng.gen_range(0.0..1.0)),
    })
    .collect();
    sv.sort_by(f64::total_cmp);
    let (s, s_inv) = with_singular_values(&sv, rng);
    let a = CMatrix::from_dmatrix(&s * m * s_inv).expect("finite by construction");
    (a, blocks, core_dim, cond)
}

/// `count` matrices from one seeded stream.
pub fn generate(seed: u64, count: usize, limits: &CorpusLimits) -> Vec<CorpusMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|item| {
            let (a, nil_blocks, core_dim, cond_s) = random_core_nilpotent(&mut rng, limits);
            CorpusMatrix {
                meta: CorpusMeta {
                    seed,
                    item,
                    n: a.rows(),
                    core_dim,
                    true_index: nil_blocks.iter().copied().max().unwrap_or(0),
                    nil_blocks,
                    cond_s,
                },
                a,
            }
        })
        .collect()
}
