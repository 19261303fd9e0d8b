//! Seeded problem generators and file ingestion.
//!
//! Every generator is a pure function of its dimensions and seed; see
//! [`crate::rng`] for the sampling scheme. Matrices are filled row-major.

use std::path::Path;

use crate::error::Result;
use crate::matrix::{DenseMatrix, Vector};
use crate::model::{LinNqpProblem, NmfProblem, NqpProblem};
use crate::rng::SeededRng;

/// Diagonal entries at or below this trigger a regeneration of `P = GᵀG`.
const MIN_DIAGONAL: f64 = 1e-8;

fn normal_matrix(rng: &mut SeededRng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.normal())
}

fn normal_vec(rng: &mut SeededRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.normal()).collect()
}

/// `P = GᵀG` with a square standard normal `G`, `d` standard normal.
pub fn gen_random_psd_nqp(n: usize, seed: u64) -> NqpProblem {
    assert!(n >= 2, "n must be at least 2");
    for attempt in 0.. {
        let mut rng = SeededRng::stream(seed, attempt);
        let p = normal_matrix(&mut rng, n, n).gram();
        if (0..n).any(|i| p[(i, i)] <= MIN_DIAGONAL) {
            continue;
        }
        let d = normal_vec(&mut rng, n);
        return NqpProblem::new(p, Vector::new(d).expect("finite")).expect("Gram matrix is valid");
    }
    unreachable!()
}

/// `P = 0.1·I + 0.9·E`, `d = −10·e`; a classically hard instance for cyclic CD.
pub fn gen_hard_nqp(n: usize) -> NqpProblem {
    assert!(n >= 2, "n must be at least 2");
    let p = DenseMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.9 });
    NqpProblem::new(p, Vector::filled(n, -10.0)).expect("valid by construction")
}

#[derive(Clone, Debug)]
pub struct LinNqpInstance {
    pub problem: LinNqpProblem,
    /// Nonnegative point with `A x = b` used to build `b`.
    pub feasible_point: Vector,
}

/// `Q = GᵀG`, `c`, `A` standard normal, `b = A·|z|` for a standard normal `z`,
/// so the feasible set is nonempty.
pub fn gen_lin_nqp(m: usize, n: usize, seed: u64) -> LinNqpInstance {
    assert!(m >= 1 && m < n, "need 1 <= m < n");
    for attempt in 0.. {
        let mut rng = SeededRng::stream(seed, attempt);
        let q = normal_matrix(&mut rng, n, n).gram();
        if (0..n).any(|i| q[(i, i)] <= MIN_DIAGONAL) {
            continue;
        }
        let c = normal_vec(&mut rng, n);
        let a = normal_matrix(&mut rng, m, n);
        let x_feas: Vec<f64> = normal_vec(&mut rng, n).into_iter().map(f64::abs).collect();
        let b = a.mul_vec(&x_feas);
        let problem = LinNqpProblem::new(q, Vector::new(c).expect("finite"), a, Vector::new(b).expect("finite"))
            .expect("valid by construction");
        return LinNqpInstance { problem, feasible_point: Vector::new(x_feas).expect("finite") };
    }
    unreachable!()
}

#[derive(Clone, Debug)]
pub struct SyntheticNmf {
    pub problem: NmfProblem,
    pub left: DenseMatrix,
    pub right: DenseMatrix,
}

/// `M = LRᵀ` with `L = max(0, randn(m, r))` and `R = max(0, randn(n, r))`.
pub fn gen_synthetic_nmf(m: usize, n: usize, r: usize, seed: u64) -> SyntheticNmf {
    assert!(r >= 1 && r <= m.min(n), "need 1 <= r <= min(m, n)");
    let mut rng = SeededRng::new(seed);
    let left = DenseMatrix::from_fn(m, r, |_, _| rng.normal().max(0.0));
    let right = DenseMatrix::from_fn(n, r, |_, _| rng.normal().max(0.0));
    let data = left.matmul_tr(&right);
    let problem = NmfProblem::new(data, r).expect("nonnegative by construction");
    SyntheticNmf { problem, left, right }
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    DenseMatrix::load(path)
}

pub fn load_vector(path: impl AsRef<Path>) -> Result<Vector> {
    Vector::load(path)
}
