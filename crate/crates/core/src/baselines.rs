//! Reference solvers compared against greedy CD: cyclic CD, randomized CD and
//! FISTA. The CD variants share the coordinate machinery of [`crate::gcd`] and
//! differ only in how the next coordinate is chosen.

use crate::error::{Error, Result};
use crate::gcd::{coordinate_candidate, kkt_residual, step, GcdState};
use crate::matrix::{dot, norm2, DenseMatrix, Vector};
use crate::model::{NqpProblem, Quadratic};
use crate::rng::SeededRng;
use crate::trace::{Recorder, SolveReport, TraceRow};

#[derive(Clone, Debug)]
pub struct BaselineOptions {
    pub eps: f64,
    /// Coordinate update budget for the CD variants; `None` means `1000·n`.
    pub max_updates: Option<u64>,
    pub rng_seed: u64,
    pub fista_max_iters: u64,
    pub power_iters: usize,
    pub power_tol: f64,
}

impl BaselineOptions {
    pub fn new(eps: f64) -> Self {
        Self {
            eps,
            max_updates: None,
            rng_seed: 0,
            fista_max_iters: 100_000,
            power_iters: 100,
            power_tol: 1e-6,
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(Error::InvalidOption(format!("eps must be positive, got {}", self.eps)));
        }
        if !(self.power_tol > 0.0) {
            return Err(Error::InvalidOption("power_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Coordinate descent visiting `0..n` in order, checking `δ` once per epoch.
pub fn cyclic_solve(prob: &NqpProblem, x0: &[f64], opts: &BaselineOptions) -> Result<SolveReport> {
    let n = prob.dim();
    let mut next = 0usize;
    coordinate_sweep(prob.quadratic(), x0, opts, move || {
        let i = next;
        next = (next + 1) % n;
        i
    })
}

/// Coordinate descent with `i_k` drawn uniformly with replacement from a
/// seeded generator. The same seed reproduces the same iterates.
pub fn randomized_solve(prob: &NqpProblem, x0: &[f64], opts: &BaselineOptions) -> Result<SolveReport> {
    let n = prob.dim();
    let mut rng = SeededRng::new(opts.rng_seed);
    coordinate_sweep(prob.quadratic(), x0, opts, move || rng.index(n))
}

fn coordinate_sweep(
    q: Quadratic<'_>,
    x0: &[f64],
    opts: &BaselineOptions,
    mut pick: impl FnMut() -> usize,
) -> Result<SolveReport> {
    opts.check()?;
    let n = q.dim();
    let budget = opts.max_updates.unwrap_or(1000 * n as u64);
    let mut state = GcdState::new(q, x0)?;
    let mut rec = Recorder::new(n, q.objective_from_gradient(state.x(), state.gradient()));
    rec.push(0, state.delta());
    let mut converged = false;
    loop {
        if rec.at_epoch_boundary(state.updates()) {
            state.refresh_delta();
            rec.push(state.updates(), state.delta());
            if state.delta() <= opts.eps {
                state.resync(q);
                if state.delta() <= opts.eps {
                    converged = true;
                    break;
                }
            }
        }
        if state.updates() >= budget {
            break;
        }
        let i = pick();
        let cand = coordinate_candidate(&state, q, i);
        step(&mut state, q, i, cand.xhat);
        rec.add_decrease(cand.decrease);
    }
    if !converged {
        state.resync(q);
    }
    rec.push(state.updates(), state.delta());
    let (updates, flops, delta) = (state.updates(), state.flops(), state.delta());
    let x = state.into_x();
    Ok(SolveReport {
        objective: q.objective(&x),
        x: Vector::new(x).expect("iterates stay finite"),
        delta,
        updates,
        converged,
        trace: rec.finish(),
        flops,
    })
}

/// Largest eigenvalue of a symmetric PSD matrix by power iteration with a
/// Rayleigh-quotient estimate. Stops once the relative change drops below
/// `tol`. Returns 0 for a matrix that annihilates the start vector.
pub fn power_iteration(p: &DenseMatrix, iters: usize, tol: f64) -> f64 {
    assert!(p.is_square());
    let n = p.rows();
    // fixed pseudo-random start, so structured matrices are unlikely to be
    // orthogonal to it
    let mut rng = SeededRng::new(0x5eed);
    let mut v: Vec<f64> = (0..n).map(|_| 0.5 + rng.uniform()).collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|e| *e /= nv);
    let mut lambda = 0.0;
    for _ in 0..iters.max(1) {
        let w = p.mul_vec(&v);
        let nw = norm2(&w);
        if nw == 0.0 {
            return 0.0;
        }
        let next = dot(&v, &w) / dot(&v, &v);
        let done = (next - lambda).abs() <= tol * next.abs();
        lambda = next;
        if done {
            break;
        }
        v = w.into_iter().map(|e| e / nw).collect();
    }
    lambda.max(0.0)
}

/// Projected gradient with Nesterov momentum (FISTA), constant step
/// `1/(λ̂(1 + 10·tol))`. One trace row per iteration; each iteration costs one
/// product with `P`.
pub fn fista_solve(prob: &NqpProblem, x0: &[f64], opts: &BaselineOptions) -> Result<SolveReport> {
    opts.check()?;
    let q = prob.quadratic();
    let n = q.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x0.len() });
    }
    if let Some(i) = x0.iter().position(|v| !(*v >= 0.0)) {
        return Err(Error::InfeasibleStart(i));
    }
    let lambda = power_iteration(q.p, opts.power_iters, opts.power_tol);
    if lambda <= 0.0 {
        return Err(Error::ZeroCurvature);
    }
    let step = 1.0 / (lambda * (1.0 + 10.0 * opts.power_tol));

    let start = std::time::Instant::now();
    let mut flops = 2 * (n * n) as u64 * opts.power_iters as u64;
    let mut x = x0.to_vec();
    let mut px = q.p.mul_vec(&x);
    // y is extrapolated from x, so P·y follows from P·x without another product
    let mut y = x.clone();
    let mut py = px.clone();
    let mut t = 1.0_f64;
    let objective = |x: &[f64], px: &[f64]| 0.5 * dot(x, px) + dot(q.d, x);
    let residual = |x: &[f64], px: &[f64]| {
        let g: Vec<f64> = px.iter().zip(q.d).map(|(a, b)| a + b).collect();
        kkt_residual(x, &g)
    };
    let mut delta = residual(&x, &px);
    let mut trace = vec![TraceRow {
        epoch: 0.0,
        updates: 0,
        time_sec: 0.0,
        objective: objective(&x, &px),
        residual: delta,
    }];
    let mut iters = 0u64;
    while delta > opts.eps && iters < opts.fista_max_iters {
        let x_new: Vec<f64> = y
            .iter()
            .zip(&py)
            .zip(q.d)
            .map(|((yi, pyi), di)| (yi - step * (pyi + di)).max(0.0))
            .collect();
        let px_new = q.p.mul_vec(&x_new);
        let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_new;
        for i in 0..n {
            y[i] = x_new[i] + beta * (x_new[i] - x[i]);
            py[i] = px_new[i] + beta * (px_new[i] - px[i]);
        }
        x = x_new;
        px = px_new;
        t = t_new;
        iters += 1;
        flops += 2 * (n * n) as u64 + 12 * n as u64;
        delta = residual(&x, &px);
        trace.push(TraceRow {
            epoch: iters as f64,
            updates: iters,
            time_sec: start.elapsed().as_secs_f64(),
            objective: objective(&x, &px),
            residual: delta,
        });
    }
    // the maintained P·x is an exact product each iteration, so δ needs no resync
    Ok(SolveReport {
        objective: q.objective(&x),
        x: Vector::new(x).expect("iterates stay finite"),
        delta,
        updates: iters,
        converged: delta <= opts.eps,
        trace,
        flops,
    })
}
