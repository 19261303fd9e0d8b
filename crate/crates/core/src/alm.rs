//! Inexact augmented Lagrangian method for
//! `min ½xᵀQx + cᵀx  s.t. Ax = b, x ≥ 0`.
//!
//! For fixed `(y, β)` the augmented Lagrangian is the quadratic
//! `½xᵀ(Q + βAᵀA)x + (c + Aᵀy − βAᵀb)ᵀx`, so each x-step is an NQP handed to
//! greedy CD, warm-started at the previous iterate and solved to `δ ≤ ε_k`.
//! Since `∇ₓL(x, y) = Qx + c + Aᵀ(y + β(Ax − b))`, that same `δ` bounds the
//! dual residual at the updated multiplier.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::gcd::{self, kkt_residual, GcdOptions};
use crate::matrix::{DenseMatrix, Vector};
use crate::model::{LinNqpProblem, NqpProblem, Quadratic};
use crate::trace::TraceRow;

/// Subproblem tolerance per outer iteration. Every value is capped at the
/// outer `eps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EpsSchedule {
    Constant(f64),
    /// `ε_k = initial / 2^k`, bottoming out at `floor`.
    Halving { initial: f64, floor: f64 },
}

impl EpsSchedule {
    pub fn at(&self, k: usize, eps: f64) -> f64 {
        let raw = match *self {
            EpsSchedule::Constant(v) => v,
            EpsSchedule::Halving { initial, floor } => (initial * 0.5f64.powi(k.min(1000) as i32)).max(floor),
        };
        raw.min(eps)
    }
}

#[derive(Clone, Debug)]
pub struct AlmOptions {
    /// Stop once `‖Ax − b‖ ≤ eps`.
    pub eps: f64,
    pub eps_k: EpsSchedule,
    pub beta0: f64,
    pub growth: f64,
    pub beta_max: f64,
    pub max_outer: usize,
    /// Update budget per subproblem; `None` uses the greedy CD default.
    pub inner_max_updates: Option<u64>,
}

impl AlmOptions {
    pub fn new(eps: f64) -> Self {
        Self {
            eps,
            eps_k: EpsSchedule::Constant(1e-3),
            beta0: 1.0,
            growth: 2.0,
            beta_max: 1e8,
            max_outer: 100,
            inner_max_updates: None,
        }
    }

    fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidOption(m.to_string()));
        if !(self.eps > 0.0) {
            return bad("eps must be positive");
        }
        match self.eps_k {
            EpsSchedule::Constant(v) if !(v > 0.0) => return bad("eps_k must be positive"),
            EpsSchedule::Halving { initial, floor } if !(initial > 0.0 && floor > 0.0) => {
                return bad("eps_k schedule must be positive")
            }
            _ => {}
        }
        if !(self.beta0 > 0.0) {
            return bad("beta0 must be positive");
        }
        if !(self.growth >= 1.0) {
            return bad("beta growth must be at least 1");
        }
        if !(self.beta_max >= self.beta0) {
            return bad("beta_max must be at least beta0");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlmTraceRow {
    pub outer: usize,
    /// Cumulative coordinate updates over all subproblems.
    pub updates: u64,
    pub time_sec: f64,
    pub objective: f64,
    pub primal_residual: f64,
    /// `δ` of the subproblem at its returned iterate.
    pub subproblem_delta: f64,
    /// `δ`-style residual of `Qx + c + Aᵀy` recomputed from the problem data.
    pub dual_residual: f64,
    pub eps_k: f64,
    pub beta: f64,
    pub subproblem_converged: bool,
}

#[derive(Clone, Debug)]
pub struct AlmReport {
    pub x: Vector,
    pub y: Vector,
    pub objective: f64,
    pub primal_residual: f64,
    /// Tolerance of the last subproblem, which bounds the dual residual.
    pub dual_residual_bound: f64,
    pub outer_iterations: usize,
    pub updates: u64,
    pub converged: bool,
    pub trace: Vec<AlmTraceRow>,
}

impl AlmReport {
    /// Rows in the common trace shape; the residual column is `‖Ax − b‖`.
    pub fn trace_rows(&self) -> Vec<TraceRow> {
        self.trace
            .iter()
            .map(|r| TraceRow {
                epoch: r.outer as f64,
                updates: r.updates,
                time_sec: r.time_sec,
                objective: r.objective,
                residual: r.primal_residual,
            })
            .collect()
    }
}

/// `P = Q + βAᵀA`, `d = c + Aᵀy − βAᵀb`.
pub fn build_subproblem(prob: &LinNqpProblem, y: &[f64], beta: f64) -> Result<NqpProblem> {
    if y.len() != prob.constraints() {
        return Err(Error::DimensionMismatch { expected: prob.constraints(), got: y.len() });
    }
    let cache = Cache::new(prob);
    cache.subproblem(prob, y, beta)
}

/// `y + β(Ax − b)`.
pub fn multiplier_update(y: &[f64], a: &DenseMatrix, x: &[f64], b: &[f64], beta: f64) -> Vec<f64> {
    let ax = a.mul_vec(x);
    y.iter()
        .zip(ax.iter().zip(b))
        .map(|(yi, (axi, bi))| yi + beta * (axi - bi))
        .collect()
}

struct Cache {
    gram: DenseMatrix,
    atb: Vec<f64>,
}

impl Cache {
    fn new(prob: &LinNqpProblem) -> Self {
        Self { gram: prob.a().gram(), atb: prob.a().tr_mul_vec(prob.b()) }
    }

    fn subproblem(&self, prob: &LinNqpProblem, y: &[f64], beta: f64) -> Result<NqpProblem> {
        let n = prob.dim();
        let q = prob.q();
        let mut p = DenseMatrix::from_fn(n, n, |i, j| q[(i, j)] + beta * self.gram[(i, j)]);
        p.symmetrize();
        let aty = prob.a().tr_mul_vec(y);
        let d: Vec<f64> = (0..n).map(|i| prob.c()[i] + aty[i] - beta * self.atb[i]).collect();
        NqpProblem::new(p, Vector::new(d)?)
    }
}

pub fn solve(prob: &LinNqpProblem, x0: &[f64], opts: &AlmOptions) -> Result<AlmReport> {
    opts.check()?;
    let n = prob.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x0.len() });
    }
    let start = Instant::now();
    let cache = Cache::new(prob);
    let mut x = x0.to_vec();
    let mut y = vec![0.0; prob.constraints()];
    let mut beta = opts.beta0;
    let mut updates = 0u64;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut last_eps_k = f64::INFINITY;
    let mut outer = 0;

    while outer < opts.max_outer {
        let eps_k = opts.eps_k.at(outer, opts.eps);
        let sub = cache.subproblem(prob, &y, beta)?;
        let mut inner = GcdOptions::new(eps_k);
        inner.max_updates = opts.inner_max_updates;
        inner.trace = false;
        let (rep, _) = gcd::solve_quadratic(sub.quadratic(), &x, &inner)?;
        updates += rep.updates;
        x = rep.x.into_inner();
        y = multiplier_update(&y, prob.a(), &x, prob.b(), beta);
        outer += 1;
        last_eps_k = eps_k;

        let primal = prob.primal_residual(&x);
        let dual = dual_residual(prob, &x, &y);
        trace.push(AlmTraceRow {
            outer,
            updates,
            time_sec: start.elapsed().as_secs_f64(),
            objective: prob.objective(&x),
            primal_residual: primal,
            subproblem_delta: rep.delta,
            dual_residual: dual,
            eps_k,
            beta,
            subproblem_converged: rep.converged,
        });
        if rep.converged && primal <= opts.eps {
            converged = true;
            break;
        }
        beta = (opts.growth * beta).min(opts.beta_max);
    }

    Ok(AlmReport {
        objective: prob.objective(&x),
        primal_residual: prob.primal_residual(&x),
        x: Vector::new(x)?,
        y: Vector::new(y)?,
        dual_residual_bound: last_eps_k,
        outer_iterations: outer,
        updates,
        converged,
        trace,
    })
}

/// Distance from zero to `Qx + c + Aᵀy + N₊(x)`.
pub fn dual_residual(prob: &LinNqpProblem, x: &[f64], y: &[f64]) -> f64 {
    let mut g = Quadratic::new(prob.q(), prob.c()).gradient(x);
    let aty = prob.a().tr_mul_vec(y);
    for (gi, ai) in g.iter_mut().zip(&aty) {
        *gi += ai;
    }
    kkt_residual(x, &g)
}
