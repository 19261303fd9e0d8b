//! Alternating minimization for `min ½‖XYᵀ − M‖_F²` over `X, Y ≥ 0`.
//!
//! With one factor fixed, each row of the other factor is an independent
//! `r`-dimensional NQP sharing the Gram matrix of the fixed factor. Rows are
//! solved by greedy CD warm-started at their previous values, in parallel.
//! Before each half-step the factor columns are rescaled to equal norms,
//! which leaves `XYᵀ` unchanged.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gcd::{self, GcdOptions};
use crate::matrix::{norm2, DenseMatrix};
use crate::model::{NmfProblem, Quadratic};
use crate::rng::SeededRng;
use crate::trace::TraceRow;

#[derive(Clone, Debug)]
pub struct NmfOptions {
    /// Tolerance for every row subproblem.
    pub eps_k: f64,
    /// Halve `eps_k` after each outer iteration (down to `1e-12`).
    pub halve_eps: bool,
    /// Stop once the relative fit `‖XYᵀ − M‖_F / ‖M‖_F` is at most this.
    pub fit_tol: f64,
    pub max_outer: usize,
    pub rescale: bool,
    pub rescale_floor: f64,
    pub reseed_floor: f64,
    pub seed: u64,
    /// Update budget per row subproblem; `None` uses the greedy CD default.
    pub inner_max_updates: Option<u64>,
    /// Check every rescale for norm balance and product preservation.
    pub audit_rescale: bool,
}

impl Default for NmfOptions {
    fn default() -> Self {
        Self {
            eps_k: 1e-3,
            halve_eps: false,
            fit_tol: 1e-3,
            max_outer: 200,
            rescale: true,
            rescale_floor: 1e-12,
            reseed_floor: 1e-12,
            seed: 0,
            inner_max_updates: None,
            audit_rescale: false,
        }
    }
}

impl NmfOptions {
    fn check(&self) -> Result<()> {
        let positive = [
            ("eps_k", self.eps_k),
            ("fit_tol", self.fit_tol),
            ("rescale_floor", self.rescale_floor),
            ("reseed_floor", self.reseed_floor),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::InvalidOption(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct NmfState {
    pub x: DenseMatrix,
    pub y: DenseMatrix,
    pub outer: usize,
    /// Relative fit, or the absolute residual when `M = 0`.
    pub fit: f64,
    pub fit_is_absolute: bool,
    pub objective: f64,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NmfTraceRow {
    pub outer: usize,
    pub updates: u64,
    pub time_sec: f64,
    pub fit: f64,
    pub objective: f64,
    /// Largest row-subproblem `δ` of the Y half-step.
    pub max_row_delta: f64,
}

/// Outcome of one audited rescale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RescaleAudit {
    /// Largest `|‖x_i‖ − ‖y_i‖| / (1 + ‖x_i‖)` over rescaled columns.
    pub norm_mismatch: f64,
    /// `‖X'Y'ᵀ − XYᵀ‖_F / (1 + ‖XYᵀ‖_F)`.
    pub product_change: f64,
}

#[derive(Clone, Debug)]
pub struct NmfReport {
    pub state: NmfState,
    pub trace: Vec<NmfTraceRow>,
    /// Objective before the first step and after every half-step.
    pub half_step_objectives: Vec<f64>,
    /// Largest row `δ` of every half-step.
    pub half_step_max_delta: Vec<f64>,
    pub rescale_audits: Vec<RescaleAudit>,
    pub reseeds: usize,
}

impl NmfReport {
    /// Rows in the common trace shape; the residual column is the fit.
    pub fn trace_rows(&self) -> Vec<TraceRow> {
        self.trace
            .iter()
            .map(|r| TraceRow {
                epoch: r.outer as f64,
                updates: r.updates,
                time_sec: r.time_sec,
                objective: r.objective,
                residual: r.fit,
            })
            .collect()
    }
}

/// Balances column norms: where both `‖x_i‖` and `‖y_i‖` reach `floor`,
/// scales them to the geometric mean `√(‖x_i‖‖y_i‖)`. Other columns are left
/// alone. The product `XYᵀ` is unchanged up to rounding.
pub fn rescale_pair(x: &mut DenseMatrix, y: &mut DenseMatrix, floor: f64) {
    assert_eq!(x.cols(), y.cols(), "factors must share the rank");
    let xn = column_norms(x);
    let yn = column_norms(y);
    let scales: Vec<Option<(f64, f64)>> = xn
        .iter()
        .zip(&yn)
        .map(|(&a, &b)| {
            (a >= floor && b >= floor && a != b).then(|| ((b / a).sqrt(), (a / b).sqrt()))
        })
        .collect();
    apply_column_scales(x, scales.iter().map(|s| s.map(|(sx, _)| sx)));
    apply_column_scales(y, scales.iter().map(|s| s.map(|(_, sy)| sy)));
}

fn column_norms(m: &DenseMatrix) -> Vec<f64> {
    let mut acc = vec![0.0; m.cols()];
    for i in 0..m.rows() {
        for (a, v) in acc.iter_mut().zip(m.row(i)) {
            *a += v * v;
        }
    }
    acc.into_iter().map(f64::sqrt).collect()
}

fn apply_column_scales(m: &mut DenseMatrix, scales: impl Iterator<Item = Option<f64>>) {
    let scales: Vec<f64> = scales.map(|s| s.unwrap_or(1.0)).collect();
    for i in 0..m.rows() {
        for (v, s) in m.row_mut(i).iter_mut().zip(&scales) {
            *v *= s;
        }
    }
}

/// Gram matrix `P = FᵀF` and the linear terms of the row subproblems,
/// `d_i = −Fᵀ b_i` for each row `b_i` of `rows` (returned as row `i` of `D`).
///
/// Row `i` of the free factor then solves `min_{z ≥ 0} ½zᵀPz + d_iᵀz`.
pub fn build_row_subproblems(fixed: &DenseMatrix, rows: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    assert_eq!(fixed.rows(), rows.cols(), "fixed factor and data disagree");
    let p = fixed.gram();
    let mut d = rows.matmul(fixed);
    for i in 0..d.rows() {
        d.row_mut(i).iter_mut().for_each(|v| *v = -*v);
    }
    (p, d)
}

/// Replaces numerically zero columns of `fixed` (those with `P_ii` below
/// `floor`) by small uniform entries, zeroing the matching column of `free`
/// so the product is not disturbed. Returns the number of columns reseeded.
fn reseed_dead_columns(
    fixed: &mut DenseMatrix,
    free: &mut DenseMatrix,
    floor: f64,
    rng: &mut SeededRng,
) -> usize {
    let norms = column_norms(fixed);
    let mut count = 0;
    for (j, nrm) in norms.into_iter().enumerate() {
        if nrm * nrm >= floor {
            continue;
        }
        count += 1;
        loop {
            for i in 0..fixed.rows() {
                fixed[(i, j)] = rng.uniform() * 1e-3;
            }
            if column_norms(fixed)[j].powi(2) >= floor {
                break;
            }
        }
        for i in 0..free.rows() {
            free[(i, j)] = 0.0;
        }
    }
    count
}

/// `½‖XYᵀ − M‖_F²`.
pub fn nmf_objective(x: &DenseMatrix, y: &DenseMatrix, m: &DenseMatrix) -> f64 {
    let prod = x.matmul_tr(y);
    0.5 * prod
        .as_slice()
        .iter()
        .zip(m.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
}

struct HalfStep {
    updates: u64,
    max_delta: f64,
}

/// Solves every row of `free` against `fixed`, in parallel.
fn half_step(fixed: &DenseMatrix, data_rows: &DenseMatrix, free: &mut DenseMatrix, opts: &GcdOptions) -> Result<HalfStep> {
    let (p, d) = build_row_subproblems(fixed, data_rows);
    let r = free.cols();
    let results: Vec<Result<(Vec<f64>, u64, f64)>> = (0..free.rows())
        .into_par_iter()
        .map(|i| {
            let q = Quadratic::new(&p, d.row(i));
            let (rep, _) = gcd::solve_quadratic(q, free.row(i), opts)?;
            Ok((rep.x.into_inner(), rep.updates, rep.delta))
        })
        .collect();
    let mut out = HalfStep { updates: 0, max_delta: 0.0 };
    for (i, res) in results.into_iter().enumerate() {
        let (row, upd, delta) = res?;
        debug_assert_eq!(row.len(), r);
        free.row_mut(i).copy_from_slice(&row);
        out.updates += upd;
        out.max_delta = out.max_delta.max(delta);
    }
    Ok(out)
}

fn audited_rescale(x: &mut DenseMatrix, y: &mut DenseMatrix, floor: f64, audit: bool) -> Option<RescaleAudit> {
    if !audit {
        rescale_pair(x, y, floor);
        return None;
    }
    let before = x.matmul_tr(y);
    rescale_pair(x, y, floor);
    let after = x.matmul_tr(y);
    let diff = norm2(
        &before
            .as_slice()
            .iter()
            .zip(after.as_slice())
            .map(|(a, b)| a - b)
            .collect::<Vec<_>>(),
    );
    let xn = column_norms(x);
    let yn = column_norms(y);
    let norm_mismatch = xn
        .iter()
        .zip(&yn)
        .filter(|(a, b)| **a >= floor && **b >= floor)
        .map(|(a, b)| (a - b).abs() / (1.0 + a))
        .fold(0.0, f64::max);
    Some(RescaleAudit { norm_mismatch, product_change: diff / (1.0 + before.frobenius_norm()) })
}

/// Alternating minimization with greedy CD row solves.
///
/// Without `init`, both factors start with i.i.d. uniform(0, 1) entries drawn
/// from `opts.seed`.
pub fn altmin_solve(
    prob: &NmfProblem,
    opts: &NmfOptions,
    init: Option<(DenseMatrix, DenseMatrix)>,
) -> Result<NmfReport> {
    opts.check()?;
    let start = Instant::now();
    let m = prob.data();
    let rank = prob.rank();
    let (mut x, mut y) = match init {
        Some((x0, y0)) => {
            check_factor(&x0, m.rows(), rank)?;
            check_factor(&y0, m.cols(), rank)?;
            (x0, y0)
        }
        None => {
            let mut rx = SeededRng::stream(opts.seed, 0);
            let mut ry = SeededRng::stream(opts.seed, 1);
            (
                DenseMatrix::from_fn(m.rows(), rank, |_, _| rx.uniform()),
                DenseMatrix::from_fn(m.cols(), rank, |_, _| ry.uniform()),
            )
        }
    };
    let mut reseed_rng = SeededRng::stream(opts.seed, 2);
    let mt = m.transpose();
    let m_norm = m.frobenius_norm();
    let fit_is_absolute = m_norm == 0.0;
    let fit_of = |obj: f64| {
        let abs = (2.0 * obj).sqrt();
        if fit_is_absolute {
            abs
        } else {
            abs / m_norm
        }
    };

    let mut objective = nmf_objective(&x, &y, m);
    let mut fit = fit_of(objective);
    let mut half_step_objectives = vec![objective];
    let mut half_step_max_delta = Vec::new();
    let mut rescale_audits = Vec::new();
    let mut reseeds = 0;
    let mut updates = 0u64;
    let mut trace = vec![NmfTraceRow { outer: 0, updates: 0, time_sec: 0.0, fit, objective, max_row_delta: f64::NAN }];
    let mut outer = 0;
    let mut converged = fit <= opts.fit_tol;

    while !converged && outer < opts.max_outer {
        let eps_k = if opts.halve_eps {
            (opts.eps_k * 0.5f64.powi(outer.min(1000) as i32)).max(1e-12)
        } else {
            opts.eps_k
        };
        let mut inner = GcdOptions::new(eps_k);
        inner.max_updates = opts.inner_max_updates;
        inner.trace = false;

        if opts.rescale {
            rescale_audits.extend(audited_rescale(&mut x, &mut y, opts.rescale_floor, opts.audit_rescale));
        }
        reseeds += reseed_dead_columns(&mut y, &mut x, opts.reseed_floor, &mut reseed_rng);
        let hx = half_step(&y, m, &mut x, &inner)?;
        updates += hx.updates;
        half_step_objectives.push(nmf_objective(&x, &y, m));
        half_step_max_delta.push(hx.max_delta);

        if opts.rescale {
            rescale_audits.extend(audited_rescale(&mut x, &mut y, opts.rescale_floor, opts.audit_rescale));
        }
        reseeds += reseed_dead_columns(&mut x, &mut y, opts.reseed_floor, &mut reseed_rng);
        let hy = half_step(&x, &mt, &mut y, &inner)?;
        updates += hy.updates;
        objective = nmf_objective(&x, &y, m);
        half_step_objectives.push(objective);
        half_step_max_delta.push(hy.max_delta);

        outer += 1;
        fit = fit_of(objective);
        converged = fit <= opts.fit_tol;
        trace.push(NmfTraceRow {
            outer,
            updates,
            time_sec: start.elapsed().as_secs_f64(),
            fit,
            objective,
            max_row_delta: hy.max_delta,
        });
    }

    Ok(NmfReport {
        state: NmfState { x, y, outer, fit, fit_is_absolute, objective, converged },
        trace,
        half_step_objectives,
        half_step_max_delta,
        rescale_audits,
        reseeds,
    })
}

fn check_factor(f: &DenseMatrix, rows: usize, rank: usize) -> Result<()> {
    if f.rows() != rows {
        return Err(Error::DimensionMismatch { expected: rows, got: f.rows() });
    }
    if f.cols() != rank {
        return Err(Error::DimensionMismatch { expected: rank, got: f.cols() });
    }
    if let Some(pos) = f.as_slice().iter().position(|v| *v < 0.0) {
        return Err(Error::InfeasibleStart(pos));
    }
    Ok(())
}
