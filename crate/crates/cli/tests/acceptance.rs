//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs as a plain binary (`harness = false`) so the lines always print.

#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use gcdqp::alm::{self, AlmOptions, EpsSchedule};
use gcdqp::baselines::{self, BaselineOptions};
use gcdqp::gcd::{self, GcdOptions, GcdState};
use gcdqp::instances;
use gcdqp::nmf::{self, NmfOptions};
use gcdqp::{NqpProblem, SolveReport};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_sec: u64) -> Result<(), String> {
    check(
        elapsed <= Duration::from_secs(limit_sec),
        format!("took {:.1}s, limit {limit_sec}s", elapsed.as_secs_f64()),
    )
}

/// Criterion 1: all four methods agree with the active-set enumeration oracle.
fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for k in 0..50u64 {
        let n = 2 + (k % 7) as usize;
        let prob = instances::gen_random_psd_nqp(n, 1000 + k);
        let (_, fstar) = oracle::active_set_nqp(&oracle::to_rows(prob.p()), prob.d());
        let x0 = vec![0.0; n];
        let mut base = BaselineOptions::new(1e-10);
        base.rng_seed = k;
        base.max_updates = Some(5_000_000);
        base.fista_max_iters = 5_000_000;
        let runs = [
            ("greedy", gcd::solve(&prob, &x0, &GcdOptions::new(1e-10).with_max_updates(5_000_000))),
            ("cyclic", baselines::cyclic_solve(&prob, &x0, &base)),
            ("random", baselines::randomized_solve(&prob, &x0, &base)),
            ("fista", baselines::fista_solve(&prob, &x0, &base)),
        ];
        for (name, r) in runs {
            let r = r.map_err(|e| format!("instance {k} {name}: {e}"))?;
            let err = (r.objective - fstar).abs();
            worst = worst.max(err);
            check(err <= 1e-6, format!("instance {k} (n={n}) {name}: |{} - {fstar}| = {err:e}", r.objective))?;
        }
    }
    within(start.elapsed(), 30)?;
    Ok(format!("50 instances x 4 methods, worst gap {worst:.1e}"))
}

/// Epoch of the first trace row whose objective gap satisfies `reached`.
fn epochs_to(report: &SolveReport, reached: impl Fn(f64) -> bool) -> Option<f64> {
    report.trace.iter().find(|r| reached(r.objective)).map(|r| r.epoch)
}

fn ordinal_epochs(
    label: &str,
    make: impl Fn(u64) -> NqpProblem,
    reached: impl Fn(f64, f64) -> bool,
) -> Outcome {
    let mut lines = Vec::new();
    for seed in 0..5u64 {
        let prob = make(seed);
        let n = prob.dim();
        let x0 = vec![0.0; n];
        let reference = gcd::solve(&prob, &x0, &GcdOptions::new(1e-11).with_max_updates(100_000 * n as u64))
            .map_err(|e| e.to_string())?;
        check(reference.converged, format!("{label} seed {seed}: reference run did not converge"))?;
        let fstar = reference.objective;

        let budget = 5_000 * n as u64;
        let greedy = gcd::solve(&prob, &x0, &GcdOptions::new(1e-9).with_max_updates(budget)).map_err(|e| e.to_string())?;
        let mut base = BaselineOptions::new(1e-9);
        base.rng_seed = seed;
        base.max_updates = Some(budget);
        let cyclic = baselines::cyclic_solve(&prob, &x0, &base).map_err(|e| e.to_string())?;
        let random = baselines::randomized_solve(&prob, &x0, &base).map_err(|e| e.to_string())?;

        let hit = |r: &SolveReport| epochs_to(r, |f| reached(f, fstar));
        let g = hit(&greedy).ok_or(format!("{label} seed {seed}: greedy never reached the target"))?;
        let c = hit(&cyclic).unwrap_or(f64::INFINITY);
        let r = hit(&random).unwrap_or(f64::INFINITY);
        check(g < c && g < r, format!("{label} seed {seed}: greedy {g} cyclic {c} random {r} epochs"))?;
        lines.push(format!("{g}/{c}/{r}"));
    }
    Ok(format!("epochs greedy/cyclic/random per seed: {}", lines.join(" ")))
}

/// Criterion 2: hard instance, objective error ≤ 1e-6.
fn hard_instance_trend() -> Outcome {
    let start = Instant::now();
    let out = ordinal_epochs("hard", |_| instances::gen_hard_nqp(200), |f, fs| f - fs <= 1e-6)?;
    within(start.elapsed(), 60)?;
    Ok(out)
}

/// Criterion 3: random PSD instance, relative objective error ≤ 1e-4.
fn random_instance_trend() -> Outcome {
    ordinal_epochs(
        "randpsd",
        |seed| instances::gen_random_psd_nqp(300, 300 + seed),
        |f, fs| (f - fs) / fs.abs().max(f64::MIN_POSITIVE) <= 1e-4,
    )
}

/// Criterion 4: every recorded update satisfies the sufficient-decrease bound.
fn sufficient_decrease() -> Outcome {
    let mut recorded = 0usize;
    let mut violations = 0usize;
    let mut k = 0u64;
    while recorded < 10_000 {
        let prob = match k % 3 {
            0 => instances::gen_random_psd_nqp(10 + (k as usize % 30), k),
            1 => instances::gen_hard_nqp(5 + (k as usize % 40)),
            _ => {
                let (p, d) = oracle::strictly_convex(3 + (k as usize % 20), k);
                let n = d.len();
                NqpProblem::new(
                    gcdqp::DenseMatrix::from_fn(n, n, |i, j| p[i][j]),
                    gcdqp::Vector::new(d).unwrap(),
                )
                .unwrap()
            }
        };
        let (p, d) = (oracle::to_rows(prob.p()), prob.d().to_vec());
        let q = prob.quadratic();
        let mut state = GcdState::new(q, &vec![0.0; prob.dim()]).unwrap();
        for _ in 0..400 {
            let before = state.x().to_vec();
            let f0 = oracle::objective(&p, &d, &before);
            let (i, c) = gcd::select_coordinate(&mut state, q);
            gcd::apply_update(&mut state, q, i, c.xhat);
            let f1 = oracle::objective(&p, &d, state.x());
            let step = state.x()[i] - before[i];
            if f1 - f0 > -(p[i][i] / 2.0) * step * step + 1e-12 * (1.0 + f0.abs()) {
                violations += 1;
            }
            recorded += 1;
        }
        k += 1;
    }
    check(violations == 0, format!("{violations} violations in {recorded} updates"))?;
    Ok(format!("{recorded} updates over {k} instances, 0 violations"))
}

/// Criterion 5: maintained gradient stays exact; per-update cost ≤ 20n.
fn gradient_maintenance() -> Outcome {
    let n = 400;
    let mut worst_dev = 0.0f64;
    let mut worst_flops = 0u64;
    for seed in 0..3u64 {
        let prob = instances::gen_random_psd_nqp(n, 40 + seed);
        let (p, d) = (oracle::to_rows(prob.p()), prob.d().to_vec());
        let q = prob.quadratic();
        let mut state = GcdState::new(q, &vec![0.0; n]).unwrap();
        for _block in 0..5 {
            for _ in 0..n {
                let before = state.flops();
                let (i, c) = gcd::select_coordinate(&mut state, q);
                gcd::apply_update(&mut state, q, i, c.xhat);
                worst_flops = worst_flops.max(state.flops() - before);
            }
            let exact = oracle::gradient(&p, &d, state.x());
            let gmax = state.gradient().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let dev = state.gradient().iter().zip(&exact).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            check(dev <= 1e-9 * (1.0 + gmax), format!("seed {seed}: deviation {dev:e}, max|g| {gmax:e}"))?;
            worst_dev = worst_dev.max(dev / (1.0 + gmax));
        }
    }
    check(worst_flops <= 20 * n as u64, format!("{worst_flops} flops per update > 20n"))?;
    Ok(format!("scaled deviation {worst_dev:.1e}, {:.1}n flops per update", worst_flops as f64 / n as f64))
}

/// Criterion 6: ALM at two tolerances against a tight reference.
/// The ordinal comparison needs the two tolerances to stop at different outer
/// iterates; when one multiplier step lands inside both, the runs are the same
/// computation and the seed is reported as coincident instead. Every seed still
/// goes through the termination and certificate checks.
fn alm_table() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut coincident = Vec::new();
    let mut seed = 0u64;
    while lines.len() < 5 {
        check(seed < 20, format!("only {} distinguishing seeds in 0..20", lines.len()))?;
        let prob = instances::gen_lin_nqp(20, 100, seed).problem;
        let x0 = vec![0.0; 100];
        let mut tight = AlmOptions::new(1e-9);
        // below ~1e-8 the subproblem residual is dominated by rounding once β is large
        tight.eps_k = EpsSchedule::Constant(1e-8);
        let reference = alm::solve(&prob, &x0, &tight).map_err(|e| e.to_string())?;
        let cert = alm::dual_residual(&prob, &reference.x, &reference.y);
        check(
            reference.converged && cert <= 1e-6,
            format!("seed {seed}: reference not a KKT point (dual residual {cert:e})"),
        )?;
        let fref = reference.objective;
        let mut relerr = Vec::new();
        let mut outers = Vec::new();
        for eps in [1e-2, 1e-3] {
            let r = alm::solve(&prob, &x0, &AlmOptions::new(eps)).map_err(|e| e.to_string())?;
            check(r.converged && r.primal_residual <= eps, format!("seed {seed} eps {eps}: ‖Ax−b‖ = {:e}", r.primal_residual))?;
            for row in &r.trace {
                check(
                    row.subproblem_delta <= 1e-3,
                    format!("seed {seed} eps {eps} outer {}: certificate {:e}", row.outer, row.subproblem_delta),
                )?;
            }
            relerr.push((r.objective - fref).abs() / fref.abs());
            outers.push(r.outer_iterations);
        }
        if outers[0] == outers[1] {
            coincident.push(seed.to_string());
        } else {
            check(relerr[1] < relerr[0], format!("seed {seed}: relerr {:e} (1e-3) not below {:e} (1e-2)", relerr[1], relerr[0]))?;
            lines.push(format!("{:.1e}>{:.1e}", relerr[0], relerr[1]));
        }
        seed += 1;
    }
    within(start.elapsed(), 120)?;
    Ok(format!(
        "relerr eps=1e-2 > eps=1e-3: {}; coincident stop seeds: [{}]",
        lines.join(" "),
        coincident.join(",")
    ))
}

fn nmf_run(seed: u64, rescale: bool) -> Result<nmf::NmfReport, String> {
    let s = instances::gen_synthetic_nmf(200, 200, 10, seed);
    let opts = NmfOptions { eps_k: 1e-3, fit_tol: 1e-3, max_outer: 200, rescale, audit_rescale: true, seed, ..Default::default() };
    nmf::altmin_solve(&s.problem, &opts, None).map_err(|e| e.to_string())
}

/// Criteria 7 and 8 share the same runs.
fn nmf_criteria() -> (Outcome, Outcome) {
    let start = Instant::now();
    let mut reports = Vec::new();
    for seed in 0..3u64 {
        match nmf_run(seed, true) {
            Ok(r) => reports.push(r),
            Err(e) => return (Err(e.clone()), Err(e)),
        }
    }
    let elapsed = start.elapsed();

    let c7 = (|| {
        let mut outers = Vec::new();
        for (seed, r) in reports.iter().enumerate() {
            check(
                r.state.converged && r.state.fit <= 1e-3 && r.state.outer <= 200,
                format!("seed {seed}: fit {:e} after {} outer iterations", r.state.fit, r.state.outer),
            )?;
            for w in r.half_step_objectives.windows(2) {
                check(w[1] <= w[0] + 1e-10, format!("seed {seed}: half-step objective {} -> {}", w[0], w[1]))?;
            }
            outers.push(r.state.outer.to_string());
        }
        within(elapsed, 180)?;
        Ok(format!("outer iterations to fit 1e-3: {}", outers.join(" ")))
    })();

    let c8 = (|| {
        let mut audits = 0;
        for (seed, r) in reports.iter().enumerate() {
            for a in &r.rescale_audits {
                check(
                    a.norm_mismatch <= 1e-10 && a.product_change <= 1e-10,
                    format!("seed {seed}: rescale audit {a:?}"),
                )?;
                audits += 1;
            }
        }
        check(audits > 0, "no rescale audits recorded")?;
        let with = &reports[0];
        let without = nmf_run(0, false)?;
        check(
            without.state.outer >= with.state.outer,
            format!("no-rescale run took {} outer iterations, rescaled {}", without.state.outer, with.state.outer),
        )?;
        Ok(format!(
            "{audits} audited rescales; seed 0 outer iterations {} rescaled vs {} without",
            with.state.outer, without.state.outer
        ))
    })();
    (c7, c8)
}

/// Criterion 9: repeated seeded CLI runs give identical traces modulo time.
fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_gcdqp");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let commands: [&[&str]; 5] = [
        &["solve-nqp", "--gen", "randpsd", "--n", "60", "--seed", "3", "--method", "random", "--eps", "1e-6"],
        &["compare", "--gen", "hard", "--n", "50", "--seed", "2", "--eps", "1e-6"],
        &["solve-linnqp", "--gen", "linnqp", "--m", "5", "--n", "20", "--seed", "4", "--eps", "1e-3"],
        &["nmf", "--gen", "nmf", "--m", "30", "--n", "25", "--r", "3", "--seed", "5", "--max-outer", "20"],
        &["gen", "--gen", "nmf", "--m", "6", "--n", "5", "--r", "2", "--seed", "9"],
    ];
    let mut compared = 0;
    for (k, args) in commands.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let dir = tmp.path().join(format!("{k}_{rep}"));
            let status = Command::new(bin)
                .args(*args)
                .arg("--out")
                .arg(&dir)
                .status()
                .map_err(|e| e.to_string())?;
            check(matches!(status.code(), Some(0) | Some(2)), format!("{args:?} exited with {status}"))?;
            outputs.push(dir);
        }
        compared += compare_dirs(&outputs[0], &outputs[1]).map_err(|e| format!("{args:?}: {e}"))?;
    }
    Ok(format!("{} commands, {compared} files identical", commands.len()))
}

fn compare_dirs(a: &Path, b: &Path) -> Result<usize, String> {
    let mut names: Vec<_> = std::fs::read_dir(a)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name())
        .filter(|n| n != "summary.txt")
        .collect();
    names.sort();
    for name in &names {
        let read = |d: &Path| std::fs::read_to_string(d.join(name)).map_err(|e| e.to_string());
        let (x, y) = (read(a)?, read(b)?);
        let same = if name.to_string_lossy().ends_with(".csv") {
            gcdqp_cli::strip_time_column(&x) == gcdqp_cli::strip_time_column(&y)
        } else {
            x == y
        };
        check(same, format!("{} differs", name.to_string_lossy()))?;
    }
    Ok(names.len())
}

fn main() {
    let (c7, c8) = nmf_criteria();
    let results: Vec<(&str, Outcome)> = vec![
        ("1 oracle equivalence", oracle_equivalence()),
        ("2 hard instance epochs", hard_instance_trend()),
        ("3 random PSD epochs", random_instance_trend()),
        ("4 sufficient decrease", sufficient_decrease()),
        ("5 gradient maintenance", gradient_maintenance()),
        ("6 ALM tolerances", alm_table()),
        ("7 NMF synthetic", c7),
        ("8 rescaling", c8),
        ("9 determinism", determinism()),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(msg) => println!("criterion {name}: PASS ({msg})"),
            Err(msg) => {
                failed += 1;
                println!("criterion {name}: FAIL ({msg})");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
