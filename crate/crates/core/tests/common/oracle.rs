//! Brute-force reference computations for tests. Nothing here calls into the
//! solver code paths it is used to check.
#![allow(dead_code, clippy::needless_range_loop, clippy::manual_memcpy)]

pub type Mat = Vec<Vec<f64>>;

pub fn to_rows(m: &gcdqp::DenseMatrix) -> Mat {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

/// `½ Σ_i Σ_j x_i P_ij x_j + Σ_i d_i x_i`, term by term.
pub fn objective(p: &Mat, d: &[f64], x: &[f64]) -> f64 {
    let n = d.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += x[i] * p[i][j] * x[j];
        }
    }
    let mut lin = 0.0;
    for i in 0..n {
        lin += d[i] * x[i];
    }
    0.5 * quad + lin
}

/// `Px + d` accumulated column by column.
pub fn gradient(p: &Mat, d: &[f64], x: &[f64]) -> Vec<f64> {
    let n = d.len();
    let mut g = d.to_vec();
    for j in 0..n {
        for i in 0..n {
            g[i] += p[i][j] * x[j];
        }
    }
    g
}

pub fn matvec(a: &Mat, x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| {
            let mut s = 0.0;
            for j in 0..x.len() {
                s += row[j] * x[j];
            }
            s
        })
        .collect()
}

/// Gaussian elimination with partial pivoting. `None` when (near) singular.
pub fn solve_linear(mut a: Mat, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in (col + 1)..n {
            let f = a[r][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in (i + 1)..n {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}

/// Exact NQP minimizer by enumerating every free set `S`: solve
/// `P_SS x_S = −d_S`, keep points with `x_S ≥ 0`, return the best.
pub fn active_set_nqp(p: &Mat, d: &[f64]) -> (Vec<f64>, f64) {
    let n = d.len();
    assert!(n <= 16);
    let mut best = (vec![0.0; n], 0.0);
    for mask in 1u32..(1 << n) {
        let free: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let sub: Mat = free.iter().map(|&i| free.iter().map(|&j| p[i][j]).collect()).collect();
        let rhs: Vec<f64> = free.iter().map(|&i| -d[i]).collect();
        let Some(xs) = solve_linear(sub, rhs) else { continue };
        if xs.iter().any(|v| *v < -1e-12) {
            continue;
        }
        let mut x = vec![0.0; n];
        for (k, &i) in free.iter().enumerate() {
            x[i] = xs[k].max(0.0);
        }
        let f = objective(p, d, &x);
        if f < best.1 {
            best = (x, f);
        }
    }
    best
}

/// Exact minimizer of `½xᵀQx + cᵀx` s.t. `Ax = b, x ≥ 0` by enumerating free
/// sets and solving the equality-constrained KKT system on each.
pub fn active_set_lin_nqp(q: &Mat, c: &[f64], a: &Mat, b: &[f64]) -> Option<(Vec<f64>, f64)> {
    let n = c.len();
    let m = b.len();
    assert!(n <= 14);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for mask in 1u32..(1 << n) {
        let free: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let k = free.len();
        let dim = k + m;
        let mut kkt = vec![vec![0.0; dim]; dim];
        let mut rhs = vec![0.0; dim];
        for (r, &i) in free.iter().enumerate() {
            for (s, &j) in free.iter().enumerate() {
                kkt[r][s] = q[i][j];
            }
            for l in 0..m {
                kkt[r][k + l] = a[l][i];
                kkt[k + l][r] = a[l][i];
            }
            rhs[r] = -c[i];
        }
        for l in 0..m {
            rhs[k + l] = b[l];
        }
        let Some(sol) = solve_linear(kkt, rhs) else { continue };
        if sol[..k].iter().any(|v| *v < -1e-10) {
            continue;
        }
        let mut x = vec![0.0; n];
        for (r, &i) in free.iter().enumerate() {
            x[i] = sol[r].max(0.0);
        }
        let f = objective(q, c, &x);
        if best.as_ref().is_none_or(|(_, bf)| f < *bf) {
            best = Some((x, f));
        }
    }
    best
}

/// KKT residual `√(Σ_{x_i=0} min(0,g_i)² + Σ_{x_i>0} g_i²)`, written out
/// independently of the library.
pub fn kkt(x: &[f64], g: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        if x[i] == 0.0 {
            if g[i] < 0.0 {
                s += g[i] * g[i];
            }
        } else {
            s += g[i] * g[i];
        }
    }
    s.sqrt()
}

/// Small strictly convex test instance: `P = GᵀG + μI` from a simple LCG.
pub fn strictly_convex(n: usize, seed: u64) -> (Mat, Vec<f64>) {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    let g: Mat = (0..n).map(|_| (0..n).map(|_| next()).collect()).collect();
    let mut p = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                p[i][j] += g[k][i] * g[k][j];
            }
        }
        p[i][i] += 0.1;
    }
    let d: Vec<f64> = (0..n).map(|_| 2.0 * next()).collect();
    (p, d)
}
