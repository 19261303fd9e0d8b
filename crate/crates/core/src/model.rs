//! Problem definitions shared by every solver.

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::{dot, DenseMatrix, Vector};

/// Absolute per-entry tolerance for the symmetry check.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// First invariant a problem violates. Indices are zero-based.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NotSquare { rows: usize, cols: usize },
    Dimension { what: &'static str, expected: usize, got: usize },
    Asymmetry { row: usize, col: usize, diff: f64 },
    NonpositiveDiagonal { index: usize, value: f64 },
    /// Neither `Q_ii > 0` nor a nonzero constraint column.
    DeadCoordinate { index: usize },
    NegativeEntry { row: usize, col: usize, value: f64 },
    Rank { rank: usize, max: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotSquare { rows, cols } => write!(f, "matrix is {rows}x{cols}, not square"),
            Violation::Dimension { what, expected, got } => {
                write!(f, "{what} has length {got}, expected {expected}")
            }
            Violation::Asymmetry { row, col, diff } => {
                write!(f, "asymmetry at ({row},{col}) of {diff:e}")
            }
            Violation::NonpositiveDiagonal { index, value } => {
                write!(f, "nonpositive diagonal at {index} ({value})")
            }
            Violation::DeadCoordinate { index } => {
                write!(f, "coordinate {index} has zero curvature and an empty constraint column")
            }
            Violation::NegativeEntry { row, col, value } => {
                write!(f, "negative entry at ({row},{col}) ({value})")
            }
            Violation::Rank { rank, max } => write!(f, "rank {rank} outside 1..={max}"),
        }
    }
}

impl std::error::Error for Violation {}

fn check_symmetric(p: &DenseMatrix) -> Result<(), Violation> {
    if !p.is_square() {
        return Err(Violation::NotSquare { rows: p.rows(), cols: p.cols() });
    }
    let n = p.rows();
    for i in 0..n {
        for j in (i + 1)..n {
            let diff = p[(i, j)] - p[(j, i)];
            if diff.abs() > SYMMETRY_TOL {
                return Err(Violation::Asymmetry { row: i, col: j, diff });
            }
        }
    }
    Ok(())
}

/// Borrowed quadratic `½xᵀPx + dᵀx`; the form every coordinate solver works on.
#[derive(Clone, Copy, Debug)]
pub struct Quadratic<'a> {
    pub p: &'a DenseMatrix,
    pub d: &'a [f64],
}

impl<'a> Quadratic<'a> {
    pub fn new(p: &'a DenseMatrix, d: &'a [f64]) -> Self {
        debug_assert!(p.is_square() && p.rows() == d.len());
        Self { p, d }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        let px = self.p.mul_vec(x);
        0.5 * dot(x, &px) + dot(self.d, x)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.p.mul_vec(x);
        for (gi, di) in g.iter_mut().zip(self.d) {
            *gi += di;
        }
        g
    }

    /// Objective from a gradient `g = Px + d` already at hand: `½xᵀ(g + d)`.
    pub fn objective_from_gradient(&self, x: &[f64], g: &[f64]) -> f64 {
        0.5 * x
            .iter()
            .zip(g)
            .zip(self.d)
            .map(|((xi, gi), di)| xi * (gi + di))
            .sum::<f64>()
    }
}

/// `min ½xᵀPx + dᵀx  s.t. x ≥ 0` with symmetric PSD `P` and `P_ii > 0`.
#[derive(Clone, Debug)]
pub struct NqpProblem {
    p: DenseMatrix,
    d: Vector,
}

impl NqpProblem {
    pub fn new(p: DenseMatrix, d: Vector) -> Result<Self> {
        Self::validate_parts(&p, &d)?;
        Ok(Self { p, d })
    }

    /// Checks the construction invariants without taking ownership.
    pub fn validate_parts(p: &DenseMatrix, d: &[f64]) -> Result<(), Violation> {
        check_symmetric(p)?;
        if d.len() != p.rows() {
            return Err(Violation::Dimension { what: "d", expected: p.rows(), got: d.len() });
        }
        for i in 0..p.rows() {
            let v = p[(i, i)];
            if v <= 0.0 {
                return Err(Violation::NonpositiveDiagonal { index: i, value: v });
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), Violation> {
        Self::validate_parts(&self.p, &self.d)
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn p(&self) -> &DenseMatrix {
        &self.p
    }

    pub fn d(&self) -> &Vector {
        &self.d
    }

    pub fn quadratic(&self) -> Quadratic<'_> {
        Quadratic::new(&self.p, &self.d)
    }

    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        Ok(self.quadratic().objective(x))
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        Ok(self.quadratic().gradient(x))
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(())
    }
}

/// `min ½xᵀQx + cᵀx  s.t. Ax = b, x ≥ 0`.
#[derive(Clone, Debug)]
pub struct LinNqpProblem {
    q: DenseMatrix,
    c: Vector,
    a: DenseMatrix,
    b: Vector,
}

impl LinNqpProblem {
    pub fn new(q: DenseMatrix, c: Vector, a: DenseMatrix, b: Vector) -> Result<Self> {
        let prob = Self { q, c, a, b };
        prob.validate()?;
        Ok(prob)
    }

    pub fn validate(&self) -> Result<(), Violation> {
        check_symmetric(&self.q)?;
        let n = self.q.rows();
        if self.c.len() != n {
            return Err(Violation::Dimension { what: "c", expected: n, got: self.c.len() });
        }
        if self.a.cols() != n {
            return Err(Violation::Dimension { what: "columns of A", expected: n, got: self.a.cols() });
        }
        if self.b.len() != self.a.rows() {
            return Err(Violation::Dimension { what: "b", expected: self.a.rows(), got: self.b.len() });
        }
        for i in 0..n {
            let column_nonzero = (0..self.a.rows()).any(|r| self.a[(r, i)] != 0.0);
            if self.q[(i, i)] <= 0.0 && !column_nonzero {
                return Err(Violation::DeadCoordinate { index: i });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn constraints(&self) -> usize {
        self.b.len()
    }

    pub fn q(&self) -> &DenseMatrix {
        &self.q
    }

    pub fn c(&self) -> &Vector {
        &self.c
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &Vector {
        &self.b
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        Quadratic::new(&self.q, &self.c).objective(x)
    }

    /// `‖Ax − b‖`.
    pub fn primal_residual(&self, x: &[f64]) -> f64 {
        let ax = self.a.mul_vec(x);
        ax.iter()
            .zip(self.b.iter())
            .map(|(l, r)| (l - r) * (l - r))
            .sum::<f64>()
            .sqrt()
    }
}

/// `min ½‖XYᵀ − M‖_F²` over nonnegative `X` (m×r) and `Y` (n×r).
#[derive(Clone, Debug)]
pub struct NmfProblem {
    m: DenseMatrix,
    rank: usize,
}

impl NmfProblem {
    pub fn new(m: DenseMatrix, rank: usize) -> Result<Self> {
        let prob = Self { m, rank };
        prob.validate()?;
        Ok(prob)
    }

    pub fn validate(&self) -> Result<(), Violation> {
        for i in 0..self.m.rows() {
            for (j, &v) in self.m.row(i).iter().enumerate() {
                if v < 0.0 {
                    return Err(Violation::NegativeEntry { row: i, col: j, value: v });
                }
            }
        }
        let max = self.m.rows().min(self.m.cols());
        if self.rank == 0 || self.rank > max {
            return Err(Violation::Rank { rank: self.rank, max });
        }
        Ok(())
    }

    pub fn data(&self) -> &DenseMatrix {
        &self.m
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}
