//! Reference solver for the box-constrained TV program, written without any
//! code from the library solver.
//!
//! Projected gradient ascent on the dual. For a dual field `p` (one entry
//! per forward difference, `|p| <= lambda`), the inner minimiser over the box
//! is `t(p) = clamp(-D^T p / 2, lower, 1)` and the dual gradient is `D t(p)`.
//! Every `t(p)` is feasible, so its primal objective bounds the optimum from
//! above while the dual value bounds it from below.

#![allow(dead_code)]

pub struct OracleSolution {
    pub t: Vec<f64>,
    pub primal: f64,
    pub dual: f64,
}

impl OracleSolution {
    pub fn gap(&self) -> f64 {
        self.primal - self.dual
    }
}

fn diffs(t: &[f64], rows: usize, cols: usize) -> (Vec<f64>, Vec<f64>) {
    let mut gx = vec![0.0; rows * cols];
    let mut gy = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            let i = r * cols + c;
            if c + 1 < cols {
                gx[i] = t[i + 1] - t[i];
            }
            if r + 1 < rows {
                gy[i] = t[i + cols] - t[i];
            }
        }
    }
    (gx, gy)
}

/// `D^T p` for the forward-difference operator with no boundary terms.
fn adjoint(px: &[f64], py: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            let i = r * cols + c;
            if c + 1 < cols {
                out[i] -= px[i];
                out[i + 1] += px[i];
            }
            if r + 1 < rows {
                out[i] -= py[i];
                out[i + cols] += py[i];
            }
        }
    }
    out
}

pub fn primal_objective(t: &[f64], rows: usize, cols: usize, lambda: f64) -> f64 {
    let (gx, gy) = diffs(t, rows, cols);
    let sq: f64 = t.iter().map(|v| v * v).sum();
    let tv: f64 = gx.iter().chain(&gy).map(|v| v.abs()).sum();
    sq + lambda * tv
}

fn inner(px: &[f64], py: &[f64], lower: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    adjoint(px, py, rows, cols)
        .iter()
        .zip(lower)
        .map(|(&s, &lo)| (-0.5 * s).clamp(lo, 1.0))
        .collect()
}

fn dual_value(t: &[f64], px: &[f64], py: &[f64], rows: usize, cols: usize) -> f64 {
    let (gx, gy) = diffs(t, rows, cols);
    let sq: f64 = t.iter().map(|v| v * v).sum();
    let pair: f64 = px.iter().zip(&gx).chain(py.iter().zip(&gy)).map(|(p, g)| p * g).sum();
    sq + pair
}

/// Runs `iters` ascent steps of size `step` and returns the final inner
/// minimiser along with both bounds.
pub fn solve(lower: &[f64], rows: usize, cols: usize, lambda: f64, step: f64, iters: usize) -> OracleSolution {
    assert_eq!(lower.len(), rows * cols);
    let n = rows * cols;
    let mut px = vec![0.0; n];
    let mut py = vec![0.0; n];
    for _ in 0..iters {
        let t = inner(&px, &py, lower, rows, cols);
        let (gx, gy) = diffs(&t, rows, cols);
        for i in 0..n {
            px[i] = (px[i] + step * gx[i]).clamp(-lambda, lambda);
            py[i] = (py[i] + step * gy[i]).clamp(-lambda, lambda);
        }
    }
    let t = inner(&px, &py, lower, rows, cols);
    OracleSolution {
        primal: primal_objective(&t, rows, cols, lambda),
        dual: dual_value(&t, &px, &py, rows, cols),
        t,
    }
}

/// Ascent step. The dual gradient is Lipschitz with constant at most 4
/// (`||D||^2 <= 8`, halved by the quadratic), so any step below 0.25 is
/// stable; 1e-3 leaves a visible duality gap at `lambda = 10`.
pub const STEP: f64 = 0.1;
pub const ITERS: usize = 100_000;

pub fn solve_default(lower: &[f64], rows: usize, cols: usize, lambda: f64) -> OracleSolution {
    solve(lower, rows, cols, lambda, STEP, ITERS)
}
