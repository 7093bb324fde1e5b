//! Box-constrained total-variation program on one sub-band:
//!
//! ```text
//! minimize  ||t||_F^2 + lambda * TV(t)   subject to  lower <= t <= 1
//! ```
//!
//! TV is anisotropic (l1 norm of forward differences, zero across the
//! boundary). The solver is a Split Bregman iteration with two splittings:
//! `d ~ grad t` carries the l1 term and `w ~ t` carries the box.

use crate::error::{Error, Result};
use crate::image::Plane;
use crate::transmission::TransmissionMap;

pub const DEFAULT_TOL: f64 = 1e-4;
pub const DEFAULT_MAX_ITERS: usize = 100;
pub const DEFAULT_SWEEPS: usize = 2;

/// Default Bregman penalty for a given TV weight.
pub fn default_mu(lambda: f64) -> f64 {
    2.0 * lambda + 0.1
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxTvProblem {
    pub lower: Plane,
    pub lambda: f64,
    pub mu: f64,
    pub tol: f64,
    pub max_iters: usize,
    /// Gauss-Seidel sweeps per outer iteration.
    pub sweeps: usize,
}

impl BoxTvProblem {
    /// Problem with default solver settings.
    pub fn new(lower: Plane, lambda: f64) -> Result<Self> {
        let problem = Self {
            lower,
            lambda,
            mu: default_mu(lambda.max(0.0)),
            tol: DEFAULT_TOL,
            max_iters: DEFAULT_MAX_ITERS,
            sweeps: DEFAULT_SWEEPS,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_sweeps(mut self, sweeps: usize) -> Self {
        self.sweeps = sweeps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(bad) = self
            .lower
            .values()
            .iter()
            .find(|&&v| !(v > 0.0 && v <= 1.0))
        {
            return Err(Error::OutOfRange(format!(
                "lower bound {bad} outside (0, 1]"
            )));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be finite and non-negative, got {}",
                self.lambda
            )));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mu must be positive, got {}",
                self.mu
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iters == 0 || self.sweeps == 0 {
            return Err(Error::InvalidParameter(
                "max_iters and sweeps must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverDiagnostics {
    pub iterations: usize,
    pub final_objective: f64,
    pub final_rel_change: f64,
    pub converged: bool,
}

/// Per-pixel lower bound on the low-band transmission implied by
/// non-negative scene radiance: `max_c (1 - I_c / A_c)`, clamped to
/// `[epsilon, 1]`.
pub fn lower_bound_plane(low_bands: &[Plane; 3], airlight: [f64; 3], epsilon: f64) -> Result<Plane> {
    if airlight.iter().any(|&a| !(a > 0.0)) {
        return Err(Error::OutOfRange(format!(
            "airlight {airlight:?} must be positive"
        )));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon {epsilon} outside (0, 1]"
        )));
    }
    low_bands[0].ensure_same_dims(&low_bands[1])?;
    low_bands[0].ensure_same_dims(&low_bands[2])?;
    let [r, g, b] = low_bands;
    let [ar, ag, ab] = airlight;
    Ok(Plane::from_fn(r.rows(), r.cols(), |y, x| {
        let bound = (1.0 - r.get(y, x) / ar)
            .max(1.0 - g.get(y, x) / ag)
            .max(1.0 - b.get(y, x) / ab);
        bound.clamp(epsilon, 1.0)
    }))
}

/// Anisotropic total variation with zero differences across the boundary.
pub fn tv_anisotropic(plane: &Plane) -> f64 {
    let (rows, cols) = plane.dims();
    let v = plane.values();
    let mut total = 0.0;
    for r in 0..rows {
        let row = &v[r * cols..(r + 1) * cols];
        for c in 0..cols {
            if c + 1 < cols {
                total += (row[c + 1] - row[c]).abs();
            }
            if r + 1 < rows {
                total += (v[(r + 1) * cols + c] - row[c]).abs();
            }
        }
    }
    total
}

pub fn objective(t: &Plane, lambda: f64) -> f64 {
    t.sum_sq() + lambda * tv_anisotropic(t)
}

#[inline]
fn shrink(x: f64, threshold: f64) -> f64 {
    if x > threshold {
        x - threshold
    } else if x < -threshold {
        x + threshold
    } else {
        0.0
    }
}

/// Solves the box-constrained TV program by Split Bregman iteration.
///
/// Each outer iteration performs:
/// 1. a few Gauss-Seidel sweeps on `((2 + mu) I + mu grad^T grad) t = mu grad^T (d - b) + mu (w - b_w)`,
/// 2. `d = shrink(grad t + b, lambda / mu)`,
/// 3. `w = clamp(t + b_w, lower, 1)`,
/// 4. `b += grad t - d`, `b_w += t - w`.
///
/// The iterate is projected onto the box before returning, so the result is
/// always feasible even when `max_iters` is hit first.
pub fn solve_swto(problem: &BoxTvProblem) -> Result<(TransmissionMap, SolverDiagnostics)> {
    problem.validate()?;
    let (rows, cols) = problem.lower.dims();
    let n = rows * cols;
    let lower = problem.lower.values();
    let mu = problem.mu;
    let threshold = problem.lambda / mu;

    let mut t = lower.to_vec();
    let mut w = lower.to_vec();
    let mut bw = vec![0.0; n];
    // horizontal differences live in columns 0..cols-1, vertical in rows 0..rows-1
    let mut dx = vec![0.0; n];
    let mut dy = vec![0.0; n];
    let mut bx = vec![0.0; n];
    let mut by = vec![0.0; n];
    forward_diffs(&t, rows, cols, &mut dx, &mut dy);

    let mut rhs = vec![0.0; n];
    let mut prev = vec![0.0; n];
    let mut iterations = 0;
    let mut rel_change = f64::INFINITY;
    let mut converged = false;

    while iterations < problem.max_iters {
        iterations += 1;
        prev.copy_from_slice(&t);

        // rhs = mu * grad^T (d - b) + mu * (w - b_w)
        for r in 0..rows {
            for c in 0..cols {
                let i = r * cols + c;
                let mut div = 0.0;
                if c + 1 < cols {
                    div -= dx[i] - bx[i];
                }
                if c > 0 {
                    div += dx[i - 1] - bx[i - 1];
                }
                if r + 1 < rows {
                    div -= dy[i] - by[i];
                }
                if r > 0 {
                    div += dy[i - cols] - by[i - cols];
                }
                rhs[i] = mu * (div + w[i] - bw[i]);
            }
        }

        for _ in 0..problem.sweeps {
            gauss_seidel_sweep(&mut t, &rhs, rows, cols, mu);
        }

        let mut residual_sq = 0.0;
        for r in 0..rows {
            for c in 0..cols {
                let i = r * cols + c;
                if c + 1 < cols {
                    let gx = t[i + 1] - t[i];
                    let d = shrink(gx + bx[i], threshold);
                    dx[i] = d;
                    bx[i] += gx - d;
                    residual_sq += (gx - d) * (gx - d);
                }
                if r + 1 < rows {
                    let gy = t[i + cols] - t[i];
                    let d = shrink(gy + by[i], threshold);
                    dy[i] = d;
                    by[i] += gy - d;
                    residual_sq += (gy - d) * (gy - d);
                }
                let wi = (t[i] + bw[i]).clamp(lower[i], 1.0);
                w[i] = wi;
                bw[i] += t[i] - wi;
                residual_sq += (t[i] - wi) * (t[i] - wi);
            }
        }

        let mut diff_sq = 0.0;
        let mut prev_sq = 0.0;
        for (a, b) in t.iter().zip(&prev) {
            diff_sq += (a - b) * (a - b);
            prev_sq += b * b;
        }
        let scale = prev_sq.sqrt().max(1e-12);
        rel_change = diff_sq.sqrt() / scale;
        if rel_change < problem.tol && residual_sq.sqrt() / scale < problem.tol {
            converged = true;
            break;
        }
    }

    for (ti, &lo) in t.iter_mut().zip(lower) {
        *ti = ti.clamp(lo, 1.0);
    }
    let plane = Plane::new(rows, cols, t)?;
    let diagnostics = SolverDiagnostics {
        iterations,
        final_objective: objective(&plane, problem.lambda),
        final_rel_change: rel_change,
        converged,
    };
    Ok((TransmissionMap::new(plane)?, diagnostics))
}

fn forward_diffs(t: &[f64], rows: usize, cols: usize, dx: &mut [f64], dy: &mut [f64]) {
    for r in 0..rows {
        for c in 0..cols {
            let i = r * cols + c;
            dx[i] = if c + 1 < cols { t[i + 1] - t[i] } else { 0.0 };
            dy[i] = if r + 1 < rows { t[i + cols] - t[i] } else { 0.0 };
        }
    }
}

/// One raster-order Gauss-Seidel sweep for `((2 + mu) I + mu L) t = rhs`,
/// `L` being the Neumann graph Laplacian.
fn gauss_seidel_sweep(t: &mut [f64], rhs: &[f64], rows: usize, cols: usize, mu: f64) {
    let base = 2.0 + mu;
    for r in 0..rows {
        for c in 0..cols {
            let i = r * cols + c;
            let mut sum = 0.0;
            let mut count = 0.0;
            if c > 0 {
                sum += t[i - 1];
                count += 1.0;
            }
            if c + 1 < cols {
                sum += t[i + 1];
                count += 1.0;
            }
            if r > 0 {
                sum += t[i - cols];
                count += 1.0;
            }
            if r + 1 < rows {
                sum += t[i + cols];
                count += 1.0;
            }
            t[i] = (rhs[i] + mu * sum) / (base + mu * count);
        }
    }
}
