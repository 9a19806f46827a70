//! Jacobi-preconditioned conjugate gradients on the deflated Laplacian system.
//!
//! Every iterate is kept orthogonal to the all-ones vector, so the solver
//! converges to `L⁺y` for connected graphs. The stopping rule is the relative
//! residual `‖Lx - y‖₂ / ‖y‖₂ ≤ tol`. A residual tolerance `τ` bounds the
//! L-norm error by `√κ · τ · ‖L⁺y‖_L`, where `κ` is the condition number of `L`
//! on `𝟙⊥`. Callers holding an L-norm target `δ` pass `τ = δ / safety`, with
//! [`DEFAULT_SAFETY_FACTOR`] as the default `safety`.

use super::{dot, norm2, project_out_ones, CsrMatrix};
use crate::error::{Error, Result};

/// Divisor mapping an L-norm accuracy target onto a residual tolerance.
pub const DEFAULT_SAFETY_FACTOR: f64 = 100.0;

const MAX_RESTARTS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// `‖L·x - y‖₂ / ‖y‖₂` recomputed from the returned `x`, with `y`
    /// projected onto `𝟙⊥`.
    pub residual: f64,
    /// False when `max_iter` was reached before the tolerance; `solution` is
    /// then the best iterate seen.
    pub converged: bool,
}

/// A validated Laplacian together with its Jacobi preconditioner.
#[derive(Debug, Clone)]
pub struct LaplacianSolver<'a> {
    lap: &'a CsrMatrix,
    inv_diag: Vec<f64>,
}

impl<'a> LaplacianSolver<'a> {
    /// Checks that `lap` is square, symmetric, has nonpositive off-diagonal
    /// entries and zero row sums.
    pub fn new(lap: &'a CsrMatrix) -> Result<Self> {
        let n = lap.rows();
        if lap.cols() != n {
            return Err(Error::NotLaplacian(format!("{}x{} is not square", n, lap.cols())));
        }
        let diag = lap.diagonal();
        for r in 0..n {
            let mut sum = 0.0;
            let mut scale = diag[r].abs();
            for (c, v) in lap.row(r) {
                if !v.is_finite() {
                    return Err(Error::NotLaplacian(format!("non-finite entry at ({r}, {c})")));
                }
                sum += v;
                scale = scale.max(v.abs());
                if c != r {
                    if v > 0.0 {
                        return Err(Error::NotLaplacian(format!(
                            "positive off-diagonal {v} at ({r}, {c})"
                        )));
                    }
                    let t = lap.get(c, r);
                    if (t - v).abs() > 1e-12 * v.abs().max(t.abs()) {
                        return Err(Error::NotLaplacian(format!("asymmetric at ({r}, {c})")));
                    }
                }
            }
            if sum.abs() > 1e-10 * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::NotLaplacian(format!("row {r} sums to {sum:e}")));
            }
        }
        let inv_diag = diag
            .iter()
            .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
            .collect();
        Ok(Self { lap, inv_diag })
    }

    pub fn dim(&self) -> usize {
        self.lap.rows()
    }

    /// Solves `L x = y` for `x ⊥ 𝟙`.
    pub fn solve(&self, y: &[f64], tol: f64, max_iter: usize) -> Result<SolveResult> {
        let n = self.dim();
        if y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: y.len(),
            });
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!("solver tolerance {tol}")));
        }
        let mut b = y.to_vec();
        project_out_ones(&mut b);
        let bnorm = norm2(&b);
        if bnorm == 0.0 || n <= 1 {
            return Ok(SolveResult {
                solution: vec![0.0; n],
                iterations: 0,
                residual: 0.0,
                converged: true,
            });
        }

        let mut x = vec![0.0; n];
        let mut best_x = x.clone();
        let mut best_rel = 1.0;
        let mut r = b.clone();
        let mut z = vec![0.0; n];
        let mut p = vec![0.0; n];
        let mut ap = vec![0.0; n];
        let mut iterations = 0;
        let mut restarts = 0;

        'outer: loop {
            self.precondition(&r, &mut z);
            p.copy_from_slice(&z);
            let mut rz = dot(&r, &z);

            while iterations < max_iter {
                iterations += 1;
                self.lap.mul_vec_into(&p, &mut ap)?;
                let pap = dot(&p, &ap);
                if !(pap > 0.0) || !pap.is_finite() {
                    break 'outer;
                }
                let alpha = rz / pap;
                for i in 0..n {
                    x[i] += alpha * p[i];
                    r[i] -= alpha * ap[i];
                }
                let rel = norm2(&r) / bnorm;
                if rel < best_rel {
                    best_rel = rel;
                    best_x.copy_from_slice(&x);
                }
                if rel <= tol {
                    let true_rel = self.true_residual(&x, &b, bnorm, &mut ap)?;
                    if true_rel <= tol || restarts >= MAX_RESTARTS {
                        break 'outer;
                    }
                    // recursive residual drifted; restart from the true one
                    restarts += 1;
                    self.lap.mul_vec_into(&x, &mut ap)?;
                    for i in 0..n {
                        r[i] = b[i] - ap[i];
                    }
                    best_rel = true_rel;
                    best_x.copy_from_slice(&x);
                    continue 'outer;
                }
                self.precondition(&r, &mut z);
                let rz_new = dot(&r, &z);
                let beta = rz_new / rz;
                rz = rz_new;
                for i in 0..n {
                    p[i] = z[i] + beta * p[i];
                }
            }
            break;
        }

        let mut scratch = vec![0.0; n];
        let mut final_x = x;
        let last = self.true_residual(&final_x, &b, bnorm, &mut scratch)?;
        if last > tol && self.true_residual(&best_x, &b, bnorm, &mut scratch)? < last {
            final_x = best_x;
        }
        project_out_ones(&mut final_x);
        let residual = self.true_residual(&final_x, &b, bnorm, &mut scratch)?;
        Ok(SolveResult {
            solution: final_x,
            iterations,
            residual,
            converged: residual <= tol,
        })
    }

    fn precondition(&self, r: &[f64], z: &mut [f64]) {
        for ((zi, ri), di) in z.iter_mut().zip(r).zip(&self.inv_diag) {
            *zi = ri * di;
        }
        project_out_ones(z);
    }

    fn true_residual(&self, x: &[f64], b: &[f64], bnorm: f64, scratch: &mut [f64]) -> Result<f64> {
        self.lap.mul_vec_into(x, scratch)?;
        let sq: f64 = scratch.iter().zip(b).map(|(lx, bi)| (lx - bi) * (lx - bi)).sum();
        Ok(sq.sqrt() / bnorm)
    }
}

/// Solves `L x = y` to relative residual `tol` (see module docs).
pub fn solve_laplacian(lap: &CsrMatrix, y: &[f64], tol: f64, max_iter: usize) -> Result<SolveResult> {
    LaplacianSolver::new(lap)?.solve(y, tol, max_iter)
}
