//! Exact `L⁺` by Cholesky factorization of the Laplacian grounded at vertex 0.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::{project_out_ones, CsrMatrix};
use crate::error::{Error, Result};

pub const DEFAULT_DENSE_LIMIT: usize = 2000;

/// Vertex cap for dense oracles: `RESPARS_DENSE_LIMIT` if set and valid,
/// otherwise [`DEFAULT_DENSE_LIMIT`].
pub fn dense_limit() -> usize {
    std::env::var("RESPARS_DENSE_LIMIT")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_DENSE_LIMIT)
}

pub(crate) fn check_dense_limit(n: usize) -> Result<()> {
    let limit = dense_limit();
    if n > limit {
        Err(Error::DenseLimitExceeded { n, limit })
    } else {
        Ok(())
    }
}

/// Factored grounded Laplacian. Applying it to `y ⊥ 𝟙` yields `L⁺y` exactly
/// up to rounding.
#[derive(Debug, Clone)]
pub struct DensePseudoinverse {
    n: usize,
    chol: Option<Cholesky<f64, Dyn>>,
}

impl DensePseudoinverse {
    pub fn new(lap: &CsrMatrix) -> Result<Self> {
        let n = lap.rows();
        if lap.cols() != n {
            return Err(Error::NotLaplacian(format!("{}x{} is not square", n, lap.cols())));
        }
        check_dense_limit(n)?;
        if n <= 1 {
            return Ok(Self { n, chol: None });
        }
        let mut grounded = DMatrix::<f64>::zeros(n - 1, n - 1);
        for r in 1..n {
            for (c, v) in lap.row(r) {
                if c > 0 {
                    grounded[(r - 1, c - 1)] = v;
                }
            }
        }
        let chol = Cholesky::new(grounded).ok_or(Error::SingularGroundedSystem)?;
        Ok(Self { n, chol: Some(chol) })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `L⁺ y`. The component of `y` along `𝟙` is discarded.
    pub fn apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: y.len(),
            });
        }
        let Some(chol) = &self.chol else {
            return Ok(vec![0.0; self.n]);
        };
        let mut b = y.to_vec();
        project_out_ones(&mut b);
        let rhs = DVector::from_column_slice(&b[1..]);
        let sol = chol.solve(&rhs);
        let mut x = Vec::with_capacity(self.n);
        x.push(0.0);
        x.extend(sol.iter());
        project_out_ones(&mut x);
        Ok(x)
    }

    /// Effective resistance `(χ_u - χ_v)ᵀ L⁺ (χ_u - χ_v)`.
    pub fn resistance(&self, u: usize, v: usize) -> Result<f64> {
        for &x in &[u, v] {
            if x >= self.n {
                return Err(Error::VertexOutOfRange { vertex: x, n: self.n });
            }
        }
        if u == v {
            return Ok(0.0);
        }
        let mut y = vec![0.0; self.n];
        y[u] = 1.0;
        y[v] = -1.0;
        let x = self.apply(&y)?;
        Ok(x[u] - x[v])
    }

    /// The full `n × n` pseudoinverse `P Ĝ⁻¹ P`, where `Ĝ⁻¹` is the grounded
    /// inverse padded with a zero row and column and `P = I - 𝟙𝟙ᵀ/n`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut full = DMatrix::<f64>::zeros(n, n);
        let Some(chol) = &self.chol else {
            return full;
        };
        let inv = chol.inverse();
        full.view_mut((1, 1), (n - 1, n - 1)).copy_from(&inv);
        let row_means: DVector<f64> = full.column_mean();
        let col_means = full.row_mean();
        let grand = row_means.mean();
        for i in 0..n {
            for j in 0..n {
                full[(i, j)] += grand - row_means[i] - col_means[j];
            }
        }
        full
    }
}

/// Exact `L⁺ y` via the grounded factorization.
pub fn pinv_apply_exact(lap: &CsrMatrix, y: &[f64]) -> Result<Vec<f64>> {
    DensePseudoinverse::new(lap)?.apply(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightedGraph;

    #[test]
    fn single_edge() {
        let g = WeightedGraph::from_edges(2, [(0, 1, 1.0)]).unwrap();
        let x = pinv_apply_exact(&g.laplacian(), &[1.0, -1.0]).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-15 && (x[1] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn ones_map_to_zero() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 3.0)]).unwrap();
        let x = pinv_apply_exact(&g.laplacian(), &[2.0, 2.0, 2.0]).unwrap();
        assert!(x.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn triangle_resistance() {
        let tri = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let x = pinv_apply_exact(&tri.laplacian(), &[1.0, -1.0, 0.0]).unwrap();
        assert!((x[0] - x[1] - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn disconnected_is_singular() {
        let g = WeightedGraph::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(matches!(
            DensePseudoinverse::new(&g.laplacian()),
            Err(Error::SingularGroundedSystem)
        ));
    }

    #[test]
    fn matrix_matches_apply() {
        let g = WeightedGraph::from_edges(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 0.5), (0, 3, 1.5)])
            .unwrap();
        let pinv = DensePseudoinverse::new(&g.laplacian()).unwrap();
        let m = pinv.matrix();
        for j in 0..4 {
            let mut e = vec![0.0; 4];
            e[j] = 1.0;
            let col = pinv.apply(&e).unwrap();
            for i in 0..4 {
                assert!((m[(i, j)] - col[i]).abs() < 1e-13);
            }
        }
    }
}
