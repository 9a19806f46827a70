//! Sparse kernels, the iterative Laplacian solver, and the dense exact
//! pseudoinverse used as ground truth at desk scale.

mod dense;
mod pcg;
mod sparse;

pub use dense::{dense_limit, pinv_apply_exact, DensePseudoinverse, DEFAULT_DENSE_LIMIT};
pub use pcg::{solve_laplacian, LaplacianSolver, SolveResult, DEFAULT_SAFETY_FACTOR};
pub use sparse::{spmv, CsrMatrix};

/// Subtracts the mean so that `x ⊥ 𝟙`.
pub fn project_out_ones(x: &mut [f64]) {
    if x.is_empty() {
        return;
    }
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    for v in x.iter_mut() {
        *v -= mean;
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
