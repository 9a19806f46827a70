//! Dense certification of a sparsifier `H` against its base graph `G`:
//! the extreme generalized eigenvalues of `(L_H, L_G)` on `𝟙⊥`, cut and
//! resistance preservation, the per-vertex reweighting bound, and the
//! algebraic identities of the weighted edge projection
//! `Π = W^{1/2} B L⁺ Bᵀ W^{1/2}`.

use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::linalg::{dense_limit, DensePseudoinverse};
use crate::resistance::exact_resistances;
use crate::rng::{stream_rng, VERIFY_STREAM_BASE};

/// Absolute tolerance for the projection identities.
pub const PI_TOLERANCE: f64 = 1e-8;

fn check_dense(n: usize) -> Result<()> {
    let limit = dense_limit();
    if n > limit {
        return Err(Error::DenseLimitExceeded { n, limit });
    }
    Ok(())
}

fn same_vertices(g: &WeightedGraph, h: &WeightedGraph) -> Result<()> {
    if g.num_vertices() != h.num_vertices() {
        return Err(Error::VertexSetMismatch {
            left: g.num_vertices(),
            right: h.num_vertices(),
        });
    }
    Ok(())
}

fn dense_laplacian(g: &WeightedGraph) -> DMatrix<f64> {
    let n = g.num_vertices();
    let mut l = DMatrix::zeros(n, n);
    for e in g.edges() {
        l[(e.u, e.u)] += e.w;
        l[(e.v, e.v)] += e.w;
        l[(e.u, e.v)] -= e.w;
        l[(e.v, e.u)] -= e.w;
    }
    l
}

/// Orthonormal basis of `𝟙⊥` as the last `n - 1` columns of the Householder
/// reflection that sends `e_0` to `𝟙/√n`.
fn ones_complement_basis(n: usize) -> DMatrix<f64> {
    let s = 1.0 / (n as f64).sqrt();
    let mut u = vec![-s; n];
    u[0] += 1.0;
    let uu: f64 = u.iter().map(|x| x * x).sum();
    DMatrix::from_fn(n, n - 1, |i, j| {
        let col = j + 1;
        let delta = if i == col { 1.0 } else { 0.0 };
        delta - 2.0 * u[i] * u[col] / uu
    })
}

/// Eigenvalues of `L` restricted to `𝟙⊥`, ascending.
pub fn nonzero_laplacian_spectrum(g: &WeightedGraph) -> Result<Vec<f64>> {
    let n = g.num_vertices();
    check_dense(n)?;
    if n < 2 {
        return Ok(Vec::new());
    }
    let p = ones_complement_basis(n);
    let reduced = p.transpose() * dense_laplacian(g) * &p;
    let mut ev: Vec<f64> = SymmetricEigen::new(reduced).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Precomputed `V = P U Λ^{-1/2}` for a connected base graph, where
/// `Pᵀ L P = U Λ Uᵀ`. Then `Vᵀ L_H V` has the generalized eigenvalues of
/// `(L_H, L_G)` on `𝟙⊥`.
#[derive(Debug, Clone)]
pub struct SpectralReference {
    n: usize,
    whiten: DMatrix<f64>,
}

impl SpectralReference {
    pub fn new(g: &WeightedGraph) -> Result<Self> {
        let n = g.num_vertices();
        check_dense(n)?;
        g.require_connected()?;
        if n < 2 {
            return Err(Error::InvalidParameter("spectral bounds need n >= 2".into()));
        }
        let p = ones_complement_basis(n);
        let reduced = p.transpose() * dense_laplacian(g) * &p;
        let eig = SymmetricEigen::new(reduced);
        let mut u = eig.eigenvectors;
        for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
            if !(lambda > 0.0) {
                return Err(Error::Disconnected);
            }
            let s = 1.0 / lambda.sqrt();
            u.column_mut(j).scale_mut(s);
        }
        Ok(Self { n, whiten: p * u })
    }

    /// `(λ_min, λ_max)` of the pencil `(L_H, L_G)` on `𝟙⊥`.
    pub fn bounds(&self, h: &WeightedGraph) -> Result<(f64, f64)> {
        if h.num_vertices() != self.n {
            return Err(Error::VertexSetMismatch {
                left: self.n,
                right: h.num_vertices(),
            });
        }
        let m = self.whiten.transpose() * dense_laplacian(h) * &self.whiten;
        let ev = SymmetricEigen::new(m).eigenvalues;
        let lo = ev.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok((lo, hi))
    }
}

/// Tight constants `(a, b)` with `a·xᵀL_Gx ≤ xᵀL_Hx ≤ b·xᵀL_Gx` on `𝟙⊥`.
pub fn spectral_bounds(g: &WeightedGraph, h: &WeightedGraph) -> Result<(f64, f64)> {
    same_vertices(g, h)?;
    SpectralReference::new(g)?.bounds(h)
}

/// Measured deviations of `Π` from its defining identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PiCheckReport {
    /// `max |Π² - Π|`.
    pub idempotence_error: f64,
    /// `|tr Π - (n - 1)|`.
    pub trace_error: f64,
    /// `max_e |Π(e,e) - w_e R_e|` with `R_e` from the exact resistance oracle.
    pub diagonal_error: f64,
    /// `max_e |Π(e,e) - ‖Π(·,e)‖²|`.
    pub column_norm_error: f64,
}

impl PiCheckReport {
    pub fn passed(&self) -> bool {
        [
            self.idempotence_error,
            self.trace_error,
            self.diagonal_error,
            self.column_norm_error,
        ]
        .iter()
        .all(|&e| e <= PI_TOLERANCE)
    }
}

/// Materializes `Π` for a connected graph.
pub fn pi_matrix(g: &WeightedGraph) -> Result<DMatrix<f64>> {
    let n = g.num_vertices();
    check_dense(n)?;
    g.require_connected()?;
    let m = g.num_edges();
    let lplus = DensePseudoinverse::new(&g.laplacian())?.matrix();
    let mut bw = DMatrix::<f64>::zeros(m, n);
    for (i, e) in g.edges().iter().enumerate() {
        let s = e.w.sqrt();
        bw[(i, e.u)] = -s;
        bw[(i, e.v)] = s;
    }
    let left = &bw * lplus;
    Ok(left * bw.transpose())
}

pub fn pi_matrix_report(g: &WeightedGraph) -> Result<PiCheckReport> {
    let pi = pi_matrix(g)?;
    let n = g.num_vertices();
    let resistances = exact_resistances(g)?;
    let sq = &pi * &pi;
    let idempotence_error = (&sq - &pi).amax();
    let trace_error = (pi.trace() - (n as f64 - 1.0)).abs();
    let mut diagonal_error: f64 = 0.0;
    let mut column_norm_error: f64 = 0.0;
    for (i, (e, r)) in g.edges().iter().zip(&resistances).enumerate() {
        diagonal_error = diagonal_error.max((pi[(i, i)] - e.w * r).abs());
        column_norm_error = column_norm_error.max((pi[(i, i)] - pi.column(i).norm_squared()).abs());
    }
    Ok(PiCheckReport {
        idempotence_error,
        trace_error,
        diagonal_error,
        column_norm_error,
    })
}

/// True when `Π` is idempotent, has trace `n - 1`, diagonal `w_e R_e`, and
/// `Π(e,e) = ‖Π(·,e)‖²`, all within [`PI_TOLERANCE`].
pub fn pi_matrix_checks(g: &WeightedGraph) -> Result<bool> {
    Ok(pi_matrix_report(g)?.passed())
}

fn cut_value(g: &WeightedGraph, side: &[bool]) -> f64 {
    g.edges()
        .iter()
        .filter(|e| side[e.u] != side[e.v])
        .map(|e| e.w)
        .sum()
}

/// Worst `|cut_H / cut_G - 1|` over all singleton cuts and `trials` uniformly
/// random vertex subsets. Empty and full subsets are skipped.
pub fn cut_check(g: &WeightedGraph, h: &WeightedGraph, trials: usize, seed: u64) -> Result<f64> {
    same_vertices(g, h)?;
    let n = g.num_vertices();
    let mut worst: f64 = 0.0;
    let mut side = vec![false; n];
    let mut consider = |side: &[bool]| {
        let cg = cut_value(g, side);
        if cg > 0.0 {
            worst = worst.max((cut_value(h, side) / cg - 1.0).abs());
        }
    };
    for v in 0..n {
        side[v] = true;
        consider(&side);
        side[v] = false;
    }
    let mut rng = stream_rng(seed, VERIFY_STREAM_BASE);
    for _ in 0..trials {
        for s in side.iter_mut() {
            *s = rng.random::<bool>();
        }
        consider(&side);
    }
    Ok(worst)
}

/// `max_v Σ_{e∋v, e∈H} (w̃_e / w_e) / deg_G(v)`.
pub fn degree_bound_check(g: &WeightedGraph, h: &WeightedGraph) -> Result<f64> {
    same_vertices(g, h)?;
    let mut acc = vec![0.0; g.num_vertices()];
    for e in h.edges() {
        let id = g
            .find_edge(e.u, e.v)
            .ok_or(Error::EdgeNotInGraph { u: e.u, v: e.v })?;
        let ratio = e.w / g.edge(id).w;
        acc[e.u] += ratio;
        acc[e.v] += ratio;
    }
    Ok(acc
        .iter()
        .zip(g.degrees())
        .filter(|&(_, d)| d > 0)
        .map(|(a, d)| a / d as f64)
        .fold(0.0, f64::max))
}

/// Worst `|R^H_e / R^G_e - 1|` over the edges of `G`; infinite when `H` is
/// disconnected.
pub fn resistance_worst_ratio(g: &WeightedGraph, h: &WeightedGraph) -> Result<f64> {
    same_vertices(g, h)?;
    let rg = exact_resistances(g)?;
    if !h.is_connected() {
        return Ok(f64::INFINITY);
    }
    let pinv_h = DensePseudoinverse::new(&h.laplacian())?;
    let mut worst: f64 = 0.0;
    for (e, r) in g.edges().iter().zip(&rg) {
        worst = worst.max((pinv_h.resistance(e.u, e.v)? / r - 1.0).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub epsilon: f64,
    pub rayleigh_min: f64,
    pub rayleigh_max: f64,
    pub cut_worst_ratio: f64,
    pub resistance_worst_ratio: f64,
    pub degree_bound_max: f64,
    pub pass: bool,
}

impl VerificationReport {
    /// One `key=value` per line, fixed key order.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "epsilon={}", self.epsilon);
        let _ = writeln!(out, "rayleigh_min={}", self.rayleigh_min);
        let _ = writeln!(out, "rayleigh_max={}", self.rayleigh_max);
        let _ = writeln!(out, "cut_worst_ratio={}", self.cut_worst_ratio);
        let _ = writeln!(out, "resistance_worst_ratio={}", self.resistance_worst_ratio);
        let _ = writeln!(out, "degree_bound_max={}", self.degree_bound_max);
        let _ = writeln!(out, "pass={}", self.pass);
        out
    }

    /// JSON object with the same keys; non-finite values become `null`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs every check; `pass` holds when the spectral range lies within
/// `[1 - ε, 1 + ε]`.
pub fn verify(g: &WeightedGraph, h: &WeightedGraph, epsilon: f64, cut_trials: usize, seed: u64) -> Result<VerificationReport> {
    same_vertices(g, h)?;
    let (rayleigh_min, rayleigh_max) = spectral_bounds(g, h)?;
    let cut_worst_ratio = cut_check(g, h, cut_trials, seed)?;
    let resistance_worst_ratio = resistance_worst_ratio(g, h)?;
    let degree_bound_max = degree_bound_check(g, h)?;
    let pass = rayleigh_min >= 1.0 - epsilon && rayleigh_max <= 1.0 + epsilon;
    Ok(VerificationReport {
        epsilon,
        rayleigh_min,
        rayleigh_max,
        cut_worst_ratio,
        resistance_worst_ratio,
        degree_bound_max,
        pass,
    })
}
