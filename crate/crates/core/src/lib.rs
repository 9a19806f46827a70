//! Spectral sparsification of weighted undirected graphs.
//!
//! Edges are sampled with probability proportional to `w_e · R_e`, where
//! `R_e` is the effective resistance across the edge, and kept with weight
//! `count_e · w_e / (q · p_e)`. The resulting subgraph `H` satisfies
//! `(1 - ε) xᵀL_G x ≤ xᵀL_H x ≤ (1 + ε) xᵀL_G x` with constant probability
//! once `q = Θ(n log n / ε²)`.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`graph`] | [`WeightedGraph`], edge-list I/O, incidence and Laplacian |
//! | [`linalg`] | CSR kernels, the PCG Laplacian solver, the dense exact `L⁺` |
//! | [`resistance`] | random-projection resistance oracle and exact resistances |
//! | [`sparsify`] | probabilities, alias sampling, the sparsify pipeline |
//! | [`verify`] | dense certification of sparsifiers |
//! | [`cli`] | the `respars` command line |

pub mod alias;
pub mod cli;
pub mod error;
pub mod generators;
pub mod graph;
pub mod linalg;
pub mod resistance;
pub mod rng;
pub mod sparsify;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{Edge, EdgeId, WeightedGraph};
pub use linalg::{CsrMatrix, SolveResult};
pub use resistance::{
    build_oracle, default_delta, exact_resistances, jl_dimension, OracleConfig, ResistanceOracle,
};
pub use sparsify::{
    default_q, mixed_probabilities, resistance_probabilities, sample_sparsifier, sparsify,
    SampleConfig, SamplingMode, SparsifierResult,
};
pub use verify::{
    cut_check, degree_bound_check, pi_matrix_checks, spectral_bounds, VerificationReport,
};
