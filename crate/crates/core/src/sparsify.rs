//! Spectral sparsification by sampling edges with probability proportional to
//! `w_e · R_e`, with replacement, and reweighting each kept edge to
//! `count_e · w_e / (q · p_e)`.
//!
//! The degree-bounded mode mixes in the term `1 / (n · min(deg u, deg v))` so
//! that no vertex's incident edges are blown up by more than a factor two in
//! total, at the cost of at least `8 n ln n` samples.

use std::fmt;
use std::str::FromStr;

use log::warn;

use crate::alias::AliasTable;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::resistance::{default_delta, exact_resistances, OracleConfig, ResistanceOracle};
use crate::rng::{stream_rng, SAMPLING_STREAM};

pub const DEFAULT_C0: f64 = 4.0;

/// Relative floor applied to approximate resistances before normalizing.
const RESISTANCE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplingMode {
    Resistance,
    DegreeBounded,
}

impl fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplingMode::Resistance => "resistance",
            SamplingMode::DegreeBounded => "degree-bounded",
        })
    }
}

impl FromStr for SamplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "resistance" => Ok(SamplingMode::Resistance),
            "degree-bounded" | "degree_bounded" => Ok(SamplingMode::DegreeBounded),
            other => Err(Error::InvalidParameter(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleConfig {
    pub epsilon: f64,
    /// Explicit sample count; `default_q(n, epsilon, c0)` otherwise.
    pub q: Option<usize>,
    pub c0: f64,
    pub seed: u64,
    pub mode: SamplingMode,
    /// Solver accuracy for the oracle; `default_delta` otherwise.
    pub delta_override: Option<f64>,
    /// Use dense exact resistances instead of the projection oracle.
    pub exact: bool,
    /// Keep the per-edge probabilities in the result.
    pub keep_probabilities: bool,
}

impl SampleConfig {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        Self {
            epsilon,
            q: None,
            c0: DEFAULT_C0,
            seed,
            mode: SamplingMode::Resistance,
            delta_override: None,
            exact: false,
            keep_probabilities: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::EpsilonOutOfRange(self.epsilon));
        }
        if !(self.c0 > 0.0 && self.c0.is_finite()) {
            return Err(Error::InvalidParameter(format!("c0 {}", self.c0)));
        }
        if self.q == Some(0) {
            return Err(Error::InvalidParameter("q must be positive".into()));
        }
        if let Some(d) = self.delta_override {
            if !(d > 0.0) {
                return Err(Error::InvalidParameter(format!("delta {d}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparsifierResult {
    pub graph: WeightedGraph,
    pub q_used: usize,
    pub distinct_edges: usize,
    pub probabilities: Option<Vec<f64>>,
    pub mode: SamplingMode,
}

/// `ceil(c0 · n · ln n / ε²)`.
pub fn default_q(n: usize, epsilon: f64, c0: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    if !(c0 > 0.0 && c0.is_finite()) {
        return Err(Error::InvalidParameter(format!("c0 {c0}")));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be at least 2, got {n}")));
    }
    let n = n as f64;
    Ok((c0 * n * n.ln() / (epsilon * epsilon)).ceil() as usize)
}

/// Minimum sample count for the degree bound: `ceil(8 n ln n)`.
pub fn degree_bounded_min_q(n: usize) -> usize {
    let n = n as f64;
    (8.0 * n * n.ln()).ceil() as usize
}

/// `p_e = w_e r_e / Σ_f w_f r_f`.
pub fn resistance_probabilities(graph: &WeightedGraph, r_approx: &[f64]) -> Result<Vec<f64>> {
    if r_approx.len() != graph.num_edges() {
        return Err(Error::DimensionMismatch {
            expected: graph.num_edges(),
            got: r_approx.len(),
        });
    }
    if let Some(bad) = r_approx.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
        return Err(Error::InvalidProbabilities(format!("resistance {bad}")));
    }
    let max = r_approx.iter().copied().fold(0.0, f64::max);
    if !(max > 0.0) {
        return Err(Error::InvalidProbabilities("all resistances are zero".into()));
    }
    let floor = RESISTANCE_FLOOR * max;
    let mut p: Vec<f64> = graph
        .edges()
        .iter()
        .zip(r_approx)
        .map(|(e, &r)| e.w * r.max(floor))
        .collect();
    normalize(&mut p);
    Ok(p)
}

/// Average of the resistance distribution and `1 / (n · min(deg u, deg v))`,
/// renormalized to sum to one.
pub fn mixed_probabilities(graph: &WeightedGraph, r_approx: &[f64]) -> Result<Vec<f64>> {
    let p = resistance_probabilities(graph, r_approx)?;
    let deg = graph.degrees();
    let n = graph.num_vertices() as f64;
    let mut mixed: Vec<f64> = graph
        .edges()
        .iter()
        .zip(&p)
        .map(|(e, &pe)| 0.5 * (pe + 1.0 / (n * deg[e.u].min(deg[e.v]) as f64)))
        .collect();
    normalize(&mut mixed);
    Ok(mixed)
}

fn normalize(p: &mut [f64]) {
    let total: f64 = p.iter().sum();
    for x in p.iter_mut() {
        *x /= total;
    }
}

/// Draws `q` edges i.i.d. from `p` and reweights them.
pub fn sample_sparsifier(graph: &WeightedGraph, p: &[f64], q: usize, seed: u64) -> Result<SparsifierResult> {
    if p.len() != graph.num_edges() {
        return Err(Error::DimensionMismatch {
            expected: graph.num_edges(),
            got: p.len(),
        });
    }
    if q == 0 {
        return Err(Error::InvalidParameter("q must be positive".into()));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidProbabilities(format!("sums to {total}")));
    }
    let table = AliasTable::new(p)?;
    let mut rng = stream_rng(seed, SAMPLING_STREAM);
    let mut counts = vec![0u64; p.len()];
    for _ in 0..q {
        counts[table.sample(&mut rng)] += 1;
    }
    let qf = q as f64;
    let kept: Vec<(usize, usize, f64)> = graph
        .edges()
        .iter()
        .zip(&counts)
        .zip(p)
        .filter(|((_, &c), _)| c > 0)
        .map(|((e, &c), &pe)| (e.u, e.v, (c as f64 / (qf * pe)) * e.w))
        .collect();
    let distinct_edges = kept.len();
    Ok(SparsifierResult {
        graph: WeightedGraph::from_edges(graph.num_vertices(), kept)?,
        q_used: q,
        distinct_edges,
        probabilities: None,
        mode: SamplingMode::Resistance,
    })
}

/// Edge resistances as the sampler sees them: exact, or from a freshly built
/// projection oracle at the configured accuracy.
pub fn sampling_resistances(graph: &WeightedGraph, cfg: &SampleConfig) -> Result<Vec<f64>> {
    if cfg.exact {
        return exact_resistances(graph);
    }
    let delta = match cfg.delta_override {
        Some(d) => d,
        None => default_delta(graph, cfg.epsilon)?,
    };
    let oracle = ResistanceOracle::build(graph, &OracleConfig::new(cfg.epsilon, delta, cfg.seed))?;
    oracle.all_edge_resistances(graph)
}

/// Full pipeline: resistances, mode-dependent probabilities, sampling.
pub fn sparsify(graph: &WeightedGraph, cfg: &SampleConfig) -> Result<SparsifierResult> {
    cfg.validate()?;
    graph.require_connected()?;
    let n = graph.num_vertices();
    if graph.num_edges() == 0 {
        return Ok(SparsifierResult {
            graph: graph.clone(),
            q_used: 0,
            distinct_edges: 0,
            probabilities: cfg.keep_probabilities.then(Vec::new),
            mode: cfg.mode,
        });
    }
    if cfg.epsilon <= 1.0 / (n as f64).sqrt() {
        warn!(
            "epsilon {} is at or below 1/sqrt(n) = {:.4}; the sample count will exceed m",
            cfg.epsilon,
            1.0 / (n as f64).sqrt()
        );
    }
    let r = sampling_resistances(graph, cfg)?;
    sparsify_with_resistances(graph, &r, cfg)
}

/// Sampling half of [`sparsify`] for callers that already hold resistance
/// estimates.
pub fn sparsify_with_resistances(
    graph: &WeightedGraph,
    r_approx: &[f64],
    cfg: &SampleConfig,
) -> Result<SparsifierResult> {
    cfg.validate()?;
    let n = graph.num_vertices();
    let mut q = match cfg.q {
        Some(q) => q,
        None => default_q(n, cfg.epsilon, cfg.c0)?,
    };
    let p = match cfg.mode {
        SamplingMode::Resistance => resistance_probabilities(graph, r_approx)?,
        SamplingMode::DegreeBounded => {
            q = q.max(degree_bounded_min_q(n));
            mixed_probabilities(graph, r_approx)?
        }
    };
    let mut result = sample_sparsifier(graph, &p, q, cfg.seed)?;
    result.mode = cfg.mode;
    if cfg.keep_probabilities {
        result.probabilities = Some(p);
    }
    Ok(result)
}
