//! Effective resistances: the exact dense oracle and the randomized
//! projection oracle `Z̃ ≈ Q W^{1/2} B L⁺`.
//!
//! `Q` is a `k × m` matrix of independent `±1/√k` entries. Row `i` of `Q W^{1/2} B`
//! is accumulated edge by edge and handed to the Laplacian solver, so only the
//! `k × n` result is ever stored. Queries return `‖Z̃(χ_u - χ_v)‖²`.

use std::io::{Read, Write};

use log::warn;
use rand::RngCore;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::linalg::{DensePseudoinverse, LaplacianSolver, DEFAULT_SAFETY_FACTOR};
use crate::rng::{stream_rng, ORACLE_STREAM_BASE};

/// Iteration cap for each row solve unless configured otherwise.
pub const DEFAULT_MAX_ITER: usize = 10_000;

const MAGIC: &[u8; 4] = b"RSPO";
const FORMAT_VERSION: u8 = 1;

/// `ceil(24 ln n / ε²)`.
pub fn jl_dimension(n: usize, epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!("projection needs n >= 2, got {n}")));
    }
    Ok((24.0 * (n as f64).ln() / (epsilon * epsilon)).ceil() as usize)
}

/// Solver accuracy that provably keeps the projection within `(1 ± ε)²`:
/// `(ε/3) · sqrt(2(1-ε) w_min / ((1+ε) n³ w_max))`.
pub fn default_delta(graph: &WeightedGraph, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    graph.require_connected()?;
    let (Some(w_min), Some(w_max)) = (graph.min_weight(), graph.max_weight()) else {
        return Err(Error::InvalidParameter("graph has no edges".into()));
    };
    let n = graph.num_vertices() as f64;
    let inner = 2.0 * (1.0 - epsilon) * w_min / ((1.0 + epsilon) * n.powi(3) * w_max);
    Ok(epsilon / 3.0 * inner.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    pub epsilon: f64,
    /// L-norm accuracy target for each row solve.
    pub delta: f64,
    pub seed: u64,
    /// Overrides `jl_dimension(n, epsilon)`.
    pub k: Option<usize>,
    /// The solver runs to residual `delta / safety`.
    pub safety: f64,
    pub max_iter: usize,
}

impl OracleConfig {
    pub fn new(epsilon: f64, delta: f64, seed: u64) -> Self {
        Self {
            epsilon,
            delta,
            seed,
            k: None,
            safety: DEFAULT_SAFETY_FACTOR,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowSolveStats {
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// The `k × n` projected-potential matrix and its build parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceOracle {
    n: usize,
    k: usize,
    epsilon: f64,
    delta: f64,
    seed: u64,
    /// Row-major `k × n`.
    ztilde: Vec<f64>,
    solve_stats: Vec<RowSolveStats>,
}

/// Builds the oracle with default solver settings.
pub fn build_oracle(graph: &WeightedGraph, epsilon: f64, delta: f64, seed: u64) -> Result<ResistanceOracle> {
    ResistanceOracle::build(graph, &OracleConfig::new(epsilon, delta, seed))
}

impl ResistanceOracle {
    pub fn build(graph: &WeightedGraph, cfg: &OracleConfig) -> Result<Self> {
        let n = graph.num_vertices();
        graph.require_connected()?;
        if !(cfg.delta > 0.0) {
            return Err(Error::InvalidParameter(format!("delta {}", cfg.delta)));
        }
        if !(cfg.safety > 0.0) {
            return Err(Error::InvalidParameter(format!("safety factor {}", cfg.safety)));
        }
        let k = match cfg.k {
            Some(0) => return Err(Error::InvalidParameter("k must be positive".into())),
            Some(k) => {
                if !(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0) {
                    return Err(Error::EpsilonOutOfRange(cfg.epsilon));
                }
                k
            }
            None => jl_dimension(n, cfg.epsilon)?,
        };
        if cfg.epsilon <= 1.0 / (n as f64).sqrt() {
            warn!(
                "epsilon {} is at or below 1/sqrt(n) = {:.4}",
                cfg.epsilon,
                1.0 / (n as f64).sqrt()
            );
        }

        let lap = graph.laplacian();
        let solver = LaplacianSolver::new(&lap)?;
        let tol = cfg.delta / cfg.safety;
        let scale = 1.0 / (k as f64).sqrt();
        let sqrt_w: Vec<f64> = graph.edges().iter().map(|e| e.w.sqrt()).collect();

        let mut ztilde = vec![0.0; k * n];
        let mut solve_stats = vec![
            RowSolveStats {
                iterations: 0,
                residual: 0.0,
                converged: true,
            };
            k
        ];
        ztilde
            .par_chunks_mut(n)
            .zip(solve_stats.par_iter_mut())
            .enumerate()
            .try_for_each(|(row, (zrow, stats))| -> Result<()> {
                let y = projected_row(graph, &sqrt_w, scale, cfg.seed, row);
                let res = solver.solve(&y, tol, cfg.max_iter)?;
                if !res.converged && res.residual > cfg.delta {
                    return Err(Error::SolverFailed {
                        row,
                        residual: res.residual,
                        iterations: res.iterations,
                    });
                }
                zrow.copy_from_slice(&res.solution);
                *stats = RowSolveStats {
                    iterations: res.iterations,
                    residual: res.residual,
                    converged: res.converged,
                };
                Ok(())
            })?;

        Ok(Self {
            n,
            k,
            epsilon: cfg.epsilon,
            delta: cfg.delta,
            seed: cfg.seed,
            ztilde,
            solve_stats,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Per-row solver summaries; empty for an oracle loaded from disk.
    pub fn solve_stats(&self) -> &[RowSolveStats] {
        &self.solve_stats
    }

    /// Row `i` of `Z̃`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.ztilde[i * self.n..(i + 1) * self.n]
    }

    /// Approximate effective resistance `‖Z̃(χ_u - χ_v)‖²`.
    pub fn query(&self, u: usize, v: usize) -> Result<f64> {
        for &x in &[u, v] {
            if x >= self.n {
                return Err(Error::VertexOutOfRange { vertex: x, n: self.n });
            }
        }
        Ok(self
            .ztilde
            .chunks_exact(self.n)
            .map(|row| {
                let d = row[u] - row[v];
                d * d
            })
            .sum())
    }

    /// `query(u_e, v_e)` for every edge, in edge order.
    pub fn all_edge_resistances(&self, graph: &WeightedGraph) -> Result<Vec<f64>> {
        if graph.num_vertices() != self.n {
            return Err(Error::VertexSetMismatch {
                left: graph.num_vertices(),
                right: self.n,
            });
        }
        let mut out = vec![0.0; graph.num_edges()];
        for row in self.ztilde.chunks_exact(self.n) {
            for (acc, e) in out.iter_mut().zip(graph.edges()) {
                let d = row[e.u] - row[e.v];
                *acc += d * d;
            }
        }
        Ok(out)
    }

    /// Binary dump: `RSPO`, version byte, then little-endian `n: u64`,
    /// `k: u64`, `epsilon: f64`, `delta: f64`, `seed: u64` and the `k × n`
    /// values row-major as `f64`.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(MAGIC)?;
        out.write_all(&[FORMAT_VERSION])?;
        out.write_all(&(self.n as u64).to_le_bytes())?;
        out.write_all(&(self.k as u64).to_le_bytes())?;
        out.write_all(&self.epsilon.to_le_bytes())?;
        out.write_all(&self.delta.to_le_bytes())?;
        out.write_all(&self.seed.to_le_bytes())?;
        let mut buf = Vec::with_capacity(8 * self.n);
        for row in self.ztilde.chunks_exact(self.n) {
            buf.clear();
            for v in row {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            out.write_all(&buf)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::OracleFormat("bad magic".into()));
        }
        let mut version = [0u8; 1];
        input.read_exact(&mut version)?;
        if version[0] != FORMAT_VERSION {
            return Err(Error::OracleFormat(format!("unsupported version {}", version[0])));
        }
        let n = read_u64(&mut input)? as usize;
        let k = read_u64(&mut input)? as usize;
        let epsilon = f64::from_bits(read_u64(&mut input)?);
        let delta = f64::from_bits(read_u64(&mut input)?);
        let seed = read_u64(&mut input)?;
        let len = n
            .checked_mul(k)
            .filter(|&l| n > 0 && k > 0 && l <= (1 << 34))
            .ok_or_else(|| Error::OracleFormat(format!("bad dimensions {k}x{n}")))?;
        let mut bytes = vec![0u8; 8 * len];
        input.read_exact(&mut bytes)?;
        let ztilde = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Self {
            n,
            k,
            epsilon,
            delta,
            seed,
            ztilde,
            solve_stats: Vec::new(),
        })
    }
}

fn read_u64<R: Read>(input: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    input.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

/// Row `row` of `Q W^{1/2} B`, with signs of `Q` drawn 64 per word from the
/// row's own stream in edge order.
fn projected_row(graph: &WeightedGraph, sqrt_w: &[f64], scale: f64, seed: u64, row: usize) -> Vec<f64> {
    let mut rng = stream_rng(seed, ORACLE_STREAM_BASE + row as u64);
    let mut y = vec![0.0; graph.num_vertices()];
    let mut bits = 0u64;
    for (i, (e, sw)) in graph.edges().iter().zip(sqrt_w).enumerate() {
        if i % 64 == 0 {
            bits = rng.next_u64();
        }
        let sign = if bits & 1 == 1 { 1.0 } else { -1.0 };
        bits >>= 1;
        let c = sign * scale * sw;
        y[e.v] += c;
        y[e.u] -= c;
    }
    y
}

/// Exact `R_e` for every edge from the dense grounded factorization.
pub fn exact_resistances(graph: &WeightedGraph) -> Result<Vec<f64>> {
    graph.require_connected()?;
    let pinv = DensePseudoinverse::new(&graph.laplacian())?;
    graph
        .edges()
        .par_iter()
        .map(|e| pinv.resistance(e.u, e.v))
        .collect()
}

/// Exact resistance between arbitrary vertex pairs.
pub fn exact_pair_resistances(graph: &WeightedGraph, pairs: &[(usize, usize)]) -> Result<Vec<f64>> {
    graph.require_connected()?;
    let pinv = DensePseudoinverse::new(&graph.laplacian())?;
    pairs.par_iter().map(|&(u, v)| pinv.resistance(u, v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    fn unit(n: usize, edges: &[(usize, usize)]) -> WeightedGraph {
        WeightedGraph::from_edges(n, edges.iter().map(|&(u, v)| (u, v, 1.0))).unwrap()
    }

    #[test]
    fn jl_dimension_values() {
        // 24 ln 3 = 26.367...
        assert_eq!(jl_dimension(3, 1.0).unwrap(), 27);
        // 24 * 4.605170185988091 / 0.25 = 442.096...
        assert_eq!(jl_dimension(100, 0.5).unwrap(), 443);
        assert!(matches!(jl_dimension(100, 0.0), Err(Error::EpsilonOutOfRange(_))));
        assert!(jl_dimension(100, 1.5).is_err());
    }

    #[test]
    fn default_delta_values() {
        let g = unit(2, &[(0, 1)]);
        let d = default_delta(&g, 0.5).unwrap();
        let expected = (1.0f64 / 12.0).sqrt() / 6.0;
        assert!((d - expected).abs() < 1e-15);
        assert!((d - 0.04811).abs() < 1e-5);
        assert!(default_delta(&g, 1.0).is_err());

        let path = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 3.0)]).unwrap();
        let base = default_delta(&path, 0.3).unwrap();
        assert_eq!(default_delta(&path.scaled(2.0).unwrap(), 0.3).unwrap(), base);
        let mut prev = base;
        for w in [10.0, 100.0, 1e4, 1e8] {
            let g = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, w)]).unwrap();
            let d = default_delta(&g, 0.3).unwrap();
            assert!(d < prev);
            prev = d;
        }
    }

    #[test]
    fn single_edge_oracle_is_exact() {
        let g = unit(2, &[(0, 1)]);
        for seed in 0..5 {
            let o = build_oracle(&g, 0.5, 1e-8, seed).unwrap();
            let r = o.query(0, 1).unwrap();
            assert!((r - 1.0).abs() < 1e-12, "seed {seed}: {r}");
        }
    }

    #[test]
    fn complete_graph_queries() {
        let g = generators::complete(10);
        let o = build_oracle(&g, 0.3, 1e-8, 7).unwrap();
        for u in 0..10 {
            for v in (u + 1)..10 {
                let r = o.query(u, v).unwrap();
                assert!((0.7 * 0.2..=1.3 * 0.2).contains(&r), "({u},{v}) {r}");
            }
        }
    }

    #[test]
    fn path_queries() {
        let g = unit(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let o = build_oracle(&g, 0.5, 1e-8, 3).unwrap();
        let r = o.query(0, 4).unwrap();
        assert!((2.0..=6.0).contains(&r));
        assert_eq!(o.query(2, 2).unwrap(), 0.0);
        assert_eq!(o.query(1, 3).unwrap(), o.query(3, 1).unwrap());
        assert!(matches!(o.query(0, 5), Err(Error::VertexOutOfRange { vertex: 5, n: 5 })));

        let p3 = unit(3, &[(0, 1), (1, 2)]);
        let o = build_oracle(&p3, 0.5, 1e-8, 3).unwrap();
        assert!((1.0..=3.0).contains(&o.query(0, 2).unwrap()));
    }

    #[test]
    fn rows_orthogonal_to_ones() {
        let g = generators::grid(4, 5);
        let o = build_oracle(&g, 0.5, 1e-6, 11).unwrap();
        for i in 0..o.k() {
            assert!(o.row(i).iter().sum::<f64>().abs() < 1e-10);
        }
        assert_eq!(o.solve_stats().len(), o.k());
    }

    #[test]
    fn tree_edge_resistances() {
        let g = WeightedGraph::from_edges(5, [(0, 1, 1.0), (1, 2, 2.0), (1, 3, 0.5), (3, 4, 4.0)]).unwrap();
        let o = build_oracle(&g, 0.5, 1e-8, 1).unwrap();
        let approx = o.all_edge_resistances(&g).unwrap();
        for (r, e) in approx.iter().zip(g.edges()) {
            assert!((r * e.w - 1.0).abs() <= 0.5);
        }
        let total: f64 = approx.iter().zip(g.edges()).map(|(r, e)| r * e.w).sum();
        assert!((2.0..=6.0).contains(&total));
    }

    #[test]
    fn exact_examples() {
        let g = WeightedGraph::from_edges(2, [(0, 1, 4.0)]).unwrap();
        assert!((exact_resistances(&g).unwrap()[0] - 0.25).abs() < 1e-15);
        let tri = unit(3, &[(0, 1), (1, 2), (0, 2)]);
        for r in exact_resistances(&tri).unwrap() {
            assert!((r - 2.0 / 3.0).abs() < 1e-14);
        }
        let k7 = generators::complete(7);
        for r in exact_resistances(&k7).unwrap() {
            assert!((r - 2.0 / 7.0).abs() < 1e-13);
        }
        let split = unit(4, &[(0, 1), (2, 3)]);
        assert!(matches!(exact_resistances(&split), Err(Error::Disconnected)));
        assert!(matches!(build_oracle(&split, 0.5, 1e-6, 0), Err(Error::Disconnected)));
    }

    #[test]
    fn persistence_round_trip() {
        let g = generators::grid(3, 3);
        let o = build_oracle(&g, 0.8, 1e-6, 5).unwrap();
        let mut buf = Vec::new();
        o.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), 5 + 5 * 8 + 8 * o.k() * 9);
        let back = ResistanceOracle::read_from(buf.as_slice()).unwrap();
        assert_eq!(back.ztilde, o.ztilde);
        assert_eq!((back.k, back.n, back.seed), (o.k, o.n, o.seed));
        assert_eq!(back.query(0, 8).unwrap(), o.query(0, 8).unwrap());

        buf[4] = 9;
        assert!(matches!(
            ResistanceOracle::read_from(buf.as_slice()),
            Err(Error::OracleFormat(_))
        ));
    }

    #[test]
    fn build_is_deterministic() {
        let g = generators::grid(5, 5);
        let a = build_oracle(&g, 0.5, 1e-6, 42).unwrap();
        let b = build_oracle(&g, 0.5, 1e-6, 42).unwrap();
        assert_eq!(a, b);
        let c = build_oracle(&g, 0.5, 1e-6, 43).unwrap();
        assert_ne!(a.ztilde, c.ztilde);
    }
}
