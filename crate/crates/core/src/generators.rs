//! Graph families used by the test suites, the acceptance harness and the
//! scaling benchmarks. Random families take a caller-supplied generator.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::WeightedGraph;

fn build(n: usize, edges: Vec<(usize, usize, f64)>) -> WeightedGraph {
    WeightedGraph::from_edges(n, edges).expect("generator produced an invalid graph")
}

/// `K_n` with unit weights.
pub fn complete(n: usize) -> WeightedGraph {
    let edges = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v, 1.0)))
        .collect();
    build(n, edges)
}

pub fn path(n: usize) -> WeightedGraph {
    build(n, (1..n).map(|v| (v - 1, v, 1.0)).collect())
}

pub fn cycle(n: usize) -> WeightedGraph {
    let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v, 1.0)).collect();
    if n > 2 {
        edges.push((0, n - 1, 1.0));
    }
    build(n, edges)
}

/// Star with center 0 and `leaves` unit-weight spokes.
pub fn star(leaves: usize) -> WeightedGraph {
    build(leaves + 1, (1..=leaves).map(|v| (0, v, 1.0)).collect())
}

/// `rows × cols` grid with unit weights, vertex `r * cols + c`.
pub fn grid(rows: usize, cols: usize) -> WeightedGraph {
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1, 1.0));
            }
            if r + 1 < rows {
                edges.push((v, v + cols, 1.0));
            }
        }
    }
    build(rows * cols, edges)
}

/// Two unit-weight cliques on `n/2` and `n - n/2` vertices joined by one
/// bridge edge.
pub fn dumbbell(n: usize) -> WeightedGraph {
    let half = n / 2;
    let mut edges = Vec::new();
    for (lo, hi) in [(0, half), (half, n)] {
        for u in lo..hi {
            for v in (u + 1)..hi {
                edges.push((u, v, 1.0));
            }
        }
    }
    if half > 0 && half < n {
        edges.push((half - 1, half, 1.0));
    }
    build(n, edges)
}

/// Weight drawn log-uniformly from `[lo, hi]`.
pub fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        return lo;
    }
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// Random recursive tree on a shuffled labelling, weights log-uniform in
/// `weights`.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, n: usize, weights: (f64, f64)) -> WeightedGraph {
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    let edges = (1..n)
        .map(|i| {
            let parent = rng.random_range(0..i);
            (labels[parent], labels[i], log_uniform(rng, weights.0, weights.1))
        })
        .collect();
    build(n, edges)
}

/// Connected graph with exactly `min(m, n(n-1)/2)` edges (at least `n - 1`):
/// a random spanning tree plus uniformly random extra pairs. Weights are
/// log-uniform in `weights`.
pub fn random_connected<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    m: usize,
    weights: (f64, f64),
) -> WeightedGraph {
    let max_m = n * n.saturating_sub(1) / 2;
    let target = m.clamp(n.saturating_sub(1), max_m);
    let tree = random_tree(rng, n, weights);
    let mut seen: HashSet<(usize, usize)> = tree.edges().iter().map(|e| (e.u, e.v)).collect();
    let mut edges: Vec<(usize, usize, f64)> = tree.edges().iter().map(|e| (e.u, e.v, e.w)).collect();
    if target > max_m / 2 {
        // dense: enumerate the complement and shuffle
        let mut rest: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .filter(|p| !seen.contains(p))
            .collect();
        rest.shuffle(rng);
        for (u, v) in rest.into_iter().take(target - edges.len()) {
            edges.push((u, v, log_uniform(rng, weights.0, weights.1)));
        }
    } else {
        while edges.len() < target {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u == v {
                continue;
            }
            let key = (u.min(v), u.max(v));
            if seen.insert(key) {
                edges.push((key.0, key.1, log_uniform(rng, weights.0, weights.1)));
            }
        }
    }
    build(n, edges)
}

/// Uniform-ish random simple `d`-regular graph on `n` vertices by random stub
/// pairing, restarting whenever the pairing gets stuck. Requires `n·d` even
/// and `d < n`.
pub fn random_regular<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> WeightedGraph {
    assert!(d < n && (n * d) % 2 == 0, "no simple {d}-regular graph on {n} vertices");
    'restart: loop {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        let mut seen: HashSet<(usize, usize)> = HashSet::new();
        let mut edges = Vec::with_capacity(n * d / 2);
        while !stubs.is_empty() {
            let mut placed = false;
            for _ in 0..200 {
                let i = rng.random_range(0..stubs.len());
                let j = rng.random_range(0..stubs.len());
                let (a, b) = (stubs[i], stubs[j]);
                if i == j || a == b || seen.contains(&(a.min(b), a.max(b))) {
                    continue;
                }
                seen.insert((a.min(b), a.max(b)));
                edges.push((a.min(b), a.max(b), 1.0));
                let (hi, lo) = (i.max(j), i.min(j));
                stubs.swap_remove(hi);
                stubs.swap_remove(lo);
                placed = true;
                break;
            }
            if !placed {
                continue 'restart;
            }
        }
        let g = build(n, edges);
        if g.is_connected() {
            return g;
        }
    }
}
