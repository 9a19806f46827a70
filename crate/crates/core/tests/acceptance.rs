//! Acceptance suite. Runs every criterion at its pinned tolerance, prints one
//! PASS/FAIL line each, and exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use respars::generators;
use respars::linalg::DensePseudoinverse;
use respars::resistance::{exact_resistances, jl_dimension, OracleConfig, ResistanceOracle};
use respars::rng::stream_rng;
use respars::sparsify::{
    default_q, degree_bounded_min_q, sparsify, sparsify_with_resistances, SampleConfig,
    SamplingMode,
};
use respars::verify::{cut_check, degree_bound_check, pi_matrix_report, SpectralReference};
use respars::WeightedGraph;

struct Outcome {
    pass: bool,
    detail: String,
    /// Serialized outputs, compared byte for byte by the determinism check.
    fingerprint: Vec<u8>,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self {
            pass,
            detail,
            fingerprint: Vec::new(),
        }
    }
}

fn push_f64s(buf: &mut Vec<u8>, xs: impl IntoIterator<Item = f64>) {
    for x in xs {
        buf.extend_from_slice(&x.to_bits().to_le_bytes());
    }
}

/// Random connected graph with `n - 1 ..= min(3n, n(n-1)/2)` edges.
fn random_graph<R: Rng>(rng: &mut R, n: usize, weights: (f64, f64)) -> WeightedGraph {
    let max_m = (n * (n - 1) / 2).min(3 * n).max(n - 1);
    let m = rng.random_range((n - 1)..=max_m);
    generators::random_connected(rng, n, m, weights)
}

/// Forces the extreme weights to exactly `lo` and `hi`.
fn pin_weight_ratio(g: &WeightedGraph, lo: f64, hi: f64) -> WeightedGraph {
    let m = g.num_edges();
    WeightedGraph::from_edges(
        g.num_vertices(),
        g.edges().iter().enumerate().map(|(i, e)| {
            let w = if i == 0 {
                lo
            } else if i == m - 1 {
                hi
            } else {
                e.w
            };
            (e.u, e.v, w)
        }),
    )
    .unwrap()
}

fn c1_exact_oracle() -> Outcome {
    let start = Instant::now();
    let mut worst_kn: f64 = 0.0;
    for n in [10, 50] {
        let g = generators::complete(n);
        for r in exact_resistances(&g).unwrap() {
            worst_kn = worst_kn.max((r - 2.0 / n as f64).abs());
        }
    }
    let mut worst_tree: f64 = 0.0;
    for t in 0..50 {
        let mut rng = stream_rng(1_000 + t, 0);
        let n = rng.random_range(2..=100);
        let g = generators::random_tree(&mut rng, n, (1.0, 1e6));
        for (e, r) in g.edges().iter().zip(exact_resistances(&g).unwrap()) {
            worst_tree = worst_tree.max((r * e.w - 1.0).abs());
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        worst_kn <= 1e-9 && worst_tree <= 1e-8 && elapsed < Duration::from_secs(10),
        format!(
            "K_n max |R - 2/n| = {worst_kn:.2e} (tol 1e-9); trees max |R w - 1| = {worst_tree:.2e} (tol 1e-8); {:.2}s (limit 10s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn c2_trace_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for t in 0..50 {
        let mut rng = stream_rng(2_000 + t, 0);
        let n = rng.random_range(2..=200);
        let g = random_graph(&mut rng, n, (1.0, 1e3));
        let total: f64 = g
            .edges()
            .iter()
            .zip(exact_resistances(&g).unwrap())
            .map(|(e, r)| e.w * r)
            .sum();
        worst = worst.max((total / (n as f64 - 1.0) - 1.0).abs());
    }
    Outcome::new(
        worst <= 1e-8,
        format!("max relative |Σ w_e R_e - (n-1)| = {worst:.2e} over 50 graphs (tol 1e-8)"),
    )
}

fn c3_pi_identities() -> Outcome {
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for t in 0..50 {
        let mut rng = stream_rng(3_000 + t, 0);
        let n = rng.random_range(3..=40);
        let g = pin_weight_ratio(&random_graph(&mut rng, n, (1.0, 1e6)), 1.0, 1e6);
        assert_eq!(g.weight_ratio(), Some(1e6));
        let rep = pi_matrix_report(&g).unwrap();
        worst = worst
            .max(rep.idempotence_error)
            .max(rep.trace_error)
            .max(rep.diagonal_error)
            .max(rep.column_norm_error);
        if !rep.passed() {
            failures += 1;
        }
    }
    Outcome::new(
        failures == 0,
        format!("{}/50 graphs pass, worst identity error {worst:.2e} (tol 1e-8, r = 1e6)", 50 - failures),
    )
}

fn c4_oracle_accuracy() -> Outcome {
    let start = Instant::now();
    let eps = 0.5;
    let runs: Vec<(bool, f64, Vec<u8>)> = (0..30u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(4_000 + t, 0);
            let n = rng.random_range(10..=60);
            let g = random_graph(&mut rng, n, (1.0, 1e3));
            let mut cfg = OracleConfig::new(eps, 1e-10, 40_000 + t);
            cfg.k = Some(jl_dimension(n, eps).unwrap());
            cfg.safety = 1.0;
            let oracle = ResistanceOracle::build(&g, &cfg).unwrap();
            let pinv = DensePseudoinverse::new(&g.laplacian()).unwrap();
            let mut all_ok = true;
            let mut worst: f64 = 0.0;
            let mut fp = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    let exact = pinv.resistance(u, v).unwrap();
                    let approx = oracle.query(u, v).unwrap();
                    push_f64s(&mut fp, [approx]);
                    let ratio = approx / exact;
                    worst = worst.max((ratio - 1.0).abs());
                    if !((1.0 - eps) * exact <= approx && approx <= (1.0 + eps) * exact) {
                        all_ok = false;
                    }
                }
            }
            (all_ok, worst, fp)
        })
        .collect();
    let elapsed = start.elapsed();
    let passing = runs.iter().filter(|r| r.0).count();
    let worst = runs.iter().map(|r| r.1).fold(0.0, f64::max);
    let mut out = Outcome::new(
        passing >= 28 && elapsed < Duration::from_secs(60),
        format!(
            "{passing}/30 runs with all pairs in (1 ± 0.5) R (need 28); worst |ratio - 1| = {worst:.3}; {:.2}s (limit 60s)",
            elapsed.as_secs_f64()
        ),
    );
    out.fingerprint = runs.into_iter().flat_map(|r| r.2).collect();
    out
}

fn spectral_suite() -> Vec<(&'static str, WeightedGraph)> {
    let mut rng = stream_rng(5_000, 0);
    vec![
        ("K100", generators::complete(100)),
        ("regular(100,10)", generators::random_regular(&mut rng, 100, 10)),
        ("grid10x10", generators::grid(10, 10)),
        ("dumbbell100", generators::dumbbell(100)),
    ]
}

struct SpectralTrial {
    h: WeightedGraph,
    lo: f64,
    hi: f64,
}

/// Twenty seeded sparsifiers per suite graph, with exact or oracle
/// resistances.
fn spectral_trials(exact: bool) -> Vec<(&'static str, WeightedGraph, Vec<SpectralTrial>)> {
    let eps = 0.5;
    let q = default_q(100, eps, 4.0).unwrap();
    spectral_suite()
        .into_iter()
        .map(|(name, g)| {
            let reference = SpectralReference::new(&g).unwrap();
            let exact_r = exact.then(|| exact_resistances(&g).unwrap());
            let trials = (0..20u64)
                .into_par_iter()
                .map(|seed| {
                    let mut cfg = SampleConfig::new(eps, 50_000 + seed);
                    cfg.q = Some(q);
                    let res = match &exact_r {
                        Some(r) => sparsify_with_resistances(&g, r, &cfg).unwrap(),
                        None => sparsify(&g, &cfg).unwrap(),
                    };
                    assert!(res.graph.num_edges() <= q && res.graph.num_edges() <= g.num_edges());
                    let (lo, hi) = reference.bounds(&res.graph).unwrap();
                    SpectralTrial { h: res.graph, lo, hi }
                })
                .collect();
            (name, g, trials)
        })
        .collect()
}

fn spectral_outcome(exact: bool, lo_bound: f64, hi_bound: f64) -> (Outcome, Vec<(WeightedGraph, Vec<SpectralTrial>)>) {
    let results = spectral_trials(exact);
    let q = default_q(100, 0.5, 4.0).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    let mut fp = Vec::new();
    for (name, g, trials) in &results {
        let ok = trials
            .iter()
            .filter(|t| t.lo >= lo_bound && t.hi <= hi_bound)
            .count();
        pass &= ok * 2 >= trials.len();
        let mean_edges = trials.iter().map(|t| t.h.num_edges()).sum::<usize>() as f64 / trials.len() as f64;
        let worst_lo = trials.iter().map(|t| t.lo).fold(f64::INFINITY, f64::min);
        let worst_hi = trials.iter().map(|t| t.hi).fold(0.0, f64::max);
        parts.push(format!(
            "{name}: {ok}/20 in [{lo_bound}, {hi_bound}], range [{worst_lo:.3}, {worst_hi:.3}], mean |E_H| = {mean_edges:.0} of m = {}",
            g.num_edges()
        ));
        for t in trials {
            fp.extend_from_slice(t.h.to_edge_list().as_bytes());
        }
    }
    let mut out = Outcome::new(pass, format!("q = {q}; {}", parts.join("; ")));
    out.fingerprint = fp;
    let kept = results.into_iter().map(|(_, g, t)| (g, t)).collect();
    (out, kept)
}

fn c7_unbiasedness() -> Outcome {
    let g = generators::complete(4);
    let p = vec![1.0 / 6.0; 6];
    let seeds = 10_000u64;
    let mut sum = [0.0f64; 6];
    let mut sum_sq = [0.0f64; 6];
    let mut fp = Vec::new();
    for seed in 0..seeds {
        let res = respars::sample_sparsifier(&g, &p, 20, 70_000 + seed).unwrap();
        let mut w = [0.0; 6];
        for e in res.graph.edges() {
            w[g.find_edge(e.u, e.v).unwrap().0] = e.w;
        }
        push_f64s(&mut fp, w);
        for i in 0..6 {
            sum[i] += w[i];
            sum_sq[i] += w[i] * w[i];
        }
    }
    let n = seeds as f64;
    let mut pass = true;
    let mut worst_z: f64 = 0.0;
    for i in 0..6 {
        let mean = sum[i] / n;
        let var = (sum_sq[i] - n * mean * mean) / (n - 1.0);
        let se = (var / n).sqrt();
        let z = (mean - g.edges()[i].w).abs() / se;
        worst_z = worst_z.max(z);
        pass &= z <= 3.0;
    }
    let mut out = Outcome::new(
        pass,
        format!("K4, q = 20, 10000 seeds: worst |mean - w| = {worst_z:.2} standard errors (limit 3)"),
    );
    out.fingerprint = fp;
    out
}

fn c8_degree_bound() -> Outcome {
    let mut rng = stream_rng(8_000, 0);
    let graphs = vec![
        ("K20", generators::complete(20)),
        ("random100", generators::random_connected(&mut rng, 100, 600, (1.0, 10.0))),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    let mut fp = Vec::new();
    for (name, g) in &graphs {
        let n = g.num_vertices();
        let min_q = degree_bounded_min_q(n);
        let runs: Vec<(f64, usize, String)> = (0..100u64)
            .into_par_iter()
            .map(|seed| {
                let mut cfg = SampleConfig::new(0.5, 80_000 + seed);
                cfg.mode = SamplingMode::DegreeBounded;
                let res = sparsify(g, &cfg).unwrap();
                (degree_bound_check(g, &res.graph).unwrap(), res.q_used, res.graph.to_edge_list())
            })
            .collect();
        let ok = runs.iter().filter(|r| r.0 <= 2.0).count();
        let worst = runs.iter().map(|r| r.0).fold(0.0, f64::max);
        let q_ok = runs.iter().all(|r| r.1 >= min_q);
        pass &= ok >= 99 && q_ok;
        parts.push(format!(
            "{name}: {ok}/100 with max_v ratio <= 2 (need 99), worst {worst:.3}, q = {} >= {min_q}",
            runs[0].1
        ));
        for r in runs {
            fp.extend_from_slice(r.2.as_bytes());
        }
    }
    let mut out = Outcome::new(pass, parts.join("; "));
    out.fingerprint = fp;
    out
}

fn c9_cuts(certified: &[(WeightedGraph, Vec<SpectralTrial>)]) -> Outcome {
    let eps = 0.5;
    let mut checked = 0;
    let mut failed = 0;
    let mut worst: f64 = 0.0;
    for (g, trials) in certified {
        for (i, t) in trials.iter().enumerate() {
            if t.lo >= 1.0 - eps && t.hi <= 1.0 + eps {
                checked += 1;
                let c = cut_check(g, &t.h, 1000, 90_000 + i as u64).unwrap();
                worst = worst.max(c);
                if c > eps {
                    failed += 1;
                }
            }
        }
    }
    Outcome::new(
        failed == 0 && checked > 0,
        format!("{checked} certified pairs, {failed} exceed ε; worst cut deviation {worst:.3} (limit 0.5)"),
    )
}

fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

fn c10_scaling() -> Outcome {
    let eps = 1.0;
    let mut timings = Vec::new();
    let mut mem_ok = true;
    let mut mem_note = String::new();
    for (n, m) in [(10_000usize, 100_000usize), (100_000, 1_000_000)] {
        let mut rng = stream_rng(10_000 + n as u64, 0);
        let g = generators::random_connected(&mut rng, n, m, (1.0, 10.0));
        let start = Instant::now();
        let mut cfg = SampleConfig::new(eps, 11);
        // ε = 1 makes the worst-case accuracy formula vanish; any constant
        // factor suffices for sampling.
        cfg.delta_override = Some(0.1);
        let res = sparsify(&g, &cfg).unwrap();
        let elapsed = start.elapsed();
        assert!(res.graph.num_edges() <= g.num_edges());
        timings.push((m, elapsed, res.distinct_edges));
        if m == 1_000_000 {
            let k = jl_dimension(n, eps).unwrap();
            let model = 8 * k * n + 64 * m;
            if let Some(peak) = peak_rss_bytes() {
                mem_ok = peak <= 3 * model as u64;
                mem_note = format!(
                    "peak RSS {:.0} MiB vs 3·(8kn + 64m) = {:.0} MiB",
                    peak as f64 / 1048576.0,
                    3.0 * model as f64 / 1048576.0
                );
            } else {
                mem_note = "peak RSS unavailable".into();
            }
        }
    }
    let (small, large) = (timings[0].1.as_secs_f64(), timings[1].1.as_secs_f64());
    let ratio = large / small;
    Outcome::new(
        timings[1].1 < Duration::from_secs(600) && ratio < 100.0 && mem_ok,
        format!(
            "m = 1e5: {small:.2}s ({} edges kept); m = 1e6: {large:.2}s ({} edges kept); time ratio {ratio:.1} (< 100 for 10x m); {mem_note}",
            timings[0].2, timings[1].2
        ),
    )
}

fn report(results: &mut Vec<(String, bool)>, id: &str, name: &str, out: &Outcome) {
    println!(
        "[{}] {id} {name}: {}",
        if out.pass { "PASS" } else { "FAIL" },
        out.detail
    );
    results.push((id.to_string(), out.pass));
}

fn main() -> ExitCode {
    // honour `cargo test -- --list` and filters without running the suite twice
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let mut results = Vec::new();

    report(&mut results, "C1", "exact-resistance oracle", &c1_exact_oracle());
    report(&mut results, "C2", "trace identity", &c2_trace_identity());
    report(&mut results, "C3", "projection identities", &c3_pi_identities());

    let c4 = c4_oracle_accuracy();
    report(&mut results, "C4", "oracle accuracy", &c4);
    let (c5, certified) = spectral_outcome(true, 0.5, 1.5);
    report(&mut results, "C5", "sparsifier spectral bound", &c5);
    let (c6, _) = spectral_outcome(false, 1.0 - 3.0 * 0.5, 1.0 + 3.0 * 0.5);
    report(&mut results, "C6", "approximate-probability robustness", &c6);
    let c7 = c7_unbiasedness();
    report(&mut results, "C7", "unbiasedness", &c7);
    let c8 = c8_degree_bound();
    report(&mut results, "C8", "degree bound", &c8);
    report(&mut results, "C9", "cut preservation", &c9_cuts(&certified));
    report(&mut results, "C10", "scaling smoke test", &c10_scaling());

    let rerun = [
        ("C4", &c4, c4_oracle_accuracy()),
        ("C5", &c5, spectral_outcome(true, 0.5, 1.5).0),
        ("C6", &c6, spectral_outcome(false, -0.5, 2.5).0),
        ("C7", &c7, c7_unbiasedness()),
        ("C8", &c8, c8_degree_bound()),
    ];
    let mismatched: Vec<&str> = rerun
        .iter()
        .filter(|(_, a, b)| a.fingerprint.is_empty() || a.fingerprint != b.fingerprint)
        .map(|(id, _, _)| *id)
        .collect();
    let bytes: usize = rerun.iter().map(|(_, a, _)| a.fingerprint.len()).sum();
    let c11 = Outcome::new(
        mismatched.is_empty(),
        if mismatched.is_empty() {
            format!("C4-C8 re-run byte-identical ({bytes} bytes compared)")
        } else {
            format!("outputs differ for {}", mismatched.join(", "))
        },
    );
    report(&mut results, "C11", "determinism", &c11);

    let failed: Vec<&str> = results.iter().filter(|r| !r.1).map(|r| r.0.as_str()).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", results.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
