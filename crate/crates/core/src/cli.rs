//! The `respars` command line.
//!
//! Exit codes: 0 success, 1 usage, 2 I/O or parse failure, 3 violated
//! precondition (disconnected input, epsilon out of range, dense limit, ...),
//! 4 verification failed.

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::graph::WeightedGraph;
use crate::resistance::{
    default_delta, exact_pair_resistances, OracleConfig, ResistanceOracle,
};
use crate::rng::entropy_seed;
use crate::sparsify::{sampling_resistances, sparsify_with_resistances, SampleConfig, SamplingMode};
use crate::verify::{pi_matrix_report, verify, SpectralReference};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_VERIFY_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "respars", version, about = "Spectral sparsification by effective-resistance sampling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a spectral sparsifier of the input graph.
    Sparsify(SparsifyArgs),
    /// Approximate (or exact) effective resistances.
    Resistances(ResistanceArgs),
    /// Certify a sparsifier against its base graph.
    Verify(VerifyArgs),
    /// Vertex and edge counts, weight ratio, connectivity.
    Stats(InputArgs),
    /// Check the identities of the weighted edge projection matrix.
    PiCheck(InputArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Edge-list file.
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Resistance,
    DegreeBounded,
}

impl From<ModeArg> for SamplingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Resistance => SamplingMode::Resistance,
            ModeArg::DegreeBounded => SamplingMode::DegreeBounded,
        }
    }
}

#[derive(Debug, Args)]
pub struct SparsifyArgs {
    /// Edge-list file of the graph to sparsify.
    #[arg(long)]
    pub input: PathBuf,
    /// Destination edge list; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Target spectral accuracy, in (0, 1].
    #[arg(long)]
    pub epsilon: f64,
    /// RNG seed; drawn from the OS and echoed on stderr when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of samples; defaults to ceil(c0 n ln n / epsilon²).
    #[arg(long)]
    pub q: Option<usize>,
    /// Oversampling constant used when --q is absent.
    #[arg(long, default_value_t = crate::sparsify::DEFAULT_C0)]
    pub c0: f64,
    /// Solver accuracy for the resistance oracle.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Sampling distribution; degree-bounded mixes in a uniform floor.
    #[arg(long, value_enum, default_value_t = ModeArg::Resistance)]
    pub mode: ModeArg,
    /// Use dense exact resistances instead of the oracle.
    #[arg(long)]
    pub exact: bool,
    /// Resample with fresh seeds until the spectral bound is certified, at
    /// most this many extra attempts.
    #[arg(long, default_value_t = 0)]
    pub verify_retry: u32,
}

#[derive(Debug, Args)]
pub struct ResistanceArgs {
    /// Edge-list file.
    #[arg(long)]
    pub input: PathBuf,
    /// Destination; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Relative accuracy of the random projection.
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    /// Projection seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Absolute per-row solver accuracy.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Dense exact computation.
    #[arg(long)]
    pub exact: bool,
    /// Report every edge of the input graph.
    #[arg(long, conflicts_with = "pairs")]
    pub all_edges: bool,
    /// File of `u v` lines to query.
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    /// Load a previously saved oracle instead of building one.
    #[arg(long, conflicts_with = "exact")]
    pub load_oracle: Option<PathBuf>,
    /// Save the built oracle.
    #[arg(long)]
    pub save_oracle: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Base graph G.
    #[arg(long)]
    pub input: PathBuf,
    /// Candidate sparsifier H.
    #[arg(long)]
    pub sparsifier: PathBuf,
    /// Accuracy the spectral range must meet.
    #[arg(long)]
    pub epsilon: f64,
    /// Random cuts in addition to all singletons.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Seed for the random cuts.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Emit JSON instead of key=value lines.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_)
        | Error::Parse { .. }
        | Error::NonPositiveWeight { .. }
        | Error::SelfLoop { .. }
        | Error::OracleFormat(_) => EXIT_IO,
        _ => EXIT_PRECONDITION,
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
            } else {
                let _ = write!(stdout, "{rendered}");
            }
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(Failure::Lib(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
        Err(Failure::Verification(msg)) => {
            let _ = writeln!(stderr, "verification failed: {msg}");
            EXIT_VERIFY_FAILED
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Command::Sparsify(a) => cmd_sparsify(a, stdout, stderr),
        Command::Resistances(a) => cmd_resistances(a, stdout, stderr),
        Command::Verify(a) => cmd_verify(a, stdout, stderr),
        Command::Stats(a) => cmd_stats(a, stdout),
        Command::PiCheck(a) => cmd_pi_check(a, stdout),
    }
}

fn read_graph(path: &Path) -> Result<WeightedGraph, Error> {
    let text = fs::read_to_string(path)?;
    WeightedGraph::parse(&text)
}

fn resolve_seed(seed: Option<u64>, stderr: &mut dyn Write) -> u64 {
    seed.unwrap_or_else(|| {
        let s = entropy_seed();
        let _ = writeln!(stderr, "seed={s}");
        s
    })
}

fn emit(output: Option<&Path>, stdout: &mut dyn Write, body: &[u8]) -> Result<(), Failure> {
    match output {
        Some(p) => {
            let mut f = BufWriter::new(fs::File::create(p)?);
            f.write_all(body)?;
            f.flush()?;
        }
        None => stdout.write_all(body)?,
    }
    Ok(())
}

fn cmd_sparsify(a: SparsifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let start = Instant::now();
    let g = read_graph(&a.input)?;
    let seed = resolve_seed(a.seed, stderr);
    let mut cfg = SampleConfig::new(a.epsilon, seed);
    cfg.q = a.q;
    cfg.c0 = a.c0;
    cfg.mode = a.mode.into();
    cfg.delta_override = a.delta;
    cfg.exact = a.exact;
    if !(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0) {
        return Err(Error::EpsilonOutOfRange(cfg.epsilon).into());
    }
    g.require_connected()?;

    let r = if g.num_edges() == 0 {
        Vec::new()
    } else {
        sampling_resistances(&g, &cfg)?
    };
    let reference = if a.verify_retry > 0 {
        Some(SpectralReference::new(&g)?)
    } else {
        None
    };

    let mut attempt = 0u32;
    let (result, certified) = loop {
        let mut attempt_cfg = cfg.clone();
        attempt_cfg.seed = seed.wrapping_add(attempt as u64);
        let result = if g.num_edges() == 0 {
            crate::sparsify::sparsify(&g, &attempt_cfg)?
        } else {
            sparsify_with_resistances(&g, &r, &attempt_cfg)?
        };
        let Some(reference) = &reference else {
            break (result, None);
        };
        let (lo, hi) = reference.bounds(&result.graph)?;
        let ok = lo >= 1.0 - cfg.epsilon && hi <= 1.0 + cfg.epsilon;
        let _ = writeln!(
            stderr,
            "attempt={} seed={} rayleigh_min={lo} rayleigh_max={hi} certified={ok}",
            attempt, attempt_cfg.seed
        );
        if ok || attempt >= a.verify_retry {
            break (result, Some(ok));
        }
        attempt += 1;
    };

    emit(a.output.as_deref(), stdout, result.graph.to_edge_list().as_bytes())?;
    let _ = writeln!(stderr, "q={}", result.q_used);
    let _ = writeln!(stderr, "distinct_edges={}", result.distinct_edges);
    let _ = writeln!(stderr, "mode={}", result.mode);
    let _ = writeln!(stderr, "wall_time_s={:.3}", start.elapsed().as_secs_f64());
    match certified {
        Some(false) => Err(Failure::Verification(format!(
            "no certified sparsifier after {} attempts",
            a.verify_retry + 1
        ))),
        _ => Ok(()),
    }
}

fn read_pairs(path: &Path, n: usize) -> Result<Vec<(usize, usize)>, Error> {
    let text = fs::read_to_string(path)?;
    let mut pairs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let bad = || Error::Parse {
            line: idx + 1,
            msg: "expected `u v`".into(),
        };
        if fields.len() != 2 {
            return Err(bad());
        }
        let u: usize = fields[0].parse().map_err(|_| bad())?;
        let v: usize = fields[1].parse().map_err(|_| bad())?;
        for x in [u, v] {
            if x >= n {
                return Err(Error::VertexOutOfRange { vertex: x, n });
            }
        }
        pairs.push((u, v));
    }
    Ok(pairs)
}

fn cmd_resistances(a: ResistanceArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let g = read_graph(&a.input)?;
    let pairs: Vec<(usize, usize)> = match (&a.pairs, a.all_edges) {
        (Some(p), _) => read_pairs(p, g.num_vertices())?,
        (None, true) => g.edges().iter().map(|e| (e.u, e.v)).collect(),
        (None, false) => {
            return Err(Error::InvalidParameter("one of --all-edges or --pairs is required".into()).into())
        }
    };

    let values = if a.exact {
        exact_pair_resistances(&g, &pairs)?
    } else {
        let oracle = match &a.load_oracle {
            Some(path) => {
                let o = ResistanceOracle::read_from(io::BufReader::new(fs::File::open(path)?))?;
                if o.num_vertices() != g.num_vertices() {
                    return Err(Error::VertexSetMismatch {
                        left: g.num_vertices(),
                        right: o.num_vertices(),
                    }
                    .into());
                }
                o
            }
            None => {
                let seed = resolve_seed(a.seed, stderr);
                let delta = match a.delta {
                    Some(d) => d,
                    None => default_delta(&g, a.epsilon)?,
                };
                ResistanceOracle::build(&g, &OracleConfig::new(a.epsilon, delta, seed))?
            }
        };
        if let Some(path) = &a.save_oracle {
            oracle.write_to(BufWriter::new(fs::File::create(path)?))?;
        }
        pairs
            .iter()
            .map(|&(u, v)| oracle.query(u, v))
            .collect::<Result<Vec<_>, _>>()?
    };

    let mut body = String::with_capacity(40 * pairs.len());
    for (&(u, v), r) in pairs.iter().zip(&values) {
        body.push_str(&format!("{u} {v} {r:.16e}\n"));
    }
    emit(a.output.as_deref(), stdout, body.as_bytes())
}

fn cmd_verify(a: VerifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let g = read_graph(&a.input)?;
    let h = read_graph(&a.sparsifier)?;
    if !(a.epsilon > 0.0 && a.epsilon <= 1.0) {
        return Err(Error::EpsilonOutOfRange(a.epsilon).into());
    }
    let seed = resolve_seed(a.seed, stderr);
    let report = verify(&g, &h, a.epsilon, a.trials, seed)?;
    let text = if a.json {
        report.to_json() + "\n"
    } else {
        report.to_key_value()
    };
    stdout.write_all(text.as_bytes())?;
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "spectral range [{}, {}] exceeds 1 ± {}",
            report.rayleigh_min, report.rayleigh_max, a.epsilon
        )))
    }
}

fn cmd_stats(a: InputArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let g = read_graph(&a.input)?;
    let mut out = String::new();
    out.push_str(&format!("n={}\n", g.num_vertices()));
    out.push_str(&format!("m={}\n", g.num_edges()));
    match (g.min_weight(), g.max_weight(), g.weight_ratio()) {
        (Some(lo), Some(hi), Some(r)) => {
            out.push_str(&format!("w_min={lo}\nw_max={hi}\nr={r}\n"));
        }
        _ => out.push_str("w_min=\nw_max=\nr=\n"),
    }
    out.push_str(&format!("connected={}\n", g.is_connected()));
    stdout.write_all(out.as_bytes())?;
    Ok(())
}

fn cmd_pi_check(a: InputArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let g = read_graph(&a.input)?;
    let report = pi_matrix_report(&g)?;
    let text = format!(
        "idempotence_error={}\ntrace_error={}\ndiagonal_error={}\ncolumn_norm_error={}\npass={}\n",
        report.idempotence_error,
        report.trace_error,
        report.diagonal_error,
        report.column_norm_error,
        report.passed()
    );
    stdout.write_all(text.as_bytes())?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification("projection identities violated".into()))
    }
}
