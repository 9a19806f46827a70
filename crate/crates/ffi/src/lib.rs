//! C ABI over the `respars` library.
//!
//! Graphs and oracles cross the boundary as opaque handles that the caller
//! releases with the matching `*_free` function. Every fallible call returns an
//! [`RsStatus`]; on failure, [`respars_last_error_message`] describes the most
//! recent error on the calling thread. Panics are caught at the boundary and
//! reported as [`RsStatus::Internal`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use respars::resistance::{exact_resistances, OracleConfig, ResistanceOracle};
use respars::sparsify::{SampleConfig, SamplingMode};
use respars::verify;
use respars::{Error, WeightedGraph};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    Disconnected = 5,
    EpsilonOutOfRange = 6,
    DenseLimitExceeded = 7,
    SolverFailed = 8,
    VertexOutOfRange = 9,
    BufferSize = 10,
    Internal = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsMode {
    Resistance = 0,
    DegreeBounded = 1,
}

/// Options for [`respars_sparsify`]. `q == 0` selects the default sample
/// count and `delta <= 0` the default solver accuracy.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RsSparsifyOptions {
    pub epsilon: f64,
    pub q: usize,
    pub c0: f64,
    pub seed: u64,
    pub mode: RsMode,
    pub delta: f64,
    pub exact: bool,
}

/// Opaque graph handle.
pub struct RsGraph(WeightedGraph);

/// Opaque resistance-oracle handle.
pub struct RsOracle(ResistanceOracle);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> RsStatus {
    match e {
        Error::Parse { .. } | Error::NonPositiveWeight { .. } | Error::SelfLoop { .. } | Error::OracleFormat(_) => {
            RsStatus::Parse
        }
        Error::Io(_) => RsStatus::Io,
        Error::Disconnected | Error::SingularGroundedSystem => RsStatus::Disconnected,
        Error::EpsilonOutOfRange(_) => RsStatus::EpsilonOutOfRange,
        Error::DenseLimitExceeded { .. } => RsStatus::DenseLimitExceeded,
        Error::SolverFailed { .. } => RsStatus::SolverFailed,
        Error::VertexOutOfRange { .. } => RsStatus::VertexOutOfRange,
        _ => RsStatus::InvalidArgument,
    }
}

fn fail(status: RsStatus, msg: &str) -> RsStatus {
    set_last_error(msg);
    status
}

fn lib_err(e: Error) -> RsStatus {
    fail(status_of(&e), &e.to_string())
}

/// Runs `body`, converting panics into [`RsStatus::Internal`].
fn guard<F: FnOnce() -> RsStatus>(body: F) -> RsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => {
            if status == RsStatus::Ok {
                set_last_error("");
            }
            status
        }
        Err(_) => fail(RsStatus::Internal, "panic inside respars"),
    }
}

unsafe fn graph_ref<'a>(g: *const RsGraph) -> Option<&'a WeightedGraph> {
    g.as_ref().map(|g| &g.0)
}

fn boxed_graph(g: WeightedGraph, out: *mut *mut RsGraph) {
    // SAFETY: callers check `out` for null before building the graph.
    unsafe { *out = Box::into_raw(Box::new(RsGraph(g))) };
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next respars call on this thread.
#[no_mangle]
pub extern "C" fn respars_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn respars_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a graph from parallel arrays of `m` endpoints and weights.
///
/// # Safety
/// `us`, `vs` and `ws` must each point to `m` readable elements (they may be
/// null when `m == 0`), and `out` must be a valid pointer to write to.
#[no_mangle]
pub unsafe extern "C" fn respars_graph_from_edges(
    n: usize,
    us: *const usize,
    vs: *const usize,
    ws: *const f64,
    m: usize,
    out: *mut *mut RsGraph,
) -> RsStatus {
    guard(|| {
        if out.is_null() || (m > 0 && (us.is_null() || vs.is_null() || ws.is_null())) {
            return fail(RsStatus::NullPointer, "null argument");
        }
        let (us, vs, ws) = if m == 0 {
            (&[][..], &[][..], &[][..])
        } else {
            (
                slice::from_raw_parts(us, m),
                slice::from_raw_parts(vs, m),
                slice::from_raw_parts(ws, m),
            )
        };
        let edges = us.iter().zip(vs).zip(ws).map(|((&u, &v), &w)| (u, v, w));
        match WeightedGraph::from_edges(n, edges) {
            Ok(g) => {
                boxed_graph(g, out);
                RsStatus::Ok
            }
            Err(e) => lib_err(e),
        }
    })
}

/// Parses the edge-list text format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn respars_graph_parse(text: *const c_char, out: *mut *mut RsGraph) -> RsStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return fail(RsStatus::NullPointer, "null argument");
        }
        let Ok(text) = CStr::from_ptr(text).to_str() else {
            return fail(RsStatus::Parse, "input is not UTF-8");
        };
        match WeightedGraph::parse(text) {
            Ok(g) => {
                boxed_graph(g, out);
                RsStatus::Ok
            }
            Err(e) => lib_err(e),
        }
    })
}

/// # Safety
/// `g` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn respars_graph_free(g: *mut RsGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn respars_graph_num_vertices(g: *const RsGraph) -> usize {
    graph_ref(g).map_or(0, WeightedGraph::num_vertices)
}

/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn respars_graph_num_edges(g: *const RsGraph) -> usize {
    graph_ref(g).map_or(0, WeightedGraph::num_edges)
}

/// Reads edge `index` in canonical order (`u < v`, sorted).
///
/// # Safety
/// `g` must be a live graph handle; the output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn respars_graph_edge(
    g: *const RsGraph,
    index: usize,
    u: *mut usize,
    v: *mut usize,
    w: *mut f64,
) -> RsStatus {
    guard(|| {
        let Some(g) = graph_ref(g) else {
            return fail(RsStatus::NullPointer, "null graph");
        };
        if u.is_null() || v.is_null() || w.is_null() {
            return fail(RsStatus::NullPointer, "null output");
        }
        let Some(e) = g.edges().get(index) else {
            return fail(RsStatus::InvalidArgument, &format!("edge index {index} out of range"));
        };
        *u = e.u;
        *v = e.v;
        *w = e.w;
        RsStatus::Ok
    })
}

/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn respars_graph_is_connected(g: *const RsGraph, out: *mut bool) -> RsStatus {
    guard(|| {
        let Some(g) = graph_ref(g) else {
            return fail(RsStatus::NullPointer, "null graph");
        };
        if out.is_null() {
            return fail(RsStatus::NullPointer, "null output");
        }
        *out = g.is_connected();
        RsStatus::Ok
    })
}

/// Serializes to the edge-list format. Release the result with
/// [`respars_string_free`]. Returns null on a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn respars_graph_to_edge_list(g: *const RsGraph) -> *mut c_char {
    graph_ref(g)
        .and_then(|g| CString::new(g.to_edge_list()).ok())
        .map_or(ptr::null_mut(), CString::into_raw)
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn respars_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the random-projection resistance oracle.
///
/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn respars_oracle_build(
    g: *const RsGraph,
    epsilon: f64,
    delta: f64,
    seed: u64,
    out: *mut *mut RsOracle,
) -> RsStatus {
    guard(|| {
        let Some(g) = graph_ref(g) else {
            return fail(RsStatus::NullPointer, "null graph");
        };
        if out.is_null() {
            return fail(RsStatus::NullPointer, "null output");
        }
        match ResistanceOracle::build(g, &OracleConfig::new(epsilon, delta, seed)) {
            Ok(o) => {
                *out = Box::into_raw(Box::new(RsOracle(o)));
                RsStatus::Ok
            }
            Err(e) => lib_err(e),
        }
    })
}

/// # Safety
/// `o` must be a live oracle handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn respars_oracle_query(o: *const RsOracle, u: usize, v: usize, out: *mut f64) -> RsStatus {
    guard(|| {
        let Some(o) = o.as_ref() else {
            return fail(RsStatus::NullPointer, "null oracle");
        };
        if out.is_null() {
            return fail(RsStatus::NullPointer, "null output");
        }
        match o.0.query(u, v) {
            Ok(r) => {
                *out = r;
                RsStatus::Ok
            }
            Err(e) => lib_err(e),
        }
    })
}

/// Projection dimension `k`, or 0 for a null handle.
///
/// # Safety
/// `o` must be null or a live oracle handle.
#[no_mangle]
pub unsafe extern "C" fn respars_oracle_k(o: *const RsOracle) -> usize {
    o.as_ref().map_or(0, |o| o.0.k())
}

/// # Safety
/// `o` must be null or an oracle handle that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn respars_oracle_free(o: *mut RsOracle) {
    if !o.is_null() {
        drop(Box::from_raw(o));
    }
}

/// Writes the exact resistance of every edge into `out`, which must hold
/// exactly `num_edges` values.
///
/// # Safety
/// `g` must be a live graph handle and `out` must point to `len` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn respars_exact_resistances(g: *const RsGraph, out: *mut f64, len: usize) -> RsStatus {
    guard(|| {
        let Some(g) = graph_ref(g) else {
            return fail(RsStatus::NullPointer, "null graph");
        };
        if len != g.num_edges() {
            return fail(
                RsStatus::BufferSize,
                &format!("buffer holds {len} values, graph has {} edges", g.num_edges()),
            );
        }
        if out.is_null() && len > 0 {
            return fail(RsStatus::NullPointer, "null output");
        }
        match exact_resistances(g) {
            Ok(r) => {
                if len > 0 {
                    slice::from_raw_parts_mut(out, len).copy_from_slice(&r);
                }
                RsStatus::Ok
            }
            Err(e) => lib_err(e),
        }
    })
}

/// Default options: `q` and `delta` chosen automatically, `c0 = 4`,
/// resistance mode, oracle resistances.
#[no_mangle]
pub extern "C" fn respars_sparsify_options_default(epsilon: f64, seed: u64) -> RsSparsifyOptions {
    RsSparsifyOptions {
        epsilon,
        q: 0,
        c0: respars::sparsify::DEFAULT_C0,
        seed,
        mode: RsMode::Resistance,
        delta: 0.0,
        exact: false,
    }
}

/// Samples a sparsifier; the result is a new graph handle.
///
/// # Safety
/// `g` must be a live graph handle, `opts` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn respars_sparsify(
    g: *const RsGraph,
    opts: *const RsSparsifyOptions,
    out: *mut *mut RsGraph,
) -> RsStatus {
    guard(|| {
        let (Some(g), Some(opts)) = (graph_ref(g), opts.as_ref()) else {
            return fail(RsStatus::NullPointer, "null argument");
        };
        if out.is_null() {
            return fail(RsStatus::NullPointer, "null output");
        }
        let mut cfg = SampleConfig::new(opts.epsilon, opts.seed);
        cfg.q = (opts.q > 0).then_some(opts.q);
        cfg.c0 = opts.c0;
        cfg.mode = match opts.mode {
            RsMode::Resistance => SamplingMode::Resistance,
            RsMode::DegreeBounded => SamplingMode::DegreeBounded,
        };
        cfg.delta_override = (opts.delta > 0.0).then_some(opts.delta);
        cfg.exact = opts.exact;
        match respars::sparsify(g, &cfg) {
            Ok(res) => {
                boxed_graph(res.graph, out);
                RsStatus::Ok
            }
            Err(e) => lib_err(e),
        }
    })
}

/// Extreme generalized eigenvalues of `(L_H, L_G)` on the complement of the
/// all-ones vector.
///
/// # Safety
/// `g` and `h` must be live graph handles; `lo` and `hi` writable.
#[no_mangle]
pub unsafe extern "C" fn respars_spectral_bounds(
    g: *const RsGraph,
    h: *const RsGraph,
    lo: *mut f64,
    hi: *mut f64,
) -> RsStatus {
    guard(|| {
        let (Some(g), Some(h)) = (graph_ref(g), graph_ref(h)) else {
            return fail(RsStatus::NullPointer, "null graph");
        };
        if lo.is_null() || hi.is_null() {
            return fail(RsStatus::NullPointer, "null output");
        }
        match verify::spectral_bounds(g, h) {
            Ok((a, b)) => {
                *lo = a;
                *hi = b;
                RsStatus::Ok
            }
            Err(e) => lib_err(e),
        }
    })
}

/// # Safety
/// `g` and `h` must be live graph handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn respars_cut_check(
    g: *const RsGraph,
    h: *const RsGraph,
    trials: usize,
    seed: u64,
    out: *mut f64,
) -> RsStatus {
    guard(|| {
        let (Some(g), Some(h)) = (graph_ref(g), graph_ref(h)) else {
            return fail(RsStatus::NullPointer, "null graph");
        };
        if out.is_null() {
            return fail(RsStatus::NullPointer, "null output");
        }
        match verify::cut_check(g, h, trials, seed) {
            Ok(v) => {
                *out = v;
                RsStatus::Ok
            }
            Err(e) => lib_err(e),
        }
    })
}

/// # Safety
/// `g` and `h` must be live graph handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn respars_degree_bound_check(g: *const RsGraph, h: *const RsGraph, out: *mut f64) -> RsStatus {
    guard(|| {
        let (Some(g), Some(h)) = (graph_ref(g), graph_ref(h)) else {
            return fail(RsStatus::NullPointer, "null graph");
        };
        if out.is_null() {
            return fail(RsStatus::NullPointer, "null output");
        }
        match verify::degree_bound_check(g, h) {
            Ok(v) => {
                *out = v;
                RsStatus::Ok
            }
            Err(e) => lib_err(e),
        }
    })
}

/// # Safety
/// `g` must be a live graph handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn respars_pi_matrix_checks(g: *const RsGraph, out: *mut bool) -> RsStatus {
    guard(|| {
        let Some(g) = graph_ref(g) else {
            return fail(RsStatus::NullPointer, "null graph");
        };
        if out.is_null() {
            return fail(RsStatus::NullPointer, "null output");
        }
        match verify::pi_matrix_checks(g) {
            Ok(v) => {
                *out = v;
                RsStatus::Ok
            }
            Err(e) => lib_err(e),
        }
    })
}
