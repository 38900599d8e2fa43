//! C interface to `evoapsp`.
//!
//! Every fallible function returns an [`EvoStatus`]; on failure the message is
//! available from [`evo_last_error_message`] on the same thread. Graphs and
//! distance matrices are opaque handles released with their `_free` function.
//! Strings returned by the library are released with [`evo_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use evoapsp::evo::{self, CrossoverKind, PathMode, TieRule};
use evoapsp::exact::{self, DistMatrix};
use evoapsp::graph::{self, Graph};
use evoapsp::harness;
use evoapsp::rng::RngStream;
use evoapsp::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Parse = 3,
    Utf8 = 4,
    Panic = 5,
    State = 6,
}

/// Values for [`EvoParams::crossover`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvoCrossover {
    None = 0,
    Naive = 1,
    Matched = 2,
    MatchedTrim = 3,
}

/// Values for [`EvoParams::path_mode`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvoPathMode {
    Simple = 0,
    Walk = 1,
}

/// Values for [`EvoParams::tie_rule`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvoTieRule {
    Replace = 0,
    Keep = 1,
}

/// Distance reported for unreachable pairs.
pub const EVO_INF: u64 = u64::MAX;

/// Opaque graph handle.
pub struct EvoGraph(Graph);

/// Opaque exact-distance handle.
pub struct EvoDistMatrix(DistMatrix);

/// Algorithm settings. Enum-valued fields hold the codes of
/// `EvoCrossover`, `EvoPathMode` and `EvoTieRule`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EvoParams {
    pub crossover: u32,
    pub crossover_prob: f64,
    pub mutation_lambda: f64,
    pub path_mode: u32,
    pub tie_rule: u32,
    pub max_steps: u64,
}

/// Outcome of [`evo_run`]. `steps_to_optimal` is meaningful only when `success`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct EvoRunResult {
    pub success: bool,
    pub steps_to_optimal: u64,
    pub steps_executed: u64,
    pub optimal_pairs: u64,
    pub target_pairs: u64,
}

/// Power-law fit `mean ≈ exp(log_c) * n^alpha`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct EvoFit {
    pub alpha: f64,
    pub log_c: f64,
    pub r2: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(EvoStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Param(_) => EvoStatus::InvalidParameter,
            Error::Parse { .. } => EvoStatus::Parse,
            Error::State(_) => EvoStatus::State,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(EvoStatus::NullPointer, format!("{what} is null"))
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, translating errors and panics into a status code.
fn guard<F>(f: F) -> EvoStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EvoStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal panic: {msg}"));
            EvoStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn evo_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses an edge list.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evo_graph_parse(
    text: *const c_char,
    out: *mut *mut EvoGraph,
) -> EvoStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Failure(EvoStatus::Utf8, e.to_string()))?;
        let g = graph::parse_graph(s)?;
        write_out(out, boxed(EvoGraph(g)), "out")
    })
}

/// Complete digraph with integer weights drawn uniformly from `[w_min, w_max]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evo_graph_complete_uniform(
    n: usize,
    w_min: u64,
    w_max: u64,
    seed: u64,
    out: *mut *mut EvoGraph,
) -> EvoStatus {
    guard(|| {
        let g = graph::generate_complete_uniform(n, w_min, w_max, seed)?;
        write_out(out, boxed(EvoGraph(g)), "out")
    })
}

/// Complete digraph whose unique shortest `0 -> n-1` path is the chain `0, 1, ..., n-1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evo_graph_hard_path(
    n: usize,
    heavy: u64,
    out: *mut *mut EvoGraph,
) -> EvoStatus {
    guard(|| {
        let g = graph::generate_hard_path(n, heavy)?;
        write_out(out, boxed(EvoGraph(g)), "out")
    })
}

/// Canonical edge-list text; release with [`evo_string_free`].
///
/// # Safety
/// `g` must be a live graph handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evo_graph_serialize(
    g: *const EvoGraph,
    out: *mut *mut c_char,
) -> EvoStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        let text = CString::new(graph::serialize_graph(&g.0)).expect("edge lists contain no nul");
        write_out(out, text.into_raw(), "out")
    })
}

/// Vertex count, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn evo_graph_vertex_count(g: *const EvoGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.vertex_count())
}

/// Edge count, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn evo_graph_edge_count(g: *const EvoGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.edge_count())
}

/// # Safety
/// `g` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn evo_graph_free(g: *mut EvoGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn evo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// All-pairs distances and edge counts.
///
/// # Safety
/// `g` must be a live graph handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evo_floyd_warshall(
    g: *const EvoGraph,
    out: *mut *mut EvoDistMatrix,
) -> EvoStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        write_out(
            out,
            boxed(EvoDistMatrix(exact::floyd_warshall(&g.0))),
            "out",
        )
    })
}

/// Distance and edge count of a shortest `u -> v` path. Unreachable pairs
/// report `EVO_INF` and `UINT32_MAX`. Either output may be null.
///
/// # Safety
/// `d` must be a live matrix handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn evo_dist_get(
    d: *const EvoDistMatrix,
    u: u32,
    v: u32,
    dist: *mut u64,
    hops: *mut u32,
) -> EvoStatus {
    guard(|| {
        let d = &deref(d, "matrix")?.0;
        let n = d.vertex_count();
        if u as usize >= n || v as usize >= n {
            return Err(Failure(
                EvoStatus::InvalidParameter,
                format!("pair ({u}, {v}) outside 0..{n}"),
            ));
        }
        if !dist.is_null() {
            dist.write(d.dist(u, v).unwrap_or(EVO_INF));
        }
        if !hops.is_null() {
            hops.write(d.hops(u, v).unwrap_or(u32::MAX));
        }
        Ok(())
    })
}

/// # Safety
/// `d` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn evo_dist_free(d: *mut EvoDistMatrix) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Single-source distances into `out[0..len]`; `len` must equal the vertex count.
///
/// # Safety
/// `g` must be a live graph handle; `out` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn evo_dijkstra(
    g: *const EvoGraph,
    source: u32,
    out: *mut u64,
    len: usize,
) -> EvoStatus {
    guard(|| {
        let g = &deref(g, "graph")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        if len != g.vertex_count() {
            return Err(Failure(
                EvoStatus::InvalidParameter,
                format!(
                    "buffer holds {len} values, graph has {} vertices",
                    g.vertex_count()
                ),
            ));
        }
        let dist = exact::dijkstra_from(g, source)?;
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(&dist);
        Ok(())
    })
}

/// Default settings for an `n`-vertex graph: mutation only, budget `50 n^4`.
#[no_mangle]
pub extern "C" fn evo_params_default(n: usize) -> EvoParams {
    let p = evo::EvoParams::mutation_only(evo::EvoParams::default_budget(n));
    EvoParams {
        crossover: EvoCrossover::None as u32,
        crossover_prob: p.crossover_prob,
        mutation_lambda: p.mutation_lambda,
        path_mode: EvoPathMode::Simple as u32,
        tie_rule: EvoTieRule::Replace as u32,
        max_steps: p.max_steps,
    }
}

fn convert_params(p: &EvoParams) -> Result<evo::EvoParams, Failure> {
    let bad = |field: &str, v: u32| {
        Failure(
            EvoStatus::InvalidParameter,
            format!("unknown {field} code {v}"),
        )
    };
    let crossover_kind = match p.crossover {
        0 => CrossoverKind::None,
        1 => CrossoverKind::NaiveUniform,
        2 => CrossoverKind::EndpointMatched,
        3 => CrossoverKind::EndpointMatchedTrim,
        v => return Err(bad("crossover", v)),
    };
    let path_mode = match p.path_mode {
        0 => PathMode::SimplePath,
        1 => PathMode::Walk,
        v => return Err(bad("path mode", v)),
    };
    let tie_rule = match p.tie_rule {
        0 => TieRule::ReplaceOnTie,
        1 => TieRule::KeepOnTie,
        v => return Err(bad("tie rule", v)),
    };
    let params = evo::EvoParams {
        crossover_kind,
        crossover_prob: p.crossover_prob,
        mutation_lambda: p.mutation_lambda,
        path_mode,
        tie_rule,
        max_steps: p.max_steps,
    };
    params.validate()?;
    Ok(params)
}

/// One seeded run until every reachable pair holds a shortest path or the
/// budget runs out.
///
/// # Safety
/// `g` must be a live graph handle, `params` readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn evo_run(
    g: *const EvoGraph,
    params: *const EvoParams,
    seed: u64,
    stream: u64,
    out: *mut EvoRunResult,
) -> EvoStatus {
    guard(|| {
        let g = &deref(g, "graph")?.0;
        let params = convert_params(deref(params, "params")?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let oracle = exact::floyd_warshall(g);
        let stats = evo::run(g, &params, &oracle, RngStream::new(seed, stream))?;
        out.write(EvoRunResult {
            success: stats.success,
            steps_to_optimal: stats.steps_to_optimal.unwrap_or(0),
            steps_executed: stats.steps_executed,
            optimal_pairs: stats.optimal_pairs as u64,
            target_pairs: stats.target_pairs as u64,
        });
        Ok(())
    })
}

/// `H_m` as a double.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evo_harmonic(m: u64, out: *mut f64) -> EvoStatus {
    guard(|| {
        let h = harness::harmonic(m)?;
        write_out(out, h.value, "out")
    })
}

/// Least-squares fit of `ln(means) = log_c + alpha * ln(ns)` over `len` points.
///
/// # Safety
/// `ns` and `means` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evo_fit_exponent(
    ns: *const f64,
    means: *const f64,
    len: usize,
    out: *mut EvoFit,
) -> EvoStatus {
    guard(|| {
        if ns.is_null() || means.is_null() {
            return Err(null("input array"));
        }
        let ns = std::slice::from_raw_parts(ns, len);
        let means = std::slice::from_raw_parts(means, len);
        let points: Vec<(f64, f64)> = ns.iter().copied().zip(means.iter().copied()).collect();
        let f = harness::fit_exponent(&points)?;
        write_out(
            out,
            EvoFit {
                alpha: f.alpha,
                log_c: f.log_c,
                r2: f.r2,
            },
            "out",
        )
    })
}
