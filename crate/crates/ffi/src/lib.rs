//! C ABI over `mti`.
//!
//! Graphs are opaque [`MtiGraph`] handles owned by the caller and released
//! with [`mti_graph_free`]. Every fallible function returns an [`MtiStatus`]
//! and writes its result through an out-pointer only on success. The text of
//! the most recent failure on the calling thread is available from
//! [`mti_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mti::dense_limit::{predict, MeanDegrees};
use mti::ensemble::{run_point, Runner};
use mti::index::{additive_index, ln_multiplicative_index, AdditiveKind, IndexKind, IsolatedPolicy};
use mti::models::{g_of_r, generate, ModelKind, ModelSpec, SeedTriple};
use mti::{Graph, LogIndexValue};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnknownIndex = 3,
    InvalidGraph = 4,
    Io = 5,
    InvalidFactor = 6,
    Unsupported = 7,
    Panic = 8,
}

/// Random graph model. Passed as `uint32_t`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtiModel {
    Er = 0,
    Rg = 1,
    Br = 2,
}

/// Treatment of isolated vertices in vertex-based indices. Passed as `uint32_t`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtiPolicy {
    Exclude = 0,
    LogZero = 1,
}

/// `ln X` of one graph.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MtiLnIndex {
    /// `ln X`, or negative infinity when `is_log_zero` is set.
    pub value: f64,
    pub is_log_zero: bool,
    pub excluded_vertices: usize,
}

/// Aggregate of one index over the replicas of one model point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MtiEnsembleStats {
    pub replicas: u64,
    pub degenerate: u64,
    pub excluded_vertices: u64,
    pub mean_ln: f64,
    pub sem: f64,
    pub mean_ln_over_n: f64,
    pub mean_k_empirical: f64,
    pub mean_k_theoretical: f64,
}

/// Opaque graph handle.
pub struct MtiGraph(Graph);

struct Failure(MtiStatus, String);

impl Failure {
    fn new(status: MtiStatus, message: impl ToString) -> Self {
        Failure(status, message.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MtiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MtiStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&message);
            MtiStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure::new(MtiStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn graph_ref<'a>(g: *const MtiGraph) -> Result<&'a Graph, Failure> {
    non_null(g, "graph")?;
    Ok(&(*g).0)
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    non_null(s, what)?;
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure::new(MtiStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    non_null(out, "output pointer")?;
    out.write(value);
    Ok(())
}

fn model_kind(model: u32) -> Result<ModelKind, Failure> {
    match model {
        0 => Ok(ModelKind::Er),
        1 => Ok(ModelKind::Rg),
        2 => Ok(ModelKind::Br),
        _ => Err(Failure::new(MtiStatus::InvalidArgument, format!("unknown model {model}"))),
    }
}

fn policy(p: u32) -> Result<IsolatedPolicy, Failure> {
    match p {
        0 => Ok(IsolatedPolicy::Exclude),
        1 => Ok(IsolatedPolicy::LogZero),
        _ => Err(Failure::new(MtiStatus::InvalidArgument, format!("unknown policy {p}"))),
    }
}

fn model_spec(model: u32, n1: usize, n2: usize, param: f64) -> Result<ModelSpec, Failure> {
    let spec = match model_kind(model)? {
        ModelKind::Er => ModelSpec::er(n1, param),
        ModelKind::Rg => ModelSpec::rg(n1, param),
        ModelKind::Br => ModelSpec::br(n1, n2, param),
    };
    spec.map_err(|e| Failure::new(MtiStatus::InvalidArgument, e))
}

fn index_kind(name: &str) -> Result<IndexKind, Failure> {
    name.parse().map_err(|e| Failure::new(MtiStatus::UnknownIndex, e))
}

fn boxed(g: Graph, out: *mut *mut MtiGraph) -> Result<(), Failure> {
    non_null(out, "output pointer")?;
    unsafe { out.write(Box::into_raw(Box::new(MtiGraph(g)))) };
    Ok(())
}

/// Static description of an `MtiStatus` value. Never null.
#[no_mangle]
pub extern "C" fn mti_status_message(status: u32) -> *const c_char {
    let s: &'static CStr = match status {
        0 => c"ok",
        1 => c"null pointer argument",
        2 => c"invalid argument",
        3 => c"unknown index name",
        4 => c"invalid graph",
        5 => c"i/o error",
        6 => c"degree function produced a non-positive or non-finite factor",
        7 => c"no formula for this model and index",
        8 => c"internal panic",
        _ => c"unknown status",
    };
    s.as_ptr()
}

/// Message of the last failed call on this thread, or an empty string.
/// Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mti_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a graph on `n` vertices from `edge_count` pairs stored flat in
/// `edges` (`2 * edge_count` entries). `edges` may be null when
/// `edge_count` is zero.
///
/// # Safety
/// `edges` must point to `2 * edge_count` readable values and `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mti_graph_new(n: usize, edges: *const u32, edge_count: usize, out: *mut *mut MtiGraph) -> MtiStatus {
    guard(|| {
        let flat: &[u32] = if edge_count == 0 {
            &[]
        } else {
            non_null(edges, "edges")?;
            std::slice::from_raw_parts(edges, 2 * edge_count)
        };
        let pairs: Vec<(u32, u32)> = flat.chunks_exact(2).map(|c| (c[0], c[1])).collect();
        let g = Graph::new(n, &pairs).map_err(|e| Failure::new(MtiStatus::InvalidGraph, e))?;
        boxed(g, out)
    })
}

/// Reads an edge-list file (`n m` header, then `u v` per line).
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mti_graph_read_edge_list(path: *const c_char, out: *mut *mut MtiGraph) -> MtiStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let file = File::open(path).map_err(|e| Failure::new(MtiStatus::Io, format!("{path}: {e}")))?;
        let g = Graph::read_edge_list(BufReader::new(file)).map_err(|e| Failure::new(MtiStatus::InvalidGraph, e))?;
        boxed(g, out)
    })
}

/// Releases a graph. Null is ignored.
///
/// # Safety
/// `graph` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mti_graph_free(graph: *mut MtiGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Vertex count, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mti_graph_vertex_count(graph: *const MtiGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.vertex_count())
}

/// Edge count, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mti_graph_edge_count(graph: *const MtiGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Copies the degree sequence into `degrees`, which holds `len` entries and
/// must be at least the vertex count.
///
/// # Safety
/// `degrees` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn mti_graph_degrees(graph: *const MtiGraph, degrees: *mut u32, len: usize) -> MtiStatus {
    guard(|| {
        let g = graph_ref(graph)?;
        non_null(degrees, "degrees")?;
        let src = g.degrees();
        if len < src.len() {
            return Err(Failure::new(
                MtiStatus::InvalidArgument,
                format!("buffer holds {len} entries, graph has {} vertices", src.len()),
            ));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), degrees, src.len());
        Ok(())
    })
}

/// Samples one graph. `param` is `p` for ER and BR and `r` for RG. ER and RG
/// use `n1` vertices and ignore `n2`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn mti_generate(
    model: u32,
    n1: usize,
    n2: usize,
    param: f64,
    master_seed: u64,
    point_id: u64,
    replica_index: u64,
    out: *mut *mut MtiGraph,
) -> MtiStatus {
    guard(|| {
        let spec = model_spec(model, n1, n2, param)?;
        let g = generate(&spec, SeedTriple::new(master_seed, point_id, replica_index))
            .map_err(|e| Failure::new(MtiStatus::InvalidArgument, e))?;
        boxed(g, out)
    })
}

/// `ln X` of a named multiplicative index (`nk`, `pi1`, `pi2`, `pi1s`,
/// `rpi`, `hpi`, `chipi`, `idpi`, `gapi`).
///
/// # Safety
/// `index` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mti_ln_index(
    graph: *const MtiGraph,
    index: *const c_char,
    policy_code: u32,
    out: *mut MtiLnIndex,
) -> MtiStatus {
    guard(|| {
        let g = graph_ref(graph)?;
        let kind = index_kind(str_arg(index, "index")?)?;
        let v = ln_multiplicative_index(g, &kind, policy(policy_code)?)
            .map_err(|e| Failure::new(MtiStatus::InvalidFactor, e))?;
        write_out(
            out,
            MtiLnIndex {
                value: v.value.to_f64(),
                is_log_zero: v.value == LogIndexValue::LogZero,
                excluded_vertices: v.excluded_vertices,
            },
        )
    })
}

/// A named additive index (`m1`, `m2`, `r`, `h`, `chi`, `id`).
///
/// # Safety
/// `index` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mti_additive_index(
    graph: *const MtiGraph,
    index: *const c_char,
    policy_code: u32,
    out: *mut f64,
) -> MtiStatus {
    guard(|| {
        let g = graph_ref(graph)?;
        let kind: AdditiveKind = str_arg(index, "index")?
            .parse()
            .map_err(|e| Failure::new(MtiStatus::UnknownIndex, e))?;
        let v = additive_index(g, &kind, policy(policy_code)?).map_err(|e| Failure::new(MtiStatus::InvalidFactor, e))?;
        write_out(out, v)
    })
}

/// Expected network mean degree of a model point.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mti_mean_degree(model: u32, n1: usize, n2: usize, param: f64, out: *mut f64) -> MtiStatus {
    guard(|| write_out(out, model_spec(model, n1, n2, param)?.mean_degree().network))
}

/// Probability that two uniform points of the unit square lie within `r`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mti_g_of_r(r: f64, out: *mut f64) -> MtiStatus {
    guard(|| write_out(out, g_of_r(r).map_err(|e| Failure::new(MtiStatus::InvalidArgument, e))?))
}

/// Dense-limit `<ln X>/n`, with `n` the total vertex count. ER and RG use
/// `d1` as `<k>` and ignore `d2`; BR takes the per-set mean degrees.
///
/// # Safety
/// `index` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mti_predict(model: u32, index: *const c_char, d1: f64, d2: f64, out: *mut f64) -> MtiStatus {
    guard(|| {
        let kind = model_kind(model)?;
        let index = index_kind(str_arg(index, "index")?)?;
        let degrees = match kind {
            ModelKind::Br => MeanDegrees::Bipartite { d1, d2 },
            ModelKind::Er | ModelKind::Rg => MeanDegrees::Single(d1),
        };
        let p = predict(kind, &index, degrees).map_err(|e| {
            let status = match e {
                mti::dense_limit::DenseLimitError::Unsupported { .. } => MtiStatus::Unsupported,
                _ => MtiStatus::InvalidArgument,
            };
            Failure::new(status, e)
        })?;
        write_out(out, p.value)
    })
}

/// Runs `replicas` replicas of one model point and aggregates one index.
/// Results do not depend on `workers`; values of 0 or 1 run on the calling
/// thread.
///
/// # Safety
/// `index` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn mti_run_point(
    model: u32,
    n1: usize,
    n2: usize,
    param: f64,
    index: *const c_char,
    replicas: u64,
    master_seed: u64,
    point_id: u64,
    policy_code: u32,
    workers: usize,
    out: *mut MtiEnsembleStats,
) -> MtiStatus {
    guard(|| {
        let spec = model_spec(model, n1, n2, param)?;
        let kind = index_kind(str_arg(index, "index")?)?;
        let policy = policy(policy_code)?;
        non_null(out, "output pointer")?;
        if replicas == 0 {
            return Err(Failure::new(MtiStatus::InvalidArgument, "replicas must be positive"));
        }
        let runner = Runner::new(workers).map_err(|e| Failure::new(MtiStatus::InvalidArgument, e))?;
        let stats = run_point(&spec, point_id, &[kind], replicas, master_seed, policy, &runner)
            .map_err(|e| Failure::new(MtiStatus::InvalidFactor, e))?;
        let s = &stats[0];
        write_out(
            out,
            MtiEnsembleStats {
                replicas: s.replicas,
                degenerate: s.degenerate,
                excluded_vertices: s.excluded_vertices,
                mean_ln: s.mean_ln,
                sem: s.sem,
                mean_ln_over_n: s.mean_ln_over_n(),
                mean_k_empirical: s.mean_k_empirical,
                mean_k_theoretical: s.mean_k_theoretical,
            },
        )
    })
}
