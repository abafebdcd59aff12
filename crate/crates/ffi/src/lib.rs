//! C ABI over `hetg-core`.
//!
//! Every object crosses the boundary as an opaque handle created by a
//! `hetg_*_new`/loader function and released with the matching `*_free`.
//! Fallible functions return a [`HetgStatus`]; on failure a message for the
//! calling thread is available from [`hetg_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use hetg_core::builder::{compose, BuildMode, CostReport, SemanticBuilder};
use hetg_core::model::io::{load_graph, save_graph};
use hetg_core::model::synth::{generate_synthetic, Preset};
use hetg_core::restructure::{restructure, verify_partition, BackbonePartition, Matching, PartitionStats};
use hetg_core::sim::{compare_layouts, schedule_restructured, simulate_na, SimConfig, SimReport, Unit};
use hetg_core::{Error, HetGraph, Metapath, SemanticGraph};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HetgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    InvalidMetapath = 5,
    Internal = 6,
    Panic = 7,
    BufferTooSmall = 8,
}

impl From<&Error> for HetgStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Io { .. } | Error::MissingFile(_) => HetgStatus::Io,
            Error::Parse { .. } | Error::IdOutOfRange { .. } | Error::Json { .. } | Error::Schema(_) => {
                HetgStatus::Parse
            }
            Error::UnknownRelation(_)
            | Error::UnknownType(_)
            | Error::InvalidMetapath { .. }
            | Error::Undecomposable(_)
            | Error::TypeMismatch { .. } => HetgStatus::InvalidMetapath,
            Error::InfeasibleEdges { .. } | Error::InvalidMatching(_) | Error::InvalidConfig(_) => {
                HetgStatus::InvalidArgument
            }
            Error::Internal(_) => HetgStatus::Internal,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next `hetg_*` call on the same thread.
#[no_mangle]
pub extern "C" fn hetg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static, NUL-terminated library version.
#[no_mangle]
pub extern "C" fn hetg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn fail(status: HetgStatus, msg: impl Into<String>) -> HetgStatus {
    set_last_error(msg);
    status
}

/// Runs `f`, mapping errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), HetgStatus>) -> HetgStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HetgStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(HetgStatus::Panic, "panic inside hetg"),
    }
}

fn core_err(e: Error) -> HetgStatus {
    let status = HetgStatus::from(&e);
    fail(status, e.to_string())
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, HetgStatus> {
    if p.is_null() {
        return Err(fail(HetgStatus::NullPointer, format!("{name} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(HetgStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, HetgStatus> {
    p.as_ref().ok_or_else(|| fail(HetgStatus::NullPointer, format!("{name} is NULL")))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, HetgStatus> {
    p.as_mut().ok_or_else(|| fail(HetgStatus::NullPointer, format!("{name} is NULL")))
}

/// Opaque heterogeneous graph.
pub struct HetgGraph {
    inner: HetGraph,
}

/// Opaque semantic graph.
pub struct HetgSemanticGraph {
    inner: SemanticGraph,
}

/// Opaque restructured partition of a semantic graph.
pub struct HetgPartition {
    matching: Matching,
    partition: BackbonePartition,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HetgCost {
    pub macs: u64,
    pub edges_read: u64,
    pub edges_written: u64,
    pub cache_hits: u64,
    pub segments_built: u64,
}

impl From<CostReport> for HetgCost {
    fn from(c: CostReport) -> Self {
        HetgCost {
            macs: c.macs,
            edges_read: c.edges_read,
            edges_written: c.edges_written,
            cache_hits: c.cache_hits,
            segments_built: c.segments_built,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HetgPartitionStats {
    pub edges: u64,
    pub matching_size: u64,
    pub src_in: u64,
    pub src_out: u64,
    pub dst_in: u64,
    pub dst_out: u64,
    pub gs1_edges: u64,
    pub gs2_edges: u64,
    pub gs3_edges: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HetgSimResult {
    pub total_accesses: u64,
    pub hits: u64,
    pub cold_misses: u64,
    pub replacements: u64,
    pub evictions: u64,
    pub dram_accesses: u64,
    pub dram_bytes: u64,
    pub distinct_sources: u64,
}

impl From<&SimReport> for HetgSimResult {
    fn from(r: &SimReport) -> Self {
        HetgSimResult {
            total_accesses: r.total_accesses,
            hits: r.hits,
            cold_misses: r.cold_misses,
            replacements: r.replacements,
            evictions: r.evictions,
            dram_accesses: r.dram_accesses,
            dram_bytes: r.dram_bytes,
            distinct_sources: r.distinct_sources,
        }
    }
}

fn into_handle<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Loads a graph directory (`schema.json` plus one edge file per relation).
///
/// # Safety
/// `dir` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn hetg_graph_load(dir: *const c_char, out: *mut *mut HetgGraph) -> HetgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let dir = str_arg(dir, "dir")?;
        let g = load_graph(Path::new(dir)).map_err(core_err)?;
        *out = into_handle(HetgGraph { inner: g });
        Ok(())
    })
}

/// Generates a synthetic graph from a named preset (`acm`, `dblp`, `imdb`).
///
/// # Safety
/// `preset` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn hetg_graph_generate_preset(
    preset: *const c_char,
    scale: f64,
    seed: u64,
    out: *mut *mut HetgGraph,
) -> HetgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let preset: Preset = str_arg(preset, "preset")?.parse().map_err(core_err)?;
        let cfg = preset.config(scale, seed).map_err(core_err)?;
        let g = generate_synthetic(&cfg).map_err(core_err)?;
        *out = into_handle(HetgGraph { inner: g });
        Ok(())
    })
}

/// Writes `graph` as a graph directory.
///
/// # Safety
/// `graph` must be a live handle and `dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hetg_graph_save(graph: *const HetgGraph, dir: *const c_char) -> HetgStatus {
    guard(|| {
        let g = ref_arg(graph, "graph")?;
        let dir = str_arg(dir, "dir")?;
        save_graph(&g.inner, Path::new(dir)).map_err(core_err)
    })
}

/// Total edge count over all relations; 0 for NULL.
///
/// # Safety
/// `graph` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hetg_graph_edge_count(graph: *const HetgGraph) -> u64 {
    graph.as_ref().map_or(0, |g| g.inner.edge_count() as u64)
}

/// # Safety
/// `graph` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn hetg_graph_free(graph: *mut HetgGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// The one-hop semantic graph of a named relation.
///
/// # Safety
/// `graph` must be a live handle, `relation` a NUL-terminated string and
/// `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn hetg_graph_relation(
    graph: *const HetgGraph,
    relation: *const c_char,
    out: *mut *mut HetgSemanticGraph,
) -> HetgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let g = ref_arg(graph, "graph")?;
        let rel = str_arg(relation, "relation")?;
        let sg = g.inner.relation_adjacency(rel).map_err(core_err)?;
        *out = into_handle(HetgSemanticGraph { inner: sg });
        Ok(())
    })
}

/// Builds the semantic graph of `metapath` (e.g. `"APA"` or
/// `"Author-Paper-Author"`). `naive` selects hop-by-hop composition instead
/// of trie-planned composition. `cost` may be NULL.
///
/// # Safety
/// `graph` must be a live handle, `metapath` a NUL-terminated string, `out`
/// writable and `cost` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn hetg_graph_build_metapath(
    graph: *const HetgGraph,
    metapath: *const c_char,
    naive: bool,
    out: *mut *mut HetgSemanticGraph,
    cost: *mut HetgCost,
) -> HetgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let g = ref_arg(graph, "graph")?;
        let path = Metapath::parse(str_arg(metapath, "metapath")?).map_err(core_err)?;
        let mut builder = SemanticBuilder::new(&g.inner).map_err(core_err)?;
        let mode = if naive { BuildMode::Naive } else { BuildMode::Ctt };
        let (sg, c) = builder.build(&path, mode).map_err(core_err)?;
        if let Some(cost) = cost.as_mut() {
            *cost = c.into();
        }
        *out = into_handle(HetgSemanticGraph {
            inner: std::sync::Arc::unwrap_or_clone(sg),
        });
        Ok(())
    })
}

/// Builds `count` metapaths in order with one builder and reports the
/// summed cost. Later targets reuse earlier ones in trie mode.
///
/// # Safety
/// `metapaths` must point to `count` NUL-terminated strings and `cost` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn hetg_graph_batch_cost(
    graph: *const HetgGraph,
    metapaths: *const *const c_char,
    count: usize,
    naive: bool,
    cost: *mut HetgCost,
) -> HetgStatus {
    guard(|| {
        let cost = out_arg(cost, "cost")?;
        let g = ref_arg(graph, "graph")?;
        if metapaths.is_null() && count > 0 {
            return Err(fail(HetgStatus::NullPointer, "metapaths is NULL"));
        }
        let mut targets = Vec::with_capacity(count);
        for i in 0..count {
            let s = str_arg(*metapaths.add(i), "metapath")?;
            targets.push(Metapath::parse(s).map_err(core_err)?);
        }
        let mut builder = SemanticBuilder::new(&g.inner).map_err(core_err)?;
        let mode = if naive { BuildMode::Naive } else { BuildMode::Ctt };
        let (total, _) = builder.batch_build(&targets, mode).map_err(core_err)?;
        *cost = total.into();
        Ok(())
    })
}

/// Semantic graph from parallel source/destination id arrays. The endpoint
/// types are labelled `S` and `D`.
///
/// # Safety
/// `src` and `dst` must each point to `n_edges` readable ids (either may be
/// NULL when `n_edges` is 0) and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hetg_semantic_from_edges(
    n_src: u32,
    n_dst: u32,
    src: *const u32,
    dst: *const u32,
    n_edges: usize,
    out: *mut *mut HetgSemanticGraph,
) -> HetgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let (src, dst) = if n_edges == 0 {
            (&[][..], &[][..])
        } else {
            if src.is_null() || dst.is_null() {
                return Err(fail(HetgStatus::NullPointer, "edge arrays are NULL"));
            }
            (std::slice::from_raw_parts(src, n_edges), std::slice::from_raw_parts(dst, n_edges))
        };
        let mut edges = Vec::with_capacity(n_edges);
        for (&u, &v) in src.iter().zip(dst) {
            if u >= n_src || v >= n_dst {
                return Err(fail(
                    HetgStatus::InvalidArgument,
                    format!("edge ({u}, {v}) outside {n_src}x{n_dst}"),
                ));
            }
            edges.push((u, v));
        }
        let label = Metapath::new(["S", "D"]).map_err(core_err)?;
        let sg = SemanticGraph::from_edges(label, n_src as usize, n_dst as usize, edges);
        *out = into_handle(HetgSemanticGraph { inner: sg });
        Ok(())
    })
}

/// # Safety
/// `sg` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hetg_semantic_n_src(sg: *const HetgSemanticGraph) -> u64 {
    sg.as_ref().map_or(0, |s| s.inner.n_src() as u64)
}

/// # Safety
/// `sg` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hetg_semantic_n_dst(sg: *const HetgSemanticGraph) -> u64 {
    sg.as_ref().map_or(0, |s| s.inner.n_dst() as u64)
}

/// # Safety
/// `sg` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hetg_semantic_edge_count(sg: *const HetgSemanticGraph) -> u64 {
    sg.as_ref().map_or(0, |s| s.inner.edge_count() as u64)
}

/// Copies the edges, sorted by source then destination, into `src`/`dst`.
/// Fails with `BufferTooSmall` when `capacity` is below the edge count;
/// `written` always receives the edge count.
///
/// # Safety
/// `src` and `dst` must each have room for `capacity` ids; `written` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn hetg_semantic_edges(
    sg: *const HetgSemanticGraph,
    src: *mut u32,
    dst: *mut u32,
    capacity: usize,
    written: *mut usize,
) -> HetgStatus {
    guard(|| {
        let written = out_arg(written, "written")?;
        let s = ref_arg(sg, "sg")?;
        let n = s.inner.edge_count();
        *written = n;
        if capacity < n {
            return Err(fail(HetgStatus::BufferTooSmall, format!("need room for {n} edges")));
        }
        if n > 0 && (src.is_null() || dst.is_null()) {
            return Err(fail(HetgStatus::NullPointer, "edge buffers are NULL"));
        }
        for (i, (u, v)) in s.inner.edges().enumerate() {
            *src.add(i) = u;
            *dst.add(i) = v;
        }
        Ok(())
    })
}

/// Composes `left` then `right` (end type of `left` must equal the start
/// type of `right`). `cost` may be NULL.
///
/// # Safety
/// Handles must be live, `out` writable, `cost` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn hetg_semantic_compose(
    left: *const HetgSemanticGraph,
    right: *const HetgSemanticGraph,
    out: *mut *mut HetgSemanticGraph,
    cost: *mut HetgCost,
) -> HetgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let l = ref_arg(left, "left")?;
        let r = ref_arg(right, "right")?;
        let mut c = CostReport::default();
        let sg = compose(&l.inner, &r.inner, &mut c).map_err(core_err)?;
        if let Some(cost) = cost.as_mut() {
            *cost = c.into();
        }
        *out = into_handle(HetgSemanticGraph { inner: sg });
        Ok(())
    })
}

/// # Safety
/// `sg` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn hetg_semantic_free(sg: *mut HetgSemanticGraph) {
    if !sg.is_null() {
        drop(Box::from_raw(sg));
    }
}

/// Decouples and recouples `sg`; the partition is verified before return.
///
/// # Safety
/// `sg` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hetg_restructure(sg: *const HetgSemanticGraph, out: *mut *mut HetgPartition) -> HetgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let s = ref_arg(sg, "sg")?;
        let (matching, partition) = restructure(&s.inner).map_err(core_err)?;
        *out = into_handle(HetgPartition { matching, partition });
        Ok(())
    })
}

/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hetg_partition_stats(p: *const HetgPartition, out: *mut HetgPartitionStats) -> HetgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let p = ref_arg(p, "partition")?;
        let s = PartitionStats::new(&p.matching, &p.partition);
        *out = HetgPartitionStats {
            edges: s.edges as u64,
            matching_size: s.matching_size as u64,
            src_in: s.src_in as u64,
            src_out: s.src_out as u64,
            dst_in: s.dst_in as u64,
            dst_out: s.dst_out as u64,
            gs1_edges: s.gs1_edges as u64,
            gs2_edges: s.gs2_edges as u64,
            gs3_edges: s.gs3_edges as u64,
        };
        Ok(())
    })
}

/// Checks every partition invariant of `p` against `sg`.
///
/// # Safety
/// Handles must be live and `passed` writable.
#[no_mangle]
pub unsafe extern "C" fn hetg_partition_verify(
    sg: *const HetgSemanticGraph,
    p: *const HetgPartition,
    passed: *mut bool,
) -> HetgStatus {
    guard(|| {
        let passed = out_arg(passed, "passed")?;
        let s = ref_arg(sg, "sg")?;
        let p = ref_arg(p, "partition")?;
        *passed = verify_partition(&s.inner, &p.partition).passed();
        Ok(())
    })
}

/// # Safety
/// `p` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn hetg_partition_free(p: *mut HetgPartition) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Replays neighbor aggregation over `sg` in original order, or over the
/// restructured schedule of `partition` when it is not NULL.
///
/// # Safety
/// `sg` must be a live handle, `partition` NULL or a live handle derived
/// from `sg`, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hetg_simulate(
    sg: *const HetgSemanticGraph,
    partition: *const HetgPartition,
    capacity: usize,
    feature_bytes: u64,
    out: *mut HetgSimResult,
) -> HetgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let s = ref_arg(sg, "sg")?;
        let cfg = SimConfig::new(capacity, feature_bytes);
        let report = match partition.as_ref() {
            None => simulate_na(&[Unit::Whole(&s.inner)], &cfg),
            Some(p) => {
                if p.partition.n_src != s.inner.n_src() || p.partition.n_dst != s.inner.n_dst() {
                    return Err(fail(HetgStatus::InvalidArgument, "partition does not match graph"));
                }
                let units: Vec<Unit> = schedule_restructured(&p.partition).into_iter().map(Unit::Sub).collect();
                simulate_na(&units, &cfg)
            }
        }
        .map_err(core_err)?;
        *out = HetgSimResult::from(&report);
        Ok(())
    })
}

/// Original versus restructured simulation at one buffer size.
///
/// # Safety
/// Handles must be live and `original`/`restructured` writable.
#[no_mangle]
pub unsafe extern "C" fn hetg_compare_layouts(
    sg: *const HetgSemanticGraph,
    partition: *const HetgPartition,
    capacity: usize,
    feature_bytes: u64,
    original: *mut HetgSimResult,
    restructured: *mut HetgSimResult,
) -> HetgStatus {
    guard(|| {
        let original = out_arg(original, "original")?;
        let restructured = out_arg(restructured, "restructured")?;
        let s = ref_arg(sg, "sg")?;
        let p = ref_arg(partition, "partition")?;
        let cmp = compare_layouts(&s.inner, &p.partition, &SimConfig::new(capacity, feature_bytes)).map_err(core_err)?;
        *original = HetgSimResult::from(&cmp.original);
        *restructured = HetgSimResult::from(&cmp.restructured);
        Ok(())
    })
}
