// SPDX-License-Identifier: Apache-2.0

//! C ABI over `topocost`.
//!
//! Graphs cross the boundary as opaque `TcGraph` handles. Every fallible
//! function returns a `TcStatus`; on failure a message is available from
//! `tc_last_error_message` on the same thread until the next call. Strings
//! returned by the library are owned by the caller and released with
//! `tc_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use topocost::{
    build_topology, closed_form_cost, compute_metrics, cost_per_host, optimize_fat_tree_radix,
    route_uniform_all_to_all, verify_non_blocking, ClosedForm, CostBreakdown, CostParams, DesignMode,
    DesignQuery, Error, Exact, NetworkGraph, RoutingPolicy, TopologySpec,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidSpec = 3,
    SizeExceeded = 4,
    Disconnected = 5,
    NoHosts = 6,
    SingleHost = 7,
    IllFormed = 8,
    EmptyFeasibleSet = 9,
    Document = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TcFamily {
    /// a = rows, b = cols
    Torus = 0,
    /// a = dim
    Hypercube = 1,
    /// a = side
    FlattenedButterfly = 2,
    /// a = radix, b = levels
    FatTree = 3,
    /// a = radix
    Star = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TcDesignMode {
    WorstCase = 0,
    AverageCase = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TcRoutingPolicy {
    EqualSplitMinimal = 0,
    DeterministicMinimal = 1,
}

/// Closed-form family selector for `tc_closed_form_cost`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TcClosedForm {
    /// a = routers
    Torus = 0,
    /// a = routers
    Hypercube = 1,
    /// a = routers
    FlattenedButterfly = 2,
    /// a = hosts, b = radix
    FatTree = 3,
    /// a = radix
    Star = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TcRational {
    pub num: u64,
    pub den: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TcMetrics {
    pub routers: u32,
    pub hosts: u64,
    pub links: u64,
    pub links_per_host: TcRational,
    pub diameter: u32,
    pub avg_path: TcRational,
    pub max_radix: u32,
    pub node_ratio: TcRational,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TcCostParams {
    pub beta_over_alpha: f64,
    pub design_mode: TcDesignMode,
    pub b_host: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TcCostBreakdown {
    pub h: f64,
    pub l_host: f64,
    pub bw_req: f64,
    pub router_cost: f64,
    pub node_ratio: f64,
    pub total: f64,
    pub over_provisioned: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TcVerifyResult {
    pub bw_req: f64,
    pub max_load: f64,
    pub avg_load: f64,
    pub margin: f64,
    pub pass: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TcDesignResult {
    pub k_opt: u64,
    pub levels: f64,
    pub cost: f64,
}

/// Opaque graph handle.
pub struct TcGraph(NetworkGraph);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(message));
}

fn status_of(err: &Error) -> TcStatus {
    match err {
        Error::InvalidSpec(_) => TcStatus::InvalidSpec,
        Error::SizeExceeded { .. } => TcStatus::SizeExceeded,
        Error::Disconnected { .. } => TcStatus::Disconnected,
        Error::NoHosts => TcStatus::NoHosts,
        Error::SingleHost => TcStatus::SingleHost,
        Error::IllFormed(_) => TcStatus::IllFormed,
        Error::InvalidParams(_) => TcStatus::InvalidArgument,
        Error::EmptyFeasibleSet => TcStatus::EmptyFeasibleSet,
        Error::Document(_) => TcStatus::Document,
    }
}

struct Fail(TcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(TcStatus::NullPointer, format!("{what} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> TcStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => TcStatus::Ok,
        Ok(Err(Fail(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            TcStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(p: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

fn rational(x: Exact) -> TcRational {
    TcRational { num: x.numer(), den: x.denom() }
}

fn params(p: &TcCostParams) -> Result<CostParams, Fail> {
    let mode = match p.design_mode {
        TcDesignMode::WorstCase => DesignMode::WorstCase,
        TcDesignMode::AverageCase => DesignMode::AverageCase,
    };
    Ok(CostParams::new(p.beta_over_alpha, mode, p.b_host)?)
}

fn breakdown(c: CostBreakdown) -> TcCostBreakdown {
    TcCostBreakdown {
        h: c.h,
        l_host: c.l_host,
        bw_req: c.bw_req,
        router_cost: c.router_cost,
        node_ratio: c.node_ratio,
        total: c.total,
        over_provisioned: c.over_provisioned,
    }
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn tc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a topology. See `TcFamily` for the meaning of `a` and `b`; unused
/// parameters are ignored.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_graph_build(family: TcFamily, a: u32, b: u32, out: *mut *mut TcGraph) -> TcStatus {
    guard(|| {
        let spec = match family {
            TcFamily::Torus => TopologySpec::Torus2D { rows: a, cols: b },
            TcFamily::Hypercube => TopologySpec::Hypercube { dim: a },
            TcFamily::FlattenedButterfly => TopologySpec::FlattenedButterfly2D { side: a },
            TcFamily::FatTree => TopologySpec::FatTree { radix: a, levels: b },
            TcFamily::Star => TopologySpec::Star { radix: a },
        };
        if out.is_null() {
            return Err(null("out"));
        }
        let graph = build_topology(spec)?;
        write(out, Box::into_raw(Box::new(TcGraph(graph))), "out")
    })
}

/// Parses and validates a graph document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_graph_from_json(json: *const c_char, out: *mut *mut TcGraph) -> TcStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Fail(TcStatus::Document, format!("document is not UTF-8: {e}")))?;
        let graph = NetworkGraph::from_json(text)?;
        write(out, Box::into_raw(Box::new(TcGraph(graph))), "out")
    })
}

/// Releases a graph. Null is ignored.
///
/// # Safety
/// `graph` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tc_graph_free(graph: *mut TcGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Serializes a graph; release the result with `tc_string_free`.
///
/// # Safety
/// `graph` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_graph_to_json(graph: *const TcGraph, out: *mut *mut c_char) -> TcStatus {
    guard(|| {
        let g = deref(graph, "graph")?;
        let text = CString::new(g.0.to_json()).map_err(|e| Fail(TcStatus::Document, e.to_string()))?;
        write(out, text.into_raw(), "out")
    })
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Router, link and host counts. Any output pointer may be null.
///
/// # Safety
/// `graph` must be a live handle; non-null outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_graph_counts(
    graph: *const TcGraph,
    routers: *mut u32,
    links: *mut u64,
    hosts: *mut u64,
) -> TcStatus {
    guard(|| {
        let g = &deref(graph, "graph")?.0;
        if !routers.is_null() {
            routers.write(g.router_count());
        }
        if !links.is_null() {
            links.write(g.link_count() as u64);
        }
        if !hosts.is_null() {
            hosts.write(g.host_count());
        }
        Ok(())
    })
}

/// # Safety
/// `graph` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_graph_metrics(graph: *const TcGraph, out: *mut TcMetrics) -> TcStatus {
    guard(|| {
        let m = compute_metrics(&deref(graph, "graph")?.0)?;
        let report = TcMetrics {
            routers: m.routers,
            hosts: m.hosts,
            links: m.links,
            links_per_host: rational(m.links_per_host),
            diameter: m.diameter,
            avg_path: rational(m.avg_path),
            max_radix: m.max_radix,
            node_ratio: rational(m.node_ratio),
        };
        write(out, report, "out")
    })
}

/// Per-host cost of a measured graph.
///
/// # Safety
/// `graph` must be a live handle; `params` must be readable; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_graph_cost(
    graph: *const TcGraph,
    params: *const TcCostParams,
    out: *mut TcCostBreakdown,
) -> TcStatus {
    guard(|| {
        let g = deref(graph, "graph")?;
        let p = self::params(deref(params, "params")?)?;
        let m = compute_metrics(&g.0)?;
        write(out, breakdown(cost_per_host(&m, &p)), "out")
    })
}

/// Per-host cost from a closed form. See `TcClosedForm` for `a` and `b`.
///
/// # Safety
/// `params` must be readable; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_closed_form_cost(
    family: TcClosedForm,
    a: u64,
    b: u64,
    params: *const TcCostParams,
    out: *mut TcCostBreakdown,
) -> TcStatus {
    guard(|| {
        let p = self::params(deref(params, "params")?)?;
        let form = match family {
            TcClosedForm::Torus => ClosedForm::Torus2D { routers: a },
            TcClosedForm::Hypercube => ClosedForm::Hypercube { routers: a },
            TcClosedForm::FlattenedButterfly => ClosedForm::FlattenedButterfly2D { routers: a },
            TcClosedForm::FatTree => ClosedForm::FatTree { hosts: a, radix: b },
            TcClosedForm::Star => ClosedForm::Star { radix: a },
        };
        write(out, breakdown(closed_form_cost(form, &p)?), "out")
    })
}

/// Routes uniform all-to-all traffic and checks the worst link against the
/// bandwidth the cost model provisions. A failed check still returns
/// `Ok`; inspect `out->pass`.
///
/// # Safety
/// `graph` must be a live handle; `params` must be readable; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_graph_verify(
    graph: *const TcGraph,
    policy: TcRoutingPolicy,
    params: *const TcCostParams,
    out: *mut TcVerifyResult,
) -> TcStatus {
    guard(|| {
        let g = &deref(graph, "graph")?.0;
        let p = self::params(deref(params, "params")?)?;
        let policy = match policy {
            TcRoutingPolicy::EqualSplitMinimal => RoutingPolicy::EqualSplitMinimal,
            TcRoutingPolicy::DeterministicMinimal => RoutingPolicy::DeterministicMinimal,
        };
        let bw_req = cost_per_host(&compute_metrics(g)?, &p).bw_req;
        let report = route_uniform_all_to_all(g, policy, p.b_host)?;
        let verdict = verify_non_blocking(&report, bw_req);
        let result = TcVerifyResult {
            bw_req,
            max_load: report.max_load,
            avg_load: report.avg_load,
            margin: verdict.margin,
            pass: verdict.pass,
        };
        write(out, result, "out")
    })
}

/// Cost-minimizing even fat-tree radix in `[k_min, k_max]` for `hosts` hosts.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_optimize_fat_tree(
    hosts: u64,
    beta_over_alpha: f64,
    k_min: u64,
    k_max: u64,
    realizable_only: bool,
    out: *mut TcDesignResult,
) -> TcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let r = optimize_fat_tree_radix(&DesignQuery {
            hosts,
            beta_over_alpha,
            k_min,
            k_max,
            realizable_only,
        })?;
        write(out, TcDesignResult { k_opt: r.k_opt, levels: r.levels, cost: r.cost }, "out")
    })
}
