// SPDX-License-Identifier: Apache-2.0

//! Uniform all-to-all traffic routed on the explicit graph.
//!
//! Every host injects `b_host`, split evenly over the other `M - 1` hosts.
//! Flows follow minimal paths only. Loads are accumulated per directed link.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::metrics::{bfs, UNREACHED};
use crate::topology::{Adjacency, NetworkGraph};

/// Tolerance on the non-blocking comparison.
pub const LOAD_EPS: f64 = 1e-12;

/// Sources handled by one sequential accumulation unit. Fixed so that the
/// floating-point summation order does not depend on the thread count.
const SOURCES_PER_CHUNK: usize = 16;
/// Chunks whose partial load vectors are alive at the same time.
const CHUNKS_PER_WAVE: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RoutingPolicy {
    /// One path per ordered pair, taking the smallest next-hop id at each step.
    #[serde(rename = "deterministic")]
    DeterministicMinimal,
    /// Each flow divided equally over all of its shortest paths.
    #[serde(rename = "equal-split")]
    EqualSplitMinimal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkLoadReport {
    pub policy: RoutingPolicy,
    pub b_host: f64,
    /// Undirected inter-router link count.
    pub links: u64,
    pub max_load: f64,
    pub avg_load: f64,
    pub total_flow_hops: f64,
    #[serde(serialize_with = "loads_as_list", skip_serializing_if = "Option::is_none")]
    pub load: Option<BTreeMap<(u32, u32), f64>>,
}

fn loads_as_list<S: Serializer>(
    loads: &Option<BTreeMap<(u32, u32), f64>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let loads = loads.as_ref().expect("skipped when absent");
    let mut seq = s.serialize_seq(Some(loads.len()))?;
    for (&(from, to), &load) in loads {
        seq.serialize_element(&(from, to, load))?;
    }
    seq.end()
}

impl LinkLoadReport {
    /// Drops the per-link map, keeping the summary figures.
    pub fn summary(mut self) -> Self {
        self.load = None;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    /// `bw_req - max_load`
    pub margin: f64,
}

struct Partial {
    load: Vec<f64>,
    flow_hops: f64,
}

impl Partial {
    fn new(directed: usize) -> Self {
        Partial {
            load: vec![0.0; directed],
            flow_hops: 0.0,
        }
    }

    fn absorb(&mut self, other: &Partial) {
        for (a, b) in self.load.iter_mut().zip(&other.load) {
            *a += b;
        }
        self.flow_hops += other.flow_hops;
    }
}

/// Routes uniform all-to-all traffic and reports per-directed-link loads.
pub fn route_uniform_all_to_all(
    graph: &NetworkGraph,
    policy: RoutingPolicy,
    b_host: f64,
) -> Result<LinkLoadReport> {
    if !(b_host.is_finite() && b_host > 0.0) {
        return Err(Error::InvalidParams(format!("b_host must be > 0, got {b_host}")));
    }
    let hosts = graph.host_count();
    if hosts == 0 {
        return Err(Error::NoHosts);
    }
    if hosts < 2 {
        return Err(Error::SingleHost);
    }
    let adj = graph.adjacency();
    let counts = graph.host_counts();
    let host_routers: Vec<u32> = graph.host_routers().collect();
    let per_pair = b_host / (hosts - 1) as f64;
    let router_demand = |u: u32, v: u32| -> f64 {
        if u == v {
            0.0
        } else {
            f64::from(counts[u as usize]) * f64::from(counts[v as usize]) * per_pair
        }
    };

    let route_one = |anchor: u32, acc: &mut Partial| -> Result<()> {
        match policy {
            RoutingPolicy::EqualSplitMinimal => equal_split_from(&adj, anchor, &router_demand, acc),
            RoutingPolicy::DeterministicMinimal => {
                tree_toward(&adj, anchor, &router_demand, acc)
            }
        }
    };

    let directed = adj.directed_len();
    let mut total = Partial::new(directed);
    let chunks: Vec<&[u32]> = host_routers.chunks(SOURCES_PER_CHUNK).collect();
    for wave in chunks.chunks(CHUNKS_PER_WAVE) {
        let partials: Vec<Result<Partial>> = wave
            .par_iter()
            .map(|chunk| {
                let mut acc = Partial::new(directed);
                for &anchor in *chunk {
                    route_one(anchor, &mut acc)?;
                }
                Ok(acc)
            })
            .collect();
        for p in partials {
            total.absorb(&p?);
        }
    }

    let max_load = total.load.iter().copied().fold(0.0, f64::max);
    let avg_load = if directed == 0 {
        0.0
    } else {
        total.flow_hops / directed as f64
    };
    let mut load = BTreeMap::new();
    for u in 0..adj.len() {
        for e in adj.edge_range(u) {
            load.insert((u as u32, adj.target(e)), total.load[e]);
        }
    }
    Ok(LinkLoadReport {
        policy,
        b_host,
        links: graph.link_count() as u64,
        max_load,
        avg_load,
        total_flow_hops: total.flow_hops,
        load: Some(load),
    })
}

/// Splits every flow leaving `source` over all shortest paths in proportion
/// to path counts, accumulating from the farthest routers inwards.
fn equal_split_from(
    adj: &Adjacency,
    source: u32,
    demand: &impl Fn(u32, u32) -> f64,
    acc: &mut Partial,
) -> Result<()> {
    let search = bfs(adj, source);
    let n = adj.len();
    let mut paths = vec![0.0f64; n];
    paths[source as usize] = 1.0;
    for &u in &search.order {
        let du = search.dist[u as usize];
        for &v in adj.neighbors(u as usize) {
            if search.dist[v as usize] == du + 1 {
                paths[v as usize] += paths[u as usize];
            }
        }
    }

    let mut through = vec![0.0f64; n];
    for v in 0..n as u32 {
        let d = demand(source, v);
        if d > 0.0 {
            if search.dist[v as usize] == UNREACHED {
                return Err(Error::Disconnected { from: source, to: v });
            }
            through[v as usize] = d;
            acc.flow_hops += d * f64::from(search.dist[v as usize]);
        }
    }
    for &v in search.order.iter().rev() {
        let flow = through[v as usize];
        if flow == 0.0 || v == source {
            continue;
        }
        let dv = search.dist[v as usize];
        for e in adj.edge_range(v as usize) {
            let p = adj.target(e);
            if search.dist[p as usize] + 1 == dv {
                let share = flow * paths[p as usize] / paths[v as usize];
                let into_v = adj.edge_id(p as usize, v).expect("undirected link");
                acc.load[into_v] += share;
                through[p as usize] += share;
            }
        }
    }
    Ok(())
}

/// Routes every flow destined to `sink` along the next-hop tree that always
/// picks the smallest-id neighbor one hop closer, which is the
/// lexicographically least shortest path.
fn tree_toward(
    adj: &Adjacency,
    sink: u32,
    demand: &impl Fn(u32, u32) -> f64,
    acc: &mut Partial,
) -> Result<()> {
    let search = bfs(adj, sink);
    let n = adj.len();
    let mut carried = vec![0.0f64; n];
    for u in 0..n as u32 {
        let d = demand(u, sink);
        if d > 0.0 {
            if search.dist[u as usize] == UNREACHED {
                return Err(Error::Disconnected { from: u, to: sink });
            }
            carried[u as usize] = d;
            acc.flow_hops += d * f64::from(search.dist[u as usize]);
        }
    }
    for &u in search.order.iter().rev() {
        let flow = carried[u as usize];
        if flow == 0.0 || u == sink {
            continue;
        }
        let du = search.dist[u as usize];
        let e = adj
            .edge_range(u as usize)
            .find(|&e| search.dist[adj.target(e) as usize] + 1 == du)
            .expect("a reached router has a neighbor one hop closer");
        acc.load[e] += flow;
        carried[adj.target(e) as usize] += flow;
    }
    Ok(())
}

/// Passes when the busiest link fits within `bw_req`.
pub fn verify_non_blocking(report: &LinkLoadReport, bw_req: f64) -> Verdict {
    Verdict {
        pass: report.max_load <= bw_req + LOAD_EPS,
        margin: bw_req - report.max_load,
    }
}
