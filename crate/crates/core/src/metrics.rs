// SPDX-License-Identifier: Apache-2.0

//! Exact graph measurements: diameter, average path length, links per host.

use std::fmt;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::topology::{Adjacency, NetworkGraph};

pub const UNREACHED: u32 = u32::MAX;

/// Largest graph for which a full router-by-router distance table is built.
pub const MAX_TABLE_ROUTERS: u32 = 4096;

/// Nonnegative exact rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub Ratio<u64>);

impl Exact {
    pub fn new(num: u64, den: u64) -> Self {
        Exact(Ratio::new(num, den))
    }

    pub fn integer(v: u64) -> Self {
        Exact(Ratio::from_integer(v))
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.numer() == 0
    }

    pub fn to_f64(self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Exact", 3)?;
        st.serialize_field("num", &self.numer())?;
        st.serialize_field("den", &self.denom())?;
        st.serialize_field("decimal", &self.to_f64())?;
        st.end()
    }
}

/// Measured quantities of one graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetricsReport {
    pub routers: u32,
    pub hosts: u64,
    pub links: u64,
    /// 2L / M
    pub links_per_host: Exact,
    /// Largest distance between host-attached routers.
    pub diameter: u32,
    /// Mean router distance over ordered pairs of distinct hosts.
    pub avg_path: Exact,
    /// Largest graph degree plus host ports.
    pub max_radix: u32,
    /// N / M
    pub node_ratio: Exact,
}

/// Result of one breadth-first search.
#[derive(Debug, Clone)]
pub struct Bfs {
    pub dist: Vec<u32>,
    /// Routers in discovery order, hence nondecreasing distance.
    pub order: Vec<u32>,
}

pub fn bfs(adj: &Adjacency, source: u32) -> Bfs {
    let mut dist = vec![UNREACHED; adj.len()];
    let mut order = Vec::with_capacity(adj.len());
    dist[source as usize] = 0;
    order.push(source);
    let mut head = 0;
    while head < order.len() {
        let u = order[head] as usize;
        head += 1;
        let next = dist[u] + 1;
        for &v in adj.neighbors(u) {
            if dist[v as usize] == UNREACHED {
                dist[v as usize] = next;
                order.push(v);
            }
        }
    }
    Bfs { dist, order }
}

/// Router-by-router hop counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTable {
    n: usize,
    data: Vec<u32>,
}

impl DistanceTable {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, u: u32, v: u32) -> u32 {
        self.data[u as usize * self.n + v as usize]
    }

    pub fn row(&self, u: u32) -> &[u32] {
        &self.data[u as usize * self.n..(u as usize + 1) * self.n]
    }

    pub fn max(&self) -> u32 {
        self.data.iter().copied().max().unwrap_or(0)
    }
}

/// Hop counts between every pair of routers, host-attached or not.
pub fn all_pairs_distances(graph: &NetworkGraph) -> Result<DistanceTable> {
    let n = graph.router_count();
    if n > MAX_TABLE_ROUTERS {
        return Err(Error::SizeExceeded {
            what: "routers in distance table",
            value: u64::from(n),
            cap: u64::from(MAX_TABLE_ROUTERS),
        });
    }
    let adj = graph.adjacency();
    let rows: Vec<Vec<u32>> = (0..n).into_par_iter().map(|s| bfs(&adj, s).dist).collect();
    for (s, row) in rows.iter().enumerate() {
        if let Some(t) = row.iter().position(|&d| d == UNREACHED) {
            return Err(Error::Disconnected {
                from: s as u32,
                to: t as u32,
            });
        }
    }
    Ok(DistanceTable {
        n: n as usize,
        data: rows.concat(),
    })
}

/// Per-source partial sums merged across the host-attached routers.
#[derive(Default, Clone, Copy)]
struct Partial {
    max_dist: u32,
    weighted_sum: u64,
}

/// Measures N, M, L, L_host, D, L_avg, radix and N/M by breadth-first search
/// from every host-attached router.
pub fn compute_metrics(graph: &NetworkGraph) -> Result<MetricsReport> {
    let hosts = graph.host_count();
    if hosts == 0 {
        return Err(Error::NoHosts);
    }
    let adj = graph.adjacency();
    let sources: Vec<u32> = graph.host_routers().collect();
    let counts = graph.host_counts();

    let partials: Vec<Result<Partial>> = sources
        .par_iter()
        .map(|&s| {
            let dist = bfs(&adj, s).dist;
            let mut p = Partial::default();
            let hs = u64::from(counts[s as usize]);
            for &t in &sources {
                let d = dist[t as usize];
                if d == UNREACHED {
                    return Err(Error::Disconnected { from: s, to: t });
                }
                p.max_dist = p.max_dist.max(d);
                p.weighted_sum += hs * u64::from(counts[t as usize]) * u64::from(d);
            }
            Ok(p)
        })
        .collect();

    let mut total = Partial::default();
    for p in partials {
        let p = p?;
        total.max_dist = total.max_dist.max(p.max_dist);
        total.weighted_sum += p.weighted_sum;
    }

    let links = graph.link_count() as u64;
    let ordered_pairs = hosts * (hosts - 1);
    let avg_path = if ordered_pairs == 0 {
        Exact::integer(0)
    } else {
        Exact::new(total.weighted_sum, ordered_pairs)
    };
    let max_radix = (0..graph.router_count())
        .map(|r| graph.radix_of(&adj, r))
        .max()
        .unwrap_or(0);

    Ok(MetricsReport {
        routers: graph.router_count(),
        hosts,
        links,
        links_per_host: Exact::new(2 * links, hosts),
        diameter: total.max_dist,
        avg_path,
        max_radix,
        node_ratio: Exact::new(u64::from(graph.router_count()), hosts),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{build_topology, TopologySpec};
    use std::collections::BTreeMap;

    fn metrics(spec: TopologySpec) -> MetricsReport {
        compute_metrics(&build_topology(spec).unwrap()).unwrap()
    }

    #[test]
    fn hypercube_distances_are_hamming() {
        let g = build_topology(TopologySpec::Hypercube { dim: 3 }).unwrap();
        let table = all_pairs_distances(&g).unwrap();
        for u in 0..8u32 {
            for v in 0..8u32 {
                assert_eq!(table.get(u, v), (u ^ v).count_ones());
            }
        }
    }

    #[test]
    fn torus_4x4_distances() {
        let g = build_topology(TopologySpec::Torus2D { rows: 4, cols: 4 }).unwrap();
        let table = all_pairs_distances(&g).unwrap();
        assert_eq!(table.max(), 4);
        for u in 0..16 {
            assert_eq!(table.get(u, u), 0);
            for v in 0..16 {
                assert_eq!(table.get(u, v), table.get(v, u));
            }
        }
    }

    #[test]
    fn fat_tree_leaf_distances() {
        let g = build_topology(TopologySpec::FatTree { radix: 4, levels: 2 }).unwrap();
        let table = all_pairs_distances(&g).unwrap();
        for u in 0..4 {
            for v in 0..4 {
                assert_eq!(table.get(u, v), if u == v { 0 } else { 2 });
            }
        }
    }

    #[test]
    fn disconnected_table_errors() {
        let spec = TopologySpec::Hypercube { dim: 2 };
        let hosts: BTreeMap<u32, u32> = (0..4).map(|r| (r, 1)).collect();
        let g = NetworkGraph::from_parts(spec, 4, vec![(0, 1), (2, 3)], &hosts);
        assert_eq!(
            all_pairs_distances(&g).unwrap_err(),
            Error::Disconnected { from: 0, to: 2 }
        );
        assert!(matches!(compute_metrics(&g), Err(Error::Disconnected { .. })));
    }

    #[test]
    fn torus_4x4_metrics() {
        let m = metrics(TopologySpec::Torus2D { rows: 4, cols: 4 });
        assert_eq!(m.diameter, 4);
        assert_eq!(m.avg_path, Exact::new(32, 15));
        assert_eq!(m.links_per_host, Exact::integer(4));
        assert_eq!(m.max_radix, 5);
    }

    #[test]
    fn star_metrics() {
        let m = metrics(TopologySpec::Star { radix: 16 });
        assert_eq!(m.diameter, 0);
        assert!(m.avg_path.is_zero());
        assert!(m.links_per_host.is_zero());
        assert_eq!(m.max_radix, 16);
        assert_eq!(m.node_ratio, Exact::new(1, 16));
    }

    #[test]
    fn single_host_star() {
        let m = metrics(TopologySpec::Star { radix: 1 });
        assert!(m.avg_path.is_zero());
        assert_eq!(m.node_ratio, Exact::integer(1));
    }

    #[test]
    fn hypercube_6_metrics() {
        let m = metrics(TopologySpec::Hypercube { dim: 6 });
        assert_eq!(m.diameter, 6);
        assert_eq!(m.links_per_host, Exact::integer(6));
        assert_eq!(m.max_radix, 7);
    }

    #[test]
    fn fat_tree_8_2_metrics() {
        let m = metrics(TopologySpec::FatTree { radix: 8, levels: 2 });
        assert_eq!(m.hosts, 32);
        assert_eq!(m.diameter, 2);
        assert_eq!(m.links_per_host, Exact::integer(2));
        assert_eq!(m.node_ratio, Exact::new(12, 32));
        assert_eq!(m.max_radix, 8);
    }

    #[test]
    fn no_hosts_errors() {
        let mut g = build_topology(TopologySpec::Hypercube { dim: 2 }).unwrap();
        for r in 0..4 {
            g.set_hosts_unchecked(r, 0);
        }
        assert_eq!(compute_metrics(&g).unwrap_err(), Error::NoHosts);
    }

    #[test]
    fn exact_json() {
        let v = serde_json::to_value(Exact::new(32, 15)).unwrap();
        assert_eq!(v["num"], 32);
        assert_eq!(v["den"], 15);
        assert!((v["decimal"].as_f64().unwrap() - 32.0 / 15.0).abs() < 1e-15);
    }
}
