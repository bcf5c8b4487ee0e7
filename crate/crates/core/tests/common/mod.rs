// SPDX-License-Identifier: Apache-2.0

//! Instance grid and brute-force oracles shared by the integration suites.
//! Nothing here calls into the BFS or flow-accumulation code under test.

#![allow(dead_code)]

use std::collections::BTreeMap;

use topocost::{ClosedForm, NetworkGraph, TopologySpec};

pub const FAT_TREE_MAX_HOSTS: u64 = 65_536;
pub const FAT_TREE_MAX_ROUTERS: u64 = 16_384;

/// Fat trees in the grid: radix in {4, 8, 16, 32}, every integer level count
/// with at most 65536 hosts and 16384 routers.
pub fn fat_tree_grid() -> Vec<TopologySpec> {
    let mut out = Vec::new();
    for radix in [4u32, 8, 16, 32] {
        let m = u64::from(radix / 2);
        for levels in 1u32.. {
            let hosts = 2 * m.pow(levels);
            let routers = u64::from(levels - 1) * 2 * m.pow(levels - 1) + m.pow(levels - 1);
            if hosts > FAT_TREE_MAX_HOSTS {
                break;
            }
            if routers <= FAT_TREE_MAX_ROUTERS {
                out.push(TopologySpec::FatTree { radix, levels });
            }
        }
    }
    out
}

/// Square tori 4..=32, hypercubes 2..=12, flattened butterflies 2..=16,
/// the fat-tree grid and stars 1..=64.
pub fn grid() -> Vec<TopologySpec> {
    let mut out = Vec::new();
    out.extend((4..=32).map(|s| TopologySpec::Torus2D { rows: s, cols: s }));
    out.extend((2..=12).map(|dim| TopologySpec::Hypercube { dim }));
    out.extend((2..=16).map(|side| TopologySpec::FlattenedButterfly2D { side }));
    out.extend(fat_tree_grid());
    out.extend((1..=64).map(|radix| TopologySpec::Star { radix }));
    out
}

/// Grid instances with at least two hosts, for traffic routing.
pub fn traffic_grid() -> Vec<TopologySpec> {
    grid()
        .into_iter()
        .filter(|s| !matches!(s, TopologySpec::Star { radix: 1 }))
        .collect()
}

pub fn closed_form_for(spec: &TopologySpec) -> ClosedForm {
    match *spec {
        TopologySpec::Torus2D { rows, cols } => {
            assert_eq!(rows, cols);
            ClosedForm::Torus2D { routers: u64::from(rows * cols) }
        }
        TopologySpec::Hypercube { dim } => ClosedForm::Hypercube { routers: 1 << dim },
        TopologySpec::FlattenedButterfly2D { side } => ClosedForm::FlattenedButterfly2D {
            routers: u64::from(side * side),
        },
        TopologySpec::FatTree { radix, levels } => ClosedForm::FatTree {
            hosts: 2 * u64::from(radix / 2).pow(levels),
            radix: u64::from(radix),
        },
        TopologySpec::Star { radix } => ClosedForm::Star { radix: u64::from(radix) },
    }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()) || (a - b).abs() <= f64::MIN_POSITIVE
}

pub const INF: u32 = u32::MAX / 2;

/// Floyd-Warshall over the link list.
pub fn floyd(graph: &NetworkGraph) -> Vec<Vec<u32>> {
    let n = graph.router_count() as usize;
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(a, b) in graph.links() {
        d[a as usize][b as usize] = 1;
        d[b as usize][a as usize] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

fn neighbor_lists(graph: &NetworkGraph) -> Vec<Vec<u32>> {
    let mut nb = vec![Vec::new(); graph.router_count() as usize];
    for &(a, b) in graph.links() {
        nb[a as usize].push(b);
        nb[b as usize].push(a);
    }
    for l in &mut nb {
        l.sort_unstable();
    }
    nb
}

/// Every shortest path from `s` to `t`, as router sequences in lexicographic order.
pub fn shortest_paths(graph: &NetworkGraph, dist: &[Vec<u32>], s: u32, t: u32) -> Vec<Vec<u32>> {
    let nb = neighbor_lists(graph);
    let mut out = Vec::new();
    let mut path = vec![s];
    fn walk(
        nb: &[Vec<u32>],
        dist: &[Vec<u32>],
        t: u32,
        path: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        let u = *path.last().unwrap();
        if u == t {
            out.push(path.clone());
            return;
        }
        for &v in &nb[u as usize] {
            if dist[v as usize][t as usize] + 1 == dist[u as usize][t as usize] {
                path.push(v);
                walk(nb, dist, t, path, out);
                path.pop();
            }
        }
    }
    walk(&nb, dist, t, &mut path, &mut out);
    out
}

/// Directed-link loads from explicit path enumeration.
/// `equal_split`: each flow divided equally over all its shortest paths;
/// otherwise the whole flow takes the lexicographically least one.
pub fn brute_force_loads(graph: &NetworkGraph, b_host: f64, equal_split: bool) -> BTreeMap<(u32, u32), f64> {
    let dist = floyd(graph);
    let hosts = graph.host_count() as f64;
    let mut loads: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    for &(a, b) in graph.links() {
        loads.insert((a, b), 0.0);
        loads.insert((b, a), 0.0);
    }
    let n = graph.router_count();
    for s in 0..n {
        for t in 0..n {
            let hs = graph.hosts_at(s);
            let ht = graph.hosts_at(t);
            if s == t || hs == 0 || ht == 0 {
                continue;
            }
            let demand = f64::from(hs) * f64::from(ht) * b_host / (hosts - 1.0);
            let paths = shortest_paths(graph, &dist, s, t);
            let chosen: Vec<&Vec<u32>> = if equal_split {
                paths.iter().collect()
            } else {
                vec![paths.iter().min().unwrap()]
            };
            let share = demand / chosen.len() as f64;
            for p in chosen {
                for w in p.windows(2) {
                    *loads.get_mut(&(w[0], w[1])).unwrap() += share;
                }
            }
        }
    }
    loads
}
