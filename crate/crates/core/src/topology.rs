// SPDX-License-Identifier: Apache-2.0

//! Topology families and their explicit router graphs.
//!
//! Every generator produces routers with dense ids, a sorted list of
//! undirected inter-router links `(a, b)` with `a < b`, and the number of
//! hosts attached to each router. Host-to-router attachments are not links.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest hypercube dimension accepted by [`TopologySpec::check`].
pub const MAX_HYPERCUBE_DIM: u32 = 24;
/// Upper bound on hosts for fat trees, and on routers/links/hosts for any built graph.
pub const MAX_HOSTS: u64 = 1 << 24;
pub const MAX_ROUTERS: u64 = 1 << 24;
pub const MAX_LINKS: u64 = 1 << 24;

/// Parameterized description of one topology family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", content = "params")]
pub enum TopologySpec {
    #[serde(rename = "torus2d")]
    Torus2D { rows: u32, cols: u32 },
    #[serde(rename = "hypercube")]
    Hypercube { dim: u32 },
    #[serde(rename = "flattened_butterfly2d")]
    FlattenedButterfly2D { side: u32 },
    /// Folded Clos with `radix`-port routers and `levels` router levels.
    #[serde(rename = "fat_tree")]
    FatTree { radix: u32, levels: u32 },
    #[serde(rename = "star")]
    Star { radix: u32 },
}

impl TopologySpec {
    pub fn family_name(&self) -> &'static str {
        match self {
            TopologySpec::Torus2D { .. } => "torus2d",
            TopologySpec::Hypercube { .. } => "hypercube",
            TopologySpec::FlattenedButterfly2D { .. } => "flattened_butterfly2d",
            TopologySpec::FatTree { .. } => "fat_tree",
            TopologySpec::Star { .. } => "star",
        }
    }

    /// Checks the family's parameter bounds.
    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        match *self {
            TopologySpec::Torus2D { rows, cols } => {
                if rows < 3 || cols < 3 {
                    return bad(format!("torus2d needs rows >= 3 and cols >= 3, got {rows}x{cols}"));
                }
            }
            TopologySpec::Hypercube { dim } => {
                if !(1..=MAX_HYPERCUBE_DIM).contains(&dim) {
                    return bad(format!("hypercube needs 1 <= dim <= {MAX_HYPERCUBE_DIM}, got {dim}"));
                }
            }
            TopologySpec::FlattenedButterfly2D { side } => {
                if side < 2 {
                    return bad(format!("flattened butterfly needs side >= 2, got {side}"));
                }
            }
            TopologySpec::FatTree { radix, levels } => {
                if radix < 2 || !radix.is_multiple_of(2) {
                    return bad(format!("fat tree needs an even radix >= 2, got {radix}"));
                }
                if levels < 1 {
                    return bad("fat tree needs levels >= 1".to_string());
                }
                match fat_tree_hosts(radix, levels) {
                    Some(m) if m <= MAX_HOSTS => {}
                    _ => {
                        return bad(format!(
                            "fat tree with radix {radix} and {levels} levels exceeds {MAX_HOSTS} hosts"
                        ))
                    }
                }
            }
            TopologySpec::Star { radix } => {
                if radix < 1 {
                    return bad("star needs radix >= 1".to_string());
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for TopologySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologySpec::Torus2D { rows, cols } => write!(f, "torus2d({rows}x{cols})"),
            TopologySpec::Hypercube { dim } => write!(f, "hypercube(dim={dim})"),
            TopologySpec::FlattenedButterfly2D { side } => {
                write!(f, "flattened_butterfly2d({side}x{side})")
            }
            TopologySpec::FatTree { radix, levels } => {
                write!(f, "fat_tree(k={radix}, levels={levels})")
            }
            TopologySpec::Star { radix } => write!(f, "star(k={radix})"),
        }
    }
}

/// `2 * (k/2)^l`, or `None` on overflow.
pub fn fat_tree_hosts(radix: u32, levels: u32) -> Option<u64> {
    let half = u64::from(radix / 2);
    half.checked_pow(levels)?.checked_mul(2)
}

/// One rule broken by a [`NetworkGraph`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Diagnostic {
    SelfLoop(u32),
    DuplicateLink(u32, u32),
    RouterOutOfRange(u32),
    NoRouters,
    NoHosts,
    /// A host-attached router cannot reach the first host-attached router.
    Disconnected(u32),
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::SelfLoop(r) => write!(f, "self-loop on router {r}"),
            Diagnostic::DuplicateLink(a, b) => write!(f, "duplicate link {a}-{b}"),
            Diagnostic::RouterOutOfRange(r) => write!(f, "router id {r} out of range"),
            Diagnostic::NoRouters => write!(f, "graph has no routers"),
            Diagnostic::NoHosts => write!(f, "graph has no hosts"),
            Diagnostic::Disconnected(r) => write!(f, "host-attached router {r} is disconnected"),
        }
    }
}

/// Explicit router graph with host attachments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkGraph {
    spec: TopologySpec,
    routers: u32,
    links: Vec<(u32, u32)>,
    hosts_at: Vec<u32>,
}

impl NetworkGraph {
    /// Assembles a graph from raw parts without checking it; see [`validate`].
    ///
    /// Links are normalized to `(min, max)` and sorted, but duplicates and
    /// self-loops are kept so that `validate` can report them.
    pub fn from_parts(
        spec: TopologySpec,
        routers: u32,
        links: Vec<(u32, u32)>,
        hosts_at: &BTreeMap<u32, u32>,
    ) -> Self {
        let mut links: Vec<(u32, u32)> = links
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        links.sort_unstable();
        let mut hosts = vec![0u32; routers as usize];
        for (&r, &count) in hosts_at {
            if let Some(slot) = hosts.get_mut(r as usize) {
                *slot += count;
            }
        }
        NetworkGraph {
            spec,
            routers,
            links,
            hosts_at: hosts,
        }
    }

    pub fn spec(&self) -> &TopologySpec {
        &self.spec
    }

    /// N
    pub fn router_count(&self) -> u32 {
        self.routers
    }

    /// L, the number of inter-router links.
    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    /// M
    pub fn host_count(&self) -> u64 {
        self.hosts_at.iter().map(|&h| u64::from(h)).sum()
    }

    pub fn links(&self) -> &[(u32, u32)] {
        &self.links
    }

    pub fn hosts_at(&self, router: u32) -> u32 {
        self.hosts_at.get(router as usize).copied().unwrap_or(0)
    }

    /// Per-router host counts indexed by router id.
    pub fn host_counts(&self) -> &[u32] {
        &self.hosts_at
    }

    pub fn host_routers(&self) -> impl Iterator<Item = u32> + '_ {
        self.hosts_at
            .iter()
            .enumerate()
            .filter(|(_, &h)| h > 0)
            .map(|(r, _)| r as u32)
    }

    pub fn push_link_unchecked(&mut self, a: u32, b: u32) {
        self.links.push((a.min(b), a.max(b)));
        self.links.sort_unstable();
    }

    pub fn set_hosts_unchecked(&mut self, router: u32, count: u32) {
        if let Some(slot) = self.hosts_at.get_mut(router as usize) {
            *slot = count;
        }
    }

    /// Sorted adjacency in compressed sparse row form.
    pub fn adjacency(&self) -> Adjacency {
        Adjacency::new(self.routers as usize, &self.links)
    }

    /// Graph degree plus host ports, per router.
    pub fn radix_of(&self, adj: &Adjacency, router: u32) -> u32 {
        adj.degree(router as usize) as u32 + self.hosts_at(router)
    }
}

/// Compressed sparse row adjacency with sorted neighbor lists.
///
/// Position `j` in the flat neighbor array doubles as the id of the directed
/// link `u -> targets[j]` for `offsets[u] <= j < offsets[u + 1]`.
#[derive(Debug, Clone)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Adjacency {
    fn new(n: usize, links: &[(u32, u32)]) -> Self {
        let mut degree = vec![0usize; n + 1];
        for &(a, b) in links {
            if (a as usize) < n && (b as usize) < n {
                degree[a as usize] += 1;
                degree[b as usize] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0;
        offsets.push(0);
        for d in &degree[..n] {
            acc += d;
            offsets.push(acc);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0u32; acc];
        for &(a, b) in links {
            if (a as usize) < n && (b as usize) < n {
                targets[fill[a as usize]] = b;
                fill[a as usize] += 1;
                targets[fill[b as usize]] = a;
                fill[b as usize] += 1;
            }
        }
        for u in 0..n {
            targets[offsets[u]..offsets[u + 1]].sort_unstable();
        }
        Adjacency { offsets, targets }
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    /// Range of directed link ids leaving `u`.
    pub fn edge_range(&self, u: usize) -> std::ops::Range<usize> {
        self.offsets[u]..self.offsets[u + 1]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    /// Number of directed links (twice the undirected count).
    pub fn directed_len(&self) -> usize {
        self.targets.len()
    }

    pub fn target(&self, edge: usize) -> u32 {
        self.targets[edge]
    }

    /// Directed link id for `u -> v`, if the link exists.
    pub fn edge_id(&self, u: usize, v: u32) -> Option<usize> {
        let base = self.offsets[u];
        self.neighbors(u).binary_search(&v).ok().map(|i| base + i)
    }
}

/// Builds the explicit graph for `spec`.
pub fn build_topology(spec: TopologySpec) -> Result<NetworkGraph> {
    spec.check()?;
    match spec {
        TopologySpec::Torus2D { rows, cols } => build_torus(spec, rows, cols),
        TopologySpec::Hypercube { dim } => build_hypercube(spec, dim),
        TopologySpec::FlattenedButterfly2D { side } => build_flattened_butterfly(spec, side),
        TopologySpec::FatTree { radix, levels } => build_fat_tree(spec, radix, levels),
        TopologySpec::Star { radix } => build_star(spec, radix),
    }
}

fn cap(what: &'static str, value: u64, cap: u64) -> Result<()> {
    if value > cap {
        Err(Error::SizeExceeded { what, value, cap })
    } else {
        Ok(())
    }
}

fn one_host_each(spec: TopologySpec, routers: u32, mut links: Vec<(u32, u32)>) -> NetworkGraph {
    links.sort_unstable();
    NetworkGraph {
        spec,
        routers,
        links,
        hosts_at: vec![1; routers as usize],
    }
}

fn build_torus(spec: TopologySpec, rows: u32, cols: u32) -> Result<NetworkGraph> {
    let n = u64::from(rows) * u64::from(cols);
    cap("routers", n, MAX_ROUTERS)?;
    cap("links", 2 * n, MAX_LINKS)?;
    let id = |r: u32, c: u32| r * cols + c;
    let mut links = Vec::with_capacity(2 * n as usize);
    for r in 0..rows {
        for c in 0..cols {
            let here = id(r, c);
            for there in [id(r, (c + 1) % cols), id((r + 1) % rows, c)] {
                links.push((here.min(there), here.max(there)));
            }
        }
    }
    Ok(one_host_each(spec, n as u32, links))
}

fn build_hypercube(spec: TopologySpec, dim: u32) -> Result<NetworkGraph> {
    let n = 1u64 << dim;
    cap("routers", n, MAX_ROUTERS)?;
    cap("links", u64::from(dim) * (n / 2), MAX_LINKS)?;
    let n = n as u32;
    let mut links = Vec::with_capacity((dim as usize) * (n as usize) / 2);
    for u in 0..n {
        for bit in 0..dim {
            let v = u ^ (1 << bit);
            if u < v {
                links.push((u, v));
            }
        }
    }
    Ok(one_host_each(spec, n, links))
}

fn build_flattened_butterfly(spec: TopologySpec, side: u32) -> Result<NetworkGraph> {
    let s = u64::from(side);
    cap("routers", s * s, MAX_ROUTERS)?;
    cap("links", s * s * (s - 1), MAX_LINKS)?;
    let id = |r: u32, c: u32| r * side + c;
    let mut links = Vec::with_capacity((s * s * (s - 1)) as usize);
    for r in 0..side {
        for c in 0..side {
            for other in (c + 1)..side {
                links.push((id(r, c), id(r, other)));
            }
            for other in (r + 1)..side {
                links.push((id(r, c), id(other, c)));
            }
        }
    }
    Ok(one_host_each(spec, (s * s) as u32, links))
}

fn build_star(spec: TopologySpec, radix: u32) -> Result<NetworkGraph> {
    cap("hosts", u64::from(radix), MAX_HOSTS)?;
    Ok(NetworkGraph {
        spec,
        routers: 1,
        links: Vec::new(),
        hosts_at: vec![radix],
    })
}

/// Folded Clos with `m = radix / 2`.
///
/// Levels `1..levels-1` hold `2 m^(levels-1)` routers indexed by digits
/// `(b, d_{l-1}, .., d_1)`; the top level holds `m^(levels-1)` routers indexed
/// by `(e, d_{l-2}, .., d_1)`. Up-port `p` of a level-`t` router leads to the
/// level-`t+1` router with digit `d_t` replaced by `p`; up-port `e` of a
/// level-`(l-1)` router leads to the top router `(e, d_{l-2}, .., d_1)`.
/// Ids are assigned level by level, leaves first.
fn build_fat_tree(spec: TopologySpec, radix: u32, levels: u32) -> Result<NetworkGraph> {
    let m = u64::from(radix / 2);
    let l = u64::from(levels);
    let hosts = 2 * m.pow(levels);
    cap("hosts", hosts, MAX_HOSTS)?;
    let tier = 2 * m.pow(levels - 1);
    let top = m.pow(levels - 1);
    let routers = (l - 1) * tier + top;
    cap("routers", routers, MAX_ROUTERS)?;
    cap("links", (l - 1) * tier * m, MAX_LINKS)?;

    if levels == 1 {
        return build_star(spec, radix);
    }

    let level_base = |t: u64| (t - 1) * tier;
    let mut links = Vec::with_capacity(((l - 1) * tier * m) as usize);
    for t in 1..l {
        for idx in 0..tier {
            let here = level_base(t) + idx;
            if t + 1 < l {
                // Replace digit d_t, weight m^(t-1), with each up-port value.
                let weight = m.pow((t - 1) as u32);
                let digit = (idx / weight) % m;
                for p in 0..m {
                    let up = idx - digit * weight + p * weight;
                    links.push((here as u32, (level_base(t + 1) + up) as u32));
                }
            } else {
                // Drop b and d_{l-1}; the port value becomes the leading top digit.
                let low = idx % m.pow((l - 2) as u32);
                for e in 0..m {
                    let up = e * m.pow((l - 2) as u32) + low;
                    links.push((here as u32, (level_base(l) + up) as u32));
                }
            }
        }
    }
    links.sort_unstable();

    let mut hosts_at = vec![0u32; routers as usize];
    for slot in &mut hosts_at[..tier as usize] {
        *slot = m as u32;
    }
    Ok(NetworkGraph {
        spec,
        routers: routers as u32,
        links,
        hosts_at,
    })
}

/// Lists every violated graph invariant; empty when the graph is well formed.
pub fn validate(graph: &NetworkGraph) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let n = graph.routers;
    if n == 0 {
        out.push(Diagnostic::NoRouters);
    }
    let mut out_of_range = BTreeSet::new();
    let mut prev: Option<(u32, u32)> = None;
    for &(a, b) in &graph.links {
        if a == b {
            out.push(Diagnostic::SelfLoop(a));
        }
        for r in [a, b] {
            if r >= n {
                out_of_range.insert(r);
            }
        }
        if prev == Some((a, b)) {
            out.push(Diagnostic::DuplicateLink(a, b));
        }
        prev = Some((a, b));
    }
    out.extend(out_of_range.into_iter().map(Diagnostic::RouterOutOfRange));

    if graph.host_count() == 0 {
        out.push(Diagnostic::NoHosts);
    } else {
        let adj = graph.adjacency();
        let first = graph.host_routers().next().unwrap_or(0);
        let mut seen = vec![false; n as usize];
        let mut stack = vec![first];
        seen[first as usize] = true;
        while let Some(u) = stack.pop() {
            for &v in adj.neighbors(u as usize) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    stack.push(v);
                }
            }
        }
        out.extend(
            graph
                .host_routers()
                .filter(|&r| !seen[r as usize])
                .map(Diagnostic::Disconnected),
        );
    }
    out.dedup();
    out
}

/// On-disk form of a graph. Links are sorted and host counts keyed by router id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    #[serde(flatten)]
    pub spec: TopologySpec,
    pub routers: u32,
    pub links: Vec<[u32; 2]>,
    pub hosts_at: BTreeMap<u32, u32>,
}

impl From<&NetworkGraph> for GraphDocument {
    fn from(g: &NetworkGraph) -> Self {
        GraphDocument {
            spec: g.spec,
            routers: g.routers,
            links: g.links.iter().map(|&(a, b)| [a, b]).collect(),
            hosts_at: g
                .hosts_at
                .iter()
                .enumerate()
                .filter(|(_, &h)| h > 0)
                .map(|(r, &h)| (r as u32, h))
                .collect(),
        }
    }
}

impl From<GraphDocument> for NetworkGraph {
    fn from(doc: GraphDocument) -> Self {
        NetworkGraph::from_parts(
            doc.spec,
            doc.routers,
            doc.links.into_iter().map(|[a, b]| (a, b)).collect(),
            &doc.hosts_at,
        )
    }
}

impl NetworkGraph {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphDocument::from(self)).expect("graph document serializes")
    }

    /// Parses a graph document and rejects it if [`validate`] finds problems.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDocument =
            serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        if let Some(&r) = doc.hosts_at.keys().find(|&&r| r >= doc.routers) {
            return Err(Error::Document(format!("hosts attached to unknown router {r}")));
        }
        let graph = NetworkGraph::from(doc);
        let problems = validate(&graph);
        if !problems.is_empty() {
            let listed: Vec<String> = problems.iter().map(ToString::to_string).collect();
            return Err(Error::Document(listed.join("; ")));
        }
        Ok(graph)
    }
}
