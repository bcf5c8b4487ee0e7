// SPDX-License-Identifier: Apache-2.0

//! Interconnect topologies as explicit graphs, a resource-efficiency cost
//! model evaluated under a non-blocking constraint, and oracles that check
//! the model's closed forms against measured graphs and routed traffic.
//!
//! ```
//! use topocost::{build_topology, compute_metrics, cost_per_host, CostParams, TopologySpec};
//!
//! let graph = build_topology(TopologySpec::Hypercube { dim: 6 }).unwrap();
//! let metrics = compute_metrics(&graph).unwrap();
//! let cost = cost_per_host(&metrics, &CostParams::default());
//! assert_eq!(cost.total, 7.0);
//! ```

pub mod cli;
pub mod cost;
pub mod error;
pub mod metrics;
pub mod optimizer;
pub mod topology;
pub mod traffic;

pub use cost::{
    aggregate_traffic, closed_form_cost, cost_per_host, fat_tree_levels, fat_tree_node_ratio,
    required_bandwidth, router_cost, traffic_multiplier, ClosedForm, CostBreakdown, CostParams,
    DesignMode,
};
pub use error::{Error, Result};
pub use metrics::{all_pairs_distances, compute_metrics, DistanceTable, Exact, MetricsReport};
pub use optimizer::{
    compare_topologies, crossover_scan, optimize_fat_tree_radix, scaling_audit, sweep,
    CrossoverReport, DesignQuery, DesignResult, Family, ScalingAudit,
};
pub use topology::{build_topology, validate, Diagnostic, NetworkGraph, TopologySpec};
pub use traffic::{
    route_uniform_all_to_all, verify_non_blocking, LinkLoadReport, RoutingPolicy, Verdict,
};
