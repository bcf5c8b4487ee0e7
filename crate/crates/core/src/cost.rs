// SPDX-License-Identifier: Apache-2.0

//! Normalized resource cost per unit of host bandwidth.
//!
//! The per-host cost is `(H / L_host) * (k + r k^2) * (N / M)` where `r` is the
//! crossbar-to-port cost ratio. When `H < L_host` the links are
//! over-provisioned and the first factor drops to 1. A network without
//! inter-router links (a single switch) also uses a factor of 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{Exact, MetricsReport};

/// Which hop count sizes the links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum DesignMode {
    /// H = diameter.
    #[default]
    #[serde(rename = "worst")]
    WorstCase,
    /// H = average path length.
    #[serde(rename = "avg")]
    AverageCase,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    pub beta_over_alpha: f64,
    pub design_mode: DesignMode,
    pub b_host: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        CostParams {
            beta_over_alpha: 0.0,
            design_mode: DesignMode::WorstCase,
            b_host: 1.0,
        }
    }
}

impl CostParams {
    pub fn new(beta_over_alpha: f64, design_mode: DesignMode, b_host: f64) -> Result<Self> {
        let params = CostParams {
            beta_over_alpha,
            design_mode,
            b_host,
        };
        params.check()?;
        Ok(params)
    }

    pub fn worst_case(beta_over_alpha: f64) -> Self {
        CostParams {
            beta_over_alpha,
            ..CostParams::default()
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.beta_over_alpha.is_finite() && self.beta_over_alpha >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "beta/alpha must be a finite value >= 0, got {}",
                self.beta_over_alpha
            )));
        }
        if !(self.b_host.is_finite() && self.b_host > 0.0) {
            return Err(Error::InvalidParams(format!(
                "b_host must be a finite value > 0, got {}",
                self.b_host
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    /// Traffic multiplier.
    pub h: f64,
    pub l_host: f64,
    /// Per-link bandwidth, in the same unit as `b_host`.
    pub bw_req: f64,
    pub router_cost: f64,
    pub node_ratio: f64,
    pub total: f64,
    pub over_provisioned: bool,
}

/// H for the chosen design mode.
pub fn traffic_multiplier(metrics: &MetricsReport, mode: DesignMode) -> f64 {
    traffic_multiplier_exact(metrics, mode).to_f64()
}

fn traffic_multiplier_exact(metrics: &MetricsReport, mode: DesignMode) -> Exact {
    match mode {
        DesignMode::WorstCase => Exact::integer(u64::from(metrics.diameter)),
        DesignMode::AverageCase => metrics.avg_path,
    }
}

/// Bandwidth each link needs so that uniform traffic never saturates it.
pub fn required_bandwidth(h: f64, l_host: f64, b_host: f64) -> f64 {
    if l_host == 0.0 {
        0.0
    } else if h >= l_host {
        h / l_host * b_host
    } else {
        b_host
    }
}

/// `k + r k^2`
pub fn router_cost(radix: u64, beta_over_alpha: f64) -> f64 {
    let k = radix as f64;
    k + beta_over_alpha * k * k
}

/// Total traffic volume `M * b_host * H`.
pub fn aggregate_traffic(hosts: u64, b_host: f64, h: f64) -> f64 {
    hosts as f64 * b_host * h
}

fn assemble(
    h: f64,
    l_host: f64,
    over_provisioned: bool,
    router_cost: f64,
    node_ratio: f64,
    b_host: f64,
) -> CostBreakdown {
    let factor = if l_host == 0.0 || over_provisioned {
        1.0
    } else {
        h / l_host
    };
    CostBreakdown {
        h,
        l_host,
        bw_req: required_bandwidth(h, l_host, b_host),
        router_cost,
        node_ratio,
        total: factor * router_cost * node_ratio,
        over_provisioned,
    }
}

/// Per-host cost of a measured graph, using its largest radix as `k`.
pub fn cost_per_host(metrics: &MetricsReport, params: &CostParams) -> CostBreakdown {
    let h = traffic_multiplier_exact(metrics, params.design_mode);
    let l_host = metrics.links_per_host;
    // Branch on exact values so that H == L_host never flips on rounding.
    let over = !l_host.is_zero() && h < l_host;
    assemble(
        h.to_f64(),
        l_host.to_f64(),
        over,
        router_cost(u64::from(metrics.max_radix), params.beta_over_alpha),
        metrics.node_ratio.to_f64(),
        params.b_host,
    )
}

/// Family and size arguments for a closed-form evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ClosedForm {
    /// Square torus with `routers` = s^2.
    #[serde(rename = "torus2d")]
    Torus2D { routers: u64 },
    /// `routers` = 2^d.
    Hypercube { routers: u64 },
    /// Square flattened butterfly with `routers` = s^2.
    #[serde(rename = "flattened_butterfly2d")]
    FlattenedButterfly2D { routers: u64 },
    /// Fat tree sized by host count and radix; levels may be fractional.
    FatTree { hosts: u64, radix: u64 },
    Star { radix: u64 },
}

/// Integer square root when `n` is a perfect square.
pub fn exact_sqrt(n: u64) -> Option<u64> {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}

/// Base-2 logarithm when `n` is a power of two.
pub fn exact_log2(n: u64) -> Option<u32> {
    n.is_power_of_two().then(|| n.trailing_zeros())
}

/// `(log2 M - 1) / (log2 k - 1)`
pub fn fat_tree_levels(hosts: u64, radix: u64) -> Result<f64> {
    if radix < 4 || !radix.is_multiple_of(2) {
        return Err(Error::IllFormed(format!(
            "fat tree levels need an even radix >= 4, got {radix}"
        )));
    }
    if hosts < 2 {
        return Err(Error::IllFormed(format!(
            "fat tree levels need at least 2 hosts, got {hosts}"
        )));
    }
    Ok(((hosts as f64).log2() - 1.0) / ((radix as f64).log2() - 1.0))
}

/// `(2 / k) (l - 1/2)`
pub fn fat_tree_node_ratio(hosts: u64, radix: u64) -> Result<f64> {
    let l = fat_tree_levels(hosts, radix)?;
    Ok(2.0 / radix as f64 * (l - 0.5))
}

/// Evaluates the family's closed-form worst-case cost. `params.design_mode` is ignored.
pub fn closed_form_cost(family: ClosedForm, params: &CostParams) -> Result<CostBreakdown> {
    params.check()?;
    let ratio = params.beta_over_alpha;
    let b = params.b_host;
    match family {
        ClosedForm::Torus2D { routers } => {
            let side = exact_sqrt(routers)
                .filter(|&s| s >= 2)
                .ok_or_else(|| Error::IllFormed(format!("torus needs a square N >= 4, got {routers}")))?;
            let h = if side % 2 == 0 { side } else { side - 1 } as f64;
            let l_host = 4.0;
            Ok(assemble(h, l_host, h < l_host, router_cost(5, ratio), 1.0, b))
        }
        ClosedForm::Hypercube { routers } => {
            let dim = exact_log2(routers)
                .filter(|&d| d >= 1)
                .ok_or_else(|| {
                    Error::IllFormed(format!("hypercube needs N a power of two >= 2, got {routers}"))
                })?;
            let d = f64::from(dim);
            Ok(assemble(d, d, false, router_cost(u64::from(dim) + 1, ratio), 1.0, b))
        }
        ClosedForm::FlattenedButterfly2D { routers } => {
            let side = exact_sqrt(routers).filter(|&s| s >= 2).ok_or_else(|| {
                Error::IllFormed(format!("flattened butterfly needs a square N >= 4, got {routers}"))
            })?;
            let h = 2.0;
            let l_host = 2.0 * (side - 1) as f64;
            Ok(assemble(h, l_host, h < l_host, router_cost(2 * side - 1, ratio), 1.0, b))
        }
        ClosedForm::FatTree { hosts, radix } => {
            if radix <= 2 {
                return Err(Error::IllFormed(format!(
                    "fat tree needs radix > 2, got {radix}"
                )));
            }
            let l = fat_tree_levels(hosts, radix)?;
            if l < 1.0 {
                return Err(Error::IllFormed(format!(
                    "fat tree with radix {radix} exceeds {hosts} hosts (levels {l:.3} < 1)"
                )));
            }
            let h = 2.0 * (l - 1.0);
            let node_ratio = 2.0 / radix as f64 * (l - 0.5);
            Ok(assemble(h, h, false, router_cost(radix, ratio), node_ratio, b))
        }
        ClosedForm::Star { radix } => {
            if radix < 1 {
                return Err(Error::IllFormed("star needs radix >= 1".to_string()));
            }
            Ok(assemble(0.0, 0.0, false, router_cost(radix, ratio), 1.0 / radix as f64, b))
        }
    }
}
