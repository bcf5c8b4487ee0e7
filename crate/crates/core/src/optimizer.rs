// SPDX-License-Identifier: Apache-2.0

//! Design-space search over closed-form costs.

use serde::{Deserialize, Serialize};

use crate::cost::{closed_form_cost, exact_sqrt, fat_tree_levels, ClosedForm, CostBreakdown, CostParams};
use crate::error::{Error, Result};

pub const MIN_SWEEP_RADIX: u64 = 4;
pub const MAX_SWEEP_RADIX: u64 = 4096;

/// Relative tolerance for calling two costs equal.
pub const COST_TIE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignQuery {
    pub hosts: u64,
    pub beta_over_alpha: f64,
    pub k_min: u64,
    pub k_max: u64,
    /// Only accept radices with `hosts = 2 (k/2)^l` for an integer `l`.
    pub realizable_only: bool,
}

impl DesignQuery {
    pub fn check(&self) -> Result<()> {
        if self.hosts < 2 {
            return Err(Error::InvalidParams(format!("need at least 2 hosts, got {}", self.hosts)));
        }
        if self.k_min < MIN_SWEEP_RADIX || self.k_max > MAX_SWEEP_RADIX || self.k_min > self.k_max {
            return Err(Error::InvalidParams(format!(
                "radix range [{}, {}] must lie within [{MIN_SWEEP_RADIX}, {MAX_SWEEP_RADIX}]",
                self.k_min, self.k_max
            )));
        }
        CostParams::worst_case(self.beta_over_alpha).check()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: u64,
    pub l: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignResult {
    pub k_opt: u64,
    pub levels: f64,
    pub cost: f64,
    pub table: Vec<SweepRow>,
}

/// Integer level count `l` with `hosts = 2 (k/2)^l`, if one exists.
pub fn realizable_levels(hosts: u64, radix: u64) -> Option<u32> {
    let half = radix / 2;
    if half < 2 {
        return None;
    }
    let mut reach = 2 * half;
    let mut levels = 1;
    while reach < hosts {
        reach = reach.checked_mul(half)?;
        levels += 1;
    }
    (reach == hosts).then_some(levels)
}

/// Sweeps even radices and returns the cheapest fat tree.
///
/// Radices above the host count are skipped (they would need fewer than one
/// level). Ties go to the smaller radix.
pub fn optimize_fat_tree_radix(query: &DesignQuery) -> Result<DesignResult> {
    query.check()?;
    let params = CostParams::worst_case(query.beta_over_alpha);
    let first = query.k_min + query.k_min % 2;
    let mut table = Vec::new();
    for k in (first..=query.k_max).step_by(2) {
        if k > query.hosts {
            break;
        }
        let levels = if query.realizable_only {
            match realizable_levels(query.hosts, k) {
                Some(l) => f64::from(l),
                None => continue,
            }
        } else {
            fat_tree_levels(query.hosts, k)?
        };
        let cost = closed_form_cost(ClosedForm::FatTree { hosts: query.hosts, radix: k }, &params)?;
        table.push(SweepRow {
            k,
            l: levels,
            cost: cost.total,
        });
    }
    let best = table
        .iter()
        .copied()
        .reduce(|best, row| if row.cost < best.cost { row } else { best })
        .ok_or(Error::EmptyFeasibleSet)?;
    Ok(DesignResult {
        k_opt: best.k,
        levels: best.l,
        cost: best.cost,
        table,
    })
}

/// A family as it appears in comparisons and sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    #[serde(rename = "torus2d")]
    Torus2D,
    Hypercube,
    #[serde(rename = "flattened_butterfly2d")]
    FlattenedButterfly2D,
    /// Fat tree with a fixed router radix; the size is its host count.
    FatTree { radix: u64 },
    /// One switch whose radix equals the host count.
    Star,
}

impl Family {
    pub fn name(&self) -> String {
        match self {
            Family::Torus2D => "torus2d".to_string(),
            Family::Hypercube => "hypercube".to_string(),
            Family::FlattenedButterfly2D => "flattened_butterfly2d".to_string(),
            Family::FatTree { radix } => format!("fat_tree(k={radix})"),
            Family::Star => "star".to_string(),
        }
    }

    /// Closed-form arguments for a network serving `size` hosts.
    pub fn closed_form(&self, size: u64) -> ClosedForm {
        match *self {
            Family::Torus2D => ClosedForm::Torus2D { routers: size },
            Family::Hypercube => ClosedForm::Hypercube { routers: size },
            Family::FlattenedButterfly2D => ClosedForm::FlattenedButterfly2D { routers: size },
            Family::FatTree { radix } => ClosedForm::FatTree { hosts: size, radix },
            Family::Star => ClosedForm::Star { radix: size },
        }
    }

    pub fn cost(&self, size: u64, params: &CostParams) -> Result<CostBreakdown> {
        closed_form_cost(self.closed_form(size), params)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ranked {
    pub family: String,
    pub size: u64,
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost: Option<CostBreakdown>,
}

/// Ranks families by closed-form cost at one size, cheapest first.
/// Families whose formula does not apply at `size` are listed last.
pub fn compare_topologies(size: u64, params: &CostParams, families: &[Family]) -> Vec<Ranked> {
    let mut out: Vec<Ranked> = families
        .iter()
        .map(|f| match f.cost(size, params) {
            Ok(c) => Ranked {
                family: f.name(),
                size,
                applicable: true,
                reason: None,
                cost: Some(c),
            },
            Err(e) => Ranked {
                family: f.name(),
                size,
                applicable: false,
                reason: Some(e.to_string()),
                cost: None,
            },
        })
        .collect();
    out.sort_by(|a, b| {
        let ka = a.cost.map(|c| c.total);
        let kb = b.cost.map(|c| c.total);
        match (ka, kb) {
            (Some(x), Some(y)) => x.total_cmp(&y),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        }
        .then_with(|| a.family.cmp(&b.family))
    });
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub size: u64,
    pub cost_a: f64,
    pub cost_b: f64,
}

/// Consecutive nonzero-difference sizes between which the cheaper family flips.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Crossover {
    pub below: u64,
    pub above: u64,
}

/// FB-to-torus growth comparison at one size, for `beta/alpha = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingAudit {
    pub size: u64,
    /// Ratio of complete closed-form costs.
    pub full_cost_ratio: f64,
    /// Its large-N limit, `2 / (5/4)`.
    pub full_cost_limit: f64,
    /// Ratio of the per-sqrt(N) growth factors: FB radix over torus H / L_host.
    pub bare_factor_ratio: f64,
    /// Its large-N limit, `2 / (1/4)`.
    pub bare_factor_limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossoverReport {
    pub family_a: String,
    pub family_b: String,
    pub points: Vec<ScanPoint>,
    /// Sizes where both costs agree within [`COST_TIE_EPS`].
    pub ties: Vec<u64>,
    pub crossovers: Vec<Crossover>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingAudit>,
}

fn sign_of_gap(a: f64, b: f64) -> i8 {
    if (a - b).abs() <= COST_TIE_EPS * a.abs().max(b.abs()) {
        0
    } else if a > b {
        1
    } else {
        -1
    }
}

/// Evaluates both families over `sizes` and locates where the cheaper one changes.
pub fn crossover_scan(
    family_a: Family,
    family_b: Family,
    params: &CostParams,
    sizes: &[u64],
) -> CrossoverReport {
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let points: Vec<ScanPoint> = sizes
        .iter()
        .filter_map(|&size| {
            let a = family_a.cost(size, params).ok()?;
            let b = family_b.cost(size, params).ok()?;
            Some(ScanPoint {
                size,
                cost_a: a.total,
                cost_b: b.total,
            })
        })
        .collect();

    let mut ties = Vec::new();
    let mut crossovers = Vec::new();
    let mut last: Option<(u64, i8)> = None;
    for p in &points {
        let s = sign_of_gap(p.cost_a, p.cost_b);
        if s == 0 {
            ties.push(p.size);
            continue;
        }
        if let Some((size, prev)) = last {
            if prev != s {
                crossovers.push(Crossover {
                    below: size,
                    above: p.size,
                });
            }
        }
        last = Some((p.size, s));
    }

    let pair = [family_a, family_b];
    let scaling = if pair.contains(&Family::Torus2D) && pair.contains(&Family::FlattenedButterfly2D) {
        points.last().and_then(|p| scaling_audit(p.size).ok())
    } else {
        None
    };

    CrossoverReport {
        family_a: family_a.name(),
        family_b: family_b.name(),
        points,
        ties,
        crossovers,
        scaling,
    }
}

/// Compares flattened-butterfly and torus growth at `size` routers, `beta/alpha = 0`.
pub fn scaling_audit(size: u64) -> Result<ScalingAudit> {
    let params = CostParams::worst_case(0.0);
    let torus = closed_form_cost(ClosedForm::Torus2D { routers: size }, &params)?;
    let fb = closed_form_cost(ClosedForm::FlattenedButterfly2D { routers: size }, &params)?;
    let root = exact_sqrt(size).expect("closed forms accepted a square size") as f64;
    let torus_factor = torus.h / torus.l_host / root;
    let fb_factor = fb.router_cost / root;
    Ok(ScalingAudit {
        size,
        full_cost_ratio: fb.total / torus.total,
        full_cost_limit: 2.0 / 1.25,
        bare_factor_ratio: fb_factor / torus_factor,
        bare_factor_limit: 2.0 / 0.25,
    })
}

/// One (size, family, total) row of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub size: u64,
    pub family: String,
    pub total: f64,
}

/// Closed-form cost of every applicable (size, family) combination, by size then family order.
pub fn sweep(families: &[Family], sizes: &[u64], params: &CostParams) -> Vec<SweepPoint> {
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    sizes
        .iter()
        .flat_map(|&size| {
            families.iter().filter_map(move |f| {
                f.cost(size, params).ok().map(|c| SweepPoint {
                    size,
                    family: f.name(),
                    total: c.total,
                })
            })
        })
        .collect()
}

/// Sizes up to `max` at which some direct family has a closed form:
/// powers of two and perfect squares, from 2 upwards.
pub fn default_sweep_sizes(max: u64) -> Vec<u64> {
    let mut sizes: Vec<u64> = (1..64)
        .map(|b| 1u64 << b)
        .take_while(|&n| n <= max)
        .collect();
    sizes.extend((2..).map(|s: u64| s * s).take_while(|&n| n <= max));
    sizes.sort_unstable();
    sizes.dedup();
    sizes
}

#[cfg(test)]
mod tests {
    use super::*;

    fn query(hosts: u64, ratio: f64, k_min: u64, k_max: u64, realizable: bool) -> DesignQuery {
        DesignQuery {
            hosts,
            beta_over_alpha: ratio,
            k_min,
            k_max,
            realizable_only: realizable,
        }
    }

    #[test]
    fn realizable_level_counts() {
        assert_eq!(realizable_levels(1024, 1024), Some(1));
        assert_eq!(realizable_levels(1024, 4), Some(9));
        assert_eq!(realizable_levels(32, 8), Some(2));
        assert_eq!(realizable_levels(131_072, 512), Some(2));
        assert_eq!(realizable_levels(1024, 6), None);
        assert_eq!(realizable_levels(1024, 2), None);
    }

    #[test]
    fn zero_ratio_realizable_picks_star() {
        let r = optimize_fat_tree_radix(&query(1024, 0.0, 4, 1024, true)).unwrap();
        assert_eq!(r.k_opt, 1024);
        assert_eq!(r.levels, 1.0);
        assert!((r.cost - 1.0).abs() < 1e-12);
        // (k/2)^l = 512 = 2^9 needs k/2 = 2^a with a dividing 9
        let ks: Vec<u64> = r.table.iter().map(|row| row.k).collect();
        assert_eq!(ks, vec![4, 16, 1024]);
        let costs: Vec<f64> = r.table.iter().map(|row| row.cost).collect();
        assert_eq!(costs, vec![17.0, 5.0, 1.0]);
    }

    #[test]
    fn positive_ratio_continuous_interior_optimum() {
        let r = optimize_fat_tree_radix(&query(1024, 0.01, 4, 1024, false)).unwrap();
        assert!((60..=80).contains(&r.k_opt), "k_opt = {}", r.k_opt);
        assert!((r.cost - 4.26).abs() < 0.01, "cost = {}", r.cost);
        assert_eq!(r.k_opt, 66);
    }

    #[test]
    fn odd_bounds_round_to_even() {
        let r = optimize_fat_tree_radix(&query(64, 0.0, 5, 9, false)).unwrap();
        let ks: Vec<u64> = r.table.iter().map(|row| row.k).collect();
        assert_eq!(ks, vec![6, 8]);
    }

    #[test]
    fn empty_feasible_set() {
        let err = optimize_fat_tree_radix(&query(1000, 0.0, 4, 64, true)).unwrap_err();
        assert_eq!(err, Error::EmptyFeasibleSet);
    }

    #[test]
    fn bad_queries() {
        assert!(optimize_fat_tree_radix(&query(1, 0.0, 4, 8, false)).is_err());
        assert!(optimize_fat_tree_radix(&query(64, 0.0, 2, 8, false)).is_err());
        assert!(optimize_fat_tree_radix(&query(64, 0.0, 4, 8192, false)).is_err());
        assert!(optimize_fat_tree_radix(&query(64, -1.0, 4, 8, false)).is_err());
    }

    #[test]
    fn direct_network_ranking_at_64() {
        let ranked = compare_topologies(
            64,
            &CostParams::default(),
            &[Family::FlattenedButterfly2D, Family::Torus2D, Family::Hypercube],
        );
        let got: Vec<(&str, f64)> = ranked
            .iter()
            .map(|r| (r.family.as_str(), r.cost.unwrap().total))
            .collect();
        assert_eq!(
            got,
            vec![("hypercube", 7.0), ("torus2d", 10.0), ("flattened_butterfly2d", 15.0)]
        );
    }

    #[test]
    fn tie_at_nine_breaks_by_name() {
        let ranked = compare_topologies(
            9,
            &CostParams::worst_case(0.02),
            &[Family::Torus2D, Family::FlattenedButterfly2D, Family::Hypercube],
        );
        assert_eq!(ranked[0].family, "flattened_butterfly2d");
        assert_eq!(ranked[1].family, "torus2d");
        assert_eq!(ranked[0].cost.unwrap().total, ranked[1].cost.unwrap().total);
        assert!(!ranked[2].applicable);
    }

    #[test]
    fn star_comparison() {
        let ranked = compare_topologies(8, &CostParams::worst_case(0.5), &[Family::Star]);
        assert_eq!(ranked[0].cost.unwrap().total, 5.0);
    }

    #[test]
    fn torus_vs_butterfly_scan() {
        let sizes: Vec<u64> = (2..=32).map(|s| s * s).collect();
        let r = crossover_scan(Family::Torus2D, Family::FlattenedButterfly2D, &CostParams::default(), &sizes);
        assert_eq!(r.ties, vec![9]);
        assert_eq!(r.crossovers, vec![Crossover { below: 4, above: 16 }]);
        assert!(r.points.iter().filter(|p| p.size >= 16).all(|p| p.cost_b > p.cost_a));
        let audit = r.scaling.unwrap();
        assert_eq!(audit.size, 1024);
    }

    #[test]
    fn torus_vs_hypercube_scan() {
        let r = crossover_scan(
            Family::Torus2D,
            Family::Hypercube,
            &CostParams::default(),
            &[16, 64, 256, 1024],
        );
        let costs: Vec<(f64, f64)> = r.points.iter().map(|p| (p.cost_a, p.cost_b)).collect();
        assert_eq!(costs, vec![(5.0, 5.0), (10.0, 7.0), (20.0, 9.0), (40.0, 11.0)]);
        assert_eq!(r.ties, vec![16]);
        assert!(r.crossovers.is_empty());
        assert!(r.scaling.is_none());
    }

    #[test]
    fn identical_families_never_cross() {
        let r = crossover_scan(Family::Hypercube, Family::Hypercube, &CostParams::default(), &[4, 8, 16]);
        assert!(r.crossovers.is_empty());
        assert_eq!(r.ties, vec![4, 8, 16]);
    }

    #[test]
    fn sweep_skips_inapplicable() {
        let pts = sweep(
            &[Family::Torus2D, Family::Hypercube],
            &default_sweep_sizes(16),
            &CostParams::default(),
        );
        let rows: Vec<(u64, &str)> = pts.iter().map(|p| (p.size, p.family.as_str())).collect();
        assert_eq!(
            rows,
            vec![
                (2, "hypercube"),
                (4, "torus2d"),
                (4, "hypercube"),
                (8, "hypercube"),
                (9, "torus2d"),
                (16, "torus2d"),
                (16, "hypercube"),
            ]
        );
    }
}
