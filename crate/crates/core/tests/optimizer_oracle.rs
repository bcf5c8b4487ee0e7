// SPDX-License-Identifier: Apache-2.0

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use topocost::{optimize_fat_tree_radix, DesignQuery};

/// Fat-tree cost written out directly, no shared code with the optimizer.
fn fat_tree_cost(hosts: u64, k: u64, ratio: f64) -> f64 {
    let l = ((hosts as f64).log2() - 1.0) / ((k as f64).log2() - 1.0);
    2.0 * (1.0 + ratio * k as f64) * (l - 0.5)
}

fn fully_populated(hosts: u64, k: u64) -> bool {
    let half = k / 2;
    let mut rest = hosts;
    if !rest.is_multiple_of(2) {
        return false;
    }
    rest /= 2;
    let mut levels = 0;
    while rest > 1 && rest.is_multiple_of(half) {
        rest /= half;
        levels += 1;
    }
    rest == 1 && levels >= 1
}

/// Unit-step scan over [k_min, k_max], skipping odd radices and k > M.
fn dense_argmin(q: &DesignQuery) -> Option<(u64, f64)> {
    let mut best: Option<(u64, f64)> = None;
    for k in q.k_min..=q.k_max {
        if k % 2 == 1 || k > q.hosts || (q.realizable_only && !fully_populated(q.hosts, k)) {
            continue;
        }
        let c = fat_tree_cost(q.hosts, k, q.beta_over_alpha);
        if best.is_none_or(|(_, b)| c < b) {
            best = Some((k, c));
        }
    }
    best
}

#[test]
fn matches_dense_sweep_on_random_queries() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for _ in 0..200 {
        let hosts = if rng.gen_bool(0.5) {
            1u64 << rng.gen_range(2..=20)
        } else {
            rng.gen_range(2..=1_000_000)
        };
        let k_min = rng.gen_range(4..=64);
        let k_max = rng.gen_range(k_min..=4096);
        let q = DesignQuery {
            hosts,
            beta_over_alpha: if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..0.1) },
            k_min,
            k_max,
            realizable_only: rng.gen_bool(0.3),
        };
        match (optimize_fat_tree_radix(&q), dense_argmin(&q)) {
            (Ok(r), Some((k, c))) => {
                assert_eq!(r.k_opt, k, "{q:?}");
                assert!((r.cost - c).abs() <= 1e-9 * c.abs(), "{q:?}");
            }
            (Err(_), None) => {}
            (got, want) => panic!("{q:?}: optimizer {got:?}, dense {want:?}"),
        }
    }
}

#[test]
fn zero_ratio_cost_strictly_decreases_with_radix() {
    for exp in 5..=17 {
        let hosts = 1u64 << exp;
        let mut prev = f64::INFINITY;
        for k in (4..=hosts.min(4096)).step_by(2) {
            let c = fat_tree_cost(hosts, k, 0.0);
            assert!(c < prev, "M={hosts} k={k}");
            prev = c;
        }
        let r = optimize_fat_tree_radix(&DesignQuery {
            hosts,
            beta_over_alpha: 0.0,
            k_min: 4,
            k_max: 4096,
            realizable_only: false,
        })
        .unwrap();
        assert_eq!(r.k_opt, hosts.min(4096));
    }
}

#[test]
fn zero_ratio_realizable_star_costs_one() {
    for exp in 2..=12 {
        let hosts = 1u64 << exp;
        let r = optimize_fat_tree_radix(&DesignQuery {
            hosts,
            beta_over_alpha: 0.0,
            k_min: 4,
            k_max: 4096,
            realizable_only: true,
        })
        .unwrap();
        assert_eq!((r.k_opt, r.levels), (hosts, 1.0));
        assert!((r.cost - 1.0).abs() < 1e-12);
    }
}

#[test]
fn interior_minimum_lies_in_the_difference_sign_change() {
    for (hosts, ratio) in [(1024u64, 0.01), (65_536, 0.005), (1 << 20, 0.002), (4096, 0.02)] {
        let q = DesignQuery {
            hosts,
            beta_over_alpha: ratio,
            k_min: 4,
            k_max: 1024.min(hosts / 2),
            realizable_only: false,
        };
        let r = optimize_fat_tree_radix(&q).unwrap();
        assert!(r.table.iter().all(|row| row.l > 1.0));
        let k = r.k_opt;
        assert!(k > q.k_min && k < q.k_max, "M={hosts}: k_opt={k} is on the boundary");
        // backward difference <= 0, forward difference >= 0
        assert!(fat_tree_cost(hosts, k, ratio) <= fat_tree_cost(hosts, k - 2, ratio));
        assert!(fat_tree_cost(hosts, k + 2, ratio) >= fat_tree_cost(hosts, k, ratio));
        // one sign change in the discrete difference across the sweep
        let diffs: Vec<bool> = r.table.windows(2).map(|w| w[1].cost >= w[0].cost).collect();
        let flips = diffs.windows(2).filter(|w| w[0] != w[1]).count();
        assert_eq!(flips, 1, "M={hosts}");
    }
}

#[test]
fn known_interior_optimum_for_1024_hosts() {
    let r = optimize_fat_tree_radix(&DesignQuery {
        hosts: 1024,
        beta_over_alpha: 0.01,
        k_min: 4,
        k_max: 1024,
        realizable_only: false,
    })
    .unwrap();
    let (k, c) = dense_argmin(&DesignQuery {
        hosts: 1024,
        beta_over_alpha: 0.01,
        k_min: 4,
        k_max: 1024,
        realizable_only: false,
    })
    .unwrap();
    assert_eq!((r.k_opt, k), (66, 66));
    assert!((60..=80).contains(&r.k_opt));
    assert!((c - 4.26).abs() < 0.01);
}
