use caaoi::analysis::*;
use caaoi::policies::{whittle_index_csi, whittle_index_no_csi};
use caaoi::{Channel, Csi, MetricKind};
use proptest::prelude::*;

fn solve(csi: Csi, p: f64, w: f64, c: f64, max_age: u64, gamma: f64) -> ValueFunction {
    let m = SingleArmMdp::new(csi, p, w, c, max_age, MetricKind::CaAoi).unwrap();
    value_iterate(&m, gamma, 1e-10).unwrap()
}

#[test]
fn threshold_and_monotone_values_across_discounts() {
    for csi in [Csi::Unknown, Csi::Known] {
        for &gamma in &[0.99, 0.999] {
            for &(p, w, c) in &[(0.2, 1.0, 0.0), (0.5, 2.0, 7.0), (0.8, 0.5, 40.0), (1.0, 1.0, 3.0)] {
                let vf = solve(csi, p, w, c, 200, gamma);
                vf.check_threshold().unwrap();
                assert_eq!(vf.first_decrease(), None, "{csi:?} γ={gamma} p={p}");
            }
        }
    }
}

#[test]
fn aoi_arm_is_also_threshold() {
    for csi in [Csi::Unknown, Csi::Known] {
        let m = SingleArmMdp::new(csi, 0.3, 1.0, 12.0, 200, MetricKind::VanillaAoi).unwrap();
        let vf = value_iterate(&m, 0.99, 1e-10).unwrap();
        vf.check_threshold().unwrap();
        assert_eq!(vf.first_decrease(), None);
    }
}

#[test]
fn huge_charge_idles_everywhere_below_cap() {
    for csi in [Csi::Unknown, Csi::Known] {
        let vf = solve(csi, 0.5, 1.0, 1e9, 60, 0.99);
        for x in 0..60 {
            assert!(!vf.plays(x, Channel::On) && !vf.plays(x, Channel::Off));
        }
    }
}

#[test]
fn kernel_threshold_matches_value_iteration() {
    // the average-cost optimal threshold read off the kernel and the
    // discounted optimum agree to one state
    for csi in [Csi::Unknown, Csi::Known] {
        for &(p, w, c) in &[(0.1, 1.0, 10.0), (0.5, 0.5, 100.0), (0.9, 10.0, 100.0), (0.3, 1.0, 30.0)] {
            let vf = solve(csi, p, w, c, 500, 0.999);
            let vi = vf.threshold(Channel::On).unwrap().unwrap() as i64;
            let best = (0..200u64)
                .min_by(|&a, &b| {
                    let ca = threshold_rates(csi, MetricKind::CaAoi, w, p, a).unwrap().cost(c);
                    let cb = threshold_rates(csi, MetricKind::CaAoi, w, p, b).unwrap().cost(c);
                    ca.total_cmp(&cb)
                })
                .unwrap() as i64;
            assert!((vi - best).abs() <= 1, "{csi:?} p={p} w={w} c={c}: {vi} vs {best}");
        }
    }
}

#[test]
fn discounted_threshold_near_closed_form_cost_argmin() {
    let mut misses = Vec::new();
    for csi in [Csi::Unknown, Csi::Known] {
        for &p in &[0.1, 0.5, 0.9] {
            for &w in &[0.5, 1.0, 10.0] {
                for &c in &[1.0, 10.0, 100.0] {
                    let vf = solve(csi, p, w, c, 500, 0.999);
                    let vi = vf.threshold(Channel::On).unwrap().unwrap() as i64;
                    let best = (0..400u64)
                        .min_by(|&a, &b| {
                            threshold_avg_cost(csi, a, c, w, p).total_cmp(&threshold_avg_cost(csi, b, c, w, p))
                        })
                        .unwrap() as i64;
                    if (vi - best).abs() > 1 {
                        misses.push(format!("{csi:?} p={p} w={w} c={c}: value iteration {vi}, closed form {best}"));
                    }
                }
            }
        }
    }
    assert!(misses.is_empty(), "{} of 54 cases off by more than one state:\n{}", misses.len(), misses.join("\n"));
}

#[test]
fn nested_idle_sets_on_a_grid() {
    let charges: Vec<f64> = (0..20).map(|k| k as f64 * 2.0).collect();
    for csi in [Csi::Unknown, Csi::Known] {
        let m = SingleArmMdp::new(csi, 0.5, 1.0, 0.0, 150, MetricKind::CaAoi).unwrap();
        let trace = indexability_scan(&m, &charges, 0.99, 1e-10).unwrap();
        assert!(trace[0].is_empty());
        assert!(trace.last().unwrap().len() > trace[1].len());
    }
}

#[test]
fn single_sensor_transient_by_exact_enumeration() {
    // exact law of the age over t slots, propagated by hand
    for &(p, q) in &[(0.5, 0.5), (0.3, 0.7), (1.0, 0.25)] {
        let mut dist = vec![1.0];
        for t in 1..=12u64 {
            let mut next = vec![0.0; dist.len() + 1];
            for (x, &m) in dist.iter().enumerate() {
                next[0] += m * p * q;
                next[x + 1] += m * p * (1.0 - q);
                next[x] += m * (1.0 - p);
            }
            dist = next;
            let mean: f64 = dist.iter().enumerate().map(|(x, m)| x as f64 * m).sum();
            assert!((expected_age_no_csi(p, q, t).unwrap() - mean).abs() < 1e-12);
            assert!((expected_age_csi(p, q, t).unwrap() - mean).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn numeric_index_matches_closed_forms(x in 0u64..60, w in 0.05f64..20.0, p in 0.0f64..=1.0) {
        let u = numeric_whittle(Csi::Unknown, x, w, p).unwrap();
        prop_assert!((u - whittle_index_no_csi(x, p, w)).abs() <= 1e-12 * u.max(1.0));
        let k = numeric_whittle(Csi::Known, x, w, p).unwrap();
        prop_assert!((k - whittle_index_csi(x, Channel::On, w)).abs() <= 1e-12 * k.max(1.0));
    }

    #[test]
    fn closed_form_cost_convex_in_threshold(x in 1u64..1000, c in 0.0f64..1e5, w in 0.05f64..50.0, p in 0.0f64..=1.0) {
        for csi in [Csi::Unknown, Csi::Known] {
            let f = |k| threshold_avg_cost(csi, k, c, w, p);
            prop_assert!(f(x + 1) - 2.0 * f(x) + f(x - 1) >= -1e-9 * (1.0 + f(x)));
        }
    }

    #[test]
    fn transient_tends_to_stationary_cost(p in 0.05f64..=1.0, q in 0.05f64..=1.0) {
        let limit = (1.0 - q) / q;
        prop_assert!((expected_age_no_csi(p, q, 1_000_000).unwrap() - limit).abs() <= 1e-9 * (1.0 + limit));
    }

    #[test]
    fn kernel_aoi_indices_increase(p in 0.05f64..=1.0, w in 0.1f64..10.0) {
        for csi in [Csi::Unknown, Csi::Known] {
            let mut t = KernelIndexTable::new(csi, MetricKind::VanillaAoi, w, p).unwrap();
            t.index(80);
            prop_assert!(t.computed().windows(2).all(|v| v[0] < v[1]));
        }
    }
}
