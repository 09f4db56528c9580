use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vardir_geonet::sampling::random_unit_vector;
use vardir_geonet::{build_net, DirectionSet, Manifold, Net};
use vardir_partition::{cluster_select, direction_items, ClusterSelection};

/// Count of items of `pool` entirely inside `{η : |ξ·η| < 3s|η|}`, from scratch.
fn oracle_counts(items: &[Vec<Vec<f64>>], pool: &[usize], net: &Net, s: f64) -> Vec<usize> {
    net.points()
        .iter()
        .map(|xi| {
            pool.iter()
                .filter(|&&i| {
                    items[i].iter().all(|p| {
                        let d: f64 = xi.iter().zip(p).map(|(a, b)| a * b).sum();
                        let r = p.iter().map(|v| v * v).sum::<f64>().sqrt();
                        d.abs() < 3.0 * s * r
                    })
                })
                .count()
        })
        .collect()
}

fn check_invariants(sel: &ClusterSelection, items: &[Vec<Vec<f64>>], net: &Net) {
    let mut seen = vec![0; items.len()];
    for c in sel.bad_clusters.values() {
        assert!(c.len() > sel.threshold);
        for &i in c {
            seen[i] += 1;
        }
    }
    for &i in &sel.good_remainder {
        seen[i] += 1;
    }
    assert!(seen.iter().all(|&k| k == 1), "clusters and remainder must partition the items");
    let counts = oracle_counts(items, &sel.good_remainder, net, sel.s);
    assert!(counts.iter().all(|&c| c <= sel.threshold));
    assert_eq!(counts, sel.remainder_band_counts(items, net).unwrap());
}

fn unit(v: [f64; 3]) -> Vec<f64> {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v.iter().map(|x| x / r).collect()
}

/// Orthonormal pair spanning the plane perpendicular to `xi`.
fn plane_frame(xi: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let seed = if xi[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d: f64 = seed.iter().zip(xi).map(|(a, b)| a * b).sum();
    let u = unit([seed[0] - d * xi[0], seed[1] - d * xi[1], seed[2] - d * xi[2]]);
    let w = unit([xi[1] * u[2] - xi[2] * u[1], xi[2] * u[0] - xi[0] * u[2], xi[0] * u[1] - xi[1] * u[0]]);
    (u, w)
}

#[test]
fn spread_items_give_no_bad_cluster() {
    let net = build_net(&Manifold::Sphere { n: 3 }, 0.2, 4).unwrap();
    let mut r = ChaCha8Rng::seed_from_u64(1);
    let pts: Vec<Vec<f64>> = (0..40).map(|_| random_unit_vector(&mut r, 3)).collect();
    let items = direction_items(&DirectionSet::new(3, pts, true).unwrap());
    let sel = cluster_select(&items, &net, 0.01, 40).unwrap();
    assert!(sel.omega_bad.is_empty());
    assert_eq!(sel.good_remainder.len(), 40);
    check_invariants(&sel, &items, &net);
}

#[test]
fn two_crowded_great_circle_families() {
    let s = 0.02;
    let threshold = 20;
    let net = build_net(&Manifold::Sphere { n: 3 }, 0.1, 9).unwrap();
    let pick = |target: [f64; 3]| {
        let t = unit(target);
        (0..net.len())
            .max_by(|&i, &j| {
                let di: f64 = net.points()[i].iter().zip(&t).map(|(a, b)| a * b).sum();
                let dj: f64 = net.points()[j].iter().zip(&t).map(|(a, b)| a * b).sum();
                di.total_cmp(&dj)
            })
            .unwrap()
    };
    let (ia, ib) = (pick([0.0, 0.0, 1.0]), pick([1.0, 0.0, 0.2]));
    let mut items: Vec<Vec<Vec<f64>>> = Vec::new();
    for &k in &[ia, ib] {
        let (u, w) = plane_frame(&net.points()[k]);
        for c in 0..30 {
            // arcs of length 0.3 spaced around the great circle perpendicular to ξ
            let start = c as f64 * 0.2;
            items.push(
                (0..8)
                    .map(|j| {
                        let t = start + 0.3 * j as f64 / 7.0;
                        (0..3).map(|q| t.cos() * u[q] + t.sin() * w[q]).collect()
                    })
                    .collect(),
            );
        }
    }
    let mut r = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..60 {
        items.push(vec![random_unit_vector(&mut r, 3)]);
    }
    // background alone stays under the threshold in every band
    let bg: Vec<usize> = (60..items.len()).collect();
    assert!(oracle_counts(&items, &bg, &net, s).iter().all(|&c| c <= threshold));

    let sel = cluster_select(&items, &net, s, threshold).unwrap();
    assert_eq!(sel.omega_bad.len(), 2, "tops {:?}", sel.omega_bad);
    // each bad cluster holds one whole family of arcs
    let mut families: Vec<Vec<usize>> = sel
        .bad_clusters
        .values()
        .map(|c| c.iter().copied().filter(|&i| i < 60).collect())
        .collect();
    families.sort();
    assert_eq!(families, vec![(0..30).collect::<Vec<_>>(), (30..60).collect::<Vec<_>>()]);
    check_invariants(&sel, &items, &net);
}

#[test]
fn threshold_plus_one_in_a_single_band() {
    let net = build_net(&Manifold::Sphere { n: 3 }, 0.3, 2).unwrap();
    let xi = net.points()[0].clone();
    let (u, w) = plane_frame(&xi);
    let items: Vec<Vec<Vec<f64>>> = (0..6)
        .map(|k| {
            let t = k as f64;
            vec![(0..3).map(|q| t.cos() * u[q] + t.sin() * w[q]).collect()]
        })
        .collect();
    let sel = cluster_select(&items, &net, 0.05, 5).unwrap();
    assert_eq!(sel.omega_bad.len(), 1);
    assert!(sel.good_remainder.is_empty());
    check_invariants(&sel, &items, &net);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn greedy_remainder_obeys_threshold(seed in 0u64..10_000, count in 1usize..120, threshold in 1usize..12, clump in 0usize..40) {
        let net = build_net(&Manifold::Sphere { n: 3 }, 0.25, seed).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let centre = random_unit_vector(&mut r, 3);
        let mut pts: Vec<Vec<f64>> = (0..count).map(|_| random_unit_vector(&mut r, 3)).collect();
        for _ in 0..clump {
            let mut p: Vec<f64> = centre.iter().map(|c| c + 0.02 * r.gen_range(-1.0..1.0)).collect();
            let n = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            p.iter_mut().for_each(|v| *v /= n);
            pts.push(p);
        }
        let items = direction_items(&DirectionSet::new(3, pts, true).unwrap());
        let sel = cluster_select(&items, &net, 0.03, threshold).unwrap();
        check_invariants(&sel, &items, &net);
    }
}
