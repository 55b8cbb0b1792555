use std::f64::consts::PI;

use bowen_series::geometry::{direction_at, elliptic_about, DiskPoint, MapKind, MoebiusMap};
use bowen_series::group::{build_domain, verify_relations, FundamentalDomain, GroupWord, Signature};
use bowen_series::net::build_net;
use bowen_series::{Mp, Real, Tolerances};

fn domain(m: [u32; 3]) -> FundamentalDomain<f64> {
    build_domain(Signature::new(m[0], m[1], m[2]).unwrap(), &Tolerances::default()).unwrap()
}

fn interior_angle(fd: &FundamentalDomain<f64>, i: isize) -> f64 {
    let v = fd.vertex(i);
    let d1 = direction_at(v, fd.vertex(i - 1));
    let d2 = direction_at(v, fd.vertex(i + 1));
    let a = (d1 - d2).rem_euclid(2.0 * PI);
    a.min(2.0 * PI - a)
}

#[test]
fn equal_orders_give_equal_angles() {
    let fd = domain([6, 6, 3]);
    for i in 1..=4 {
        assert!((interior_angle(&fd, i) - PI / 3.0).abs() < 1e-9, "vertex {i}");
    }
}

#[test]
fn diagonal_length_matches_law_of_cosines() {
    // triangle v1 v2 v4 has angles pi/m3, pi/m2, pi/m1
    let fd = domain([4, 6, 2]);
    let (a, b, c) = (PI / 4.0, PI / 6.0, PI / 2.0);
    let expected = (a.cos() * b.cos() + c.cos()) / (a.sin() * b.sin());
    let got = fd.vertex(2).cosh_distance(fd.vertex(4));
    assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
}

#[test]
fn rotation_about_v4_is_t4_up_to_direction() {
    for m in [[6, 6, 3], [4, 4, 3], [8, 4, 3]] {
        let fd = domain(m);
        let angle = 2.0 * PI / m[0] as f64;
        let plus = elliptic_about(fd.vertex(4), &angle);
        let minus = elliptic_about(fd.vertex(4), &-angle);
        let t4 = fd.generator(4);
        assert!(t4.distance(&plus).min(t4.distance(&minus)) < 1e-9, "{m:?}");
    }
}

#[test]
fn pairings_and_words() {
    let tol = Tolerances::default();
    let fd = domain([6, 6, 3]);
    let id = MoebiusMap::identity();
    assert!(fd.generator(2).compose(fd.generator(1)).distance(&id) < 1e-9);
    assert!(fd.word_to_map(&"2,1".parse().unwrap()).distance(&id) < 1e-9);
    let t24: GroupWord = "2,4".parse().unwrap();
    let r = fd.word_to_map(&t24);
    assert_eq!(r.classify(&tol), MapKind::Elliptic);
    assert!(r.pow(3).distance(&id) < 1e-9);
    let fig: GroupWord = "4,4,2,2,3,1,4,4,1,4,4,4".parse().unwrap();
    assert_eq!(fd.word_to_map(&fig).classify(&tol), MapKind::Hyperbolic);
    // the power notation parses to the same word
    let same: GroupWord = "T4^2 T2^2 T3 T1 T4^2 T1 T4^3".parse().unwrap();
    assert_eq!(same, fig);
}

#[test]
fn t1_sends_v1_to_v3() {
    for m in [[6, 6, 3], [4, 6, 5]] {
        let fd = domain(m);
        let img = DiskPoint::new(fd.generator(1).apply_disk(fd.vertex(1).z())).unwrap();
        assert!(img.cosh_distance(fd.vertex(3)) - 1.0 < 1e-12, "{m:?}");
    }
}

#[test]
fn relations_hold_at_both_precisions() {
    let tol = Tolerances::default();
    for m in [[6, 6, 3], [4, 4, 3], [4, 6, 2], [8, 4, 3], [4, 6, 5], [10, 6, 7]] {
        let sig = Signature::new(m[0], m[1], m[2]).unwrap();
        let f = verify_relations(&build_domain::<f64>(sig, &tol).unwrap(), &tol);
        assert!(f.all_pass(), "{m:?}: {:?}", f.failures());
        let x = verify_relations(&build_domain::<Mp>(sig, &tol).unwrap(), &tol);
        assert!(x.all_pass(), "{m:?}: {:?}", x.failures());
        assert!(x.max_matrix_residual() < 1e-60);
    }
}

#[test]
fn domain_json_round_trips() {
    let tol = Tolerances::default();
    let fd = domain([4, 6, 2]);
    let text = serde_json::to_string(&fd.to_json()).unwrap();
    let back: bowen_series::group::DomainJson = serde_json::from_str(&text).unwrap();
    let re = back.load::<f64>(&tol).unwrap();
    for i in 1..=4 {
        assert!(re.generator(i).distance(fd.generator(i)) < 1e-12);
    }
}

#[test]
fn fan_sizes_and_endpoint_counts() {
    let tol = Tolerances::default();
    for (m, n) in [([6, 6, 3], [3, 3, 3, 3]), ([4, 4, 3], [3, 2, 3, 2]), ([4, 6, 2], [2, 3, 2, 2])] {
        let fd = domain(m);
        let net = build_net(&fd, &tol).unwrap();
        let got: Vec<usize> = (1..=4).map(|i| net.n(i)).collect();
        assert_eq!(got, n, "{m:?}");
        // each vertex contributes 2 n_i endpoints; the four shared ones count twice
        assert_eq!(net.w.len(), 2 * n.iter().sum::<usize>() - 8, "{m:?}");
    }
}

#[test]
fn interval_families() {
    let tol = Tolerances::default();
    let eps = 1e-9;
    for m in [[6, 6, 3], [4, 4, 3], [4, 6, 2]] {
        let net = build_net(&domain(m), &tol).unwrap();
        for i in 1..=4usize {
            let n = net.n(i as isize);
            let o = net.overlap(i);
            let l = net.interval_l(i, n).unwrap();
            assert!(o.left.approx_eq(&l.left, eps) && o.right.approx_eq(&l.right, eps));
            // A_i followed by O_{i+1} is L_1(v_i)
            let l1 = net.interval_l(i, 1).unwrap();
            let a = net.a_region(i);
            let next = net.overlap(i % 4 + 1);
            assert!(a.left.approx_eq(&l1.left, eps));
            assert!(a.right.approx_eq(&next.left, eps));
            assert!(next.right.approx_eq(&l1.right, eps));
            // containments of the overlap in neighbouring fans
            let j = |k: usize| (i + k - 1) % 4 + 1;
            assert!(net.interval_r(j(2), 1).unwrap().contains_arc(&o, eps), "{m:?} O{i}");
            let r2 = net.interval_r(j(1), 2).unwrap();
            assert!(r2.contains_arc(&o, eps) && r2.left.approx_eq(&o.left, eps));
            let l1_prev = net.interval_l(j(3), 1).unwrap();
            assert!(l1_prev.contains_arc(&o, eps) && l1_prev.right.approx_eq(&o.right, eps));
            // the L and R arcs at one vertex tile the circle
            let total: f64 = (1..=n)
                .map(|k| {
                    net.interval_l(i, k).unwrap().length().to_f64()
                        + net.interval_r(i, k).unwrap().length().to_f64()
                })
                .sum();
            assert!((total - 2.0 * PI).abs() < 1e-9);
        }
        assert!(net.interval_l(1, 0).is_err());
        assert!(net.interval_r(1, net.n(1) + 1).is_err());
    }
}

#[test]
fn branch_arcs_partition_a_dense_sample() {
    let tol = Tolerances::default();
    let net = build_net(&domain([4, 4, 3]), &tol).unwrap();
    for s in 0..10_000 {
        let x = bowen_series::geometry::CirclePoint::<f64>::from_f64(2.0 * PI * s as f64 / 1e4);
        let hits = (1..=4).filter(|&i| net.branch_arc(i).contains(&x, 0.0)).count();
        assert_eq!(hits, 1);
    }
    for i in 1..=4isize {
        let x = net.a(i, net.n(i) as isize);
        assert_eq!(net.branch_of(x, tol.point), i as usize % 4 + 1);
    }
}
