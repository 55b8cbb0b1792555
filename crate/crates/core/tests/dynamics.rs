use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bowen_series::analysis::{hyperbolic_alpha, transition_matrix};
use bowen_series::dynamics::{
    f_eval, f_iter, index_sequence, matching_index, matching_sets, orbit, rho, BoundaryMap,
    MatchIndex,
};
use bowen_series::geometry::{CircleArc, CirclePoint, MoebiusMap};
use bowen_series::group::{build_domain, Signature};
use bowen_series::net::{build_net, NetData};
use bowen_series::{Mp, Real, Tolerances};

fn net<R: Real>(m: [u32; 3]) -> Arc<NetData<R>> {
    let tol = Tolerances::default();
    let fd = build_domain::<R>(Signature::new(m[0], m[1], m[2]).unwrap(), &tol).unwrap();
    Arc::new(build_net(&fd, &tol).unwrap())
}

fn sample<R: Real>(arc: &CircleArc<R>, rng: &mut ChaCha8Rng) -> CirclePoint<R> {
    arc.at_fraction(rng.gen_range(0.001..0.999))
}

#[test]
fn fan_start_lands_on_last_endpoint_of_image_fan() {
    for m in [[6, 6, 3], [4, 4, 3], [4, 6, 2]] {
        let n = net::<f64>(m);
        for i in 1..=4isize {
            let (y, _) = f_eval(&n, n.a(i, 1), 1e-9);
            let r = rho(i as usize) as isize;
            assert!(y.approx_eq(n.a(r, 2 * n.n(i) as isize), 1e-9), "{m:?} i={i}");
        }
    }
}

#[test]
fn left_arcs_step_down_one_level() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for m in [[6, 6, 3], [4, 4, 3], [8, 4, 3]] {
        let n = net::<f64>(m);
        for i in 1..=4usize {
            for r in 2..=n.n(i as isize) {
                let src = n.interval_l(i, r).unwrap();
                let dst = n.interval_l(rho(i), r - 1).unwrap();
                for _ in 0..20 {
                    let x = sample(&src, &mut rng);
                    let (y, _) = f_eval(&n, &x, 1e-9);
                    assert!(dst.contains(&y, 1e-9), "{m:?} L_{r}(v{i})");
                }
            }
        }
    }
}

#[test]
fn orbit_words_reproduce_orbit_points() {
    let tol = Tolerances::default();
    let n = net::<Mp>([4, 6, 2]);
    let map = BoundaryMap::base(n.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let x = CirclePoint::<Mp>::from_f64(rng.gen_range(0.0..std::f64::consts::TAU));
        let rec = orbit(&map, &x, 50, &tol).unwrap();
        for p in 0..=50 {
            let y = rec.words[p].apply_boundary(&x);
            assert!(y.dist(&rec.points[p]) < 1e-9, "step {p}");
        }
    }
}

#[test]
fn periodic_endpoint_orbit_gives_fixing_word() {
    let tol = Tolerances::default();
    let n = net::<Mp>([6, 6, 3]);
    let map = BoundaryMap::base(n.clone());
    let x = n.w[5].clone();
    let rec = orbit(&map, &x, 40, &tol).unwrap();
    let (j, p) = (0..rec.points.len())
        .flat_map(|p| (0..p).map(move |j| (j, p)))
        .find(|&(j, p)| rec.points[j].dist(&rec.points[p]) < 1e-20)
        .expect("endpoint orbits are eventually periodic");
    let g: MoebiusMap<Mp> = rec.words[p].compose(&rec.words[j].inverse());
    assert!(g.fixed_point_residual(&rec.points[j]) < 1e-20);
}

#[test]
fn index_sequence_alternates_parity() {
    for m in [[6, 6, 3], [4, 4, 3], [4, 6, 2], [8, 4, 3], [4, 6, 5]] {
        let n = net::<f64>(m);
        for i in 1..=4 {
            let seq = index_sequence(&n, i, 12).unwrap();
            assert!(seq.windows(2).all(|w| w[0] % 2 != w[1] % 2), "{m:?}: {seq:?}");
        }
    }
}

#[test]
fn matching_sets_satisfy_their_defining_identity() {
    let tol = Tolerances::default();
    let eps = tol.branch::<Mp>();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for m in [[6, 6, 3], [4, 4, 3], [4, 6, 2]] {
        let n = net::<Mp>(m);
        for i in 1..=4 {
            let table = matching_sets(&n, i, 60, 1e-6, &tol).unwrap();
            assert!(table.residual < 1e-6, "{m:?} O{i}: {}", table.residual);
            let total: f64 = table.entries.iter().map(|e| e.arc.length().to_f64()).sum();
            assert!((total + table.residual - n.overlap(i).length().to_f64()).abs() < 1e-9);
            let t = n.domain.generator(i as isize - 1);
            for e in table.entries.iter().take(4) {
                assert!(e.arc.length().to_f64() > 0.0);
                let x = sample(&e.arc, &mut rng);
                let y = t.apply_boundary(&x);
                let meets = |r: usize| f_iter(&n, &x, r + 1, eps).dist(&f_iter(&n, &y, r, eps)) < 1e-6;
                assert!(meets(e.r), "{m:?} O{i} M_{}", e.ell);
                for earlier in table.entries.iter().take(e.ell - 1) {
                    assert!(!meets(earlier.r), "{m:?} O{i} M_{} meets early", e.ell);
                }
                let by_index = matching_index(&n, i, &x, 200, &tol).unwrap();
                assert_eq!(by_index, MatchIndex::Matched { ell: e.ell, anomalies: vec![] });
            }
        }
    }
}

#[test]
fn reference_fixed_point_matches_after_one_giant_step() {
    let tol = Tolerances::default();
    let n = net::<Mp>([6, 6, 3]);
    let a = hyperbolic_alpha(&n, &"4,4,2,2,3,1,4,4,1,4,4,4".parse().unwrap(), None, &tol).unwrap();
    assert_eq!(a.overlap, 4);
    let got = matching_index(&n, 4, &a.alpha, 200, &tol).unwrap();
    assert!(matches!(got, MatchIndex::Matched { ell: 1, .. }));
}

#[test]
fn base_transitions_follow_the_left_arc_ladder() {
    let tol = Tolerances::default();
    let n = net::<f64>([6, 6, 3]);
    let map = BoundaryMap::base(n.clone());
    let t = transition_matrix(&map, &n.w, &tol).unwrap();
    assert_eq!(t.matrix.size(), 16);
    // cells of P lying inside an arc
    let cells_in = |arc: &CircleArc<f64>| -> Vec<usize> {
        (0..n.w.len())
            .filter(|&k| arc.contains(&n.cells[k].midpoint(), 0.0))
            .collect()
    };
    for i in 1..=4usize {
        for r in 2..=n.n(i as isize) {
            let src = cells_in(&n.interval_l(i, r).unwrap());
            let dst = cells_in(&n.interval_l(rho(i), r - 1).unwrap());
            let mut image: Vec<usize> = src.iter().flat_map(|&c| t.matrix.row_indices(c)).collect();
            image.sort_unstable();
            image.dedup();
            assert_eq!(image, dst, "L_{r}(v{i})");
        }
    }
}

#[test]
fn plot_rows() {
    let n = net::<f64>([6, 6, 3]);
    let base = BoundaryMap::base(n.clone());
    let mut buf = Vec::new();
    base.write_plot_csv(&mut buf, 0).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x_angle,f_angle,branch_index,generator"));
    assert_eq!(lines.count(), 8);

    // the deformed plot differs from the base one exactly on the differing arc
    let alpha = n.overlap(4).midpoint();
    let def = BoundaryMap::deformed(n.clone(), alpha, 1e-9).unwrap();
    let d = def.deformation.clone().unwrap().arc;
    for s in 0..2000 {
        let x = CirclePoint::<f64>::from_f64(std::f64::consts::TAU * s as f64 / 2000.0);
        let (a, _) = base.eval(&x, 0.0);
        let (b, _) = def.eval(&x, 0.0);
        assert_eq!(a.dist(&b) > 1e-9, d.contains(&x, 0.0), "x = {x}");
    }
}
