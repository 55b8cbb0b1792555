use serde::Serialize;

use crate::config::Tolerances;
use crate::dynamics::{f_iter, BoundaryMap};
use crate::geometry::{CircleArc, CirclePoint};
use crate::net::NetData;
use crate::real::Real;

/// Which clause of the surjectivity criterion decided the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurjectivityReason {
    LongFan,
    OppositeLongFan,
    FirstMatchingSet,
    None,
}

/// Closed-form surjectivity test for `f_α` with `α ∈ O_i`: the fan at `v_i`
/// has more than two geodesics, or it has exactly two and the opposite fan
/// has more, or `α` lies in the closure of `M_1`.
pub fn surjectivity_predicate<R: Real>(
    net: &NetData<R>,
    i: usize,
    alpha: &CirclePoint<R>,
    m1: &CircleArc<R>,
    tol: &Tolerances,
) -> (bool, SurjectivityReason) {
    let ni = net.n(i as isize);
    let opposite = net.n(i as isize + 2);
    if ni > 2 {
        return (true, SurjectivityReason::LongFan);
    }
    if ni == 2 && opposite > 2 {
        return (true, SurjectivityReason::OppositeLongFan);
    }
    let in_closure = m1.contains(alpha, tol.branch::<R>()) || m1.right.approx_eq(alpha, tol.point);
    if in_closure {
        (true, SurjectivityReason::FirstMatchingSet)
    } else {
        (false, SurjectivityReason::None)
    }
}

/// Whether `f^{n_i}(x) = f^{n_i−1}(T_{i−1} x)`: the defining property of the
/// first matching set, tested directly.
pub fn first_match_condition<R: Real>(
    net: &NetData<R>,
    i: usize,
    x: &CirclePoint<R>,
    tol: &Tolerances,
) -> bool {
    let eps = tol.branch::<R>();
    let n = net.n(i as isize);
    let lhs = f_iter(net, x, n, eps);
    let y = net.domain.generator(i as isize - 1).apply_boundary(x);
    let rhs = f_iter(net, &y, n - 1, eps);
    lhs.dist(&rhs) <= tol.matching::<R>()
}

#[derive(Clone, Debug)]
pub struct Coverage<R> {
    pub surjective: bool,
    /// Uncovered arcs, empty when surjective.
    pub gaps: Vec<CircleArc<R>>,
}

/// Union of the branch images, computed from endpoint images only.
///
/// A cover of the circle by left-closed arcs misses something exactly when
/// the right end of some image arc is contained in no image arc, so only
/// those points need testing; each failing one starts a gap that runs to the
/// nearest image left endpoint ahead of it.
pub fn surjectivity_empirical<R: Real>(map: &BoundaryMap<R>, tol: &Tolerances) -> Coverage<R> {
    let images: Vec<CircleArc<R>> = map
        .branches
        .iter()
        .filter(|b| !b.arc.empty)
        .map(|b| {
            let t = map.generator(b.generator);
            let img = CircleArc::new(t.apply_boundary(&b.arc.left), t.apply_boundary(&b.arc.right));
            // an image close to a full turn has coinciding ends; the ends
            // themselves only coincide when the source arc is the whole circle
            if img.left == img.right && b.arc.length().to_f64() < std::f64::consts::PI {
                CircleArc::empty_at(img.left)
            } else {
                img
            }
        })
        .collect();
    let eps = tol.point;
    let mut gaps = Vec::new();
    for img in images.iter().filter(|a| !a.empty) {
        let r = &img.right;
        if images.iter().any(|a| a.contains(r, eps)) {
            continue;
        }
        let end = images
            .iter()
            .filter(|a| !a.empty)
            .map(|a| &a.left)
            .min_by(|p, q| {
                r.ccw_to(p)
                    .partial_cmp(&r.ccw_to(q))
                    .expect("finite angles")
            })
            .expect("at least one image");
        if r.ccw_to(end).to_f64() > eps {
            gaps.push(CircleArc::new(r.clone(), end.clone()));
        }
    }
    Coverage {
        surjective: gaps.is_empty(),
        gaps,
    }
}
