use std::io::Write;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{CircleArc, CirclePoint, MoebiusMap};
use crate::group::wrap;
use crate::net::NetData;
use crate::real::Real;

/// One piece of a boundary map: points of `arc` are moved by `T_generator`.
#[derive(Clone, Debug)]
pub struct Branch<R> {
    pub arc: CircleArc<R>,
    pub generator: usize,
}

/// The part of a deformed map that differs from the base map: on
/// `arc = [a_i^{n_i}, alpha)` the generator is `T_{i−1}` instead of `T_i`.
#[derive(Clone, Debug)]
pub struct Deformation<R> {
    pub overlap: usize,
    pub alpha: CirclePoint<R>,
    pub arc: CircleArc<R>,
}

/// Piecewise-Möbius circle map given by a branch table whose arcs partition
/// the circle.
#[derive(Clone, Debug)]
pub struct BoundaryMap<R> {
    pub net: Arc<NetData<R>>,
    pub branches: Vec<Branch<R>>,
    pub deformation: Option<Deformation<R>>,
}

impl<R: Real> BoundaryMap<R> {
    /// The undeformed map: `T_{i−1}` on `[a_i^1, a_i^{n_i})`.
    pub fn base(net: Arc<NetData<R>>) -> Self {
        let branches = (1..=4)
            .map(|i| Branch {
                arc: net.branch_arc(i),
                generator: wrap(i as isize - 1),
            })
            .collect();
        BoundaryMap {
            net,
            branches,
            deformation: None,
        }
    }

    /// Deformation by `alpha`, which must lie in one of the overlap
    /// intervals.
    pub fn deformed(net: Arc<NetData<R>>, alpha: CirclePoint<R>, eps: f64) -> Result<Self> {
        let i = *net
            .overlaps_containing(&alpha, eps)
            .first()
            .ok_or_else(|| Error::AlphaOutsideOverlap(alpha.to_f64()))?;
        let mut map = Self::base(net.clone());
        // the overlap sits at the left end of branch i+1; its start is taken
        // from the branch table so the split stays an exact partition
        let approx = net.overlap(i).left;
        let k = map
            .branches
            .iter()
            .position(|b| b.arc.left.approx_eq(&approx, eps.max(R::half_precision_eps())))
            .ok_or_else(|| Error::Consistency("overlap start is not a branch cut".into()))?;
        let start = map.branches[k].arc.left.clone();
        if alpha.approx_eq(&start, eps) {
            map.deformation = Some(Deformation {
                overlap: i,
                alpha: start.clone(),
                arc: CircleArc::empty_at(start),
            });
            return Ok(map);
        }
        let old = map.branches.remove(k);
        let d = CircleArc::new(start, alpha.clone());
        map.branches.insert(
            k,
            Branch {
                arc: CircleArc::new(alpha.clone(), old.arc.right.clone()),
                generator: old.generator,
            },
        );
        map.branches.insert(
            k,
            Branch {
                arc: d.clone(),
                generator: wrap(i as isize - 1),
            },
        );
        map.deformation = Some(Deformation {
            overlap: i,
            alpha,
            arc: d,
        });
        Ok(map)
    }

    pub fn is_deformed(&self) -> bool {
        self.deformation
            .as_ref()
            .is_some_and(|d| !d.arc.empty)
    }

    pub fn generator(&self, i: usize) -> &MoebiusMap<R> {
        self.net.domain.generator(i as isize)
    }

    /// Index into `branches` of the piece containing `x`.
    pub fn branch_index(&self, x: &CirclePoint<R>, eps: f64) -> usize {
        self.branches
            .iter()
            .position(|b| b.arc.contains(x, eps))
            .unwrap_or_else(|| self.nearest_cut_behind(x))
    }

    fn nearest_cut_behind(&self, x: &CirclePoint<R>) -> usize {
        (0..self.branches.len())
            .min_by(|&a, &b| {
                let da = self.branches[a].arc.left.ccw_to(x);
                let db = self.branches[b].arc.left.ccw_to(x);
                da.partial_cmp(&db).expect("finite angles")
            })
            .unwrap_or(0)
    }

    /// Left endpoints of the branch arcs.
    pub fn cuts(&self) -> impl Iterator<Item = &CirclePoint<R>> {
        self.branches.iter().map(|b| &b.arc.left)
    }

    /// Image of `x` and the generator used.
    pub fn eval(&self, x: &CirclePoint<R>, eps: f64) -> (CirclePoint<R>, usize) {
        let g = self.branches[self.branch_index(x, eps)].generator;
        (self.generator(g).apply_boundary(x), g)
    }

    /// Generator used just to the left of `x`.
    pub fn generator_left_of(&self, x: &CirclePoint<R>, eps: f64) -> usize {
        let k = self.branch_index(x, eps);
        if self.branches[k].arc.left.approx_eq(x, eps) {
            let n = self.branches.len();
            self.branches[(k + n - 1) % n].generator
        } else {
            self.branches[k].generator
        }
    }

    /// Writes `x_angle,f_angle,branch_index,generator` rows: `samples`
    /// uniform points plus both one-sided values at every branch cut.
    pub fn write_plot_csv<W: Write>(&self, out: W, samples: usize) -> Result<()> {
        let eps = 0.0;
        let mut rows: Vec<(f64, f64, usize, usize)> = Vec::new();
        let tau = std::f64::consts::TAU;
        for s in 0..samples {
            let x = CirclePoint::<R>::from_f64(tau * s as f64 / samples as f64);
            let k = self.branch_index(&x, eps);
            let g = self.branches[k].generator;
            let y = self.generator(g).apply_boundary(&x);
            rows.push((x.to_f64(), y.to_f64(), k + 1, g));
        }
        let n = self.branches.len();
        for (k, b) in self.branches.iter().enumerate() {
            let x = &b.arc.left;
            let prev = (k + n - 1) % n;
            for kk in [prev, k] {
                let g = self.branches[kk].generator;
                let y = self.generator(g).apply_boundary(x);
                rows.push((x.to_f64(), y.to_f64(), kk + 1, g));
            }
        }
        rows.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite angles"));
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x_angle", "f_angle", "branch_index", "generator"])?;
        for (x, y, k, g) in rows {
            w.write_record([
                format!("{x:.16e}"),
                format!("{y:.16e}"),
                k.to_string(),
                g.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// One application of the base map: `(T_{i−1}(x), i−1)` where
/// `x ∈ [a_i^1, a_i^{n_i})`.
pub fn f_eval<R: Real>(net: &NetData<R>, x: &CirclePoint<R>, eps: f64) -> (CirclePoint<R>, usize) {
    let i = net.branch_of(x, eps);
    let g = wrap(i as isize - 1);
    (net.domain.generator(g as isize).apply_boundary(x), g)
}

/// `f^k(x)` under the base map.
pub fn f_iter<R: Real>(net: &NetData<R>, x: &CirclePoint<R>, k: usize, eps: f64) -> CirclePoint<R> {
    let mut p = x.clone();
    for _ in 0..k {
        p = f_eval(net, &p, eps).0;
    }
    p
}

pub fn deformed_map<R: Real>(
    net: Arc<NetData<R>>,
    alpha: CirclePoint<R>,
    eps: f64,
) -> Result<BoundaryMap<R>> {
    BoundaryMap::deformed(net, alpha, eps)
}
