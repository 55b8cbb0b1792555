use std::collections::BTreeMap;

use serde::Serialize;

use crate::config::{Caps, Tolerances};
use crate::dynamics::{BoundaryMap, OrbitStepper};
use crate::error::{Error, Result};
use crate::geometry::{CircleArc, CirclePoint, MoebiusMap};
use crate::real::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointOrigin {
    Base,
    AlphaOrbit,
    ImageOrbit,
}

/// The endpoint set of the deformed partition and the cells it cuts out.
#[derive(Clone, Debug)]
pub struct DeformedPartition<R> {
    pub w: Vec<CirclePoint<R>>,
    pub origin: Vec<PointOrigin>,
    pub cells: Vec<CircleArc<R>>,
}

impl<R: Real> DeformedPartition<R> {
    pub fn index_of(&self, p: &CirclePoint<R>, eps: f64) -> Option<usize> {
        crate::net::nearest_index(&self.w, p, eps)
    }
}

/// How a tracked orbit ended up in a finite set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitFate {
    /// Number of new points the orbit contributed.
    pub new_points: usize,
    pub closes_on: PointOrigin,
    /// Cycle length when the orbit closes on itself.
    pub period: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CapReason {
    MaxIter,
    MaxSize,
    /// Orbit error bound grew past the point where a closure could still be
    /// certified.
    PrecisionHorizon,
}

#[derive(Clone, Debug)]
pub enum MarkovVerdict<R> {
    Markov {
        partition: DeformedPartition<R>,
        fates: [OrbitFate; 2],
    },
    NotMarkovWithinCap {
        reason: CapReason,
        steps: usize,
    },
}

impl<R> MarkovVerdict<R> {
    pub fn is_markov(&self) -> bool {
        matches!(self, MarkovVerdict::Markov { .. })
    }
}

struct Known<R> {
    points: Vec<(CirclePoint<R>, f64, PointOrigin)>,
    buckets: BTreeMap<i64, Vec<usize>>,
    width: f64,
}

impl<R: Real> Known<R> {
    fn new(width: f64) -> Self {
        Known {
            points: Vec::new(),
            buckets: BTreeMap::new(),
            width,
        }
    }

    fn key(&self, p: &CirclePoint<R>) -> i64 {
        (p.to_f64() / self.width).floor() as i64
    }

    fn insert(&mut self, p: CirclePoint<R>, err: f64, origin: PointOrigin) -> usize {
        let k = self.key(&p);
        let id = self.points.len();
        self.points.push((p, err, origin));
        self.buckets.entry(k).or_default().push(id);
        id
    }

    /// Candidates within `width` of `p`, wrapping across angle zero.
    fn near(&self, p: &CirclePoint<R>) -> Vec<usize> {
        let k = self.key(p);
        let last = (std::f64::consts::TAU / self.width).floor() as i64;
        let mut keys = vec![k - 1, k, k + 1];
        if k <= 1 {
            keys.extend([last - 1, last]);
        }
        if k >= last - 1 {
            keys.extend([0, 1]);
        }
        keys.sort_unstable();
        keys.dedup();
        keys.iter()
            .filter_map(|k| self.buckets.get(k))
            .flatten()
            .copied()
            .filter(|&id| self.points[id].0.dist(p) <= self.width)
            .collect()
    }
}

enum Track {
    Closed(OrbitFate),
    Capped(CapReason, usize),
}

fn track<R: Real>(
    map: &BoundaryMap<R>,
    start: CirclePoint<R>,
    origin: PointOrigin,
    known: &mut Known<R>,
    caps: &Caps,
    tol: &Tolerances,
) -> Result<Track> {
    let confirm = tol.confirm::<R>();
    let mut st = OrbitStepper::new(map, start, tol, false);
    let mut letters: Vec<usize> = Vec::new();
    let mut own: Vec<(usize, usize)> = Vec::new(); // (known id, step)
    loop {
        let x = st.point().clone();
        let err = st.error_bound();
        for id in known.near(&x) {
            let (p, perr, porigin) = &known.points[id];
            if 16.0 * (err + perr) > confirm {
                continue;
            }
            if p.dist(&x) > confirm {
                continue;
            }
            let step = st.step_count();
            let period = own
                .iter()
                .find(|(kid, _)| *kid == id)
                .map(|&(_, j)| step - j);
            if let Some(per) = period {
                // the closing word must fix the point it returns to
                let j = step - per;
                let g = letters[j..step]
                    .iter()
                    .fold(MoebiusMap::identity(), |acc, &l| {
                        map.generator(l).compose(&acc)
                    });
                let res = g.fixed_point_residual(p);
                if res > confirm {
                    return Err(Error::Consistency(format!(
                        "orbit closes numerically after {per} steps but the closing word \
                         misses the point by {res:e}"
                    )));
                }
            }
            return Ok(Track::Closed(OrbitFate {
                new_points: own.len(),
                closes_on: if period.is_some() { origin } else { *porigin },
                period,
            }));
        }
        if 16.0 * err > confirm {
            return Ok(Track::Capped(CapReason::PrecisionHorizon, st.step_count()));
        }
        if st.step_count() >= caps.max_iter {
            return Ok(Track::Capped(CapReason::MaxIter, st.step_count()));
        }
        if known.points.len() >= caps.max_size {
            return Ok(Track::Capped(CapReason::MaxSize, st.step_count()));
        }
        let id = known.insert(x, err, origin);
        own.push((id, st.step_count()));
        letters.push(st.advance()?);
    }
}

/// Grows `W_α` by following the deformed orbits of `α` and `T_{i−1} α` until
/// both are certified to close up (Markov) or a cap is hit.
///
/// A candidate closure is any earlier point within `ε_cycle`. It counts only
/// when both propagated error bounds are far below `2^(-P/2)` and the points
/// agree to `2^(-P/2)`; a closure of an orbit onto itself is further checked
/// by evaluating the closing word's fixed-point equation.
pub fn markov_check<R: Real>(
    map: &BoundaryMap<R>,
    caps: &Caps,
    tol: &Tolerances,
) -> Result<MarkovVerdict<R>> {
    let def = map
        .deformation
        .as_ref()
        .ok_or_else(|| Error::Consistency("Markov check needs a deformed map".into()))?;
    let net = &map.net;
    let base_err = 2f64.powi(-(R::precision_bits() as i32) + 4);
    let mut known = Known::new(tol.cycle);
    for p in &net.w {
        known.insert(p.clone(), base_err, PointOrigin::Base);
    }
    let alpha = def.alpha.clone();
    let image = net
        .domain
        .generator(def.overlap as isize - 1)
        .apply_boundary(&alpha);
    let mut fates = Vec::new();
    let mut total = 0;
    for (start, origin) in [(alpha, PointOrigin::AlphaOrbit), (image, PointOrigin::ImageOrbit)] {
        match track(map, start, origin, &mut known, caps, tol)? {
            Track::Closed(f) => {
                total += f.new_points;
                fates.push(f);
            }
            Track::Capped(reason, steps) => {
                return Ok(MarkovVerdict::NotMarkovWithinCap {
                    reason,
                    steps: total + steps,
                })
            }
        }
    }
    let mut pts: Vec<(CirclePoint<R>, PointOrigin)> = known
        .points
        .into_iter()
        .map(|(p, _, o)| (p, o))
        .collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite angles"));
    let confirm = tol.confirm::<R>();
    let mut w: Vec<CirclePoint<R>> = Vec::with_capacity(pts.len());
    let mut origin = Vec::with_capacity(pts.len());
    for (p, o) in pts {
        if w.last().is_some_and(|q: &CirclePoint<R>| q.dist(&p) <= confirm) {
            continue;
        }
        w.push(p);
        origin.push(o);
    }
    if w.len() > 1 && w[0].dist(&w[w.len() - 1]) <= confirm {
        w.pop();
        origin.pop();
    }
    let cells = (0..w.len())
        .map(|k| CircleArc::new(w[k].clone(), w[(k + 1) % w.len()].clone()))
        .collect();
    let fates: [OrbitFate; 2] = fates
        .try_into()
        .map_err(|_| Error::Consistency("expected two orbit fates".into()))?;
    Ok(MarkovVerdict::Markov {
        partition: DeformedPartition { w, origin, cells },
        fates,
    })
}
