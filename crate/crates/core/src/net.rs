//! Vertex fans, the global endpoint set and the partition of the circle it
//! cuts out, plus the named interval families built from fan endpoints.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geometry::{geodesic_between, CircleArc, CirclePoint, Geodesic, MoebiusMap};
use crate::group::{wrap, DomainJson, FundamentalDomain};
use crate::real::Real;

/// The geodesics through one vertex that belong to the net, recorded by their
/// `2 n_i` ideal endpoints in counter-clockwise order from `a_i^1`.
#[derive(Clone, Debug)]
pub struct VertexFan<R> {
    pub vertex: usize,
    pub stabilizer: MoebiusMap<R>,
    pub endpoints: Vec<CirclePoint<R>>,
}

impl<R: Real> VertexFan<R> {
    pub fn n(&self) -> usize {
        self.endpoints.len() / 2
    }

    /// `a_i^k`, with `k` read cyclically modulo `2 n_i`.
    pub fn a(&self, k: isize) -> &CirclePoint<R> {
        let len = self.endpoints.len() as isize;
        &self.endpoints[(k - 1).rem_euclid(len) as usize]
    }
}

#[derive(Clone, Debug)]
pub struct NetData<R> {
    pub domain: FundamentalDomain<R>,
    pub fans: [VertexFan<R>; 4],
    /// Distinct fan endpoints in counter-clockwise order from angle 0.
    pub w: Vec<CirclePoint<R>>,
    /// Arcs between consecutive points of `w`.
    pub cells: Vec<CircleArc<R>>,
}

fn stabilizer<R: Real>(fd: &FundamentalDomain<R>, i: usize) -> MoebiusMap<R> {
    match i {
        1 => fd.generator(2).compose(fd.generator(4)),
        2 => fd.generator(2).clone(),
        3 => fd.generator(4).compose(fd.generator(2)),
        _ => fd.generator(4).clone(),
    }
}

fn build_fan<R: Real>(
    fd: &FundamentalDomain<R>,
    i: usize,
    tol: &Tolerances,
) -> Result<VertexFan<R>> {
    let ii = i as isize;
    let left_side = geodesic_between(fd.vertex(ii - 1), fd.vertex(ii), tol)?;
    let right_side = geodesic_between(fd.vertex(ii), fd.vertex(ii + 1), tol)?;
    let stab = stabilizer(fd, i);
    let order = 2 * fd.signature.m().into_iter().max().unwrap_or(2) as usize;

    let mut fan: Vec<Geodesic<R>> = Vec::new();
    for seed in [left_side.clone(), right_side] {
        let mut g = seed;
        for _ in 0..order {
            if !fan.iter().any(|h| h.same_as(&g, tol.point)) {
                fan.push(g.clone());
            }
            g = g.image(&stab);
        }
    }
    let expected = fd.exponent(ii);
    if fan.len() != expected {
        return Err(Error::FanCountMismatch {
            vertex: i,
            expected,
            found: fan.len(),
        });
    }

    let start = left_side.ends.0.clone();
    let mut endpoints: Vec<CirclePoint<R>> = fan
        .into_iter()
        .flat_map(|g| [g.ends.0, g.ends.1])
        .collect();
    endpoints.sort_by(|p, q| {
        start
            .ccw_to(p)
            .partial_cmp(&start.ccw_to(q))
            .expect("finite angles")
    });
    // the sort key of a_i^1 itself may round to just under 2π
    if let Some(pos) = endpoints.iter().position(|p| p.approx_eq(&start, tol.point)) {
        endpoints.rotate_left(pos);
    }
    endpoints[0] = start;

    let fan = VertexFan {
        vertex: i,
        stabilizer: stab,
        endpoints,
    };
    if !fan
        .a(expected as isize + 1)
        .approx_eq(&left_side.ends.1, tol.point)
    {
        return Err(Error::GluingFailure(format!(
            "vertex {i}: a^(n+1) is not the far end of the left side"
        )));
    }
    Ok(fan)
}

/// Builds all four fans, the endpoint set and the partition, asserting the
/// identities that glue consecutive fans together.
pub fn build_net<R: Real>(fd: &FundamentalDomain<R>, tol: &Tolerances) -> Result<NetData<R>> {
    let fans = [
        build_fan(fd, 1, tol)?,
        build_fan(fd, 2, tol)?,
        build_fan(fd, 3, tol)?,
        build_fan(fd, 4, tol)?,
    ];
    for i in 0..4 {
        let (f, g) = (&fans[i], &fans[(i + 1) % 4]);
        let n = f.n() as isize;
        let m = g.n() as isize;
        if !f.a(n).approx_eq(g.a(1), tol.point) {
            return Err(Error::GluingFailure(format!(
                "a_{}^{} != a_{}^1",
                i + 1,
                n,
                wrap(i as isize + 2)
            )));
        }
        if !f.a(2 * n).approx_eq(g.a(m + 1), tol.point) {
            return Err(Error::GluingFailure(format!(
                "a_{}^{} != a_{}^{}",
                i + 1,
                2 * n,
                wrap(i as isize + 2),
                m + 1
            )));
        }
    }

    let mut w: Vec<CirclePoint<R>> = Vec::new();
    for fan in &fans {
        for p in &fan.endpoints {
            if !w.iter().any(|q| q.approx_eq(p, tol.point)) {
                w.push(p.clone());
            }
        }
    }
    w.sort_by(|p, q| p.partial_cmp(q).expect("finite angles"));
    let expected: usize = fans.iter().map(|f| 2 * f.n()).sum::<usize>() - 8;
    if w.len() != expected {
        return Err(Error::GluingFailure(format!(
            "endpoint set has {} points, expected {expected}",
            w.len()
        )));
    }
    let cells = (0..w.len())
        .map(|k| CircleArc::new(w[k].clone(), w[(k + 1) % w.len()].clone()))
        .collect();

    let net = NetData {
        domain: fd.clone(),
        fans,
        w,
        cells,
    };
    for i in 1..=4 {
        let o_next = net.overlap(i + 1);
        if !net.interval_l(i, 1)?.contains_arc(&o_next, tol.point) {
            return Err(Error::GluingFailure(format!(
                "overlap {} is not inside L_1(v_{i})",
                wrap(i as isize + 1)
            )));
        }
    }
    Ok(net)
}

impl<R: Real> NetData<R> {
    pub fn fan(&self, i: isize) -> &VertexFan<R> {
        &self.fans[wrap(i) - 1]
    }

    pub fn n(&self, i: isize) -> usize {
        self.fan(i).n()
    }

    /// `a_i^k`, both indices cyclic.
    pub fn a(&self, i: isize, k: isize) -> &CirclePoint<R> {
        self.fan(i).a(k)
    }

    fn check_index(&self, i: usize, j: usize) -> Result<usize> {
        let n = self.n(i as isize);
        if j == 0 || j > n {
            return Err(Error::IndexOutOfRange { index: j, max: n });
        }
        Ok(n)
    }

    /// `L_j(v_i) = [a_i^{2n_i−j}, a_i^{2n_i−j+1})`.
    pub fn interval_l(&self, i: usize, j: usize) -> Result<CircleArc<R>> {
        let n = self.check_index(i, j)? as isize;
        let (i, j) = (i as isize, j as isize);
        Ok(CircleArc::new(
            self.a(i, 2 * n - j).clone(),
            self.a(i, 2 * n - j + 1).clone(),
        ))
    }

    /// `R_j(v_i) = [a_i^{j−1}, a_i^j)`, where `a_i^0` means `a_i^{2n_i}`.
    pub fn interval_r(&self, i: usize, j: usize) -> Result<CircleArc<R>> {
        self.check_index(i, j)?;
        let (i, j) = (i as isize, j as isize);
        Ok(CircleArc::new(self.a(i, j - 1).clone(), self.a(i, j).clone()))
    }

    /// Overlap interval `[a_i^{n_i}, a_i^{n_i+1})`.
    pub fn overlap(&self, i: usize) -> CircleArc<R> {
        let i = wrap(i as isize) as isize;
        let n = self.n(i) as isize;
        CircleArc::new(self.a(i, n).clone(), self.a(i, n + 1).clone())
    }

    /// The part of `L_1(v_i)` left of the next overlap interval.
    pub fn a_region(&self, i: usize) -> CircleArc<R> {
        let i = wrap(i as isize) as isize;
        let n = self.n(i) as isize;
        let m = self.n(i + 1) as isize;
        CircleArc::new(self.a(i, 2 * n - 1).clone(), self.a(i + 1, m).clone())
    }

    /// Domain arc `[a_i^1, a_i^{n_i})` of the `i`-th branch. The right end is
    /// stored as `a_{i+1}^1` so the four arcs share endpoints exactly.
    pub fn branch_arc(&self, i: usize) -> CircleArc<R> {
        let i = wrap(i as isize) as isize;
        CircleArc::new(self.a(i, 1).clone(), self.a(i + 1, 1).clone())
    }

    /// The unique `i` with `x ∈ [a_i^1, a_i^{n_i})`.
    pub fn branch_of(&self, x: &CirclePoint<R>, eps: f64) -> usize {
        (1..=4)
            .find(|&i| self.branch_arc(i).contains(x, eps))
            .unwrap_or_else(|| {
                // only reachable through rounding in the shifted comparison;
                // fall back to the arc whose left end is nearest behind x
                (1..=4)
                    .min_by(|&i, &j| {
                        let di = self.a(i as isize, 1).ccw_to(x);
                        let dj = self.a(j as isize, 1).ccw_to(x);
                        di.partial_cmp(&dj).expect("finite angles")
                    })
                    .unwrap_or(1)
            })
    }

    /// Index of the point of `w` within `eps` of `p`.
    pub fn w_index(&self, p: &CirclePoint<R>, eps: f64) -> Option<usize> {
        nearest_index(&self.w, p, eps)
    }

    /// Overlap intervals containing `x`, in increasing index order.
    pub fn overlaps_containing(&self, x: &CirclePoint<R>, eps: f64) -> Vec<usize> {
        (1..=4).filter(|&i| self.overlap(i).contains(x, eps)).collect()
    }

    pub fn to_json(&self) -> NetJson {
        let endpoints = self
            .fans
            .iter()
            .map(|f| {
                (
                    f.vertex.to_string(),
                    f.endpoints.iter().map(CirclePoint::to_f64).collect(),
                )
            })
            .collect();
        NetJson {
            domain: self.domain.to_json(),
            endpoints,
            w: self.w.iter().map(CirclePoint::to_f64).collect(),
            cells: self.cells.iter().map(|c| [c.left.to_f64(), c.right.to_f64()]).collect(),
        }
    }
}

/// Position of the point of a sorted circle-point list within `eps` of `p`.
pub fn nearest_index<R: Real>(sorted: &[CirclePoint<R>], p: &CirclePoint<R>, eps: f64) -> Option<usize> {
    if sorted.is_empty() {
        return None;
    }
    let pos = sorted.partition_point(|q| q < p);
    let len = sorted.len();
    [pos % len, (pos + len - 1) % len]
        .into_iter()
        .min_by(|&a, &b| {
            sorted[a]
                .dist(p)
                .partial_cmp(&sorted[b].dist(p))
                .expect("finite distances")
        })
        .filter(|&k| sorted[k].dist(p) <= eps)
}

/// Domain JSON with the net appended.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NetJson {
    #[serde(flatten)]
    pub domain: DomainJson,
    pub endpoints: BTreeMap<String, Vec<f64>>,
    #[serde(rename = "W")]
    pub w: Vec<f64>,
    pub cells: Vec<[f64; 2]>,
}
