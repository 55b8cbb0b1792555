use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geometry::{CircleArc, CirclePoint, MoebiusMap};
use crate::group::{rho, wrap};
use crate::net::NetData;
use crate::real::Real;

use super::map::{f_eval, f_iter, BoundaryMap};
use super::orbit::orbit;

fn rho_pow(i: usize, k: usize) -> usize {
    (0..k).fold(i, |j, _| rho(j))
}

/// Vertex reached after the baby steps out of overlap `i`: `ρ^{n_i−1}(i)`.
pub fn theta<R: Real>(net: &NetData<R>, i: usize) -> usize {
    let i = wrap(i as isize);
    let n = net.n(i as isize);
    let t = rho_pow(i, n - 1);
    let closed = if i.is_multiple_of(2) || !n.is_multiple_of(2) { i } else { rho(i) };
    assert_eq!(t, closed, "theta closed form disagrees at i={i}, n={n}");
    t
}

/// `i_0, …, i_K` with `i_k = θ(i_{k−1}) + 1`.
pub fn index_sequence<R: Real>(net: &NetData<R>, i0: usize, k: usize) -> Result<Vec<usize>> {
    let mut seq = vec![wrap(i0 as isize)];
    for _ in 0..k {
        let last = *seq.last().expect("nonempty");
        seq.push(wrap(theta(net, last) as isize + 1));
    }
    for w in seq.windows(2) {
        if w[0] % 2 == w[1] % 2 {
            return Err(Error::Consistency(format!(
                "index sequence {seq:?} does not alternate parity"
            )));
        }
    }
    let period = if net.domain.signature.m()[2].is_multiple_of(2) { 2 } else { 4 };
    if seq.len() > period && (period..seq.len()).any(|k| seq[k] != seq[k - period]) {
        return Err(Error::Consistency(format!(
            "index sequence {seq:?} is not periodic with period {period}"
        )));
    }
    Ok(seq)
}

/// `T_{ρ^{n_i−2}(i)} ⋯ T_{ρ(i)} T_i`, which realizes `f^{n_i−1}` on
/// `L_{n_i}(v_i)`.
pub fn giant_step_map<R: Real>(net: &NetData<R>, i: usize) -> MoebiusMap<R> {
    let n = net.n(i as isize);
    (0..n - 1).fold(MoebiusMap::identity(), |acc, j| {
        net.domain.generator(rho_pow(i, j) as isize).compose(&acc)
    })
}

/// `T_{ρ^{n_i−1}(i)−1} ⋯ T_{ρ(i)−1}`, which realizes `f^{n_i−1}` on
/// `R_{n_i}(v_{ρ(i)})`.
pub fn right_giant_step_map<R: Real>(net: &NetData<R>, i: usize) -> MoebiusMap<R> {
    let n = net.n(i as isize);
    (1..n).fold(MoebiusMap::identity(), |acc, j| {
        net.domain
            .generator(rho_pow(i, j) as isize - 1)
            .compose(&acc)
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MatchEntry<R> {
    pub ell: usize,
    #[serde(skip)]
    pub arc: CircleArc<R>,
    /// Total number of baby steps `r_ℓ` before the matching step.
    pub r: usize,
}

/// The matching sets `M_1, M_2, …` tiling an overlap interval, left to right.
#[derive(Clone, Debug)]
pub struct MatchingTable<R> {
    pub overlap: usize,
    pub entries: Vec<MatchEntry<R>>,
    /// Length of the part of the overlap not yet assigned to a set.
    pub residual: f64,
    pub indices: Vec<usize>,
}

impl<R: Real> MatchingTable<R> {
    pub fn lookup(&self, x: &CirclePoint<R>, eps: f64) -> Option<&MatchEntry<R>> {
        self.entries.iter().find(|e| e.arc.contains(x, eps))
    }

    pub fn entry(&self, ell: usize) -> Option<&MatchEntry<R>> {
        self.entries.get(ell.checked_sub(1)?)
    }
}

/// Pulls the landing intervals back through successive giant steps.
///
/// Each giant step maps the still-unclassified right part of the overlap
/// homeomorphically onto some `L_1(v_θ)`; its left piece `A_θ` is the next
/// matching set, its right piece is the next overlap, which is split again.
pub fn matching_sets<R: Real>(
    net: &NetData<R>,
    i: usize,
    l_max: usize,
    residual_target: f64,
    tol: &Tolerances,
) -> Result<MatchingTable<R>> {
    let i = wrap(i as isize);
    let o = net.overlap(i);
    let right = o.right.clone();
    let mut entries = Vec::new();
    let mut composite = MoebiusMap::identity();
    let mut idx = i;
    let mut indices = vec![i];
    let mut u = o.left.clone();
    let mut r = 0usize;
    let mut residual = o.length().to_f64();
    // below this the next cut point is lost in rounding
    let floor = R::half_precision_eps();
    for ell in 1..=l_max.max(1) {
        if ell > 1 && residual < floor {
            break;
        }
        composite = giant_step_map(net, idx).compose(&composite);
        r += net.n(idx as isize) - 1;
        let next = wrap(theta(net, idx) as isize + 1);
        let target = net.a(next as isize, net.n(next as isize) as isize);
        let u_next = composite.inverse().apply_boundary(target);
        let done = u.ccw_to(&u_next).to_f64();
        let left_over = u_next.ccw_to(&right).to_f64();
        if done <= 0.0 || done + left_over > residual + tol.point {
            return Err(Error::Consistency(format!(
                "matching set {ell} of overlap {i} is empty or leaves the overlap"
            )));
        }
        entries.push(MatchEntry {
            ell,
            arc: CircleArc::new(u.clone(), u_next.clone()),
            r,
        });
        u = u_next;
        residual = left_over;
        idx = next;
        indices.push(idx);
        if residual < residual_target {
            break;
        }
    }
    Ok(MatchingTable {
        overlap: i,
        entries,
        residual,
        indices,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum MatchIndex {
    /// First `ℓ` with `f(x_ℓ) = y_ℓ`; `anomalies` lists the `k < ℓ` at which
    /// `y_k` was not where the index sequence predicts.
    Matched { ell: usize, anomalies: Vec<usize> },
    Unresolved,
}

/// Direct-iteration oracle for the matching index of `x ∈ O_i`.
pub fn matching_index<R: Real>(
    net: &NetData<R>,
    i: usize,
    x: &CirclePoint<R>,
    cap: usize,
    tol: &Tolerances,
) -> Result<MatchIndex> {
    let eps = tol.branch::<R>();
    let i = wrap(i as isize);
    if !net.overlap(i).contains(x, eps) {
        return Err(Error::AlphaOutsideOverlap(x.to_f64()));
    }
    let eps_match = tol.matching::<R>();
    let mut xk = x.clone();
    let mut yk = net.domain.generator(i as isize - 1).apply_boundary(x);
    let mut idx = i;
    let mut anomalies = Vec::new();
    for ell in 1..=cap {
        let expected = net.interval_r(rho(idx), net.n(idx as isize))?;
        if !expected.contains(&yk, eps) {
            anomalies.push(ell - 1);
        }
        let steps = net.n(idx as isize) - 1;
        xk = f_iter(net, &xk, steps, eps);
        yk = f_iter(net, &yk, steps, eps);
        if f_eval(net, &xk, eps).0.dist(&yk) <= eps_match {
            return Ok(MatchIndex::Matched { ell, anomalies });
        }
        idx = wrap(theta(net, idx) as isize + 1);
    }
    Ok(MatchIndex::Unresolved)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CollisionEvent {
    /// Step at which the deformed orbit entered the differing interval.
    pub j: usize,
    pub ell: Option<usize>,
    /// Which of `f_α^{r+1}(z)`, `f(f_α^r(z))`, `f²(f_α^{r−1}(z))` equals
    /// `f^{r+1}(z)`; `None` is an anomaly.
    pub form: Option<u8>,
}

/// For each entry `z` of the deformed orbit of `x` into the differing
/// interval, tests which collision form reproduces `f^{r+1}(z)`.
pub fn collision_audit<R: Real>(
    map: &BoundaryMap<R>,
    x: &CirclePoint<R>,
    steps: usize,
    l_max: usize,
    tol: &Tolerances,
) -> Result<Vec<CollisionEvent>> {
    let def = map
        .deformation
        .as_ref()
        .ok_or_else(|| Error::Consistency("collision audit needs a deformed map".into()))?;
    let net = map.net.as_ref();
    let eps = tol.branch::<R>();
    let eps_match = tol.matching::<R>();
    let table = matching_sets(net, def.overlap, l_max, tol.matching::<R>(), tol)?;
    let rec = orbit(map, x, steps, tol)?;
    let mut events = Vec::new();
    for (j, z) in rec.points.iter().enumerate() {
        if !def.arc.contains(z, eps) {
            continue;
        }
        let ell = match matching_index(net, def.overlap, z, l_max, tol)? {
            MatchIndex::Matched { ell, .. } => ell,
            MatchIndex::Unresolved => {
                events.push(CollisionEvent {
                    j,
                    ell: None,
                    form: None,
                });
                continue;
            }
        };
        let r = table
            .entry(ell)
            .map(|e| e.r)
            .ok_or_else(|| Error::Consistency(format!("no matching set {ell}")))?;
        let target = f_iter(net, z, r + 1, eps);
        let deformed = orbit(map, z, r + 1, tol)?.points;
        let forms = [
            Some(deformed[r + 1].clone()),
            Some(f_iter(net, &deformed[r], 1, eps)),
            r.checked_sub(1).map(|s| f_iter(net, &deformed[s], 2, eps)),
        ];
        let form = forms
            .iter()
            .position(|c| c.as_ref().is_some_and(|c| c.dist(&target) <= eps_match))
            .map(|k| k as u8 + 1);
        events.push(CollisionEvent {
            j,
            ell: Some(ell),
            form,
        });
    }
    Ok(events)
}
