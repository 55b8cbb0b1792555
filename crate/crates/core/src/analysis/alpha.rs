use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geometry::CirclePoint;
use crate::group::GroupWord;
use crate::net::NetData;
use crate::real::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FixedPointRole {
    Attracting,
    Repelling,
}

#[derive(Clone, Debug)]
pub struct ResolvedAlpha<R> {
    pub alpha: CirclePoint<R>,
    pub overlap: usize,
    pub role: Option<FixedPointRole>,
}

/// The fixed point of the word's map that lies in an overlap interval.
///
/// When both fixed points qualify, `select` names the overlap to use;
/// without it the call fails with [`Error::AmbiguousAlpha`].
pub fn hyperbolic_alpha<R: Real>(
    net: &NetData<R>,
    word: &GroupWord,
    select: Option<usize>,
    tol: &Tolerances,
) -> Result<ResolvedAlpha<R>> {
    let m = net.domain.word_to_map(word);
    let (att, rep) = m.fixed_points_on_circle(tol)?;
    let eps = tol.branch::<R>();
    let mut hits = Vec::new();
    for (p, role) in [(att, FixedPointRole::Attracting), (rep, FixedPointRole::Repelling)] {
        if let Some(&i) = net.overlaps_containing(&p, eps).first() {
            hits.push(ResolvedAlpha {
                alpha: p,
                overlap: i,
                role: Some(role),
            });
        }
    }
    match (hits.len(), select) {
        (0, _) => Err(Error::NoFixedPointInOverlap),
        (1, None) => Ok(hits.remove(0)),
        (_, Some(i)) => hits
            .into_iter()
            .find(|h| h.overlap == i)
            .ok_or(Error::NoFixedPointInOverlap),
        (_, None) => Err(Error::AmbiguousAlpha([hits[0].overlap, hits[1].overlap])),
    }
}

/// An explicit angle, which must lie in an overlap interval.
pub fn alpha_from_angle<R: Real>(
    net: &NetData<R>,
    angle: R,
    tol: &Tolerances,
) -> Result<ResolvedAlpha<R>> {
    let alpha = CirclePoint::new(angle);
    let eps = tol.branch::<R>();
    // the left end of an overlap is often given as a rounded decimal
    let snapped = (1..=4)
        .map(|i| net.overlap(i).left)
        .find(|p| p.approx_eq(&alpha, tol.point));
    let alpha = snapped.unwrap_or(alpha);
    let overlap = *net
        .overlaps_containing(&alpha, eps)
        .first()
        .ok_or_else(|| Error::AlphaOutsideOverlap(alpha.to_f64()))?;
    Ok(ResolvedAlpha {
        alpha,
        overlap,
        role: None,
    })
}
