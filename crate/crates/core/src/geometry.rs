//! Hyperbolic geometry in the Poincaré disk: isometries, circle points and
//! arcs, geodesics and isometric circles.

use std::fmt;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::real::{Cx, Real};

/// Point of the unit circle, stored as an angle in `[0, 2π)`.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct CirclePoint<R> {
    angle: R,
}

impl<R: Real> CirclePoint<R> {
    pub fn new(angle: R) -> Self {
        CirclePoint {
            angle: angle.rem_tau(),
        }
    }

    pub fn from_f64(angle: f64) -> Self {
        CirclePoint::new(R::from_f64(angle))
    }

    pub fn angle(&self) -> &R {
        &self.angle
    }

    pub fn to_f64(&self) -> f64 {
        self.angle.to_f64()
    }

    pub fn to_complex(&self) -> Cx<R> {
        Cx::unit(&self.angle)
    }

    pub fn convert<S: Real>(&self) -> CirclePoint<S> {
        CirclePoint::new(S::from_f64(self.to_f64()))
    }

    /// Counter-clockwise angular offset from `self` to `other`, in `[0, 2π)`.
    pub fn ccw_to(&self, other: &Self) -> R {
        (other.angle.clone() - self.angle.clone()).rem_tau()
    }

    /// Unsigned angular distance, in `[0, π]`.
    pub fn dist(&self, other: &Self) -> f64 {
        let d = self.ccw_to(other).to_f64();
        d.min(std::f64::consts::TAU - d)
    }

    pub fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        self.dist(other) <= eps
    }

    /// The point `delta` radians counter-clockwise from `self`.
    pub fn rotated(&self, delta: &R) -> Self {
        CirclePoint::new(self.angle.clone() + delta.clone())
    }
}

impl<R: Real> fmt::Display for CirclePoint<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.16e}", self.to_f64())
    }
}

/// Left-closed, right-open arc traversed counter-clockwise.
///
/// `left == right` denotes the whole circle unless the arc is flagged empty.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleArc<R> {
    pub left: CirclePoint<R>,
    pub right: CirclePoint<R>,
    pub empty: bool,
}

impl<R: Real> CircleArc<R> {
    pub fn new(left: CirclePoint<R>, right: CirclePoint<R>) -> Self {
        CircleArc {
            left,
            right,
            empty: false,
        }
    }

    pub fn empty_at(p: CirclePoint<R>) -> Self {
        CircleArc {
            left: p.clone(),
            right: p,
            empty: true,
        }
    }

    pub fn from_f64(left: f64, right: f64) -> Self {
        CircleArc::new(CirclePoint::from_f64(left), CirclePoint::from_f64(right))
    }

    /// Length in `(0, 2π]`, or zero for an empty arc.
    pub fn length(&self) -> R {
        if self.empty {
            return R::zero();
        }
        let d = self.left.ccw_to(&self.right);
        if d == R::zero() {
            R::tau()
        } else {
            d
        }
    }

    /// Membership in `[left − eps, right − eps)`. Shifting both ends by the
    /// same grace keeps a partition into adjacent arcs exact: every point
    /// lands in exactly one piece.
    pub fn contains(&self, p: &CirclePoint<R>, eps: f64) -> bool {
        if self.empty {
            return false;
        }
        let shifted = (p.angle.clone() - self.left.angle.clone() + R::from_f64(eps)).rem_tau();
        shifted < self.length()
    }

    /// Whether `other` lies inside `self`, both endpoints compared with
    /// `eps` grace.
    pub fn contains_arc(&self, other: &CircleArc<R>, eps: f64) -> bool {
        if other.empty {
            return self.contains(&other.left, eps);
        }
        let start = self.left.ccw_to(&other.left).to_f64();
        let start = if start > std::f64::consts::TAU - eps {
            0.0
        } else {
            start
        };
        start + other.length().to_f64() <= self.length().to_f64() + eps
    }

    pub fn midpoint(&self) -> CirclePoint<R> {
        self.left.rotated(&(self.length() / R::from_f64(2.0)))
    }

    /// Point at fraction `t` of the way from `left` to `right`.
    pub fn at_fraction(&self, t: f64) -> CirclePoint<R> {
        self.left.rotated(&(self.length() * R::from_f64(t)))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.left.to_f64(), self.right.to_f64())
    }
}

/// `p ∈ [left, right)` with `eps` grace at the left endpoint.
pub fn arc_contains<R: Real>(arc: &CircleArc<R>, p: &CirclePoint<R>, eps: f64) -> bool {
    arc.contains(p, eps)
}

/// Point of the open unit disk.
#[derive(Clone, Debug, PartialEq)]
pub struct DiskPoint<R> {
    z: Cx<R>,
}

impl<R: Real> DiskPoint<R> {
    pub fn new(z: Cx<R>) -> Result<Self> {
        if z.norm_sqr() < R::one() {
            Ok(DiskPoint { z })
        } else {
            Err(Error::OutsideDisk)
        }
    }

    pub fn from_f64(re: f64, im: f64) -> Result<Self> {
        DiskPoint::new(Cx::from_f64(re, im))
    }

    pub fn origin() -> Self {
        DiskPoint { z: Cx::zero() }
    }

    pub fn z(&self) -> &Cx<R> {
        &self.z
    }

    /// `cosh` of the hyperbolic distance (curvature −1).
    pub fn cosh_distance(&self, other: &Self) -> R {
        let num = (self.z.clone() - other.z.clone()).norm_sqr();
        let den = (R::one() - self.z.norm_sqr()) * (R::one() - other.z.norm_sqr());
        R::one() + R::from_f64(2.0) * num / den
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// Orientation-preserving disk isometry `z ↦ (a z + b)/(b̄ z + ā)` with
/// `|a|² − |b|² = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct MoebiusMap<R> {
    pub a: Cx<R>,
    pub b: Cx<R>,
}

impl<R: Real> MoebiusMap<R> {
    pub fn identity() -> Self {
        MoebiusMap {
            a: Cx::one(),
            b: Cx::zero(),
        }
    }

    /// Builds a map from raw coefficients, rescaling so the pseudo-determinant
    /// is one.
    pub fn new(a: Cx<R>, b: Cx<R>) -> Self {
        MoebiusMap { a, b }.normalized()
    }

    pub fn det(&self) -> R {
        self.a.norm_sqr() - self.b.norm_sqr()
    }

    /// Divides by `√det`, skipping the step when cancellation in `det` would
    /// make the correction noisier than the drift it removes.
    fn normalized(self) -> Self {
        let det = self.det();
        let scale = self.a.norm_sqr().to_f64();
        let noise = 8.0 * scale * 2f64.powi(-(R::precision_bits() as i32));
        if det.to_f64() > 0.0 && noise < 1e-3 {
            let s = R::one() / det.sqrt();
            MoebiusMap {
                a: self.a.scale(&s),
                b: self.b.scale(&s),
            }
        } else {
            self
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let (a, b) = (&self.a, &self.b);
        let (c, d) = (&other.a, &other.b);
        let na = a.clone() * c.clone() + b.clone() * d.conj();
        let nb = a.clone() * d.clone() + b.clone() * c.conj();
        MoebiusMap { a: na, b: nb }.normalized()
    }

    pub fn inverse(&self) -> Self {
        MoebiusMap {
            a: self.a.conj(),
            b: -self.b.clone(),
        }
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::identity();
        for _ in 0..k {
            out = out.compose(self);
        }
        out
    }

    pub fn apply_disk(&self, z: &Cx<R>) -> Cx<R> {
        let num = self.a.clone() * z.clone() + self.b.clone();
        let den = self.b.conj() * z.clone() + self.a.conj();
        num / den
    }

    /// On `|z| = 1` the denominator is `z · conj(a z + b)`, so the image
    /// angle is `2 arg(a z + b) − θ`.
    pub fn apply_boundary(&self, p: &CirclePoint<R>) -> CirclePoint<R> {
        let w = self.boundary_numerator(p);
        CirclePoint::new(R::from_f64(2.0) * w.arg() - p.angle().clone())
    }

    /// `|M'|` at a circle point, `1/|a z + b|²`.
    pub fn derivative_on_circle(&self, p: &CirclePoint<R>) -> R {
        R::one() / self.boundary_numerator(p).norm_sqr()
    }

    fn boundary_numerator(&self, p: &CirclePoint<R>) -> Cx<R> {
        self.a.clone() * p.to_complex() + self.b.clone()
    }

    pub fn trace(&self) -> R {
        R::from_f64(2.0) * self.a.re.clone()
    }

    pub fn classify(&self, tol: &Tolerances) -> MapKind {
        let t = self.trace().abs().to_f64();
        if (t - 2.0).abs() <= tol.trace {
            if self.b.abs().to_f64() <= tol.mat.sqrt() {
                MapKind::Identity
            } else {
                MapKind::Parabolic
            }
        } else if t < 2.0 {
            MapKind::Elliptic
        } else {
            MapKind::Hyperbolic
        }
    }

    /// Entrywise distance to `other` as projective maps (overall sign ignored).
    pub fn distance(&self, other: &Self) -> f64 {
        let plus = (self.a.clone() - other.a.clone())
            .abs()
            .to_f64()
            .max((self.b.clone() - other.b.clone()).abs().to_f64());
        let minus = (self.a.clone() + other.a.clone())
            .abs()
            .to_f64()
            .max((self.b.clone() + other.b.clone()).abs().to_f64());
        plus.min(minus)
    }

    pub fn is_identity(&self, eps: f64) -> bool {
        self.distance(&Self::identity()) <= eps
    }

    /// Boundary fixed points as `(attracting, repelling)`.
    pub fn fixed_points_on_circle(
        &self,
        tol: &Tolerances,
    ) -> Result<(CirclePoint<R>, CirclePoint<R>)> {
        if self.classify(tol) != MapKind::Hyperbolic {
            return Err(Error::NotHyperbolic);
        }
        // b̄ z² + (ā − a) z − b = 0, with ā − a = −2i Im(a)
        let ima = self.a.im.clone();
        let disc = (self.b.norm_sqr() - ima.sqr()).sqrt();
        let bbar = self.b.conj();
        let z1 = Cx::new(disc.clone(), ima.clone()) / bbar.clone();
        let z2 = Cx::new(-disc, ima) / bbar;
        let p1 = CirclePoint::new(z1.arg());
        let p2 = CirclePoint::new(z2.arg());
        if self.derivative_on_circle(&p1) < self.derivative_on_circle(&p2) {
            Ok((p1, p2))
        } else {
            Ok((p2, p1))
        }
    }

    /// Normalized residual of the fixed-point equation at `p`; zero iff `p`
    /// is fixed.
    pub fn fixed_point_residual(&self, p: &CirclePoint<R>) -> f64 {
        let z = p.to_complex();
        let r = self.b.conj() * z.clone() * z.clone()
            + (self.a.conj() - self.a.clone()) * z
            - self.b.clone();
        let scale = self.a.abs() + self.b.abs();
        (r.abs() / scale).to_f64()
    }

    pub fn isometric_circle(&self, tol: &Tolerances) -> Result<Geodesic<R>> {
        if self.b.abs().to_f64() <= tol.mat {
            return Err(Error::FixesOrigin);
        }
        let center = -(self.a.conj() / self.b.conj());
        let radius = R::one() / self.b.abs();
        let half_width = radius.atan2(&R::one());
        let mid = center.arg();
        Ok(Geodesic::new(
            CirclePoint::new(mid.clone() - half_width.clone()),
            CirclePoint::new(mid + half_width),
        ))
    }

    /// Isometry sending 0 to `c`: `z ↦ (z + c)/(c̄ z + 1)` scaled to unit
    /// pseudo-determinant.
    pub fn translation_to(c: &DiskPoint<R>) -> Self {
        let s = R::one() / (R::one() - c.z.norm_sqr()).sqrt();
        MoebiusMap {
            a: Cx::new(s.clone(), R::zero()),
            b: c.z.scale(&s),
        }
    }

    pub fn rotation(angle: &R) -> Self {
        MoebiusMap {
            a: Cx::unit(&(angle.clone() / R::from_f64(2.0))),
            b: Cx::zero(),
        }
    }

    pub fn convert<S: Real>(&self) -> MoebiusMap<S> {
        MoebiusMap {
            a: self.a.convert(),
            b: self.b.convert(),
        }
    }

    pub fn to_f64_array(&self) -> [f64; 4] {
        let (ar, ai) = self.a.to_f64();
        let (br, bi) = self.b.to_f64();
        [ar, ai, br, bi]
    }
}

pub fn compose<R: Real>(m1: &MoebiusMap<R>, m2: &MoebiusMap<R>) -> MoebiusMap<R> {
    m1.compose(m2)
}

pub fn apply_boundary<R: Real>(m: &MoebiusMap<R>, p: &CirclePoint<R>) -> CirclePoint<R> {
    m.apply_boundary(p)
}

/// Rotation by `angle` about `c`.
pub fn elliptic_about<R: Real>(c: &DiskPoint<R>, angle: &R) -> MoebiusMap<R> {
    let t = MoebiusMap::translation_to(c);
    t.compose(&MoebiusMap::rotation(angle)).compose(&t.inverse())
}

pub fn classify<R: Real>(m: &MoebiusMap<R>, tol: &Tolerances) -> MapKind {
    m.classify(tol)
}

pub fn fixed_points_on_circle<R: Real>(
    m: &MoebiusMap<R>,
    tol: &Tolerances,
) -> Result<(CirclePoint<R>, CirclePoint<R>)> {
    m.fixed_points_on_circle(tol)
}

pub fn isometric_circle<R: Real>(m: &MoebiusMap<R>, tol: &Tolerances) -> Result<Geodesic<R>> {
    m.isometric_circle(tol)
}

/// Complete geodesic, identified by its two ideal endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct Geodesic<R> {
    pub ends: (CirclePoint<R>, CirclePoint<R>),
}

impl<R: Real> Geodesic<R> {
    pub fn new(p: CirclePoint<R>, q: CirclePoint<R>) -> Self {
        Geodesic { ends: (p, q) }
    }

    /// Euclidean center and radius, or `None` for a diameter.
    pub fn center_radius(&self, eps: f64) -> Option<(Cx<R>, R)> {
        let half = self.ends.0.ccw_to(&self.ends.1) / R::from_f64(2.0);
        let (s, c) = half.sin_cos();
        if c.abs().to_f64() <= eps {
            return None;
        }
        let mid = self.ends.0.rotated(&half).to_complex();
        let center = mid.scale(&(R::one() / c.clone()));
        let radius = (s / c).abs();
        Some((center, radius))
    }

    /// Distance between endpoint sets, ignoring order.
    pub fn distance(&self, other: &Self) -> f64 {
        let straight = self.ends.0.dist(&other.ends.0).max(self.ends.1.dist(&other.ends.1));
        let swapped = self.ends.0.dist(&other.ends.1).max(self.ends.1.dist(&other.ends.0));
        straight.min(swapped)
    }

    pub fn same_as(&self, other: &Self, eps: f64) -> bool {
        self.distance(other) <= eps
    }

    pub fn reversed(&self) -> Self {
        Geodesic::new(self.ends.1.clone(), self.ends.0.clone())
    }

    pub fn image(&self, m: &MoebiusMap<R>) -> Self {
        Geodesic::new(m.apply_boundary(&self.ends.0), m.apply_boundary(&self.ends.1))
    }
}

/// Direction at `p`, in the tangent frame pulled back to the origin, of the
/// geodesic ray toward `q`.
pub fn direction_at<R: Real>(p: &DiskPoint<R>, q: &DiskPoint<R>) -> R {
    let back = MoebiusMap::translation_to(p).inverse();
    back.apply_disk(&q.z).arg()
}

/// Ideal endpoint of the ray leaving `p` in direction `dir` (same frame as
/// [`direction_at`]).
pub fn ray_endpoint<R: Real>(p: &DiskPoint<R>, dir: &R) -> CirclePoint<R> {
    MoebiusMap::translation_to(p).apply_boundary(&CirclePoint::new(dir.clone()))
}

/// Geodesic through `p` and `q`, endpoints ordered `(beyond p, beyond q)`.
pub fn geodesic_between<R: Real>(
    p: &DiskPoint<R>,
    q: &DiskPoint<R>,
    tol: &Tolerances,
) -> Result<Geodesic<R>> {
    let back = MoebiusMap::translation_to(p).inverse();
    let q0 = back.apply_disk(&q.z);
    if q0.abs().to_f64() <= tol.mat {
        return Err(Error::CoincidentPoints);
    }
    let dir = q0.arg();
    Ok(Geodesic::new(
        ray_endpoint(p, &(dir.clone() + R::pi())),
        ray_endpoint(p, &dir),
    ))
}
