//! Signatures, the quadrilateral fundamental domain with its four side
//! pairings, and evaluation of words in the generators.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geometry::{elliptic_about, geodesic_between, DiskPoint, Geodesic, MoebiusMap};
use crate::real::{Cx, Real};

/// Reduces any integer index to the cyclic range `1..=4`.
pub fn wrap(i: isize) -> usize {
    (i - 1).rem_euclid(4) as usize + 1
}

/// Side-pairing involution on indices: `1↔2`, `3↔4`.
pub fn sigma(i: usize) -> usize {
    match wrap(i as isize) {
        1 => 2,
        2 => 1,
        3 => 4,
        _ => 3,
    }
}

/// `σ(i) + 1` taken cyclically: swaps 1 and 3, fixes 2 and 4.
pub fn rho(i: usize) -> usize {
    wrap(sigma(i) as isize + 1)
}

/// A triangle-group signature in canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "[u32; 3]", try_from = "[u32; 3]")]
pub struct Signature {
    m: [u32; 3],
}

impl Signature {
    /// Canonicalizes and validates; anything but an admissible signature is
    /// an error.
    pub fn new(m1: u32, m2: u32, m3: u32) -> Result<Self> {
        match classify_signature(m1, m2, m3)? {
            SignatureVerdict::InE(s) => Ok(s),
            verdict => Err(Error::SignatureRejected {
                signature: [m1, m2, m3],
                reason: verdict.to_string(),
            }),
        }
    }

    pub fn m(&self) -> [u32; 3] {
        self.m
    }

    /// Rotation exponents at the four vertices, `(m3, m2/2, m3, m1/2)`.
    pub fn exponents(&self) -> [usize; 4] {
        let [m1, m2, m3] = self.m;
        [m3 as usize, (m2 / 2) as usize, m3 as usize, (m1 / 2) as usize]
    }
}

impl From<Signature> for [u32; 3] {
    fn from(s: Signature) -> Self {
        s.m
    }
}

impl TryFrom<[u32; 3]> for Signature {
    type Error = Error;
    fn try_from(m: [u32; 3]) -> Result<Self> {
        Signature::new(m[0], m[1], m[2])
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.m[0], self.m[1], self.m[2])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignatureVerdict {
    InE(Signature),
    ExtensionImpossible,
    NotHyperbolic,
    Degenerate,
}

impl fmt::Display for SignatureVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignatureVerdict::InE(s) => write!(f, "admissible {s}"),
            SignatureVerdict::ExtensionImpossible => {
                write!(f, "extension property impossible (two or more odd orders)")
            }
            SignatureVerdict::NotHyperbolic => write!(f, "not hyperbolic (1/m1+1/m2+1/m3 >= 1)"),
            SignatureVerdict::Degenerate => {
                write!(f, "degenerate (an order 2 cannot be placed in the last slot)")
            }
        }
    }
}

/// Decides whether a signature admits a domain with the extension property,
/// returning the canonical ordering when it does.
pub fn classify_signature(m1: u32, m2: u32, m3: u32) -> Result<SignatureVerdict> {
    let m = [m1, m2, m3];
    if let Some(&bad) = m.iter().find(|&&x| x < 2) {
        return Err(Error::InvalidOrder(bad));
    }
    let (a, b, c) = (m1 as u64, m2 as u64, m3 as u64);
    if a * b + b * c + c * a >= a * b * c {
        return Ok(SignatureVerdict::NotHyperbolic);
    }
    let odd: Vec<u32> = m.iter().copied().filter(|x| x % 2 == 1).collect();
    if odd.len() >= 2 {
        return Ok(SignatureVerdict::ExtensionImpossible);
    }
    let has_two = m.contains(&2);
    if has_two && odd.len() == 1 {
        return Ok(SignatureVerdict::Degenerate);
    }
    let last = if let Some(&o) = odd.first() {
        o
    } else if has_two {
        2
    } else {
        m3
    };
    let mut rest: Vec<u32> = m.to_vec();
    let pos = rest
        .iter()
        .rposition(|&x| x == last)
        .expect("last entry is drawn from the signature");
    rest.remove(pos);
    Ok(SignatureVerdict::InE(Signature {
        m: [rest[0], rest[1], last],
    }))
}

/// The quadrilateral fundamental domain: vertices `v1..v4` counter-clockwise
/// (right, top, left, bottom) and side pairings `T1..T4`, where side
/// `r_i = [v_i, v_{i+1}]` lies on the isometric circle of `T_i` and
/// `T_i(r_i) = r_{σ(i)}`.
#[derive(Clone, Debug)]
pub struct FundamentalDomain<R> {
    pub signature: Signature,
    pub n: [usize; 4],
    pub vertices: [DiskPoint<R>; 4],
    pub generators: [MoebiusMap<R>; 4],
}

impl<R: Real> FundamentalDomain<R> {
    pub fn vertex(&self, i: isize) -> &DiskPoint<R> {
        &self.vertices[wrap(i) - 1]
    }

    pub fn generator(&self, i: isize) -> &MoebiusMap<R> {
        &self.generators[wrap(i) - 1]
    }

    pub fn exponent(&self, i: isize) -> usize {
        self.n[wrap(i) - 1]
    }

    /// Complete geodesic containing side `r_i`, ends ordered
    /// `(beyond v_i, beyond v_{i+1})`.
    pub fn side(&self, i: isize, tol: &Tolerances) -> Result<Geodesic<R>> {
        geodesic_between(self.vertex(i), self.vertex(i + 1), tol)
    }

    pub fn word_to_map(&self, w: &GroupWord) -> MoebiusMap<R> {
        w.letters
            .iter()
            .fold(MoebiusMap::identity(), |acc, &l| {
                acc.compose(self.generator(l as isize))
            })
    }

    pub fn to_json(&self) -> DomainJson {
        DomainJson {
            signature: self.signature.m(),
            n: self.n,
            vertices: self.vertices.clone().map(|v| {
                let (re, im) = v.z().to_f64();
                [re, im]
            }),
            generators: self.generators.clone().map(|g| g.to_f64_array()),
        }
    }
}

/// `tanh(c/2)` for the side `c` opposite angle `gamma` in the triangle with
/// angles `alpha, beta, gamma`. That is the Euclidean radius at which a point
/// sits when its hyperbolic distance from the origin is `c`.
fn side_radius<R: Real>(alpha: &R, beta: &R, gamma: &R) -> R {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let cosh = (ca * cb + gamma.cos()) / (sa * sb);
    ((cosh.clone() - R::one()) / (cosh + R::one())).sqrt()
}

/// Builds the domain for an admissible signature.
///
/// Two mirror copies of the `(π/m1, π/m2, π/m3)` triangle are glued along
/// `v2 v4`, which lies on the vertical diameter. Because every pairing is a
/// rotation about `v2` or `v4`, each side lies on its pairing's isometric
/// circle as soon as the origin sits on the open segment `v4 v2`; the
/// configuration is translated so the origin is where the diagonal `v1 v3`
/// crosses that segment, which keeps the picture balanced.
pub fn build_domain<R: Real>(sig: Signature, tol: &Tolerances) -> Result<FundamentalDomain<R>> {
    let [m1, m2, m3] = sig.m();
    let pi = R::pi();
    let ang1 = pi.clone() / R::from_i64(m1 as i64);
    let ang2 = pi.clone() / R::from_i64(m2 as i64);
    let ang3 = pi.clone() / R::from_i64(m3 as i64);

    // triangle with v4 at the origin, v2 straight up, v1 to the right
    let r24 = side_radius(&ang1, &ang2, &ang3);
    let r41 = side_radius(&ang1, &ang3, &ang2);
    let dir1 = pi.clone() / R::from_f64(2.0) - ang1.clone();
    let v1 = Cx::unit(&dir1).scale(&r41);
    let v2 = Cx::new(R::zero(), r24);
    let v3 = Cx::new(-v1.re.clone(), v1.im.clone());
    let v4 = Cx::<R>::zero();

    // the geodesic v1 v3 is a circle orthogonal to the unit circle,
    // symmetric about the imaginary axis, centred at i·k
    let (p, q) = (v1.re.clone(), v1.im.clone());
    let s = if q.to_f64().abs() <= tol.mat {
        R::zero()
    } else {
        let k = (p.sqr() + q.sqr() + R::one()) / (R::from_f64(2.0) * q.clone());
        let root = (k.sqr() - R::one()).sqrt();
        if q > R::zero() {
            k - root
        } else {
            k + root
        }
    };
    let shift = MoebiusMap::translation_to(&DiskPoint::new(Cx::new(R::zero(), s))?).inverse();
    let place = |z: Cx<R>| DiskPoint::new(shift.apply_disk(&z));
    let vertices = [place(v1)?, place(v2)?, place(v3)?, place(v4)?];

    let about2 = R::tau() / R::from_i64(m2 as i64);
    let about4 = R::tau() / R::from_i64(m1 as i64);
    let t1 = pick_rotation(&vertices[1], &about2, &vertices[0], &vertices[2], tol)?;
    let t3 = pick_rotation(&vertices[3], &about4, &vertices[2], &vertices[0], tol)?;
    let generators = [t1.clone(), t1.inverse(), t3.clone(), t3.inverse()];

    let domain = FundamentalDomain {
        signature: sig,
        n: sig.exponents(),
        vertices,
        generators,
    };
    let report = verify_relations(&domain, tol);
    if !report.all_pass() {
        return Err(Error::PlacementFailure(report.failures().join("; ")));
    }
    Ok(domain)
}

/// Of the two rotations about `center` through `±angle`, the one taking
/// `from` to `to`.
fn pick_rotation<R: Real>(
    center: &DiskPoint<R>,
    angle: &R,
    from: &DiskPoint<R>,
    to: &DiskPoint<R>,
    tol: &Tolerances,
) -> Result<MoebiusMap<R>> {
    let candidates = [-angle.clone(), angle.clone()];
    let errs: Vec<f64> = candidates
        .iter()
        .map(|a| {
            let m = elliptic_about(center, a);
            (m.apply_disk(from.z()) - to.z().clone()).abs().to_f64()
        })
        .collect();
    let best = if errs[0] <= errs[1] { 0 } else { 1 };
    if errs[best] > tol.point {
        return Err(Error::PlacementFailure(format!(
            "no rotation sign pairs the sides (errors {:e}, {:e})",
            errs[0], errs[1]
        )));
    }
    Ok(elliptic_about(center, &candidates[best]))
}

#[derive(Clone, Debug, Serialize)]
pub struct Residual {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl Residual {
    pub fn pass(&self) -> bool {
        self.residual <= self.tolerance
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub entries: Vec<Residual>,
}

impl RelationReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(Residual::pass)
    }

    pub fn failures(&self) -> Vec<String> {
        self.entries
            .iter()
            .filter(|r| !r.pass())
            .map(|r| format!("{} residual {:e}", r.name, r.residual))
            .collect()
    }

    pub fn max_matrix_residual(&self) -> f64 {
        self.entries
            .iter()
            .filter(|r| r.name.contains('='))
            .map(|r| r.residual)
            .fold(0.0, f64::max)
    }

    pub fn get(&self, name: &str) -> Option<&Residual> {
        self.entries.iter().find(|r| r.name == name)
    }
}

/// Residuals of the pairing relations, vertex-cycle relations, vertex
/// images, isometric-circle coincidences and vertex-order orientation.
pub fn verify_relations<R: Real>(fd: &FundamentalDomain<R>, tol: &Tolerances) -> RelationReport {
    let mut entries = Vec::new();
    let mut push = |name: String, residual: f64, tolerance: f64| {
        entries.push(Residual {
            name,
            residual,
            tolerance,
        })
    };
    let id = MoebiusMap::<R>::identity();
    // powers of elliptic elements pick up rounding per factor
    let mat_tol = tol.mat.max(1e3 * f64::EPSILON.max(2f64.powi(-(R::precision_bits() as i32))));
    for i in 1..=4isize {
        let s = sigma(i as usize) as isize;
        let m = fd.generator(s).compose(fd.generator(i));
        push(format!("T{s}T{i}=I"), m.distance(&id), mat_tol);
        let r = rho(i as usize) as isize;
        let m = fd.generator(r).compose(fd.generator(i - 1));
        push(format!("T{r}T{}=I", wrap(i - 1)), m.distance(&id), mat_tol);
        let img = fd.generator(i - 1).apply_disk(fd.vertex(i).z());
        let err = (img - fd.vertex(r).z().clone()).abs().to_f64();
        push(format!("T{}(v{i})->v{r}", wrap(i - 1)), err, tol.point);
    }
    let [m1, m2, m3] = fd.signature.m();
    let t24 = fd.generator(2).compose(fd.generator(4));
    push(
        format!("(T2T4)^{m3}=I"),
        t24.pow(m3 as usize).distance(&id),
        mat_tol,
    );
    push(
        format!("T2^{m2}=I"),
        fd.generator(2).pow(m2 as usize).distance(&id),
        mat_tol,
    );
    push(
        format!("T4^{m1}=I"),
        fd.generator(4).pow(m1 as usize).distance(&id),
        mat_tol,
    );
    for i in 1..=4isize {
        let dist = match (fd.side(i, tol), fd.generator(i).isometric_circle(tol)) {
            (Ok(side), Ok(circle)) => side.distance(&circle),
            _ => f64::INFINITY,
        };
        push(format!("side r{i} on isometric circle of T{i}"), dist, tol.geo);
    }
    let start = fd.vertices[0].z().arg().to_f64();
    let offsets: Vec<f64> = fd
        .vertices
        .iter()
        .map(|v| (v.z().arg().to_f64() - start).rem_euclid(std::f64::consts::TAU))
        .collect();
    let ccw = offsets.windows(2).all(|w| w[0] < w[1]);
    push(
        "vertices counter-clockwise".into(),
        if ccw { 0.0 } else { 1.0 },
        0.0,
    );
    RelationReport { entries }
}

/// Finite word in the generators; letter `i` stands for `T_i` and the
/// leftmost letter is applied last.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GroupWord {
    pub letters: Vec<u8>,
}

impl GroupWord {
    pub fn new(letters: Vec<u8>) -> Result<Self> {
        if let Some(&l) = letters.iter().find(|&&l| !(1..=4).contains(&l)) {
            return Err(Error::InvalidWord(format!("letter {l} outside 1..4")));
        }
        Ok(GroupWord { letters })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        GroupWord {
            letters: self.letters.iter().rev().map(|&l| sigma(l as usize) as u8).collect(),
        }
    }

    /// Concatenation: `self` applied after `other`.
    pub fn then_after(&self, other: &GroupWord) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        GroupWord { letters }
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Accepts letters separated by commas or whitespace, runs of digits such as
/// `4422`, and powers such as `4^2`.
impl FromStr for GroupWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
        {
            let tok = tok.trim_start_matches(['T', 't']);
            let (base, power) = match tok.split_once('^') {
                Some((b, p)) => {
                    let p: usize = p
                        .parse()
                        .map_err(|_| Error::InvalidWord(format!("bad exponent in {tok:?}")))?;
                    (b, p)
                }
                None => (tok, 1),
            };
            if base.is_empty() || !base.chars().all(|c| ('1'..='4').contains(&c)) {
                return Err(Error::InvalidWord(format!("bad token {tok:?}")));
            }
            let digits: Vec<u8> = base.bytes().map(|c| c - b'0').collect();
            for _ in 0..power {
                letters.extend_from_slice(&digits);
            }
        }
        GroupWord::new(letters)
    }
}

/// Serialized form of a domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainJson {
    pub signature: [u32; 3],
    pub n: [usize; 4],
    pub vertices: [[f64; 2]; 4],
    pub generators: [[f64; 4]; 4],
}

impl DomainJson {
    /// Rebuilds the domain at the precision of `R` and checks that the stored
    /// generators agree with it on the boundary.
    pub fn load<R: Real>(&self, tol: &Tolerances) -> Result<FundamentalDomain<R>> {
        let [m1, m2, m3] = self.signature;
        let sig = Signature::new(m1, m2, m3)?;
        let fd = build_domain::<R>(sig, tol)?;
        if fd.n != self.n {
            return Err(Error::Malformed(format!(
                "exponents {:?} do not match signature {sig}",
                self.n
            )));
        }
        for (k, g) in self.generators.iter().enumerate() {
            let stored = MoebiusMap::<f64>::new(Cx::from_f64(g[0], g[1]), Cx::from_f64(g[2], g[3]));
            let built = fd.generators[k].convert::<f64>();
            for j in 0..8 {
                let p = crate::geometry::CirclePoint::<f64>::from_f64(j as f64 * 0.785);
                if !stored
                    .apply_boundary(&p)
                    .approx_eq(&built.apply_boundary(&p), tol.point.max(1e-8))
                {
                    return Err(Error::Malformed(format!(
                        "generator T{} does not match the rebuilt domain",
                        k + 1
                    )));
                }
            }
        }
        Ok(fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MapKind;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn sigma_and_rho_tables() {
        assert_eq!([1, 2, 3, 4].map(sigma), [2, 1, 4, 3]);
        assert_eq!([1, 2, 3, 4].map(rho), [3, 2, 1, 4]);
        assert_eq!(wrap(0), 4);
        assert_eq!(wrap(5), 1);
        assert_eq!(wrap(-3), 1);
    }

    #[test]
    fn signature_verdicts() {
        let c = |a, b, d| classify_signature(a, b, d).unwrap();
        assert_eq!(c(6, 6, 3), SignatureVerdict::InE(Signature { m: [6, 6, 3] }));
        assert_eq!(c(3, 6, 6), SignatureVerdict::InE(Signature { m: [6, 6, 3] }));
        assert_eq!(c(2, 4, 6), SignatureVerdict::InE(Signature { m: [4, 6, 2] }));
        assert_eq!(c(3, 5, 6), SignatureVerdict::ExtensionImpossible);
        assert_eq!(c(4, 4, 2), SignatureVerdict::NotHyperbolic);
        assert_eq!(c(2, 3, 6), SignatureVerdict::NotHyperbolic);
        assert_eq!(c(2, 5, 6), SignatureVerdict::Degenerate);
        assert!(matches!(classify_signature(1, 4, 5), Err(Error::InvalidOrder(1))));
    }

    #[test]
    fn exponents_follow_signature() {
        assert_eq!(Signature::new(6, 6, 3).unwrap().exponents(), [3, 3, 3, 3]);
        assert_eq!(Signature::new(4, 4, 3).unwrap().exponents(), [3, 2, 3, 2]);
        assert_eq!(Signature::new(4, 6, 2).unwrap().exponents(), [2, 3, 2, 2]);
    }

    #[test]
    fn domain_663_relations_hold() {
        let fd = build_domain::<f64>(Signature::new(6, 6, 3).unwrap(), &tol()).unwrap();
        let rep = verify_relations(&fd, &tol());
        assert!(rep.all_pass(), "{:?}", rep.failures());
        assert!(rep.max_matrix_residual() < 1e-9);
        let v = &fd.vertices;
        assert!((v[1].z().abs() - v[3].z().abs()).abs() < 1e-12);
        let t24 = fd.generator(2).compose(fd.generator(4));
        assert_eq!(t24.classify(&tol()), MapKind::Elliptic);
    }

    #[test]
    fn word_evaluation() {
        let fd = build_domain::<f64>(Signature::new(6, 6, 3).unwrap(), &tol()).unwrap();
        assert!(fd.word_to_map(&GroupWord::default()).is_identity(1e-15));
        assert!(fd.word_to_map(&"2,1".parse().unwrap()).is_identity(1e-12));
        let w: GroupWord = "4,4,2,2,3,1,4,4,1,4,4,4".parse().unwrap();
        assert_eq!(fd.word_to_map(&w).classify(&tol()), MapKind::Hyperbolic);
        let w2: GroupWord = "T4^2 T2^2 T3 T1 T4^2 T1 T4^3".parse().unwrap();
        assert_eq!(w, w2);
        assert!(fd
            .word_to_map(&w)
            .compose(&fd.word_to_map(&w.inverse()))
            .is_identity(1e-9));
        assert!("4,5".parse::<GroupWord>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let sig = Signature::new(4, 4, 3).unwrap();
        let fd = build_domain::<f64>(sig, &tol()).unwrap();
        let text = serde_json::to_string(&fd.to_json()).unwrap();
        let back: DomainJson = serde_json::from_str(&text).unwrap();
        let fd2 = back.load::<f64>(&tol()).unwrap();
        assert_eq!(fd2.signature, sig);
    }
}
