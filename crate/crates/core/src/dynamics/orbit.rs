use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geometry::{CirclePoint, MoebiusMap};
use crate::real::Real;

use super::map::BoundaryMap;

/// Orbit of a point with the generator used at each step and the running
/// group words `γ_p`, so that `γ_p · x_0 = x_p`.
#[derive(Clone, Debug)]
pub struct OrbitRecord<R> {
    pub points: Vec<CirclePoint<R>>,
    pub letters: Vec<u8>,
    pub words: Vec<MoebiusMap<R>>,
    /// `log2` of the propagated error bound of each point.
    pub err_log2: Vec<f64>,
    /// Steps at which the point was identified with a branch cut.
    pub snaps: Vec<usize>,
    /// Number of leading points whose error bound stays below `ε_point`.
    pub certified: usize,
}

/// Step-by-step orbit evaluation with a running error bound.
///
/// Near a branch cut the point is recomputed from the last exact base point
/// through the accumulated word; a decision that neither route can settle at
/// the working precision is a [`Error::PrecisionExhausted`]. A point that
/// agrees with a cut to `2^(-P/2)` while its error bound is far smaller is
/// identified with that cut, which is how orbits that land exactly on an
/// endpoint are followed. Once the error bound exceeds `ε_point` the orbit is
/// a pseudo-orbit and branch choices are accepted as computed.
pub struct OrbitStepper<'a, R> {
    map: &'a BoundaryMap<R>,
    x: CirclePoint<R>,
    err_log2: f64,
    base: CirclePoint<R>,
    local: MoebiusMap<R>,
    word: Option<MoebiusMap<R>>,
    step: usize,
    eps_snap: f64,
    eps_point: f64,
    snapped: bool,
    horizon: Option<usize>,
}

fn rounding_log2<R: Real>() -> f64 {
    -(R::precision_bits() as f64) + 4.0
}

fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (1.0 + (lo - hi).exp2()).log2()
}

impl<'a, R: Real> OrbitStepper<'a, R> {
    pub fn new(map: &'a BoundaryMap<R>, x: CirclePoint<R>, tol: &Tolerances, track_word: bool) -> Self {
        OrbitStepper {
            map,
            base: x.clone(),
            x,
            err_log2: rounding_log2::<R>(),
            local: MoebiusMap::identity(),
            word: track_word.then(MoebiusMap::identity),
            step: 0,
            eps_snap: tol.branch::<R>(),
            eps_point: tol.point,
            snapped: false,
            horizon: None,
        }
    }

    pub fn point(&self) -> &CirclePoint<R> {
        &self.x
    }

    pub fn step_count(&self) -> usize {
        self.step
    }

    pub fn err_log2(&self) -> f64 {
        self.err_log2
    }

    pub fn error_bound(&self) -> f64 {
        self.err_log2.exp2()
    }

    pub fn word(&self) -> Option<&MoebiusMap<R>> {
        self.word.as_ref()
    }

    /// Whether the current point was identified with a cut before the last
    /// step.
    pub fn snapped(&self) -> bool {
        self.snapped
    }

    /// First step whose error bound exceeded `ε_point`, if any.
    pub fn horizon(&self) -> Option<usize> {
        self.horizon
    }

    fn nearest_cut(&self, x: &CirclePoint<R>) -> (CirclePoint<R>, f64) {
        self.map
            .cuts()
            .map(|c| (c.clone(), c.dist(x)))
            .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite distances"))
            .expect("maps have at least one branch")
    }

    fn rebase(&mut self, p: CirclePoint<R>) {
        self.x = p.clone();
        self.base = p;
        self.local = MoebiusMap::identity();
        self.err_log2 = rounding_log2::<R>();
    }

    /// Settles which branch the current point belongs to, snapping it to a
    /// cut when warranted.
    fn settle(&mut self) -> Result<()> {
        self.snapped = false;
        let (cut, d) = self.nearest_cut(&self.x);
        if d > self.eps_point {
            return Ok(());
        }
        let err = self.error_bound();
        if d <= self.eps_snap && err <= self.eps_snap / 16.0 {
            self.rebase(cut);
            self.snapped = true;
            return Ok(());
        }
        if err > self.eps_point {
            return Ok(());
        }
        let again = self.local.apply_boundary(&self.base);
        let drift = again.dist(&self.x);
        let d2 = cut.dist(&again);
        let same_side =
            self.map.branch_index(&again, 0.0) == self.map.branch_index(&self.x, 0.0);
        if drift > 4.0 * err + f64::MIN_POSITIVE || d2 <= 2.0 * err || !same_side {
            return Err(Error::PrecisionExhausted {
                step: self.step,
                distance: d2,
                bound: err,
            });
        }
        Ok(())
    }

    /// Applies the map once; returns the generator used.
    pub fn advance(&mut self) -> Result<usize> {
        self.settle()?;
        let k = self.map.branch_index(&self.x, self.eps_snap);
        let g = self.map.branches[k].generator;
        let t = self.map.generator(g);
        let deriv = t.derivative_on_circle(&self.x).to_f64().log2();
        self.x = t.apply_boundary(&self.x);
        self.local = t.compose(&self.local);
        if let Some(w) = &self.word {
            self.word = Some(t.compose(w));
        }
        self.err_log2 = log2_add(self.err_log2 + deriv, rounding_log2::<R>());
        self.step += 1;
        if self.horizon.is_none() && self.error_bound() > self.eps_point {
            self.horizon = Some(self.step);
        }
        Ok(g)
    }
}

/// Follows `x` for `steps` applications of `map`.
pub fn orbit<R: Real>(
    map: &BoundaryMap<R>,
    x: &CirclePoint<R>,
    steps: usize,
    tol: &Tolerances,
) -> Result<OrbitRecord<R>> {
    let mut st = OrbitStepper::new(map, x.clone(), tol, true);
    let mut rec = OrbitRecord {
        points: vec![x.clone()],
        letters: Vec::with_capacity(steps),
        words: vec![MoebiusMap::identity()],
        err_log2: vec![st.err_log2()],
        snaps: Vec::new(),
        certified: 0,
    };
    for _ in 0..steps {
        let g = st.advance()?;
        if st.snapped() {
            rec.snaps.push(st.step_count() - 1);
            // the snapped value replaces the point recorded for that step
            if let Some(last) = rec.points.last_mut() {
                *last = st.base.clone();
            }
        }
        rec.letters.push(g as u8);
        rec.points.push(st.point().clone());
        rec.words.push(st.word().cloned().expect("word tracking enabled"));
        rec.err_log2.push(st.err_log2());
    }
    rec.certified = st.horizon().unwrap_or(steps + 1);
    Ok(rec)
}
