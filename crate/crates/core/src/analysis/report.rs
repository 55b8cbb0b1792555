use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Caps, Tolerances};
use crate::dynamics::{deformed_map, matching_sets, BoundaryMap, MatchingTable};
use crate::error::{Error, Result};
use crate::geometry::{CircleArc, CirclePoint};
use crate::group::{build_domain, GroupWord, Signature};
use crate::net::{build_net, NetData};
use crate::real::Real;

use super::alpha::{alpha_from_angle, hyperbolic_alpha, FixedPointRole, ResolvedAlpha};
use super::markov::{markov_check, CapReason, MarkovVerdict};
use super::surjectivity::{
    first_match_condition, surjectivity_empirical, surjectivity_predicate, SurjectivityReason,
};
use super::transition::{aperiodicity_check, transition_matrix, Aperiodicity};

#[derive(Clone, Debug)]
pub enum AlphaSpec {
    Word(GroupWord),
    Angle(f64),
}

#[derive(Clone, Debug, Default)]
pub struct AnalysisOptions {
    pub tol: Tolerances,
    pub caps: Caps,
    /// Overlap to use when both fixed points of a word qualify.
    pub select_overlap: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlphaReport {
    pub angle: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    pub overlap: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_point: Option<FixedPointRole>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurjectiveReport {
    pub predicate: bool,
    pub empirical: bool,
    pub reason: SurjectivityReason,
    pub gaps: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MarkovReport {
    pub verdict: bool,
    pub status: &'static str,
    #[serde(rename = "W_alpha_size", skip_serializing_if = "Option::is_none")]
    pub w_alpha_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle_lengths: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap_reason: Option<CapReason>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AperiodicReport {
    /// `None` when the map was not shown to be Markov.
    pub verdict: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MatchingReport {
    #[serde(rename = "M1")]
    pub m1: [f64; 2],
    pub residual: f64,
    pub sets: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub signature: Signature,
    pub alpha: AlphaReport,
    pub surjective: SurjectiveReport,
    pub markov: MarkovReport,
    pub aperiodic: AperiodicReport,
    pub matching: MatchingReport,
    #[serde(skip)]
    pub timings: Vec<(&'static str, Duration)>,
}

fn arc_pair<R: Real>(a: &CircleArc<R>) -> [f64; 2] {
    [a.left.to_f64(), a.right.to_f64()]
}

/// Resolves `α` for `net`.
pub fn resolve_alpha<R: Real>(
    net: &NetData<R>,
    spec: &AlphaSpec,
    opts: &AnalysisOptions,
) -> Result<ResolvedAlpha<R>> {
    match spec {
        AlphaSpec::Word(w) => hyperbolic_alpha(net, w, opts.select_overlap, &opts.tol),
        AlphaSpec::Angle(a) => alpha_from_angle(net, R::from_f64(*a), &opts.tol),
    }
}

/// Verdicts for one deformation, given a prepared net.
pub fn analyze_alpha<R: Real>(
    net: &Arc<NetData<R>>,
    resolved: ResolvedAlpha<R>,
    word: Option<&GroupWord>,
    opts: &AnalysisOptions,
) -> Result<AnalysisReport> {
    let tol = &opts.tol;
    let mut timings = Vec::new();
    let mut clock = Instant::now();
    let mut lap = |name: &'static str, timings: &mut Vec<_>| {
        timings.push((name, clock.elapsed()));
        clock = Instant::now();
    };

    let i = resolved.overlap;
    let alpha = resolved.alpha.clone();
    let table = matching_sets(net, i, opts.caps.l_max, opts.caps.residual, tol)?;
    let m1 = table
        .entry(1)
        .ok_or_else(|| Error::Consistency("no first matching set".into()))?
        .arc
        .clone();
    lap("matching", &mut timings);

    let (predicate, reason) = surjectivity_predicate(net, i, &alpha, &m1, tol);
    let map = deformed_map(net.clone(), alpha.clone(), tol.branch::<R>())?;
    let coverage = surjectivity_empirical(&map, tol);
    if predicate != coverage.surjective {
        return Err(Error::Consistency(format!(
            "surjectivity predicate ({predicate}) and image coverage ({}) disagree at alpha = {}",
            coverage.surjective, alpha
        )));
    }
    let band = 10.0 * tol.point;
    if m1.left.dist(&alpha) > band && m1.right.dist(&alpha) > band {
        let raw = first_match_condition(net, i, &alpha, tol);
        let in_m1 = m1.contains(&alpha, 0.0);
        if raw != in_m1 {
            return Err(Error::Consistency(format!(
                "first matching set membership ({in_m1}) disagrees with its defining equation ({raw})"
            )));
        }
    }
    lap("surjectivity", &mut timings);

    let verdict = markov_check(&map, &opts.caps, tol)?;
    lap("markov", &mut timings);
    let (markov, aperiodic) = match &verdict {
        MarkovVerdict::Markov { partition, fates } => {
            let t = transition_matrix(&map, &partition.w, tol)?;
            let ap = aperiodicity_check(&t);
            let is_ap = matches!(ap, Aperiodicity::Aperiodic(_));
            if is_ap != coverage.surjective {
                return Err(Error::Consistency(format!(
                    "Markov map with aperiodic = {is_ap} but surjective = {}",
                    coverage.surjective
                )));
            }
            (
                MarkovReport {
                    verdict: true,
                    status: "Markov",
                    w_alpha_size: Some(partition.w.len()),
                    cycle_lengths: Some(fates.iter().filter_map(|f| f.period).collect()),
                    cap_reason: None,
                },
                AperiodicReport {
                    verdict: Some(is_ap),
                    power: match ap {
                        Aperiodicity::Aperiodic(p) => Some(p),
                        Aperiodicity::NotAperiodic => None,
                    },
                },
            )
        }
        MarkovVerdict::NotMarkovWithinCap { reason, .. } => (
            MarkovReport {
                verdict: false,
                status: "NotMarkovWithinCap",
                w_alpha_size: None,
                cycle_lengths: None,
                cap_reason: Some(*reason),
            },
            AperiodicReport {
                verdict: None,
                power: None,
            },
        ),
    };
    lap("aperiodicity", &mut timings);

    Ok(AnalysisReport {
        signature: net.domain.signature,
        alpha: AlphaReport {
            angle: alpha.to_f64(),
            word: word.map(|w| w.to_string()),
            overlap: i,
            fixed_point: resolved.role,
        },
        surjective: SurjectiveReport {
            predicate,
            empirical: coverage.surjective,
            reason,
            gaps: coverage.gaps.iter().map(arc_pair).collect(),
        },
        markov,
        aperiodic,
        matching: MatchingReport {
            m1: arc_pair(&m1),
            residual: table.residual,
            sets: table.entries.len(),
        },
        timings,
    })
}

/// Domain, net, `α`, matching sets, both surjectivity tests, the Markov
/// search and, for Markov maps, aperiodicity.
pub fn analyze<R: Real>(
    sig: Signature,
    spec: &AlphaSpec,
    opts: &AnalysisOptions,
) -> Result<AnalysisReport> {
    let start = Instant::now();
    let fd = build_domain::<R>(sig, &opts.tol)?;
    let net = Arc::new(build_net(&fd, &opts.tol)?);
    let built = start.elapsed();
    let resolved = resolve_alpha(&net, spec, opts)?;
    let word = match spec {
        AlphaSpec::Word(w) => Some(w),
        AlphaSpec::Angle(_) => None,
    };
    let mut report = analyze_alpha(&net, resolved, word, opts)?;
    report.timings.insert(0, ("build", built));
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub alpha: f64,
    pub surjective_predicate: bool,
    pub surjective_empirical: bool,
    pub markov_within_cap: bool,
}

/// Evaluates `grid` evenly spaced interior points of overlap `i`, skipping
/// any within `10 ε_point` of a partition endpoint or an end of `M_1`.
pub fn scan<R: Real>(
    net: &Arc<NetData<R>>,
    i: usize,
    grid: usize,
    opts: &AnalysisOptions,
) -> Result<Vec<ScanRow>> {
    let tol = &opts.tol;
    if !(1..=4).contains(&i) {
        return Err(Error::IndexOutOfRange { index: i, max: 4 });
    }
    let table: MatchingTable<R> = matching_sets(net, i, opts.caps.l_max, opts.caps.residual, tol)?;
    let m1 = table.entries[0].arc.clone();
    let o = net.overlap(i);
    let band = 10.0 * tol.point;
    let points: Vec<CirclePoint<R>> = (0..grid)
        .map(|k| o.at_fraction((k as f64 + 0.5) / grid as f64))
        .filter(|a| {
            net.w.iter().all(|p| p.dist(a) > band)
                && m1.left.dist(a) > band
                && m1.right.dist(a) > band
        })
        .collect();
    points
        .par_iter()
        .map(|alpha| {
            let (predicate, _) = surjectivity_predicate(net, i, alpha, &m1, tol);
            let map: BoundaryMap<R> = deformed_map(net.clone(), alpha.clone(), tol.branch::<R>())?;
            let empirical = surjectivity_empirical(&map, tol).surjective;
            let markov = markov_check(&map, &opts.caps, tol)?.is_markov();
            Ok(ScanRow {
                alpha: alpha.to_f64(),
                surjective_predicate: predicate,
                surjective_empirical: empirical,
                markov_within_cap: markov,
            })
        })
        .collect()
}
