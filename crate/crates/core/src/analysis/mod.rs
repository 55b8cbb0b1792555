//! Decisions for a single deformation: surjectivity, the Markov property and
//! aperiodicity, each with an independent empirical counterpart.

mod alpha;
mod markov;
mod report;
mod surjectivity;
mod transition;

pub use alpha::{alpha_from_angle, hyperbolic_alpha, FixedPointRole, ResolvedAlpha};
pub use markov::{
    markov_check, CapReason, DeformedPartition, MarkovVerdict, OrbitFate, PointOrigin,
};
pub use report::{
    analyze, analyze_alpha, resolve_alpha, scan, AlphaSpec, AnalysisOptions, AnalysisReport,
    ScanRow,
};
pub use surjectivity::{
    first_match_condition, surjectivity_empirical, surjectivity_predicate, Coverage,
    SurjectivityReason,
};
pub use transition::{aperiodicity_check, transition_matrix, Aperiodicity, BoolMatrix, TransitionMatrix};
