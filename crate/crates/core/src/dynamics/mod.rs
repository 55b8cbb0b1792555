//! The boundary map, its deformations, orbit bookkeeping and the matching
//! structure of orbits starting in the overlap intervals.

mod map;
mod matching;
mod orbit;

pub use crate::group::{rho, sigma};
pub use map::{deformed_map, f_eval, f_iter, Branch, BoundaryMap, Deformation};
pub use matching::{
    collision_audit, giant_step_map, index_sequence, matching_index, matching_sets,
    right_giant_step_map, theta, CollisionEvent, MatchEntry, MatchIndex, MatchingTable,
};
pub use orbit::{orbit, OrbitRecord, OrbitStepper};
