use serde::{Deserialize, Serialize};

use crate::real::Real;

/// Comparison tolerances. Every approximate comparison in the crate routes
/// through one of these.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Circle-point equality, radians.
    pub point: f64,
    /// Matrix residuals and the SU(1,1) determinant.
    pub mat: f64,
    /// `|trace| = 2` band for classification.
    pub trace: f64,
    /// Geodesic coincidence (endpoint-angle distance).
    pub geo: f64,
    /// Orbit matching at standard precision.
    pub matching: f64,
    /// Candidate closure distance during cycle detection.
    pub cycle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            point: 1e-9,
            mat: 1e-12,
            trace: 1e-9,
            geo: 1e-8,
            matching: 1e-8,
            cycle: 1e-6,
        }
    }
}

impl Tolerances {
    /// Grace used for branch decisions: `ε_point` at double precision,
    /// `2^(-P/2)` at `P`-bit precision.
    pub fn branch<R: Real>(&self) -> f64 {
        self.point.min(R::half_precision_eps())
    }

    /// Matching tolerance scaled to the working precision.
    pub fn matching<R: Real>(&self) -> f64 {
        self.matching.min(R::half_precision_eps())
    }

    /// Tolerance for the algebraic confirmation of a closed orbit.
    pub fn confirm<R: Real>(&self) -> f64 {
        self.matching::<R>()
    }
}

/// Iteration and size caps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Caps {
    /// Maximum f_α steps per tracked orbit in the Markov search.
    pub max_iter: usize,
    /// Maximum size of the deformed endpoint set.
    pub max_size: usize,
    /// Maximum number of matching sets to compute.
    pub l_max: usize,
    /// Stop computing matching sets once the unclassified tail is shorter.
    pub residual: f64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_iter: 20_000,
            max_size: 50_000,
            l_max: 200,
            residual: 1e-6,
        }
    }
}
