//! Boundary maps of Bowen–Series type for cocompact Fuchsian triangle groups
//! and their one-parameter deformations.

pub mod analysis;
pub mod config;
pub mod error;
pub mod dynamics;
pub mod geometry;
pub mod group;
pub mod net;
pub mod real;

pub use config::{Caps, Tolerances};
pub use error::{Error, Result};
pub use real::{Mp, Real};
