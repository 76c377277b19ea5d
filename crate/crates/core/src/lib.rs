//! Heavy and strictly heavy sets of irrational circle rotations.
//!
//! A point `x` is heavy for the rotation by `θ` when every Birkhoff sum of
//! `f = χ[0,1/2] − χ(1/2,1)` along its orbit is nonnegative. The crate builds
//! certified interval covers of the heavy set from the continued fraction of
//! `θ`, estimates their dimension, and checks everything against brute-force
//! orbit sums.

pub mod cf_core;
pub mod dimension;
pub mod heavy_set;
pub mod oracle;
pub mod renorm;
