//! Reduction compiler and verification harness for ReLU network inversion.
//!
//! Source problems (k-SAT, (0,1)-CVP, Half-Clique, Vertex Cover) are compiled
//! into ReLU networks together with an inversion query. Independent oracles
//! decide both sides exactly so the reductions can be checked end to end on
//! small instances.
//!
//! All network arithmetic is carried out over the rationals; distances are
//! compared as p-th powers so no irrational roots ever appear.

pub mod error;
pub mod harness;
pub mod instances;
pub mod net;
pub mod oracles;
pub mod reductions;
pub mod scalar;

pub use error::{Error, Result};
pub use net::{distance_pow, forward, forward_float, DistancePow, Layer, ReluNetwork};
pub use scalar::Scalar;
