//! Dynamical balls and expansiveness classification for non-autonomous
//! discrete systems `x_{n+1} = φ_n(x_n)` on finite grids.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod balls;
pub mod catalog;
pub mod classify;
pub mod cli;
pub mod error;
pub mod rng;
pub mod space;
pub mod system;
pub mod verify;

pub use balls::{ball_scaling, dynamical_ball, DynamicalBall, ScalingEvidence};
pub use catalog::CatalogEntry;
pub use classify::{classify, ClassificationReport, ClassifyParams, Verdicts};
pub use error::{Error, Result};
pub use space::{build_grid, MetricFn, MetricKind, Point, SampledSpace, TopologyFlags};
pub use system::{
    build_orbit_table, compose, conjugate, inverse_system, kth_iterate, product, restrict, MapSequence, OrbitTable,
    PointSet,
};
