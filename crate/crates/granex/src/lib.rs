//! Mass-point machinery for granular gases: best-fit rigid and affine
//! backgrounds, Reynolds-tensor balance verification against a direct N-body
//! oracle, closure-mode integration of the aggregate evolution system, and a
//! catalog of agitation-energy distributions with scalar and weak granular
//! temperatures.

pub mod csvfmt;
pub mod distrib;
pub mod dynamics;
pub mod error;
pub mod pointsys;
pub mod smallalg;

pub use error::{Error, Result};
pub use pointsys::{
    affine_fit, aggregates, discrepancy, rigid_fit, sample_cloud, AggregateState, BackgroundFit,
    EnergySplit, Entrainment, Particle, ParticleCloud, SamplerParams,
};
pub use smallalg::{axial, decompose, ricci, solve_min_norm, solve_min_norm_ten, Ten3, Vec3};
