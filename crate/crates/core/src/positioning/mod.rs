//! Position estimation from an estimated fingerprint: a quantized lookup
//! table and adaptive Monte Carlo localization.

mod amcl;
mod lut;

pub use amcl::{
    adapt_particle_count, amcl_init, estimate, log_likelihood, propagate, resample_systematic, turn_between, weigh, weigh_gated,
    Amcl, AmclConfig, AmclOutput, Estimator, OdometryDelta, Particle, ParticleSet, Prior,
};
pub use lut::{build_lut, lut_lookup, LookupTable, LutEntry};
