//! Chirp-sequence FMCW radar model.
//!
//! The measurement chain is: geometric propagation paths (direct reflector
//! returns plus image-method wall bounces) → range-Doppler power map → 2D
//! cell-averaging CFAR → detections with RCS estimates from the inverted
//! radar equation.

mod cfar;
mod channel;
mod map;
mod params;
mod rcs;

pub use cfar::{cfar_detect, CfarConfig, Detection};
pub use channel::{multipath_power, radar_equation_power, simulate_channel, ChannelConfig, PropagationPath};
pub use map::{synthesize_map, RangeDopplerMap, SPREAD_KERNEL};
pub use params::{CfarSection, RadarConfig, RadarParams};
pub use rcs::{estimate_rcs, rcs_spherical, rcs_trihedral, to_db};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub const DEFAULT_CARRIER_HZ: f64 = 60e9;

pub fn wavelength(carrier_hz: f64) -> f64 {
    SPEED_OF_LIGHT / carrier_hz
}
