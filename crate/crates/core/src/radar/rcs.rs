use std::f64::consts::PI;

use super::RadarParams;
use crate::error::{Error, Result};

/// RCS of a conducting sphere of the given diameter.
pub fn rcs_spherical(diameter: f64) -> f64 {
    PI * (0.5 * diameter).powi(2)
}

/// Peak RCS of a triangular trihedral corner reflector with edge length `edge`.
pub fn rcs_trihedral(edge: f64, wavelength: f64) -> f64 {
    4.0 * PI * edge.powi(4) / (3.0 * wavelength * wavelength)
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Inverts the monostatic radar equation for the RCS of a return of
/// `power` watts observed at `range` meters.
pub fn estimate_rcs(power: f64, range: f64, params: &RadarParams) -> Result<f64> {
    if !(range > 0.0) || !(power > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "RCS estimation needs positive power and range, got {power} W at {range} m"
        )));
    }
    let lambda = params.wavelength();
    Ok(power * (4.0 * PI).powi(3) * range.powi(4)
        / (params.tx_power * params.tx_gain * params.rx_gain * lambda * lambda))
}
