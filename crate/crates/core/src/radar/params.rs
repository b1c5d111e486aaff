use serde::{Deserialize, Serialize};

use super::{wavelength, CfarConfig, ChannelConfig, DEFAULT_CARRIER_HZ, SPEED_OF_LIGHT};
use crate::error::{Error, Result};

/// Derived FMCW chirp-sequence parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadarParams {
    pub carrier_freq: f64,
    pub bandwidth: f64,
    pub n_range_bins: usize,
    pub n_doppler_bins: usize,
    pub chirp_interval: f64,
    pub range_resolution: f64,
    pub max_range: f64,
    pub velocity_resolution: f64,
    pub max_velocity: f64,
    pub tx_power: f64,
    pub tx_gain: f64,
    pub rx_gain: f64,
}

fn bin_count(ratio: f64, what: &str) -> Result<usize> {
    let n = ratio.round();
    if !(n >= 1.0) || (ratio - n).abs() > 1e-6 * ratio.abs() {
        return Err(Error::InvalidParameterization(format!(
            "{what} must be an integer number of bins, got {ratio}"
        )));
    }
    Ok(n as usize)
}

impl RadarParams {
    /// Realizes the requested resolutions with the standard FMCW relations
    /// `B = c / (2 Δd)` and `T_c = λ / (4 v_max)`.
    pub fn design(
        range_resolution: f64,
        max_range: f64,
        velocity_resolution: f64,
        max_velocity: f64,
        carrier_freq: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("range resolution", range_resolution),
            ("max range", max_range),
            ("velocity resolution", velocity_resolution),
            ("max velocity", max_velocity),
            ("carrier frequency", carrier_freq),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameterization(format!("{name} must be > 0, got {v}")));
            }
        }
        let n_range_bins = bin_count(max_range / range_resolution, "max_range / range_resolution")?;
        let n_doppler_bins = bin_count(
            2.0 * max_velocity / velocity_resolution,
            "2 * max_velocity / velocity_resolution",
        )?;
        Ok(Self {
            carrier_freq,
            bandwidth: SPEED_OF_LIGHT / (2.0 * range_resolution),
            n_range_bins,
            n_doppler_bins,
            chirp_interval: wavelength(carrier_freq) / (4.0 * max_velocity),
            range_resolution: max_range / n_range_bins as f64,
            max_range,
            velocity_resolution: 2.0 * max_velocity / n_doppler_bins as f64,
            max_velocity,
            tx_power: 1.0,
            tx_gain: 1.0,
            rx_gain: 1.0,
        })
    }

    /// 60 GHz radar with 7.5 cm range and 0.3551 m/s velocity resolution.
    pub fn proof_of_concept() -> Self {
        Self::design(0.075, 19.125, 0.3551, 5.6816, DEFAULT_CARRIER_HZ).expect("valid defaults")
    }

    pub fn wavelength(&self) -> f64 {
        wavelength(self.carrier_freq)
    }
}

/// Radar section of a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadarConfig {
    pub fc_hz: f64,
    pub delta_d_m: f64,
    pub d_max_m: f64,
    pub delta_v_mps: f64,
    pub v_max_mps: f64,
    pub noise_floor_w: f64,
    pub cfar: CfarSection,
    pub wall_rcs_m2: f64,
    pub reflection_order: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CfarSection {
    pub train: usize,
    pub guard: usize,
    pub pfa: f64,
}

impl Default for CfarSection {
    fn default() -> Self {
        Self {
            train: 8,
            guard: 2,
            pfa: 1e-4,
        }
    }
}

impl Default for RadarConfig {
    fn default() -> Self {
        Self {
            fc_hz: DEFAULT_CARRIER_HZ,
            delta_d_m: 0.075,
            d_max_m: 19.125,
            delta_v_mps: 0.3551,
            v_max_mps: 5.6816,
            noise_floor_w: 0.0,
            cfar: CfarSection::default(),
            wall_rcs_m2: 0.1,
            reflection_order: 2,
        }
    }
}

impl RadarConfig {
    pub fn params(&self) -> Result<RadarParams> {
        RadarParams::design(self.delta_d_m, self.d_max_m, self.delta_v_mps, self.v_max_mps, self.fc_hz)
    }

    pub fn cfar_config(&self) -> Result<CfarConfig> {
        CfarConfig::from_pfa(self.cfar.train, self.cfar.guard, self.cfar.pfa)
    }

    pub fn channel_config(&self) -> ChannelConfig {
        ChannelConfig {
            wall_rcs: self.wall_rcs_m2,
            reflection_order: self.reflection_order,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn proof_of_concept_bins() {
        let p = RadarParams::proof_of_concept();
        assert_eq!(p.n_range_bins, 255);
        assert_eq!(p.n_doppler_bins, 32);
        // c / (2 * 0.075)
        assert_relative_eq!(p.bandwidth, 1.998_616_386_666_666_7e9, max_relative = 1e-12);
        // (c / 60 GHz) / (4 * 5.6816)
        assert_relative_eq!(p.chirp_interval, 219.856_245e-6, max_relative = 1e-8);
        assert!((p.chirp_interval * 1e6 - 219.9).abs() < 0.05);
        assert_relative_eq!(p.wavelength(), 4.996_540_966_666_667e-3, max_relative = 1e-12);
        assert_relative_eq!(p.range_resolution, 0.075, max_relative = 1e-12);
        assert_relative_eq!(p.velocity_resolution, 0.3551, max_relative = 1e-12);
    }

    #[test]
    fn rejects_fractional_bins() {
        assert!(RadarParams::design(0.07, 19.125, 0.3551, 5.6816, 60e9).is_err());
        assert!(RadarParams::design(0.075, 19.125, 0.3, 5.6816, 60e9).is_err());
        assert!(RadarParams::design(-0.075, 19.125, 0.3551, 5.6816, 60e9).is_err());
    }

    #[test]
    fn config_defaults_match_proof_of_concept() {
        let cfg = RadarConfig::default();
        assert_eq!(cfg.params().unwrap(), RadarParams::proof_of_concept());
        let parsed: RadarConfig = serde_json::from_str(r#"{"cfar": {"pfa": 1e-3}}"#).unwrap();
        assert_eq!(parsed.cfar.train, 8);
        assert_eq!(parsed.cfar.pfa, 1e-3);
    }
}
