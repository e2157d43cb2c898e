use std::f64::consts::{FRAC_PI_2, TAU};

use super::CoherenceParams;
use crate::error::{Error, Result};

pub const ZONES: usize = 4;

/// Tunneling energy of clock `zone` at time `t`: a clamped cosine, each zone
/// lagging the previous one by a quarter period.
pub fn clock_gamma(zone: u8, t: f64, params: &CoherenceParams) -> Result<f64> {
    if zone as usize >= ZONES {
        return Err(Error::InvalidParameter(format!("clock zone {zone} out of range 0..=3")));
    }
    if !(t >= 0.0 && t <= params.total_time) {
        return Err(Error::InvalidParameter(format!(
            "time {t:e} s outside [0, {:e}]",
            params.total_time
        )));
    }
    Ok(gamma_unchecked(zone, t, params))
}

pub(crate) fn gamma_unchecked(zone: u8, t: f64, params: &CoherenceParams) -> f64 {
    let phase = TAU * params.clock_periods as f64 * t / params.total_time - zone as f64 * FRAC_PI_2;
    let raw = params.clock_shift + params.clock_amplitude() * phase.cos();
    raw.clamp(params.clock_low, params.clock_high)
}

/// Latest time not after `total_time` at which `zone` sits at the bottom of
/// its clock cycle (the middle of its hold window).
pub fn hold_time(zone: u8, params: &CoherenceParams) -> f64 {
    let periods = params.clock_periods as f64;
    let period = params.total_time / periods;
    let offset = 0.5 + zone as f64 / 4.0;
    let j = (periods - offset).floor();
    (j + offset) * period
}
