use crate::error::{Error, Result};
use crate::geometry::format_real;

/// Coherence-vector engine settings. Defaults are the reference simulator's
/// coherence-mode defaults.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherenceParams {
    /// K
    pub temperature: f64,
    /// s
    pub relaxation_time: f64,
    /// s
    pub time_step: f64,
    /// s
    pub total_time: f64,
    /// J
    pub clock_high: f64,
    /// J
    pub clock_low: f64,
    /// J
    pub clock_shift: f64,
    pub clock_amplitude_factor: f64,
    /// nm
    pub radius_of_effect: f64,
    /// nm; parsed and carried but not used by the single-layer model.
    pub layer_separation: f64,
    pub clock_periods: u32,
    /// Record every n-th integration step in the trace.
    pub record_stride: usize,
}

impl CoherenceParams {
    pub const DEFAULT: CoherenceParams = CoherenceParams {
        temperature: 1.0,
        relaxation_time: 1e-15,
        time_step: 1e-16,
        total_time: 7e-11,
        clock_high: 9.8e-22,
        clock_low: 3.8e-23,
        clock_shift: 0.0,
        clock_amplitude_factor: 2.0,
        radius_of_effect: 80.0,
        layer_separation: 11.5,
        clock_periods: 1,
        record_stride: 100,
    };

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        for (name, v) in [
            ("relaxation_time", self.relaxation_time),
            ("time_step", self.time_step),
            ("total_time", self.total_time),
            ("radius_of_effect", self.radius_of_effect),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        for (name, v) in [
            ("clock_high", self.clock_high),
            ("clock_low", self.clock_low),
            ("clock_shift", self.clock_shift),
            ("clock_amplitude_factor", self.clock_amplitude_factor),
            ("layer_separation", self.layer_separation),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite, got {v}"));
            }
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return bad(format!("temperature must be >= 0, got {}", self.temperature));
        }
        if self.time_step >= self.relaxation_time {
            return bad(format!(
                "time_step ({:e}) must be smaller than relaxation_time ({:e})",
                self.time_step, self.relaxation_time
            ));
        }
        if self.time_step > self.total_time {
            return bad("time_step exceeds total_time".into());
        }
        if self.clock_low > self.clock_high {
            return bad(format!(
                "clock_low ({:e}) exceeds clock_high ({:e})",
                self.clock_low, self.clock_high
            ));
        }
        if self.clock_periods == 0 {
            return bad("clock_periods must be at least 1".into());
        }
        if self.record_stride == 0 {
            return bad("record_stride must be at least 1".into());
        }
        Ok(())
    }

    /// Peak deviation of the clock from `clock_shift` before clamping.
    pub fn clock_amplitude(&self) -> f64 {
        self.clock_amplitude_factor * (self.clock_high - self.clock_low) / 2.0
    }

    pub fn steps(&self) -> usize {
        (self.total_time / self.time_step).round() as usize
    }

    /// Name/value pairs describing every field, in declaration order.
    pub fn snapshot(&self) -> Vec<(&'static str, String)> {
        vec![
            ("temperature_K", format!("{:e}", self.temperature)),
            ("relaxation_time_s", format!("{:e}", self.relaxation_time)),
            ("time_step_s", format!("{:e}", self.time_step)),
            ("total_time_s", format!("{:e}", self.total_time)),
            ("clock_high_J", format!("{:e}", self.clock_high)),
            ("clock_low_J", format!("{:e}", self.clock_low)),
            ("clock_shift_J", format!("{:e}", self.clock_shift)),
            ("clock_amplitude_factor", format!("{:e}", self.clock_amplitude_factor)),
            ("radius_of_effect_nm", format_real(self.radius_of_effect)),
            ("layer_separation_nm", format_real(self.layer_separation)),
            ("clock_periods", self.clock_periods.to_string()),
            ("record_stride", self.record_stride.to_string()),
        ]
    }
}

impl Default for CoherenceParams {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Bistable relaxation settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BistableParams {
    /// Tunneling energy, J.
    pub gamma: f64,
    pub convergence_tolerance: f64,
    pub max_iterations: usize,
    /// nm
    pub radius_of_effect: f64,
}

impl BistableParams {
    pub const DEFAULT: BistableParams = BistableParams {
        gamma: CoherenceParams::DEFAULT.clock_high,
        convergence_tolerance: 1e-9,
        max_iterations: 10_000,
        radius_of_effect: 80.0,
    };

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::InvalidParameter(format!("gamma must be positive, got {}", self.gamma)));
        }
        if !(self.convergence_tolerance.is_finite() && self.convergence_tolerance > 0.0) {
            return Err(Error::InvalidParameter("convergence tolerance must be positive".into()));
        }
        if !(self.radius_of_effect.is_finite() && self.radius_of_effect > 0.0) {
            return Err(Error::InvalidParameter("radius of effect must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be at least 1".into()));
        }
        Ok(())
    }

    pub fn snapshot(&self) -> Vec<(&'static str, String)> {
        vec![
            ("gamma_J", format!("{:e}", self.gamma)),
            ("convergence_tolerance", format!("{:e}", self.convergence_tolerance)),
            ("max_iterations", self.max_iterations.to_string()),
            ("radius_of_effect_nm", format_real(self.radius_of_effect)),
        ]
    }
}

impl Default for BistableParams {
    fn default() -> Self {
        Self::DEFAULT
    }
}
