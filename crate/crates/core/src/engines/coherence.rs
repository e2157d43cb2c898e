//! Coherence-vector integration.
//!
//! Each free cell is a two-state system described by `λ = (λx, λy, λz)` with
//! `P = λz`. With `Γ = (-2γ, 0, E) / ħ` the equation of motion is
//!
//! ```text
//! dλ/dt = Γ × λ − (λ − λss) / τ,    λss = tanh(ħ|Γ| / 2kT) · Γ/|Γ|
//! ```
//!
//! advanced with explicit Euler steps. The fields `E_i` are recomputed from
//! the polarizations at the start of every step.

use super::clock::{gamma_unchecked, hold_time, ZONES};
use super::{resolve_drives, CoherenceParams, Couplings, Drives, Polarizations};
use crate::electrostatics::{KinkMatrix, PhysicalConstants};
use crate::error::{Error, Result};
use crate::geometry::Layout;

/// Largest tolerated coherence-vector norm.
const NORM_LIMIT: f64 = 1.0 + 1e-6;

/// Closed-form thermal polarization `(E/Ω)·tanh(Ω/2kT)` with
/// `Ω = √(E² + 4γ²)`. At `T = 0` the tanh factor is 1.
pub fn steady_state_polarization(
    field: f64,
    gamma: f64,
    temperature: f64,
    constants: &PhysicalConstants,
) -> Result<f64> {
    if !gamma.is_finite() || gamma < 0.0 || !field.is_finite() {
        return Err(Error::Domain(format!("invalid field {field:e} / gamma {gamma:e}")));
    }
    if field == 0.0 && gamma == 0.0 {
        return Err(Error::Domain("field and tunneling energy are both zero".into()));
    }
    if temperature.is_nan() || temperature < 0.0 {
        return Err(Error::Domain(format!("negative temperature {temperature}")));
    }
    let omega = field.hypot(2.0 * gamma);
    Ok(field / omega * thermal_factor(omega, temperature, constants.boltzmann_k))
}

fn thermal_factor(omega: f64, temperature: f64, boltzmann_k: f64) -> f64 {
    if temperature == 0.0 {
        1.0
    } else {
        (omega / (2.0 * boltzmann_k * temperature)).tanh()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationTrace {
    pub cell_ids: Vec<String>,
    /// Recorded sample times, s.
    pub times: Vec<f64>,
    /// Clock energy of each zone at each sample, J.
    pub clocks: Vec<[f64; ZONES]>,
    /// Polarization of every cell at each sample, `[sample][cell]`.
    pub polarizations: Vec<Vec<f64>>,
    /// Polarizations after the last step.
    pub final_polarizations: Polarizations,
    /// Each cell's polarization in the middle of its zone's last hold window.
    pub hold_polarizations: Polarizations,
    /// Largest `|λ|` seen over the whole run.
    pub max_coherence_norm: f64,
}

pub fn simulate_coherence(
    layout: &Layout,
    kink: &KinkMatrix,
    params: &CoherenceParams,
    drives: &Drives,
    constants: &PhysicalConstants,
) -> Result<SimulationTrace> {
    params.validate()?;
    constants.validate()?;
    let driven = resolve_drives(layout, drives)?;
    let couplings = Couplings::new(layout, kink)?;
    if layout.is_empty() {
        return Ok(SimulationTrace {
            cell_ids: vec![],
            times: vec![],
            clocks: vec![],
            polarizations: vec![],
            final_polarizations: Polarizations::new(layout, vec![]),
            hold_polarizations: Polarizations::new(layout, vec![]),
            max_coherence_norm: 0.0,
        });
    }

    let n = layout.len();
    let steps = params.steps();
    let dt = params.time_step;
    let damping = dt / params.relaxation_time;
    let hbar = constants.hbar;
    let kt2 = 2.0 * constants.boltzmann_k * params.temperature;
    let zones: Vec<usize> = layout.cells().iter().map(|c| c.clock_zone() as usize).collect();
    let hold_steps: Vec<usize> = (0..ZONES as u8)
        .map(|z| ((hold_time(z, params) / dt).round() as usize).min(steps))
        .collect();

    let mut lambda = vec![[0.0f64; 3]; n];
    let mut p: Vec<f64> = driven.iter().map(|d| d.unwrap_or(0.0)).collect();
    let mut field = vec![0.0; n];
    let mut hold = vec![0.0; n];
    let mut max_norm = 0.0f64;

    let mut times = Vec::with_capacity(steps / params.record_stride + 2);
    let mut clocks = Vec::with_capacity(times.capacity());
    let mut samples = Vec::with_capacity(times.capacity());

    for k in 0..=steps {
        let t = k as f64 * dt;
        let gamma: [f64; ZONES] = std::array::from_fn(|z| gamma_unchecked(z as u8, t, params));

        if k % params.record_stride == 0 || k == steps {
            times.push(t);
            clocks.push(gamma);
            samples.push(p.clone());
        }
        for (i, h) in hold.iter_mut().enumerate() {
            if hold_steps[zones[i]] == k {
                *h = p[i];
            }
        }
        if k == steps {
            break;
        }

        for (i, f) in field.iter_mut().enumerate() {
            *f = couplings.local_field(i, &p);
        }
        for i in 0..n {
            if driven[i].is_some() {
                continue;
            }
            let g = gamma[zones[i]];
            let e = field[i];
            let gx = -2.0 * g / hbar;
            let gz = e / hbar;
            let omega = e.hypot(2.0 * g);
            let ss = if omega > 0.0 {
                let th = if kt2 == 0.0 { 1.0 } else { (omega / kt2).tanh() };
                [th * (-2.0 * g) / omega, 0.0, th * e / omega]
            } else {
                [0.0; 3]
            };
            let [lx, ly, lz] = lambda[i];
            let next = [
                lx + dt * (-gz * ly) - damping * (lx - ss[0]),
                ly + dt * (gz * lx - gx * lz) - damping * (ly - ss[1]),
                lz + dt * (gx * ly) - damping * (lz - ss[2]),
            ];
            let norm = (next[0] * next[0] + next[1] * next[1] + next[2] * next[2]).sqrt();
            if norm.is_nan() || norm > NORM_LIMIT {
                return Err(Error::Instability {
                    cell: layout.cells()[i].id().to_string(),
                    time: t + dt,
                    norm,
                });
            }
            max_norm = max_norm.max(norm);
            lambda[i] = next;
        }
        for i in 0..n {
            if driven[i].is_none() {
                p[i] = lambda[i][2];
            }
        }
    }

    Ok(SimulationTrace {
        cell_ids: layout.cells().iter().map(|c| c.id().to_string()).collect(),
        times,
        clocks,
        polarizations: samples,
        final_polarizations: Polarizations::new(layout, p),
        hold_polarizations: Polarizations::new(layout, hold),
        max_coherence_norm: max_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::electrostatics::kink_matrix;
    use crate::geometry::{builtin_layout, BuiltinLayout};

    const C: PhysicalConstants = PhysicalConstants::PAPER;

    #[test]
    fn steady_state_examples() {
        assert_eq!(steady_state_polarization(0.0, 1e-22, 5.0, &C).unwrap(), 0.0);
        let g = 1e-22;
        let p = steady_state_polarization(2.0 * g, g, 0.0, &C).unwrap();
        assert!((p - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        let hot = steady_state_polarization(2.0 * g, g, 1e9, &C).unwrap();
        assert!(hot.abs() < 1e-6);
        assert!(steady_state_polarization(0.0, 0.0, 1.0, &C).is_err());
        assert!(steady_state_polarization(1e-22, 1e-22, -1.0, &C).is_err());
    }

    #[test]
    fn steady_state_is_odd_in_field() {
        for e in [1e-23, 3e-22, 4e-21] {
            let a = steady_state_polarization(e, 2e-22, 7.0, &C).unwrap();
            let b = steady_state_polarization(-e, 2e-22, 7.0, &C).unwrap();
            assert_eq!(a, -b);
        }
    }

    #[test]
    fn empty_layout_gives_empty_trace() {
        let l = Layout::new("empty", vec![]).unwrap();
        let k = kink_matrix(&l, 80.0, &C).unwrap();
        let t = simulate_coherence(&l, &k, &CoherenceParams::DEFAULT, &Drives::new(), &C).unwrap();
        assert!(t.times.is_empty() && t.final_polarizations.is_empty());
    }

    #[test]
    fn coupled_neighbor_follows_driver() {
        let w = builtin_layout(BuiltinLayout::Wire(2), 2.0).unwrap();
        let k = kink_matrix(&w, 80.0, &C).unwrap();
        let params = CoherenceParams { total_time: 7e-13, time_step: 1e-16, ..CoherenceParams::DEFAULT };
        let t = simulate_coherence(&w, &k, &params, &Drives::new(), &C).unwrap();
        assert!(t.hold_polarizations.get("out").unwrap() > 0.0);
        assert!(t.final_polarizations.get("out").unwrap() > 0.0);
        assert_eq!(t.final_polarizations.get("in"), Some(1.0));
        assert!(t.max_coherence_norm <= 1.0 + 1e-6);
    }

    #[test]
    fn trace_layout() {
        let w = builtin_layout(BuiltinLayout::Wire(3), 2.0).unwrap();
        let k = kink_matrix(&w, 80.0, &C).unwrap();
        let params = CoherenceParams {
            total_time: 1e-13,
            record_stride: 7,
            ..CoherenceParams::DEFAULT
        };
        let t = simulate_coherence(&w, &k, &params, &Drives::new(), &C).unwrap();
        // steps 0, 7, ..., 994 plus the final step 1000
        assert_eq!(t.times.len(), 1000 / 7 + 2);
        assert!(t.times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(t.polarizations.len(), t.times.len());
        assert!(t.polarizations.iter().all(|row| row.len() == 3));
        assert_eq!(t.polarizations.last().unwrap(), t.final_polarizations.values());
    }

    #[test]
    fn oversized_step_is_reported() {
        let w = builtin_layout(BuiltinLayout::Wire(2), 2.0).unwrap();
        let k = kink_matrix(&w, 80.0, &C).unwrap();
        // Precession of ~2 rad per step against a 1% damping rate.
        let params = CoherenceParams {
            time_step: 1e-13,
            relaxation_time: 1e-11,
            total_time: 1e-11,
            ..CoherenceParams::DEFAULT
        };
        let err = simulate_coherence(&w, &k, &params, &Drives::new(), &C).unwrap_err();
        assert!(matches!(err, Error::Instability { .. }), "{err}");
    }
}
