use super::{resolve_drives, BistableParams, Couplings, Drives, Polarizations};
use crate::electrostatics::KinkMatrix;
use crate::error::{Error, Result};
use crate::geometry::Layout;

#[derive(Clone, Debug, PartialEq)]
pub struct BistableOutcome {
    pub polarizations: Polarizations,
    pub iterations: usize,
}

fn saturate(x: f64) -> f64 {
    x / (1.0 + x * x).sqrt()
}

/// Gauss–Seidel relaxation of `P_i = f(E_i / 2γ)` with `f(x) = x/√(1+x²)`,
/// sweeping free cells in layout order until the largest update falls below
/// the tolerance.
pub fn bistable_relax(
    layout: &Layout,
    kink: &KinkMatrix,
    params: &BistableParams,
    drives: &Drives,
) -> Result<BistableOutcome> {
    params.validate()?;
    let driven = resolve_drives(layout, drives)?;
    let couplings = Couplings::new(layout, kink)?;
    let mut p: Vec<f64> = driven.iter().map(|d| d.unwrap_or(0.0)).collect();
    let free: Vec<usize> = (0..p.len()).filter(|&i| driven[i].is_none()).collect();
    let two_gamma = 2.0 * params.gamma;

    let mut worst = (0.0, 0usize);
    for iteration in 1..=params.max_iterations {
        worst = (0.0, 0);
        for &i in &free {
            let next = saturate(couplings.local_field(i, &p) / two_gamma);
            let delta = (next - p[i]).abs();
            if delta > worst.0 {
                worst = (delta, i);
            }
            p[i] = next;
        }
        if worst.0 < params.convergence_tolerance {
            return Ok(BistableOutcome {
                polarizations: Polarizations::new(layout, p),
                iterations: iteration,
            });
        }
    }
    Err(Error::NonConvergence {
        cell: layout.cells()[worst.1].id().to_string(),
        iterations: params.max_iterations,
        delta: worst.0,
    })
}
