//! Polarization engines.
//!
//! Both engines see the layout only through its kink matrix: the local field
//! on cell `i` is `E_i = Σ_j E_kink(i, j) · P_j`. The bistable engine finds
//! the temperature-free fixed point `P = f(E / 2γ)`; the coherence engine
//! integrates a damped three-component coherence vector per cell under the
//! four-zone clock.

mod bistable;
mod clock;
mod coherence;
mod params;
mod truth;

pub use bistable::{bistable_relax, BistableOutcome};
pub use clock::{clock_gamma, hold_time, ZONES};
pub use coherence::{simulate_coherence, steady_state_polarization, SimulationTrace};
pub use params::{BistableParams, CoherenceParams};
pub use truth::{truth_table_check, LogicFunction, RowOutcome, TruthRow, TruthTable, INDETERMINATE_BELOW};

use std::collections::BTreeMap;

use crate::electrostatics::{kink_matrix, KinkMatrix, PhysicalConstants};
use crate::error::{Error, Result};
use crate::geometry::{Layout, Role};

/// Externally imposed polarizations, keyed by cell id.
pub type Drives = BTreeMap<String, f64>;

/// One polarization per cell, in layout order.
#[derive(Clone, Debug, PartialEq)]
pub struct Polarizations {
    ids: Vec<String>,
    values: Vec<f64>,
}

impl Polarizations {
    pub(crate) fn new(layout: &Layout, values: Vec<f64>) -> Self {
        debug_assert_eq!(layout.len(), values.len());
        Polarizations {
            ids: layout.cells().iter().map(|c| c.id().to_string()).collect(),
            values,
        }
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.ids.iter().position(|i| i == id).map(|k| self.values[k])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.ids.iter().map(String::as_str).zip(self.values.iter().copied())
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Drive value per cell (None for free cells). Fixed cells default to their
/// own polarization; input cells must appear in `drives`.
pub(crate) fn resolve_drives(layout: &Layout, drives: &Drives) -> Result<Vec<Option<f64>>> {
    for (id, &v) in drives {
        let cell = layout.cell(id)?;
        if !cell.role().is_driver() {
            return Err(Error::NotDrivable(id.clone()));
        }
        if !(-1.0..=1.0).contains(&v) {
            return Err(Error::InvalidParameter(format!(
                "drive for `{id}` must lie in [-1, 1], got {v}"
            )));
        }
    }
    layout
        .cells()
        .iter()
        .map(|c| match c.role() {
            Role::Input => drives
                .get(c.id())
                .copied()
                .map(Some)
                .ok_or_else(|| Error::MissingDrive(c.id().to_string())),
            Role::Fixed => Ok(Some(drives.get(c.id()).copied().or(c.fixed_polarization()).unwrap_or(0.0))),
            Role::Normal | Role::Output => Ok(None),
        })
        .collect()
}

/// Kink couplings indexed by layout position, each neighbor list sorted by
/// neighbor id so field sums have a fixed order.
#[derive(Clone, Debug)]
pub struct Couplings {
    neighbors: Vec<Vec<(usize, f64)>>,
}

impl Couplings {
    pub fn new(layout: &Layout, kink: &KinkMatrix) -> Result<Self> {
        let mut neighbors = vec![Vec::new(); layout.len()];
        for (a, b, e) in kink.iter() {
            let ia = layout
                .index_of(a)
                .ok_or_else(|| Error::ForeignKinkMatrix(a.to_string()))?;
            let ib = layout
                .index_of(b)
                .ok_or_else(|| Error::ForeignKinkMatrix(b.to_string()))?;
            neighbors[ia].push((ib, e));
            neighbors[ib].push((ia, e));
        }
        let cells = layout.cells();
        for list in &mut neighbors {
            list.sort_by(|x, y| cells[x.0].id().cmp(cells[y.0].id()));
        }
        Ok(Couplings { neighbors })
    }

    pub fn local_field(&self, cell: usize, polarizations: &[f64]) -> f64 {
        self.neighbors[cell]
            .iter()
            .fold(0.0, |acc, &(j, e)| acc + e * polarizations[j])
    }
}

/// `E_i = Σ_j E_kink(i, j) · P_j` over the neighbors of `cell` within the
/// kink matrix, summed in ascending neighbor id.
pub fn local_field(layout: &Layout, kink: &KinkMatrix, cell: &str, polarizations: &[f64]) -> Result<f64> {
    let idx = layout
        .index_of(cell)
        .ok_or_else(|| Error::UnknownCell(cell.to_string()))?;
    if polarizations.len() != layout.len() {
        return Err(Error::InvalidParameter(format!(
            "expected {} polarizations, got {}",
            layout.len(),
            polarizations.len()
        )));
    }
    Ok(Couplings::new(layout, kink)?.local_field(idx, polarizations))
}

/// Engine selection together with its parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Engine {
    Bistable(BistableParams),
    Coherence(CoherenceParams),
}

impl Engine {
    pub fn name(&self) -> &'static str {
        match self {
            Engine::Bistable(_) => "bistable",
            Engine::Coherence(_) => "coherence",
        }
    }

    pub fn radius_of_effect(&self) -> f64 {
        match self {
            Engine::Bistable(p) => p.radius_of_effect,
            Engine::Coherence(p) => p.radius_of_effect,
        }
    }

    pub fn snapshot(&self) -> Vec<(&'static str, String)> {
        match self {
            Engine::Bistable(p) => p.snapshot(),
            Engine::Coherence(p) => p.snapshot(),
        }
    }

    /// Settled polarizations: the bistable fixed point, or for the coherence
    /// engine each cell's value in the middle of its last hold window.
    pub fn readout(
        &self,
        layout: &Layout,
        constants: &PhysicalConstants,
        drives: &Drives,
    ) -> Result<Polarizations> {
        let kink = kink_matrix(layout, self.radius_of_effect(), constants)?;
        self.readout_with(layout, &kink, constants, drives)
    }

    pub fn readout_with(
        &self,
        layout: &Layout,
        kink: &KinkMatrix,
        constants: &PhysicalConstants,
        drives: &Drives,
    ) -> Result<Polarizations> {
        match self {
            Engine::Bistable(p) => Ok(bistable_relax(layout, kink, p, drives)?.polarizations),
            Engine::Coherence(p) => {
                Ok(simulate_coherence(layout, kink, p, drives, constants)?.hold_polarizations)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{builtin_layout, BuiltinLayout};

    #[test]
    fn field_examples() {
        let w = builtin_layout(BuiltinLayout::Wire(2), 2.0).unwrap();
        let k = kink_matrix(&w, 80.0, &PhysicalConstants::PAPER).unwrap();
        let ek = k.get("in", "out").unwrap();
        assert_eq!(local_field(&w, &k, "out", &[1.0, 0.0]).unwrap(), ek);
        assert_eq!(local_field(&w, &k, "out", &[0.0, 0.7]).unwrap(), 0.0);
    }

    #[test]
    fn field_is_linear() {
        let m = builtin_layout(BuiltinLayout::Majority, 2.0).unwrap();
        let k = kink_matrix(&m, 80.0, &PhysicalConstants::PAPER).unwrap();
        let p = [0.3, -0.9, 1.0, 0.25, -0.5];
        let neg: Vec<f64> = p.iter().map(|x| -x).collect();
        for c in m.cells() {
            let a = local_field(&m, &k, c.id(), &p).unwrap();
            let b = local_field(&m, &k, c.id(), &neg).unwrap();
            assert_eq!(a, -b);
        }
    }

    #[test]
    fn foreign_matrix_is_rejected() {
        let m = builtin_layout(BuiltinLayout::Majority, 2.0).unwrap();
        let w = builtin_layout(BuiltinLayout::Wire(2), 2.0).unwrap();
        let k = kink_matrix(&m, 80.0, &PhysicalConstants::PAPER).unwrap();
        assert!(matches!(Couplings::new(&w, &k), Err(Error::ForeignKinkMatrix(_))));
    }

    #[test]
    fn drive_resolution() {
        let m = builtin_layout(BuiltinLayout::Majority, 2.0).unwrap();
        let mut d = Drives::new();
        d.insert("a".into(), 1.0);
        d.insert("b".into(), -1.0);
        assert!(matches!(resolve_drives(&m, &d), Err(Error::MissingDrive(c)) if c == "c"));
        d.insert("c".into(), 1.0);
        let r = resolve_drives(&m, &d).unwrap();
        assert_eq!(r, vec![Some(1.0), Some(-1.0), Some(1.0), None, None]);
        d.insert("out".into(), 1.0);
        assert!(matches!(resolve_drives(&m, &d), Err(Error::NotDrivable(_))));

        let inv = builtin_layout(BuiltinLayout::Inv2, 2.0).unwrap();
        assert_eq!(resolve_drives(&inv, &Drives::new()).unwrap(), vec![Some(1.0), None]);
        let mut over = Drives::new();
        over.insert("in".into(), -1.0);
        assert_eq!(resolve_drives(&inv, &over).unwrap(), vec![Some(-1.0), None]);
        over.insert("in".into(), 2.0);
        assert!(resolve_drives(&inv, &over).is_err());
    }
}
