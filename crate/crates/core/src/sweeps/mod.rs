//! Temperature and displacement sweeps over the inverter layouts, reference
//! tables, and CSV output.
//!
//! Sweep points run in parallel; rows always come back in grid order so the
//! output does not depend on scheduling.

mod csv;
mod reference;

pub use self::csv::{
    emit_csv, format_sci, write_comparison_csv, write_kink_csv, write_polarizations_csv,
    write_snapshot, write_trace_csv, write_truth_csv,
};
pub use reference::{compare_to_reference, spearman, Comparison, ComparisonRow, ReferenceTable, TableId};

use rayon::prelude::*;

use crate::electrostatics::{kink_energy_pair, kink_matrix, PhysicalConstants};
use crate::engines::{CoherenceParams, Drives, Engine};
use crate::error::{Error, Result};
use crate::geometry::{displace_cell, previous_neighbor, Axis, Layout};

/// Temperatures (K) of the reference temperature experiment.
pub const TEMPERATURE_GRID: [f64; 15] = [
    0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 15.0, 20.0, 25.0, 30.0,
];

/// Output-cell gaps (nm) of the reference displacement experiments.
pub const GAP_GRID: [f64; 6] = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweptVariable {
    Temperature,
    Gap,
}

impl SweptVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweptVariable::Temperature => "temperature",
            SweptVariable::Gap => "gap",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            SweptVariable::Temperature => "K",
            SweptVariable::Gap => "nm",
        }
    }

    pub fn csv_header(self) -> &'static str {
        match self {
            SweptVariable::Temperature => "temperature_K,cell_id,polarization",
            SweptVariable::Gap => "gap_nm,cell_id,polarization,kink_energy_J",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub cell_id: String,
    /// Magnitude of the output polarization.
    pub polarization: f64,
    /// Kink energy between the output and its previous cell, J (gap sweeps).
    pub kink_energy: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub variable: SweptVariable,
    pub layout_name: String,
    pub engine_name: String,
    /// Every setting that produced the rows, as `key=value` pairs.
    pub snapshot: Vec<(String, String)>,
    pub rows: Vec<SweepRow>,
}

fn check_grid(grid: &[f64], what: &str, allow_zero: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter(format!("{what} grid is empty")));
    }
    for &v in grid {
        let ok = v.is_finite() && if allow_zero { v >= 0.0 } else { v > 0.0 };
        if !ok {
            return Err(Error::InvalidParameter(format!("invalid {what} grid value {v}")));
        }
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(format!("{what} grid must be strictly increasing")));
    }
    Ok(())
}

fn base_snapshot(
    layout: &Layout,
    engine: &Engine,
    constants: &PhysicalConstants,
    drives: &Drives,
) -> Vec<(String, String)> {
    let mut s = vec![
        ("layout".to_string(), layout.name().to_string()),
        ("engine".to_string(), engine.name().to_string()),
        ("constants".to_string(), constants.mode.to_string()),
        (
            "relative_permittivity".to_string(),
            format!("{:e}", constants.relative_permittivity),
        ),
    ];
    s.extend(engine.snapshot().into_iter().map(|(k, v)| (k.to_string(), v)));
    for (id, v) in drives {
        s.push((format!("drive.{id}"), format!("{v:e}")));
    }
    s
}

/// Coherence-engine run per temperature, reporting `|P|` of the single
/// output cell.
pub fn sweep_temperature(
    layout: &Layout,
    temperatures: &[f64],
    params: &CoherenceParams,
    constants: &PhysicalConstants,
    drives: &Drives,
) -> Result<SweepResult> {
    check_grid(temperatures, "temperature", true)?;
    params.validate()?;
    let output = layout.sole_output()?.id().to_string();
    let kink = kink_matrix(layout, params.radius_of_effect, constants)?;

    let rows = temperatures
        .par_iter()
        .map(|&temperature| {
            let engine = Engine::Coherence(CoherenceParams { temperature, ..*params });
            let p = engine
                .readout_with(layout, &kink, constants, drives)
                .map_err(|e| Error::AtTemperature { temperature, source: Box::new(e) })?;
            Ok(SweepRow {
                value: temperature,
                cell_id: output.clone(),
                polarization: p.get(&output).expect("output cell").abs(),
                kink_energy: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let engine = Engine::Coherence(*params);
    let mut snapshot = base_snapshot(layout, &engine, constants, drives);
    snapshot.retain(|(k, _)| k != "temperature_K");
    Ok(SweepResult {
        variable: SweptVariable::Temperature,
        layout_name: layout.name().to_string(),
        engine_name: engine.name().to_string(),
        snapshot,
        rows,
    })
}

/// Moves `output` away from (or toward) its previous neighbor so that their
/// per-axis edge gap takes each value in `gaps`, reruns `engine`, and reports
/// `|P|` of the output together with the kink energy of that pair.
///
/// The displacement direction is the previous-to-output center direction
/// snapped to a multiple of 45°.
pub fn sweep_gap(
    layout: &Layout,
    output: &str,
    gaps: &[f64],
    engine: &Engine,
    constants: &PhysicalConstants,
    drives: &Drives,
) -> Result<SweepResult> {
    check_grid(gaps, "gap", false)?;
    let target = layout.cell(output)?;
    let prev = previous_neighbor(layout, output)?;
    let prev_id = prev.id().to_string();
    let axis = Axis::toward(prev.center(), target.center())?;

    let rows = gaps
        .par_iter()
        .map(|&gap| {
            let tag = |e: Error| Error::AtGap { gap, source: Box::new(e) };
            let moved = displace_cell(layout, output, gap, axis).map_err(tag)?;
            let p = engine.readout(&moved, constants, drives).map_err(tag)?;
            let kink = kink_energy_pair(
                moved.cell(output).map_err(tag)?,
                moved.cell(&prev_id).map_err(tag)?,
                constants,
            )
            .map_err(tag)?;
            Ok(SweepRow {
                value: gap,
                cell_id: output.to_string(),
                polarization: p.get(output).expect("output cell").abs(),
                kink_energy: Some(kink),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut snapshot = base_snapshot(layout, engine, constants, drives);
    snapshot.push(("previous_cell".to_string(), prev_id));
    snapshot.push((
        "axis".to_string(),
        format!("{},{}", format_sci(axis.dx()), format_sci(axis.dy())),
    ));
    Ok(SweepResult {
        variable: SweptVariable::Gap,
        layout_name: layout.name().to_string(),
        engine_name: engine.name().to_string(),
        snapshot,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::BistableParams;
    use crate::geometry::{builtin_layout, BuiltinLayout};

    const C: PhysicalConstants = PhysicalConstants::PAPER;

    fn quick() -> CoherenceParams {
        CoherenceParams { total_time: 7e-13, ..CoherenceParams::DEFAULT }
    }

    #[test]
    fn temperature_rows_follow_grid() {
        let inv = builtin_layout(BuiltinLayout::Inv2, 2.0).unwrap();
        let r = sweep_temperature(&inv, &[0.0, 5.0, 50.0], &quick(), &C, &Drives::new()).unwrap();
        let values: Vec<f64> = r.rows.iter().map(|r| r.value).collect();
        assert_eq!(values, [0.0, 5.0, 50.0]);
        assert!(r.rows.iter().all(|r| r.cell_id == "out" && r.kink_energy.is_none()));
        assert!(r.rows[2].polarization < r.rows[0].polarization);
    }

    #[test]
    fn grid_validation() {
        let inv = builtin_layout(BuiltinLayout::Inv2, 2.0).unwrap();
        for bad in [&[][..], &[1.0, 1.0], &[2.0, 1.0], &[-1.0]] {
            assert!(sweep_temperature(&inv, bad, &quick(), &C, &Drives::new()).is_err());
        }
        let e = Engine::Bistable(BistableParams::DEFAULT);
        assert!(sweep_gap(&inv, "out", &[0.0, 1.0], &e, &C, &Drives::new()).is_err());
        assert!(sweep_gap(&inv, "zz", &[1.0], &e, &C, &Drives::new()).is_err());
    }

    #[test]
    fn engine_errors_carry_the_sweep_value() {
        let inv = builtin_layout(BuiltinLayout::Inv2, 2.0).unwrap();
        let params = CoherenceParams {
            time_step: 1e-13,
            relaxation_time: 1e-11,
            total_time: 1e-11,
            ..CoherenceParams::DEFAULT
        };
        match sweep_temperature(&inv, &[3.0], &params, &C, &Drives::new()) {
            Err(Error::AtTemperature { temperature, .. }) => assert_eq!(temperature, 3.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn singleton_gap_matches_direct_run() {
        let inv = builtin_layout(BuiltinLayout::Inv3, 2.0).unwrap();
        let engine = Engine::Bistable(BistableParams::DEFAULT);
        let r = sweep_gap(&inv, "out", &[1.5], &engine, &C, &Drives::new()).unwrap();
        assert_eq!(r.rows.len(), 1);
        let direct_layout = builtin_layout(BuiltinLayout::Inv3, 2.0)
            .and_then(|l| displace_cell(&l, "out", 1.5, Axis::new(1.0, 1.0)?))
            .unwrap();
        let p = engine.readout(&direct_layout, &C, &Drives::new()).unwrap();
        assert_eq!(r.rows[0].polarization, p.get("out").unwrap().abs());
        let k = kink_energy_pair(
            direct_layout.cell("out").unwrap(),
            direct_layout.cell("in").unwrap(),
            &C,
        )
        .unwrap();
        assert_eq!(r.rows[0].kink_energy, Some(k));
    }
}
