use std::fmt;
use std::str::FromStr;

use super::{Drives, Engine};
use crate::electrostatics::{kink_matrix, PhysicalConstants};
use crate::error::{Error, Result};
use crate::geometry::{Layout, Role};

/// Output magnitudes below this are neither 0 nor 1.
pub const INDETERMINATE_BELOW: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogicFunction {
    Buffer,
    Inverter,
    /// `AB + BC + CA`
    Majority,
    And,
    Or,
}

impl LogicFunction {
    pub fn eval(self, inputs: &[bool]) -> Result<bool> {
        let arity_error = |want: &str| {
            Err(Error::InvalidParameter(format!(
                "{self} expects {want} inputs, layout has {}",
                inputs.len()
            )))
        };
        match self {
            LogicFunction::Buffer | LogicFunction::Inverter if inputs.len() != 1 => arity_error("1"),
            LogicFunction::Buffer => Ok(inputs[0]),
            LogicFunction::Inverter => Ok(!inputs[0]),
            LogicFunction::Majority if inputs.len() != 3 => arity_error("3"),
            LogicFunction::Majority => {
                let (a, b, c) = (inputs[0], inputs[1], inputs[2]);
                Ok(a && b || b && c || c && a)
            }
            LogicFunction::And | LogicFunction::Or if inputs.is_empty() => arity_error("at least 1"),
            LogicFunction::And => Ok(inputs.iter().all(|&x| x)),
            LogicFunction::Or => Ok(inputs.iter().any(|&x| x)),
        }
    }
}

impl fmt::Display for LogicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogicFunction::Buffer => "buffer",
            LogicFunction::Inverter => "inverter",
            LogicFunction::Majority => "majority",
            LogicFunction::And => "and",
            LogicFunction::Or => "or",
        })
    }
}

impl FromStr for LogicFunction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "buffer" => Ok(LogicFunction::Buffer),
            "inverter" => Ok(LogicFunction::Inverter),
            "majority" => Ok(LogicFunction::Majority),
            "and" => Ok(LogicFunction::And),
            "or" => Ok(LogicFunction::Or),
            other => Err(format!("unknown logic function `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowOutcome {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruthRow {
    pub inputs: Vec<bool>,
    pub expected: bool,
    /// Signed output polarization.
    pub polarization: f64,
    pub outcome: RowOutcome,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruthTable {
    pub input_ids: Vec<String>,
    pub output_id: String,
    pub function: LogicFunction,
    pub rows: Vec<TruthRow>,
}

impl TruthTable {
    pub fn passed(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome == RowOutcome::Pass).count()
    }

    pub fn all_pass(&self) -> bool {
        self.passed() == self.rows.len()
    }
}

/// Runs every drive combination through `engine` and compares the sign of
/// the output polarization with `function`. Input cells are driven when the
/// layout has any; otherwise its fixed cells are. The first driven cell is
/// the most significant bit; logic 1 is P = +1.
pub fn truth_table_check(
    layout: &Layout,
    engine: &Engine,
    constants: &PhysicalConstants,
    function: LogicFunction,
) -> Result<TruthTable> {
    let output = layout.sole_output()?;
    let mut input_ids: Vec<String> = layout
        .cells()
        .iter()
        .filter(|c| c.role() == Role::Input)
        .map(|c| c.id().to_string())
        .collect();
    if input_ids.is_empty() {
        input_ids = layout
            .cells()
            .iter()
            .filter(|c| c.role() == Role::Fixed)
            .map(|c| c.id().to_string())
            .collect();
    }
    if input_ids.is_empty() {
        return Err(Error::InvalidParameter("layout has no cell to drive".into()));
    }
    if input_ids.len() > 16 {
        return Err(Error::InvalidParameter(format!(
            "{} inputs is too many for an exhaustive table",
            input_ids.len()
        )));
    }
    let kink = kink_matrix(layout, engine.radius_of_effect(), constants)?;

    let n = input_ids.len();
    let mut rows = Vec::with_capacity(1 << n);
    for row in 0..1usize << n {
        let inputs: Vec<bool> = (0..n).map(|k| row >> (n - 1 - k) & 1 == 1).collect();
        let expected = function.eval(&inputs)?;
        let drives: Drives = input_ids
            .iter()
            .zip(&inputs)
            .map(|(id, &bit)| (id.clone(), if bit { 1.0 } else { -1.0 }))
            .collect();
        let p = engine.readout_with(layout, &kink, constants, &drives)?;
        let polarization = p.get(output.id()).expect("output cell is in the layout");
        let outcome = if polarization.abs() < INDETERMINATE_BELOW {
            RowOutcome::Indeterminate
        } else if (polarization > 0.0) == expected {
            RowOutcome::Pass
        } else {
            RowOutcome::Fail
        };
        rows.push(TruthRow {
            inputs,
            expected,
            polarization,
            outcome,
        });
    }
    Ok(TruthTable {
        input_ids,
        output_id: output.id().to_string(),
        function,
        rows,
    })
}
