use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qca_core::{BistableParams, CoherenceParams, ConstantsMode};

/// Real number shown in help text in a form that parses back to the exact
/// same value. Accepts any notation `f64` parsing does, including padded
/// exponents such as `1.000000e-015`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sci(pub f64);

impl fmt::Display for Sci {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.0.abs();
        if a == 0.0 || (1e-3..1e6).contains(&a) {
            write!(f, "{}", self.0)
        } else {
            write!(f, "{:e}", self.0)
        }
    }
}

impl FromStr for Sci {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
        if v.is_finite() {
            Ok(Sci(v))
        } else {
            Err(format!("`{s}` is not finite"))
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "qca", version, about = "Quantum-dot cellular automata simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Pairwise kink energies of a layout as CSV.
    Kink(Common),
    /// Run one engine; prints the coherence trace or the settled polarizations.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Print only the settled polarization of every cell.
        #[arg(long)]
        summary: bool,
    },
    /// Exhaustive truth table of the layout's driven cells against a logic function.
    Truth {
        #[command(flatten)]
        common: Common,
        /// buffer | inverter | majority | and | or (inferred for built-in layouts).
        #[arg(long)]
        function: Option<String>,
    },
    /// Output polarization over a temperature grid (coherence engine).
    SweepTemp {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Output polarization and kink energy over output-cell gaps.
    SweepGap {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: SweepArgs,
        /// Cell to displace (defaults to the layout's output cell).
        #[arg(long)]
        cell: Option<String>,
    },
    /// List built-in layouts, or print one layout in .qcl form.
    Layouts {
        /// `builtin:NAME` or a .qcl file path.
        #[arg(long)]
        layout: Option<String>,
        /// Cell gap in nm for built-in layouts [default: 2]
        #[arg(long)]
        gap: Option<Sci>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineKind {
    Bistable,
    Coherence,
}

#[derive(Args, Debug)]
pub struct Common {
    /// `builtin:NAME` (inv2, inv3, majority, wireN) or a .qcl file path.
    #[arg(long)]
    pub layout: String,
    /// Cell gap in nm for built-in layouts [default: 2]
    #[arg(long)]
    pub gap: Option<Sci>,
    /// Polarization engine [default: bistable; coherence for sweep-temp]
    #[arg(long, value_enum)]
    pub engine: Option<EngineKind>,
    /// Physical constants [default: from the layout file, else paper]
    #[arg(long, value_enum)]
    pub constants: Option<ConstantsArg>,
    /// Drive an input or fixed cell: `ID=VALUE` with VALUE in [-1, 1]. Repeatable.
    #[arg(long = "drive", value_name = "ID=VALUE")]
    pub drives: Vec<String>,
    /// Write results here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel work (results do not depend on it).
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConstantsArg {
    Paper,
    Codata,
}

impl From<ConstantsArg> for ConstantsMode {
    fn from(c: ConstantsArg) -> Self {
        match c {
            ConstantsArg::Paper => ConstantsMode::Paper,
            ConstantsArg::Codata => ConstantsMode::Codata,
        }
    }
}

const C: CoherenceParams = CoherenceParams::DEFAULT;
const B: BistableParams = BistableParams::DEFAULT;

#[derive(Args, Debug)]
#[command(next_help_heading = "Engine parameters")]
pub struct ParamArgs {
    /// Temperature, K
    #[arg(long, value_name = "K", default_value_t = Sci(C.temperature))]
    pub temperature: Sci,
    /// Relaxation time, s
    #[arg(long, value_name = "S", default_value_t = Sci(C.relaxation_time))]
    pub relaxation_time: Sci,
    /// Time step, s
    #[arg(long, value_name = "S", default_value_t = Sci(C.time_step))]
    pub time_step: Sci,
    /// Total simulation time, s
    #[arg(long, value_name = "S", default_value_t = Sci(C.total_time))]
    pub total_time: Sci,
    /// Clock high, J
    #[arg(long, value_name = "J", default_value_t = Sci(C.clock_high))]
    pub clock_high: Sci,
    /// Clock low, J
    #[arg(long, value_name = "J", default_value_t = Sci(C.clock_low))]
    pub clock_low: Sci,
    /// Clock shift, J
    #[arg(long, value_name = "J", default_value_t = Sci(C.clock_shift))]
    pub clock_shift: Sci,
    /// Clock amplitude factor
    #[arg(long, value_name = "X", default_value_t = Sci(C.clock_amplitude_factor))]
    pub amplitude_factor: Sci,
    /// Radius of effect, nm
    #[arg(long, value_name = "NM", default_value_t = Sci(C.radius_of_effect))]
    pub radius: Sci,
    /// Layer separation, nm (recorded only)
    #[arg(long, value_name = "NM", default_value_t = Sci(C.layer_separation))]
    pub layer_separation: Sci,
    /// Clock periods over the total simulation time
    #[arg(long, value_name = "N", default_value_t = C.clock_periods)]
    pub clock_periods: u32,
    /// Record every N-th time step in traces
    #[arg(long, value_name = "N", default_value_t = C.record_stride)]
    pub record_stride: usize,
    /// Bistable tunneling energy, J
    #[arg(long, value_name = "J", default_value_t = Sci(B.gamma))]
    pub gamma: Sci,
    /// Bistable convergence tolerance
    #[arg(long, value_name = "X", default_value_t = Sci(B.convergence_tolerance))]
    pub tolerance: Sci,
    /// Bistable iteration limit
    #[arg(long, value_name = "N", default_value_t = B.max_iterations)]
    pub max_iterations: usize,
}

impl ParamArgs {
    pub fn coherence(&self) -> CoherenceParams {
        CoherenceParams {
            temperature: self.temperature.0,
            relaxation_time: self.relaxation_time.0,
            time_step: self.time_step.0,
            total_time: self.total_time.0,
            clock_high: self.clock_high.0,
            clock_low: self.clock_low.0,
            clock_shift: self.clock_shift.0,
            clock_amplitude_factor: self.amplitude_factor.0,
            radius_of_effect: self.radius.0,
            layer_separation: self.layer_separation.0,
            clock_periods: self.clock_periods,
            record_stride: self.record_stride,
        }
    }

    pub fn bistable(&self) -> BistableParams {
        BistableParams {
            gamma: self.gamma.0,
            convergence_tolerance: self.tolerance.0,
            max_iterations: self.max_iterations,
            radius_of_effect: self.radius.0,
        }
    }
}

#[derive(Args, Debug)]
#[command(next_help_heading = "Sweep")]
pub struct SweepArgs {
    /// `table1`, `table2`, `table3` or a comma-separated list
    /// [default: table1 for sweep-temp, table2 for sweep-gap]
    #[arg(long)]
    pub grid: Option<String>,
    /// Reference column to compare against, e.g. `inv3_P` or `inv3_Ek_J`.
    #[arg(long, value_name = "COLUMN")]
    pub compare: Option<String>,
    /// Where the comparison report goes [default: stderr]
    #[arg(long, value_name = "PATH")]
    pub compare_out: Option<PathBuf>,
    /// Directory holding table1.csv, table2.csv and table3.csv.
    #[arg(long, default_value = "data")]
    pub data_dir: PathBuf,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn sci_round_trips() {
        for v in [1.0, 1e-15, 9.8e-22, 0.0, 80.0, 11.5, 7e-11, -3.25e-23] {
            let s = Sci(v).to_string();
            assert_eq!(s.parse::<Sci>().unwrap().0, v, "{s}");
        }
        assert_eq!("1.000000e-015".parse::<Sci>().unwrap().0, 1e-15);
        assert_eq!("0.000000e+000".parse::<Sci>().unwrap().0, 0.0);
        assert!("inf".parse::<Sci>().is_err());
        assert!("x".parse::<Sci>().is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
