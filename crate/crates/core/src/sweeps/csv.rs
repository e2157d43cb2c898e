use std::io::Write;

use super::{Comparison, SweepResult};
use crate::electrostatics::KinkMatrix;
use crate::engines::{Polarizations, RowOutcome, SimulationTrace, TruthTable};
use crate::error::Result;

/// Six significant digits in scientific notation.
pub fn format_sci(v: f64) -> String {
    format!("{v:.5e}")
}

/// `# key=value` lines, one per setting.
pub fn write_snapshot<W: Write>(w: &mut W, snapshot: &[(String, String)]) -> Result<()> {
    for (k, v) in snapshot {
        writeln!(w, "# {k}={v}")?;
    }
    Ok(())
}

pub fn emit_csv<W: Write>(result: &SweepResult, w: &mut W) -> Result<()> {
    write_snapshot(w, &result.snapshot)?;
    writeln!(w, "{}", result.variable.csv_header())?;
    for r in &result.rows {
        write!(w, "{},{},{}", format_sci(r.value), r.cell_id, format_sci(r.polarization))?;
        if let Some(k) = r.kink_energy {
            write!(w, ",{}", format_sci(k))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_kink_csv<W: Write>(kink: &KinkMatrix, w: &mut W) -> Result<()> {
    writeln!(w, "cell_i,cell_j,kink_energy_J")?;
    for (a, b, e) in kink.iter() {
        writeln!(w, "{a},{b},{}", format_sci(e))?;
    }
    Ok(())
}

pub fn write_polarizations_csv<W: Write>(p: &Polarizations, w: &mut W) -> Result<()> {
    writeln!(w, "cell_id,polarization")?;
    for (id, v) in p.iter() {
        writeln!(w, "{id},{}", format_sci(v))?;
    }
    Ok(())
}

pub fn write_trace_csv<W: Write>(trace: &SimulationTrace, w: &mut W) -> Result<()> {
    write!(w, "time_s,clock0_J,clock1_J,clock2_J,clock3_J")?;
    for id in &trace.cell_ids {
        write!(w, ",{id}_P")?;
    }
    writeln!(w)?;
    for ((t, clocks), p) in trace.times.iter().zip(&trace.clocks).zip(&trace.polarizations) {
        write!(w, "{}", format_sci(*t))?;
        for c in clocks.iter().chain(p) {
            write!(w, ",{}", format_sci(*c))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_truth_csv<W: Write>(table: &TruthTable, w: &mut W) -> Result<()> {
    for id in &table.input_ids {
        write!(w, "{id},")?;
    }
    writeln!(w, "expected,{}_P,outcome", table.output_id)?;
    for row in &table.rows {
        for &bit in &row.inputs {
            write!(w, "{},", u8::from(bit))?;
        }
        let outcome = match row.outcome {
            RowOutcome::Pass => "pass",
            RowOutcome::Fail => "fail",
            RowOutcome::Indeterminate => "indeterminate",
        };
        writeln!(w, "{},{},{outcome}", u8::from(row.expected), format_sci(row.polarization))?;
    }
    Ok(())
}

pub fn write_comparison_csv<W: Write>(c: &Comparison, w: &mut W) -> Result<()> {
    writeln!(w, "# table={}", c.table)?;
    writeln!(w, "# column={}", c.column)?;
    match c.rank_correlation {
        Some(r) => writeln!(w, "# spearman={}", format_sci(r))?,
        None => writeln!(w, "# spearman=undefined")?,
    }
    writeln!(w, "value,simulated,reference,abs_diff,rel_diff")?;
    for r in &c.rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            format_sci(r.value),
            format_sci(r.simulated),
            format_sci(r.reference),
            format_sci(r.abs_diff),
            format_sci(r.rel_diff)
        )?;
    }
    Ok(())
}
