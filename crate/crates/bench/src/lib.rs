//! Fixtures shared by the benchmarks.

use qca_core::{builtin_layout, BuiltinLayout, CoherenceParams, Layout};

/// A straight wire of `n` cells at the default gap.
pub fn wire(n: usize) -> Layout {
    builtin_layout(BuiltinLayout::Wire(n), qca_core::geometry::DEFAULT_GAP).expect("valid wire")
}

/// Default coherence parameters shortened to `steps` integration steps.
pub fn short_run(steps: usize) -> CoherenceParams {
    let p = CoherenceParams::DEFAULT;
    CoherenceParams { total_time: p.time_step * steps as f64, ..p }
}
